//! Magnetoquasistatic solver.
//!
//! Conductors on the driven port's nets are cut into straight current
//! filaments joined at nodes. The partial-element system `Z = R + jωL` is
//! solved together with Kirchhoff's current law for a prescribed terminal
//! current; the filament currents then give B through Biot–Savart and the
//! node potentials give the quasi-static voltage profile of the line.

pub mod cross_section;
pub mod kernel;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldSample;
use crate::geom::{Aabb, Axis, Vec3};
use crate::scene::{ProbeSet, Scene, SceneError};

/// Vacuum permeability (H/m).
pub const MU0: f64 = 4.0e-7 * PI;
pub(crate) const MU0_OVER_4PI: f64 = 1.0e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MqsError {
    #[error("scene has no port: nothing drives a current")]
    NoPortNets,
    #[error("net `{0}` has no free terminal end")]
    NoTerminal(String),
    #[error("invalid discretization: {0}")]
    InvalidDiscretization(String),
    #[error("distinct filaments {0} and {1} overlap")]
    OverlappingDistinctFilaments(usize, usize),
    #[error("filament {0} has zero conductivity")]
    ZeroConductivity(usize),
    #[error("invalid frequency {0} Hz")]
    InvalidFrequency(f64),
    #[error("singular system: {0}")]
    SingularSystem(String),
    #[error("Kirchhoff residual {0:e} exceeds tolerance")]
    ConvergenceFailure(f64),
    #[error("point ({0:e}, {1:e}, {2:e}) lies inside a conductor")]
    PointInsideConductor(f64, f64, f64),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

pub type Result<T> = std::result::Result<T, MqsError>;

/// Straight current filament of rectangular cross-section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Filament {
    pub start: Vec3,
    pub end: Vec3,
    /// Cross-section `(width, height)`; see [`Filament::cross_axes`].
    pub cross_section: (f64, f64),
    pub conductivity: f64,
    pub parent_brick: String,
}

impl Filament {
    pub fn axis(&self) -> Axis {
        let d = self.end - self.start;
        let mut best = Axis::X;
        for a in [Axis::Y, Axis::Z] {
            if d[a.index()].abs() > d[best.index()].abs() {
                best = a;
            }
        }
        best
    }

    /// +1 when the filament points along +axis, −1 otherwise.
    pub fn orientation(&self) -> f64 {
        let a = self.axis().index();
        (self.end[a] - self.start[a]).signum()
    }

    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }

    /// Axes spanned by `(width, height)`.
    pub fn cross_axes(&self) -> (Axis, Axis) {
        kernel::cross_axes(self.axis())
    }

    pub fn area(&self) -> f64 {
        self.cross_section.0 * self.cross_section.1
    }

    pub fn bounds(&self) -> Aabb {
        let (p, q) = self.cross_axes();
        let a = self.axis();
        let mut bb = Aabb {
            min: [0.0; 3],
            max: [0.0; 3],
        };
        bb.min[a.index()] = self.start[a.index()].min(self.end[a.index()]);
        bb.max[a.index()] = self.start[a.index()].max(self.end[a.index()]);
        for (ax, w) in [(p, self.cross_section.0), (q, self.cross_section.1)] {
            let c = self.start[ax.index()];
            bb.min[ax.index()] = c - 0.5 * w;
            bb.max[ax.index()] = c + 0.5 * w;
        }
        bb
    }

    fn validate(&self, index: usize) -> Result<()> {
        let d = self.end - self.start;
        let a = self.axis().index();
        let off_axis = (0..3)
            .filter(|&k| k != a)
            .map(|k| d[k].abs())
            .fold(0.0, f64::max);
        if !(self.length() > 0.0) || off_axis > 1e-9 * self.length() {
            return Err(MqsError::InvalidDiscretization(format!(
                "filament {index} is degenerate or not axis-parallel"
            )));
        }
        if !(self.cross_section.0 > 0.0 && self.cross_section.1 > 0.0) {
            return Err(MqsError::InvalidDiscretization(format!(
                "filament {index} has an empty cross-section"
            )));
        }
        Ok(())
    }
}

/// Filament counts per brick: `nx` across the width, `ny` across the
/// thickness, and `segments` uniform cuts along the current direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discretization {
    pub nx: usize,
    pub ny: usize,
    pub segments: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Self {
            nx: 3,
            ny: 3,
            segments: 8,
        }
    }
}

impl Discretization {
    pub fn new(nx: usize, ny: usize, segments: usize) -> Self {
        Self { nx, ny, segments }
    }

    pub fn refined(self) -> Self {
        Self::new(2 * self.nx, 2 * self.ny, 2 * self.segments)
    }
}

/// Node list of one brick: `(coordinate along the brick axis, node)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrickNodes {
    pub brick: usize,
    pub axis: Axis,
    pub cuts: Vec<(f64, usize)>,
}

/// Filaments plus the circuit connecting them.
#[derive(Debug, Clone, PartialEq)]
pub struct FilamentMesh {
    pub filaments: Vec<Filament>,
    /// `(from, to)` node of each filament; positive current flows from → to.
    pub ends: Vec<(usize, usize)>,
    pub node_count: usize,
    pub positive_terminal: usize,
    pub negative_terminal: usize,
    pub brick_nodes: Vec<BrickNodes>,
}

impl FilamentMesh {
    /// Builds a mesh from explicit parts; node 0..node_count.
    pub fn from_parts(
        filaments: Vec<Filament>,
        ends: Vec<(usize, usize)>,
        positive_terminal: usize,
        negative_terminal: usize,
    ) -> Result<Self> {
        if filaments.len() != ends.len() {
            return Err(MqsError::InvalidDiscretization(
                "one node pair per filament required".into(),
            ));
        }
        for (i, f) in filaments.iter().enumerate() {
            f.validate(i)?;
        }
        let node_count = ends
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .chain([positive_terminal, negative_terminal])
            .max()
            .map_or(0, |m| m + 1);
        Ok(Self {
            filaments,
            ends,
            node_count,
            positive_terminal,
            negative_terminal,
            brick_nodes: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.filaments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filaments.is_empty()
    }

    fn nodes_of(&self, brick: usize) -> Option<&BrickNodes> {
        self.brick_nodes.iter().find(|b| b.brick == brick)
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Cuts every conductor on the first port's nets into filaments.
///
/// Floating conductors and conductors on other nets carry no net current and
/// are left out.
pub fn discretize_filaments(scene: &Scene, disc: Discretization) -> Result<FilamentMesh> {
    if disc.nx == 0 || disc.ny == 0 || disc.segments == 0 {
        return Err(MqsError::InvalidDiscretization(
            "subdivision counts must be >= 1".into(),
        ));
    }
    let port = scene.ports().first().ok_or(MqsError::NoPortNets)?;
    let conductors = scene.conductors();
    let driven: Vec<usize> = (0..conductors.len())
        .filter(|&i| matches!(conductors[i].net.name(), Some(n) if n == port.positive_net || n == port.negative_net))
        .collect();
    if driven.is_empty() {
        return Err(MqsError::NoPortNets);
    }
    let is_driven = |i: usize| driven.binary_search(&i).is_ok();

    // cut coordinates per brick: uniform cuts plus side-face junctions
    let mut cuts: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for &i in &driven {
        let b = &conductors[i].bounds;
        let axis = conductors[i].axis();
        let (lo, hi) = (b.lo(axis), b.hi(axis));
        let mut c: Vec<f64> = (0..=disc.segments)
            .map(|k| lo + (hi - lo) * k as f64 / disc.segments as f64)
            .collect();
        for &(a, bb, normal, face) in scene.contacts() {
            if (a == i || bb == i) && is_driven(a) && is_driven(bb) && normal != axis {
                c.push(face.center()[axis.index()]);
            }
        }
        c.sort_by(f64::total_cmp);
        let tol = 1e-6 * (hi - lo);
        let mut dedup: Vec<f64> = Vec::with_capacity(c.len());
        for x in c {
            match dedup.last_mut() {
                Some(last) if (x - *last).abs() <= tol => {
                    // keep exact brick ends
                    if x == hi {
                        *last = hi;
                    }
                }
                _ => dedup.push(x),
            }
        }
        cuts.insert(i, dedup);
    }

    // raw nodes: one per (brick, cut)
    let mut raw_index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut raw_count = 0;
    for (&i, c) in &cuts {
        raw_index.insert(i, raw_count);
        raw_count += c.len();
    }
    let node_at = |i: usize, coord: f64| -> usize {
        let c = &cuts[&i];
        let k = c
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - coord).abs().total_cmp(&(b.1 - coord).abs()))
            .map(|(k, _)| k)
            .unwrap_or(0);
        raw_index[&i] + k
    };

    let mut uf = UnionFind::new(raw_count);
    for &(a, b, normal, face) in scene.contacts() {
        if !(is_driven(a) && is_driven(b)) {
            continue;
        }
        let node_of = |i: usize| {
            let axis = conductors[i].axis();
            let coord = if normal == axis {
                face.lo(axis)
            } else {
                face.center()[axis.index()]
            };
            node_at(i, coord)
        };
        uf.union(node_of(a), node_of(b));
    }
    let face_node = |f: &crate::scene::EndFace| node_at(f.brick, f.plane);
    for group in scene.end_ties() {
        if !group.iter().all(|f| is_driven(f.brick)) {
            continue;
        }
        let first = face_node(&group[0]);
        for f in &group[1..] {
            uf.union(first, face_node(f));
        }
    }

    let pos_faces = scene
        .terminal_faces(&port.positive_net)
        .ok_or_else(|| MqsError::NoTerminal(port.positive_net.clone()))?;
    let neg_faces = scene
        .terminal_faces(&port.negative_net)
        .ok_or_else(|| MqsError::NoTerminal(port.negative_net.clone()))?;
    let pos_raw = uf.find(face_node(&pos_faces[0]));
    let neg_raw = uf.find(face_node(&neg_faces[0]));
    if pos_raw == neg_raw {
        return Err(MqsError::SingularSystem(
            "port terminals are shorted together".into(),
        ));
    }

    // compact numbering of merged nodes
    let mut compact: BTreeMap<usize, usize> = BTreeMap::new();
    let mut node_id = |uf: &mut UnionFind, raw: usize| -> usize {
        let r = uf.find(raw);
        let n = compact.len();
        *compact.entry(r).or_insert(n)
    };

    let mut filaments = Vec::new();
    let mut ends = Vec::new();
    let mut brick_nodes = Vec::new();
    for (&i, c) in &cuts {
        let brick = &conductors[i];
        let sigma = scene.conductivity(i)?;
        let axis = brick.axis();
        let (p, q) = kernel::cross_axes(axis);
        let b = &brick.bounds;
        let (w, h) = (b.extent(p) / disc.nx as f64, b.extent(q) / disc.ny as f64);
        let ids: Vec<usize> = (0..c.len())
            .map(|k| node_id(&mut uf, raw_index[&i] + k))
            .collect();
        brick_nodes.push(BrickNodes {
            brick: i,
            axis,
            cuts: c.iter().copied().zip(ids.iter().copied()).collect(),
        });
        for k in 0..c.len() - 1 {
            for ix in 0..disc.nx {
                for iy in 0..disc.ny {
                    let mut start = Vec3::zeros();
                    start[p.index()] = b.lo(p) + (ix as f64 + 0.5) * w;
                    start[q.index()] = b.lo(q) + (iy as f64 + 0.5) * h;
                    let mut end = start;
                    start[axis.index()] = c[k];
                    end[axis.index()] = c[k + 1];
                    filaments.push(Filament {
                        start,
                        end,
                        cross_section: (w, h),
                        conductivity: sigma,
                        parent_brick: brick.id.clone(),
                    });
                    ends.push((ids[k], ids[k + 1]));
                }
            }
        }
    }
    let positive_terminal = node_id(&mut uf, pos_raw);
    let negative_terminal = node_id(&mut uf, neg_raw);
    Ok(FilamentMesh {
        filaments,
        ends,
        node_count: compact.len(),
        positive_terminal,
        negative_terminal,
        brick_nodes,
    })
}

/// Partial inductance between two filaments (H).
///
/// Perpendicular filaments do not couple; antiparallel ones give a negative
/// mutual term. Pass the same filament twice for the self term.
pub fn partial_inductance(fi: &Filament, fj: &Filament) -> Result<f64> {
    let axis = fi.axis();
    if fj.axis() != axis {
        return Ok(0.0);
    }
    let (a, b) = (fi.bounds(), fj.bounds());
    if a != b && a.overlaps_interior(&b) {
        return Err(MqsError::OverlappingDistinctFilaments(0, 1));
    }
    let k = kernel::parallel_bar_kernel(&a, &b, axis);
    Ok(MU0_OVER_4PI * k * fi.orientation() * fj.orientation())
}

/// Partial inductance matrix (H), assembled in parallel row by row.
pub fn inductance_matrix(filaments: &[Filament]) -> Result<DMatrix<f64>> {
    let n = filaments.len();
    let rows: Vec<Result<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| {
                    partial_inductance(&filaments[i], &filaments[j]).map_err(|e| match e {
                        MqsError::OverlappingDistinctFilaments(..) => {
                            MqsError::OverlappingDistinctFilaments(i, j)
                        }
                        e => e,
                    })
                })
                .collect()
        })
        .collect();
    let mut l = DMatrix::zeros(n, n);
    for (i, row) in rows.into_iter().enumerate() {
        for (k, v) in row?.into_iter().enumerate() {
            l[(i, i + k)] = v;
            l[(i + k, i)] = v;
        }
    }
    Ok(l)
}

/// Partial-element system of a filament mesh at one frequency.
#[derive(Debug, Clone)]
pub struct FilamentSystem {
    pub mesh: FilamentMesh,
    /// Filament resistances (Ω), the diagonal of R.
    pub resistance: Vec<f64>,
    /// Partial inductance matrix (H).
    pub inductance: DMatrix<f64>,
    pub frequency: f64,
}

impl FilamentSystem {
    /// `Z = R + j·2πf·L` (Ω).
    pub fn impedance(&self) -> DMatrix<Complex64> {
        let w = 2.0 * PI * self.frequency;
        let n = self.resistance.len();
        DMatrix::from_fn(n, n, |i, j| {
            let r = if i == j { self.resistance[i] } else { 0.0 };
            Complex64::new(r, w * self.inductance[(i, j)])
        })
    }

    /// Same mesh and inductances at another frequency.
    pub fn at_frequency(&self, frequency: f64) -> Result<Self> {
        check_frequency(frequency)?;
        Ok(Self {
            frequency,
            ..self.clone()
        })
    }
}

fn check_frequency(f: f64) -> Result<()> {
    if !(f >= 0.0) || !f.is_finite() {
        return Err(MqsError::InvalidFrequency(f));
    }
    Ok(())
}

pub fn assemble_impedance(mesh: FilamentMesh, frequency: f64) -> Result<FilamentSystem> {
    check_frequency(frequency)?;
    let mut resistance = Vec::with_capacity(mesh.len());
    for (i, f) in mesh.filaments.iter().enumerate() {
        if !(f.conductivity > 0.0) {
            return Err(MqsError::ZeroConductivity(i));
        }
        resistance.push(f.length() / (f.conductivity * f.area()));
    }
    let inductance = inductance_matrix(&mesh.filaments)?;
    Ok(FilamentSystem {
        mesh,
        resistance,
        inductance,
        frequency,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurrentSolution {
    /// Filament currents (A, peak phasors), positive along from → to.
    pub currents: Vec<Complex64>,
    /// Node potentials relative to the negative terminal (V).
    pub node_potentials: Vec<Complex64>,
    pub frequency: f64,
    pub terminal_current: Complex64,
}

impl CurrentSolution {
    /// Impedance seen at the port, `V+/I`.
    pub fn port_impedance(&self, mesh: &FilamentMesh) -> Complex64 {
        self.node_potentials[mesh.positive_terminal] / self.terminal_current
    }

    /// Ohmic loss `Σ R_k |I_k|² / 2` (W).
    pub fn ohmic_loss(&self, system: &FilamentSystem) -> f64 {
        self.currents
            .iter()
            .zip(&system.resistance)
            .map(|(i, r)| 0.5 * r * i.norm_sqr())
            .sum()
    }

    /// Largest Kirchhoff current-law violation over all nodes (A).
    pub fn kcl_residual(&self, mesh: &FilamentMesh) -> f64 {
        let mut net = vec![Complex64::new(0.0, 0.0); mesh.node_count];
        for (&(a, b), i) in mesh.ends.iter().zip(&self.currents) {
            net[a] += i;
            net[b] -= i;
        }
        net[mesh.positive_terminal] -= self.terminal_current;
        net[mesh.negative_terminal] += self.terminal_current;
        net.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Potential at a point of a driven brick, interpolated linearly between
    /// the brick's nodes along its axis. `None` for undriven bricks.
    pub fn potential_on_brick(
        &self,
        mesh: &FilamentMesh,
        brick: usize,
        point: &Vec3,
    ) -> Option<Complex64> {
        let nodes = mesh.nodes_of(brick)?;
        let x = point[nodes.axis.index()];
        let cuts = &nodes.cuts;
        let v = |k: usize| self.node_potentials[cuts[k].1];
        if x <= cuts[0].0 {
            return Some(v(0));
        }
        for k in 0..cuts.len() - 1 {
            let (x0, x1) = (cuts[k].0, cuts[k + 1].0);
            if x <= x1 {
                let t = (x - x0) / (x1 - x0);
                return Some(v(k) * (1.0 - t) + v(k + 1) * t);
            }
        }
        Some(v(cuts.len() - 1))
    }
}

/// Solves the filament currents for a current `terminal_current` entering
/// the positive terminal and leaving the negative one.
pub fn solve_currents(
    system: &FilamentSystem,
    terminal_current: Complex64,
) -> Result<CurrentSolution> {
    let mesh = &system.mesh;
    let nf = mesh.len();
    let nn = mesh.node_count;
    if nf == 0 {
        return Err(MqsError::SingularSystem("no filaments".into()));
    }
    check_connected(mesh)?;

    // reduced node numbering without the reference (negative terminal)
    let reduced: Vec<Option<usize>> = {
        let mut k = 0;
        (0..nn)
            .map(|n| {
                if n == mesh.negative_terminal {
                    None
                } else {
                    k += 1;
                    Some(k - 1)
                }
            })
            .collect()
    };
    let m = nn - 1;

    // X = Z⁻¹ Aᵀ, with A the node × filament incidence restricted to non-reference nodes
    let mut at = DMatrix::<Complex64>::zeros(nf, m);
    for (f, &(a, b)) in mesh.ends.iter().enumerate() {
        if let Some(ra) = reduced[a] {
            at[(f, ra)] += Complex64::new(1.0, 0.0);
        }
        if let Some(rb) = reduced[b] {
            at[(f, rb)] -= Complex64::new(1.0, 0.0);
        }
    }
    let lu = system.impedance().lu();
    let x = lu
        .solve(&at)
        .ok_or_else(|| MqsError::SingularSystem("filament impedance matrix is singular".into()))?;
    let y = at.transpose() * &x;
    let mut rhs = nalgebra::DVector::<Complex64>::zeros(m);
    if let Some(p) = reduced[mesh.positive_terminal] {
        rhs[p] = terminal_current;
    }
    let v = y
        .lu()
        .solve(&rhs)
        .ok_or_else(|| MqsError::SingularSystem("nodal admittance matrix is singular".into()))?;
    let currents = &x * &v;
    let mut node_potentials = vec![Complex64::new(0.0, 0.0); nn];
    for n in 0..nn {
        if let Some(r) = reduced[n] {
            node_potentials[n] = v[r];
        }
    }
    let sol = CurrentSolution {
        currents: currents.iter().copied().collect(),
        node_potentials,
        frequency: system.frequency,
        terminal_current,
    };
    let scale = terminal_current.norm().max(f64::MIN_POSITIVE);
    let residual = sol.kcl_residual(mesh);
    if residual > 1e-10 * scale && terminal_current.norm() > 0.0 {
        return Err(MqsError::ConvergenceFailure(residual / scale));
    }
    Ok(sol)
}

fn check_connected(mesh: &FilamentMesh) -> Result<()> {
    let mut uf = UnionFind::new(mesh.node_count);
    for &(a, b) in &mesh.ends {
        uf.union(a, b);
    }
    let root = uf.find(mesh.negative_terminal);
    if uf.find(mesh.positive_terminal) != root {
        return Err(MqsError::SingularSystem(
            "port terminals are not connected".into(),
        ));
    }
    if (0..mesh.node_count).any(|n| uf.find(n) != root) {
        return Err(MqsError::SingularSystem(
            "disconnected conductor island".into(),
        ));
    }
    Ok(())
}

/// Field of a straight thin segment carrying unit current, times μ0/4π.
fn segment_field(start: &Vec3, end: &Vec3, point: &Vec3) -> Vec3 {
    let d = end - start;
    let len = d.norm();
    let u = d / len;
    let a = point - start;
    let b = point - end;
    let along = a.dot(&u);
    let perp = a - u * along;
    let rho2 = perp.norm_squared();
    if rho2 <= (1e-12 * len).powi(2) {
        return Vec3::zeros();
    }
    let (na, nb) = (a.norm(), b.norm());
    let factor = along / na - b.dot(&u) / nb;
    u.cross(&perp) * (factor / rho2)
}

/// Complex B phasor (T) at `point` from all filament currents.
pub fn biot_savart(
    solution: &CurrentSolution,
    filaments: &[Filament],
    point: &Vec3,
) -> Result<[Complex64; 3]> {
    if filaments.iter().any(|f| f.bounds().contains_strict(point)) {
        return Err(MqsError::PointInsideConductor(point[0], point[1], point[2]));
    }
    let mut b = [Complex64::new(0.0, 0.0); 3];
    for (f, i) in filaments.iter().zip(&solution.currents) {
        let g = segment_field(&f.start, &f.end, point) * MU0_OVER_4PI;
        for k in 0..3 {
            b[k] += i * g[k];
        }
    }
    Ok(b)
}

/// B at every point of a probe set, evaluated in parallel.
pub fn b_field_at_probes(
    solution: &CurrentSolution,
    mesh: &FilamentMesh,
    probes: &ProbeSet,
) -> Result<Vec<FieldSample>> {
    probes
        .points
        .par_iter()
        .map(|p| {
            let b = biot_savart(solution, &mesh.filaments, p)?;
            Ok(FieldSample::magnetic(*p, b))
        })
        .collect()
}

/// B at the probes of every probe set of the scene.
pub fn b_field_at_scene_probes(
    scene: &Scene,
    solution: &CurrentSolution,
    mesh: &FilamentMesh,
) -> Result<Vec<FieldSample>> {
    let mut out = Vec::new();
    for set in scene.probes() {
        out.extend(b_field_at_probes(solution, mesh, set)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bar(start: Vec3, end: Vec3, w: f64, h: f64) -> Filament {
        Filament {
            start,
            end,
            cross_section: (w, h),
            conductivity: 3e7,
            parent_brick: "b".into(),
        }
    }

    #[test]
    fn perpendicular_filaments_do_not_couple() {
        let a = bar(
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1e-6, 0.0, 0.0),
            1e-7,
            1e-7,
        );
        let b = bar(
            Vec3::new(0.0, 1e-6, 0.0),
            Vec3::new(0.0, 2e-6, 0.0),
            1e-7,
            1e-7,
        );
        assert_eq!(partial_inductance(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn mutual_is_symmetric_and_antiparallel_negative() {
        let a = bar(
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(3e-6, 0.0, 0.0),
            1e-7,
            5e-8,
        );
        let b = bar(
            Vec3::new(1e-6, 4e-7, 1e-7),
            Vec3::new(5e-6, 4e-7, 1e-7),
            2e-7,
            1e-7,
        );
        let (mab, mba) = (
            partial_inductance(&a, &b).unwrap(),
            partial_inductance(&b, &a).unwrap(),
        );
        assert_eq!(mab, mba);
        assert!(mab > 0.0);
        let rev = bar(b.end, b.start, 2e-7, 1e-7);
        assert_eq!(partial_inductance(&a, &rev).unwrap(), -mab);
    }

    #[test]
    fn resistance_of_single_filament() {
        let f = bar(Vec3::zeros(), Vec3::new(10e-6, 0.0, 0.0), 100e-9, 100e-9);
        let mesh = FilamentMesh::from_parts(vec![f], vec![(0, 1)], 0, 1).unwrap();
        let sys = assemble_impedance(mesh, 0.0).unwrap();
        assert!((sys.resistance[0] - 33.333333333333336).abs() < 1e-9);
        let z = sys.impedance();
        assert_eq!(z[(0, 0)].im, 0.0);
    }

    #[test]
    fn infinite_wire_limit() {
        let l = 1e-3;
        let f = bar(
            Vec3::new(-l / 2.0, 0.0, 0.0),
            Vec3::new(l / 2.0, 0.0, 0.0),
            1e-9,
            1e-9,
        );
        let sol = CurrentSolution {
            currents: vec![Complex64::new(1e-3, 0.0)],
            node_potentials: vec![],
            frequency: 0.0,
            terminal_current: Complex64::new(1e-3, 0.0),
        };
        let r = 100e-9;
        let b = biot_savart(&sol, std::slice::from_ref(&f), &Vec3::new(0.0, r, 0.0)).unwrap();
        let want = MU0 * 1e-3 / (2.0 * PI * r);
        assert!((b[2].re - want).abs() < 1e-6 * want);
        // on the axis extension
        let b = biot_savart(&sol, &[f], &Vec3::new(l, 0.0, 0.0)).unwrap();
        assert!(b.iter().all(|c| c.norm() == 0.0));
    }
}
