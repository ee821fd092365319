//! Electroquasistatic panel solver.
//!
//! Every conductor face is tiled with rectangular panels carrying a uniform
//! surface charge. Potentials are matched at panel centers in a homogeneous
//! medium of relative permittivity `eps_eff`. Floating conductors (dummies,
//! gates) are equipotential with zero total charge; they are handled by a
//! Schur complement on top of one Cholesky factorization of `P`.

pub mod cross_section;
pub mod kernel;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::field::FieldSample;
use crate::geom::{Aabb, Axis, Vec3};
use crate::scene::{Net, ProbeSet, Scene, SceneError};

/// Vacuum permittivity (F/m).
pub const EPS0: f64 = 8.854_187_812_8e-12;

/// Beyond this many panel sizes the panel is treated as a point charge.
const NEAR_FIELD_RATIO: f64 = 30.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EqsError {
    #[error("maximum panel edge must be > 0, got {0}")]
    InvalidPanelEdge(f64),
    #[error("distinct panels {0} and {1} coincide")]
    CoincidentDistinctPanels(usize, usize),
    #[error("effective permittivity must be >= 1, got {0}")]
    InvalidPermittivity(f64),
    #[error("no driven net")]
    NoDrivenNet,
    #[error("no potential given for net `{0}`")]
    MissingNetPotential(String),
    #[error("unknown net `{0}`")]
    UnknownNet(String),
    #[error("drive vector has {got} entries, expected {expected}")]
    DriveLength { expected: usize, got: usize },
    #[error("singular system: {0}")]
    SingularSystem(String),
    #[error("point ({0:e}, {1:e}, {2:e}) lies inside a conductor")]
    PointInsideConductor(f64, f64, f64),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

pub type Result<T> = std::result::Result<T, EqsError>;

/// Uniformly charged rectangle on a conductor face.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub center: Vec3,
    pub normal: Axis,
    /// Extents along `normal.others()`, in that order.
    pub extents: (f64, f64),
    pub brick: usize,
    pub parent_brick: String,
    pub net: Net,
}

impl Panel {
    pub fn area(&self) -> f64 {
        self.extents.0 * self.extents.1
    }

    pub fn size(&self) -> f64 {
        self.extents.0.max(self.extents.1)
    }

    /// Offsets of the panel edges relative to `point`, and the height of
    /// `point` above the panel plane.
    fn local(&self, point: &Vec3) -> ((f64, f64), (f64, f64), f64) {
        let (p, q) = self.normal.others();
        let (cp, cq) = (
            self.center[p.index()] - point[p.index()],
            self.center[q.index()] - point[q.index()],
        );
        let (hw, hh) = (0.5 * self.extents.0, 0.5 * self.extents.1);
        (
            (cp - hw, cp + hw),
            (cq - hh, cq + hh),
            point[self.normal.index()] - self.center[self.normal.index()],
        )
    }

    /// Mean of `1/|point − r|` over the panel (1/m).
    pub fn mean_inverse_distance(&self, point: &Vec3) -> f64 {
        let d = (point - self.center).norm();
        if d > NEAR_FIELD_RATIO * self.size() {
            1.0 / d
        } else {
            let (u, v, h) = self.local(point);
            kernel::rect_inverse_distance(u, v, h) / self.area()
        }
    }

    /// Mean of `(point − r)/|point − r|³` over the panel (1/m²).
    pub fn mean_field_kernel(&self, point: &Vec3) -> Vec3 {
        let r = point - self.center;
        let d = r.norm();
        if d > NEAR_FIELD_RATIO * self.size() {
            return r / (d * d * d);
        }
        let (u, v, h) = self.local(point);
        let (eu, ev, en) = kernel::rect_field(u, v, h);
        let (p, q) = self.normal.others();
        (p.unit() * eu + q.unit() * ev + self.normal.unit() * en) / self.area()
    }
}

/// Breakpoints of `[lo, hi]` refined so that no interval exceeds `max_edge`.
fn subdivide(mut cuts: Vec<f64>, max_edge: f64) -> Vec<f64> {
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * max_edge);
    let mut out = vec![cuts[0]];
    for w in cuts.windows(2) {
        let n = ((w[1] - w[0]) / max_edge * (1.0 - 1e-9)).ceil().max(1.0) as usize;
        for k in 1..=n {
            out.push(w[0] + (w[1] - w[0]) * k as f64 / n as f64);
        }
    }
    out
}

/// Panel edge along `axis` on brick `b`: at most `max_edge`, and at most
/// half the brick's lateral extent so that every conductor can polarize
/// sideways.
fn edge_along(b: &Aabb, axis: Axis, max_edge: f64) -> f64 {
    match axis {
        Axis::Z => max_edge,
        _ => max_edge.min(0.5 * (b.hi(axis) - b.lo(axis))),
    }
}

/// Tiles every conductor face with panels of edge at most `max_edge`.
///
/// Face regions where two bricks on named nets touch are interior to the
/// merged conductor and carry no panels.
pub fn discretize_panels(scene: &Scene, max_edge: f64) -> Result<Vec<Panel>> {
    if !(max_edge > 0.0) || !max_edge.is_finite() {
        return Err(EqsError::InvalidPanelEdge(max_edge));
    }
    let bricks = scene.conductors();
    let mut panels = Vec::new();
    for (i, brick) in bricks.iter().enumerate() {
        let b = &brick.bounds;
        for normal in Axis::ALL {
            let (p, q) = normal.others();
            for plane in [b.lo(normal), b.hi(normal)] {
                let tol = 1e-9 * b.scale();
                let touching: Vec<Aabb> = scene
                    .contacts()
                    .iter()
                    .filter(|&&(a, c, n, face)| {
                        let other = if a == i {
                            c
                        } else if c == i {
                            a
                        } else {
                            return false;
                        };
                        n == normal
                            && (face.lo(normal) - plane).abs() <= tol
                            && brick.net.name().is_some()
                            && bricks[other].net.name().is_some()
                    })
                    .map(|&(_, _, _, face)| face)
                    .collect();
                let mut cp = vec![b.lo(p), b.hi(p)];
                let mut cq = vec![b.lo(q), b.hi(q)];
                for f in &touching {
                    cp.extend([f.lo(p), f.hi(p)]);
                    cq.extend([f.lo(q), f.hi(q)]);
                }
                let (cp, cq) = (
                    subdivide(cp, edge_along(b, p, max_edge)),
                    subdivide(cq, edge_along(b, q, max_edge)),
                );
                for wp in cp.windows(2) {
                    for wq in cq.windows(2) {
                        let mut c = Vec3::zeros();
                        c[normal.index()] = plane;
                        c[p.index()] = 0.5 * (wp[0] + wp[1]);
                        c[q.index()] = 0.5 * (wq[0] + wq[1]);
                        if touching.iter().any(|f| f.contains_closed(&c)) {
                            continue;
                        }
                        panels.push(Panel {
                            center: c,
                            normal,
                            extents: (wp[1] - wp[0], wq[1] - wq[0]),
                            brick: i,
                            parent_brick: brick.id.clone(),
                            net: brick.net.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(panels)
}

/// Thickness-weighted mean relative permittivity of the stack between two
/// heights. Outside the stack the nearest layer's dielectric is used.
pub fn effective_permittivity(scene: &Scene, z_a: f64, z_b: f64) -> Result<f64> {
    let stack = scene.stack();
    let eps_of = |k: usize| -> Result<f64> {
        Ok(scene.material(&stack[k].dielectric)?.relative_permittivity)
    };
    let (lo, hi) = (z_a.min(z_b), z_a.max(z_b));
    if hi - lo <= 0.0 {
        let k = stack
            .iter()
            .position(|l| lo < l.z_max())
            .unwrap_or(stack.len() - 1);
        return eps_of(k);
    }
    let mut sum = 0.0;
    for (k, l) in stack.iter().enumerate() {
        let bottom = if k == 0 { f64::NEG_INFINITY } else { l.z_min };
        let top = if k + 1 == stack.len() {
            f64::INFINITY
        } else {
            l.z_max()
        };
        let overlap = hi.min(top) - lo.max(bottom);
        if overlap > 0.0 {
            sum += overlap * eps_of(k)?;
        }
    }
    Ok(sum / (hi - lo))
}

/// `P_ij` (V/C) between panel `i` (observer) and panel `j` (source),
/// symmetrized over the two collocation choices.
pub fn potential_coefficient(pi: &Panel, pj: &Panel, eps_eff: f64) -> f64 {
    let k = 1.0 / (4.0 * PI * EPS0 * eps_eff);
    if pi == pj {
        return k * pj.mean_inverse_distance(&pi.center);
    }
    0.5 * k * (pj.mean_inverse_distance(&pi.center) + pi.mean_inverse_distance(&pj.center))
}

/// Assembled and factored panel problem.
#[derive(Debug, Clone)]
pub struct PanelSystem {
    pub panels: Vec<Panel>,
    pub eps_eff: f64,
    /// Potential-coefficient matrix (V/C).
    pub p: DMatrix<f64>,
    /// Driven nets, sorted by name, with their panel indices.
    pub nets: BTreeMap<String, Vec<usize>>,
    /// Floating conductors: brick id and panel indices.
    pub floating: Vec<(String, Vec<usize>)>,
    bricks: Vec<Aabb>,
    chol: Cholesky<f64, Dyn>,
    /// `P⁻¹ E` for the floating groups, and the Schur complement `Eᵀ P⁻¹ E`.
    float_cols: DMatrix<f64>,
    float_schur: Option<Cholesky<f64, Dyn>>,
}

impl PanelSystem {
    pub fn assemble(scene: &Scene, panels: Vec<Panel>, eps_eff: f64) -> Result<Self> {
        if !(eps_eff >= 1.0) || !eps_eff.is_finite() {
            return Err(EqsError::InvalidPermittivity(eps_eff));
        }
        let n = panels.len();
        for i in 0..n {
            for j in i + 1..n {
                let d = (panels[i].center - panels[j].center).norm();
                if d <= 1e-9 * panels[i].size().min(panels[j].size()) {
                    return Err(EqsError::CoincidentDistinctPanels(i, j));
                }
            }
        }
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (i..n)
                    .map(|j| potential_coefficient(&panels[i], &panels[j], eps_eff))
                    .collect()
            })
            .collect();
        let mut p = DMatrix::zeros(n, n);
        for (i, row) in rows.into_iter().enumerate() {
            for (k, v) in row.into_iter().enumerate() {
                p[(i, i + k)] = v;
                p[(i + k, i)] = v;
            }
        }
        let chol = Cholesky::new(p.clone()).ok_or_else(|| {
            EqsError::SingularSystem("potential matrix is not positive definite".into())
        })?;

        let mut nets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut floating: BTreeMap<usize, (String, Vec<usize>)> = BTreeMap::new();
        for (k, pan) in panels.iter().enumerate() {
            match &pan.net {
                Net::Named(name) => nets.entry(name.clone()).or_default().push(k),
                Net::Floating => floating
                    .entry(pan.brick)
                    .or_insert_with(|| (pan.parent_brick.clone(), Vec::new()))
                    .1
                    .push(k),
            }
        }
        if nets.is_empty() {
            return Err(EqsError::NoDrivenNet);
        }
        let floating: Vec<(String, Vec<usize>)> = floating.into_values().collect();
        let (float_cols, float_schur) = schur(&chol, n, &floating)?;
        Ok(Self {
            panels,
            eps_eff,
            p,
            nets,
            floating,
            bricks: scene.conductors().iter().map(|c| c.bounds).collect(),
            chol,
            float_cols,
            float_schur,
        })
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    /// Charges for real potentials on every driven net.
    pub fn solve_charges(&self, net_potentials: &BTreeMap<String, f64>) -> Result<ChargeSolution> {
        for name in net_potentials.keys() {
            if !self.nets.contains_key(name) {
                return Err(EqsError::UnknownNet(name.clone()));
            }
        }
        let mut drive = vec![Complex64::new(0.0, 0.0); self.len()];
        for (name, idx) in &self.nets {
            let v = net_potentials
                .get(name)
                .ok_or_else(|| EqsError::MissingNetPotential(name.clone()))?;
            for &k in idx {
                drive[k] = Complex64::new(*v, 0.0);
            }
        }
        self.solve_drive(&drive, &[])
    }

    /// Charges for a per-panel complex drive. Floating-conductor entries of
    /// `drive` are ignored. Nets listed in `isolated` are jointly shifted by
    /// a common potential so that their total charge vanishes.
    pub fn solve_drive(&self, drive: &[Complex64], isolated: &[&str]) -> Result<ChargeSolution> {
        let n = self.len();
        if drive.len() != n {
            return Err(EqsError::DriveLength {
                expected: n,
                got: drive.len(),
            });
        }
        let mut iso = Vec::new();
        for name in isolated {
            iso.extend(
                self.nets
                    .get(*name)
                    .ok_or_else(|| EqsError::UnknownNet((*name).to_string()))?,
            );
        }
        let mut v_re = DVector::zeros(n);
        let mut v_im = DVector::zeros(n);
        for (k, pan) in self.panels.iter().enumerate() {
            if !pan.net.is_floating() {
                v_re[k] = drive[k].re;
                v_im[k] = drive[k].im;
            }
        }
        let (q_re, f_re, o_re) = self.solve_real(v_re, &iso)?;
        let (q_im, f_im, o_im) = self.solve_real(v_im, &iso)?;
        let charges: Vec<Complex64> = (0..n).map(|k| Complex64::new(q_re[k], q_im[k])).collect();
        let offset = Complex64::new(o_re, o_im);
        let mut net_potentials = BTreeMap::new();
        for (name, idx) in &self.nets {
            // mean drive over the net, which is exact for equipotential nets
            let mut v = idx.iter().map(|&k| drive[k]).sum::<Complex64>() / idx.len() as f64;
            if isolated.contains(&name.as_str()) {
                v += offset;
            }
            net_potentials.insert(name.clone(), v);
        }
        let floating_potentials = self
            .floating
            .iter()
            .enumerate()
            .map(|(g, (id, _))| (id.clone(), Complex64::new(f_re[g], f_im[g])))
            .collect();
        Ok(ChargeSolution {
            charges,
            net_potentials,
            floating_potentials,
            isolated_offset: offset,
        })
    }

    /// Real solve. Returns charges, floating potentials and the offset of
    /// the isolated group.
    fn solve_real(
        &self,
        v: DVector<f64>,
        iso: &[usize],
    ) -> Result<(DVector<f64>, DVector<f64>, f64)> {
        let n = self.len();
        let g = self.floating.len();
        let q0 = self.chol.solve(&v);
        if iso.is_empty() {
            let phi = self.floating_response(&q0);
            let q = &q0 + &self.float_cols * &phi;
            return Ok((q, phi, 0.0));
        }
        // augment the floating groups with the isolated one
        let mut groups = self.floating.clone();
        groups.push((String::new(), iso.to_vec()));
        let (cols, sch) = schur(&self.chol, n, &groups)?;
        let sch = sch.expect("at least one group");
        let rhs = DVector::from_iterator(
            g + 1,
            groups
                .iter()
                .map(|(_, idx)| -idx.iter().map(|&k| q0[k]).sum::<f64>()),
        );
        let phi = sch.solve(&rhs);
        let q = &q0 + &cols * &phi;
        let offset = phi[g];
        Ok((q, phi.rows(0, g).into_owned(), offset))
    }

    fn floating_response(&self, q0: &DVector<f64>) -> DVector<f64> {
        match &self.float_schur {
            None => DVector::zeros(0),
            Some(s) => {
                let rhs = DVector::from_iterator(
                    self.floating.len(),
                    self.floating
                        .iter()
                        .map(|(_, idx)| -idx.iter().map(|&k| q0[k]).sum::<f64>()),
                );
                s.solve(&rhs)
            }
        }
    }

    /// Maxwell capacitance matrix (F) over the driven nets in name order.
    pub fn capacitance_matrix(&self) -> Result<(Vec<String>, DMatrix<f64>)> {
        let names: Vec<String> = self.nets.keys().cloned().collect();
        let m = names.len();
        let mut c = DMatrix::zeros(m, m);
        for (k, name) in names.iter().enumerate() {
            let pot: BTreeMap<String, f64> = names
                .iter()
                .map(|n| (n.clone(), if n == name { 1.0 } else { 0.0 }))
                .collect();
            let sol = self.solve_charges(&pot)?;
            for (i, other) in names.iter().enumerate() {
                c[(i, k)] = sol.net_charge(self, other).re;
            }
        }
        Ok((names, c))
    }

    /// E phasor (V/m) at `point`.
    pub fn e_field(&self, solution: &ChargeSolution, point: &Vec3) -> Result<[Complex64; 3]> {
        if self.bricks.iter().any(|b| b.contains_strict(point)) {
            return Err(EqsError::PointInsideConductor(point[0], point[1], point[2]));
        }
        let k = 1.0 / (4.0 * PI * EPS0 * self.eps_eff);
        let mut e = [Complex64::new(0.0, 0.0); 3];
        for (pan, q) in self.panels.iter().zip(&solution.charges) {
            if q.re == 0.0 && q.im == 0.0 {
                continue;
            }
            let g = pan.mean_field_kernel(point);
            for c in 0..3 {
                e[c] += q * (k * g[c]);
            }
        }
        Ok(e)
    }
}

/// Columns `P⁻¹ e_g` and the factored Schur complement `Eᵀ P⁻¹ E` of a set
/// of equipotential zero-charge groups.
fn schur(
    chol: &Cholesky<f64, Dyn>,
    n: usize,
    groups: &[(String, Vec<usize>)],
) -> Result<(DMatrix<f64>, Option<Cholesky<f64, Dyn>>)> {
    let g = groups.len();
    if g == 0 {
        return Ok((DMatrix::zeros(n, 0), None));
    }
    let mut e = DMatrix::zeros(n, g);
    for (col, (_, idx)) in groups.iter().enumerate() {
        for &k in idx {
            e[(k, col)] = 1.0;
        }
    }
    let cols = chol.solve(&e);
    let s = e.transpose() * &cols;
    let s = Cholesky::new(s)
        .ok_or_else(|| EqsError::SingularSystem("floating-group Schur complement".into()))?;
    Ok((cols, Some(s)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChargeSolution {
    /// Panel charges (C, peak phasors).
    pub charges: Vec<Complex64>,
    /// Potential of every driven net (V); for a non-uniform drive, the
    /// mean over the net's panels.
    pub net_potentials: BTreeMap<String, Complex64>,
    /// Potential of every floating conductor by brick id (V).
    pub floating_potentials: Vec<(String, Complex64)>,
    /// Common shift applied to isolated nets (V).
    pub isolated_offset: Complex64,
}

impl ChargeSolution {
    pub fn net_charge(&self, system: &PanelSystem, net: &str) -> Complex64 {
        system
            .nets
            .get(net)
            .map(|idx| idx.iter().map(|&k| self.charges[k]).sum())
            .unwrap_or_default()
    }

    /// Total charge of each floating conductor, in [`PanelSystem::floating`] order.
    pub fn floating_charges(&self, system: &PanelSystem) -> Vec<Complex64> {
        system
            .floating
            .iter()
            .map(|(_, idx)| idx.iter().map(|&k| self.charges[k]).sum())
            .collect()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            charges: self.charges.iter().map(|q| q * factor).collect(),
            net_potentials: self
                .net_potentials
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .collect(),
            floating_potentials: self
                .floating_potentials
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .collect(),
            isolated_offset: self.isolated_offset * factor,
        }
    }
}

pub fn e_field_at_probes(
    system: &PanelSystem,
    solution: &ChargeSolution,
    probes: &ProbeSet,
) -> Result<Vec<FieldSample>> {
    probes
        .points
        .par_iter()
        .map(|p| Ok(FieldSample::electric(*p, system.e_field(solution, p)?)))
        .collect()
}

/// E samples at every probe of the scene, probe sets concatenated in order.
pub fn e_field_at_scene_probes(
    scene: &Scene,
    system: &PanelSystem,
    solution: &ChargeSolution,
) -> Result<Vec<FieldSample>> {
    let mut out = Vec::new();
    for set in scene.probes() {
        out.extend(e_field_at_probes(system, solution, set)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{build_scene, ConductorBrick, Layer, Material, Role};

    fn plates(d: f64, side: f64, top_net: Net) -> Scene {
        let t = 0.05 * d;
        let stack = vec![Layer::new("all", -10.0 * side, 20.0 * side, "ox")];
        let materials = vec![
            Material::dielectric("ox", 1.0),
            Material::conductor("cu", 5.8e7, 1.0),
        ];
        let h = 0.5 * side;
        let bricks = vec![
            ConductorBrick::new(
                "bot",
                Aabb::new(-h, h, -h, h, -0.5 * d - t, -0.5 * d),
                "cu",
                Net::named("a"),
                Role::Signal,
            ),
            ConductorBrick::new(
                "top",
                Aabb::new(-h, h, -h, h, 0.5 * d, 0.5 * d + t),
                "cu",
                top_net,
                Role::Dummy,
            ),
        ];
        build_scene(stack, materials, bricks, vec![], vec![], 300.0).unwrap()
    }

    #[test]
    fn cube_panel_counts() {
        let stack = vec![Layer::new("l", 0.0, 2e-6, "ox")];
        let materials = vec![
            Material::dielectric("ox", 1.0),
            Material::conductor("cu", 5.8e7, 1.0),
        ];
        let c = ConductorBrick::new(
            "c",
            Aabb::new(0.0, 1e-6, 0.0, 1e-6, 0.0, 1e-6),
            "cu",
            Net::named("a"),
            Role::Signal,
        );
        let s = build_scene(stack, materials, vec![c], vec![], vec![], 300.0).unwrap();
        assert_eq!(discretize_panels(&s, 0.5e-6).unwrap().len(), 24);
        assert_eq!(discretize_panels(&s, 2e-6).unwrap().len(), 16);
    }

    #[test]
    fn far_panels_approach_point_charges() {
        let a = Panel {
            center: Vec3::zeros(),
            normal: Axis::Z,
            extents: (1e-7, 1e-7),
            brick: 0,
            parent_brick: "a".into(),
            net: Net::Floating,
        };
        let mut b = a.clone();
        b.center = Vec3::new(1e-5, 0.0, 0.0);
        let p = potential_coefficient(&a, &b, 1.0);
        let want = 1.0 / (4.0 * PI * EPS0 * 1e-5);
        assert!((p - want).abs() < 1e-2 * want);
        assert_eq!(p, potential_coefficient(&b, &a, 1.0));
    }

    #[test]
    fn floating_plate_is_neutral_and_polarized() {
        let s = plates(1e-6, 10e-6, Net::Floating);
        let panels = discretize_panels(&s, 1e-6).unwrap();
        let sys = PanelSystem::assemble(&s, panels, 1.0).unwrap();
        let pot = BTreeMap::from([("a".to_string(), 1.0)]);
        let sol = sys.solve_charges(&pot).unwrap();
        let fq = sol.floating_charges(&sys)[0];
        let abs: f64 = sol.charges.iter().map(|q| q.norm()).sum();
        assert!(fq.norm() < 1e-12 * abs);
        let facing: f64 = sys.floating[0]
            .1
            .iter()
            .filter(|&&k| sys.panels[k].normal == Axis::Z && sys.panels[k].center[2] < 0.6e-6)
            .map(|&k| sol.charges[k].re)
            .sum();
        assert!(
            facing < 0.0,
            "face toward the driven plate carries induced negative charge"
        );
    }
}
