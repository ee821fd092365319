//! Geometric and material description of an ESR line and its surroundings.
//!
//! Everything is built from axis-aligned conductor bricks sitting inside a
//! planar layer stack. Lengths are meters, temperatures kelvin.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Aabb, Axis, Vec3};

/// Net name given to the signal conductor of generated lines.
pub const SIGNAL_NET: &str = "sig";
/// Net name given to the return/ground conductors of generated lines.
pub const RETURN_NET: &str = "gnd";
/// Port id given to generated lines.
pub const LINE_PORT: &str = "P1";

/// Temperature at and below which the full residual-resistance ratio applies.
pub const CRYO_ANCHOR_K: f64 = 4.0;
/// Temperature at and above which the room-temperature conductivity applies.
pub const ROOM_ANCHOR_K: f64 = 300.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("invalid material `{0}`: {1}")]
    InvalidMaterial(String, String),
    #[error("unknown material `{0}`")]
    UnknownMaterial(String),
    #[error("invalid layer `{0}`: {1}")]
    InvalidLayer(String, String),
    #[error("unknown layer `{0}`")]
    UnknownLayer(String),
    #[error("invalid conductor `{0}`: {1}")]
    InvalidConductor(String, String),
    #[error("conductors `{0}` and `{1}` overlap")]
    OverlappingConductors(String, String),
    #[error("conductor `{0}` spans more than one layer")]
    LayerGap(String),
    #[error("conductor `{0}` lies outside the layer stack")]
    OutsideStack(String),
    #[error("port `{port}` references net `{net}` which has no conductors")]
    DanglingNet { port: String, net: String },
    #[error("port `{port}`: net `{net}` is not connected to the port terminals")]
    DisconnectedNet { port: String, net: String },
    #[error("invalid port `{0}`: {1}")]
    InvalidPort(String, String),
    #[error("probe {index} of set `{label}` lies inside conductor `{brick}`")]
    ProbeInsideConductor {
        label: String,
        index: usize,
        brick: String,
    },
    #[error("probe {index} of set `{label}` lies outside the scene bounding box")]
    ProbeOutsideScene { label: String, index: usize },
    #[error("invalid probe set `{0}`: {1}")]
    InvalidProbes(String, String),
    #[error("line does not fit layer `{0}`: {1}")]
    ConfigDoesNotFitLayer(String, String),
    #[error("invalid line configuration: {0}")]
    InvalidLineConfig(String),
    #[error("dummy region is empty")]
    EmptyRegion,
    #[error("invalid dummy fill: {0}")]
    InvalidFill(String),
    #[error("material `{0}` is not a conductor")]
    NotAConductor(String),
    #[error("invalid temperature {0} K")]
    InvalidTemperature(f64),
}

pub type Result<T> = std::result::Result<T, SceneError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// Room-temperature conductivity (S/m); ignored for dielectrics.
    pub conductivity_300k: f64,
    /// Residual-resistance ratio, σ(4 K)/σ(300 K).
    pub rrr: f64,
    /// Used only for dielectrics.
    pub relative_permittivity: f64,
    pub is_conductor: bool,
}

impl Material {
    pub fn conductor(name: impl Into<String>, conductivity_300k: f64, rrr: f64) -> Self {
        Self {
            name: name.into(),
            conductivity_300k,
            rrr,
            relative_permittivity: 1.0,
            is_conductor: true,
        }
    }

    pub fn dielectric(name: impl Into<String>, relative_permittivity: f64) -> Self {
        Self {
            name: name.into(),
            conductivity_300k: 0.0,
            rrr: 1.0,
            relative_permittivity,
            is_conductor: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(SceneError::InvalidMaterial(self.name.clone(), msg.into()));
        if self.name.is_empty() {
            return bad("empty name");
        }
        if !(self.rrr >= 1.0) || !self.rrr.is_finite() {
            return bad("rrr must be >= 1");
        }
        if self.is_conductor {
            if !(self.conductivity_300k > 0.0) || !self.conductivity_300k.is_finite() {
                return bad("conductivity must be > 0");
            }
        } else if !(self.relative_permittivity >= 1.0) || !self.relative_permittivity.is_finite() {
            return bad("relative permittivity must be >= 1");
        }
        Ok(())
    }
}

/// Conductivity of `material` at `temperature`.
///
/// Anchored at σ300 for T ≥ 300 K and σ300·rrr for T ≤ 4 K; log-linear in
/// between.
pub fn conductivity_at_temperature(material: &Material, temperature: f64) -> Result<f64> {
    if !material.is_conductor {
        return Err(SceneError::NotAConductor(material.name.clone()));
    }
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(SceneError::InvalidTemperature(temperature));
    }
    let warm = material.conductivity_300k;
    if temperature >= ROOM_ANCHOR_K {
        return Ok(warm);
    }
    let cold = warm * material.rrr;
    if temperature <= CRYO_ANCHOR_K {
        return Ok(cold);
    }
    let t = (temperature - CRYO_ANCHOR_K) / (ROOM_ANCHOR_K - CRYO_ANCHOR_K);
    Ok((cold.ln() + t * (warm.ln() - cold.ln())).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub name: String,
    pub z_min: f64,
    pub thickness: f64,
    /// Name of the dielectric material filling the layer around conductors.
    pub dielectric: String,
}

impl Layer {
    pub fn new(
        name: impl Into<String>,
        z_min: f64,
        thickness: f64,
        dielectric: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            z_min,
            thickness,
            dielectric: dielectric.into(),
        }
    }

    pub fn z_max(&self) -> f64 {
        self.z_min + self.thickness
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Net {
    Floating,
    Named(String),
}

impl Net {
    pub fn named(name: impl Into<String>) -> Self {
        Net::Named(name.into())
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            Net::Named(n) => Some(n),
            Net::Floating => None,
        }
    }

    pub fn is_floating(&self) -> bool {
        matches!(self, Net::Floating)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Signal,
    Return,
    Dummy,
    Gate,
    Interconnect,
    ShortStrap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConductorBrick {
    pub id: String,
    pub bounds: Aabb,
    pub material: String,
    pub net: Net,
    pub role: Role,
}

impl ConductorBrick {
    pub fn new(
        id: impl Into<String>,
        bounds: Aabb,
        material: impl Into<String>,
        net: Net,
        role: Role,
    ) -> Self {
        Self {
            id: id.into(),
            bounds,
            material: material.into(),
            net,
            role,
        }
    }

    /// Direction of current flow assumed by the magnetic solver.
    pub fn axis(&self) -> Axis {
        self.bounds.longest_axis()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Port {
    pub id: String,
    pub positive_net: String,
    pub negative_net: String,
    pub reference_impedance: f64,
}

impl Port {
    pub fn new(
        id: impl Into<String>,
        positive_net: impl Into<String>,
        negative_net: impl Into<String>,
    ) -> Self {
        Self {
            id: id.into(),
            positive_net: positive_net.into(),
            negative_net: negative_net.into(),
            reference_impedance: 50.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSet {
    pub label: String,
    pub points: Vec<Vec3>,
}

impl ProbeSet {
    pub fn new(label: impl Into<String>, points: Vec<Vec3>) -> Self {
        Self {
            label: label.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineKind {
    #[serde(rename = "CPS")]
    Cps,
    #[serde(rename = "CPW")]
    Cpw,
    #[serde(rename = "CPW_TO_CPS")]
    CpwToCps,
}

impl LineKind {
    pub const ALL: [LineKind; 3] = [LineKind::Cps, LineKind::Cpw, LineKind::CpwToCps];

    pub fn label(self) -> &'static str {
        match self {
            LineKind::Cps => "CPS",
            LineKind::Cpw => "CPW",
            LineKind::CpwToCps => "CPW_TO_CPS",
        }
    }
}

/// Shorted coplanar line running along +x from `x = 0` (port) to
/// `x = length`, where the short strap sits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineConfig {
    pub kind: LineKind,
    pub signal_width: f64,
    pub gap: f64,
    pub ground_width: f64,
    pub length: f64,
    /// Layer the strips are drawn in.
    pub level: String,
    pub material: String,
    /// Strip thickness; defaults to the full layer thickness.
    pub thickness: Option<f64>,
    /// Extent of the short strap along the line; defaults to `signal_width`.
    pub strap_width: Option<f64>,
    /// For `CpwToCps`: length of the CPW section before the transition
    /// plane; defaults to half of `length`.
    pub access_length: Option<f64>,
    pub shorted_end: bool,
}

impl LineConfig {
    pub fn new(
        kind: LineKind,
        signal_width: f64,
        gap: f64,
        ground_width: f64,
        length: f64,
        level: &str,
        material: &str,
    ) -> Self {
        Self {
            kind,
            signal_width,
            gap,
            ground_width,
            length,
            level: level.into(),
            material: material.into(),
            thickness: None,
            strap_width: None,
            access_length: None,
            shorted_end: true,
        }
    }

    pub fn strap_width(&self) -> f64 {
        self.strap_width.unwrap_or(self.signal_width)
    }

    pub fn transition(&self) -> f64 {
        self.access_length.unwrap_or(0.5 * self.length)
    }

    /// The port connecting this line's signal and return nets.
    pub fn port(&self) -> Port {
        Port::new(LINE_PORT, SIGNAL_NET, RETURN_NET)
    }

    pub fn validate(&self, stack: &[Layer]) -> Result<()> {
        let bad = |m: &str| Err(SceneError::InvalidLineConfig(m.into()));
        for (name, v) in [
            ("signal_width", self.signal_width),
            ("gap", self.gap),
            ("ground_width", self.ground_width),
            ("length", self.length),
            ("strap_width", self.strap_width()),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(&format!("{name} must be > 0"));
            }
        }
        if let Some(t) = self.thickness {
            if !(t > 0.0) {
                return bad("thickness must be > 0");
            }
        }
        if self.kind == LineKind::CpwToCps {
            let t = self.transition();
            if !(t > 0.0 && t < self.length) {
                return bad("access_length must lie strictly inside the line");
            }
        }
        if !self.shorted_end {
            return bad("ESR lines are always shorted at the far end");
        }
        let layer = find_layer(stack, &self.level)?;
        let t = self.thickness.unwrap_or(layer.thickness);
        if t > layer.thickness * (1.0 + 1e-9) {
            return Err(SceneError::ConfigDoesNotFitLayer(
                layer.name.clone(),
                format!(
                    "strip thickness {t:e} m exceeds layer thickness {:e} m",
                    layer.thickness
                ),
            ));
        }
        Ok(())
    }
}

pub fn find_layer<'a>(stack: &'a [Layer], name: &str) -> Result<&'a Layer> {
    stack
        .iter()
        .find(|l| l.name == name)
        .ok_or_else(|| SceneError::UnknownLayer(name.into()))
}

/// Bricks of a shorted line (strips plus one short strap), all on the nets of
/// [`LineConfig::port`].
pub fn generate_line(config: &LineConfig, stack: &[Layer]) -> Result<Vec<ConductorBrick>> {
    config.validate(stack)?;
    let layer = find_layer(stack, &config.level)?;
    let z0 = layer.z_min;
    let z1 = z0 + config.thickness.unwrap_or(layer.thickness);
    let (ws, g, wg, len) = (
        config.signal_width,
        config.gap,
        config.ground_width,
        config.length,
    );
    let strap = (len, len + config.strap_width());
    let sig = || Net::named(SIGNAL_NET);
    let ret = || Net::named(RETURN_NET);
    let m = config.material.as_str();
    let brick = |id: &str, x: (f64, f64), y: (f64, f64), net: Net, role: Role| {
        ConductorBrick::new(id, Aabb::new(x.0, x.1, y.0, y.1, z0, z1), m, net, role)
    };

    let bricks = match config.kind {
        LineKind::Cps => {
            let ys = (-0.5 * ws, 0.5 * ws);
            let yr = (-0.5 * ws - g - wg, -0.5 * ws - g);
            vec![
                brick("line_signal", (0.0, len), ys, sig(), Role::Signal),
                brick("line_return", (0.0, len), yr, ret(), Role::Return),
                brick("line_short", strap, (yr.0, ys.1), sig(), Role::ShortStrap),
            ]
        }
        LineKind::Cpw => {
            let ys = (-0.5 * ws, 0.5 * ws);
            let yg_hi = (0.5 * ws + g, 0.5 * ws + g + wg);
            let yg_lo = (-yg_hi.1, -yg_hi.0);
            vec![
                brick("line_signal", (0.0, len), ys, sig(), Role::Signal),
                brick("line_ground_hi", (0.0, len), yg_hi, ret(), Role::Return),
                brick("line_ground_lo", (0.0, len), yg_lo, ret(), Role::Return),
                brick(
                    "line_short",
                    strap,
                    (yg_lo.0, yg_hi.1),
                    sig(),
                    Role::ShortStrap,
                ),
            ]
        }
        LineKind::CpwToCps => {
            let xt = config.transition();
            let ys = (-0.5 * ws, 0.5 * ws);
            let yg_hi = (0.5 * ws + g, 0.5 * ws + g + wg);
            let yg_lo = (-yg_hi.1, -yg_hi.0);
            vec![
                brick("access_signal", (0.0, xt), ys, sig(), Role::Signal),
                brick("access_ground_hi", (0.0, xt), yg_hi, ret(), Role::Return),
                brick("access_ground_lo", (0.0, xt), yg_lo, ret(), Role::Return),
                brick("antenna_signal", (xt, len), ys, sig(), Role::Signal),
                brick("antenna_return", (xt, len), yg_lo, ret(), Role::Return),
                brick(
                    "line_short",
                    strap,
                    (yg_lo.0, ys.1),
                    sig(),
                    Role::ShortStrap,
                ),
            ]
        }
    };
    Ok(bricks)
}

/// Rectangular region in the x-y plane, `(x0, x1, y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

/// Regular grid of floating fill squares, one per `pitch × pitch` cell,
/// each of edge `pitch·sqrt(fill_fraction)` centered in its cell.
pub fn generate_dummies(
    region: Region,
    pitch: f64,
    fill_fraction: f64,
    level: &Layer,
    material: &str,
) -> Result<Vec<ConductorBrick>> {
    if !(pitch > 0.0) || !pitch.is_finite() {
        return Err(SceneError::InvalidFill(format!(
            "pitch must be > 0, got {pitch}"
        )));
    }
    if !(0.0..=1.0).contains(&fill_fraction) {
        return Err(SceneError::InvalidFill(format!(
            "fill fraction {fill_fraction} outside [0, 1]"
        )));
    }
    let (lx, ly) = (region.x1 - region.x0, region.y1 - region.y0);
    if !(lx > 0.0 && ly > 0.0) {
        return Err(SceneError::EmptyRegion);
    }
    // tolerate round-off so that e.g. 2 µm / 500 nm gives exactly 4 cells
    let nx = (lx / pitch * (1.0 + 1e-9)).floor() as usize;
    let ny = (ly / pitch * (1.0 + 1e-9)).floor() as usize;
    if nx == 0 || ny == 0 {
        return Err(SceneError::EmptyRegion);
    }
    if fill_fraction == 0.0 {
        return Ok(Vec::new());
    }
    let edge = pitch * fill_fraction.sqrt();
    let margin = 0.5 * (pitch - edge);
    let mut out = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let x0 = region.x0 + i as f64 * pitch + margin;
            let y0 = region.y0 + j as f64 * pitch + margin;
            out.push(ConductorBrick::new(
                format!("dummy_{i}_{j}"),
                Aabb::new(x0, x0 + edge, y0, y0 + edge, level.z_min, level.z_max()),
                material,
                Net::Floating,
                Role::Dummy,
            ));
        }
    }
    Ok(out)
}

/// End face of a current-carrying brick, seen by the magnetic solver as a node.
#[derive(Debug, Clone, PartialEq)]
pub struct EndFace {
    pub brick: usize,
    pub axis: Axis,
    /// Coordinate of the face plane along `axis`.
    pub plane: f64,
    /// `false` for the low end, `true` for the high end.
    pub high: bool,
    /// No other conductor touches this face.
    pub free: bool,
}

/// Validated, immutable scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    stack: Vec<Layer>,
    materials: BTreeMap<String, Material>,
    conductors: Vec<ConductorBrick>,
    ports: Vec<Port>,
    probes: Vec<ProbeSet>,
    temperature: f64,
    layer_of: Vec<usize>,
    contacts: Vec<(usize, usize, Axis, Aabb)>,
}

/// Inputs of [`build_scene`], as recovered by [`Scene::parts`].
#[derive(Debug, Clone, PartialEq)]
pub struct SceneParts {
    pub stack: Vec<Layer>,
    pub materials: Vec<Material>,
    pub conductors: Vec<ConductorBrick>,
    pub ports: Vec<Port>,
    pub probes: Vec<ProbeSet>,
    pub temperature: f64,
}

pub fn build_scene(
    stack: Vec<Layer>,
    materials: Vec<Material>,
    conductors: Vec<ConductorBrick>,
    ports: Vec<Port>,
    probes: Vec<ProbeSet>,
    temperature: f64,
) -> Result<Scene> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(SceneError::InvalidTemperature(temperature));
    }
    let mut catalog = BTreeMap::new();
    for m in materials {
        m.validate()?;
        if catalog.insert(m.name.clone(), m.clone()).is_some() {
            return Err(SceneError::InvalidMaterial(m.name, "duplicate name".into()));
        }
    }

    validate_stack(&stack, &catalog)?;

    let mut ids = BTreeSet::new();
    let mut layer_of = Vec::with_capacity(conductors.len());
    for c in &conductors {
        if !ids.insert(c.id.as_str()) {
            return Err(SceneError::InvalidConductor(
                c.id.clone(),
                "duplicate id".into(),
            ));
        }
        if !c.bounds.is_proper() {
            return Err(SceneError::InvalidConductor(
                c.id.clone(),
                "box extents must satisfy min < max".into(),
            ));
        }
        let mat = catalog
            .get(&c.material)
            .ok_or_else(|| SceneError::UnknownMaterial(c.material.clone()))?;
        if !mat.is_conductor {
            return Err(SceneError::InvalidConductor(
                c.id.clone(),
                format!("material `{}` is a dielectric", mat.name),
            ));
        }
        if c.net.is_floating() && !matches!(c.role, Role::Dummy | Role::Gate) {
            return Err(SceneError::InvalidConductor(
                c.id.clone(),
                "only dummies and gates may float".into(),
            ));
        }
        if let Net::Named(n) = &c.net {
            if n.is_empty() {
                return Err(SceneError::InvalidConductor(
                    c.id.clone(),
                    "empty net name".into(),
                ));
            }
        }
        layer_of.push(assign_layer(c, &stack)?);
    }

    let n = conductors.len();
    let mut contacts = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&conductors[i].bounds, &conductors[j].bounds);
            if a.overlaps_interior(b) {
                return Err(SceneError::OverlappingConductors(
                    conductors[i].id.clone(),
                    conductors[j].id.clone(),
                ));
            }
            if let Some((axis, face)) = a.contact(b) {
                contacts.push((i, j, axis, face));
            }
        }
    }

    let scene = Scene {
        stack,
        materials: catalog,
        conductors,
        ports,
        probes,
        temperature,
        layer_of,
        contacts,
    };
    scene.validate_ports()?;
    scene.validate_probes()?;
    Ok(scene)
}

fn validate_stack(stack: &[Layer], catalog: &BTreeMap<String, Material>) -> Result<()> {
    let mut names = BTreeSet::new();
    for (k, l) in stack.iter().enumerate() {
        if !names.insert(l.name.as_str()) {
            return Err(SceneError::InvalidLayer(
                l.name.clone(),
                "duplicate name".into(),
            ));
        }
        if !(l.thickness > 0.0) || !l.z_min.is_finite() {
            return Err(SceneError::InvalidLayer(
                l.name.clone(),
                "thickness must be > 0".into(),
            ));
        }
        match catalog.get(&l.dielectric) {
            None => return Err(SceneError::UnknownMaterial(l.dielectric.clone())),
            Some(m) if m.is_conductor => {
                return Err(SceneError::InvalidLayer(
                    l.name.clone(),
                    format!("`{}` is not a dielectric", m.name),
                ))
            }
            _ => {}
        }
        if k > 0 {
            let prev = &stack[k - 1];
            let tol = 1e-9 * l.thickness.min(prev.thickness);
            if l.z_min < prev.z_max() - tol {
                return Err(SceneError::InvalidLayer(
                    l.name.clone(),
                    format!("overlaps or is not above layer `{}`", prev.name),
                ));
            }
        }
    }
    Ok(())
}

fn assign_layer(c: &ConductorBrick, stack: &[Layer]) -> Result<usize> {
    let (z0, z1) = (c.bounds.min[2], c.bounds.max[2]);
    let mut touched = Vec::new();
    for (k, l) in stack.iter().enumerate() {
        let tol = 1e-9 * l.thickness;
        let lo = z0.max(l.z_min);
        let hi = z1.min(l.z_max());
        if hi - lo > tol {
            touched.push(k);
        }
    }
    match touched.as_slice() {
        [] => Err(SceneError::OutsideStack(c.id.clone())),
        [k] => {
            let l = &stack[*k];
            let tol = 1e-9 * l.thickness;
            if z0 < l.z_min - tol || z1 > l.z_max() + tol {
                Err(SceneError::OutsideStack(c.id.clone()))
            } else {
                Ok(*k)
            }
        }
        _ => Err(SceneError::LayerGap(c.id.clone())),
    }
}

impl Scene {
    pub fn stack(&self) -> &[Layer] {
        &self.stack
    }

    pub fn materials(&self) -> &BTreeMap<String, Material> {
        &self.materials
    }

    pub fn material(&self, name: &str) -> Result<&Material> {
        self.materials
            .get(name)
            .ok_or_else(|| SceneError::UnknownMaterial(name.into()))
    }

    pub fn conductors(&self) -> &[ConductorBrick] {
        &self.conductors
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    pub fn probes(&self) -> &[ProbeSet] {
        &self.probes
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn layer(&self, name: &str) -> Result<&Layer> {
        find_layer(&self.stack, name)
    }

    /// Index into the stack of the layer holding conductor `i`.
    pub fn layer_of(&self, i: usize) -> usize {
        self.layer_of[i]
    }

    /// Face contacts between conductors: `(i, j, normal axis, contact face)`.
    pub fn contacts(&self) -> &[(usize, usize, Axis, Aabb)] {
        &self.contacts
    }

    /// Conductivity of conductor `i` at the scene temperature.
    pub fn conductivity(&self, i: usize) -> Result<f64> {
        let m = self.material(&self.conductors[i].material)?;
        conductivity_at_temperature(m, self.temperature)
    }

    pub fn port_nets(&self) -> BTreeSet<&str> {
        self.ports
            .iter()
            .flat_map(|p| [p.positive_net.as_str(), p.negative_net.as_str()])
            .collect()
    }

    pub fn parts(&self) -> SceneParts {
        SceneParts {
            stack: self.stack.clone(),
            materials: self.materials.values().cloned().collect(),
            conductors: self.conductors.clone(),
            ports: self.ports.clone(),
            probes: self.probes.clone(),
            temperature: self.temperature,
        }
    }

    pub fn rebuild(parts: SceneParts) -> Result<Scene> {
        build_scene(
            parts.stack,
            parts.materials,
            parts.conductors,
            parts.ports,
            parts.probes,
            parts.temperature,
        )
    }

    /// Scene extent used for probe validation: conductor footprint in x-y,
    /// full stack height in z.
    pub fn bounding_box(&self) -> Option<Aabb> {
        let mut bb = self.conductors.first()?.bounds;
        for c in &self.conductors[1..] {
            bb = bb.union(&c.bounds);
        }
        if let (Some(first), Some(last)) = (self.stack.first(), self.stack.last()) {
            bb.min[2] = bb.min[2].min(first.z_min);
            bb.max[2] = bb.max[2].max(last.z_max());
        }
        Some(bb)
    }

    /// End faces of every current-carrying brick on a port net (short straps
    /// excluded: their ends are open stubs).
    pub fn end_faces(&self) -> Vec<EndFace> {
        let nets = self.port_nets();
        let mut out = Vec::new();
        for (i, c) in self.conductors.iter().enumerate() {
            let Some(net) = c.net.name() else { continue };
            if !nets.contains(net) || !matches!(c.role, Role::Signal | Role::Return) {
                continue;
            }
            let axis = c.axis();
            for high in [false, true] {
                let plane = if high {
                    c.bounds.hi(axis)
                } else {
                    c.bounds.lo(axis)
                };
                let free = !self.contacts.iter().any(|&(a, b, n, face)| {
                    (a == i || b == i)
                        && n == axis
                        && (face.lo(axis) - plane).abs() <= 1e-9 * c.bounds.extent(axis)
                });
                out.push(EndFace {
                    brick: i,
                    axis,
                    plane,
                    high,
                    free,
                });
            }
        }
        out
    }

    /// Groups of end faces tied together as ideal net junctions: faces of the
    /// same net, normal to the same axis, in the same plane and the same
    /// layer, at least one of which is free. Singleton free faces are
    /// included as their own group.
    pub fn end_ties(&self) -> Vec<Vec<EndFace>> {
        let faces = self.end_faces();
        let mut groups: Vec<Vec<EndFace>> = Vec::new();
        for f in faces {
            let c = &self.conductors[f.brick];
            let found = groups.iter_mut().find(|g| {
                let h = &g[0];
                let hc = &self.conductors[h.brick];
                h.axis == f.axis
                    && hc.net == c.net
                    && self.layer_of[h.brick] == self.layer_of[f.brick]
                    && (h.plane - f.plane).abs()
                        <= 1e-9 * c.bounds.extent(f.axis).min(hc.bounds.extent(h.axis))
            });
            match found {
                Some(g) => g.push(f),
                None => groups.push(vec![f]),
            }
        }
        groups.retain(|g| g.iter().any(|f| f.free));
        groups
    }

    /// Terminal faces of `net`: the tie group made solely of free faces with
    /// the lowest plane coordinate.
    pub fn terminal_faces(&self, net: &str) -> Option<Vec<EndFace>> {
        self.end_ties()
            .into_iter()
            .filter(|g| {
                g.iter().all(|f| f.free) && self.conductors[g[0].brick].net.name() == Some(net)
            })
            .min_by(|a, b| a[0].plane.total_cmp(&b[0].plane))
    }

    fn validate_ports(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for p in &self.ports {
            if !ids.insert(p.id.as_str()) {
                return Err(SceneError::InvalidPort(p.id.clone(), "duplicate id".into()));
            }
            if p.positive_net == p.negative_net {
                return Err(SceneError::InvalidPort(
                    p.id.clone(),
                    "positive and negative nets coincide".into(),
                ));
            }
            if !(p.reference_impedance > 0.0) {
                return Err(SceneError::InvalidPort(
                    p.id.clone(),
                    "reference impedance must be > 0".into(),
                ));
            }
            for net in [&p.positive_net, &p.negative_net] {
                if !self.conductors.iter().any(|c| c.net.name() == Some(net)) {
                    return Err(SceneError::DanglingNet {
                        port: p.id.clone(),
                        net: net.clone(),
                    });
                }
            }
            self.check_port_connectivity(p)?;
        }
        Ok(())
    }

    /// Every brick of the port's two nets must be reachable from the port's
    /// positive terminal through face contacts and end ties.
    fn check_port_connectivity(&self, port: &Port) -> Result<()> {
        let on_port = |i: usize| matches!(self.conductors[i].net.name(), Some(n) if n == port.positive_net || n == port.negative_net);
        let n = self.conductors.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        let union = |p: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(p, a), find(p, b));
            if ra != rb {
                p[ra.max(rb)] = ra.min(rb);
            }
        };
        for &(a, b, _, _) in &self.contacts {
            if on_port(a) && on_port(b) {
                union(&mut parent, a, b);
            }
        }
        for g in self.end_ties() {
            for f in &g[1..] {
                union(&mut parent, g[0].brick, f.brick);
            }
        }
        let members: Vec<usize> = (0..n).filter(|&i| on_port(i)).collect();
        let root = find(&mut parent, members[0]);
        for &i in &members {
            if find(&mut parent, i) != root {
                let net = self.conductors[i]
                    .net
                    .name()
                    .unwrap_or_default()
                    .to_string();
                return Err(SceneError::DisconnectedNet {
                    port: port.id.clone(),
                    net,
                });
            }
        }
        Ok(())
    }

    fn validate_probes(&self) -> Result<()> {
        let bb = self.bounding_box();
        for set in &self.probes {
            if set.points.is_empty() {
                return Err(SceneError::InvalidProbes(
                    set.label.clone(),
                    "no points".into(),
                ));
            }
            for (k, p) in set.points.iter().enumerate() {
                if let Some(c) = self.conductors.iter().find(|c| c.bounds.contains_closed(p)) {
                    return Err(SceneError::ProbeInsideConductor {
                        label: set.label.clone(),
                        index: k,
                        brick: c.id.clone(),
                    });
                }
                match bb {
                    Some(bb) if bb.contains_closed(p) => {}
                    _ => {
                        return Err(SceneError::ProbeOutsideScene {
                            label: set.label.clone(),
                            index: k,
                        })
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NM: f64 = 1e-9;
    const UM: f64 = 1e-6;

    fn stack() -> (Vec<Layer>, Vec<Material>) {
        let mats = vec![
            Material::dielectric("SiO2", 3.9),
            Material::conductor("Cu", 1e7, 3.0),
            Material::conductor("poly", 1e5, 1.0),
        ];
        let layers = vec![
            Layer::new("poly", 0.0, 50.0 * NM, "SiO2"),
            Layer::new("ild", 50.0 * NM, 100.0 * NM, "SiO2"),
            Layer::new("M1", 150.0 * NM, 100.0 * NM, "SiO2"),
        ];
        (layers, mats)
    }

    fn cps() -> LineConfig {
        LineConfig::new(
            LineKind::Cps,
            200.0 * NM,
            200.0 * NM,
            200.0 * NM,
            10.0 * UM,
            "M1",
            "Cu",
        )
    }

    #[test]
    fn minimal_scene_is_valid() {
        let (layers, mats) = stack();
        let sig = ConductorBrick::new(
            "a",
            Aabb::new(0.0, 1.0 * UM, 0.0, 1.0 * UM, 150.0 * NM, 250.0 * NM),
            "Cu",
            Net::named("a"),
            Role::Signal,
        );
        let ret = ConductorBrick::new(
            "b",
            Aabb::new(1.0 * UM, 2.0 * UM, 0.0, 1.0 * UM, 150.0 * NM, 250.0 * NM),
            "Cu",
            Net::named("b"),
            Role::Return,
        );
        let probes = vec![ProbeSet::new(
            "QD",
            vec![Vec3::new(0.5 * UM, 0.5 * UM, 100.0 * NM)],
        )];
        let s = build_scene(
            layers,
            mats,
            vec![sig, ret],
            vec![Port::new("p", "a", "b")],
            probes,
            4.0,
        )
        .unwrap();
        assert_eq!(s.conductors().len(), 2);
        assert_eq!(s.layer_of(0), 2);
    }

    #[test]
    fn overlapping_bricks_rejected() {
        let (layers, mats) = stack();
        let a = ConductorBrick::new(
            "a",
            Aabb::new(0.0, 1.0 * UM, 0.0, 1.0 * UM, 150.0 * NM, 250.0 * NM),
            "Cu",
            Net::named("n"),
            Role::Signal,
        );
        let mut b = a.clone();
        b.id = "b".into();
        b.bounds.min[0] = 0.5 * UM;
        b.bounds.max[0] = 1.5 * UM;
        let err = build_scene(layers, mats, vec![a, b], vec![], vec![], 300.0).unwrap_err();
        assert_eq!(
            err,
            SceneError::OverlappingConductors("a".into(), "b".into())
        );
    }

    #[test]
    fn probe_inside_conductor_rejected() {
        let (layers, mats) = stack();
        let bricks = generate_line(&cps(), &layers).unwrap();
        let inside = Vec3::new(5.0 * UM, 0.0, 200.0 * NM);
        let err = build_scene(
            layers,
            mats,
            bricks,
            vec![cps().port()],
            vec![ProbeSet::new("QD", vec![inside])],
            4.0,
        )
        .unwrap_err();
        assert!(
            matches!(err, SceneError::ProbeInsideConductor { ref brick, .. } if brick == "line_signal")
        );
    }

    #[test]
    fn brick_spanning_layers_is_layer_gap() {
        let (layers, mats) = stack();
        let a = ConductorBrick::new(
            "a",
            Aabb::new(0.0, 1.0 * UM, 0.0, 1.0 * UM, 20.0 * NM, 80.0 * NM),
            "Cu",
            Net::named("n"),
            Role::Signal,
        );
        let err = build_scene(layers, mats, vec![a], vec![], vec![], 4.0).unwrap_err();
        assert_eq!(err, SceneError::LayerGap("a".into()));
    }

    #[test]
    fn dangling_port_net() {
        let (layers, mats) = stack();
        let bricks = generate_line(&cps(), &layers).unwrap();
        let port = Port::new("p", SIGNAL_NET, "nowhere");
        let err = build_scene(layers, mats, bricks, vec![port], vec![], 4.0).unwrap_err();
        assert!(matches!(err, SceneError::DanglingNet { .. }));
    }

    #[test]
    fn open_line_is_disconnected() {
        let (layers, mats) = stack();
        let mut bricks = generate_line(&cps(), &layers).unwrap();
        bricks.retain(|b| b.role != Role::ShortStrap);
        let err = build_scene(layers, mats, bricks, vec![cps().port()], vec![], 4.0).unwrap_err();
        assert!(matches!(err, SceneError::DisconnectedNet { .. }));
    }

    #[test]
    fn line_brick_counts() {
        let (layers, _) = stack();
        let mut cfg = cps();
        assert_eq!(generate_line(&cfg, &layers).unwrap().len(), 3);
        cfg.kind = LineKind::Cpw;
        let cpw = generate_line(&cfg, &layers).unwrap();
        assert_eq!(cpw.len(), 4);
        assert_eq!(
            cpw.iter()
                .filter(|b| b.net.name() == Some(RETURN_NET))
                .count(),
            2
        );
        cfg.kind = LineKind::CpwToCps;
        let balun = generate_line(&cfg, &layers).unwrap();
        assert_eq!(balun.len(), 6);
        for bricks in [cpw, balun] {
            assert_eq!(
                bricks.iter().filter(|b| b.role == Role::ShortStrap).count(),
                1
            );
        }
    }

    #[test]
    fn line_thicker_than_layer_rejected() {
        let (layers, _) = stack();
        let mut cfg = cps();
        cfg.thickness = Some(150.0 * NM);
        assert!(matches!(
            generate_line(&cfg, &layers),
            Err(SceneError::ConfigDoesNotFitLayer(..))
        ));
    }

    #[test]
    fn terminals_sit_at_line_input() {
        let (layers, mats) = stack();
        let mut cfg = cps();
        cfg.kind = LineKind::CpwToCps;
        let bricks = generate_line(&cfg, &layers).unwrap();
        let s = build_scene(layers, mats, bricks, vec![cfg.port()], vec![], 4.0).unwrap();
        let neg = s.terminal_faces(RETURN_NET).unwrap();
        assert_eq!(neg.len(), 2);
        assert!(neg.iter().all(|f| f.plane == 0.0));
        let pos = s.terminal_faces(SIGNAL_NET).unwrap();
        assert_eq!(pos.len(), 1);
        // the upper access ground is tied to the antenna return at the transition plane
        let ties = s.end_ties();
        assert!(ties
            .iter()
            .any(|g| g.len() == 3 && g.iter().any(|f| f.free) && g[0].plane == cfg.transition()));
    }

    #[test]
    fn dummy_grid_arithmetic() {
        let (layers, _) = stack();
        let r = Region {
            x0: 0.0,
            x1: 2.0 * UM,
            y0: 0.0,
            y1: 2.0 * UM,
        };
        let d = generate_dummies(r, 500.0 * NM, 0.25, &layers[0], "poly").unwrap();
        assert_eq!(d.len(), 16);
        for b in &d {
            assert!((b.bounds.extent(Axis::X) - 250.0 * NM).abs() < 1e-15);
            assert!(b.net.is_floating());
        }
        assert!(generate_dummies(r, 500.0 * NM, 0.0, &layers[0], "poly")
            .unwrap()
            .is_empty());
        let full = generate_dummies(r, 500.0 * NM, 1.0, &layers[0], "poly").unwrap();
        for (i, a) in full.iter().enumerate() {
            for b in &full[i + 1..] {
                assert!(!a.bounds.overlaps_interior(&b.bounds));
            }
        }
        let empty = Region { x1: 0.0, ..r };
        assert_eq!(
            generate_dummies(empty, 500.0 * NM, 0.5, &layers[0], "poly"),
            Err(SceneError::EmptyRegion)
        );
    }

    #[test]
    fn conductivity_anchors() {
        let cu = Material::conductor("Cu", 5.8e7, 1.0);
        assert_eq!(conductivity_at_temperature(&cu, 4.0).unwrap(), 5.8e7);
        let m1 = Material::conductor("M1", 1.0e7, 3.0);
        assert!((conductivity_at_temperature(&m1, 4.0).unwrap() - 3.0e7).abs() < 1e-6);
        assert_eq!(conductivity_at_temperature(&m1, 300.0).unwrap(), 1.0e7);
        let ox = Material::dielectric("SiO2", 3.9);
        assert!(matches!(
            conductivity_at_temperature(&ox, 4.0),
            Err(SceneError::NotAConductor(_))
        ));
    }
}
