//! JSON scene files.
//!
//! Every length is a string carrying its unit (`"200 nm"`, `"1.5 um"`).
//! Unknown keys are rejected. A file may list conductors explicitly, use the
//! `line` and `dummies` presets, or both.

use std::path::Path;

use serde::{Deserialize, Serialize};

use esr_core::fom::{Design, Drive, EnvVariant, Environment, SolverSettings};
use esr_core::geom::{Aabb, Vec3};
use esr_core::magnetoqs::Discretization;
use esr_core::netline::CrossSectionSettings;
use esr_core::scene::{
    build_scene, find_layer, generate_dummies, generate_line, ConductorBrick, Layer, LineConfig,
    LineKind, Material, Net, Port, ProbeSet, Region, Role, Scene,
};

use crate::error::CliError;
use crate::units::Length;

pub const FLOATING: &str = "FLOATING";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub materials: Vec<MaterialEntry>,
    pub stack: Vec<LayerEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conductors: Vec<ConductorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<LineEntry>,
    /// Off-chip access line in front of `line`; network model only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub access_line: Option<LineEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dummies: Option<DummyEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ports: Vec<PortEntry>,
    #[serde(default)]
    pub probes: Vec<ProbeEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub field_maps: Vec<FieldMapEntry>,
    #[serde(default)]
    pub settings: SettingsEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialEntry {
    Conductor {
        name: String,
        conductivity_300k: f64,
        #[serde(default = "one")]
        rrr: f64,
    },
    Dielectric {
        name: String,
        relative_permittivity: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerEntry {
    pub name: String,
    pub z_min: Length,
    pub thickness: Length,
    pub dielectric: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConductorEntry {
    pub id: String,
    pub x: [Length; 2],
    pub y: [Length; 2],
    pub z: [Length; 2],
    pub material: String,
    /// Net name, or `FLOATING`.
    pub net: String,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineEntry {
    pub kind: LineKind,
    pub signal_width: Length,
    pub gap: Length,
    pub ground_width: Length,
    pub length: Length,
    pub level: String,
    pub material: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thickness: Option<Length>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strap_width: Option<Length>,
    /// CPW section length ahead of the balun (CPW_TO_CPS only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition_length: Option<Length>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DummyEntry {
    pub x: [Length; 2],
    pub y: [Length; 2],
    pub pitch: Length,
    pub fill: f64,
    pub level: String,
    pub material: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortEntry {
    pub id: String,
    pub positive_net: String,
    pub negative_net: String,
    #[serde(default = "fifty")]
    pub reference_impedance_ohm: f64,
}

fn fifty() -> f64 {
    50.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeEntry {
    pub label: String,
    pub points: Vec<[Length; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub from: Length,
    pub to: Length,
    pub count: usize,
}

/// Rectilinear grid of field samples, x fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldMapEntry {
    pub label: String,
    pub x: AxisRange,
    pub y: AxisRange,
    pub z: AxisRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySweep {
    pub start_hz: f64,
    pub stop_hz: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilamentEntry {
    pub nx: usize,
    pub ny: usize,
    pub segments: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossSectionEntry {
    pub nx: usize,
    pub ny: usize,
    pub segments_per_edge: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsEntry {
    #[serde(default = "default_temperature")]
    pub temperature_k: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frequencies_hz: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_sweep: Option<FrequencySweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pin_dbm: Option<f64>,
    /// Drives the line by the peak current through the short instead of
    /// by input power.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal_current_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filaments: Option<FilamentEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_panel_edge: Option<Length>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_section: Option<CrossSectionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_eff: Option<f64>,
    /// Environment variant of `solve` and `sweep`; defaults to `full`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub environment: Option<EnvVariant>,
}

fn default_temperature() -> f64 {
    4.0
}

impl Default for SettingsEntry {
    fn default() -> Self {
        Self {
            temperature_k: default_temperature(),
            frequencies_hz: Vec::new(),
            frequency_sweep: None,
            pin_dbm: None,
            terminal_current_a: None,
            filaments: None,
            max_panel_edge: None,
            cross_section: None,
            eps_eff: None,
            environment: None,
        }
    }
}

pub const DEFAULT_FREQUENCY: f64 = 10e9;
pub const DEFAULT_PIN_DBM: f64 = -7.0;

/// Settings with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub temperature: f64,
    pub frequencies: Vec<f64>,
    pub drive: Drive,
    pub solver: SolverSettings,
    pub variant: EnvVariant,
}

/// Sample points of a field map.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    pub label: String,
    pub points: Vec<Vec3>,
}

/// A scene file after validation.
#[derive(Debug, Clone)]
pub struct ParsedScene {
    pub scene: Scene,
    pub line: Option<LineConfig>,
    pub access: Option<LineConfig>,
    pub environment: Environment,
    pub settings: Settings,
    pub field_maps: Vec<FieldMap>,
}

impl ParsedScene {
    /// The design studied by the CLI; requires a `line` preset.
    pub fn design(&self, label: &str) -> Result<Design, CliError> {
        let line = self
            .line
            .clone()
            .ok_or_else(|| CliError::invalid("line", "studies need a `line` preset"))?;
        Ok(Design {
            label: label.to_string(),
            stack: self.scene.stack().to_vec(),
            materials: self.scene.materials().values().cloned().collect(),
            line,
            access: self.access.clone(),
            environment: self.environment.clone(),
            variant: self.settings.variant,
            probes: self.scene.probes().to_vec(),
            temperature: self.settings.temperature,
            frequency: self.settings.frequencies[0],
            drive: self.settings.drive,
            solver: self.settings.solver,
        })
    }
}

fn span(r: &[Length; 2], field: &str) -> Result<(f64, f64), CliError> {
    Ok((r[0].meters(field)?, r[1].meters(field)?))
}

fn opt_len(l: &Option<Length>, field: &str) -> Result<Option<f64>, CliError> {
    l.as_ref().map(|l| l.meters(field)).transpose()
}

impl LineEntry {
    pub fn to_config(&self, what: &str) -> Result<LineConfig, CliError> {
        let f = |name: &str| format!("{what}.{name}");
        let mut c = LineConfig::new(
            self.kind,
            self.signal_width.meters(&f("signal_width"))?,
            self.gap.meters(&f("gap"))?,
            self.ground_width.meters(&f("ground_width"))?,
            self.length.meters(&f("length"))?,
            &self.level,
            &self.material,
        );
        c.thickness = opt_len(&self.thickness, &f("thickness"))?;
        c.strap_width = opt_len(&self.strap_width, &f("strap_width"))?;
        c.access_length = opt_len(&self.transition_length, &f("transition_length"))?;
        Ok(c)
    }

    pub fn from_config(c: &LineConfig) -> Self {
        Self {
            kind: c.kind,
            signal_width: Length::from_meters(c.signal_width),
            gap: Length::from_meters(c.gap),
            ground_width: Length::from_meters(c.ground_width),
            length: Length::from_meters(c.length),
            level: c.level.clone(),
            material: c.material.clone(),
            thickness: c.thickness.map(Length::from_meters),
            strap_width: c.strap_width.map(Length::from_meters),
            transition_length: c.access_length.map(Length::from_meters),
        }
    }
}

fn axis_points(r: &AxisRange, field: &str) -> Result<Vec<f64>, CliError> {
    let (a, b) = (r.from.meters(field)?, r.to.meters(field)?);
    match r.count {
        0 => Err(CliError::invalid(field, "count must be >= 1")),
        1 if a != b => Err(CliError::invalid(field, "a single sample needs from == to")),
        1 => Ok(vec![a]),
        n => Ok((0..n)
            .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
            .collect()),
    }
}

impl FieldMapEntry {
    fn points(&self) -> Result<Vec<Vec3>, CliError> {
        let f = |a: &str| format!("field_maps.{}.{a}", self.label);
        let (xs, ys, zs) = (
            axis_points(&self.x, &f("x"))?,
            axis_points(&self.y, &f("y"))?,
            axis_points(&self.z, &f("z"))?,
        );
        let mut out = Vec::with_capacity(xs.len() * ys.len() * zs.len());
        for z in &zs {
            for y in &ys {
                for x in &xs {
                    out.push(Vec3::new(*x, *y, *z));
                }
            }
        }
        Ok(out)
    }
}

fn frequencies(s: &SettingsEntry) -> Result<Vec<f64>, CliError> {
    let f = match (&s.frequency_sweep, s.frequencies_hz.is_empty()) {
        (Some(_), false) => {
            return Err(CliError::invalid(
                "settings",
                "give either `frequencies_hz` or `frequency_sweep`, not both",
            ))
        }
        (Some(sw), true) => sweep_frequencies(sw.start_hz, sw.stop_hz, sw.count)?,
        (None, false) => s.frequencies_hz.clone(),
        (None, true) => vec![DEFAULT_FREQUENCY],
    };
    check_frequencies(&f)?;
    Ok(f)
}

/// `count` evenly spaced frequencies from `start` to `stop` inclusive.
pub fn sweep_frequencies(start: f64, stop: f64, count: usize) -> Result<Vec<f64>, CliError> {
    if count == 0 || (count == 1 && start != stop) {
        return Err(CliError::invalid(
            "frequency sweep",
            "count must be >= 1 (and start == stop for one point)",
        ));
    }
    let f = esr_core::netline::linear_frequencies(start, stop, count);
    check_frequencies(&f)?;
    Ok(f)
}

fn check_frequencies(f: &[f64]) -> Result<(), CliError> {
    if f.is_empty()
        || f.iter().any(|v| !(*v > 0.0) || !v.is_finite())
        || f.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(CliError::invalid(
            "frequencies",
            "must be positive, finite and strictly increasing",
        ));
    }
    Ok(())
}

impl SettingsEntry {
    fn resolve(&self) -> Result<Settings, CliError> {
        if !(self.temperature_k > 0.0) || !self.temperature_k.is_finite() {
            return Err(CliError::invalid("settings.temperature_k", "must be > 0"));
        }
        let drive = match (self.pin_dbm, self.terminal_current_a) {
            (Some(_), Some(_)) => {
                return Err(CliError::invalid(
                    "settings",
                    "give either `pin_dbm` or `terminal_current_a`, not both",
                ))
            }
            (_, Some(a)) if !(a >= 0.0) || !a.is_finite() => {
                return Err(CliError::invalid(
                    "settings.terminal_current_a",
                    "must be >= 0",
                ))
            }
            (_, Some(amps)) => Drive::Current { amps },
            (Some(dbm), None) => Drive::Power { dbm },
            (None, None) => Drive::Power {
                dbm: DEFAULT_PIN_DBM,
            },
        };
        let mut solver = SolverSettings::default();
        if let Some(f) = self.filaments {
            solver.filaments = Discretization {
                nx: f.nx,
                ny: f.ny,
                segments: f.segments,
            };
        }
        if let Some(c) = self.cross_section {
            solver.cross_section = CrossSectionSettings {
                nx: c.nx,
                ny: c.ny,
                segments_per_edge: c.segments_per_edge,
            };
        }
        if let Some(e) = &self.max_panel_edge {
            solver.max_panel_edge = e.meters("settings.max_panel_edge")?;
        }
        solver.eps_eff = self.eps_eff;
        Ok(Settings {
            temperature: self.temperature_k,
            frequencies: frequencies(self)?,
            drive,
            solver,
            variant: self.environment.unwrap_or(EnvVariant::Full),
        })
    }
}

fn material(m: &MaterialEntry) -> Material {
    match m {
        MaterialEntry::Conductor {
            name,
            conductivity_300k,
            rrr,
        } => Material::conductor(name, *conductivity_300k, *rrr),
        MaterialEntry::Dielectric {
            name,
            relative_permittivity,
        } => Material::dielectric(name, *relative_permittivity),
    }
}

impl SceneFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scene files always serialize");
        s.push('\n');
        s
    }

    /// Validates the file and expands its presets.
    pub fn resolve(&self) -> Result<ParsedScene, CliError> {
        let materials: Vec<Material> = self.materials.iter().map(material).collect();
        let stack = self
            .stack
            .iter()
            .map(|l| {
                Ok(Layer::new(
                    &l.name,
                    l.z_min.meters(&format!("stack.{}.z_min", l.name))?,
                    l.thickness.meters(&format!("stack.{}.thickness", l.name))?,
                    &l.dielectric,
                ))
            })
            .collect::<Result<Vec<_>, CliError>>()?;

        let line = self
            .line
            .as_ref()
            .map(|l| l.to_config("line"))
            .transpose()?;
        let access = self
            .access_line
            .as_ref()
            .map(|l| l.to_config("access_line"))
            .transpose()?;
        if access.is_some() && line.is_none() {
            return Err(CliError::invalid("access_line", "needs a `line` preset"));
        }

        let mut explicit = Vec::new();
        for c in &self.conductors {
            let f = |a: &str| format!("conductors.{}.{a}", c.id);
            let (x0, x1) = span(&c.x, &f("x"))?;
            let (y0, y1) = span(&c.y, &f("y"))?;
            let (z0, z1) = span(&c.z, &f("z"))?;
            let net = if c.net == FLOATING {
                Net::Floating
            } else {
                Net::named(&c.net)
            };
            if line.is_some() && matches!(c.role, Role::Signal | Role::Return | Role::ShortStrap) {
                return Err(CliError::invalid(
                    &c.id,
                    "line conductors cannot be listed next to a `line` preset",
                ));
            }
            explicit.push(ConductorBrick::new(
                &c.id,
                Aabb::new(x0, x1, y0, y1, z0, z1),
                &c.material,
                net,
                c.role,
            ));
        }

        let mut environment = Environment {
            dummies: Vec::new(),
            gates: Vec::new(),
            interconnect: Vec::new(),
        };
        for c in &explicit {
            match c.role {
                Role::Dummy => environment.dummies.push(c.clone()),
                Role::Gate => environment.gates.push(c.clone()),
                Role::Interconnect => environment.interconnect.push(c.clone()),
                _ => {}
            }
        }
        if let Some(d) = &self.dummies {
            let (x0, x1) = span(&d.x, "dummies.x")?;
            let (y0, y1) = span(&d.y, "dummies.y")?;
            let level = find_layer(&stack, &d.level)?;
            let region = Region { x0, x1, y0, y1 };
            environment.dummies.extend(generate_dummies(
                region,
                d.pitch.meters("dummies.pitch")?,
                d.fill,
                level,
                &d.material,
            )?);
        }

        let mut bricks = Vec::new();
        if let Some(l) = &line {
            bricks.extend(generate_line(l, &stack)?);
        }
        bricks.extend(
            explicit
                .iter()
                .filter(|c| !matches!(c.role, Role::Dummy))
                .cloned(),
        );
        bricks.extend(environment.dummies.iter().cloned());

        let mut ports: Vec<Port> = self
            .ports
            .iter()
            .map(|p| Port {
                id: p.id.clone(),
                positive_net: p.positive_net.clone(),
                negative_net: p.negative_net.clone(),
                reference_impedance: p.reference_impedance_ohm,
            })
            .collect();
        if ports.is_empty() {
            if let Some(l) = &line {
                ports.push(l.port());
            }
        }

        let probes = self
            .probes
            .iter()
            .map(|p| {
                let pts = p
                    .points
                    .iter()
                    .map(|[x, y, z]| {
                        let f = format!("probes.{}", p.label);
                        Ok(Vec3::new(x.meters(&f)?, y.meters(&f)?, z.meters(&f)?))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                Ok(ProbeSet::new(&p.label, pts))
            })
            .collect::<Result<Vec<_>, CliError>>()?;

        let settings = self.settings.resolve()?;
        let scene = build_scene(
            stack,
            materials,
            bricks,
            ports,
            probes,
            settings.temperature,
        )?;
        let field_maps = self
            .field_maps
            .iter()
            .map(|m| {
                Ok(FieldMap {
                    label: m.label.clone(),
                    points: m.points()?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(ParsedScene {
            scene,
            line,
            access,
            environment,
            settings,
            field_maps,
        })
    }

    /// Explicit description of a scene: every conductor listed, no presets.
    pub fn from_scene(scene: &Scene) -> Self {
        let materials: Vec<Material> = scene.materials().values().cloned().collect();
        let ports = scene
            .ports()
            .iter()
            .map(|p| PortEntry {
                id: p.id.clone(),
                positive_net: p.positive_net.clone(),
                negative_net: p.negative_net.clone(),
                reference_impedance_ohm: p.reference_impedance,
            })
            .collect();
        SceneFile {
            conductors: scene
                .conductors()
                .iter()
                .map(ConductorEntry::from_brick)
                .collect(),
            ports,
            settings: SettingsEntry {
                temperature_k: scene.temperature(),
                ..SettingsEntry::default()
            },
            ..SceneFile::from_parts(scene.stack(), &materials, scene.probes())
        }
    }

    fn from_parts(stack: &[Layer], materials: &[Material], probes: &[ProbeSet]) -> Self {
        let materials = materials
            .iter()
            .map(|m| {
                if m.is_conductor {
                    MaterialEntry::Conductor {
                        name: m.name.clone(),
                        conductivity_300k: m.conductivity_300k,
                        rrr: m.rrr,
                    }
                } else {
                    MaterialEntry::Dielectric {
                        name: m.name.clone(),
                        relative_permittivity: m.relative_permittivity,
                    }
                }
            })
            .collect();
        let stack = stack
            .iter()
            .map(|l| LayerEntry {
                name: l.name.clone(),
                z_min: Length::from_meters(l.z_min),
                thickness: Length::from_meters(l.thickness),
                dielectric: l.dielectric.clone(),
            })
            .collect();
        let probes = probes
            .iter()
            .map(|p| ProbeEntry {
                label: p.label.clone(),
                points: p
                    .points
                    .iter()
                    .map(|v| [0, 1, 2].map(|k| Length::from_meters(v[k])))
                    .collect(),
            })
            .collect();
        SceneFile {
            materials,
            stack,
            conductors: Vec::new(),
            line: None,
            access_line: None,
            dummies: None,
            ports: Vec::new(),
            probes,
            field_maps: Vec::new(),
            settings: SettingsEntry::default(),
        }
    }
}

impl ConductorEntry {
    pub fn from_brick(c: &ConductorBrick) -> Self {
        let pair = |k: usize| {
            [
                Length::from_meters(c.bounds.min[k]),
                Length::from_meters(c.bounds.max[k]),
            ]
        };
        ConductorEntry {
            id: c.id.clone(),
            x: pair(0),
            y: pair(1),
            z: pair(2),
            material: c.material.clone(),
            net: c.net.name().unwrap_or(FLOATING).to_string(),
            role: c.role,
        }
    }
}

impl SceneFile {
    /// Scene file describing `design`: its line and access line as presets,
    /// environment conductors listed explicitly.
    pub fn from_design(design: &Design) -> Self {
        let scene_like = SceneFile::from_parts(&design.stack, &design.materials, &design.probes);
        let env = &design.environment;
        let conductors = env
            .gates
            .iter()
            .chain(&env.interconnect)
            .chain(&env.dummies)
            .map(ConductorEntry::from_brick)
            .collect();
        let defaults = SolverSettings::default();
        let s = design.solver;
        let (pin_dbm, terminal_current_a) = match design.drive {
            Drive::Power { dbm } => (Some(dbm), None),
            Drive::Current { amps } => (None, Some(amps)),
        };
        SceneFile {
            conductors,
            line: Some(LineEntry::from_config(&design.line)),
            access_line: design.access.as_ref().map(LineEntry::from_config),
            settings: SettingsEntry {
                temperature_k: design.temperature,
                frequencies_hz: vec![design.frequency],
                frequency_sweep: None,
                pin_dbm,
                terminal_current_a,
                filaments: (s.filaments != defaults.filaments).then_some(FilamentEntry {
                    nx: s.filaments.nx,
                    ny: s.filaments.ny,
                    segments: s.filaments.segments,
                }),
                max_panel_edge: (s.max_panel_edge != defaults.max_panel_edge)
                    .then(|| Length::from_meters(s.max_panel_edge)),
                cross_section: (s.cross_section != defaults.cross_section).then_some(
                    CrossSectionEntry {
                        nx: s.cross_section.nx,
                        ny: s.cross_section.ny,
                        segments_per_edge: s.cross_section.segments_per_edge,
                    },
                ),
                eps_eff: s.eps_eff,
                environment: Some(design.variant),
            },
            ..scene_like
        }
    }
}

pub fn parse_scene_str(text: &str) -> Result<ParsedScene, CliError> {
    SceneFile::from_json(text)?.resolve()
}

pub fn parse_scene(path: &Path) -> Result<ParsedScene, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_scene_str(&text)
}
