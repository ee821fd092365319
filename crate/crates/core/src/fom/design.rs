//! End-to-end evaluation of an ESR line design and the comparison studies.
//!
//! Pipeline per design: build the scene, solve the line network at the
//! working frequency, derive the excitation from the input power, solve the
//! filament currents for the current through the short, then solve the
//! panel charges for the resulting line voltage profile.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{evaluate_fom, ComparisonTable, FomError, FomReport};
use crate::electroqs::{
    discretize_panels, e_field_at_scene_probes, ChargeSolution, EqsError, PanelSystem,
};
use crate::field::FieldSample;
use crate::geom::Vec3;
use crate::magnetoqs::{
    assemble_impedance, b_field_at_scene_probes, biot_savart, discretize_filaments, solve_currents,
    CurrentSolution, Discretization, FilamentMesh, MqsError,
};
use crate::netline::{
    excitation_from_power, Abcd, Chain, CrossSectionSettings, Excitation, NetError, NetworkModel,
    NetworkPoint,
};
use crate::scene::{
    build_scene, find_layer, generate_line, ConductorBrick, Layer, LineConfig, LineKind, Material,
    ProbeSet, Scene, SceneError, RETURN_NET, SIGNAL_NET,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Magnetic(#[from] MqsError),
    #[error(transparent)]
    Electric(#[from] EqsError),
    #[error(transparent)]
    Network(#[from] NetError),
    #[error(transparent)]
    Fom(#[from] FomError),
    #[error("invalid study: {0}")]
    InvalidStudy(String),
}

pub type Result<T> = std::result::Result<T, DesignError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub filaments: Discretization,
    pub max_panel_edge: f64,
    /// Overrides the stack-derived effective permittivity.
    pub eps_eff: Option<f64>,
    pub cross_section: CrossSectionSettings,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            filaments: Discretization::default(),
            max_panel_edge: 200e-9,
            eps_eff: None,
            cross_section: CrossSectionSettings::default(),
        }
    }
}

/// How the line is driven.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Drive {
    /// Available source power (dBm).
    Power { dbm: f64 },
    /// Peak current through the short (A); the source power is chosen to
    /// produce it.
    Current { amps: f64 },
}

/// Conductors around the line, grouped the way the environment study
/// switches them on and off.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub dummies: Vec<ConductorBrick>,
    pub gates: Vec<ConductorBrick>,
    pub interconnect: Vec<ConductorBrick>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvVariant {
    Bare,
    WithDummies,
    WithInterconnect,
    Full,
}

impl EnvVariant {
    pub const ALL: [EnvVariant; 4] = [
        EnvVariant::Bare,
        EnvVariant::WithDummies,
        EnvVariant::WithInterconnect,
        EnvVariant::Full,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EnvVariant::Bare => "bare",
            EnvVariant::WithDummies => "with_dummies",
            EnvVariant::WithInterconnect => "with_interconnect",
            EnvVariant::Full => "full",
        }
    }
}

impl Environment {
    /// Bricks present in `variant`; poly gates count with the dummies.
    pub fn bricks(&self, variant: EnvVariant) -> Vec<ConductorBrick> {
        let (fill, wires) = match variant {
            EnvVariant::Bare => (false, false),
            EnvVariant::WithDummies => (true, false),
            EnvVariant::WithInterconnect => (false, true),
            EnvVariant::Full => (true, true),
        };
        let mut out = Vec::new();
        if fill {
            out.extend(self.gates.iter().cloned());
            out.extend(self.dummies.iter().cloned());
        }
        if wires {
            out.extend(self.interconnect.iter().cloned());
        }
        out
    }
}

/// Everything needed to evaluate one ESR line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design {
    pub label: String,
    pub stack: Vec<Layer>,
    pub materials: Vec<Material>,
    pub line: LineConfig,
    /// Off-chip access line between the source and the line port, modeled
    /// by the network only.
    pub access: Option<LineConfig>,
    pub environment: Environment,
    pub variant: EnvVariant,
    pub probes: Vec<ProbeSet>,
    /// K
    pub temperature: f64,
    /// Hz
    pub frequency: f64,
    pub drive: Drive,
    pub solver: SolverSettings,
}

impl Design {
    /// Line bricks plus the selected environment. Environment bricks that
    /// overlap or touch the line are left out.
    pub fn scene(&self) -> Result<Scene> {
        let line = generate_line(&self.line, &self.stack)?;
        let mut bricks = line.clone();
        for b in self.environment.bricks(self.variant) {
            if line.iter().all(|l| l.bounds.distance(&b.bounds) > 0.0) {
                bricks.push(b);
            }
        }
        Ok(build_scene(
            self.stack.clone(),
            self.materials.clone(),
            bricks,
            vec![self.line.port()],
            self.probes.clone(),
            self.temperature,
        )?)
    }

    fn chain(&self) -> Chain<'_> {
        match &self.access {
            Some(a) => Chain::of_line(a).then(Chain::of_line(&self.line)),
            None => Chain::of_line(&self.line),
        }
    }

    /// Chain matrix of the access line alone (identity without one).
    pub fn access_abcd(&self, scene: &Scene, frequency: f64, temperature: f64) -> Result<Abcd> {
        match &self.access {
            None => Ok(Abcd::identity()),
            Some(a) => {
                let zref = self.line.port().reference_impedance;
                let access = Chain::of_line(a);
                Ok(access
                    .point(
                        scene,
                        frequency,
                        temperature,
                        zref,
                        self.solver.cross_section,
                    )?
                    .abcd)
            }
        }
    }

    /// Network of access line plus ESR line over `frequencies`.
    pub fn sweep(
        &self,
        scene: &Scene,
        frequencies: &[f64],
        temperature: f64,
    ) -> Result<NetworkModel> {
        let zref = self.line.port().reference_impedance;
        Ok(self.chain().sweep(
            scene,
            frequencies,
            temperature,
            zref,
            self.solver.cross_section,
        )?)
    }

    /// Network of the ESR line alone.
    pub fn line_sweep(
        &self,
        scene: &Scene,
        frequencies: &[f64],
        temperature: f64,
    ) -> Result<NetworkModel> {
        let zref = self.line.port().reference_impedance;
        Ok(Chain::of_line(&self.line).sweep(
            scene,
            frequencies,
            temperature,
            zref,
            self.solver.cross_section,
        )?)
    }

    /// Same design with another line configuration.
    pub fn with_line(&self, line: LineConfig) -> Self {
        Self {
            line,
            ..self.clone()
        }
    }

    pub fn with_variant(&self, variant: EnvVariant) -> Self {
        Self {
            variant,
            ..self.clone()
        }
    }

    pub fn with_drive(&self, drive: Drive, frequency: f64) -> Self {
        Self {
            drive,
            frequency,
            ..self.clone()
        }
    }
}

/// Full output of [`evaluate_design`].
#[derive(Debug, Clone)]
pub struct DesignResult {
    pub scene: Scene,
    pub report: FomReport,
    pub network: NetworkPoint,
    pub excitation: Excitation,
    /// B and E at every probe, probe sets concatenated in scene order.
    pub samples: Vec<FieldSample>,
    /// Current through the short that drove the filament solve (A).
    pub terminal_current: Complex64,
    /// `Σ R_k |I_k|² / 2` over the filaments (W).
    pub filament_loss: f64,
    /// Impedance of the line seen by the filament solve (Ω).
    pub filament_impedance: Complex64,
    pub eps_eff: f64,
    pub filament_count: usize,
    pub panel_count: usize,
    pub currents: CurrentSolution,
    pub filaments: FilamentMesh,
    pub panel_system: PanelSystem,
    pub charges: ChargeSolution,
}

impl DesignResult {
    /// B and E at arbitrary points outside the conductors.
    pub fn fields_at(&self, points: &[Vec3]) -> Result<Vec<FieldSample>> {
        points
            .par_iter()
            .map(|p| {
                let b = biot_savart(&self.currents, &self.filaments.filaments, p)?;
                let e = self.panel_system.e_field(&self.charges, p)?;
                Ok(FieldSample { point: *p, b, e })
            })
            .collect()
    }
}

fn excitation_for(design: &Design, network: &NetworkPoint) -> Result<Excitation> {
    let zref = design.line.port().reference_impedance;
    let dbm = match design.drive {
        Drive::Power { dbm } => dbm,
        Drive::Current { amps } => {
            // source voltage that pushes `amps` through the short: I_short = Vs / ((zref + zin) D)
            let d = network.abcd.0[1][1];
            let vs = amps * (d * (zref + network.zin)).norm();
            let p = vs * vs / (8.0 * zref);
            10.0 * (p / 1e-3).log10()
        }
    };
    Ok(excitation_from_power(dbm, zref, network.zin)?.with_network(&network.abcd))
}

/// Height used for the line in the effective-permittivity average: the
/// mid-plane of its strips.
fn line_height(design: &Design) -> Result<f64> {
    let layer = find_layer(&design.stack, &design.line.level)?;
    Ok(layer.z_min + 0.5 * design.line.thickness.unwrap_or(layer.thickness))
}

pub fn evaluate_design(design: &Design) -> Result<DesignResult> {
    let scene = design.scene()?;
    let zref = design.line.port().reference_impedance;
    let network = design.chain().point(
        &scene,
        design.frequency,
        design.temperature,
        zref,
        design.solver.cross_section,
    )?;
    let excitation = excitation_for(design, &network)?;
    let current = excitation.short_current;

    // magnetic part
    let mesh = discretize_filaments(&scene, design.solver.filaments)?;
    let system = assemble_impedance(mesh, design.frequency)?;
    let currents = solve_currents(&system, current)?;
    let b = b_field_at_scene_probes(&scene, &currents, &system.mesh)?;
    let filament_loss = currents.ohmic_loss(&system);
    let filament_impedance = if current.norm() > 0.0 {
        currents.port_impedance(&system.mesh)
    } else {
        let unit = solve_currents(&system, Complex64::new(1.0, 0.0))?;
        unit.port_impedance(&system.mesh)
    };

    // electric part, driven by the line's voltage profile
    let probe_points: Vec<f64> = scene
        .probes()
        .iter()
        .flat_map(|p| p.points.iter().map(|v| v[2]))
        .collect();
    if probe_points.is_empty() {
        return Err(FomError::EmptyProbes.into());
    }
    let z_probe = probe_points.iter().sum::<f64>() / probe_points.len() as f64;
    let eps_eff = match design.solver.eps_eff {
        Some(e) => e,
        None => crate::electroqs::effective_permittivity(&scene, line_height(design)?, z_probe)?,
    };
    let panels = discretize_panels(&scene, design.solver.max_panel_edge)?;
    let panel_system = PanelSystem::assemble(&scene, panels, eps_eff)?;
    let drive: Vec<Complex64> = panel_system
        .panels
        .iter()
        .map(|p| {
            currents
                .potential_on_brick(&system.mesh, p.brick, &p.center)
                .unwrap_or_default()
        })
        .collect();
    let charges = panel_system.solve_drive(&drive, &[SIGNAL_NET, RETURN_NET])?;
    let e = e_field_at_scene_probes(&scene, &panel_system, &charges)?;

    let samples: Vec<FieldSample> = b
        .iter()
        .zip(&e)
        .map(|(b, e)| FieldSample::combine(b, e))
        .collect();
    let report = evaluate_fom(&b, &e, &network, &excitation, &design.label)?;
    Ok(DesignResult {
        report,
        network,
        excitation,
        samples,
        terminal_current: current,
        filament_loss,
        filament_impedance,
        eps_eff,
        filament_count: system.mesh.len(),
        panel_count: panel_system.len(),
        scene,
        currents,
        filaments: system.mesh,
        panel_system,
        charges,
    })
}

fn evaluate_rows(designs: Vec<Design>) -> Result<Vec<FomReport>> {
    designs
        .iter()
        .map(|d| Ok(evaluate_design(d)?.report))
        .collect()
}

/// One row per line configuration; the CPW-to-CPS row is the reference when
/// present.
pub fn compare_configurations(
    base: &Design,
    configs: &[LineConfig],
    drive: Drive,
    frequency: f64,
) -> Result<ComparisonTable> {
    if configs.len() < 2 {
        return Err(DesignError::InvalidStudy(
            "at least two configurations are needed".into(),
        ));
    }
    let designs = configs
        .iter()
        .map(|c| {
            let mut d = base.with_line(c.clone()).with_drive(drive, frequency);
            d.label = c.kind.label().to_string();
            d
        })
        .collect();
    let reference = configs
        .iter()
        .position(|c| c.kind == LineKind::CpwToCps)
        .unwrap_or(0);
    Ok(ComparisonTable::new(
        "line configuration",
        evaluate_rows(designs)?,
        reference,
    ))
}

/// One row per level the line is moved to; the base level is the reference
/// when listed.
pub fn compare_stacks(
    base: &Design,
    levels: &[&str],
    drive: Drive,
    frequency: f64,
) -> Result<ComparisonTable> {
    if levels.is_empty() {
        return Err(DesignError::InvalidStudy("no levels given".into()));
    }
    let mut designs = Vec::new();
    for level in levels {
        find_layer(&base.stack, level)?;
        let mut line = base.line.clone();
        line.level = level.to_string();
        let mut d = base.with_line(line).with_drive(drive, frequency);
        d.label = level.to_string();
        designs.push(d);
    }
    let reference = levels
        .iter()
        .position(|l| *l == base.line.level)
        .unwrap_or(0);
    Ok(ComparisonTable::new(
        "line level",
        evaluate_rows(designs)?,
        reference,
    ))
}

/// One row per environment variant; `full` is the reference when listed.
pub fn compare_environment(
    base: &Design,
    variants: &[EnvVariant],
    drive: Drive,
    frequency: f64,
) -> Result<ComparisonTable> {
    if variants.is_empty() {
        return Err(DesignError::InvalidStudy("no variants given".into()));
    }
    let designs = variants
        .iter()
        .map(|v| {
            let mut d = base.with_variant(*v).with_drive(drive, frequency);
            d.label = v.label().to_string();
            d
        })
        .collect();
    let reference = variants
        .iter()
        .position(|v| *v == EnvVariant::Full)
        .unwrap_or(0);
    Ok(ComparisonTable::new(
        "environment",
        evaluate_rows(designs)?,
        reference,
    ))
}
