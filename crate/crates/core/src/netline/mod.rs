//! Transmission-line and network engine.
//!
//! A shorted ESR line is a cascade of uniform sections (a CPW access part
//! and a CPS nano-antenna for the balun variant, a single section
//! otherwise). Per-unit-length parameters come from 2D field solves of each
//! section's cross-section; the rest is classical line theory with peak
//! phasors and `exp(+jωt)` time dependence.

pub mod touchstone;

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::electroqs::cross_section::capacitance_per_length;
use crate::electroqs::EqsError;
use crate::magnetoqs::cross_section::{loop_per_length, Side, Strip};
use crate::magnetoqs::MqsError;
use crate::scene::{
    conductivity_at_temperature, find_layer, LineConfig, LineKind, Scene, SceneError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("|S11| = {0} exceeds 1: the load is active")]
    ActiveLoad(f64),
    #[error("access network is singular (det = {0})")]
    SingularAccess(f64),
    #[error("frequencies must be non-empty, positive and strictly increasing")]
    InvalidFrequencies,
    #[error("reference impedance must be > 0, got {0}")]
    InvalidReference(f64),
    #[error("invalid RLGC model: {0}")]
    InvalidRlgc(String),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Magnetic(#[from] MqsError),
    #[error(transparent)]
    Electric(#[from] EqsError),
}

pub type Result<T> = std::result::Result<T, NetError>;

/// Per-unit-length line parameters at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RlgcModel {
    /// Ω/m
    pub r: f64,
    /// H/m
    pub l: f64,
    /// S/m
    pub g: f64,
    /// F/m
    pub c: f64,
    pub frequency: f64,
}

impl RlgcModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.r >= 0.0
            && self.l > 0.0
            && self.g >= 0.0
            && self.c > 0.0
            && self.frequency >= 0.0)
        {
            return Err(NetError::InvalidRlgc(format!("{self:?}")));
        }
        Ok(())
    }

    fn omega(&self) -> f64 {
        2.0 * PI * self.frequency
    }

    pub fn series(&self) -> Complex64 {
        Complex64::new(self.r, self.omega() * self.l)
    }

    pub fn shunt(&self) -> Complex64 {
        Complex64::new(self.g, self.omega() * self.c)
    }
}

/// Discretization of the 2D cross-section solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionSettings {
    /// Filaments per strip across the width and the thickness.
    pub nx: usize,
    pub ny: usize,
    /// Outline segments per smallest strip dimension for the charge solve.
    pub segments_per_edge: usize,
}

impl Default for CrossSectionSettings {
    fn default() -> Self {
        Self {
            nx: 8,
            ny: 3,
            segments_per_edge: 6,
        }
    }
}

/// Transverse shape of a uniform section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SectionShape {
    /// Signal strip beside one return strip.
    Stripline,
    /// Signal strip between two return strips.
    Waveguide,
}

/// Uniform section of a line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSection {
    pub shape: SectionShape,
    pub length: f64,
}

/// Sections of `config` from the port to the short.
pub fn line_sections(config: &LineConfig) -> Vec<LineSection> {
    match config.kind {
        LineKind::Cps => vec![LineSection {
            shape: SectionShape::Stripline,
            length: config.length,
        }],
        LineKind::Cpw => vec![LineSection {
            shape: SectionShape::Waveguide,
            length: config.length,
        }],
        LineKind::CpwToCps => vec![
            LineSection {
                shape: SectionShape::Waveguide,
                length: config.transition(),
            },
            LineSection {
                shape: SectionShape::Stripline,
                length: config.length - config.transition(),
            },
        ],
    }
}

/// Cross-section strips of `config` with `shape`, at `temperature`.
pub fn section_strips(
    scene: &Scene,
    config: &LineConfig,
    shape: SectionShape,
    temperature: f64,
) -> Result<Vec<Strip>> {
    config.validate(scene.stack())?;
    let layer = find_layer(scene.stack(), &config.level)?;
    let sigma = conductivity_at_temperature(scene.material(&config.material)?, temperature)?;
    let z0 = layer.z_min;
    let z1 = z0 + config.thickness.unwrap_or(layer.thickness);
    let (ws, g, wg) = (config.signal_width, config.gap, config.ground_width);
    let strip = |y0: f64, y1: f64, side| Strip {
        y0,
        y1,
        z0,
        z1,
        conductivity: sigma,
        side,
    };
    Ok(match shape {
        SectionShape::Stripline => vec![
            strip(-0.5 * ws, 0.5 * ws, Side::Signal),
            strip(-0.5 * ws - g - wg, -0.5 * ws - g, Side::Return),
        ],
        SectionShape::Waveguide => vec![
            strip(-0.5 * ws, 0.5 * ws, Side::Signal),
            strip(0.5 * ws + g, 0.5 * ws + g + wg, Side::Return),
            strip(-0.5 * ws - g - wg, -0.5 * ws - g, Side::Return),
        ],
    })
}

/// Relative permittivity of the dielectric embedding the line's level.
pub fn line_permittivity(scene: &Scene, config: &LineConfig) -> Result<f64> {
    let layer = find_layer(scene.stack(), &config.level)?;
    Ok(scene.material(&layer.dielectric)?.relative_permittivity)
}

/// Capacitance per unit length of one section (F/m).
pub fn section_capacitance(
    scene: &Scene,
    config: &LineConfig,
    shape: SectionShape,
    settings: CrossSectionSettings,
) -> Result<f64> {
    let strips = section_strips(scene, config, shape, scene.temperature())?;
    let smallest = strips
        .iter()
        .flat_map(|s| [s.width(), s.height()])
        .chain([config.gap])
        .fold(f64::INFINITY, f64::min);
    Ok(capacitance_per_length(
        &strips,
        line_permittivity(scene, config)?,
        smallest / settings.segments_per_edge.max(1) as f64,
    )?)
}

fn rlgc_with_capacitance(
    scene: &Scene,
    config: &LineConfig,
    shape: SectionShape,
    frequency: f64,
    temperature: f64,
    settings: CrossSectionSettings,
    c: f64,
) -> Result<RlgcModel> {
    let strips = section_strips(scene, config, shape, temperature)?;
    let lp = loop_per_length(&strips, settings.nx, settings.ny, frequency)?;
    let model = RlgcModel {
        r: lp.resistance,
        l: lp.inductance,
        g: 0.0,
        c,
        frequency,
    };
    model.validate()?;
    Ok(model)
}

/// RLGC of one section from the cross-section solves; `G = 0`.
pub fn extract_section_rlgc(
    scene: &Scene,
    config: &LineConfig,
    shape: SectionShape,
    frequency: f64,
    temperature: f64,
    settings: CrossSectionSettings,
) -> Result<RlgcModel> {
    let c = section_capacitance(scene, config, shape, settings)?;
    rlgc_with_capacitance(scene, config, shape, frequency, temperature, settings, c)
}

/// RLGC of the section next to the short (the whole line unless it has a
/// balun), at the scene temperature.
pub fn extract_rlgc(scene: &Scene, config: &LineConfig, frequency: f64) -> Result<RlgcModel> {
    let shape = line_sections(config)
        .last()
        .expect("at least one section")
        .shape;
    extract_section_rlgc(
        scene,
        config,
        shape,
        frequency,
        scene.temperature(),
        CrossSectionSettings::default(),
    )
}

/// Characteristic impedance and propagation constant, `Re γ ≥ 0`.
pub fn characteristic(rlgc: &RlgcModel) -> (Complex64, Complex64) {
    let (z, y) = (rlgc.series(), rlgc.shunt());
    let mut gamma = (z * y).sqrt();
    if gamma.re < 0.0 {
        gamma = -gamma;
    }
    let z0 = if y.norm() > 0.0 {
        z / gamma
    } else {
        (z / y).sqrt()
    };
    (z0, gamma)
}

pub fn input_impedance_shorted(z0: Complex64, gamma: Complex64, length: f64) -> Complex64 {
    z0 * (gamma * length).tanh()
}

pub fn s11(zin: Complex64, zref: f64) -> Complex64 {
    (zin - zref) / (zin + zref)
}

/// Chain matrix `[[A, B], [C, D]]` with `(V1, I1) = M (V2, I2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Abcd(pub [[Complex64; 2]; 2]);

impl Abcd {
    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Abcd([[o, z], [z, o]])
    }

    /// Uniform line section.
    pub fn line(z0: Complex64, gamma: Complex64, length: f64) -> Self {
        let gl = gamma * length;
        let (ch, sh) = (gl.cosh(), gl.sinh());
        Abcd([[ch, z0 * sh], [sh / z0, ch]])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        let scale = self
            .0
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if !(d.norm() > 1e-14 * scale * scale) {
            return Err(NetError::SingularAccess(d.norm()));
        }
        let m = &self.0;
        Ok(Abcd([
            [m[1][1] / d, -m[0][1] / d],
            [-m[1][0] / d, m[0][0] / d],
        ]))
    }

    /// Input impedance with the output port shorted.
    pub fn shorted_input(&self) -> Complex64 {
        self.0[0][1] / self.0[1][1]
    }

    /// Two-port S matrix for reference impedance `zref` on both ports.
    pub fn to_s(&self, zref: f64) -> [[Complex64; 2]; 2] {
        let [[a, b], [c, d]] = self.0;
        let den = a + b / zref + c * zref + d;
        [
            [(a + b / zref - c * zref - d) / den, 2.0 * self.det() / den],
            [2.0 / den, (-a + b / zref - c * zref + d) / den],
        ]
    }

    pub fn from_s(s: [[Complex64; 2]; 2], zref: f64) -> Self {
        let [[s11, s12], [s21, s22]] = s;
        let one = Complex64::new(1.0, 0.0);
        let den = 2.0 * s21;
        Abcd([
            [
                ((one + s11) * (one - s22) + s12 * s21) / den,
                zref * ((one + s11) * (one + s22) - s12 * s21) / den,
            ],
            [
                ((one - s11) * (one - s22) - s12 * s21) / (den * zref),
                ((one - s11) * (one + s22) + s12 * s21) / den,
            ],
        ])
    }
}

impl Mul for Abcd {
    type Output = Abcd;

    fn mul(self, rhs: Abcd) -> Abcd {
        abcd_cascade(&self, &rhs)
    }
}

pub fn abcd_cascade(a: &Abcd, b: &Abcd) -> Abcd {
    Abcd(std::array::from_fn(|i| {
        std::array::from_fn(|j| a.0[i][0] * b.0[0][j] + a.0[i][1] * b.0[1][j])
    }))
}

/// Removes `access` from the port side of `total`.
pub fn de_embed(total: &Abcd, access: &Abcd) -> Result<Abcd> {
    Ok(abcd_cascade(&access.inverse()?, total))
}

/// Drive state derived from the available source power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Excitation {
    pub input_power_dbm: f64,
    pub reference_impedance: f64,
    /// Available power (W).
    pub available_power: f64,
    /// Incident wave amplitude `sqrt(2 P)` (√W, peak).
    pub incident_wave: f64,
    pub s11: Complex64,
    /// Power accepted by the line (W).
    pub accepted_power: f64,
    /// Peak voltage and current at the line input.
    pub input_voltage: Complex64,
    pub input_current: Complex64,
    /// Peak current through the short.
    pub short_current: Complex64,
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

/// Excitation of a load `zin` from a source of impedance `zref` delivering
/// `input_power_dbm` into a matched load. The short current equals the
/// input current; use [`Excitation::with_network`] to carry it through a line.
pub fn excitation_from_power(
    input_power_dbm: f64,
    zref: f64,
    zin: Complex64,
) -> Result<Excitation> {
    if !(zref > 0.0) {
        return Err(NetError::InvalidReference(zref));
    }
    let g = s11(zin, zref);
    if g.norm() > 1.0 + 1e-12 {
        return Err(NetError::ActiveLoad(g.norm()));
    }
    let p = dbm_to_watts(input_power_dbm);
    let vs = (8.0 * p * zref).sqrt();
    let i = vs / (zref + zin);
    let v = zin * i;
    Ok(Excitation {
        input_power_dbm,
        reference_impedance: zref,
        available_power: p,
        incident_wave: (2.0 * p).sqrt(),
        s11: g,
        accepted_power: p * (1.0 - g.norm_sqr()).max(0.0),
        input_voltage: v,
        input_current: i,
        short_current: i,
    })
}

impl Excitation {
    /// Sets the short current from the chain matrix between the input and
    /// the short (`V2 = 0`): `I1 = D I2`.
    pub fn with_network(mut self, chain: &Abcd) -> Self {
        self.short_current = self.input_current / chain.0[1][1];
        self
    }

    /// Voltage and current at the output of `chain` given the input state.
    pub fn through(&self, chain: &Abcd) -> Result<(Complex64, Complex64)> {
        let inv = chain.inverse()?;
        let (v, i) = (self.input_voltage, self.input_current);
        Ok((
            inv.0[0][0] * v + inv.0[0][1] * i,
            inv.0[1][0] * v + inv.0[1][1] * i,
        ))
    }
}

/// All accepted power of a shorted one-port is ohmic loss (W).
pub fn dissipated_power(excitation: &Excitation) -> f64 {
    excitation.available_power * (1.0 - excitation.s11.norm_sqr()).max(0.0)
}

/// Response of one section at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionResponse {
    pub rlgc: RlgcModel,
    pub z0: Complex64,
    pub gamma: Complex64,
    pub abcd: Abcd,
}

/// Network state at one frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkPoint {
    pub frequency: f64,
    pub sections: Vec<SectionResponse>,
    /// Chain matrix from the port to the short.
    pub abcd: Abcd,
    pub zin: Complex64,
    pub s11: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    pub reference_impedance: f64,
    pub points: Vec<NetworkPoint>,
}

impl NetworkModel {
    pub fn frequencies(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.frequency).collect()
    }

    pub fn s11(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| p.s11).collect()
    }

    pub fn zin(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| p.zin).collect()
    }
}

fn check_frequencies(frequencies: &[f64]) -> Result<()> {
    if frequencies.is_empty()
        || frequencies.iter().any(|f| !(*f > 0.0) || !f.is_finite())
        || frequencies.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(NetError::InvalidFrequencies);
    }
    Ok(())
}

/// One cascaded chain of line sections, each with its own geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain<'a> {
    pub parts: Vec<(&'a LineConfig, LineSection)>,
}

impl<'a> Chain<'a> {
    pub fn of_line(config: &'a LineConfig) -> Self {
        Chain {
            parts: line_sections(config)
                .into_iter()
                .map(|s| (config, s))
                .collect(),
        }
    }

    pub fn then(mut self, other: Chain<'a>) -> Self {
        self.parts.extend(other.parts);
        self
    }

    pub fn point(
        &self,
        scene: &Scene,
        frequency: f64,
        temperature: f64,
        zref: f64,
        settings: CrossSectionSettings,
    ) -> Result<NetworkPoint> {
        let caps = self.capacitances(scene, settings)?;
        self.point_with(scene, &caps, frequency, temperature, zref, settings)
    }

    fn capacitances(&self, scene: &Scene, settings: CrossSectionSettings) -> Result<Vec<f64>> {
        self.parts
            .iter()
            .map(|(config, sec)| section_capacitance(scene, config, sec.shape, settings))
            .collect()
    }

    fn point_with(
        &self,
        scene: &Scene,
        caps: &[f64],
        frequency: f64,
        temperature: f64,
        zref: f64,
        settings: CrossSectionSettings,
    ) -> Result<NetworkPoint> {
        let mut sections = Vec::with_capacity(self.parts.len());
        let mut abcd = Abcd::identity();
        for ((config, sec), &c) in self.parts.iter().zip(caps) {
            let rlgc = rlgc_with_capacitance(
                scene,
                config,
                sec.shape,
                frequency,
                temperature,
                settings,
                c,
            )?;
            let (z0, gamma) = characteristic(&rlgc);
            let m = Abcd::line(z0, gamma, sec.length);
            abcd = abcd * m;
            sections.push(SectionResponse {
                rlgc,
                z0,
                gamma,
                abcd: m,
            });
        }
        let zin = abcd.shorted_input();
        Ok(NetworkPoint {
            frequency,
            sections,
            abcd,
            zin,
            s11: s11(zin, zref),
        })
    }

    pub fn sweep(
        &self,
        scene: &Scene,
        frequencies: &[f64],
        temperature: f64,
        zref: f64,
        settings: CrossSectionSettings,
    ) -> Result<NetworkModel> {
        check_frequencies(frequencies)?;
        if !(zref > 0.0) {
            return Err(NetError::InvalidReference(zref));
        }
        let caps = self.capacitances(scene, settings)?;
        let points = frequencies
            .par_iter()
            .map(|&f| self.point_with(scene, &caps, f, temperature, zref, settings))
            .collect::<Result<Vec<_>>>()?;
        Ok(NetworkModel {
            reference_impedance: zref,
            points,
        })
    }
}

/// Shorted-line response of `line` over `frequencies` at `temperature`,
/// referenced to the line port's impedance.
pub fn frequency_sweep(
    scene: &Scene,
    line: &LineConfig,
    frequencies: &[f64],
    temperature: f64,
) -> Result<NetworkModel> {
    let zref = line.port().reference_impedance;
    Chain::of_line(line).sweep(
        scene,
        frequencies,
        temperature,
        zref,
        CrossSectionSettings::default(),
    )
}

/// `count` points from `start` to `stop`, inclusive, evenly spaced.
pub fn linear_frequencies(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}
