//! Representative desk-scale scenes.
//!
//! None of these dimensions are published device data; they are plausible
//! values for an FDSOI front end with a thin first metal and a thick top
//! metal, chosen so that the structures solve in seconds.

use crate::fom::{Design, Drive, EnvVariant, Environment, SolverSettings};
use crate::geom::{Aabb, Vec3};
use crate::scene::{
    find_layer, generate_dummies, ConductorBrick, Layer, LineConfig, LineKind, Material, Net,
    ProbeSet, Region, Role,
};

pub const NM: f64 = 1e-9;
pub const UM: f64 = 1e-6;

pub const SILICON: &str = "si";
pub const OXIDE: &str = "sio2";
/// First-metal conductor of the nano-antenna: 1e7 S/m at 300 K, RRR 3.
pub const ANTENNA_METAL: &str = "m1_metal";
pub const POLY: &str = "poly_si";
pub const TOP_METAL: &str = "top_metal";

pub const GATE_LEVEL: &str = "poly";
pub const M1_LEVEL: &str = "M1";
pub const TOP_LEVEL: &str = "top";

pub const INTERCONNECT_NET: &str = "qd_wiring";

/// Working point of the preset studies.
pub const FREQUENCY: f64 = 10e9;
pub const INPUT_POWER_DBM: f64 = -7.0;
pub const CRYO_K: f64 = 4.0;

pub fn materials() -> Vec<Material> {
    vec![
        Material::dielectric(SILICON, 11.7),
        Material::dielectric(OXIDE, 3.9),
        Material::conductor(ANTENNA_METAL, 1.0e7, 3.0),
        Material::conductor(POLY, 1.0e5, 1.0),
        Material::conductor(TOP_METAL, 3.5e7, 2.0),
    ]
}

/// Stack with `z = 0` at the bottom of the active silicon film.
pub fn stack() -> Vec<Layer> {
    let layers = [
        ("box", -25.0, 25.0, OXIDE),
        ("active", 0.0, 10.0, SILICON),
        ("gate_ox", 10.0, 5.0, OXIDE),
        (GATE_LEVEL, 15.0, 50.0, OXIDE),
        ("ild0", 65.0, 100.0, OXIDE),
        (M1_LEVEL, 165.0, 100.0, OXIDE),
        ("ild1", 265.0, 100.0, OXIDE),
        ("M2", 365.0, 100.0, OXIDE),
        ("ild2", 465.0, 535.0, OXIDE),
        (TOP_LEVEL, 1000.0, 2000.0, OXIDE),
    ];
    layers
        .into_iter()
        .map(|(name, z, t, d)| Layer::new(name, z * NM, t * NM, d))
        .collect()
}

/// Shorted nano-antenna of the given kind at M1: 12 µm long and 50 nm
/// thick at any level, with a 2 µm CPW section ahead of the balun in the
/// CPW-to-CPS variant.
pub fn antenna(kind: LineKind) -> LineConfig {
    let mut c = LineConfig::new(
        kind,
        200.0 * NM,
        200.0 * NM,
        400.0 * NM,
        12.0 * UM,
        M1_LEVEL,
        ANTENNA_METAL,
    );
    c.thickness = Some(50.0 * NM);
    c.strap_width = Some(400.0 * NM);
    c.access_length = Some(2.0 * UM);
    c
}

/// Roughly 50 Ω coplanar waveguide on the thick top metal.
pub fn access_line() -> LineConfig {
    LineConfig::new(
        LineKind::Cpw,
        13.0 * UM,
        3.5 * UM,
        30.0 * UM,
        500.0 * UM,
        TOP_LEVEL,
        TOP_METAL,
    )
}

pub const DUMMY_PITCH: f64 = 400.0 * NM;
/// Plunger gates are fingers along `y` sitting between two dummy columns.
pub const GATE_LENGTH: f64 = 60.0 * NM;
pub const GATE_WIDTH: f64 = 280.0 * NM;
const QD_Z: f64 = 5.0 * NM;

/// QDs under the outer half of the lower return strip.
pub fn qd_y(line: &LineConfig) -> f64 {
    -0.5 * line.signal_width - line.gap - 0.75 * line.ground_width
}

/// QDs under the middle of the gap between signal and lower return, where
/// the line field is lateral.
pub fn gap_qd_y(line: &LineConfig) -> f64 {
    -0.5 * line.signal_width - 0.5 * line.gap
}

/// QD1 and QD2 just before the short, half a dummy pitch apart from the
/// nearest dummy column.
pub fn probes_at(line: &LineConfig, y: f64) -> Vec<ProbeSet> {
    let x = line.length;
    vec![
        ProbeSet::new("QD1", vec![Vec3::new(x - 0.5 * DUMMY_PITCH, y, QD_Z)]),
        ProbeSet::new("QD2", vec![Vec3::new(x - 1.5 * DUMMY_PITCH, y, QD_Z)]),
    ]
}

pub fn qd_probes(line: &LineConfig) -> Vec<ProbeSet> {
    probes_at(line, qd_y(line))
}

/// Ten by seven dummy cells around the QDs. Columns sit at whole pitches
/// from the short, so each QD lies in the gap between two columns; the
/// middle row is centered on `y`.
pub fn dummy_region(line: &LineConfig, y: f64) -> Region {
    let x = line.length;
    Region {
        x0: x - 8.5 * DUMMY_PITCH,
        x1: x + 1.5 * DUMMY_PITCH,
        y0: y - 3.5 * DUMMY_PITCH,
        y1: y + 3.5 * DUMMY_PITCH,
    }
}

fn poly_layer() -> Layer {
    find_layer(&stack(), GATE_LEVEL)
        .expect("preset stack has a gate level")
        .clone()
}

fn dummy_grid(line: &LineConfig, y: f64, fill: f64) -> Vec<ConductorBrick> {
    generate_dummies(
        dummy_region(line, y),
        DUMMY_PITCH,
        fill,
        &poly_layer(),
        POLY,
    )
    .expect("preset region holds dummies")
}

/// Floating plunger gates above the QDs.
pub fn gates(line: &LineConfig, y: f64) -> Vec<ConductorBrick> {
    let poly = poly_layer();
    probes_at(line, y)
        .iter()
        .enumerate()
        .map(|(k, set)| {
            let p = set.points[0];
            ConductorBrick::new(
                format!("gate_qd{}", k + 1),
                Aabb::new(
                    p[0] - 0.5 * GATE_LENGTH,
                    p[0] + 0.5 * GATE_LENGTH,
                    y - 0.5 * GATE_WIDTH,
                    y + 0.5 * GATE_WIDTH,
                    poly.z_min,
                    poly.z_max(),
                ),
                POLY,
                Net::Floating,
                Role::Gate,
            )
        })
        .collect()
}

/// Poly lead of the QD wiring, held at 0 V. It is routed beneath the
/// signal-return gap for 4 µm along the line and ends at QD2.
pub fn qd_wiring(line: &LineConfig) -> Vec<ConductorBrick> {
    let poly = poly_layer();
    let y = gap_qd_y(line);
    let x1 = line.length - 1.5 * DUMMY_PITCH;
    vec![ConductorBrick::new(
        "qd_lead",
        Aabb::new(
            x1 - 3.4 * UM,
            x1,
            y - 30.0 * NM,
            y + 30.0 * NM,
            poly.z_min,
            poly.z_max(),
        ),
        POLY,
        Net::named(INTERCONNECT_NET),
        Role::Interconnect,
    )]
}

/// Gates, wiring and a dummy grid at `fill` without the cells that would
/// touch a gate or the wiring.
pub fn environment(line: &LineConfig, fill: f64) -> Environment {
    let y = qd_y(line);
    let gates = gates(line, y);
    let interconnect = qd_wiring(line);
    let dummies = dummy_grid(line, y, fill)
        .into_iter()
        .filter(|d| {
            gates
                .iter()
                .chain(&interconnect)
                .all(|o| o.bounds.distance(&d.bounds) > 0.0)
        })
        .collect();
    Environment {
        dummies,
        gates,
        interconnect,
    }
}

/// Dummy grid alone around QDs under the gap of a CPS antenna.
pub fn screening_environment(line: &LineConfig, fill: f64) -> Environment {
    Environment {
        dummies: dummy_grid(line, gap_qd_y(line), fill),
        gates: Vec::new(),
        interconnect: Vec::new(),
    }
}

/// Reference design: CPW-to-CPS at M1 with gates and dummies (fill 0.5),
/// at 4 K, 10 GHz and −7 dBm, behind the top-metal access line.
pub fn reference_design() -> Design {
    let line = antenna(LineKind::CpwToCps);
    Design {
        label: "reference".into(),
        stack: stack(),
        materials: materials(),
        environment: environment(&line, 0.5),
        variant: EnvVariant::WithDummies,
        probes: qd_probes(&line),
        access: Some(access_line()),
        line,
        temperature: CRYO_K,
        frequency: FREQUENCY,
        drive: Drive::Power {
            dbm: INPUT_POWER_DBM,
        },
        solver: SolverSettings::default(),
    }
}

/// Dummy-screening study: bare CPS antenna with QDs under the gap and a
/// dummy grid at `fill` (selected with [`EnvVariant::WithDummies`]).
pub fn screening_design(fill: f64) -> Design {
    let line = antenna(LineKind::Cps);
    Design {
        label: "screening".into(),
        environment: screening_environment(&line, fill),
        variant: EnvVariant::Bare,
        probes: probes_at(&line, gap_qd_y(&line)),
        line,
        ..reference_design()
    }
}

/// Reference design without any environment conductors.
pub fn bare_design(kind: LineKind) -> Design {
    let mut d = reference_design();
    d.line = antenna(kind);
    d.variant = EnvVariant::Bare;
    d.label = kind.label().into();
    d
}
