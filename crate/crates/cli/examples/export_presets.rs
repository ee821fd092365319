//! Writes the preset designs as scene files.
//!
//! ```text
//! cargo run -p esr-cli --example export_presets -- crates/cli/scenes
//! ```

use std::path::PathBuf;

use esr_cli::scene_file::{AxisRange, FieldMapEntry, SceneFile};
use esr_cli::units::Length;
use esr_core::fom::Environment;
use esr_core::presets;
use esr_core::scene::LineKind;

fn nm(v: f64) -> Length {
    Length(format!("{v} nm"))
}

/// Cross-section through the QD2 plane, across the whole line.
fn qd2_plane(design: &esr_core::fom::Design) -> FieldMapEntry {
    let x = design.probes[1].points[0][0];
    FieldMapEntry {
        label: "qd2_plane".into(),
        x: AxisRange {
            from: Length::from_meters(x),
            to: Length::from_meters(x),
            count: 1,
        },
        y: AxisRange {
            from: nm(-1200.0),
            to: nm(1200.0),
            count: 49,
        },
        z: AxisRange {
            from: nm(5.0),
            to: nm(405.0),
            count: 17,
        },
    }
}

pub fn preset_scenes() -> Vec<(&'static str, SceneFile)> {
    let reference = presets::reference_design();
    let mut reference_file = SceneFile::from_design(&reference);
    reference_file.field_maps.push(qd2_plane(&reference));

    let mut screening = SceneFile::from_design(&presets::screening_design(0.5));
    screening.settings.environment = Some(esr_core::fom::EnvVariant::WithDummies);

    let mut cps = presets::bare_design(LineKind::Cps);
    cps.access = None;
    cps.environment = Environment::default();
    vec![
        ("reference.json", reference_file),
        ("screening.json", screening),
        ("bare_cps.json", SceneFile::from_design(&cps)),
    ]
}

fn main() {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "crates/cli/scenes".into()),
    );
    std::fs::create_dir_all(&dir).expect("output directory");
    for (name, file) in preset_scenes() {
        let path = dir.join(name);
        std::fs::write(&path, file.to_json()).expect("scene file written");
        println!("{}", path.display());
    }
}
