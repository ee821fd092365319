use std::path::Path;

use esr_cli::parse_scene;
use esr_core::presets;

#[test]
fn reference_scene_file_reproduces_the_preset_design() {
    let parsed =
        parse_scene(&Path::new(env!("CARGO_MANIFEST_DIR")).join("scenes/reference.json")).unwrap();
    let mut from_file = parsed.design("reference").unwrap();
    let preset = presets::reference_design();
    from_file.materials.sort_by(|a, b| a.name.cmp(&b.name));
    let mut m = preset.materials.clone();
    m.sort_by(|a, b| a.name.cmp(&b.name));
    assert_eq!(from_file.materials, m);
    from_file.materials = preset.materials.clone();
    assert_eq!(from_file.line, preset.line);
    assert_eq!(from_file.access, preset.access);
    assert_eq!(from_file.environment, preset.environment);
    assert_eq!(from_file, preset);
}
