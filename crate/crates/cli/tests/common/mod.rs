#![allow(dead_code)]

use std::path::PathBuf;

pub fn scene_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenes")
        .join(name)
}

pub fn minimal_text() -> String {
    std::fs::read_to_string(scene_path("minimal_cps.json")).unwrap()
}

/// The minimal scene with `edit` applied to its JSON value.
pub fn edited(edit: impl FnOnce(&mut serde_json::Value)) -> String {
    let mut v: serde_json::Value = serde_json::from_str(&minimal_text()).unwrap();
    edit(&mut v);
    serde_json::to_string_pretty(&v).unwrap()
}
