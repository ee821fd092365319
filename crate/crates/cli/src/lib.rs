#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod scene_file;
pub mod study;
pub mod units;

pub use error::CliError;
pub use scene_file::{parse_scene, parse_scene_str, ParsedScene, SceneFile};
pub use study::{emit_field_map, run_study, StudyKind, StudySpec};
