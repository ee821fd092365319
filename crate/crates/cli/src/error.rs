use serde_json::json;
use thiserror::Error;

use esr_core::fom::DesignError;
use esr_core::netline::touchstone::TouchstoneError;
use esr_core::netline::NetError;
use esr_core::scene::SceneError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{entity}`: {reason}")]
    Validation { entity: String, reason: String },
    #[error("`{field}`: `{value}` has no recognized length unit (nm, um, mm, m)")]
    UnknownUnit { field: String, value: String },
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::UnknownUnit { .. } => {
                2
            }
            CliError::Solver(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Validation { .. } => "validation",
            CliError::UnknownUnit { .. } => "unknown_unit",
            CliError::Solver(_) => "solver",
            CliError::Io { .. } => "io",
        }
    }

    /// One-line JSON description for machine consumption.
    pub fn to_json_line(&self) -> String {
        let mut v = json!({ "error": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() });
        match self {
            CliError::Parse { line, column, .. } => {
                v["line"] = json!(line);
                v["column"] = json!(column);
            }
            CliError::Validation { entity, .. } => v["entity"] = json!(entity),
            CliError::UnknownUnit { field, value } => {
                v["field"] = json!(field);
                v["value"] = json!(value);
            }
            CliError::Io { path, .. } => v["path"] = json!(path),
            CliError::Solver(_) => {}
        }
        v.to_string()
    }

    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn invalid(entity: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Validation {
            entity: entity.into(),
            reason: reason.into(),
        }
    }
}

fn scene_entity(e: &SceneError) -> String {
    use SceneError::*;
    match e {
        InvalidMaterial(id, _) | UnknownMaterial(id) => id.clone(),
        InvalidLayer(id, _) | UnknownLayer(id) | ConfigDoesNotFitLayer(id, _) => id.clone(),
        InvalidConductor(id, _) | LayerGap(id) | OutsideStack(id) => id.clone(),
        OverlappingConductors(a, b) => format!("{a},{b}"),
        DanglingNet { port, .. } | DisconnectedNet { port, .. } => port.clone(),
        InvalidPort(id, _) => id.clone(),
        ProbeInsideConductor { label, .. }
        | ProbeOutsideScene { label, .. }
        | InvalidProbes(label, _) => label.clone(),
        _ => "scene".into(),
    }
}

impl From<SceneError> for CliError {
    fn from(e: SceneError) -> Self {
        CliError::Validation {
            entity: scene_entity(&e),
            reason: e.to_string(),
        }
    }
}

impl From<DesignError> for CliError {
    fn from(e: DesignError) -> Self {
        match e {
            DesignError::Scene(s) | DesignError::Network(NetError::Scene(s)) => s.into(),
            DesignError::InvalidStudy(r) => CliError::invalid("study", r),
            other => CliError::Solver(other.to_string()),
        }
    }
}

impl From<NetError> for CliError {
    fn from(e: NetError) -> Self {
        DesignError::from(e).into()
    }
}

impl From<TouchstoneError> for CliError {
    fn from(e: TouchstoneError) -> Self {
        CliError::Solver(e.to_string())
    }
}
