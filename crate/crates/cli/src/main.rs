use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use esr_cli::scene_file::sweep_frequencies;
use esr_cli::{parse_scene, run_study, CliError, StudyKind, StudySpec};
use esr_core::fom::EnvVariant;
use esr_core::scene::LineKind;

/// Field and network co-simulation of shorted ESR lines.
#[derive(Debug, Parser)]
#[command(name = "esrsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fields and figures of merit at one frequency.
    Solve(Common),
    /// S11 and input impedance over frequency.
    Sweep(Common),
    /// Figures of merit across line kinds, levels or environments.
    Compare(CompareArgs),
    /// Nano-antenna response with the access line removed.
    Deembed(Common),
    /// Parse and validate a scene file.
    Validate {
        #[arg(long)]
        scene: PathBuf,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Temperature (K).
    #[arg(long)]
    temp: Option<f64>,
    /// Available source power (dBm).
    #[arg(long, allow_negative_numbers = true, conflicts_with = "current")]
    pin: Option<f64>,
    /// Peak current through the short (A), instead of --pin.
    #[arg(long)]
    current: Option<f64>,
    /// Frequencies as start:stop:count (Hz).
    #[arg(long, value_parser = parse_freq)]
    freq: Option<FreqRange>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CompareStudy {
    Config,
    Stack,
    Env,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long, value_enum)]
    study: CompareStudy,
    #[command(flatten)]
    common: Common,
    /// Line kinds for `config` (CPS, CPW, CPW_TO_CPS).
    #[arg(long, value_delimiter = ',', value_parser = parse_kind)]
    kinds: Vec<LineKind>,
    /// Stack levels for `stack`.
    #[arg(long, value_delimiter = ',')]
    levels: Vec<String>,
    /// Environment variants for `env` (bare, with_dummies, with_interconnect, full).
    #[arg(long, value_delimiter = ',', value_parser = parse_variant)]
    variants: Vec<EnvVariant>,
}

#[derive(Debug, Clone, Copy)]
struct FreqRange {
    start: f64,
    stop: f64,
    count: usize,
}

fn parse_freq(s: &str) -> Result<FreqRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err("expected start:stop:count".into());
    };
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok(FreqRange {
        start: num(a)?,
        stop: num(b)?,
        count: n.trim().parse().map_err(|e| format!("`{n}`: {e}"))?,
    })
}

fn parse_kind(s: &str) -> Result<LineKind, String> {
    LineKind::ALL
        .into_iter()
        .find(|k| k.label().eq_ignore_ascii_case(s))
        .ok_or_else(|| format!("unknown line kind `{s}`"))
}

fn parse_variant(s: &str) -> Result<EnvVariant, String> {
    EnvVariant::ALL
        .into_iter()
        .find(|v| v.label() == s)
        .ok_or_else(|| format!("unknown environment variant `{s}`"))
}

fn spec(kind: StudyKind, c: Common) -> Result<StudySpec, CliError> {
    let mut s = StudySpec::new(kind, c.scene, c.out);
    s.temperature = c.temp;
    s.pin_dbm = c.pin;
    s.terminal_current = c.current;
    s.frequencies = c
        .freq
        .map(|f| sweep_frequencies(f.start, f.stop, f.count))
        .transpose()?;
    Ok(s)
}

fn run(cli: Cli) -> Result<serde_json::Value, CliError> {
    let spec = match cli.command {
        Command::Validate { scene } => {
            let p = parse_scene(&scene)?;
            return Ok(json!({
                "status": "ok",
                "conductors": p.scene.conductors().len(),
                "ports": p.scene.ports().len(),
                "probe_sets": p.scene.probes().len(),
                "field_maps": p.field_maps.len(),
            }));
        }
        Command::Solve(c) => spec(StudyKind::Solve, c)?,
        Command::Sweep(c) => spec(StudyKind::Sweep, c)?,
        Command::Deembed(c) => spec(StudyKind::Deembed, c)?,
        Command::Compare(a) => {
            let kind = match a.study {
                CompareStudy::Config => StudyKind::CompareConfig,
                CompareStudy::Stack => StudyKind::CompareStack,
                CompareStudy::Env => StudyKind::CompareEnv,
            };
            let mut s = spec(kind, a.common)?;
            s.kinds = a.kinds;
            s.levels = a.levels;
            s.variants = a.variants;
            s
        }
    };
    let written = run_study(&spec)?;
    let files: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
    Ok(json!({ "status": "ok", "study": spec.kind.label(), "artifacts": files }))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            let line = json!({ "error": "usage", "exit_code": 2, "message": msg.lines().next().unwrap_or_default() });
            eprintln!("{line}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
