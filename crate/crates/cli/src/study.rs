//! Study orchestration and artifact export.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use esr_core::field::FieldSample;
use esr_core::fom::{
    compare_configurations, compare_environment, compare_stacks, evaluate_design, ComparisonTable,
    Design, Drive, EnvVariant,
};
use esr_core::netline::touchstone::Touchstone;
use esr_core::netline::{de_embed, s11, Chain, NetworkModel};
use esr_core::scene::{LineConfig, LineKind};

use crate::error::CliError;
use crate::scene_file::{parse_scene, ParsedScene};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    Solve,
    Sweep,
    CompareConfig,
    CompareStack,
    CompareEnv,
    Deembed,
}

impl StudyKind {
    pub fn label(self) -> &'static str {
        match self {
            StudyKind::Solve => "solve",
            StudyKind::Sweep => "sweep",
            StudyKind::CompareConfig => "compare_config",
            StudyKind::CompareStack => "compare_stack",
            StudyKind::CompareEnv => "compare_env",
            StudyKind::Deembed => "deembed",
        }
    }
}

/// What to run, on which scene, and where to write the results. `None`
/// fields fall back to the scene file settings.
#[derive(Debug, Clone, PartialEq)]
pub struct StudySpec {
    pub kind: StudyKind,
    pub scene: PathBuf,
    pub out: PathBuf,
    pub temperature: Option<f64>,
    pub pin_dbm: Option<f64>,
    pub terminal_current: Option<f64>,
    pub frequencies: Option<Vec<f64>>,
    /// compare_config rows; all three kinds when empty.
    pub kinds: Vec<LineKind>,
    /// compare_stack rows; required.
    pub levels: Vec<String>,
    /// compare_env rows; all variants when empty.
    pub variants: Vec<EnvVariant>,
}

impl StudySpec {
    pub fn new(kind: StudyKind, scene: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            kind,
            scene: scene.into(),
            out: out.into(),
            temperature: None,
            pin_dbm: None,
            terminal_current: None,
            frequencies: None,
            kinds: Vec::new(),
            levels: Vec::new(),
            variants: Vec::new(),
        }
    }

    fn check(&self) -> Result<(), CliError> {
        if self.pin_dbm.is_some() && self.terminal_current.is_some() {
            return Err(CliError::invalid(
                "study",
                "give either a power or a terminal current, not both",
            ));
        }
        if let Some(t) = self.temperature {
            if !(t > 0.0) || !t.is_finite() {
                return Err(CliError::invalid("temperature", "must be > 0"));
            }
        }
        if let Some(a) = self.terminal_current {
            if !(a >= 0.0) || !a.is_finite() {
                return Err(CliError::invalid("terminal_current", "must be >= 0"));
            }
        }
        if self.kind == StudyKind::CompareStack && self.levels.is_empty() {
            return Err(CliError::invalid(
                "levels",
                "compare_stack needs at least one level",
            ));
        }
        if self.kind == StudyKind::CompareConfig && self.kinds.len() == 1 {
            return Err(CliError::invalid(
                "kinds",
                "compare_config needs at least two line kinds",
            ));
        }
        Ok(())
    }

    /// Scene settings overridden by the command line.
    fn apply(&self, parsed: &mut ParsedScene) {
        let s = &mut parsed.settings;
        if let Some(t) = self.temperature {
            s.temperature = t;
        }
        if let Some(f) = &self.frequencies {
            s.frequencies = f.clone();
        }
        if let Some(dbm) = self.pin_dbm {
            s.drive = Drive::Power { dbm };
        }
        if let Some(amps) = self.terminal_current {
            s.drive = Drive::Current { amps };
        }
    }
}

/// Runs the study and returns the artifacts written, in writing order.
pub fn run_study(spec: &StudySpec) -> Result<Vec<PathBuf>, CliError> {
    spec.check()?;
    let mut parsed = parse_scene(&spec.scene)?;
    spec.apply(&mut parsed);
    let design = parsed.design(spec.kind.label())?;
    fs::create_dir_all(&spec.out).map_err(|e| CliError::io(&spec.out, e))?;
    let mut out = Artifacts {
        dir: spec.out.clone(),
        written: Vec::new(),
    };
    match spec.kind {
        StudyKind::Solve => solve(&parsed, &design, &mut out)?,
        StudyKind::Sweep => sweep(&parsed, &design, &mut out)?,
        StudyKind::CompareConfig => {
            let kinds = if spec.kinds.is_empty() {
                LineKind::ALL.to_vec()
            } else {
                spec.kinds.clone()
            };
            let configs: Vec<LineConfig> = kinds
                .iter()
                .map(|k| LineConfig {
                    kind: *k,
                    ..design.line.clone()
                })
                .collect();
            let table = compare_configurations(&design, &configs, design.drive, design.frequency)?;
            write_table(&table, "compare_config", &mut out)?;
        }
        StudyKind::CompareStack => {
            let levels: Vec<&str> = spec.levels.iter().map(String::as_str).collect();
            let table = compare_stacks(&design, &levels, design.drive, design.frequency)?;
            write_table(&table, "compare_stack", &mut out)?;
        }
        StudyKind::CompareEnv => {
            let variants = if spec.variants.is_empty() {
                EnvVariant::ALL.to_vec()
            } else {
                spec.variants.clone()
            };
            let table = compare_environment(&design, &variants, design.drive, design.frequency)?;
            write_table(&table, "compare_env", &mut out)?;
        }
        StudyKind::Deembed => deembed(&parsed, &design, &mut out)?,
    }
    Ok(out.written)
}

struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Artifacts {
    fn write(&mut self, name: &str, content: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, content).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }
}

pub const FIELD_HEADER: &str =
    "x_m,y_m,z_m,re_Bx,im_Bx,re_By,im_By,re_Bz,im_Bz,re_Ex,im_Ex,re_Ey,im_Ey,re_Ez,im_Ez";

pub fn field_map_csv(samples: &[FieldSample]) -> String {
    let mut s = String::with_capacity(64 + samples.len() * 240);
    s.push_str(FIELD_HEADER);
    s.push('\n');
    for f in samples {
        let p = f.point;
        let _ = write!(s, "{:.9e},{:.9e},{:.9e}", p[0], p[1], p[2]);
        for c in f.b.iter().chain(&f.e) {
            let _ = write!(s, ",{:.9e},{:.9e}", c.re, c.im);
        }
        s.push('\n');
    }
    s
}

/// Writes `samples` as a field-map CSV. Nothing is written when there are
/// no samples.
pub fn emit_field_map(samples: &[FieldSample], path: &Path) -> Result<(), CliError> {
    if samples.is_empty() {
        return Err(CliError::invalid(
            path.display().to_string(),
            "no field samples to write",
        ));
    }
    fs::write(path, field_map_csv(samples)).map_err(|e| CliError::io(path, e))
}

fn solve(parsed: &ParsedScene, design: &Design, out: &mut Artifacts) -> Result<(), CliError> {
    if parsed.settings.frequencies.len() != 1 {
        return Err(CliError::invalid(
            "frequencies",
            "solve takes exactly one frequency",
        ));
    }
    let r = evaluate_design(design)?;
    emit(out, "fields.csv", &r.samples)?;
    for map in &parsed.field_maps {
        // grid points inside conductors carry no field value and are skipped
        let points: Vec<_> = map
            .points
            .iter()
            .filter(|p| {
                r.scene
                    .conductors()
                    .iter()
                    .all(|c| !c.bounds.contains_closed(p))
            })
            .copied()
            .collect();
        let samples = r.fields_at(&points)?;
        emit(out, &format!("field_map_{}.csv", map.label), &samples)?;
    }

    let probes: Vec<_> = r
        .scene
        .probes()
        .iter()
        .flat_map(|set| set.points.iter().map(move |p| (set.label.clone(), *p)))
        .zip(&r.samples)
        .map(|((label, p), s)| json!({ "label": label, "point_m": [p[0], p[1], p[2]], "abs_b_t": s.b_magnitude(), "abs_e_v_per_m": s.e_magnitude() }))
        .collect();
    let report = json!({
        "study": "solve",
        "frequency_hz": design.frequency,
        "temperature_k": design.temperature,
        "fom": r.report,
        "zin_ohm": [r.network.zin.re, r.network.zin.im],
        "s11": [r.network.s11.re, r.network.s11.im],
        "input_power_dbm": r.excitation.input_power_dbm,
        "accepted_power_w": r.excitation.accepted_power,
        "terminal_current_a": [r.terminal_current.re, r.terminal_current.im],
        "filament_loss_w": r.filament_loss,
        "eps_eff": r.eps_eff,
        "filament_count": r.filament_count,
        "panel_count": r.panel_count,
        "probes": probes,
    });
    out.write(
        "report.json",
        &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"),
    )?;

    let f = &r.report;
    let mut t = String::new();
    let _ = writeln!(t, "design              {}", design.label);
    let _ = writeln!(
        t,
        "line                {} at {}",
        design.line.kind.label(),
        design.line.level
    );
    let _ = writeln!(t, "frequency_hz        {:.9e}", design.frequency);
    let _ = writeln!(t, "temperature_k       {:.9e}", design.temperature);
    let _ = writeln!(
        t,
        "input_power_dbm     {:.9e}",
        r.excitation.input_power_dbm
    );
    let _ = writeln!(t, "re_zin_ohm          {:.9e}", r.network.zin.re);
    let _ = writeln!(t, "im_zin_ohm          {:.9e}", r.network.zin.im);
    let _ = writeln!(t, "s11_db              {:.9e}", f.s11_db);
    let _ = writeln!(t, "avg_B_t             {:.9e}", f.avg_b);
    let _ = writeln!(t, "avg_E_v_per_m       {:.9e}", f.avg_e);
    let _ = writeln!(t, "B_over_E            {:.9e}", f.ratio_b_over_e);
    let _ = writeln!(t, "conversion_t_per_rw {:.9e}", f.conversion_efficiency);
    let _ = writeln!(t, "dissipated_power_w  {:.9e}", f.dissipated_power);
    let _ = writeln!(t, "homogeneity_B       {:.9e}", f.homogeneity_b);
    out.write("report.txt", &t)
}

fn emit(out: &mut Artifacts, name: &str, samples: &[FieldSample]) -> Result<(), CliError> {
    let path = out.dir.join(name);
    emit_field_map(samples, &path)?;
    out.written.push(path);
    Ok(())
}

const TOUCHSTONE_COMMENT: &str = "esrsim shorted ESR line";

fn touchstone(model: &NetworkModel, comment: &str) -> Result<String, CliError> {
    Ok(
        Touchstone::one_port(model.reference_impedance, model.frequencies(), &model.s11())
            .write(comment)?,
    )
}

fn sweep(parsed: &ParsedScene, design: &Design, out: &mut Artifacts) -> Result<(), CliError> {
    let scene = design.scene()?;
    let model = design.sweep(&scene, &parsed.settings.frequencies, design.temperature)?;
    out.write("sweep.s1p", &touchstone(&model, TOUCHSTONE_COMMENT)?)?;
    let mut csv = String::from("frequency_hz,re_zin_ohm,im_zin_ohm,abs_s11,s11_db\n");
    for p in &model.points {
        let m = p.s11.norm();
        let _ = writeln!(
            csv,
            "{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}",
            p.frequency,
            p.zin.re,
            p.zin.im,
            m,
            20.0 * m.log10()
        );
    }
    out.write("resistance.csv", &csv)
}

fn deembed(parsed: &ParsedScene, design: &Design, out: &mut Artifacts) -> Result<(), CliError> {
    let access = design
        .access
        .as_ref()
        .ok_or_else(|| CliError::invalid("access_line", "deembed needs an `access_line`"))?;
    let scene = design.scene()?;
    let f = &parsed.settings.frequencies;
    let total = design.sweep(&scene, f, design.temperature)?;
    let zref = total.reference_impedance;
    let fixture = Chain::of_line(access).sweep(
        &scene,
        f,
        design.temperature,
        zref,
        design.solver.cross_section,
    )?;

    let mut antenna = Vec::with_capacity(f.len());
    let mut csv =
        String::from("frequency_hz,re_zin_total_ohm,re_zin_antenna_ohm,antenna_fraction\n");
    for (t, a) in total.points.iter().zip(&fixture.points) {
        let zin = de_embed(&t.abcd, &a.abcd)?.shorted_input();
        antenna.push(s11(zin, zref));
        let _ = writeln!(
            csv,
            "{:.9e},{:.9e},{:.9e},{:.9e}",
            t.frequency,
            t.zin.re,
            zin.re,
            zin.re / t.zin.re
        );
    }
    let ts =
        Touchstone::one_port(zref, f.clone(), &antenna).write("esrsim de-embedded nano-antenna")?;
    out.write("antenna.s1p", &ts)?;
    out.write("resistance_fraction.csv", &csv)
}

fn write_table(table: &ComparisonTable, stem: &str, out: &mut Artifacts) -> Result<(), CliError> {
    out.write(&format!("{stem}.csv"), &table.to_csv())?;
    out.write(&format!("{stem}.txt"), &table.to_text())?;
    out.write(
        &format!("{stem}.json"),
        &(serde_json::to_string_pretty(table).expect("tables serialize") + "\n"),
    )
}
