//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation findings, 2 usage error (bad flags,
//! unreadable or invalid `--config`), 3 pipeline error. Machine-readable
//! output goes to files or stdout; diagnostics go to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, ColorChoice, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::Error;
use crate::features::extract_features;
use crate::fusion::{fuse_streams, ResampleConfig};
use crate::ingest::{read_session_with, validate_session, IngestConfig};
use crate::output::{self, ReportDocument};
use crate::session::Session;
use crate::skill::{analyze, classify, compare, AnalysisConfig, Thresholds};
use crate::synth::{gen_session, ProfileConfig, ProfileKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PIPELINE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sonoskill", version, about = "Ultrasound probe-scanning skill analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic session
    Synth {
        #[arg(long, value_parser = parse_profile)]
        profile: ProfileKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Check a session for structural problems; exit 1 when any are found
    Validate {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Resample both streams onto the Δt grid and write fused.csv
    Fuse(Pipeline),
    /// Write per-grid-instant texture, histogram and motion features
    Features(Pipeline),
    /// Write report.json with aggregate metrics and classification
    Report(Pipeline),
    /// Compare two sessions; prints the comparison as JSON
    Compare(Pipeline),
    /// Write long-format plot data (t_us,series,value)
    ExportPlot(Pipeline),
}

#[derive(Debug, Args)]
struct Pipeline {
    /// Session directory (given twice for `compare`)
    #[arg(long, action = ArgAction::Append, required = true)]
    session: Vec<PathBuf>,
    /// Output directory; defaults to the session directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    delta_t_us: Option<u64>,
    #[arg(long)]
    levels: Option<u32>,
    /// GLCM offsets as `dx:dy` pairs separated by commas, e.g. `1:0,0:1`
    #[arg(long, allow_hyphen_values = true, value_parser = parse_offsets)]
    offsets: Option<Offsets>,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_profile(s: &str) -> Result<ProfileKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, PartialEq)]
struct Offsets(Vec<(i32, i32)>);

fn parse_offsets(s: &str) -> Result<Offsets, String> {
    s.split(',')
        .map(|pair| {
            let (dx, dy) = pair
                .split_once(':')
                .ok_or_else(|| format!("offset `{pair}` is not of the form dx:dy"))?;
            let p = |v: &str| v.trim().parse::<i32>().map_err(|e| format!("offset `{pair}`: {e}"));
            Ok((p(dx)?, p(dy)?))
        })
        .collect::<Result<_, _>>()
        .map(Offsets)
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            msg: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: EXIT_PIPELINE,
            msg: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn color_enabled() -> bool {
    std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty())
}

fn diag(kind: &str, msg: &str) {
    let mut err = std::io::stderr().lock();
    if color_enabled() && err.is_terminal() {
        let _ = writeln!(err, "\x1b[1;31m{kind}:\x1b[0m {msg}");
    } else {
        let _ = writeln!(err, "{kind}: {msg}");
    }
}

fn note(msg: &str) {
    let _ = writeln!(std::io::stderr().lock(), "{msg}");
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let color = if color_enabled() {
        ColorChoice::Auto
    } else {
        ColorChoice::Never
    };
    let matches = match Cli::command().color(color).try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(f) => {
            diag("error", &f.msg);
            f.code
        }
    }
}

fn dispatch(cmd: Command) -> CmdResult {
    match cmd {
        Command::Synth {
            profile,
            seed,
            out,
            config,
        } => synth(profile, seed, &out, config.as_deref()),
        Command::Validate { session, config } => validate(&session, config.as_deref()),
        Command::Fuse(p) => fuse(&p),
        Command::Features(p) => features(&p),
        Command::Report(p) => report(&p),
        Command::Compare(p) => compare_cmd(&p),
        Command::ExportPlot(p) => export_plot(&p),
    }
}

/// Top-level sections accepted in a `--config` file.
const CONFIG_SECTIONS: [&str; 6] = ["ingest", "fusion", "glcm", "motion", "thresholds", "profile"];

type ConfigMap = serde_json::Map<String, Value>;

fn read_config(path: Option<&Path>) -> std::result::Result<ConfigMap, Failure> {
    let Some(path) = path else {
        return Ok(Default::default());
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let Value::Object(map) = value else {
        return Err(Failure::usage(format!("{}: expected a JSON object", path.display())));
    };
    if let Some(k) = map.keys().find(|k| !CONFIG_SECTIONS.contains(&k.as_str())) {
        return Err(Failure::usage(format!(
            "{}: unknown section `{k}`; expected one of {}",
            path.display(),
            CONFIG_SECTIONS.join(", ")
        )));
    }
    Ok(map)
}

fn merge(base: &mut Value, over: &Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, o) => *b = o.clone(),
    }
}

/// Applies the overrides in `section` on top of `base`.
fn overlay<T: Serialize + DeserializeOwned>(
    base: T,
    config: &ConfigMap,
    section: &str,
) -> std::result::Result<T, Failure> {
    let Some(over) = config.get(section) else {
        return Ok(base);
    };
    let mut v = serde_json::to_value(base).expect("config types serialize");
    merge(&mut v, over);
    serde_json::from_value(v).map_err(|e| Failure::usage(format!("config section `{section}`: {e}")))
}

fn synth(kind: ProfileKind, seed: u64, out: &Path, config: Option<&Path>) -> CmdResult {
    let cfg = read_config(config)?;
    let profile = overlay(ProfileConfig::for_kind(kind, seed), &cfg, "profile")?;
    profile.validate().map_err(|e| Failure::usage(e.to_string()))?;
    let s = gen_session(&profile, out)?;
    note(&format!(
        "wrote {} ({} poses, {} frames) to {}",
        s.meta.session_id,
        s.poses.len(),
        s.frames.len(),
        out.display()
    ));
    Ok(EXIT_OK)
}

fn load_session(dir: &Path, cfg: &ConfigMap) -> std::result::Result<Session, Failure> {
    let ingest = overlay(IngestConfig::default(), cfg, "ingest")?;
    Ok(read_session_with(dir, &ingest)?)
}

fn validate(dir: &Path, config: Option<&Path>) -> CmdResult {
    let session = load_session(dir, &read_config(config)?)?;
    let report = validate_session(&session);
    let mut stdout = std::io::stdout().lock();
    for f in &report.findings {
        let _ = writeln!(stdout, "{f}");
    }
    note(&format!("{}: {} finding(s)", dir.display(), report.findings.len()));
    Ok(if report.is_clean() { EXIT_OK } else { EXIT_FINDINGS })
}

/// Effective settings of a pipeline command: defaults (Δt = nominal pose
/// period of the first session), then `--config`, then flags.
struct Settings {
    analysis: AnalysisConfig,
    thresholds: Thresholds,
}

fn settings(p: &Pipeline, cfg: &ConfigMap, first: &Session) -> std::result::Result<Settings, Failure> {
    if cfg.contains_key("profile") {
        return Err(Failure::usage("config section `profile` only applies to `synth`"));
    }
    let mut analysis = AnalysisConfig {
        fusion: overlay(ResampleConfig::for_pose_rate(first.meta.pose_rate_hz), cfg, "fusion")?,
        glcm: overlay(Default::default(), cfg, "glcm")?,
        motion: overlay(Default::default(), cfg, "motion")?,
    };
    let thresholds = overlay(Thresholds::default(), cfg, "thresholds")?;
    if let Some(dt) = p.delta_t_us {
        analysis.fusion.delta_t_us = dt;
    }
    if let Some(l) = p.levels {
        analysis.glcm.levels = l;
    }
    if let Some(o) = &p.offsets {
        analysis.glcm.offsets = o.0.clone();
    }
    analysis.validate().map_err(|e| Failure::usage(e.to_string()))?;
    Ok(Settings { analysis, thresholds })
}

/// Reads the single session of `p` and resolves its settings.
fn single_session(p: &Pipeline) -> std::result::Result<(&Path, Session, Settings), Failure> {
    let [dir] = p.session.as_slice() else {
        return Err(Failure::usage("expected exactly one --session"));
    };
    let cfg = read_config(p.config.as_deref())?;
    let session = load_session(dir, &cfg)?;
    let s = settings(p, &cfg, &session)?;
    Ok((dir, session, s))
}

fn write_file(path: &Path, contents: &str) -> std::result::Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    note(&format!("wrote {}", path.display()));
    Ok(())
}

/// Writes `name` plus a `<stem>.config.json` sidecar echoing the settings.
fn write_with_config(dir: &Path, name: &str, contents: &str, cfg: &AnalysisConfig) -> std::result::Result<(), Failure> {
    write_file(&dir.join(name), contents)?;
    let stem = name.rsplit_once('.').map_or(name, |(s, _)| s);
    write_file(&dir.join(format!("{stem}.config.json")), &output::to_json_pretty(cfg))
}

fn out_dir<'a>(p: &'a Pipeline, session_dir: &'a Path) -> &'a Path {
    p.out.as_deref().unwrap_or(session_dir)
}

fn fuse(p: &Pipeline) -> CmdResult {
    let (dir, session, s) = single_session(p)?;
    let fused = fuse_streams(&session, &s.analysis.fusion)?;
    write_with_config(
        out_dir(p, dir),
        output::FUSED_FILE,
        &output::format_fused_csv(&fused),
        &s.analysis,
    )?;
    Ok(EXIT_OK)
}

fn features(p: &Pipeline) -> CmdResult {
    let (dir, session, s) = single_session(p)?;
    let fused = fuse_streams(&session, &s.analysis.fusion)?;
    let table = extract_features(&session, &fused, s.analysis.fusion.delta_t_us, &s.analysis.glcm)?;
    write_with_config(
        out_dir(p, dir),
        output::FEATURES_FILE,
        &output::format_features_csv(&table),
        &s.analysis,
    )?;
    Ok(EXIT_OK)
}

fn report(p: &Pipeline) -> CmdResult {
    let (dir, session, s) = single_session(p)?;
    let a = analyze(&session, &s.analysis)?;
    let doc = ReportDocument {
        report: &a.report,
        classification: classify(&a.report, &s.thresholds),
        thresholds: s.thresholds,
        config: &s.analysis,
    };
    for flag in &a.report.flags {
        diag("warning", &format!("{}: {flag}", a.report.session_id));
    }
    write_file(&out_dir(p, dir).join(output::REPORT_FILE), &output::to_json_pretty(&doc))?;
    Ok(EXIT_OK)
}

fn compare_cmd(p: &Pipeline) -> CmdResult {
    let [da, db] = p.session.as_slice() else {
        return Err(Failure::usage("compare expects exactly two --session arguments"));
    };
    let cfg = read_config(p.config.as_deref())?;
    let sa = load_session(da, &cfg)?;
    let sb = load_session(db, &cfg)?;
    let s = settings(p, &cfg, &sa)?;
    let ra = analyze(&sa, &s.analysis)?.report;
    let rb = analyze(&sb, &s.analysis)?.report;
    let c = compare(&ra, &rb)?;
    #[derive(Serialize)]
    struct Doc<'a> {
        #[serde(flatten)]
        comparison: &'a crate::skill::Comparison,
        config: &'a AnalysisConfig,
    }
    let text = output::to_json_pretty(&Doc {
        comparison: &c,
        config: &s.analysis,
    });
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    if let Some(out) = &p.out {
        write_file(&out.join(output::COMPARISON_FILE), &text)?;
    }
    Ok(EXIT_OK)
}

fn export_plot(p: &Pipeline) -> CmdResult {
    let (dir, session, s) = single_session(p)?;
    let a = analyze(&session, &s.analysis)?;
    write_with_config(
        out_dir(p, dir),
        output::PLOT_FILE,
        &output::format_plot_csv(&a),
        &s.analysis,
    )?;
    Ok(EXIT_OK)
}
