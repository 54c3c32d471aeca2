//! Per-session skill reports, pairwise comparison and a two-threshold
//! classifier.
//!
//! Time is reported as grid samples and as seconds. Smoothness is reported
//! as both SPARC and LDLJ; the classifier uses SPARC only.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{
    extract_features, log_dimensionless_jerk, moving_average, path_length, sparc, FeatureTable, GlcmConfig,
    MotionConfig,
};
use crate::fusion::{fuse_streams, FusedSample, ResampleConfig};
use crate::session::Session;

/// Everything that parameterizes a report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub fusion: ResampleConfig,
    pub glcm: GlcmConfig,
    pub motion: MotionConfig,
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        self.fusion.validate()?;
        self.glcm.validate()
    }
}

pub const FLAG_NO_MOTION: &str = "no motion";
pub const FLAG_SHORT_SERIES: &str = "series too short for smoothness metrics";
pub const FLAG_NO_FRAMES: &str = "no frames associated with the grid";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillReport {
    pub session_id: String,
    pub delta_t_us: u64,
    pub n_samples: u64,
    pub duration_s: f64,
    pub path_length_rad: f64,
    /// `None` when the metric is undefined for the session (see `flags`).
    pub ldlj: Option<f64>,
    pub sparc: Option<f64>,
    pub mean_homogeneity: f64,
    pub mean_energy: f64,
    pub mean_asm: f64,
    /// Standard deviation of homogeneity over grid instants with a frame.
    pub texture_stability: f64,
    pub flags: Vec<String>,
}

/// Pipeline products kept alongside the report for export.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub fused: Vec<FusedSample>,
    pub features: FeatureTable,
    pub smoothed_speed: Vec<f64>,
    pub report: SkillReport,
}

pub fn build_report(session: &Session, fuse_cfg: &ResampleConfig, glcm_cfg: &GlcmConfig) -> Result<SkillReport> {
    let cfg = AnalysisConfig {
        fusion: *fuse_cfg,
        glcm: glcm_cfg.clone(),
        motion: MotionConfig::default(),
    };
    analyze(session, &cfg).map(|a| a.report)
}

/// Fuses the session, extracts features and aggregates them.
pub fn analyze(session: &Session, cfg: &AnalysisConfig) -> Result<Analysis> {
    cfg.validate()?;
    let fused = fuse_streams(session, &cfg.fusion)?;
    let dt_us = cfg.fusion.delta_t_us;
    let features = extract_features(session, &fused, dt_us, &cfg.glcm)?;

    let mut flags = Vec::new();
    let dt_s = dt_us as f64 * 1e-6;
    let smoothed = moving_average(&features.motion.speed, cfg.motion.smoothing_window);
    let mut metric = |r: Result<f64>| match r {
        Ok(v) => Some(v),
        Err(Error::NoMotion) => {
            if !flags.iter().any(|f| f == FLAG_NO_MOTION) {
                flags.push(FLAG_NO_MOTION.to_string());
            }
            None
        }
        Err(Error::SeriesTooShort { .. }) => {
            if !flags.iter().any(|f| f == FLAG_SHORT_SERIES) {
                flags.push(FLAG_SHORT_SERIES.to_string());
            }
            None
        }
        Err(e) => {
            flags.push(e.to_string());
            None
        }
    };
    let ldlj = metric(log_dimensionless_jerk(&smoothed, dt_s));
    let sparc = metric(sparc(&smoothed, 1.0 / dt_s, &cfg.motion.sparc));

    let textures: Vec<_> = features
        .rows
        .iter()
        .filter_map(|r| features.frame_features(r).map(|f| f.texture))
        .collect();
    let (mean_asm, mean_energy, mean_homogeneity, texture_stability) = if textures.is_empty() {
        flags.push(FLAG_NO_FRAMES.to_string());
        (0.0, 0.0, 0.0, 0.0)
    } else {
        let n = textures.len() as f64;
        let asm = textures.iter().map(|t| t.asm).sum::<f64>() / n;
        let energy = textures.iter().map(|t| t.energy).sum::<f64>() / n;
        let hom = textures.iter().map(|t| t.homogeneity).sum::<f64>() / n;
        let var = textures.iter().map(|t| (t.homogeneity - hom).powi(2)).sum::<f64>() / n;
        (asm, energy, hom, var.sqrt())
    };

    let n_samples = fused.len() as u64;
    let report = SkillReport {
        session_id: session.meta.session_id.clone(),
        delta_t_us: dt_us,
        n_samples,
        duration_s: n_samples.saturating_sub(1) as f64 * dt_s,
        path_length_rad: path_length(&fused),
        ldlj,
        sparc,
        mean_homogeneity,
        mean_energy,
        mean_asm,
        texture_stability,
        flags,
    };
    Ok(Analysis {
        fused,
        features,
        smoothed_speed: smoothed,
        report,
    })
}

/// Which side of a comparison wins on a metric.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Session(String),
    Tie,
    /// The metric is undefined for at least one side.
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Session(id) => f.write_str(id),
            Verdict::Tie => f.write_str("tie"),
            Verdict::Undetermined => f.write_str("undetermined"),
        }
    }
}

/// Metric names in the fixed order used for deltas and CLI output.
pub const COMPARED_METRICS: [&str; 9] = [
    "n_samples",
    "duration_s",
    "path_length_rad",
    "ldlj",
    "sparc",
    "mean_homogeneity",
    "mean_energy",
    "mean_asm",
    "texture_stability",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDelta {
    pub metric: String,
    /// `a − b`; `None` when either side is undefined.
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub a: SkillReport,
    pub b: SkillReport,
    pub deltas: Vec<MetricDelta>,
    pub smoother: Verdict,
    pub quicker: Verdict,
}

fn metric_value(r: &SkillReport, name: &str) -> Option<f64> {
    match name {
        "n_samples" => Some(r.n_samples as f64),
        "duration_s" => Some(r.duration_s),
        "path_length_rad" => Some(r.path_length_rad),
        "ldlj" => r.ldlj,
        "sparc" => r.sparc,
        "mean_homogeneity" => Some(r.mean_homogeneity),
        "mean_energy" => Some(r.mean_energy),
        "mean_asm" => Some(r.mean_asm),
        "texture_stability" => Some(r.texture_stability),
        _ => None,
    }
}

pub fn compare(a: &SkillReport, b: &SkillReport) -> Result<Comparison> {
    if a.delta_t_us != b.delta_t_us {
        return Err(Error::IncomparableGrids {
            a: a.delta_t_us,
            b: b.delta_t_us,
        });
    }
    let deltas = COMPARED_METRICS
        .iter()
        .map(|&m| MetricDelta {
            metric: m.to_string(),
            delta: metric_value(a, m).zip(metric_value(b, m)).map(|(x, y)| x - y),
        })
        .collect();
    let smoother = match (a.sparc, b.sparc) {
        (Some(x), Some(y)) if x > y => Verdict::Session(a.session_id.clone()),
        (Some(x), Some(y)) if x < y => Verdict::Session(b.session_id.clone()),
        (Some(_), Some(_)) => Verdict::Tie,
        _ => Verdict::Undetermined,
    };
    let quicker = match a.n_samples.cmp(&b.n_samples) {
        std::cmp::Ordering::Less => Verdict::Session(a.session_id.clone()),
        std::cmp::Ordering::Greater => Verdict::Session(b.session_id.clone()),
        std::cmp::Ordering::Equal => Verdict::Tie,
    };
    Ok(Comparison {
        a: a.clone(),
        b: b.clone(),
        deltas,
        smoother,
        quicker,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub max_expert_samples: u64,
    pub min_expert_sparc: f64,
}

/// Output of [`calibrate_thresholds`] over synthetic seeds 100–109 of each
/// class with default configs. Only motion enters, so frame size is
/// irrelevant.
impl Default for Thresholds {
    fn default() -> Self {
        Self {
            max_expert_samples: 3849,
            min_expert_sparc: -2.012015806328736,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkillLabel {
    ExpertLike,
    NoviceLike,
    Indeterminate,
}

impl fmt::Display for SkillLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SkillLabel::ExpertLike => "expert_like",
            SkillLabel::NoviceLike => "novice_like",
            SkillLabel::Indeterminate => "indeterminate",
        })
    }
}

/// Expert-like when quick enough and smooth enough, novice-like when
/// strictly neither, indeterminate otherwise. A report without SPARC meets
/// neither smoothness condition.
pub fn classify(r: &SkillReport, th: &Thresholds) -> SkillLabel {
    let quick = r.n_samples <= th.max_expert_samples;
    match r.sparc {
        Some(s) if quick && s >= th.min_expert_sparc => SkillLabel::ExpertLike,
        Some(s) if !quick && s < th.min_expert_sparc => SkillLabel::NoviceLike,
        _ => SkillLabel::Indeterminate,
    }
}

/// Thresholds at the midpoints between the per-class extremes: the slowest
/// expert and quickest novice, and the roughest expert and smoothest
/// novice.
pub fn calibrate_thresholds(experts: &[SkillReport], novices: &[SkillReport]) -> Result<Thresholds> {
    let max_expert_n = experts.iter().map(|r| r.n_samples).max();
    let min_novice_n = novices.iter().map(|r| r.n_samples).min();
    let min_expert_sparc = experts.iter().filter_map(|r| r.sparc).min_by(f64::total_cmp);
    let max_novice_sparc = novices.iter().filter_map(|r| r.sparc).max_by(f64::total_cmp);
    match (max_expert_n, min_novice_n, min_expert_sparc, max_novice_sparc) {
        (Some(en), Some(nn), Some(es), Some(ns)) => Ok(Thresholds {
            max_expert_samples: (en + nn) / 2,
            min_expert_sparc: 0.5 * (es + ns),
        }),
        _ => Err(Error::Config(
            "calibration needs at least one report with SPARC per class".into(),
        )),
    }
}
