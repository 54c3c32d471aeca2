//! CSV and JSON products of the pipeline. Reals use the shortest
//! round-tripping decimal form, so identical inputs give identical bytes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::features::FeatureTable;
use crate::fusion::FusedSample;
use crate::skill::{Analysis, AnalysisConfig, SkillLabel, SkillReport, Thresholds};

pub const FUSED_FILE: &str = "fused.csv";
pub const FEATURES_FILE: &str = "features.csv";
pub const PLOT_FILE: &str = "plot.csv";
pub const REPORT_FILE: &str = "report.json";
pub const COMPARISON_FILE: &str = "comparison.json";

pub const FUSED_HEADER: &str = "t_us,w,x,y,z,frame_idx,staleness_us";
pub const FEATURES_HEADER: &str =
    "t_us,asm,energy,homogeneity,hist_mean,hist_var,hist_entropy,omega_x,omega_y,omega_z,speed";
pub const PLOT_HEADER: &str = "t_us,series,value";

/// Series of `plot.csv`, in output order. Each series is contiguous.
pub const PLOT_SERIES: [&str; 12] = [
    "q_w",
    "q_x",
    "q_y",
    "q_z",
    "asm",
    "energy",
    "homogeneity",
    "hist_mean",
    "hist_var",
    "hist_entropy",
    "speed",
    "speed_smoothed",
];

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn format_fused_csv(fused: &[FusedSample]) -> String {
    let mut out = String::with_capacity(64 * (fused.len() + 1));
    out.push_str(FUSED_HEADER);
    out.push('\n');
    for s in fused {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.t.0,
            s.q.w,
            s.q.x,
            s.q.y,
            s.q.z,
            opt(s.frame.map(|m| m.idx)),
            opt(s.frame.map(|m| m.staleness_us)),
        );
    }
    out
}

/// Texture and histogram columns are empty on rows without a frame.
pub fn format_features_csv(table: &FeatureTable) -> String {
    let mut out = String::with_capacity(128 * (table.rows.len() + 1));
    out.push_str(FEATURES_HEADER);
    out.push('\n');
    for row in &table.rows {
        let f = table.frame_features(row);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            row.t.0,
            opt(f.map(|f| f.texture.asm)),
            opt(f.map(|f| f.texture.energy)),
            opt(f.map(|f| f.texture.homogeneity)),
            opt(f.map(|f| f.histogram.mean)),
            opt(f.map(|f| f.histogram.variance)),
            opt(f.map(|f| f.histogram.entropy)),
            opt(row.omega.map(|w| w[0])),
            opt(row.omega.map(|w| w[1])),
            opt(row.omega.map(|w| w[2])),
            opt(row.speed),
        );
    }
    out
}

/// Long-format plot data. Instants without a value for a series are
/// omitted from that series.
pub fn format_plot_csv(a: &Analysis) -> String {
    let mut out = String::new();
    out.push_str(PLOT_HEADER);
    out.push('\n');
    let table = &a.features;
    for series in PLOT_SERIES {
        for (k, row) in table.rows.iter().enumerate() {
            let f = table.frame_features(row);
            let q = a.fused[k].q;
            let value = match series {
                "q_w" => Some(q.w),
                "q_x" => Some(q.x),
                "q_y" => Some(q.y),
                "q_z" => Some(q.z),
                "asm" => f.map(|f| f.texture.asm),
                "energy" => f.map(|f| f.texture.energy),
                "homogeneity" => f.map(|f| f.texture.homogeneity),
                "hist_mean" => f.map(|f| f.histogram.mean),
                "hist_var" => f.map(|f| f.histogram.variance),
                "hist_entropy" => f.map(|f| f.histogram.entropy),
                "speed" => row.speed,
                "speed_smoothed" => k.checked_sub(1).map(|j| a.smoothed_speed[j]),
                _ => unreachable!("unknown plot series"),
            };
            if let Some(v) = value {
                let _ = writeln!(out, "{},{series},{v}", row.t.0);
            }
        }
    }
    out
}

/// Contents of `report.json`: the report, its label and the configuration
/// that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument<'a> {
    #[serde(flatten)]
    pub report: &'a SkillReport,
    pub classification: SkillLabel,
    pub thresholds: Thresholds,
    pub config: &'a AnalysisConfig,
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}
