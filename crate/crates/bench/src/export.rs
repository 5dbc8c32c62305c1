//! CSV, JSON and text exports. Records are sorted first, so the same
//! records always produce byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use arena_core::scenarios::ScenarioKind;
use serde::Serialize;

use crate::calibration::sigma_map;
use crate::config::SystemSpec;
use crate::error::BenchError;
use crate::metrics::{build_report, LatencyStats, MetricsReport};
use crate::record::{read_json, read_jsonl, write_file, EpisodeRecord, SCORES_FILE, SIGMA_FILE};

pub const MATCHUPS_CSV: &str = "matchups.csv";
pub const TIMELINE_CSV: &str = "timeline.csv";
pub const METRICS_JSON: &str = "metrics.json";
pub const SUMMARY_TXT: &str = "summary.txt";

/// Formats `x` with at most six decimals and no trailing zeros.
pub fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

/// Two-sided normal quantile for a 95% band (5% outside it).
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Serialize)]
struct MatchupRow<'a> {
    scenario: &'a str,
    red: String,
    blue: String,
    episodes: usize,
    sigma_blue: String,
    scale: String,
    p: String,
    s: String,
    d: String,
    w: String,
    blue_p: String,
    blue_d: String,
    blue_w: String,
}

pub fn matchups_csv(report: &MetricsReport) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for m in &report.matchups {
        w.serialize(MatchupRow {
            scenario: m.scenario.id(),
            red: m.red.label(),
            blue: m.blue.label(),
            episodes: m.n_e,
            sigma_blue: num(m.sigma_blue),
            scale: num(m.scale),
            p: num(m.metrics.p),
            s: num(m.metrics.s),
            d: num(m.metrics.d),
            w: num(m.metrics.w),
            blue_p: num(m.blue_p),
            blue_d: num(m.blue_d),
            blue_w: num(m.blue_w),
        })?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?).expect("csv is utf-8"))
}

/// Mean and 95% normal band of `values`; the band collapses to the mean for one value.
pub fn mean_band(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, mean, mean);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let half = Z_95 * (var / n).sqrt();
    (mean, mean - half, mean + half)
}

/// One row per tick per matchup: mean raw points of both sides with bands.
pub fn timeline_csv(records: &[EpisodeRecord]) -> String {
    let mut groups: BTreeMap<(ScenarioKind, SystemSpec, SystemSpec), Vec<&EpisodeRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.key.scenario, r.key.red.clone(), r.key.blue.clone())).or_default().push(r);
    }
    let mut out = String::from("scenario,red,blue,tick,episodes,red_mean,red_lo,red_hi,blue_mean,blue_lo,blue_hi\n");
    for ((scenario, red, blue), eps) in groups {
        let duration = eps.iter().map(|e| e.duration).max().unwrap_or(0);
        let (red, blue) = (red.label(), blue.label());
        for tick in 0..duration {
            let reds: Vec<f64> = eps.iter().map(|e| e.red_side.points_at(tick) as f64).collect();
            let blues: Vec<f64> = eps.iter().map(|e| e.blue_side.points_at(tick) as f64).collect();
            let (rm, rl, rh) = mean_band(&reds);
            let (bm, bl, bh) = mean_band(&blues);
            let _ = writeln!(
                out,
                "{},{red},{blue},{tick},{},{rm:.4},{rl:.4},{rh:.4},{bm:.4},{bl:.4},{bh:.4}",
                scenario.id(),
                eps.len()
            );
        }
    }
    out
}

fn latency_line(l: &Option<LatencyStats>) -> String {
    match l {
        None => "no model calls".into(),
        Some(l) => format!(
            "N_llm {}  T_resp {:.2}s  N_out {:.1}  R_tps {}  I {:.2}  idle {:.2}s",
            l.n_llm,
            l.t_resp,
            l.n_out,
            l.r_tps.map_or("n/a".into(), |r| format!("{r:.1}")),
            l.iterations,
            l.idle
        ),
    }
}

pub fn summary_text(report: &MetricsReport) -> String {
    let mut out = String::new();
    let mut scenario = None;
    for m in &report.matchups {
        if scenario != Some(m.scenario) {
            scenario = Some(m.scenario);
            let _ = writeln!(out, "\n== {} (scores x{}) ==", m.scenario.id(), m.scale);
            let _ = writeln!(out, "{:<14} {:<14} {:>4} {:>9} {:>9} {:>9} {:>6}", "red", "blue", "N_e", "P", "S", "D", "W");
        }
        let x = &m.metrics;
        let _ = writeln!(
            out,
            "{:<14} {:<14} {:>4} {:>9.3} {:>9.3} {:>9.3} {:>6.3}",
            m.red.label(),
            m.blue.label(),
            m.n_e,
            x.p,
            x.s,
            x.d,
            x.w
        );
    }
    let _ = writeln!(out, "\n== aggregates ==");
    for a in &report.aggregates {
        let x = &a.metrics;
        let _ = writeln!(
            out,
            "{:<14} {:<12} P {:.3}  S {:.3}  D {:.3}  W {:.3}  ({} matchups)\n{:<14} {}",
            a.scope,
            a.red.label(),
            x.p,
            x.s,
            x.d,
            x.w,
            a.matchups,
            "",
            latency_line(&a.latency)
        );
    }
    out.trim_start().to_string()
}

/// Writes the matchup matrix, timeline, metrics JSON and summary into `dir`.
pub fn write_all(dir: &Path, records: &[EpisodeRecord], report: &MetricsReport) -> Result<(), BenchError> {
    let mut sorted: Vec<&EpisodeRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    let sorted: Vec<EpisodeRecord> = sorted.into_iter().cloned().collect();
    write_file(&dir.join(MATCHUPS_CSV), matchups_csv(report)?.as_bytes())?;
    write_file(&dir.join(TIMELINE_CSV), timeline_csv(&sorted).as_bytes())?;
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    write_file(&dir.join(METRICS_JSON), json.as_bytes())?;
    write_file(&dir.join(SUMMARY_TXT), summary_text(report).as_bytes())
}

/// Rebuilds the exports of a run folder from its `scores.jsonl` and `sigma.json`.
pub fn export_run(dir: &Path) -> Result<MetricsReport, BenchError> {
    let mut records: Vec<EpisodeRecord> = read_jsonl(&dir.join(SCORES_FILE))?;
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    let sigma_path = dir.join(SIGMA_FILE);
    let sigmas = if sigma_path.exists() { sigma_map(read_json(&sigma_path)?) } else { Default::default() };
    let report = build_report(&records, &sigmas);
    write_all(dir, &records, &report)?;
    Ok(report)
}
