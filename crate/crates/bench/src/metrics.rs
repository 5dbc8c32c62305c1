//! Points, sabotage, score difference and win rate, plus model latency.
//!
//! For `N_e` episodes with red scores `r_i`, blue scores `b_i` and the blue
//! system's calibrated score `σ` against an idle red team:
//!
//! ```text
//! P = mean(r_i)    S = mean(σ − b_i)    D = mean(r_i − b_i)
//! W = mean(1[r_i > b_i] + 0.5 · 1[r_i = b_i])
//! ```
//!
//! Every score (and σ) is multiplied by the scenario's report scale first.

use std::collections::BTreeMap;

use arena_core::scenarios::{Scenario, ScenarioKind};
use arena_core::world::Team;
use serde::{Deserialize, Serialize};

use crate::config::SystemSpec;
use crate::record::{EpisodeRecord, SideRecord};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub p: f64,
    pub s: f64,
    pub d: f64,
    pub w: f64,
}

/// One episode's scores, raw, with the σ that applies to its blue side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scored {
    pub red: u32,
    pub blue: u32,
    pub sigma_blue: f64,
}

/// Metrics for one matchup. `red` and `blue` must have the same, non-zero length.
pub fn compute_metrics(red: &[u32], blue: &[u32], sigma_blue: f64, scale: f64) -> Metrics {
    assert_eq!(red.len(), blue.len(), "score lists differ in length");
    let scored: Vec<Scored> =
        red.iter().zip(blue).map(|(&red, &blue)| Scored { red, blue, sigma_blue }).collect();
    pooled_metrics(&scored, scale)
}

/// Metrics over episodes whose blue sides may have different σ.
pub fn pooled_metrics(episodes: &[Scored], scale: f64) -> Metrics {
    assert!(!episodes.is_empty(), "metrics need at least one episode");
    let n = episodes.len() as f64;
    let (mut p, mut s, mut d, mut w) = (0.0, 0.0, 0.0, 0.0);
    for e in episodes {
        let (r, b) = (e.red as f64 * scale, e.blue as f64 * scale);
        p += r;
        s += e.sigma_blue * scale - b;
        d += r - b;
        w += match e.red.cmp(&e.blue) {
            std::cmp::Ordering::Greater => 1.0,
            std::cmp::Ordering::Equal => 0.5,
            std::cmp::Ordering::Less => 0.0,
        };
    }
    Metrics { p: p / n, s: s / n, d: d / n, w: w / n }
}

/// Unweighted mean of several metric rows.
pub fn mean_metrics(rows: &[Metrics]) -> Option<Metrics> {
    if rows.is_empty() {
        return None;
    }
    let n = rows.len() as f64;
    let sum = |f: fn(&Metrics) -> f64| rows.iter().map(f).sum::<f64>() / n;
    Some(Metrics { p: sum(|m| m.p), s: sum(|m| m.s), d: sum(|m| m.d), w: sum(|m| m.w) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    /// Number of calls.
    pub n_llm: usize,
    /// Mean response time, seconds.
    pub t_resp: f64,
    /// Mean output tokens per response.
    pub n_out: f64,
    /// Mean of per-response token rates; calls that took no time are left out,
    /// and the rate is absent when none remain.
    pub r_tps: Option<f64>,
    /// Mean programs per agent per episode.
    pub iterations: f64,
    /// Expected idle time per agent per episode, `T_resp · (I − 1)`, seconds.
    pub idle: f64,
}

/// `calls` are `(response time, output tokens)`; `iterations` are programs
/// per agent per episode. `None` when there were no calls.
pub fn latency_stats(calls: &[(f64, u32)], iterations: &[u32]) -> Option<LatencyStats> {
    if calls.is_empty() {
        return None;
    }
    let n = calls.len() as f64;
    let t_resp = calls.iter().map(|c| c.0).sum::<f64>() / n;
    let n_out = calls.iter().map(|c| c.1 as f64).sum::<f64>() / n;
    let rates: Vec<f64> = calls.iter().filter(|c| c.0 > 0.0).map(|c| c.1 as f64 / c.0).collect();
    let r_tps = (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64);
    let i = if iterations.is_empty() {
        1.0
    } else {
        iterations.iter().map(|&i| i as f64).sum::<f64>() / iterations.len() as f64
    };
    Some(LatencyStats { n_llm: calls.len(), t_resp, n_out, r_tps, iterations: i, idle: t_resp * (i - 1.0) })
}

/// Latency over every call and program count of one side of `records`.
pub fn side_latency<'a>(sides: impl IntoIterator<Item = &'a SideRecord>) -> Option<LatencyStats> {
    let mut calls = Vec::new();
    let mut iterations = Vec::new();
    for s in sides {
        calls.extend(s.calls.iter().map(|c| (c.t_resp, c.n_out)));
        iterations.extend(s.iterations.iter().map(|(_, i)| *i));
    }
    latency_stats(&calls, &iterations)
}

pub fn report_scale(kind: ScenarioKind) -> f64 {
    Scenario::builtin(kind).config.report_scale
}

/// Calibrated σ per `(scenario, blue system)`, in raw points.
pub type SigmaMap = BTreeMap<(ScenarioKind, SystemSpec), f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchupMetrics {
    pub scenario: ScenarioKind,
    pub red: SystemSpec,
    pub blue: SystemSpec,
    pub n_e: usize,
    /// Raw σ of the blue system.
    pub sigma_blue: f64,
    pub scale: f64,
    /// Red's view, report-scaled.
    pub metrics: Metrics,
    /// Blue's view of the same episodes.
    pub blue_p: f64,
    pub blue_d: f64,
    pub blue_w: f64,
    pub latency: Option<LatencyStats>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    /// Scenario id, or `all`.
    pub scope: String,
    pub red: SystemSpec,
    pub matchups: usize,
    pub metrics: Metrics,
    pub latency: Option<LatencyStats>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub matchups: Vec<MatchupMetrics>,
    /// Means over each red system's matchups, per scenario and overall.
    pub aggregates: Vec<Aggregate>,
}

impl MetricsReport {
    pub fn matchup(&self, scenario: ScenarioKind, red: &SystemSpec, blue: &SystemSpec) -> Option<&MatchupMetrics> {
        self.matchups.iter().find(|m| m.scenario == scenario && &m.red == red && &m.blue == blue)
    }
}

/// Groups records by `(scenario, red, blue)`, pooling repeats. Missing σ
/// entries count as zero.
pub fn build_report(records: &[EpisodeRecord], sigmas: &SigmaMap) -> MetricsReport {
    let mut groups: BTreeMap<(ScenarioKind, SystemSpec, SystemSpec), Vec<&EpisodeRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.key.scenario, r.key.red.clone(), r.key.blue.clone())).or_default().push(r);
    }
    let mut matchups = Vec::new();
    for ((scenario, red, blue), mut eps) in groups {
        eps.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let scale = report_scale(scenario);
        let sigma = sigmas.get(&(scenario, blue.clone())).copied().unwrap_or(0.0);
        let reds: Vec<u32> = eps.iter().map(|e| e.red_side.points).collect();
        let blues: Vec<u32> = eps.iter().map(|e| e.blue_side.points).collect();
        let metrics = compute_metrics(&reds, &blues, sigma, scale);
        let mirror = compute_metrics(&blues, &reds, 0.0, scale);
        matchups.push(MatchupMetrics {
            scenario,
            n_e: eps.len(),
            sigma_blue: sigma,
            scale,
            metrics,
            blue_p: mirror.p,
            blue_d: mirror.d,
            blue_w: mirror.w,
            latency: side_latency(eps.iter().map(|e| e.side(Team::Red))),
            red,
            blue,
        });
    }
    let aggregates = aggregate(&matchups, records);
    MetricsReport { matchups, aggregates }
}

fn aggregate(matchups: &[MatchupMetrics], records: &[EpisodeRecord]) -> Vec<Aggregate> {
    let mut reds: Vec<&SystemSpec> = matchups.iter().map(|m| &m.red).collect();
    reds.sort();
    reds.dedup();
    let mut scenarios: Vec<ScenarioKind> = matchups.iter().map(|m| m.scenario).collect();
    scenarios.sort();
    scenarios.dedup();
    let mut out = Vec::new();
    for red in reds {
        let scopes = scenarios.iter().map(|s| Some(*s)).chain(std::iter::once(None));
        for scope in scopes {
            let rows: Vec<Metrics> = matchups
                .iter()
                .filter(|m| &m.red == red && scope.is_none_or(|s| s == m.scenario))
                .map(|m| m.metrics)
                .collect();
            let Some(metrics) = mean_metrics(&rows) else { continue };
            let latency = side_latency(
                records
                    .iter()
                    .filter(|r| &r.key.red == red && scope.is_none_or(|s| s == r.key.scenario))
                    .map(|r| r.side(Team::Red)),
            );
            out.push(Aggregate {
                scope: scope.map_or("all", |s| s.id()).to_string(),
                red: red.clone(),
                matchups: rows.len(),
                metrics,
                latency,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let m = compute_metrics(&[10, 5], &[8, 5], 9.0, 1.0);
        assert_eq!(m, Metrics { p: 7.5, s: 2.5, d: 1.0, w: 0.75 });
    }

    #[test]
    fn draws_and_symmetry() {
        let m = compute_metrics(&[3, 0, 7], &[3, 0, 7], 0.0, 1.0);
        assert_eq!((m.d, m.w), (0.0, 0.5));
    }

    #[test]
    fn scaled_scores() {
        let m = compute_metrics(&[100], &[40], 50.0, 0.1);
        assert!((m.p - 10.0).abs() < 1e-12 && (m.s - 1.0).abs() < 1e-12 && (m.d - 6.0).abs() < 1e-12);
    }

    #[test]
    fn latency_example() {
        let l = latency_stats(&[(2.0, 100), (4.0, 100)], &[1]).unwrap();
        assert_eq!((l.t_resp, l.n_out, l.r_tps), (3.0, 100.0, Some(37.5)));
        assert_eq!(l.idle, 0.0);
        assert_eq!(latency_stats(&[], &[3]), None);
        let l = latency_stats(&[(0.0, 10)], &[3, 5]).unwrap();
        assert_eq!((l.r_tps, l.iterations, l.idle), (None, 4.0, 0.0));
    }
}
