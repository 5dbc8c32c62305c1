//! Plays every built-in against every other and prints mean points.
//!
//! `cargo run --release -p arena-core --example round_robin -- [episodes] [first_seed] [scenario]`

use std::sync::Arc;
use std::time::Instant;

use arena_core::game::{run_episode, EpisodeOptions};
use arena_core::opponents::{names, BuiltinTeam};
use arena_core::scenarios::{Scenario, ScenarioKind};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let episodes: u64 = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(5);
    let first: u64 = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(0);
    let only = args.get(3).cloned();
    for kind in ScenarioKind::ALL {
        if only.as_deref().is_some_and(|o| o != kind.id()) {
            continue;
        }
        let scenario = Arc::new(Scenario::builtin(kind));
        let names = names(kind);
        println!("== {} ({episodes} episodes per pairing)", kind.id());
        let started = Instant::now();
        let mut own: std::collections::BTreeMap<&str, (f64, f64)> = Default::default();
        let mut played = 0;
        for red in &names {
            for blue in &names {
                let (mut rp, mut bp, mut rf, mut bf) = (0.0, 0.0, Vec::new(), Vec::new());
                for seed in first..first + episodes {
                    let mut r = BuiltinTeam::named(red, Arc::clone(&scenario)).unwrap();
                    let mut b = BuiltinTeam::named(blue, Arc::clone(&scenario)).unwrap();
                    let opts = EpisodeOptions { seed, episode: seed as u32, keep_observations: false };
                    let res = run_episode(Arc::clone(&scenario), &mut r, &mut b, &opts).unwrap();
                    rp += f64::from(res.red.score.points);
                    bp += f64::from(res.blue.score.points);
                    rf.extend(res.red.score.first_score_tick());
                    bf.extend(res.blue.score.first_score_tick());
                    played += 1;
                }
                let n = episodes as f64;
                own.entry(red).or_default().0 += rp;
                own.entry(red).or_default().1 += n;
                own.entry(blue).or_default().0 += bp;
                own.entry(blue).or_default().1 += n;
                let mean = |v: &[u64]| if v.is_empty() { f64::NAN } else { v.iter().sum::<u64>() as f64 / v.len() as f64 };
                println!(
                    "{red:>14} vs {blue:<14} {:7.1} : {:<7.1} first {:6.0} / {:6.0}",
                    rp / n, bp / n, mean(&rf), mean(&bf)
                );
            }
        }
        for (name, (p, n)) in &own {
            println!("mean own points {name:>14}: {:.2}", p / n);
        }
        println!("{:.3} s per episode", started.elapsed().as_secs_f64() / played as f64);
    }
}
