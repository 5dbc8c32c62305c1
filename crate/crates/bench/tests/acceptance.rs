//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fail. Runs without the libtest harness so the lines are
//! always shown.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use arena_agents::causal::{CausalGraph, CausalRelation};
use arena_agents::history::dedup_events;
use arena_bench::calibration::{calibrate_sigma, CalibrationTable, CALIBRATION_EPISODES};
use arena_bench::config::{RunConfig, SystemSpec};
use arena_bench::metrics::{build_report, compute_metrics, latency_stats, Metrics, SigmaMap};
use arena_bench::protocols::{adaptation_protocol, self_play_protocol, Split};
use arena_bench::record::EpisodeRecord;
use arena_bench::runner::{parallel, play_matchup, Matchup};
use arena_bench::{replay, run_benchmark, seeds};
use arena_core::actionlang::{parse_source, pretty};
use arena_core::game::{run_episode, EpisodeOptions, Game, Winner};
use arena_core::opponents::{active_names, builtin, names, BuiltinTeam};
use arena_core::scenarios::{mushroom_yield, MushroomRules, Scenario, ScenarioKind};
use arena_core::world::{Block, Event, Observation, SelfStatus, Team, TimerEffect, WorldState};
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

type Outcome = Result<String, String>;

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

const MW: ScenarioKind = ScenarioKind::MushroomWar;
const DD: ScenarioKind = ScenarioKind::DashAndDine;

fn scenario(kind: ScenarioKind) -> Arc<Scenario> {
    Arc::new(Scenario::builtin(kind))
}

fn builtin_spec(name: &str) -> SystemSpec {
    SystemSpec::Builtin(name.to_string())
}

/// Every built-in against every built-in, `episodes` each.
fn round_robin(kind: ScenarioKind, run_seed: u64, episodes: u32) -> Vec<EpisodeRecord> {
    let all = names(kind);
    let mut matchups = Vec::new();
    for red in &all {
        for blue in &all {
            matchups.push(Matchup {
                scenario: kind,
                red: builtin_spec(red),
                blue: builtin_spec(blue),
                repeat: 0,
                run_seed,
                episodes,
                stage: None,
            });
        }
    }
    let config = RunConfig::default();
    parallel(0, &matchups, |m| play_matchup(m, &config, None).expect("built-ins never fail")).concat()
}

fn cached_round_robin(kind: ScenarioKind) -> &'static [EpisodeRecord] {
    static MW_RR: OnceLock<Vec<EpisodeRecord>> = OnceLock::new();
    static DD_RR: OnceLock<Vec<EpisodeRecord>> = OnceLock::new();
    let cell = if kind == MW { &MW_RR } else { &DD_RR };
    cell.get_or_init(|| round_robin(kind, 1, 20))
}

fn criterion_1() -> Outcome {
    for kind in ScenarioKind::ALL {
        let s = scenario(kind);
        let [a, b] = [active_names(kind)[0], active_names(kind)[1]];
        let play = || {
            let mut red = BuiltinTeam::named(a, Arc::clone(&s)).unwrap();
            let mut blue = BuiltinTeam::named(b, Arc::clone(&s)).unwrap();
            let opts = EpisodeOptions { seed: 99, episode: 0, keep_observations: true };
            run_episode(Arc::clone(&s), &mut red, &mut blue, &opts).unwrap()
        };
        ensure(play() == play(), || format!("{} episode differs between runs", kind.id()))?;
    }

    // a recorded episode, replayed from its run folder
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = RunConfig {
        scenarios: vec![DD],
        opponents: vec![builtin_spec("berries")],
        episodes: 3,
        repeats: 1,
        seeds: vec![4],
        output_dir: tmp.path().to_path_buf(),
        keep_observations: true,
        ..RunConfig::default()
    };
    let out = run_benchmark(&config).map_err(|e| e.to_string())?;
    let r = replay::replay(&out.folder, "dash_and_dine/tactics_vs_berries/r0/e2").map_err(|e| e.to_string())?;
    ensure(r.identical(), || format!("replay diverged: {r:?}"))?;

    let mut worst = 0f64;
    for kind in ScenarioKind::ALL {
        let s = scenario(kind);
        let n = active_names(kind);
        for i in 0..10u32 {
            let mut red = BuiltinTeam::named(n[i as usize % n.len()], Arc::clone(&s)).unwrap();
            let mut blue = BuiltinTeam::named(n[(i as usize + 1) % n.len()], Arc::clone(&s)).unwrap();
            let t = Instant::now();
            let opts = EpisodeOptions { seed: u64::from(i), episode: 0, keep_observations: false };
            run_episode(Arc::clone(&s), &mut red, &mut blue, &opts).unwrap();
            worst = worst.max(t.elapsed().as_secs_f64());
        }
    }
    ensure(worst < 1.0, || format!("slowest episode took {worst:.3}s"))?;
    Ok(format!("identical reruns and replay; slowest of 20 episodes {:.3}s", worst))
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    for kind in ScenarioKind::ALL {
        let records = cached_round_robin(kind);
        let report = build_report(records, &SigmaMap::new());
        ensure(report.matchups.len() == 25, || format!("{} matchups", report.matchups.len()))?;
        for m in &report.matchups {
            ensure(m.n_e == 20, || format!("{} episodes", m.n_e))?;
            ensure(m.metrics.d == -m.blue_d, || format!("{} vs {}: D {} / {}", m.red, m.blue, m.metrics.d, m.blue_d))?;
            ensure(m.metrics.w + m.blue_w == 1.0, || format!("{} vs {}: W {} + {}", m.red, m.blue, m.metrics.w, m.blue_w))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} matchups × 20 episodes, identities exact"))
}

fn counted_slime(w: &WorldState, team: Team) -> usize {
    w.cells()
        .filter(|(_, c)| c.owner_area == Some(team) && c.kind == Block::SlimeBlock)
        .filter(|(_, c)| c.home == Some(Block::SlimeBlock) || c.placed_by == Some(team.opponent()))
        .count()
}

fn mushroom_timers(w: &WorldState, team: Team) -> usize {
    w.timers()
        .filter(|(_, ev)| match &ev.effect {
            TimerEffect::RegrowBlock { cell, kind: Block::RedMushroomBlock, .. } => {
                w.cell(*cell).unwrap().owner_area == Some(team)
            }
            _ => false,
        })
        .count()
}

fn install_builtin(game: &mut Game, team: Team, name: &str) {
    let s = game.scenario().clone();
    let agents = s.players(team);
    let programs = builtin(name, s.kind()).unwrap().programs(&s, &agents, &s.constants(team)).unwrap();
    for (a, p) in agents.iter().zip(programs) {
        let i = game.agent_index(a).unwrap();
        game.install(i, p, 1);
    }
}

fn criterion_3() -> Outcome {
    let s = scenario(MW);
    let n = active_names(MW);
    let (mut overfull, mut ticks) = (0u64, 0u64);
    for episode in 0..100u64 {
        let mut g = Game::new(Arc::clone(&s), 7000 + episode).unwrap();
        install_builtin(&mut g, Team::Red, n[episode as usize % n.len()]);
        install_builtin(&mut g, Team::Blue, n[(episode as usize / n.len()) % n.len()]);
        while !g.is_over() {
            g.step();
            ticks += 1;
            for team in Team::ALL {
                if counted_slime(&g.world, team) > 7 {
                    overfull += 1;
                    ensure(mushroom_timers(&g.world, team) == 0, || {
                        format!("mushroom timer with >7 slime, episode {episode} tick {}", g.tick())
                    })?;
                }
            }
        }
    }
    ensure(overfull > 0, || "no tick ever had more than 7 slime; check is vacuous".into())?;

    let mut rng = SplitMix64::seed_from_u64(31);
    let rules = MushroomRules::default();
    let total: u32 = (0..10_000).map(|_| mushroom_yield(&mut rng, &rules)).sum();
    let mean = f64::from(total) / 10_000.0;
    ensure((mean - 1.0).abs() <= 0.05, || format!("mushroom yield mean {mean}"))?;

    let mut red = BuiltinTeam::named("do_nothing", Arc::clone(&s)).unwrap();
    let mut blue = BuiltinTeam::named("do_nothing", Arc::clone(&s)).unwrap();
    let r = run_episode(Arc::clone(&s), &mut red, &mut blue, &EpisodeOptions::default()).unwrap();
    ensure((r.red.score.points, r.blue.score.points, r.winner) == (0, 0, Winner::Draw), || format!("{:?}", r.winner))?;
    Ok(format!("{ticks} ticks checked ({overfull} team-ticks over 7 slime); yield mean {mean:.4}; idle 0-0"))
}

/// Mean own (red-side) points of each active built-in across its matchups.
fn own_points(records: &[EpisodeRecord]) -> Vec<(String, f64)> {
    active_names(MW)
        .into_iter()
        .map(|name| {
            let mine: Vec<u32> =
                records.iter().filter(|r| r.key.red == builtin_spec(name)).map(|r| r.red_side.points).collect();
            (name.to_string(), mine.iter().sum::<u32>() as f64 / mine.len() as f64)
        })
        .collect()
}

fn criterion_4() -> Outcome {
    let mut wins = 0;
    let mut detail = Vec::new();
    for seed in [1u64, 2, 3] {
        let fresh;
        let records = if seed == 1 {
            cached_round_robin(MW)
        } else {
            fresh = round_robin(MW, seed, 20);
            &fresh
        };
        let pts = own_points(records);
        let best = pts.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        wins += usize::from(best.0 == "passive");
        detail.push(format!("{}={:.1}", best.0, best.1));
    }
    let line = format!("top scorer per repeat: {}", detail.join(", "));
    ensure(wins >= 2, || line.clone())?;
    Ok(line)
}

fn criterion_5() -> Outcome {
    let mean_first = |kind: ScenarioKind| {
        let s = scenario(kind);
        let n = active_names(kind);
        let mut firsts = Vec::new();
        for i in 0..20usize {
            let mut red = BuiltinTeam::named(n[i % n.len()], Arc::clone(&s)).unwrap();
            let mut blue = BuiltinTeam::named(n[(i + 1 + i / n.len()) % n.len()], Arc::clone(&s)).unwrap();
            let seed = seeds::derive(5, &["first-score", kind.id(), &i.to_string()]);
            let opts = EpisodeOptions { seed, episode: 0, keep_observations: false };
            let r = run_episode(Arc::clone(&s), &mut red, &mut blue, &opts).unwrap();
            firsts.extend([r.red.score.first_score_tick(), r.blue.score.first_score_tick()].into_iter().flatten());
        }
        firsts.iter().sum::<u64>() as f64 / firsts.len() as f64
    };
    let (mw, dd) = (mean_first(MW), mean_first(DD));
    let line = format!("mean first-score tick: mushroom war {mw:.1}, dash and dine {dd:.1}");
    ensure(dd > mw, || line.clone())?;
    Ok(line)
}

fn criterion_6() -> Outcome {
    let mut g = Game::new(scenario(DD), 7).unwrap();
    let i = g.agent_index("Rook").unwrap();
    let foods = ["bread", "cake", "cookie", "golden_carrot"];
    for item in foods {
        g.world.agents[i].inventory.add(item, 2);
    }
    let give = |item: &str| format!("giveToPlayer(\"{item}\", \"Red_Server\", 1)\n");
    let mut src: String = foods.iter().map(|f| give(f)).collect();
    src += &give("golden_carrot");
    g.install(i, parse_source(&src).unwrap(), 1);
    g.run_until(200);
    let table = &g.scenario().config.points;
    let expected: u32 = foods[..3].iter().map(|f| table.points(f).unwrap()).sum();
    let score = g.score(Team::Red);
    ensure(score.submitted_types == foods[..3], || format!("{:?}", score.submitted_types))?;
    ensure(score.points == expected, || format!("{} points, expected {expected}", score.points))?;
    Ok(format!("first three types scored {expected} points; both golden_carrot hand-ins scored 0"))
}

fn criterion_7() -> Outcome {
    let mut g = Game::new(scenario(DD), 7).unwrap();
    let i = g.agent_index("Rook").unwrap();
    g.world.agents[i].inventory.add("potato", 1);
    g.install(i, parse_source(r#"smeltItem("potato", "coal", 1)"#).unwrap(), 1);
    let mut queued = None;
    while g.tick() < 600 {
        g.step();
        let said = |p: &str| g.world.chat_log.iter().any(|e| e.sender == "Rook" && e.chat_text().is_some_and(|t| t.starts_with(p)));
        if queued.is_none() && said("Queued 1 potato") {
            queued = Some(g.tick());
        }
        if g.world.agents[i].inventory.count("baked_potato") == 1 {
            let t = queued.ok_or("finished before it was queued")?;
            ensure(g.tick() == t + 200, || format!("queued at {t}, done at {}", g.tick()))?;
            return Ok(format!("queued at tick {t}, done at tick {}", g.tick()));
        }
    }
    Err("smelting never finished".into())
}

fn criterion_8() -> Outcome {
    let m = compute_metrics(&[10, 5], &[8, 5], 9.0, 1.0);
    ensure(m == Metrics { p: 7.5, s: 2.5, d: 1.0, w: 0.75 }, || format!("{m:?}"))?;
    ensure(compute_metrics(&[2, 4], &[2, 4], 0.0, 1.0).w == 0.5, || "all draws".into())?;
    ensure(compute_metrics(&[3, 9], &[3, 9], 0.0, 1.0).d == 0.0, || "identical lists".into())?;
    let l = latency_stats(&[(2.0, 100), (4.0, 100)], &[1, 1]).ok_or("no stats")?;
    ensure((l.t_resp, l.n_out, l.r_tps, l.idle) == (3.0, 100.0, Some(37.5), 0.0), || format!("{l:?}"))?;
    ensure(latency_stats(&[], &[]).is_none(), || "empty records must give no stats".into())?;
    Ok("P=7.5 S=2.5 D=1 W=0.75; T_resp=3 N_out=100 R_tps=37.5".into())
}

fn criterion_9() -> Outcome {
    let config = RunConfig::default();
    let mut pairs = Vec::new();
    for kind in ScenarioKind::ALL {
        pairs.extend(names(kind).into_iter().map(|n| (kind, builtin_spec(n))));
    }
    for (kind, blue) in &pairs {
        let e = calibrate_sigma(*kind, blue, &config).map_err(|e| e.to_string())?;
        ensure(e.episodes == CALIBRATION_EPISODES && e.blue_scores.len() == 20 && e.red == "do_nothing", || {
            format!("{blue}: {} episodes vs {}", e.blue_scores.len(), e.red)
        })?;
    }
    let mut table = CalibrationTable::in_memory();
    let sigmas = table.ensure(&config, &pairs).map_err(|e| e.to_string())?;
    for kind in ScenarioKind::ALL {
        ensure(sigmas[&(kind, builtin_spec("do_nothing"))] == 0.0, || "σ(do_nothing) is not 0".into())?;
    }
    let passive = sigmas[&(MW, builtin_spec("passive"))];
    ensure(passive > 0.0, || "σ(passive) is 0".into())?;
    let before = table.computed;
    table.ensure(&config, &pairs).map_err(|e| e.to_string())?;
    ensure(table.computed == before, || "cache hit re-simulated".into())?;
    Ok(format!("{} opponents × 20 episodes; σ(do_nothing)=0, σ(passive)={passive:.2}", pairs.len()))
}

fn blank() -> Observation {
    Observation {
        nearby_blocks: vec![],
        nearby_mobs: vec![],
        chest_contents: vec![],
        inventory: Default::default(),
        self_status: SelfStatus::default(),
    }
}

fn is_subsequence(sub: &[Event], full: &[Event]) -> bool {
    let mut it = full.iter();
    sub.iter().all(|e| it.any(|f| f == e))
}

fn criterion_10() -> Outcome {
    let mut rng = SplitMix64::seed_from_u64(10);
    let senders = ["Rook", "Rhea", "Bolt"];
    let mut removed = 0;
    for case in 0..1000 {
        let len = rng.gen_range(0..80);
        let log: Vec<Event> = (0..len)
            .map(|i| {
                let who = senders[rng.gen_range(0..3)];
                if rng.gen_bool(0.7) {
                    Event::chat(i, who, format!("m{}", rng.gen_range(0..4)))
                } else {
                    Event::observe(i, who, blank())
                }
            })
            .collect();
        let once = dedup_events(&log);
        ensure(is_subsequence(&once, &log), || format!("case {case}: not an ordered subsequence"))?;
        ensure(dedup_events(&once) == once, || format!("case {case}: not idempotent"))?;
        removed += log.len() - once.len();
    }

    let s = scenario(MW);
    let mut g = Game::new(Arc::clone(&s), 5).unwrap();
    let rook = g.agent_index("Rook").unwrap();
    g.install(rook, parse_source(r#"repeat 60 { mineBlock("slime_block", 1) say("swept one") }"#).unwrap(), 1);
    while !g.is_over() && g.exec_status(rook) == Some(&arena_core::actionlang::ExecStatus::Running) {
        g.step();
    }
    let log = g.agent_log(rook).to_vec();
    let reduced = dedup_events(&log);
    let shrink = 1.0 - reduced.len() as f64 / log.len() as f64;
    ensure(shrink >= 0.5, || format!("loop log shrank by {:.0}%", shrink * 100.0))?;
    Ok(format!("1000 fuzzed logs ({removed} events removed); loop log {} → {} ({:.0}% smaller)", log.len(), reduced.len(), shrink * 100.0))
}

const MUSHROOM_GRAPH: &str = include_str!("../../agents/tests/data/red_mushroom.graph");
const FARMING_GRAPH: &str = include_str!("../../agents/tests/data/red_farming.graph");

fn criterion_11() -> Outcome {
    // counted from the fixture files before any parser existed
    for (text, expected) in [(MUSHROOM_GRAPH, 23), (FARMING_GRAPH, 87)] {
        let counted = text.lines().filter(|l| l.starts_with("Action: ")).count();
        ensure(counted == expected, || format!("line-count oracle found {counted}, expected {expected}"))?;
        let g = CausalGraph::from_lines(text).map_err(|e| e.to_string())?;
        ensure(g.len() == expected, || format!("parsed {} relations, expected {expected}", g.len()))?;
        ensure(g.to_lines() == text, || "serialized text differs from the fixture".into())?;
    }
    let mut rng = SplitMix64::seed_from_u64(11);
    let items = ["wheat", "bread", "coal", "egg"];
    let rel = |rng: &mut SplitMix64| {
        let pick = |rng: &mut SplitMix64| (0..rng.gen_range(0..3)).map(|_| items[rng.gen_range(0..4)]).collect::<Vec<_>>();
        CausalRelation::new(format!("craftItem(bot, \"x{}\", 1)", rng.gen_range(0..30)), &pick(rng), &pick(rng))
    };
    for _ in 0..300 {
        let mut g = CausalGraph::from((0..rng.gen_range(0..10)).map(|_| rel(&mut rng)).collect::<Vec<_>>());
        for _ in 0..4 {
            let before = g.clone();
            let update: Vec<CausalRelation> = (0..rng.gen_range(0..8)).map(|_| rel(&mut rng)).collect();
            let added = g.union(update.clone());
            ensure(g.len() == before.len() + added, || "size is not old + added".into())?;
            ensure(before.iter().all(|r| g.get(&r.action) == Some(r)), || "an existing relation changed".into())?;
            ensure(update.iter().all(|r| g.get(&r.action).is_some()), || "an update was dropped".into())?;
        }
    }
    Ok("23 and 87 relations round-trip byte for byte; 1200 fuzzed unions monotone".into())
}

fn criterion_12() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = RunConfig { repeats: 1, seeds: vec![1], output_dir: tmp.path().to_path_buf(), ..RunConfig::default() };
    let t = Instant::now();
    let out = run_benchmark(&config).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    ensure(out.failures.is_empty(), || format!("{:?}", out.failures))?;
    ensure(out.records.len() == 2 * 5 * 5, || format!("{} episodes", out.records.len()))?;
    let dir = &out.folder;
    for f in ["config.toml", "scores.jsonl", "sigma.json", "matchups.csv", "timeline.csv", "metrics.json", "summary.txt"] {
        ensure(dir.join(f).is_file(), || format!("missing {f}"))?;
    }
    for r in &out.records {
        let ep = dir.join("episodes").join(&r.id);
        for f in ["events.jsonl", "result.json", "transcripts.jsonl"] {
            ensure(ep.join(f).is_file(), || format!("missing {}/{f}", r.id))?;
        }
    }
    let rows = std::fs::read_to_string(dir.join("matchups.csv")).unwrap().lines().count() - 1;
    ensure(rows == 10, || format!("{rows} matchup rows"))?;
    ensure(secs < 600.0, || format!("took {secs:.1}s"))?;
    Ok(format!("50 episodes, 10 matchups, complete run folder in {secs:.2}s"))
}

fn criterion_13() -> Outcome {
    let config = RunConfig { repeats: 1, seeds: vec![1], ..RunConfig::default() };
    let sigmas = SigmaMap::new();
    let a = adaptation_protocol(&config, &sigmas, None).map_err(|e| e.to_string())?;
    let shape: Vec<(String, Split)> = a.rows.iter().map(|r| (r.scope.clone(), r.split)).collect();
    let expected: Vec<(String, Split)> = ["MW", "DD", "Avg"]
        .iter()
        .flat_map(|s| [(s.to_string(), Split::Same), (s.to_string(), Split::Different)])
        .collect();
    ensure(shape == expected, || format!("rows {shape:?}"))?;
    for kind in ScenarioKind::ALL {
        let n = a.evaluations.iter().filter(|e| e.record.key.scenario == kind).count();
        ensure(n == 25, || format!("{n} evaluation episodes for {}", kind.id()))?;
    }
    ensure(a.row("MW", Split::Same).map(|r| r.episodes) == Some(5), || "same cell is not 5 episodes".into())?;

    let s = self_play_protocol(&config, &sigmas, None).map_err(|e| e.to_string())?;
    for kind in ScenarioKind::ALL {
        let points: Vec<u32> = s.checkpoints.iter().filter(|c| c.scenario == kind).map(|c| c.checkpoint).collect();
        ensure(points == [5, 10, 15, 20], || format!("checkpoints {points:?}"))?;
        let series = s.series.iter().find(|x| x.scenario == kind).ok_or("no series")?;
        ensure(series.red_scores.len() == 20 && series.blue_scores.len() == 20, || "series length".into())?;
        let total = s.training.iter().chain(&s.evaluations).filter(|r| r.key.scenario == kind).count();
        ensure(total == 40, || format!("{total} self-play episodes for {}", kind.id()))?;
    }
    Ok("adaptation 6 rows, 25 evaluations per scenario; self-play 4 checkpoints, 20-point series, 40 episodes".into())
}

const CORPUS: &str = include_str!("../../core/tests/data/corpus.act");

const MALFORMED: &[(&str, u32, u32)] = &[
    ("mineBlock(", 1, 11),
    ("loop { wait(20) ", 1, 17),
    ("repeat x { wait(1) }", 1, 8),
    ("wait(\"a\")", 1, 6),
    ("say(3)", 1, 5),
    ("mineBlock(\"a\", 1))", 1, 18),
    ("wait(1)\nif has(\"x\") {\n  say(\"y\")\n} else wait(2)", 4, 8),
    ("if ok { }", 1, 7),
    ("foo(\"unterminated)", 1, 5),
    ("mineBlock(\"slime_block\", 1) @", 1, 29),
];

fn criterion_14() -> Outcome {
    let programs: Vec<&str> = CORPUS.split("\n=====\n").collect();
    ensure(programs.len() >= 50, || format!("{} corpus programs", programs.len()))?;
    for src in &programs {
        let ast = parse_source(src).map_err(|e| format!("{e}: {src}"))?;
        let again = parse_source(&pretty(&ast)).map_err(|e| e.to_string())?;
        ensure(again == ast, || format!("round trip changed {src}"))?;
    }
    for &(src, line, column) in MALFORMED {
        let err = parse_source(src).err().ok_or_else(|| format!("{src:?} parsed"))?;
        ensure((err.line, err.column) == (line, column), || format!("{src:?}: got {}:{}", err.line, err.column))?;
    }
    let mut rng = SplitMix64::seed_from_u64(14);
    let pieces = ["loop", "repeat", "if", "else", "{", "}", "(", ")", ",", "\"", "\n", " ", "3", "wait", "say", "é"];
    for i in 0..100_000 {
        let src: String = if i % 2 == 0 {
            (0..rng.gen_range(0..24)).map(|_| pieces[rng.gen_range(0..pieces.len())]).collect()
        } else {
            let bytes: Vec<u8> = (0..rng.gen_range(0..40)).map(|_| rng.gen()).collect();
            String::from_utf8_lossy(&bytes).into_owned()
        };
        let _ = parse_source(&src);
    }
    Ok(format!("{} programs round-trip; {} malformed inputs located; 100000 fuzzed strings", programs.len(), MALFORMED.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("determinism and speed", criterion_1),
        ("zero-sum identities", criterion_2),
        ("mushroom war mechanics", criterion_3),
        ("passive scores most", criterion_4),
        ("first-score delay", criterion_5),
        ("three food types", criterion_6),
        ("smelting latency", criterion_7),
        ("metric formulas", criterion_8),
        ("calibration", criterion_9),
        ("deduplication", criterion_10),
        ("causal graph", criterion_11),
        ("end-to-end mock run", criterion_12),
        ("protocol shapes", criterion_13),
        ("parser", criterion_14),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS  {name}: {detail} [{secs:.1}s]"),
            Err(why) => {
                println!("criterion {n}: FAIL  {name}: {why} [{secs:.1}s]");
                failed.push(n);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 14 criteria pass");
    } else {
        println!("acceptance: failed {failed:?}");
        std::process::exit(1);
    }
}
