use std::sync::Arc;

use arena_core::actionlang::validate;
use arena_core::game::{run_episode, EpisodeOptions, Game};
use arena_core::opponents::{active_names, builtin, names, BuiltinTeam, RandomTeam};
use arena_core::scenarios::{Scenario, ScenarioKind};
use arena_core::world::{Block, Team};

fn scenario(kind: ScenarioKind) -> Arc<Scenario> {
    Arc::new(Scenario::builtin(kind))
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

#[test]
fn every_script_compiles_for_both_sides() {
    for kind in ScenarioKind::ALL {
        let s = scenario(kind);
        for name in names(kind) {
            let spec = builtin(name, kind).unwrap();
            for team in Team::ALL {
                let programs = spec.programs(&s, &s.players(team), &s.constants(team)).unwrap();
                assert_eq!(programs.len(), 2, "{name}");
            }
        }
    }
    assert!(builtin("nonsense", ScenarioKind::MushroomWar).is_err());
    assert!(builtin("berries", ScenarioKind::MushroomWar).is_err());
}

#[test]
fn sabotage_flags_follow_the_strategy_table() {
    let flags = |n| builtin(n, ScenarioKind::MushroomWar).unwrap().sabotage.unwrap();
    assert!(flags("aggressive").destroy && flags("aggressive").place);
    assert!(flags("balanced").destroy && !flags("balanced").place);
    assert!(!flags("passive").destroy && !flags("passive").place);
    assert!(!flags("slimy").destroy && flags("slimy").place);
    let dd = builtin("melon_pumpkin", ScenarioKind::DashAndDine).unwrap();
    assert!(dd.transforms.is_empty());
}

#[test]
fn every_builtin_beats_do_nothing() {
    for kind in ScenarioKind::ALL {
        let s = scenario(kind);
        for name in active_names(kind) {
            let mut total = [0u64; 2];
            for seed in 0..20 {
                let mut active = BuiltinTeam::named(name, Arc::clone(&s)).unwrap();
                let mut idle = BuiltinTeam::named("do_nothing", Arc::clone(&s)).unwrap();
                let opts = EpisodeOptions { seed, ..Default::default() };
                let (r, b) = if seed % 2 == 0 {
                    let res = run_episode(Arc::clone(&s), &mut active, &mut idle, &opts).unwrap();
                    (res.red.score.points, res.blue.score.points)
                } else {
                    let res = run_episode(Arc::clone(&s), &mut idle, &mut active, &opts).unwrap();
                    (res.blue.score.points, res.red.score.points)
                };
                total[0] += u64::from(r);
                total[1] += u64::from(b);
            }
            assert!(total[0] > 0 && total[1] == 0, "{name}: {total:?}");
        }
    }
}

/// Snapshot of the blue area's blocks.
fn blue_area(g: &Game) -> Vec<Block> {
    let area = g.world.area(Team::Blue).unwrap().clone();
    g.world.cells().filter(|(p, _)| area.contains(*p)).map(|(_, c)| c.kind).collect()
}

#[test]
fn passive_never_acts_in_the_opponent_area() {
    let s = scenario(ScenarioKind::MushroomWar);
    for seed in 0..20 {
        let mut g = Game::new(Arc::clone(&s), seed).unwrap();
        install_builtin(&mut g, Team::Red, "passive");
        let area = g.world.area(Team::Blue).unwrap().clone();
        let start = blue_area(&g);
        let red: Vec<usize> = s.players(Team::Red).iter().map(|a| g.agent_index(a).unwrap()).collect();
        while !g.is_over() {
            g.step();
            for &i in &red {
                assert!(!area.contains(g.world.agents[i].position), "seed {seed} tick {}", g.tick());
            }
            // blue idles, so anything changing there would be red's doing
            assert_eq!(blue_area(&g), start, "seed {seed} tick {}", g.tick());
        }
        assert!(g.score(Team::Red).points > 0);
    }
}

#[test]
fn slimy_never_mines_opponent_mushrooms() {
    let s = scenario(ScenarioKind::MushroomWar);
    for seed in 0..20 {
        let mut g = Game::new(Arc::clone(&s), seed).unwrap();
        install_builtin(&mut g, Team::Red, "slimy");
        let area = g.world.area(Team::Blue).unwrap().clone();
        let mushrooms = |g: &Game| {
            g.world
                .cells()
                .filter(|(p, c)| area.contains(*p) && c.kind == Block::RedMushroomBlock)
                .count()
        };
        let mut placed = 0;
        while !g.is_over() {
            g.step();
            assert_eq!(mushrooms(&g), 12, "seed {seed} tick {}", g.tick());
            placed = placed.max(
                g.world
                    .cells()
                    .filter(|(p, c)| area.contains(*p) && c.placed_by == Some(Team::Red))
                    .count(),
            );
        }
        // the place sabotage did happen
        assert!(placed > 0, "seed {seed}");
    }
}

#[test]
fn random_baseline_only_emits_valid_calls() {
    for kind in ScenarioKind::ALL {
        let s = scenario(kind);
        let mut red = RandomTeam::new(17);
        let mut blue = RandomTeam::new(18);
        let opts = EpisodeOptions { seed: 4, ..Default::default() };
        let r = run_episode(Arc::clone(&s), &mut red, &mut blue, &opts).unwrap();
        assert!(red.history().len() > 10);
        for p in red.history().iter().chain(blue.history()) {
            assert!(validate(p, &s.primitives).is_empty(), "{p:?}");
        }
        // statically valid calls can still fail at run time (signalling an
        // opponent, say); those end the program and the team draws again
        assert!(r.red.iterations.iter().all(|(_, n)| *n > 1));
    }
}
