use std::sync::Arc;

use super::*;
use crate::actionlang::parse_source;
use crate::opponents::{BuiltinTeam, ScriptedTeam};
use crate::scenarios::ScenarioKind;
use crate::world::Position;

fn game(kind: ScenarioKind) -> Game {
    Game::new(Arc::new(Scenario::builtin(kind)), 7).unwrap()
}

fn install(g: &mut Game, agent: &str, src: &str) -> usize {
    let i = g.agent_index(agent).unwrap();
    g.install(i, parse_source(src).unwrap(), 1);
    i
}

fn chats(g: &Game, agent: &str) -> Vec<String> {
    g.world
        .chat_log
        .iter()
        .filter(|e| e.sender == agent)
        .filter_map(|e| e.chat_text().map(str::to_string))
        .collect()
}

#[test]
fn approach_stops_next_to_target() {
    let a = prims::approach(Position::flat(0, 0), Position::flat(5, 3));
    assert_eq!(a, Position::flat(4, 2));
    assert_eq!(a.chebyshev(Position::flat(5, 3)), 1);
    assert_eq!(prims::approach(Position::flat(4, 4), Position::flat(5, 5)), Position::flat(4, 4));
}

#[test]
fn mine_slime_reports_and_collects() {
    let mut g = game(ScenarioKind::MushroomWar);
    let i = install(&mut g, "Rook", r#"mineBlock("slime_block", 2)"#);
    let ended = (0..200).flat_map(|_| g.step()).collect::<Vec<_>>();
    assert_eq!(ended, vec![ProgramEnded { agent: i, status: ExecStatus::Done }]);
    assert_eq!(g.world.agents[i].inventory.count("slime_block"), 2);
    assert_eq!(chats(&g, "Rook"), ["Mined 2 slime_block"]);
    // an observe event follows every primitive, visible only to its agent
    assert!(g.agent_log(i).iter().any(|e| e.observation().is_some()));
    let other = g.agent_index("Bolt").unwrap();
    assert!(g.agent_log(other).iter().all(|e| e.observation().is_none()));
}

#[test]
fn soft_failure_turns_ok_false() {
    let mut g = game(ScenarioKind::MushroomWar);
    install(&mut g, "Rook", r#"mineBlock("dirt", 1); if ok() { say("yes") } else { say("no") }"#);
    g.run_until(10);
    assert_eq!(chats(&g, "Rook"), ["No dirt nearby", "no"]);
}

#[test]
fn bad_mode_is_a_runtime_error() {
    let mut g = game(ScenarioKind::DashAndDine);
    let i = install(&mut g, "Rook", r#"farm("juggle", "wheat")"#);
    let ended = g.step();
    assert_eq!(ended.len(), 1);
    assert_eq!(ended[0].agent, i);
    assert!(matches!(&ended[0].status, ExecStatus::Error(m) if m.contains("juggle")));
}

#[test]
fn unavailable_primitive_is_a_runtime_error() {
    let mut g = game(ScenarioKind::MushroomWar);
    install(&mut g, "Rook", r#"craftItem("bread", 1)"#);
    let ended = g.step();
    assert!(matches!(&ended[0].status, ExecStatus::Error(m) if m.contains("unavailable")));
}

#[test]
fn smelt_completes_exactly_after_200_ticks() {
    let mut g = game(ScenarioKind::DashAndDine);
    let i = g.agent_index("Rook").unwrap();
    g.world.agents[i].inventory.add("potato", 2);
    install(&mut g, "Rook", r#"smeltItem("potato", "coal", 2)"#);
    let mut queued = None;
    let mut first = None;
    while g.tick() < 1000 {
        g.step();
        let inv = g.world.agents[i].inventory.count("baked_potato");
        if queued.is_none() && chats(&g, "Rook").iter().any(|c| c.starts_with("Queued 2 potato")) {
            queued = Some(g.tick());
        }
        if first.is_none() && inv == 1 {
            first = Some(g.tick());
        }
        if inv == 2 {
            let t = queued.unwrap();
            assert_eq!(first, Some(t + 200));
            assert_eq!(g.tick(), t + 400);
            return;
        }
    }
    panic!("smelting never finished");
}

#[test]
fn fourth_food_type_scores_nothing() {
    let mut g = game(ScenarioKind::DashAndDine);
    let i = g.agent_index("Rook").unwrap();
    for item in ["bread", "cake", "cookie", "golden_carrot"] {
        g.world.agents[i].inventory.add(item, 1);
    }
    install(
        &mut g,
        "Rook",
        r#"giveToPlayer("bread", "Red_Server", 1)
           giveToPlayer("cake", "Red_Server", 1)
           giveToPlayer("cookie", "Red_Server", 1)
           giveToPlayer("golden_carrot", "Red_Server", 1)"#,
    );
    g.run_until(200);
    let s = g.score(Team::Red);
    assert_eq!(s.submitted_types, ["bread", "cake", "cookie"]);
    assert_eq!(s.points, 6 + 14 + 1);
    assert_eq!(g.score(Team::Blue).points, 0);
}

#[test]
fn craft_reports_missing_inputs() {
    let mut g = game(ScenarioKind::DashAndDine);
    let i = g.agent_index("Rook").unwrap();
    g.world.agents[i].inventory.add("wheat", 1);
    install(&mut g, "Rook", r#"craftItem("bread", 1)"#);
    g.run_until(5);
    assert_eq!(chats(&g, "Rook"), ["I cannot make bread because I need: 2 more wheat"]);
}

#[test]
fn signal_releases_waiting_teammate() {
    let mut g = game(ScenarioKind::DashAndDine);
    install(&mut g, "Rhea", r#"waitSignal("Rook", 500); say("go")"#);
    install(&mut g, "Rook", r#"wait(30); sendSignal("Rhea")"#);
    g.run_until(60);
    assert_eq!(chats(&g, "Rhea"), ["Received signal from Rook", "go"]);
    let go = g.world.chat_log.iter().find(|e| e.chat_text() == Some("go")).unwrap();
    assert_eq!(go.tick, 31);
}

#[test]
fn signal_to_opponent_is_an_error() {
    let mut g = game(ScenarioKind::DashAndDine);
    install(&mut g, "Rook", r#"sendSignal("Bolt")"#);
    let ended = g.step();
    assert!(matches!(&ended[0].status, ExecStatus::Error(_)));
}

#[test]
fn harvest_and_hand_in_scores() {
    let mut g = game(ScenarioKind::DashAndDine);
    install(
        &mut g,
        "Rook",
        r#"farm("harvest", "melon"); giveToPlayer("melon_slice", "Red_Server", -1)"#,
    );
    g.run_until(300);
    let s = g.score(Team::Red);
    assert!(s.points >= 12, "{:?}", chats(&g, "Rook"));
    assert_eq!(s.submitted_types, ["melon_slice"]);
}

#[test]
fn do_nothing_is_scoreless() {
    let s = Arc::new(Scenario::builtin(ScenarioKind::MushroomWar));
    let mut red = BuiltinTeam::named("do_nothing", Arc::clone(&s)).unwrap();
    let mut blue = BuiltinTeam::named("do_nothing", Arc::clone(&s)).unwrap();
    let r = run_episode(s, &mut red, &mut blue, &EpisodeOptions::default()).unwrap();
    assert_eq!((r.red.score.points, r.blue.score.points), (0, 0));
    assert_eq!(r.winner, Winner::Draw);
    assert!(r.events.iter().all(|e| e.chat_text().is_none()));
}

#[test]
fn episodes_replay_identically() {
    let s = Arc::new(Scenario::builtin(ScenarioKind::MushroomWar));
    let run = || {
        let mut red = BuiltinTeam::named("aggressive", Arc::clone(&s)).unwrap();
        let mut blue = BuiltinTeam::named("slimy", Arc::clone(&s)).unwrap();
        let opts = EpisodeOptions { seed: 99, ..Default::default() };
        run_episode(Arc::clone(&s), &mut red, &mut blue, &opts).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn scripted_team_gets_program_end() {
    let s = Arc::new(Scenario::builtin(ScenarioKind::MushroomWar));
    let mut red = ScriptedTeam::new("s").with("Rook", r#"say("hi")"#);
    red.follow_ups.push(parse_source("wait(5)").unwrap());
    let mut blue = ScriptedTeam::new("idle");
    run_episode(s, &mut red, &mut blue, &EpisodeOptions::default()).unwrap();
    // Rook ends twice; Rhea's empty program ends once
    assert_eq!(red.ends_seen.len(), 3);
}
