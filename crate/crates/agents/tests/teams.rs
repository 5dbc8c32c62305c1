use std::sync::Arc;

use arena_agents::checkpoint::Checkpoint;
use arena_agents::llm::{LlmSession, MockClient};
use arena_agents::tactics::{OpponentTactics, FALLBACK_LINE};
use arena_agents::{CotTeam, PromptTemplates, TacticsTeam};
use arena_core::actionlang::{parse_source, pretty, Program};
use arena_core::game::{run_episode, EpisodeOptions, EpisodeResult, Game};
use arena_core::opponents::BuiltinTeam;
use arena_core::scenarios::{Scenario, ScenarioKind};
use arena_core::team::{PreGameInfo, TeamSystem};
use arena_core::world::Team;

fn tactics_team(mock: MockClient) -> TacticsTeam {
    TacticsTeam::new(LlmSession::new(Box::new(mock), "mock"), PromptTemplates::builtin())
}

fn play(kind: ScenarioKind, red: &mut dyn TeamSystem, opponent: &str, seed: u64, episode: u32) -> EpisodeResult {
    let s = Arc::new(Scenario::builtin(kind));
    let mut blue = BuiltinTeam::named(opponent, Arc::clone(&s)).unwrap();
    let opts = EpisodeOptions { seed, episode, ..Default::default() };
    run_episode(s, red, &mut blue, &opts).unwrap()
}

fn prompts<'a>(r: &'a EpisodeResult, purpose: &str) -> Vec<&'a str> {
    r.red.llm_calls.iter().filter(|c| c.purpose == purpose).map(|c| c.prompt.as_str()).collect()
}

#[test]
fn mock_team_plays_and_learns() {
    let mut team = tactics_team(MockClient::rules());
    let first = play(ScenarioKind::MushroomWar, &mut team, "slimy", 1, 0);
    assert!(first.red.score.points > 0, "mock programs should score");
    let purposes: Vec<&str> = first.red.llm_calls.iter().map(|c| c.purpose.as_str()).collect();
    assert_eq!(&purposes[..4], ["causal_init", "tactics_init", "action", "action"]);
    assert!(purposes.contains(&"opponent_update") && purposes.contains(&"tactics_update"));
    // infinite loops never end, so each agent ran exactly one program
    assert!(first.red.iterations.iter().all(|(_, i)| *i == 1));

    let graph = team.graph().clone();
    assert!(matches!(team.opponent(), OpponentTactics::Known(_)));
    assert!(team.tactics().unwrap().len() <= 6);

    // own chat never reaches the opponent model
    for p in prompts(&first, "opponent_update") {
        assert!(!p.contains("] Rook:") && !p.contains("] Rhea:"), "{p}");
        assert!(p.contains("] Bolt:") || p.contains("] Bree:"));
    }
    // the slime placed in our area shows up in the tactics update
    let update = prompts(&first, "tactics_update")[0];
    assert!(update.contains("Placed slime_block"), "{update}");

    let second = play(ScenarioKind::MushroomWar, &mut team, "slimy", 2, 1);
    assert!(prompts(&second, "causal_init").is_empty(), "initialisation runs once");
    for r in graph.iter() {
        assert_eq!(team.graph().get(&r.action), Some(r), "graph only grows");
    }
    assert_eq!(team.episodes_played(), 2);
}

#[test]
fn unknown_opponent_is_rendered_literally() {
    let mut team = tactics_team(MockClient::rules());
    let r = play(ScenarioKind::MushroomWar, &mut team, "do_nothing", 3, 0);
    assert!(prompts(&r, "opponent_update").is_empty(), "no opponent chat, no call");
    assert_eq!(team.opponent(), &OpponentTactics::Unknown);
    assert!(prompts(&r, "tactics_update")[0].contains("opponents are doing:\nunknown"));
}

#[test]
fn causal_init_covers_every_primitive() {
    let mut team = tactics_team(MockClient::rules());
    play(ScenarioKind::DashAndDine, &mut team, "do_nothing", 4, 0);
    let table = arena_core::actionlang::PrimitiveTable::dash_and_dine();
    assert!(table.available().all(|p| team.graph().covers(p.name)));
    assert!(team.graph().get(r#"smeltItem(bot, "potato", "coal", 1)"#).is_some());
}

#[test]
fn farming_mock_scores() {
    let mut team = tactics_team(MockClient::rules());
    let r = play(ScenarioKind::DashAndDine, &mut team, "berries", 5, 0);
    assert!(r.red.score.points > 0, "{:?}", r.red.score);
}

/// Responses for a first pre-game in which Rook's first program fails.
fn failing_first_program() -> Vec<String> {
    vec![
        "[]".into(),
        "<tactics>\n1. Rook sweeps.\n2. Rhea harvests.\n</tactics>".into(),
        "```\ngiveToPlayer(\"slime_block\", \"Nobody\", 1)\n```".into(),
        "```\nloop { wait(20) }\n```".into(),
        "Rook should sweep slime instead.".into(),
        "```\nloop { mineBlock(\"slime_block\", 6) }\n```".into(),
    ]
}

#[test]
fn regenerated_program_is_charged_latency() {
    let mock = MockClient::scripted(failing_first_program()).with_latency(2.0).with_tokens(100);
    let mut team = tactics_team(mock);
    let r = play(ScenarioKind::MushroomWar, &mut team, "do_nothing", 6, 0);
    assert_eq!(r.red.iterations, [("Rook".to_string(), 2), ("Rhea".to_string(), 1)]);
    assert_eq!(team.charged_ticks()["Rook"], 40);
    assert_eq!(team.charged_ticks()["Rhea"], 0);
    let critic = r.red.llm_calls.iter().find(|c| c.purpose == "critic").unwrap();
    assert_eq!(critic.agent.as_deref(), Some("Rook"));
    assert!(critic.prompt.contains("unknown player"), "{}", critic.prompt);
    assert!(r.red.llm_calls.iter().all(|c| (c.t_resp, c.n_out) == (2.0, 100)));
}

#[test]
fn untagged_tactics_fall_back_after_one_retry() {
    let s = Arc::new(Scenario::builtin(ScenarioKind::MushroomWar));
    // the strict script runs out before any program is written
    let mut team = tactics_team(MockClient::scripted(["[]", "no tags here", "still none"]).strict());
    let programs = pre_game(&mut team, &s);
    assert_eq!(team.tactics().unwrap().lines(), [FALLBACK_LINE]);
    assert!(programs.iter().all(|p| *p == Program::wait_loop()));
    let purposes: Vec<String> = team.take_llm_records().into_iter().map(|c| c.purpose).collect();
    assert_eq!(purposes, ["causal_init", "tactics_init", "tactics_init"]);
}

fn pre_game(team: &mut dyn TeamSystem, s: &Arc<Scenario>) -> Vec<Program> {
    let red = Team::Red;
    let game = Game::new(Arc::clone(s), 1).unwrap();
    let agents = s.players(red);
    let info = PreGameInfo {
        scenario: s.kind(),
        title: s.config.title.clone(),
        description: s.config.description.clone(),
        objective: s.config.objective.clone(),
        team: red,
        episode: 0,
        duration: s.duration(),
        agents: agents.clone(),
        server: s.server(red),
        opponents: s.players(red.opponent()),
        primitives: s.primitives.clone(),
        constants: s.constants(red),
        observations: agents.iter().map(|a| game.observe(game.agent_index(a).unwrap())).collect(),
    };
    team.pre_game(&info)
}

#[test]
fn checkpoints_restore_state() {
    let mut team = tactics_team(MockClient::rules());
    play(ScenarioKind::MushroomWar, &mut team, "balanced", 8, 0);
    let saved = team.checkpoint().unwrap();
    let cp = Checkpoint::from_json(&saved).unwrap();
    assert_eq!(cp.to_json(), saved);
    assert_eq!(cp.episode, 1);

    // two teams loaded from the same checkpoint play identically
    let run = |cp: &Checkpoint| {
        let mut t = TacticsTeam::from_checkpoint(
            LlmSession::new(Box::new(MockClient::rules()), "mock"),
            PromptTemplates::builtin(),
            cp.clone(),
        );
        let r = play(ScenarioKind::MushroomWar, &mut t, "aggressive", 9, 5);
        (r, t.checkpoint().unwrap())
    };
    let (a, after_a) = run(&cp);
    let (b, after_b) = run(&cp);
    assert_eq!(a, b);
    assert_eq!(after_a, after_b);
    assert!(prompts(&a, "causal_init").is_empty(), "restored graph is reused");

    let fresh = TacticsTeam::from_checkpoint(
        LlmSession::new(Box::new(MockClient::rules()), "mock"),
        PromptTemplates::builtin(),
        Checkpoint::fresh(),
    );
    assert!(fresh.tactics().is_none() && fresh.graph().is_empty());
    assert_eq!(fresh.checkpoint().unwrap(), Checkpoint::fresh().to_json());
}

fn cot_team(mock: MockClient) -> CotTeam {
    CotTeam::new(LlmSession::new(Box::new(mock), "mock"), PromptTemplates::builtin())
}

#[test]
fn cot_writes_one_program_per_agent() {
    let mut team = cot_team(MockClient::rules());
    let r = play(ScenarioKind::MushroomWar, &mut team, "passive", 10, 0);
    assert_eq!(r.red.llm_calls.len(), 1);
    assert!(r.red.score.points > 0);
}

#[test]
fn cot_sees_last_errors_and_idles_missing_agents() {
    let bad = "<program agent=\"Rook\">\ngiveToPlayer(\"slime_block\", \"Nobody\", 1)\n</program>";
    let mut team = cot_team(MockClient::scripted([bad]));
    let first = play(ScenarioKind::MushroomWar, &mut team, "passive", 11, 0);
    assert_eq!(first.red.runtime_errors, 1);
    // Rhea had no program, so she idled in a wait loop and never ended
    assert_eq!(first.red.iterations[1], ("Rhea".to_string(), 1));

    let second = play(ScenarioKind::MushroomWar, &mut team, "passive", 12, 1);
    let prompt = &second.red.llm_calls[0].prompt;
    assert!(prompt.contains("Rook: giveToPlayer: unknown player `Nobody`"), "{prompt}");
    assert!(prompt.contains(&pretty(&parse_source(r#"giveToPlayer("slime_block", "Nobody", 1)"#).unwrap())));
    assert!(prompt.contains(&pretty(&Program::wait_loop())));
}
