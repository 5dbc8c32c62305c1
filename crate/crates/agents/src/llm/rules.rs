//! Deterministic rule responder behind [`MockClient`](super::MockClient).
//!
//! Answers are keyed by request purpose and the `scenario` hint. Agent
//! names and layout constants come from the request hints, so the programs
//! it writes run in the real simulator.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::OnceLock;

use arena_core::opponents::render;
use regex::Regex;

use super::{ChatRequest, Purpose};

/// Hint keys read by the responder.
pub mod hint {
    pub const SCENARIO: &str = "scenario";
    /// Comma-separated own agent names, in layout order.
    pub const AGENTS: &str = "agents";
    pub const SERVER: &str = "server";
    /// Opponent chat lines, newline-separated.
    pub const OPPONENT_CHAT: &str = "opponent_chat";
    /// Own-team chat lines, newline-separated.
    pub const TEAM_CHAT: &str = "team_chat";
    /// Status of the program the critic is judging.
    pub const STATUS: &str = "status";
    /// Prefix for layout constants, e.g. `const.own.slime`.
    pub const CONST_PREFIX: &str = "const.";
}

const MW_REMOVER: &str = r#"loop {
    moveTo({{own.slime}})
    mineBlock("slime_block", 6)
}"#;

const MW_HARVESTER: &str = r#"loop {
    mineBlock("red_mushroom_block", 1)
    if ok() {} else { mineBlock("slime_block", 2) }
}"#;

const DD_MELON: &str = r#"loop {
    farm("harvest", "melon")
    if has("melon_slice", 1) {
        giveToPlayer("melon_slice", "{{server}}", -1)
    } else {
        wait(20)
    }
}"#;

const DD_POTATO: &str = r#"loop {
    if has("potato", 3) {} else { farm("harvest", "potatoes") }
    smeltItem("potato", "coal", 3)
    if has("baked_potato", 1) {
        giveToPlayer("baked_potato", "{{server}}", -1)
    } else {
        wait(20)
    }
}"#;

const MW_RELATIONS: &[(&str, &[&str], &[&str])] = &[
    (r#"mineBlock(bot, "slime_block", 1)"#, &[], &["slime_block"]),
    (r#"mineBlock(bot, "red_mushroom_block", 1)"#, &[], &["red_mushroom"]),
    (r#"placeItem(bot, "slime_block", 0, 0, 0)"#, &["slime_block"], &[]),
    (r#"moveTo(bot, 0, 0, 0)"#, &[], &[]),
];

const DD_RELATIONS: &[(&str, &[&str], &[&str])] = &[
    (r#"farm(bot, "harvest", "melon")"#, &[], &["melon_slice"]),
    (r#"farm(bot, "harvest", "potatoes")"#, &[], &["potato"]),
    (r#"farm(bot, "harvest", "wheat")"#, &[], &["wheat", "wheat_seeds"]),
    (r#"craftItem(bot, "bread", 1)"#, &["wheat"], &["bread"]),
    (r#"smeltItem(bot, "potato", "coal", 1)"#, &["potato", "coal"], &["baked_potato"]),
    (r#"giveToPlayer(bot, "melon_slice", "Red_Server", 1)"#, &["melon_slice"], &[]),
];

fn csv(req: &ChatRequest, key: &str) -> Vec<String> {
    req.hint(key)
        .map(|s| s.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect())
        .unwrap_or_default()
}

fn lines(req: &ChatRequest, key: &str) -> Vec<String> {
    req.hint(key)
        .map(|s| s.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
        .unwrap_or_default()
}

fn is_farming(req: &ChatRequest) -> bool {
    req.hint(hint::SCENARIO) == Some("dash_and_dine")
}

pub fn respond(req: &ChatRequest) -> String {
    match req.purpose {
        Purpose::TacticsInit | Purpose::TacticsUpdate => tactics(req),
        Purpose::CausalInit => relations_json(if is_farming(req) { DD_RELATIONS } else { MW_RELATIONS }),
        Purpose::CausalUpdate => learned_relations(req),
        Purpose::OpponentUpdate => opponent(req),
        Purpose::Action => format!("```actscript\n{}\n```", program(req, req.agent.as_deref())),
        Purpose::Critic => critique(req),
        Purpose::Cot => cot(req),
    }
}

fn names(req: &ChatRequest) -> (String, String) {
    let agents = csv(req, hint::AGENTS);
    let first = agents.first().cloned().unwrap_or_else(|| "the first player".into());
    let second = agents.get(1).cloned().unwrap_or_else(|| first.clone());
    (first, second)
}

fn tactics(req: &ChatRequest) -> String {
    let (a, b) = names(req);
    let server = req.hint(hint::SERVER).unwrap_or("our server");
    let mut out = String::from("Step by step: we score by collecting food in our own area.\n<tactics>\n");
    if is_farming(req) {
        let _ = writeln!(out, "1. {a} harvests melons and hands every slice to {server}.");
        let _ = writeln!(out, "2. {b} harvests potatoes, bakes them with coal and hands them to {server}.");
        let _ = writeln!(out, "3. Neither player spends time in the opponent area.");
    } else {
        let _ = writeln!(out, "1. {a} keeps the slime in our area at seven blocks or fewer.");
        let _ = writeln!(out, "2. {b} harvests red mushrooms and clears slime when none are ready.");
        if req.purpose == Purpose::TacticsUpdate && req.prompt().contains("places slime") {
            let _ = writeln!(out, "3. {a} sweeps again right after the opponents place slime.");
        }
    }
    out.push_str("</tactics>");
    out
}

fn relations_json(table: &[(&str, &[&str], &[&str])]) -> String {
    let items: Vec<serde_json::Value> = table
        .iter()
        .map(|(action, causes, effects)| {
            serde_json::json!({ "action": action, "causes": causes, "effects": effects })
        })
        .collect();
    serde_json::to_string_pretty(&items).expect("static json")
}

fn chat_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"(Mined|Crafted|Harvested|Placed|Finished smelting) (\d+ )?([a-z_]+)(?: into ([a-z_]+))?",
        )
        .expect("valid regex")
    })
}

/// Turns own success messages into relations, one per distinct action.
fn learned_relations(req: &ChatRequest) -> String {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for line in lines(req, hint::TEAM_CHAT) {
        let Some(c) = chat_regex().captures(&line) else { continue };
        let item = c[3].to_string();
        let (action, causes, effects) = match &c[1] {
            "Mined" => (format!(r#"mineBlock(bot, "{item}", 1)"#), vec![], vec![item.clone()]),
            "Crafted" => (format!(r#"craftItem(bot, "{item}", 1)"#), vec![], vec![item.clone()]),
            "Harvested" => (format!(r#"farm(bot, "harvest", "{item}")"#), vec![], vec![item.clone()]),
            "Placed" => (format!(r#"placeItem(bot, "{item}", 0, 0, 0)"#), vec![item.clone()], vec![]),
            _ => {
                let output = c.get(4).map_or(item.clone(), |m| m.as_str().to_string());
                (format!(r#"smeltItem(bot, "{item}", "coal", 1)"#), vec![item.clone(), "coal".into()], vec![output])
            }
        };
        if seen.insert(action.clone()) {
            out.push(serde_json::json!({ "action": action, "causes": causes, "effects": effects }));
        }
    }
    serde_json::to_string_pretty(&out).expect("json")
}

fn opponent(req: &ChatRequest) -> String {
    // sender -> verb/item phrases in first-seen order
    let mut by_sender: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for line in lines(req, hint::OPPONENT_CHAT) {
        let Some((sender, text)) = line.split_once(": ") else { continue };
        let sender = sender.rsplit("] ").next().unwrap_or(sender).to_string();
        let Some(c) = chat_regex().captures(text) else { continue };
        let phrase = match &c[1] {
            "Mined" if &c[3] == "red_mushroom_block" => "harvests red mushrooms".to_string(),
            "Mined" => format!("mines {}", &c[3]),
            "Placed" => format!("places {}", &c[3]),
            "Harvested" => format!("harvests {}", &c[3]),
            "Crafted" => format!("crafts {}", &c[3]),
            _ => format!("smelts {}", &c[3]),
        };
        let list = by_sender.entry(sender).or_default();
        if !list.contains(&phrase) {
            list.push(phrase);
        }
    }
    if by_sender.is_empty() {
        return "<tactics>\nunknown\n</tactics>".into();
    }
    let mut out = String::from("<tactics>\n");
    let mut n = 0;
    for (sender, phrases) in &by_sender {
        for p in phrases.iter().take(3) {
            if n < 6 {
                n += 1;
                let _ = writeln!(out, "{n}. {sender} {p}.");
            }
        }
    }
    out.push_str("</tactics>");
    out
}

fn program(req: &ChatRequest, agent: Option<&str>) -> String {
    let agents = csv(req, hint::AGENTS);
    let index = agent.and_then(|a| agents.iter().position(|x| x == a)).unwrap_or(0);
    let template = match (is_farming(req), index % 2) {
        (false, 0) => MW_REMOVER,
        (false, _) => MW_HARVESTER,
        (true, 0) => DD_MELON,
        (true, _) => DD_POTATO,
    };
    let vars: BTreeMap<String, String> = req
        .hints
        .iter()
        .filter_map(|(k, v)| k.strip_prefix(hint::CONST_PREFIX).map(|k| (k.to_string(), v.clone())))
        .collect();
    // Without layout constants, fall back to a program that needs none.
    render(template, &vars).unwrap_or_else(|_| "loop { wait(20) }".into())
}

fn critique(req: &ChatRequest) -> String {
    let status = req.hint(hint::STATUS).unwrap_or("finished");
    let agent = req.agent.as_deref().unwrap_or("The player");
    format!("{agent}'s program {status}. The program follows the tactics; keep the same plan and loop forever.")
}

fn cot(req: &ChatRequest) -> String {
    let agents = csv(req, hint::AGENTS);
    let mut out = String::from("Each player repeats one productive routine for the whole game.\n");
    for a in &agents {
        let _ = write!(out, "<program agent=\"{a}\">\n{}\n</program>\n", program(req, Some(a)));
    }
    out
}
