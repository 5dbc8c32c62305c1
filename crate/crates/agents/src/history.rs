//! Event-log processing: choosing, deduplicating, filtering and rendering
//! logs for prompts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use arena_core::world::{Event, Observation, TICKS_PER_SECOND};

/// Longest tandem repeat, in chat messages, that [`dedup_events`] looks for.
pub const DEDUP_WINDOW: usize = 64;

/// The log with the most events; ties go to the earliest. `None` when empty.
pub fn select_longest_log<T>(logs: &[(T, Vec<Event>)]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, (_, log)) in logs.iter().enumerate() {
        if best.is_none_or(|b| log.len() > logs[b].1.len()) {
            best = Some(i);
        }
    }
    best
}

/// Collapses back-to-back repeats of chat-message runs, keeping the first copy.
///
/// Messages compare by sender and text (not tick). Periods from
/// [`DEDUP_WINDOW`] down to 1 are tried in turn and the whole pass repeats
/// until nothing changes. An observe event belongs to the closest earlier
/// chat from the same sender and is dropped with it; observes with no such
/// chat are always kept.
pub fn dedup_events(log: &[Event]) -> Vec<Event> {
    let chats: Vec<usize> = (0..log.len()).filter(|&i| log[i].chat_text().is_some()).collect();
    let key = |i: usize| (log[i].sender.as_str(), log[i].chat_text().unwrap_or(""));
    let keys: Vec<_> = chats.iter().map(|&i| key(i)).collect();
    let kept_positions = collapse_repeats(&keys);

    let mut keep = vec![false; log.len()];
    for p in kept_positions {
        keep[chats[p]] = true;
    }
    let mut anchor: BTreeMap<&str, usize> = BTreeMap::new();
    for i in 0..log.len() {
        match log[i].chat_text() {
            Some(_) => {
                anchor.insert(log[i].sender.as_str(), i);
            }
            None => keep[i] = anchor.get(log[i].sender.as_str()).is_none_or(|&a| keep[a]),
        }
    }
    log.iter().zip(keep).filter(|(_, k)| *k).map(|(e, _)| e.clone()).collect()
}

/// Indices of `seq` that survive tandem-repeat removal.
fn collapse_repeats<K: PartialEq>(seq: &[K]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..seq.len()).collect();
    loop {
        let mut changed = false;
        let max_p = DEDUP_WINDOW.min(idx.len() / 2);
        for p in (1..=max_p).rev() {
            let mut i = 0;
            while i + 2 * p <= idx.len() {
                let same = (0..p).all(|k| seq[idx[i + k]] == seq[idx[i + p + k]]);
                if same {
                    idx.drain(i + p..i + 2 * p);
                    changed = true;
                } else {
                    i += 1;
                }
            }
        }
        if !changed {
            return idx;
        }
    }
}

/// Chat events sent by any of `senders`.
pub fn chats_from<'a>(log: &'a [Event], senders: &[String]) -> Vec<&'a Event> {
    log.iter()
        .filter(|e| e.chat_text().is_some() && senders.iter().any(|s| *s == e.sender))
        .collect()
}

pub fn chat_line(e: &Event) -> Option<String> {
    let text = e.chat_text()?;
    let secs = e.tick as f64 / TICKS_PER_SECOND as f64;
    Some(format!("[{secs:.1}s] {}: {text}", e.sender))
}

/// The last `max` chat lines of `events`, one per line.
pub fn render_chat<'a, I>(events: I, max: usize) -> String
where
    I: IntoIterator<Item = &'a Event>,
{
    let lines: Vec<String> = events.into_iter().filter_map(chat_line).collect();
    let skip = lines.len().saturating_sub(max);
    if lines.is_empty() {
        return "(no messages)".into();
    }
    let mut out = String::new();
    if skip > 0 {
        let _ = writeln!(out, "({skip} earlier messages omitted)");
    }
    out.push_str(&lines[skip..].join("\n"));
    out
}

pub fn render_inventory(obs: &Observation) -> String {
    if obs.inventory.is_empty() {
        return "empty".into();
    }
    obs.inventory.iter().map(|(k, n)| format!("{k} {n}")).collect::<Vec<_>>().join(", ")
}

/// Nearby blocks grouped by kind, with the count and closest cell of each.
pub fn render_blocks(obs: &Observation) -> String {
    let here = obs.self_status.position;
    let mut groups: BTreeMap<&str, (usize, arena_core::world::Position)> = BTreeMap::new();
    for b in &obs.nearby_blocks {
        let g = groups.entry(b.kind.as_str()).or_insert((0, b.position));
        g.0 += 1;
        if b.position.chebyshev(here) < g.1.chebyshev(here) {
            g.1 = b.position;
        }
    }
    if groups.is_empty() {
        return "none".into();
    }
    groups
        .iter()
        .map(|(k, (n, p))| format!("{k} x{n} (nearest {p})"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn render_mobs(obs: &Observation) -> String {
    if obs.nearby_mobs.is_empty() {
        return "none".into();
    }
    obs.nearby_mobs
        .iter()
        .map(|m| format!("{} at {:.1}", m.kind, m.distance))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Everything the critic and the action prompt get about one agent's state.
pub fn render_observation(obs: &Observation) -> String {
    let s = &obs.self_status;
    format!(
        "biome: {}; time: {}; health: {}; hunger: {}; position: {}\n\
         nearby blocks: {}\nnearby entities: {}\ninventory: {}",
        s.biome,
        s.time,
        s.health,
        s.hunger,
        s.position,
        render_blocks(obs),
        render_mobs(obs),
        render_inventory(obs),
    )
}

fn last_observation(log: &[Event]) -> Option<&Observation> {
    log.iter().rev().find_map(Event::observation)
}

/// One agent's view: its deduplicated chat log plus its current state.
pub fn agent_view(log: &[Event], now: &Observation, max_lines: usize) -> String {
    let deduped = dedup_events(log);
    format!("Chat log:\n{}\n\nCurrent state:\n{}", render_chat(&deduped, max_lines), render_observation(now))
}

/// Team view for the tactics update: the longest log's chat plus each
/// member's final nearby blocks and inventory.
pub fn team_view(logs: &[(String, Vec<Event>)], max_lines: usize) -> String {
    let mut out = String::from("Chat log:\n");
    match select_longest_log(logs) {
        Some(i) => out.push_str(&render_chat(&dedup_events(&logs[i].1), max_lines)),
        None => out.push_str("(no messages)"),
    }
    for (name, log) in logs {
        let _ = write!(out, "\n\n{name} at the end:");
        match last_observation(log) {
            Some(obs) => {
                let _ = write!(
                    out,
                    "\nnearby blocks: {}\ninventory: {}",
                    render_blocks(obs),
                    render_inventory(obs)
                );
            }
            None => out.push_str(" no observation"),
        }
    }
    out
}

/// (message, inventory right after) pairs for each member's own messages.
pub fn message_inventory_pairs(logs: &[(String, Vec<Event>)], max_per_member: usize) -> String {
    let mut out = String::new();
    for (name, log) in logs {
        let log = dedup_events(log);
        let mut pairs = Vec::new();
        for (i, e) in log.iter().enumerate() {
            if e.sender != *name {
                continue;
            }
            let Some(text) = e.chat_text() else { continue };
            let inv = log[i + 1..]
                .iter()
                .take_while(|n| n.chat_text().is_none() || n.sender != *name)
                .find(|n| n.sender == *name)
                .and_then(Event::observation)
                .map_or_else(|| "unknown".to_string(), render_inventory);
            pairs.push(format!("- ({text}; inventory: {inv})"));
        }
        let skip = pairs.len().saturating_sub(max_per_member);
        let _ = writeln!(out, "{name}:");
        if pairs.is_empty() {
            out.push_str("- (no messages)\n");
        }
        for p in &pairs[skip..] {
            out.push_str(p);
            out.push('\n');
        }
    }
    out.trim_end().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use arena_core::world::{Event, Observation, SelfStatus};

    fn obs() -> Observation {
        Observation {
            nearby_blocks: vec![],
            nearby_mobs: vec![],
            chest_contents: vec![],
            inventory: [("slime_block", 3)].into_iter().collect(),
            self_status: SelfStatus::default(),
        }
    }

    fn chats(texts: &[&str]) -> Vec<Event> {
        texts.iter().enumerate().map(|(i, t)| Event::chat(i as u64 * 20, "Rook", *t)).collect()
    }

    fn texts(log: &[Event]) -> Vec<&str> {
        log.iter().filter_map(Event::chat_text).collect()
    }

    #[test]
    fn tandem_repeats_collapse() {
        assert_eq!(texts(&dedup_events(&chats(&["a", "b", "a", "b", "a", "b"]))), ["a", "b"]);
        assert_eq!(texts(&dedup_events(&chats(&["a", "b", "c"]))), ["a", "b", "c"]);
        assert_eq!(texts(&dedup_events(&chats(&["a", "a", "b", "a", "a", "b"]))), ["a", "b"]);
    }

    #[test]
    fn sender_is_part_of_the_key() {
        let log = vec![Event::chat(0, "Rook", "x"), Event::chat(1, "Rhea", "x")];
        assert_eq!(dedup_events(&log).len(), 2);
    }

    #[test]
    fn observes_follow_their_chat() {
        let log = vec![
            Event::chat(0, "Rook", "a"),
            Event::observe(0, "Rook", obs()),
            Event::chat(1, "Rook", "a"),
            Event::observe(1, "Rook", obs()),
        ];
        let d = dedup_events(&log);
        assert_eq!(d, log[..2].to_vec());
        // an observe before any chat has no anchor and stays
        let lone = vec![Event::observe(0, "Rook", obs())];
        assert_eq!(dedup_events(&lone), lone);
    }

    #[test]
    fn longest_log() {
        let mk = |n: usize| chats(&vec!["x"; n]);
        assert_eq!(select_longest_log(&[("a", mk(10)), ("b", mk(14))]), Some(1));
        assert_eq!(select_longest_log(&[("a", mk(12)), ("b", mk(12))]), Some(0));
        assert_eq!(select_longest_log(&[("a", mk(3))]), Some(0));
        assert_eq!(select_longest_log::<&str>(&[]), None);
    }

    #[test]
    fn pairs_attach_inventory() {
        let log = vec![Event::chat(0, "Rook", "Mined 3 slime_block"), Event::observe(0, "Rook", obs())];
        let text = message_inventory_pairs(&[("Rook".into(), log)], 10);
        assert_eq!(text, "Rook:\n- (Mined 3 slime_block; inventory: slime_block 3)");
    }

    #[test]
    fn failure_feedback_is_kept_verbatim() {
        let line = "I cannot make bread because I need: 2 more wheat";
        let log = vec![Event::chat(0, "Rhea", line), Event::observe(0, "Rhea", obs())];
        let text = message_inventory_pairs(&[("Rhea".into(), log)], 10);
        assert!(text.contains(line));
    }

    #[test]
    fn chat_rendering_caps_lines() {
        let log = chats(&["a", "b", "c"]);
        assert_eq!(render_chat(&log, 2), "(1 earlier messages omitted)\n[1.0s] Rook: b\n[2.0s] Rook: c");
    }
}
