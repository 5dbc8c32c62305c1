//! Pulling ActScript programs out of model responses.

use std::sync::OnceLock;

use arena_core::actionlang::{parse_source, validate, PrimitiveTable, Program};
use regex::Regex;

/// Body of the first fenced code block, or the whole response.
pub fn extract_code(response: &str) -> &str {
    let Some(open) = response.find("```") else {
        return response.trim();
    };
    let after = &response[open + 3..];
    // skip the language tag on the fence line
    let body_start = after.find('\n').map_or(after.len(), |n| n + 1);
    let body = &after[body_start..];
    let end = body.find("```").unwrap_or(body.len());
    body[..end].trim()
}

/// Parses and validates a program, returning a message fit for the model on failure.
pub fn compile(source: &str, table: &PrimitiveTable) -> Result<Program, String> {
    let program = parse_source(source).map_err(|e| format!("syntax error: {e}"))?;
    match validate(&program, table).first() {
        Some(issue) => Err(format!("invalid call: {issue}")),
        None => Ok(program),
    }
}

fn agent_block_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"(?s)<program\s+agent\s*=\s*"([^"]+)"\s*>(.*?)</program>"#).expect("valid regex"))
}

/// `<program agent="NAME">…</program>` blocks, first occurrence per agent wins.
pub fn agent_programs(response: &str) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    for c in agent_block_regex().captures_iter(response) {
        let name = c[1].trim().to_string();
        if !out.iter().any(|(n, _)| *n == name) {
            out.push((name, extract_code(&c[2]).to_string()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fenced_and_bare() {
        assert_eq!(extract_code("Here:\n```actscript\nwait(1)\n```\nDone"), "wait(1)");
        assert_eq!(extract_code("```\nwait(2)\n```"), "wait(2)");
        assert_eq!(extract_code("  wait(3) "), "wait(3)");
    }

    #[test]
    fn compile_reports_problems() {
        let t = PrimitiveTable::mushroom_war();
        assert!(compile("mineBlock(\"slime_block\", 1)", &t).is_ok());
        assert!(compile("mineBlock(", &t).unwrap_err().starts_with("syntax error"));
        assert!(compile("farm(\"harvest\", \"melon\")", &t).unwrap_err().starts_with("invalid call"));
    }

    #[test]
    fn agent_blocks() {
        let text = "plan\n<program agent=\"Rook\">\nwait(1)\n</program>\n<program agent=\"Rhea\">```\nwait(2)\n```</program>\n<program agent=\"Rook\">x</program>";
        assert_eq!(
            agent_programs(text),
            vec![("Rook".into(), "wait(1)".into()), ("Rhea".into(), "wait(2)".into())]
        );
    }
}
