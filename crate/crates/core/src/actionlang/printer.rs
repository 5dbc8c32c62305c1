use std::fmt::Write;

use super::ast::{Arg, Call, Cond, Program, Stmt};

pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn arg(a: &Arg) -> String {
    match a {
        Arg::Str(s) => quote(s),
        Arg::Int(v) => v.to_string(),
        Arg::Null => "null".to_string(),
    }
}

/// Renders one call, e.g. `giveToPlayer("bread", "Red_Server", -1)`.
pub fn print_call(call: &Call) -> String {
    let mut parts: Vec<String> = Vec::with_capacity(call.args.len() + 1);
    if call.bot {
        parts.push("bot".to_string());
    }
    parts.extend(call.args.iter().map(arg));
    format!("{}({})", call.name, parts.join(", "))
}

fn cond(c: &Cond) -> String {
    match c {
        Cond::Has { item, count } => format!("has({}, {count})", quote(item)),
        Cond::Ok => "ok()".to_string(),
    }
}

fn block(out: &mut String, body: &[Stmt], indent: usize) {
    for stmt in body {
        stmt_into(out, stmt, indent);
    }
}

fn stmt_into(out: &mut String, stmt: &Stmt, indent: usize) {
    let pad = "    ".repeat(indent);
    match stmt {
        Stmt::Call(c) => {
            let _ = writeln!(out, "{pad}{}", print_call(c));
        }
        Stmt::Wait(t) => {
            let _ = writeln!(out, "{pad}wait({t})");
        }
        Stmt::Say(text) => {
            let _ = writeln!(out, "{pad}say({})", quote(text));
        }
        Stmt::Repeat { count, body } => {
            let _ = writeln!(out, "{pad}repeat {count} {{");
            block(out, body, indent + 1);
            let _ = writeln!(out, "{pad}}}");
        }
        Stmt::Loop { body } => {
            let _ = writeln!(out, "{pad}loop {{");
            block(out, body, indent + 1);
            let _ = writeln!(out, "{pad}}}");
        }
        Stmt::If { cond: c, then_body, else_body } => {
            let _ = writeln!(out, "{pad}if {} {{", cond(c));
            block(out, then_body, indent + 1);
            match else_body {
                Some(e) => {
                    let _ = writeln!(out, "{pad}}} else {{");
                    block(out, e, indent + 1);
                    let _ = writeln!(out, "{pad}}}");
                }
                None => {
                    let _ = writeln!(out, "{pad}}}");
                }
            }
        }
    }
}

/// Canonical source text for a program.
pub fn pretty(program: &Program) -> String {
    let mut out = String::new();
    block(&mut out, &program.body, 0);
    out
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_source;
    use super::*;

    #[test]
    fn prints_nested_program() {
        let src = "loop { if has(\"wheat\", 3) { craftItem(\"bread\", 1) } else { say(\"need \\\"wheat\\\"\") } }";
        let p = parse_source(src).unwrap();
        let text = pretty(&p);
        assert_eq!(
            text,
            "loop {\n    if has(\"wheat\", 3) {\n        craftItem(\"bread\", 1)\n    } else {\n        say(\"need \\\"wheat\\\"\")\n    }\n}\n"
        );
        assert_eq!(parse_source(&text).unwrap(), p);
    }

    #[test]
    fn call_with_bot() {
        let p = parse_source("giveToPlayer(bot, 'baked_potato', 'Red_Server', -1)").unwrap();
        assert_eq!(pretty(&p).trim(), "giveToPlayer(bot, \"baked_potato\", \"Red_Server\", -1)");
    }
}
