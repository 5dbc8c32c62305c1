use std::sync::Arc;

use arena_core::actionlang::{
    parse_source, pretty, tokenize, validate, Arg, Call, Cond, IssueKind, PrimitiveTable, Program,
    Stmt, TokenKind,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

const CORPUS: &str = include_str!("data/corpus.act");

fn corpus() -> Vec<&'static str> {
    CORPUS.split("\n=====\n").collect()
}

#[test]
fn golden_corpus_round_trips() {
    let programs = corpus();
    assert!(programs.len() >= 50, "{}", programs.len());
    for src in programs {
        let ast = parse_source(src).unwrap_or_else(|e| panic!("{e}\n{src}"));
        let printed = pretty(&ast);
        let again = parse_source(&printed).unwrap_or_else(|e| panic!("{e}\n{printed}"));
        assert_eq!(ast, again, "{src}\n--\n{printed}");
        assert_eq!(printed, pretty(&again), "printing is not a fixed point");
    }
}

#[test]
fn corpus_is_valid_under_dash_and_dine() {
    let table = PrimitiveTable::dash_and_dine();
    for src in corpus() {
        let issues = validate(&parse_source(src).unwrap(), &table);
        assert!(issues.is_empty(), "{src}: {issues:?}");
    }
}

/// (source, line, column) of the first error.
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
    ("if has(1) {}", 1, 8),
    ("loop {\n  farm(\"harvest\", \"wheat\",)\n}", 2, 27),
];

#[test]
fn malformed_inputs_point_at_the_error() {
    assert!(MALFORMED.len() >= 10);
    for &(src, line, column) in MALFORMED {
        let err = parse_source(src).expect_err(src);
        assert_eq!((err.line, err.column), (line, column), "{src:?}: {err}");
        assert!(!err.message.is_empty());
    }
}

#[test]
fn tokenizer_examples() {
    let kinds = |s: &str| tokenize(s).into_iter().map(|t| t.kind).collect::<Vec<_>>();
    let call = kinds(r#"mineBlock("slime_block", 1)"#);
    assert_eq!(call.len(), 6);
    assert!(matches!(call[0], TokenKind::Ident(_)));
    assert!(matches!(call[2], TokenKind::Str(_)));
    assert!(matches!(call[4], TokenKind::Int(1)));
    assert!(kinds("").is_empty());
    assert_eq!(kinds("repeat 3 { wait(20) }").len(), 8);
}

#[test]
fn validate_examples() {
    let mw = PrimitiveTable::mushroom_war();
    let issues = validate(&parse_source(r#"craftItem("bread", 1)"#).unwrap(), &mw);
    assert_eq!(issues.len(), 1);
    assert_eq!(issues[0].kind, IssueKind::Unavailable);
    let dd = PrimitiveTable::dash_and_dine();
    let check = |s: &str| validate(&parse_source(s).unwrap(), &dd);
    assert!(check(r#"killMob(bot, "cow", 300)"#).is_empty());
    assert!(check(r#"killMob("cow", 300)"#).is_empty());
    let arity = check(r#"killMob("cow", 300, 1)"#);
    assert_eq!(arity.len(), 1);
    assert!(matches!(arity[0].kind, IssueKind::Arity { found: 3, .. }), "{arity:?}");
    assert!(matches!(check("launchRocket()")[0].kind, IssueKind::UnknownPrimitive));
}

const ALPHABET: &[&str] = &[
    "loop", "repeat", "if", "else", "has", "ok", "wait", "say", "bot", "null", "mineBlock",
    "farm", "{", "}", "(", ")", ",", ";", "\"", "'", "\\", "//", "\n", " ", "3", "-", "20",
    "x", "é", "@", "\"slime_block\"", "0", "99999999999999999999999",
];

fn check_error_position(src: &str) {
    if let Err(e) = parse_source(src) {
        let lines = src.split('\n').count() as u32;
        assert!(e.line >= 1 && e.line <= lines, "{src:?}: {e}");
        let len = src.split('\n').nth(e.line as usize - 1).unwrap().chars().count() as u32;
        assert!(e.column >= 1 && e.column <= len + 1, "{src:?}: {e}");
    }
}

#[test]
fn fuzzed_strings_never_crash() {
    let mut rng = SplitMix64::seed_from_u64(0xf022);
    for i in 0..100_000 {
        let src: String = if i % 2 == 0 {
            (0..rng.gen_range(0..24)).map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())]).collect()
        } else {
            let bytes: Vec<u8> = (0..rng.gen_range(0..40)).map(|_| rng.gen()).collect();
            String::from_utf8_lossy(&bytes).into_owned()
        };
        check_error_position(&src);
    }
}

fn ident() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["mineBlock", "farm", "craftItem", "moveTo", "placeItem", "milkCow"])
        .prop_map(str::to_string)
}

fn arg() -> impl Strategy<Value = Arg> {
    prop_oneof![
        "[ -~é]{0,12}".prop_map(Arg::Str),
        (-100_000i64..100_000).prop_map(Arg::Int),
        Just(Arg::Null),
    ]
}

fn leaf() -> impl Strategy<Value = Stmt> {
    prop_oneof![
        (ident(), any::<bool>(), prop::collection::vec(arg(), 0..4))
            .prop_map(|(name, bot, args)| Stmt::Call(Call { name, bot, args })),
        (0u64..5000).prop_map(Stmt::Wait),
        "[ -~]{0,16}".prop_map(Stmt::Say),
    ]
}

fn cond() -> impl Strategy<Value = Cond> {
    prop_oneof![
        ("[a-z_]{1,12}", 0i64..64).prop_map(|(item, count)| Cond::Has { item, count }),
        Just(Cond::Ok),
    ]
}

fn stmt() -> impl Strategy<Value = Stmt> {
    leaf().prop_recursive(4, 32, 4, |inner| {
        let body = prop::collection::vec(inner, 0..4).prop_map(Arc::<[Stmt]>::from);
        prop_oneof![
            (0u32..100, body.clone()).prop_map(|(count, body)| Stmt::Repeat { count, body }),
            body.clone().prop_map(|body| Stmt::Loop { body }),
            (cond(), body.clone(), prop::option::of(body))
                .prop_map(|(cond, then_body, else_body)| Stmt::If { cond, then_body, else_body }),
        ]
    })
}

proptest! {
    #[test]
    fn generated_programs_round_trip(body in prop::collection::vec(stmt(), 0..6)) {
        let program = Program::new(body);
        let printed = pretty(&program);
        let parsed = parse_source(&printed).map_err(|e| TestCaseError::fail(format!("{e}\n{printed}")))?;
        prop_assert_eq!(parsed, program);
    }

    #[test]
    fn arbitrary_text_is_total(src in "\\PC{0,64}") {
        check_error_position(&src);
    }
}
