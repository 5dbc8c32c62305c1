//! Control-primitive signatures and per-scenario availability.

use std::collections::BTreeSet;
use std::fmt;

use super::ast::{Arg, Call, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgKind {
    Str,
    Int,
    /// A string or `null`.
    StrOrNull,
}

impl ArgKind {
    fn accepts(self, arg: &Arg) -> bool {
        matches!(
            (self, arg),
            (ArgKind::Str, Arg::Str(_))
                | (ArgKind::Int, Arg::Int(_))
                | (ArgKind::StrOrNull, Arg::Str(_) | Arg::Null)
        )
    }

    fn name(self) -> &'static str {
        match self {
            ArgKind::Str => "string",
            ArgKind::Int => "integer",
            ArgKind::StrOrNull => "string or null",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimitiveSpec {
    pub name: &'static str,
    pub args: &'static [ArgKind],
    /// Trailing arguments past this count are optional.
    pub required: usize,
    pub summary: &'static str,
    /// Documented call shape, used in prompts.
    pub usage: &'static str,
}

use ArgKind::{Int, Str, StrOrNull};

/// Every control primitive the interpreter knows about.
pub const PRIMITIVES: &[PrimitiveSpec] = &[
    PrimitiveSpec {
        name: "mineBlock",
        args: &[Str, Int],
        required: 1,
        summary: "Break the nearest matching blocks and pick up the resulting items.",
        usage: "mineBlock(block, maxCount)",
    },
    PrimitiveSpec {
        name: "craftItem",
        args: &[Str, Int],
        required: 1,
        summary: "Craft new items from raw materials.",
        usage: "craftItem(item, count)",
    },
    PrimitiveSpec {
        name: "placeItem",
        args: &[Str, Int, Int, Int],
        required: 4,
        summary: "Place a block from the inventory at a position.",
        usage: "placeItem(item, x, y, z)",
    },
    PrimitiveSpec {
        name: "sendSignal",
        args: &[Str],
        required: 1,
        summary: "Send a signal to a teammate.",
        usage: "sendSignal(teammate)",
    },
    PrimitiveSpec {
        name: "waitSignal",
        args: &[StrOrNull, Int],
        required: 1,
        summary: "Wait for a signal from a teammate (or anyone with null) until the timeout.",
        usage: "waitSignal(teammate | null, timeoutTicks)",
    },
    PrimitiveSpec {
        name: "farm",
        args: &[Str, Str],
        required: 2,
        summary: "Plant, harvest, or destroy the nearest patch of a crop.",
        usage: "farm(\"plant\" | \"harvest\" | \"destroy\", crop)",
    },
    PrimitiveSpec {
        name: "smeltItem",
        args: &[Str, Str, Int],
        required: 2,
        summary: "Queue items in the nearest free furnace; 10 s per item.",
        usage: "smeltItem(item, fuel, count)",
    },
    PrimitiveSpec {
        name: "killMob",
        args: &[Str, Int],
        required: 1,
        summary: "Slay the nearest mob of a kind, waiting up to the timeout for one.",
        usage: "killMob(mob, timeoutTicks)",
    },
    PrimitiveSpec {
        name: "giveToPlayer",
        args: &[Str, Str, Int],
        required: 2,
        summary: "Walk to a player and hand over items (-1 = all).",
        usage: "giveToPlayer(item, player, count)",
    },
    PrimitiveSpec {
        name: "useChest",
        args: &[Str, Int, Int, Int, Str, Int],
        required: 4,
        summary: "Get, deposit, or check items in the chest at a position.",
        usage: "useChest(\"get\" | \"deposit\" | \"check\", x, y, z, item, count)",
    },
    PrimitiveSpec {
        name: "moveTo",
        args: &[Int, Int, Int],
        required: 3,
        summary: "Walk to a position.",
        usage: "moveTo(x, y, z)",
    },
    PrimitiveSpec {
        name: "milkCow",
        args: &[],
        required: 0,
        summary: "Fill a bucket from the nearest cow.",
        usage: "milkCow()",
    },
    PrimitiveSpec {
        name: "convertFarm",
        args: &[Str, Str],
        required: 2,
        summary: "Destroy the nearest patch of one crop and replant it with another (farmland needs a hoe).",
        usage: "convertFarm(sourceCrop, targetCrop)",
    },
];

pub fn spec(name: &str) -> Option<&'static PrimitiveSpec> {
    PRIMITIVES.iter().find(|p| p.name == name)
}

/// Which primitives a scenario allows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveTable {
    available: BTreeSet<&'static str>,
}

impl PrimitiveTable {
    /// Table restricted to `names`; unknown names are ignored.
    pub fn with(names: &[impl AsRef<str>]) -> Self {
        let wanted: BTreeSet<&str> = names.iter().map(|n| n.as_ref()).collect();
        Self {
            available: PRIMITIVES
                .iter()
                .map(|p| p.name)
                .filter(|n| wanted.contains(n))
                .collect(),
        }
    }

    pub fn all() -> Self {
        Self {
            available: PRIMITIVES.iter().map(|p| p.name).collect(),
        }
    }

    pub fn mushroom_war() -> Self {
        Self::with(&[
            "mineBlock",
            "placeItem",
            "sendSignal",
            "waitSignal",
            "killMob",
            "giveToPlayer",
            "moveTo",
        ])
    }

    pub fn dash_and_dine() -> Self {
        Self::all()
    }

    pub fn is_available(&self, name: &str) -> bool {
        self.available.contains(name)
    }

    pub fn available(&self) -> impl Iterator<Item = &'static PrimitiveSpec> + '_ {
        PRIMITIVES.iter().filter(|p| self.available.contains(p.name))
    }

    /// Human-readable reference of the available primitives.
    pub fn docs(&self) -> String {
        self.available()
            .map(|p| format!("- {}: {}", p.usage, p.summary))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IssueKind {
    UnknownPrimitive,
    Unavailable,
    Arity { min: usize, max: usize, found: usize },
    ArgType { index: usize, expected: ArgKind },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub call: String,
    pub kind: IssueKind,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            IssueKind::UnknownPrimitive => write!(f, "{}: unknown primitive", self.call),
            IssueKind::Unavailable => write!(f, "{}: primitive unavailable in this scenario", self.call),
            IssueKind::Arity { min, max, found } if min == max => {
                write!(f, "{}: expected {min} arguments, found {found}", self.call)
            }
            IssueKind::Arity { min, max, found } => {
                write!(f, "{}: expected {min} to {max} arguments, found {found}", self.call)
            }
            IssueKind::ArgType { index, expected } => {
                write!(f, "{}: argument {} must be a {}", self.call, index + 1, expected.name())
            }
        }
    }
}

/// Checks one call against the table. An empty result means executable.
pub fn check_call(call: &Call, table: &PrimitiveTable) -> Vec<Issue> {
    let issue = |kind| Issue {
        call: call.name.clone(),
        kind,
    };
    let Some(spec) = spec(&call.name) else {
        return vec![issue(IssueKind::UnknownPrimitive)];
    };
    let mut issues = Vec::new();
    if !table.is_available(spec.name) {
        issues.push(issue(IssueKind::Unavailable));
    }
    let found = call.args.len();
    if found < spec.required || found > spec.args.len() {
        issues.push(issue(IssueKind::Arity {
            min: spec.required,
            max: spec.args.len(),
            found,
        }));
        return issues;
    }
    for (index, (a, kind)) in call.args.iter().zip(spec.args).enumerate() {
        if !kind.accepts(a) {
            issues.push(issue(IssueKind::ArgType {
                index,
                expected: *kind,
            }));
        }
    }
    issues
}

/// Static checks over every call in a program.
pub fn validate(program: &Program, table: &PrimitiveTable) -> Vec<Issue> {
    program
        .calls()
        .into_iter()
        .flat_map(|c| check_call(c, table))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_source;
    use super::*;

    fn issues(src: &str, table: &PrimitiveTable) -> Vec<Issue> {
        validate(&parse_source(src).unwrap(), table)
    }

    #[test]
    fn craft_unavailable_in_mushroom_war() {
        let found = issues("craftItem(\"bread\", 1)", &PrimitiveTable::mushroom_war());
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].kind, IssueKind::Unavailable);
        assert!(found[0].to_string().contains("primitive unavailable"));
    }

    #[test]
    fn mushroom_war_exclusions() {
        let mw = PrimitiveTable::mushroom_war();
        for name in ["craftItem", "farm", "smeltItem", "useChest"] {
            assert!(!mw.is_available(name), "{name}");
            assert!(PrimitiveTable::dash_and_dine().is_available(name));
        }
    }

    #[test]
    fn well_formed_program_has_no_issues() {
        let src = "loop { mineBlock(\"slime_block\", 2); giveToPlayer(\"red_mushroom\", \"Ryn\", -1) }";
        assert!(issues(src, &PrimitiveTable::mushroom_war()).is_empty());
    }

    #[test]
    fn kill_mob_arity() {
        let dd = PrimitiveTable::dash_and_dine();
        // written with the leading `bot`, as in recorded causal snippets
        assert!(issues("killMob(bot, \"cow\", 300)", &dd).is_empty());
        let four = issues("killMob(bot, \"cow\", 300, 1)", &dd);
        assert!(matches!(four[0].kind, IssueKind::Arity { min: 1, max: 2, found: 3 }));
    }

    #[test]
    fn unknown_and_mistyped() {
        let dd = PrimitiveTable::dash_and_dine();
        assert_eq!(issues("fly(1)", &dd)[0].kind, IssueKind::UnknownPrimitive);
        assert_eq!(
            issues("mineBlock(3, 1)", &dd)[0].kind,
            IssueKind::ArgType { index: 0, expected: ArgKind::Str }
        );
    }
}
