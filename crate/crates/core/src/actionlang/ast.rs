use std::sync::Arc;

/// A statement list. Shared so the interpreter can hold frames cheaply.
pub type Block = Arc<[Stmt]>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Str(String),
    Int(i64),
    Null,
}

impl Arg {
    pub fn as_str(&self) -> Option<&str> {
        match self {
            Arg::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Arg::Int(v) => Some(*v),
            _ => None,
        }
    }
}

/// A control-primitive invocation such as `mineBlock("slime_block", 1)`.
///
/// A leading `bot` argument is accepted (`mineBlock(bot, "slime_block", 1)`)
/// and recorded in `bot`; it is not counted as an argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Call {
    pub name: String,
    pub bot: bool,
    pub args: Vec<Arg>,
}

impl Call {
    pub fn new(name: &str, args: Vec<Arg>) -> Self {
        Self {
            name: name.to_string(),
            bot: false,
            args,
        }
    }

    pub fn str_arg(&self, i: usize) -> Option<&str> {
        self.args.get(i).and_then(Arg::as_str)
    }

    pub fn int_arg(&self, i: usize) -> Option<i64> {
        self.args.get(i).and_then(Arg::as_int)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cond {
    /// At least `count` of `item` in the agent's inventory.
    Has { item: String, count: i64 },
    /// The agent's previous primitive affected at least one thing.
    Ok,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Call(Call),
    Repeat { count: u32, body: Block },
    Loop { body: Block },
    If { cond: Cond, then_body: Block, else_body: Option<Block> },
    Wait(u64),
    Say(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub body: Block,
}

impl Program {
    pub fn new(body: Vec<Stmt>) -> Self {
        Self { body: body.into() }
    }

    /// `loop { wait(20) }`: the idle program.
    pub fn wait_loop() -> Self {
        Program::new(vec![Stmt::Loop {
            body: vec![Stmt::Wait(20)].into(),
        }])
    }

    /// Every call in the program, depth first.
    pub fn calls(&self) -> Vec<&Call> {
        fn walk<'a>(block: &'a [Stmt], out: &mut Vec<&'a Call>) {
            for stmt in block {
                match stmt {
                    Stmt::Call(c) => out.push(c),
                    Stmt::Repeat { body, .. } | Stmt::Loop { body } => walk(body, out),
                    Stmt::If { then_body, else_body, .. } => {
                        walk(then_body, out);
                        if let Some(e) = else_body {
                            walk(e, out);
                        }
                    }
                    Stmt::Wait(_) | Stmt::Say(_) => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.body, &mut out);
        out
    }

    pub fn statement_count(&self) -> usize {
        fn count(block: &[Stmt]) -> usize {
            block
                .iter()
                .map(|s| {
                    1 + match s {
                        Stmt::Repeat { body, .. } | Stmt::Loop { body } => count(body),
                        Stmt::If { then_body, else_body, .. } => {
                            count(then_body) + else_body.as_deref().map_or(0, count)
                        }
                        _ => 0,
                    }
                })
                .sum()
        }
        count(&self.body)
    }
}
