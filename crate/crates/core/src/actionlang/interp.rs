use super::ast::{Block, Call, Cond, Program, Stmt};
use crate::world::is_item_id;

/// Control-flow operations allowed per `step` before the interpreter yields.
/// Keeps primitive-free loops (`loop { if ok() {} }`) from spinning forever.
pub const STEP_FUEL: u32 = 256;

/// What the interpreter reads from the world.
pub trait ExecContext {
    fn item_count(&self, item: &str) -> u32;
    /// Whether the agent's previous primitive succeeded.
    fn last_ok(&self) -> bool;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExecStatus {
    Running,
    Done,
    /// Carries the feedback string handed to the critic.
    Error(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Primitive(Call),
    Wait(u64),
    Say(String),
    /// Out of fuel without reaching a primitive; resume next tick.
    Yield,
    Done,
    Error(String),
}

#[derive(Clone, Debug)]
enum FrameKind {
    Block,
    Repeat { remaining: u32 },
    Loop,
}

#[derive(Clone, Debug)]
struct Frame {
    body: Block,
    pc: usize,
    kind: FrameKind,
}

/// Stepwise execution state for one agent's program.
#[derive(Clone, Debug)]
pub struct ExecState {
    program: Program,
    frames: Vec<Frame>,
    status: ExecStatus,
    loop_iterations: u64,
}

impl ExecState {
    pub fn new(program: Program) -> Self {
        let frames = vec![Frame {
            body: program.body.clone(),
            pc: 0,
            kind: FrameKind::Block,
        }];
        Self {
            program,
            frames,
            status: ExecStatus::Running,
            loop_iterations: 0,
        }
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn status(&self) -> &ExecStatus {
        &self.status
    }

    pub fn is_running(&self) -> bool {
        self.status == ExecStatus::Running
    }

    /// Completed back-edges of `loop` and `repeat` blocks.
    pub fn loop_iterations(&self) -> u64 {
        self.loop_iterations
    }

    /// Ends execution at the episode boundary.
    pub fn finish(&mut self) {
        if self.status == ExecStatus::Running {
            self.status = ExecStatus::Done;
            self.frames.clear();
        }
    }

    /// Marks a runtime failure reported by primitive execution.
    pub fn fail(&mut self, message: impl Into<String>) {
        self.status = ExecStatus::Error(message.into());
        self.frames.clear();
    }

    fn eval(&self, cond: &Cond, ctx: &dyn ExecContext) -> Result<bool, String> {
        match cond {
            Cond::Has { item, count } => {
                if !is_item_id(item) {
                    return Err(format!("has(): malformed item id `{item}`"));
                }
                if *count < 0 {
                    return Err(format!("has(): negative count {count}"));
                }
                Ok(i64::from(ctx.item_count(item)) >= *count)
            }
            Cond::Ok => Ok(ctx.last_ok()),
        }
    }

    /// Runs control flow until the next primitive, wait, say, or the end.
    pub fn step(&mut self, ctx: &dyn ExecContext) -> Step {
        match &self.status {
            ExecStatus::Done => return Step::Done,
            ExecStatus::Error(msg) => return Step::Error(msg.clone()),
            ExecStatus::Running => {}
        }
        for _ in 0..STEP_FUEL {
            let Some(frame) = self.frames.last_mut() else {
                self.status = ExecStatus::Done;
                return Step::Done;
            };
            if frame.pc >= frame.body.len() {
                match &mut frame.kind {
                    FrameKind::Repeat { remaining } if *remaining > 1 => {
                        *remaining -= 1;
                        frame.pc = 0;
                        self.loop_iterations += 1;
                    }
                    FrameKind::Loop => {
                        frame.pc = 0;
                        self.loop_iterations += 1;
                    }
                    FrameKind::Repeat { .. } => {
                        self.loop_iterations += 1;
                        self.frames.pop();
                    }
                    FrameKind::Block => {
                        self.frames.pop();
                    }
                }
                continue;
            }
            let stmt = frame.body[frame.pc].clone();
            frame.pc += 1;
            match stmt {
                Stmt::Call(call) => return Step::Primitive(call),
                Stmt::Wait(t) => return Step::Wait(t),
                Stmt::Say(text) => return Step::Say(text),
                Stmt::Repeat { count, body } => {
                    if count > 0 && !body.is_empty() {
                        self.frames.push(Frame {
                            body,
                            pc: 0,
                            kind: FrameKind::Repeat { remaining: count },
                        });
                    }
                }
                Stmt::Loop { body } => {
                    self.frames.push(Frame {
                        body,
                        pc: 0,
                        kind: FrameKind::Loop,
                    });
                }
                Stmt::If { cond, then_body, else_body } => match self.eval(&cond, ctx) {
                    Ok(truth) => {
                        let chosen = if truth { Some(then_body) } else { else_body };
                        if let Some(body) = chosen {
                            self.frames.push(Frame {
                                body,
                                pc: 0,
                                kind: FrameKind::Block,
                            });
                        }
                    }
                    Err(msg) => {
                        self.fail(msg.clone());
                        return Step::Error(msg);
                    }
                },
            }
        }
        Step::Yield
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_source;
    use super::*;
    use std::collections::BTreeMap;

    #[derive(Default)]
    struct Ctx {
        items: BTreeMap<String, u32>,
        ok: bool,
    }

    impl ExecContext for Ctx {
        fn item_count(&self, item: &str) -> u32 {
            self.items.get(item).copied().unwrap_or(0)
        }
        fn last_ok(&self) -> bool {
            self.ok
        }
    }

    fn run(src: &str, ctx: &Ctx, max: usize) -> Vec<Step> {
        let mut st = ExecState::new(parse_source(src).unwrap());
        let mut out = Vec::new();
        for _ in 0..max {
            let s = st.step(ctx);
            let end = matches!(s, Step::Done | Step::Error(_));
            out.push(s);
            if end {
                break;
            }
        }
        out
    }

    #[test]
    fn repeat_two_waits() {
        assert_eq!(
            run("repeat 2 { wait(10) }", &Ctx::default(), 10),
            vec![Step::Wait(10), Step::Wait(10), Step::Done]
        );
    }

    #[test]
    fn if_has_takes_else_when_short() {
        let mut ctx = Ctx::default();
        ctx.items.insert("wheat".into(), 2);
        let steps = run("if has(\"wheat\", 3) { say(\"then\") } else { say(\"else\") }", &ctx, 5);
        assert_eq!(steps, vec![Step::Say("else".into()), Step::Done]);
    }

    #[test]
    fn loop_runs_until_finished() {
        let mut st = ExecState::new(parse_source("loop { mineBlock(\"slime_block\", 1) }").unwrap());
        let ctx = Ctx::default();
        for _ in 0..50 {
            assert!(matches!(st.step(&ctx), Step::Primitive(_)));
        }
        st.finish();
        assert_eq!(st.step(&ctx), Step::Done);
        assert_eq!(*st.status(), ExecStatus::Done);
    }

    #[test]
    fn malformed_item_is_runtime_error() {
        let steps = run("if has(\"Wheat!\", 1) { wait(1) }", &Ctx::default(), 5);
        assert!(matches!(steps.last(), Some(Step::Error(m)) if m.contains("malformed")));
    }

    #[test]
    fn empty_loop_yields() {
        let mut st = ExecState::new(parse_source("loop { if ok() { wait(1) } }").unwrap());
        assert_eq!(st.step(&Ctx::default()), Step::Yield);
        assert!(st.is_running());
    }

    #[test]
    fn zero_repeat_skips() {
        assert_eq!(run("repeat 0 { wait(1) } say(\"x\")", &Ctx::default(), 5), vec![Step::Say("x".into()), Step::Done]);
    }
}
