//! ActScript: the sandboxed action language agents write their plans in.
//!
//! ```text
//! program   = { stmt [";"] }
//! stmt      = "repeat" INT block
//!           | "loop" block
//!           | "if" cond block [ "else" ( block | if ) ]
//!           | "wait" "(" INT ")"
//!           | "say" "(" STRING ")"
//!           | IDENT "(" [ args ] ")"
//! block     = "{" { stmt [";"] } "}"
//! cond      = "has" "(" STRING [ "," INT ] ")" | "ok" "(" ")"
//! args      = [ "bot" "," ] arg { "," arg }
//! arg       = STRING | INT | "null"
//! ```
//!
//! Strings take single or double quotes, `//` starts a line comment and
//! blocks nest at most eight deep. Calls name control primitives from
//! [`PRIMITIVES`]; `loop` runs until the episode ends.

mod ast;
mod interp;
mod parser;
mod primitives;
mod printer;
mod token;

pub use ast::{Arg, Block, Call, Cond, Program, Stmt};
pub use interp::{ExecContext, ExecState, ExecStatus, Step, STEP_FUEL};
pub use parser::{parse, parse_source, ParseError, MAX_NESTING};
pub use primitives::{
    check_call, spec, validate, ArgKind, Issue, IssueKind, PrimitiveSpec, PrimitiveTable,
    PRIMITIVES,
};
pub use printer::{pretty, print_call, quote};
pub use token::{tokenize, Keyword, Token, TokenKind};
