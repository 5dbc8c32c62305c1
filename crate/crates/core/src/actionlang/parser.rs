use std::fmt;

use super::ast::{Arg, Block, Call, Cond, Program, Stmt};
use super::token::{tokenize, Keyword, Token, TokenKind};

/// Maximum nesting of `repeat`/`loop`/`if` blocks.
pub const MAX_NESTING: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// Tokenizes and parses in one go.
pub fn parse_source(source: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(source);
    let end = end_position(source);
    Parser::new(&tokens, end).program()
}

/// Parses a token list. End-of-input errors point just past the last token.
pub fn parse(tokens: &[Token]) -> Result<Program, ParseError> {
    let end = tokens
        .last()
        .map(|t| (t.line, t.column + token_width(&t.kind)))
        .unwrap_or((1, 1));
    Parser::new(tokens, end).program()
}

fn end_position(source: &str) -> (u32, u32) {
    let mut line = 1;
    let mut column = 1;
    for c in source.chars() {
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    (line, column)
}

fn token_width(kind: &TokenKind) -> u32 {
    match kind {
        TokenKind::Ident(s) => s.chars().count() as u32,
        TokenKind::Keyword(k) => k.as_str().len() as u32,
        TokenKind::Str(s) => s.chars().count() as u32 + 2,
        TokenKind::Int(v) => v.to_string().len() as u32,
        _ => 1,
    }
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: (u32, u32),
    depth: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn new(tokens: &'a [Token], end: (u32, u32)) -> Self {
        Self {
            tokens,
            pos: 0,
            end,
            depth: 0,
        }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&'a TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let (line, column) = match self.peek() {
            Some(t) => (t.line, t.column),
            None => self.end,
        };
        let found = match self.peek() {
            Some(t) => t.kind.describe(),
            None => "end of input".to_string(),
        };
        let mut message = message.into();
        if message.is_empty() {
            message = format!("unexpected {found}");
        }
        if let Some(Token { kind: TokenKind::Error(msg), .. }) = self.peek() {
            message = msg.clone();
        }
        ParseError {
            line,
            column,
            message,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, want: TokenKind, label: &str) -> PResult<&'a Token> {
        match self.peek() {
            Some(t) if t.kind == want => Ok(self.next().unwrap()),
            _ => Err(self.error("", &[label])),
        }
    }

    fn skip_semis(&mut self) {
        while self.peek_kind() == Some(&TokenKind::Semi) {
            self.pos += 1;
        }
    }

    fn program(mut self) -> PResult<Program> {
        let mut body = Vec::new();
        self.skip_semis();
        while self.peek().is_some() {
            body.push(self.stmt()?);
            self.skip_semis();
        }
        Ok(Program::new(body))
    }

    fn block(&mut self) -> PResult<Block> {
        self.expect(TokenKind::LBrace, "`{`")?;
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(self.error(format!("blocks nested deeper than {MAX_NESTING}"), &[]));
        }
        let mut body = Vec::new();
        self.skip_semis();
        loop {
            match self.peek_kind() {
                Some(TokenKind::RBrace) => {
                    self.pos += 1;
                    break;
                }
                None => return Err(self.error("", &["statement", "`}`"])),
                Some(_) => {
                    body.push(self.stmt()?);
                    self.skip_semis();
                }
            }
        }
        self.depth -= 1;
        Ok(body.into())
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        match self.peek_kind() {
            Some(TokenKind::Keyword(Keyword::Repeat)) => {
                self.pos += 1;
                let count = match self.peek_kind() {
                    Some(TokenKind::Int(v)) if *v >= 0 && *v <= i64::from(u32::MAX) => *v as u32,
                    Some(TokenKind::Int(_)) => {
                        return Err(self.error("repeat count must be a non-negative integer", &["integer"]))
                    }
                    _ => return Err(self.error("", &["integer"])),
                };
                self.pos += 1;
                let body = self.block()?;
                Ok(Stmt::Repeat { count, body })
            }
            Some(TokenKind::Keyword(Keyword::Loop)) => {
                self.pos += 1;
                Ok(Stmt::Loop { body: self.block()? })
            }
            Some(TokenKind::Keyword(Keyword::If)) => self.if_stmt(),
            Some(TokenKind::Ident(_)) => self.call_stmt(),
            _ => Err(self.error("", &["statement"])),
        }
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        self.expect(TokenKind::Keyword(Keyword::If), "`if`")?;
        let cond = self.cond()?;
        let then_body = self.block()?;
        let else_body = if self.peek_kind() == Some(&TokenKind::Keyword(Keyword::Else)) {
            self.pos += 1;
            if self.peek_kind() == Some(&TokenKind::Keyword(Keyword::If)) {
                self.depth += 1;
                if self.depth > MAX_NESTING {
                    return Err(self.error(format!("blocks nested deeper than {MAX_NESTING}"), &[]));
                }
                let nested = self.if_stmt()?;
                self.depth -= 1;
                Some(Block::from(vec![nested]))
            } else {
                Some(self.block()?)
            }
        } else {
            None
        };
        Ok(Stmt::If { cond, then_body, else_body })
    }

    fn cond(&mut self) -> PResult<Cond> {
        let name = match self.peek_kind() {
            Some(TokenKind::Ident(name)) => name.clone(),
            _ => return Err(self.error("", &["condition"])),
        };
        let (line, column) = {
            let t = self.peek().unwrap();
            (t.line, t.column)
        };
        self.pos += 1;
        let open = self.pos;
        let (bot, args) = self.arg_list()?;
        let at = self.arg_position(open, bot, 0).unwrap_or((line, column));
        let bad = |msg: String| ParseError {
            line: at.0,
            column: at.1,
            message: msg,
            expected: vec![],
        };
        if bot {
            return Err(bad(format!("`{name}` does not take `bot`")));
        }
        match (name.as_str(), args.as_slice()) {
            ("has", [Arg::Str(item), Arg::Int(count)]) => Ok(Cond::Has {
                item: item.clone(),
                count: *count,
            }),
            ("has", [Arg::Str(item)]) => Ok(Cond::Has {
                item: item.clone(),
                count: 1,
            }),
            ("has", _) => Err(bad("has() takes (item, count)".into())),
            ("ok", []) => Ok(Cond::Ok),
            ("ok", _) => Err(bad("ok() takes no arguments".into())),
            _ => Err(bad(format!("unknown condition `{name}`"))),
        }
    }

    fn call_stmt(&mut self) -> PResult<Stmt> {
        let start = self.next().unwrap();
        let TokenKind::Ident(name) = &start.kind else { unreachable!() };
        let open = self.pos;
        let (bot, args) = self.arg_list()?;
        // wait/say errors point at the offending argument (or the `(`)
        let at = match args.first() {
            Some(Arg::Int(t)) if name == "wait" && *t >= 0 && !bot => self.arg_position(open, bot, 1),
            Some(Arg::Str(_)) if name == "say" && !bot => self.arg_position(open, bot, 1),
            _ => self.arg_position(open, false, 0),
        };
        let (line, column) = at.unwrap_or((start.line, start.column));
        let bad = |msg: &str| ParseError {
            line,
            column,
            message: msg.to_string(),
            expected: vec![],
        };
        match name.as_str() {
            "wait" => match args.as_slice() {
                [Arg::Int(t)] if *t >= 0 && !bot => Ok(Stmt::Wait(*t as u64)),
                _ => Err(bad("wait() takes one non-negative tick count")),
            },
            "say" => match args.as_slice() {
                [Arg::Str(text)] if !bot => Ok(Stmt::Say(text.clone())),
                _ => Err(bad("say() takes one string")),
            },
            _ => Ok(Stmt::Call(Call {
                name: name.clone(),
                bot,
                args,
            })),
        }
    }

    /// Source position of argument `index` in the list opening at token
    /// `open`; `bot` and each argument are one token followed by a comma.
    fn arg_position(&self, open: usize, bot: bool, index: usize) -> Option<(u32, u32)> {
        let t = self.tokens.get(open + 1 + 2 * (usize::from(bot) + index))?;
        Some((t.line, t.column))
    }

    /// `( [bot ,] arg, ... )`
    fn arg_list(&mut self) -> PResult<(bool, Vec<Arg>)> {
        self.expect(TokenKind::LParen, "`(`")?;
        let mut bot = false;
        let mut args = Vec::new();
        if self.peek_kind() == Some(&TokenKind::RParen) {
            self.pos += 1;
            return Ok((bot, args));
        }
        loop {
            match self.peek_kind() {
                Some(TokenKind::Str(s)) => args.push(Arg::Str(s.clone())),
                Some(TokenKind::Int(v)) => args.push(Arg::Int(*v)),
                Some(TokenKind::Keyword(Keyword::Null)) => args.push(Arg::Null),
                Some(TokenKind::Ident(id)) if id == "bot" && !bot && args.is_empty() => bot = true,
                _ if args.is_empty() && !bot => return Err(self.error("", &["argument", "`)`"])),
                _ => return Err(self.error("", &["argument"])),
            }
            self.pos += 1;
            match self.peek_kind() {
                Some(TokenKind::Comma) => self.pos += 1,
                Some(TokenKind::RParen) => {
                    self.pos += 1;
                    return Ok((bot, args));
                }
                _ => return Err(self.error("", &["`,`", "`)`"])),
            }
        }
    }
}
