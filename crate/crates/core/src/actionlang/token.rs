use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keyword {
    Repeat,
    Loop,
    If,
    Else,
    Null,
}

impl Keyword {
    fn from_ident(s: &str) -> Option<Keyword> {
        Some(match s {
            "repeat" => Keyword::Repeat,
            "loop" => Keyword::Loop,
            "if" => Keyword::If,
            "else" => Keyword::Else,
            "null" => Keyword::Null,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Repeat => "repeat",
            Keyword::Loop => "loop",
            Keyword::If => "if",
            Keyword::Else => "else",
            Keyword::Null => "null",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Keyword(Keyword),
    Str(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    /// Unrecognised input; reported by the parser.
    Error(String),
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Keyword(k) => format!("keyword `{}`", k.as_str()),
            TokenKind::Str(_) => "string".to_string(),
            TokenKind::Int(_) => "integer".to_string(),
            TokenKind::LParen => "`(`".to_string(),
            TokenKind::RParen => "`)`".to_string(),
            TokenKind::LBrace => "`{`".to_string(),
            TokenKind::RBrace => "`}`".to_string(),
            TokenKind::Comma => "`,`".to_string(),
            TokenKind::Semi => "`;`".to_string(),
            TokenKind::Error(msg) => msg.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// 1-based line of the first character.
    pub line: u32,
    /// 1-based column (in characters) of the first character.
    pub column: u32,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}:{}", self.kind.describe(), self.line, self.column)
    }
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

/// Splits ActScript source into tokens. Never fails: bad input becomes
/// [`TokenKind::Error`] tokens that the parser reports with their position.
pub fn tokenize(source: &str) -> Vec<Token> {
    let mut cur = Cursor {
        chars: source.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        let push = |out: &mut Vec<Token>, kind| out.push(Token { kind, line, column });
        match c {
            c if c.is_whitespace() => {
                cur.bump();
            }
            '/' => {
                cur.bump();
                if cur.peek() == Some('/') {
                    while cur.peek().is_some_and(|c| c != '\n') {
                        cur.bump();
                    }
                } else {
                    push(&mut out, TokenKind::Error("unexpected character `/`".into()));
                }
            }
            '(' | ')' | '{' | '}' | ',' | ';' => {
                cur.bump();
                let kind = match c {
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    ',' => TokenKind::Comma,
                    _ => TokenKind::Semi,
                };
                push(&mut out, kind);
            }
            '"' | '\'' => {
                let quote = c;
                cur.bump();
                let mut text = String::new();
                let mut closed = false;
                while let Some(ch) = cur.bump() {
                    match ch {
                        '\\' => match cur.bump() {
                            Some('n') => text.push('\n'),
                            Some('t') => text.push('\t'),
                            Some(other) => text.push(other),
                            None => break,
                        },
                        '\n' => break,
                        ch if ch == quote => {
                            closed = true;
                            break;
                        }
                        ch => text.push(ch),
                    }
                }
                if closed {
                    push(&mut out, TokenKind::Str(text));
                } else {
                    push(&mut out, TokenKind::Error("unterminated string".into()));
                }
            }
            '-' | '0'..='9' => {
                let mut digits = String::new();
                if c == '-' {
                    digits.push('-');
                    cur.bump();
                }
                while let Some(d) = cur.peek().filter(char::is_ascii_digit) {
                    digits.push(d);
                    cur.bump();
                }
                match digits.parse::<i64>() {
                    Ok(v) => push(&mut out, TokenKind::Int(v)),
                    Err(_) if digits == "-" => {
                        push(&mut out, TokenKind::Error("unexpected character `-`".into()))
                    }
                    Err(_) => push(&mut out, TokenKind::Error(format!("integer `{digits}` out of range"))),
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(d) = cur.peek().filter(|d| d.is_ascii_alphanumeric() || *d == '_') {
                    ident.push(d);
                    cur.bump();
                }
                let kind = match Keyword::from_ident(&ident) {
                    Some(k) => TokenKind::Keyword(k),
                    None => TokenKind::Ident(ident),
                };
                push(&mut out, kind);
            }
            other => {
                cur.bump();
                push(&mut out, TokenKind::Error(format!("unexpected character `{other}`")));
            }
        }
    }
    out
}
