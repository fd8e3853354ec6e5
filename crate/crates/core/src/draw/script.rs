//! The `mark(...)` / `link(...)` drawing script.
//!
//! A script is a sequence of call statements whose arguments are string or
//! number literals. Semicolons are optional, `//` and `/* */` comments are
//! ignored. The script is only ever parsed, never executed.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::domain::{
    canonicalize_location, Color, DrawCommand, DrawProgram, FeedbackType, LineType, Link,
    Location, Mark, MarkContent,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ScriptError {
    pub line: usize,
    pub kind: ScriptErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("`{function}` takes {expected} arguments, found {found}")]
    Arity {
        function: &'static str,
        expected: &'static str,
        found: usize,
    },
    #[error("bad {field} `{value}`")]
    BadEnum { field: &'static str, value: String },
    #[error("unknown location `{0}`")]
    UnknownLocation(String),
    #[error("{field} must be a positive integer, found `{value}`")]
    BadNumber { field: &'static str, value: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Num(String),
    LParen,
    RParen,
    Comma,
    Semi,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Num(s) => write!(f, "number {s}"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    errors: &'a mut Vec<ScriptError>,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
        }
        Some(c)
    }

    fn error(&mut self, line: usize, msg: impl Into<String>) {
        self.errors.push(ScriptError {
            line,
            kind: ScriptErrorKind::Syntax(msg.into()),
        });
    }

    fn run(mut self) -> Vec<Token> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let line = self.line;
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                '/' if self.peek_at(1) == Some('/') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                '/' if self.peek_at(1) == Some('*') => {
                    self.bump();
                    self.bump();
                    let mut closed = false;
                    while let Some(c) = self.bump() {
                        if c == '*' && self.peek() == Some('/') {
                            self.bump();
                            closed = true;
                            break;
                        }
                    }
                    if !closed {
                        self.error(line, "unterminated comment");
                    }
                }
                '(' | ')' | ',' | ';' => {
                    self.bump();
                    let tok = match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        ',' => Tok::Comma,
                        _ => Tok::Semi,
                    };
                    out.push(Token { tok, line });
                }
                '"' | '\'' => {
                    if let Some(text) = self.string(c) {
                        out.push(Token {
                            tok: Tok::Str(text),
                            line,
                        });
                    }
                }
                c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                    let mut text = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_alphanumeric() || matches!(c, '-' | '+' | '.') {
                            text.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    out.push(Token {
                        tok: Tok::Num(text),
                        line,
                    });
                }
                c if c.is_alphabetic() || c == '_' || c == '$' => {
                    let mut text = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_alphanumeric() || c == '_' || c == '$' || c == '.' {
                            text.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    out.push(Token {
                        tok: Tok::Ident(text),
                        line,
                    });
                }
                other => {
                    self.bump();
                    self.error(line, format!("unexpected character `{other}`"));
                }
            }
        }
        out
    }

    fn string(&mut self, quote: char) -> Option<String> {
        let line = self.line;
        self.bump();
        let mut text = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => {
                    self.error(line, "unterminated string literal");
                    return None;
                }
                Some('\\') => match self.bump() {
                    Some('n') => text.push('\n'),
                    Some('t') => text.push('\t'),
                    Some('r') => text.push('\r'),
                    Some('\n') => {}
                    Some(other) => text.push(other),
                    None => {
                        self.error(line, "unterminated string literal");
                        return None;
                    }
                },
                Some(c) if c == quote => return Some(text),
                Some(c) => text.push(c),
            }
        }
    }
}

fn tokenize(src: &str, errors: &mut Vec<ScriptError>) -> Vec<Token> {
    Lexer {
        chars: src.chars().collect(),
        pos: 0,
        line: 1,
        errors,
    }
    .run()
}

/// A literal argument with the line it starts on.
#[derive(Debug, Clone)]
struct Arg {
    text: String,
    numeric: bool,
    line: usize,
}

struct Call {
    name: String,
    line: usize,
    args: Vec<Arg>,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn last_line(&self) -> usize {
        self.toks.last().map_or(1, |t| t.line)
    }

    /// Skips to just after the next `;`, or to the next identifier that
    /// starts a later line.
    fn recover(&mut self, from_line: usize) {
        while let Some(t) = self.peek() {
            match &t.tok {
                Tok::Semi => {
                    self.pos += 1;
                    return;
                }
                Tok::Ident(_) if t.line > from_line => return,
                _ => self.pos += 1,
            }
        }
    }

    fn call(&mut self) -> Result<Option<Call>, ScriptError> {
        let Some(head) = self.next() else {
            return Ok(None);
        };
        let name = match head.tok {
            Tok::Semi => return self.call(),
            Tok::Ident(name) => name,
            other => {
                return Err(ScriptError {
                    line: head.line,
                    kind: ScriptErrorKind::Syntax(format!("expected a call, found {other}")),
                })
            }
        };
        let line = head.line;
        match self.next() {
            Some(Token {
                tok: Tok::LParen, ..
            }) => {}
            other => {
                return Err(ScriptError {
                    line: other.as_ref().map_or(self.last_line(), |t| t.line),
                    kind: ScriptErrorKind::Syntax(format!("expected `(` after `{name}`")),
                })
            }
        }
        let mut args = Vec::new();
        loop {
            let Some(t) = self.next() else {
                return Err(ScriptError {
                    line,
                    kind: ScriptErrorKind::Syntax(format!("unclosed `(` in call to `{name}`")),
                });
            };
            match t.tok {
                Tok::RParen if args.is_empty() => break,
                Tok::Str(text) => args.push(Arg {
                    text,
                    numeric: false,
                    line: t.line,
                }),
                Tok::Num(text) => args.push(Arg {
                    text,
                    numeric: true,
                    line: t.line,
                }),
                Tok::Ident(text) => args.push(Arg {
                    text,
                    numeric: false,
                    line: t.line,
                }),
                other => {
                    return Err(ScriptError {
                        line: t.line,
                        kind: ScriptErrorKind::Syntax(format!("expected an argument, found {other}")),
                    })
                }
            }
            match self.next() {
                Some(Token {
                    tok: Tok::Comma, ..
                }) => {
                    if let Some(Token {
                        tok: Tok::RParen, ..
                    }) = self.peek()
                    {
                        self.pos += 1;
                        break;
                    }
                }
                Some(Token {
                    tok: Tok::RParen, ..
                }) => break,
                Some(t) => {
                    return Err(ScriptError {
                        line: t.line,
                        kind: ScriptErrorKind::Syntax(format!("expected `,` or `)`, found {}", t.tok)),
                    })
                }
                None => {
                    return Err(ScriptError {
                        line,
                        kind: ScriptErrorKind::Syntax(format!("unclosed `(` in call to `{name}`")),
                    })
                }
            }
        }
        if let Some(Token { tok: Tok::Semi, .. }) = self.peek() {
            self.pos += 1;
        }
        Ok(Some(Call { name, line, args }))
    }
}

fn location_arg(arg: &Arg, errors: &mut Vec<ScriptError>) -> Option<Location> {
    match canonicalize_location(&arg.text) {
        Ok(loc) => Some(loc),
        Err(_) => {
            errors.push(ScriptError {
                line: arg.line,
                kind: ScriptErrorKind::UnknownLocation(arg.text.clone()),
            });
            None
        }
    }
}

fn enum_arg<T: std::str::FromStr>(
    arg: &Arg,
    field: &'static str,
    errors: &mut Vec<ScriptError>,
) -> Option<T> {
    match arg.text.parse::<T>() {
        Ok(v) => Some(v),
        Err(_) => {
            errors.push(ScriptError {
                line: arg.line,
                kind: ScriptErrorKind::BadEnum {
                    field,
                    value: arg.text.clone(),
                },
            });
            None
        }
    }
}

fn positive_arg(arg: &Arg, field: &'static str, errors: &mut Vec<ScriptError>) -> Option<u32> {
    let text = arg.text.trim();
    let parsed = text
        .parse::<u32>()
        .ok()
        .or_else(|| {
            // Integral float literals such as `2.0`.
            text.parse::<f64>()
                .ok()
                .filter(|v| v.fract() == 0.0 && *v >= 0.0 && *v <= f64::from(u32::MAX))
                .map(|v| v as u32)
        })
        .filter(|n| *n >= 1);
    if parsed.is_none() {
        errors.push(ScriptError {
            line: arg.line,
            kind: ScriptErrorKind::BadNumber {
                field,
                value: arg.text.clone(),
            },
        });
    }
    parsed
}

fn feedback_arg(args: &[Arg], index: usize, errors: &mut Vec<ScriptError>) -> Option<FeedbackType> {
    match args.get(index) {
        None => Some(FeedbackType::None),
        Some(arg) => enum_arg(arg, "feedbackType", errors),
    }
}

fn build_mark(call: &Call, errors: &mut Vec<ScriptError>) -> Option<DrawCommand> {
    let a = &call.args;
    if !(4..=5).contains(&a.len()) {
        errors.push(ScriptError {
            line: call.line,
            kind: ScriptErrorKind::Arity {
                function: "mark",
                expected: "4 or 5",
                found: a.len(),
            },
        });
        return None;
    }
    let location = location_arg(&a[0], errors);
    let color = enum_arg::<Color>(&a[1], "color", errors);
    let content = match MarkContent::parse(&a[2].text) {
        Ok(c) => Some(c),
        Err(_) => {
            errors.push(ScriptError {
                line: a[2].line,
                kind: ScriptErrorKind::BadEnum {
                    field: "markContent",
                    value: a[2].text.clone(),
                },
            });
            None
        }
    };
    let anim_seq = positive_arg(&a[3], "animSeq", errors);
    let feedback = feedback_arg(a, 4, errors);
    Some(DrawCommand::Mark(Mark {
        location: location?,
        color: color?,
        content: content?,
        anim_seq: anim_seq?,
        feedback: feedback?,
    }))
}

fn build_link(call: &Call, errors: &mut Vec<ScriptError>) -> Option<DrawCommand> {
    let a = &call.args;
    if !(6..=7).contains(&a.len()) {
        errors.push(ScriptError {
            line: call.line,
            kind: ScriptErrorKind::Arity {
                function: "link",
                expected: "6 or 7",
                found: a.len(),
            },
        });
        return None;
    }
    let from = location_arg(&a[0], errors);
    let to = location_arg(&a[1], errors);
    let color = enum_arg::<Color>(&a[2], "color", errors);
    let line_type = enum_arg::<LineType>(&a[3], "lineType", errors);
    let label = if a[4].numeric {
        errors.push(ScriptError {
            line: a[4].line,
            kind: ScriptErrorKind::Syntax("link label must be a string".into()),
        });
        None
    } else {
        Some(a[4].text.clone())
    };
    let anim_seq = positive_arg(&a[5], "animSeq", errors);
    let feedback = feedback_arg(a, 6, errors);
    Some(DrawCommand::Link(Link {
        from: from?,
        to: to?,
        color: color?,
        line_type: line_type?,
        label: label?,
        anim_seq: anim_seq?,
        feedback: feedback?,
    }))
}

/// Parses a draw script. All problems are collected, each tagged with the
/// line it was found on.
pub fn parse_draw_script(src: &str) -> Result<DrawProgram, Vec<ScriptError>> {
    let mut errors = Vec::new();
    let toks = tokenize(src, &mut errors);
    let mut parser = Parser { toks, pos: 0 };
    let mut commands = Vec::new();
    loop {
        let start_line = parser.peek().map_or(0, |t| t.line);
        match parser.call() {
            Ok(None) => break,
            Ok(Some(call)) => {
                let built = match call.name.as_str() {
                    "mark" => build_mark(&call, &mut errors),
                    "link" => build_link(&call, &mut errors),
                    _ => {
                        errors.push(ScriptError {
                            line: call.line,
                            kind: ScriptErrorKind::UnknownFunction(call.name.clone()),
                        });
                        None
                    }
                };
                commands.extend(built);
            }
            Err(e) => {
                let line = e.line.max(start_line);
                errors.push(e);
                parser.recover(line);
            }
        }
    }
    if errors.is_empty() {
        Ok(DrawProgram::new(commands))
    } else {
        errors.sort_by_key(|e| e.line);
        Err(errors)
    }
}

fn quote(out: &mut String, text: &str) {
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
}

fn content_literal(out: &mut String, content: MarkContent) {
    match content {
        MarkContent::StepNumber(n) => {
            let _ = write!(out, "{n}");
        }
        MarkContent::Icon(icon) => quote(out, icon.as_str()),
    }
}

/// Writes a program back out as a script, one statement per line.
/// Feedback arguments are omitted when they are `none`.
pub fn serialize_draw_program(program: &DrawProgram) -> String {
    let mut out = String::new();
    for cmd in program {
        match cmd {
            DrawCommand::Mark(m) => {
                out.push_str("mark(");
                quote(&mut out, m.location.display_name());
                out.push_str(", ");
                quote(&mut out, m.color.as_str());
                out.push_str(", ");
                content_literal(&mut out, m.content);
                let _ = write!(out, ", {}", m.anim_seq);
            }
            DrawCommand::Link(l) => {
                out.push_str("link(");
                quote(&mut out, l.from.display_name());
                out.push_str(", ");
                quote(&mut out, l.to.display_name());
                out.push_str(", ");
                quote(&mut out, l.color.as_str());
                out.push_str(", ");
                quote(&mut out, l.line_type.as_str());
                out.push_str(", ");
                quote(&mut out, &l.label);
                let _ = write!(out, ", {}", l.anim_seq);
            }
        }
        if cmd.feedback() != FeedbackType::None {
            out.push_str(", ");
            quote(&mut out, cmd.feedback().as_str());
        }
        out.push_str(");\n");
    }
    out
}
