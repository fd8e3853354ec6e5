//! Line-oriented text form of a robot program.
//!
//! ```text
//! WAKE "visitor reception"
//! GOTO ReceptionArea
//! ASK "Are you ready?" -> reply
//! IF reply CONTAINS "no" {
//!   SAY "Take your time"
//! } ELSE {
//!   SAY "Great"
//! }
//! DETECT -> seen
//! IF seen IS TRUE {
//!   SAY "Hello"
//! }
//! ```
//!
//! One command per line; blank lines and `#` comments are ignored.
//! Command words are case-insensitive. Locations accept any known spelling,
//! quoted when it contains spaces.

use std::fmt::Write as _;

use thiserror::Error;

use crate::domain::canonicalize_location;

use super::action::{Action, Condition, RobotProgram};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("IR line {line}: {message}")]
pub struct IrSyntaxError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Word {
    Bare(String),
    Quoted(String),
    Arrow,
    Open,
    Close,
}

fn words(line: &str, number: usize) -> Result<Vec<Word>, IrSyntaxError> {
    let err = |message: String| IrSyntaxError { line: number, message };
    let mut out = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => break,
            '{' => {
                chars.next();
                out.push(Word::Open);
            }
            '}' => {
                chars.next();
                out.push(Word::Close);
            }
            '-' => {
                chars.next();
                if chars.next() != Some('>') {
                    return Err(err("expected `->`".into()));
                }
                out.push(Word::Arrow);
            }
            '"' => {
                chars.next();
                let mut text = String::new();
                loop {
                    match chars.next() {
                        None => return Err(err("unterminated string".into())),
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some('n') => text.push('\n'),
                            Some('t') => text.push('\t'),
                            Some('r') => text.push('\r'),
                            Some(other) => text.push(other),
                            None => return Err(err("unterminated string".into())),
                        },
                        Some(c) => text.push(c),
                    }
                }
                out.push(Word::Quoted(text));
            }
            _ => {
                let mut text = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || matches!(c, '{' | '}' | '"' | '#') {
                        break;
                    }
                    if c == '-' {
                        break;
                    }
                    text.push(c);
                    chars.next();
                }
                out.push(Word::Bare(text));
            }
        }
    }
    Ok(out)
}

fn keyword(word: Option<&Word>, expected: &str) -> bool {
    matches!(word, Some(Word::Bare(w)) if w.eq_ignore_ascii_case(expected))
}

struct IrParser {
    lines: Vec<(usize, Vec<Word>)>,
    pos: usize,
}

impl IrParser {
    fn block(&mut self, nested: bool) -> Result<(Vec<Action>, Option<usize>), IrSyntaxError> {
        let mut actions = Vec::new();
        while self.pos < self.lines.len() {
            let (number, line) = self.lines[self.pos].clone();
            let err = |message: String| IrSyntaxError { line: number, message };
            if line.first() == Some(&Word::Close) {
                if !nested {
                    return Err(err("unexpected `}`".into()));
                }
                return Ok((actions, Some(number)));
            }
            self.pos += 1;
            let Some(Word::Bare(cmd)) = line.first() else {
                return Err(err("expected a command".into()));
            };
            let rest = &line[1..];
            let action = match cmd.to_ascii_uppercase().as_str() {
                "WAKE" => match rest {
                    [Word::Quoted(k)] => Action::Wake { keyword: k.clone() },
                    _ => return Err(err("expected WAKE \"keyword\"".into())),
                },
                "GOTO" => {
                    let name = match rest {
                        [Word::Bare(n)] | [Word::Quoted(n)] => n,
                        _ => return Err(err("expected GOTO <location>".into())),
                    };
                    let location =
                        canonicalize_location(name).map_err(|_| err(format!("unknown location `{name}`")))?;
                    Action::Goto { location }
                }
                "SAY" => match rest {
                    [Word::Quoted(t)] => Action::Say { template: t.clone() },
                    _ => return Err(err("expected SAY \"text\"".into())),
                },
                "ASK" => match rest {
                    [Word::Quoted(t), Word::Arrow, Word::Bare(v)] => Action::Ask {
                        template: t.clone(),
                        store: v.clone(),
                    },
                    _ => return Err(err("expected ASK \"text\" -> var".into())),
                },
                "DETECT" => match rest {
                    [Word::Arrow, Word::Bare(v)] => Action::Detect { store: v.clone() },
                    _ => return Err(err("expected DETECT -> var".into())),
                },
                "IF" => self.branch(number, rest)?,
                other => return Err(err(format!("unknown command `{other}`"))),
            };
            actions.push(action);
        }
        Ok((actions, None))
    }

    fn branch(&mut self, number: usize, rest: &[Word]) -> Result<Action, IrSyntaxError> {
        let err = |line: usize, message: &str| IrSyntaxError {
            line,
            message: message.to_string(),
        };
        let condition = match rest {
            [Word::Bare(v), Word::Bare(op), Word::Quoted(k), Word::Open] if op.eq_ignore_ascii_case("CONTAINS") => {
                Condition::Contains {
                    var: v.clone(),
                    keyword: k.clone(),
                }
            }
            [Word::Bare(v), is, truth, Word::Open] if keyword(Some(is), "IS") => {
                if keyword(Some(truth), "TRUE") {
                    Condition::IsTrue { var: v.clone() }
                } else if keyword(Some(truth), "FALSE") {
                    Condition::IsFalse { var: v.clone() }
                } else {
                    return Err(err(number, "expected TRUE or FALSE"));
                }
            }
            _ => return Err(err(number, "expected IF <var> CONTAINS \"kw\" { or IF <var> IS TRUE|FALSE {")),
        };
        let (then_steps, close) = self.block(true)?;
        let close = close.ok_or_else(|| err(number, "unclosed `{`"))?;
        let closing = self.lines[self.pos].1.clone();
        self.pos += 1;
        let else_steps = match closing.as_slice() {
            [Word::Close] => Vec::new(),
            [Word::Close, e, Word::Open] if keyword(Some(e), "ELSE") => {
                let (steps, end) = self.block(true)?;
                end.ok_or_else(|| err(close, "unclosed ELSE block"))?;
                let after = self.lines[self.pos].1.clone();
                self.pos += 1;
                if after != [Word::Close] {
                    return Err(err(self.lines[self.pos - 1].0, "expected `}`"));
                }
                steps
            }
            _ => return Err(err(close, "expected `}` or `} ELSE {`")),
        };
        Ok(Action::Branch {
            condition,
            then_steps,
            else_steps,
        })
    }
}

/// Parses IR text into a flat action list without requiring a leading wake.
pub fn parse_ir_actions(text: &str) -> Result<Vec<Action>, IrSyntaxError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let w = words(raw, i + 1)?;
        if !w.is_empty() {
            lines.push((i + 1, w));
        }
    }
    let mut parser = IrParser { lines, pos: 0 };
    let (actions, _) = parser.block(false)?;
    Ok(actions)
}

/// Parses IR text. The first command must be `WAKE`.
pub fn parse_ir(text: &str) -> Result<RobotProgram, IrSyntaxError> {
    let mut actions = parse_ir_actions(text)?.into_iter();
    match actions.next() {
        Some(Action::Wake { keyword }) => Ok(RobotProgram::new(keyword, actions.collect())),
        _ => {
            let line = text
                .lines()
                .position(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
                .map_or(1, |i| i + 1);
            Err(IrSyntaxError {
                line,
                message: "program must start with WAKE".into(),
            })
        }
    }
}

fn quoted(out: &mut String, text: &str) {
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

fn write_actions(out: &mut String, actions: &[Action], depth: usize) {
    for action in actions {
        let indent = "  ".repeat(depth);
        out.push_str(&indent);
        match action {
            Action::Wake { keyword } => {
                out.push_str("WAKE ");
                quoted(out, keyword);
            }
            Action::Goto { location } => {
                let _ = write!(out, "GOTO {location}");
            }
            Action::Say { template } => {
                out.push_str("SAY ");
                quoted(out, template);
            }
            Action::Ask { template, store } => {
                out.push_str("ASK ");
                quoted(out, template);
                let _ = write!(out, " -> {store}");
            }
            Action::Detect { store } => {
                let _ = write!(out, "DETECT -> {store}");
            }
            Action::Branch {
                condition,
                then_steps,
                else_steps,
            } => {
                out.push_str("IF ");
                match condition {
                    Condition::Contains { var, keyword } => {
                        let _ = write!(out, "{var} CONTAINS ");
                        quoted(out, keyword);
                    }
                    Condition::IsTrue { var } => {
                        let _ = write!(out, "{var} IS TRUE");
                    }
                    Condition::IsFalse { var } => {
                        let _ = write!(out, "{var} IS FALSE");
                    }
                }
                out.push_str(" {\n");
                write_actions(out, then_steps, depth + 1);
                out.push_str(&indent);
                if else_steps.is_empty() {
                    out.push('}');
                } else {
                    out.push_str("} ELSE {\n");
                    write_actions(out, else_steps, depth + 1);
                    out.push_str(&indent);
                    out.push('}');
                }
            }
        }
        out.push('\n');
    }
}

pub fn serialize_ir(program: &RobotProgram) -> String {
    let mut out = String::new();
    write_actions(&mut out, &program.to_actions(), 0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Location;

    #[test]
    fn two_node_program() {
        let p = parse_ir("WAKE \"visitor reception\"\nGOTO ReceptionArea\n").unwrap();
        assert_eq!(p, RobotProgram::new("visitor reception", vec![Action::goto(Location::ReceptionArea)]));
    }

    #[test]
    fn unknown_command() {
        let err = parse_ir("WAKE \"x\"\nJUMP 3").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("JUMP"));
    }

    #[test]
    fn wake_required_first() {
        let err = parse_ir("# comment\n\nGOTO Pantry").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(parse_ir("").is_err());
    }

    #[test]
    fn branch_with_else_and_nesting() {
        let text = "WAKE \"w\"\nASK \"ready?\" -> reply\nIF reply CONTAINS \"no\" {\n  ASK \"How long?\" -> eta\n  IF eta CONTAINS \"10\" {\n    SAY \"ok\"\n  }\n} ELSE {\n  SAY \"Great\"\n}\nDETECT -> seen\nIF seen IS FALSE {\n  GOTO \"Leader's office\"\n}\n";
        let p = parse_ir(text).unwrap();
        assert_eq!(p.body.len(), 4);
        let again = serialize_ir(&p);
        assert_eq!(parse_ir(&again).unwrap(), p);
        assert!(again.contains("GOTO LeadersOffice"));
    }

    #[test]
    fn structural_errors_have_lines() {
        let err = parse_ir("WAKE \"w\"\nIF x CONTAINS \"a\" {\nSAY \"b\"\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_ir("WAKE \"w\"\n}\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_ir("WAKE \"w\"\nGOTO Warehouse").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_ir("WAKE \"w\"\nSAY \"open").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_ir("WAKE \"w\"\nIF x IS MAYBE {\n}").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn escapes_survive() {
        let p = RobotProgram::new("a \"b\"", vec![Action::say("line1\nline2 \\ {x}")]);
        assert_eq!(parse_ir(&serialize_ir(&p)).unwrap(), p);
    }
}
