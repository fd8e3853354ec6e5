//! Constrained-English task steps.
//!
//! ```text
//! start with keyword visitor reception
//! go to Reception area
//! say Welcome, {name}
//! ask What is your name? into name
//! wait for a person into seen
//! if reply contains no then: ask How long? into eta otherwise: say Great
//! if seen is true then: [say Hello; go to Pantry]
//! ```
//!
//! Branch arms are written inline (`;`-separated, optionally bracketed) or
//! as indented blocks under a line ending in `then:`, closed by an
//! `otherwise:` line at the same indent. Nested inline branches need
//! brackets. Leading list markers such as `1.` or `-` are ignored.

use thiserror::Error;

use crate::domain::canonicalize_location;

use super::action::{is_var_name, Action, Condition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("cannot parse step `{0}`")]
    UnparsableStep(String),
}

fn unparsable(text: &str) -> StepError {
    StepError::UnparsableStep(text.trim().to_string())
}

fn strip_prefix_ci<'a>(text: &'a str, prefix: &str) -> Option<&'a str> {
    let head = text.get(..prefix.len())?;
    head.eq_ignore_ascii_case(prefix).then(|| &text[prefix.len()..])
}

/// Byte offset of the last case-insensitive occurrence of `needle`.
fn rfind_ci(text: &str, needle: &str) -> Option<usize> {
    (0..=text.len().checked_sub(needle.len())?)
        .rev()
        .find(|&i| text.get(i..i + needle.len()).is_some_and(|s| s.eq_ignore_ascii_case(needle)))
}

fn find_ci(text: &str, needle: &str) -> Option<usize> {
    (0..=text.len().checked_sub(needle.len())?)
        .find(|&i| text.get(i..i + needle.len()).is_some_and(|s| s.eq_ignore_ascii_case(needle)))
}

fn unquote(text: &str) -> &str {
    let t = text.trim();
    for (open, close) in [('"', '"'), ('\'', '\''), ('“', '”'), ('‘', '’')] {
        if let Some(inner) = t.strip_prefix(open).and_then(|r| r.strip_suffix(close)) {
            return inner;
        }
    }
    t
}

/// Removes a leading list marker: `1.`, `2)`, `-`, `*`, `Step 3:`.
fn strip_marker(line: &str) -> &str {
    let t = line.trim();
    if let Some(rest) = t.strip_prefix("- ").or_else(|| t.strip_prefix("* ")) {
        return rest.trim_start();
    }
    let body = strip_prefix_ci(t, "step ").unwrap_or(t);
    let digits = body.len() - body.trim_start_matches(|c: char| c.is_ascii_digit()).len();
    if digits > 0 {
        let rest = &body[digits..];
        if let Some(r) = rest.strip_prefix(['.', ')', ':']) {
            if r.starts_with(char::is_whitespace) {
                return r.trim_start();
            }
        }
    }
    t
}

fn var_after(text: &str, marker: &str) -> Option<(String, String)> {
    let at = rfind_ci(text, marker)?;
    let var = text[at + marker.len()..].trim();
    is_var_name(var).then(|| (text[..at].trim().to_string(), var.to_string()))
}

fn parse_simple(text: &str) -> Option<Action> {
    const WAKE: [&str; 3] = ["start with keyword ", "start with the keyword ", "activate with keyword "];
    const GOTO: [&str; 3] = ["go to ", "move to ", "navigate to "];
    const DETECT: [&str; 3] = ["wait for a person", "detect a person", "look for a person"];
    for prefix in WAKE {
        if let Some(rest) = strip_prefix_ci(text, prefix) {
            let keyword = unquote(rest);
            return (!keyword.is_empty()).then(|| Action::Wake {
                keyword: keyword.to_string(),
            });
        }
    }
    for prefix in GOTO {
        if let Some(rest) = strip_prefix_ci(text, prefix) {
            return canonicalize_location(unquote(rest)).ok().map(Action::goto);
        }
    }
    for prefix in DETECT {
        if let Some(rest) = strip_prefix_ci(text, prefix) {
            let var = strip_prefix_ci(rest.trim_start(), "into ")?.trim();
            return is_var_name(var).then(|| Action::detect(var));
        }
    }
    if let Some(rest) = strip_prefix_ci(text, "ask ") {
        let (question, var) = var_after(rest, " into ")?;
        let question = unquote(&question);
        return (!question.is_empty()).then(|| Action::ask(question, var));
    }
    if let Some(rest) = strip_prefix_ci(text, "say ") {
        let said = unquote(rest);
        return (!said.is_empty()).then(|| Action::say(said));
    }
    None
}

fn parse_condition(text: &str) -> Option<Condition> {
    let text = text.trim();
    if let Some(at) = find_ci(text, " contains ") {
        let var = text[..at].trim();
        let keyword = unquote(&text[at + " contains ".len()..]);
        return (is_var_name(var) && !keyword.is_empty()).then(|| Condition::Contains {
            var: var.to_string(),
            keyword: keyword.to_string(),
        });
    }
    let at = find_ci(text, " is ")?;
    let var = text[..at].trim().to_string();
    if !is_var_name(&var) {
        return None;
    }
    match text[at + " is ".len()..].trim().to_ascii_lowercase().as_str() {
        "true" => Some(Condition::IsTrue { var }),
        "false" => Some(Condition::IsFalse { var }),
        _ => None,
    }
}

/// Splits `if <cond> then:<rest>` into the condition and the text after `then:`.
fn branch_header(text: &str) -> Option<(Condition, &str)> {
    let rest = strip_prefix_ci(text, "if ")?;
    let at = find_ci(rest, " then:")?;
    Some((parse_condition(&rest[..at])?, &rest[at + " then:".len()..]))
}

/// Finds the top-level `otherwise:` (or `else:`) keyword in an inline branch.
fn split_otherwise(text: &str) -> (&str, Option<&str>) {
    let mut depth = 0i32;
    for (i, c) in text.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ if depth == 0 && (i == 0 || text[..i].ends_with(char::is_whitespace)) => {
                for word in ["otherwise:", "else:"] {
                    if let Some(rest) = strip_prefix_ci(&text[i..], word) {
                        return (&text[..i], Some(rest));
                    }
                }
            }
            _ => {}
        }
    }
    (text, None)
}

fn parse_arm(text: &str) -> Result<Vec<Action>, StepError> {
    let t = text.trim();
    let inner = match t.strip_prefix('[') {
        Some(rest) => rest.strip_suffix(']').ok_or_else(|| unparsable(text))?,
        None => t,
    };
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ';' if depth == 0 => {
                parts.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&inner[start..]);
    parts
        .into_iter()
        .filter(|p| !p.trim().is_empty())
        .map(parse_line)
        .collect()
}

fn parse_line(text: &str) -> Result<Action, StepError> {
    let t = strip_marker(text);
    if let Some((condition, rest)) = branch_header(t) {
        let (then_text, else_text) = split_otherwise(rest);
        return Ok(Action::Branch {
            condition,
            then_steps: parse_arm(then_text)?,
            else_steps: else_text.map(parse_arm).transpose()?.unwrap_or_default(),
        });
    }
    parse_simple(t).ok_or_else(|| unparsable(text))
}

fn indent_of(line: &str) -> usize {
    line.chars()
        .take_while(|c| c.is_whitespace())
        .map(|c| if c == '\t' { 4 } else { 1 })
        .sum()
}

struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn otherwise_at(&self, indent: usize) -> Option<&'a str> {
        let &(i, text) = self.lines.get(self.pos)?;
        if i != indent {
            return None;
        }
        strip_prefix_ci(text, "otherwise:").or_else(|| strip_prefix_ci(text, "else:"))
    }

    fn block(&mut self, parent: Option<usize>) -> Result<Vec<Action>, StepError> {
        let mut out = Vec::new();
        while let Some(&(indent, text)) = self.lines.get(self.pos) {
            if parent.is_some_and(|p| indent <= p) {
                break;
            }
            self.pos += 1;
            let Some((condition, rest)) = branch_header(text) else {
                out.push(parse_line(text)?);
                continue;
            };
            let (then_steps, mut else_steps, open_else) = if rest.trim().is_empty() {
                (self.block(Some(indent))?, Vec::new(), true)
            } else {
                let (then_text, else_text) = split_otherwise(rest);
                let else_steps = else_text.map(parse_arm).transpose()?;
                let open = else_steps.is_none();
                (parse_arm(then_text)?, else_steps.unwrap_or_default(), open)
            };
            if open_else {
                if let Some(rest) = self.otherwise_at(indent) {
                    self.pos += 1;
                    else_steps = if rest.trim().is_empty() {
                        self.block(Some(indent))?
                    } else {
                        parse_arm(rest)?
                    };
                }
            }
            out.push(Action::Branch {
                condition,
                then_steps,
                else_steps,
            });
        }
        Ok(out)
    }
}

/// Parses a block of steps, one per line, with indented branch arms.
pub fn parse_steps(text: &str) -> Result<Vec<Action>, StepError> {
    let lines = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| (indent_of(l), strip_marker(l)))
        .collect();
    let mut lines = Lines { lines, pos: 0 };
    let actions = lines.block(None)?;
    match lines.lines.get(lines.pos) {
        Some((_, stray)) => Err(unparsable(stray)),
        None => Ok(actions),
    }
}

/// Parses one step. A multi-line step must hold exactly one action.
pub fn parse_step(text: &str) -> Result<Action, StepError> {
    if text.trim().contains('\n') {
        let mut actions = parse_steps(text)?;
        return match actions.len() {
            1 => Ok(actions.remove(0)),
            _ => Err(unparsable(text)),
        };
    }
    parse_line(text)
}

/// Writes an action as a one-line step that [`parse_step`] reads back.
pub fn format_step(action: &Action) -> String {
    match action {
        Action::Wake { keyword } => format!("start with keyword {keyword}"),
        Action::Goto { location } => format!("go to {}", location.display_name()),
        Action::Say { template } => format!("say {template}"),
        Action::Ask { template, store } => format!("ask {template} into {store}"),
        Action::Detect { store } => format!("wait for a person into {store}"),
        Action::Branch {
            condition,
            then_steps,
            else_steps,
        } => {
            let cond = match condition {
                Condition::Contains { var, keyword } => format!("{var} contains {keyword}"),
                Condition::IsTrue { var } => format!("{var} is true"),
                Condition::IsFalse { var } => format!("{var} is false"),
            };
            let arm = |steps: &[Action]| steps.iter().map(format_step).collect::<Vec<_>>().join("; ");
            let mut out = format!("if {cond} then: [{}]", arm(then_steps));
            if !else_steps.is_empty() {
                out.push_str(&format!(" otherwise: [{}]", arm(else_steps)));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Location;

    #[test]
    fn simple_forms() {
        assert_eq!(parse_step("go to Pantry").unwrap(), Action::goto(Location::Pantry));
        assert_eq!(parse_step("Go to the meeting room.").unwrap(), Action::goto(Location::MeetingRoom));
        assert_eq!(
            parse_step("ask Are you ready to meet? into reply").unwrap(),
            Action::ask("Are you ready to meet?", "reply")
        );
        assert_eq!(
            parse_step("1. Start with keyword 'visitor reception'").unwrap(),
            Action::Wake {
                keyword: "visitor reception".into()
            }
        );
        assert_eq!(parse_step("wait for a person into seen").unwrap(), Action::detect("seen"));
        assert_eq!(parse_step("say \"Hello {name}\"").unwrap(), Action::say("Hello {name}"));
    }

    #[test]
    fn inline_branch() {
        let got = parse_step("if reply contains no then: ask How much time do you need? into eta otherwise: say Great")
            .unwrap();
        assert_eq!(
            got,
            Action::Branch {
                condition: Condition::Contains {
                    var: "reply".into(),
                    keyword: "no".into()
                },
                then_steps: vec![Action::ask("How much time do you need?", "eta")],
                else_steps: vec![Action::say("Great")],
            }
        );
    }

    #[test]
    fn indented_branch() {
        let text = "ask Ready? into reply\nif reply contains no then:\n  ask How long? into eta\n  say OK\notherwise:\n  say Great\ngo to Pantry";
        let steps = parse_steps(text).unwrap();
        assert_eq!(steps.len(), 3);
        match &steps[1] {
            Action::Branch {
                then_steps, else_steps, ..
            } => {
                assert_eq!(then_steps.len(), 2);
                assert_eq!(else_steps, &vec![Action::say("Great")]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn otherwise_on_next_line() {
        let steps = parse_steps("if seen is true then: say Hi\notherwise: go to Gym").unwrap();
        assert_eq!(
            steps,
            vec![Action::Branch {
                condition: Condition::IsTrue { var: "seen".into() },
                then_steps: vec![Action::say("Hi")],
                else_steps: vec![Action::goto(Location::Gym)],
            }]
        );
    }

    #[test]
    fn rejects() {
        for bad in [
            "fly to the moon",
            "go to warehouse",
            "ask Ready? into Reply",
            "ask into x",
            "if x then: say a",
            "if x is maybe then: say a",
            "say ",
            "otherwise: say b",
        ] {
            assert!(parse_step(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn format_round_trip() {
        let a = Action::Branch {
            condition: Condition::IsFalse { var: "seen".into() },
            then_steps: vec![
                Action::say("nobody"),
                Action::Branch {
                    condition: Condition::Contains {
                        var: "r".into(),
                        keyword: "yes".into(),
                    },
                    then_steps: vec![Action::goto(Location::LivingRoom)],
                    else_steps: vec![],
                },
            ],
            else_steps: vec![Action::ask("Name?", "name")],
        };
        assert_eq!(parse_step(&format_step(&a)).unwrap(), a);
    }
}
