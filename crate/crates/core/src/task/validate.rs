use std::collections::BTreeSet;

use thiserror::Error;

use crate::domain::{canonicalize_location, Location};

use super::action::{is_var_name, template_vars, Action, Condition, RobotProgram};

/// A rule violation in a robot program. `step` is the index of the
/// top-level action (wake included) containing the problem.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("program must start with a wake action")]
    WakeMissing,
    #[error("step {step}: wake may only appear first")]
    ExtraWake { step: usize },
    #[error("wake keyword is empty")]
    EmptyWakeKeyword,
    #[error("program has no actions after wake")]
    EmptyBody,
    #[error("step {step}: `somewhere` is not a navigation target here")]
    IllegalTarget { step: usize },
    #[error("step {step}: variable `{var}` is used before it is stored")]
    UnboundVariable { var: String, step: usize },
    #[error("step {step}: `{name}` is not a lowercase identifier")]
    BadVarName { name: String, step: usize },
    #[error("step {step}: branch keyword is empty")]
    EmptyKeyword { step: usize },
}

/// The concrete place a `Contains` condition names, if any. A goto to
/// `somewhere` in the `then` arm of such a branch goes there.
pub fn branch_target(condition: &Condition) -> Option<Location> {
    match condition {
        Condition::Contains { keyword, .. } => canonicalize_location(keyword).ok().filter(|l| l.is_concrete()),
        _ => None,
    }
}

struct Walker {
    errors: Vec<ProgramError>,
}

impl Walker {
    fn use_var(&mut self, var: &str, bound: &BTreeSet<String>, step: usize) {
        if !bound.contains(var) {
            self.errors.push(ProgramError::UnboundVariable {
                var: var.to_string(),
                step,
            });
        }
    }

    fn template(&mut self, template: &str, bound: &BTreeSet<String>, step: usize) {
        for var in template_vars(template) {
            self.use_var(var, bound, step);
        }
    }

    fn block(&mut self, actions: &[Action], bound: &mut BTreeSet<String>, step: Option<usize>, target: Option<Location>) {
        for (i, action) in actions.iter().enumerate() {
            let step = step.unwrap_or(i + 1);
            self.action(action, bound, step, target);
        }
    }

    fn action(&mut self, action: &Action, bound: &mut BTreeSet<String>, step: usize, target: Option<Location>) {
        match action {
            Action::Wake { .. } => self.errors.push(ProgramError::ExtraWake { step }),
            Action::Goto { location } => {
                if *location == Location::Somewhere && target.is_none() {
                    self.errors.push(ProgramError::IllegalTarget { step });
                }
            }
            Action::Say { template } => self.template(template, bound, step),
            Action::Ask { template, store } => {
                self.template(template, bound, step);
                self.store(store, bound, step);
            }
            Action::Detect { store } => self.store(store, bound, step),
            Action::Branch {
                condition,
                then_steps,
                else_steps,
            } => {
                let var = condition.var();
                if is_var_name(var) {
                    self.use_var(var, bound, step);
                } else {
                    self.errors.push(ProgramError::BadVarName {
                        name: var.to_string(),
                        step,
                    });
                }
                if let Condition::Contains { keyword, .. } = condition {
                    if keyword.trim().is_empty() {
                        self.errors.push(ProgramError::EmptyKeyword { step });
                    }
                }
                let mut then_bound = bound.clone();
                self.block(then_steps, &mut then_bound, Some(step), branch_target(condition));
                let mut else_bound = bound.clone();
                self.block(else_steps, &mut else_bound, Some(step), None);
                *bound = then_bound.intersection(&else_bound).cloned().collect();
            }
        }
    }

    fn store(&mut self, name: &str, bound: &mut BTreeSet<String>, step: usize) {
        if is_var_name(name) {
            bound.insert(name.to_string());
        } else {
            self.errors.push(ProgramError::BadVarName {
                name: name.to_string(),
                step,
            });
        }
    }
}

/// Checks a flat action list: one wake, first; non-empty body; gotos to
/// `somewhere` only where a branch names the place; every variable stored
/// before use on every path.
pub fn validate_actions(actions: &[Action]) -> Vec<ProgramError> {
    let mut walker = Walker { errors: Vec::new() };
    let body = match actions.first() {
        Some(Action::Wake { keyword }) => {
            if keyword.trim().is_empty() {
                walker.errors.push(ProgramError::EmptyWakeKeyword);
            }
            &actions[1..]
        }
        _ => {
            walker.errors.push(ProgramError::WakeMissing);
            actions
        }
    };
    if body.is_empty() {
        walker.errors.push(ProgramError::EmptyBody);
    }
    let offset = actions.len() - body.len();
    let mut bound = BTreeSet::new();
    for (i, action) in body.iter().enumerate() {
        walker.action(action, &mut bound, i + offset, None);
    }
    walker.errors
}

pub fn validate_robot_program(program: &RobotProgram) -> Vec<ProgramError> {
    validate_actions(&program.to_actions())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wake() -> Action {
        Action::Wake { keyword: "go".into() }
    }

    #[test]
    fn wake_must_come_first() {
        let errs = validate_actions(&[Action::goto(Location::Pantry)]);
        assert_eq!(errs, vec![ProgramError::WakeMissing]);
        let errs = validate_actions(&[wake(), Action::goto(Location::Pantry), wake()]);
        assert_eq!(errs, vec![ProgramError::ExtraWake { step: 2 }]);
    }

    #[test]
    fn somewhere_outside_branch() {
        let errs = validate_actions(&[wake(), Action::goto(Location::Somewhere)]);
        assert_eq!(errs, vec![ProgramError::IllegalTarget { step: 1 }]);
    }

    #[test]
    fn somewhere_bound_by_branch_keyword() {
        let branch = |keyword: &str| Action::Branch {
            condition: Condition::Contains {
                var: "dest".into(),
                keyword: keyword.into(),
            },
            then_steps: vec![Action::goto(Location::Somewhere)],
            else_steps: vec![],
        };
        let ask = Action::ask("Where to?", "dest");
        assert!(validate_actions(&[wake(), ask.clone(), branch("meeting room")]).is_empty());
        assert_eq!(
            validate_actions(&[wake(), ask, branch("soon")]),
            vec![ProgramError::IllegalTarget { step: 2 }]
        );
    }

    #[test]
    fn variables_bound_on_one_arm_only_are_unbound_after() {
        let prog = [
            wake(),
            Action::detect("seen"),
            Action::Branch {
                condition: Condition::IsTrue { var: "seen".into() },
                then_steps: vec![Action::ask("Name?", "name")],
                else_steps: vec![Action::say("nobody")],
            },
            Action::say("Bye {name}"),
        ];
        assert_eq!(
            validate_actions(&prog),
            vec![ProgramError::UnboundVariable { var: "name".into(), step: 3 }]
        );
    }

    #[test]
    fn bad_names_and_empty_parts() {
        let errs = validate_actions(&[Action::Wake { keyword: " ".into() }]);
        assert_eq!(errs, vec![ProgramError::EmptyWakeKeyword, ProgramError::EmptyBody]);
        let errs = validate_actions(&[wake(), Action::ask("q", "Reply")]);
        assert_eq!(errs, vec![ProgramError::BadVarName { name: "Reply".into(), step: 1 }]);
    }
}
