use thiserror::Error;

use super::action::{Action, RobotProgram};
use super::step::{parse_step, StepError};
use super::validate::{validate_actions, ProgramError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("no task steps to compile")]
    EmptySteps,
    #[error("no wake keyword")]
    MissingWake,
    /// `step` is the 0-based index into the compiled step list.
    #[error("step {step}: variable `{var}` is used before it is stored")]
    UnboundVariable { var: String, step: usize },
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("invalid program: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<ProgramError>),
}

/// Builds a program from `steps` behind a wake on `wake`. The steps are
/// kept verbatim; nothing is inserted.
pub fn compile_flow(steps: &[Action], wake: &str) -> Result<RobotProgram, CompileError> {
    if steps.is_empty() {
        return Err(CompileError::EmptySteps);
    }
    let program = RobotProgram::new(wake.trim(), steps.to_vec());
    let errors = validate_actions(&program.to_actions());
    if let Some(ProgramError::UnboundVariable { var, step }) =
        errors.iter().find(|e| matches!(e, ProgramError::UnboundVariable { .. }))
    {
        return Err(CompileError::UnboundVariable {
            var: var.clone(),
            step: step - 1,
        });
    }
    if !errors.is_empty() {
        return Err(CompileError::Invalid(errors));
    }
    Ok(program)
}

/// Parses step texts and compiles them. A leading `start with keyword K`
/// step supplies the wake word, taking precedence over `wake`.
pub fn compile_task_steps(texts: &[String], wake: Option<&str>) -> Result<RobotProgram, CompileError> {
    let mut actions = texts.iter().map(|t| parse_step(t)).collect::<Result<Vec<_>, _>>()?;
    let wake = match actions.first() {
        Some(Action::Wake { keyword }) => {
            let keyword = keyword.clone();
            actions.remove(0);
            keyword
        }
        _ => wake.ok_or(CompileError::MissingWake)?.to_string(),
    };
    compile_flow(&actions, &wake)
}

/// Number of robot commands on the longest path: the wake plus every
/// action, with a branch contributing its longer arm.
pub fn count_commands(program: &RobotProgram) -> usize {
    1 + count_actions(&program.body)
}

pub fn count_actions(actions: &[Action]) -> usize {
    actions
        .iter()
        .map(|a| match a {
            Action::Branch {
                then_steps, else_steps, ..
            } => count_actions(then_steps).max(count_actions(else_steps)),
            _ => 1,
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Location;
    use crate::task::Condition;

    #[test]
    fn four_steps_and_wake() {
        let steps = vec![
            Action::goto(Location::MeetingRoom),
            Action::say("Please leave"),
            Action::goto(Location::Pantry),
            Action::say("Please leave"),
        ];
        let p = compile_flow(&steps, "patrol").unwrap();
        assert_eq!(p.body, steps);
        assert_eq!(count_commands(&p), 5);
    }

    #[test]
    fn errors() {
        assert_eq!(compile_flow(&[], "x"), Err(CompileError::EmptySteps));
        assert_eq!(
            compile_flow(&[Action::goto(Location::Gym), Action::say("{eta} min")], "x"),
            Err(CompileError::UnboundVariable {
                var: "eta".into(),
                step: 1
            })
        );
        assert!(matches!(
            compile_flow(&[Action::goto(Location::Somewhere)], "x"),
            Err(CompileError::Invalid(_))
        ));
    }

    #[test]
    fn branch_counts_longer_arm() {
        let p = RobotProgram::new(
            "w",
            vec![
                Action::detect("seen"),
                Action::Branch {
                    condition: Condition::IsTrue { var: "seen".into() },
                    then_steps: vec![Action::say("a"), Action::say("b"), Action::say("c")],
                    else_steps: vec![Action::say("d")],
                },
            ],
        );
        assert_eq!(count_commands(&p), 5);
    }

    #[test]
    fn wake_from_first_step() {
        let texts: Vec<String> = ["start with keyword patrol", "go to Gym"].map(String::from).to_vec();
        let p = compile_task_steps(&texts, Some("ignored")).unwrap();
        assert_eq!(p.wake, "patrol");
        assert_eq!(p.body, vec![Action::goto(Location::Gym)]);
        let texts = vec!["go to Gym".to_string()];
        assert_eq!(compile_task_steps(&texts, None), Err(CompileError::MissingWake));
    }
}
