//! Robot task programs: actions, the step grammar, the IR text form,
//! validation and compilation.

mod action;
mod compile;
mod ir;
mod step;
mod validate;

pub use action::{is_var_name, template_vars, Action, Condition, RobotProgram};
pub use compile::{compile_flow, compile_task_steps, count_actions, count_commands, CompileError};
pub use ir::{parse_ir, parse_ir_actions, serialize_ir, IrSyntaxError};
pub use step::{format_step, parse_step, parse_steps, StepError};
pub use validate::{branch_target, validate_actions, validate_robot_program, ProgramError};
