//! A resumable interpreter for robot programs on virtual time.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::domain::Location;
use crate::scalar::Scalar;
use crate::task::{branch_target, template_vars, Action, Condition, RobotProgram};

use super::event::{Arm, SimEvent, Trace, TraceEntry, TraceKind};
use super::map::MapGeometry;
use super::time::{micros_from_secs, Micros, VirtualClock, DETECT_WINDOW};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("events ran out before the wake keyword was heard")]
    NoWake,
    #[error("events ran out while waiting for a reply to `{var}`")]
    EventsExhausted { var: String },
    #[error("variable `{var}` is not bound")]
    UnboundVariable { var: String },
    #[error("event at {t} µs precedes an earlier event at {previous} µs")]
    NonMonotonicEvents { t: Micros, previous: Micros },
    #[error("`{0}` is not a navigation target")]
    IllegalTarget(Location),
    #[error("no reply for `{var}` within the idle timeout")]
    AskTimeout { var: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Text(String),
    Bool(bool),
}

impl Value {
    pub fn text(&self) -> String {
        match self {
            Value::Text(t) => t.clone(),
            Value::Bool(b) => b.to_string(),
        }
    }

    /// Booleans as themselves; text is true when it opens with an
    /// affirmative word.
    pub fn truthy(&self) -> bool {
        const YES: [&str; 10] = ["yes", "yeah", "yep", "sure", "ok", "okay", "ready", "true", "y", "of course"];
        match self {
            Value::Bool(b) => *b,
            Value::Text(t) => {
                let t = t.trim().to_lowercase();
                YES.iter().any(|w| {
                    t.strip_prefix(w)
                        .is_some_and(|rest| rest.chars().next().is_none_or(|c| !c.is_alphanumeric()))
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Op {
    Goto(Location),
    Say(String),
    Ask(String, String),
    Detect(String),
    /// Evaluate; on false jump to the target.
    Test(Condition, usize),
    Jump(usize),
}

fn lower(actions: &[Action], target: Option<Location>, ops: &mut Vec<Op>) {
    for action in actions {
        match action {
            Action::Wake { .. } => {}
            Action::Goto { location } => {
                let to = match (*location, target) {
                    (Location::Somewhere, Some(t)) => t,
                    (l, _) => l,
                };
                ops.push(Op::Goto(to));
            }
            Action::Say { template } => ops.push(Op::Say(template.clone())),
            Action::Ask { template, store } => ops.push(Op::Ask(template.clone(), store.clone())),
            Action::Detect { store } => ops.push(Op::Detect(store.clone())),
            Action::Branch {
                condition,
                then_steps,
                else_steps,
            } => {
                let test = ops.len();
                ops.push(Op::Test(condition.clone(), 0));
                lower(then_steps, branch_target(condition), ops);
                let jump = ops.len();
                ops.push(Op::Jump(0));
                let else_start = ops.len();
                lower(else_steps, None, ops);
                let end = ops.len();
                ops[test] = Op::Test(condition.clone(), else_start);
                ops[jump] = Op::Jump(end);
            }
        }
    }
}

/// What the interpreter is waiting for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    AwaitWake,
    Running,
    AwaitReply { var: String, since: Micros },
    AwaitHuman { var: String, deadline: Micros },
    Finished,
    Failed(SimError),
}

/// Runs one program against a stream of events. Feed events with
/// [`Interpreter::push`], then call [`Interpreter::run`] to make progress.
#[derive(Debug, Clone)]
pub struct Interpreter<S> {
    ops: Vec<Op>,
    wake: String,
    map: MapGeometry<S>,
    pc: usize,
    clock: VirtualClock,
    at: Location,
    vars: BTreeMap<String, Value>,
    queue: VecDeque<SimEvent>,
    last_event: Micros,
    closed: bool,
    ask_timeout: Option<Micros>,
    status: Status,
    trace: Trace,
}

impl<S: Scalar> Interpreter<S> {
    pub fn new(program: &RobotProgram, map: MapGeometry<S>) -> Self {
        let mut ops = Vec::new();
        lower(&program.body, None, &mut ops);
        Interpreter {
            ops,
            wake: program.wake.trim().to_lowercase(),
            map,
            pc: 0,
            clock: VirtualClock::default(),
            at: Location::StartingPoint,
            vars: BTreeMap::new(),
            queue: VecDeque::new(),
            last_event: 0,
            closed: false,
            ask_timeout: None,
            status: Status::AwaitWake,
            trace: Vec::new(),
        }
    }

    /// Aborts a test whose question stays unanswered for `timeout`.
    pub fn with_ask_timeout(mut self, timeout: Micros) -> Self {
        self.ask_timeout = Some(timeout);
        self
    }

    pub fn status(&self) -> &Status {
        &self.status
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    pub fn now(&self) -> Micros {
        self.clock.now()
    }

    pub fn location(&self) -> Location {
        self.at
    }

    pub fn is_done(&self) -> bool {
        matches!(self.status, Status::Finished | Status::Failed(_))
    }

    /// Queues an event. Event times must not go backwards.
    pub fn push(&mut self, event: SimEvent) -> Result<(), SimError> {
        if event.t() < self.last_event {
            return Err(SimError::NonMonotonicEvents {
                t: event.t(),
                previous: self.last_event,
            });
        }
        self.last_event = event.t();
        self.queue.push_back(event);
        Ok(())
    }

    /// Declares that no further events will arrive.
    pub fn close(&mut self) {
        self.closed = true;
    }

    /// Lets virtual time pass with no new events, resolving timeouts.
    pub fn advance_to(&mut self, t: Micros) -> Vec<TraceEntry> {
        let before = self.trace.len();
        match &self.status {
            Status::AwaitHuman { var, deadline } if t >= *deadline => {
                let (var, deadline) = (var.clone(), *deadline);
                self.clock.advance_to(deadline);
                self.detected(var, false);
                self.run();
            }
            Status::AwaitReply { var, since } => {
                if let Some(limit) = self.ask_timeout {
                    if t >= since + limit {
                        let var = var.clone();
                        self.clock.advance_to(since + limit);
                        self.status = Status::Failed(SimError::AskTimeout { var });
                    }
                }
            }
            _ => {}
        }
        self.trace[before..].to_vec()
    }

    fn emit(&mut self, kind: TraceKind) {
        self.trace.push(TraceEntry {
            t: self.clock.now(),
            kind,
        });
    }

    fn fill(&self, template: &str) -> Result<String, SimError> {
        let mut out = template.to_string();
        for var in template_vars(template) {
            let value = self.vars.get(var).ok_or_else(|| SimError::UnboundVariable { var: var.into() })?;
            out = out.replace(&format!("{{{var}}}"), &value.text());
        }
        Ok(out)
    }

    fn detected(&mut self, var: String, value: bool) {
        self.vars.insert(var.clone(), Value::Bool(value));
        self.emit(TraceKind::Detected { var, value });
        self.pc += 1;
        self.status = Status::Running;
    }

    fn take(&mut self, pred: impl Fn(&SimEvent) -> bool) -> Option<SimEvent> {
        let i = self.queue.iter().position(pred)?;
        self.queue.remove(i)
    }

    fn fail(&mut self, err: SimError) {
        self.status = Status::Failed(err);
    }

    /// Executes as far as the queued events allow. Returns the new entries.
    pub fn run(&mut self) -> Vec<TraceEntry> {
        let before = self.trace.len();
        loop {
            match self.status.clone() {
                Status::Finished | Status::Failed(_) => break,
                Status::AwaitWake => {
                    let wake = self.wake.clone();
                    let heard = self.queue.iter().position(
                        |e| matches!(e, SimEvent::WakeUttered { keyword, .. } if keyword.trim().to_lowercase() == wake),
                    );
                    match heard {
                        Some(i) => {
                            // Anything queued before the wake word is not for the robot.
                            let t = self.queue[i].t();
                            self.queue.drain(..=i);
                            self.clock.advance_to(t);
                            self.status = Status::Running;
                            self.pc = 0;
                        }
                        None if self.closed => {
                            self.fail(SimError::NoWake);
                            break;
                        }
                        None => {
                            self.queue.retain(|q| matches!(q, SimEvent::WakeUttered { .. }));
                            break;
                        }
                    }
                }
                Status::AwaitReply { var, .. } => match self.take(|e| matches!(e, SimEvent::Reply { .. })) {
                    Some(SimEvent::Reply { text, t }) => {
                        self.clock.advance_to(t);
                        self.vars.insert(var.clone(), Value::Text(text.clone()));
                        self.emit(TraceKind::GotReply { var, text });
                        self.pc += 1;
                        self.status = Status::Running;
                    }
                    _ if self.closed => {
                        self.fail(SimError::EventsExhausted { var });
                        break;
                    }
                    _ => break,
                },
                Status::AwaitHuman { var, deadline } => {
                    let start = deadline - DETECT_WINDOW;
                    let seen = self
                        .queue
                        .iter()
                        .position(|e| matches!(e, SimEvent::HumanPresent { .. }))
                        .filter(|&i| self.queue[i].t() <= deadline);
                    if let Some(i) = seen {
                        let t = self.queue.remove(i).map_or(start, |e| e.t());
                        self.clock.advance_to(t.max(start));
                        self.detected(var, true);
                    } else if self.closed || self.last_event > deadline {
                        self.clock.advance_to(deadline);
                        self.detected(var, false);
                    } else {
                        break;
                    }
                }
                Status::Running => {
                    if let Err(err) = self.step() {
                        self.fail(err);
                    }
                }
            }
        }
        self.trace[before..].to_vec()
    }

    /// Executes instructions until one blocks or the program ends.
    fn step(&mut self) -> Result<(), SimError> {
        while let Some(op) = self.ops.get(self.pc).cloned() {
            match op {
                Op::Goto(to) => {
                    if !to.is_concrete() {
                        return Err(SimError::IllegalTarget(to));
                    }
                    let secs = self.map.travel_seconds(self.at, to).ok_or(SimError::IllegalTarget(to))?;
                    self.clock.advance(micros_from_secs(secs.to_f64_lossy()).unwrap_or(0));
                    self.at = to;
                    self.emit(TraceKind::Arrived { location: to });
                    self.pc += 1;
                }
                Op::Say(template) => {
                    let text = self.fill(&template)?;
                    self.emit(TraceKind::Spoke { text });
                    self.pc += 1;
                }
                Op::Ask(template, var) => {
                    let text = self.fill(&template)?;
                    self.emit(TraceKind::Asked { text });
                    self.status = Status::AwaitReply {
                        var,
                        since: self.clock.now(),
                    };
                    return Ok(());
                }
                Op::Detect(var) => {
                    self.status = Status::AwaitHuman {
                        var,
                        deadline: self.clock.now() + DETECT_WINDOW,
                    };
                    return Ok(());
                }
                Op::Test(condition, else_start) => {
                    let value = self.vars.get(condition.var()).ok_or_else(|| SimError::UnboundVariable {
                        var: condition.var().into(),
                    })?;
                    let taken = match &condition {
                        Condition::Contains { keyword, .. } => {
                            value.text().to_lowercase().contains(&keyword.trim().to_lowercase())
                        }
                        Condition::IsTrue { .. } => value.truthy(),
                        Condition::IsFalse { .. } => !value.truthy(),
                    };
                    self.emit(TraceKind::BranchTaken {
                        arm: if taken { Arm::Then } else { Arm::Else },
                    });
                    self.pc = if taken { self.pc + 1 } else { else_start };
                }
                Op::Jump(to) => self.pc = to,
            }
        }
        self.emit(TraceKind::Finished);
        self.status = Status::Finished;
        Ok(())
    }
}

/// Runs `program` to completion against a fixed event script.
pub fn execute<S: Scalar>(
    program: &RobotProgram,
    map: &MapGeometry<S>,
    events: &[SimEvent],
) -> Result<Trace, SimError> {
    let mut interp = Interpreter::new(program, map.clone());
    for event in events {
        interp.push(event.clone())?;
    }
    interp.close();
    interp.run();
    match interp.status {
        Status::Finished => Ok(interp.trace),
        Status::Failed(err) => Err(err),
        _ => unreachable!("a closed interpreter always finishes or fails"),
    }
}
