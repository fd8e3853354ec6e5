//! Discrete-event robot simulation: map geometry, virtual time, events,
//! traces and the program interpreter.

mod event;
mod interp;
mod map;
mod time;

pub use event::{Arm, SimEvent, Trace, TraceEntry, TraceKind};
pub use interp::{execute, Interpreter, SimError, Status, Value};
pub use map::{default_map, load_map, MapError, MapGeometry, Point, DEFAULT_MAP_JSON};
pub use time::{as_secs, micros_from_secs, secs_from_micros, Micros, VirtualClock, DETECT_WINDOW, MICROS_PER_SECOND};
