use serde::{Deserialize, Serialize};

use super::{closed_enum, DrawMode};

closed_enum! {
    /// Customization progress reported by the dialogue provider.
    pub enum OutputState("state") {
        Communicating => "communicating",
        Confirmed => "confirmed",
    }
}

/// Structured output of one dialogue turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobotOutput {
    pub speak: String,
    pub state: OutputState,
    pub draw: DrawMode,
    pub task: Vec<String>,
}
