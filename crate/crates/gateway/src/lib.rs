//! Session gateway for the taskviz service: the WebSocket wire schema,
//! the session registry, JSONL persistence with replay, scenario scripts
//! for the mock provider and a chat-completions provider.

pub mod http;
pub mod hub;
pub mod log;
pub mod runner;
pub mod scenario;
pub mod server;
pub mod session;
pub mod wire;

pub use hub::{Hub, HubConfig, ProviderSource};
pub use scenario::{load_scenario, parse_scenario, Scenario, ScenarioError};
pub use session::Session;
pub use wire::{GatewayError, MessageType, WireMessage};

/// Scenarios shipped with the gateway.
pub mod bundled {
    pub const VISITOR_RECEPTION: &str = include_str!("../scenarios/visitor-reception.toml");
    pub const OFFICE_PATROL: &str = include_str!("../scenarios/office-patrol.toml");
    pub const EMPLOYEE_GATHERING: &str = include_str!("../scenarios/employee-gathering.toml");

    pub const ALL: [(&str, &str); 3] = [
        ("visitor-reception", VISITOR_RECEPTION),
        ("office-patrol", OFFICE_PATROL),
        ("employee-gathering", EMPLOYEE_GATHERING),
    ];
}
