//! Drives a scenario's scripted client against a hub.

use std::sync::Arc;

use taskviz_core::dialogue::ProviderSettings;
use taskviz_core::draw::FrameTiming;
use taskviz_core::Map;

use crate::hub::{CountingClock, Hub, HubConfig, ProviderSource};
use crate::scenario::Scenario;
use crate::wire::WireMessage;

/// A hub configured to answer with the scenario's scripted provider.
pub fn scenario_hub(scenario: &Scenario, map: Map, data_dir: Option<std::path::PathBuf>) -> Hub {
    Hub::new(HubConfig {
        map,
        timing: FrameTiming::default(),
        provider: ProviderSource::Scenario(Arc::new(scenario.script.clone())),
        settings: ProviderSettings::default(),
        data_dir,
        clock: Arc::new(CountingClock::default()),
    })
}

/// Sends every client message in order, waiting for each response.
/// Returns the full server stream.
pub async fn run_scenario(hub: &Hub, scenario: &Scenario) -> Vec<WireMessage> {
    let mut stream = Vec::new();
    for message in scenario.client_messages() {
        stream.extend(hub.request(message).await);
    }
    stream
}

/// The stream as JSON lines.
pub fn to_jsonl(stream: &[WireMessage]) -> String {
    stream.iter().map(|m| m.to_json() + "\n").collect()
}
