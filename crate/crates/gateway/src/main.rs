use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use taskviz_core::draw::{compile_frames, parse_draw_script, render_svg, FrameTiming};
use taskviz_core::domain::{DrawConfig, DrawMode};
use taskviz_core::sim::{default_map, execute, load_map, SimEvent};
use taskviz_core::task::{compile_task_steps, parse_ir, serialize_ir, validate_robot_program};
use taskviz_core::Map;
use taskviz_gateway::http::{HttpConfig, HttpProvider};
use taskviz_gateway::hub::{Hub, HubConfig, ProviderSource, SystemClock};
use taskviz_gateway::log::replay_file;
use taskviz_gateway::runner::{run_scenario, scenario_hub, to_jsonl};
use taskviz_gateway::{bundled, load_scenario, parse_scenario, Scenario};

#[derive(Parser)]
#[command(name = "taskviz", version, about = "Robot task communication gateway and tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProviderKind {
    /// Scripted replies from a scenario file.
    Mock,
    /// A chat-completions endpoint configured through PROVIDER_* variables.
    Http,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the WebSocket gateway.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long, value_enum, default_value = "mock")]
        provider: ProviderKind,
        /// Bundled scenario name or a scenario file (mock provider only).
        #[arg(long, default_value = "visitor-reception")]
        scenario: String,
        /// Map geometry JSON. Defaults to the built-in office map.
        #[arg(long)]
        map: Option<PathBuf>,
        /// Directory for session logs and snapshots.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Run a scenario against an in-process gateway and print the server stream as JSON lines.
    Run {
        scenario: String,
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Replay a session log and print the resulting session state.
    Replay {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Render a drawing script to SVG (the final frame of its animation).
    Render {
        #[arg(long)]
        draw: PathBuf,
        #[arg(long, value_enum, default_value = "none")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Compile task steps, one per line, into the program IR.
    Compile {
        #[arg(long)]
        steps: PathBuf,
        #[arg(long)]
        wake: Option<String>,
    },
    /// Execute a program IR against a JSON array of events and print the trace.
    Simulate {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        events: Option<PathBuf>,
        #[arg(long)]
        map: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    None,
    Feedback,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn map_from(path: Option<&Path>) -> Result<Map> {
    match path {
        None => Ok(default_map()),
        Some(p) => Ok(load_map(&read(p)?)?),
    }
}

fn scenario_from(name: &str) -> Result<Scenario> {
    if let Some((_, src)) = bundled::ALL.iter().find(|(n, _)| *n == name) {
        return Ok(parse_scenario(src)?);
    }
    load_scenario(Path::new(name)).with_context(|| format!("scenario `{name}`"))
}

#[tokio::main]
async fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match cli.command {
        Command::Serve {
            addr,
            provider,
            scenario,
            map,
            data,
        } => {
            let map = map_from(map.as_deref())?;
            let (provider, settings) = match provider {
                ProviderKind::Mock => {
                    let scenario = scenario_from(&scenario)?;
                    (ProviderSource::Scenario(Arc::new(scenario.script)), Default::default())
                }
                ProviderKind::Http => {
                    let config = HttpConfig::from_env()?;
                    let settings = config.settings();
                    (ProviderSource::Shared(Arc::new(HttpProvider::new(config))), settings)
                }
            };
            let hub = Hub::new(HubConfig {
                map,
                timing: FrameTiming::default(),
                provider,
                settings,
                data_dir: data,
                clock: Arc::new(SystemClock),
            });
            taskviz_gateway::server::serve(hub, addr, |a| tracing::info!("listening on {a}")).await?;
        }
        Command::Run { scenario, map, data } => {
            let scenario = scenario_from(&scenario)?;
            let hub = scenario_hub(&scenario, map_from(map.as_deref())?, data);
            print!("{}", to_jsonl(&run_scenario(&hub, &scenario).await));
        }
        Command::Replay { log, map } => {
            let session = replay_file(&log, map_from(map.as_deref())?, FrameTiming::default())?;
            println!("{}", serde_json::to_string_pretty(&session.state)?);
        }
        Command::Render { draw, mode, out, map } => {
            let program = parse_draw_script(&read(&draw)?).map_err(|errors| {
                let lines: Vec<_> = errors.iter().map(|e| e.to_string()).collect();
                anyhow::anyhow!("invalid drawing script:\n{}", lines.join("\n"))
            })?;
            let mode = match mode {
                Mode::None => DrawMode::None,
                Mode::Feedback => DrawMode::Feedback,
            };
            let frames = compile_frames(&program, &DrawConfig::new(mode, vec![]), &FrameTiming::default())?;
            let Some(last) = frames.frames.last() else {
                bail!("drawing produced no frames");
            };
            let svg = render_svg(last, &map_from(map.as_deref())?)?;
            match out {
                Some(path) => std::fs::write(&path, svg).with_context(|| format!("cannot write {}", path.display()))?,
                None => print!("{svg}"),
            }
        }
        Command::Compile { steps, wake } => {
            let texts: Vec<String> = read(&steps)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_string)
                .collect();
            let program = compile_task_steps(&texts, wake.as_deref())?;
            print!("{}", serialize_ir(&program));
        }
        Command::Simulate { program, events, map } => {
            let program = parse_ir(&read(&program)?)?;
            let issues = validate_robot_program(&program);
            if !issues.is_empty() {
                let lines: Vec<_> = issues.iter().map(|e| e.to_string()).collect();
                bail!("invalid program:\n{}", lines.join("\n"));
            }
            let events: Vec<SimEvent> = match events {
                Some(p) => serde_json::from_str(&read(&p)?).context("events must be a JSON array")?,
                None => Vec::new(),
            };
            let trace = execute(&program, &map_from(map.as_deref())?, &events)?;
            for entry in trace {
                println!("{}", serde_json::to_string(&entry)?);
            }
        }
    }
    Ok(())
}
