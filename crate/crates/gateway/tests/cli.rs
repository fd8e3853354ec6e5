use std::path::{Path, PathBuf};
use std::process::Command;

use taskviz_gateway::{load_scenario, ScenarioError};

fn taskviz(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_taskviz")).args(args).output().unwrap();
    (
        out.status.success(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn task_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tasks").join(name)
}

#[test]
fn compile_then_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let (ok, ir, err) = taskviz(&["compile", "--steps", task_file("h1-visitor-guidance.txt").to_str().unwrap()]);
    assert!(ok, "{err}");
    assert!(ir.starts_with("WAKE \"visitor reception\"\n"));
    let program = dir.path().join("h1.ir");
    std::fs::write(&program, &ir).unwrap();
    let events = dir.path().join("events.json");
    std::fs::write(
        &events,
        r#"[{"kind":"wakeUttered","keyword":"visitor reception","t":0},
            {"kind":"reply","text":"Ada","t":7},
            {"kind":"reply","text":"Employee office","t":8}]"#,
    )
    .unwrap();
    let (ok, trace, err) = taskviz(&[
        "simulate",
        "--program",
        program.to_str().unwrap(),
        "--events",
        events.to_str().unwrap(),
    ]);
    assert!(ok, "{err}");
    let last: serde_json::Value = serde_json::from_str(trace.lines().last().unwrap()).unwrap();
    assert_eq!(last["kind"], "finished");
    assert!(trace.contains("\"arm\":\"else\""));
}

#[test]
fn compile_reports_bad_steps() {
    let dir = tempfile::tempdir().unwrap();
    let steps = dir.path().join("bad.txt");
    std::fs::write(&steps, "start with keyword hi\nfly to the moon\n").unwrap();
    let (ok, _, err) = taskviz(&["compile", "--steps", steps.to_str().unwrap()]);
    assert!(!ok);
    assert!(err.contains("fly to the moon"), "{err}");
}

#[test]
fn render_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("d.txt");
    std::fs::write(&script, "link(\"Starting point\", \"Pantry\", \"blue\", \"solid\", \"go\", 1)\n").unwrap();
    let out = dir.path().join("d.svg");
    let (ok, _, err) = taskviz(&["render", "--draw", script.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(ok, "{err}");
    let svg = std::fs::read_to_string(out).unwrap();
    assert!(svg.starts_with("<?xml") && svg.contains("<svg"));

    std::fs::write(&script, "link(\"Starting point\", \"Pantry\", \"teal\", \"solid\", \"go\", 1)\n").unwrap();
    let (ok, _, err) = taskviz(&["render", "--draw", script.to_str().unwrap()]);
    assert!(!ok);
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn run_then_replay() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().to_str().unwrap();
    let (ok, first, err) = taskviz(&["run", "office-patrol", "--data", data]);
    assert!(ok, "{err}");
    let (_, second, _) = taskviz(&["run", "office-patrol"]);
    assert_eq!(first, second);
    let log = dir.path().join("office-patrol.jsonl");
    let (ok, state, err) = taskviz(&["replay", "--log", log.to_str().unwrap()]);
    assert!(ok, "{err}");
    let state: serde_json::Value = serde_json::from_str(&state).unwrap();
    assert_eq!(state["phase"], "deployed");
    let (ok, _, err) = taskviz(&["run", "no-such-scenario"]);
    assert!(!ok);
    assert!(err.contains("no-such-scenario"));
}

fn load_scenario_text(path: &Path, src: &str) -> Result<taskviz_gateway::Scenario, ScenarioError> {
    std::fs::write(path, src).unwrap();
    load_scenario(path)
}

#[test]
fn scenario_files_report_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    let src = "name = \"x\"\n\n[[step]]\nutterance = \"go to the pantry\"\n[step.reply]\nspeak = \"ok\"\nstate = \"communicating\"\ndraw = \"feedback\"\ntask = [\"go to Pantry\"]\ndraw_script = '''\nmark(\"Pantry\", \"green\", \"wakeup\", 1)\nmark(\"Pantry\", \"green\", \"wakeup\", 1)\n'''\n";
    std::fs::write(&path, src).unwrap();
    let err = load_scenario(&path).unwrap_err();
    assert!(matches!(err, ScenarioError::DrawIssue { line: 12, .. }), "{err:?}");

    let single = src.replacen("mark(\"Pantry\", \"green\", \"wakeup\", 1)\n", "", 1);
    assert!(load_scenario_text(&path, &single).is_ok());
    std::fs::write(&path, single.replace("state = \"communicating\"", "state = \"sleeping\"")).unwrap();
    let err = load_scenario(&path).unwrap_err();
    assert!(matches!(err, ScenarioError::Invalid { .. }), "{err:?}");

    std::fs::write(&path, "name = \"x\"\n[[step]]\naction = \"deploy\"\nrejected = [\"x\"]\n").unwrap();
    assert_eq!(load_scenario(&path).unwrap_err().line(), Some(2));

    assert!(matches!(load_scenario(&dir.path().join("missing.toml")), Err(ScenarioError::Io(_))));
}
