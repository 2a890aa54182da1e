use std::net::TcpListener;
use std::process::{Command, Output, Stdio};
use std::thread;
use std::time::Duration;

fn empathica(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_empathica"))
        .args(args)
        .env_remove("EMPATHICA_PORT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn line_value<'a>(text: &'a str, key: &str) -> Vec<&'a str> {
    text.lines()
        .filter_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
        .collect()
}

#[test]
fn solve_vehicles_full() {
    let o = empathica(&[
        "solve",
        "--builtin",
        "vehicles",
        "--all",
        "full",
        "--format",
        "lines",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(line_value(&text, "joint"), ["wait_A,drive_B"]);
    assert_eq!(line_value(&text, "utility"), ["A 0.9", "B 1"]);
    assert_eq!(line_value(&text, "choice"), ["A wait_A", "B drive_B"]);
    assert_eq!(line_value(&text, "conflict"), ["true"]);
}

#[test]
fn solve_concert_naive() {
    let o = empathica(&[
        "solve",
        "--builtin",
        "concert",
        "--all",
        "naive",
        "--format",
        "lines",
    ]);
    let text = stdout(&o);
    assert_eq!(line_value(&text, "joint"), ["Bach_A,Mozart_B"]);
    assert_eq!(line_value(&text, "utility"), ["A 1", "B 1"]);
}

#[test]
fn per_agent_overrides() {
    let o = empathica(&[
        "solve",
        "--builtin",
        "vehicles",
        "--all",
        "full",
        "--agent",
        "B=naive",
        "--format",
        "lines",
    ]);
    let text = stdout(&o);
    assert_eq!(line_value(&text, "algorithm"), ["A full", "B naive"]);
    assert_eq!(line_value(&text, "joint"), ["wait_A,drive_B"]);
}

#[test]
fn human_output_names_the_outcome() {
    let o = empathica(&["solve", "--builtin", "vehicles"]);
    let text = stdout(&o);
    assert!(text.contains("joint profile: (wait_A, drive_B)"), "{text}");
}

#[test]
fn compare_rows() {
    let o = empathica(&["compare", "--builtin", "concert", "--format", "lines"]);
    let rows = stdout(&o);
    assert_eq!(
        line_value(&rows, "row"),
        [
            "naive Bach_A,Mozart_B 1 1",
            "lazy Mozart_A,Mozart_B 3 4",
            "full Mozart_A,Mozart_B 3 4"
        ]
    );
    let rows = stdout(&empathica(&[
        "compare",
        "--builtin",
        "vehicles",
        "--format",
        "lines",
    ]));
    let r = line_value(&rows, "row");
    assert_eq!(r[1].strip_prefix("lazy"), r[2].strip_prefix("full"));
}

#[test]
fn compare_without_conflict_has_identical_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("agree.scenario.json");
    std::fs::write(
        &path,
        r#"{"version": 1, "name": "agree",
            "agents": [{"id": "A", "actions": ["x_A", "y_A"]}, {"id": "B", "actions": ["x_B", "y_B"]}],
            "utilities": {
              "A": {"mode": "direct", "table": [
                {"profile": ["x_A", "x_B"], "value": 3}, {"profile": ["x_A", "y_B"], "value": 1},
                {"profile": ["y_A", "x_B"], "value": 0}, {"profile": ["y_A", "y_B"], "value": 2}]},
              "B": {"mode": "direct", "table": [
                {"profile": ["x_A", "x_B"], "value": 5}, {"profile": ["x_A", "y_B"], "value": 1},
                {"profile": ["y_A", "x_B"], "value": 1}, {"profile": ["y_A", "y_B"], "value": 4}]}}}"#,
    )
    .unwrap();
    let o = empathica(&["compare", path.to_str().unwrap(), "--format", "lines"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<&str> = line_value(&text, "row")
        .iter()
        .map(|r| r.split_once(' ').unwrap().1)
        .collect();
    assert_eq!(rows, ["x_A,x_B 3 5"; 3]);
}

#[test]
fn equilibria_primed() {
    let text = stdout(&empathica(&[
        "equilibria",
        "--builtin",
        "vehicles",
        "--primed",
        "--format",
        "lines",
    ]));
    assert_eq!(line_value(&text, "equilibria"), ["2"]);
    assert_eq!(
        line_value(&text, "equilibrium"),
        ["drive_A,wait_B", "wait_A,drive_B"]
    );
}

#[test]
fn verify_builtins() {
    for name in ["vehicles", "concert"] {
        for alg in ["naive", "lazy", "full"] {
            let o = empathica(&["verify", "--builtin", name, "--all", alg]);
            assert!(o.status.success(), "{name} {alg}: {}", stdout(&o));
        }
    }
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = empathica(&[
            "gen",
            "--seed",
            "7",
            "--agents",
            "2",
            "--actions",
            "3",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    // and the generated file is a solvable scenario
    let o = empathica(&["verify", a.to_str().unwrap(), "--all", "lazy"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("concert.scenario.json");
    let o = empathica(&[
        "export",
        "--builtin",
        "concert",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let from_file = stdout(&empathica(&["export", path.to_str().unwrap(), "--digest"]));
    let builtin = stdout(&empathica(&["export", "--builtin", "concert", "--digest"]));
    assert_eq!(from_file, builtin);
    assert_eq!(builtin.trim().len(), 64);
}

#[test]
fn exit_codes() {
    let o = empathica(&["solve", "missing.scenario.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.scenario.json"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"version\": 1,,}").unwrap();
    let o = empathica(&["solve", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));

    let o = empathica(&["solve", "--builtin", "vehicles", "--agent", "Z=full"]);
    assert_eq!(o.status.code(), Some(1));

    for usage in [
        vec!["solve"],
        vec!["solve", "--builtin", "chicken"],
        vec!["solve", "--builtin", "vehicles", "--all", "greedy"],
        vec!["solve", "--builtin", "vehicles", "--agent", "A"],
        vec!["solve", "x.json", "--builtin", "vehicles"],
        vec!["frobnicate"],
    ] {
        assert_eq!(empathica(&usage).status.code(), Some(2), "{usage:?}");
    }
    let o = empathica(&["gen", "--agents", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn serve_and_agents_over_the_network() {
    let port = TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port()
        .to_string();
    let server = Command::new(env!("CARGO_BIN_EXE_empathica"))
        .args(["serve", "--builtin", "vehicles", "--format", "lines"])
        .env("EMPATHICA_PORT", &port)
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let endpoint = format!("127.0.0.1:{port}");
    let agents: Vec<_> = ["A", "B"]
        .into_iter()
        .map(|id| {
            let endpoint = endpoint.clone();
            thread::spawn(move || {
                // retry until the server is listening
                for _ in 0..100 {
                    let o = empathica(&[
                        "agent",
                        "--builtin",
                        "vehicles",
                        "--endpoint",
                        &endpoint,
                        "--id",
                        id,
                        "--algorithm",
                        "full",
                        "--format",
                        "lines",
                    ]);
                    if o.status.success() {
                        return stdout(&o);
                    }
                    thread::sleep(Duration::from_millis(50));
                }
                panic!("agent {id} never connected");
            })
        })
        .collect();
    let agent_out: Vec<String> = agents.into_iter().map(|h| h.join().unwrap()).collect();
    let served = server.wait_with_output().unwrap();
    assert!(served.status.success());
    let text = stdout(&served);
    assert_eq!(line_value(&text, "joint"), ["wait_A,drive_B"]);
    assert_eq!(line_value(&text, "utility"), ["A 0.9", "B 1"]);
    assert_eq!(line_value(&agent_out[0], "utility"), ["0.9"]);
    assert_eq!(line_value(&agent_out[1], "utility"), ["1"]);
}
