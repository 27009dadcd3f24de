use std::fs;
use std::path::Path;
use std::process::Command;

const CONSTANTS: &str = r#"
[proportional]
a = 2.0
b = 1.0
gamma = 1.0
K = 2.0
r = { kind = "constant", value = 1.0 }
delay = { kind = "constant", lag = 1.0 }

[history]
phi = { kind = "constant", value = 2.0 }
n0 = 2.0

[run]
t_end = 20.0
"#;

const SWEEP: &str = r#"
[model]
gamma = 1.0
a = { kind = "constant", value = 2.0 }
b = { kind = "constant", value = 1.0 }
K = { kind = "constant", value = 2.0 }
delay = { kind = "constant", lag = 1.0 }

[run]
horizon_periods = 5

[sweep]
axis1 = { param = "gamma", min = 0.5, max = 8.0, count = 8 }
axis2 = { param = "lag", min = 0.1, max = 2.0, count = 8 }
"#;

fn fishsim(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_fishsim"))
        .arg(cmd)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn setup(text: &str) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.toml");
    fs::write(&cfg, text).unwrap();
    (dir, cfg)
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn check_reports_closed_form_quantities() {
    let (dir, cfg) = setup(CONSTANTS);
    let out = dir.path().join("out");
    let res = fishsim("check", &cfg, &out, &[]);
    assert_eq!(
        res.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let csv = fs::read_to_string(out.join("conditions.csv")).unwrap();
    assert!(csv.starts_with(
        "report,name,quantity,threshold,strict,verdict,margin,relation,error_estimate\n"
    ));
    let rows = csv_rows(&out.join("conditions.csv"));
    let find = |name: &str| rows.iter().find(|r| r[1] == name).unwrap().clone();
    let delay_integral = find("gamma * sup int_theta^t a < 6");
    assert_eq!(delay_integral[2].parse::<f64>().unwrap(), 2.0);
    assert_eq!(delay_integral[5], "holds");
    let linearized = find("gamma (a-b) b / a * sup int_theta^t r < 3/2");
    assert_eq!(linearized[2].parse::<f64>().unwrap(), 0.5);
    assert!(fs::read_to_string(out.join("conditions.txt"))
        .unwrap()
        .contains("global attraction: holds"));
}

#[test]
fn simulate_equilibrium_is_flat() {
    let (dir, cfg) = setup(&CONSTANTS.replace("[run]", "[run]\nplot = true"));
    let out = dir.path().join("out");
    assert_eq!(fishsim("simulate", &cfg, &out, &[]).status.code(), Some(0));
    let rows = csv_rows(&out.join("trajectory.csv"));
    assert!(rows.len() > 100);
    for r in &rows {
        assert!((r[1].parse::<f64>().unwrap() - 2.0).abs() < 1e-9);
    }
    let plot = csv_rows(&out.join("trajectory_plot.csv"));
    assert!(plot.len() <= 1000);
    assert_eq!(plot.first(), rows.first());
    assert_eq!(plot.last(), rows.last());
}

#[test]
fn sweep_table_flips_on_boundary() {
    let (dir, cfg) = setup(SWEEP);
    let out = dir.path().join("out");
    let res = fishsim("sweep", &cfg, &out, &["--jobs", "4"]);
    assert_eq!(
        res.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let rows = csv_rows(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 64);
    for r in &rows {
        let gamma: f64 = r[2].parse().unwrap();
        let lag: f64 = r[3].parse().unwrap();
        let expected = if gamma * 2.0 * lag < 6.0 {
            "holds"
        } else {
            "fails"
        };
        assert_eq!(r[5], expected, "gamma {gamma} lag {lag}");
    }
}

#[test]
fn outputs_are_deterministic_and_reproducible_from_sidecar() {
    let (dir, cfg) = setup(
        &CONSTANTS
            .replace("n0 = 2.0", "n0 = 0.7")
            .replace("value = 2.0 }\nn0", "value = 0.5 }\nn0"),
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    for cmd in ["simulate", "converge", "periodic", "check"] {
        assert_eq!(fishsim(cmd, &cfg, &a, &[]).status.code(), Some(0), "{cmd}");
        assert_eq!(fishsim(cmd, &cfg, &b, &[]).status.code(), Some(0), "{cmd}");
        assert_eq!(
            fishsim(cmd, &a.join("resolved_config.toml"), &c, &[])
                .status
                .code(),
            Some(0),
            "{cmd}"
        );
    }
    for name in [
        "trajectory.csv",
        "convergence.csv",
        "local_stability.csv",
        "orbit.csv",
        "periodic.txt",
        "conditions.csv",
        "resolved_config.toml",
    ] {
        let x = fs::read(a.join(name)).unwrap();
        assert_eq!(x, fs::read(b.join(name)).unwrap(), "{name}");
        assert_eq!(x, fs::read(c.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn input_errors_exit_one() {
    let (dir, cfg) = setup(&CONSTANTS.replace("gamma = 1.0", "gamma = -1.0"));
    let out = dir.path().join("out");
    let res = fishsim("check", &cfg, &out, &[]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("proportional.gamma"));
    assert!(!out.exists());

    let (dir, cfg) = setup(&format!("{CONSTANTS}typo = 1\n"));
    let res = fishsim("check", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("line"));

    let res = fishsim("sweep", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(res.status.code(), Some(1));
    let res = Command::new(env!("CARGO_BIN_EXE_fishsim"))
        .arg("bogus")
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(1));
    assert!(res.stdout.is_empty());
}

#[test]
fn overflow_exits_two() {
    let text = CONSTANTS
        .replace("a = 2.0\nb = 1.0", "a = 1.0\nb = 30.0")
        .replace("t_end = 20.0", "t_end = 100.0");
    let (dir, cfg) = setup(&text);
    let res = fishsim("simulate", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("beyond representable range"));
}

#[test]
fn strict_turns_unmet_conditions_into_errors() {
    let text = CONSTANTS.replace("gamma = 1.0", "gamma = 8.0");
    let (dir, cfg) = setup(&text);
    let out = dir.path().join("out");
    let res = fishsim("periodic", &cfg, &out, &["--strict"]);
    assert_eq!(res.status.code(), Some(1));
    let res = fishsim("periodic", &cfg, &out, &[]);
    assert_eq!(res.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&res.stderr).contains("warning"));
    assert!(fs::read_to_string(out.join("periodic.txt"))
        .unwrap()
        .contains("warning"));
}
