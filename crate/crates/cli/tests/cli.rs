use std::path::Path;
use std::process::{Command, Output};

fn qsta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> i64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.trim().parse().ok())
        .unwrap_or_else(|| panic!("no `{key}` in {text}"))
}

#[test]
fn analyze_hand_written_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bell.qc");
    std::fs::write(
        &path,
        "qubits 2\nclbits 2\nh 0\ncx 0 1\nmeasure 0 -> 0\nmeasure 1 -> 1\n",
    )
    .unwrap();
    let out = stdout(&qsta(&[
        "analyze",
        path.to_str().unwrap(),
        "--profile",
        "unit",
    ]));
    assert_eq!(field(&out, "t_C_ns"), 3);
}

#[test]
fn build_then_analyze_reports_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("iter.qc");
    let f = file.to_str().unwrap();
    stdout(&qsta(&[
        "build",
        "iterative",
        "--n",
        "2",
        "--m",
        "3",
        "--cu",
        "const:100",
        "-o",
        f,
    ]));
    let out = stdout(&qsta(&["analyze", f, "--profile", "unit", "--report"]));
    let t_c = field(&out, "t_C_ns");
    let parts = field(&out, "t_H_ns") + field(&out, "sum_CU_ns") + field(&out, "delta_P_ns");
    assert_eq!(t_c, parts);
    assert_eq!(field(&out, "sum_CU_ns"), 300);
}

#[test]
fn distributed_circuit_is_slower_by_one_distribution_block() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("alt.qc");
    let f = file.to_str().unwrap();
    let o = qsta(&[
        "distribute",
        "alternating",
        "--n",
        "2",
        "--m",
        "4",
        "--cu",
        "const:10000",
        "--k",
        "2",
        "--t-ebit",
        "500",
        "--profile",
        "unit",
        "-o",
        f,
    ]);
    stdout(&o);
    assert!(String::from_utf8_lossy(&o.stderr).contains("exact=true"));
    let out = stdout(&qsta(&["analyze", f, "--profile", "unit", "--report"]));
    assert_eq!(field(&out, "delta_D_ns"), field(&out, "delta_D_notM_ns"));
    assert_eq!(field(&out, "delta_D_M_ns"), 0);
}

#[test]
fn ebit_time_preset() {
    let out = stdout(&qsta(&[
        "ebit-time",
        "--model",
        "neutral_atom",
        "--d-km",
        "1",
    ]));
    let ms: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("T_ms ")?.parse().ok())
        .unwrap();
    assert!((4.5..5.5).contains(&ms), "{ms}");
}

#[test]
fn sweep_writes_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(
        &cfg,
        r#"
profiles = ["heron_r2_fez"]
designs = ["iterative", "alternating"]
n_values = [2, 3]
m_rule = "2n"
output = "out/run"

[cu_model]
kind = "poly"
c1 = 4.0
c2 = 2.0

[distributed]
k_values = [1, 2]
t_ebit_values = [1000, 100000]
"#,
    )
    .unwrap();
    let out = stdout(&qsta(&["sweep", cfg.to_str().unwrap()]));
    let paths: Vec<&str> = out.lines().collect();
    assert!(paths.iter().all(|p| Path::new(p).exists()), "{paths:?}");
    let main = std::fs::read_to_string(dir.path().join("out/run.csv")).unwrap();
    assert!(main.starts_with("design,profile,n,m,k,t_ebit_ns,t_C_ns"));
    // 2 designs × 2 n × (1 monolithic + 2 k × 2 t_ebit)
    assert_eq!(main.lines().count(), 1 + 2 * 2 * 5);
}

#[test]
fn bad_input_fails_cleanly() {
    let o = qsta(&["build", "nonsense", "--n", "2", "--cu", "const:1"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown design"));
    let o = qsta(&["build", "iterative", "--n", "2", "--cu", "poly:1,1"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--profile"));
}
