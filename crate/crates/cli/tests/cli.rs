use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn aniso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aniso")).args(args).output().expect("spawn aniso")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_ramp(path: &Path, n: usize) {
    let mut s = String::from("t,v1\n");
    for j in 0..n {
        let t = (j as f64 + 0.5) / n as f64;
        s.push_str(&format!("{t},{t}\n"));
    }
    fs::write(path, s).unwrap();
}

fn field<'a>(v: &'a serde_json::Value, path: &[&str]) -> &'a str {
    path.iter().fold(v, |v, k| &v[*k]).as_str().unwrap()
}

#[test]
fn ramp_seminorm() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("ramp.csv");
    let report = dir.path().join("norm.json");
    write_ramp(&input, 256);
    let o = aniso(&[
        "norm",
        "--family",
        "W",
        "--s",
        "0.5",
        "--p",
        "2",
        "--mu",
        "1",
        "--input",
        input.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let semi: f64 = field(&v, &["components", "seminorm"]).parse().unwrap();
    assert!((semi - 0.5f64.sqrt()).abs() < 2e-3, "{semi}");
    let integer: f64 = field(&v, &["components", "integer_part"]).parse().unwrap();
    assert!((integer - (1.0f64 / 3.0).sqrt()).abs() < 1e-3, "{integer}");
}

#[test]
fn hardy_from_params_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("hardy.cfg");
    let out = dir.path().join("r.json");
    fs::write(&cfg, "# hardy at a non-integer weight\np = 2\nmu = 0.75\ns = 1\nn = 128\nsize = 8\n").unwrap();
    let o = aniso(&[
        "verify",
        "--suite",
        "hardy",
        "--params",
        cfg.to_str().unwrap(),
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("PASS worst_ratio="));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(field(&v, &["verdict"]), "pass");
    assert_eq!(field(&v, &["meta", "seed"]), "7");
    assert_eq!(field(&v, &["meta", "resolution"]), "128");
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = aniso(&[
            "verify",
            "--suite",
            "hardy",
            "--set",
            "n=128",
            "--set",
            "size=4",
            "--seed",
            "3",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        fs::read(out).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&aniso(&["norm", "--p", "2", "--input", "x.csv"])), 64);
    assert_eq!(code(&aniso(&["frobnicate"])), 64);
    assert_eq!(code(&aniso(&["verify", "--suite", "nonesuch", "--set", "p=2"])), 64);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "p = 2\nbogus = 1\n").unwrap();
    let o = aniso(&["verify", "--suite", "hardy", "--params", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 64);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn bad_data_exits_65() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "t,v1\n0.5,abc\n").unwrap();
    assert_eq!(code(&aniso(&["norm", "--family", "L", "--p", "2", "--input", bad.to_str().unwrap()])), 65);
    let json = dir.path().join("bad.json");
    fs::write(&json, "{\"x\": 1}").unwrap();
    assert_eq!(code(&aniso(&["report", "--input", json.to_str().unwrap()])), 65);
}

#[test]
fn golden_render() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let input = fixtures.join("hardy_report.json");
    let o = aniso(&["report", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), fs::read_to_string(fixtures.join("hardy_report.txt")).unwrap());
    let o = aniso(&["report", "--input", input.to_str().unwrap(), "--format", "csv"]);
    let csv = stdout(&o);
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("suite,params,lhs,rhs,ratio,drift\n"));
}

#[test]
fn oracle_hardy_constant() {
    let o = aniso(&["oracle", "--query", "hardy-constant", "--p", "2", "--mu", "0.75", "--set", "k=1"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(field(&v, &["value"]).parse::<f64>().unwrap(), 16.0);
}

#[test]
fn extend_zero_then_phi_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("ramp.csv");
    let fwd = dir.path().join("fwd.csv");
    let back = dir.path().join("back.csv");
    write_ramp(&input, 64);
    let run = |args: &[&str]| assert_eq!(code(&aniso(args)), 0);
    run(&[
        "op",
        "--name",
        "phi-mu",
        "--p",
        "2",
        "--mu",
        "0.75",
        "--input",
        input.to_str().unwrap(),
        "--output",
        fwd.to_str().unwrap(),
    ]);
    run(&[
        "op",
        "--name",
        "phi-mu",
        "--p",
        "2",
        "--mu",
        "0.75",
        "--direction",
        "inverse",
        "--input",
        fwd.to_str().unwrap(),
        "--output",
        back.to_str().unwrap(),
    ]);
    let vals = |p: &Path| -> Vec<f64> {
        fs::read_to_string(p).unwrap().lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect()
    };
    for (a, b) in vals(&input).iter().zip(vals(&back)) {
        assert!((a - b).abs() < 1e-12);
    }
    let ext = dir.path().join("ext.csv");
    run(&["op", "--name", "extend0", "--input", input.to_str().unwrap(), "--output", ext.to_str().unwrap()]);
    assert_eq!(vals(&ext).len(), 2 * 64);
}

#[test]
fn trace_order_table() {
    let o = aniso(&["sweep", "--predicate", "trace-order", "--set", "p=2,3", "--set", "mu=1"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].contains(",1.00000000000000e0,"));
}
