use std::path::Path;
use std::process::{Command, Output};

fn dualmarg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dualmarg"))
        .args(args)
        .current_dir(dir)
        .env("DUALMARG_THREADS", "2")
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

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const TRIANGLE: &str =
    r#"{"graph":{"kind":"complete","n":3},"model":"ising","couplings":0.5,"fields":0.3}"#;

fn value_column(csv: &str, col: usize) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn exact_reports_both_domains_and_alpha() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "m.json", TRIANGLE);
    let out = stdout(&dualmarg(&["exact", "m.json"], dir.path()));
    assert!(out.starts_with("domain,kind,index,a,value"));
    let alpha = out.lines().find(|l| l.starts_with("both,alpha")).unwrap();
    let alpha: f64 = alpha.rsplit(',').next().unwrap().parse().unwrap();
    assert!((alpha - 8.0).abs() < 1e-12);
    let dual_e1: f64 = out
        .lines()
        .find(|l| l.starts_with("dual,edge,0,1,"))
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((dual_e1 - 0.13705).abs() < 1e-5);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "m.json", TRIANGLE);
    let o = dualmarg(&["bp", "m.json", "--out", "bp.csv"], dir.path());
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("bp.csv")).unwrap();
    assert!(text.starts_with("edge,a,belief"));
    assert_eq!(text.lines().count(), 1 + 6);
    assert!(String::from_utf8_lossy(&o.stderr).contains("converged=true"));
}

#[test]
fn exact_dual_marginals_map_to_exact_primal() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "m.json", TRIANGLE);
    let exact = stdout(&dualmarg(&["exact", "m.json"], dir.path()));
    let mut dual = String::from("edge,a,pi_d\n");
    let mut primal = Vec::new();
    for l in exact.lines() {
        let f: Vec<&str> = l.split(',').collect();
        if f[1] != "edge" {
            continue;
        }
        match f[0] {
            "dual" => dual.push_str(&format!("{},{},{}\n", f[2], f[3], f[4])),
            "primal" => primal.push(f[4].parse::<f64>().unwrap()),
            _ => {}
        }
    }
    write(dir.path(), "dual.csv", &dual);
    let mapped = stdout(&dualmarg(
        &["map", "m.json", "--input", "dual.csv"],
        dir.path(),
    ));
    assert!(mapped.starts_with("edge,a,pi_p"));
    for (a, b) in value_column(&mapped, 2).iter().zip(&primal) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn swp_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "m.json", TRIANGLE);
    let args = [
        "swp",
        "m.json",
        "--sweeps",
        "2000",
        "--burn-in",
        "100",
        "--seed",
        "5",
    ];
    let a = stdout(&dualmarg(&args, dir.path()));
    let b = stdout(&dualmarg(&args, dir.path()));
    assert_eq!(a, b);
    assert!(a.starts_with("edge,p_hat,std_err"));
    let o = dualmarg(&args, dir.path());
    let meta = String::from_utf8_lossy(&o.stderr);
    assert!(
        meta.contains("sweeps=2000")
            && meta.contains("steps=6300")
            && meta.contains("samples=2000")
    );
}

#[test]
fn curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&dualmarg(&["fixedpoint"], dir.path()));
    assert!(out.starts_with("row,beta_j,pi0,pi1"));
    assert!(out
        .lines()
        .last()
        .unwrap()
        .starts_with("critical,4.406867935"));
    let out = stdout(&dualmarg(&["bounds", "--stop", "1"], dir.path()));
    assert_eq!(out.lines().count(), 1 + 100 + 1);
    let out = stdout(&dualmarg(&["fixedpoint", "--q", "4"], dir.path()));
    let crit: Vec<f64> = out
        .lines()
        .last()
        .unwrap()
        .split(',')
        .skip(1)
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((crit[1] - 0.75).abs() < 1e-12);
}

#[test]
fn experiment_with_relative_model_path() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("cfg")).unwrap();
    write(
        &dir.path().join("cfg"),
        "k5.json",
        r#"{"graph":{"kind":"complete","n":5},"model":"ising","couplings":0.1}"#,
    );
    write(
        &dir.path().join("cfg"),
        "exp.json",
        r#"{"model":"k5.json","methods":["bp-primal","bp-dual+map"],
            "sweep":{"variable":"coupling_max","values":[0.3,0.6]},"realizations":3,"seed":2}"#,
    );
    let a = stdout(&dualmarg(&["experiment", "cfg/exp.json"], dir.path()));
    assert_eq!(a.lines().count(), 1 + 4);
    let first: Vec<&str> = a.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[0], "coupling_max");
    assert_eq!(first[1].parse::<f64>().unwrap(), 0.3);
    assert_eq!(first[2], "bp-primal");
    let b = stdout(&dualmarg(&["experiment", "cfg/exp.json"], dir.path()));
    assert_eq!(a, b);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "bad.json",
        r#"{"graph":{"kind":"edges","n":2,"edges":[[0,0]]},"model":"ising","couplings":1}"#,
    );
    assert_eq!(
        dualmarg(&["exact", "bad.json"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        dualmarg(&["exact", "missing.json"], dir.path())
            .status
            .code(),
        Some(2)
    );
    write(
        dir.path(),
        "neg.json",
        r#"{"graph":{"kind":"complete","n":3},"model":"ising","couplings":-0.5}"#,
    );
    assert_eq!(
        dualmarg(&["bp", "neg.json", "--domain", "dual"], dir.path())
            .status
            .code(),
        Some(2)
    );
    write(
        dir.path(),
        "big.json",
        r#"{"graph":{"kind":"complete","n":30},"model":"ising","couplings":0.1}"#,
    );
    assert_eq!(
        dualmarg(&["exact", "big.json", "--domain", "primal"], dir.path())
            .status
            .code(),
        Some(2)
    );
    // partition function overflows: numeric failure
    write(
        dir.path(),
        "cold.json",
        r#"{"graph":{"kind":"complete","n":3},"model":"ising","couplings":300}"#,
    );
    assert_eq!(
        dualmarg(&["exact", "cold.json", "--domain", "primal"], dir.path())
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name.ends_with(".exp.json") {
            dualmarg_core::ExperimentSpec::load(&path).unwrap();
        } else if name.ends_with(".json") {
            let text = std::fs::read_to_string(&path).unwrap();
            dualmarg_core::ModelFile::from_json(&text).unwrap().build().unwrap();
        }
        seen += 1;
    }
    assert!(seen >= 5);
}
