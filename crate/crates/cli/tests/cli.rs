use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_cnls");

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn cnls(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("CNLS_OUT_DIR")
        .output()
        .unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn ground_reports_synchronized_energy() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.toml", "dimension = 1\nbeta0 = 1.0\nkappa0 = 0.5\n");
    let out = dir.path().join("out");
    let res = cnls(&["ground", "--config", path_str(&cfg), "--out", path_str(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let rows = csv_rows(&out.join("ground.csv"));
    assert_eq!(rows[0][0], "energy");
    let energy: f64 = rows[1][0].parse().unwrap();
    assert!((energy - 0.4714).abs() < 1e-3, "{energy}");
    assert_eq!(rows[1][4], "true");
    let profile = csv_rows(&out.join("ground_profile.csv"));
    assert_eq!(profile[0], ["x", "u", "v"]);
    assert_eq!(profile.len(), 2002);
}

#[test]
fn spectrum_with_strong_coupling_is_nondegenerate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", "dimension = 1\nbeta0 = 3.0\nkappa0 = 0.3\n");
    let out = dir.path().join("out");
    let res = cnls(&["spectrum", "--config", path_str(&cfg), "--out", path_str(&out)]);
    assert!(res.status.success());
    let rows = csv_rows(&out.join("spectrum.csv"));
    let col = rows[0].iter().position(|c| c == "verdict").unwrap();
    assert_eq!(rows[1][col], "nondegenerate");
}

#[test]
fn malformed_config_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "dimension = 1\nbeta0 = 1.0\nkappa0 = 1.2\n");
    let res = cnls(&["ground", "--config", path_str(&cfg), "--out", path_str(dir.path())]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("(A₀)"));

    let syntax = write(dir.path(), "syntax.toml", "dimension = \n");
    let res = cnls(&["ground", "--config", path_str(&syntax), "--out", path_str(dir.path())]);
    assert_eq!(res.status.code(), Some(1));

    let res = cnls(&["ground", "--config", path_str(&dir.path().join("missing.toml"))]);
    assert_eq!(res.status.code(), Some(1));

    let res = cnls(&["ground"]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn perturbation_violating_bounds_cites_condition() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "k.toml",
        "dimension = 1\nbeta0 = 1.0\nkappa0 = 0.5\n[perturbation.kappa]\nkind = \"gaussian\"\namplitude = 0.6\nwidth = 1.0\n",
    );
    let res = cnls(&["ground", "--config", path_str(&cfg), "--out", path_str(dir.path())]);
    assert_eq!(res.status.code(), Some(1));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("(A₀)") && err.contains("sup κ"), "{err}");
}

#[test]
fn numerical_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "m.toml", "dimension = 1\nbeta0 = 1.0\nkappa0 = 0.5\nmax_iter = 2\n");
    let res = cnls(&["ground", "--config", path_str(&cfg), "--out", path_str(dir.path())]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("max_iter exceeded"));
}

#[test]
fn manifest_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "dimension = 1\nradius = 12.0\nnodes = 1201\nbeta0 = 0.5\nkappa0 = 0.3\n[perturbation.kappa]\nkind = \"gaussian\"\namplitude = 0.1\nwidth = 1.0\ncenter = 1.0\n",
    );
    let first = dir.path().join("first");
    let res = cnls(&["compare", "--config", path_str(&cfg), "--out", path_str(&first)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let second = dir.path().join("second");
    let manifest = first.join("manifest.toml");
    let res = cnls(&["compare", "--config", path_str(&manifest), "--out", path_str(&second)]);
    assert!(res.status.success());
    let a = std::fs::read(first.join("compare.csv")).unwrap();
    let b = std::fs::read(second.join("compare.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        std::fs::read(&manifest).unwrap(),
        std::fs::read(second.join("manifest.toml")).unwrap()
    );
    let rows = csv_rows(&first.join("compare.csv"));
    assert_eq!(rows[1].last().unwrap(), "exists");
}

#[test]
fn random_init_requires_seed_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "n.toml",
        "dimension = 1\nradius = 12.0\nnodes = 601\nbeta0 = 1.0\nkappa0 = 0.5\ninit_noise = 0.05\n",
    );
    let res = cnls(&["ground", "--config", path_str(&cfg), "--out", path_str(dir.path())]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("seed"));
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let res = cnls(&["ground", "--config", path_str(&cfg), "--out", path_str(&out), "--seed", seed]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        std::fs::read(out.join("ground_profile.csv")).unwrap()
    };
    assert_eq!(run("a", "7"), run("b", "7"));
    let manifest = std::fs::read_to_string(dir.path().join("a/manifest.toml")).unwrap();
    assert!(manifest.contains("seed = 7"));
}

#[test]
fn barycenter_of_stored_pair() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.toml", "dimension = 1\nbeta0 = 1.0\nkappa0 = 0.5\ninit_offset = 2.0\n");
    let out = dir.path().join("g");
    assert!(cnls(&["ground", "--config", path_str(&cfg), "--out", path_str(&out)]).status.success());
    let bc = write(
        dir.path(),
        "b.toml",
        "dimension = 1\nbeta0 = 1.0\nkappa0 = 0.5\npair_file = \"g/ground_profile.csv\"\n",
    );
    let out_b = dir.path().join("b");
    let res = cnls(&["barycenter", "--config", path_str(&bc), "--out", path_str(&out_b)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let rows = csv_rows(&out_b.join("barycenter.csv"));
    let xi: f64 = rows[1][1].parse().unwrap();
    assert!((xi - 2.0).abs() < 0.05, "{xi}");

    let none = write(dir.path(), "nb.toml", "dimension = 1\nbeta0 = 1.0\nkappa0 = 0.5\n");
    let res = cnls(&["barycenter", "--config", path_str(&none), "--out", path_str(&out_b)]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn out_dir_defaults_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", "dimension = 3\nradius = 12.0\nnodes = 1201\nbeta0 = 1.0\nkappa0 = 0.5\n");
    let out = dir.path().join("from_env");
    let res = Command::new(BIN)
        .args(["scalar", "--config", path_str(&cfg), "--threads", "2"])
        .env("CNLS_OUT_DIR", &out)
        .output()
        .unwrap();
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let rows = csv_rows(&out.join("scalar.csv"));
    let peak: f64 = rows[1][1].parse().unwrap();
    assert!((peak - 4.3374).abs() < 1e-2, "{peak}");
}

#[test]
fn help_documents_csv_columns() {
    let res = cnls(&["sweep-kappa", "--help"]);
    let text = String::from_utf8_lossy(&res.stdout);
    assert!(text.contains("kappa0,energy,peak_u,peak_v,iterations,converged"), "{text}");
}

#[test]
fn threshold_and_gamma_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "t.toml",
        "dimension = 1\nradius = 30.0\nnodes = 3001\nbeta0 = 1.0\nkappa0 = 0.5\nys = [-3.0, 0.0, 3.0]\nd0 = 10.0\n[perturbation.kappa]\nkind = \"gaussian\"\namplitude = -0.05\nwidth = 1.0\n",
    );
    let out = dir.path().join("t");
    assert!(cnls(&["threshold", "--config", path_str(&cfg), "--out", path_str(&out)]).status.success());
    let rows = csv_rows(&out.join("threshold.csv"));
    let r0: f64 = rows[1][0].parse().unwrap();
    assert!((r0 - 1.1f64.powi(2)).abs() < 1e-12, "{r0}");
    assert_eq!(rows[1][4], "true");
    let res = cnls(&["gamma", "--config", path_str(&cfg), "--out", path_str(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let rows = csv_rows(&out.join("gamma.csv"));
    assert_eq!(rows.len(), 4);
    for r in &rows[1..] {
        let e: f64 = r[2].parse().unwrap();
        let c0: f64 = r[3].parse().unwrap();
        assert!(e > c0);
    }
}
