use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sr2gates"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn analyze(path: &Path) -> String {
    let o = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

#[test]
fn analyze_reference_files() {
    let ccz = analyze(&data("ccz.qgate"));
    assert!(ccz.contains("singular_number: 3"));
    assert!(ccz.contains("sr_per_cut: {1}|{2,3}=2 {1,2}|{3}=2 {1,3}|{2}=2"));
    assert!(ccz.contains("class: ghz"));
    assert!(analyze(&data("example1_d.qgate")).contains("singular_number: 0"));
    assert!(analyze(&data("cnot_tensor_i.qgate")).contains("genuine: false"));
    let toffoli = analyze(&data("toffoli.qgate"));
    assert!(toffoli.contains("singular_number: 3"));
    let w = analyze(&data("wstate_gate.qgate"));
    assert!(w.contains("class: w") && w.contains("schmidt_rank: 3"));
    assert!(w.contains("singular_number: n/a"));
}

#[test]
fn catalog_files_match_the_examples_verb() {
    let dir = tempfile::tempdir().unwrap();
    for (name, file) in [
        ("cnot", "cnot.qgate"),
        ("swap", "swap.qgate"),
        ("toffoli", "toffoli.qgate"),
        ("ccz", "ccz.qgate"),
        ("example1-d", "example1_d.qgate"),
        ("wstate-gate", "wstate_gate.qgate"),
    ] {
        let out = dir.path().join(file);
        let o = run(&["examples", name, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        let fresh = sr2gates::qgate::read(&out).unwrap();
        let stored = sr2gates::qgate::read(data(file)).unwrap();
        assert_eq!(fresh, stored, "{name}");
    }
    let o = run(&["examples", "ccz"]);
    assert!(stdout(&o).contains("kind: diagonal"));
}

#[test]
fn classify_diag3_verb() {
    let o = run(&["classify-diag3", data("ccz.qgate").to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.contains("precondition: true"));
    assert!(text.contains("schmidt_rank: 2"));
    assert!(text.lines().any(|l| l.starts_with("canonical: a=")));
    assert!(text.lines().any(|l| l.starts_with("hyperdet: ")));
    let o = run(&["classify-diag3", data("toffoli.qgate").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.qgate");
    std::fs::write(&bad, "qgate 1\ndims: 2\nkind: dense\n1,0 0,0\n").unwrap();
    assert_eq!(code(&run(&["analyze", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["analyze", "/nonexistent/file.qgate"])), 2);

    let scaled = dir.path().join("scaled.qgate");
    std::fs::write(
        &scaled,
        "qgate 1\ndims: 2 2\nkind: diagonal\n2,0 2,0 2,0 2,0\n",
    )
    .unwrap();
    assert_eq!(code(&run(&["analyze", scaled.to_str().unwrap()])), 3);

    assert_eq!(
        code(&run(&[
            "generate",
            "t3-k1a",
            "--param",
            "c=1.0",
            "--param",
            "alpha=1.0"
        ])),
        4
    );
    assert_eq!(code(&run(&["generate", "t3-k9", "--param", "phi=1"])), 2);
    assert_eq!(code(&run(&["examples", "fredkin"])), 2);
    assert_eq!(code(&run(&["--tol", "2", "examples", "ccz"])), 2);
}

#[test]
fn generate_then_analyze_reproduces_k() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str], &str); 13] = [
        ("t3-k3", &["phi=3.14159265"], "3"),
        ("t3-k2a", &["theta=1", "phi=2"], "2"),
        ("t3-k2b", &["gamma=1", "delta=2"], "2"),
        ("t3-k1a", &["c=2", "alpha=1"], "1"),
        ("t3-k1b", &["c=0.5", "alpha=1", "gamma=2"], "1"),
        (
            "t3-k0",
            &["a=0.5-0.5i", "b=0.5+0.5i", "c=-1i", "d=-1i"],
            "0",
        ),
        ("n-kn", &["theta=1"], "4"),
        ("n-kn1", &["theta=1", "phi=2"], "3"),
        ("n-k2", &["beta2=1", "beta3=2", "beta4=3"], "2"),
        ("n-k1", &["alpha=0.5"], "1"),
        ("n-k0", &["alpha=1.0", "beta=0.5"], "0"),
        ("l5-eq8", &["alpha=1", "beta=2"], "2"),
        ("l5-eq9", &["alpha=1", "beta=2"], "0"),
    ];
    for (family, params, k) in cases {
        let out = dir.path().join(format!("{family}.qgate"));
        let mut args = vec!["generate", family, "--out", out.to_str().unwrap()];
        for p in params {
            args.push("--param");
            args.push(p);
        }
        let o = run(&args);
        assert_eq!(
            code(&o),
            0,
            "{family}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let text = analyze(&out);
        assert!(
            text.contains(&format!("singular_number: {k}")),
            "{family}:\n{text}"
        );
    }
}

#[test]
fn generate_with_permutation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("perm.qgate");
    let o = run(&[
        "generate",
        "t3-k2a",
        "--param",
        "theta=1",
        "--param",
        "phi=2",
        "--permute",
        "3,1,2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(analyze(&out).contains("singular_number: 2"));
    assert_eq!(
        code(&run(&[
            "generate",
            "t3-k3",
            "--param",
            "phi=1",
            "--permute",
            "1,1,2"
        ])),
        4
    );
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn sweep_t3_k2a_is_all_k2() {
    let o = run(&[
        "sweep",
        "t3-k2a",
        "--grid",
        "theta=0.3:6:7",
        "--grid",
        "phi=0.35:6.05:7",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("theta,phi,unitarity_residual,sn,genuine,flag\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 49);
    for r in rows {
        assert_eq!(r[3], "2");
        assert_eq!(r[5], "ok");
    }
}

#[test]
fn sweep_flags_the_excluded_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "sweep",
        "n-kn1",
        "--grid",
        "theta=0.5:2.5:5",
        "--grid",
        "phi=0.5:2.5:5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(dir.path().join("n-kn1.csv")).unwrap();
    for r in csv_rows(&text) {
        let on_line = r[0] == r[1];
        assert_eq!(r[5] != "ok", on_line, "{r:?}");
        if on_line {
            assert_eq!(r[4], "false");
        }
    }
    assert!(stdout(&o).contains("5 flagged"));
}

#[test]
fn sweep_k0_from_perturbed_seeds() {
    let o = run(&["sweep", "t3-k0", "--seeds", "30"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&stdout(&o));
    assert!(!rows.is_empty());
    for r in rows {
        let residual: f64 = r[8].parse().unwrap();
        assert!(residual <= 1e-8);
        assert_eq!(r[9], "0");
    }
}

#[test]
fn sweep_breach_exits_5() {
    let o = run(&[
        "sweep",
        "t3-k0",
        "--seeds",
        "0",
        "--param",
        "a=0.3+0.1i",
        "--param",
        "b=0.7-0.2i",
        "--param",
        "c=2i",
        "--param",
        "d=-1",
    ]);
    assert_eq!(code(&o), 5);
    assert_eq!(
        code(&run(&["sweep", "t3-k3", "--grid", "theta=0:1:3"])),
        2,
        "unknown axis"
    );
}
