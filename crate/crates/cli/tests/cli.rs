use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::tempdir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_symclone"));
    cmd.env("NO_COLOR", "1");
    cmd
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn symclone(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should run")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process should exit normally")
}

// (golden file, expected exit code, argv); fixture paths are resolved at run time
const GOLDEN: &[(&str, i32, &[&str])] = &[
    ("construct_basic.json", 0, &["construct-basic"]),
    ("construct_general_2.json", 0, &["construct-general", "--dim", "4"]),
    (
        "verify_basic.txt",
        0,
        &["--format", "human", "verify", "--input", "@basic"],
    ),
    ("darboux_scaled.json", 0, &["darboux", "--input", "@scaled_form.json"]),
    (
        "darboux_mixed.txt",
        0,
        &["--format", "human", "darboux", "--input", "@mixed_form.json"],
    ),
    (
        "darboux_degenerate.json",
        1,
        &["darboux", "--input", "@degenerate_form.json"],
    ),
    ("darboux_odd.json", 1, &["darboux", "--input", "@odd_form.json"]),
    ("readout_2_3.json", 0, &["readout-solve", "--m", "2", "--k", "3"]),
    ("readout_3_1.json", 1, &["readout-solve", "--m", "3", "--k", "1"]),
    ("readout_1_0.json", 1, &["readout-solve", "--m", "1", "--k", "0"]),
    (
        "size_witness.json",
        1,
        &["size-witness", "--input", "@small_machine.json"],
    ),
    ("quantum_refute_2.json", 1, &["quantum-refute", "--dim", "2"]),
    ("quantum_refute_1.json", 0, &["quantum-refute", "--dim", "1"]),
    (
        "probe_1_0.json",
        0,
        &["probe", "--m", "1", "--k", "0", "--iters", "300", "--seed", "7"],
    ),
    (
        "diagram_symp_basic.json",
        0,
        &["diagram-check", "--instance", "symp", "--input", "@basic"],
    ),
    (
        "diagram_hilb_cnot.json",
        1,
        &[
            "diagram-check",
            "--instance",
            "hilb",
            "--input",
            "@cnot.json",
            "--samples",
            "4",
        ],
    ),
];

fn resolve(args: &[&str], basic: &str) -> Vec<String> {
    args.iter()
        .map(|a| match a.strip_prefix('@') {
            Some("basic") => basic.to_string(),
            Some(f) => fixture(f),
            None => a.to_string(),
        })
        .collect()
}

fn write_basic(dir: &Path) -> String {
    let path = dir.join("basic.json");
    let out = symclone(&["construct-basic", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    path.display().to_string()
}

#[test]
fn golden_outputs() {
    // run from the temp dir so human output quoting the input path stays stable
    let dir = tempdir().unwrap();
    write_basic(dir.path());
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut mismatched = Vec::new();
    for (name, expected_code, args) in GOLDEN {
        let argv = resolve(args, "basic.json");
        let out = bin().current_dir(dir.path()).args(&argv).output().unwrap();
        assert_eq!(
            code(&out),
            *expected_code,
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let path = golden_path(name);
        if update {
            fs::write(&path, &out.stdout).unwrap();
            continue;
        }
        let want = fs::read(&path).unwrap_or_else(|_| panic!("missing golden {name}; rerun with UPDATE_GOLDEN=1"));
        if want != out.stdout {
            mismatched.push(*name);
        }
    }
    assert!(mismatched.is_empty(), "golden mismatch: {mismatched:?}");
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempdir().unwrap();
    let basic = write_basic(dir.path());
    for (name, _, args) in GOLDEN {
        let argv = resolve(args, &basic);
        let a = bin().args(&argv).output().unwrap();
        let b = bin().args(&argv).output().unwrap();
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
    let a = symclone(&["probe", "--m", "2", "--k", "1", "--iters", "500", "--seed", "11"]);
    let b = symclone(&["probe", "--m", "2", "--k", "1", "--iters", "500", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn constructed_processes_verify() {
    let dir = tempdir().unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec!["construct-basic".into()],
        vec!["construct-general".into(), "--dim".into(), "6".into()],
        vec!["construct-general".into(), "--input".into(), fixture("mixed_form.json")],
        vec![
            "construct-general".into(),
            "--input".into(),
            fixture("scaled_form.json"),
        ],
    ];
    for (i, args) in cases.iter().enumerate() {
        let path = dir.path().join(format!("c{i}.json"));
        let out = bin().args(args).arg("--output").arg(&path).output().unwrap();
        assert_eq!(code(&out), 0, "{args:?}");
        assert!(out.stdout.is_empty());
        let v = symclone(&["verify", "--input", path.to_str().unwrap()]);
        assert_eq!(code(&v), 0, "{args:?}: {}", String::from_utf8_lossy(&v.stdout));
        let report: Value = serde_json::from_slice(&v.stdout).unwrap();
        assert_eq!(report["verdict"]["status"], "pass");
        let d = symclone(&["diagram-check", "--instance", "symp", "--input", path.to_str().unwrap()]);
        assert_eq!(code(&d), 0);
    }
    // the written file and stdout carry the same bytes
    let to_stdout = symclone(&["construct-general", "--dim", "6"]);
    assert_eq!(fs::read(dir.path().join("c1.json")).unwrap(), to_stdout.stdout);
}

#[test]
fn perturbed_phi_reports_the_defect() {
    let dir = tempdir().unwrap();
    let mut c: Value = serde_json::from_slice(&symclone(&["construct-basic"]).stdout).unwrap();
    c["phi"]["entries"][4][1] = Value::String("1/3".into());
    let path = dir.path().join("bad.json");
    fs::write(&path, serde_json::to_vec(&c).unwrap()).unwrap();
    let out = symclone(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["verdict"]["status"], "fail");
    assert_ne!(r["symplectic_defect_norm"], "0");
    assert!(r["first_defect_entry"].is_object());
    assert!(r["first_cloning_failure"].is_object());
    let d = symclone(&["diagram-check", "--instance", "symp", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&d), 1);
}

#[test]
fn malformed_input_names_the_path() {
    let dir = tempdir().unwrap();
    let mut c: Value = serde_json::from_slice(&symclone(&["construct-basic"]).stdout).unwrap();
    c["phi"]["entries"][1][2] = Value::String("one half".into());
    let path = dir.path().join("bad.json");
    fs::write(&path, serde_json::to_vec(&c).unwrap()).unwrap();
    let out = symclone(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`phi.entries[1][2]`"), "{err}");
    assert!(out.stdout.is_empty());

    fs::write(&path, "{\"dim\": 2, \"rows\": 2").unwrap();
    let out = symclone(&["darboux", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    let out = symclone(&["verify", "--input", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn exit_code_contract() {
    let dir = tempdir().unwrap();
    let basic = write_basic(dir.path());
    let cases: &[(&[&str], i32)] = &[
        (&["--help"], 0),
        (&["--version"], 0),
        (&[], 2),
        (&["no-such-command"], 2),
        (&["construct-general", "--dim", "3"], 2),
        (&["construct-general"], 2),
        (&["readout-solve", "--m", "0", "--k", "0"], 0),
        (&["readout-solve", "--m", "4", "--k", "4"], 0),
        (&["readout-solve", "--m", "5", "--k", "4"], 1),
        (&["readout-solve", "--m", "x", "--k", "4"], 2),
        (&["quantum-refute", "--dim", "0"], 2),
        (&["quantum-refute", "--dim", "3", "--psi-overlap", "0.3"], 1),
        (&["quantum-refute", "--dim", "2", "--psi-overlap", "1.5"], 2),
        (&["quantum-refute", "--dim", "2", "--psi-overlap", "0"], 2),
        (&["quantum-refute", "--dim", "2", "--psi-overlap", "1"], 2),
        (&["probe", "--m", "2", "--k", "2", "--iters", "10"], 2),
        (&["probe", "--m", "2", "--k", "1", "--iters", "50"], 0),
        (&["size-witness", "--input", "@basic"], 2),
        (&["--format", "yaml", "construct-basic"], 2),
    ];
    for (args, want) in cases {
        let argv = resolve(args, &basic);
        let out = bin().args(&argv).output().unwrap();
        assert_eq!(code(&out), *want, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn in_process_run_matches_binary() {
    let argv = ["symclone", "readout-solve", "--m", "1", "--k", "0"];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let c = symclone_cli::run(argv, &mut out, &mut err, false);
    assert_eq!(c, symclone_cli::EXIT_FAIL);
    assert_eq!(out, symclone(&argv[1..]).stdout);
    let r: Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(r["reason"], "rank");

    let (mut out, mut err) = (Vec::new(), Vec::new());
    let c = symclone_cli::run(
        ["symclone", "construct-general", "--dim", "5"],
        &mut out,
        &mut err,
        false,
    );
    assert_eq!(c, symclone_cli::EXIT_USAGE);
    assert!(out.is_empty() && !err.is_empty());
}
