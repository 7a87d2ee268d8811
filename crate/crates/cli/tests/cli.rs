use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use zonostrat::input::read_instance;
use zonostrat::parse_report;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zonostrat"))
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], file: &Path) -> Output {
    let mut cmd = bin();
    cmd.args(&args[..1]).arg(file).args(&args[1..]);
    cmd.output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn report_round_trips_through_json() {
    let input = read_instance(&example("hirzebruch2.json"), false).unwrap();
    let out = zonostrat::analyze(&input, true);
    assert!(out.passed);
    let report = parse_report(&out.text).unwrap();
    assert_eq!(report, zonostrat::report::analyze(&input, true));
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", out.text);
}

#[test]
fn analyze_reports_printed_points() {
    let out = run(&["analyze", "--paper-pi"], &example("hirzebruch2.json"));
    assert_eq!(out.status.code(), Some(0));
    let report = parse_report(&stdout(&out)).unwrap();
    assert_eq!(report.instance.coordinates, "printed");
    assert_eq!(report.strata.len(), 5);
    let red = report.strata.iter().find(|s| s.zero_set == [2, 4]).unwrap();
    let point: Vec<String> = red.point.iter().map(|x| x.to_string()).collect();
    assert_eq!(point, ["1", "0"]);
    assert_eq!(report.oracles.stanley_count.to_string(), "11");
    assert_eq!(report.theta.len(), 5);
}

#[test]
fn analyze_writes_to_a_file() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("report.json");
    let out = bin()
        .arg("analyze")
        .arg(example("blowup_hirzebruch2.json"))
        .arg("--out")
        .arg(&target)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report = parse_report(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(report.strata.len(), 8);
    assert!(report.all_pass());
}

#[test]
fn input_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let mixed = write(&dir, "mixed.json", r#"{"vectors": [[1, 0], [1]]}"#);
    let out = run(&["analyze"], &mixed);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vectors[1]"));

    let unknown = write(&dir, "unknown.json", r#"{"vectors": [[1]], "extra": 1}"#);
    assert_eq!(run(&["analyze"], &unknown).status.code(), Some(1));

    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["analyze"], &missing).status.code(), Some(1));

    let no_pi = write(&dir, "plain.json", r#"{"vectors": [[1], [-1]]}"#);
    assert_eq!(run(&["analyze", "--paper-pi"], &no_pi).status.code(), Some(1));

    assert_eq!(bin().arg("analyze").output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn oracle_table() {
    let out = run(&["oracle", "--strata-oracle"], &example("hirzebruch2.json"));
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("stanley 11"));
    assert!(text.contains("enumerated 11"));
    assert!(text.contains("scan 5"));
    assert!(!text.contains("NO"));

    let dir = TempDir::new().unwrap();
    let segment = write(&dir, "segment.txt", "1\n-1\n");
    let out = run(&["oracle", "--plain", "--strata-oracle"], &segment);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("stanley 3"));
    assert!(text.contains("scan 2"));

    let flat = write(&dir, "flat.txt", "1 0\n-1 0\n");
    let out = run(&["oracle", "--plain", "--strata-oracle"], &flat);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rank deficient"));
    assert_eq!(run(&["oracle", "--plain"], &flat).status.code(), Some(0));
}

#[test]
fn plain_input_matches_json() {
    let dir = TempDir::new().unwrap();
    let plain = write(&dir, "h.txt", "# four vectors\n1 0\n0 1\n-1, 2\n0 -1\n");
    let a = run(&["analyze", "--plain"], &plain);
    let b = run(&["analyze"], &example("hirzebruch2.json"));
    let mut ra = parse_report(&stdout(&a)).unwrap();
    let rb = parse_report(&stdout(&b)).unwrap();
    ra.name = rb.name.clone();
    assert_eq!(ra, rb);
}

#[test]
fn theta_with_torsion() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "two.json", r#"{"vectors": [[2]]}"#);
    let out = run(&["theta"], &file);
    assert_eq!(out.status.code(), Some(0));
    let theta: zonostrat::ThetaOutput = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(theta.free_rank, 0);
    assert_eq!(theta.torsion.len(), 1);
    assert_eq!(theta.theta.len(), 2);
}

#[test]
fn restrict_to_a_stratum() {
    let file = example("hirzebruch2.json");
    let report = parse_report(&stdout(&run(&["analyze"], &file))).unwrap();
    let red = report.strata.iter().find(|s| s.zero_set == [2, 4]).unwrap();
    let out = run(&["restrict", "--stratum", &red.index.to_string(), "--paper-pi"], &file);
    assert_eq!(out.status.code(), Some(0));
    let data: zonostrat::RestrictOutput = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(data.kept, [1, 3]);
    assert_eq!(data.sub_points.len(), 2);
    assert!(data.passed);

    let out = run(&["restrict", "--stratum", "9"], &file);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn render_pictures() {
    let dir = TempDir::new().unwrap();
    let out = bin()
        .arg("render")
        .arg(example("hirzebruch2.json"))
        .arg("--dir")
        .arg(dir.path().join("small"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    for name in ["arrangement.svg", "zonotope.svg"] {
        let svg = std::fs::read_to_string(dir.path().join("small").join(name)).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    let out = bin()
        .arg("render")
        .arg(example("blowup_hirzebruch2.json"))
        .arg("--dir")
        .arg(dir.path().join("blowup"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("blowup/arrangement.svg").exists());
    assert!(!dir.path().join("blowup/zonotope.svg").exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped"));

    let one = write(&dir, "one.json", r#"{"vectors": [[1]]}"#);
    let out = bin().arg("render").arg(&one).arg("--dir").arg(dir.path().join("one")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("one/zonotope.svg").exists());
}
