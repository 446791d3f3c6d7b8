use std::path::PathBuf;
use std::process::{Command, Output};

fn ncpath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncpath")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect()
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("ncpath-{}-{name}", std::process::id()))
}

#[test]
fn kernel_worked_example() {
    let o = ncpath(&["kernel", "--theta", "1", "--mass", "1", "--time", "2", "--x0", "0", "--y0", "0", "--xf", "0", "--yf", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &rows(&stdout(&o))[0];
    assert!((r[7] - 0.2).abs() < 1e-15);
    assert!((r[8] + 0.4).abs() < 1e-15);
    assert!((r[9] - 0.2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn kernel_compare_three_way() {
    let o = ncpath(&["kernel", "--compare", "--slices", "8", "--time", "0.7", "--xf", "0.8", "--yf", "-0.4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let r = &rows(&text)[0];
    let col = |name: &str| r[header.iter().position(|h| *h == name).unwrap()];
    assert!(col("err_closed_sliced") < 1e-12);
    assert!(col("err_closed_oracle") < 1e-4);
    assert!(col("err_sliced_oracle") < 1e-4);
    assert_eq!(col("slices"), 8.0);
}

#[test]
fn kernel_compare_reports_nonconvergence() {
    let o = ncpath(&["kernel", "--compare", "--fock-dim", "6", "--xf", "2.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("dimension ladder"));
}

#[test]
fn kernel_to_file() {
    let path = temp_path("kernel.csv");
    let o = ncpath(&["kernel", "--time", "0", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(rows(&text)[0][7], 1.0);
}

#[test]
fn sweep_time_at_coincidence() {
    let o = ncpath(&["sweep", "--mass", "2", "--theta", "0.5", "--sweep-time", "0:4:9"]);
    assert_eq!(o.status.code(), Some(0));
    let rs = rows(&stdout(&o));
    assert_eq!(rs.len(), 9);
    for r in rs {
        let (theta, m, t) = (r[0], r[1], r[2]);
        let expect = m / (m * m * theta * theta + t * t).sqrt();
        assert!((r[9] - expect).abs() / expect < 1e-14);
    }
}

#[test]
fn sweep_theta_towards_commutative_limit() {
    let o = ncpath(&["sweep", "--time", "2", "--xf", "1", "--sweep-theta", "1e-6:1e-3:4"]);
    assert_eq!(o.status.code(), Some(0));
    let rs = rows(&stdout(&o));
    assert!((rs[0][9] - 0.5).abs() < 1e-6);
}

#[test]
fn sweep_is_deterministic() {
    let args = ["sweep", "--sweep-dx", "-2:2:33", "--sweep-time", "0:1:5", "--sweep-theta", "0.5:1.5:3"];
    let a = stdout(&ncpath(&args));
    let b = stdout(&ncpath(&args));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 1 + 33 * 5 * 3);
}

#[test]
fn empty_sweep_is_a_config_error() {
    let o = ncpath(&["sweep"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty sweep"));
}

#[test]
fn verify_default_passes() {
    let path = temp_path("verify.csv");
    let o = ncpath(&["verify", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("checks passed"));
    let csv = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "check,parameters,value_re,value_im,target_re,target_im,error,tolerance,pass"
    );
    let names: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    for expected in [
        "coherent-overlap",
        "heisenberg-algebra",
        "momentum-completeness",
        "star-completeness",
        "star-free-control",
        "telescoping",
        "semigroup",
        "oracle-vs-closed-form",
    ] {
        assert!(names.contains(&expected), "{expected}");
    }
}

#[test]
fn verify_undertruncated_fails_on_oracle() {
    let o = ncpath(&["verify", "--fock-dim", "6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("oracle-vs-closed-form"));
    assert!(stdout(&o).contains("rel_err"));
}

#[test]
fn verify_without_star_fails_on_completeness() {
    let o = ncpath(&["verify", "--no-star"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("star-completeness"));
}
