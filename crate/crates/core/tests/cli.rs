use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinlattice")).args(args).output().unwrap()
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn fig2a_run_reports_visibility() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a");
    let o = bin(&["run", "--scenario", "fig2a", "--out", out.to_str().unwrap(), "--rays", "20000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("visibility x: 0."), "{stdout}");
    assert!(stdout.contains("currents [A]: 0.000, 0.000, 0.000, 2.500"));
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.starts_with(&stdout[..stdout.find("\nfiles:").unwrap_or(stdout.len())]));
    for f in ["flux.pgm", "flux.meta", "intensity_mz.pgm", "ideal_mz.pgm", "phase.pgm", "phase.meta"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let pgm = fs::read(out.join("intensity_mz.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n250 250\n65535\n"));
    assert_eq!(pgm.len(), "P5\n250 250\n65535\n".len() + 2 * 250 * 250);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = bin(&["run", "--scenario", "fig2b", "--out", d.to_str().unwrap(), "--seed", "11", "--rays", "20000"]);
        assert!(o.status.success());
    }
    let o = bin(&["run", "--scenario", "fig2b", "--out", dir.path().join("c").to_str().unwrap(), "--seed", "11", "--rays", "20000", "--sequential"]);
    assert!(o.status.success());
    assert_eq!(listing(&a), listing(&b));
    assert_eq!(listing(&a), listing(&dir.path().join("c")));
}

#[test]
fn csv_flag_dumps_every_image() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = bin(&["run", "--scenario", "fig2b", "--out", out.to_str().unwrap(), "--rays", "5000", "--csv"]);
    assert!(o.status.success());
    let pgms = listing(&out).iter().filter(|f| f.0.ends_with(".pgm")).count();
    let csvs = listing(&out).iter().filter(|f| f.0.ends_with(".csv")).count();
    assert_eq!(pgms, csvs);
    let csv = fs::read_to_string(out.join("flux.csv")).unwrap();
    assert_eq!(csv.lines().count(), 250);
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 250);
}

#[test]
fn fig3_sweep_writes_three_steps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let o = bin(&["sweep", "--scenario", "fig3", "--out", out.to_str().unwrap(), "--rays", "10000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for k in 0..3 {
        assert!(out.join(format!("step{k}_intensity_mz.pgm")).exists());
    }
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("prism1.offset = 3"));
}

#[test]
fn validate_prints_defaults_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "[source]\nseed = 3\n").unwrap();
    let o = bin(&["validate", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.contains("source.l1 = 0.965 m") && s.contains("elements: 0"), "{s}");
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn empty_beamline_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "[source]\nseed = 3\n").unwrap();
    let out = dir.path().join("o");
    let o = bin(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--rays", "2000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8(o.stdout).unwrap().contains("analyzer: none"));
}

#[test]
fn errors_exit_with_their_category() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["run", "--scenario", "fig9", "--out", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[config]"));
    assert!(!dir.path().join("x").exists());

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[source]\nseed = 1\nl1 = \"965 mm\"\n").unwrap();
    let o = bin(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected unit `m`"));

    let o = bin(&["validate", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(10));

    // divergent source with no seed anywhere
    let cfg = dir.path().join("noseed.toml");
    fs::write(&cfg, "[source]\ndivergence_fwhm_x = 1.0\n").unwrap();
    assert_eq!(bin(&["validate", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert!(bin(&["validate", "--config", cfg.to_str().unwrap(), "--seed", "4"]).status.success());
}

#[test]
fn failed_runs_leave_no_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    fs::create_dir(&out).unwrap();
    fs::write(out.join("keep.txt"), "mine").unwrap();
    // a directory where the report should go makes the final write fail
    fs::create_dir(out.join("report.txt")).unwrap();
    let o = bin(&["run", "--scenario", "fig2b", "--out", out.to_str().unwrap(), "--rays", "2000"]);
    assert_eq!(o.status.code(), Some(10), "{}", String::from_utf8_lossy(&o.stderr));
    let names: Vec<String> = listing_names(&out);
    assert_eq!(names, vec!["keep.txt".to_string(), "report.txt".to_string()]);
}

fn listing_names(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    v.sort();
    v
}

#[test]
fn optimize_writes_tuned_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = bin(&["optimize", "--scenario", "fig2a", "--out", out.to_str().unwrap(), "--rays", "5000", "--free", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.contains("objective: visibility along x"), "{s}");
    let tuned = fs::read_to_string(out.join("optimized.toml")).unwrap();
    assert!(spinlattice::config::parse_config(&tuned).is_ok());
    assert_eq!(bin(&["optimize", "--scenario", "fig2a", "--out", out.to_str().unwrap(), "--free", "0"]).status.code(), Some(2));
}
