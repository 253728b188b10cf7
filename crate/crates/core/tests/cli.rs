//! Command-line contract: exit codes, emitted files, cache reuse.

use std::path::Path;
use std::process::{Command, Output};

use nwidth::format::parse_num;
use nwidth::lab::emit::read_csv;
use nwidth::lab::RunManifest;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nwidth-lab")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn manifest(dir: &Path) -> RunManifest {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn configuration_errors_exit_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[kernel]\nid = \"wiener\"\n[run]\nseed = 1\n");
    let out = lab(&["spectrum", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kernel.id"));

    let cfg = write_config(dir.path(), "[kernel]\nid = \"brownian_motion\"\n\n[spectrum]\ncels = 10\n[run]\nseed = 1\n");
    let out = lab(&["spectrum", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 5") && err.contains("cels"), "{err}");

    assert_eq!(lab(&["widths"]).status.code(), Some(2));
    assert_eq!(lab(&["campaign", "--preset", "no_such_preset"]).status.code(), Some(2));
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn time_budget_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[kernel]\nid = \"brownian_motion\"\n[spectrum]\nsource = \"analytic\"\n[run]\nseed = 1\ntime_budget_s = 0.0\n",
    );
    let out_dir = dir.path().join("out");
    let out = lab(&["widths", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(manifest(&out_dir).warnings.iter().any(|w| w.contains("budget")));
}

#[test]
fn spectrum_rerun_hits_cache_with_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[kernel]\nid = \"brownian_motion\"\n[spectrum]\ncells = 500\nn_eigs = 40\n[run]\nseed = 3\n");
    let out_dir = dir.path().join("out");
    let out_s = out_dir.to_str().unwrap();

    assert_eq!(lab(&["spectrum", "--config", &cfg, "--out", out_s]).status.code(), Some(0));
    let first = std::fs::read(out_dir.join("spectrum.csv")).unwrap();
    let m = manifest(&out_dir);
    assert_eq!((m.cache_hits, m.cache_misses), (0, 1));
    let (stamp, header, rows) = read_csv(&out_dir.join("spectrum.csv")).unwrap();
    assert_eq!(stamp, format!("# config_hash={} version={}", m.config_hash, m.version));
    assert_eq!(header[..2], ["index", "eigenvalue"]);
    let l1 = parse_num(&rows[0][1]).unwrap();
    assert!((l1 - 0.405285).abs() < 1e-6, "{l1}");

    assert_eq!(lab(&["spectrum", "--config", &cfg, "--out", out_s]).status.code(), Some(0));
    assert_eq!(manifest(&out_dir).cache_hits, 1);
    assert_eq!(std::fs::read(out_dir.join("spectrum.csv")).unwrap(), first);
}

#[test]
fn widths_rows_for_brownian_motion() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[kernel]\nid = \"brownian_motion\"\n[spectrum]\nsource = \"analytic\"\nn_eigs = 100000\n\
         [widths]\nn = [0, 1, 2, 4]\np = [inf]\nstrategies = [\"uniform\"]\n[run]\nseed = 1\n",
    );
    let out_dir = dir.path().join("out");
    let out = lab(&["widths", "--config", &cfg, "--out", out_dir.to_str().unwrap(), "--workers", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, header, rows) = read_csv(&out_dir.join("widths.csv")).unwrap();
    assert_eq!(header, ["scale_id", "n", "kind", "value", "method", "kernel_id", "p", "seed"]);
    let find = |scale: &str, n: &str, method: &str| {
        rows.iter()
            .find(|r| r[0] == scale && r[1] == n && r[4] == method && r[6] == "inf")
            .map(|r| parse_num(&r[3]).unwrap())
            .unwrap_or_else(|| panic!("no row {scale} n={n} {method}"))
    };
    assert!((find("I_Lp_upper", "4", "uniform") - 0.25).abs() < 1e-12);
    assert!((find("I_Linf_lower_tail", "4", "trace-tail") - 0.158749).abs() < 1e-5);
    let pi = std::f64::consts::PI;
    assert!((find("d_Lp_lower", "4", "holder") - 2.0 / (9.0 * pi)).abs() < 1e-12);
    // n = 0: the embedding itself; sup P_∅ = sup √k(x, x) = 1
    assert!((find("I_Lp_upper", "0", "uniform") - 1.0).abs() < 1e-12);
    assert!((find("I_Linf_lower_tail", "0", "trace-tail") - 0.5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn report_rerenders_from_campaign_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[kernel]\nid = \"brownian_bridge\"\n[spectrum]\nsource = \"analytic\"\n\
         [widths]\nn_max = 16\nstrategies = [\"greedy\"]\neval_cells = 512\nl2_cells = 128\n\
         [entropy]\nn_max = 16\n[fit]\nwindow = [2, 16]\n[run]\nseed = 5\n",
    );
    let out_dir = dir.path().join("out");
    let out_s = out_dir.to_str().unwrap();
    let out = lab(&["campaign", "--config", &cfg, "--out", out_s]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let before = std::fs::read_to_string(out_dir.join("report.txt")).unwrap();
    std::fs::remove_file(out_dir.join("report.txt")).unwrap();
    assert_eq!(lab(&["report", "--out", out_s]).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(out_dir.join("report.txt")).unwrap(), before);
    for f in ["widths.csv", "entropy.csv", "carl.csv", "fits.csv", "verdicts.json", "campaign.json", "manifest.json"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
}
