use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn wavepanel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavepanel"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Synthetic dataset written by the binary itself.
fn demo_data(root: &Path) -> PathBuf {
    let data = root.join("data");
    let o = wavepanel(&["demo-data", "--out", s(&data)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    data
}

fn run_ok(args: &[&str]) -> String {
    let o = wavepanel(args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

fn csv_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(String::from).collect()
}

const HEADER_PREFIX: &str = concat!("# wavepanel ", env!("CARGO_PKG_VERSION"), " seed=");

#[test]
fn reproduce_all_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let data = demo_data(tmp.path());
    let out = tmp.path().join("out");
    run_ok(&["reproduce-all", "--data", s(&data), "--out", s(&out), "--seed", "5", "--reps", "200"]);

    for f in [
        "twfe_table.csv",
        "index_correlations.csv",
        "regressions.csv",
        "ratios.csv",
        "phases.csv",
        "waves.csv",
        "indices.csv",
        "wave_records.csv",
        "phases.svg",
        "scatter_wave_mortality_ratio_peak_begin.svg",
        "scatter_total_mortality_ratio_inwave_interwave.svg",
        "twfe_lags.svg",
        "residuals/residuals_cumulative_lag1.svg",
        "residuals/residual_diagnostics.csv",
        "waves/Country01.svg",
        "manifest.json",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 5);
    let files = manifest["files"].as_array().unwrap();
    assert!(files.len() > 40);
    for f in files {
        let rel = f["path"].as_str().unwrap();
        let bytes = fs::read(out.join(rel)).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), format!("{:x}", Sha256::digest(&bytes)), "{rel}");
        if rel.ends_with(".csv") {
            let first = String::from_utf8(bytes).unwrap().lines().next().unwrap().to_string();
            assert_eq!(first, format!("{HEADER_PREFIX}5"), "{rel}");
        }
    }

    let twfe = csv_lines(&out.join("twfe_table.csv"));
    assert_eq!(twfe[1], "lag,outcome,beta,ci_low,ci_high,n_obs");
    assert_eq!(twfe.len(), 2 + 12);
    let beta = twfe[2].split(',').nth(2).unwrap();
    assert_eq!(beta.split('.').nth(1).unwrap().len(), 4, "{beta}");

    let waves = csv_lines(&out.join("waves.csv"));
    assert_eq!(waves[1], "country,phase,start,end,begin_start,begin_end,peak_start,peak_end,mean_deaths_pm");
    assert_eq!(waves.len(), 2 + 72);
    let idx = csv_lines(&out.join("indices.csv"));
    assert_eq!(idx[1], "country,maskall,maskinwave,maskinterwave,maskbeginwave,maskpeakwave");
    assert_eq!(csv_lines(&out.join("index_correlations.csv")).len(), 2 + 10);
}

#[test]
fn same_seed_gives_identical_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let data = demo_data(tmp.path());
    let run = |name: &str| {
        let out = tmp.path().join(name);
        run_ok(&["reproduce-all", "--data", s(&data), "--out", s(&out), "--seed", "1", "--reps", "100"]);
        fs::read(out.join("manifest.json")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn missing_covariates_is_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let data = demo_data(tmp.path());
    fs::remove_file(data.join("covariates.csv")).unwrap();
    let o = wavepanel(&["reproduce-all", "--data", s(&data), "--out", s(&tmp.path().join("out"))]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("covariates.csv"), "{err}");
}

#[test]
fn invalid_values_and_counts_are_input_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let data = demo_data(tmp.path());
    let o = wavepanel(&["validate", "--data", s(&data), "--expect-countries", "23"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected 23 countries"));
    let o = wavepanel(&["validate", "--data", s(&data), "--expect-countries", "0"]);
    assert!(o.status.success());

    let daily = data.join("daily.csv");
    let text = fs::read_to_string(&daily).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut fields: Vec<String> = lines[50].split(',').map(String::from).collect();
    fields[2] = "150".into();
    lines[50] = fields.join(",");
    fs::write(&daily, lines.join("\n") + "\n").unwrap();
    let o = wavepanel(&["validate", "--data", s(&data)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn twfe_subcommand_with_residuals() {
    let tmp = tempfile::tempdir().unwrap();
    let data = demo_data(tmp.path());
    let out = tmp.path().join("out");
    run_ok(&[
        "twfe", "--data", s(&data), "--out", s(&out), "--outcome", "cumulative", "--lags", "-1:1", "--residuals", "res",
    ]);
    let t = csv_lines(&out.join("twfe_table.csv"));
    assert_eq!(t.len(), 2 + 3);
    assert!(t[2].starts_with("-1,cumulative,"));
    assert!(out.join("res/residuals_cumulative_lag0.svg").is_file());
    let r = csv_lines(&out.join("res/residuals_Country01.csv"));
    assert_eq!(r[1], "outcome,lag,week,residual");
}

#[test]
fn corr_prints_one_row() {
    let tmp = tempfile::tempdir().unwrap();
    let data = demo_data(tmp.path());
    let out = tmp.path().join("out");
    let args = [
        "corr", "--data", s(&data), "--out", s(&out), "--method", "spearman", "--x", "ratio_peak_begin", "--y", "wave_mortality",
        "--reps", "300", "--seed", "9",
    ];
    let text = run_ok(&args);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], format!("{HEADER_PREFIX}9"));
    assert_eq!(lines[1], "estimate,ci_low,ci_high,n");
    assert_eq!(lines.len(), 3);
    assert_eq!(text, run_ok(&args));

    let o = wavepanel(&["corr", "--data", s(&data), "--out", s(&out), "--x", "maskall", "--y", "wave_mortality"]);
    assert_eq!(o.status.code(), Some(2));
    let o = wavepanel(&["corr", "--data", s(&data), "--out", s(&out), "--x", "nope", "--y", "maskall"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn regress_single_index() {
    let tmp = tempfile::tempdir().unwrap();
    let data = demo_data(tmp.path());
    let out = tmp.path().join("out");
    let text = run_ok(&[
        "regress", "--data", s(&data), "--out", s(&out), "--outcome", "age_adjusted_excess", "--mask-index", "maskinterwave",
    ]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "name,coef,se,p,std_coef,std_ci_low,std_ci_high");
    let names: Vec<&str> = lines[2..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["(intercept)", "vaccination_rate", "maskinterwave", "hdi", "health_pc"]);
    let o = wavepanel(&["regress", "--data", s(&data), "--out", s(&out), "--mask-index", "maskfoo"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn boundary_override() {
    let tmp = tempfile::tempdir().unwrap();
    let data = demo_data(tmp.path());
    let out = tmp.path().join("out");
    run_ok(&["waves", "--data", s(&data), "--out", s(&out), "--boundaries", "2020-08-02,2021-07-11"]);
    let p = csv_lines(&out.join("phases.csv"));
    assert_eq!(p[1], "phase,start,end,days");
    assert!(p[2].starts_with("1,2020-02-04,2020-08-01,"));
    assert!(p[3].starts_with("2,2020-08-02,2021-07-10,"));
    assert!(p[4].starts_with("3,2021-07-11,2021-12-31,"));
    let o = wavepanel(&["waves", "--data", s(&data), "--out", s(&out), "--boundaries", "2020-13-01"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn falsify_report_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    run_ok(&["falsify", "--out", s(&out), "--reps", "4", "--shift-sd", "3", "--reactivity", "0.5", "--lags", "-1:4", "--seed", "3"]);
    let r = csv_lines(&out.join("falsify_report.csv"));
    assert_eq!(r[0], format!("{HEADER_PREFIX}3"));
    assert_eq!(r[1], "lag,outcome,mean_beta,reject_rate");
    assert_eq!(r.len(), 2 + 12);
    assert_eq!(csv_lines(&out.join("falsify_betas.csv")).len(), 2 + 12 * 4);
}

#[test]
fn plots_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let data = demo_data(tmp.path());
    let out = tmp.path().join("out");
    run_ok(&["plot", "--data", s(&data), "--out", s(&out), "phases"]);
    run_ok(&["plot", "--data", s(&data), "--out", s(&out), "residuals", "--lags", "2"]);
    run_ok(&["plot", "--data", s(&data), "--out", s(&out), "scatter", "--x", "maskall", "--y", "age_adjusted_excess"]);
    for f in ["phases.svg", "residuals_cumulative_lag2.svg", "scatter_maskall_age_adjusted_excess.svg"] {
        let text = fs::read_to_string(out.join(f)).unwrap();
        assert!(text.starts_with("<svg") && text.ends_with("</svg>\n"), "{f}");
    }
}

#[test]
fn help_documents_flags() {
    let text = run_ok(&["--help"]);
    for flag in ["--out", "--seed", "--data", "--boundaries", "--smoothing", "--mass", "--drop-leading-zeros"] {
        assert!(text.contains(flag), "{flag}");
    }
    let text = run_ok(&["falsify", "--help"]);
    for flag in ["--reps", "--shift-sd", "--reactivity", "--lags"] {
        assert!(text.contains(flag), "{flag}");
    }
}
