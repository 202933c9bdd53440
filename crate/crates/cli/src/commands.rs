use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use wavepanel::analysis::{index_correlations, main_regressions, ratio_analyses, RatioAnalysis};
use wavepanel::calendar::{parse_date, NaiveDate};
use wavepanel::demo::{demo_dataset, DemoSpec};
use wavepanel::falsify::{spuriousness_experiment, FalsifyReport, SynthSpec};
use wavepanel::indices::{complete_records, compute_indices, wave_mask_records, MaskIndexTable, WaveMaskRecord, INDEX_NAMES};
use wavepanel::ingest::{load_panel, weekly_mask_average, write_panel, LoadOptions, PanelDataset};
use wavepanel::regress::{covariate_column, health_pc, regression_for_outcome, CiQuantile, OlsOptions, RegressionFit};
use wavepanel::stats::{correlate, BootstrapConfig, CorrelationMethod};
use wavepanel::twfe::{build_lagged_panel, lag_sweep, residual_diagnostics, twfe_fit, LagRow, OutcomeKind, ResidualDiagnostics};
use wavepanel::waves::{pooled_curve, segment, WaveParams, WaveSet};
use wavepanel::{plot, Error};

use crate::output::{f4, f4_opt, Output};
use crate::{Cli, Command, CorrArgs, FalsifyArgs, Global, MethodArg, OutcomeArg, PlotKind, RegressArgs, TwfeArgs};

/// Bad command-line values that clap cannot check.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// 2 for bad input files or arguments, 1 for failures of the analysis itself.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return 2;
        }
        if let Some(we) = cause.downcast_ref::<Error>() {
            return if we.is_input_error() || matches!(we, Error::InvalidArgument(_)) { 2 } else { 1 };
        }
    }
    1
}

pub fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Validate => {
            let ds = load(g)?;
            println!("{}", ds.summary());
            Ok(())
        }
        Command::DemoData { countries } => {
            let out = Output::new(&g.out, g.seed)?;
            let ds = demo_dataset(&DemoSpec { n_countries: *countries, seed: g.seed })?;
            write_panel(&ds, &out.dir)?;
            println!("wrote synthetic daily.csv, weekly.csv, covariates.csv to {}", out.dir.display());
            Ok(())
        }
        Command::Falsify(a) => {
            let out = Output::new(&g.out, g.seed)?;
            falsify(&out, a)?;
            out.write_manifest()
        }
        Command::ReproduceAll { reps } => reproduce_all(g, *reps),
        cmd => {
            let out = Output::new(&g.out, g.seed)?;
            let st = Study::load(g)?;
            match cmd {
                Command::Waves => write_waves(&out, &st)?,
                Command::Indices => write_indices(&out, &st)?,
                Command::Corr(a) => corr(&out, &st, a)?,
                Command::Regress(a) => regress(&out, &st, a)?,
                Command::Twfe(a) => twfe(&out, &st, a)?,
                Command::Plot(a) => plot_cmd(&out, &st, &a.kind)?,
                _ => unreachable!(),
            }
            out.write_manifest()
        }
    }
}

fn input_paths(g: &Global) -> (PathBuf, PathBuf, PathBuf) {
    let pick = |o: &Option<PathBuf>, name: &str| o.clone().unwrap_or_else(|| g.data.join(name));
    (
        pick(&g.daily, "daily.csv"),
        pick(&g.weekly, "weekly.csv"),
        pick(&g.covariates, "covariates.csv"),
    )
}

fn load(g: &Global) -> Result<PanelDataset> {
    let (d, w, c) = input_paths(g);
    let opts = LoadOptions {
        expected_countries: (g.expect_countries > 0).then_some(g.expect_countries),
        drop_leading_zeros: g.drop_leading_zeros,
        ..Default::default()
    };
    Ok(load_panel(&d, &w, &c, &opts)?)
}

fn wave_params(g: &Global) -> Result<(WaveParams, Option<Vec<NaiveDate>>)> {
    if !(g.mass > 0.0 && g.mass <= 1.0) {
        return Err(usage(format!("--mass must be in (0, 1], got {}", g.mass)));
    }
    if g.smoothing == 0 || g.phases == 0 {
        return Err(usage("--smoothing and --phases must be positive"));
    }
    let params = WaveParams {
        smoothing_days: g.smoothing,
        n_phases: g.phases,
        mass_fraction: g.mass,
        ..Default::default()
    };
    let boundaries = match &g.boundaries {
        None => None,
        Some(list) => Some(
            list.iter()
                .map(|s| parse_date(s.trim()).ok_or_else(|| usage(format!("bad boundary date {s:?}, expected YYYY-MM-DD"))))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    Ok((params, boundaries))
}

/// Dataset plus its segmentation and mask indices.
struct Study {
    ds: PanelDataset,
    params: WaveParams,
    waveset: WaveSet,
    table: MaskIndexTable,
    records: Vec<WaveMaskRecord>,
}

impl Study {
    fn load(g: &Global) -> Result<Self> {
        let ds = load(g)?;
        Self::from_dataset(g, ds)
    }

    fn from_dataset(g: &Global, ds: PanelDataset) -> Result<Self> {
        let (params, boundaries) = wave_params(g)?;
        let waveset = segment(&ds, &params, boundaries).context("wave segmentation")?;
        let table = compute_indices(&ds, &waveset).context("mask indices")?;
        let records = wave_mask_records(&ds, &waveset)?;
        Ok(Study { ds, params, waveset, table, records })
    }
}

fn write_waves(out: &Output, st: &Study) -> Result<()> {
    let rows: Vec<Vec<String>> = st
        .waveset
        .partition
        .phases()
        .iter()
        .enumerate()
        .map(|(i, p)| vec![(i + 1).to_string(), p.start.to_string(), p.end.to_string(), p.len_days().to_string()])
        .collect();
    out.csv("phases.csv", &["phase", "start", "end", "days"], &rows)?;
    let rows: Vec<Vec<String>> = st
        .waveset
        .waves
        .iter()
        .map(|w| {
            vec![
                w.country.clone(),
                w.phase_index.to_string(),
                w.span.start.to_string(),
                w.span.end.to_string(),
                w.begin_window.start.to_string(),
                w.begin_window.end.to_string(),
                w.peak_window.start.to_string(),
                w.peak_window.end.to_string(),
                f4(w.wave_deaths_pm_mean),
            ]
        })
        .collect();
    out.csv(
        "waves.csv",
        &["country", "phase", "start", "end", "begin_start", "begin_end", "peak_start", "peak_end", "mean_deaths_pm"],
        &rows,
    )?;
    Ok(())
}

fn write_indices(out: &Output, st: &Study) -> Result<()> {
    let mut header = vec!["country"];
    header.extend(INDEX_NAMES);
    let rows: Vec<Vec<String>> = st
        .table
        .rows
        .iter()
        .map(|r| std::iter::once(r.country.clone()).chain(r.values().iter().map(|v| f4(*v))).collect())
        .collect();
    out.csv("indices.csv", &header, &rows)?;
    let rows: Vec<Vec<String>> = st
        .records
        .iter()
        .map(|r| {
            vec![
                r.country.clone(),
                r.phase_index.to_string(),
                f4_opt(r.begin_avg),
                f4_opt(r.peak_avg),
                f4_opt(r.ratio_peak_begin()),
                f4(r.wave_deaths_pm_mean),
            ]
        })
        .collect();
    out.csv(
        "wave_records.csv",
        &["country", "phase", "maskbeginwave", "maskpeakwave", "ratio_peak_begin", "mean_deaths_pm"],
        &rows,
    )?;
    Ok(())
}

fn bootstrap_config(out: &Output, reps: usize) -> Result<BootstrapConfig> {
    if reps == 0 {
        return Err(usage("--reps must be positive"));
    }
    Ok(BootstrapConfig { reps, seed: out.seed, ..Default::default() })
}

/// Named variable at country or wave level.
struct Column {
    values: Vec<f64>,
    labels: Vec<String>,
    wave_level: bool,
}

const WAVE_COLUMNS: [&str; 4] = ["ratio_peak_begin", "wave_mortality", "wave_maskbegin", "wave_maskpeak"];

fn column(st: &Study, name: &str) -> Result<Column> {
    if WAVE_COLUMNS.contains(&name) {
        let recs = complete_records(&st.records);
        let values = recs
            .iter()
            .map(|r| match name {
                "ratio_peak_begin" => r.ratio_peak_begin().unwrap_or(f64::NAN),
                "wave_mortality" => r.wave_deaths_pm_mean,
                "wave_maskbegin" => r.begin_avg.unwrap(),
                _ => r.peak_avg.unwrap(),
            })
            .collect();
        let labels = recs.iter().map(|r| format!("{}:{}", r.country, r.phase_index)).collect();
        return Ok(Column { values, labels, wave_level: true });
    }
    let cov = st.ds.covariates();
    let values = if let Some(v) = st.table.column(name) {
        v
    } else if let Some(v) = covariate_column(cov, name) {
        v
    } else {
        match name {
            "health_pc" => health_pc(cov)?,
            "total_mortality" => (0..st.ds.n_countries()).map(|ci| st.ds.total_deaths(ci)).collect(),
            "ratio_inwave_interwave" => {
                let a = st.table.column("maskinwave").unwrap();
                let b = st.table.column("maskinterwave").unwrap();
                a.iter().zip(&b).map(|(x, y)| x / y).collect()
            }
            _ => {
                return Err(usage(format!(
                    "unknown column {name:?}; country level: {}, covariates, health_pc, total_mortality, ratio_inwave_interwave; wave level: {}",
                    INDEX_NAMES.join(", "),
                    WAVE_COLUMNS.join(", ")
                )))
            }
        }
    };
    Ok(Column { values, labels: st.ds.countries().to_vec(), wave_level: false })
}

fn column_pair(st: &Study, x: &str, y: &str) -> Result<(Column, Column)> {
    let (a, b) = (column(st, x)?, column(st, y)?);
    if a.wave_level != b.wave_level {
        return Err(usage(format!("{x} and {y} are measured at different levels (country vs wave)")));
    }
    Ok((a, b))
}

fn corr(out: &Output, st: &Study, a: &CorrArgs) -> Result<()> {
    let cfg = bootstrap_config(out, a.reps)?;
    if let (Some(x), Some(y)) = (&a.x, &a.y) {
        let (cx, cy) = column_pair(st, x, y)?;
        let method = match a.method {
            MethodArg::Pearson => CorrelationMethod::Pearson,
            MethodArg::Spearman => CorrelationMethod::Spearman,
        };
        let r = correlate(&cx.values, &cy.values, method, &cfg)?;
        let row = vec![f4(r.estimate), f4(r.ci_low), f4(r.ci_high), r.n.to_string()];
        print!("{}", out.csv_string(&["estimate", "ci_low", "ci_high", "n"], &[row])?);
        return Ok(());
    }
    write_corr_tables(out, st, &cfg)
}

fn write_corr_tables(out: &Output, st: &Study, cfg: &BootstrapConfig) -> Result<()> {
    let table = index_correlations(&st.table, cfg)?;
    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|c| {
            vec![
                c.first.to_string(),
                c.second.to_string(),
                f4(c.result.estimate),
                f4(c.result.ci_low),
                f4(c.result.ci_high),
                c.result.n.to_string(),
            ]
        })
        .collect();
    out.csv("index_correlations.csv", &["first", "second", "pearson", "ci_low", "ci_high", "n"], &rows)?;

    let ratios = ratio_analyses(&st.ds, &st.records, &st.table, cfg, &OlsOptions::default())?;
    let rows: Vec<Vec<String>> = ratios.iter().map(ratio_row).collect();
    out.csv(
        "ratios.csv",
        &[
            "analysis",
            "n",
            "q1",
            "median",
            "q3",
            "mortality",
            "spearman",
            "spearman_ci_low",
            "spearman_ci_high",
            "wilcoxon_v",
            "wilcoxon_p",
            "mortality_std_coef",
            "mortality_std_ci_low",
            "mortality_std_ci_high",
            "mortality_p",
        ],
        &rows,
    )?;
    Ok(())
}

fn ratio_row(r: &RatioAnalysis) -> Vec<String> {
    let m = r.regression.row(r.mortality_name).expect("mortality regressor present");
    vec![
        r.name.to_string(),
        r.ratios.len().to_string(),
        f4(r.quartiles.0),
        f4(r.quartiles.1),
        f4(r.quartiles.2),
        r.mortality_name.to_string(),
        f4(r.spearman.estimate),
        f4(r.spearman.ci_low),
        f4(r.spearman.ci_high),
        f4(r.wilcoxon.statistic),
        f4(r.wilcoxon.p_value),
        f4_opt(m.std_coef),
        f4_opt(m.std_ci.map(|c| c.0)),
        f4_opt(m.std_ci.map(|c| c.1)),
        f4(m.p),
    ]
}

const REGRESSION_HEADER: [&str; 7] = ["name", "coef", "se", "p", "std_coef", "std_ci_low", "std_ci_high"];

fn regression_rows(fit: &RegressionFit) -> Vec<Vec<String>> {
    fit.rows
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                f4(r.coef),
                f4(r.se),
                f4(r.p),
                f4_opt(r.std_coef),
                f4_opt(r.std_ci.map(|c| c.0)),
                f4_opt(r.std_ci.map(|c| c.1)),
            ]
        })
        .collect()
}

fn regress(out: &Output, st: &Study, a: &RegressArgs) -> Result<()> {
    let opts = OlsOptions {
        ci_quantile: if a.t_quantile { CiQuantile::StudentT } else { CiQuantile::Normal },
        ..Default::default()
    };
    if covariate_column(st.ds.covariates(), &a.outcome).is_none() {
        return Err(usage(format!("unknown outcome {:?}", a.outcome)));
    }
    match &a.mask_index {
        Some(mask) => {
            if !INDEX_NAMES.contains(&mask.as_str()) {
                return Err(usage(format!("unknown mask index {mask:?}; expected one of {}", INDEX_NAMES.join(", "))));
            }
            let fit = regression_for_outcome(&st.ds, &st.table, &a.outcome, mask, &opts)?;
            let text = out.csv_string(&REGRESSION_HEADER, &regression_rows(&fit))?;
            out.file(&format!("regression_{}_{}.csv", a.outcome, mask), &text)?;
            print!("{text}");
        }
        None => {
            let fits = if a.outcome == "age_adjusted_excess" {
                main_regressions(&st.ds, &st.table, &opts)?
            } else {
                wavepanel::analysis::CORRELATION_ORDER
                    .iter()
                    .map(|&m| Ok((m, regression_for_outcome(&st.ds, &st.table, &a.outcome, m, &opts)?)))
                    .collect::<wavepanel::Result<Vec<_>>>()?
            };
            write_regression_table(out, &fits, &a.outcome)?;
        }
    }
    Ok(())
}

fn write_regression_table(out: &Output, fits: &[(&str, RegressionFit)], outcome: &str) -> Result<()> {
    let mut header = vec!["mask_index"];
    header.extend(REGRESSION_HEADER);
    let rows: Vec<Vec<String>> = fits
        .iter()
        .flat_map(|(m, fit)| {
            regression_rows(fit).into_iter().map(move |r| std::iter::once(m.to_string()).chain(r).collect())
        })
        .collect();
    let name = if outcome == "age_adjusted_excess" { "regressions.csv".to_string() } else { format!("regressions_{outcome}.csv") };
    out.csv(&name, &header, &rows)?;
    Ok(())
}

pub fn parse_lags(s: &str) -> Result<Vec<i32>> {
    let bad = || usage(format!("bad lag list {s:?}; use a:b or a comma list"));
    let lags: Vec<i32> = if let Some((a, b)) = s.split_once(':') {
        let a: i32 = a.trim().parse().map_err(|_| bad())?;
        let b: i32 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    };
    if lags.is_empty() {
        return Err(bad());
    }
    Ok(lags)
}

fn outcome_kinds(o: OutcomeArg) -> Vec<OutcomeKind> {
    match o {
        OutcomeArg::Weekly => vec![OutcomeKind::Weekly],
        OutcomeArg::Cumulative => vec![OutcomeKind::Cumulative],
        OutcomeArg::Both => vec![OutcomeKind::Weekly, OutcomeKind::Cumulative],
    }
}

fn twfe(out: &Output, st: &Study, a: &TwfeArgs) -> Result<()> {
    let lags = parse_lags(&a.lags)?;
    let kinds = outcome_kinds(a.outcome);
    let rows = lag_sweep(&st.ds, &lags, &kinds)?;
    write_twfe_table(out, &rows)?;
    if let Some(dir) = &a.residuals {
        write_residuals(out, &st.ds, &lags, &kinds, dir)?;
    }
    Ok(())
}

fn write_twfe_table(out: &Output, rows: &[LagRow]) -> Result<()> {
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.lag.to_string(),
                r.outcome_kind.name().to_string(),
                f4(r.beta),
                f4(r.ci.0),
                f4(r.ci.1),
                r.n_obs.to_string(),
            ]
        })
        .collect();
    out.csv("twfe_table.csv", &["lag", "outcome", "beta", "ci_low", "ci_high", "n_obs"], &table)?;
    Ok(())
}

fn diagnostics(ds: &PanelDataset, kind: OutcomeKind, lag: i32) -> Result<ResidualDiagnostics> {
    let panel = build_lagged_panel(ds, kind, lag)?;
    let fit = twfe_fit(&panel)?;
    Ok(residual_diagnostics(&panel, &fit))
}

fn residual_title(kind: OutcomeKind, lag: i32) -> String {
    format!("TWFE residuals against time, {} outcome, lag {lag}", kind.name())
}

/// Residual series per country (CSV) and one grid per fit (SVG), under `dir`,
/// which is taken relative to the output directory unless absolute.
fn write_residuals(out: &Output, ds: &PanelDataset, lags: &[i32], kinds: &[OutcomeKind], dir: &Path) -> Result<()> {
    let target = Output::new(&out.dir.join(dir), out.seed)?;
    let ds = weekly_mask_average(ds);
    let mut per_country: Vec<Vec<Vec<String>>> = vec![Vec::new(); ds.n_countries()];
    let mut summary = Vec::new();
    for &kind in kinds {
        for &lag in lags {
            let diag = diagnostics(&ds, kind, lag)?;
            for (ci, c) in diag.countries.iter().enumerate() {
                for (week, e) in &c.series {
                    per_country[ci].push(vec![kind.name().into(), lag.to_string(), week.to_string(), f4(*e)]);
                }
                summary.push(vec![
                    c.country.clone(),
                    kind.name().into(),
                    lag.to_string(),
                    f4_opt(c.lag1_autocorr),
                    f4_opt(c.runs_p_value),
                ]);
            }
            target.file(
                &format!("residuals_{}_lag{lag}.svg", kind.name()),
                &plot::residual_grid(&diag, &residual_title(kind, lag)),
            )?;
        }
    }
    for (ci, rows) in per_country.iter().enumerate() {
        target.csv(
            &format!("residuals_{}.csv", file_safe(&ds.countries()[ci])),
            &["outcome", "lag", "week", "residual"],
            rows,
        )?;
    }
    target.csv("residual_diagnostics.csv", &["country", "outcome", "lag", "lag1_autocorr", "runs_p"], &summary)?;
    Ok(())
}

fn file_safe(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn falsify(out: &Output, a: &FalsifyArgs) -> Result<FalsifyReport> {
    if a.reps == 0 {
        return Err(usage("--reps must be positive"));
    }
    let lags = parse_lags(&a.lags)?;
    let spec = SynthSpec {
        n_countries: a.countries,
        n_weeks: a.weeks,
        country_shift_sd: a.shift_sd,
        country_scale_sd: a.scale_sd,
        mask_reactivity: a.reactivity,
        mask_noise_sd: a.mask_noise_sd,
        true_beta: a.true_beta,
        noise_sd: a.noise_sd,
        seed: out.seed,
        ..Default::default()
    };
    let report = spuriousness_experiment(&spec, &lags, a.reps)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| vec![r.lag.to_string(), r.outcome_kind.name().into(), f4(r.mean_beta), f4(r.reject_rate)])
        .collect();
    out.csv("falsify_report.csv", &["lag", "outcome", "mean_beta", "reject_rate"], &rows)?;
    let betas: Vec<Vec<String>> = report
        .rows
        .iter()
        .flat_map(|r| {
            r.betas
                .iter()
                .enumerate()
                .map(move |(i, b)| vec![i.to_string(), r.lag.to_string(), r.outcome_kind.name().into(), f4(*b)])
        })
        .collect();
    out.csv("falsify_betas.csv", &["replication", "lag", "outcome", "beta"], &betas)?;
    Ok(report)
}

fn plot_phases(out: &Output, st: &Study) -> Result<()> {
    let curve = pooled_curve(&st.ds)?;
    out.file("phases.svg", &plot::phases_figure(&curve, st.params.smoothing_days, &st.waveset.partition))?;
    Ok(())
}

fn plot_waves(out: &Output, st: &Study) -> Result<()> {
    for c in st.ds.countries() {
        let svg = plot::wave_figure(&st.ds, &st.waveset, c).expect("country present");
        out.file(&format!("waves/{}.svg", file_safe(c)), &svg)?;
    }
    Ok(())
}

fn plot_scatter(out: &Output, st: &Study, x: &str, y: &str) -> Result<()> {
    let (cx, cy) = column_pair(st, x, y)?;
    let svg = plot::scatter_figure(&cx.values, &cy.values, Some(&cx.labels), x, y, &format!("{y} against {x}"));
    out.file(&format!("scatter_{x}_{y}.svg"), &svg)?;
    Ok(())
}

fn plot_cmd(out: &Output, st: &Study, kind: &PlotKind) -> Result<()> {
    match kind {
        PlotKind::Phases => plot_phases(out, st),
        PlotKind::Waves => plot_waves(out, st),
        PlotKind::Scatter { x, y } => plot_scatter(out, st, x, y),
        PlotKind::Residuals { outcome, lags } => {
            let ds = weekly_mask_average(&st.ds);
            for kind in outcome_kinds(*outcome) {
                for lag in parse_lags(lags)? {
                    let diag = diagnostics(&ds, kind, lag)?;
                    out.file(
                        &format!("residuals_{}_lag{lag}.svg", kind.name()),
                        &plot::residual_grid(&diag, &residual_title(kind, lag)),
                    )?;
                }
            }
            Ok(())
        }
        PlotKind::Lags { lags } => {
            let rows = lag_sweep(&st.ds, &parse_lags(lags)?, &[OutcomeKind::Weekly, OutcomeKind::Cumulative])?;
            out.file("twfe_lags.svg", &plot::lag_figure(&rows))?;
            Ok(())
        }
    }
}

fn reproduce_all(g: &Global, reps: usize) -> Result<()> {
    let out = Output::new(&g.out, g.seed)?;
    let ds = load(g).context("stage validate")?;
    let st = Study::from_dataset(g, ds).context("stage waves")?;
    write_waves(&out, &st).context("stage waves")?;
    write_indices(&out, &st).context("stage indices")?;
    let cfg = bootstrap_config(&out, reps)?;
    write_corr_tables(&out, &st, &cfg).context("stage corr")?;
    let fits = main_regressions(&st.ds, &st.table, &OlsOptions::default()).context("stage regress")?;
    write_regression_table(&out, &fits, "age_adjusted_excess").context("stage regress")?;
    let lags: Vec<i32> = (-1..=4).collect();
    let kinds = [OutcomeKind::Weekly, OutcomeKind::Cumulative];
    let rows = lag_sweep(&st.ds, &lags, &kinds).context("stage twfe")?;
    write_twfe_table(&out, &rows).context("stage twfe")?;
    write_residuals(&out, &st.ds, &lags, &kinds, Path::new("residuals")).context("stage twfe residuals")?;
    plot_phases(&out, &st).context("stage plot phases")?;
    plot_waves(&out, &st).context("stage plot waves")?;
    plot_scatter(&out, &st, "wave_mortality", "ratio_peak_begin").context("stage plot scatter")?;
    plot_scatter(&out, &st, "total_mortality", "ratio_inwave_interwave").context("stage plot scatter")?;
    out.file("twfe_lags.svg", &plot::lag_figure(&rows)).context("stage plot lags")?;
    out.write_manifest()?;
    println!("artifacts written to {}", out.dir.display());
    Ok(())
}
