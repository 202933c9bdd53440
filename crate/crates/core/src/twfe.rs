//! Two-way fixed-effects panel regression with lagged outcomes.
//!
//! Model: `Y[i, t+d] = a_i + b_t + β·M[i, t] + ε[i, t]`, estimated on the within
//! transformation obtained by alternating country/week demeaning. Standard
//! errors are clustered by country.

use std::collections::HashMap;

use chrono::{Duration, NaiveDate};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};
use crate::ingest::{weekly_mask_average, PanelDataset};

pub const MAX_LAG: i32 = 8;
const DEMEAN_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutcomeKind {
    Weekly,
    Cumulative,
}

impl OutcomeKind {
    pub fn name(self) -> &'static str {
        match self {
            OutcomeKind::Weekly => "weekly",
            OutcomeKind::Cumulative => "cumulative",
        }
    }
}

impl std::str::FromStr for OutcomeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weekly" => Ok(OutcomeKind::Weekly),
            "cumulative" => Ok(OutcomeKind::Cumulative),
            _ => Err(Error::InvalidArgument(format!("unknown outcome kind {s}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelRow {
    pub country: usize,
    /// Index into [`LaggedPanel::weeks`] of the exposure week.
    pub week: usize,
    pub exposure: f64,
    pub outcome: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaggedPanel {
    pub countries: Vec<String>,
    pub weeks: Vec<NaiveDate>,
    pub rows: Vec<PanelRow>,
    pub lag: i32,
    pub outcome_kind: OutcomeKind,
}

impl LaggedPanel {
    /// Builds a panel from `(country, exposure week, exposure, outcome)` tuples.
    pub fn from_observations(
        obs: impl IntoIterator<Item = (String, NaiveDate, f64, f64)>,
        lag: i32,
        outcome_kind: OutcomeKind,
    ) -> Self {
        let obs: Vec<_> = obs.into_iter().collect();
        let mut countries: Vec<String> = obs.iter().map(|o| o.0.clone()).collect();
        countries.sort();
        countries.dedup();
        let mut weeks: Vec<NaiveDate> = obs.iter().map(|o| o.1).collect();
        weeks.sort();
        weeks.dedup();
        let ci: HashMap<&str, usize> = countries.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let wi: HashMap<NaiveDate, usize> = weeks.iter().enumerate().map(|(i, w)| (*w, i)).collect();
        let mut rows: Vec<PanelRow> = obs
            .iter()
            .map(|(c, w, m, y)| PanelRow {
                country: ci[c.as_str()],
                week: wi[w],
                exposure: *m,
                outcome: *y,
            })
            .collect();
        rows.sort_by_key(|r| (r.country, r.week));
        LaggedPanel {
            countries,
            weeks,
            rows,
            lag,
            outcome_kind,
        }
    }

    pub fn n_obs(&self) -> usize {
        self.rows.len()
    }
}

/// Aligns weekly mask usage at week `t` with the outcome at week `t + lag`.
/// Rows need both values observed.
pub fn build_lagged_panel(ds: &PanelDataset, kind: OutcomeKind, lag: i32) -> Result<LaggedPanel> {
    if lag.abs() > MAX_LAG {
        return Err(Error::InvalidArgument(format!("lag {lag} outside [-{MAX_LAG}, {MAX_LAG}]")));
    }
    let filled;
    let ds = if ds.weekly_records().all(|r| r.mask_pct_weekly.is_none()) {
        filled = weekly_mask_average(ds);
        &filled
    } else {
        ds
    };
    let mut obs = Vec::new();
    for (ci, country) in ds.countries().iter().enumerate() {
        let weekly = ds.weekly(ci);
        let by_week: HashMap<NaiveDate, usize> = weekly.iter().enumerate().map(|(i, r)| (r.week_start, i)).collect();
        for r in weekly {
            let Some(m) = r.mask_pct_weekly else { continue };
            let target = r.week_start + Duration::days(7 * lag as i64);
            let Some(&j) = by_week.get(&target) else { continue };
            let y = match kind {
                OutcomeKind::Weekly => weekly[j].excess_weekly,
                OutcomeKind::Cumulative => weekly[j].excess_cumulative,
            };
            if let Some(y) = y {
                obs.push((country.clone(), r.week_start, m, y));
            }
        }
    }
    if obs.is_empty() {
        return Err(Error::EmptyPanel(lag));
    }
    Ok(LaggedPanel::from_observations(obs, lag, kind))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwfeFit {
    pub lag: i32,
    pub outcome_kind: OutcomeKind,
    pub beta: f64,
    pub se: f64,
    pub ci: (f64, f64),
    pub t_stat: f64,
    pub p_value: f64,
    pub n_obs: usize,
    pub n_countries: usize,
    pub n_weeks: usize,
    /// Residual per panel row, same order as [`LaggedPanel::rows`].
    pub residuals: Vec<f64>,
    /// Country effects, summing to zero.
    pub country_effects: Vec<f64>,
    /// Week effects, carrying the grand mean.
    pub week_effects: Vec<f64>,
}

impl TwfeFit {
    pub fn rejects_zero(&self) -> bool {
        self.ci.0 > 0.0 || self.ci.1 < 0.0
    }
}

struct Groups {
    country: Vec<usize>,
    week: Vec<usize>,
    n_country: Vec<f64>,
    n_week: Vec<f64>,
}

impl Groups {
    fn new(panel: &LaggedPanel) -> Self {
        let mut n_country = vec![0.0; panel.countries.len()];
        let mut n_week = vec![0.0; panel.weeks.len()];
        for r in &panel.rows {
            n_country[r.country] += 1.0;
            n_week[r.week] += 1.0;
        }
        Groups {
            country: panel.rows.iter().map(|r| r.country).collect(),
            week: panel.rows.iter().map(|r| r.week).collect(),
            n_country,
            n_week,
        }
    }

    fn group_means(&self, v: &[f64], key: &[usize], counts: &[f64]) -> Vec<f64> {
        let mut s = vec![0.0; counts.len()];
        for (x, &g) in v.iter().zip(key) {
            s[g] += x;
        }
        for (m, n) in s.iter_mut().zip(counts) {
            if *n > 0.0 {
                *m /= n;
            }
        }
        s
    }

    /// Residual of `v` after projecting out country and week dummies.
    fn demean(&self, v: &[f64]) -> Vec<f64> {
        let mut out = v.to_vec();
        let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let tol = DEMEAN_TOL * scale;
        for _ in 0..MAX_SWEEPS {
            let cm = self.group_means(&out, &self.country, &self.n_country);
            for (x, &g) in out.iter_mut().zip(&self.country) {
                *x -= cm[g];
            }
            let wm = self.group_means(&out, &self.week, &self.n_week);
            for (x, &g) in out.iter_mut().zip(&self.week) {
                *x -= wm[g];
            }
            let cm = self.group_means(&out, &self.country, &self.n_country);
            if cm.iter().all(|m| m.abs() < tol) {
                break;
            }
        }
        out
    }

    /// Additive effects `a_i + b_t` fitted to `z` by alternating means.
    fn effects(&self, z: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut a = vec![0.0; self.n_country.len()];
        let mut b = vec![0.0; self.n_week.len()];
        let scale = z.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let tol = DEMEAN_TOL * 1e-2 * scale;
        for _ in 0..MAX_SWEEPS {
            let r: Vec<f64> = z.iter().zip(&self.week).map(|(x, &t)| x - b[t]).collect();
            let na = self.group_means(&r, &self.country, &self.n_country);
            let r: Vec<f64> = z.iter().zip(&self.country).map(|(x, &i)| x - na[i]).collect();
            let nb = self.group_means(&r, &self.week, &self.n_week);
            let delta = a
                .iter()
                .zip(&na)
                .chain(b.iter().zip(&nb))
                .fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
            a = na;
            b = nb;
            if delta < tol {
                break;
            }
        }
        let shift = a.iter().sum::<f64>() / a.len() as f64;
        a.iter_mut().for_each(|v| *v -= shift);
        b.iter_mut().for_each(|v| *v += shift);
        (a, b)
    }
}

/// Least-squares β with country and week fixed effects; SE clustered by
/// country with small-sample factor `G/(G−1) · (N−1)/(N−K)` where `K` counts β
/// and the non-nested week effects; 95% CI from t with `G − 1` df.
pub fn twfe_fit(panel: &LaggedPanel) -> Result<TwfeFit> {
    let g_count = panel.countries.len();
    let t_count = panel.weeks.len();
    if g_count < 2 || t_count < 2 {
        return Err(Error::TooFewObservations(format!(
            "{g_count} countries and {t_count} weeks; need at least 2 of each"
        )));
    }
    let groups = Groups::new(panel);
    let y: Vec<f64> = panel.rows.iter().map(|r| r.outcome).collect();
    let m: Vec<f64> = panel.rows.iter().map(|r| r.exposure).collect();
    let yt = groups.demean(&y);
    let mt = groups.demean(&m);
    let sxx: f64 = mt.iter().map(|v| v * v).sum();
    let mbar = m.iter().sum::<f64>() / m.len() as f64;
    let raw_ss: f64 = m.iter().map(|v| (v - mbar).powi(2)).sum();
    if !(sxx > 1e-12 * raw_ss.max(f64::MIN_POSITIVE)) {
        return Err(Error::ExposureAbsorbed);
    }
    let beta = mt.iter().zip(&yt).map(|(a, b)| a * b).sum::<f64>() / sxx;

    let z: Vec<f64> = y.iter().zip(&m).map(|(y, m)| y - beta * m).collect();
    let (a, b) = groups.effects(&z);
    let residuals: Vec<f64> = panel
        .rows
        .iter()
        .zip(&z)
        .map(|(r, z)| z - a[r.country] - b[r.week])
        .collect();

    let n = panel.rows.len();
    let k = t_count; // β plus T − 1 week effects; country effects are nested in clusters
    if n <= k {
        return Err(Error::TooFewObservations(format!("{n} observations for {k} parameters")));
    }
    let ew: Vec<f64> = yt.iter().zip(&mt).map(|(y, m)| y - beta * m).collect();
    let mut scores = vec![0.0; g_count];
    for ((r, x), e) in panel.rows.iter().zip(&mt).zip(&ew) {
        scores[r.country] += x * e;
    }
    let gf = g_count as f64;
    let adj = gf / (gf - 1.0) * (n as f64 - 1.0) / (n as f64 - k as f64);
    let meat: f64 = scores.iter().map(|s| s * s).sum();
    let se = (adj * meat).sqrt() / sxx;
    let tdist = StudentsT::new(0.0, 1.0, gf - 1.0).expect("G ≥ 2");
    let q = tdist.inverse_cdf(0.975);
    let t_stat = beta / se;
    let p_value = if se > 0.0 {
        (2.0 * tdist.cdf(-t_stat.abs())).min(1.0)
    } else {
        f64::NAN
    };

    Ok(TwfeFit {
        lag: panel.lag,
        outcome_kind: panel.outcome_kind,
        beta,
        se,
        ci: (beta - q * se, beta + q * se),
        t_stat,
        p_value,
        n_obs: n,
        n_countries: g_count,
        n_weeks: t_count,
        residuals,
        country_effects: a,
        week_effects: b,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagRow {
    pub lag: i32,
    pub outcome_kind: OutcomeKind,
    pub beta: f64,
    pub se: f64,
    pub ci: (f64, f64),
    pub n_obs: usize,
}

impl From<&TwfeFit> for LagRow {
    fn from(f: &TwfeFit) -> Self {
        LagRow {
            lag: f.lag,
            outcome_kind: f.outcome_kind,
            beta: f.beta,
            se: f.se,
            ci: f.ci,
            n_obs: f.n_obs,
        }
    }
}

/// One fit per (lag, outcome kind), lag-major.
pub fn lag_sweep(ds: &PanelDataset, lags: &[i32], kinds: &[OutcomeKind]) -> Result<Vec<LagRow>> {
    if lags.is_empty() || kinds.is_empty() {
        return Err(Error::InvalidArgument("empty lag list".into()));
    }
    let ds = weekly_mask_average(ds);
    let mut out = Vec::new();
    for &lag in lags {
        for &kind in kinds {
            let panel = build_lagged_panel(&ds, kind, lag)?;
            out.push(LagRow::from(&twfe_fit(&panel)?));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountryResiduals {
    pub country: String,
    pub series: Vec<(NaiveDate, f64)>,
    /// Lag-1 autocorrelation; `None` for constant series.
    pub lag1_autocorr: Option<f64>,
    /// Two-sided Wald–Wolfowitz runs test on residual signs.
    pub runs_p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualDiagnostics {
    pub countries: Vec<CountryResiduals>,
    pub mean_abs_autocorr: Option<f64>,
    pub share_autocorr_above_0_9: f64,
}

pub fn lag1_autocorr(e: &[f64]) -> Option<f64> {
    if e.len() < 3 {
        return None;
    }
    let m = e.iter().sum::<f64>() / e.len() as f64;
    let den: f64 = e.iter().map(|v| (v - m).powi(2)).sum();
    let scale = e.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if den <= 1e-20 * scale.max(1.0).powi(2) * e.len() as f64 {
        return None;
    }
    let num: f64 = e.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    Some(num / den)
}

pub fn runs_test(e: &[f64]) -> Option<f64> {
    let scale = e.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let eps = 1e-12 * scale.max(1.0);
    let signs: Vec<bool> = e.iter().filter(|v| v.abs() > eps).map(|v| *v > 0.0).collect();
    let n1 = signs.iter().filter(|s| **s).count() as f64;
    let n2 = signs.len() as f64 - n1;
    if n1 == 0.0 || n2 == 0.0 {
        return None;
    }
    let runs = 1 + signs.windows(2).filter(|w| w[0] != w[1]).count();
    let n = n1 + n2;
    let mu = 2.0 * n1 * n2 / n + 1.0;
    let var = 2.0 * n1 * n2 * (2.0 * n1 * n2 - n) / (n * n * (n - 1.0));
    if !(var > 0.0) {
        return None;
    }
    let z = (runs as f64 - mu) / var.sqrt();
    Some((2.0 * Normal::standard().cdf(-z.abs())).min(1.0))
}

pub fn residual_diagnostics(panel: &LaggedPanel, fit: &TwfeFit) -> ResidualDiagnostics {
    let mut per: Vec<Vec<(NaiveDate, f64)>> = vec![Vec::new(); panel.countries.len()];
    for (r, e) in panel.rows.iter().zip(&fit.residuals) {
        per[r.country].push((panel.weeks[r.week], *e));
    }
    let countries: Vec<CountryResiduals> = per
        .into_iter()
        .enumerate()
        .map(|(i, mut series)| {
            series.sort_by_key(|p| p.0);
            let vals: Vec<f64> = series.iter().map(|p| p.1).collect();
            CountryResiduals {
                country: panel.countries[i].clone(),
                lag1_autocorr: lag1_autocorr(&vals),
                runs_p_value: runs_test(&vals),
                series,
            }
        })
        .collect();
    let acs: Vec<f64> = countries.iter().filter_map(|c| c.lag1_autocorr).collect();
    let share = countries
        .iter()
        .filter(|c| c.lag1_autocorr.is_some_and(|a| a > 0.9))
        .count() as f64
        / countries.len() as f64;
    ResidualDiagnostics {
        mean_abs_autocorr: (!acs.is_empty()).then(|| acs.iter().map(|a| a.abs()).sum::<f64>() / acs.len() as f64),
        share_autocorr_above_0_9: share,
        countries,
    }
}
