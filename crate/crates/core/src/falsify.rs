//! Synthetic panels for probing the TWFE lag analysis.
//!
//! Each country follows a common epidemic curve, possibly shifted in time and
//! rescaled per country (both break the additive `a_i + b_t` structure). Mask
//! usage tracks the country's own curve with strength `mask_reactivity`. The
//! cumulative outcome is the running sum of the weekly one, so it carries all
//! earlier mortality.

use chrono::{Duration, NaiveDate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::twfe::{twfe_fit, LaggedPanel, OutcomeKind};

/// Sum of Gaussian bumps `(center week, width in weeks, height)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveTemplate {
    pub bumps: Vec<(f64, f64, f64)>,
}

impl WaveTemplate {
    pub fn eval(&self, week: f64) -> f64 {
        self.bumps
            .iter()
            .map(|(c, w, h)| h * (-(week - c).powi(2) / (2.0 * w * w)).exp())
            .sum()
    }
}

impl Default for WaveTemplate {
    /// Spring and winter waves over two years of weekly data.
    fn default() -> Self {
        WaveTemplate {
            bumps: vec![(14.0, 4.0, 30.0), (54.0, 9.0, 40.0)],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n_countries: usize,
    pub n_weeks: usize,
    pub wave_template: WaveTemplate,
    /// Sd of the integer per-country shift of the epidemic curve, in weeks.
    pub country_shift_sd: f64,
    /// Sd of the log of the per-country curve multiplier.
    pub country_scale_sd: f64,
    /// Mask points gained per unit of the country's own curve.
    pub mask_reactivity: f64,
    /// Sd of idiosyncratic weekly mask variation.
    pub mask_noise_sd: f64,
    pub true_beta: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_countries: 24,
            n_weeks: 104,
            wave_template: WaveTemplate::default(),
            country_shift_sd: 0.0,
            country_scale_sd: 0.0,
            mask_reactivity: 0.5,
            mask_noise_sd: 3.0,
            true_beta: 0.0,
            noise_sd: 8.0,
            seed: 20250101,
        }
    }
}

impl SynthSpec {
    /// Shifted, rescaled waves with reactive masking and no true effect.
    pub fn violation() -> Self {
        SynthSpec {
            country_shift_sd: 3.0,
            country_scale_sd: 0.3,
            ..Default::default()
        }
    }

    /// Purely additive model: every country shares one curve.
    pub fn correct() -> Self {
        SynthSpec::default()
    }

    fn validate(&self) -> Result<()> {
        if self.n_countries < 2 || self.n_weeks < 10 {
            return Err(Error::InvalidArgument("need n_countries ≥ 2 and n_weeks ≥ 10".into()));
        }
        let sds = [self.country_shift_sd, self.country_scale_sd, self.mask_noise_sd, self.noise_sd];
        if sds.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return Err(Error::InvalidArgument("standard deviations must be finite and ≥ 0".into()));
        }
        Ok(())
    }
}

/// Weekly synthetic panel: one row of values per country.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthPanel {
    pub countries: Vec<String>,
    pub weeks: Vec<NaiveDate>,
    pub mask: Vec<Vec<f64>>,
    pub weekly: Vec<Vec<f64>>,
    pub cumulative: Vec<Vec<f64>>,
    pub shifts: Vec<i32>,
    pub scales: Vec<f64>,
}

impl SynthPanel {
    pub fn lagged(&self, kind: OutcomeKind, lag: i32) -> LaggedPanel {
        let n = self.weeks.len() as i64;
        let outcome = match kind {
            OutcomeKind::Weekly => &self.weekly,
            OutcomeKind::Cumulative => &self.cumulative,
        };
        let mut obs = Vec::new();
        for (ci, c) in self.countries.iter().enumerate() {
            for t in 0..n {
                let s = t + lag as i64;
                if (0..n).contains(&s) {
                    obs.push((c.clone(), self.weeks[t as usize], self.mask[ci][t as usize], outcome[ci][s as usize]));
                }
            }
        }
        LaggedPanel::from_observations(obs, lag, kind)
    }
}

fn first_week() -> NaiveDate {
    NaiveDate::from_ymd_opt(2019, 12, 30).unwrap()
}

/// One synthetic replication. Replication `r` of a spec uses ChaCha stream `r`.
pub fn synth_panel_replication(spec: &SynthSpec, replication: u64) -> Result<SynthPanel> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(replication);
    let std = Normal::new(0.0, 1.0).unwrap();
    let baseline = Uniform::new(20.0, 60.0).unwrap();

    let mut out = SynthPanel {
        countries: (0..spec.n_countries).map(|i| format!("S{i:02}")).collect(),
        weeks: (0..spec.n_weeks).map(|t| first_week() + Duration::days(7 * t as i64)).collect(),
        mask: Vec::with_capacity(spec.n_countries),
        weekly: Vec::with_capacity(spec.n_countries),
        cumulative: Vec::with_capacity(spec.n_countries),
        shifts: Vec::with_capacity(spec.n_countries),
        scales: Vec::with_capacity(spec.n_countries),
    };
    for _ in 0..spec.n_countries {
        let bound = 3.0 * spec.country_shift_sd;
        let shift = (spec.country_shift_sd * std.sample(&mut rng)).clamp(-bound, bound).round() as i32;
        let scale = (spec.country_scale_sd * std.sample(&mut rng)).exp();
        let level = 2.0 * std.sample(&mut rng);
        let base = baseline.sample(&mut rng);
        let mut mask = Vec::with_capacity(spec.n_weeks);
        let mut weekly = Vec::with_capacity(spec.n_weeks);
        for t in 0..spec.n_weeks {
            let curve = spec.wave_template.eval(t as f64 - shift as f64);
            let m = (base + spec.mask_reactivity * curve + spec.mask_noise_sd * std.sample(&mut rng)).clamp(0.0, 100.0);
            let y = level + scale * curve + spec.true_beta * m + spec.noise_sd * std.sample(&mut rng);
            mask.push(m);
            weekly.push(y);
        }
        let cumulative = weekly
            .iter()
            .scan(0.0, |acc, v| {
                *acc += v;
                Some(*acc)
            })
            .collect();
        out.mask.push(mask);
        out.weekly.push(weekly);
        out.cumulative.push(cumulative);
        out.shifts.push(shift);
        out.scales.push(scale);
    }
    Ok(out)
}

pub fn synth_panel(spec: &SynthSpec) -> Result<SynthPanel> {
    synth_panel_replication(spec, 0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FalsifyRow {
    pub lag: i32,
    pub outcome_kind: OutcomeKind,
    pub mean_beta: f64,
    pub reject_rate: f64,
    /// β̂ per replication.
    pub betas: Vec<f64>,
    pub rejections: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FalsifyReport {
    pub replications: usize,
    pub rows: Vec<FalsifyRow>,
}

impl FalsifyReport {
    pub fn row(&self, lag: i32, kind: OutcomeKind) -> Option<&FalsifyRow> {
        self.rows.iter().find(|r| r.lag == lag && r.outcome_kind == kind)
    }
}

/// Fits every (lag, outcome) pair on `replications` independent panels and
/// records the share of 95% intervals excluding zero.
pub fn spuriousness_experiment(spec: &SynthSpec, lags: &[i32], replications: usize) -> Result<FalsifyReport> {
    if replications == 0 || lags.is_empty() {
        return Err(Error::InvalidArgument("need at least one replication and one lag".into()));
    }
    let kinds = [OutcomeKind::Weekly, OutcomeKind::Cumulative];
    let mut rows: Vec<FalsifyRow> = lags
        .iter()
        .flat_map(|&lag| {
            kinds.iter().map(move |&k| FalsifyRow {
                lag,
                outcome_kind: k,
                mean_beta: 0.0,
                reject_rate: 0.0,
                betas: Vec::with_capacity(replications),
                rejections: 0,
            })
        })
        .collect();
    let fits = run_replications(spec, &rows, replications)?;
    for per_rep in fits {
        for (row, (beta, rejected)) in rows.iter_mut().zip(per_rep) {
            row.betas.push(beta);
            row.rejections += rejected as usize;
        }
    }
    for row in rows.iter_mut() {
        row.mean_beta = row.betas.iter().sum::<f64>() / replications as f64;
        row.reject_rate = row.rejections as f64 / replications as f64;
    }
    Ok(FalsifyReport { replications, rows })
}

type RepFits = Vec<(f64, bool)>;

fn fit_replication(spec: &SynthSpec, rows: &[FalsifyRow], r: u64) -> Result<RepFits> {
    let panel = synth_panel_replication(spec, r)?;
    rows.iter()
        .map(|row| twfe_fit(&panel.lagged(row.outcome_kind, row.lag)).map(|f| (f.beta, f.rejects_zero())))
        .collect()
}

/// Results indexed by replication, independent of the thread count.
fn run_replications(spec: &SynthSpec, rows: &[FalsifyRow], replications: usize) -> Result<Vec<RepFits>> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(replications);
    if workers <= 1 {
        return (0..replications).map(|r| fit_replication(spec, rows, r as u64)).collect();
    }
    let chunk = replications.div_ceil(workers);
    let parts: Vec<Result<Vec<RepFits>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let range = (w * chunk)..((w + 1) * chunk).min(replications);
                scope.spawn(move || range.map(|r| fit_replication(spec, rows, r as u64)).collect())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("replication worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(replications);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}
