//! Pandemic phases and per-country waves.
//!
//! Death curves are normalized per country and summed; phase boundaries sit at
//! the deepest well-separated troughs of the (smoothed) pooled curve. Inside each
//! phase a country's wave is the shortest run of days holding at least
//! `mass_fraction` of its phase deaths.

use chrono::{Duration, NaiveDate};

use crate::calendar::{DailySeries, DayInterval};
use crate::error::{Error, Result};
use crate::ingest::PanelDataset;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParams {
    pub smoothing_days: usize,
    pub n_phases: usize,
    pub mass_fraction: f64,
    pub min_separation_days: usize,
}

impl Default for WaveParams {
    fn default() -> Self {
        WaveParams {
            smoothing_days: 7,
            n_phases: 3,
            mass_fraction: 0.99,
            min_separation_days: 60,
        }
    }
}

/// Contiguous phases covering a window. `starts` holds the first day of every
/// phase after the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePartition {
    window: DayInterval,
    starts: Vec<NaiveDate>,
}

impl PhasePartition {
    pub fn from_starts(window: DayInterval, mut starts: Vec<NaiveDate>) -> Result<Self> {
        starts.sort();
        starts.dedup();
        for s in &starts {
            if *s <= window.start || *s > window.end {
                return Err(Error::InvalidArgument(format!(
                    "phase boundary {s} not strictly inside {window}"
                )));
            }
        }
        Ok(PhasePartition { window, starts })
    }

    pub fn window(&self) -> DayInterval {
        self.window
    }

    pub fn boundaries(&self) -> &[NaiveDate] {
        &self.starts
    }

    pub fn n_phases(&self) -> usize {
        self.starts.len() + 1
    }

    pub fn phases(&self) -> Vec<DayInterval> {
        let mut out = Vec::with_capacity(self.n_phases());
        let mut lo = self.window.start;
        for &s in &self.starts {
            out.push(DayInterval::new(lo, s - Duration::days(1)));
            lo = s;
        }
        out.push(DayInterval::new(lo, self.window.end));
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveInterval {
    pub country: String,
    /// 1-based phase number.
    pub phase_index: usize,
    pub span: DayInterval,
    pub begin_window: DayInterval,
    pub peak_window: DayInterval,
    pub peak_day: NaiveDate,
    pub wave_deaths_pm_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveSet {
    pub partition: PhasePartition,
    pub waves: Vec<WaveInterval>,
}

impl WaveSet {
    pub fn for_country<'a>(&'a self, country: &'a str) -> impl Iterator<Item = &'a WaveInterval> + 'a {
        self.waves.iter().filter(move |w| w.country == country)
    }
}

/// Scales a nonnegative series to unit total.
pub fn normalize_series(values: &[f64]) -> Option<Vec<f64>> {
    let total: f64 = values.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    Some(values.iter().map(|v| v / total).collect())
}

pub fn normalize_deaths(ds: &PanelDataset, country: &str) -> Result<DailySeries> {
    let ci = ds
        .country_index(country)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown country {country}")))?;
    let values = normalize_series(&ds.deaths_filled(ci)).ok_or_else(|| Error::DegenerateSeries {
        country: country.to_string(),
    })?;
    Ok(DailySeries::new(ds.window().start, values))
}

/// Pointwise sum of all normalized country curves.
pub fn pooled_curve(ds: &PanelDataset) -> Result<DailySeries> {
    let mut acc = vec![0.0; ds.window().len_days()];
    for c in ds.countries() {
        let s = normalize_deaths(ds, c)?;
        for (a, v) in acc.iter_mut().zip(&s.values) {
            *a += v;
        }
    }
    Ok(DailySeries::new(ds.window().start, acc))
}

/// Centered rolling mean of width `width`, truncated at the series ends.
pub fn smooth_centered(values: &[f64], width: usize) -> Vec<f64> {
    let n = values.len();
    if width <= 1 || n == 0 {
        return values.to_vec();
    }
    let back = (width - 1) / 2;
    let fwd = width / 2;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in values {
        prefix.push(prefix.last().unwrap() + v);
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(back);
            let hi = (i + fwd + 1).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Interior local minima as `(index, value)`. A flat bottom is reported at its
/// first index.
pub fn interior_minima(values: &[f64]) -> Vec<(usize, f64)> {
    let n = values.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        let mut j = i;
        while j + 1 < n && values[j + 1] == values[i] {
            j += 1;
        }
        if j + 1 < n && values[i - 1] > values[i] && values[j + 1] > values[i] {
            out.push((i, values[i]));
        }
        i = j + 1;
    }
    out
}

/// Splits the curve's span at the `n_phases - 1` deepest troughs that are at
/// least `min_separation_days` apart. Each trough day starts a new phase.
pub fn find_phase_boundaries_with(
    curve: &DailySeries,
    smoothing_days: usize,
    n_phases: usize,
    min_separation_days: usize,
) -> Result<PhasePartition> {
    if n_phases < 2 {
        return Err(Error::InvalidArgument("n_phases must be at least 2".into()));
    }
    if smoothing_days == 0 {
        return Err(Error::InvalidArgument("smoothing_days must be positive".into()));
    }
    let needed = n_phases - 1;
    let smooth = smooth_centered(&curve.values, smoothing_days);
    let mut minima = interior_minima(&smooth);
    minima.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut chosen: Vec<usize> = Vec::new();
    for (idx, _) in minima {
        if chosen.iter().all(|&c| c.abs_diff(idx) >= min_separation_days) {
            chosen.push(idx);
            if chosen.len() == needed {
                break;
            }
        }
    }
    if chosen.len() < needed {
        return Err(Error::InsufficientTroughs {
            found: chosen.len(),
            needed,
        });
    }
    PhasePartition::from_starts(curve.span(), chosen.into_iter().map(|i| curve.day(i)).collect())
}

pub fn find_phase_boundaries(curve: &DailySeries, smoothing_days: usize, n_phases: usize) -> Result<PhasePartition> {
    find_phase_boundaries_with(curve, smoothing_days, n_phases, WaveParams::default().min_separation_days)
}

/// Shortest contiguous index range `[a, b]` whose mass reaches `fraction` of the
/// total; ties go to the earliest start. Values must be nonnegative.
pub fn minimal_mass_interval(values: &[f64], fraction: f64) -> Option<(usize, usize)> {
    let total: f64 = values.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let target = fraction * total - mass_slack(total);
    let mut prefix = Vec::with_capacity(values.len() + 1);
    prefix.push(0.0);
    for v in values {
        prefix.push(prefix.last().unwrap() + v);
    }
    let mut best: Option<(usize, usize)> = None;
    let mut lo = 0;
    for hi in 0..values.len() {
        if prefix[hi + 1] - prefix[lo] < target {
            continue;
        }
        while lo < hi && prefix[hi + 1] - prefix[lo + 1] >= target {
            lo += 1;
        }
        if best.is_none_or(|(a, b)| hi - lo < b - a) {
            best = Some((lo, hi));
        }
    }
    best
}

/// Absolute tolerance on interval mass comparisons, absorbing summation rounding.
pub fn mass_slack(total: f64) -> f64 {
    1e-12 * total
}

/// Length of a decile window for a wave of `len` days: ⌈len / 10⌉, at least 1.
pub fn decile_len(len: usize) -> usize {
    len.div_ceil(10).max(1)
}

/// Detects the wave of `deaths` (dense over `origin..`) inside `phase`.
pub fn detect_wave_in_series(
    country: &str,
    deaths: &DailySeries,
    phase: DayInterval,
    phase_index: usize,
    mass_fraction: f64,
) -> Result<WaveInterval> {
    if !(mass_fraction > 0.0 && mass_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!("mass fraction {mass_fraction} outside (0,1]")));
    }
    let slice = deaths.slice(&phase);
    let (a, b) = minimal_mass_interval(slice, mass_fraction).ok_or_else(|| Error::EmptyPhase {
        country: country.to_string(),
        phase: phase_index,
    })?;
    let day = |i: usize| phase.start + Duration::days(i as i64);
    let span = DayInterval::new(day(a), day(b));
    let wave = &slice[a..=b];
    let len = wave.len();
    let dl = decile_len(len);

    let mut peak = 0;
    for (i, v) in wave.iter().enumerate() {
        if *v > wave[peak] {
            peak = i;
        }
    }
    let peak_start = peak.min(len - dl);

    Ok(WaveInterval {
        country: country.to_string(),
        phase_index,
        span,
        begin_window: DayInterval::new(day(a), day(a + dl - 1)),
        peak_window: DayInterval::new(day(a + peak_start), day(a + peak_start + dl - 1)),
        peak_day: day(a + peak),
        wave_deaths_pm_mean: wave.iter().sum::<f64>() / len as f64,
    })
}

pub fn detect_wave(
    ds: &PanelDataset,
    country: &str,
    phase: DayInterval,
    phase_index: usize,
    mass_fraction: f64,
) -> Result<WaveInterval> {
    let ci = ds
        .country_index(country)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown country {country}")))?;
    if !ds.window().contains_interval(&phase) {
        return Err(Error::InvalidArgument(format!("phase {phase} outside window")));
    }
    let deaths = DailySeries::new(ds.window().start, ds.deaths_filled(ci));
    detect_wave_in_series(country, &deaths, phase, phase_index, mass_fraction)
}

/// One wave per (country, phase), in country then phase order. All failures are
/// collected before returning.
pub fn build_waveset(ds: &PanelDataset, partition: &PhasePartition, mass_fraction: f64) -> Result<WaveSet> {
    let phases = partition.phases();
    let mut waves = Vec::with_capacity(ds.n_countries() * phases.len());
    let mut failures = Vec::new();
    for (ci, country) in ds.countries().iter().enumerate() {
        let deaths = DailySeries::new(ds.window().start, ds.deaths_filled(ci));
        for (pi, phase) in phases.iter().enumerate() {
            match detect_wave_in_series(country, &deaths, *phase, pi + 1, mass_fraction) {
                Ok(w) => waves.push(w),
                Err(e) => failures.push(format!("{country}/phase {}: {e}", pi + 1)),
            }
        }
    }
    if !failures.is_empty() {
        return Err(Error::WaveFailures(failures));
    }
    Ok(WaveSet {
        partition: partition.clone(),
        waves,
    })
}

/// Full pipeline: pooled curve, phase detection (or the supplied boundaries), waves.
pub fn segment(ds: &PanelDataset, params: &WaveParams, boundaries: Option<Vec<NaiveDate>>) -> Result<WaveSet> {
    let partition = match boundaries {
        Some(b) => PhasePartition::from_starts(ds.window(), b)?,
        None => {
            let curve = pooled_curve(ds)?;
            find_phase_boundaries_with(&curve, params.smoothing_days, params.n_phases, params.min_separation_days)?
        }
    };
    build_waveset(ds, &partition, params.mass_fraction)
}
