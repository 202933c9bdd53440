//! Synthetic three-file dataset with the same schema as the real inputs.
//!
//! Values are generated, not observed: three mortality waves per country with
//! per-country timing and size, mask usage that ramps up in 2020 and rises
//! during waves, and weekly excess mortality driven by the same waves. Useful
//! for demos and end-to-end tests; it carries no empirical content.

use chrono::Duration;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::calendar::{self, DayInterval};
use crate::error::Result;
use crate::ingest::{CountryCovariates, DailyRecord, LoadOptions, PanelDataset, WeeklyRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct DemoSpec {
    pub n_countries: usize,
    pub seed: u64,
}

impl Default for DemoSpec {
    fn default() -> Self {
        DemoSpec { n_countries: 24, seed: crate::stats::DEFAULT_SEED }
    }
}

/// Wave centers, widths and heights in days / deaths per million per day.
const WAVES: [(f64, f64, f64); 3] = [(65.0, 18.0, 6.0), (335.0, 45.0, 8.0), (610.0, 35.0, 5.0)];

fn bump(day: f64, center: f64, width: f64) -> f64 {
    (-(day - center).powi(2) / (2.0 * width * width)).exp()
}

pub fn demo_records(spec: &DemoSpec) -> (Vec<DailyRecord>, Vec<WeeklyRecord>, Vec<CountryCovariates>) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let std = Normal::new(0.0, 1.0).unwrap();
    let window = DayInterval::new(calendar::analysis_start(), calendar::analysis_end());
    let first_week = chrono::NaiveDate::from_ymd_opt(2019, 12, 30).unwrap();
    let n_days = window.len_days();

    let mut daily = Vec::new();
    let mut weekly = Vec::new();
    let mut covariates = Vec::new();
    for c in 0..spec.n_countries {
        let country = format!("Country{:02}", c + 1);
        let shifts: Vec<f64> = (0..3).map(|_| 12.0 * std.sample(&mut rng)).collect();
        let sizes: Vec<f64> = (0..3).map(|_| (0.6 * std.sample(&mut rng)).exp()).collect();
        let plateau = rng.random_range(25.0..90.0);
        let ramp_day = rng.random_range(90.0..200.0);
        let reactivity = rng.random_range(2.0..6.0);
        let mask_from = rng.random_range(0..10usize);
        let floor = rng.random_range(2.0..8.0);

        let mut deaths = Vec::with_capacity(n_days);
        let mut mask_sum = 0.0;
        for t in 0..n_days {
            let day = t as f64;
            let curve: f64 = WAVES
                .iter()
                .enumerate()
                .map(|(k, (m, w, h))| h * sizes[k] * bump(day, m + shifts[k], *w))
                .sum();
            let d = (curve * (1.0 + 0.25 * std.sample(&mut rng)) + 0.05 * std.sample(&mut rng)).max(0.0);
            deaths.push(d);
            let ramp = floor + (plateau - floor) / (1.0 + (-(day - ramp_day) / 20.0).exp());
            let m = (ramp + reactivity * curve + 0.2 * ramp * std.sample(&mut rng)).clamp(0.5, 100.0);
            mask_sum += m;
            daily.push(DailyRecord {
                country: country.clone(),
                date: window.start + Duration::days(t as i64),
                mask_pct: (t >= mask_from).then_some(m),
                covid_deaths_pm: Some(d),
            });
        }

        let mut cumulative = 0.0;
        let mut week = first_week;
        while week + Duration::days(6) <= window.end + Duration::days(2) {
            let in_week: f64 = (0..7)
                .map(|k| week + Duration::days(k))
                .filter(|d| window.contains(*d))
                .map(|d| deaths[(d - window.start).num_days() as usize])
                .sum();
            let excess = 2.5 * in_week + 4.0 * std.sample(&mut rng);
            cumulative += excess;
            weekly.push(WeeklyRecord {
                country: country.clone(),
                week_start: week,
                mask_pct_weekly: None,
                excess_weekly: Some(excess),
                excess_cumulative: Some(cumulative),
            });
            week += Duration::days(7);
        }

        let vaccination_rate = rng.random_range(0.35..0.9);
        let hdi = rng.random_range(0.80..0.96);
        let mask_mean = mask_sum / n_days as f64;
        covariates.push(CountryCovariates {
            country,
            vaccination_rate,
            hdi,
            cardio_death_rate: rng.random_range(80.0..400.0),
            life_expectancy: rng.random_range(74.0..84.0),
            age_adjusted_excess: 12.0 - 14.0 * vaccination_rate + 0.08 * mask_mean + 1.5 * std.sample(&mut rng),
        });
    }
    (daily, weekly, covariates)
}

/// Validated synthetic dataset over the standard analysis window.
pub fn demo_dataset(spec: &DemoSpec) -> Result<PanelDataset> {
    let (d, w, c) = demo_records(spec);
    let opts = LoadOptions {
        expected_countries: Some(spec.n_countries),
        ..Default::default()
    };
    PanelDataset::from_records(d, w, c, &opts)
}
