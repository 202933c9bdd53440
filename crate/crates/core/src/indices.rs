//! Mask-usage indices tied to the wave structure of each country.

use log::warn;

use crate::calendar::DayInterval;
use crate::error::{Error, Result};
use crate::ingest::PanelDataset;
use crate::waves::WaveSet;

pub const INDEX_NAMES: [&str; 5] = ["maskall", "maskinwave", "maskinterwave", "maskbeginwave", "maskpeakwave"];

#[derive(Debug, Clone, PartialEq)]
pub struct MaskIndices {
    pub country: String,
    pub maskall: f64,
    pub maskinwave: f64,
    pub maskinterwave: f64,
    pub maskbeginwave: f64,
    pub maskpeakwave: f64,
}

impl MaskIndices {
    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "maskall" => self.maskall,
            "maskinwave" => self.maskinwave,
            "maskinterwave" => self.maskinterwave,
            "maskbeginwave" => self.maskbeginwave,
            "maskpeakwave" => self.maskpeakwave,
            _ => return None,
        })
    }

    pub fn values(&self) -> [f64; 5] {
        [
            self.maskall,
            self.maskinwave,
            self.maskinterwave,
            self.maskbeginwave,
            self.maskpeakwave,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskIndexTable {
    pub rows: Vec<MaskIndices>,
}

impl MaskIndexTable {
    /// Column of one index across countries, in country order.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        self.rows.iter().map(|r| r.get(name)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveMaskRecord {
    pub country: String,
    pub phase_index: usize,
    pub begin_avg: Option<f64>,
    pub peak_avg: Option<f64>,
    pub wave_deaths_pm_mean: f64,
}

impl WaveMaskRecord {
    pub fn ratio_peak_begin(&self) -> Option<f64> {
        match (self.peak_avg, self.begin_avg) {
            (Some(p), Some(b)) if b > 0.0 => Some(p / b),
            _ => None,
        }
    }
}

/// Mean of the present values at the flagged offsets.
fn masked_mean(values: &[Option<f64>], include: impl Fn(usize) -> bool) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for (i, v) in values.iter().enumerate() {
        if let (true, Some(x)) = (include(i), v) {
            sum += x;
            n += 1;
        }
    }
    (n > 0).then(|| sum / n as f64)
}

fn day_mask(len: usize, origin: chrono::NaiveDate, intervals: impl Iterator<Item = DayInterval>) -> Vec<bool> {
    let mut m = vec![false; len];
    for iv in intervals {
        for i in iv.offsets_from(origin) {
            m[i] = true;
        }
    }
    m
}

pub fn compute_indices(ds: &PanelDataset, waveset: &WaveSet) -> Result<MaskIndexTable> {
    let window = ds.window();
    let n = window.len_days();
    let mut rows = Vec::with_capacity(ds.n_countries());
    for (ci, country) in ds.countries().iter().enumerate() {
        let waves: Vec<_> = waveset.for_country(country).collect();
        if waves.is_empty() {
            return Err(Error::InvalidArgument(format!("no waves for {country}")));
        }
        let masks = &ds.daily(ci).mask_pct;
        let in_wave = day_mask(n, window.start, waves.iter().map(|w| w.span));
        let begin = day_mask(n, window.start, waves.iter().map(|w| w.begin_window));
        let peak = day_mask(n, window.start, waves.iter().map(|w| w.peak_window));
        let need = |v: Option<f64>, index: &'static str| {
            v.ok_or_else(|| Error::EmptyDaySet {
                country: country.clone(),
                index,
            })
        };
        rows.push(MaskIndices {
            country: country.clone(),
            maskall: need(masked_mean(masks, |_| true), "maskall")?,
            maskinwave: need(masked_mean(masks, |i| in_wave[i]), "maskinwave")?,
            maskinterwave: need(masked_mean(masks, |i| !in_wave[i]), "maskinterwave")?,
            maskbeginwave: need(masked_mean(masks, |i| begin[i]), "maskbeginwave")?,
            maskpeakwave: need(masked_mean(masks, |i| peak[i]), "maskpeakwave")?,
        });
    }
    Ok(MaskIndexTable { rows })
}

/// Per-wave begin/peak mask averages. Windows without mask data yield `None`
/// and a warning.
pub fn wave_mask_records(ds: &PanelDataset, waveset: &WaveSet) -> Result<Vec<WaveMaskRecord>> {
    let window = ds.window();
    let mut out = Vec::with_capacity(waveset.waves.len());
    for w in &waveset.waves {
        let ci = ds
            .country_index(&w.country)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown country {}", w.country)))?;
        let masks = &ds.daily(ci).mask_pct;
        let avg = |iv: DayInterval| {
            let r = iv.offsets_from(window.start);
            masked_mean(&masks[r], |_| true)
        };
        let rec = WaveMaskRecord {
            country: w.country.clone(),
            phase_index: w.phase_index,
            begin_avg: avg(w.begin_window),
            peak_avg: avg(w.peak_window),
            wave_deaths_pm_mean: w.wave_deaths_pm_mean,
        };
        if rec.begin_avg.is_none() || rec.peak_avg.is_none() {
            warn!(
                "{} phase {}: no mask data in begin or peak window, record excluded downstream",
                w.country, w.phase_index
            );
        }
        out.push(rec);
    }
    Ok(out)
}

/// Records with both averages present.
pub fn complete_records(records: &[WaveMaskRecord]) -> Vec<&WaveMaskRecord> {
    records
        .iter()
        .filter(|r| r.begin_avg.is_some() && r.peak_avg.is_some())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{CountryCovariates, DailyRecord, LoadOptions, WeeklyRecord};
    use crate::waves::{build_waveset, PhasePartition};
    use chrono::Duration;

    fn dataset(masks: &[Option<f64>], deaths: &[f64]) -> PanelDataset {
        let start = crate::calendar::parse_date("2020-03-02").unwrap();
        let window = DayInterval::new(start, start + Duration::days(masks.len() as i64 - 1));
        let daily = masks
            .iter()
            .zip(deaths)
            .enumerate()
            .map(|(i, (m, d))| DailyRecord {
                country: "A".into(),
                date: start + Duration::days(i as i64),
                mask_pct: *m,
                covid_deaths_pm: Some(*d),
            })
            .collect();
        PanelDataset::from_records(
            daily,
            vec![WeeklyRecord {
                country: "A".into(),
                week_start: start,
                mask_pct_weekly: None,
                excess_weekly: None,
                excess_cumulative: None,
            }],
            vec![CountryCovariates {
                country: "A".into(),
                vaccination_rate: 1.0,
                hdi: 0.5,
                cardio_death_rate: 1.0,
                life_expectancy: 1.0,
                age_adjusted_excess: 1.0,
            }],
            &LoadOptions {
                window,
                expected_countries: None,
                drop_leading_zeros: false,
            },
        )
        .unwrap()
    }

    #[test]
    fn constant_masks_give_constant_indices() {
        let mut deaths = vec![0.0; 30];
        deaths[3..8].copy_from_slice(&[1.0, 2.0, 5.0, 2.0, 1.0]);
        deaths[20..25].copy_from_slice(&[1.0, 3.0, 4.0, 2.0, 1.0]);
        let ds = dataset(&vec![Some(40.0); 30], &deaths);
        let p = PhasePartition::from_starts(ds.window(), vec![ds.window().start + Duration::days(15)]).unwrap();
        let ws = build_waveset(&ds, &p, 0.99).unwrap();
        let t = compute_indices(&ds, &ws).unwrap();
        assert_eq!(t.rows[0].values(), [40.0; 5]);
        let recs = wave_mask_records(&ds, &ws).unwrap();
        assert!(recs.iter().all(|r| r.begin_avg == Some(40.0) && r.peak_avg == Some(40.0)));
    }

    #[test]
    fn hand_built_two_wave_country() {
        // 30 days, mask = day index; wave 1 = days 3..=7, wave 2 = days 20..=24
        let mut deaths = vec![0.0; 30];
        deaths[3..8].copy_from_slice(&[1.0, 2.0, 5.0, 2.0, 1.0]);
        deaths[20..25].copy_from_slice(&[1.0, 3.0, 4.0, 2.0, 1.0]);
        let mut masks: Vec<Option<f64>> = (0..30).map(|i| Some(i as f64)).collect();
        masks[0] = None;
        masks[22] = None;
        let ds = dataset(&masks, &deaths);
        let p = PhasePartition::from_starts(ds.window(), vec![ds.window().start + Duration::days(15)]).unwrap();
        let ws = build_waveset(&ds, &p, 0.99).unwrap();
        assert_eq!(ws.waves[0].span.offsets_from(ds.window().start), 3..8);
        assert_eq!(ws.waves[1].span.offsets_from(ds.window().start), 20..25);
        let t = compute_indices(&ds, &ws).unwrap();
        let r = &t.rows[0];
        // all: 1..=29 minus 22
        assert!((r.maskall - (435.0 - 22.0) / 28.0).abs() < 1e-12);
        // in-wave: 3..=7 and 20,21,23,24
        assert!((r.maskinwave - (25.0 + 88.0) / 9.0).abs() < 1e-12);
        // interwave: remaining present days
        assert!((r.maskinterwave - (413.0 - 113.0) / 19.0).abs() < 1e-12);
        // decile windows are single days: begin 3 and 20, peaks 5 and 22 (22 missing)
        assert!((r.maskbeginwave - 11.5).abs() < 1e-12);
        assert!((r.maskpeakwave - 5.0).abs() < 1e-12);
        let recs = wave_mask_records(&ds, &ws).unwrap();
        assert_eq!(recs[1].peak_avg, None);
        assert_eq!(complete_records(&recs).len(), 1);
    }

    #[test]
    fn maskall_is_duration_weighted_mix() {
        let mut deaths = vec![0.0; 40];
        for (i, d) in deaths.iter_mut().enumerate().skip(5).take(12) {
            *d = 1.0 + (i % 3) as f64;
        }
        let masks: Vec<Option<f64>> = (0..40).map(|i| Some(10.0 + ((i * 37) % 11) as f64)).collect();
        let ds = dataset(&masks, &deaths);
        let p = PhasePartition::from_starts(ds.window(), vec![ds.window().start + Duration::days(25)]);
        // second phase is empty of deaths: use a single-phase partition instead
        assert!(build_waveset(&ds, &p.unwrap(), 0.99).is_err());
        let p = PhasePartition::from_starts(ds.window(), vec![]).unwrap();
        let ws = build_waveset(&ds, &p, 0.99).unwrap();
        let t = compute_indices(&ds, &ws).unwrap();
        let r = &t.rows[0];
        let k = ws.waves[0].span.len_days() as f64;
        let mixed = (k * r.maskinwave + (40.0 - k) * r.maskinterwave) / 40.0;
        assert!((r.maskall - mixed).abs() < 1e-12);
        assert!(r.maskinwave.min(r.maskinterwave) <= r.maskall && r.maskall <= r.maskinwave.max(r.maskinterwave));
    }
}
