//! Loading and validation of the country panel.
//!
//! Three CSV inputs are combined into a [`PanelDataset`]:
//!
//! * `daily.csv`: `country,date,mask_pct,covid_deaths_pm`
//! * `weekly.csv`: `country,week_start,excess_weekly,excess_cumulative`
//! * `covariates.csv`: `country,vaccination_rate,hdi,cardio_death_rate,life_expectancy,age_adjusted_excess`
//!
//! Empty fields denote missing values. Daily series are stored densely over the
//! analysis window; days without a row are missing.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate};
use log::warn;

use crate::calendar::{self, DayInterval};
use crate::error::{Error, Result};

pub const DAILY_HEADER: [&str; 4] = ["country", "date", "mask_pct", "covid_deaths_pm"];
pub const WEEKLY_HEADER: [&str; 4] = ["country", "week_start", "excess_weekly", "excess_cumulative"];
pub const COVARIATES_HEADER: [&str; 6] = [
    "country",
    "vaccination_rate",
    "hdi",
    "cardio_death_rate",
    "life_expectancy",
    "age_adjusted_excess",
];

#[derive(Debug, Clone, PartialEq)]
pub struct DailyRecord {
    pub country: String,
    pub date: NaiveDate,
    pub mask_pct: Option<f64>,
    pub covid_deaths_pm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeeklyRecord {
    pub country: String,
    /// Monday of the ISO week.
    pub week_start: NaiveDate,
    /// Mean of daily mask usage over the week; filled by [`weekly_mask_average`].
    pub mask_pct_weekly: Option<f64>,
    pub excess_weekly: Option<f64>,
    pub excess_cumulative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountryCovariates {
    pub country: String,
    pub vaccination_rate: f64,
    pub hdi: f64,
    pub cardio_death_rate: f64,
    pub life_expectancy: f64,
    pub age_adjusted_excess: f64,
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub window: DayInterval,
    /// Required number of countries; `None` accepts any count ≥ 1.
    pub expected_countries: Option<usize>,
    /// Treat zero mask values preceding the first positive one as missing.
    pub drop_leading_zeros: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            window: DayInterval::new(calendar::analysis_start(), calendar::analysis_end()),
            expected_countries: Some(24),
            drop_leading_zeros: false,
        }
    }
}

/// Per-country daily values, dense over the analysis window.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryDaily {
    pub mask_pct: Vec<Option<f64>>,
    pub covid_deaths_pm: Vec<Option<f64>>,
}

/// Validated country × date panel. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelDataset {
    window: DayInterval,
    countries: Vec<String>,
    daily: Vec<CountryDaily>,
    weekly: Vec<Vec<WeeklyRecord>>,
    covariates: Vec<CountryCovariates>,
}

impl PanelDataset {
    /// Assembles and validates a dataset from record sets.
    pub fn from_records(
        daily: Vec<DailyRecord>,
        weekly: Vec<WeeklyRecord>,
        covariates: Vec<CountryCovariates>,
        opts: &LoadOptions,
    ) -> Result<Self> {
        let window = opts.window;
        let cov_countries: BTreeSet<&str> = covariates.iter().map(|c| c.country.as_str()).collect();
        if cov_countries.len() != covariates.len() {
            return Err(Error::Validation("duplicate country in covariates".into()));
        }
        let daily_countries: BTreeSet<&str> = daily.iter().map(|r| r.country.as_str()).collect();
        let weekly_countries: BTreeSet<&str> = weekly.iter().map(|r| r.country.as_str()).collect();
        check_same_countries("daily", &daily_countries, "covariates", &cov_countries)?;
        check_same_countries("weekly", &weekly_countries, "covariates", &cov_countries)?;
        if let Some(n) = opts.expected_countries {
            if cov_countries.len() != n {
                return Err(Error::Validation(format!(
                    "expected {n} countries, found {}",
                    cov_countries.len()
                )));
            }
        }
        if cov_countries.is_empty() {
            return Err(Error::Validation("no countries".into()));
        }

        let countries: Vec<String> = cov_countries.iter().map(|s| s.to_string()).collect();
        let index: BTreeMap<&str, usize> =
            countries.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();

        let n_days = window.len_days();
        let mut dense = vec![
            CountryDaily {
                mask_pct: vec![None; n_days],
                covid_deaths_pm: vec![None; n_days],
            };
            countries.len()
        ];
        let mut seen: Vec<BTreeSet<NaiveDate>> = vec![BTreeSet::new(); countries.len()];
        let mut clamped = 0usize;
        for r in &daily {
            let ci = index[r.country.as_str()];
            if !window.contains(r.date) {
                return Err(Error::Validation(format!(
                    "{} {}: date outside analysis window {window}",
                    r.country, r.date
                )));
            }
            if !seen[ci].insert(r.date) {
                return Err(Error::Validation(format!("{} {}: duplicate daily row", r.country, r.date)));
            }
            let off = (r.date - window.start).num_days() as usize;
            if let Some(m) = r.mask_pct {
                if !(0.0..=100.0).contains(&m) {
                    return Err(Error::Validation(format!(
                        "{} {}: mask_pct {m} outside [0,100]",
                        r.country, r.date
                    )));
                }
            }
            let deaths = match r.covid_deaths_pm {
                Some(v) if !v.is_finite() => {
                    return Err(Error::Validation(format!(
                        "{} {}: non-finite covid_deaths_pm",
                        r.country, r.date
                    )))
                }
                Some(v) if v < 0.0 => {
                    warn!("{} {}: negative covid_deaths_pm {v} clamped to 0", r.country, r.date);
                    clamped += 1;
                    Some(0.0)
                }
                other => other,
            };
            dense[ci].mask_pct[off] = r.mask_pct;
            dense[ci].covid_deaths_pm[off] = deaths;
        }
        for (ci, days) in seen.iter().enumerate() {
            if let (Some(first), Some(last)) = (days.first(), days.last()) {
                let span = (*last - *first).num_days() as usize + 1;
                if span != days.len() {
                    return Err(Error::Validation(format!(
                        "{}: daily rows not contiguous between {first} and {last}",
                        countries[ci]
                    )));
                }
            }
        }
        if clamped > 0 {
            warn!("clamped {clamped} negative daily death values to 0");
        }

        let week_lo = calendar::week_monday(NaiveDate::from_ymd_opt(2020, 1, 1).unwrap());
        let week_hi = NaiveDate::from_ymd_opt(2022, 1, 2).unwrap();
        let mut weekly_by: Vec<Vec<WeeklyRecord>> = vec![Vec::new(); countries.len()];
        for r in weekly {
            if !calendar::is_monday(r.week_start) {
                return Err(Error::Validation(format!(
                    "{} {}: week_start is not a Monday",
                    r.country, r.week_start
                )));
            }
            if r.week_start < week_lo || r.week_start > week_hi {
                return Err(Error::Validation(format!(
                    "{} {}: week outside [2020-01-01, 2022-01-02]",
                    r.country, r.week_start
                )));
            }
            if let Some(m) = r.mask_pct_weekly {
                if !(0.0..=100.0).contains(&m) {
                    return Err(Error::Validation(format!(
                        "{} {}: weekly mask {m} outside [0,100]",
                        r.country, r.week_start
                    )));
                }
            }
            weekly_by[index[r.country.as_str()]].push(r);
        }
        for (ci, rows) in weekly_by.iter_mut().enumerate() {
            rows.sort_by_key(|r| r.week_start);
            if let Some(w) = rows.windows(2).find(|w| w[0].week_start == w[1].week_start) {
                return Err(Error::Validation(format!(
                    "{} {}: duplicate weekly row",
                    countries[ci], w[0].week_start
                )));
            }
        }

        let mut covariates = covariates;
        covariates.sort_by(|a, b| a.country.cmp(&b.country));
        for c in &covariates {
            let vals = [
                c.vaccination_rate,
                c.hdi,
                c.cardio_death_rate,
                c.life_expectancy,
                c.age_adjusted_excess,
            ];
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::Validation(format!("{}: non-finite covariate", c.country)));
            }
            if !(0.0..=1.0).contains(&c.hdi) {
                return Err(Error::Validation(format!("{}: hdi {} outside [0,1]", c.country, c.hdi)));
            }
        }

        let mut ds = PanelDataset {
            window,
            countries,
            daily: dense,
            weekly: weekly_by,
            covariates,
        };
        if opts.drop_leading_zeros {
            ds.drop_leading_mask_zeros();
        }
        Ok(ds)
    }

    pub fn window(&self) -> DayInterval {
        self.window
    }

    pub fn countries(&self) -> &[String] {
        &self.countries
    }

    pub fn n_countries(&self) -> usize {
        self.countries.len()
    }

    pub fn country_index(&self, country: &str) -> Option<usize> {
        self.countries.binary_search_by(|c| c.as_str().cmp(country)).ok()
    }

    pub fn daily(&self, country_idx: usize) -> &CountryDaily {
        &self.daily[country_idx]
    }

    pub fn weekly(&self, country_idx: usize) -> &[WeeklyRecord] {
        &self.weekly[country_idx]
    }

    pub fn covariates(&self) -> &[CountryCovariates] {
        &self.covariates
    }

    /// Daily deaths per million over the window with missing days as zero.
    pub fn deaths_filled(&self, country_idx: usize) -> Vec<f64> {
        self.daily[country_idx]
            .covid_deaths_pm
            .iter()
            .map(|v| v.unwrap_or(0.0))
            .collect()
    }

    /// Total COVID deaths per million over the analysis window.
    pub fn total_deaths(&self, country_idx: usize) -> f64 {
        self.deaths_filled(country_idx).iter().sum()
    }

    /// Daily rows in dense form, covering the full window per country.
    pub fn daily_records(&self) -> impl Iterator<Item = DailyRecord> + '_ {
        self.countries.iter().zip(&self.daily).flat_map(move |(c, d)| {
            (0..self.window.len_days()).map(move |i| DailyRecord {
                country: c.clone(),
                date: self.window.start + Duration::days(i as i64),
                mask_pct: d.mask_pct[i],
                covid_deaths_pm: d.covid_deaths_pm[i],
            })
        })
    }

    pub fn weekly_records(&self) -> impl Iterator<Item = &WeeklyRecord> {
        self.weekly.iter().flatten()
    }

    fn drop_leading_mask_zeros(&mut self) {
        for d in &mut self.daily {
            for v in d.mask_pct.iter_mut() {
                match *v {
                    Some(x) if x > 0.0 => break,
                    Some(_) => *v = None,
                    None => {}
                }
            }
        }
    }

    pub fn summary(&self) -> String {
        let daily_obs: usize = self
            .daily
            .iter()
            .map(|d| d.mask_pct.iter().filter(|v| v.is_some()).count())
            .sum();
        format!(
            "{} countries, window {}, {} daily mask observations, {} weekly rows",
            self.countries.len(),
            self.window,
            daily_obs,
            self.weekly.iter().map(Vec::len).sum::<usize>()
        )
    }
}

fn check_same_countries(
    a_name: &str,
    a: &BTreeSet<&str>,
    b_name: &str,
    b: &BTreeSet<&str>,
) -> Result<()> {
    if let Some(c) = a.symmetric_difference(b).next() {
        let (has, lacks) = if a.contains(c) { (a_name, b_name) } else { (b_name, a_name) };
        return Err(Error::Consistency(format!(
            "country {c} present in {has} but missing from {lacks}"
        )));
    }
    Ok(())
}

struct CsvTable {
    path: PathBuf,
    rows: Vec<(u64, csv::StringRecord)>,
}

fn read_table(path: &Path, header: &[&str]) -> Result<CsvTable> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::None)
        .from_reader(file);
    let parse_err = |line: u64, msg: String| Error::Parse {
        file: path.to_path_buf(),
        line,
        msg,
    };
    let hdr = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if hdr.iter().collect::<Vec<_>>() != header {
        let line = hdr.position().map(|p| p.line()).unwrap_or(1);
        return Err(parse_err(
            line,
            format!("bad header {:?}, expected {:?}", hdr.iter().collect::<Vec<_>>(), header),
        ));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        rows.push((line, rec));
    }
    if rows.is_empty() {
        return Err(parse_err(2, "no data rows".into()));
    }
    Ok(CsvTable {
        path: path.to_path_buf(),
        rows,
    })
}

impl CsvTable {
    fn err(&self, line: u64, msg: String) -> Error {
        Error::Parse {
            file: self.path.clone(),
            line,
            msg,
        }
    }

    fn country(&self, line: u64, rec: &csv::StringRecord) -> Result<String> {
        let c = &rec[0];
        if c.is_empty() {
            return Err(self.err(line, "empty country".into()));
        }
        Ok(c.to_string())
    }

    fn date(&self, line: u64, rec: &csv::StringRecord, col: usize) -> Result<NaiveDate> {
        calendar::parse_date(&rec[col])
            .ok_or_else(|| self.err(line, format!("bad date {:?}, expected YYYY-MM-DD", &rec[col])))
    }

    fn opt_f64(&self, line: u64, rec: &csv::StringRecord, col: usize) -> Result<Option<f64>> {
        let s = &rec[col];
        if s.is_empty() {
            return Ok(None);
        }
        s.parse::<f64>()
            .map(Some)
            .map_err(|_| self.err(line, format!("bad number {s:?}")))
    }

    fn f64(&self, line: u64, rec: &csv::StringRecord, col: usize, name: &str) -> Result<f64> {
        self.opt_f64(line, rec, col)?
            .ok_or_else(|| self.err(line, format!("missing {name}")))
    }
}

pub fn read_daily(path: &Path) -> Result<Vec<DailyRecord>> {
    let t = read_table(path, &DAILY_HEADER)?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            Ok(DailyRecord {
                country: t.country(*line, rec)?,
                date: t.date(*line, rec, 1)?,
                mask_pct: t.opt_f64(*line, rec, 2)?,
                covid_deaths_pm: t.opt_f64(*line, rec, 3)?,
            })
        })
        .collect()
}

pub fn read_weekly(path: &Path) -> Result<Vec<WeeklyRecord>> {
    let t = read_table(path, &WEEKLY_HEADER)?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            Ok(WeeklyRecord {
                country: t.country(*line, rec)?,
                week_start: t.date(*line, rec, 1)?,
                mask_pct_weekly: None,
                excess_weekly: t.opt_f64(*line, rec, 2)?,
                excess_cumulative: t.opt_f64(*line, rec, 3)?,
            })
        })
        .collect()
}

pub fn read_covariates(path: &Path) -> Result<Vec<CountryCovariates>> {
    let t = read_table(path, &COVARIATES_HEADER)?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            Ok(CountryCovariates {
                country: t.country(*line, rec)?,
                vaccination_rate: t.f64(*line, rec, 1, "vaccination_rate")?,
                hdi: t.f64(*line, rec, 2, "hdi")?,
                cardio_death_rate: t.f64(*line, rec, 3, "cardio_death_rate")?,
                life_expectancy: t.f64(*line, rec, 4, "life_expectancy")?,
                age_adjusted_excess: t.f64(*line, rec, 5, "age_adjusted_excess")?,
            })
        })
        .collect()
}

/// Reads and validates the three input files.
pub fn load_panel(
    daily_path: &Path,
    weekly_path: &Path,
    covariates_path: &Path,
    opts: &LoadOptions,
) -> Result<PanelDataset> {
    let daily = read_daily(daily_path)?;
    let weekly = read_weekly(weekly_path)?;
    let covariates = read_covariates(covariates_path)?;
    let (nd, nw, nc) = (daily.len(), weekly.len(), covariates.len());
    let ds = PanelDataset::from_records(daily, weekly, covariates, opts)?;
    log::info!("loaded {nd} daily, {nw} weekly, {nc} covariate rows: {}", ds.summary());
    Ok(ds)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn create(path: &Path) -> Result<std::io::BufWriter<File>> {
    File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// Writes the dataset as `daily.csv`, `weekly.csv` and `covariates.csv` in `dir`.
pub fn write_panel(ds: &PanelDataset, dir: &Path) -> Result<()> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    let p = dir.join("daily.csv");
    let mut w = create(&p)?;
    writeln!(w, "{}", DAILY_HEADER.join(",")).map_err(io(&p))?;
    for r in ds.daily_records() {
        writeln!(
            w,
            "{},{},{},{}",
            r.country,
            r.date,
            fmt_opt(r.mask_pct),
            fmt_opt(r.covid_deaths_pm)
        )
        .map_err(io(&p))?;
    }
    w.flush().map_err(io(&p))?;

    let p = dir.join("weekly.csv");
    let mut w = create(&p)?;
    writeln!(w, "{}", WEEKLY_HEADER.join(",")).map_err(io(&p))?;
    for r in ds.weekly_records() {
        writeln!(
            w,
            "{},{},{},{}",
            r.country,
            r.week_start,
            fmt_opt(r.excess_weekly),
            fmt_opt(r.excess_cumulative)
        )
        .map_err(io(&p))?;
    }
    w.flush().map_err(io(&p))?;

    let p = dir.join("covariates.csv");
    let mut w = create(&p)?;
    writeln!(w, "{}", COVARIATES_HEADER.join(",")).map_err(io(&p))?;
    for c in ds.covariates() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            c.country, c.vaccination_rate, c.hdi, c.cardio_death_rate, c.life_expectancy, c.age_adjusted_excess
        )
        .map_err(io(&p))?;
    }
    w.flush().map_err(io(&p))?;
    Ok(())
}

/// Fills `mask_pct_weekly` with the mean of the non-missing daily values in each
/// Monday-anchored week; weeks without any daily value stay missing.
pub fn weekly_mask_average(ds: &PanelDataset) -> PanelDataset {
    let mut out = ds.clone();
    let window = ds.window;
    for (ci, rows) in out.weekly.iter_mut().enumerate() {
        let masks = &ds.daily[ci].mask_pct;
        for r in rows.iter_mut() {
            let (mut sum, mut n) = (0.0, 0usize);
            for k in 0..7 {
                let day = r.week_start + Duration::days(k);
                if !window.contains(day) {
                    continue;
                }
                if let Some(m) = masks[(day - window.start).num_days() as usize] {
                    sum += m;
                    n += 1;
                }
            }
            r.mask_pct_weekly = (n > 0).then(|| sum / n as f64);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        calendar::parse_date(s).unwrap()
    }

    fn opts() -> LoadOptions {
        LoadOptions {
            expected_countries: None,
            ..Default::default()
        }
    }

    fn cov(c: &str) -> CountryCovariates {
        CountryCovariates {
            country: c.into(),
            vaccination_rate: 70.0,
            hdi: 0.9,
            cardio_death_rate: 150.0,
            life_expectancy: 80.0,
            age_adjusted_excess: 10.0,
        }
    }

    fn daily(c: &str, date: &str, mask: Option<f64>, deaths: Option<f64>) -> DailyRecord {
        DailyRecord {
            country: c.into(),
            date: d(date),
            mask_pct: mask,
            covid_deaths_pm: deaths,
        }
    }

    fn week(c: &str, date: &str) -> WeeklyRecord {
        WeeklyRecord {
            country: c.into(),
            week_start: d(date),
            mask_pct_weekly: None,
            excess_weekly: Some(1.0),
            excess_cumulative: Some(2.0),
        }
    }

    #[test]
    fn constant_week_average() {
        let rows: Vec<_> = (0..7)
            .map(|k| {
                let day = d("2020-03-02") + Duration::days(k);
                DailyRecord {
                    country: "A".into(),
                    date: day,
                    mask_pct: Some(60.0),
                    covid_deaths_pm: Some(1.0),
                }
            })
            .collect();
        let ds = PanelDataset::from_records(rows, vec![week("A", "2020-03-02")], vec![cov("A")], &opts())
            .unwrap();
        let ds = weekly_mask_average(&ds);
        assert_eq!(ds.weekly(0)[0].mask_pct_weekly, Some(60.0));
    }

    #[test]
    fn partial_week_average() {
        let mut rows = vec![
            daily("A", "2020-03-02", Some(50.0), None),
            daily("A", "2020-03-03", Some(60.0), None),
        ];
        for k in 2..7 {
            let day = d("2020-03-02") + Duration::days(k);
            rows.push(DailyRecord {
                country: "A".into(),
                date: day,
                mask_pct: None,
                covid_deaths_pm: None,
            });
        }
        let ds = PanelDataset::from_records(
            rows,
            vec![week("A", "2020-03-02"), week("A", "2020-03-09")],
            vec![cov("A")],
            &opts(),
        )
        .unwrap();
        let ds = weekly_mask_average(&ds);
        assert_eq!(ds.weekly(0)[0].mask_pct_weekly, Some(55.0));
        assert_eq!(ds.weekly(0)[1].mask_pct_weekly, None);
    }

    #[test]
    fn mask_out_of_bounds_rejected() {
        let err = PanelDataset::from_records(
            vec![daily("A", "2020-03-02", Some(101.0), Some(1.0))],
            vec![week("A", "2020-03-02")],
            vec![cov("A")],
            &opts(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("A 2020-03-02"), "{err}");
    }

    #[test]
    fn negative_deaths_clamped() {
        let ds = PanelDataset::from_records(
            vec![daily("A", "2020-03-02", Some(10.0), Some(-3.0))],
            vec![week("A", "2020-03-02")],
            vec![cov("A")],
            &opts(),
        )
        .unwrap();
        let off = (d("2020-03-02") - ds.window().start).num_days() as usize;
        assert_eq!(ds.daily(0).covid_deaths_pm[off], Some(0.0));
    }

    #[test]
    fn unknown_country_is_consistency_error() {
        let err = PanelDataset::from_records(
            vec![daily("A", "2020-03-02", Some(10.0), Some(1.0)), daily("B", "2020-03-02", None, None)],
            vec![week("A", "2020-03-02")],
            vec![cov("A")],
            &opts(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Consistency(_)), "{err}");
        assert!(err.to_string().contains('B'));
    }

    #[test]
    fn gaps_and_non_mondays_rejected() {
        let gap = PanelDataset::from_records(
            vec![daily("A", "2020-03-02", None, None), daily("A", "2020-03-04", None, None)],
            vec![week("A", "2020-03-02")],
            vec![cov("A")],
            &opts(),
        );
        assert!(matches!(gap, Err(Error::Validation(_))));
        let tuesday = PanelDataset::from_records(
            vec![daily("A", "2020-03-02", None, None)],
            vec![week("A", "2020-03-03")],
            vec![cov("A")],
            &opts(),
        );
        assert!(matches!(tuesday, Err(Error::Validation(_))));
    }

    #[test]
    fn country_count_enforced() {
        let err = PanelDataset::from_records(
            vec![daily("A", "2020-03-02", None, None)],
            vec![week("A", "2020-03-02")],
            vec![cov("A")],
            &LoadOptions::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("expected 24 countries"));
    }

    #[test]
    fn leading_zero_toggle() {
        let rows = vec![
            daily("A", "2020-02-04", Some(0.0), None),
            daily("A", "2020-02-05", Some(0.0), None),
            daily("A", "2020-02-06", Some(5.0), None),
            daily("A", "2020-02-07", Some(0.0), None),
        ];
        let mut o = opts();
        let kept = PanelDataset::from_records(rows.clone(), vec![week("A", "2020-02-03")], vec![cov("A")], &o)
            .unwrap();
        assert_eq!(&kept.daily(0).mask_pct[..4], &[Some(0.0), Some(0.0), Some(5.0), Some(0.0)]);
        o.drop_leading_zeros = true;
        let dropped =
            PanelDataset::from_records(rows, vec![week("A", "2020-02-03")], vec![cov("A")], &o).unwrap();
        assert_eq!(&dropped.daily(0).mask_pct[..4], &[None, None, Some(5.0), Some(0.0)]);
    }
}
