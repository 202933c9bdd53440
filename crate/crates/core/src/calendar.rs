//! Calendar-day helpers: inclusive day intervals and dense daily series.

use std::fmt;

use chrono::{Datelike, Duration, Weekday};

pub use chrono::NaiveDate;

/// First day of the analysis window.
pub fn analysis_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 2, 4).unwrap()
}

/// Last day of the analysis window.
pub fn analysis_end() -> NaiveDate {
    NaiveDate::from_ymd_opt(2021, 12, 31).unwrap()
}

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    if s.len() != 10 {
        return None;
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}

/// Monday of the ISO week containing `day`.
pub fn week_monday(day: NaiveDate) -> NaiveDate {
    day - Duration::days(day.weekday().num_days_from_monday() as i64)
}

pub fn is_monday(day: NaiveDate) -> bool {
    day.weekday() == Weekday::Mon
}

/// Closed interval of calendar days `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DayInterval {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DayInterval {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Self {
        assert!(start <= end, "interval start {start} after end {end}");
        DayInterval { start, end }
    }

    pub fn len_days(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }

    pub fn contains(&self, day: NaiveDate) -> bool {
        self.start <= day && day <= self.end
    }

    pub fn contains_interval(&self, other: &DayInterval) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> {
        let start = self.start;
        (0..self.len_days() as i64).map(move |i| start + Duration::days(i))
    }

    /// Offsets of this interval relative to `origin`, as a half-open index range.
    pub fn offsets_from(&self, origin: NaiveDate) -> std::ops::Range<usize> {
        let a = (self.start - origin).num_days();
        let b = (self.end - origin).num_days() + 1;
        assert!(a >= 0, "interval starts before origin");
        a as usize..b as usize
    }
}

impl fmt::Display for DayInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// A dense series with one value per day starting at `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct DailySeries {
    pub start: NaiveDate,
    pub values: Vec<f64>,
}

impl DailySeries {
    pub fn new(start: NaiveDate, values: Vec<f64>) -> Self {
        DailySeries { start, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn end(&self) -> NaiveDate {
        self.start + Duration::days(self.values.len() as i64 - 1)
    }

    pub fn span(&self) -> DayInterval {
        DayInterval::new(self.start, self.end())
    }

    pub fn day(&self, offset: usize) -> NaiveDate {
        self.start + Duration::days(offset as i64)
    }

    pub fn offset(&self, day: NaiveDate) -> Option<usize> {
        let d = (day - self.start).num_days();
        (d >= 0 && (d as usize) < self.values.len()).then_some(d as usize)
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn slice(&self, interval: &DayInterval) -> &[f64] {
        &self.values[interval.offsets_from(self.start)]
    }
}
