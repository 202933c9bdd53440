//! Figures rendered with the [`svg`](crate::svg) writer.

use chrono::{Datelike, NaiveDate};

use crate::calendar::{DailySeries, DayInterval};
use crate::ingest::PanelDataset;
use crate::svg::{Anchor, Svg};
use crate::twfe::{LagRow, OutcomeKind, ResidualDiagnostics};
use crate::waves::{smooth_centered, PhasePartition, WaveSet};

const INK: &str = "#222222";
const GRID: &str = "#dddddd";
const BLUE: &str = "#1f5fa8";
const RED: &str = "#c0392b";
const GREEN: &str = "#2e8b57";
const GREY: &str = "#999999";

/// Tick positions covering `[lo, hi]` with a 1/2/5 step.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return vec![lo];
    }
    let raw = (hi - lo) / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64, ticks: &[f64]) -> String {
    let step = if ticks.len() > 1 { (ticks[1] - ticks[0]).abs() } else { 1.0 };
    let decimals = if step >= 1.0 { 0 } else { (-step.log10().floor()) as usize };
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s.trim_start_matches(['-', '0', '.']).is_empty() {
        s[1..].to_string()
    } else {
        s
    }
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Data-to-pixel mapping for one plotting area.
#[derive(Debug, Clone, Copy)]
struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x.0) / (self.x.1 - self.x.0) * self.width
    }

    fn py(&self, y: f64) -> f64 {
        self.top + self.height - (y - self.y.0) / (self.y.1 - self.y.0) * self.height
    }

    fn pt(&self, x: f64, y: f64) -> (f64, f64) {
        (self.px(x), self.py(y))
    }

    fn bottom(&self) -> f64 {
        self.top + self.height
    }

    fn right(&self) -> f64 {
        self.left + self.width
    }

    fn border(&self, svg: &mut Svg) {
        let (l, t, r, b) = (self.left, self.top, self.right(), self.bottom());
        svg.polyline(&[(l, t), (r, t), (r, b), (l, b), (l, t)], INK, 1.0);
    }

    fn vline(&self, svg: &mut Svg, x: f64, stroke: &str, dashed: bool) {
        let pts = [(self.px(x), self.top), (self.px(x), self.bottom())];
        if dashed {
            svg.dashed(&pts, stroke, 1.0);
        } else {
            svg.polyline(&pts, stroke, 1.0);
        }
    }

    fn hline(&self, svg: &mut Svg, y: f64, stroke: &str) {
        svg.polyline(&[(self.left, self.py(y)), (self.right(), self.py(y))], stroke, 1.0);
    }

    fn band(&self, svg: &mut Svg, x0: f64, x1: f64, fill: &str, opacity: f64) {
        let (a, b) = (self.px(x0), self.px(x1));
        svg.polygon(&[(a, self.top), (b, self.top), (b, self.bottom()), (a, self.bottom())], fill, opacity);
    }

    fn y_axis(&self, svg: &mut Svg, size: f64) {
        let ticks = nice_ticks(self.y.0, self.y.1, 5);
        for t in &ticks {
            let y = self.py(*t);
            svg.polyline(&[(self.left, y), (self.right(), y)], GRID, 0.5);
            svg.text(self.left - 4.0, y + size / 3.0, size, Anchor::End, &tick_label(*t, &ticks));
        }
    }

    fn x_axis(&self, svg: &mut Svg, size: f64) {
        let ticks = nice_ticks(self.x.0, self.x.1, 6);
        for t in &ticks {
            let x = self.px(*t);
            svg.polyline(&[(x, self.top), (x, self.bottom())], GRID, 0.5);
            svg.text(x, self.bottom() + size + 3.0, size, Anchor::Middle, &tick_label(*t, &ticks));
        }
    }

    /// Quarterly month ticks for a day-offset axis starting at `origin`.
    fn date_axis(&self, svg: &mut Svg, origin: NaiveDate, size: f64) {
        let end = origin + chrono::Duration::days(self.x.1.floor() as i64);
        let mut d = NaiveDate::from_ymd_opt(origin.year(), origin.month(), 1).unwrap();
        while d <= end {
            if d >= origin && (d.month() - 1).is_multiple_of(3) {
                let x = self.px((d - origin).num_days() as f64);
                svg.polyline(&[(x, self.top), (x, self.bottom())], GRID, 0.5);
                svg.text(x, self.bottom() + size + 3.0, size, Anchor::Middle, &d.format("%Y-%m").to_string());
            }
            d = d.checked_add_months(chrono::Months::new(1)).unwrap();
        }
    }
}

fn titled(width: f64, height: f64, title: &str) -> Svg {
    let mut svg = Svg::new(width, height);
    svg.text(width / 2.0, 20.0, 14.0, Anchor::Middle, title);
    svg
}

/// Pooled normalized mortality, its smoothed version and the phase boundaries.
pub fn phases_figure(curve: &DailySeries, smoothing_days: usize, partition: &PhasePartition) -> String {
    let mut svg = titled(820.0, 420.0, "Normalized COVID-19 deaths per million, all countries");
    let smooth = smooth_centered(&curve.values, smoothing_days);
    let n = curve.len() as f64;
    let f = Frame {
        left: 60.0,
        top: 35.0,
        width: 740.0,
        height: 330.0,
        x: (0.0, (n - 1.0).max(1.0)),
        y: padded_range(curve.values.iter().copied().chain([0.0])),
    };
    f.y_axis(&mut svg, 10.0);
    f.date_axis(&mut svg, curve.start, 10.0);
    let raw: Vec<_> = curve.values.iter().enumerate().map(|(i, v)| f.pt(i as f64, *v)).collect();
    svg.polyline(&raw, GREY, 0.7);
    let sm: Vec<_> = smooth.iter().enumerate().map(|(i, v)| f.pt(i as f64, *v)).collect();
    svg.polyline(&sm, BLUE, 1.6);
    for b in partition.boundaries() {
        let x = (*b - curve.start).num_days() as f64;
        f.vline(&mut svg, x, RED, false);
        svg.text(f.px(x) + 3.0, f.top + 12.0, 10.0, Anchor::Start, &b.to_string());
    }
    f.border(&mut svg);
    svg.vertical_text(18.0, f.top + f.height / 2.0, 11.0, "normalized deaths per million");
    svg.finish()
}

/// One country's daily mortality with its waves, begin windows (green) and
/// peak windows (red).
pub fn wave_figure(ds: &PanelDataset, waveset: &WaveSet, country: &str) -> Option<String> {
    let ci = ds.country_index(country)?;
    let window = ds.window();
    let values = ds.deaths_filled(ci);
    let mut svg = titled(820.0, 360.0, &format!("{country}: COVID-19 deaths per million"));
    let f = Frame {
        left: 60.0,
        top: 35.0,
        width: 740.0,
        height: 270.0,
        x: (0.0, (values.len() as f64 - 1.0).max(1.0)),
        y: padded_range(values.iter().copied().chain([0.0])),
    };
    let off = |d: NaiveDate| (d - window.start).num_days() as f64;
    let span = |svg: &mut Svg, iv: &DayInterval, fill: &str, op: f64| f.band(svg, off(iv.start), off(iv.end) + 1.0, fill, op);
    for w in waveset.for_country(country) {
        span(&mut svg, &w.span, BLUE, 0.12);
        span(&mut svg, &w.begin_window, GREEN, 0.35);
        span(&mut svg, &w.peak_window, RED, 0.35);
    }
    f.y_axis(&mut svg, 10.0);
    f.date_axis(&mut svg, window.start, 10.0);
    let pts: Vec<_> = values.iter().enumerate().map(|(i, v)| f.pt(i as f64, *v)).collect();
    svg.polyline(&pts, INK, 0.9);
    for b in waveset.partition.boundaries() {
        f.vline(&mut svg, off(*b), GREY, true);
    }
    f.border(&mut svg);
    Some(svg.finish())
}

/// Scatter plot with optional point labels drawn next to each marker.
pub fn scatter_figure(x: &[f64], y: &[f64], labels: Option<&[String]>, x_label: &str, y_label: &str, title: &str) -> String {
    let mut svg = titled(620.0, 480.0, title);
    let f = Frame {
        left: 70.0,
        top: 35.0,
        width: 520.0,
        height: 385.0,
        x: padded_range(x.iter().copied()),
        y: padded_range(y.iter().copied()),
    };
    f.y_axis(&mut svg, 10.0);
    f.x_axis(&mut svg, 10.0);
    for (i, (a, b)) in x.iter().zip(y).enumerate() {
        if !a.is_finite() || !b.is_finite() {
            continue;
        }
        let (px, py) = f.pt(*a, *b);
        svg.circle(px, py, 3.5, BLUE);
        if let Some(l) = labels.and_then(|l| l.get(i)) {
            svg.text(px + 5.0, py - 4.0, 8.0, Anchor::Start, l);
        }
    }
    f.border(&mut svg);
    svg.text(f.left + f.width / 2.0, f.bottom() + 34.0, 11.0, Anchor::Middle, x_label);
    svg.vertical_text(20.0, f.top + f.height / 2.0, 11.0, y_label);
    svg.finish()
}

/// Residuals against time, one small panel per country.
pub fn residual_grid(diag: &ResidualDiagnostics, title: &str) -> String {
    let cols = 4usize;
    let rows = diag.countries.len().div_ceil(cols).max(1);
    let (cell_w, cell_h) = (230.0, 130.0);
    let mut svg = titled(cols as f64 * cell_w + 20.0, rows as f64 * cell_h + 40.0, title);
    let t0 = diag.countries.iter().filter_map(|c| c.series.first().map(|p| p.0)).min();
    let t1 = diag.countries.iter().filter_map(|c| c.series.last().map(|p| p.0)).max();
    let (Some(t0), Some(t1)) = (t0, t1) else {
        return svg.finish();
    };
    let span = ((t1 - t0).num_days() as f64).max(1.0);
    for (k, c) in diag.countries.iter().enumerate() {
        let (r, q) = (k / cols, k % cols);
        let f = Frame {
            left: 10.0 + q as f64 * cell_w + 38.0,
            top: 35.0 + r as f64 * cell_h + 16.0,
            width: cell_w - 50.0,
            height: cell_h - 36.0,
            x: (0.0, span),
            y: padded_range(c.series.iter().map(|p| p.1).chain([0.0])),
        };
        let label = match c.lag1_autocorr {
            Some(a) => format!("{} (r1 = {a:.2})", c.country),
            None => c.country.clone(),
        };
        svg.text(f.left + f.width / 2.0, f.top - 4.0, 10.0, Anchor::Middle, &label);
        f.y_axis(&mut svg, 8.0);
        f.hline(&mut svg, 0.0, GREY);
        let pts: Vec<_> = c.series.iter().map(|(d, e)| f.pt((*d - t0).num_days() as f64, *e)).collect();
        svg.polyline(&pts, BLUE, 0.9);
        f.border(&mut svg);
    }
    svg.finish()
}

/// β estimates with confidence intervals across lags, one series per outcome.
pub fn lag_figure(rows: &[LagRow]) -> String {
    let mut svg = titled(620.0, 420.0, "TWFE estimate of mask coefficient by lag");
    let lags: Vec<f64> = rows.iter().map(|r| r.lag as f64).collect();
    let (lo, hi) = padded_range(lags.iter().copied());
    let f = Frame {
        left: 70.0,
        top: 35.0,
        width: 520.0,
        height: 320.0,
        x: (lo - 0.5, hi + 0.5),
        y: padded_range(rows.iter().flat_map(|r| [r.ci.0, r.ci.1]).chain([0.0])),
    };
    f.y_axis(&mut svg, 10.0);
    f.x_axis(&mut svg, 10.0);
    f.hline(&mut svg, 0.0, GREY);
    for (kind, colour, dx) in [(OutcomeKind::Weekly, BLUE, -0.1), (OutcomeKind::Cumulative, RED, 0.1)] {
        for r in rows.iter().filter(|r| r.outcome_kind == kind) {
            let x = r.lag as f64 + dx;
            svg.polyline(&[f.pt(x, r.ci.0), f.pt(x, r.ci.1)], colour, 1.5);
            let (px, py) = f.pt(x, r.beta);
            svg.circle(px, py, 3.5, colour);
        }
    }
    f.border(&mut svg);
    svg.text(f.left + f.width / 2.0, f.bottom() + 34.0, 11.0, Anchor::Middle, "lag (weeks)");
    svg.vertical_text(20.0, f.top + f.height / 2.0, 11.0, "beta (95% CI)");
    svg.circle(f.left + 10.0, f.top + 12.0, 3.5, BLUE);
    svg.text(f.left + 18.0, f.top + 16.0, 10.0, Anchor::Start, "weekly");
    svg.circle(f.left + 80.0, f.top + 12.0, 3.5, RED);
    svg.text(f.left + 88.0, f.top + 16.0, 10.0, Anchor::Start, "cumulative");
    svg.finish()
}

/// Histogram with vertical reference lines `(value, label)`.
pub fn histogram_figure(values: &[f64], bins: usize, marks: &[(f64, &str)], x_label: &str, title: &str) -> String {
    let mut svg = titled(620.0, 400.0, title);
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let (lo, hi) = padded_range(finite.iter().copied().chain(marks.iter().map(|m| m.0)));
    let bins = bins.max(1);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for v in &finite {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let top = counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let f = Frame {
        left: 60.0,
        top: 35.0,
        width: 530.0,
        height: 300.0,
        x: (lo, hi),
        y: (0.0, top * 1.05),
    };
    f.y_axis(&mut svg, 10.0);
    f.x_axis(&mut svg, 10.0);
    for (b, c) in counts.iter().enumerate() {
        if *c == 0 {
            continue;
        }
        let x0 = f.px(lo + b as f64 * width);
        let x1 = f.px(lo + (b + 1) as f64 * width);
        let y = f.py(*c as f64);
        svg.polygon(&[(x0, f.bottom()), (x0, y), (x1, y), (x1, f.bottom())], BLUE, 0.6);
    }
    for (k, (v, label)) in marks.iter().enumerate() {
        f.vline(&mut svg, *v, RED, k > 0);
        svg.text(f.px(*v) + 3.0, f.top + 12.0 + 12.0 * k as f64, 10.0, Anchor::Start, label);
    }
    f.border(&mut svg);
    svg.text(f.left + f.width / 2.0, f.bottom() + 34.0, 11.0, Anchor::Middle, x_label);
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round_and_inside() {
        let t = nice_ticks(0.03, 0.97, 5);
        let want = [0.2, 0.4, 0.6, 0.8];
        assert_eq!(t.len(), want.len());
        assert!(t.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!(t.iter().all(|v| (0.03..=0.97).contains(v)));
        assert_eq!(nice_ticks(-10.0, 10.0, 4), vec![-10.0, -5.0, 0.0, 5.0, 10.0]);
        assert_eq!(nice_ticks(1.0, 1.0, 4), vec![1.0]);
    }

    #[test]
    fn labels_drop_negative_zero() {
        assert_eq!(tick_label(-0.0, &[0.0, 0.5]), "0.0");
        assert_eq!(tick_label(2.0, &[0.0, 2.0]), "2");
    }

    #[test]
    fn histogram_is_deterministic() {
        let v: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        let a = histogram_figure(&v, 20, &[(0.0, "zero")], "x", "t");
        assert_eq!(a, histogram_figure(&v, 20, &[(0.0, "zero")], "x", "t"));
        assert!(a.contains("zero"));
    }

    #[test]
    fn scatter_skips_nan() {
        let s = scatter_figure(&[1.0, f64::NAN, 3.0], &[1.0, 2.0, 3.0], None, "x", "y", "t");
        assert_eq!(s.matches("<circle").count(), 2);
    }
}
