//! Cross-country tables built from the wave segmentation and mask indices.

use crate::error::Result;
use crate::indices::{complete_records, MaskIndexTable, WaveMaskRecord};
use crate::ingest::PanelDataset;
use crate::regress::{mask_regression, reverse_causality_regressions, OlsOptions, RegressionFit};
use crate::stats::{correlate, quartiles, wilcoxon_one_sided, Alternative, BootstrapConfig, CorrelationMethod, CorrelationResult, WilcoxonResult};

/// Index order used for the pairwise correlation table.
pub const CORRELATION_ORDER: [&str; 5] = ["maskall", "maskinterwave", "maskinwave", "maskbeginwave", "maskpeakwave"];

#[derive(Debug, Clone, PartialEq)]
pub struct IndexCorrelation {
    pub first: &'static str,
    pub second: &'static str,
    pub result: CorrelationResult,
}

/// All ten Pearson correlations between indices, each with a basic-bootstrap CI.
pub fn index_correlations(table: &MaskIndexTable, cfg: &BootstrapConfig) -> Result<Vec<IndexCorrelation>> {
    let mut out = Vec::with_capacity(10);
    for (i, &a) in CORRELATION_ORDER.iter().enumerate() {
        for &b in &CORRELATION_ORDER[i + 1..] {
            let x = table.column(a).unwrap();
            let y = table.column(b).unwrap();
            out.push(IndexCorrelation {
                first: a,
                second: b,
                result: correlate(&x, &y, CorrelationMethod::Pearson, cfg)?,
            });
        }
    }
    Ok(out)
}

/// The cross-country regression refitted once per mask index, in
/// [`CORRELATION_ORDER`].
pub fn main_regressions(ds: &PanelDataset, table: &MaskIndexTable, opts: &OlsOptions) -> Result<Vec<(&'static str, RegressionFit)>> {
    CORRELATION_ORDER
        .iter()
        .map(|&name| Ok((name, mask_regression(ds, table, name, opts)?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioAnalysis {
    /// `peak_begin` or `inwave_interwave`.
    pub name: &'static str,
    pub mortality_name: &'static str,
    /// One label per point: `country` or `country:phase`.
    pub labels: Vec<String>,
    pub ratios: Vec<f64>,
    pub mortality: Vec<f64>,
    /// (q1, median, q3).
    pub quartiles: (f64, f64, f64),
    pub spearman: CorrelationResult,
    /// Numerator index greater than denominator index.
    pub wilcoxon: WilcoxonResult,
    /// Numerator index regressed on the denominator index and mortality.
    pub regression: RegressionFit,
}

#[allow(clippy::too_many_arguments)]
fn ratio_analysis(
    name: &'static str,
    mortality_name: &'static str,
    labels: Vec<String>,
    num: &[f64],
    den: &[f64],
    mortality: Vec<f64>,
    regression: RegressionFit,
    cfg: &BootstrapConfig,
) -> Result<RatioAnalysis> {
    let keep: Vec<usize> = (0..den.len()).filter(|&i| den[i] > 0.0).collect();
    if keep.len() < den.len() {
        log::warn!("{name}: {} point(s) with a zero denominator left out of the ratio", den.len() - keep.len());
    }
    let ratios: Vec<f64> = keep.iter().map(|&i| num[i] / den[i]).collect();
    let mortality: Vec<f64> = keep.iter().map(|&i| mortality[i]).collect();
    let labels: Vec<String> = keep.iter().map(|&i| labels[i].clone()).collect();
    Ok(RatioAnalysis {
        name,
        mortality_name,
        labels,
        quartiles: quartiles(&ratios)?,
        spearman: correlate(&ratios, &mortality, CorrelationMethod::Spearman, cfg)?,
        wilcoxon: wilcoxon_one_sided(num, den, Alternative::Greater)?,
        ratios,
        mortality,
        regression,
    })
}

/// Peak/begin per wave against wave mortality, and inwave/interwave per
/// country against total mortality. Waves with a missing window average are
/// left out; ratios with a zero denominator are left out of the ratio summaries
/// but not of the signed-rank test.
pub fn ratio_analyses(
    ds: &PanelDataset,
    records: &[WaveMaskRecord],
    table: &MaskIndexTable,
    cfg: &BootstrapConfig,
    opts: &OlsOptions,
) -> Result<[RatioAnalysis; 2]> {
    let (reg_wave, reg_country) = reverse_causality_regressions(records, table, ds, opts)?;
    let recs = complete_records(records);
    let peak_begin = ratio_analysis(
        "peak_begin",
        "wave_mortality",
        recs.iter().map(|r| format!("{}:{}", r.country, r.phase_index)).collect(),
        &recs.iter().map(|r| r.peak_avg.unwrap()).collect::<Vec<_>>(),
        &recs.iter().map(|r| r.begin_avg.unwrap()).collect::<Vec<_>>(),
        recs.iter().map(|r| r.wave_deaths_pm_mean).collect(),
        reg_wave,
        cfg,
    )?;
    let in_inter = ratio_analysis(
        "inwave_interwave",
        "total_mortality",
        ds.countries().to_vec(),
        &table.column("maskinwave").unwrap(),
        &table.column("maskinterwave").unwrap(),
        (0..ds.n_countries()).map(|ci| ds.total_deaths(ci)).collect(),
        reg_country,
        cfg,
    )?;
    Ok([peak_begin, in_inter])
}
