//! Browser bindings: each export regenerates a synthetic dataset or panel from
//! its seed and returns a JSON object holding SVG markup and summary numbers.

use serde_json::json;
use wasm_bindgen::prelude::*;
use wavepanel::demo::{demo_dataset, DemoSpec};
use wavepanel::falsify::{spuriousness_experiment, SynthSpec};
use wavepanel::indices::{complete_records, wave_mask_records};
use wavepanel::plot::{histogram_figure, phases_figure, wave_figure};
use wavepanel::stats::{bootstrap, BootstrapConfig, CorrelationMethod};
use wavepanel::twfe::OutcomeKind;
use wavepanel::waves::{pooled_curve, segment, WaveParams};
use wavepanel::{Error, Result};

fn demo(seed: u32) -> Result<wavepanel::ingest::PanelDataset> {
    demo_dataset(&DemoSpec { n_countries: 24, seed: seed as u64 })
}

/// Phase boundaries and one country's waves for the given smoothing and mass.
pub fn waves_json(seed: u32, smoothing: u32, mass: f64, country: u32) -> Result<String> {
    if !(mass > 0.0 && mass <= 1.0) || smoothing == 0 {
        return Err(Error::InvalidArgument("smoothing must be ≥ 1 and mass in (0, 1]".into()));
    }
    let ds = demo(seed)?;
    let params = WaveParams { smoothing_days: smoothing as usize, mass_fraction: mass, ..Default::default() };
    let ws = segment(&ds, &params, None)?;
    let name = ds
        .countries()
        .get(country as usize)
        .ok_or_else(|| Error::InvalidArgument(format!("country index {country} out of range")))?
        .clone();
    let waves: Vec<_> = ws
        .for_country(&name)
        .map(|w| {
            json!({
                "phase": w.phase_index,
                "start": w.span.start.to_string(),
                "end": w.span.end.to_string(),
                "days": w.span.len_days(),
                "peak": w.peak_day.to_string(),
                "mean_deaths_pm": w.wave_deaths_pm_mean,
            })
        })
        .collect();
    let curve = pooled_curve(&ds)?;
    Ok(json!({
        "countries": ds.countries(),
        "country": name,
        "boundaries": ws.partition.boundaries().iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "waves": waves,
        "phases_svg": phases_figure(&curve, params.smoothing_days, &ws.partition),
        "wave_svg": wave_figure(&ds, &ws, &name).unwrap_or_default(),
    })
    .to_string())
}

/// Bootstrap distribution of the correlation between per-wave peak/begin mask
/// ratios and wave mortality.
pub fn bootstrap_json(seed: u32, reps: u32, method: &str) -> Result<String> {
    let method: CorrelationMethod = method.parse()?;
    if reps < 10 {
        return Err(Error::InvalidArgument("need at least 10 resamples".into()));
    }
    let ds = demo(seed)?;
    let ws = segment(&ds, &WaveParams::default(), None)?;
    let records = wave_mask_records(&ds, &ws)?;
    let pairs: Vec<(f64, f64)> = complete_records(&records)
        .iter()
        .filter_map(|r| r.ratio_peak_begin().map(|q| (q, r.wave_deaths_pm_mean)))
        .collect();
    let cfg = BootstrapConfig { reps: reps as usize, seed: seed as u64, ..Default::default() };
    let out = bootstrap(
        &pairs,
        |s| {
            let (a, b): (Vec<f64>, Vec<f64>) = s.iter().copied().unzip();
            method.apply(&a, &b).ok()
        },
        &cfg,
    )?;
    let svg = histogram_figure(
        &out.replicates,
        40,
        &[(out.estimate, "estimate"), (out.low, "ci low"), (out.high, "ci high")],
        &format!("{} correlation, resampled", method.name()),
        "Bootstrap distribution: peak/begin ratio vs wave mortality",
    );
    Ok(json!({
        "n": pairs.len(),
        "estimate": out.estimate,
        "ci_low": out.low,
        "ci_high": out.high,
        "svg": svg,
    })
    .to_string())
}

/// TWFE estimates on synthetic panels for one lag, weekly and cumulative outcomes.
#[allow(clippy::too_many_arguments)]
pub fn falsify_json(seed: u32, reps: u32, shift_sd: f64, scale_sd: f64, reactivity: f64, noise_sd: f64, true_beta: f64, lag: i32) -> Result<String> {
    let spec = SynthSpec {
        country_shift_sd: shift_sd,
        country_scale_sd: scale_sd,
        mask_reactivity: reactivity,
        noise_sd,
        true_beta,
        seed: seed as u64,
        ..Default::default()
    };
    let report = spuriousness_experiment(&spec, &[lag], reps as usize)?;
    let mut out = serde_json::Map::new();
    for kind in [OutcomeKind::Weekly, OutcomeKind::Cumulative] {
        let row = report.row(lag, kind).expect("row for each outcome");
        let svg = histogram_figure(
            &row.betas,
            30,
            &[(true_beta, "true beta"), (row.mean_beta, "mean estimate")],
            "estimated beta",
            &format!("{} outcome, lag {lag}: {:.1}% of intervals exclude 0", kind.name(), 100.0 * row.reject_rate),
        );
        out.insert(
            kind.name().into(),
            json!({ "mean_beta": row.mean_beta, "reject_rate": row.reject_rate, "svg": svg }),
        );
    }
    Ok(serde_json::Value::Object(out).to_string())
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = exploreWaves)]
pub fn explore_waves(seed: u32, smoothing: u32, mass: f64, country: u32) -> std::result::Result<String, JsError> {
    js(waves_json(seed, smoothing, mass, country))
}

#[wasm_bindgen(js_name = exploreBootstrap)]
pub fn explore_bootstrap(seed: u32, reps: u32, method: &str) -> std::result::Result<String, JsError> {
    js(bootstrap_json(seed, reps, method))
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen(js_name = exploreFalsify)]
pub fn explore_falsify(
    seed: u32,
    reps: u32,
    shift_sd: f64,
    scale_sd: f64,
    reactivity: f64,
    noise_sd: f64,
    true_beta: f64,
    lag: i32,
) -> std::result::Result<String, JsError> {
    js(falsify_json(seed, reps, shift_sd, scale_sd, reactivity, noise_sd, true_beta, lag))
}
