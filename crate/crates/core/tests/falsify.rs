use statrs::distribution::{ContinuousCDF, StudentsT};
use wavepanel::falsify::{spuriousness_experiment, synth_panel_replication, SynthSpec};
use wavepanel::twfe::{residual_diagnostics, twfe_fit, OutcomeKind};

const KINDS: [OutcomeKind; 2] = [OutcomeKind::Weekly, OutcomeKind::Cumulative];

fn mean_abs_autocorr(spec: &SynthSpec, kind: OutcomeKind, reps: u64) -> f64 {
    let total: f64 = (0..reps)
        .map(|r| {
            let panel = synth_panel_replication(spec, r).unwrap().lagged(kind, 1);
            let fit = twfe_fit(&panel).unwrap();
            residual_diagnostics(&panel, &fit).mean_abs_autocorr.unwrap()
        })
        .sum();
    total / reps as f64
}

#[test]
fn shifted_waves_leave_autocorrelated_residuals() {
    let noiseless = SynthSpec { noise_sd: 0.0, ..SynthSpec::violation() };
    assert!(mean_abs_autocorr(&noiseless, OutcomeKind::Weekly, 10) > 0.5);
    assert!(mean_abs_autocorr(&SynthSpec::violation(), OutcomeKind::Cumulative, 10) > 0.5);
    assert!(mean_abs_autocorr(&SynthSpec::correct(), OutcomeKind::Weekly, 10) < 0.2);
}

#[test]
fn mean_estimate_converges_without_violations() {
    let beta = 0.3;
    let spec = SynthSpec { true_beta: beta, ..SynthSpec::correct() };
    let reps = 500;
    let report = spuriousness_experiment(&spec, &[0], reps).unwrap();
    // the effect enters the same-week outcome only
    let row = report.row(0, OutcomeKind::Weekly).unwrap();
    let n = row.betas.len() as f64;
    let sd = (row.betas.iter().map(|b| (b - row.mean_beta).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let mc_se = sd / n.sqrt();
    assert!((row.mean_beta - beta).abs() < 3.0 * mc_se, "mean {} mc_se {}", row.mean_beta, mc_se);
}

/// With masks unrelated to the epidemic curve, t statistics follow t(G-1)
/// even when country curves are shifted and rescaled.
#[test]
fn no_reactivity_gives_nominal_t_statistics() {
    let spec = SynthSpec { mask_reactivity: 0.0, ..SynthSpec::violation() };
    let reps = 500;
    let t = StudentsT::new(0.0, 1.0, (spec.n_countries - 1) as f64).unwrap();
    let critical = 1.949 / (reps as f64).sqrt();
    for kind in KINDS {
        for lag in [-1, 0, 3] {
            let mut ts: Vec<f64> = (0..reps)
                .map(|r| twfe_fit(&synth_panel_replication(&spec, r).unwrap().lagged(kind, lag)).unwrap().t_stat)
                .collect();
            ts.sort_by(f64::total_cmp);
            let n = ts.len() as f64;
            let d = ts
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let c = t.cdf(*x);
                    (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
                })
                .fold(0.0, f64::max);
            assert!(d < critical, "{kind:?} lag {lag}: KS distance {d}");
        }
    }
}
