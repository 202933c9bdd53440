//! Cross-sectional OLS with standardized coefficients.
//!
//! Coefficients come from a Householder QR of the design (intercept first).
//! Standardized slopes `b_j · sd(x_j) / sd(y)` get delta-method intervals: the
//! slopes are written as a function of the joint sample covariance of
//! `(y, x_1, …, x_k)` and the normal-theory covariance of the sample
//! covariances, `acov(s_ab, s_cd) = (σ_ac σ_bd + σ_ad σ_bc) / n`, is pushed
//! through the analytic Jacobian.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};
use crate::indices::{complete_records, MaskIndexTable, WaveMaskRecord};
use crate::ingest::{CountryCovariates, PanelDataset};
use crate::stats::{mean, sd};

/// Distribution used for standardized-coefficient interval quantiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CiQuantile {
    Normal,
    /// Student t with the residual degrees of freedom.
    StudentT,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlsOptions {
    pub standardize: bool,
    pub level: f64,
    pub ci_quantile: CiQuantile,
}

impl Default for OlsOptions {
    fn default() -> Self {
        OlsOptions {
            standardize: true,
            level: 0.95,
            ci_quantile: CiQuantile::Normal,
        }
    }
}

/// Named regressor columns. The intercept is implicit.
#[derive(Debug, Clone, Default)]
pub struct Design {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Design {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, column: Vec<f64>) -> Self {
        self.names.push(name.to_string());
        self.columns.push(column);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientRow {
    pub name: String,
    pub coef: f64,
    pub se: f64,
    pub t: f64,
    pub p: f64,
    pub std_coef: Option<f64>,
    pub std_se: Option<f64>,
    pub std_ci: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    /// Intercept first, then regressors in design order.
    pub rows: Vec<CoefficientRow>,
    pub n: usize,
    pub df_resid: usize,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

impl RegressionFit {
    pub fn row(&self, name: &str) -> Option<&CoefficientRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

pub fn ols_fit(y: &[f64], design: &Design, opts: &OlsOptions) -> Result<RegressionFit> {
    let n = y.len();
    let k = design.columns.len();
    let p = k + 1;
    for c in &design.columns {
        if c.len() != n {
            return Err(Error::LengthMismatch(c.len(), n));
        }
    }
    if n <= p {
        return Err(Error::TooFewObservations(format!("n = {n} with {k} regressors")));
    }
    if y.iter().chain(design.columns.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite value in regression data".into()));
    }

    let x = DMatrix::from_fn(n, p, |i, j| if j == 0 { 1.0 } else { design.columns[j - 1][i] });

    // rank check on unit-norm columns so the threshold is scale free
    let norms: Vec<f64> = (0..p).map(|j| x.column(j).norm()).collect();
    let mut scaled = x.clone();
    for (j, nrm) in norms.iter().enumerate() {
        if *nrm > 0.0 {
            scaled.column_mut(j).scale_mut(1.0 / nrm);
        }
    }
    let rs = scaled.qr().r();
    let collinear: Vec<String> = (0..p)
        .filter(|&j| norms[j] == 0.0 || rs[(j, j)].abs() < 1e-10)
        .map(|j| if j == 0 { "(intercept)".to_string() } else { design.names[j - 1].clone() })
        .collect();
    if !collinear.is_empty() {
        return Err(Error::RankDeficient(collinear));
    }

    let qr = x.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let yv = DVector::from_column_slice(y);
    let qty = q.transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::RankDeficient(design.names.clone()))?;
    let fitted = &x * &beta;
    let resid: Vec<f64> = (0..n).map(|i| y[i] - fitted[i]).collect();
    let rss: f64 = resid.iter().map(|e| e * e).sum();
    let ybar = mean(y);
    let tss: f64 = y.iter().map(|v| (v - ybar).powi(2)).sum();
    let df = n - p;
    let sigma2 = rss / df as f64;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| Error::RankDeficient(design.names.clone()))?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let tdist = StudentsT::new(0.0, 1.0, df as f64).expect("df > 0");

    let std = if opts.standardize && k > 0 {
        Some(standardized(y, design, opts, df)?)
    } else {
        None
    };

    let rows = (0..p)
        .map(|j| {
            let se = (sigma2 * xtx_inv[(j, j)]).sqrt();
            let t = beta[j] / se;
            let pval = if se > 0.0 {
                (2.0 * tdist.cdf(-t.abs())).clamp(f64::MIN_POSITIVE, 1.0)
            } else if beta[j] == 0.0 {
                1.0
            } else {
                f64::MIN_POSITIVE
            };
            let (std_coef, std_se, std_ci) = match (&std, j) {
                (Some(s), j) if j > 0 => (Some(s.0[j - 1]), Some(s.1[j - 1]), Some(s.2[j - 1])),
                _ => (None, None, None),
            };
            CoefficientRow {
                name: if j == 0 { "(intercept)".into() } else { design.names[j - 1].clone() },
                coef: beta[j],
                se,
                t,
                p: pval,
                std_coef,
                std_se,
                std_ci,
            }
        })
        .collect();

    Ok(RegressionFit {
        rows,
        n,
        df_resid: df,
        r_squared: if tss > 0.0 { (1.0 - rss / tss).clamp(0.0, 1.0) } else { 0.0 },
        residuals: resid,
    })
}

type StdParts = (Vec<f64>, Vec<f64>, Vec<(f64, f64)>);

/// Standardized slopes, their delta-method standard errors and intervals.
fn standardized(y: &[f64], design: &Design, opts: &OlsOptions, df: usize) -> Result<StdParts> {
    let n = y.len();
    let k = design.columns.len();
    let m = k + 1;
    let vars: Vec<&[f64]> = std::iter::once(y).chain(design.columns.iter().map(Vec::as_slice)).collect();
    let means: Vec<f64> = vars.iter().map(|v| mean(v)).collect();
    let cov = DMatrix::from_fn(m, m, |a, b| {
        vars[a]
            .iter()
            .zip(vars[b])
            .map(|(u, v)| (u - means[a]) * (v - means[b]))
            .sum::<f64>()
            / (n as f64 - 1.0)
    });
    if cov[(0, 0)] <= 0.0 {
        return Err(Error::DegenerateVariance);
    }

    let point = std_slopes(&cov)?;

    // directional derivatives along each distinct covariance entry
    let params: Vec<(usize, usize)> = (0..m).flat_map(|a| (a..m).map(move |b| (a, b))).collect();
    let mut jac = DMatrix::zeros(k, params.len());
    for (col, &(a, b)) in params.iter().enumerate() {
        let mut e = DMatrix::zeros(m, m);
        e[(a, b)] = 1.0;
        e[(b, a)] = 1.0;
        let d = std_slopes_derivative(&cov, &e)?;
        for j in 0..k {
            jac[(j, col)] = d[j];
        }
    }
    let gamma = DMatrix::from_fn(params.len(), params.len(), |u, v| {
        let (a, b) = params[u];
        let (c, d) = params[v];
        (cov[(a, c)] * cov[(b, d)] + cov[(a, d)] * cov[(b, c)]) / n as f64
    });
    let acov = &jac * gamma * jac.transpose();

    let level = opts.level;
    let q = match opts.ci_quantile {
        CiQuantile::Normal => Normal::standard().inverse_cdf(0.5 + level / 2.0),
        CiQuantile::StudentT => StudentsT::new(0.0, 1.0, df as f64)
            .expect("df > 0")
            .inverse_cdf(0.5 + level / 2.0),
    };
    let ses: Vec<f64> = (0..k).map(|j| acov[(j, j)].max(0.0).sqrt()).collect();
    let cis = (0..k).map(|j| (point[j] - q * ses[j], point[j] + q * ses[j])).collect();
    Ok((point, ses, cis))
}

/// Standardized slopes from the covariance matrix of `(y, x_1..x_k)`.
fn std_slopes(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let m = cov.nrows();
    let sxx = cov.view((1, 1), (m - 1, m - 1)).into_owned();
    let sxy = cov.view((1, 0), (m - 1, 1)).into_owned();
    let chol = sxx.cholesky().ok_or(Error::DegenerateVariance)?;
    let b = chol.solve(&sxy);
    let sy = cov[(0, 0)].sqrt();
    Ok((0..m - 1).map(|j| b[j] * cov[(j + 1, j + 1)].sqrt() / sy).collect())
}

/// Derivative of [`std_slopes`] in the direction `e` (symmetric).
fn std_slopes_derivative(cov: &DMatrix<f64>, e: &DMatrix<f64>) -> Result<Vec<f64>> {
    let m = cov.nrows();
    let sxx = cov.view((1, 1), (m - 1, m - 1)).into_owned();
    let sxy = cov.view((1, 0), (m - 1, 1)).into_owned();
    let chol = sxx.cholesky().ok_or(Error::DegenerateVariance)?;
    let b = chol.solve(&sxy);
    let dxx = e.view((1, 1), (m - 1, m - 1)).into_owned();
    let dxy = e.view((1, 0), (m - 1, 1)).into_owned();
    let db = chol.solve(&(dxy - dxx * &b));
    let vy = cov[(0, 0)];
    let sy = vy.sqrt();
    let dvy = e[(0, 0)];
    Ok((0..m - 1)
        .map(|j| {
            let vj = cov[(j + 1, j + 1)];
            let sj = vj.sqrt();
            let dvj = e[(j + 1, j + 1)];
            db[j] * sj / sy + b[j] * dvj / (2.0 * sj * sy) - b[j] * sj * dvy / (2.0 * vy * sy)
        })
        .collect())
}

/// First principal component of z-scored cardiovascular death rate and life
/// expectancy, oriented so that higher scores mean worse baseline health.
pub fn health_pc(covariates: &[CountryCovariates]) -> Result<Vec<f64>> {
    let cardio: Vec<f64> = covariates.iter().map(|c| c.cardio_death_rate).collect();
    let life: Vec<f64> = covariates.iter().map(|c| c.life_expectancy).collect();
    first_pc_2(&cardio, &life)
}

/// PC1 scores of two z-scored variables; the loading on `a` is positive.
pub fn first_pc_2(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(Error::TooFewObservations("need two rows for a principal component".into()));
    }
    let z = |v: &[f64]| -> Result<Vec<f64>> {
        let (m, s) = (mean(v), sd(v));
        if !(s > 0.0) {
            return Err(Error::DegenerateVariance);
        }
        Ok(v.iter().map(|x| (x - m) / s).collect())
    };
    let (za, zb) = (z(a)?, z(b)?);
    // eigenvectors of [[1, r], [r, 1]] are (1, ±1)/√2; the larger eigenvalue
    // 1 + |r| belongs to (1, sign r)/√2
    let r: f64 = za.iter().zip(&zb).map(|(u, v)| u * v).sum::<f64>() / (a.len() as f64 - 1.0);
    let sign = if r < 0.0 { -1.0 } else { 1.0 };
    let w = std::f64::consts::FRAC_1_SQRT_2;
    Ok(za.iter().zip(&zb).map(|(u, v)| w * (u + sign * v)).collect())
}

/// Regressor order of the cross-country model.
pub const MAIN_REGRESSORS: [&str; 4] = ["vaccination_rate", "mask", "hdi", "health_pc"];

/// `age_adjusted_excess ~ vaccination_rate + <mask index> + hdi + health_pc`.
pub fn mask_regression(
    ds: &PanelDataset,
    indices: &MaskIndexTable,
    mask_index: &str,
    opts: &OlsOptions,
) -> Result<RegressionFit> {
    regression_for_outcome(ds, indices, "age_adjusted_excess", mask_index, opts)
}

pub fn covariate_column(covariates: &[CountryCovariates], name: &str) -> Option<Vec<f64>> {
    let f: fn(&CountryCovariates) -> f64 = match name {
        "vaccination_rate" => |c| c.vaccination_rate,
        "hdi" => |c| c.hdi,
        "cardio_death_rate" => |c| c.cardio_death_rate,
        "life_expectancy" => |c| c.life_expectancy,
        "age_adjusted_excess" => |c| c.age_adjusted_excess,
        _ => return None,
    };
    Some(covariates.iter().map(f).collect())
}

pub fn regression_for_outcome(
    ds: &PanelDataset,
    indices: &MaskIndexTable,
    outcome: &str,
    mask_index: &str,
    opts: &OlsOptions,
) -> Result<RegressionFit> {
    let cov = ds.covariates();
    let y = covariate_column(cov, outcome)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown outcome {outcome}")))?;
    let mask = indices
        .column(mask_index)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown mask index {mask_index}")))?;
    let design = Design::new()
        .with("vaccination_rate", covariate_column(cov, "vaccination_rate").unwrap())
        .with(mask_index, mask)
        .with("hdi", covariate_column(cov, "hdi").unwrap())
        .with("health_pc", health_pc(cov)?);
    ols_fit(&y, &design, opts)
}

/// (a) per wave: `maskpeakwave ~ maskbeginwave + wave mortality`;
/// (b) per country: `maskinwave ~ maskinterwave + total mortality`.
pub fn reverse_causality_regressions(
    records: &[WaveMaskRecord],
    indices: &MaskIndexTable,
    ds: &PanelDataset,
    opts: &OlsOptions,
) -> Result<(RegressionFit, RegressionFit)> {
    let recs = complete_records(records);
    let peak: Vec<f64> = recs.iter().map(|r| r.peak_avg.unwrap()).collect();
    let begin: Vec<f64> = recs.iter().map(|r| r.begin_avg.unwrap()).collect();
    let mort: Vec<f64> = recs.iter().map(|r| r.wave_deaths_pm_mean).collect();
    let a = ols_fit(
        &peak,
        &Design::new().with("maskbeginwave", begin).with("wave_mortality", mort),
        opts,
    )?;

    let inwave = indices.column("maskinwave").unwrap();
    let inter = indices.column("maskinterwave").unwrap();
    let total: Vec<f64> = (0..ds.n_countries()).map(|ci| ds.total_deaths(ci)).collect();
    let b = ols_fit(
        &inwave,
        &Design::new().with("maskinterwave", inter).with("total_mortality", total),
        opts,
    )?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::pearson;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Normal equations solved by Gauss–Jordan elimination with partial pivoting.
    #[allow(clippy::needless_range_loop)]
    fn normal_equations(y: &[f64], cols: &[Vec<f64>]) -> Vec<f64> {
        let n = y.len();
        let p = cols.len() + 1;
        let xcol = |j: usize, i: usize| if j == 0 { 1.0 } else { cols[j - 1][i] };
        let mut a = vec![vec![0.0; p + 1]; p];
        for r in 0..p {
            for c in 0..p {
                a[r][c] = (0..n).map(|i| xcol(r, i) * xcol(c, i)).sum();
            }
            a[r][p] = (0..n).map(|i| xcol(r, i) * y[i]).sum();
        }
        for c in 0..p {
            let piv = (c..p).max_by(|&u, &v| a[u][c].abs().total_cmp(&a[v][c].abs())).unwrap();
            a.swap(c, piv);
            for r in 0..p {
                if r != c {
                    let f = a[r][c] / a[c][c];
                    for k in c..=p {
                        a[r][k] -= f * a[c][k];
                    }
                }
            }
        }
        (0..p).map(|r| a[r][p] / a[r][r]).collect()
    }

    fn random_design(rng: &mut ChaCha8Rng, n: usize, k: usize) -> (Vec<f64>, Design) {
        let mut d = Design::new();
        for j in 0..k {
            d = d.with(&format!("x{j}"), (0..n).map(|_| rng.random_range(-5.0..5.0)).collect());
        }
        let y = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        (y, d)
    }

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 3.0).collect();
        let f = ols_fit(&y, &Design::new().with("x", x), &OlsOptions::default()).unwrap();
        let row = f.row("x").unwrap();
        assert!((row.coef - 2.0).abs() < 1e-12);
        assert!((row.std_coef.unwrap() - 1.0).abs() < 1e-12);
        assert!(row.p < 1e-12);
        let (lo, hi) = row.std_ci.unwrap();
        assert!(hi - lo < 1e-6);
        assert!((f.rows[0].coef - 3.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_columns_named() {
        let x: Vec<f64> = (0..10).map(|i| (i * i) as f64).collect();
        let z: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let y: Vec<f64> = (0..10).map(|i| (i as f64).sin()).collect();
        let err = ols_fit(&y, &Design::new().with("x", x).with("z", z), &OlsOptions::default()).unwrap_err();
        match err {
            Error::RankDeficient(cols) => assert_eq!(cols, vec!["z".to_string()]),
            e => panic!("{e}"),
        }
        let c = vec![5.0; 10];
        assert!(matches!(
            ols_fit(&y, &Design::new().with("c", c), &OlsOptions::default()),
            Err(Error::RankDeficient(_))
        ));
    }

    #[test]
    fn matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let k = rng.random_range(1..=3);
            let n = rng.random_range(k + 2..=10);
            let (y, d) = random_design(&mut rng, n, k);
            let fit = ols_fit(&y, &d, &OlsOptions::default()).unwrap();
            let oracle = normal_equations(&y, &d.columns);
            for (row, b) in fit.rows.iter().zip(&oracle) {
                assert!((row.coef - b).abs() < 1e-8, "{} vs {}", row.coef, b);
            }
            // residuals orthogonal to every column
            for c in &d.columns {
                let dot: f64 = c.iter().zip(&fit.residuals).map(|(a, b)| a * b).sum();
                assert!(dot.abs() < 1e-8);
            }
            assert!(fit.residuals.iter().sum::<f64>().abs() < 1e-8);
        }
    }

    #[test]
    fn sole_regressor_standardized_is_pearson() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (y, d) = random_design(&mut rng, 30, 1);
        let fit = ols_fit(&y, &d, &OlsOptions::default()).unwrap();
        let r = pearson(&d.columns[0], &y).unwrap();
        assert!((fit.rows[1].std_coef.unwrap() - r).abs() < 1e-12);
        // known normal-theory delta variance of a correlation: (1 − r²)² / n
        let se = fit.rows[1].std_se.unwrap();
        assert!((se - (1.0 - r * r) / (30f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn delta_jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (y, d) = random_design(&mut rng, 25, 3);
        let vars: Vec<&[f64]> = std::iter::once(y.as_slice()).chain(d.columns.iter().map(Vec::as_slice)).collect();
        let m = vars.len();
        let cov = DMatrix::from_fn(m, m, |a, b| {
            let (ma, mb) = (mean(vars[a]), mean(vars[b]));
            vars[a].iter().zip(vars[b]).map(|(u, v)| (u - ma) * (v - mb)).sum::<f64>() / 24.0
        });
        let h = 1e-6;
        for a in 0..m {
            for b in a..m {
                let mut e = DMatrix::zeros(m, m);
                e[(a, b)] = 1.0;
                e[(b, a)] = 1.0;
                let an = std_slopes_derivative(&cov, &e).unwrap();
                let up = std_slopes(&(&cov + &e * h)).unwrap();
                let dn = std_slopes(&(&cov - &e * h)).unwrap();
                for j in 0..m - 1 {
                    let fd = (up[j] - dn[j]) / (2.0 * h);
                    assert!((an[j] - fd).abs() < 1e-6, "entry ({a},{b}) slope {j}: {} vs {}", an[j], fd);
                }
            }
        }
    }

    #[test]
    fn exact_dependence_on_begin() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let begin: Vec<f64> = (0..72).map(|_| rng.random_range(10.0..80.0)).collect();
        let mort: Vec<f64> = (0..72).map(|_| rng.random_range(0.0..20.0)).collect();
        let fit = ols_fit(
            &begin.clone(),
            &Design::new().with("maskbeginwave", begin).with("wave_mortality", mort),
            &OlsOptions::default(),
        )
        .unwrap();
        assert!(fit.row("wave_mortality").unwrap().coef.abs() < 1e-10);
        assert!((fit.row("maskbeginwave").unwrap().coef - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pc_of_anticorrelated_pair() {
        let a = [1.0, 2.0, 3.0, 4.0, 6.0];
        let b: Vec<f64> = a.iter().map(|v| 10.0 - 2.0 * v).collect();
        let s = first_pc_2(&a, &b).unwrap();
        let z = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| (x - mean(v)) / sd(v)).collect() };
        let (za, zb) = (z(&a), z(&b));
        for i in 0..5 {
            assert!((s[i] - (za[i] - zb[i]) / 2f64.sqrt()).abs() < 1e-12);
        }
        assert!(first_pc_2(&a, &[1.0; 5]).is_err());
    }

    #[test]
    fn pc_matches_eigen_decomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let a: Vec<f64> = (0..24).map(|_| rng.random_range(100.0..400.0)).collect();
            let b: Vec<f64> = a.iter().map(|v| 90.0 - v / 30.0 + rng.random_range(-3.0..3.0)).collect();
            let s = first_pc_2(&a, &b).unwrap();
            let z = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| (x - mean(v)) / sd(v)).collect() };
            let (za, zb) = (z(&a), z(&b));
            let r = pearson(&a, &b).unwrap();
            let eig = nalgebra::SymmetricEigen::new(nalgebra::Matrix2::new(1.0, r, r, 1.0));
            let top = if eig.eigenvalues[0] > eig.eigenvalues[1] { 0 } else { 1 };
            let mut v = eig.eigenvectors.column(top).into_owned();
            if v[0] < 0.0 {
                v = -v;
            }
            for i in 0..24 {
                assert!((s[i] - (za[i] * v[0] + zb[i] * v[1])).abs() < 1e-10);
            }
        }
    }

    proptest! {
        #[test]
        fn regressor_and_outcome_rescaling_invariance(seed in any::<u64>(), c in 0.01f64..100.0, cy in 0.01f64..100.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (y, d) = random_design(&mut rng, 15, 3);
            let base = ols_fit(&y, &d, &OlsOptions::default()).unwrap();
            let mut d2 = d.clone();
            for v in d2.columns[1].iter_mut() { *v *= c; }
            let y2: Vec<f64> = y.iter().map(|v| v * cy).collect();
            let scaled = ols_fit(&y2, &d2, &OlsOptions::default()).unwrap();
            for (a, b) in base.rows.iter().zip(&scaled.rows).skip(1) {
                prop_assert!((a.std_coef.unwrap() - b.std_coef.unwrap()).abs() < 1e-10);
                prop_assert!((a.p - b.p).abs() < 1e-10);
                prop_assert!(a.std_coef.unwrap().signum() == a.coef.signum());
            }
        }
    }
}
