//! Power-law and log-power growth fits, and the (α, p) regime table.

use crate::error::{invalid, Result};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::fmt::Write as _;

/// Growth model for `fit_power_log`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    /// y ≈ C x^e L(x)^m with L chosen by `log`.
    Power { log: LogArg },
    /// y ≈ C (1−x)^{−e} (log(e/(1−x)))^m, 0 ≤ x < 1.
    Boundary,
}

/// Argument of the log factor in `Model::Power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LogArg {
    /// log x
    X,
    /// log(x + 1)
    XPlusOne,
    /// log(e·x) = 1 + log x
    EX,
}

impl LogArg {
    fn eval(self, x: f64) -> f64 {
        match self {
            LogArg::X => x.ln(),
            LogArg::XPlusOne => x.ln_1p(),
            LogArg::EX => 1.0 + x.ln(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FitMode {
    /// Exponent and log-power together.
    Joint,
    /// Exponent only (m = 0).
    PowerOnly,
    /// Exponent held fixed; only C and m are fitted.
    ForcedExponent { exponent: f64 },
    /// Exponent from the largest decade (m = 0), then m from the residuals on all samples.
    TwoStage,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthFit {
    pub model: Model,
    pub mode: FitMode,
    pub exponent: f64,
    pub log_power: f64,
    pub constant: f64,
    pub r2: f64,
    /// min and max of y / fitted model.
    pub window: (f64, f64),
    /// min and max of the sweep parameter.
    pub range: (f64, f64),
    pub samples: usize,
}

impl GrowthFit {
    pub fn predict(&self, x: f64) -> f64 {
        let (u, v) = regressors(self.model, x);
        self.constant * (self.exponent * u + self.log_power * v).exp()
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "exponent": self.exponent,
            "log_power": self.log_power,
            "r2": self.r2,
            "window": [self.window.0, self.window.1],
            "range": [self.range.0, self.range.1],
        })
        .to_string()
    }
}

/// (power regressor, log regressor) for one sample.
fn regressors(model: Model, x: f64) -> (f64, f64) {
    match model {
        Model::Power { log } => (x.ln(), log.eval(x).ln()),
        Model::Boundary => {
            let l = -(-x).ln_1p();
            (l, (1.0 + l).ln())
        }
    }
}

fn lstsq(cols: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let n = y.len();
    let a = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
    let b = DVector::from_column_slice(y);
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= 1e-12 * smax {
        return invalid("samples", "degenerate regressors (span too small or collinear)");
    }
    let sol = svd.solve(&b, 1e-14 * smax).map_err(|e| crate::error::LabError::Numerical(e.to_string()))?;
    Ok(sol.iter().copied().collect())
}

/// Least-squares fit of ln y on the model regressors.
/// Needs ≥ 6 positive samples spanning ≥ 2 decades of the growth scale.
pub fn fit_power_log(samples: &[(f64, f64)], model: Model, mode: FitMode) -> Result<GrowthFit> {
    if samples.len() < 6 {
        return invalid("samples", format!("need at least 6 samples, got {}", samples.len()));
    }
    for &(x, y) in samples {
        if !(y > 0.0) || !y.is_finite() {
            return invalid("samples", format!("sample values must be positive and finite, got {y} at x={x}"));
        }
        let ok = match model {
            Model::Power { log } => x > 0.0 && log.eval(x) > 0.0,
            Model::Boundary => (0.0..1.0).contains(&x),
        };
        if !ok || !x.is_finite() {
            return invalid("samples", format!("sample abscissa {x} outside the model domain"));
        }
    }
    let reg: Vec<(f64, f64)> = samples.iter().map(|s| regressors(model, s.0)).collect();
    let ly: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let (umin, umax) = reg.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, r| (a.0.min(r.0), a.1.max(r.0)));
    if umax - umin < 2.0 * std::f64::consts::LN_10 * (1.0 - 1e-9) {
        return invalid("samples", "the sweep must span at least 2 decades");
    }
    let ones = vec![1.0; samples.len()];
    let us: Vec<f64> = reg.iter().map(|r| r.0).collect();
    let vs: Vec<f64> = reg.iter().map(|r| r.1).collect();
    let (c, e, m) = match mode {
        FitMode::Joint => {
            let s = lstsq(&[ones, us.clone(), vs.clone()], &ly)?;
            (s[0], s[1], s[2])
        }
        FitMode::PowerOnly => {
            let s = lstsq(&[ones, us.clone()], &ly)?;
            (s[0], s[1], 0.0)
        }
        FitMode::ForcedExponent { exponent } => {
            let r: Vec<f64> = ly.iter().zip(&us).map(|(l, u)| l - exponent * u).collect();
            let s = lstsq(&[ones, vs.clone()], &r)?;
            (s[0], exponent, s[1])
        }
        FitMode::TwoStage => {
            let top: Vec<usize> = (0..us.len()).filter(|&i| us[i] >= umax - std::f64::consts::LN_10 * (1.0 + 1e-9)).collect();
            if top.len() < 2 {
                return invalid("samples", "two-stage fits need at least 2 samples in the largest decade");
            }
            let tu: Vec<f64> = top.iter().map(|&i| us[i]).collect();
            let tl: Vec<f64> = top.iter().map(|&i| ly[i]).collect();
            let s1 = lstsq(&[vec![1.0; top.len()], tu], &tl)?;
            let e = s1[1];
            let r: Vec<f64> = ly.iter().zip(&us).map(|(l, u)| l - e * u).collect();
            let s = lstsq(&[ones, vs.clone()], &r)?;
            (s[0], e, s[1])
        }
    };
    let mean = ly.iter().sum::<f64>() / ly.len() as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..ly.len() {
        let res = ly[i] - (c + e * us[i] + m * vs[i]);
        ss_res += res * res;
        ss_tot += (ly[i] - mean).powi(2);
        lo = lo.min(res);
        hi = hi.max(res);
    }
    let r2 = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    let (xmin, xmax) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, s| (a.0.min(s.0), a.1.max(s.0)));
    Ok(GrowthFit {
        model,
        mode,
        exponent: e,
        log_power: m,
        constant: c.exp(),
        r2,
        window: (lo.exp(), hi.exp()),
        range: (xmin, xmax),
        samples: samples.len(),
    })
}

/// max/min of y_i / z_i.
pub fn ratio_window(y: &[f64], z: &[f64]) -> f64 {
    let r: Vec<f64> = y.iter().zip(z).map(|(a, b)| a / b).collect();
    let hi = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

/// Which description of S_p(D_α) membership applies at (α, p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Characterization {
    ConstantsOnly,
    /// 0 < α < 1, p > 1, p(1−α) < 2: T_g ∈ S_p iff g ∈ B_p (= X^p_α).
    Besov,
    /// 0 < α < 1, p > 1, 2 ≤ p(1−α) < 4: T_g ∈ S_p iff g ∈ X^p_α.
    Xpa,
    /// α = 0, p = 2: Hilbert–Schmidt iff g ∈ DL.
    DirichletHs,
    /// α = 0, p > 1, p ≠ 2: separate necessary and sufficient conditions.
    DirichletPartial,
    /// 0 < α < 1, p(1−α) ≥ 4: no characterization.
    Open,
    /// α ≥ 1: outside the range treated here.
    Outside,
}

/// Growth law of ‖g_j‖ for g = z^j.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonomialRegime {
    /// j^{1/p}, p(1−α) < 2.
    Power,
    /// (j log(j+1))^{1/p}, p(1−α) = 2.
    Critical,
    /// j^{(1−α)/2}, p(1−α) > 2.
    Saturated,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub alpha: f64,
    pub p: f64,
    pub product: f64,
    pub characterization: Characterization,
    pub monomial: MonomialRegime,
    pub predicted_exponent: f64,
    pub predicted_log_power: f64,
    pub exploratory: bool,
    pub label: &'static str,
}

pub const CRITICAL_TOL: f64 = 1e-9;

pub fn regime_report(alpha: f64, p: f64) -> RegimeReport {
    let product = p * (1.0 - alpha);
    let characterization = if alpha >= 1.0 {
        Characterization::Outside
    } else if p <= 1.0 {
        Characterization::ConstantsOnly
    } else if alpha == 0.0 {
        if (p - 2.0).abs() <= CRITICAL_TOL {
            Characterization::DirichletHs
        } else {
            Characterization::DirichletPartial
        }
    } else if product < 2.0 {
        Characterization::Besov
    } else if product < 4.0 {
        Characterization::Xpa
    } else {
        Characterization::Open
    };
    let (monomial, e, m) = if (product - 2.0).abs() <= CRITICAL_TOL {
        (MonomialRegime::Critical, 1.0 / p, 1.0 / p)
    } else if product < 2.0 {
        (MonomialRegime::Power, 1.0 / p, 0.0)
    } else {
        (MonomialRegime::Saturated, 0.5 * (1.0 - alpha), 0.0)
    };
    let label = match characterization {
        Characterization::ConstantsOnly => "constants only",
        Characterization::Besov => "X^p_α = B_p regime",
        Characterization::Xpa => "X^p_α regime",
        Characterization::DirichletHs => "DL (Hilbert-Schmidt) regime",
        Characterization::DirichletPartial => "Dirichlet space: partial conditions",
        Characterization::Open => "open region",
        Characterization::Outside => "outside treated range",
    };
    RegimeReport {
        alpha,
        p,
        product,
        characterization,
        monomial,
        predicted_exponent: e,
        predicted_log_power: m,
        exploratory: matches!(characterization, Characterization::Open | Characterization::Outside),
        label,
    }
}

/// Fixed-width summary of several fits.
pub fn summary_table(rows: &[(String, GrowthFit)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<28} {:>9} {:>9} {:>8} {:>9} {:>9}", "series", "exponent", "log_pow", "r2", "win_lo", "win_hi");
    for (name, f) in rows {
        let _ = writeln!(
            s,
            "{:<28} {:>9.4} {:>9.4} {:>8.5} {:>9.4} {:>9.4}",
            name, f.exponent, f.log_power, f.r2, f.window.0, f.window.1
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn js() -> Vec<f64> {
        (2..=12).map(|k| 2f64.powi(k)).collect()
    }

    #[test]
    fn synthetic_power() {
        let s: Vec<_> = js().into_iter().map(|j| (j, j.sqrt())).collect();
        for mode in [FitMode::Joint, FitMode::PowerOnly, FitMode::TwoStage] {
            let f = fit_power_log(&s, Model::Power { log: LogArg::X }, mode).unwrap();
            assert!((f.exponent - 0.5).abs() < 0.01, "{mode:?} {f:?}");
            assert!(f.log_power.abs() < 0.1);
            assert!(f.window.0 <= 1.0 + 1e-12 && f.window.1 >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn synthetic_power_log() {
        let s: Vec<_> = js().into_iter().map(|j| (j, (j * (j + 1.0).ln()).sqrt())).collect();
        let f = fit_power_log(&s, Model::Power { log: LogArg::X }, FitMode::ForcedExponent { exponent: 0.5 }).unwrap();
        assert!((f.log_power - 0.5).abs() < 0.1, "{f:?}");
        let model = Model::Power { log: LogArg::XPlusOne };
        let f = fit_power_log(&s, model, FitMode::Joint).unwrap();
        assert!((f.exponent - 0.5).abs() < 0.01 && (f.log_power - 0.5).abs() < 0.1, "{f:?}");
        assert!(f.r2 > 0.999);
    }

    #[test]
    fn synthetic_boundary() {
        let s: Vec<_> = (3..=14)
            .map(|k| {
                let d = 2f64.powi(-k);
                (1.0 - d, 3.0 * d.powf(-1.5) * (1.0 - d.ln()).powf(0.25))
            })
            .collect();
        let f = fit_power_log(&s, Model::Boundary, FitMode::Joint).unwrap();
        assert!((f.exponent - 1.5).abs() < 1e-8 && (f.log_power - 0.25).abs() < 1e-8, "{f:?}");
        assert!((f.predict(0.5) - 3.0 * 2f64.powf(1.5) * (1.0 + 2f64.ln()).powf(0.25)).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_samples() {
        let s: Vec<_> = (1..=5).map(|k| (k as f64 * 10.0, 1.0)).collect();
        assert!(fit_power_log(&s, Model::Power { log: LogArg::X }, FitMode::Joint).is_err());
        let narrow: Vec<_> = (0..8).map(|k| (10.0 + k as f64, 1.0)).collect();
        assert!(fit_power_log(&narrow, Model::Power { log: LogArg::X }, FitMode::PowerOnly).is_err());
        let mut neg: Vec<_> = js().into_iter().map(|j| (j, j)).collect();
        neg[3].1 = -1.0;
        assert!(fit_power_log(&neg, Model::Power { log: LogArg::X }, FitMode::PowerOnly).is_err());
    }

    #[test]
    fn regime_examples() {
        let r = regime_report(0.5, 2.0);
        assert_eq!(r.characterization, Characterization::Besov);
        assert_eq!(r.monomial, MonomialRegime::Power);
        assert_eq!(regime_report(0.0, 1.0).characterization, Characterization::ConstantsOnly);
        let o = regime_report(0.1, 5.0);
        assert_eq!(o.characterization, Characterization::Open);
        assert!(o.exploratory);
        let c = regime_report(0.5, 4.0);
        assert_eq!(c.monomial, MonomialRegime::Critical);
        assert_eq!(c.characterization, Characterization::Xpa);
        assert_eq!(regime_report(0.25, 6.0).predicted_exponent, 0.375);
    }
}
