//! Numerical checks of the two kernel-integral estimates used as building blocks:
//! I_{c,t}(z) against its comparison function, and the two-point estimate.

use super::quadrature::{GridSpec, Node, QuadratureGrid};
use crate::error::{invalid, numerical, Result};
use crate::spaces::check_in_disk;
use crate::special::{beta, KahanSum};
use num_complex::Complex64;
use serde::Serialize;

/// I_{c,t}(z) = Σ_n (((2+t+c)/2)_n/n!)² |z|^{2n} B(n+1, t+1), the radial series for
/// ∫(1−|w|²)^t |1−w̄z|^{−(2+t+c)} dA(w).
pub fn ict_series(c: f64, t: f64, r: f64) -> Result<f64> {
    if !(t > -1.0) {
        return invalid("t", format!("need t > -1, got {t}"));
    }
    if !(0.0..1.0).contains(&r) {
        return invalid("z", format!("need |z| < 1, got {r}"));
    }
    let s = 0.5 * (2.0 + t + c);
    let x = r * r;
    // term_n = coef_n² x^n B(n+1, t+1), ratio (s+n)²/(n+1)² · x · (n+1)/(n+t+2)
    let mut term = beta(1.0, t + 1.0);
    let mut k = KahanSum::new();
    k.add(term);
    let mut n = 0usize;
    loop {
        let nf = n as f64;
        term *= (s + nf) * (s + nf) / ((nf + 1.0) * (nf + 1.0)) * x * (nf + 1.0) / (nf + t + 2.0);
        k.add(term);
        n += 1;
        if term < 1e-17 * k.value() && (s + nf) * x < nf + 1.0 {
            break;
        }
        if n > 50_000_000 {
            return numerical("I_{c,t} series did not converge");
        }
    }
    Ok(k.value())
}

fn ict_comparison(c: f64, r: f64) -> f64 {
    let om = 1.0 - r * r;
    if c == 0.0 {
        (std::f64::consts::E / om).ln()
    } else {
        om.powf(-c)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IctRow {
    pub r: f64,
    pub value: f64,
    pub error: f64,
    pub series: f64,
    pub comparison: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IctReport {
    pub c: f64,
    pub t: f64,
    pub rows: Vec<IctRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Largest relative difference between quadrature and series.
    pub max_series_rel: f64,
}

/// Quadrature of I_{c,t}(z) at real z = r, compared with (1−|z|²)^{−c} (c > 0) or
/// log(e/(1−|z|²)) (c = 0).
pub fn validate_ict(c: f64, t: f64, radii: &[f64]) -> Result<IctReport> {
    if !(t > -1.0) {
        return invalid("t", format!("need t > -1, got {t}"));
    }
    if !(c >= 0.0) {
        return invalid("c", format!("need c >= 0, got {c}"));
    }
    let mut rows = Vec::new();
    for &r in radii {
        if !(0.0..1.0).contains(&r) {
            return invalid("z", format!("need 0 <= |z| < 1, got {r}"));
        }
        let z = Complex64::new(r, 0.0);
        // the annulus beyond the clip contributes ~ (δ_c/(1−r))^{t+1} relative
        let clip = ((1.0 - r).min(1e-3) * 10f64.powf(-16.0 / (t + 1.0))).max(1e-300);
        let grid = GridSpec::focused(clip, vec![0.0], 1.0 - r);
        let e = 2.0 + t + c;
        let f = |nd: &Node| nd.omega.powf(t) * nd.one_minus_conj_times(z).norm().powf(-e);
        let base = QuadratureGrid::new(&grid)?.integrate(&f);
        let value = QuadratureGrid::new(&grid.refined())?.integrate(&f);
        let series = ict_series(c, t, r)?;
        let comparison = ict_comparison(c, r);
        rows.push(IctRow {
            r,
            value,
            error: (value - base).abs(),
            series,
            comparison,
            ratio: value / comparison,
        });
    }
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let max_series_rel = rows.iter().map(|r| (r.value - r.series).abs() / r.series).fold(0.0, f64::max);
    Ok(IctReport {
        c,
        t,
        rows,
        min_ratio,
        max_ratio,
        max_series_rel,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Li2Row {
    pub a: Complex64,
    pub z: Complex64,
    pub lhs: f64,
    pub error: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Li2Report {
    pub s: f64,
    pub r: f64,
    pub t: f64,
    pub rows: Vec<Li2Row>,
    pub max_ratio: f64,
}

/// ∫(1−|w|²)^s |1−w̄z|^{−r} |1−w̄a|^{−t} dA(w) versus (1−|z|²)^{2+s−r}|1−āz|^{−t}.
/// Requires s > −1, r, t > 0, r + t − s > 2 and t < s + 2 < r.
pub fn validate_li2(s: f64, r: f64, t: f64, pairs: &[(Complex64, Complex64)]) -> Result<Li2Report> {
    if !(s > -1.0 && r > 0.0 && t > 0.0 && r + t - s > 2.0 && t < s + 2.0 && s + 2.0 < r) {
        return invalid(
            "parameters",
            format!("need s > -1, r,t > 0, r+t-s > 2 and t < s+2 < r; got s={s}, r={r}, t={t}"),
        );
    }
    let mut rows = Vec::new();
    for &(a, z) in pairs {
        check_in_disk("a", a)?;
        check_in_disk("z", z)?;
        let scale = (1.0 - a.norm()).min(1.0 - z.norm());
        let clip = (scale.min(1e-3) * 10f64.powf(-16.0 / (s + 1.0))).max(1e-300);
        let grid = GridSpec::focused(clip, vec![a.arg(), z.arg()], scale);
        let f = |nd: &Node| {
            nd.omega.powf(s) * nd.one_minus_conj_times(z).norm().powf(-r) * nd.one_minus_conj_times(a).norm().powf(-t)
        };
        let base = QuadratureGrid::new(&grid)?.integrate(&f);
        let lhs = QuadratureGrid::new(&grid.refined())?.integrate(&f);
        let rhs = (1.0 - z.norm_sqr()).powf(2.0 + s - r) * (Complex64::new(1.0, 0.0) - a.conj() * z).norm().powf(-t);
        rows.push(Li2Row {
            a,
            z,
            lhs,
            error: (lhs - base).abs(),
            rhs,
            ratio: lhs / rhs,
        });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(Li2Report { s, r, t, rows, max_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ict_at_zero_is_beta() {
        let v = ict_series(1.0, 0.5, 0.0).unwrap();
        assert!((v - 1.0 / 1.5).abs() < 1e-15);
    }

    #[test]
    fn ict_quadrature_matches_series() {
        for &(c, t) in &[(1.0, 0.0), (0.0, 1.0), (0.5, -0.5), (2.0, 3.0)] {
            let rep = validate_ict(c, t, &[0.0, 0.5, 0.9, 0.99]).unwrap();
            assert!(rep.max_series_rel < 1e-9, "c={c} t={t}: {rep:?}");
            assert!(rep.min_ratio > 0.0 && rep.max_ratio.is_finite());
        }
    }

    #[test]
    fn li2_bounded_ratio() {
        let pairs: Vec<_> = [(0.5, 0.9), (0.99, 0.9), (0.9, -0.9)]
            .iter()
            .map(|&(a, z)| (Complex64::new(a, 0.0), Complex64::from_polar(z, 0.3)))
            .collect();
        let rep = validate_li2(0.0, 3.0, 1.0, &pairs).unwrap();
        assert!(rep.max_ratio < 50.0, "{rep:?}");
        assert!(validate_li2(0.0, 1.0, 1.0, &pairs).is_err());
    }
}
