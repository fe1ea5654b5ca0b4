//! Singular values, Schatten norms, closed-form monomial spectra and
//! kernel-probe integral functionals.

mod berezin;

pub use berezin::{berezin_functional, frame_lower_bound_check, BerezinResult, FrameReport, Probe};

use crate::error::{invalid, numerical, Result};
use crate::operators::{Entries, OperatorMatrix, OperatorSpec, TailModel};
use crate::special::KahanSum;
use nalgebra::DMatrix;
use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchattenOrder {
    p: f64,
}

impl SchattenOrder {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return invalid("p", format!("Schatten exponent must be positive and finite, got {p}"));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// p ≥ 1: normed ideal; p < 1: quasi-norm.
    pub fn is_banach(&self) -> bool {
        self.p >= 1.0
    }
}

/// Nonincreasing singular values of a truncated operator plus tail information.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub tail: TailModel,
    pub source: Option<OperatorSpec>,
    /// Cached (p, Σλ^p) pairs.
    pub schatten_sums: Vec<(f64, f64)>,
}

/// Norm with its enclosure [value, upper] and a best estimate of the untruncated norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchattenNorm {
    pub p: f64,
    pub value: f64,
    pub upper: f64,
    pub estimate: f64,
    pub rigorous: bool,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>, tail: TailModel, source: Option<OperatorSpec>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return numerical("singular values must be finite and nonnegative");
        }
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(Self {
            values,
            tail,
            source,
            schatten_sums: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values above a relative cutoff (the positive part of the spectrum).
    pub fn positive(&self) -> &[f64] {
        let top = self.values.first().copied().unwrap_or(0.0);
        let cut = top * 1e-300_f64.max(f64::MIN_POSITIVE);
        let k = self.values.iter().take_while(|v| **v > cut && **v > 0.0).count();
        &self.values[..k]
    }

    /// Σ λ_n^p over the stored values, accumulated in nonincreasing order.
    pub fn partial_sum(&self, p: f64) -> f64 {
        let mut k = KahanSum::new();
        for v in self.positive() {
            k.add(v.powf(p));
        }
        k.value()
    }

    /// Partial sums Σ_{n<m} λ_n^p for m = 1..=len.
    pub fn cumulative_sums(&self, p: f64) -> Vec<f64> {
        let mut k = KahanSum::new();
        self.values
            .iter()
            .map(|v| {
                if *v > 0.0 {
                    k.add(v.powf(p));
                }
                k.value()
            })
            .collect()
    }

    pub fn with_sums(mut self, ps: &[f64]) -> Self {
        for &p in ps {
            let s = self.partial_sum(p);
            self.schatten_sums.push((p, s));
        }
        self
    }

    /// CSV with header `n,lambda_n` (1-based index).
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n,lambda_n")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{},{:?}", i + 1, v)?;
        }
        Ok(())
    }

    /// JSON object {p: {norm, upper, tail, estimate, rigorous}}.
    pub fn summary_json(&self, ps: &[f64]) -> Result<serde_json::Value> {
        let mut map = serde_json::Map::new();
        for &p in ps {
            let n = schatten_norm(self, SchattenOrder::new(p)?);
            map.insert(
                format!("{p}"),
                serde_json::json!({
                    "norm": n.value,
                    "upper": finite_or_null(n.upper),
                    "tail": finite_or_null(n.upper.powf(p) - n.value.powf(p)),
                    "estimate": finite_or_null(n.estimate),
                    "rigorous": n.rigorous,
                }),
            );
        }
        Ok(serde_json::Value::Object(map))
    }
}

fn finite_or_null(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::Value::Null
    }
}

/// Singular values of the stored block. A single-diagonal matrix is read off
/// directly; everything else goes through a dense SVD (real when possible).
pub fn singular_values(m: &OperatorMatrix) -> Result<Spectrum> {
    if !m.entries.all_finite() {
        return numerical("matrix has non-finite entries");
    }
    if let Some((_, d)) = m.entries.single_diagonal() {
        let vals = d.iter().map(|v| v.norm()).collect();
        return Spectrum::new(vals, m.tail.clone(), Some(m.spec.clone()));
    }
    singular_values_dense(m)
}

/// Dense SVD regardless of structure.
pub fn singular_values_dense(m: &OperatorMatrix) -> Result<Spectrum> {
    if !m.entries.all_finite() {
        return numerical("matrix has non-finite entries");
    }
    let vals = dense_singular_values(&m.entries);
    Spectrum::new(vals, m.tail.clone(), Some(m.spec.clone()))
}

pub(crate) fn dense_singular_values(e: &Entries) -> Vec<f64> {
    let dim = e.dim();
    if e.is_real() {
        let mut r = DMatrix::<f64>::zeros(dim, dim);
        for (i, j, v) in e.triplets() {
            r[(i, j)] = v.re;
        }
        r.svd(false, false).singular_values.iter().copied().collect()
    } else {
        e.to_dense().svd(false, false).singular_values.iter().copied().collect()
    }
}

/// λ_n = j(n+1)^{(1−α)/2}/(n(n−j+1)^{(1−α)/2}) for n = j..=N: the singular
/// values of T_{z^j} on D_α with the coefficient norm.
pub fn monomial_spectrum_closed_form(j: usize, alpha: f64, n: usize) -> Result<Spectrum> {
    if j == 0 {
        return invalid("j", "monomial degree must be at least 1");
    }
    if !(alpha >= 0.0) {
        return invalid("alpha", format!("alpha must be >= 0, got {alpha}"));
    }
    let e = 0.5 * (1.0 - alpha);
    let vals = (j..=n)
        .map(|k| monomial_singular_value(j, e, k))
        .collect();
    Spectrum::new(vals, TailModel::ClosedForm { j, alpha, n }, None)
}

fn monomial_singular_value(j: usize, e: f64, n: usize) -> f64 {
    let nf = n as f64;
    let ratio = (nf + 1.0) / (nf - j as f64 + 1.0);
    j as f64 / nf * ratio.powf(e)
}

/// Upper bound on Σ_{n>N} λ_n^p for the monomial closed form; `None` when the tail diverges (p ≤ 1).
pub fn monomial_tail_bound(j: usize, alpha: f64, n: usize, p: f64) -> Option<f64> {
    if p <= 1.0 {
        return None;
    }
    let m = (n + 1).max(j) as f64;
    let e = 0.5 * (1.0 - alpha);
    let rho = if e > 0.0 {
        ((m + 1.0) / (m - j as f64 + 1.0)).powf(e)
    } else {
        1.0
    };
    let c = j as f64 * rho;
    Some(c.powf(p) * (m.powf(-p) + m.powf(1.0 - p) / (p - 1.0)))
}

/// Midpoint-integral estimate of Σ_{n>N} λ_n^p (not a bound).
pub fn monomial_tail_estimate(j: usize, alpha: f64, n: usize, p: f64) -> Option<f64> {
    if p <= 1.0 {
        return None;
    }
    let m = (n + 1).max(j);
    let e = 0.5 * (1.0 - alpha);
    // exact terms for a stretch, then the integral of the leading j/x behaviour
    // corrected by the local ratio factor
    let stretch = 4 * j + 64;
    let mut k = KahanSum::new();
    for t in m..m + stretch {
        k.add(monomial_singular_value(j, e, t).powf(p));
    }
    let x0 = (m + stretch) as f64 - 0.5;
    let factor = monomial_singular_value(j, e, m + stretch) * (m + stretch) as f64 / j as f64;
    k.add((j as f64 * factor).powf(p) * x0.powf(1.0 - p) / (p - 1.0));
    Some(k.value())
}

/// Singular values of M_{z^j}: D → A²_2, λ_k = √6/√((k+j+1)(k+j+2)(k+j+3)(k+1)) for k = 0..=N−j.
pub fn multiplier_monomial_closed_form(j: usize, n: usize) -> Result<Spectrum> {
    if n < j {
        return invalid("N", format!("truncation {n} below the monomial degree {j}"));
    }
    let vals = (0..=n - j)
        .map(|k| {
            let a = (k + j) as f64;
            (6.0 / ((a + 1.0) * (a + 2.0) * (a + 3.0) * (k as f64 + 1.0))).sqrt()
        })
        .collect();
    Spectrum::new(
        vals,
        TailModel::Singular {
            start: n - j + 1,
            c: 6f64.sqrt(),
            d: 2.0,
        },
        None,
    )
}

/// (Σλ^p)^{1/p} with the enclosure from the tail model.
pub fn schatten_norm(s: &Spectrum, p: SchattenOrder) -> SchattenNorm {
    let p = p.p();
    let partial = s.partial_sum(p);
    let constant = s.source.as_ref().and_then(|o| o.symbol()).map(|g| g.is_constant()).unwrap_or(false);
    let tail = if constant || partial == 0.0 && matches!(s.tail, TailModel::Exact) {
        0.0
    } else {
        s.tail.sum_tail(p, partial)
    };
    let extra = match &s.tail {
        TailModel::ClosedForm { j, alpha, n } => monomial_tail_estimate(*j, *alpha, *n, p).unwrap_or(f64::INFINITY),
        _ => 0.0,
    };
    SchattenNorm {
        p,
        value: partial.powf(1.0 / p),
        upper: (partial + tail).powf(1.0 / p),
        estimate: (partial + extra).powf(1.0 / p),
        rigorous: s.tail.is_rigorous(),
    }
}

/// Convenience: Schatten norm straight from a matrix.
pub fn matrix_schatten_norm(m: &OperatorMatrix, p: f64) -> Result<SchattenNorm> {
    let order = SchattenOrder::new(p)?;
    Ok(schatten_norm(&singular_values(m)?, order))
}
