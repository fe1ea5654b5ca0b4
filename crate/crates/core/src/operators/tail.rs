use super::OperatorMatrix;
use crate::special::compensated_sum;

/// Bound on the norms r_k of dropped columns beyond the explicit range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FarDecay {
    /// r_k ≤ c/(k+1)^d for k > k0.
    Power { k0: usize, c: f64, d: f64 },
    /// r_k ≤ c q^{k−k0} for k > k0.
    Geometric { k0: usize, c: f64, q: f64 },
}

impl FarDecay {
    /// Upper bound on Σ_{k>k0} r_k^e.
    pub fn sum_pow(&self, e: f64) -> f64 {
        match *self {
            FarDecay::Power { k0, c, d } => {
                if c == 0.0 {
                    return 0.0;
                }
                let de = d * e;
                if de <= 1.0 {
                    f64::INFINITY
                } else {
                    c.powf(e) * ((k0 + 1) as f64).powf(1.0 - de) / (de - 1.0)
                }
            }
            FarDecay::Geometric { c, q, .. } => {
                if c == 0.0 {
                    return 0.0;
                }
                let qe = q.powf(e);
                c.powf(e) * qe / (1.0 - qe)
            }
        }
    }
}

/// What is known about the part of the operator outside the kept block.
#[derive(Debug, Clone, PartialEq)]
pub enum TailModel {
    /// Nothing was dropped.
    Exact,
    /// Column norms of the dropped part R = T − T_N.
    ///
    /// With `gram` set the spectrum is that of I*I and the columns belong to I.
    Columns {
        dropped: Vec<f64>,
        far: Option<FarDecay>,
        rigorous: bool,
        gram: bool,
    },
    /// Closed-form monomial spectrum cut at index `n`.
    ClosedForm { j: usize, alpha: f64, n: usize },
    /// Dropped singular values obey λ_k ≤ c/(k+1)^d for k ≥ start.
    Singular { start: usize, c: f64, d: f64 },
    /// No decay information.
    Unknown,
}

/// Certificate for the Schatten p-sum of a truncated operator.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationReport {
    pub p: f64,
    /// Upper bound on Σ λ_n(T)^p − Σ λ_n(T_N)^p.
    pub certificate: f64,
    /// True when every ingredient of the bound is proven rather than estimated.
    pub rigorous: bool,
    /// Bound on ‖R‖_F².
    pub frobenius_tail: f64,
}

impl TailModel {
    pub fn is_rigorous(&self) -> bool {
        match self {
            TailModel::Exact | TailModel::ClosedForm { .. } | TailModel::Singular { .. } => true,
            TailModel::Columns { rigorous, .. } => *rigorous,
            TailModel::Unknown => false,
        }
    }

    /// Bound on ‖R‖_F² (for Gram models, of the dropped columns of I).
    pub fn frobenius_tail(&self) -> f64 {
        match self {
            TailModel::Exact => 0.0,
            TailModel::Columns { dropped, far, .. } => dropped_pow(dropped, far, 2.0),
            TailModel::ClosedForm { j, alpha, n } => {
                crate::spectra::monomial_tail_bound(*j, *alpha, *n, 2.0).unwrap_or(f64::INFINITY)
            }
            TailModel::Singular { start, c, d } => singular_tail(*start, *c, *d, 2.0),
            TailModel::Unknown => f64::INFINITY,
        }
    }

    /// Upper bound on the missing p-sum given the truncated p-sum `partial`.
    pub fn sum_tail(&self, p: f64, partial: f64) -> f64 {
        match self {
            TailModel::Exact => 0.0,
            TailModel::Unknown => f64::INFINITY,
            TailModel::ClosedForm { j, alpha, n } => {
                crate::spectra::monomial_tail_bound(*j, *alpha, *n, p).unwrap_or(f64::INFINITY)
            }
            TailModel::Singular { start, c, d } => singular_tail(*start, *c, *d, p),
            TailModel::Columns { dropped, far, gram, .. } => {
                let q = if *gram { 2.0 * p } else { p };
                columns_tail(dropped, far, q, partial)
            }
        }
    }
}

/// Σ_{k≥start} (c/(k+1)^d)^p ≤ c^p (K^{−dp} + K^{1−dp}/(dp−1)), K = start+1.
fn singular_tail(start: usize, c: f64, d: f64, p: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let e = d * p;
    if e <= 1.0 {
        return f64::INFINITY;
    }
    let k = (start + 1) as f64;
    c.powf(p) * (k.powf(-e) + k.powf(1.0 - e) / (e - 1.0))
}

fn dropped_pow(dropped: &[f64], far: &Option<FarDecay>, e: f64) -> f64 {
    let mut v: Vec<f64> = dropped.iter().map(|r| r.powf(e)).collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    compensated_sum(v) + far.map(|f| f.sum_pow(e)).unwrap_or(0.0)
}

/// Σλ^q(T) − Σλ^q(T_N) bound from dropped column norms.
fn columns_tail(dropped: &[f64], far: &Option<FarDecay>, q: f64, partial: f64) -> f64 {
    if q == 2.0 {
        return dropped_pow(dropped, far, 2.0);
    }
    let rho = if q < 2.0 {
        dropped_pow(dropped, far, q)
    } else {
        dropped_pow(dropped, far, 2.0).powf(q / 2.0)
    };
    if q <= 1.0 || rho == 0.0 || !rho.is_finite() {
        return rho;
    }
    let r = rho.powf(1.0 / q);
    let s = partial.max(0.0).powf(1.0 / q);
    (s + r).powf(q) - partial.max(0.0)
}

/// Certificate for the Schatten p-sum of `m`, without computing its spectrum.
pub fn truncation_report(m: &OperatorMatrix, p: f64) -> TruncationReport {
    let gram = matches!(m.tail, TailModel::Columns { gram: true, .. });
    let q = if gram { 2.0 * p } else { p };
    // Upper bound on the truncated q-sum from the stored block.
    let partial = if matches!(m.tail, TailModel::Exact) || q == 2.0 || q <= 1.0 {
        0.0
    } else if gram {
        // Q = I_N* I_N is PSD: Σ s(Q)^p ≤ Σ Q_kk^p for p ≤ 1 and ≤ (tr Q)^p for p ≥ 1.
        let diag: Vec<f64> = (0..m.dim()).map(|k| m.entries.get(k, k).re.max(0.0)).collect();
        if p <= 1.0 {
            compensated_sum(diag.into_iter().map(|d| d.powf(p)))
        } else {
            compensated_sum(diag).powf(p)
        }
    } else if q < 2.0 {
        compensated_sum(m.entries.column_norms().into_iter().map(|r| r.powf(q)))
    } else {
        m.entries.frobenius_sq().powf(q / 2.0)
    };
    let certificate = if m.spec.symbol().map(|s| s.is_constant()).unwrap_or(false) {
        0.0
    } else {
        m.tail.sum_tail(p, partial)
    };
    TruncationReport {
        p,
        certificate,
        rigorous: m.tail.is_rigorous(),
        frobenius_tail: m.tail.frobenius_tail(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn far_sums() {
        let f = FarDecay::Power { k0: 9, c: 1.0, d: 1.0 };
        assert!((f.sum_pow(2.0) - 0.1).abs() < 1e-15);
        assert!(f.sum_pow(1.0).is_infinite());
        let g = FarDecay::Geometric { k0: 0, c: 1.0, q: 0.5 };
        assert!((g.sum_pow(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn p_two_is_exact_sum() {
        let t = TailModel::Columns {
            dropped: vec![0.3, 0.4],
            far: None,
            rigorous: true,
            gram: false,
        };
        assert!((t.sum_tail(2.0, 7.0) - 0.25).abs() < 1e-15);
        assert!((t.sum_tail(1.0, 7.0) - 0.7).abs() < 1e-15);
        // triangle inequality form for 1 < p < 2
        let v = t.sum_tail(1.5, 1.0);
        let r = (0.3f64.powf(1.5) + 0.4f64.powf(1.5)).powf(1.0 / 1.5);
        assert!((v - ((1.0 + r).powf(1.5) - 1.0)).abs() < 1e-14);
    }
}
