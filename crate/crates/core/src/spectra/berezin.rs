use crate::error::{invalid, Result};
use crate::norms::quadrature::{integrate_with_error, GridSpec};
use crate::operators::{Codomain, OperatorMatrix};
use crate::spaces::{bergman_moments, orthonormal_basis, InnerProductMode, SpaceParams};
use crate::special::KahanSum;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

/// Normalized kernel fed to the operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Probe {
    /// b_z = B_z/‖B_z‖ in the Bergman codomain, applied to the adjoint.
    BergmanNormalized,
    /// j_z = J_z/‖J_z‖ in the domain D_α (Integral mode), applied to the operator.
    JNormalized,
}

#[derive(Debug, Clone, Serialize)]
pub struct BerezinResult {
    pub probe: Probe,
    pub p: f64,
    /// ∫_{|z|≤r_max} ‖T k_z‖^p dλ(z).
    pub value: f64,
    pub quadrature_error: f64,
    /// Bound on the part of the integral beyond the clip radius.
    pub clip_tail: f64,
    pub clip_delta: f64,
    /// Weight parameter of the probed space (α for J, β for the Bergman codomain).
    pub weight: f64,
    /// Closed-form value of the full integral at p = 2.
    pub exact_p2: f64,
}

impl BerezinResult {
    /// Combined uncertainty of `value` as an estimate of the full integral.
    pub fn error(&self) -> f64 {
        self.quadrature_error + self.clip_tail
    }
}

/// ∫ ‖T k_z‖^p dλ(z), dλ = dA/(1−|z|²)², evaluated on the assembled block.
pub fn berezin_functional(m: &OperatorMatrix, p: f64, probe: Probe, grid: &GridSpec) -> Result<BerezinResult> {
    if !(p > 0.0) {
        return invalid("p", format!("exponent must be positive, got {p}"));
    }
    let dim = m.dim();
    let dense = m.entries.to_dense();
    // A maps probe coordinates to image coordinates; w_n are the basis normalizations.
    let (a, scale, weight): (DMatrix<Complex64>, Vec<f64>, f64) = match probe {
        Probe::JNormalized => {
            let space = m.spec.domain;
            if space.mode != InnerProductMode::Integral {
                return invalid("probe", "J-normalized probes need the integral inner product");
            }
            let basis = orthonormal_basis(space, dim - 1)?;
            let s = (0..dim).map(|n| if n == 0 { 0.0 } else { n as f64 / basis.norm(n) }).collect();
            (dense, s, space.alpha)
        }
        Probe::BergmanNormalized => {
            let Codomain::Bergman(beta) = m.spec.codomain else {
                return invalid("probe", "Bergman probes need an operator with a Bergman codomain");
            };
            let mom = bergman_moments(beta, dim - 1);
            (dense.adjoint(), mom.iter().map(|v| 1.0 / v.sqrt()).collect(), beta)
        }
    };
    // J_z coordinates are n z̄^{n−1}/ν_n, Bergman ones z̄^n/√m_n.
    let shift = matches!(probe, Probe::JNormalized);
    let gram = a.adjoint() * &a;
    let norm_exp = (2.0 + weight) / 2.0;
    let integrand = |nd: &crate::norms::quadrature::Node| {
        let zc = nd.z.conj();
        let mut c = vec![Complex64::new(0.0, 0.0); dim];
        let mut pw = Complex64::new(1.0, 0.0);
        for (n, cn) in c.iter_mut().enumerate() {
            if shift {
                if n >= 1 {
                    *cn = pw * scale[n];
                    pw *= zc;
                }
            } else {
                *cn = pw * scale[n];
                pw *= zc;
            }
        }
        let mut q = KahanSum::new();
        for j in 0..dim {
            let mut row = Complex64::new(0.0, 0.0);
            for i in 0..dim {
                row += gram[(j, i)] * c[i];
            }
            q.add((c[j].conj() * row).re);
        }
        let nsq = q.value().max(0.0) * nd.omega.powf(2.0 * norm_exp);
        nsq.powf(0.5 * p) / (nd.omega * nd.omega)
    };
    let (value, err) = integrate_with_error(grid, integrand)?;
    // Beyond the clip: ‖T k_z‖^p ≤ K^p (1−|z|²)^{(2+w)p/2} with K² = ‖A‖_F² Σ scale².
    let fro: f64 = gram.diagonal().iter().map(|v| v.re).sum();
    let ksq = fro * scale.iter().map(|s| s * s).sum::<f64>();
    let q = norm_exp * p - 2.0;
    let rc = grid.r_max();
    let clip_tail = if q > -1.0 {
        ksq.powf(0.5 * p) * (1.0 - rc * rc).powf(q + 1.0) / (q + 1.0)
    } else {
        f64::INFINITY
    };
    // p = 2: angular orthogonality leaves Σ_n ‖A e_n‖² ∫|k_n|² dλ = Σ_n ‖A e_n‖²/(1+w).
    let cols: Vec<f64> = (0..dim).map(|n| gram[(n, n)].re).collect();
    let exact_p2 = if shift {
        (fro - cols[0]) / (1.0 + weight)
    } else {
        fro / (1.0 + weight)
    };
    Ok(BerezinResult {
        probe,
        p,
        value,
        quadrature_error: err,
        clip_tail,
        clip_delta: grid.clip_delta,
        weight,
        exact_p2,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameRow {
    pub r: f64,
    /// Ratio at N/4, N/2 and N.
    pub ratios: [f64; 3],
    /// Last retained term still above 10⁻⁶ of the partial sum.
    pub truncation_limited: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameReport {
    pub alpha: f64,
    pub p: f64,
    pub n: usize,
    pub rows: Vec<FrameRow>,
    /// Minimum ratio at N over rows that are not truncation limited.
    pub min_ratio: f64,
    pub nondecreasing_in_n: bool,
}

/// Ratios (Σ_{n≤N} |e_n(z)|^p |e_n′(z)|^{2−p})·(1−|z|²)^{2+α−p} for the
/// orthonormal basis of D_α with the integral norm. The sum is radial.
pub fn frame_lower_bound_check(alpha: f64, p: f64, n: usize, radii: &[f64]) -> Result<FrameReport> {
    if !(1.0..2.0).contains(&p) {
        return invalid("p", format!("p must lie in [1, 2), got {p}"));
    }
    if n < 4 {
        return invalid("N", "need N >= 4");
    }
    let space = SpaceParams::integral(alpha)?;
    let basis = orthonormal_basis(space, n)?;
    let cuts = [n / 4, n / 2, n];
    let mut rows = Vec::new();
    let mut monotone = true;
    for &r in radii {
        if !(0.0..1.0).contains(&r) {
            return invalid("radius", format!("radii must lie in [0, 1), got {r}"));
        }
        let w = (1.0 - r * r).powf(2.0 + alpha - p);
        let mut acc = KahanSum::new();
        let mut ratios = [0.0; 3];
        let mut last = 0.0;
        let mut ci = 0;
        for k in 0..=n {
            let e = basis.eval(k, Complex64::new(r, 0.0)).norm();
            let d = basis.eval_derivative(k, Complex64::new(r, 0.0)).norm();
            let t = if p == 2.0 { e * e } else { e.powf(p) * d.powf(2.0 - p) };
            acc.add(t);
            last = t;
            while ci < 3 && k == cuts[ci] {
                ratios[ci] = acc.value() * w;
                ci += 1;
            }
        }
        if !(ratios[0] <= ratios[1] && ratios[1] <= ratios[2]) {
            monotone = false;
        }
        let total = acc.value();
        rows.push(FrameRow {
            r,
            ratios,
            truncation_limited: total > 0.0 && last > 1e-6 * total,
        });
    }
    let min_ratio = rows
        .iter()
        .filter(|r| !r.truncation_limited)
        .map(|r| r.ratios[2])
        .fold(f64::INFINITY, f64::min);
    Ok(FrameReport {
        alpha,
        p,
        n,
        rows,
        min_ratio,
        nondecreasing_in_n: monotone,
    })
}
