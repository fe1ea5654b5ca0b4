//! Weighted Dirichlet spaces, Bergman weights, orthonormal monomial bases,
//! symbols and reproducing kernels.

mod kernel;
mod symbol;

pub use kernel::{kernel_norm, kernel_value, KernelEval, KernelKind};
pub use symbol::{Symbol, SymbolCoeffs, SymbolDoc, SymbolKind};

use crate::error::{invalid, Result};
use crate::special::ln_beta;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Which of the two equivalent Hilbert norms on D_α is in use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InnerProductMode {
    /// |f(0)|² + ∫|f′|² dA_α with dA_α = (α+1)(1−|z|²)^α dA.
    Integral,
    /// Σ (k+1)^{1−α} a_k b̄_k.
    Coefficient,
}

impl std::fmt::Display for InnerProductMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InnerProductMode::Integral => write!(f, "integral"),
            InnerProductMode::Coefficient => write!(f, "coefficient"),
        }
    }
}

impl std::str::FromStr for InnerProductMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "integral" => Ok(Self::Integral),
            "coefficient" => Ok(Self::Coefficient),
            _ => Err(format!("unknown inner product mode `{s}`")),
        }
    }
}

/// Parameters of a Dirichlet-type space D_α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub alpha: f64,
    pub mode: InnerProductMode,
}

impl SpaceParams {
    pub fn new(alpha: f64, mode: InnerProductMode) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return invalid("alpha", format!("need a finite alpha >= 0, got {alpha}"));
        }
        Ok(Self { alpha, mode })
    }

    pub fn coefficient(alpha: f64) -> Result<Self> {
        Self::new(alpha, InnerProductMode::Coefficient)
    }

    pub fn integral(alpha: f64) -> Result<Self> {
        Self::new(alpha, InnerProductMode::Integral)
    }

    /// ‖z^n‖² in D_α.
    pub fn monomial_norm_sq(&self, n: usize) -> f64 {
        let a = self.alpha;
        match self.mode {
            InnerProductMode::Coefficient => ((n + 1) as f64).powf(1.0 - a),
            InnerProductMode::Integral => {
                if n == 0 {
                    1.0
                } else if a == 0.0 {
                    n as f64
                } else {
                    let x = n as f64;
                    (2.0 * x.ln() + (a + 1.0).ln() + ln_beta(x, a + 1.0)).exp()
                }
            }
        }
    }

    /// ‖z^n‖² for n = 0..=n_max, by recurrence.
    pub fn monomial_norms_sq(&self, n_max: usize) -> Vec<f64> {
        let a = self.alpha;
        match self.mode {
            InnerProductMode::Coefficient => (0..=n_max).map(|n| self.monomial_norm_sq(n)).collect(),
            InnerProductMode::Integral => {
                let mut out = Vec::with_capacity(n_max + 1);
                out.push(1.0);
                // t_n = (α+1) B(n, α+1); t_1 = 1, t_{n+1} = t_n n/(n+α+1).
                let mut t = 1.0;
                for n in 1..=n_max {
                    if n > 1 {
                        let m = (n - 1) as f64;
                        t *= m / (m + a + 1.0);
                    }
                    let x = n as f64;
                    out.push(if a == 0.0 { x } else { x * x * t });
                }
                out
            }
        }
    }
}

/// ∫|z|^{2n} dA_β = Γ(n+1)Γ(β+2)/Γ(n+β+2), n = 0..=n_max.
pub fn bergman_moments(beta: f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut m = 1.0;
    out.push(m);
    for n in 0..n_max {
        let x = n as f64;
        m *= (x + 1.0) / (x + beta + 2.0);
        out.push(m);
    }
    out
}

/// Single Bergman moment, through log-gamma.
pub fn bergman_moment(beta: f64, n: usize) -> f64 {
    let x = n as f64;
    ((beta + 1.0).ln() + ln_beta(x + 1.0, beta + 1.0)).exp()
}

/// Orthonormal monomial basis e_n = z^n/‖z^n‖ of D_α, n = 0..=n_max.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    pub space: SpaceParams,
    norms: Vec<f64>,
}

impl OrthonormalBasis {
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.norms.len() - 1
    }

    /// ‖z^n‖.
    pub fn norm(&self, n: usize) -> f64 {
        self.norms[n]
    }

    /// The factor c with e_n = c z^n.
    pub fn normalization(&self, n: usize) -> f64 {
        1.0 / self.norms[n]
    }

    pub fn eval(&self, n: usize, z: Complex64) -> Complex64 {
        z.powu(n as u32) / self.norms[n]
    }

    pub fn eval_derivative(&self, n: usize, z: Complex64) -> Complex64 {
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        z.powu((n - 1) as u32) * (n as f64 / self.norms[n])
    }
}

/// Orthonormal basis of D_α truncated at index `n_max`.
pub fn orthonormal_basis(space: SpaceParams, n_max: usize) -> Result<OrthonormalBasis> {
    if n_max == 0 {
        return invalid("N", "truncation must be at least 1");
    }
    let norms = space.monomial_norms_sq(n_max).into_iter().map(f64::sqrt).collect();
    Ok(OrthonormalBasis { space, norms })
}

pub(crate) fn check_in_disk(name: &'static str, z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) || z.norm_sqr() >= 1.0 {
        return invalid(name, format!("point {z} is not in the open unit disk"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_basis_example() {
        let b = orthonormal_basis(SpaceParams::coefficient(0.0).unwrap(), 4).unwrap();
        assert!((b.normalization(1) - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn integral_basis_examples() {
        let b = orthonormal_basis(SpaceParams::integral(0.0).unwrap(), 4).unwrap();
        assert_eq!(b.norm(0), 1.0);
        assert!((b.normalization(4) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_truncation_rejected() {
        assert!(orthonormal_basis(SpaceParams::integral(0.0).unwrap(), 0).is_err());
        assert!(SpaceParams::integral(-0.1).is_err());
    }

    #[test]
    fn recurrence_matches_closed_form() {
        for &a in &[0.25, 0.5, 1.0, 2.5] {
            let s = SpaceParams::integral(a).unwrap();
            let v = s.monomial_norms_sq(300);
            for n in [1usize, 2, 7, 50, 300] {
                let rel = (v[n] - s.monomial_norm_sq(n)).abs() / v[n];
                assert!(rel < 1e-11, "alpha {a} n {n} rel {rel}");
            }
            let m = bergman_moments(a, 300);
            for n in [0usize, 3, 300] {
                assert!((m[n] - bergman_moment(a, n)).abs() / m[n] < 1e-11);
            }
        }
        let m2 = bergman_moments(2.0, 5);
        assert!((m2[2] - 6.0 / 60.0).abs() < 1e-15);
    }

    #[test]
    fn integral_norm_matches_moment_integral() {
        // ‖z^n‖² = n² ∫ s^{n-1} (α+1)(1-s)^α ds, checked with a crude midpoint rule.
        let a = 0.5;
        let n = 3usize;
        let m = 200_000;
        let h = 1.0 / m as f64;
        let mut acc = 0.0;
        for i in 0..m {
            let s = (i as f64 + 0.5) * h;
            acc += s.powi(n as i32 - 1) * (a + 1.0) * (1.0 - s).powf(a) * h;
        }
        let exact = SpaceParams::integral(a).unwrap().monomial_norm_sq(n);
        assert!((acc * 9.0 - exact).abs() < 1e-6);
    }
}
