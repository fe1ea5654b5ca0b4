use super::{check_in_disk, InnerProductMode, SpaceParams};
use crate::error::{invalid, numerical, Result};
use num_complex::Complex64;

const MAX_TERMS: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// Reproducing kernel K^α_z of D_α.
    DirichletK(SpaceParams),
    /// Bergman kernel B^α_z of A²_α.
    BergmanB(f64),
    /// Derivative kernel J^α_z of D_α: ⟨f, J_z⟩ = f′(z).
    DerivativeJ(SpaceParams),
}

/// A kernel function anchored at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    pub kind: KernelKind,
    pub at: Complex64,
}

impl KernelEval {
    pub fn new(kind: KernelKind, at: Complex64) -> Result<Self> {
        check_in_disk("z", at)?;
        if let KernelKind::BergmanB(a) = kind {
            if !(a > -1.0) {
                return invalid("alpha", format!("Bergman weight must exceed -1, got {a}"));
            }
        }
        Ok(Self { kind, at })
    }

    /// Coordinates ⟨kernel, e_n⟩ in the orthonormal monomial basis, n = 0..=n_max.
    ///
    /// For the Bergman kernel the basis is z^n/‖z^n‖_{A²_α}.
    pub fn basis_coords(&self, n_max: usize) -> Vec<Complex64> {
        let zc = self.at.conj();
        let mut out = Vec::with_capacity(n_max + 1);
        match self.kind {
            KernelKind::DirichletK(s) => {
                let nsq = s.monomial_norms_sq(n_max);
                let mut pw = Complex64::new(1.0, 0.0);
                for v in nsq.iter() {
                    out.push(pw / v.sqrt());
                    pw *= zc;
                }
            }
            KernelKind::DerivativeJ(s) => {
                let nsq = s.monomial_norms_sq(n_max);
                out.push(Complex64::new(0.0, 0.0));
                let mut pw = Complex64::new(1.0, 0.0);
                for (n, v) in nsq.iter().enumerate().skip(1) {
                    out.push(pw * (n as f64 / v.sqrt()));
                    pw *= zc;
                }
            }
            KernelKind::BergmanB(a) => {
                let m = super::bergman_moments(a, n_max);
                let mut pw = Complex64::new(1.0, 0.0);
                for v in m.iter() {
                    out.push(pw / v.sqrt());
                    pw *= zc;
                }
            }
        }
        out
    }
}

/// Sums Σ_{n≥n0} t_n where |t_{n+1}| ≤ q_n |t_n| and q_n bounds every later ratio.
fn certified_series(
    mut term: impl FnMut(usize) -> Complex64,
    ratio_bound: impl Fn(usize) -> f64,
    n0: usize,
    tol: f64,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    let mut n = n0;
    loop {
        let t = term(n);
        let y = t - comp;
        let s = acc + y;
        comp = (s - acc) - y;
        acc = s;
        let q = ratio_bound(n);
        if q < 1.0 {
            let tail = t.norm() * q / (1.0 - q);
            if tail <= tol {
                return Ok(acc);
            }
        }
        n += 1;
        if n - n0 > MAX_TERMS {
            return numerical(format!("tolerance {tol} not reached within {MAX_TERMS} terms"));
        }
    }
}

/// Value of the kernel anchored at z, evaluated at w.
pub fn kernel_value(kind: KernelKind, z: Complex64, w: Complex64, tol: f64) -> Result<Complex64> {
    check_in_disk("z", z)?;
    check_in_disk("w", w)?;
    if !(tol > 0.0) {
        return invalid("tol", "tolerance must be positive");
    }
    let one = Complex64::new(1.0, 0.0);
    let x = z.conj() * w;
    let ax = x.norm();
    match kind {
        KernelKind::BergmanB(a) => Ok((one - x).powf(-(2.0 + a))),
        KernelKind::DirichletK(s) => {
            let a = s.alpha;
            match s.mode {
                InnerProductMode::Integral if a == 0.0 => Ok(one - (one - x).ln()),
                InnerProductMode::Integral => {
                    // 1 + Σ_{m≥0} C_m x^{m+1}/(m+1)², C_m = (2+α)_m/m!.
                    let mut c = 1.0;
                    let mut pw = x;
                    let v = certified_series(
                        |m| {
                            if m > 0 {
                                c *= (a + 1.0 + m as f64) / m as f64;
                                pw *= x;
                            }
                            let d = (m + 1) as f64;
                            pw * (c / (d * d))
                        },
                        |m| ax * (1.0f64).max(1.0 + (a - 1.0) / (m as f64 + 2.0)),
                        0,
                        tol,
                    )?;
                    Ok(one + v)
                }
                InnerProductMode::Coefficient => {
                    let mut pw = one;
                    certified_series(
                        |n| {
                            if n > 0 {
                                pw *= x;
                            }
                            pw * ((n + 1) as f64).powf(a - 1.0)
                        },
                        |n| ax * (1.0f64).max(((n + 2) as f64 / (n + 1) as f64).powf(a - 1.0)),
                        0,
                        tol,
                    )
                }
            }
        }
        KernelKind::DerivativeJ(s) => {
            let a = s.alpha;
            if s.mode == InnerProductMode::Integral && z.norm() > 0.25 {
                let zc = z.conj();
                return Ok(((one - x).powf(-(1.0 + a)) - one) / ((1.0 + a) * zc));
            }
            // Σ_{n≥1} n z̄^{n-1} w^n/‖z^n‖².
            let zc = z.conj();
            let mut zp = one;
            let mut wp = w;
            let mut t_int = 1.0;
            certified_series(
                |n| {
                    if n > 1 {
                        zp *= zc;
                        wp *= w;
                    }
                    let nf = n as f64;
                    let nsq = match s.mode {
                        InnerProductMode::Coefficient => (nf + 1.0).powf(1.0 - a),
                        InnerProductMode::Integral => {
                            if n > 1 {
                                let m = nf - 1.0;
                                t_int *= m / (m + a + 1.0);
                            }
                            nf * nf * t_int
                        }
                    };
                    zp * wp * (nf / nsq)
                },
                |n| {
                    let nf = n as f64;
                    let growth = match s.mode {
                        // n/‖z^n‖² = (1+α)_n/(n!(1+α)); ratio (n+1+α)/(n+1).
                        InnerProductMode::Integral => (nf + 1.0 + a) / (nf + 1.0),
                        InnerProductMode::Coefficient => {
                            (nf + 1.0) / nf * ((nf + 1.0) / (nf + 2.0)).powf(1.0 - a)
                        }
                    };
                    ax * growth.max(1.0)
                },
                1,
                tol,
            )
        }
    }
}

/// Norm of the kernel anchored at z in its space.
pub fn kernel_norm(kind: KernelKind, z: Complex64) -> Result<f64> {
    check_in_disk("z", z)?;
    let d = 1.0 - z.norm_sqr();
    match kind {
        KernelKind::BergmanB(a) => Ok(d.powf(-(2.0 + a) / 2.0)),
        KernelKind::DerivativeJ(s) if s.mode == InnerProductMode::Integral => {
            Ok(d.powf(-(2.0 + s.alpha) / 2.0))
        }
        KernelKind::DerivativeJ(s) => {
            // Σ n²|z|^{2(n-1)}/(n+1)^{1-α}.
            let x = z.norm_sqr();
            let a = s.alpha;
            let mut xp = 1.0;
            let v = certified_series(
                |n| {
                    if n > 1 {
                        xp *= x;
                    }
                    let nf = n as f64;
                    Complex64::new(xp * nf * nf / (nf + 1.0).powf(1.0 - a), 0.0)
                },
                |n| {
                    let nf = n as f64;
                    let g = ((nf + 1.0) / nf).powi(2) * ((nf + 1.0) / (nf + 2.0)).powf(1.0 - a);
                    x * g.max(1.0)
                },
                1,
                1e-14,
            )?;
            Ok(v.re.sqrt())
        }
        KernelKind::DirichletK(_) => {
            let v = kernel_value(kind, z, z, 1e-15 * (1.0 / d))?;
            Ok(v.re.sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn dirichlet_kernel_examples() {
        let k = KernelKind::DirichletK(SpaceParams::integral(0.0).unwrap());
        let v = kernel_value(k, c(0.0, 0.0), c(0.3, -0.2), 1e-14).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        let v = kernel_value(k, c(0.5, 0.0), c(0.5, 0.0), 1e-14).unwrap();
        assert!((v.re - (1.0 + (4.0f64 / 3.0).ln())).abs() < 1e-14);
        assert!((v.re - 1.287_682_1).abs() < 1e-7);
        let n = kernel_norm(k, c(0.5, 0.0)).unwrap();
        assert!((n - (1.0 + (4.0f64 / 3.0).ln()).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bergman_and_derivative_examples() {
        let v = kernel_value(KernelKind::BergmanB(1.0), c(0.5, 0.0), c(0.5, 0.0), 1e-14).unwrap();
        assert!((v.re - 0.75f64.powi(-3)).abs() < 1e-13);
        assert!((v.re - 2.370_370_4).abs() < 1e-7);
        let z = c(0.75f64.sqrt(), 0.0);
        assert!((kernel_norm(KernelKind::BergmanB(2.0), z).unwrap() - 16.0).abs() < 1e-12);
        let j = KernelKind::DerivativeJ(SpaceParams::integral(0.0).unwrap());
        assert!((kernel_norm(j, c(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        let v0 = kernel_value(j, c(0.3, 0.4), c(0.0, 0.0), 1e-14).unwrap();
        assert!(v0.norm() < 1e-15);
    }

    #[test]
    fn series_matches_closed_form_at_zero_alpha() {
        let s = SpaceParams::integral(0.0).unwrap();
        let general = KernelKind::DirichletK(SpaceParams::integral(1e-300).unwrap());
        let z = c(0.6, 0.3);
        let w = c(-0.2, 0.7);
        let a = kernel_value(KernelKind::DirichletK(s), z, w, 1e-14).unwrap();
        let b = kernel_value(general, z, w, 1e-14).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn derivative_kernel_branches_agree() {
        for &a in &[0.0, 0.5, 1.5] {
            let j = KernelKind::DerivativeJ(SpaceParams::integral(a).unwrap());
            let z = c(0.26, 0.0);
            let w = c(0.4, 0.5);
            let closed = kernel_value(j, z, w, 1e-15).unwrap();
            let zs = c(0.2, 0.0);
            // series branch: compare f′(z) reproduction via coordinates instead
            let coords = KernelEval::new(j, zs).unwrap().basis_coords(200);
            let basis = super::super::orthonormal_basis(SpaceParams::integral(a).unwrap(), 200).unwrap();
            let mut via = c(0.0, 0.0);
            for n in 0..=200 {
                via += coords[n] * basis.eval(n, w);
            }
            let series = kernel_value(j, zs, w, 1e-15).unwrap();
            assert!((via - series).norm() < 1e-12, "alpha {a}");
            assert!(closed.norm().is_finite());
            let n_closed = kernel_norm(j, z).unwrap();
            let n_coords: f64 = KernelEval::new(j, z)
                .unwrap()
                .basis_coords(400)
                .iter()
                .map(|v| v.norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!((n_closed - n_coords).abs() < 1e-12);
        }
    }

    #[test]
    fn reproducing_property_for_polynomials() {
        // ⟨f, K_z⟩ = Σ a_n conj(K coords) ‖z^n‖² in monomial coordinates.
        for mode in [InnerProductMode::Integral, InnerProductMode::Coefficient] {
            let s = SpaceParams::new(0.7, mode).unwrap();
            let f = [c(1.0, 0.5), c(-2.0, 0.0), c(0.0, 0.3), c(0.25, -1.0)];
            let z = c(0.3, -0.6);
            let mut fz = c(0.0, 0.0);
            let mut pw = c(1.0, 0.0);
            for a in f.iter() {
                fz += a * pw;
                pw *= z;
            }
            // K_z(w) = Σ z̄^n w^n/‖z^n‖², so its n-th monomial coefficient is z̄^n/‖z^n‖².
            let nsq = s.monomial_norms_sq(3);
            let mut ip = c(0.0, 0.0);
            for n in 0..4 {
                let kn = z.conj().powu(n as u32) / nsq[n];
                ip += f[n] * kn.conj() * nsq[n];
            }
            assert!((ip - fz).norm() < 1e-14);
            // and the kernel value series is the same function
            let w = c(0.1, 0.2);
            let kv = kernel_value(KernelKind::DirichletK(s), z, w, 1e-15).unwrap();
            let coords = KernelEval::new(KernelKind::DirichletK(s), z).unwrap().basis_coords(300);
            let basis = super::super::orthonormal_basis(s, 300).unwrap();
            let mut via = c(0.0, 0.0);
            for n in 0..=300 {
                via += coords[n] * basis.eval(n, w);
            }
            assert!((kv - via).norm() < 1e-13);
        }
    }

    #[test]
    fn boundary_points_rejected() {
        let k = KernelKind::BergmanB(0.0);
        assert!(kernel_value(k, c(1.0, 0.0), c(0.0, 0.0), 1e-10).is_err());
        assert!(kernel_norm(k, c(0.0, 1.0)).is_err());
    }
}
