use super::{Codomain, Entries, FarDecay, OperatorInput, OperatorKind, OperatorMatrix, OperatorSpec, TailModel};
use crate::error::{invalid, Result};
use crate::spaces::{bergman_moments, InnerProductMode, SpaceParams, Symbol, SymbolKind};
use crate::special::{compensated_sum, ln_gamma};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

/// Work budget for explicitly summed far columns (entries).
const FAR_BUDGET: usize = 40_000_000;

#[derive(Clone, Copy, PartialEq)]
enum Shape {
    /// T_g: column k, coefficient (j, j b_j) lands on row k+j.
    Integration,
    /// Multiplication by h = Σ h_i z^i into A²_β.
    Multiplier(f64),
}

struct Generator {
    shape: Shape,
    coeffs: Vec<(usize, Complex64)>,
    dom: Vec<f64>,
    cod: Vec<f64>,
}

impl Generator {
    fn value(&self, k: usize, idx: usize, c: Complex64) -> (usize, Complex64) {
        match self.shape {
            Shape::Integration => {
                let row = k + idx;
                (row, c * (self.cod[row] / (row as f64 * self.dom[k])))
            }
            Shape::Multiplier(_) => {
                let row = k + idx;
                (row, c * (self.cod[row] / self.dom[k]))
            }
        }
    }
}

fn domain_norms(space: SpaceParams, n_max: usize) -> Vec<f64> {
    space.monomial_norms_sq(n_max).into_iter().map(f64::sqrt).collect()
}

fn check_space(space: SpaceParams) -> Result<()> {
    SpaceParams::new(space.alpha, space.mode).map(|_| ())
}

/// Coefficients b_0..b_M of g with M large enough that the dropped series is negligible.
/// Returns (coefficients, exact) where `exact` says nothing meaningful was cut.
fn effective_coeffs(g: &Symbol, n: usize, weight_exp: f64) -> (Vec<Complex64>, bool) {
    match &g.kind {
        SymbolKind::Taylor(b) => (b.clone(), true),
        SymbolKind::Monomial(j) => (g.coeffs(*j).coeffs, true),
        SymbolKind::Lacunary { exponents, .. } => (g.coeffs(*exponents.last().unwrap()).coeffs, true),
        SymbolKind::KernelPower { a, gamma } => {
            let cap = 64 * (n + 1) + 4096;
            let ra = a.norm();
            let ac = a.conj();
            let mut out = vec![Complex64::new(1.0, 0.0)];
            let mut v = Complex64::new(1.0, 0.0);
            let mut total = 0.0f64;
            let mut j = 0usize;
            loop {
                j += 1;
                v *= ac * ((gamma + j as f64 - 1.0) / j as f64);
                out.push(v);
                let jf = j as f64;
                let w = jf * jf * v.norm_sqr() * (1.0 + jf).powf(weight_exp);
                total += w;
                let q = ra * ra * ((gamma + jf) / (jf + 1.0)).powi(2) * ((jf + 1.0) / jf).powi(2)
                    * ((jf + 2.0) / (jf + 1.0)).powf(weight_exp);
                if j >= n && q < 1.0 && w * q / (1.0 - q) <= 1e-32 * total.max(f64::MIN_POSITIVE) {
                    return (out, true);
                }
                if j >= cap {
                    return (out, false);
                }
            }
        }
        SymbolKind::LogLog => (g.coeffs(4 * (n + 1)).coeffs, false),
    }
}

fn check_truncation(g: &Symbol, n: usize) -> Result<()> {
    if matches!(g.kind, SymbolKind::KernelPower { .. } | SymbolKind::LogLog) && g.truncation < n {
        return invalid(
            "truncation",
            format!("symbol truncation {} is below the matrix truncation {n}", g.truncation),
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn build(
    spec: OperatorSpec,
    shape: Shape,
    coeffs: Vec<(usize, Complex64)>,
    exact_coeffs: bool,
    domain: SpaceParams,
    cod_of: impl Fn(usize) -> Vec<f64>,
    constant_symbol: bool,
    mut warnings: Vec<String>,
) -> Result<OperatorMatrix> {
    let n = spec.n;
    let dim = n + 1;
    let nnz = coeffs.len();
    let max_idx = coeffs.iter().map(|c| c.0).max().unwrap_or(0);
    let far_end = if nnz == 0 {
        n
    } else {
        (8 * dim).min(n + (FAR_BUDGET / nnz).max(1))
    };
    let top = far_end + max_idx + 1;
    let gen = Generator {
        shape,
        coeffs,
        dom: domain_norms(domain, top),
        cod: cod_of(top),
    };

    let banded = nnz <= 32;
    let entries = if banded {
        let diags: Vec<(usize, Vec<Complex64>)> = gen
            .coeffs
            .iter()
            .filter(|(idx, _)| *idx <= n)
            .map(|&(idx, c)| {
                let v = (0..dim)
                    .map(|k| {
                        let (row, x) = gen.value(k, idx, c);
                        if row < dim {
                            x
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                    .collect();
                (idx, v)
            })
            .collect();
        Entries::Diagonals { dim, diags }
    } else {
        let cols: Vec<Vec<(usize, Complex64)>> = (0..dim)
            .into_par_iter()
            .map(|k| {
                gen.coeffs
                    .iter()
                    .map(|&(idx, c)| gen.value(k, idx, c))
                    .filter(|(row, _)| *row < dim)
                    .collect()
            })
            .collect();
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (k, col) in cols.into_iter().enumerate() {
            for (row, v) in col {
                m[(row, k)] += v;
            }
        }
        Entries::Dense(m)
    };
    if !entries.all_finite() {
        return crate::error::numerical("non-finite matrix entry during assembly");
    }

    // Dropped column norms: rows beyond N in kept columns, then columns N+1..=far_end.
    let dropped: Vec<f64> = (0..=far_end)
        .into_par_iter()
        .map(|k| {
            let parts: Vec<f64> = gen
                .coeffs
                .iter()
                .map(|&(idx, c)| gen.value(k, idx, c))
                .filter(|(row, _)| k > n || *row > n)
                .map(|(_, v)| v.norm_sqr())
                .collect();
            compensated_sum(parts).sqrt()
        })
        .collect();

    let tail = if nnz == 0 {
        TailModel::Exact
    } else {
        let alpha = domain.alpha;
        let csum: f64 = compensated_sum(gen.coeffs.iter().map(|(idx, c)| match shape {
            Shape::Integration => {
                let j = *idx as f64;
                let w = (1.0 + j / (far_end as f64 + 1.0)).powf(1.0 - alpha).max(1.0);
                c.norm_sqr() * w
            }
            Shape::Multiplier(_) => c.norm_sqr(),
        }));
        let kf = far_end as f64;
        let (far, rigorous) = match (shape, domain.mode) {
            (Shape::Integration, InnerProductMode::Coefficient) => (
                FarDecay::Power {
                    k0: far_end,
                    c: csum.sqrt(),
                    d: 1.0,
                },
                exact_coeffs,
            ),
            (Shape::Integration, InnerProductMode::Integral) if alpha == 0.0 => (
                FarDecay::Power {
                    k0: far_end,
                    c: csum.sqrt() * (kf + 2.0) / (kf + 1.0),
                    d: 1.0,
                },
                exact_coeffs,
            ),
            (Shape::Multiplier(beta), mode) if mode == InnerProductMode::Coefficient || alpha == 0.0 => {
                let d = (beta + 2.0 - alpha) / 2.0;
                let mut c2 = (ln_gamma(beta + 2.0)).exp() * csum;
                if mode == InnerProductMode::Integral {
                    c2 *= (kf + 2.0) / (kf + 1.0);
                }
                (
                    FarDecay::Power {
                        k0: far_end,
                        c: c2.sqrt(),
                        d,
                    },
                    exact_coeffs,
                )
            }
            (shape, _) => {
                let d = match shape {
                    Shape::Integration => 1.0,
                    Shape::Multiplier(beta) => (beta + 2.0 - alpha) / 2.0,
                };
                let lo = (far_end / 2).max(n + 1);
                let c = (lo..=far_end)
                    .map(|k| dropped[k] * ((k + 1) as f64).powf(d))
                    .fold(0.0, f64::max);
                warnings.push("far-column decay constant estimated, certificate heuristic".into());
                (FarDecay::Power { k0: far_end, c, d }, false)
            }
        };
        if !exact_coeffs {
            warnings.push("symbol series truncated without a decay bound, certificate heuristic".into());
        }
        TailModel::Columns {
            dropped,
            far: Some(far),
            rigorous,
            gram: false,
        }
    };
    let tail_certificate = tail.frobenius_tail();
    let bandwidth = if banded { Some(max_idx.min(n)) } else { None };
    Ok(OperatorMatrix {
        entries,
        spec,
        bandwidth,
        tail_certificate,
        tail,
        constant_symbol,
        warnings,
    })
}

/// Matrix of T_g on D_α (Coefficient mode), indices 0..=N.
pub fn assemble_tg(g: &Symbol, alpha: f64, n: usize) -> Result<OperatorMatrix> {
    assemble_tg_in(g, SpaceParams::coefficient(alpha)?, n)
}

/// Matrix of T_g on D_α in the given inner-product mode.
pub fn assemble_tg_in(g: &Symbol, space: SpaceParams, n: usize) -> Result<OperatorMatrix> {
    check_space(space)?;
    if n == 0 {
        return invalid("N", "truncation must be at least 1");
    }
    check_truncation(g, n)?;
    let (b, exact) = effective_coeffs(g, n, (1.0 - space.alpha).abs());
    let coeffs: Vec<(usize, Complex64)> = b
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
        .map(|(j, v)| (j, v * j as f64))
        .collect();
    let constant = coeffs.is_empty();
    let mut warnings = Vec::new();
    if constant {
        warnings.push("constant symbol: T_g is the zero operator".into());
    }
    let spec = OperatorSpec {
        kind: OperatorKind::IntegrationTg,
        input: OperatorInput::Symbol(g.clone()),
        domain: space,
        codomain: Codomain::Dirichlet(space),
        n,
    };
    build(
        spec,
        Shape::Integration,
        coeffs,
        exact,
        space,
        move |top| domain_norms(space, top),
        constant,
        warnings,
    )
}

fn multiplier_matrix(
    kind: OperatorKind,
    g: &Symbol,
    h: Vec<Complex64>,
    exact: bool,
    space: SpaceParams,
    beta: f64,
    n: usize,
) -> Result<OperatorMatrix> {
    let coeffs: Vec<(usize, Complex64)> = h
        .into_iter()
        .enumerate()
        .filter(|(_, v)| *v != Complex64::new(0.0, 0.0))
        .collect();
    let constant = coeffs.is_empty();
    let mut warnings = Vec::new();
    if constant {
        warnings.push("multiplier vanishes identically: zero operator".into());
    }
    let spec = OperatorSpec {
        kind,
        input: OperatorInput::Symbol(g.clone()),
        domain: space,
        codomain: Codomain::Bergman(beta),
        n,
    };
    build(
        spec,
        Shape::Multiplier(beta),
        coeffs,
        exact,
        space,
        move |top| bergman_moments(beta, top).into_iter().map(f64::sqrt).collect(),
        constant,
        warnings,
    )
}

/// Matrix of M_{g′}: D_α → A²_α (Coefficient mode).
pub fn assemble_mgprime(g: &Symbol, alpha: f64, n: usize) -> Result<OperatorMatrix> {
    assemble_mgprime_in(g, SpaceParams::coefficient(alpha)?, n)
}

pub fn assemble_mgprime_in(g: &Symbol, space: SpaceParams, n: usize) -> Result<OperatorMatrix> {
    check_space(space)?;
    if n == 0 {
        return invalid("N", "truncation must be at least 1");
    }
    check_truncation(g, n)?;
    let (b, exact) = effective_coeffs(g, n, 0.0);
    let h: Vec<Complex64> = b.iter().enumerate().skip(1).map(|(i, v)| v * i as f64).collect();
    multiplier_matrix(OperatorKind::MultiplicationGprime, g, h, exact, space, space.alpha, n)
}

/// Matrix of M_{g″}: D_α → A²_{2+α} (Coefficient mode).
pub fn assemble_mgsecond(g: &Symbol, alpha: f64, n: usize) -> Result<OperatorMatrix> {
    assemble_mgsecond_in(g, SpaceParams::coefficient(alpha)?, n)
}

pub fn assemble_mgsecond_in(g: &Symbol, space: SpaceParams, n: usize) -> Result<OperatorMatrix> {
    check_space(space)?;
    if n == 0 {
        return invalid("N", "truncation must be at least 1");
    }
    check_truncation(g, n)?;
    let (b, exact) = effective_coeffs(g, n, 0.0);
    let h: Vec<Complex64> = b
        .iter()
        .enumerate()
        .skip(2)
        .map(|(i, v)| v * (i * (i - 1)) as f64)
        .collect();
    multiplier_matrix(OperatorKind::MultiplicationGsecond, g, h, exact, space, space.alpha + 2.0, n)
}

/// Matrix of M_{z^j}: D → A²_2 in the coefficient basis z^n/√(n+1) of D.
pub fn assemble_monomial_multiplication(j: usize, n: usize) -> Result<OperatorMatrix> {
    if n == 0 {
        return invalid("N", "truncation must be at least 1");
    }
    let space = SpaceParams::coefficient(0.0)?;
    let mut h = vec![Complex64::new(0.0, 0.0); j + 1];
    h[j] = Complex64::new(1.0, 0.0);
    let g = Symbol::monomial(j + 2)?;
    multiplier_matrix(OperatorKind::MultiplicationMonomial(j), &g, h, true, space, 2.0, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::truncation_report;

    fn re(m: &OperatorMatrix, r: usize, c: usize) -> f64 {
        m.entries.get(r, c).re
    }

    #[test]
    fn tg_examples() {
        let m = assemble_tg(&Symbol::monomial(1).unwrap(), 0.0, 5).unwrap();
        assert!((re(&m, 1, 0) - 2f64.sqrt()).abs() < 1e-15);
        let m = assemble_tg(&Symbol::monomial(2).unwrap(), 0.0, 5).unwrap();
        assert!((re(&m, 2, 0) - 3f64.sqrt()).abs() < 1e-15);
        let m = assemble_tg(&Symbol::constant(3.0), 0.5, 5).unwrap();
        assert!(m.constant_symbol);
        assert_eq!(m.entries.frobenius_sq(), 0.0);
        assert_eq!(truncation_report(&m, 2.0).certificate, 0.0);
    }

    #[test]
    fn tz_certificate_example() {
        let m = assemble_tg(&Symbol::monomial(1).unwrap(), 0.0, 200).unwrap();
        let rep = truncation_report(&m, 2.0);
        // Σ_{n>200} (n+1)/n³, summed far enough that the rest is below 1e-12.
        let mut s = 0.0;
        for n in (201..2_000_000).rev() {
            let x = n as f64;
            s += (x + 1.0) / (x * x * x);
        }
        assert!(rep.rigorous);
        assert!(rep.certificate >= s);
        assert!(rep.certificate - s < 1e-6);
        assert!(rep.certificate <= 1.0 / 199.0);
    }

    #[test]
    fn certificate_monotone_in_n() {
        let g = Symbol::taylor(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)]).unwrap();
        let mut last = f64::INFINITY;
        for n in [8usize, 16, 32, 64, 128] {
            let c = truncation_report(&assemble_tg(&g, 0.3, n).unwrap(), 2.0).certificate;
            assert!(c <= last);
            last = c;
        }
    }

    #[test]
    fn multiplication_examples() {
        let m = assemble_monomial_multiplication(2, 10).unwrap();
        // column n-j=0 maps to row 2 with value 1/(c_2 √1) = 1/√10
        assert!((re(&m, 2, 0) - 1.0 / 10f64.sqrt()).abs() < 1e-15);
        let affine = Symbol::taylor(vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]).unwrap();
        let z = assemble_mgsecond(&affine, 0.0, 10).unwrap();
        assert_eq!(z.entries.frobenius_sq(), 0.0);
    }

    #[test]
    fn gprime_matches_tg_singular_structure() {
        // In the integral norm ‖T_g f‖_{D_α} = ‖f g′‖_{A²_α} whenever T_g f(0) = 0.
        let g = Symbol::taylor(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -0.5),
            Complex64::new(0.25, 0.0),
        ])
        .unwrap();
        let s = SpaceParams::integral(0.6).unwrap();
        let a = assemble_tg_in(&g, s, 20).unwrap().entries.to_dense();
        let b = assemble_mgprime_in(&g, s, 20).unwrap().entries.to_dense();
        let ga = a.adjoint() * &a;
        let gb = b.adjoint() * &b;
        // Compare the Gram matrices on columns whose images stay inside the block.
        for i in 0..17 {
            for k in 0..17 {
                assert!((ga[(i, k)] - gb[(i, k)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn banded_and_dense_agree() {
        let coeffs: Vec<Complex64> = (0..40).map(|k| Complex64::new(1.0 / (k as f64 + 1.0), 0.0)).collect();
        let g = Symbol::taylor(coeffs.clone()).unwrap();
        let dense = assemble_tg(&g, 0.5, 30).unwrap();
        assert!(matches!(dense.entries, Entries::Dense(_)));
        let g2 = Symbol::taylor(coeffs[..20].to_vec()).unwrap();
        let banded = assemble_tg(&g2, 0.5, 30).unwrap();
        assert!(matches!(banded.entries, Entries::Diagonals { .. }));
        // columns agree on the first 20 coefficients
        let a = dense.entries.to_dense();
        let b = banded.entries.to_dense();
        for k in 0..31 {
            for r in k..(k + 20).min(31) {
                assert!((a[(r, k)] - b[(r, k)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn insufficient_truncation_rejected() {
        let g = Symbol::kernel_power(Complex64::new(0.5, 0.0), 1.0).unwrap().with_truncation(10);
        assert!(assemble_tg(&g, 0.0, 20).is_err());
    }
}
