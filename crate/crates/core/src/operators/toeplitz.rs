use super::{Codomain, Entries, FarDecay, OperatorInput, OperatorKind, OperatorMatrix, OperatorSpec, TailModel};
use crate::error::{invalid, Result};
use crate::hyperbolic::{MeasureKind, MeasureRep};
use crate::spaces::{InnerProductMode, SpaceParams};
use crate::special::compensated_sum;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

/// Matrix of Q_μ on D_α (Coefficient mode), indices 0..=N.
pub fn assemble_toeplitz(mu: &MeasureRep, alpha: f64, n: usize) -> Result<OperatorMatrix> {
    assemble_toeplitz_in(mu, SpaceParams::coefficient(alpha)?, n)
}

/// Matrix of Q_μ with entries ⟨Q_μ σ_k, σ_n⟩ = ∫ σ_k conj(σ_n) dμ.
pub fn assemble_toeplitz_in(mu: &MeasureRep, space: SpaceParams, n: usize) -> Result<OperatorMatrix> {
    let space = SpaceParams::new(space.alpha, space.mode)?;
    if space.alpha <= 0.0 {
        return invalid("alpha", "Q_mu is only defined here for alpha > 0");
    }
    if n == 0 {
        return invalid("N", "truncation must be at least 1");
    }
    let dim = n + 1;
    let spec = OperatorSpec {
        kind: OperatorKind::ToeplitzQmu,
        input: OperatorInput::Measure(mu.clone()),
        domain: space,
        codomain: Codomain::Dirichlet(space),
        n,
    };
    let rho = mu.support_radius();
    let far_end = 8 * dim;
    let nu: Vec<f64> = space.monomial_norms_sq(far_end).into_iter().map(f64::sqrt).collect();
    let mut warnings = Vec::new();

    let (entries, dropped) = match &mu.kind {
        MeasureKind::RadialDensity { .. } => {
            let moments: Vec<(f64, f64)> = (0..=far_end).map(|k| mu.radial_moment(k).unwrap()).collect();
            let err: f64 = moments.iter().take(dim).map(|m| m.1).fold(0.0, f64::max);
            warnings.push(format!("density quadrature error estimate {err:.3e}"));
            let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
            for k in 0..dim {
                m[(k, k)] = Complex64::new(moments[k].0 / (nu[k] * nu[k]), 0.0);
            }
            let dropped: Vec<f64> = (dim..=far_end).map(|k| moments[k].0.max(0.0).sqrt() / nu[k]).collect();
            (Entries::Dense(m), dropped)
        }
        _ => {
            let atoms = mu.as_atoms().unwrap();
            // I_{i,k} = √w_i σ_k(z_i)
            let rows: Vec<Vec<Complex64>> = atoms
                .par_iter()
                .map(|(z, w)| {
                    let sw = w.sqrt();
                    let mut pw = Complex64::new(1.0, 0.0);
                    (0..dim)
                        .map(|k| {
                            let v = pw * (sw / nu[k]);
                            pw *= z;
                            v
                        })
                        .collect()
                })
                .collect();
            let cols: Vec<Vec<Complex64>> = (0..dim)
                .into_par_iter()
                .map(|k| {
                    (0..dim)
                        .map(|r| {
                            let mut re = Vec::with_capacity(rows.len());
                            let mut im = Vec::with_capacity(rows.len());
                            for row in &rows {
                                let v = row[k] * row[r].conj();
                                re.push(v.re);
                                im.push(v.im);
                            }
                            Complex64::new(compensated_sum(re), compensated_sum(im))
                        })
                        .collect()
                })
                .collect();
            let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
            for (k, col) in cols.into_iter().enumerate() {
                for (r, v) in col.into_iter().enumerate() {
                    m[(r, k)] = v;
                }
            }
            let dropped: Vec<f64> = (dim..=far_end)
                .map(|k| {
                    let s = compensated_sum(atoms.iter().map(|(z, w)| w * z.norm_sqr().powi(k as i32)));
                    s.sqrt() / nu[k]
                })
                .collect();
            (Entries::Dense(m), dropped)
        }
    };
    if !entries.all_finite() {
        return crate::error::numerical("non-finite Toeplitz entry");
    }

    let tail = if rho == 0.0 || mu.total_mass == 0.0 {
        TailModel::Exact
    } else {
        let kf = far_end as f64;
        let a = space.alpha;
        let growth = match space.mode {
            InnerProductMode::Coefficient => ((kf + 2.0) / (kf + 1.0)).powf(((a - 1.0) / 2.0).max(0.0)),
            InnerProductMode::Integral => (kf * (kf + 1.0 + a)).sqrt() / (kf + 1.0),
        };
        let q = rho * growth.max(1.0);
        let c = mu.total_mass.sqrt() * rho.powi(far_end as i32) / nu[far_end];
        // index layout: dropped[i] belongs to column dim + i
        let mut full = vec![0.0; dim];
        full.extend(dropped);
        TailModel::Columns {
            dropped: full,
            far: Some(FarDecay::Geometric { k0: far_end, c, q }),
            rigorous: q < 1.0 && !matches!(mu.kind, MeasureKind::RadialDensity { .. }),
            gram: true,
        }
    };
    let tail_certificate = tail.frobenius_tail();
    Ok(OperatorMatrix {
        entries,
        spec,
        bandwidth: None,
        tail_certificate,
        tail,
        constant_symbol: false,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_at_origin() {
        let m = assemble_toeplitz(&MeasureRep::dirac(Complex64::new(0.0, 0.0)).unwrap(), 0.7, 6).unwrap();
        for r in 0..7 {
            for c in 0..7 {
                let want = if r == 0 && c == 0 { 1.0 } else { 0.0 };
                assert_eq!(m.entries.get(r, c).re, want);
            }
        }
    }

    #[test]
    fn symmetric_pair() {
        let mu = MeasureRep::atomic(vec![(Complex64::new(0.5, 0.0), 0.5), (Complex64::new(-0.5, 0.0), 0.5)]).unwrap();
        let m = assemble_toeplitz(&mu, 1.0, 4).unwrap();
        assert!((m.entries.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!((m.entries.get(1, 1).re - 0.25).abs() < 1e-15);
        assert!(m.entries.get(1, 0).norm() < 1e-15);
    }

    #[test]
    fn alpha_zero_rejected() {
        assert!(assemble_toeplitz(&MeasureRep::zero(), 0.0, 4).is_err());
    }

    #[test]
    fn radial_density_is_diagonal() {
        let mu = MeasureRep::radial_density(vec![0.0, 0.6], vec![1.0, 1.0]).unwrap();
        let m = assemble_toeplitz(&mu, 0.5, 5).unwrap();
        // Q_kk = 0.6^{2k+2}/(k+1) / (k+1)^{1/2}
        for k in 0..6 {
            let kf = k as f64;
            let want = 0.6f64.powi(2 * k as i32 + 2) / (kf + 1.0) / (kf + 1.0).powf(0.5);
            assert!((m.entries.get(k, k).re - want).abs() < 1e-14);
        }
        assert_eq!(m.entries.get(1, 0).re, 0.0);
    }
}
