//! Möbius maps, the Bergman metric, r-lattices and Luecking sums.

mod lattice;
mod measure;

pub use lattice::{build_lattice, luecking_sum, write_lattice_csv, Lattice, LatticeReport, RingLattice};
pub use measure::{AtomDoc, MeasureDoc, MeasureKind, MeasureRep};

use crate::error::Result;
use crate::spaces::check_in_disk;
use num_complex::Complex64;

/// φ_a(z) = (a − z)/(1 − āz), an involution of the disk.
pub fn mobius(a: Complex64, z: Complex64) -> Result<Complex64> {
    check_in_disk("a", a)?;
    check_in_disk("z", z)?;
    Ok((a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z))
}

/// Pseudohyperbolic distance |z − w|/|1 − w̄z|.
pub fn pseudo_hyperbolic(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm();
    let den = (Complex64::new(1.0, 0.0) - w.conj() * z).norm();
    if num == 0.0 {
        0.0
    } else {
        (num / den).min(1.0)
    }
}

/// β(z, w) = ½ log((1+ρ)/(1−ρ)) = artanh ρ with ρ pseudohyperbolic.
pub fn bergman_metric(z: Complex64, w: Complex64) -> Result<f64> {
    check_in_disk("z", z)?;
    check_in_disk("w", w)?;
    Ok(metric_unchecked(z, w))
}

pub(crate) fn metric_unchecked(z: Complex64, w: Complex64) -> f64 {
    // 1 − ρ² = (1−|z|²)(1−|w|²)/|1−w̄z|² avoids cancellation near the boundary.
    let one = Complex64::new(1.0, 0.0);
    let num = (z - w).norm();
    if num == 0.0 {
        return 0.0;
    }
    let den = (one - w.conj() * z).norm();
    let rho = num / den;
    let one_minus_sq = (1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr()) / (den * den);
    // artanh ρ = ½ log((1+ρ)²/(1−ρ²))
    0.5 * ((1.0 + rho) * (1.0 + rho) / one_minus_sq).ln()
}

/// β(0, ρ) for a radius ρ ∈ [0, 1).
pub fn hyperbolic_radius(rho: f64) -> f64 {
    rho.atanh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn metric_examples() {
        assert_relative_eq!(bergman_metric(c(0.0, 0.0), c(0.6, 0.0)).unwrap(), 2f64.ln(), epsilon = 1e-14);
        assert_eq!(bergman_metric(c(0.3, 0.2), c(0.3, 0.2)).unwrap(), 0.0);
        assert!(bergman_metric(c(1.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn involution_and_invariance() {
        let pts = [c(0.1, 0.2), c(-0.7, 0.3), c(0.5, -0.45), c(0.96, 0.01), c(-0.2, -0.9)];
        for &a in &pts {
            for &z in &pts {
                let back = mobius(a, mobius(a, z).unwrap()).unwrap();
                assert!((back - z).norm() < 1e-12);
                for &w in &pts {
                    let d0 = bergman_metric(z, w).unwrap();
                    let d1 = bergman_metric(mobius(a, z).unwrap(), mobius(a, w).unwrap()).unwrap();
                    assert!((d0 - d1).abs() < 1e-12 * (1.0 + d0), "{d0} vs {d1}");
                }
            }
        }
    }

    #[test]
    fn symmetric() {
        let (z, w) = (c(0.3, -0.1), c(-0.8, 0.5));
        assert_eq!(metric_unchecked(z, w).to_bits(), metric_unchecked(w, z).to_bits());
    }
}
