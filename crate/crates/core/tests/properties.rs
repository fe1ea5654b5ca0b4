use num_complex::Complex64;
use proptest::prelude::*;
use schatten_lab::cli::suites::scattered_atoms;
use schatten_lab::norms::{bp_norm, classify, default_outer_grid, GridSpec, QuadratureGrid, Verdict};
use schatten_lab::operators::{assemble_tg, assemble_tg_in, assemble_toeplitz};
use schatten_lab::spaces::{SpaceParams, Symbol};
use schatten_lab::spectra::{
    monomial_spectrum_closed_form, multiplier_monomial_closed_form, schatten_norm, singular_values_dense,
    SchattenOrder,
};

fn coeffs(max_deg: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 2..=max_deg + 1)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn pad(mut v: Vec<Complex64>, n: usize) -> Vec<Complex64> {
    v.resize(n, Complex64::new(0.0, 0.0));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tg_is_linear_in_the_symbol(b in coeffs(5), c in coeffs(5), s in -3.0..3.0f64, alpha in 0.0..1.5f64) {
        let n = b.len().max(c.len());
        let (b, c) = (pad(b, n), pad(c, n));
        let sum: Vec<Complex64> = b.iter().zip(&c).map(|(x, y)| x + y * s).collect();
        let tb = assemble_tg(&Symbol::taylor(b).unwrap(), alpha, 24).unwrap().entries.to_dense();
        let tc = assemble_tg(&Symbol::taylor(c).unwrap(), alpha, 24).unwrap().entries.to_dense();
        let ts = assemble_tg(&Symbol::taylor(sum).unwrap(), alpha, 24).unwrap().entries.to_dense();
        let diff = (&ts - (&tb + &tc * Complex64::new(s, 0.0))).norm();
        prop_assert!(diff <= 1e-11 * (1.0 + ts.norm()), "diff {diff}");
    }

    #[test]
    fn monomial_svd_matches_closed_form(j in 1usize..12, alpha in 0.0..1.5f64, extra in 4usize..60) {
        let n = 2 * j + extra;
        let svd = singular_values_dense(&assemble_tg(&Symbol::monomial(j).unwrap(), alpha, n).unwrap()).unwrap();
        let exact = monomial_spectrum_closed_form(j, alpha, n).unwrap();
        let mut want = exact.values.clone();
        want.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in svd.values.iter().zip(&want) {
            prop_assert!((a - b).abs() <= 1e-11 * b, "{a} vs {b}");
        }
        // the remaining j singular values vanish
        prop_assert!(svd.values[want.len()..].iter().all(|v| *v <= 1e-12));
    }

    #[test]
    fn schatten_norms_decrease_in_p(j in 1usize..40, alpha in 0.0..1.0f64, p in 1.0..4.0f64, dq in 0.1..4.0f64) {
        let s = monomial_spectrum_closed_form(j, alpha, 400).unwrap();
        let a = schatten_norm(&s, SchattenOrder::new(p).unwrap());
        let b = schatten_norm(&s, SchattenOrder::new(p + dq).unwrap());
        prop_assert!(b.value <= a.value * (1.0 + 1e-13));
        prop_assert!(a.value <= a.upper && a.value <= a.estimate);
        // operator norm is the largest singular value and bounds every S_p norm from below
        prop_assert!(s.values[0] <= b.value * (1.0 + 1e-13));
    }

    #[test]
    fn frobenius_grows_with_n_and_respects_the_certificate(b in coeffs(6), n1 in 8usize..40, dn in 1usize..40) {
        let g = Symbol::taylor(b).unwrap();
        let space = SpaceParams::integral(0.0).unwrap();
        let m1 = assemble_tg_in(&g, space, n1).unwrap();
        let m2 = assemble_tg_in(&g, space, n1 + dn).unwrap();
        let (f1, f2) = (m1.entries.frobenius_sq(), m2.entries.frobenius_sq());
        prop_assert!(f1 <= f2 * (1.0 + 1e-13));
        prop_assert!(f2 <= (f1 + m1.tail_certificate) * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn toeplitz_of_a_positive_measure_is_psd(count in 1usize..30, seed in 0u64..1000, alpha in 0.2..2.0f64) {
        let mu = scattered_atoms(count, seed).unwrap();
        let d = assemble_toeplitz(&mu, alpha, 16).unwrap().entries.to_dense();
        let herm = (&d - d.adjoint()).norm();
        prop_assert!(herm <= 1e-13 * d.norm());
        let trace: f64 = (0..d.nrows()).map(|k| d[(k, k)].re).sum();
        let min = d.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(min >= -1e-12 * trace, "min eigenvalue {min}");
    }

    #[test]
    fn power_sums_are_nested(v in prop::collection::vec(0.0..5.0f64, 1..50), p in 0.5..3.0f64, dq in 0.0..3.0f64) {
        // Σλ^q ≤ (Σλ^p)^{q/p} for q ≥ p
        let q = p + dq;
        let sp: f64 = v.iter().map(|x| x.powf(p)).sum();
        let sq: f64 = v.iter().map(|x| x.powf(q)).sum();
        prop_assert!(sq <= sp.powf(q / p) * (1.0 + 1e-12) + 1e-300, "{sq} vs {sp}");
    }

    #[test]
    fn symbol_json_round_trip(b in coeffs(8)) {
        let g = Symbol::taylor(b).unwrap();
        let h = Symbol::from_json(&g.to_json()).unwrap();
        for z in [Complex64::new(0.3, -0.2), Complex64::new(-0.7, 0.5)] {
            prop_assert!((g.value(z) - h.value(z)).norm() <= 1e-15 * (1.0 + g.value(z).norm()));
        }
    }

    #[test]
    fn geometric_growth_is_diverging(v0 in 0.1..10.0f64, ratio in 1.15..3.0f64) {
        let v: Vec<f64> = (0..5).map(|k| v0 * ratio.powi(k)).collect();
        let diverging = matches!(classify(&v).1, Verdict::Diverging { .. });
        prop_assert!(diverging);
    }

    #[test]
    fn summable_increments_converge(v0 in 0.1..10.0f64, q in 0.01..0.5f64) {
        // increments v0·q^k/10 shrink geometrically
        let v: Vec<f64> = (0..5).map(|k| v0 * (1.0 + 0.1 * (1.0 - q.powi(k)) / (1.0 - q))).collect();
        prop_assert_eq!(classify(&v).1, Verdict::Converged);
    }

    #[test]
    fn radial_moments_on_clipped_disk(k in 0i32..12, e in 2i32..20) {
        // ∫_{|z|<r} |z|^{2k} dA = r^{2k+2}/(k+1)
        let spec = GridSpec::radial(2f64.powi(-e));
        let grid = QuadratureGrid::new(&spec).unwrap();
        let r = spec.r_max();
        let got = grid.integrate(|nd| nd.z.norm_sqr().powi(k));
        let want = r.powi(2 * k + 2) / (k + 1) as f64;
        prop_assert!((got - want).abs() <= 1e-11 * want, "{got} vs {want}");
    }

    #[test]
    fn multiplier_closed_form_is_decreasing(j in 1usize..50) {
        let s = multiplier_monomial_closed_form(j, j + 300).unwrap();
        prop_assert!(s.values.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!((s.values[0] - (6.0 / ((j + 1) * (j + 2) * (j + 3)) as f64).sqrt()).abs() < 1e-15);
    }
}

#[test]
fn bp_monomial_closed_forms() {
    // ‖z^j‖²_{B_2} = j and ‖z^j‖⁴_{B_4} = 2j⁴/((2j−1)2j(2j+1))
    for j in [1usize, 2, 5, 9] {
        let g = Symbol::monomial(j).unwrap();
        let grid = default_outer_grid(&g, 2f64.powi(-40));
        let b2 = bp_norm(&g, 2.0, &grid, false).unwrap().estimate();
        assert!((b2 - j as f64).abs() < 1e-8 * j as f64, "j={j}: {b2}");
        let jf = j as f64;
        let want = 2.0 * jf.powi(4) / ((2.0 * jf - 1.0) * 2.0 * jf * (2.0 * jf + 1.0));
        let b4 = bp_norm(&g, 4.0, &grid, false).unwrap().estimate();
        assert!((b4 - want).abs() < 1e-8 * want, "j={j}: {b4} vs {want}");
    }
}
