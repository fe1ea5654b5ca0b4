//! End-to-end acceptance checks. Runs as a plain binary (no libtest harness)
//! and prints one PASS/FAIL line per criterion.

use num_complex::Complex64;
use schatten_lab::asymptotics::{fit_power_log, FitMode, LogArg, Model};
use schatten_lab::cli::suites::{
    dyadic_family, family_sweep, hs_polynomials, ICT_RADII, ICT_WINDOW, LI2_PARAMS, TOEPLITZ_WINDOW,
};
use schatten_lab::cli::{kernel_power_fits, monomial_sp};
use schatten_lab::hyperbolic::RingLattice;
use schatten_lab::norms::{
    bp_norm, classify, clip_sweep, default_outer_grid, dl_norm, ga_norm_suite, series, validate_ict, validate_li2,
    Verdict, DEFAULT_CLIPS,
};
use schatten_lab::operators::{assemble_mgsecond, assemble_monomial_multiplication, assemble_tg, assemble_tg_in};
use schatten_lab::spaces::{SpaceParams, Symbol};
use schatten_lab::spectra::{
    monomial_spectrum_closed_form, multiplier_monomial_closed_form, singular_values, singular_values_dense,
};
use std::process::Command;
use std::time::Instant;

type Outcome = Result<Vec<String>, String>;

fn window(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

fn c1() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in [0.0, 0.25, 0.5, 1.0] {
        for j in 1..=20 {
            let m = e(assemble_tg(&e(Symbol::monomial(j))?, alpha, 256))?;
            let svd = e(singular_values_dense(&m))?;
            let exact = e(monomial_spectrum_closed_form(j, alpha, 256))?;
            let mut want = exact.values.clone();
            want.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let got: Vec<f64> = svd.values.iter().copied().filter(|v| *v > 1e-13).collect();
            ensure(got.len() == want.len(), || {
                format!("j={j} alpha={alpha}: {} nonzero singular values, expected {}", got.len(), want.len())
            })?;
            for (a, b) in got.iter().zip(&want) {
                let rel = (a - b).abs() / b;
                worst = worst.max(rel);
                ensure(rel <= 1e-10, || format!("j={j} alpha={alpha}: rel {rel:.3e}"))?;
            }
        }
    }
    Ok(vec![format!("max rel error {worst:.2e} (bound 1e-10)")])
}

fn c2() -> Outcome {
    let space = e(SpaceParams::integral(0.0))?;
    let mut worst_m: f64 = 0.0;
    let mut worst_q: f64 = 0.0;
    let mut polys = vec![vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]];
    polys.extend(hs_polynomials());
    for b in polys {
        let g = e(Symbol::taylor(b.clone()))?;
        let oracle = series::dl_polynomial(&b);
        let m = e(assemble_tg_in(&g, space, 4096))?;
        let hs = m.entries.frobenius_sq() + m.tail_certificate;
        let q = e(dl_norm(&g, &default_outer_grid(&g, 2f64.powi(-32))))?.estimate();
        let (rm, rq) = ((hs - oracle).abs() / oracle, (q - oracle).abs() / oracle);
        worst_m = worst_m.max(rm);
        worst_q = worst_q.max(rq);
        ensure(rm <= 1e-4 && rq <= 1e-4, || {
            format!("degree {}: matrix rel {rm:.2e}, quadrature rel {rq:.2e}", b.len() - 1)
        })?;
    }
    let z = e(Symbol::monomial(1))?;
    let m = e(assemble_tg_in(&z, space, 4096))?;
    let hs_z = m.entries.frobenius_sq() + m.tail_certificate;
    let q_z = e(dl_norm(&z, &default_outer_grid(&z, 2f64.powi(-32))))?.estimate();
    ensure((hs_z - 2.0).abs() <= 2e-4 && (q_z - 2.0).abs() <= 2e-4, || format!("g=z: {hs_z}, {q_z} vs 2"))?;
    Ok(vec![format!(
        "max rel: matrix {worst_m:.2e}, quadrature {worst_q:.2e}; g=z gives {hs_z:.10} / {q_z:.10}"
    )])
}

fn monomial_samples(alpha: f64, p: f64) -> Result<Vec<(f64, f64)>, String> {
    let mut v = Vec::new();
    let mut j = 4;
    while j <= 4096 {
        v.push((j as f64, e(monomial_sp(j, alpha, p))?));
        j *= 2;
    }
    Ok(v)
}

fn c3() -> Outcome {
    let mut info = Vec::new();
    let power = Model::Power { log: LogArg::X };
    for alpha in [0.0, 0.25, 0.5] {
        for p in [1.1, 1.3, 1.5] {
            let f = e(fit_power_log(&monomial_samples(alpha, p)?, power, FitMode::PowerOnly))?;
            let want = 1.0 / p;
            info.push(format!("p(1-a)<2  alpha={alpha} p={p}: exponent {:.4} (want {want:.4})", f.exponent));
            ensure((f.exponent - want).abs() <= 0.05, || info.last().unwrap().clone())?;
        }
    }
    for alpha in [0.0, 0.25, 0.5] {
        for p in [6.0, 8.0, 12.0] {
            let f = e(fit_power_log(&monomial_samples(alpha, p)?, power, FitMode::PowerOnly))?;
            let want = (1.0 - alpha) / 2.0;
            info.push(format!("p(1-a)>2  alpha={alpha} p={p}: exponent {:.4} (want {want:.4})", f.exponent));
            ensure((f.exponent - want).abs() <= 0.05, || info.last().unwrap().clone())?;
        }
    }
    // the critical set is the curve p = 2/(1−α)
    for alpha in [0.0, 0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.75] {
        let p = 2.0 / (1.0 - alpha);
        let f = e(fit_power_log(
            &monomial_samples(alpha, p)?,
            Model::Power { log: LogArg::EX },
            FitMode::ForcedExponent { exponent: 1.0 / p },
        ))?;
        let want = 1.0 / p;
        info.push(format!("p(1-a)=2  alpha={alpha} p={p:.4}: log power {:.4} (want {want:.4})", f.log_power));
        ensure((f.log_power - want).abs() <= 0.1, || info.last().unwrap().clone())?;
    }
    Ok(info)
}

fn c4() -> Outcome {
    let mut info = Vec::new();
    for (alpha, p) in [(0.0, 1.5), (0.0, 3.0), (0.25, 4.0), (0.25, 5.0), (0.5, 2.0), (0.5, 6.0), (0.5, 7.9)] {
        let mut ratios = Vec::new();
        let mut j = 4;
        while j <= 1024 {
            let x = e(series::xpa_monomial(j, p, alpha, None))?.0.powf(1.0 / p);
            ratios.push(x / e(monomial_sp(j, alpha, p))?);
            j *= 2;
        }
        let w = window(&ratios);
        info.push(format!("alpha={alpha} p={p}: X/S_p window {w:.4}"));
        ensure(w <= 10.0, || info.last().unwrap().clone())?;
    }
    Ok(info)
}

fn c5() -> Outcome {
    let a: Vec<f64> = (3..=14).map(|k| 1.0 - 2f64.powi(-k)).collect();
    let mut info = Vec::new();
    let mut gated = None;
    for p in [1.5, 2.0, 3.0] {
        let rows = e(ga_norm_suite(1.0, p, &a, 2f64.powi(-40)))?;
        let fits = e(kernel_power_fits(&rows, 1.0, p))?;
        let get = |k: &str, f: &str| fits[k][f].as_f64().unwrap_or(f64::NAN);
        let bp = get("bp", "exponent");
        let xp0 = get("xp0", "log_power");
        let bplog = get("bplog", "log_power");
        let hs = get("hs", "log_power");
        if p == 2.0 {
            info.push(format!(
                "p=2: B_p exponent {bp:.4} (1), X^p_0 log power {xp0:.4} (0.5), B_p,log log power {bplog:.4} (0.5), S_2 log power {hs:.4} (0.5)"
            ));
            gated = Some(
                (bp - 1.0).abs() <= 0.05 && (xp0 - 0.5).abs() <= 0.1 && (bplog - 0.5).abs() <= 0.1 && (hs - 0.5).abs() <= 0.1,
            );
        } else {
            let ok = |v: f64, want: f64, tol: f64| if (v - want).abs() <= tol { "within" } else { "outside" };
            info.push(format!(
                "info p={p}: B_p exponent {bp:.4} ({} tol), B_p,log log power {bplog:.4} ({} tol), X^p_0 log power {xp0:.4} vs {:.4} ({} tol, pre-asymptotic at this range)",
                ok(bp, 1.0, 0.05),
                ok(bplog, 0.5, 0.1),
                1.0 / p,
                ok(xp0, 1.0 / p, 0.1)
            ));
        }
    }
    match gated {
        Some(true) => Ok(info),
        _ => Err(info.join("; ")),
    }
}

fn c6() -> Outcome {
    let g = Symbol::loglog();
    let mut info = Vec::new();
    for p in [1.5, 2.0] {
        let rep = e(clip_sweep(&DEFAULT_CLIPS, |c| bp_norm(&g, p, &default_outer_grid(&g, c), true)))?;
        info.push(format!("B_{p}: values {:?} -> {:?}", rep.values, rep.verdict));
        ensure(rep.verdict == Verdict::Converged, || info.last().unwrap().clone())?;
    }
    let rep = e(clip_sweep(&DEFAULT_CLIPS, |c| dl_norm(&g, &default_outer_grid(&g, c))))?;
    info.push(format!("DL: values {:?} -> {:?}", rep.values, rep.verdict));
    ensure(matches!(rep.verdict, Verdict::Diverging { .. }), || info.last().unwrap().clone())?;
    Ok(info)
}

fn c7() -> Outcome {
    let lat = e(RingLattice::new(1.0, 1.0 - 2f64.powi(-33)))?;
    let mut info = Vec::new();
    for alpha in [0.5, 1.0] {
        for p in [0.6, 1.0, 1.5] {
            // sanity on the family itself: weights really follow the stated law
            let mu = e(dyadic_family(alpha, p, 2.0, 2f64.powi(-4)))?;
            ensure(mu.as_atoms().map(|a| a.len()) == Some(4), || "dyadic family atom count".into())?;
            for (s, converge) in [(2.0, true), (0.0, false)] {
                let (l, x) = e(family_sweep(&lat, alpha, p, s, &DEFAULT_CLIPS, 0))?;
                let (_, vl) = classify(&l);
                let (_, vx) = classify(&x);
                let ok_v = |v: Verdict| {
                    if converge {
                        v == Verdict::Converged
                    } else {
                        matches!(v, Verdict::Diverging { .. })
                    }
                };
                let ratios: Vec<f64> = x.iter().zip(&l).map(|(a, b)| a / b).collect();
                let w = window(&ratios);
                info.push(format!(
                    "alpha={alpha} p={p} s={s}: Luecking {vl:?}, X^2p {vx:?}, window {w:.3} (bound {TOEPLITZ_WINDOW})"
                ));
                ensure(ok_v(vl) && ok_v(vx) && w <= TOEPLITZ_WINDOW, || info.last().unwrap().clone())?;
            }
        }
    }
    Ok(info)
}

/// Partial S_1 sums of the computed spectrum of M_{g″} for a lacunary symbol.
fn lacunary_sums(coeff: impl Fn(f64) -> f64) -> Result<(Vec<f64>, Verdict), String> {
    let n: Vec<usize> = (1..=12).map(|k| 1usize << k).collect();
    let a: Vec<f64> = n.iter().map(|&m| coeff(m as f64)).collect();
    let g = e(Symbol::lacunary(a, n, 2.0))?;
    let mut sums = Vec::new();
    for big in [64, 128, 256, 512, 1024] {
        let s = e(singular_values(&e(assemble_mgsecond(&g, 0.0, big))?))?;
        sums.push(s.partial_sum(1.0));
    }
    let (_, v) = classify(&sums);
    Ok((sums, v))
}

fn c8() -> Outcome {
    let mut info = Vec::new();
    // closed form against the assembled operator
    for j in [1, 3, 7] {
        let exact = e(multiplier_monomial_closed_form(j, 96))?;
        let svd = e(singular_values_dense(&e(assemble_monomial_multiplication(j, 96))?))?;
        let mut want = exact.values.clone();
        want.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in svd.values.iter().zip(&want) {
            ensure((a - b).abs() <= 1e-12 * want[0], || format!("M_z^{j}: SVD {a} vs closed form {b}"))?;
        }
    }
    let big = 1 << 20;
    let mut scaled = Vec::new();
    for j in [4usize, 8, 16, 32, 64, 128] {
        let s = e(multiplier_monomial_closed_form(j, big))?;
        // λ_k ≈ √6/k² past the end
        let k_end = (big - j + 1) as f64;
        let s1 = s.partial_sum(1.0) + 6f64.sqrt() / k_end;
        scaled.push(j as f64 * s1);
    }
    let w = window(&scaled);
    info.push(format!("j*|M_z^j|_S1 for j=4..128: {scaled:.4?}, window {w:.4}"));
    ensure(w <= 10.0, || info.last().unwrap().clone())?;

    let (conv, vc) = lacunary_sums(|n| n.powi(-2))?;
    let inc: Vec<f64> = conv.windows(2).map(|w| w[1] - w[0]).collect();
    info.push(format!("a_k = n_k^-2: S_1 partial sums {conv:.6?} -> {vc:?}, increments {inc:.3?}"));
    let geometric = inc.windows(2).all(|w| w[1].abs() <= 0.7 * w[0].abs());
    ensure(vc == Verdict::Converged && geometric, || info.last().unwrap().clone())?;
    let (div, vd) = lacunary_sums(|n| 1.0 / n)?;
    let inc: Vec<f64> = div.windows(2).map(|w| w[1] - w[0]).collect();
    info.push(format!("a_k = 1/n_k: S_1 partial sums {div:.4?} -> {vd:?}, increments {inc:.3?}"));
    let flat = inc.iter().all(|d| *d >= 0.5 * inc[0]);
    ensure(matches!(vd, Verdict::Diverging { .. }) && flat, || info.last().unwrap().clone())?;
    Ok(info)
}

fn c9() -> Outcome {
    let mut info = Vec::new();
    for (c, t) in [(0.0, 0.0), (1.0, 0.0), (2.0, 1.0)] {
        let rep = e(validate_ict(c, t, &ICT_RADII))?;
        let w = rep.max_ratio / rep.min_ratio;
        let at0 = (rep.rows[0].value - 1.0 / (t + 1.0)).abs();
        info.push(format!(
            "I({c},{t}): window {w:.4} on |z|<=0.99, |I(0) - 1/(t+1)| = {at0:.1e}, series rel {:.1e}",
            rep.max_series_rel
        ));
        ensure(rep.min_ratio > 0.0 && w <= ICT_WINDOW && at0 <= 1e-8, || info.last().unwrap().clone())?;
    }
    let mut pairs = Vec::new();
    for a in [0.0, 0.5, 0.9, 0.99] {
        for (r, th) in [(0.0, 0.0), (0.5, 1.0), (0.9, 0.3), (0.99, 0.0), (0.9, 3.0)] {
            pairs.push((Complex64::new(a, 0.0), Complex64::from_polar(r, th)));
        }
    }
    for (s, r, t) in LI2_PARAMS {
        let rep = e(validate_li2(s, r, t, &pairs))?;
        info.push(format!("LI2 s={s} r={r} t={t}: max ratio {:.4}", rep.max_ratio));
        ensure(rep.max_ratio.is_finite() && rep.max_ratio > 0.0, || info.last().unwrap().clone())?;
    }
    Ok(info)
}

fn c10() -> Outcome {
    let out = std::env::temp_dir().join(format!("schatten-acceptance-{}", std::process::id()));
    let mut info = Vec::new();
    for suite in ["lattice", "inclusions", "berezin"] {
        let t = Instant::now();
        let o = e(Command::new(env!("CARGO_BIN_EXE_schatten-lab"))
            .arg("--out")
            .arg(&out)
            .args(["validate", suite])
            .output())?;
        let stdout = String::from_utf8_lossy(&o.stdout);
        let summary = stdout.lines().last().unwrap_or("").to_string();
        info.push(format!("validate {suite}: exit {:?}, {summary} ({:.0}s)", o.status.code(), t.elapsed().as_secs_f64()));
        ensure(o.status.code() == Some(0), || {
            format!("{}\n{}", info.last().unwrap(), String::from_utf8_lossy(&o.stderr))
        })?;
    }
    let _ = std::fs::remove_dir_all(&out);
    Ok(info)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 exact monomial spectra", c1),
        ("2 HS identity", c2),
        ("3 growth regimes", c3),
        ("4 X^p_alpha vs S_p window", c4),
        ("5 kernel-power family", c5),
        ("6 loglog counterexample", c6),
        ("7 Toeplitz comparability", c7),
        ("8 multiplication operators", c8),
        ("9 integral estimates", c9),
        ("10 property suites", c10),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in criteria {
        let id = name.split(' ').next().unwrap();
        if !only.is_empty() && !only.iter().any(|o| o == id) {
            continue;
        }
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(info) => {
                println!("PASS criterion {name} ({secs:.1}s)");
                for l in info {
                    println!("     {l}");
                }
            }
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.1}s)");
                println!("     {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
