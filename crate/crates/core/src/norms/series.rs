//! Coefficient-series evaluations used as independent oracles for the
//! quadrature functionals.

use super::quadrature::{integrate_with_error, GridSpec, Node};
use crate::error::{invalid, numerical, Result};
use crate::spaces::{Symbol, SymbolKind};
use crate::special::{beta, harmonic, ln_beta, ln_gamma, KahanSum};
use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::gamma::gamma_ui;

const MAX_SERIES_TERMS: usize = 20_000_000;

/// Σ ((a)_m/m!)² y^m with a power-law tail estimate once terms stall near y = 1.
fn equal_param_series(a: f64, y: f64) -> f64 {
    let mut t = 1.0f64;
    let mut k = KahanSum::new();
    k.add(t);
    let kappa = 2.0 * (a - 1.0);
    for m in 0..MAX_SERIES_TERMS {
        let mf = m as f64;
        let f = (a + mf) / (mf + 1.0);
        t *= f * f * y;
        if t == 0.0 {
            return k.value();
        }
        k.add(t);
        let n = mf + 1.0;
        let geo = if y < 1.0 { y / (1.0 - y) } else { f64::INFINITY };
        let pow = if kappa < -1.0 { n / (-kappa - 1.0) } else { f64::INFINITY };
        let tail = t.abs() * geo.min(pow);
        if tail <= 1e-17 * k.value().abs() && m > 8 {
            k.add(tail * t.signum());
            return k.value();
        }
    }
    k.value()
}

/// ₂F₁(a, a; 1; y) for y ∈ [0, 1). For y > ½ and a > ½ Euler's transformation
/// (1−y)^{1−2a} ₂F₁(1−a, 1−a; 1; y) gives a series that converges at y = 1.
pub fn hyp2f1_equal(a: f64, y: f64) -> f64 {
    if y <= 0.5 || a <= 0.5 {
        equal_param_series(a, y)
    } else {
        (1.0 - y).powf(1.0 - 2.0 * a) * equal_param_series(1.0 - a, y)
    }
}

/// ‖z^j‖^p_{B_p} = j^p B((j−1)p/2 + 1, p − 1).
pub fn bp_monomial(j: usize, p: f64) -> f64 {
    let jf = j as f64;
    (p * jf.ln() + ln_beta((jf - 1.0) * p / 2.0 + 1.0, p - 1.0)).exp()
}

/// B_p seminorm (p-th power) of (1−āz)^{−γ}: (γ|a|)^p Σ ((s/2)_n/n!)² |a|^{2n} B(n+1, p−1), s = (γ+1)p.
pub fn bp_kernel_power(a_abs: f64, gamma: f64, p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&a_abs) {
        return invalid("a", format!("|a| must lie in [0, 1), got {a_abs}"));
    }
    if a_abs == 0.0 {
        return Ok(0.0);
    }
    let h = 0.5 * (gamma + 1.0) * p;
    let y = a_abs * a_abs;
    // t_n = c_n² y^n B(n+1, p−1), in logs for the prefactor
    let mut t = beta(1.0, p - 1.0);
    let mut k = KahanSum::new();
    k.add(t);
    let mut n = 0usize;
    loop {
        let nf = n as f64;
        let f = (h + nf) / (nf + 1.0);
        // B(n+2, p−1)/B(n+1, p−1) = (n+1)/(n+p)
        let q = f * f * y * (nf + 1.0) / (nf + p);
        t *= q;
        k.add(t);
        n += 1;
        if q < 1.0 && t * q / (1.0 - q) < 1e-17 * k.value() && q < 0.999_999_9 {
            break;
        }
        if n > MAX_SERIES_TERMS {
            return numerical("B_p series did not converge");
        }
    }
    Ok((gamma * a_abs).powf(p) * k.value())
}

/// Σ_j j|b_j|²(1 + H_j): the DL functional of a polynomial, which equals the
/// Hilbert–Schmidt norm squared of T_g on D with the integral norm.
pub fn dl_polynomial(b: &[Complex64]) -> f64 {
    let mut k = KahanSum::new();
    for (j, v) in b.iter().enumerate().skip(1) {
        k.add(j as f64 * v.norm_sqr() * (1.0 + harmonic(j)));
    }
    k.value()
}

/// DL functional of (1−āz)^{−γ} by its coefficient series.
pub fn dl_kernel_power(a_abs: f64, gamma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&a_abs) {
        return invalid("a", format!("|a| must lie in [0, 1), got {a_abs}"));
    }
    let y = a_abs * a_abs;
    let mut c = 1.0f64; // (γ)_j/j! |a|^j
    let mut k = KahanSum::new();
    let mut h = 0.0;
    let mut j = 0usize;
    loop {
        let jf = j as f64;
        c *= a_abs * (gamma + jf) / (jf + 1.0);
        j += 1;
        h += 1.0 / j as f64;
        let t = j as f64 * c * c * (1.0 + h);
        k.add(t);
        let q = y * ((gamma + j as f64) / (j as f64 + 1.0)).powi(2) * (j as f64 + 1.0) / j as f64;
        if j > 8 && q < 1.0 && 2.0 * t * q / (1.0 - q) < 1e-17 * k.value() {
            break;
        }
        if j > MAX_SERIES_TERMS {
            return numerical("DL series did not converge");
        }
    }
    Ok(k.value())
}

/// Graded 1-D rule on δ ∈ [δ_min, 1]: one Gauss panel per 2^{−1/s} step.
pub(crate) fn delta_rule(delta_min: f64, per_octave: usize, order: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(order).expect("order >= 2");
    let mut edges = vec![1.0];
    let mut k = 1.0;
    loop {
        let d = 2f64.powf(-k / per_octave as f64);
        if d <= delta_min {
            break;
        }
        edges.push(d);
        k += 1.0;
    }
    edges.push(delta_min);
    let mut out = Vec::new();
    for w in edges.windows(2) {
        let (hi, lo) = (w[0], w[1]);
        let h = 0.5 * (hi - lo);
        let c = 0.5 * (hi + lo);
        for &(x, wt) in rule.as_node_weight_pairs().iter() {
            out.push((c + h * x, h * wt));
        }
    }
    out
}

/// ∫_0^1 f(δ) dδ on the graded δ-rule, with the difference to a coarser rule as error.
fn radial_delta_integral(f: impl Fn(f64) -> f64 + Sync, delta_min: f64) -> (f64, f64) {
    let eval = |rule: Vec<(f64, f64)>| {
        let parts: Vec<f64> = rule.par_iter().map(|(d, w)| w * f(*d)).collect();
        let mut k = KahanSum::new();
        for v in parts {
            k.add(v);
        }
        k.value()
    };
    let fine = eval(delta_rule(delta_min, 4, 10));
    let coarse = eval(delta_rule(delta_min, 2, 8));
    (fine, (fine - coarse).abs())
}

/// Lower δ cut for ∫ δ^{p−2}·(slowly varying) dδ so that the dropped piece is negligible.
fn delta_floor(p: f64) -> f64 {
    10f64.powf(-18.0 / (p - 1.0)).max(1e-300)
}

/// B_{p,log^γ} seminorm (p-th power) of z^j by its radial integral.
pub fn bplog_monomial(j: usize, p: f64, gamma: f64) -> (f64, f64) {
    let jf = j as f64;
    let f = |d: f64| {
        let r = 1.0 - d;
        let om = d * (2.0 - d);
        let lg = 1.0 - d.ln();
        (p * jf.ln() + (jf - 1.0) * p * (-d).ln_1p() + gamma * lg.ln() + (p - 2.0) * om.ln()).exp() * 2.0 * r
    };
    radial_delta_integral(f, delta_floor(p))
}

/// B_{p,log^γ} seminorm (p-th power) of (1−āz)^{−γ_k}; the circle mean of |g′|^p is
/// (γ_k|a|)^p ₂F₁(s/2, s/2; 1; |a|²r²) with s = (γ_k+1)p.
pub fn bplog_kernel_power(a_abs: f64, gamma_k: f64, p: f64, log_power: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&a_abs) {
        return invalid("a", format!("|a| must lie in [0, 1), got {a_abs}"));
    }
    if a_abs == 0.0 {
        return Ok((0.0, 0.0));
    }
    let h = 0.5 * (gamma_k + 1.0) * p;
    let pre = (gamma_k * a_abs).powf(p);
    let f = |d: f64| {
        let r = 1.0 - d;
        let om = d * (2.0 - d);
        let y = a_abs * a_abs * r * r;
        let lg = 1.0 - d.ln();
        pre * hyp2f1_equal(h, y) * lg.powf(log_power) * om.powf(p - 2.0) * 2.0 * r
    };
    Ok(radial_delta_integral(f, delta_floor(p)))
}

/// X^p_α (p-th power) of z^j by the coefficient series of the inner integral,
/// I(w) = j² Σ_m ((1+α)_m/m!)² M_α(m+j−1) |w|^{2m}, and a 1-D outer integral in
/// u = −log(1−|w|²). `clip` restricts the outer integral to |w| ≤ 1 − clip.
pub fn xpa_monomial(j: usize, p: f64, alpha: f64, clip: Option<f64>) -> Result<(f64, f64)> {
    if j == 0 {
        return Ok((1.0, 0.0));
    }
    if !(p > 1.0) || !(alpha >= 0.0) {
        return invalid("p", format!("need p > 1 and alpha >= 0, got p = {p}, alpha = {alpha}"));
    }
    let inner = MonomialInner::new(j, alpha);
    let jf = j as f64;
    // integrand in u: (j² ω^α S)^{p/2} e^{−u(p−1)}, ω = e^{−u}
    let f = |u: f64| -> f64 {
        let ls = inner.ln_scaled(u);
        ((0.5 * p) * (2.0 * jf.ln() + ls) - u * (p - 1.0)).exp()
    };
    let u_clip = clip.map(|d| -(d * (2.0 - d)).ln());
    let hi = GaussLegendre::new(10).expect("order");
    let lo = GaussLegendre::new(7).expect("order");
    let width = 0.5;
    let mut acc = KahanSum::new();
    let mut err = 0.0;
    let mut a = 0.0;
    let mut tail = 0.0;
    loop {
        let mut b = a + width;
        let last = match u_clip {
            Some(uc) if b >= uc => {
                b = uc;
                true
            }
            _ => false,
        };
        let vh = hi.integrate(a, b, f);
        let vl = lo.integrate(a, b, f);
        acc.add(vh);
        err += (vh - vl).abs();
        a = b;
        if last {
            break;
        }
        if u_clip.is_none() {
            let fb = f(b);
            // remaining integral of an e^{−(p−1)u}-type decay
            let rest = fb / (p - 1.0);
            if rest < 1e-15 * acc.value() || b > 690.0 {
                tail = rest;
                break;
            }
        }
    }
    let value = acc.value() + tail;
    let model = if alpha > 0.0 { 1e-7 * value } else { 0.0 };
    Ok((value, err + 0.5 * tail + model))
}

struct MonomialInner {
    j: usize,
    alpha: f64,
    a: Vec<f64>,
    kappa: f64,
}

const MONO_CAP: usize = 1 << 15;

impl MonomialInner {
    fn new(j: usize, alpha: f64) -> Self {
        if alpha == 0.0 {
            return Self {
                j,
                alpha,
                a: Vec::new(),
                kappa: -1.0,
            };
        }
        let mut a = Vec::with_capacity(MONO_CAP);
        let mut c = 1.0f64;
        let n0 = (j - 1) as f64;
        let mut mom = (ln_gamma(n0 + 1.0) + ln_gamma(alpha + 2.0) - ln_gamma(n0 + alpha + 2.0)).exp();
        for m in 0..MONO_CAP {
            a.push(c * c * mom);
            let mf = m as f64;
            c *= (1.0 + alpha + mf) / (mf + 1.0);
            let n = n0 + mf;
            mom *= (n + 1.0) / (n + alpha + 2.0);
        }
        let last = MONO_CAP - 1;
        let kappa = (a[last] / a[last / 2]).ln() / ((last as f64) / ((last / 2) as f64)).ln();
        Self { j, alpha, a, kappa }
    }

    /// log(ω^α S(x)) at ω = 1 − x = e^{−u}.
    fn ln_scaled(&self, u: f64) -> f64 {
        let om = (-u).exp();
        // λ = −log x
        let lam = -(-om).ln_1p();
        if self.alpha == 0.0 {
            return self.lerch(u, lam).ln();
        }
        let x = (-lam).exp();
        let mut k = KahanSum::new();
        let mut pw = 1.0f64;
        let mut full = true;
        for (m, am) in self.a.iter().enumerate() {
            let t = am * pw;
            k.add(t);
            if m > 16 && t < 1e-18 * k.value() {
                full = false;
                break;
            }
            pw *= x;
        }
        let explicit = k.value();
        let mut total_ln = self.alpha * (-u) + explicit.ln();
        if full {
            let mm = (self.a.len() - 1) as f64;
            let e = self.kappa + 1.0;
            if e > 0.0 {
                let g = gamma_ui(e, lam * (mm + 0.5));
                if g > 0.0 {
                    // a_M M^{−κ} λ^{−κ−1} Γ(κ+1, λ(M+½)), scaled by ω^α
                    let ln_tail = self.a[self.a.len() - 1].ln() - self.kappa * mm.ln() - e * lam.ln() + g.ln();
                    let ln_explicit = explicit.ln();
                    let m = ln_tail.max(ln_explicit);
                    total_ln = self.alpha * (-u) + m + ((ln_explicit - m).exp() + (ln_tail - m).exp()).ln();
                }
            }
        }
        total_ln
    }

    /// Σ_m x^m/(m+j) at 1 − x = e^{−u}.
    fn lerch(&self, u: f64, lam: f64) -> f64 {
        let j = self.j;
        let jf = j as f64;
        let xj = (-lam * jf).exp();
        if xj > 1e-3 {
            // x^{−j}(−log(1−x) − Σ_{k<j} x^k/k)
            let mut k = KahanSum::new();
            k.add(u);
            for kk in 1..j {
                k.add(-(-lam * kk as f64).exp() / kk as f64);
            }
            k.value() / xj
        } else {
            let x = (-lam).exp();
            let mut k = KahanSum::new();
            let mut pw = 1.0;
            let mut m = 0usize;
            loop {
                let t = pw / (m as f64 + jf);
                k.add(t);
                if t < 1e-18 * k.value() {
                    break;
                }
                pw *= x;
                m += 1;
            }
            k.value()
        }
    }
}

/// Inner integral ∫|g′(z)|²|1−w̄z|^{−(2+2α)} dA_α(z) = Σ_n |e_n|² M_α(n) with e_n
/// the Taylor coefficients of g′(z)(1−w̄z)^{−(1+α)}.
pub fn inner_series(g: &Symbol, w: Complex64, alpha: f64) -> Result<f64> {
    let zero = Complex64::new(0.0, 0.0);
    let v = w.conj();
    let b = 1.0 + alpha;
    let mut k = KahanSum::new();
    let mut mom = 1.0f64; // M_α(0)
    let mut quiet = 0usize;
    let mut emit = |n: usize, e: Complex64, mom: f64, k: &mut KahanSum| -> bool {
        let t = e.norm_sqr() * mom;
        k.add(t);
        if t <= 1e-18 * k.value() {
            quiet += 1;
        } else {
            quiet = 0;
        }
        n > 16 && quiet > 64
    };
    match &g.kind {
        SymbolKind::KernelPower { a, gamma } => {
            // F = γā (1−uz)^{−(γ+1)}(1−vz)^{−b}:
            // (n+1) f_{n+1} = ((u+v)n + (γ+1)u + bv) f_n − uv(n − 1 + γ + 1 + b) f_{n−1}
            let u = a.conj();
            let s = gamma + 1.0;
            let mut f_prev = zero;
            let mut f = u * *gamma;
            let mut n = 0usize;
            loop {
                if emit(n, f, mom, &mut k) {
                    break;
                }
                let nf = n as f64;
                let next = ((u + v) * nf + u * s + v * b) * f - u * v * (nf - 1.0 + s + b) * f_prev;
                f_prev = f;
                f = next / (nf + 1.0);
                mom *= (nf + 1.0) / (nf + alpha + 2.0);
                n += 1;
                if n > MAX_SERIES_TERMS {
                    return numerical("inner series did not converge");
                }
            }
        }
        SymbolKind::LogLog => return invalid("g", "the log-log symbol has no finite coefficient form here"),
        _ => {
            let coeffs = g.coeffs(degree(g));
            let d: Vec<(usize, Complex64)> = coeffs
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(_, c)| **c != zero)
                .map(|(j, c)| (j - 1, c * j as f64))
                .collect();
            if d.is_empty() {
                return Ok(0.0);
            }
            // c_m v^m of (1−vz)^{−b}
            let mut cv: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
            let mut n = 0usize;
            loop {
                let mut e = zero;
                for (kk, dk) in &d {
                    if *kk <= n {
                        e += dk * cv[n - kk];
                    }
                }
                let top = d.last().unwrap().0;
                if n >= top && emit(n, e, mom, &mut k) {
                    break;
                }
                let nf = n as f64;
                let nxt = cv[n] * v * ((b + nf) / (nf + 1.0));
                cv.push(nxt);
                mom *= (nf + 1.0) / (nf + alpha + 2.0);
                n += 1;
                if n > MAX_SERIES_TERMS {
                    return numerical("inner series did not converge");
                }
            }
        }
    }
    Ok(k.value())
}

fn degree(g: &Symbol) -> usize {
    match &g.kind {
        SymbolKind::Taylor(b) => b.len() - 1,
        SymbolKind::Monomial(j) => *j,
        SymbolKind::Lacunary { exponents, .. } => *exponents.iter().max().unwrap_or(&0),
        _ => 0,
    }
}

/// Closed form of the α = 0 inner integral for g = (1−āz)^{−1}, via partial
/// fractions of ā(1−āz)^{−2}(1−w̄z)^{−1}. `omega_w` = 1 − |w|².
pub fn kp1_inner(a: Complex64, w: Complex64, omega_w: f64) -> Result<f64> {
    let b = a.conj();
    let c = w.conj();
    let one = Complex64::new(1.0, 0.0);
    if b.norm() == 0.0 {
        return Ok(0.0);
    }
    let gap = (b - c).norm();
    if gap < 0.25 * (1.0 - b.norm()) {
        let g = Symbol::kernel_power(a, 1.0)?;
        return inner_series(&g, w, 0.0);
    }
    let cc = c * c / ((c - b) * (c - b));
    let bb = b / (b - c);
    let aa = one - bb - cc;
    let p = aa + bb;
    let q = bb;
    let l0 = |y: Complex64| -> Complex64 {
        if y.norm() < 1e-4 {
            one + y / 2.0 + y * y / 3.0 + y * y * y / 4.0
        } else {
            -(one - y).ln() / y
        }
    };
    let y1 = b.norm_sqr();
    let l1 = l0(Complex64::new(y1, 0.0)).re;
    let t1 = p.norm_sqr() * l1
        + 2.0 * (p * q.conj()).re * (1.0 / (1.0 - y1) - l1)
        + q.norm_sqr() * (y1 / ((1.0 - y1) * (1.0 - y1)) - 1.0 / (1.0 - y1) + l1);
    let y2 = c.norm_sqr();
    let l2 = if y2 < 1e-4 {
        1.0 + y2 / 2.0 + y2 * y2 / 3.0
    } else {
        -omega_w.ln() / y2
    };
    let t2 = cc.norm_sqr() * l2;
    let y3 = b * c.conj();
    let l3 = l0(y3);
    let t3 = 2.0 * (cc.conj() * (p * l3 + q * (one / (one - y3) - l3))).re;
    Ok(b.norm_sqr() * (t1 + t2 + t3))
}

/// Exact inner integral ∫|g′(z)|²|1−w̄z|^{−(2+2α)} dA_α(z) at an outer node: the
/// partial-fraction form for (γ = 1, α = 0) kernel powers, the series otherwise.
pub fn inner_exact(g: &Symbol, nd: &Node, alpha: f64) -> Result<f64> {
    match g.kind {
        SymbolKind::KernelPower { a, gamma } if gamma == 1.0 && alpha == 0.0 => kp1_inner(a, nd.z, nd.omega),
        _ => inner_series(g, nd.z, alpha),
    }
}

/// Series oracle for X^p_α (p-th power): exact inner integrals at every node of
/// a 2-D outer grid, or the 1-D monomial form.
pub fn xpa_series(g: &Symbol, p: f64, alpha: f64, grid: &GridSpec) -> Result<(f64, f64)> {
    xpa_series_log(g, p, alpha, 0.0, grid)
}

/// As `xpa_series` with the extra outer factor (log(e/(1−|w|)))^{log_power}.
pub fn xpa_series_log(g: &Symbol, p: f64, alpha: f64, log_power: f64, grid: &GridSpec) -> Result<(f64, f64)> {
    let g0 = g.value(Complex64::new(0.0, 0.0)).norm().powf(p);
    if g.is_constant() {
        return Ok((g0, 0.0));
    }
    if let (SymbolKind::Monomial(j), true) = (&g.kind, log_power == 0.0) {
        let (v, e) = xpa_monomial(*j, p, alpha, Some(grid.clip_delta))?;
        return Ok((v + g0, e));
    }
    let f = |nd: &Node| -> f64 {
        let i = inner_exact(g, nd, alpha).unwrap_or(f64::NAN);
        outer_integrand(nd, i, p, alpha, log_power)
    };
    let (v, e) = integrate_with_error(grid, f)?;
    if !v.is_finite() {
        return numerical("inner series failed at some outer node");
    }
    Ok((v + g0, e))
}

/// ((1−|w|²)^α I)^{p/2} (1−|w|²)^{p−2} (log(e/(1−|w|)))^{log_power}.
pub(crate) fn outer_integrand(nd: &Node, inner: f64, p: f64, alpha: f64, log_power: f64) -> f64 {
    let base = (nd.omega.powf(alpha) * inner.max(0.0)).powf(0.5 * p) * nd.omega.powf(p - 2.0);
    if log_power == 0.0 {
        base
    } else {
        base * (1.0 - nd.delta.ln()).powf(log_power)
    }
}

/// Default outer grid for a symbol: focused at its boundary singularity when it has one.
pub fn default_outer_grid(g: &Symbol, clip: f64) -> GridSpec {
    match g.kind {
        SymbolKind::KernelPower { a, .. } => GridSpec::focused(clip, vec![a.arg()], 1.0 - a.norm()),
        SymbolKind::LogLog => GridSpec::focused(clip, vec![0.0], 0.0),
        _ => {
            let mut s = GridSpec::radial(clip);
            let deg = degree(g).max(1);
            s.angular = super::quadrature::AngularRule::Uniform {
                base: (4 * deg + 16).min(4096),
            };
            s
        }
    }
}
