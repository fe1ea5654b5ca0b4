//! Norm functionals on the disk by boundary-graded quadrature, with
//! coefficient-series oracles and clip-sweep convergence verdicts.

pub mod quadrature;
pub mod series;
mod validate;

pub use quadrature::{integrate_with_error, AngularRule, GridSpec, Node, QuadratureGrid};
pub use series::{default_outer_grid, hyp2f1_equal, xpa_monomial};
pub use validate::{ict_series, validate_ict, validate_li2, IctReport, IctRow, Li2Report, Li2Row};

use crate::error::{invalid, numerical, Result};
use crate::hyperbolic::{MeasureKind, MeasureRep};
use crate::spaces::{Symbol, SymbolKind};
use crate::special::KahanSum;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Bp,
    Xpa,
    BpLog,
    Dl,
    XpaLog,
    XpaMeasure,
}

impl std::fmt::Display for Functional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Functional::Bp => "bp",
            Functional::Xpa => "xpa",
            Functional::BpLog => "bplog",
            Functional::Dl => "dl",
            Functional::XpaLog => "xpa_log",
            Functional::XpaMeasure => "xpa_measure",
        };
        f.write_str(s)
    }
}

/// A functional value on the clipped disk |z| ≤ 1 − clip.
#[derive(Debug, Clone, Serialize)]
pub struct NormResult {
    pub functional: Functional,
    pub label: String,
    pub p: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub clip: f64,
    /// Integral over the clipped disk (plus |g(0)|^p where the functional includes it).
    pub value: f64,
    /// |refined − base| quadrature estimate.
    pub error: f64,
    /// Estimated contribution of the annulus beyond the clip (not included in `value`).
    pub clip_tail: f64,
    /// Independent series value of the unclipped functional, when available.
    pub oracle: Option<f64>,
    pub oracle_error: Option<f64>,
}

impl NormResult {
    /// value + estimated clip tail.
    pub fn estimate(&self) -> f64 {
        self.value + self.clip_tail
    }

    /// p-th root of the estimate (the norm itself).
    pub fn norm(&self) -> f64 {
        match self.p {
            Some(p) => self.estimate().powf(1.0 / p),
            None => self.estimate().sqrt(),
        }
    }

    /// Error budget for comparing `estimate()` with an unclipped reference.
    pub fn combined_error(&self) -> f64 {
        self.error + 0.5 * self.clip_tail + self.oracle_error.unwrap_or(0.0) + 1e-12 * self.value.abs()
    }

    pub fn oracle_agrees(&self) -> Option<bool> {
        self.oracle.map(|o| (self.estimate() - o).abs() <= self.combined_error())
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return invalid("p", format!("need p > 1, got {p}"));
    }
    Ok(())
}

/// Clip tail estimate from the outermost ring: h(ω) ≈ h_c (ω/ω_c)^e near the boundary.
fn clip_tail_from_rings(grid: &QuadratureGrid, f: &(impl Fn(&Node) -> f64 + Sync), e: f64) -> f64 {
    let Some(last) = grid.rings.last() else { return 0.0 };
    let delta = last.delta;
    // re-evaluate the mean exactly at the clip radius
    let d = grid.spec.clip_delta;
    let om = d * (2.0 - d);
    let mut k = KahanSum::new();
    for (t, w) in last.thetas.iter().zip(&last.angular_weights) {
        let nd = Node {
            z: Complex64::from_polar(1.0 - d, *t),
            delta: d,
            theta: *t,
            omega: om,
            weight: 0.0,
        };
        k.add(w * f(&nd));
    }
    let _ = delta;
    let mean = k.value() / (2.0 * std::f64::consts::PI);
    if e <= -1.0 {
        return f64::INFINITY;
    }
    mean * om / (e + 1.0)
}

fn quad_functional(
    functional: Functional,
    g: &Symbol,
    grid: &GridSpec,
    tail_exponent: f64,
    f: impl Fn(&Node) -> f64 + Sync,
) -> Result<(f64, f64, f64)> {
    let base = QuadratureGrid::new(grid)?;
    let fine = QuadratureGrid::new(&grid.refined())?;
    let vb = base.integrate(&f);
    let vf = fine.integrate(&f);
    if !vf.is_finite() {
        return numerical(format!("{functional} integrand of {} is not finite on the grid", g.label()));
    }
    let tail = clip_tail_from_rings(&fine, &f, tail_exponent);
    Ok((vf, (vf - vb).abs(), tail))
}

/// B_p seminorm (p-th power) ∫|g′|^p (1−|z|²)^{p−2} dA, optionally plus |g(0)|^p.
pub fn bp_norm(g: &Symbol, p: f64, grid: &GridSpec, include_g0: bool) -> Result<NormResult> {
    check_p(p)?;
    let f = |nd: &Node| g.derivative_polar(nd.delta, nd.theta).norm().powf(p) * nd.omega.powf(p - 2.0);
    let (v, e, tail) = if g.is_constant() {
        (0.0, 0.0, 0.0)
    } else {
        quad_functional(Functional::Bp, g, grid, p - 2.0, f)?
    };
    let g0 = if include_g0 { g.value(Complex64::new(0.0, 0.0)).norm().powf(p) } else { 0.0 };
    let oracle = match g.kind {
        _ if g.is_constant() => Some(0.0),
        SymbolKind::Monomial(j) => Some(series::bp_monomial(j, p)),
        SymbolKind::KernelPower { a, gamma } => Some(series::bp_kernel_power(a.norm(), gamma, p)?),
        _ => None,
    };
    Ok(NormResult {
        functional: Functional::Bp,
        label: g.label(),
        p: Some(p),
        alpha: None,
        gamma: None,
        clip: grid.clip_delta,
        value: v + g0,
        error: e,
        clip_tail: tail,
        oracle: oracle.map(|o| o + g0),
        oracle_error: oracle.map(|o| 1e-12 * o),
    })
}

/// ∫|g′|² log(e/(1−|z|²)) dA.
pub fn dl_norm(g: &Symbol, grid: &GridSpec) -> Result<NormResult> {
    let f = |nd: &Node| g.derivative_polar(nd.delta, nd.theta).norm_sqr() * (1.0 - nd.omega.ln());
    let (v, e, tail) = if g.is_constant() {
        (0.0, 0.0, 0.0)
    } else {
        quad_functional(Functional::Dl, g, grid, 0.0, f)?
    };
    let oracle = match &g.kind {
        _ if g.is_constant() => Some(0.0),
        SymbolKind::Taylor(_) | SymbolKind::Monomial(_) | SymbolKind::Lacunary { .. } => {
            let deg = match &g.kind {
                SymbolKind::Taylor(b) => b.len() - 1,
                SymbolKind::Monomial(j) => *j,
                SymbolKind::Lacunary { exponents, .. } => *exponents.iter().max().unwrap(),
                _ => unreachable!(),
            };
            Some(series::dl_polynomial(&g.coeffs(deg).coeffs))
        }
        SymbolKind::KernelPower { a, gamma } => Some(series::dl_kernel_power(a.norm(), *gamma)?),
        SymbolKind::LogLog => None,
    };
    Ok(NormResult {
        functional: Functional::Dl,
        label: g.label(),
        p: None,
        alpha: None,
        gamma: None,
        clip: grid.clip_delta,
        value: v,
        error: e,
        clip_tail: tail,
        oracle,
        oracle_error: oracle.map(|o| 1e-12 * o),
    })
}

/// B_{p,log^γ} seminorm (p-th power) ∫|g′|^p (log(e/(1−|z|)))^γ (1−|z|²)^{p−2} dA.
pub fn bplog_norm(g: &Symbol, p: f64, gamma: f64, grid: &GridSpec) -> Result<NormResult> {
    check_p(p)?;
    if !(gamma > 0.0) {
        return invalid("gamma", format!("log power must be positive, got {gamma}"));
    }
    let f = |nd: &Node| {
        g.derivative_polar(nd.delta, nd.theta).norm().powf(p) * (1.0 - nd.delta.ln()).powf(gamma) * nd.omega.powf(p - 2.0)
    };
    let (v, e, tail) = if g.is_constant() {
        (0.0, 0.0, 0.0)
    } else {
        quad_functional(Functional::BpLog, g, grid, p - 2.0, f)?
    };
    let oracle = match g.kind {
        _ if g.is_constant() => Some((0.0, 0.0)),
        SymbolKind::Monomial(j) => Some(series::bplog_monomial(j, p, gamma)),
        SymbolKind::KernelPower { a, gamma: gk } => Some(series::bplog_kernel_power(a.norm(), gk, p, gamma)?),
        _ => None,
    };
    Ok(NormResult {
        functional: Functional::BpLog,
        label: g.label(),
        p: Some(p),
        alpha: None,
        gamma: Some(gamma),
        clip: grid.clip_delta,
        value: v,
        error: e,
        clip_tail: tail,
        oracle: oracle.map(|o| o.0),
        oracle_error: oracle.map(|o| o.1),
    })
}

/// Grids for the nested X^p_α quadrature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NestedSpec {
    pub outer: GridSpec,
    pub inner_clip: f64,
    pub inner_order: usize,
    pub inner_panels_per_octave: usize,
}

impl NestedSpec {
    pub fn for_symbol(g: &Symbol, outer_clip: f64) -> Self {
        let mut outer = default_outer_grid(g, outer_clip);
        outer.radial_order = 6;
        outer.panels_per_octave = 1;
        if let AngularRule::Focused { order, .. } = &mut outer.angular {
            *order = 6;
        }
        Self {
            outer,
            inner_clip: 2f64.powi(-26),
            inner_order: 6,
            inner_panels_per_octave: 1,
        }
    }

    fn refined(&self) -> Self {
        Self {
            outer: self.outer.refined(),
            inner_clip: self.inner_clip,
            inner_order: self.inner_order,
            inner_panels_per_octave: 2 * self.inner_panels_per_octave,
        }
    }
}

fn symbol_focus(g: &Symbol) -> Option<(f64, f64)> {
    match g.kind {
        SymbolKind::KernelPower { a, .. } => Some((a.arg(), 1.0 - a.norm())),
        SymbolKind::LogLog => Some((0.0, 0.0)),
        _ => None,
    }
}

/// ∫|g′(z)|² |1−w̄z|^{−(2+2α)} dA_α(z) by 2-D quadrature focused at arg w.
pub fn inner_quadrature(g: &Symbol, w: Complex64, w_delta: f64, alpha: f64, spec: &NestedSpec) -> Result<f64> {
    let mut foci = vec![w.arg()];
    let mut scale = w_delta;
    if let Some((f, s)) = symbol_focus(g) {
        foci.push(f);
        scale = scale.min(s);
    }
    let grid = GridSpec {
        clip_delta: spec.inner_clip,
        panels_per_octave: spec.inner_panels_per_octave,
        radial_order: spec.inner_order,
        angular: AngularRule::Focused {
            foci,
            order: spec.inner_order,
            min_scale: scale,
        },
        angular_density: spec.inner_panels_per_octave,
    };
    let q = QuadratureGrid::new(&grid)?;
    let wn = w.norm();
    let wa = w.arg();
    let e = 1.0 + alpha;
    Ok(q.integrate_serial(|nd| {
        // |1 − w̄z| with both near the same boundary point
        let d = one_minus_polar(wn, wa, nd);
        g.derivative_polar(nd.delta, nd.theta).norm_sqr() * d.powf(-2.0 * e) * (alpha + 1.0) * nd.omega.powf(alpha)
    }))
}

/// |1 − w̄z| for z a quadrature node and w = s e^{iφ}.
fn one_minus_polar(s: f64, phi: f64, nd: &Node) -> f64 {
    nd.one_minus_conj_times(Complex64::from_polar(s, phi)).norm()
}

fn nested_outer(
    g: &Symbol,
    ps: &[f64],
    alpha: f64,
    log_power: f64,
    spec: &NestedSpec,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let q = QuadratureGrid::new(&spec.outer)?;
    let nodes = q.nodes();
    let inner: Vec<f64> = nodes
        .par_iter()
        .map(|nd| inner_quadrature(g, nd.z, nd.delta, alpha, spec).unwrap_or(f64::NAN))
        .collect();
    if inner.iter().any(|v| !v.is_finite()) {
        return numerical("inner quadrature failed");
    }
    let mut vals = Vec::new();
    let mut tails = Vec::new();
    for &p in ps {
        let mut k = KahanSum::new();
        for (nd, i) in nodes.iter().zip(&inner) {
            k.add(nd.weight * series::outer_integrand(nd, *i, p, alpha, log_power));
        }
        vals.push(k.value());
        // tail from the outermost ring with h ~ ω^{αp/2+p−2}
        let last = q.rings.last().unwrap();
        let start = nodes.len() - last.thetas.len();
        let mut m = KahanSum::new();
        for (idx, w) in last.angular_weights.iter().enumerate() {
            m.add(w * series::outer_integrand(&nodes[start + idx], inner[start + idx], p, alpha, log_power));
        }
        let mean = m.value() / (2.0 * std::f64::consts::PI);
        let e = 0.5 * alpha * p + p - 2.0;
        tails.push(if e > -1.0 { mean * last.omega / (e + 1.0) } else { f64::INFINITY });
    }
    Ok((vals, tails))
}

/// X^p_α (p-th power) by nested quadrature for several p at once (the inner
/// integrals do not depend on p). The series oracle is evaluated on the same clip.
pub fn xpa_norm_multi(g: &Symbol, ps: &[f64], alpha: f64, spec: &NestedSpec) -> Result<Vec<NormResult>> {
    xpa_nested(Functional::Xpa, g, ps, alpha, 0.0, spec)
}

pub fn xpa_norm(g: &Symbol, p: f64, alpha: f64, spec: &NestedSpec) -> Result<NormResult> {
    Ok(xpa_norm_multi(g, &[p], alpha, spec)?.remove(0))
}

/// X^p_{0,log^{p/4}} (p-th power), 2 < p ≤ 4: the α = 0 nested functional with the
/// extra outer factor (log(e/(1−|w|)))^{p/4}.
pub fn xpa_log_norm(g: &Symbol, p: f64, spec: &NestedSpec) -> Result<NormResult> {
    if !(p > 2.0 && p <= 4.0) {
        return invalid("p", format!("need 2 < p <= 4, got {p}"));
    }
    Ok(xpa_nested(Functional::XpaLog, g, &[p], 0.0, p / 4.0, spec)?.remove(0))
}

fn xpa_nested(
    functional: Functional,
    g: &Symbol,
    ps: &[f64],
    alpha: f64,
    log_power: f64,
    spec: &NestedSpec,
) -> Result<Vec<NormResult>> {
    for &p in ps {
        check_p(p)?;
    }
    if !(alpha >= 0.0) {
        return invalid("alpha", format!("alpha must be >= 0, got {alpha}"));
    }
    let g0 = g.value(Complex64::new(0.0, 0.0)).norm();
    if g.is_constant() {
        return Ok(ps
            .iter()
            .map(|&p| NormResult {
                functional,
                label: g.label(),
                p: Some(p),
                alpha: Some(alpha),
                gamma: (log_power > 0.0).then_some(log_power),
                clip: spec.outer.clip_delta,
                value: g0.powf(p),
                error: 0.0,
                clip_tail: 0.0,
                oracle: Some(g0.powf(p)),
                oracle_error: Some(0.0),
            })
            .collect());
    }
    let (base, _) = nested_outer(g, ps, alpha, log_power, spec)?;
    let (fine, tails) = nested_outer(g, ps, alpha, log_power, &spec.refined())?;
    let mut out = Vec::new();
    for (i, &p) in ps.iter().enumerate() {
        let oracle = if matches!(g.kind, SymbolKind::LogLog) {
            None
        } else {
            let mut og = spec.outer.clone();
            og.radial_order = 10;
            og.panels_per_octave = 2;
            if let AngularRule::Focused { order, .. } = &mut og.angular {
                *order = 10;
            }
            Some(xpa_series_weighted(g, p, alpha, log_power, &og)?)
        };
        out.push(NormResult {
            functional,
            label: g.label(),
            p: Some(p),
            alpha: Some(alpha),
            gamma: (log_power > 0.0).then_some(log_power),
            clip: spec.outer.clip_delta,
            value: fine[i] + g0.powf(p),
            error: (fine[i] - base[i]).abs(),
            clip_tail: tails[i],
            oracle: oracle.map(|o| o.0),
            oracle_error: oracle.map(|o| o.1),
        });
    }
    Ok(out)
}

/// Series oracle on the clipped outer disk (no clip tail), used for comparison with
/// the nested quadrature at identical clip.
fn xpa_series_weighted(g: &Symbol, p: f64, alpha: f64, log_power: f64, grid: &GridSpec) -> Result<(f64, f64)> {
    series::xpa_series_log(g, p, alpha, log_power, grid)
}

/// Compare the nested value on the clipped disk with the oracle on the same disk.
pub fn nested_matches_oracle(r: &NormResult) -> Option<bool> {
    r.oracle.map(|o| (r.value - o).abs() <= r.error + r.oracle_error.unwrap_or(0.0) + 1e-10 * o.abs())
}

/// X^p_α(μ) = ∫((1−|w|²)^α ∫|1−w̄z|^{−(2+2α)} dμ(z))^{p/2}(1−|w|²)^{p−2} dA(w).
pub fn xpa_measure(mu: &MeasureRep, p: f64, alpha: f64, grid: &GridSpec) -> Result<NormResult> {
    if !(p > 0.0) {
        return invalid("p", format!("need p > 0, got {p}"));
    }
    if !(alpha > -1.0) {
        return invalid("alpha", format!("need alpha > -1, got {alpha}"));
    }
    let e = 1.0 + alpha;
    let result = |value: f64, error: f64, tail: f64, oracle: Option<f64>| NormResult {
        functional: Functional::XpaMeasure,
        label: "measure".into(),
        p: Some(p),
        alpha: Some(alpha),
        gamma: None,
        clip: grid.clip_delta,
        value,
        error,
        clip_tail: tail,
        oracle,
        oracle_error: oracle.map(|o| 1e-9 * o),
    };
    if mu.total_mass == 0.0 {
        return Ok(result(0.0, 0.0, 0.0, Some(0.0)));
    }
    let tail_exp = 0.5 * alpha * p + p - 2.0;
    match &mu.kind {
        MeasureKind::RadialDensity { radii, values } => {
            let rule = gauss_quad::GaussLegendre::new(16).expect("order");
            let mut pts: Vec<(f64, f64)> = Vec::new();
            for i in 0..radii.len() - 1 {
                let (r0, r1) = (radii[i], radii[i + 1]);
                let (f0, f1) = (values[i], values[i + 1]);
                let h = 0.5 * (r1 - r0);
                let c = 0.5 * (r1 + r0);
                for &(x, w) in rule.as_node_weight_pairs().iter() {
                    let r = c + h * x;
                    let fr = f0 + (f1 - f0) * (r - r0) / (r1 - r0);
                    pts.push((r, h * w * 2.0 * r * fr));
                }
            }
            let f = |nd: &Node| {
                let x = nd.z.norm_sqr();
                let mut k = KahanSum::new();
                for (r, w) in &pts {
                    k.add(w * hyp2f1_equal(e, x * r * r));
                }
                (nd.omega.powf(alpha) * k.value()).powf(0.5 * p) * nd.omega.powf(p - 2.0)
            };
            let g = Symbol::constant(0.0);
            let (v, er, tail) = quad_functional(Functional::XpaMeasure, &g, grid, tail_exp, f)?;
            Ok(result(v, er, tail, None))
        }
        _ => {
            let atoms: Vec<(Complex64, f64)> = mu.as_atoms().unwrap().into_iter().filter(|a| a.1 > 0.0).collect();
            let f = |nd: &Node| {
                let mut k = KahanSum::new();
                for (z, w) in &atoms {
                    k.add(w * nd.one_minus_conj_times(*z).norm().powf(-2.0 * e));
                }
                (nd.omega.powf(alpha) * k.value()).powf(0.5 * p) * nd.omega.powf(p - 2.0)
            };
            let g = Symbol::constant(0.0);
            let (v, er, tail) = quad_functional(Functional::XpaMeasure, &g, grid, tail_exp, f)?;
            // single atom: w^{p/2} I_{c,t}(z) with c = αp/2, t = αp/2 + p − 2
            let oracle = if atoms.len() == 1 {
                let (z, w) = atoms[0];
                let t = 0.5 * alpha * p + p - 2.0;
                ict_series(0.5 * alpha * p, t, z.norm()).ok().map(|s| w.powf(0.5 * p) * s)
            } else {
                None
            };
            Ok(result(v, er, tail, oracle))
        }
    }
}

/// Default grid for an atomic measure: focused at the atom angles.
pub fn measure_grid(mu: &MeasureRep, clip: f64) -> GridSpec {
    match mu.as_atoms() {
        Some(atoms) if !atoms.is_empty() => {
            let mut foci: Vec<f64> = atoms.iter().map(|(z, _)| z.arg()).collect();
            foci.sort_by(|a, b| a.partial_cmp(b).unwrap());
            foci.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            if foci.len() > 64 {
                return GridSpec::radial(clip);
            }
            let scale = atoms.iter().map(|(z, _)| 1.0 - z.norm()).fold(1.0, f64::min);
            GridSpec::focused(clip, foci, scale.max(0.0))
        }
        _ => GridSpec::radial(clip),
    }
}

/// Convergence verdict for a sequence of clipped values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    /// Relative growth per clip step stayed above 10% for three steps; `rate` is the last one.
    Diverging { rate: f64 },
    Undecided,
}

/// Default clip sweep δ_c = 1 − r_max.
pub const DEFAULT_CLIPS: [f64; 4] = [0.0625, 0.003_906_25, 1.52587890625e-5, 2.3283064365386963e-10];

pub const GROWTH_THRESHOLD: f64 = 0.10;

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub clips: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// Relative increments between consecutive clips.
    pub steps: Vec<f64>,
    pub verdict: Verdict,
}

/// Verdict rule: diverging when the last three relative steps are all ≥ 10%;
/// converged when the last step is below 10% and not larger than the one before.
pub fn classify(values: &[f64]) -> (Vec<f64>, Verdict) {
    let steps: Vec<f64> = values
        .windows(2)
        .map(|w| {
            if w[0] == 0.0 {
                if w[1] == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (w[1] - w[0]) / w[0].abs()
            }
        })
        .collect();
    let n = steps.len();
    let verdict = if n >= 3 && steps[n - 3..].iter().all(|s| *s >= GROWTH_THRESHOLD) {
        Verdict::Diverging { rate: steps[n - 1] }
    } else if n >= 1 && steps[n - 1].abs() < GROWTH_THRESHOLD && (n == 1 || steps[n - 1].abs() <= steps[n - 2].abs()) {
        Verdict::Converged
    } else {
        Verdict::Undecided
    };
    (steps, verdict)
}

/// Evaluate `f` at each clip and classify the trend.
pub fn clip_sweep(clips: &[f64], f: impl Fn(f64) -> Result<NormResult>) -> Result<SweepReport> {
    let mut values = Vec::new();
    let mut errors = Vec::new();
    for &c in clips {
        let r = f(c)?;
        values.push(r.value);
        errors.push(r.error);
    }
    let (steps, verdict) = classify(&values);
    Ok(SweepReport {
        clips: clips.to_vec(),
        values,
        errors,
        steps,
        verdict,
    })
}

/// One row of the kernel-power table for g_a = (1−az)^{−γ}, a ∈ [0, 1).
#[derive(Debug, Clone, Serialize)]
pub struct GaRow {
    pub a: f64,
    pub bp: f64,
    pub xp0: f64,
    pub xp0_error: f64,
    pub bplog: f64,
    pub bplog_error: f64,
    /// Only for 2 < p ≤ 4.
    pub xp0_log: Option<f64>,
    /// ‖T_{g_a}‖²_{S_2} on D with the integral norm (= DL functional).
    pub hs_sq: f64,
}

/// B_p, X^p_0, B_{p,log^{p/2}}, X^p_{0,log^{p/4}} (p-th powers) and the HS norm of T_{g_a}.
pub fn ga_norm_suite(gamma: f64, p: f64, a_values: &[f64], clip: f64) -> Result<Vec<GaRow>> {
    check_p(p)?;
    if !(gamma > 0.0) {
        return invalid("gamma", format!("need gamma > 0, got {gamma}"));
    }
    let mut rows = Vec::new();
    for &a in a_values {
        if !(0.0..1.0).contains(&a) {
            return invalid("a", format!("a must lie in [0, 1), got {a}"));
        }
        if a == 0.0 {
            rows.push(GaRow {
                a,
                bp: 0.0,
                xp0: 1.0,
                xp0_error: 0.0,
                bplog: 0.0,
                bplog_error: 0.0,
                xp0_log: (p > 2.0 && p <= 4.0).then_some(1.0),
                hs_sq: 0.0,
            });
            continue;
        }
        let g = Symbol::kernel_power(Complex64::new(a, 0.0), gamma)?;
        let bp = series::bp_kernel_power(a, gamma, p)?;
        let grid = GridSpec::focused(clip, vec![0.0], 1.0 - a);
        let (x, xe) = series::xpa_series(&g, p, 0.0, &grid)?;
        // clip tail of the X^p_0 outer integral: h ~ ω^{p−2} times a slowly growing factor
        let xt = series_outer_tail(&g, p, 0.0, &grid)?;
        let (bl, ble) = series::bplog_kernel_power(a, gamma, p, p / 2.0)?;
        let xl = if p > 2.0 && p <= 4.0 {
            Some(xpa_series_weighted(&g, p, 0.0, p / 4.0, &grid)?.0 + series_outer_tail(&g, p, p / 4.0, &grid)?)
        } else {
            None
        };
        rows.push(GaRow {
            a,
            bp,
            xp0: x + xt,
            xp0_error: xe + 0.5 * xt,
            bplog: bl,
            bplog_error: ble,
            xp0_log: xl,
            hs_sq: series::dl_kernel_power(a, gamma)?,
        });
    }
    Ok(rows)
}

fn series_outer_tail(g: &Symbol, p: f64, log_power: f64, grid: &GridSpec) -> Result<f64> {
    let q = QuadratureGrid::new(grid)?;
    let f = |nd: &Node| {
        let i = series::inner_exact(g, nd, 0.0).unwrap_or(0.0);
        series::outer_integrand(nd, i, p, 0.0, log_power)
    };
    Ok(clip_tail_from_rings(&q, &f, p - 2.0))
}

/// CSV norm table: symbol,functional,p,alpha,gamma,clip,value,err,oracle.
pub fn write_norm_table<W: Write>(rows: &[NormResult], mut out: W) -> Result<()> {
    writeln!(out, "symbol,functional,p,alpha,gamma,clip,value,err,oracle")?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{:?},{:?},{:?},{}",
            r.label,
            r.functional,
            opt(r.p),
            opt(r.alpha),
            opt(r.gamma),
            r.clip,
            r.value,
            r.error,
            opt(r.oracle)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bp_examples() {
        let g = Symbol::monomial(2).unwrap();
        let r = bp_norm(&g, 2.0, &default_outer_grid(&g, 2f64.powi(-32)), false).unwrap();
        assert!((r.estimate() - 2.0).abs() < 1e-8, "{r:?}");
        assert_eq!(r.oracle_agrees(), Some(true));
        let c = bp_norm(&Symbol::constant(3.0), 1.5, &GridSpec::radial(1e-3), false).unwrap();
        assert_eq!(c.value, 0.0);
        let c0 = bp_norm(&Symbol::constant(3.0), 1.5, &GridSpec::radial(1e-3), true).unwrap();
        assert!((c0.value - 3f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn bp_monomial_family_matches_beta() {
        for &(j, p) in &[(3usize, 1.5), (8, 3.0), (17, 2.5)] {
            let g = Symbol::monomial(j).unwrap();
            let r = bp_norm(&g, p, &default_outer_grid(&g, 2f64.powi(-40)), false).unwrap();
            assert_eq!(r.oracle_agrees(), Some(true), "{r:?}");
        }
    }

    #[test]
    fn dl_of_z() {
        let g = Symbol::monomial(1).unwrap();
        let r = dl_norm(&g, &default_outer_grid(&g, 2f64.powi(-32))).unwrap();
        assert!((r.estimate() - 2.0).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn bplog_monomial_oracle() {
        let g = Symbol::monomial(5).unwrap();
        let r = bplog_norm(&g, 2.0, 1.0, &default_outer_grid(&g, 2f64.powi(-40))).unwrap();
        assert_eq!(r.oracle_agrees(), Some(true), "{r:?}");
        assert_eq!(bplog_norm(&Symbol::constant(1.0), 2.0, 1.0, &GridSpec::radial(1e-3)).unwrap().value, 0.0);
    }

    #[test]
    fn kernel_power_quadrature_vs_series() {
        let g = Symbol::kernel_power(Complex64::from_polar(0.95, 0.7), 1.0).unwrap();
        let grid = default_outer_grid(&g, 2f64.powi(-40));
        let r = bp_norm(&g, 1.5, &grid, false).unwrap();
        assert_eq!(r.oracle_agrees(), Some(true), "{r:?}");
        let r = bplog_norm(&g, 2.0, 1.0, &grid).unwrap();
        assert_eq!(r.oracle_agrees(), Some(true), "{r:?}");
        let r = dl_norm(&g, &grid).unwrap();
        assert_eq!(r.oracle_agrees(), Some(true), "{r:?}");
    }

    #[test]
    fn measure_examples() {
        let r = xpa_measure(&MeasureRep::zero(), 2.0, 1.0, &GridSpec::radial(1e-3)).unwrap();
        assert_eq!(r.value, 0.0);
        let d0 = MeasureRep::dirac(Complex64::new(0.0, 0.0)).unwrap();
        let r = xpa_measure(&d0, 2.0, 1.0, &GridSpec::radial(2f64.powi(-30))).unwrap();
        assert!((r.estimate() - 0.5).abs() < 1e-9, "{r:?}");
        let da = MeasureRep::dirac(Complex64::new(0.9, 0.0)).unwrap();
        let r = xpa_measure(&da, 1.2, 0.5, &measure_grid(&da, 2f64.powi(-40))).unwrap();
        assert_eq!(r.oracle_agrees(), Some(true), "{r:?}");
    }

    #[test]
    fn classify_rules() {
        assert!(matches!(classify(&[1.0, 1.56, 1.99, 2.39]).1, Verdict::Diverging { .. }));
        assert_eq!(classify(&[1.0, 1.535, 1.87, 2.04]).1, Verdict::Converged);
        assert_eq!(classify(&[0.0, 0.0, 0.0]).1, Verdict::Converged);
        assert_eq!(classify(&[1.0, 1.01, 1.2]).1, Verdict::Undecided);
    }

    #[test]
    fn table_csv() {
        let g = Symbol::monomial(1).unwrap();
        let r = dl_norm(&g, &GridSpec::radial(1e-3)).unwrap();
        let mut buf = Vec::new();
        write_norm_table(&[r], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.lines().nth(1).unwrap().starts_with("monomial:1,dl,,,,"));
    }
}
