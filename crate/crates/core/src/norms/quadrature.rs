//! Boundary-graded product quadrature on the clipped disk |z| ≤ 1 − δ_c.
//!
//! Radial panels are geometric in δ = 1 − r (`panels_per_octave` per halving),
//! each carrying a Gauss–Legendre rule. Angular rules are either uniform
//! trapezoids or composite Gauss rules graded around focus angles.

use crate::error::{invalid, Result};
use crate::special::KahanSum;
use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AngularRule {
    /// Trapezoid rule with `base` nodes on the outermost ring, growing with the ring index.
    Uniform { base: usize },
    /// Gauss panels graded geometrically around each focus angle at scale max(δ, min_scale).
    Focused {
        foci: Vec<f64>,
        order: usize,
        min_scale: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// δ_c = 1 − r_max.
    pub clip_delta: f64,
    pub panels_per_octave: usize,
    pub radial_order: usize,
    pub angular: AngularRule,
    /// Angular panels per unit of geometric grading (1 = one panel per doubling).
    pub angular_density: usize,
}

impl GridSpec {
    pub fn radial(clip_delta: f64) -> Self {
        Self {
            clip_delta,
            panels_per_octave: 2,
            radial_order: 10,
            angular: AngularRule::Uniform { base: 16 },
            angular_density: 1,
        }
    }

    pub fn focused(clip_delta: f64, foci: Vec<f64>, min_scale: f64) -> Self {
        Self {
            clip_delta,
            panels_per_octave: 2,
            radial_order: 10,
            angular: AngularRule::Focused {
                foci,
                order: 10,
                min_scale,
            },
            angular_density: 1,
        }
    }

    /// One refinement step: doubled radial panels and doubled angular resolution.
    pub fn refined(&self) -> Self {
        let mut s = self.clone();
        s.panels_per_octave *= 2;
        s.angular_density *= 2;
        if let AngularRule::Uniform { base } = &mut s.angular {
            *base *= 2;
        }
        s
    }

    pub fn with_clip(&self, clip_delta: f64) -> Self {
        let mut s = self.clone();
        s.clip_delta = clip_delta;
        s
    }

    pub fn r_max(&self) -> f64 {
        1.0 - self.clip_delta
    }

    fn validate(&self) -> Result<()> {
        if !(self.clip_delta > 0.0 && self.clip_delta < 1.0) {
            return invalid("clip", format!("clip delta must lie in (0, 1), got {}", self.clip_delta));
        }
        if self.panels_per_octave == 0 || self.radial_order < 2 || self.angular_density == 0 {
            return invalid("grid", "panel counts must be positive and orders at least 2");
        }
        match &self.angular {
            AngularRule::Uniform { base } if *base < 4 => invalid("grid", "need at least 4 angular nodes"),
            AngularRule::Focused { order, min_scale, .. } if *order < 2 || !(*min_scale >= 0.0) => {
                invalid("grid", "focused angular rule needs order >= 2 and min_scale >= 0")
            }
            _ => Ok(()),
        }
    }
}

/// Quadrature node in polar form. `omega` = 1 − |z|² computed without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub z: Complex64,
    pub delta: f64,
    pub theta: f64,
    pub omega: f64,
    /// Weight for the normalized area measure dA = dx dy/π.
    pub weight: f64,
}

impl Node {
    /// 1 − āz at this node, formed from (δ, θ) so that it stays accurate when z and a
    /// are both close to the same boundary point.
    pub fn one_minus_conj_times(&self, a: Complex64) -> Complex64 {
        let s = a.norm();
        let rho = s * (1.0 - self.delta);
        let one_minus_rho = (1.0 - s) + s * self.delta;
        let psi = self.theta - a.arg();
        let half = (0.5 * psi).sin();
        Complex64::new(one_minus_rho + 2.0 * rho * half * half, -rho * psi.sin())
    }
}

/// One radial ring with its angular nodes.
#[derive(Debug, Clone)]
pub struct Ring {
    pub delta: f64,
    pub r: f64,
    pub omega: f64,
    /// r dr/π weight of the ring (angular weights sum to 2π).
    pub radial_weight: f64,
    pub thetas: Vec<f64>,
    pub angular_weights: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub spec: GridSpec,
    pub rings: Vec<Ring>,
}

fn gl_on(rule: &GaussLegendre, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    rule.as_node_weight_pairs().iter().map(move |&(x, w)| (c + h * x, h * w))
}

/// Breakpoints in [−π, π] graded around each focus.
fn angular_breakpoints(foci: &[f64], scale: f64, density: usize) -> Vec<f64> {
    let mut pts = vec![-PI, PI];
    for k in 0..8 {
        pts.push(-PI + k as f64 * PI / 4.0);
    }
    let step = 2f64.powf(1.0 / density as f64);
    for &f in foci {
        let f = (f + PI).rem_euclid(2.0 * PI) - PI;
        pts.push(f);
        let mut w = 0.25 * scale;
        while w < PI {
            for s in [f - w, f + w] {
                let t = (s + PI).rem_euclid(2.0 * PI) - PI;
                pts.push(t);
            }
            w *= step;
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    pts
}

impl QuadratureGrid {
    pub fn new(spec: &GridSpec) -> Result<Self> {
        spec.validate()?;
        let rrule = GaussLegendre::new(spec.radial_order).expect("order >= 2");
        let arule = match &spec.angular {
            AngularRule::Focused { order, .. } => Some(GaussLegendre::new(*order).expect("order >= 2")),
            _ => None,
        };
        // Radial panel edges in δ: 1, 2^{−1/s}, ..., down to δ_c.
        let s = spec.panels_per_octave as f64;
        let mut edges = vec![1.0];
        let mut k = 1.0;
        loop {
            let d = 2f64.powf(-k / s);
            if d <= spec.clip_delta * (1.0 + 1e-12) {
                break;
            }
            edges.push(d);
            k += 1.0;
        }
        edges.push(spec.clip_delta);
        let mut rings = Vec::new();
        for (ring_idx, w) in edges.windows(2).enumerate() {
            let (hi, lo) = (w[0], w[1]);
            for (delta, wd) in gl_on(&rrule, lo, hi).collect::<Vec<_>>() {
                let r = 1.0 - delta;
                let omega = delta * (2.0 - delta);
                let (thetas, angular_weights) = match (&spec.angular, &arule) {
                    (AngularRule::Uniform { base }, _) => {
                        let n = base * (1 + ring_idx / (4 * spec.panels_per_octave));
                        let h = 2.0 * PI / n as f64;
                        ((0..n).map(|i| -PI + i as f64 * h).collect(), vec![h; n])
                    }
                    (AngularRule::Focused { foci, min_scale, .. }, Some(ar)) => {
                        let scale = delta.max(*min_scale);
                        let bps = angular_breakpoints(foci, scale, spec.angular_density);
                        let mut t = Vec::new();
                        let mut wt = Vec::new();
                        for b in bps.windows(2) {
                            for (x, ww) in gl_on(ar, b[0], b[1]) {
                                t.push(x);
                                wt.push(ww);
                            }
                        }
                        (t, wt)
                    }
                    _ => unreachable!(),
                };
                rings.push(Ring {
                    delta,
                    r,
                    omega,
                    radial_weight: wd * r / PI,
                    thetas,
                    angular_weights,
                });
            }
        }
        Ok(Self {
            spec: spec.clone(),
            rings,
        })
    }

    pub fn node_count(&self) -> usize {
        self.rings.iter().map(|r| r.thetas.len()).sum()
    }

    pub fn total_weight(&self) -> f64 {
        let mut k = KahanSum::new();
        for ring in &self.rings {
            let a: f64 = ring.angular_weights.iter().sum();
            k.add(ring.radial_weight * a);
        }
        k.value()
    }

    /// ∫ f dA over the clipped disk. Rings are evaluated in parallel and
    /// reduced in ring order, so the result does not depend on the thread count.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&Node) -> f64 + Sync,
    {
        let parts: Vec<f64> = self
            .rings
            .par_iter()
            .map(|ring| {
                let mut k = KahanSum::new();
                for (t, w) in ring.thetas.iter().zip(&ring.angular_weights) {
                    let node = Node {
                        z: Complex64::from_polar(ring.r, *t),
                        delta: ring.delta,
                        theta: *t,
                        omega: ring.omega,
                        weight: ring.radial_weight * w,
                    };
                    k.add(w * f(&node));
                }
                ring.radial_weight * k.value()
            })
            .collect();
        let mut k = KahanSum::new();
        for p in parts {
            k.add(p);
        }
        k.value()
    }

    /// Same as `integrate` on the calling thread (for use inside parallel outer loops).
    pub fn integrate_serial<F>(&self, f: F) -> f64
    where
        F: Fn(&Node) -> f64,
    {
        let mut total = KahanSum::new();
        for ring in &self.rings {
            let mut k = KahanSum::new();
            for (t, w) in ring.thetas.iter().zip(&ring.angular_weights) {
                let node = Node {
                    z: Complex64::from_polar(ring.r, *t),
                    delta: ring.delta,
                    theta: *t,
                    omega: ring.omega,
                    weight: ring.radial_weight * w,
                };
                k.add(w * f(&node));
            }
            total.add(ring.radial_weight * k.value());
        }
        total.value()
    }

    /// Per-ring angular averages (1/2π)∫ f dθ.
    pub fn ring_means<F>(&self, f: F) -> Vec<(f64, f64)>
    where
        F: Fn(&Node) -> f64 + Sync,
    {
        self.rings
            .par_iter()
            .map(|ring| {
                let mut k = KahanSum::new();
                for (t, w) in ring.thetas.iter().zip(&ring.angular_weights) {
                    let node = Node {
                        z: Complex64::from_polar(ring.r, *t),
                        delta: ring.delta,
                        theta: *t,
                        omega: ring.omega,
                        weight: ring.radial_weight * w,
                    };
                    k.add(w * f(&node));
                }
                (ring.delta, k.value() / (2.0 * PI))
            })
            .collect()
    }

    /// Flat node list.
    pub fn nodes(&self) -> Vec<Node> {
        let mut out = Vec::with_capacity(self.node_count());
        for ring in &self.rings {
            for (t, w) in ring.thetas.iter().zip(&ring.angular_weights) {
                out.push(Node {
                    z: Complex64::from_polar(ring.r, *t),
                    delta: ring.delta,
                    theta: *t,
                    omega: ring.omega,
                    weight: ring.radial_weight * w,
                });
            }
        }
        out
    }
}

/// Value on `spec` and |difference| to one refinement as the error estimate.
pub fn integrate_with_error<F>(spec: &GridSpec, f: F) -> Result<(f64, f64)>
where
    F: Fn(&Node) -> f64 + Sync,
{
    let base = QuadratureGrid::new(spec)?.integrate(&f);
    let fine = QuadratureGrid::new(&spec.refined())?.integrate(&f);
    Ok((fine, (fine - base).abs()))
}

/// Composite Gauss–Legendre on [a, b] with `panels` geometric panels toward `b`
/// (ratio 1/2 in the distance to b), used for 1-D radial integrals.
pub fn graded_nodes_toward(a: f64, b: f64, min_gap: f64, order: usize, per_octave: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(order.max(2)).expect("order >= 2");
    let len = b - a;
    let mut edges = vec![a];
    let mut k = 1.0;
    loop {
        let gap = len * 2f64.powf(-k / per_octave as f64);
        if gap <= min_gap {
            break;
        }
        edges.push(b - gap);
        k += 1.0;
    }
    edges.push(b - min_gap.min(len));
    let mut out = Vec::new();
    for w in edges.windows(2) {
        if w[1] > w[0] {
            out.extend(gl_on(&rule, w[0], w[1]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_clipped_area() {
        for spec in [
            GridSpec::radial(2f64.powi(-16)),
            GridSpec::focused(2f64.powi(-20), vec![0.0, 1.0], 0.0),
            GridSpec::focused(1e-3, vec![3.0], 0.01).refined(),
        ] {
            let g = QuadratureGrid::new(&spec).unwrap();
            let r = spec.r_max();
            assert!((g.total_weight() - r * r).abs() < 1e-12, "{spec:?}");
        }
    }

    #[test]
    fn radial_moments_exact() {
        let g = QuadratureGrid::new(&GridSpec::radial(2f64.powi(-30))).unwrap();
        // ∫|z|^{2n} dA = 1/(n+1) minus the clipped annulus
        for n in [0, 1, 5, 20] {
            let v = g.integrate(|nd| nd.z.norm_sqr().powi(n));
            let r = g.spec.r_max();
            let want = r.powi(2 * n + 2) / (n as f64 + 1.0);
            assert!((v - want).abs() < 1e-12, "n {n}: {v} vs {want}");
        }
    }

    #[test]
    fn focused_rule_resolves_boundary_peak() {
        // ∫ |1 − āz|^{-4}(1−|z|²)^2 dA = Σ (n+1)²|a|^{2n} B(n+1,3)·2... closed: check via the series.
        let a = 0.999;
        let spec = GridSpec::focused(1e-12, vec![0.0], 1.0 - a);
        let (v, e) = integrate_with_error(&spec, |nd| {
            let d = (Complex64::new(1.0, 0.0) - nd.z * a).norm_sqr();
            nd.omega * nd.omega / (d * d)
        })
        .unwrap();
        // series: Σ (n+1)² a^{2n} ∫ s^n (1−s)^2 ds = Σ (n+1)² a^{2n} 2/((n+1)(n+2)(n+3))
        let mut s = 0.0;
        for n in 0..400_000 {
            let nf = n as f64;
            s += (nf + 1.0) * 2.0 / ((nf + 2.0) * (nf + 3.0)) * a.powi(2 * n);
        }
        assert!((v - s).abs() / s < 1e-8, "{v} vs {s}, err {e}");
        assert!(e / s < 1e-6);
    }

    #[test]
    fn refinement_does_not_worsen_smoke_errors() {
        let smoke: Vec<Box<dyn Fn(&Node) -> f64 + Sync>> = vec![
            Box::new(|nd: &Node| nd.z.norm_sqr().powi(3)),
            Box::new(|nd: &Node| nd.omega.powf(-0.5)),
            Box::new(|nd: &Node| (Complex64::new(1.0, 0.0) - nd.z * 0.9).norm().powi(-3) * nd.omega),
        ];
        for f in smoke.iter() {
            let s0 = GridSpec::focused(1e-8, vec![0.0], 0.0);
            let (_, e0) = integrate_with_error(&s0, f).unwrap();
            let (_, e1) = integrate_with_error(&s0.refined(), f).unwrap();
            assert!(e1 <= e0 * 1.0000001 + 1e-15, "{e0} -> {e1}");
        }
    }
}
