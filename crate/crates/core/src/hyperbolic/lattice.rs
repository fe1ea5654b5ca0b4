use super::{metric_unchecked, MeasureKind, MeasureRep};
use crate::error::{invalid, numerical, Result};
use crate::special::KahanSum;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

/// Concentric-ring r-lattice. Ring 0 is the origin; ring k sits at hyperbolic
/// radius k·h with `counts[k]` equally spaced points and a half-step stagger on odd rings.
#[derive(Debug, Clone, Serialize)]
pub struct Lattice {
    pub r: f64,
    pub coverage: f64,
    pub spacing: f64,
    pub points: Vec<Complex64>,
    ring_start: Vec<usize>,
    ring_radius: Vec<f64>,
    ring_offset: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeReport {
    pub points: usize,
    pub probes: usize,
    pub covered: bool,
    /// Probe point with the largest distance to the lattice, and that distance.
    pub worst_probe: (f64, f64),
    pub max_cover_distance: f64,
    pub min_separation: f64,
    /// (R, max number of disks D(a_k, R) containing a probe point).
    pub multiplicity: Vec<(f64, usize)>,
}

fn ring_hyperbolic(rho: f64) -> f64 {
    rho.atanh()
}

impl Lattice {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn rings(&self) -> usize {
        self.ring_radius.len()
    }

    fn ring_count(&self, k: usize) -> usize {
        let end = self.ring_start.get(k + 1).copied().unwrap_or(self.points.len());
        end - self.ring_start[k]
    }

    /// Build from an explicit point list (no ring structure; queries fall back to a scan).
    pub fn from_points(r: f64, points: Vec<Complex64>) -> Result<Self> {
        for z in &points {
            crate::spaces::check_in_disk("lattice point", *z)?;
        }
        let coverage = points.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok(Self {
            r,
            coverage,
            spacing: r / 2.0,
            points,
            ring_start: Vec::new(),
            ring_radius: Vec::new(),
            ring_offset: Vec::new(),
        })
    }

    /// Indices k with β(a_k, z) ≤ radius, in increasing order.
    pub fn within(&self, z: Complex64, radius: f64) -> Vec<usize> {
        if self.ring_start.is_empty() {
            return (0..self.points.len())
                .filter(|&k| metric_unchecked(self.points[k], z) <= radius)
                .collect();
        }
        let rz = ring_hyperbolic(z.norm());
        let lo = ((rz - radius) / self.spacing).floor().max(0.0) as usize;
        let hi = (((rz + radius) / self.spacing).ceil() as usize + 1).min(self.rings() - 1);
        let tau = radius.tanh();
        let rho1 = z.norm();
        let theta = z.arg();
        let mut out = Vec::new();
        for k in lo..=hi {
            let start = self.ring_start[k];
            let n = self.ring_count(k);
            let rho2 = self.ring_radius[k];
            // Angular window from |z − w|² ≤ τ²|1 − w̄z|².
            let half = if rho1 == 0.0 || rho2 == 0.0 {
                PI
            } else {
                let c = (rho1 * rho1 + rho2 * rho2 - tau * tau * (1.0 + rho1 * rho1 * rho2 * rho2))
                    / (2.0 * rho1 * rho2 * (1.0 - tau * tau));
                if c <= -1.0 {
                    PI
                } else if c > 1.0 {
                    continue;
                } else {
                    c.acos()
                }
            };
            if n == 1 || half >= PI {
                for i in 0..n {
                    if metric_unchecked(self.points[start + i], z) <= radius {
                        out.push(start + i);
                    }
                }
                continue;
            }
            let step = 2.0 * PI / n as f64;
            let center = (theta - self.ring_offset[k]) / step;
            let w = half / step + 1.0;
            let i0 = (center - w).floor() as i64;
            let i1 = (center + w).ceil() as i64;
            let mut seen = Vec::new();
            for i in i0..=i1 {
                let idx = i.rem_euclid(n as i64) as usize;
                if seen.contains(&idx) {
                    continue;
                }
                seen.push(idx);
                if metric_unchecked(self.points[start + idx], z) <= radius {
                    out.push(start + idx);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Distance from z to the nearest lattice point.
    pub fn nearest_distance(&self, z: Complex64) -> f64 {
        let mut radius = self.spacing;
        loop {
            let hits = self.within(z, radius);
            if let Some(d) = hits.iter().map(|&k| metric_unchecked(self.points[k], z)).reduce(f64::min) {
                return d;
            }
            radius *= 2.0;
        }
    }

    /// Boundary-graded probe grid on |z| ≤ coverage: `per_octave` radii per halving of 1−|z|.
    pub fn probe_grid(&self, per_octave: usize, angular: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0)];
        let dmin = 1.0 - self.coverage;
        let mut k = 0usize;
        loop {
            let delta = 2f64.powf(-(k as f64) / per_octave as f64);
            let delta = delta.max(dmin);
            let rho = 1.0 - delta;
            if rho > 0.0 {
                // angular count scaled to the hyperbolic circumference
                let circ = 2.0 * PI * rho / (1.0 - rho * rho);
                let n = ((circ / self.spacing) as usize * angular).max(angular);
                let off = 0.37 * (k as f64);
                for i in 0..n {
                    out.push(Complex64::from_polar(rho, off + 2.0 * PI * i as f64 / n as f64));
                }
            }
            if delta <= dmin {
                break;
            }
            k += 1;
        }
        out
    }

    /// Post-hoc verification of covering, separation and multiplicity.
    pub fn verify(&self, probes: &[Complex64], radii: &[f64]) -> LatticeReport {
        let dists: Vec<f64> = probes.par_iter().map(|z| self.nearest_distance(*z)).collect();
        let (mut worst_i, mut worst) = (0usize, 0.0f64);
        for (i, d) in dists.iter().enumerate() {
            if *d > worst {
                worst = *d;
                worst_i = i;
            }
        }
        let min_sep = self.min_separation();
        let multiplicity = radii
            .iter()
            .map(|&rr| {
                let m = probes.par_iter().map(|z| self.within(*z, rr).len()).max().unwrap_or(0);
                (rr, m)
            })
            .collect();
        let wp = probes.get(worst_i).copied().unwrap_or_default();
        LatticeReport {
            points: self.len(),
            probes: probes.len(),
            covered: worst <= self.r,
            worst_probe: (wp.re, wp.im),
            max_cover_distance: worst,
            min_separation: min_sep,
            multiplicity,
        }
    }

    /// Minimum pairwise β. For ring lattices only angular neighbors in the same
    /// and the next ring need checking: rings two apart differ by 2h ≥ r in β(0, ·).
    pub fn min_separation(&self) -> f64 {
        let n = self.points.len();
        if n < 2 {
            return f64::INFINITY;
        }
        if self.ring_start.is_empty() {
            let mut m = f64::INFINITY;
            for i in 0..n {
                for j in i + 1..n {
                    m = m.min(metric_unchecked(self.points[i], self.points[j]));
                }
            }
            return m;
        }
        let per_ring: Vec<f64> = (0..self.rings())
            .into_par_iter()
            .map(|k| {
                let mut m = f64::INFINITY;
                let s = self.ring_start[k];
                let c = self.ring_count(k);
                for i in 0..c {
                    let p = self.points[s + i];
                    if c > 1 {
                        m = m.min(metric_unchecked(p, self.points[s + (i + 1) % c]));
                    }
                    if k + 1 < self.rings() {
                        for q in self.angular_neighbors(k + 1, p.arg()) {
                            m = m.min(metric_unchecked(p, self.points[q]));
                        }
                    }
                    if k + 2 < self.rings() {
                        for q in self.angular_neighbors(k + 2, p.arg()) {
                            m = m.min(metric_unchecked(p, self.points[q]));
                        }
                    }
                }
                m
            })
            .collect();
        per_ring.into_iter().fold(f64::INFINITY, f64::min)
    }

    fn angular_neighbors(&self, k: usize, theta: f64) -> Vec<usize> {
        let s = self.ring_start[k];
        let n = self.ring_count(k);
        if n == 1 {
            return vec![s];
        }
        let step = 2.0 * PI / n as f64;
        let c = ((theta - self.ring_offset[k]) / step).floor() as i64;
        let mut v: Vec<usize> = (c - 1..=c + 2).map(|i| s + i.rem_euclid(n as i64) as usize).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Ring parameters of the greedy lattice without materialized points, for
/// coverage radii so close to 1 that the point count is out of reach.
#[derive(Debug, Clone, Serialize)]
pub struct RingLattice {
    pub r: f64,
    pub coverage: f64,
    pub spacing: f64,
    /// (radius, point count, angular offset) per ring; ring 0 is the origin.
    pub rings: Vec<(f64, u64, f64)>,
}

impl RingLattice {
    /// Rings at hyperbolic spacing h = r/2 and, on each ring, the largest point
    /// count whose neighbors stay at distance ≥ h; odd rings are staggered by half a step.
    pub fn new(r: f64, coverage: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 2.0) {
            return invalid("r", format!("lattice parameter must lie in (0, 2], got {r}"));
        }
        if !(coverage > 0.0 && coverage < 1.0) {
            return invalid("r_max", format!("coverage radius must lie in (0, 1), got {coverage}"));
        }
        let h = 0.5 * r * (1.0 + 1e-9);
        let target = ring_hyperbolic(coverage) + h;
        let mut rings = vec![(0.0, 1u64, 0.0)];
        let mut k = 1usize;
        loop {
            let big_r = k as f64 * h;
            let rho = big_r.tanh();
            if rho >= 1.0 {
                return numerical(format!("ring {k} reached the boundary in double precision"));
            }
            // hyperbolic circumference in the metric |dz|/(1−|z|²)
            let circ = 2.0 * PI * rho / (1.0 - rho * rho);
            let n = ring_count(rho, h, circ);
            let offset = if k % 2 == 1 { 0.5 * 2.0 * PI / n as f64 } else { 0.0 };
            rings.push((rho, n, offset));
            if big_r >= target {
                break;
            }
            k += 1;
        }
        Ok(Self {
            r,
            coverage,
            spacing: h,
            rings,
        })
    }

    pub fn point(&self, ring: usize, i: u64) -> Complex64 {
        let (rho, n, off) = self.rings[ring];
        Complex64::from_polar(rho, off + 2.0 * PI * i as f64 / n as f64)
    }

    pub fn point_count(&self) -> u64 {
        self.rings.iter().map(|r| r.1).sum()
    }

    /// (ring, index) pairs with β(a, z) ≤ radius, in increasing order.
    pub fn within(&self, z: Complex64, radius: f64) -> Vec<(usize, u64)> {
        let rz = ring_hyperbolic(z.norm());
        let lo = ((rz - radius) / self.spacing).floor().max(0.0) as usize;
        let hi = (((rz + radius) / self.spacing).ceil() as usize + 1).min(self.rings.len() - 1);
        let tau = radius.tanh();
        let rho1 = z.norm();
        let theta = z.arg();
        let mut out = Vec::new();
        for k in lo..=hi {
            let (rho2, n, off) = self.rings[k];
            // angular window from |z − w|² ≤ τ²|1 − w̄z|²
            let half = if rho1 == 0.0 || rho2 == 0.0 {
                PI
            } else {
                let c = (rho1 * rho1 + rho2 * rho2 - tau * tau * (1.0 + rho1 * rho1 * rho2 * rho2))
                    / (2.0 * rho1 * rho2 * (1.0 - tau * tau));
                if c <= -1.0 {
                    PI
                } else if c > 1.0 {
                    continue;
                } else {
                    c.acos()
                }
            };
            let mut hits: Vec<u64> = Vec::new();
            if n <= 8 || half >= PI {
                hits.extend((0..n).filter(|&i| metric_unchecked(self.point(k, i), z) <= radius));
            } else {
                let step = 2.0 * PI / n as f64;
                let center = (theta - off) / step;
                let w = half / step + 1.0;
                let i0 = (center - w).floor() as i64;
                let i1 = (center + w).ceil() as i64;
                for i in i0..=i1 {
                    let idx = i.rem_euclid(n as i64) as u64;
                    if !hits.contains(&idx) && metric_unchecked(self.point(k, idx), z) <= radius {
                        hits.push(idx);
                    }
                }
            }
            hits.sort_unstable();
            out.extend(hits.into_iter().map(|i| (k, i)));
        }
        out
    }

    /// Luecking sum over the disks D(a, r) that meet the support of an atomic measure.
    pub fn luecking_sum(&self, mu: &MeasureRep, alpha: f64, p: f64) -> Result<f64> {
        let atoms = luecking_atoms(mu, p, self.coverage)?;
        let mut masses: BTreeMap<(usize, u64), KahanSum> = BTreeMap::new();
        for (z, w) in atoms {
            for key in self.within(z, self.r) {
                masses.entry(key).or_default().add(w);
            }
        }
        let mut s = KahanSum::new();
        for ((k, _), m) in masses {
            s.add((m.value() / (1.0 - self.rings[k].0).powf(alpha)).powf(p));
        }
        Ok(s.value())
    }
}

/// Largest n with β(ρ, ρe^{2πi/n}) ≥ h; the chord distance grows with the step.
fn ring_count(rho: f64, h: f64, circ: f64) -> u64 {
    let d = |n: u64| metric_unchecked(Complex64::from_polar(rho, 0.0), Complex64::from_polar(rho, 2.0 * PI / n as f64));
    let mut n = ((circ / h).floor() as u64).max(1);
    if n > 1 && d(n) < h {
        // bisect on n in [1, n]: d(lo) ≥ h > d(hi)
        let (mut lo, mut hi) = (1u64, n);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if d(mid) >= h {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        n = lo;
    }
    n
}

fn luecking_atoms(mu: &MeasureRep, p: f64, coverage: f64) -> Result<Vec<(Complex64, f64)>> {
    if !(p > 0.0) {
        return invalid("p", format!("exponent must be positive, got {p}"));
    }
    let atoms = match &mu.kind {
        MeasureKind::RadialDensity { .. } => {
            return invalid("mu", "radial densities must be discretized to a grid density first")
        }
        _ => mu.as_atoms().expect("atomic or grid"),
    };
    let mut out = Vec::with_capacity(atoms.len());
    for (z, w) in atoms {
        if w == 0.0 {
            continue;
        }
        if z.norm() > coverage {
            return invalid("mu", format!("atom at |z| = {} lies outside the lattice coverage {coverage}", z.norm()));
        }
        out.push((z, w));
    }
    Ok(out)
}

/// Materialized ring lattice covering |z| ≤ coverage (see `RingLattice::new`).
pub fn build_lattice(r: f64, coverage: f64) -> Result<Lattice> {
    let rl = RingLattice::new(r, coverage)?;
    let total = rl.point_count();
    if total > 50_000_000 {
        return numerical(format!("lattice would have {total} points; raise r or lower the coverage radius"));
    }
    let mut points = Vec::with_capacity(total as usize);
    let mut ring_start = Vec::new();
    let mut ring_radius = Vec::new();
    let mut ring_offset = Vec::new();
    for (k, &(rho, n, off)) in rl.rings.iter().enumerate() {
        ring_start.push(points.len());
        ring_radius.push(rho);
        ring_offset.push(off);
        for i in 0..n {
            points.push(rl.point(k, i));
        }
    }
    Ok(Lattice {
        r,
        coverage,
        spacing: rl.spacing,
        points,
        ring_start,
        ring_radius,
        ring_offset,
    })
}

/// Σ_j (μ(D(a_j, r))/(1−|a_j|)^α)^p over the lattice, μ(D_j) by membership of
/// each atom (density measures are discretized on their nodes).
pub fn luecking_sum(mu: &MeasureRep, lat: &Lattice, alpha: f64, p: f64) -> Result<f64> {
    let atoms = luecking_atoms(mu, p, lat.coverage)?;
    let mut masses: BTreeMap<usize, KahanSum> = BTreeMap::new();
    for (z, w) in atoms {
        for k in lat.within(z, lat.r) {
            masses.entry(k).or_default().add(w);
        }
    }
    let mut s = KahanSum::new();
    for (k, m) in masses {
        let a = lat.points[k];
        s.add((m.value() / (1.0 - a.norm()).powf(alpha)).powf(p));
    }
    Ok(s.value())
}

/// CSV with header `k,re,im`.
pub fn write_lattice_csv<W: Write>(lat: &Lattice, mut out: W) -> Result<()> {
    writeln!(out, "k,re,im")?;
    for (k, z) in lat.points.iter().enumerate() {
        writeln!(out, "{k},{:?},{:?}", z.re, z.im)?;
    }
    Ok(())
}
