use crate::error::{invalid, Result};
use crate::spaces::check_in_disk;
use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Finite positive measure on the disk.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureKind {
    /// Σ w_i δ_{z_i}.
    Atomic(Vec<(Complex64, f64)>),
    /// f(|w|) dA(w), f piecewise linear through the samples and zero outside them.
    RadialDensity { radii: Vec<f64>, values: Vec<f64> },
    /// Density values attached to quadrature nodes with their cell weights.
    GridDensity {
        nodes: Vec<Complex64>,
        weights: Vec<f64>,
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRep {
    pub kind: MeasureKind,
    pub total_mass: f64,
}

/// JSON import format.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureDoc {
    Atomic { atoms: Vec<AtomDoc> },
    RadialDensity { radii: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    pub weight: f64,
}

impl MeasureRep {
    pub fn zero() -> Self {
        Self {
            kind: MeasureKind::Atomic(Vec::new()),
            total_mass: 0.0,
        }
    }

    pub fn atomic(atoms: Vec<(Complex64, f64)>) -> Result<Self> {
        let mut mass = 0.0;
        for (z, w) in &atoms {
            check_in_disk("atom", *z)?;
            if !(*w >= 0.0) || !w.is_finite() {
                return invalid("weight", format!("atom weights must be finite and >= 0, got {w}"));
            }
            mass += w;
        }
        Ok(Self {
            kind: MeasureKind::Atomic(atoms),
            total_mass: mass,
        })
    }

    pub fn dirac(a: Complex64) -> Result<Self> {
        Self::atomic(vec![(a, 1.0)])
    }

    pub fn radial_density(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() != values.len() || radii.len() < 2 {
            return invalid("density", "need at least two (radius, value) samples of equal length");
        }
        if radii[0] < 0.0 || *radii.last().unwrap() >= 1.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("radii", "radii must increase strictly inside [0, 1)");
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return invalid("values", "density values must be finite and >= 0");
        }
        let mut m = Self {
            kind: MeasureKind::RadialDensity { radii, values },
            total_mass: 0.0,
        };
        m.total_mass = m.radial_moment(0).map(|v| v.0).unwrap_or(0.0);
        Ok(m)
    }

    pub fn grid_density(nodes: Vec<Complex64>, weights: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.len() != values.len() {
            return invalid("density", "nodes, weights and values must have equal length");
        }
        for z in &nodes {
            check_in_disk("node", *z)?;
        }
        if values.iter().chain(weights.iter()).any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return invalid("values", "weights and density values must be finite and >= 0");
        }
        let mass = weights.iter().zip(&values).map(|(w, v)| w * v).sum();
        Ok(Self {
            kind: MeasureKind::GridDensity { nodes, weights, values },
            total_mass: mass,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        match serde_json::from_str::<MeasureDoc>(text)? {
            MeasureDoc::Atomic { atoms } => {
                Self::atomic(atoms.into_iter().map(|a| (Complex64::new(a.re, a.im), a.weight)).collect())
            }
            MeasureDoc::RadialDensity { radii, values } => Self::radial_density(radii, values),
        }
    }

    /// c·μ.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0) {
            return invalid("scale", "measures can only be scaled by c >= 0");
        }
        let kind = match &self.kind {
            MeasureKind::Atomic(a) => MeasureKind::Atomic(a.iter().map(|(z, w)| (*z, w * c)).collect()),
            MeasureKind::RadialDensity { radii, values } => MeasureKind::RadialDensity {
                radii: radii.clone(),
                values: values.iter().map(|v| v * c).collect(),
            },
            MeasureKind::GridDensity { nodes, weights, values } => MeasureKind::GridDensity {
                nodes: nodes.clone(),
                weights: weights.clone(),
                values: values.iter().map(|v| v * c).collect(),
            },
        };
        Ok(Self {
            kind,
            total_mass: self.total_mass * c,
        })
    }

    /// Point masses (atoms, or grid nodes with weight × density).
    pub fn as_atoms(&self) -> Option<Vec<(Complex64, f64)>> {
        match &self.kind {
            MeasureKind::Atomic(a) => Some(a.clone()),
            MeasureKind::GridDensity { nodes, weights, values } => Some(
                nodes
                    .iter()
                    .zip(weights.iter().zip(values))
                    .map(|(z, (w, v))| (*z, w * v))
                    .collect(),
            ),
            MeasureKind::RadialDensity { .. } => None,
        }
    }

    /// Largest |z| in the support.
    pub fn support_radius(&self) -> f64 {
        match &self.kind {
            MeasureKind::Atomic(a) => a.iter().filter(|(_, w)| *w > 0.0).map(|(z, _)| z.norm()).fold(0.0, f64::max),
            MeasureKind::RadialDensity { radii, .. } => *radii.last().unwrap(),
            MeasureKind::GridDensity { nodes, .. } => nodes.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    /// ∫|w|^{2k} dμ for a radial density, with an error estimate (16 vs 8 point rule).
    pub fn radial_moment(&self, k: usize) -> Option<(f64, f64)> {
        let MeasureKind::RadialDensity { radii, values } = &self.kind else {
            return None;
        };
        let hi = GaussLegendre::new(16).expect("degree >= 2");
        let lo = GaussLegendre::new(8).expect("degree >= 2");
        let m = 2 * k + 1;
        let mut acc = 0.0;
        let mut err = 0.0;
        for i in 0..radii.len() - 1 {
            let (r0, r1) = (radii[i], radii[i + 1]);
            let (f0, f1) = (values[i], values[i + 1]);
            let f = |r: f64| 2.0 * (f0 + (f1 - f0) * (r - r0) / (r1 - r0)) * r.powi(m as i32);
            let a = hi.integrate(r0, r1, f);
            let b = lo.integrate(r0, r1, f);
            acc += a;
            err += (a - b).abs();
        }
        Some((acc, err))
    }
}
