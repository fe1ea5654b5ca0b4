use super::check_in_disk;
use crate::error::{invalid, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, LN_2};

/// Tagged analytic symbol g.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolKind {
    /// Polynomial given by b_0..b_M.
    Taylor(Vec<Complex64>),
    /// g(z) = z^j.
    Monomial(usize),
    /// g(z) = (1 − āz)^{−γ}.
    KernelPower { a: Complex64, gamma: f64 },
    /// g(z) = log log(e/(1 − z)).
    LogLog,
    /// g(z) = Σ a_k z^{n_k} with n_{k+1}/n_k ≥ ratio > 1.
    Lacunary {
        coeffs: Vec<f64>,
        exponents: Vec<usize>,
        ratio: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    pub kind: SymbolKind,
    /// Default coefficient truncation M.
    pub truncation: usize,
}

/// Truncated Taylor coefficients with diagnostics.
#[derive(Debug, Clone)]
pub struct SymbolCoeffs {
    pub coeffs: Vec<Complex64>,
    /// Bound on sup_{|z| ≤ radius} |g − Σ_{k≤M} b_k z^k|, when one is known.
    pub tail_bound: Option<f64>,
    pub radius: f64,
    /// Lacunary terms beyond M: (n_k, a_k).
    pub dropped: Vec<(usize, f64)>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl Symbol {
    pub fn taylor(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return invalid("coeffs", "need at least one coefficient");
        }
        if coeffs.iter().any(|b| !(b.re.is_finite() && b.im.is_finite())) {
            return invalid("coeffs", "coefficients must be finite");
        }
        let m = coeffs.len() - 1;
        Ok(Self {
            kind: SymbolKind::Taylor(coeffs),
            truncation: m,
        })
    }

    pub fn constant(v: f64) -> Self {
        Self {
            kind: SymbolKind::Taylor(vec![c(v)]),
            truncation: 0,
        }
    }

    pub fn monomial(j: usize) -> Result<Self> {
        if j == 0 {
            return invalid("j", "monomial degree must be positive");
        }
        Ok(Self {
            kind: SymbolKind::Monomial(j),
            truncation: j,
        })
    }

    pub fn kernel_power(a: Complex64, gamma: f64) -> Result<Self> {
        check_in_disk("a", a)?;
        if !(gamma > 0.0) || !gamma.is_finite() {
            return invalid("gamma", format!("need gamma > 0, got {gamma}"));
        }
        Ok(Self {
            kind: SymbolKind::KernelPower { a, gamma },
            truncation: 1024,
        })
    }

    pub fn loglog() -> Self {
        Self {
            kind: SymbolKind::LogLog,
            truncation: 1024,
        }
    }

    pub fn lacunary(coeffs: Vec<f64>, exponents: Vec<usize>, ratio: f64) -> Result<Self> {
        if coeffs.len() != exponents.len() || coeffs.is_empty() {
            return invalid("lacunary", "coefficient and exponent lists must have equal nonzero length");
        }
        if !(ratio > 1.0) {
            return invalid("ratio", format!("lacunary ratio must exceed 1, got {ratio}"));
        }
        if exponents[0] == 0 {
            return invalid("exponents", "exponents must be positive");
        }
        for w in exponents.windows(2) {
            if (w[1] as f64) < ratio * w[0] as f64 {
                return invalid(
                    "exponents",
                    format!("gap condition n_(k+1)/n_k >= {ratio} fails at {} -> {}", w[0], w[1]),
                );
            }
        }
        if coeffs.iter().any(|a| !a.is_finite()) {
            return invalid("coeffs", "coefficients must be finite");
        }
        let m = *exponents.last().unwrap();
        Ok(Self {
            kind: SymbolKind::Lacunary {
                coeffs,
                exponents,
                ratio,
            },
            truncation: m,
        })
    }

    pub fn with_truncation(mut self, m: usize) -> Self {
        self.truncation = m;
        self
    }

    /// True when g′ ≡ 0.
    pub fn is_constant(&self) -> bool {
        match &self.kind {
            SymbolKind::Taylor(b) => b.iter().skip(1).all(|v| *v == c(0.0)),
            SymbolKind::KernelPower { a, .. } => *a == c(0.0),
            SymbolKind::Lacunary { coeffs, .. } => coeffs.iter().all(|v| *v == 0.0),
            _ => false,
        }
    }

    /// All Taylor coefficients real.
    pub fn is_real(&self) -> bool {
        match &self.kind {
            SymbolKind::Taylor(b) => b.iter().all(|v| v.im == 0.0),
            SymbolKind::KernelPower { a, .. } => a.im == 0.0,
            _ => true,
        }
    }

    /// Number of nonzero Taylor coefficients, when finite.
    pub fn sparsity(&self) -> Option<usize> {
        match &self.kind {
            SymbolKind::Taylor(b) => Some(b.iter().filter(|v| **v != c(0.0)).count()),
            SymbolKind::Monomial(_) => Some(1),
            SymbolKind::Lacunary { coeffs, .. } => Some(coeffs.iter().filter(|v| **v != 0.0).count()),
            _ => None,
        }
    }

    /// Taylor coefficients b_0..b_M.
    pub fn coeffs(&self, m: usize) -> SymbolCoeffs {
        self.coeffs_on(m, 0.5)
    }

    /// Taylor coefficients b_0..b_M with the tail bound taken on |z| ≤ r.
    pub fn coeffs_on(&self, m: usize, r: f64) -> SymbolCoeffs {
        let zero = c(0.0);
        let mut out = vec![zero; m + 1];
        let mut tail_bound = Some(0.0);
        let mut dropped = Vec::new();
        match &self.kind {
            SymbolKind::Taylor(b) => {
                for (k, v) in b.iter().enumerate() {
                    if k <= m {
                        out[k] = *v;
                    } else {
                        let t = tail_bound.unwrap() + v.norm() * r.powi(k as i32);
                        tail_bound = Some(t);
                    }
                }
            }
            SymbolKind::Monomial(j) => {
                if *j <= m {
                    out[*j] = c(1.0);
                } else {
                    tail_bound = Some(r.powi(*j as i32));
                }
            }
            SymbolKind::KernelPower { a, gamma } => {
                let ac = a.conj();
                let mut v = c(1.0);
                out[0] = v;
                for k in 1..=m {
                    v *= ac * ((gamma + k as f64 - 1.0) / k as f64);
                    out[k] = v;
                }
                let next = v * ac * ((gamma + m as f64) / (m as f64 + 1.0));
                let mf = m as f64;
                let q = a.norm() * r * (1.0f64).max((gamma + mf + 1.0) / (mf + 2.0));
                tail_bound = if q < 1.0 {
                    Some(next.norm() * r.powi(m as i32 + 1) / (1.0 - q))
                } else {
                    None
                };
            }
            SymbolKind::LogLog => {
                let g = loglog_coeffs(m);
                for (k, v) in g.into_iter().enumerate() {
                    out[k] = c(v);
                }
                tail_bound = Some(loglog_tail(m, r));
            }
            SymbolKind::Lacunary {
                coeffs, exponents, ..
            } => {
                let mut t = 0.0;
                for (a, n) in coeffs.iter().zip(exponents) {
                    if *n <= m {
                        out[*n] = c(*a);
                    } else {
                        dropped.push((*n, *a));
                        t += a.abs() * r.powi(*n as i32);
                    }
                }
                tail_bound = Some(t);
            }
        }
        SymbolCoeffs {
            coeffs: out,
            tail_bound,
            radius: r,
            dropped,
        }
    }

    /// g(z).
    pub fn value(&self, z: Complex64) -> Complex64 {
        let one = c(1.0);
        match &self.kind {
            SymbolKind::Taylor(b) => horner(b, z),
            SymbolKind::Monomial(j) => z.powu(*j as u32),
            SymbolKind::KernelPower { a, gamma } => (one - a.conj() * z).powf(-gamma),
            SymbolKind::LogLog => (one - (one - z).ln()).ln(),
            SymbolKind::Lacunary {
                coeffs, exponents, ..
            } => coeffs
                .iter()
                .zip(exponents)
                .map(|(a, n)| z.powu(*n as u32) * *a)
                .sum(),
        }
    }

    /// g′(z).
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let one = c(1.0);
        match &self.kind {
            SymbolKind::Taylor(b) => {
                let d: Vec<Complex64> = b.iter().enumerate().skip(1).map(|(k, v)| v * k as f64).collect();
                horner(&d, z)
            }
            SymbolKind::Monomial(j) => z.powu(*j as u32 - 1) * *j as f64,
            SymbolKind::KernelPower { a, gamma } => {
                let ac = a.conj();
                ac * *gamma * (one - ac * z).powf(-gamma - 1.0)
            }
            SymbolKind::LogLog => {
                let u = one - z;
                one / (u * (one - u.ln()))
            }
            SymbolKind::Lacunary {
                coeffs, exponents, ..
            } => coeffs
                .iter()
                .zip(exponents)
                .map(|(a, n)| z.powu(*n as u32 - 1) * (*a * *n as f64))
                .sum(),
        }
    }

    /// g′ at z = (1−δ)e^{iθ}, with 1 − āz formed without cancellation for
    /// symbols singular on the circle.
    pub fn derivative_polar(&self, delta: f64, theta: f64) -> Complex64 {
        let one = c(1.0);
        match &self.kind {
            SymbolKind::KernelPower { a, gamma } => {
                let ra = a.norm();
                let u = one_minus_rotated(1.0 - ra, ra, delta, theta - a.arg());
                a.conj() * *gamma * u.powf(-gamma - 1.0)
            }
            SymbolKind::LogLog => {
                let u = one_minus_rotated(0.0, 1.0, delta, theta);
                one / (u * (one - u.ln()))
            }
            _ => self.derivative(Complex64::from_polar(1.0 - delta, theta)),
        }
    }

    /// g″(z).
    pub fn second_derivative(&self, z: Complex64) -> Complex64 {
        let one = c(1.0);
        match &self.kind {
            SymbolKind::Taylor(b) => {
                let d: Vec<Complex64> = b
                    .iter()
                    .enumerate()
                    .skip(2)
                    .map(|(k, v)| v * (k * (k - 1)) as f64)
                    .collect();
                horner(&d, z)
            }
            SymbolKind::Monomial(j) => {
                if *j < 2 {
                    c(0.0)
                } else {
                    z.powu(*j as u32 - 2) * (*j * (*j - 1)) as f64
                }
            }
            SymbolKind::KernelPower { a, gamma } => {
                let ac = a.conj();
                ac * ac * (*gamma * (gamma + 1.0)) * (one - ac * z).powf(-gamma - 2.0)
            }
            SymbolKind::LogLog => {
                let u = one - z;
                let h = one - u.ln();
                let hp = one / u;
                hp * hp / h - (hp / h) * (hp / h)
            }
            SymbolKind::Lacunary {
                coeffs, exponents, ..
            } => coeffs
                .iter()
                .zip(exponents)
                .filter(|(_, n)| **n >= 2)
                .map(|(a, n)| z.powu(*n as u32 - 2) * (*a * (*n * (*n - 1)) as f64))
                .sum(),
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            SymbolKind::Taylor(b) if b.len() == 1 => format!("const:{}", b[0].re),
            SymbolKind::Taylor(b) => format!("taylor:{}", b.len() - 1),
            SymbolKind::Monomial(j) => format!("monomial:{j}"),
            SymbolKind::KernelPower { a, gamma } => {
                if a.im == 0.0 {
                    format!("kernelpow:{},{}", a.re, gamma)
                } else {
                    format!("kernelpow:{}{:+}i,{}", a.re, a.im, gamma)
                }
            }
            SymbolKind::LogLog => "loglog".to_string(),
            SymbolKind::Lacunary { exponents, .. } => format!("lacunary:{}", exponents.len()),
        }
    }

    /// Parses the compact command-line form: `monomial:3`, `kernelpow:0.9,1`,
    /// `const:1`, `loglog`, `taylor:1,0,2`, `lacunary:a1/n1,a2/n2,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (head, rest) = match spec.split_once(':') {
            Some((h, r)) => (h, r),
            None => (spec, ""),
        };
        let num = |s: &str, name: &'static str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| crate::error::LabError::InvalidParameter {
                    name,
                    reason: format!("cannot parse `{s}` as a number"),
                })
        };
        match head {
            "monomial" => {
                let j = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| crate::error::LabError::InvalidParameter {
                        name: "symbol",
                        reason: format!("bad monomial degree `{rest}`"),
                    })?;
                Self::monomial(j)
            }
            "const" => Ok(Self::constant(num(rest, "symbol")?)),
            "loglog" => Ok(Self::loglog()),
            "kernelpow" => {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 2 {
                    return invalid("symbol", "kernelpow needs `a,gamma`");
                }
                Self::kernel_power(c(num(parts[0], "symbol")?), num(parts[1], "symbol")?)
            }
            "taylor" => {
                let b: Result<Vec<Complex64>> = rest.split(',').map(|s| num(s, "symbol").map(c)).collect();
                Self::taylor(b?)
            }
            "lacunary" => {
                let mut a = Vec::new();
                let mut n = Vec::new();
                for item in rest.split(',') {
                    let (x, y) = item
                        .split_once('/')
                        .ok_or_else(|| crate::error::LabError::InvalidParameter {
                            name: "symbol",
                            reason: format!("lacunary term `{item}` is not `a/n`"),
                        })?;
                    a.push(num(x, "symbol")?);
                    n.push(num(y, "symbol")? as usize);
                }
                let ratio = n
                    .windows(2)
                    .map(|w| w[1] as f64 / w[0] as f64)
                    .fold(f64::INFINITY, f64::min);
                let ratio = if ratio.is_finite() { ratio } else { 2.0 };
                Self::lacunary(a, n, ratio)
            }
            _ => invalid("symbol", format!("unknown symbol kind `{head}`")),
        }
    }

    pub fn to_doc(&self) -> SymbolDoc {
        let (kind, params, coeffs) = match &self.kind {
            SymbolKind::Taylor(b) => (
                "taylor",
                serde_json::json!({}),
                Some(b.iter().map(|v| [v.re, v.im]).collect()),
            ),
            SymbolKind::Monomial(j) => ("monomial", serde_json::json!({ "j": j }), None),
            SymbolKind::KernelPower { a, gamma } => (
                "kernel_power",
                serde_json::json!({ "a": [a.re, a.im], "gamma": gamma }),
                None,
            ),
            SymbolKind::LogLog => ("loglog", serde_json::json!({}), None),
            SymbolKind::Lacunary {
                coeffs,
                exponents,
                ratio,
            } => (
                "lacunary",
                serde_json::json!({ "coeffs": coeffs, "exponents": exponents, "ratio": ratio }),
                None,
            ),
        };
        SymbolDoc {
            kind: kind.to_string(),
            params,
            coeffs,
            truncation: self.truncation,
        }
    }

    pub fn from_doc(doc: &SymbolDoc) -> Result<Self> {
        let p = &doc.params;
        let field = |name: &'static str| -> Result<&serde_json::Value> {
            p.get(name).ok_or_else(|| crate::error::LabError::InvalidParameter {
                name,
                reason: format!("missing parameter for `{}`", doc.kind),
            })
        };
        let as_f64 = |v: &serde_json::Value, name: &'static str| -> Result<f64> {
            v.as_f64().ok_or_else(|| crate::error::LabError::InvalidParameter {
                name,
                reason: "expected a number".into(),
            })
        };
        let s = match doc.kind.as_str() {
            "taylor" => {
                let b = doc.coeffs.as_ref().ok_or_else(|| crate::error::LabError::InvalidParameter {
                    name: "coeffs",
                    reason: "taylor symbols need `coeffs`".into(),
                })?;
                Self::taylor(b.iter().map(|v| Complex64::new(v[0], v[1])).collect())?
            }
            "monomial" => {
                let j = field("j")?.as_u64().ok_or_else(|| crate::error::LabError::InvalidParameter {
                    name: "j",
                    reason: "expected a positive integer".into(),
                })?;
                Self::monomial(j as usize)?
            }
            "kernel_power" => {
                let a = field("a")?;
                let a = match a {
                    serde_json::Value::Array(v) if v.len() == 2 => {
                        Complex64::new(as_f64(&v[0], "a")?, as_f64(&v[1], "a")?)
                    }
                    v => c(as_f64(v, "a")?),
                };
                Self::kernel_power(a, as_f64(field("gamma")?, "gamma")?)?
            }
            "loglog" => Self::loglog(),
            "lacunary" => {
                let coeffs: Vec<f64> = serde_json::from_value(field("coeffs")?.clone())?;
                let exponents: Vec<usize> = serde_json::from_value(field("exponents")?.clone())?;
                let ratio = as_f64(field("ratio")?, "ratio")?;
                Self::lacunary(coeffs, exponents, ratio)?
            }
            k => return invalid("kind", format!("unknown symbol kind `{k}`")),
        };
        Ok(s.with_truncation(doc.truncation))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SymbolDoc = serde_json::from_str(text)?;
        Self::from_doc(&doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("symbol documents always serialize")
    }
}

/// Serialized form of a symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolDoc {
    pub kind: String,
    #[serde(default = "empty_params")]
    pub params: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<[f64; 2]>>,
    pub truncation: usize,
}

fn empty_params() -> serde_json::Value {
    serde_json::json!({})
}

/// 1 − ρe^{iψ} with ρ = s(1−δ) and 1 − s = d given separately.
fn one_minus_rotated(d: f64, s: f64, delta: f64, psi: f64) -> Complex64 {
    let rho = s * (1.0 - delta);
    let one_minus_rho = d + s * delta;
    let half = (0.5 * psi).sin();
    Complex64::new(one_minus_rho + 2.0 * rho * half * half, -rho * psi.sin())
}

fn horner(b: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = c(0.0);
    for v in b.iter().rev() {
        acc = acc * z + v;
    }
    acc
}

/// Coefficients of log(1 + L(z)), L(z) = Σ z^k/k, from g′h = h′.
fn loglog_coeffs(m: usize) -> Vec<f64> {
    let mut g = vec![0.0; m + 1];
    for n in 1..=m {
        let mut s = 0.0;
        for k in 1..n {
            s += k as f64 * g[k] / (n - k) as f64;
        }
        g[n] = 1.0 / n as f64 - s / n as f64;
    }
    g
}

/// Cauchy-estimate tail of the log-log series on |z| ≤ r, using the circle ρ = (1+r)/2.
fn loglog_tail(m: usize, r: f64) -> f64 {
    let rho = 0.5 * (1.0 + r);
    // On |z| = ρ: Re(1 + L) ≥ 1 − log 2 and |1 + L| ≤ 1 + log(1/(1−ρ)) + π/2.
    let upper = 1.0 + (1.0 / (1.0 - rho)).ln() + FRAC_PI_2;
    let bound = upper.ln().max(-(1.0 - LN_2).ln()) + FRAC_PI_2;
    let q = r / rho;
    bound * q.powi(m as i32 + 1) / (1.0 - q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_examples() {
        let g = Symbol::monomial(3).unwrap().coeffs(5).coeffs;
        let want = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
        assert_eq!(g.iter().map(|v| v.re).collect::<Vec<_>>(), want);
        let g = Symbol::kernel_power(c(0.5), 1.0).unwrap().coeffs(2).coeffs;
        assert_eq!(g.iter().map(|v| v.re).collect::<Vec<_>>(), [1.0, 0.5, 0.25]);
        let l = Symbol::lacunary(vec![1.0, 1.0], vec![2, 4], 2.0).unwrap();
        let g = l.coeffs(4).coeffs;
        assert_eq!(g.iter().map(|v| v.re).collect::<Vec<_>>(), [0.0, 0.0, 1.0, 0.0, 1.0]);
        let d = l.coeffs(3);
        assert_eq!(d.dropped, vec![(4, 1.0)]);
    }

    #[test]
    fn lacunary_gap_checked() {
        assert!(Symbol::lacunary(vec![1.0, 1.0], vec![3, 4], 1.5).is_err());
        assert!(Symbol::lacunary(vec![1.0], vec![3], 1.0).is_err());
    }

    #[test]
    fn loglog_series_matches_closed_form() {
        let s = Symbol::loglog();
        let z = c(0.3) + Complex64::new(0.0, 0.2);
        let b = s.coeffs_on(200, 0.5);
        let v = horner(&b.coeffs, z);
        assert!((v - s.value(z)).norm() < 1e-14);
        assert!(b.tail_bound.unwrap() < 1e-10);
        // Cauchy bound really bounds the tail
        let short = s.coeffs_on(20, z.norm());
        let err = (horner(&short.coeffs, z) - s.value(z)).norm();
        assert!(err <= short.tail_bound.unwrap());
        // g′ against differentiated series
        let d: Vec<Complex64> = b.coeffs.iter().enumerate().skip(1).map(|(k, v)| v * k as f64).collect();
        assert!((horner(&d, z) - s.derivative(z)).norm() < 1e-13);
    }

    #[test]
    fn kernel_power_tail_bounds() {
        let s = Symbol::kernel_power(c(0.9), 1.5).unwrap();
        let z = c(0.5);
        let b = s.coeffs_on(30, 0.5);
        let err = (horner(&b.coeffs, z) - s.value(z)).norm();
        assert!(err <= b.tail_bound.unwrap());
        assert!(err > 0.05 * b.tail_bound.unwrap());
    }

    #[test]
    fn second_derivatives() {
        let h = 1e-4;
        let z = c(0.2) + Complex64::new(0.0, 0.1);
        for s in [
            Symbol::loglog(),
            Symbol::kernel_power(c(0.7), 2.0).unwrap(),
            Symbol::monomial(4).unwrap(),
            Symbol::taylor(vec![c(1.0), c(2.0), c(-1.0), c(0.5)]).unwrap(),
        ] {
            let fd = (s.derivative(z + h) - s.derivative(z - h)) / (2.0 * h);
            assert!((fd - s.second_derivative(z)).norm() < 1e-6, "{}", s.label());
            let fd1 = (s.value(z + h) - s.value(z - h)) / (2.0 * h);
            assert!((fd1 - s.derivative(z)).norm() < 1e-6, "{}", s.label());
        }
    }

    #[test]
    fn json_roundtrip() {
        for s in [
            Symbol::loglog(),
            Symbol::kernel_power(Complex64::new(0.3, 0.4), 1.0).unwrap(),
            Symbol::monomial(7).unwrap(),
            Symbol::taylor(vec![c(1.0), Complex64::new(0.0, 2.0)]).unwrap(),
            Symbol::lacunary(vec![0.5, 0.25], vec![2, 8], 2.0).unwrap(),
        ] {
            let back = Symbol::from_json(&s.to_json()).unwrap();
            assert_eq!(back, s);
        }
        assert!(Symbol::from_json(r#"{"kind":"monomial","params":{"j":2},"truncation":4,"extra":1}"#).is_err());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Symbol::parse("monomial:3").unwrap().kind, SymbolKind::Monomial(3));
        assert!(Symbol::parse("const:1").unwrap().is_constant());
        assert!(Symbol::parse("kernelpow:0.9,1").is_ok());
        assert!(Symbol::parse("kernelpow:1.2,1").is_err());
        assert!(Symbol::parse("bogus").is_err());
        let l = Symbol::parse("lacunary:1/2,0.5/4,0.25/8").unwrap();
        assert_eq!(l.coeffs(8).coeffs[8].re, 0.25);
    }
}
