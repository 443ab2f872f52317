// SPDX-License-Identifier: Apache-2.0

//! Sequences, tolerances, candidate-orbit consistency and orbit classes.
//!
//! A finite prefix can only witness the exact-coincidence half of the
//! candidate-orbit condition: whenever two points coincide, their successors
//! must coincide too. [`check_candidate_consistency`] checks that condition
//! with an absolute tolerance; passing it means "not refuted", not "is a
//! candidate orbit". Density of the orbit set, which decides uniqueness of a
//! continuous realizer, is not decidable from a prefix and is not attempted.

use rug::Float;
use serde::Serialize;

use crate::error::{OrbitError, Result};
use crate::precision::{ln_f64, pow2, ComplexPoint, DEFAULT_PRECISION, MIN_PRECISION};

/// Declared asymptotic behaviour of a sequence beyond its stored prefix.
#[derive(Clone, Debug, PartialEq)]
pub enum Tail {
    TendsToZero,
    TendsToPoint(ComplexPoint),
    Escaping,
    /// Points from `index` on repeat with the given period.
    PeriodicFrom { index: usize, period: usize },
    /// `|z_n| <= bound` for every n.
    Bounded(f64),
}

/// Finite prefix `z_0, z_1, …` of a complex sequence at a fixed precision.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitSequence {
    points: Vec<ComplexPoint>,
    precision_bits: u32,
    tail: Option<Tail>,
}

impl OrbitSequence {
    /// Validates and rounds every point to `precision_bits`.
    pub fn new(points: Vec<ComplexPoint>, precision_bits: u32, tail: Option<Tail>) -> Result<Self> {
        if points.len() < 2 {
            return Err(OrbitError::TooShort {
                len: points.len(),
                min: 2,
            });
        }
        if precision_bits < MIN_PRECISION {
            return Err(OrbitError::PrecisionTooLow(precision_bits));
        }
        if let Some(i) = points.iter().position(|z| !z.is_finite()) {
            return Err(OrbitError::NonFinite(i));
        }
        if let Some(Tail::PeriodicFrom { period, .. }) = &tail {
            if *period == 0 {
                return Err(OrbitError::InvalidParameter("period must be positive".into()));
            }
        }
        let points = points
            .into_iter()
            .map(|z| z.with_prec(precision_bits))
            .collect();
        Ok(OrbitSequence {
            points,
            precision_bits,
            tail,
        })
    }

    pub fn from_f64(values: &[(f64, f64)], precision_bits: u32, tail: Option<Tail>) -> Result<Self> {
        let points = values
            .iter()
            .map(|&(re, im)| ComplexPoint::from_f64(re, im, precision_bits))
            .collect();
        Self::new(points, precision_bits, tail)
    }

    /// Real sequence given as decimal strings, parsed at `precision_bits`.
    pub fn from_decimal_reals(values: &[&str], precision_bits: u32, tail: Option<Tail>) -> Result<Self> {
        let points = values
            .iter()
            .map(|s| ComplexPoint::parse(s, "0", precision_bits))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, precision_bits, tail)
    }

    pub fn points(&self) -> &[ComplexPoint] {
        &self.points
    }

    pub fn point(&self, n: usize) -> &ComplexPoint {
        &self.points[n]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn tail(&self) -> Option<&Tail> {
        self.tail.as_ref()
    }

    pub fn with_tail(mut self, tail: Option<Tail>) -> Self {
        self.tail = tail;
        self
    }

    pub fn moduli(&self) -> Vec<Float> {
        self.points.iter().map(ComplexPoint::abs).collect()
    }

    /// Same sequence with every point multiplied by `factor`.
    pub fn scaled(&self, factor: &ComplexPoint) -> Self {
        OrbitSequence {
            points: self.points.iter().map(|z| z * factor).collect(),
            precision_bits: self.precision_bits,
            tail: self.tail.clone(),
        }
    }

    /// Checks a declared `PeriodicFrom` tail against the prefix.
    pub fn check_tail(&self, tol: &ToleranceConfig) -> Result<()> {
        if let Some(Tail::PeriodicFrom { index, period }) = &self.tail {
            for k in *index..self.len() {
                let Some(later) = self.points.get(k + period) else {
                    break;
                };
                if self.points[k].distance(later) > tol.eq_tol {
                    return Err(OrbitError::TailViolated(format!(
                        "z_{k} and z_{} differ beyond eq_tol",
                        k + period
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Tolerances shared by the consistency, classification and verification
/// checks. `eq_tol` is absolute; `rel_tol` scales with `1 + |z|`. Comparisons
/// only make sense when `eq_tol` is not below `rel_tol` times the largest
/// modulus in play, otherwise rounding noise in large points reads as a
/// mismatch.
#[derive(Clone, Debug, PartialEq)]
pub struct ToleranceConfig {
    pub eq_tol: Float,
    pub rel_tol: Float,
    pub escape_radius: f64,
}

impl ToleranceConfig {
    pub fn new(eq_tol: f64, rel_tol: f64, escape_radius: f64) -> Result<Self> {
        for (name, v) in [("eq_tol", eq_tol), ("rel_tol", rel_tol), ("escape_radius", escape_radius)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(OrbitError::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(ToleranceConfig {
            eq_tol: Float::with_val(64, eq_tol),
            rel_tol: Float::with_val(64, rel_tol),
            escape_radius,
        })
    }

    /// `eq_tol = rel_tol = 2^-(bits-16)`, escape radius `10^6`.
    pub fn for_precision(bits: u32) -> Self {
        let t = pow2(64, -(i64::from(bits) - 16));
        ToleranceConfig {
            eq_tol: t.clone(),
            rel_tol: t,
            escape_radius: 1e6,
        }
    }

    /// Tolerances given as powers of two, for thresholds below the binary64
    /// range.
    pub fn from_log2(eq_log2: i64, rel_log2: i64, escape_radius: f64) -> Self {
        ToleranceConfig {
            eq_tol: pow2(64, eq_log2),
            rel_tol: pow2(64, rel_log2),
            escape_radius,
        }
    }

    pub fn with_escape_radius(mut self, radius: f64) -> Self {
        self.escape_radius = radius;
        self
    }

    /// `|a - b| <= rel_tol·(1 + |b|)`.
    pub fn close_rel(&self, a: &ComplexPoint, b: &ComplexPoint) -> bool {
        a.distance(b) <= self.rel_bound(b)
    }

    pub fn rel_bound(&self, b: &ComplexPoint) -> Float {
        let scale = b.abs() + 1u32;
        Float::with_val(scale.prec().max(64), &self.rel_tol * &scale)
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self::for_precision(DEFAULT_PRECISION)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub consistent: bool,
    /// Lexicographically least `(p, q)` with `z_p = z_q` and `z_{p+1} != z_{q+1}`.
    pub witness: Option<(usize, usize)>,
    /// Pairs within `2^20·eq_tol` of each other but not equal. Reported only.
    pub near_coincidences: Vec<(usize, usize)>,
    pub pairs_checked: usize,
}

const NEAR_FACTOR_LOG2: i32 = 20;
const NEAR_REPORT_LIMIT: usize = 32;

/// Finite-prefix consistency: fails iff some `p < q < len-1` has
/// `|z_p - z_q| <= eq_tol` while `|z_{p+1} - z_{q+1}| > rel_tol·(1+|z_{p+1}|)`.
pub fn check_candidate_consistency(seq: &OrbitSequence, tol: &ToleranceConfig) -> Result<ConsistencyReport> {
    let len = seq.len();
    if len < 2 {
        return Err(OrbitError::TooShort { len, min: 2 });
    }
    let pts = seq.points();
    let eq_sq = Float::with_val(64, tol.eq_tol.square_ref());
    let near_sq = Float::with_val(64, &eq_sq << (2 * NEAR_FACTOR_LOG2));
    let mut near = Vec::new();
    let mut pairs = 0;
    for p in 0..len.saturating_sub(1) {
        for q in (p + 1)..(len - 1) {
            pairs += 1;
            let d = (&pts[p] - &pts[q]).abs_sq();
            if d <= eq_sq {
                if !tol.close_rel(&pts[q + 1], &pts[p + 1]) {
                    return Ok(ConsistencyReport {
                        consistent: false,
                        witness: Some((p, q)),
                        near_coincidences: near,
                        pairs_checked: pairs,
                    });
                }
            } else if d <= near_sq && near.len() < NEAR_REPORT_LIMIT {
                near.push((p, q));
            }
        }
    }
    Ok(ConsistencyReport {
        consistent: true,
        witness: None,
        near_coincidences: near,
        pairs_checked: pairs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrbitTag {
    Periodic,
    Escaping,
    Bounded,
    Bungee,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitClass {
    pub tag: OrbitTag,
    pub evidence: String,
    /// True only when the class comes from declared tail metadata.
    pub exact: bool,
}

/// First pair `p < q` with `|z_p - z_q| <= eq_tol`.
pub fn first_repeat(seq: &OrbitSequence, tol: &ToleranceConfig) -> Option<(usize, usize)> {
    let pts = seq.points();
    let eq_sq = Float::with_val(64, tol.eq_tol.square_ref());
    (1..pts.len()).find_map(|q| (0..q).find(|&p| (&pts[p] - &pts[q]).abs_sq() <= eq_sq).map(|p| (p, q)))
}

pub fn classify_orbit(seq: &OrbitSequence, tol: &ToleranceConfig) -> Result<OrbitClass> {
    let report = check_candidate_consistency(seq, tol)?;
    if let Some((p, q)) = report.witness {
        return Err(OrbitError::Inconsistent { p, q });
    }
    if let Some(tail) = seq.tail() {
        seq.check_tail(tol)?;
        let (tag, evidence) = match tail {
            Tail::PeriodicFrom { index, period } => (
                OrbitTag::Periodic,
                format!("declared periodic from index {index} with period {period}"),
            ),
            Tail::Escaping => (OrbitTag::Escaping, "declared escaping tail".to_string()),
            Tail::TendsToZero => (OrbitTag::Bounded, "declared tail tends to 0".to_string()),
            Tail::TendsToPoint(z) => (OrbitTag::Bounded, format!("declared tail tends to {z}")),
            Tail::Bounded(l) => (OrbitTag::Bounded, format!("declared bound |z_n| <= {l}")),
        };
        return Ok(OrbitClass {
            tag,
            evidence,
            exact: true,
        });
    }

    if let Some((p, q)) = first_repeat(seq, tol) {
        return Ok(OrbitClass {
            tag: OrbitTag::Periodic,
            evidence: format!("z_{p} = z_{q} within eq_tol"),
            exact: false,
        });
    }

    let moduli = seq.moduli();
    let radius = Float::with_val(64, tol.escape_radius);
    let window = seq.len().div_ceil(4);
    let tail = &moduli[seq.len() - window..];
    let increasing = tail.windows(2).all(|w| w[0] < w[1]);
    if increasing && tail.iter().all(|m| *m > radius) {
        return Ok(OrbitClass {
            tag: OrbitTag::Escaping,
            evidence: format!(
                "last {window} moduli strictly increase and exceed {}",
                tol.escape_radius
            ),
            exact: false,
        });
    }
    let max = moduli.iter().max_by(|a, b| a.partial_cmp(b).unwrap()).unwrap();
    if *max <= radius {
        return Ok(OrbitClass {
            tag: OrbitTag::Bounded,
            evidence: format!("max modulus {:.6e} <= {}", max.to_f64(), tol.escape_radius),
            exact: false,
        });
    }
    Ok(OrbitClass {
        tag: OrbitTag::Bungee,
        evidence: format!(
            "max modulus {:.6e} exceeds {} but the tail is not escaping",
            max.to_f64(),
            tol.escape_radius
        ),
        exact: false,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeHint {
    pub degree: Option<u32>,
    pub mean: f64,
    pub stddev: f64,
    pub residual: f64,
    pub ratios: Vec<f64>,
}

const HINT_TOL: f64 = 0.05;

/// Degree a polynomial realizer would need, from the limit of
/// `log|z_{n+1}| / log|z_n|` over the last `⌈len/2⌉` ratios.
pub fn polynomial_degree_hint(seq: &OrbitSequence) -> Result<DegreeHint> {
    let len = seq.len();
    let count = len.div_ceil(2).min(len - 1);
    let start = len - 1 - count;
    let moduli = seq.moduli();
    let logs: Vec<f64> = (start..len)
        .map(|n| {
            let m = &moduli[n];
            if *m == 1u32 {
                return Err(OrbitError::UnitModulus(n));
            }
            if m.is_zero() {
                return Err(OrbitError::ZeroModulus(n));
            }
            Ok(ln_f64(m))
        })
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = logs.windows(2).map(|w| w[1] / w[0]).collect();
    let k = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / k;
    let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / k;
    let stddev = var.sqrt();
    let nearest = mean.round();
    let residual = (mean - nearest).abs();
    let degree = (stddev < HINT_TOL && residual < HINT_TOL && nearest >= 1.0).then_some(nearest as u32);
    Ok(DegreeHint {
        degree,
        mean,
        stddev,
        residual,
        ratios,
    })
}
