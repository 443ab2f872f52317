// SPDX-License-Identifier: Apache-2.0

//! Explicit entire realizers for periodic orbits.
//!
//! Given the distinct points `w_0, …, w_n` of a (pre)periodic orbit and the
//! return target `w_{n+1} = w_{n'}`, the map
//!
//! ```text
//! f(z) = Σ_k  P(z)/(z - w_k) · ( F(z) - F(w_k) + w_{k+1} / Π_{k'≠k} (w_k - w_{k'}) ),
//! P(z) = Π_k (z - w_k),
//! ```
//!
//! sends every `w_k` to `w_{k+1}` for any entire `F`. A polynomial `F`
//! gives a polynomial realizer, returned in expanded coefficient form; a
//! transcendental `F` gives a closed-form evaluator.

use rug::Float;
use serde::Serialize;

use crate::error::{OrbitError, Result};
use crate::model::{OrbitSequence, Tail, ToleranceConfig};
use crate::precision::{ComplexPoint, MIN_PRECISION};

/// Anything that can be applied to a point and iterated.
pub trait ComplexMap {
    fn apply(&self, z: &ComplexPoint) -> ComplexPoint;
}

/// Dense polynomial with coefficients in ascending powers.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<ComplexPoint>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<ComplexPoint>) -> Self {
        Polynomial { coeffs }
    }

    pub fn zero(prec: u32) -> Self {
        Polynomial {
            coeffs: vec![ComplexPoint::zero(prec)],
        }
    }

    pub fn constant(c: ComplexPoint) -> Self {
        Polynomial { coeffs: vec![c] }
    }

    /// `c·z`.
    pub fn linear(c: ComplexPoint) -> Self {
        let prec = c.prec();
        Polynomial {
            coeffs: vec![ComplexPoint::zero(prec), c],
        }
    }

    /// Π (z - root).
    pub fn from_roots(roots: &[ComplexPoint], prec: u32) -> Self {
        let mut p = Polynomial::constant(ComplexPoint::one(prec));
        for r in roots {
            p = p.mul(&Polynomial::new(vec![-r, ComplexPoint::one(prec)]));
        }
        p
    }

    pub fn coeffs(&self) -> &[ComplexPoint] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<ComplexPoint> {
        self.coeffs
    }

    /// Index of the highest non-zero coefficient; `None` for the zero
    /// polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn eval(&self, z: &ComplexPoint) -> ComplexPoint {
        let prec = self.prec().max(z.prec());
        let mut acc = ComplexPoint::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    pub fn prec(&self) -> u32 {
        self.coeffs.iter().map(ComplexPoint::prec).max().unwrap_or(MIN_PRECISION)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let prec = self.prec().max(other.prec());
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = ComplexPoint::zero(prec);
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = other.coeffs.get(i).unwrap_or(&zero);
                a + b
            })
            .collect();
        Polynomial { coeffs }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(&ComplexPoint::from_f64(-1.0, 0.0, other.prec())))
    }

    pub fn scale(&self, c: &ComplexPoint) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Full convolution at the working precision of the operands.
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let prec = self.prec().max(other.prec());
        let mut out = vec![ComplexPoint::zero(prec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Polynomial { coeffs: out }
    }

    /// Quotient of `self / (z - root)` by synthetic division, dropping the
    /// remainder.
    pub fn deflate(&self, root: &ComplexPoint) -> Polynomial {
        let n = self.coeffs.len();
        if n <= 1 {
            return Polynomial::zero(self.prec());
        }
        let mut q = vec![ComplexPoint::zero(self.prec()); n - 1];
        let mut carry = self.coeffs[n - 1].clone();
        for i in (0..n - 1).rev() {
            q[i] = carry.clone();
            carry = &self.coeffs[i] + &(&carry * root);
        }
        Polynomial { coeffs: q }
    }
}

impl ComplexMap for Polynomial {
    fn apply(&self, z: &ComplexPoint) -> ComplexPoint {
        self.eval(z)
    }
}

/// The free entire function in the realizer construction.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseFunction {
    Polynomial(Polynomial),
    /// `F(z) = c·e^z`.
    ExponentialShift(ComplexPoint),
}

impl BaseFunction {
    pub fn zero(prec: u32) -> Self {
        BaseFunction::Polynomial(Polynomial::zero(prec))
    }

    pub fn eval(&self, z: &ComplexPoint) -> ComplexPoint {
        match self {
            BaseFunction::Polynomial(p) => p.eval(z),
            BaseFunction::ExponentialShift(c) => c * &z.exp(),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self, BaseFunction::Polynomial(_))
    }
}

/// Orbit `w_0, …, w_n, w_{n+1} = w_{n'}` with `w_0..w_n` pairwise distinct.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicOrbitSpec {
    w: Vec<ComplexPoint>,
    n_prime: usize,
}

impl PeriodicOrbitSpec {
    /// `w` holds `w_0..=w_{n+1}`. Nodes must be pairwise distinct exactly and
    /// `w_{n+1}` must equal `w_{n_prime}` exactly.
    pub fn new(w: Vec<ComplexPoint>, n_prime: usize) -> Result<Self> {
        if w.len() < 2 {
            return Err(OrbitError::TooShort { len: w.len(), min: 2 });
        }
        let n = w.len() - 2;
        if n_prime > n {
            return Err(OrbitError::InvalidSpec(format!("n' = {n_prime} exceeds n = {n}")));
        }
        if !w[n + 1].same_as(&w[n_prime]) {
            return Err(OrbitError::InvalidSpec(format!("w_{} != w_{n_prime}", n + 1)));
        }
        if let Some(i) = w.iter().position(|z| !z.is_finite()) {
            return Err(OrbitError::NonFinite(i));
        }
        for j in 1..=n {
            for i in 0..j {
                if w[i].same_as(&w[j]) {
                    return Err(OrbitError::RepeatedNode { i, j });
                }
            }
        }
        Ok(PeriodicOrbitSpec { w, n_prime })
    }

    /// Finds the least `n` with `z_{n+1} = z_{n'}` (within `eq_tol`) for some
    /// `n' <= n`, and snaps `w_{n+1}` to `w_{n'}`.
    pub fn from_sequence(seq: &OrbitSequence, tol: &ToleranceConfig) -> Result<Self> {
        let pts = seq.points();
        for m in 1..pts.len() {
            if let Some(p) = (0..m).find(|&p| pts[p].distance(&pts[m]) <= tol.eq_tol) {
                let mut w = pts[..m].to_vec();
                w.push(pts[p].clone());
                return Self::new(w, p);
            }
        }
        Err(OrbitError::InvalidSpec("no repeat found in the prefix".into()))
    }

    /// `w_0..=w_n`.
    pub fn nodes(&self) -> &[ComplexPoint] {
        &self.w[..self.w.len() - 1]
    }

    /// `w_0..=w_{n+1}`.
    pub fn orbit(&self) -> &[ComplexPoint] {
        &self.w
    }

    /// `n` in `w_0..w_n`.
    pub fn n(&self) -> usize {
        self.w.len() - 2
    }

    pub fn n_prime(&self) -> usize {
        self.n_prime
    }

    pub fn period(&self) -> usize {
        self.n() + 1 - self.n_prime
    }

    pub fn prec(&self) -> u32 {
        self.w.iter().map(ComplexPoint::prec).max().unwrap_or(MIN_PRECISION)
    }

    /// `P(z) = Π_{k<=n} (z - w_k)`.
    pub fn node_polynomial(&self) -> Polynomial {
        Polynomial::from_roots(self.nodes(), self.prec())
    }

    /// `w_{k+1} / Π_{k'≠k} (w_k - w_{k'})` for each node.
    fn residue_weights(&self) -> Vec<ComplexPoint> {
        let nodes = self.nodes();
        let prec = self.prec();
        nodes
            .iter()
            .enumerate()
            .map(|(k, wk)| {
                let denom = nodes
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .fold(ComplexPoint::one(prec), |acc, (_, wj)| &acc * &(wk - wj));
                self.w[k + 1].div(&denom)
            })
            .collect()
    }

    pub fn conditioning(&self) -> Conditioning {
        let nodes = self.nodes();
        let prec = self.prec();
        let mut product = Float::with_val(prec, 1);
        let mut min_distance: Option<Float> = None;
        for j in 1..nodes.len() {
            for i in 0..j {
                let d = nodes[i].distance(&nodes[j]);
                product *= &d;
                if min_distance.as_ref().is_none_or(|m| d < *m) {
                    min_distance = Some(d);
                }
            }
        }
        let min_distance = min_distance.map_or(f64::INFINITY, |m| m.to_f64());
        let scale = nodes.iter().map(|z| z.abs().to_f64()).fold(1.0, f64::max);
        let warning = (min_distance < NEAR_NODE_RATIO * scale).then(|| {
            format!(
                "near-coincident nodes: min distance {min_distance:.3e}, Π|w_k - w_k'| = {:.3e}",
                product.to_f64()
            )
        });
        Conditioning {
            min_distance,
            pair_product: product.to_f64(),
            pair_product_log2: crate::precision::ln_f64(&product) / std::f64::consts::LN_2,
            warning,
        }
    }
}

const NEAR_NODE_RATIO: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conditioning {
    pub min_distance: f64,
    /// Π_{k<k'} |w_k - w_k'|; may underflow binary64, see the log2 field.
    pub pair_product: f64,
    pub pair_product_log2: f64,
    pub warning: Option<String>,
}

/// Expanded polynomial realizer together with the data it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizationPolynomial {
    pub poly: Polynomial,
    pub spec: PeriodicOrbitSpec,
    pub base: BaseFunction,
    /// max_k |f(w_k) - w_{k+1}| after expansion.
    pub node_residual: Float,
    pub conditioning: Conditioning,
}

impl RealizationPolynomial {
    pub fn coeffs(&self) -> &[ComplexPoint] {
        self.poly.coeffs()
    }

    pub fn degree(&self) -> Option<usize> {
        self.poly.degree()
    }
}

impl ComplexMap for RealizationPolynomial {
    fn apply(&self, z: &ComplexPoint) -> ComplexPoint {
        self.poly.eval(z)
    }
}

/// Closed-form evaluator for a transcendental base function.
#[derive(Clone, Debug, PartialEq)]
pub struct EntireRealizer {
    pub spec: PeriodicOrbitSpec,
    pub base: BaseFunction,
    weights: Vec<ComplexPoint>,
    base_at_nodes: Vec<ComplexPoint>,
}

impl ComplexMap for EntireRealizer {
    fn apply(&self, z: &ComplexPoint) -> ComplexPoint {
        let nodes = self.spec.nodes();
        let prec = self.spec.prec().max(z.prec());
        let fz = self.base.eval(z);
        let diffs: Vec<ComplexPoint> = nodes.iter().map(|w| z - w).collect();
        let mut total = ComplexPoint::zero(prec);
        for k in 0..nodes.len() {
            // P(z)/(z - w_k) without dividing, so nodes evaluate cleanly.
            let lk = diffs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .fold(ComplexPoint::one(prec), |acc, (_, d)| &acc * d);
            let bracket = &(&fz - &self.base_at_nodes[k]) + &self.weights[k];
            total = &total + &(&lk * &bracket);
        }
        total
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Realizer {
    Polynomial(RealizationPolynomial),
    Transcendental(EntireRealizer),
}

impl Realizer {
    pub fn as_polynomial(&self) -> Option<&RealizationPolynomial> {
        match self {
            Realizer::Polynomial(p) => Some(p),
            Realizer::Transcendental(_) => None,
        }
    }

    pub fn spec(&self) -> &PeriodicOrbitSpec {
        match self {
            Realizer::Polynomial(p) => &p.spec,
            Realizer::Transcendental(e) => &e.spec,
        }
    }
}

impl ComplexMap for Realizer {
    fn apply(&self, z: &ComplexPoint) -> ComplexPoint {
        match self {
            Realizer::Polynomial(p) => p.apply(z),
            Realizer::Transcendental(e) => e.apply(z),
        }
    }
}

pub fn build_periodic_realizer(spec: &PeriodicOrbitSpec, base: &BaseFunction) -> Result<Realizer> {
    let weights = spec.residue_weights();
    if let Some(i) = weights.iter().position(|c| !c.is_finite()) {
        // Unreachable for validated specs; kept for specs built at tiny precision.
        return Err(OrbitError::RepeatedNode { i, j: i });
    }
    let nodes = spec.nodes();
    let base_at_nodes: Vec<ComplexPoint> = nodes.iter().map(|w| base.eval(w)).collect();
    match base {
        BaseFunction::Polynomial(fpoly) => {
            let p = spec.node_polynomial();
            let prec = spec.prec();
            let mut total = Polynomial::zero(prec);
            for (k, wk) in nodes.iter().enumerate() {
                let lk = p.deflate(wk);
                let shifted = fpoly.sub(&Polynomial::constant(base_at_nodes[k].clone()));
                let bracket = shifted.add(&Polynomial::constant(weights[k].clone()));
                total = total.add(&lk.mul(&bracket));
            }
            let degree_cap = nodes.len() - 1 + fpoly.degree().unwrap_or(0);
            let mut coeffs = total.into_coeffs();
            coeffs.truncate(degree_cap + 1);
            let poly = Polynomial::new(coeffs);
            let node_residual = nodes
                .iter()
                .zip(&spec.orbit()[1..])
                .map(|(w, target)| poly.eval(w).distance(target))
                .fold(Float::new(prec), |a, b| if b > a { b } else { a });
            if !poly.coeffs().iter().all(ComplexPoint::is_finite) {
                return Err(OrbitError::Overflow { step: 0 });
            }
            Ok(Realizer::Polynomial(RealizationPolynomial {
                poly,
                spec: spec.clone(),
                base: base.clone(),
                node_residual,
                conditioning: spec.conditioning(),
            }))
        }
        BaseFunction::ExponentialShift(_) => Ok(Realizer::Transcendental(EntireRealizer {
            spec: spec.clone(),
            base: base.clone(),
            weights,
            base_at_nodes,
        })),
    }
}

/// Realizer for `F(z) = c·z`; equals the `F ≡ 0` realizer plus `c·(n+1)·P`.
pub fn realizer_family_member(spec: &PeriodicOrbitSpec, c: &ComplexPoint) -> Result<RealizationPolynomial> {
    match build_periodic_realizer(spec, &BaseFunction::Polynomial(Polynomial::linear(c.clone())))? {
        Realizer::Polynomial(p) => Ok(p),
        Realizer::Transcendental(_) => unreachable!("linear base function gives a polynomial"),
    }
}

/// `[z0, f(z0), …, f^count(z0)]` at the precision of `z0`.
pub fn iterate<M: ComplexMap + ?Sized>(f: &M, z0: &ComplexPoint, count: usize) -> Result<OrbitSequence> {
    if count == 0 {
        return Err(OrbitError::InvalidParameter("count must be at least 1".into()));
    }
    let prec = z0.prec().max(MIN_PRECISION);
    let mut points = Vec::with_capacity(count + 1);
    points.push(z0.clone());
    for step in 1..=count {
        let next = f.apply(&points[step - 1]).with_prec(prec);
        if !next.is_finite() {
            return Err(OrbitError::Overflow { step });
        }
        points.push(next);
    }
    OrbitSequence::new(points, prec, None)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealizationReport {
    pub passed: bool,
    /// max_k |f(z_k) - z_{k+1}| / (1 + |z_{k+1}|).
    pub max_residual: f64,
    pub max_residual_log2: f64,
    pub first_failure: Option<usize>,
    pub checked: usize,
}

pub fn verify_realization<M: ComplexMap + ?Sized>(
    f: &M,
    seq: &OrbitSequence,
    tol: &ToleranceConfig,
) -> RealizationReport {
    let pts = seq.points();
    let mut first_failure = None;
    let mut worst = Float::new(64);
    for k in 0..pts.len() - 1 {
        let image = f.apply(&pts[k]);
        let err = image.distance(&pts[k + 1]);
        let scale = pts[k + 1].abs() + 1u32;
        let rel = Float::with_val(err.prec(), &err / &scale);
        if !(image.is_finite() && rel <= tol.rel_tol) && first_failure.is_none() {
            first_failure = Some(k);
        }
        if rel > worst || !rel.is_finite() {
            worst = rel;
        }
    }
    RealizationReport {
        passed: first_failure.is_none(),
        max_residual: worst.to_f64(),
        max_residual_log2: log2_or_neg_inf(&worst),
        first_failure,
        checked: pts.len() - 1,
    }
}

fn log2_or_neg_inf(x: &Float) -> f64 {
    if x.is_zero() {
        f64::NEG_INFINITY
    } else {
        Float::with_val(64, x.log2_ref()).to_f64()
    }
}

impl PeriodicOrbitSpec {
    /// The spec's orbit as a sequence with a declared periodic tail.
    pub fn to_sequence(&self) -> Result<OrbitSequence> {
        OrbitSequence::new(
            self.w.clone(),
            self.prec().max(MIN_PRECISION),
            Some(Tail::PeriodicFrom {
                index: self.n_prime,
                period: self.period(),
            }),
        )
    }
}
