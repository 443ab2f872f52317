// SPDX-License-Identifier: Apache-2.0

//! Germ recovery from interpolation data accumulating at a point.
//!
//! Data `w_n = f(ζ_n)` with `ζ_n → ζ`, `w_n → w` pins down the Taylor
//! expansion of any analytic `f` at `ζ` through iterated limits: the order
//! `p` is the limit of `ln|w_n - w| / ln|ζ_n - ζ|`, and each coefficient is the
//! limit of the remainder after subtracting the partial sum, divided by the
//! next power of `ζ_n - ζ`.
//!
//! Limits are extracted from a tail window. The order uses a least-squares
//! log-log slope with one Richardson step; coefficients use Neville
//! extrapolation of the scaled remainders to `h = 0`.

use rug::Float;
use serde::Serialize;

use crate::error::{OrbitError, Result};
use crate::model::{OrbitSequence, ToleranceConfig};
use crate::precision::{ln_f64, pow2, ComplexPoint, DEFAULT_PRECISION, MIN_PRECISION};

/// Ceiling for automatic precision escalation.
pub const MAX_PROBE_PRECISION: u32 = 4096;

/// Bits of headroom below which a remainder counts as rounding noise.
const NOISE_HEADROOM: i64 = 32;

/// Interpolation data `(ζ_n, w_n)` ordered by decreasing `|ζ_n - ζ|`.
#[derive(Clone, Debug, PartialEq)]
pub struct AccumulationData {
    zeta_n: Vec<ComplexPoint>,
    w_n: Vec<ComplexPoint>,
    zeta: ComplexPoint,
    w: ComplexPoint,
}

impl AccumulationData {
    pub fn new(zeta_n: Vec<ComplexPoint>, w_n: Vec<ComplexPoint>, zeta: ComplexPoint, w: ComplexPoint) -> Result<Self> {
        if zeta_n.len() != w_n.len() {
            return Err(OrbitError::InvalidParameter(format!(
                "{} nodes but {} values",
                zeta_n.len(),
                w_n.len()
            )));
        }
        if zeta_n.len() < 4 {
            return Err(OrbitError::TooShort {
                len: zeta_n.len(),
                min: 4,
            });
        }
        if let Some(i) = zeta_n.iter().position(|z| z.same_as(&zeta)) {
            return Err(OrbitError::InvalidParameter(format!("ζ_{i} equals the accumulation point")));
        }
        let mut pairs: Vec<(Float, ComplexPoint, ComplexPoint)> = zeta_n
            .into_iter()
            .zip(w_n)
            .map(|(z, v)| (z.distance(&zeta), z, v))
            .collect();
        // Stable: ties keep input order.
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
        let (zeta_n, w_n) = pairs.into_iter().map(|(_, z, v)| (z, v)).unzip();
        Ok(AccumulationData { zeta_n, w_n, zeta, w })
    }

    /// Pairs `(z_n, z_{n+1})` for `n >= start`.
    pub fn from_orbit(seq: &OrbitSequence, start: usize, zeta: ComplexPoint, w: ComplexPoint) -> Result<Self> {
        let pts = seq.points();
        if start + 1 >= pts.len() {
            return Err(OrbitError::TooShort {
                len: pts.len().saturating_sub(start),
                min: 2,
            });
        }
        let zeta_n = pts[start..pts.len() - 1].to_vec();
        let w_n = pts[start + 1..].to_vec();
        Self::new(zeta_n, w_n, zeta, w)
    }

    pub fn zeta_n(&self) -> &[ComplexPoint] {
        &self.zeta_n
    }

    pub fn w_n(&self) -> &[ComplexPoint] {
        &self.w_n
    }

    pub fn zeta(&self) -> &ComplexPoint {
        &self.zeta
    }

    pub fn w(&self) -> &ComplexPoint {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.zeta_n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeta_n.is_empty()
    }

    /// Smallest precision among the stored points.
    pub fn precision_bits(&self) -> u32 {
        self.zeta_n
            .iter()
            .chain(&self.w_n)
            .map(ComplexPoint::prec)
            .min()
            .unwrap_or(MIN_PRECISION)
    }

    fn offsets(&self) -> Vec<ComplexPoint> {
        self.zeta_n.iter().map(|z| z - &self.zeta).collect()
    }

    fn remainders(&self) -> Vec<ComplexPoint> {
        self.w_n.iter().map(|v| v - &self.w).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub point: ComplexPoint,
    /// max distance of the window points from their mean.
    pub spread: f64,
    pub converged: bool,
}

/// Mean of the last `window` points, converged when the spread is within
/// `conv_tol·(1 + |mean|)`.
pub fn estimate_limit(points: &[ComplexPoint], window: usize, conv_tol: f64) -> Result<LimitEstimate> {
    if window == 0 || points.len() < window {
        return Err(OrbitError::TooShort {
            len: points.len(),
            min: window.max(1),
        });
    }
    let tail = &points[points.len() - window..];
    let prec = tail.iter().map(ComplexPoint::prec).max().unwrap_or(DEFAULT_PRECISION);
    let sum = tail.iter().fold(ComplexPoint::zero(prec), |acc, z| &acc + z);
    let count = u32::try_from(window).unwrap_or(u32::MAX);
    let mean = ComplexPoint::new(
        Float::with_val(prec, sum.re() / count),
        Float::with_val(prec, sum.im() / count),
    );
    let spread = tail
        .iter()
        .map(|z| z.distance(&mean))
        .fold(Float::new(prec), |a, b| if b > a { b } else { a });
    let bound = Float::with_val(prec, mean.abs() + 1u32) * conv_tol;
    Ok(LimitEstimate {
        converged: spread <= bound,
        spread: spread.to_f64(),
        point: mean,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeConfig {
    /// Coefficients `a_p..a_{p+K}` are requested.
    pub max_coeffs: usize,
    pub window: usize,
    pub conv_tol: f64,
    pub precision_bits: u32,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            max_coeffs: 8,
            window: 6,
            conv_tol: 1e-6,
            precision_bits: DEFAULT_PRECISION,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 3 {
            return Err(OrbitError::InvalidParameter("window must be at least 3".into()));
        }
        if !(self.conv_tol.is_finite() && self.conv_tol > 0.0) {
            return Err(OrbitError::InvalidParameter("conv_tol must be positive".into()));
        }
        if self.precision_bits < MIN_PRECISION {
            return Err(OrbitError::PrecisionTooLow(self.precision_bits));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub p_real: f64,
    pub p: Option<u32>,
    pub integrality_residual: f64,
    /// Slope over the last window.
    pub slope: f64,
    /// Slope over the window one step earlier, if the data reach that far.
    pub previous_slope: Option<f64>,
    pub richardson: bool,
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Real ratio `ρ` when `h_{i+1}/h_i` is nearly constant, real and in `(0, 1)`.
fn geometric_ratio(h: &[ComplexPoint]) -> Option<f64> {
    let ratios: Vec<(f64, f64)> = h.windows(2).map(|w| w[1].div(&w[0]).to_f64()).collect();
    let k = ratios.len() as f64;
    let re = ratios.iter().map(|r| r.0).sum::<f64>() / k;
    let im = ratios.iter().map(|r| r.1).sum::<f64>() / k;
    let scale = re.hypot(im);
    let steady = ratios
        .iter()
        .all(|r| (r.0 - re).hypot(r.1 - im) <= 1e-3 * scale);
    (steady && im.abs() <= 1e-3 * scale && re > 0.0 && re < 1.0).then_some(re)
}

pub fn estimate_order(data: &AccumulationData, cfg: &ProbeConfig) -> Result<OrderEstimate> {
    cfg.validate()?;
    let h = data.offsets();
    let r = data.remainders();
    let n = data.len();
    let tail_start = n.saturating_sub(cfg.window);
    if r[tail_start..].iter().all(ComplexPoint::is_zero) {
        return Err(OrbitError::IdenticallyLimit);
    }
    let usable: Vec<usize> = (0..n).filter(|&i| !r[i].is_zero()).collect();
    if usable.len() < cfg.window {
        return Err(OrbitError::TooShort {
            len: usable.len(),
            min: cfg.window,
        });
    }
    let logs = |idx: &[usize]| -> (Vec<f64>, Vec<f64>) {
        idx.iter().map(|&i| (ln_f64(&h[i].abs()), ln_f64(&r[i].abs()))).unzip()
    };
    let a_idx = &usable[usable.len() - cfg.window..];
    let (xa, ya) = logs(a_idx);
    let slope = ls_slope(&xa, &ya);

    let mut previous_slope = None;
    let mut p_real = slope;
    let mut richardson = false;
    if usable.len() > cfg.window {
        let b_idx = &usable[usable.len() - cfg.window - 1..usable.len() - 1];
        let (xb, yb) = logs(b_idx);
        let s_b = ls_slope(&xb, &yb);
        previous_slope = Some(s_b);
        let spread = (slope - s_b).abs();
        if spread > cfg.conv_tol.sqrt() {
            return Err(OrbitError::NoLimit { spread });
        }
        let span: Vec<ComplexPoint> = usable[usable.len() - cfg.window - 1..]
            .iter()
            .map(|&i| h[i].clone())
            .collect();
        if let Some(rho) = geometric_ratio(&span) {
            p_real = (slope - rho * s_b) / (1.0 - rho);
            richardson = true;
        }
    }
    let nearest = p_real.round();
    let integrality_residual = (p_real - nearest).abs();
    let p = (integrality_residual < cfg.conv_tol && nearest >= 1.0).then_some(nearest as u32);
    Ok(OrderEstimate {
        p_real,
        p,
        integrality_residual,
        slope,
        previous_slope,
        richardson,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CoefficientStatus {
    Converged,
    /// The remainder sank into rounding noise; value reported as zero.
    PrecisionLimited,
    NotConverged,
    /// Fewer than three data points still carry signal at this power.
    InsufficientData,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientEstimate {
    /// Power of `(z - ζ)` this coefficient multiplies.
    pub power: u32,
    pub value: ComplexPoint,
    pub status: CoefficientStatus,
    /// |T_m - T_{m-1}| along the Neville diagonal.
    pub convergence: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum RadiusEstimate {
    Infinite,
    Zero,
    Finite(f64),
}

impl RadiusEstimate {
    pub fn contains(&self, distance: f64) -> bool {
        match *self {
            RadiusEstimate::Infinite => true,
            RadiusEstimate::Zero => false,
            RadiusEstimate::Finite(r) => distance < r,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaylorEstimate {
    pub p: u32,
    pub order: OrderEstimate,
    pub coeffs: Vec<CoefficientEstimate>,
    /// Length of the leading run of converged coefficients.
    pub trusted: usize,
    pub integrality_residual: f64,
    pub radius_estimate: Option<RadiusEstimate>,
    pub precision_bits: u32,
    /// (precision, trusted count) for each escalation attempt.
    pub escalation: Vec<(u32, usize)>,
    pub zeta: ComplexPoint,
    pub w: ComplexPoint,
}

impl TaylorEstimate {
    pub fn trusted_coeffs(&self) -> &[CoefficientEstimate] {
        &self.coeffs[..self.trusted]
    }

    pub fn coefficient(&self, power: u32) -> Option<&CoefficientEstimate> {
        self.coeffs.iter().find(|c| c.power == power)
    }

    /// `w + Σ a_k (z - ζ)^k` over the trusted coefficients.
    pub fn eval(&self, z: &ComplexPoint) -> ComplexPoint {
        let h = z - &self.zeta;
        let mut acc = self.w.clone();
        for c in self.trusted_coeffs() {
            acc = &acc + &(&c.value * &h.powu(c.power));
        }
        acc
    }

    fn has_precision_limit(&self) -> bool {
        self.coeffs.iter().any(|c| c.status == CoefficientStatus::PrecisionLimited)
    }
}

/// Neville extrapolation of `values` at `nodes` to 0. Returns the estimate
/// and the successive diagonal differences.
fn neville_at_zero(nodes: &[ComplexPoint], values: &[ComplexPoint]) -> (ComplexPoint, Vec<f64>) {
    let w = nodes.len();
    let mut p = values.to_vec();
    let mut estimates = vec![p[w - 1].clone()];
    for m in 1..w {
        for i in 0..w - m {
            let num = &(&nodes[i + m] * &p[i]) - &(&nodes[i] * &p[i + 1]);
            p[i] = num.div(&(&nodes[i + m] - &nodes[i]));
        }
        estimates.push(p[w - 1 - m].clone());
    }
    let diffs = estimates.windows(2).map(|e| e[1].distance(&e[0]).to_f64()).collect();
    (estimates.pop().unwrap(), diffs)
}

/// `|L_i(0)|` for the Lagrange basis on `nodes`, the amplification of an
/// error in value `i` when extrapolating to 0.
fn lagrange_weights_at_zero(nodes: &[ComplexPoint]) -> Vec<Float> {
    (0..nodes.len())
        .map(|i| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(Float::with_val(64, 1), |acc, (_, hj)| {
                    let gap = Float::with_val(64, hj.distance(&nodes[i]));
                    acc * Float::with_val(64, hj.abs()) / gap
                })
        })
        .collect()
}

fn placeholder(power: u32, prec: u32, status: CoefficientStatus) -> CoefficientEstimate {
    CoefficientEstimate {
        power,
        value: ComplexPoint::zero(prec),
        status,
        convergence: Vec::new(),
    }
}

/// Peels off one coefficient at a time. Every data point carries a running
/// bound on its accumulated rounding error; a point stops contributing once
/// its remainder is within [`NOISE_HEADROOM`] bits of that bound, and each
/// stage extrapolates over the last `window` points still above it.
pub fn estimate_coefficients(data: &AccumulationData, cfg: &ProbeConfig) -> Result<TaylorEstimate> {
    let order = estimate_order(data, cfg)?;
    let p = order.p.ok_or(OrbitError::NonIntegerOrder {
        p_real: order.p_real,
        residual: order.integrality_residual,
    })?;
    let prec = data.precision_bits();
    let h = data.offsets();
    let h_abs: Vec<Float> = h.iter().map(|x| Float::with_val(64, x.abs())).collect();
    let unit = pow2(64, -i64::from(prec));
    let headroom = pow2(64, NOISE_HEADROOM);
    let mut residual = data.remainders();
    let mut err: Vec<Float> = residual.iter().map(|r| Float::with_val(64, r.abs() * &unit)).collect();

    let mut coeffs: Vec<CoefficientEstimate> = Vec::with_capacity(cfg.max_coeffs + 1);
    let mut limited = false;
    for k in 0..=cfg.max_coeffs {
        let power = p + k as u32;
        if limited {
            coeffs.push(placeholder(power, prec, CoefficientStatus::PrecisionLimited));
            continue;
        }
        if residual.iter().all(ComplexPoint::is_zero) {
            coeffs.push(CoefficientEstimate {
                convergence: vec![0.0; cfg.window - 1],
                ..placeholder(power, prec, CoefficientStatus::Converged)
            });
            continue;
        }
        let usable: Vec<usize> = (0..residual.len())
            .filter(|&i| residual[i].abs() > Float::with_val(64, &err[i] * &headroom))
            .collect();
        if usable.is_empty() {
            limited = true;
            coeffs.push(placeholder(power, prec, CoefficientStatus::PrecisionLimited));
            continue;
        }
        if usable.len() < 3 {
            coeffs.push(placeholder(power, prec, CoefficientStatus::InsufficientData));
            break;
        }
        let window = &usable[usable.len().saturating_sub(cfg.window)..];
        let nodes: Vec<ComplexPoint> = window.iter().map(|&i| h[i].clone()).collect();
        let scaled: Vec<ComplexPoint> = window.iter().map(|&i| residual[i].div(&h[i].powu(power))).collect();
        let (value, convergence) = neville_at_zero(&nodes, &scaled);
        let spread = lagrange_weights_at_zero(&nodes)
            .into_iter()
            .zip(window)
            .fold(Float::with_val(64, 0), |acc, (l, &i)| {
                let hp = Float::with_val(64, rug::ops::Pow::pow(&h_abs[i], power));
                acc + l * Float::with_val(64, &err[i] / hp)
            });
        let last = convergence.last().copied().unwrap_or(0.0);
        let magnitude = value.abs().to_f64();
        let status = if last <= cfg.conv_tol * (magnitude + 1.0) {
            CoefficientStatus::Converged
        } else {
            CoefficientStatus::NotConverged
        };
        if k == 0 && value.is_zero() {
            return Err(OrbitError::ZeroLeadingCoefficient);
        }
        for i in 0..residual.len() {
            let term = &value * &h[i].powu(power);
            let hp = Float::with_val(64, rug::ops::Pow::pow(&h_abs[i], power));
            err[i] += Float::with_val(64, &spread * hp) + Float::with_val(64, term.abs() * &unit);
            residual[i] = &residual[i] - &term;
        }
        coeffs.push(CoefficientEstimate {
            power,
            value,
            status,
            convergence,
        });
        if status == CoefficientStatus::NotConverged {
            break;
        }
    }
    let trusted = coeffs
        .iter()
        .take_while(|c| c.status == CoefficientStatus::Converged)
        .count();
    let mut est = TaylorEstimate {
        p,
        integrality_residual: order.integrality_residual,
        order,
        coeffs,
        trusted,
        radius_estimate: None,
        precision_bits: prec,
        escalation: vec![(prec, trusted)],
        zeta: data.zeta().clone(),
        w: data.w().clone(),
    };
    est.radius_estimate = radius_probe(&est).ok();
    Ok(est)
}

/// Reruns the probe on data regenerated at doubled precision while remainders
/// hit the noise floor, up to [`MAX_PROBE_PRECISION`], stopping as soon as
/// the trusted count stops growing.
pub fn estimate_with_escalation<S>(source: S, cfg: &ProbeConfig) -> Result<TaylorEstimate>
where
    S: Fn(u32) -> Result<AccumulationData>,
{
    let mut bits = cfg.precision_bits;
    let mut best = estimate_coefficients(&source(bits)?, cfg)?;
    let mut history = best.escalation.clone();
    while best.has_precision_limit() && bits < MAX_PROBE_PRECISION {
        bits = (bits * 2).min(MAX_PROBE_PRECISION);
        let next = estimate_coefficients(&source(bits)?, cfg)?;
        history.push((next.precision_bits, next.trusted));
        if next.trusted <= best.trusted {
            break;
        }
        best = next;
    }
    best.escalation = history;
    Ok(best)
}

/// Root-test radius over the trusted coefficients.
pub fn radius_probe(est: &TaylorEstimate) -> Result<RadiusEstimate> {
    let trusted = est.trusted_coeffs();
    if trusted.len() < 3 {
        return Err(OrbitError::TooFewCoefficients {
            have: trusted.len(),
            need: 3,
        });
    }
    let tail_limited = est.coeffs[est.trusted..]
        .iter()
        .any(|c| c.status == CoefficientStatus::PrecisionLimited);
    if tail_limited || trusted.last().is_some_and(|c| c.value.is_zero()) {
        return Ok(RadiusEstimate::Infinite);
    }
    let roots: Vec<f64> = trusted
        .iter()
        .filter(|c| !c.value.is_zero())
        .map(|c| (ln_f64(&c.value.abs()) / f64::from(c.power)).exp())
        .collect();
    if roots.len() >= 3 {
        let last3 = &roots[roots.len() - 3..];
        let increasing = roots.windows(2).all(|w| w[1] > w[0]);
        let accelerating = roots
            .windows(3)
            .all(|w| w[2] - w[1] >= (w[1] - w[0]) * (1.0 - 1e-9));
        if increasing && accelerating && last3[2] > 1.0 {
            return Ok(RadiusEstimate::Zero);
        }
    }
    let later = &roots[roots.len() / 2..];
    let limsup = later.iter().copied().fold(0.0, f64::max);
    if limsup == 0.0 {
        return Ok(RadiusEstimate::Infinite);
    }
    Ok(RadiusEstimate::Finite(1.0 / limsup))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GermReport {
    pub consistent: bool,
    pub mismatches: Vec<usize>,
    /// Indices outside the estimated radius.
    pub skipped: Vec<usize>,
    pub notes: Vec<String>,
    pub checked: usize,
    /// log2 of the worst relative residual among checked indices.
    pub max_residual_log2: f64,
}

/// Evaluates the truncated series at each `z_n` inside the radius and
/// compares with `z_{n+1}` using `|s(z_n) - z_{n+1}| <= rel_tol·(1+|z_{n+1}|)`.
pub fn germ_consistency_check(seq: &OrbitSequence, est: &TaylorEstimate, tol: &ToleranceConfig) -> GermReport {
    let radius = est.radius_estimate.unwrap_or(RadiusEstimate::Infinite);
    let pts = seq.points();
    let mut report = GermReport {
        consistent: true,
        mismatches: Vec::new(),
        skipped: Vec::new(),
        notes: Vec::new(),
        checked: 0,
        max_residual_log2: f64::NEG_INFINITY,
    };
    for n in 0..pts.len() - 1 {
        let dist = pts[n].distance(&est.zeta).to_f64();
        if !radius.contains(dist) {
            report.skipped.push(n);
            report
                .notes
                .push(format!("z_{n} at distance {dist:.3e} lies outside the estimated radius"));
            continue;
        }
        report.checked += 1;
        let image = est.eval(&pts[n]);
        let err = image.distance(&pts[n + 1]);
        if !err.is_zero() {
            let scale = Float::with_val(err.prec(), pts[n + 1].abs() + 1u32);
            let rel_log2 = Float::with_val(64, (err / scale).log2()).to_f64();
            report.max_residual_log2 = report.max_residual_log2.max(rel_log2);
        }
        if !tol.close_rel(&image, &pts[n + 1]) {
            report.mismatches.push(n);
        }
    }
    report.consistent = report.mismatches.is_empty();
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(re: f64) -> ComplexPoint {
        ComplexPoint::from_f64(re, 0.0, 256)
    }

    fn dyadic(count: i64, f: impl Fn(&ComplexPoint) -> ComplexPoint) -> AccumulationData {
        let z: Vec<ComplexPoint> = (1..=count).map(|n| ComplexPoint::from_real(pow2(256, -n))).collect();
        let w = z.iter().map(&f).collect();
        AccumulationData::new(z, w, pt(0.0), pt(0.0)).unwrap()
    }

    #[test]
    fn order_of_square_is_two() {
        let data = dyadic(20, |z| z * z);
        let o = estimate_order(&data, &ProbeConfig::default()).unwrap();
        assert_eq!(o.p, Some(2));
        assert!(o.integrality_residual < 1e-12);
    }

    #[test]
    fn fractional_order_is_not_rounded() {
        // w_n = ζ_n^{1.5} on ζ_n = 2^{-1.5^n}: ln w / ln ζ = 1.5 exactly.
        let zs: Vec<ComplexPoint> = (0..12)
            .map(|n| ComplexPoint::from_real(Float::with_val(256, -(1.5f64.powi(n))).exp2()))
            .collect();
        let data = AccumulationData::new(zs[..11].to_vec(), zs[1..].to_vec(), pt(0.0), pt(0.0)).unwrap();
        let o = estimate_order(&data, &ProbeConfig::default()).unwrap();
        assert_eq!(o.p, None);
        assert!((o.integrality_residual - 0.5).abs() < 1e-9);
        assert!(!o.richardson);
    }

    #[test]
    fn constant_image_is_flagged() {
        let data = dyadic(10, |_| pt(0.0));
        assert_eq!(estimate_order(&data, &ProbeConfig::default()), Err(OrbitError::IdenticallyLimit));
    }

    #[test]
    fn oscillating_ratio_has_no_limit() {
        // w_n alternates between ζ_n and ζ_n^3.
        let z: Vec<ComplexPoint> = (1..=14).map(|n| ComplexPoint::from_real(pow2(256, -n))).collect();
        let w = z
            .iter()
            .enumerate()
            .map(|(i, v)| if i % 2 == 0 { v.clone() } else { v.powu(3) })
            .collect();
        let data = AccumulationData::new(z, w, pt(0.0), pt(0.0)).unwrap();
        assert!(matches!(estimate_order(&data, &ProbeConfig::default()), Err(OrbitError::NoLimit { .. })));
    }

    #[test]
    fn square_plus_cubic_tenth() {
        let tenth = ComplexPoint::parse("0.1", "0", 256).unwrap();
        let data = dyadic(40, |z| &(z * z) + &(&tenth * &z.powu(3)));
        let cfg = ProbeConfig {
            max_coeffs: 3,
            ..ProbeConfig::default()
        };
        let est = estimate_coefficients(&data, &cfg).unwrap();
        assert_eq!(est.p, 2);
        let a2 = est.coefficient(2).unwrap();
        let a3 = est.coefficient(3).unwrap();
        assert_eq!(a2.status, CoefficientStatus::Converged);
        assert!((a2.value.to_f64().0 - 1.0).abs() < 1e-6);
        assert!((a3.value.to_f64().0 - 0.1).abs() < 1e-6);
        // a_4 onward sinks into rounding noise, leaving two trusted values.
        assert_eq!(est.trusted, 2);
        assert_eq!(est.radius_estimate, None);
    }

    #[test]
    fn exact_square_has_zero_tail() {
        let data = dyadic(12, |z| z * z);
        let est = estimate_coefficients(&data, &ProbeConfig::default()).unwrap();
        assert_eq!(est.trusted, 9);
        assert!(est.coeffs[0].value.same_as(&pt(1.0)));
        assert!(est.coeffs[1..].iter().all(|c| c.value.is_zero()));
        assert_eq!(radius_probe(&est), Ok(RadiusEstimate::Infinite));
    }

    fn synthetic(coeffs: &[(u32, f64)]) -> TaylorEstimate {
        let data = dyadic(12, |z| z * z);
        let mut est = estimate_coefficients(&data, &ProbeConfig::default()).unwrap();
        est.coeffs = coeffs
            .iter()
            .map(|&(power, v)| CoefficientEstimate {
                power,
                value: ComplexPoint::from_real(Float::with_val(256, v)),
                status: CoefficientStatus::Converged,
                convergence: Vec::new(),
            })
            .collect();
        est.trusted = est.coeffs.len();
        est
    }

    #[test]
    fn radius_of_geometric_coefficients() {
        let est = synthetic(&(1..=8).map(|k| (k, 2f64.powi(k as i32))).collect::<Vec<_>>());
        match radius_probe(&est).unwrap() {
            RadiusEstimate::Finite(r) => assert!((r - 0.5).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn radius_zero_for_square_exponent_growth() {
        let est = synthetic(&(2..=7).map(|k| (k, 2f64.powi((k * k) as i32))).collect::<Vec<_>>());
        assert_eq!(radius_probe(&est), Ok(RadiusEstimate::Zero));
    }

    #[test]
    fn radius_needs_three_coefficients() {
        let est = synthetic(&[(2, 1.0), (3, 1.0)]);
        assert_eq!(radius_probe(&est), Err(OrbitError::TooFewCoefficients { have: 2, need: 3 }));
    }

    #[test]
    fn germ_check_on_self_consistent_orbit() {
        let est = estimate_coefficients(&dyadic(12, |z| z * z), &ProbeConfig::default()).unwrap();
        let pts: Vec<ComplexPoint> = (0..6).map(|n| ComplexPoint::from_real(pow2(256, -(1i64 << n)))).collect();
        let seq = OrbitSequence::new(pts, 256, None).unwrap();
        let r = germ_consistency_check(&seq, &est, &ToleranceConfig::default());
        assert!(r.consistent);
        assert_eq!(r.checked, 5);
    }

    #[test]
    fn limit_estimate_of_constant_tail() {
        let pts = vec![pt(3.0), pt(1.0), pt(1.0), pt(1.0)];
        let l = estimate_limit(&pts, 3, 1e-9).unwrap();
        assert!(l.converged && l.point.same_as(&pt(1.0)));
        assert!(!estimate_limit(&pts, 4, 1e-9).unwrap().converged);
    }

    #[test]
    fn neville_recovers_polynomial_constant_term() {
        let nodes: Vec<ComplexPoint> = (1..=4).map(|n| ComplexPoint::from_real(pow2(256, -n))).collect();
        let values: Vec<ComplexPoint> = nodes.iter().map(|h| &(&pt(3.0) + &(&pt(2.0) * h)) + &(h * h)).collect();
        let (v, diffs) = neville_at_zero(&nodes, &values);
        assert!(v.distance(&pt(3.0)) < pow2(64, -240));
        assert!(*diffs.last().unwrap() < 1e-60);
    }
}
