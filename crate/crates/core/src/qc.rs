// SPDX-License-Identifier: Apache-2.0

//! Piecewise quasiconformal realizer for sequences decreasing to zero.
//!
//! In logarithmic coordinates each annulus `|z_{n+1}| < |z| <= |z_n|` is
//! carried onto the next by the real-linear map
//! `φ(x + iy) = (d'/d)·x + i(y + α·x/d)` and `f(z) = z_{n+2}·exp(φ(log z/z_{n+1}))`.
//! Outside `|z_0|` the map is the similarity `z ↦ z_1·z/z_0`, and `f(0) = 0`.
//!
//! Internally radial coordinates are kept in base-2 logarithms so that
//! dyadic sequences evaluate without rounding.

use rayon::prelude::*;
use rug::float::{Constant, Round};
use rug::Float;
use serde::Serialize;

use crate::error::{OrbitError, Result};
use crate::model::OrbitSequence;
use crate::precision::{pi, ComplexPoint};
use crate::qr::{check_necessary, QRParams, Side};

/// Per-annulus parameters. `d` and `d_prime` are natural-log widths.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusMapParams {
    pub n: usize,
    pub d: Float,
    pub d_prime: Float,
    pub alpha: Float,
    /// Widths in log2 units.
    width2: Float,
    width2_next: Float,
}

impl AnnulusMapParams {
    /// Parameters from explicit widths; used for standalone dilatation checks.
    pub fn new(n: usize, d: Float, d_prime: Float, alpha: Float) -> Self {
        let prec = d.prec().max(d_prime.prec()).max(alpha.prec());
        let ln2 = Float::with_val(prec, Constant::Log2);
        let width2 = Float::with_val(prec, &d / &ln2);
        let width2_next = Float::with_val(prec, &d_prime / &ln2);
        AnnulusMapParams {
            n,
            d,
            d_prime,
            alpha,
            width2,
            width2_next,
        }
    }

    /// `g' = d'/d`.
    pub fn g_prime(&self) -> Float {
        Float::with_val(self.width2.prec(), &self.width2_next / &self.width2)
    }

    /// `θ' = α/d`.
    pub fn theta_prime(&self) -> Float {
        Float::with_val(self.d.prec(), &self.alpha / &self.d)
    }

    /// `g' + 1/g' + θ'^2/g'`; equals `K + 1/K`.
    pub fn distortion_sum(&self) -> Float {
        let g = self.g_prime();
        let t = self.theta_prime();
        let t2 = Float::with_val(t.prec(), t.square_ref());
        let mut s = Float::with_val(g.prec(), g.recip_ref());
        s += &g;
        s += t2 / &g;
        s
    }

    /// `φ(x + iy)` as a pair `(re, im)`.
    pub fn phi(&self, x: &Float, y: &Float) -> (Float, Float) {
        let re = Float::with_val(x.prec().max(self.d.prec()), x * &self.g_prime());
        let im = Float::with_val(re.prec(), x * &self.theta_prime()) + y;
        (re, im)
    }
}

impl Serialize for AnnulusMapParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let dil = dilatation(self);
        let mut st = s.serialize_struct("AnnulusMapParams", 6)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("d", &self.d.to_string_radix(10, Some(40)))?;
        st.serialize_field("d_prime", &self.d_prime.to_string_radix(10, Some(40)))?;
        st.serialize_field("alpha", &self.alpha.to_string_radix(10, Some(40)))?;
        st.serialize_field("mu_abs", &dil.mu_abs)?;
        st.serialize_field("k", &dil.k)?;
        st.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Dilatation {
    pub mu_abs: f64,
    pub k: f64,
}

fn k_from_sum(s: &Float) -> Float {
    // K + 1/K = S  =>  K = (S + sqrt(S^2 - 4)) / 2
    let prec = s.prec();
    let mut disc = Float::with_val(prec, s.square_ref()) - 4u32;
    if disc < 0 {
        disc = Float::new(prec);
    }
    (Float::with_val(prec, s + disc.sqrt())) / 2u32
}

/// `|μ_φ|` and `K = (1+|μ|)/(1-|μ|)` for the linear map of one annulus.
pub fn dilatation(params: &AnnulusMapParams) -> Dilatation {
    let k = k_from_sum(&params.distortion_sum());
    let mu = Float::with_val(k.prec(), &k - 1u32) / Float::with_val(k.prec(), &k + 1u32);
    Dilatation {
        mu_abs: mu.to_f64(),
        k: k.to_f64(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QCHypotheses {
    pub params: QRParams,
    /// Contraction factor `D` with `|z_{n+1}| <= D|z_n|`.
    pub d: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UniformBound {
    /// `1/μ + ν + (2 + 2/μ)·ln C/ln(1/D) + 16π²/ln(1/D)²`
    pub bound: f64,
    pub k_bound: f64,
    /// Annuli before this index are not covered by the bound.
    pub from_annulus: usize,
}

pub fn uniform_bound(h: &QCHypotheses) -> UniformBound {
    let QRParams { mu, nu, c, n0 } = h.params;
    let l = (1.0 / h.d).ln();
    let bound = 1.0 / mu + nu + (2.0 + 2.0 / mu) * c.ln() / l + 16.0 * std::f64::consts::PI.powi(2) / (l * l);
    let s = bound.max(2.0);
    UniformBound {
        bound,
        k_bound: (s + (s * s - 4.0).sqrt()) / 2.0,
        from_annulus: n0,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnulusDilatation {
    pub n: usize,
    pub mu_abs: f64,
    pub k: f64,
    pub g_prime: f64,
    pub theta_prime: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DilatationReport {
    pub per_annulus: Vec<AnnulusDilatation>,
    pub sup_mu: f64,
    pub k_global: f64,
    pub uniform: Option<UniformBound>,
    /// Every covered annulus respects the uniform bound.
    pub within_bound: Option<bool>,
}

pub fn dilatation_report(annuli: &[AnnulusMapParams], hypotheses: Option<&QCHypotheses>) -> DilatationReport {
    let per_annulus: Vec<AnnulusDilatation> = annuli
        .iter()
        .map(|a| {
            let dil = dilatation(a);
            AnnulusDilatation {
                n: a.n,
                mu_abs: dil.mu_abs,
                k: dil.k,
                g_prime: a.g_prime().to_f64(),
                theta_prime: a.theta_prime().to_f64(),
            }
        })
        .collect();
    let sup_mu = per_annulus.iter().map(|a| a.mu_abs).fold(0.0, f64::max);
    let k_global = per_annulus.iter().map(|a| a.k).fold(1.0, f64::max);
    let uniform = hypotheses.map(uniform_bound);
    let within_bound = uniform.map(|u| {
        per_annulus
            .iter()
            .filter(|a| a.n >= u.from_annulus)
            .all(|a| a.k <= u.k_bound * (1.0 + 1e-12))
    });
    DilatationReport {
        per_annulus,
        sup_mu,
        k_global,
        uniform,
        within_bound,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseQCMap {
    seq: OrbitSequence,
    moduli: Vec<Float>,
    log2_moduli: Vec<Float>,
    annuli: Vec<AnnulusMapParams>,
    outer_factor: ComplexPoint,
    report: DilatationReport,
    hypotheses: Option<QCHypotheses>,
}

fn annulus_params(seq: &OrbitSequence, log2_moduli: &[Float]) -> Vec<AnnulusMapParams> {
    let prec = seq.precision_bits();
    let ln2 = Float::with_val(prec, Constant::Log2);
    let pts = seq.points();
    let args: Vec<Float> = pts.iter().map(ComplexPoint::arg).collect();
    (0..pts.len().saturating_sub(2))
        .map(|n| {
            let width2 = Float::with_val(prec, &log2_moduli[n] - &log2_moduli[n + 1]);
            let width2_next = Float::with_val(prec, &log2_moduli[n + 1] - &log2_moduli[n + 2]);
            let mut alpha = Float::with_val(prec, &args[n + 1] * 2u32);
            alpha -= &args[n];
            alpha -= &args[n + 2];
            AnnulusMapParams {
                n,
                d: Float::with_val(prec, &width2 * &ln2),
                d_prime: Float::with_val(prec, &width2_next * &ln2),
                alpha,
                width2,
                width2_next,
            }
        })
        .collect()
}

fn log2_all(moduli: &[Float]) -> Vec<Float> {
    moduli.iter().map(|m| Float::with_val(m.prec(), m.log2_ref())).collect()
}

fn nonzero_moduli(seq: &OrbitSequence) -> Result<Vec<Float>> {
    let moduli = seq.moduli();
    if let Some(n) = moduli.iter().position(Float::is_zero) {
        return Err(OrbitError::ZeroModulus(n));
    }
    Ok(moduli)
}

/// Annulus parameters and dilatations computed without checking any
/// hypothesis. Widths must still be positive.
pub fn forced_diagnostics(seq: &OrbitSequence) -> Result<DilatationReport> {
    if seq.len() < 3 {
        return Err(OrbitError::TooShort { len: seq.len(), min: 3 });
    }
    let moduli = nonzero_moduli(seq)?;
    if let Some(n) = moduli.windows(2).position(|w| w[1] >= w[0]) {
        return Err(OrbitError::NotDecreasing(n));
    }
    let annuli = annulus_params(seq, &log2_all(&moduli));
    Ok(dilatation_report(&annuli, None))
}

/// Largest ratio `|z_{n+1}|/|z_n|`, the tightest admissible `D`.
pub fn contraction_factor(seq: &OrbitSequence) -> Result<f64> {
    let moduli = nonzero_moduli(seq)?;
    Ok(moduli
        .windows(2)
        .map(|w| Float::with_val_round(64, &w[1] / &w[0], Round::Up).0.to_f64_round(Round::Up))
        .fold(0.0, f64::max))
}

pub fn build_qc_map(seq: &OrbitSequence, hypotheses: &QCHypotheses) -> Result<PiecewiseQCMap> {
    if seq.len() < 3 {
        return Err(OrbitError::TooShort { len: seq.len(), min: 3 });
    }
    if !(hypotheses.d > 0.0 && hypotheses.d < 1.0) {
        return Err(OrbitError::InvalidParameter(format!("D = {} must lie in (0, 1)", hypotheses.d)));
    }
    let moduli = nonzero_moduli(seq)?;
    if let Some(n) = moduli.windows(2).position(|w| w[1] >= w[0]) {
        return Err(OrbitError::NotDecreasing(n));
    }
    let dd = Float::with_val(64, hypotheses.d);
    for n in 0..moduli.len() - 1 {
        let bound = Float::with_val(moduli[n].prec(), &moduli[n] * &dd);
        if moduli[n + 1] > bound {
            let ratio = Float::with_val(64, &moduli[n + 1] / &moduli[n]).to_f64();
            return Err(OrbitError::ContractionViolated { n, ratio });
        }
    }
    let growth = check_necessary(seq, &hypotheses.params)?;
    if let Some(w) = growth.witnesses.first() {
        let side = match w.side {
            Side::E1Lower => "e1 lower",
            Side::E1Upper => "e1 upper",
            Side::E1bLower => "e1b lower",
            Side::E1bUpper => "e1b upper",
        };
        return Err(OrbitError::GrowthConditionViolated {
            n: w.n,
            side: side.to_string(),
        });
    }
    let log2_moduli = log2_all(&moduli);
    let annuli = annulus_params(seq, &log2_moduli);
    let report = dilatation_report(&annuli, Some(hypotheses));
    let outer_factor = seq.point(1).div(seq.point(0));
    Ok(PiecewiseQCMap {
        seq: seq.clone(),
        moduli,
        log2_moduli,
        annuli,
        outer_factor,
        report,
        hypotheses: Some(*hypotheses),
    })
}

impl PiecewiseQCMap {
    pub fn sequence(&self) -> &OrbitSequence {
        &self.seq
    }

    pub fn annuli(&self) -> &[AnnulusMapParams] {
        &self.annuli
    }

    pub fn outer_factor(&self) -> &ComplexPoint {
        &self.outer_factor
    }

    pub fn dilatation(&self) -> &DilatationReport {
        &self.report
    }

    pub fn k_global(&self) -> f64 {
        self.report.k_global
    }

    pub fn hypotheses(&self) -> Option<&QCHypotheses> {
        self.hypotheses.as_ref()
    }

    fn prec(&self) -> u32 {
        self.seq.precision_bits()
    }

    /// Smallest modulus at which the map is defined (besides 0).
    pub fn inner_radius(&self) -> &Float {
        &self.moduli[self.moduli.len() - 2]
    }

    pub fn outer_radius(&self) -> &Float {
        &self.moduli[0]
    }

    /// Annulus `n` formula at a point `z` whose radial log2 coordinate
    /// relative to `|z_{n+1}|` is `x2`.
    fn formula(&self, n: usize, z: &ComplexPoint, x2: &Float) -> ComplexPoint {
        let a = &self.annuli[n];
        let prec = self.prec();
        let pts = self.seq.points();
        let y = z.div(&pts[n + 1]).arg();
        let radial = Float::with_val(prec, x2 * &a.g_prime()).exp2();
        let mut angle = Float::with_val(prec, x2 * &a.alpha) / &a.width2;
        angle += &y;
        let factor = ComplexPoint::polar(&radial, &angle);
        &pts[n + 2] * &factor
    }

    /// Index of the annulus holding `|z| = r`, with `|z_{n+1}| < r <= |z_n|`.
    fn locate(&self, r: &Float) -> Option<usize> {
        let count = self.annuli.len();
        // moduli strictly decrease: first index with moduli[i] < r, minus one.
        let first_below = self.moduli[..=count].partition_point(|m| m >= r);
        if first_below == 0 || first_below > count {
            None
        } else {
            Some(first_below - 1)
        }
    }

    pub fn evaluate(&self, z: &ComplexPoint) -> Result<ComplexPoint> {
        if !z.is_finite() {
            return Err(OrbitError::NonFinite(0));
        }
        let prec = self.prec();
        let z = z.clone().with_prec(prec.max(z.prec()));
        if z.is_zero() {
            return Ok(ComplexPoint::zero(prec));
        }
        let r = z.abs();
        if r > self.moduli[0] {
            return Ok(&self.outer_factor * &z);
        }
        let n = match self.locate(&r) {
            Some(n) => n,
            None => {
                // At or just under the innermost covered circle: continuous
                // extension of the last annulus, within rounding slack.
                let inner = self.inner_radius();
                let slack = Float::with_val(prec, inner >> (prec as i32 - 8));
                if Float::with_val(prec, inner - &r) > slack {
                    return Err(OrbitError::BeyondPrefix);
                }
                self.annuli.len() - 1
            }
        };
        let x2 = Float::with_val(prec, r.log2_ref()) - &self.log2_moduli[n + 1];
        Ok(self.formula(n, &z, &x2))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealizationCheck {
    pub passed: bool,
    pub max_rel_residual: f64,
    pub max_rel_residual_log2: f64,
    pub failures: Vec<usize>,
    pub checked: usize,
}

fn rel_log2(err: &Float, scale: &Float) -> f64 {
    if err.is_zero() {
        return f64::NEG_INFINITY;
    }
    Float::with_val(64, (Float::with_val(err.prec(), err / scale)).log2_ref()).to_f64()
}

/// `|f(z_n) - z_{n+1}| <= rel_tol·|z_{n+1}|` for every `n + 1 < len`.
pub fn verify_orbit_realization(map: &PiecewiseQCMap, rel_tol: f64) -> RealizationCheck {
    let pts = map.seq.points();
    let tol_log2 = rel_tol.log2();
    let results: Vec<f64> = (0..pts.len() - 1)
        .into_par_iter()
        .map(|n| match map.evaluate(&pts[n]) {
            Ok(img) => rel_log2(&img.distance(&pts[n + 1]), &pts[n + 1].abs()),
            Err(_) => f64::INFINITY,
        })
        .collect();
    let failures: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, &r)| r > tol_log2)
        .map(|(n, _)| n)
        .collect();
    let worst = results.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    RealizationCheck {
        passed: failures.is_empty(),
        max_rel_residual: worst.exp2(),
        max_rel_residual_log2: worst,
        failures,
        checked: results.len(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuityCheck {
    pub seam: usize,
    pub passed: bool,
    /// Largest `|inner - outer| / |z_{n+2}|` over the sampled angles.
    pub max_discrepancy: f64,
    pub samples: usize,
}

fn sample_angles(count: usize, prec: u32) -> Vec<Float> {
    let two_pi = Float::with_val(prec, pi(prec) * 2u32);
    (0..count)
        .map(|k| {
            let t = Float::with_val(prec, (k as f64 + 0.5) / count as f64);
            Float::with_val(prec, &t * &two_pi) - pi(prec)
        })
        .collect()
}

/// Compares annulus `n` at its inner edge with annulus `n + 1` at its outer
/// edge on `samples` points of the circle `|z| = |z_{n+1}|`.
pub fn verify_boundary_continuity(map: &PiecewiseQCMap, n: usize, samples: usize, tol: f64) -> Result<ContinuityCheck> {
    if n + 1 >= map.annuli.len() {
        return Err(OrbitError::OutOfRange(format!(
            "seam {n} needs annuli {n} and {}, map has {}",
            n + 1,
            map.annuli.len()
        )));
    }
    let prec = map.prec();
    let radius = &map.moduli[n + 1];
    let scale = map.moduli[n + 2].clone();
    let zero = Float::new(prec);
    let outer_x2 = map.annuli[n + 1].width2.clone();
    let worst = sample_angles(samples, prec)
        .par_iter()
        .map(|beta| {
            let z = ComplexPoint::polar(radius, beta);
            let inner = map.formula(n, &z, &zero);
            let outer = map.formula(n + 1, &z, &outer_x2);
            rel_log2(&inner.distance(&outer), &scale)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let max_discrepancy = worst.exp2();
    Ok(ContinuityCheck {
        seam: n,
        passed: max_discrepancy <= tol,
        max_discrepancy,
        samples,
    })
}

/// Outer similarity against annulus 0 on `|z| = |z_0|`.
pub fn verify_outer_continuity(map: &PiecewiseQCMap, samples: usize, tol: f64) -> ContinuityCheck {
    let prec = map.prec();
    let radius = &map.moduli[0];
    let scale = map.moduli[1].clone();
    let x2 = map.annuli[0].width2.clone();
    let worst = sample_angles(samples, prec)
        .par_iter()
        .map(|beta| {
            let z = ComplexPoint::polar(radius, beta);
            let outer = &map.outer_factor * &z;
            let inner = map.formula(0, &z, &x2);
            rel_log2(&inner.distance(&outer), &scale)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    ContinuityCheck {
        seam: usize::MAX,
        passed: worst.exp2() <= tol,
        max_discrepancy: worst.exp2(),
        samples,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircleCheck {
    pub passed: bool,
    pub max_rel_error: f64,
    pub checked: usize,
}

/// `f(z_n e^{iβ}) = z_{n+1} e^{iβ}` over `samples` angles and every `n`
/// with `z_{n+1}` in the prefix.
pub fn verify_circle_identity(map: &PiecewiseQCMap, samples: usize, tol: f64) -> CircleCheck {
    let pts = map.seq.points();
    let prec = map.prec();
    let angles = sample_angles(samples, prec);
    let jobs: Vec<(usize, &Float)> = (0..pts.len() - 1).flat_map(|n| angles.iter().map(move |b| (n, b))).collect();
    let worst = jobs
        .par_iter()
        .map(|&(n, beta)| {
            let rot = ComplexPoint::cis(beta);
            match map.evaluate(&(&pts[n] * &rot)) {
                Ok(img) => {
                    let expected = &pts[n + 1] * &rot;
                    rel_log2(&img.distance(&expected), &pts[n + 1].abs())
                }
                Err(_) => f64::INFINITY,
            }
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    CircleCheck {
        passed: worst.exp2() <= tol,
        max_rel_error: worst.exp2(),
        checked: jobs.len(),
    }
}

/// Checks `φ(x + i(y + 2π)) - φ(x + iy) = 2πi` on a small grid inside the
/// annulus, to working precision.
pub fn periodicity_audit(params: &AnnulusMapParams) -> bool {
    let prec = params.d.prec();
    let two_pi = Float::with_val(prec, pi(prec) * 2u32);
    let slack = Float::with_val(prec, Float::with_val(prec, 1u32) >> (prec as i32 - 8));
    let fractions = [0.0, 0.25, 0.5, 1.0];
    let ys = [-3.0, -1.0, 0.0, std::f64::consts::FRAC_PI_3, 2.5];
    fractions.iter().all(|&t| {
        let x = Float::with_val(prec, &params.d * t);
        ys.iter().all(|&yv| {
            let y = Float::with_val(prec, yv);
            let y_shift = Float::with_val(prec, &y + &two_pi);
            let (re0, im0) = params.phi(&x, &y);
            let (re1, im1) = params.phi(&x, &y_shift);
            let gap = Float::with_val(prec, &im1 - &im0) - &two_pi;
            let scale = Float::with_val(prec, im1.abs_ref()) + 1u32;
            re0 == re1 && Float::with_val(prec, gap.abs()) <= Float::with_val(prec, &slack * &scale)
        })
    })
}

/// `(min, max)` of `|f|` on `|z| = r`.
pub fn modulus_bounds(map: &PiecewiseQCMap, r: &Float, samples: usize) -> Result<(Float, Float)> {
    if samples == 0 {
        return Err(OrbitError::InvalidParameter("sample count must be positive".into()));
    }
    if *r <= 0 || r > map.outer_radius() || r < map.inner_radius() {
        return Err(OrbitError::OutOfRange(format!(
            "radius {:.6e} outside the covered range",
            r.to_f64()
        )));
    }
    let prec = map.prec();
    let values: Vec<Float> = sample_angles(samples, prec)
        .par_iter()
        .map(|beta| map.evaluate(&ComplexPoint::polar(r, beta)).map(|w| w.abs()))
        .collect::<Result<_>>()?;
    let min = values.iter().min_by(|a, b| a.partial_cmp(b).unwrap()).unwrap().clone();
    let max = values.iter().max_by(|a, b| a.partial_cmp(b).unwrap()).unwrap().clone();
    Ok((min, max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::pow2;

    fn dyadic(exps: impl Iterator<Item = i64>) -> OrbitSequence {
        OrbitSequence::new(exps.map(|e| ComplexPoint::from_real(pow2(256, e))).collect(), 256, None).unwrap()
    }

    fn geometric(len: i64) -> OrbitSequence {
        dyadic((0..len).map(|n| -(n + 1)))
    }

    fn doubly(len: u32) -> OrbitSequence {
        dyadic((0..len).map(|n| -(1i64 << n)))
    }

    fn hyp(mu: f64, nu: f64, c: f64, d: f64) -> QCHypotheses {
        QCHypotheses {
            params: QRParams::new(mu, nu, c, 0).unwrap(),
            d,
        }
    }

    #[test]
    fn geometric_is_conformal() {
        let map = build_qc_map(&geometric(8), &hyp(1.0, 1.0, 2.0, 0.5)).unwrap();
        assert_eq!(map.k_global(), 1.0);
        for a in map.annuli() {
            assert_eq!(a.g_prime(), 1);
            assert!(a.alpha.is_zero());
        }
        let half = ComplexPoint::from_f64(1.0, 0.0, 256);
        assert!(map.evaluate(&half).unwrap().same_as(&ComplexPoint::from_f64(0.5, 0.0, 256)));
        let r = verify_orbit_realization(&map, 1e-60);
        assert!(r.passed);
        assert_eq!(r.max_rel_residual, 0.0);
    }

    #[test]
    fn doubly_exponential_has_k_two() {
        let map = build_qc_map(&doubly(8), &hyp(2.0, 2.0, 1.01, 0.5)).unwrap();
        for a in &map.dilatation().per_annulus {
            assert_eq!(a.k, 2.0);
            assert!((a.mu_abs - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(map.dilatation().within_bound.unwrap());
    }

    #[test]
    fn dilatation_examples() {
        let ln2 = Float::with_val(256, Constant::Log2);
        let same = AnnulusMapParams::new(0, ln2.clone(), ln2.clone(), Float::new(256));
        assert_eq!(dilatation(&same), Dilatation { mu_abs: 0.0, k: 1.0 });
        let double = AnnulusMapParams::new(0, ln2.clone(), Float::with_val(256, &ln2 * 2u32), Float::new(256));
        assert_eq!(dilatation(&double).k, 2.0);
        let twist = AnnulusMapParams::new(0, ln2.clone(), ln2.clone(), Float::with_val(256, pi(256) * 2u32));
        let t = 2.0 * std::f64::consts::PI / std::f64::consts::LN_2;
        let expected = (t * t / (4.0 + t * t)).sqrt();
        assert!((dilatation(&twist).mu_abs - expected).abs() < 1e-12);
    }

    #[test]
    fn evaluation_cases() {
        let map = build_qc_map(&doubly(8), &hyp(2.0, 2.0, 1.01, 0.5)).unwrap();
        let pts = map.sequence().points().to_vec();
        assert!(map.evaluate(&pts[0]).unwrap().same_as(&pts[1]));
        assert!(map.evaluate(&ComplexPoint::zero(256)).unwrap().is_zero());
        let beta = Float::with_val(256, 0.3);
        let rot = ComplexPoint::cis(&beta);
        for n in 0..pts.len() - 1 {
            let img = map.evaluate(&(&pts[n] * &rot)).unwrap();
            assert!(img.distance(&(&pts[n + 1] * &rot)) <= Float::with_val(256, pts[n + 1].abs() >> 240));
        }
        let deep = ComplexPoint::from_real(pow2(256, -200));
        assert_eq!(map.evaluate(&deep), Err(OrbitError::BeyondPrefix));
    }

    #[test]
    fn hypotheses_are_enforced() {
        let up = dyadic([-1, -3, -2, -4].into_iter());
        assert_eq!(build_qc_map(&up, &hyp(1.0, 1.0, 2.0, 0.5)).unwrap_err(), OrbitError::NotDecreasing(1));
        let slow = dyadic([-1, -2, -3].into_iter());
        assert!(matches!(
            build_qc_map(&slow, &hyp(1.0, 1.0, 2.0, 0.25)),
            Err(OrbitError::ContractionViolated { n: 0, .. })
        ));
        assert!(matches!(
            build_qc_map(&doubly(8), &hyp(1.0, 1.0, 1.01, 0.5)),
            Err(OrbitError::GrowthConditionViolated { .. })
        ));
    }

    #[test]
    fn seams_and_periodicity() {
        let map = build_qc_map(&doubly(8), &hyp(2.0, 2.0, 1.01, 0.5)).unwrap();
        let c = verify_boundary_continuity(&map, 2, 64, 1e-30).unwrap();
        assert!(c.passed, "{c:?}");
        assert!(verify_outer_continuity(&map, 16, 1e-30).passed);
        assert!(verify_boundary_continuity(&map, 5, 4, 1e-30).is_err());
        assert!(map.annuli().iter().all(periodicity_audit));
    }

    #[test]
    fn modulus_bounds_cases() {
        let map = build_qc_map(&geometric(8), &hyp(1.0, 1.0, 2.0, 0.5)).unwrap();
        let (m, mx) = modulus_bounds(&map, &Float::with_val(256, 0.25), 16).unwrap();
        assert_eq!((m.to_f64(), mx.to_f64()), (0.125, 0.125));
        assert!(modulus_bounds(&map, &Float::with_val(256, 2.0), 4).is_err());
    }
}
