// SPDX-License-Identifier: Apache-2.0

//! Generators for the reference sequences used across the test corpus.

use std::fmt;
use std::str::FromStr;

use rug::Float;
use serde::Serialize;

use crate::error::{OrbitError, Result};
use crate::model::{OrbitSequence, Tail};
use crate::precision::{pi, pow2, ComplexPoint, DEFAULT_PRECISION};

/// Default ceiling on working precision, overridable through
/// `ORBITFORGE_PRECISION_CAP`.
pub const DEFAULT_PRECISION_CAP: u64 = 1 << 20;

pub const PRECISION_CAP_ENV: &str = "ORBITFORGE_PRECISION_CAP";

pub fn precision_cap() -> u64 {
    std::env::var(PRECISION_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_PRECISION_CAP)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GalleryId {
    /// 1, 1/2, then repeated squaring.
    Ex3_1,
    /// `2^{-2^n} + 2^{-b^{n+2}}`.
    Ex3_2,
    /// `2^{-a^n}` with `1 < a < 2`.
    Ex3_3,
    /// Squaring perturbed by `2^{m^2} z^m` terms switched on late.
    Ex3_4,
    /// Orbit of a quasiconformal spiral map with ratio `1 - |z|`.
    QRClever,
    /// Three interleaved strands approaching 0.
    QRNew,
    /// Alternating halving and squaring.
    AppendixCounter,
}

impl GalleryId {
    pub const ALL: [GalleryId; 7] = [
        GalleryId::Ex3_1,
        GalleryId::Ex3_2,
        GalleryId::Ex3_3,
        GalleryId::Ex3_4,
        GalleryId::QRClever,
        GalleryId::QRNew,
        GalleryId::AppendixCounter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GalleryId::Ex3_1 => "Ex3_1",
            GalleryId::Ex3_2 => "Ex3_2",
            GalleryId::Ex3_3 => "Ex3_3",
            GalleryId::Ex3_4 => "Ex3_4",
            GalleryId::QRClever => "QRClever",
            GalleryId::QRNew => "QRNew",
            GalleryId::AppendixCounter => "AppendixCounter",
        }
    }
}

impl fmt::Display for GalleryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GalleryId {
    type Err = OrbitError;

    fn from_str(s: &str) -> Result<Self> {
        GalleryId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| OrbitError::InvalidParameter(format!("unknown gallery id `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratorParams {
    pub count: usize,
    /// Minimum working precision; generators raise it as needed.
    pub precision_bits: u32,
    pub precision_cap: u64,
    /// Ex3_2 exponent base.
    pub b: u32,
    /// Ex3_3 exponent base.
    pub a: f64,
    /// Ex3_4: highest perturbation power.
    pub max_term: u32,
    /// Ex3_4: log2 of the closeness target δ.
    pub delta_log2: i32,
    /// Ex3_4: explicit activation indices `N_3, N_4, …`; `None` means never.
    pub schedule: Option<Vec<Option<usize>>>,
    pub eps: f64,
    pub s: f64,
    /// QRClever start point on the positive axis; defaults to `s/2`.
    pub z0: Option<f64>,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            count: 8,
            precision_bits: DEFAULT_PRECISION,
            precision_cap: DEFAULT_PRECISION_CAP,
            b: 10,
            a: 1.5,
            max_term: 8,
            delta_log2: -20,
            schedule: None,
            eps: 1e-3,
            s: 1e-2,
            z0: None,
        }
    }
}

impl GeneratorParams {
    pub fn with_count(count: usize) -> Self {
        GeneratorParams {
            count,
            precision_cap: precision_cap(),
            ..Self::default()
        }
    }
}

/// Working precision the generator will use for `id` under `params`.
pub fn required_precision(id: GalleryId, params: &GeneratorParams) -> u64 {
    let base = u64::from(params.precision_bits);
    let count = params.count as u64;
    let need = match id {
        GalleryId::Ex3_1 | GalleryId::QRClever | GalleryId::AppendixCounter => base,
        GalleryId::Ex3_2 => u64::from(params.b)
            .checked_pow(u32::try_from(count + 1).unwrap_or(u32::MAX))
            .map_or(u64::MAX, |v| v.saturating_add(64)),
        GalleryId::Ex3_3 => base + (count as f64 * params.a.log2()).ceil() as u64 + 16,
        GalleryId::Ex3_4 => 1u64
            .checked_shl(u32::try_from(count.saturating_sub(1)).unwrap_or(u32::MAX))
            .filter(|&v| v != 0)
            .map_or(u64::MAX, |v| v.saturating_mul(u64::from(params.max_term)).saturating_add(256)),
        GalleryId::QRNew => {
            let m = count.saturating_sub(1) / 3 + 2;
            ((m * m) as f64 * std::f64::consts::LOG2_E).ceil() as u64 + 256
        }
    };
    need.max(base)
}

fn working_precision(id: GalleryId, params: &GeneratorParams) -> Result<u32> {
    let required = required_precision(id, params);
    if required > params.precision_cap || required > u64::from(rug::float::prec_max()) {
        return Err(OrbitError::PrecisionCap {
            required,
            cap: params.precision_cap,
        });
    }
    Ok(required as u32)
}

fn validate(id: GalleryId, params: &GeneratorParams) -> Result<()> {
    if params.count < 2 {
        return Err(OrbitError::TooShort {
            len: params.count,
            min: 2,
        });
    }
    match id {
        GalleryId::Ex3_1 if params.count > 31 => Err(OrbitError::OutOfRange(
            "terms beyond index 30 leave the exponent range".into(),
        )),
        GalleryId::Ex3_2 if params.b < 3 => Err(OrbitError::InvalidParameter("b must be at least 3".into())),
        GalleryId::Ex3_3 if !(params.a > 1.0 && params.a < 2.0) => {
            Err(OrbitError::InvalidParameter(format!("a = {} must lie in (1, 2)", params.a)))
        }
        GalleryId::Ex3_4 if params.max_term < 3 => Err(OrbitError::InvalidParameter("max_term must be at least 3".into())),
        GalleryId::QRClever => {
            if !(params.eps > 0.0 && params.eps.is_finite()) {
                return Err(OrbitError::InvalidParameter("ε must be positive".into()));
            }
            if !(params.s > 0.0 && params.s < 1.0) {
                return Err(OrbitError::InvalidParameter("s must lie in (0, 1)".into()));
            }
            let z0 = params.z0.unwrap_or(params.s / 2.0);
            if !(z0 > 0.0 && z0 < params.s) {
                return Err(OrbitError::InvalidParameter("z0 must lie in (0, s)".into()));
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

fn finish(points: Vec<ComplexPoint>, prec: u32) -> Result<OrbitSequence> {
    if let Some(n) = points.iter().position(|z| !z.is_finite() || z.is_zero()) {
        return Err(OrbitError::OutOfRange(format!(
            "term {n} leaves the exponent range; shorten the prefix"
        )));
    }
    OrbitSequence::new(points, prec, Some(Tail::TendsToZero))
}

pub fn generate(id: GalleryId, params: &GeneratorParams) -> Result<OrbitSequence> {
    validate(id, params)?;
    let prec = working_precision(id, params)?;
    let count = params.count;
    let points = match id {
        GalleryId::Ex3_1 => (0..count)
            .map(|n| {
                let e = if n == 0 { 0 } else { -(1i64 << (n - 1)) };
                ComplexPoint::from_real(pow2(prec, e))
            })
            .collect(),
        GalleryId::Ex3_2 => (0..count)
            .map(|n| {
                let main = pow2(prec, -(1i64 << n));
                let eps_exp = i64::from(params.b).pow(n as u32 + 2);
                ComplexPoint::from_real(main + pow2(prec, -eps_exp))
            })
            .collect(),
        GalleryId::Ex3_3 => {
            let a = Float::with_val(prec, params.a);
            (0..count)
                .map(|n| {
                    let e = Float::with_val(prec, rug::ops::Pow::pow(&a, n as u32));
                    ComplexPoint::from_real((-e).exp2())
                })
                .collect()
        }
        GalleryId::Ex3_4 => ex3_4_orbit(params, prec)?.0,
        GalleryId::QRClever => {
            let z0 = params.z0.unwrap_or(params.s / 2.0);
            let mut pts = vec![ComplexPoint::from_f64(z0, 0.0, prec)];
            for _ in 1..count {
                let next = qrclever_apply(pts.last().unwrap(), params.eps, params.s).value;
                pts.push(next);
            }
            pts
        }
        GalleryId::QRNew => (0..count).map(|n| qrnew_point(n, prec)).collect(),
        GalleryId::AppendixCounter => {
            let mut e = -1i64;
            let mut exps = vec![e];
            for n in 1..count {
                e = if n % 2 == 0 { e - 1 } else { 2 * e };
                if e < -(1i64 << 30) + 2 {
                    return Err(OrbitError::OutOfRange(format!("term {n} leaves the exponent range")));
                }
                exps.push(e);
            }
            exps.into_iter().map(|e| ComplexPoint::from_real(pow2(prec, e))).collect()
        }
    };
    finish(points, prec)
}

/// `z_n` of the three-strand sequence.
pub fn qrnew_point(n: usize, prec: u32) -> ComplexPoint {
    let m = (n / 3) as u64 + 2;
    let lead = Float::with_val(prec, -(m as f64)).exp();
    match n % 3 {
        0 => ComplexPoint::from_real(lead),
        1 => {
            let sq = Float::with_val(prec, -((m * m) as f64)).exp();
            ComplexPoint::from_real(lead - sq)
        }
        _ => ComplexPoint::from_real(-(lead / 2u32)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CleverImage {
    pub value: ComplexPoint,
    /// Input was 0, where the angle is undefined; the image is 0 by continuity.
    pub zero_input: bool,
}

/// Spiral map `|z|(1-|z|)e^{i t(arg z)}` for `|z| <= s`, `|z|(1-s)e^{i t(arg z)}`
/// beyond, with `arg z ∈ [0, 2π)` and `t(y) = 2y + ε` on `[0, π/2]`,
/// `2(y + π)/3 + ε` on `(π/2, 2π)`.
pub fn qrclever_apply(z: &ComplexPoint, eps: f64, s: f64) -> CleverImage {
    let prec = z.prec();
    if z.is_zero() {
        return CleverImage {
            value: ComplexPoint::zero(prec),
            zero_input: true,
        };
    }
    let mut y = z.arg();
    if y < 0 {
        y += Float::with_val(prec, pi(prec) * 2u32);
    }
    let half_pi = Float::with_val(prec, pi(prec) / 2u32);
    let t = if y <= half_pi {
        Float::with_val(prec, &y * 2u32) + eps
    } else {
        Float::with_val(prec, (y + pi(prec)) * 2u32) / 3u32 + eps
    };
    let r = z.abs();
    let s_f = Float::with_val(prec, s);
    let factor = if r <= s_f {
        Float::with_val(prec, 1u32 - &r)
    } else {
        Float::with_val(prec, 1u32 - &s_f)
    };
    CleverImage {
        value: ComplexPoint::polar(&Float::with_val(prec, &r * &factor), &t),
        zero_input: false,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaEntry {
    pub m: u32,
    /// First index at which `σ_{m,n} = 2^{m²}`; `None` when the term never
    /// switches on inside the prefix.
    pub n_m: Option<usize>,
    pub coefficient_log2: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaSchedule {
    pub entries: Vec<SigmaEntry>,
    pub delta_log2: i32,
    /// log2 of max_n |z_{n+1} - z_n²| / |z_n|², certified below `delta_log2`.
    pub max_rel_perturbation_log2: f64,
    pub precision_bits: u32,
}

impl SigmaSchedule {
    /// Coefficients `a_m = 2^{m²}` active by index `n`.
    pub fn active_coefficients(&self, n: usize) -> Vec<(u32, u64)> {
        self.entries
            .iter()
            .filter(|e| e.n_m.is_some_and(|nm| nm <= n))
            .map(|e| (e.m, e.coefficient_log2))
            .collect()
    }

    /// First index from which every term that ever switches on is active.
    pub fn settled_from(&self) -> usize {
        self.entries.iter().filter_map(|e| e.n_m).max().unwrap_or(0)
    }
}

/// Builds the perturbed-squaring prefix and its activation schedule. Term `m`
/// switches on at the first `n` with `2^{m²}|z_n|^{m-2} < δ/(max_term-2)`, so
/// the active terms add less than `δ|z_n|²` at every step; the bound is then
/// re-checked on the generated values.
fn ex3_4_orbit(params: &GeneratorParams, prec: u32) -> Result<(Vec<ComplexPoint>, SigmaSchedule)> {
    let terms: Vec<u32> = (3..=params.max_term).collect();
    let budget_log2 = f64::from(params.delta_log2) - f64::from(params.max_term - 2).log2();
    let mut n_m: Vec<Option<usize>> = match &params.schedule {
        Some(explicit) => terms.iter().enumerate().map(|(i, _)| explicit.get(i).copied().flatten()).collect(),
        None => vec![None; terms.len()],
    };
    let adaptive = params.schedule.is_none();
    let mut pts = vec![ComplexPoint::from_real(pow2(prec, -1))];
    let mut worst = f64::NEG_INFINITY;
    for n in 0..params.count - 1 {
        let z = pts[n].clone();
        let log2_abs = Float::with_val(64, z.abs().log2_ref()).to_f64();
        if adaptive {
            for (slot, &m) in n_m.iter_mut().zip(&terms) {
                let size = f64::from(m * m) + f64::from(m - 2) * log2_abs;
                if slot.is_none() && size < budget_log2 {
                    *slot = Some(n);
                }
            }
        }
        let square = &z * &z;
        let mut next = square.clone();
        let mut power = square.clone();
        for (slot, &m) in n_m.iter().zip(&terms) {
            power = &power * &z;
            if slot.is_some_and(|nm| nm <= n) {
                next = &next + &power.mul_pow2((m * m) as i32);
            }
        }
        let pert = next.distance(&square);
        if !pert.is_zero() {
            let rel = Float::with_val(64, (pert / square.abs()).log2_ref()).to_f64();
            worst = worst.max(rel);
        }
        pts.push(next);
    }
    if worst >= f64::from(params.delta_log2) {
        return Err(OrbitError::InvalidParameter(format!(
            "perturbation 2^{worst:.2} exceeds δ = 2^{}",
            params.delta_log2
        )));
    }
    let schedule = SigmaSchedule {
        entries: terms
            .iter()
            .zip(&n_m)
            .map(|(&m, &nm)| SigmaEntry {
                m,
                n_m: nm,
                coefficient_log2: u64::from(m * m),
            })
            .collect(),
        delta_log2: params.delta_log2,
        max_rel_perturbation_log2: worst,
        precision_bits: prec,
    };
    Ok((pts, schedule))
}

pub fn ex3_4_sigma_schedule(params: &GeneratorParams) -> Result<SigmaSchedule> {
    validate(GalleryId::Ex3_4, params)?;
    let prec = working_precision(GalleryId::Ex3_4, params)?;
    Ok(ex3_4_orbit(params, prec)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reals(seq: &OrbitSequence) -> Vec<f64> {
        seq.points().iter().map(|z| z.to_f64().0).collect()
    }

    #[test]
    fn ex3_1_prefix() {
        let seq = generate(GalleryId::Ex3_1, &GeneratorParams::with_count(5)).unwrap();
        assert_eq!(reals(&seq), vec![1.0, 0.5, 0.25, 0.0625, 0.00390625]);
        assert_eq!(seq.tail(), Some(&Tail::TendsToZero));
    }

    #[test]
    fn qrnew_first_strand() {
        let seq = generate(GalleryId::QRNew, &GeneratorParams::with_count(3)).unwrap();
        let e2 = (-2f64).exp();
        let v = reals(&seq);
        assert!((v[0] - e2).abs() < 1e-16);
        assert!((v[1] - (e2 - (-4f64).exp())).abs() < 1e-16);
        assert!((v[2] + e2 / 2.0).abs() < 1e-16);
    }

    #[test]
    fn appendix_prefix() {
        let seq = generate(GalleryId::AppendixCounter, &GeneratorParams::with_count(4)).unwrap();
        assert_eq!(reals(&seq), vec![0.5, 0.25, 0.125, 1.0 / 64.0]);
    }

    #[test]
    fn ex3_2_needs_huge_precision() {
        let p = GeneratorParams::with_count(3);
        assert_eq!(required_precision(GalleryId::Ex3_2, &p), 10_064);
        let seq = generate(GalleryId::Ex3_2, &p).unwrap();
        // z_2 = 1/16 + 2^{-10000}
        let diff = Float::with_val(seq.precision_bits(), seq.point(2).re() - 0.0625);
        assert_eq!(diff, pow2(64, -10_000));
        let too_long = GeneratorParams::with_count(6);
        assert!(matches!(generate(GalleryId::Ex3_2, &too_long), Err(OrbitError::PrecisionCap { .. })));
    }

    #[test]
    fn clever_map_cases() {
        let s = 1e-2;
        let z = ComplexPoint::from_f64(s / 2.0, 0.0, 128);
        let img = qrclever_apply(&z, 1e-3, s).value;
        assert!((img.abs().to_f64() - (s / 2.0) * (1.0 - s / 2.0)).abs() < 1e-18);
        assert!((img.arg().to_f64() - 1e-3).abs() < 1e-15);

        let z = ComplexPoint::from_f64(-0.001, 0.0, 128);
        let img = qrclever_apply(&z, 1e-3, s).value;
        let expected = 4.0 * std::f64::consts::PI / 3.0 + 1e-3 - 2.0 * std::f64::consts::PI;
        assert!((img.arg().to_f64() - expected).abs() < 1e-12);

        let z = ComplexPoint::from_f64(2.0 * s, 0.0, 128);
        assert!((qrclever_apply(&z, 1e-3, s).value.abs().to_f64() - 2.0 * s * (1.0 - s)).abs() < 1e-17);
        assert!(qrclever_apply(&ComplexPoint::zero(64), 1e-3, s).zero_input);
    }

    #[test]
    fn clever_orbit_ratio_increases() {
        let seq = generate(GalleryId::QRClever, &GeneratorParams::with_count(30)).unwrap();
        let m = seq.moduli();
        let ratios: Vec<Float> = m.windows(2).map(|w| Float::with_val(128, &w[1] / &w[0])).collect();
        assert!(ratios.windows(2).all(|r| r[1] > r[0]));
    }

    #[test]
    fn sigma_schedule_certifies_delta() {
        let sched = ex3_4_sigma_schedule(&GeneratorParams::with_count(8)).unwrap();
        assert!(sched.max_rel_perturbation_log2 < -20.0);
        assert!(sched.entries.iter().all(|e| e.n_m.is_some()));
        let n3 = sched.entries[0].n_m.unwrap();
        assert!(sched.entries.iter().all(|e| e.n_m.unwrap() <= n3));
    }

    #[test]
    fn sigma_schedule_never_active_is_pure_squaring() {
        let params = GeneratorParams {
            schedule: Some(vec![None; 6]),
            ..GeneratorParams::with_count(6)
        };
        let seq = generate(GalleryId::Ex3_4, &params).unwrap();
        for (n, z) in seq.points().iter().enumerate() {
            assert_eq!(*z.re(), pow2(64, -(1i64 << n)));
        }
    }

    #[test]
    fn parse_ids() {
        assert_eq!("qrnew".parse::<GalleryId>().unwrap(), GalleryId::QRNew);
        assert!("nope".parse::<GalleryId>().is_err());
    }
}
