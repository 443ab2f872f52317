// SPDX-License-Identifier: Apache-2.0

//! Growth inequalities for sequences tending to zero.
//!
//! All comparisons run on base-2 logarithms of moduli. With
//! `ρ_n = log2(|z_n| / |z_{n+1}|)` the two-sided conditions read
//!
//! ```text
//! ρ_n >= 0:  μ·ρ_n - 2·log2 C <= ρ_{n+1} <= 2·log2 C + ν·ρ_n
//! ρ_n <= 0:  the same with ρ replaced by -ρ
//! ```
//!
//! and Hölder behaviour `x_n^α <= x_{n+1} <= x_n^β` becomes
//! `α·log2 x_n <= log2 x_{n+1} <= β·log2 x_n`.

use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use crate::error::{OrbitError, Result};
use crate::model::OrbitSequence;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QRParams {
    pub mu: f64,
    pub nu: f64,
    pub c: f64,
    pub n0: usize,
}

impl QRParams {
    pub fn new(mu: f64, nu: f64, c: f64, n0: usize) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) || !(nu > 0.0 && nu.is_finite()) {
            return Err(OrbitError::InvalidParameter(format!("μ = {mu}, ν = {nu} must be positive")));
        }
        if !(c > 1.0 && c.is_finite()) {
            return Err(OrbitError::InvalidParameter(format!("C = {c} must exceed 1")));
        }
        Ok(QRParams { mu, nu, c, n0 })
    }

    /// Parameters with `C = 2^log2_c`.
    pub fn from_log2_c(mu: f64, nu: f64, log2_c: f64, n0: usize) -> Result<Self> {
        Self::new(mu, nu, log2_c.exp2(), n0)
    }

    pub fn log2_c(&self) -> f64 {
        self.c.log2()
    }
}

/// `log2 |z_n|` for every point; errors on a zero modulus.
pub fn log2_moduli(seq: &OrbitSequence) -> Result<Vec<f64>> {
    seq.points()
        .iter()
        .enumerate()
        .map(|(n, z)| {
            let m = z.abs();
            if m.is_zero() {
                return Err(OrbitError::ZeroModulus(n));
            }
            Ok(Float::with_val(64, m.log2_ref()).to_f64())
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    E1Lower,
    E1Upper,
    E1bLower,
    E1bUpper,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QRWitness {
    pub n: usize,
    pub side: Side,
    /// Both sides in log2 units; the check requires `lhs <= rhs`.
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QRConditionReport {
    pub e1_ok: bool,
    pub e1b_ok: bool,
    pub witnesses: Vec<QRWitness>,
    pub checked: usize,
}

impl QRConditionReport {
    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }
}

fn rho(l: &[f64]) -> Vec<f64> {
    l.windows(2).map(|w| w[0] - w[1]).collect()
}

#[derive(Clone, Copy)]
enum Halves {
    Both,
    /// Upper bound of the first ratio test, lower bound of the second.
    OneSided,
}

fn scan(rho: &[f64], params: &QRParams, halves: Halves, stop_at_first: bool) -> QRConditionReport {
    let lc2 = 2.0 * params.log2_c();
    let mut witnesses = Vec::new();
    let mut checked = 0;
    let both = matches!(halves, Halves::Both);
    for n in params.n0..rho.len().saturating_sub(1) {
        checked += 1;
        let (r0, r1) = (rho[n], rho[n + 1]);
        let mut push = |side, lhs: f64, rhs: f64| {
            if lhs > rhs {
                witnesses.push(QRWitness { n, side, lhs, rhs });
            }
        };
        if r0 >= 0.0 {
            if both {
                push(Side::E1Lower, params.mu * r0 - lc2, r1);
            }
            push(Side::E1Upper, r1, lc2 + params.nu * r0);
        }
        // Equal moduli fall under both branches in the one-sided version.
        if r0 < 0.0 || (r0 == 0.0 && !both) {
            let (s0, s1) = (-r0, -r1);
            push(Side::E1bLower, params.mu * s0 - lc2, s1);
            if both {
                push(Side::E1bUpper, s1, lc2 + params.nu * s0);
            }
        }
        if stop_at_first && !witnesses.is_empty() {
            break;
        }
    }
    let e1_ok = !witnesses.iter().any(|w| matches!(w.side, Side::E1Lower | Side::E1Upper));
    let e1b_ok = !witnesses.iter().any(|w| matches!(w.side, Side::E1bLower | Side::E1bUpper));
    QRConditionReport {
        e1_ok,
        e1b_ok,
        witnesses,
        checked,
    }
}

/// Two-sided necessary conditions for every `n >= n0` with `n + 2 < len`.
pub fn check_necessary(seq: &OrbitSequence, params: &QRParams) -> Result<QRConditionReport> {
    let l = log2_moduli(seq)?;
    Ok(scan(&rho(&l), params, Halves::Both, false))
}

/// One-sided hypotheses used to derive Hölder exponents.
pub fn check_appendix_hypotheses(seq: &OrbitSequence, params: &QRParams) -> Result<QRConditionReport> {
    let l = log2_moduli(seq)?;
    Ok(scan(&rho(&l), params, Halves::OneSided, false))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QRGrid {
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub log2_c: Vec<f64>,
}

impl Default for QRGrid {
    fn default() -> Self {
        let steps: Vec<f64> = (1..=32).map(|k| f64::from(k) * 0.25).collect();
        QRGrid {
            mu: steps.clone(),
            nu: steps,
            log2_c: vec![0.01, 0.1, 0.5, 1.0, 2.0, 5.0],
        }
    }
}

impl QRGrid {
    pub fn len(&self) -> usize {
        self.mu.len() * self.nu.len() * self.log2_c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid point by flat index in (μ, ν, C) lexicographic order.
    fn params(&self, index: usize) -> QRParams {
        let nc = self.log2_c.len();
        let nn = self.nu.len();
        let c = index % nc;
        let nu = (index / nc) % nn;
        let mu = index / (nc * nn);
        QRParams {
            mu: self.mu[mu],
            nu: self.nu[nu],
            c: self.log2_c[c].exp2(),
            n0: 0,
        }
    }
}

/// First grid point (μ ascending, then ν, then C) passing the two-sided check
/// with `n0 = 0`.
pub fn search_params(seq: &OrbitSequence, grid: &QRGrid) -> Result<Option<QRParams>> {
    if grid.is_empty() {
        return Err(OrbitError::EmptyGrid);
    }
    let mut sorted = grid.clone();
    for axis in [&mut sorted.mu, &mut sorted.nu, &mut sorted.log2_c] {
        axis.sort_by(f64::total_cmp);
    }
    let r = rho(&log2_moduli(seq)?);
    let hit = (0..sorted.len())
        .into_par_iter()
        .find_first(|&i| scan(&r, &sorted.params(i), Halves::Both, true).passed());
    Ok(hit.map(|i| sorted.params(i)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolderExponents {
    pub alpha: f64,
    pub beta: f64,
    /// First index from which the bounds are claimed.
    pub n_start: usize,
}

/// `α = μ + 2 + max(μ, ν)`, `β = μ / (2(μ + 1))`, and the least `N >= n0`
/// such that every later prefix point has `x_n < min(1, C^{-4/μ})`.
pub fn derive_holder(params: &QRParams, seq: &OrbitSequence) -> Result<HolderExponents> {
    let l = log2_moduli(seq)?;
    let threshold = (-4.0 * params.log2_c() / params.mu).min(0.0);
    let last_bad = l.iter().rposition(|&x| x >= threshold);
    let n_start = match last_bad {
        None => params.n0,
        Some(i) if i + 1 < l.len() => (i + 1).max(params.n0),
        Some(_) => return Err(OrbitError::NoHolderStart),
    };
    if n_start >= l.len() {
        return Err(OrbitError::NoHolderStart);
    }
    Ok(HolderExponents {
        alpha: params.mu + 2.0 + params.mu.max(params.nu),
        beta: params.mu / (2.0 * (params.mu + 1.0)),
        n_start,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderViolation {
    pub n: usize,
    /// `true` for `x_n^α <= x_{n+1}`, `false` for `x_{n+1} <= x_n^β`.
    pub lower: bool,
    pub log2_x_n: f64,
    pub log2_x_next: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderReport {
    pub passed: bool,
    pub violations: Vec<HolderViolation>,
    pub checked: usize,
}

/// Checks `x_n^α <= x_{n+1} <= x_n^β` for `N <= n < len - 1`.
pub fn verify_holder(seq: &OrbitSequence, exps: &HolderExponents) -> Result<HolderReport> {
    let l = log2_moduli(seq)?;
    let mut violations = Vec::new();
    let mut checked = 0;
    for n in exps.n_start..l.len().saturating_sub(1) {
        checked += 1;
        let (a, b) = (l[n], l[n + 1]);
        if exps.alpha * a > b {
            violations.push(HolderViolation {
                n,
                lower: true,
                log2_x_n: a,
                log2_x_next: b,
            });
        }
        if b > exps.beta * a {
            violations.push(HolderViolation {
                n,
                lower: false,
                log2_x_n: a,
                log2_x_next: b,
            });
        }
    }
    Ok(HolderReport {
        passed: violations.is_empty(),
        violations,
        checked,
    })
}

/// Index pairs `(i, j)` whose images `(z_{i+1}, z_{j+1})` are compared.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum PairSelector {
    /// `(period·m + first, period·m + second)` for `m >= start`.
    Stride {
        period: usize,
        first: usize,
        second: usize,
        start: usize,
    },
    /// `(n, n + 1)` for every n.
    Consecutive,
    Explicit(Vec<(usize, usize)>),
}

impl PairSelector {
    pub fn pairs(&self, len: usize) -> Vec<(usize, usize)> {
        let fits = |(i, j): (usize, usize)| i != j && i + 1 < len && j + 1 < len;
        match self {
            PairSelector::Stride {
                period,
                first,
                second,
                start,
            } => {
                if *period == 0 {
                    return Vec::new();
                }
                (*start..)
                    .map(|m| (period * m + first, period * m + second))
                    .take_while(|&(i, j)| i.max(j) + 1 < len)
                    .filter(|&p| fits(p))
                    .collect()
            }
            PairSelector::Consecutive => (0..len.saturating_sub(2)).map(|n| (n, n + 1)).collect(),
            PairSelector::Explicit(v) => v.iter().copied().filter(|&p| fits(p)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairWitness {
    pub i: usize,
    pub j: usize,
    /// ln |z_{i+1} - z_{j+1}|
    pub ln_lhs: f64,
    /// ln C + α·ln |z_i - z_j|
    pub ln_rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderScanEntry {
    pub alpha: f64,
    pub c: f64,
    pub witness: Option<PairWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderScan {
    pub entries: Vec<HolderScanEntry>,
    /// Every (α, C) has a witness: no map with these Hölder constants can
    /// realize the sequence.
    pub all_witnessed: bool,
    pub pairs_examined: usize,
}

/// For each `(α, C)` finds the first selected pair with
/// `|z_{i+1} - z_{j+1}| > C·|z_i - z_j|^α`.
pub fn holder_violation_scan(
    seq: &OrbitSequence,
    alpha_grid: &[f64],
    c_grid: &[f64],
    selector: &PairSelector,
) -> Result<HolderScan> {
    if alpha_grid.is_empty() || c_grid.is_empty() {
        return Err(OrbitError::EmptyGrid);
    }
    let pairs = selector.pairs(seq.len());
    if pairs.is_empty() {
        return Err(OrbitError::EmptySelection);
    }
    let pts = seq.points();
    let ln_dist = |a: usize, b: usize| -> f64 {
        let d = pts[a].distance(&pts[b]);
        if d.is_zero() {
            f64::NEG_INFINITY
        } else {
            Float::with_val(64, d.ln_ref()).to_f64()
        }
    };
    let logs: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| (ln_dist(i + 1, j + 1), ln_dist(i, j)))
        .collect();
    let grid: Vec<(f64, f64)> = alpha_grid
        .iter()
        .flat_map(|&a| c_grid.iter().map(move |&c| (a, c)))
        .collect();
    let entries: Vec<HolderScanEntry> = grid
        .par_iter()
        .map(|&(alpha, c)| {
            let witness = pairs.iter().zip(&logs).find_map(|(&(i, j), &(ln_img, ln_pre))| {
                let ln_rhs = c.ln() + alpha * ln_pre;
                (ln_img > ln_rhs).then_some(PairWitness {
                    i,
                    j,
                    ln_lhs: ln_img,
                    ln_rhs,
                })
            });
            HolderScanEntry { alpha, c, witness }
        })
        .collect();
    Ok(HolderScan {
        all_witnessed: entries.iter().all(|e| e.witness.is_some()),
        entries,
        pairs_examined: pairs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::{pow2, ComplexPoint};

    fn powers(exponents: impl Iterator<Item = i64>) -> OrbitSequence {
        let pts = exponents.map(|e| ComplexPoint::from_real(pow2(256, e))).collect();
        OrbitSequence::new(pts, 256, None).unwrap()
    }

    fn doubly(len: u32) -> OrbitSequence {
        powers((0..len).map(|n| -(1i64 << n)))
    }

    fn geometric(len: i64) -> OrbitSequence {
        powers((0..len).map(|n| -(n + 1)))
    }

    fn appendix(len: usize) -> OrbitSequence {
        let mut e = vec![-1i64];
        for n in 1..len {
            let prev = e[n - 1];
            e.push(if n % 2 == 0 { prev - 1 } else { 2 * prev });
        }
        powers(e.into_iter())
    }

    #[test]
    fn doubly_exponential_passes_square_params() {
        let p = QRParams::new(2.0, 2.0, 1.01, 0).unwrap();
        let r = check_necessary(&doubly(12), &p).unwrap();
        assert!(r.passed() && r.e1_ok && r.e1b_ok);
        assert_eq!(r.checked, 10);
    }

    #[test]
    fn geometric_passes_unit_params() {
        let p = QRParams::new(1.0, 1.0, 2.0, 0).unwrap();
        assert!(check_necessary(&geometric(10), &p).unwrap().passed());
    }

    #[test]
    fn appendix_sequence_fails_upper_half() {
        let p = QRParams::new(1.0, 8.0, 64.0, 0).unwrap();
        let r = check_necessary(&appendix(16), &p).unwrap();
        assert!(!r.e1_ok);
        let w = r.witnesses.iter().find(|w| w.side == Side::E1Upper).unwrap();
        assert_eq!(w.n % 2, 1);
        assert!(!check_appendix_hypotheses(&appendix(16), &p).unwrap().passed());
    }

    #[test]
    fn zero_modulus_is_rejected() {
        let seq = OrbitSequence::from_f64(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)], 64, None).unwrap();
        let p = QRParams::new(1.0, 1.0, 2.0, 0).unwrap();
        assert_eq!(check_necessary(&seq, &p), Err(OrbitError::ZeroModulus(1)));
    }

    #[test]
    fn search_finds_feasible_square_params() {
        let found = search_params(&doubly(10), &QRGrid::default()).unwrap().unwrap();
        assert!(found.mu <= 2.0 && 2.0 <= found.nu);
    }

    #[test]
    fn search_on_unit_grid_finds_unit_params() {
        let grid = QRGrid {
            mu: vec![1.0, 2.0],
            nu: vec![1.0, 2.0],
            log2_c: vec![0.01, 0.1],
        };
        let found = search_params(&geometric(12), &grid).unwrap().unwrap();
        assert_eq!((found.mu, found.nu, found.log2_c()), (1.0, 1.0, 0.01f64.exp2().log2()));
    }

    #[test]
    fn search_rejects_empty_grid_and_counterexample() {
        let empty = QRGrid {
            mu: vec![],
            ..QRGrid::default()
        };
        assert_eq!(search_params(&geometric(5), &empty), Err(OrbitError::EmptyGrid));
        assert_eq!(search_params(&appendix(16), &QRGrid::default()).unwrap(), None);
    }

    #[test]
    fn derive_holder_plugs_in() {
        let seq = doubly(8);
        let h = derive_holder(&QRParams::new(2.0, 2.0, 1.01, 0).unwrap(), &seq).unwrap();
        assert_eq!(h.alpha, 6.0);
        assert!((h.beta - 1.0 / 3.0).abs() < 1e-15);
        let h = derive_holder(&QRParams::new(1.0, 1.0, 1.0 + 1e-9, 0).unwrap(), &seq).unwrap();
        assert_eq!((h.alpha, h.beta), (4.0, 0.25));
    }

    #[test]
    fn derive_holder_start_index() {
        // C^{-4/μ} = 2^{-8} with log2 C = 4, μ = 2: first x_n below is 2^{-16}.
        let h = derive_holder(&QRParams::new(2.0, 2.0, 16.0, 0).unwrap(), &doubly(8)).unwrap();
        assert_eq!(h.n_start, 4);
        let flat = powers([-1, -1, -1].into_iter());
        assert_eq!(
            derive_holder(&QRParams::new(2.0, 2.0, 16.0, 0).unwrap(), &flat),
            Err(OrbitError::NoHolderStart)
        );
    }

    #[test]
    fn verify_holder_examples() {
        let exps = |alpha, beta| HolderExponents {
            alpha,
            beta,
            n_start: 0,
        };
        assert!(verify_holder(&appendix(16), &exps(2.0, 1.0)).unwrap().passed);
        assert!(verify_holder(&doubly(10), &exps(2.01, 1.99)).unwrap().passed);
        let r = verify_holder(&doubly(10), &exps(2.01, 2.01)).unwrap();
        assert_eq!(r.violations.len(), 9);
        assert!(r.violations.iter().all(|v| !v.lower));
    }

    #[test]
    fn halving_orbit_has_no_holder_witness() {
        let seq = geometric(30);
        let scan = holder_violation_scan(&seq, &[0.25, 0.5, 1.0], &[1.0, 5.0], &PairSelector::Consecutive).unwrap();
        assert!(scan.entries.iter().all(|e| e.witness.is_none()));
        assert!(!scan.all_witnessed);
    }

    #[test]
    fn selectors() {
        let s = PairSelector::Stride {
            period: 3,
            first: 0,
            second: 1,
            start: 1,
        };
        assert_eq!(s.pairs(10), vec![(3, 4), (6, 7)]);
        assert_eq!(PairSelector::Consecutive.pairs(4), vec![(0, 1), (1, 2)]);
        assert_eq!(PairSelector::Explicit(vec![(0, 9), (1, 2)]).pairs(4), vec![(1, 2)]);
        let seq = geometric(4);
        assert_eq!(
            holder_violation_scan(&seq, &[1.0], &[1.0], &PairSelector::Explicit(vec![])),
            Err(OrbitError::EmptySelection)
        );
    }
}
