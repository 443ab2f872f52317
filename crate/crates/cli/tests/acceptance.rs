// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: one PASS/FAIL line per criterion, each within its
//! runtime budget. Run with `cargo test -p orbitforge-cli --test acceptance`.

use std::io::Write;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use orbitforge_core::model::Tail;
use orbitforge_core::precision::pow2;
use orbitforge_core::qc::{contraction_factor, verify_circle_identity};
use orbitforge_core::taylor::CoefficientStatus;
use orbitforge_core::{
    build_periodic_realizer, build_qc_map, check_candidate_consistency, check_necessary, derive_holder,
    estimate_coefficients, estimate_order, ex3_4_sigma_schedule, generate, holder_violation_scan, modulus_bounds,
    radius_probe, realizer_family_member, search_params, verify_boundary_continuity, verify_holder,
    verify_orbit_realization, verify_realization, AccumulationData, BaseFunction, ComplexPoint, GalleryId,
    GeneratorParams, HolderExponents, OrbitSequence, PairSelector, PeriodicOrbitSpec, Polynomial, ProbeConfig,
    QCHypotheses, QRGrid, QRParams, RadiusEstimate, ToleranceConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn dyadic(exps: impl Iterator<Item = i64>) -> OrbitSequence {
    OrbitSequence::new(exps.map(|k| ComplexPoint::from_real(pow2(256, k))).collect(), 256, Some(Tail::TendsToZero))
        .unwrap()
}

fn tower(len: u32) -> OrbitSequence {
    dyadic((0..len).map(|n| -(1i64 << n)))
}

fn geometric(len: i64) -> OrbitSequence {
    dyadic((0..len).map(|n| -(n + 1)))
}

fn zero() -> ComplexPoint {
    ComplexPoint::zero(256)
}

fn random_disc(rng: &mut ChaCha8Rng, radius: f64, prec: u32) -> ComplexPoint {
    loop {
        let (x, y) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if x * x + y * y < 1.0 {
            return ComplexPoint::from_f64(radius * x, radius * y, prec);
        }
    }
}

fn criterion_1() -> Check {
    let tol = ToleranceConfig::for_precision(256);
    let bad = OrbitSequence::from_decimal_reals(&["1", "2", "1", "3"], 256, None).map_err(e)?;
    let report = check_candidate_consistency(&bad, &tol).map_err(e)?;
    ensure(!report.consistent && report.witness == Some((0, 2)), || {
        format!("1,2,1,3 gave {:?}", report.witness)
    })?;
    for id in GalleryId::ALL {
        let count = if id == GalleryId::Ex3_2 { 4 } else { 12 };
        let seq = generate(id, &GeneratorParams::with_count(count)).map_err(e)?;
        let tol = ToleranceConfig::for_precision(seq.precision_bits());
        let r = check_candidate_consistency(&seq, &tol).map_err(e)?;
        ensure(r.consistent, || format!("{id} rejected with {:?}", r.witness))?;
    }
    Ok(format!("witness (0,2); {} gallery sequences consistent", GalleryId::ALL.len()))
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tol = ToleranceConfig::new(1e-70, 1e-30, 1e6).map_err(e)?;
    let mut worst = f64::NEG_INFINITY;
    for trial in 0..100 {
        let nodes = rng.gen_range(1..=6);
        let mut w: Vec<ComplexPoint> = Vec::with_capacity(nodes + 1);
        while w.len() < nodes {
            let z = random_disc(&mut rng, 1.0, 256);
            if w.iter().all(|v| v.distance(&z).to_f64() >= 1e-2) {
                w.push(z);
            }
        }
        let n_prime = rng.gen_range(0..nodes);
        w.push(w[n_prime].clone());
        let spec = PeriodicOrbitSpec::new(w, n_prime).map_err(e)?;
        let seq = spec.to_sequence().map_err(e)?;
        let c = random_disc(&mut rng, 1.0, 256);
        let bases = [
            BaseFunction::Polynomial(Polynomial::zero(256)),
            BaseFunction::Polynomial(Polynomial::linear(ComplexPoint::one(256))),
            BaseFunction::Polynomial(Polynomial::new(vec![zero(), zero(), ComplexPoint::one(256)])),
            BaseFunction::ExponentialShift(c),
        ];
        for base in &bases {
            let f = build_periodic_realizer(&spec, base).map_err(e)?;
            let r = verify_realization(&f, &seq, &tol);
            ensure(r.passed, || format!("trial {trial}: residual {:.3e}", r.max_residual))?;
            worst = worst.max(r.max_residual_log2);
        }
        let members: Vec<_> = [0.5, -1.25, 3.0]
            .iter()
            .map(|&c| realizer_family_member(&spec, &ComplexPoint::from_f64(c, 0.25, 256)))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        for (i, m) in members.iter().enumerate() {
            let r = verify_realization(m, &seq, &tol);
            ensure(r.passed, || format!("trial {trial}: family member {i} fails"))?;
            for other in &members[..i] {
                ensure(m.poly.coeffs() != other.poly.coeffs(), || format!("trial {trial}: repeated member"))?;
            }
        }
    }
    Ok(format!("100 specs x 4 bases; worst log2 residual {worst:.1}"))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = ProbeConfig {
        max_coeffs: 6,
        window: 8,
        conv_tol: 1e-6,
        precision_bits: 256,
    };
    let mut worst: f64 = 0.0;
    for trial in 0..50 {
        let a: Vec<ComplexPoint> = (2..=6).map(|_| random_disc(&mut rng, 2.0, 256)).collect();
        let zeta_n: Vec<ComplexPoint> = (0..=40).map(|n| ComplexPoint::from_real(pow2(256, -n))).collect();
        let w_n: Vec<ComplexPoint> = zeta_n
            .iter()
            .map(|z| {
                a.iter()
                    .enumerate()
                    .fold(zero(), |acc, (k, ak)| &acc + &(ak * &z.powu(k as u32 + 2)))
            })
            .collect();
        let data = AccumulationData::new(zeta_n, w_n, zero(), zero()).map_err(e)?;
        let est = estimate_coefficients(&data, &cfg).map_err(e)?;
        ensure(est.p == 2, || format!("trial {trial}: order {}", est.p))?;
        for (k, ak) in a.iter().enumerate() {
            let power = k as u32 + 2;
            let got = est
                .coefficient(power)
                .ok_or_else(|| format!("trial {trial}: a_{power} missing"))?;
            let rel = got.value.distance(ak).to_f64() / ak.abs().to_f64();
            worst = worst.max(rel);
            ensure(rel <= 1e-6, || format!("trial {trial}: a_{power} relative error {rel:.3e}"))?;
        }
    }
    Ok(format!("50 germs, worst relative error {worst:.2e}"))
}

fn criterion_4() -> Check {
    // Squaring tail behind a non-squaring first step.
    let ex1 = generate(GalleryId::Ex3_1, &GeneratorParams::with_count(8)).map_err(e)?;
    let cfg = ProbeConfig {
        window: 3,
        ..ProbeConfig::default()
    };
    let est = estimate_coefficients(&AccumulationData::from_orbit(&ex1, 0, zero(), zero()).map_err(e)?, &cfg)
        .map_err(e)?;
    let a2 = est.coefficient(2).ok_or("a_2 missing")?;
    ensure(est.p == 2 && a2.value.distance(&ComplexPoint::one(256)).to_f64() < 1e-20, || {
        format!("example 1 germ p={} a_2={:?}", est.p, a2.value.to_f64())
    })?;
    let tol = ToleranceConfig::for_precision(ex1.precision_bits());
    let germ = orbitforge_core::taylor::germ_consistency_check(&ex1, &est, &tol);
    ensure(germ.mismatches == vec![0], || format!("example 1 mismatches {:?}", germ.mismatches))?;

    let ex3 = generate(GalleryId::Ex3_3, &GeneratorParams::with_count(9)).map_err(e)?;
    let p3 = ex3.precision_bits();
    let data3 = AccumulationData::from_orbit(&ex3, 0, ComplexPoint::zero(p3), ComplexPoint::zero(p3)).map_err(e)?;
    let order = estimate_order(&data3, &ProbeConfig { precision_bits: p3, ..ProbeConfig::default() }).map_err(e)?;
    ensure(order.p.is_none() && (order.integrality_residual - 0.5).abs() <= 0.01, || {
        format!("example 3 order {:?} residual {}", order.p, order.integrality_residual)
    })?;

    let params = GeneratorParams::with_count(10);
    let schedule = ex3_4_sigma_schedule(&params).map_err(e)?;
    let ex4 = generate(GalleryId::Ex3_4, &params).map_err(e)?;
    let p4 = ex4.precision_bits();
    let cfg4 = ProbeConfig {
        max_coeffs: 6,
        window: 3,
        conv_tol: 1e-6,
        precision_bits: p4,
    };
    let data4 = AccumulationData::from_orbit(&ex4, schedule.settled_from(), ComplexPoint::zero(p4), ComplexPoint::zero(p4))
        .map_err(e)?;
    let est4 = estimate_coefficients(&data4, &cfg4).map_err(e)?;
    for m in [3u32, 4] {
        let c = est4.coefficient(m).ok_or_else(|| format!("a_{m} missing"))?;
        let target = (f64::from(m * m)).exp2();
        let rel = (c.value.to_f64().0 - target).abs() / target;
        ensure(c.status == CoefficientStatus::Converged && rel < 0.01, || {
            format!("example 4 a_{m} = {:?} ({:?})", c.value.to_f64(), c.status)
        })?;
    }
    let radius = radius_probe(&est4).map_err(e)?;
    ensure(radius == RadiusEstimate::Zero, || format!("example 4 radius {radius:?}"))?;
    Ok(format!(
        "mismatch {{0}}; residual {:.4}; a_3,a_4 ok at {p4} bits; radius 0",
        order.integrality_residual
    ))
}

fn criterion_5() -> Check {
    let params = QRParams::new(2.0, 2.0, 1.01, 0).map_err(e)?;
    let r = check_necessary(&tower(12), &params).map_err(e)?;
    ensure(r.passed(), || format!("tower fails the growth check: {:?}", r.witnesses.first()))?;
    let counter = generate(GalleryId::AppendixCounter, &GeneratorParams::with_count(40)).map_err(e)?;
    let grid = QRGrid {
        log2_c: (0..=40).map(|k| f64::from(k) * 1e6f64.log2() / 40.0).collect(),
        ..QRGrid::default()
    };
    let found = search_params(&counter, &grid).map_err(e)?;
    ensure(found.is_none(), || format!("counterexample accepted by {found:?}"))?;
    let holder = verify_holder(
        &counter,
        &HolderExponents {
            alpha: 2.0,
            beta: 1.0,
            n_start: 0,
        },
    )
    .map_err(e)?;
    ensure(holder.passed, || format!("holder violations {:?}", holder.violations.first()))?;
    Ok(format!("{} grid points rejected; holder(2,1) clean over {} steps", grid.len(), holder.checked))
}

fn criterion_6() -> Check {
    let reference = search_params(&tower(10), &QRGrid::default())
        .map_err(e)?
        .ok_or("no reference parameters for the tower")?;
    let exps = derive_holder(&reference, &tower(10)).map_err(e)?;
    let (lo, hi) = (exps.beta + 0.05, exps.alpha - 0.05);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut checked, mut vacuous) = (0usize, 0usize);
    for trial in 0..200 {
        let mut log2 = vec![-rng.gen_range(0.2..4.0f64)];
        for _ in 0..11 {
            let p = rng.gen_range(lo..=hi);
            log2.push(log2.last().unwrap() * p);
        }
        let points = log2
            .iter()
            .map(|&l| ComplexPoint::from_real(Float::with_val(256, l).exp2()))
            .collect();
        let seq = OrbitSequence::new(points, 256, None).map_err(e)?;
        let Ok(derived) = derive_holder(&reference, &seq) else {
            vacuous += 1;
            continue;
        };
        let report = verify_holder(&seq, &derived).map_err(e)?;
        ensure(report.passed, || format!("trial {trial}: {:?}", report.violations.first()))?;
        checked += report.checked;
    }
    ensure(vacuous < 200, || "every sequence lacked a start index".into())?;
    Ok(format!(
        "p_n in [{lo:.3}, {hi:.3}]; {checked} steps, 0 violations; {vacuous} without a start index"
    ))
}

fn tower_map() -> Result<orbitforge_core::PiecewiseQCMap, String> {
    let seq = tower(10);
    let d = contraction_factor(&seq).map_err(e)?;
    let hyp = QCHypotheses {
        params: QRParams::new(2.0, 2.0, 1.01, 0).map_err(e)?,
        d,
    };
    build_qc_map(&seq, &hyp).map_err(e)
}

fn criterion_7() -> Check {
    let map = tower_map()?;
    let dil = map.dilatation();
    ensure(dil.per_annulus.iter().all(|a| (a.k - 2.0).abs() < 1e-12), || {
        format!("annulus K values {:?}", dil.per_annulus.iter().map(|a| a.k).collect::<Vec<_>>())
    })?;
    let real = verify_orbit_realization(&map, 1e-30);
    ensure(real.passed, || format!("realization residual {:.3e}", real.max_rel_residual))?;
    let seams = map.annuli().len() - 1;
    for n in 0..seams {
        let c = verify_boundary_continuity(&map, n, 64, 1e-30).map_err(e)?;
        ensure(c.passed, || format!("seam {n}: discrepancy {:.3e}", c.max_discrepancy))?;
    }
    let circle = verify_circle_identity(&map, 32, 1e-30);
    ensure(circle.passed, || format!("circle identity error {:.3e}", circle.max_rel_error))?;

    let geo = geometric(10);
    let d = contraction_factor(&geo).map_err(e)?;
    let hyp = QCHypotheses {
        params: QRParams::new(1.0, 1.0, 1.01, 0).map_err(e)?,
        d,
    };
    let gmap = build_qc_map(&geo, &hyp).map_err(e)?;
    ensure(gmap.k_global() == 1.0, || format!("geometric K_global {}", gmap.k_global()))?;
    Ok(format!("K=2 on {} annuli; {seams} seams; geometric K_global=1", dil.per_annulus.len()))
}

fn criterion_8() -> Check {
    let map = tower_map()?;
    let (mu, nu, c) = (2.0f64, 2.0f64, 1.01f64);
    let slack = 2f64.powi(-(256 - 32));
    let seq = map.sequence().clone();
    let mut instances = 0;
    for r in [seq.point(1).abs(), seq.point(2).abs()] {
        for t in [0.5f64, 0.25] {
            let tr = Float::with_val(256, &r * t);
            let (m_r, big_m_r) = modulus_bounds(&map, &r, 64).map_err(e)?;
            let (m_tr, big_m_tr) = modulus_bounds(&map, &tr, 64).map_err(e)?;
            let ratio_a = Float::with_val(256, &big_m_r / &m_tr);
            let ratio_b = Float::with_val(256, &m_r / &big_m_tr);
            let tf = Float::with_val(256, t);
            let t_pow = |e: f64| Float::with_val(256, rug::ops::Pow::pow(&tf, -e));
            let c2 = Float::with_val(256, c).square();
            let checks = [
                (t_pow(mu), ratio_a.clone(), "T^-mu <= M(r)/m(Tr)"),
                (ratio_a.clone(), c2.clone() * t_pow(nu), "M(r)/m(Tr) <= C^2 T^-nu"),
                (t_pow(mu) / c2.clone(), ratio_b.clone(), "C^-2 T^-mu <= m(r)/M(Tr)"),
                (ratio_b.clone(), t_pow(nu), "m(r)/M(Tr) <= T^-nu"),
            ];
            for (lhs, rhs, what) in checks {
                instances += 1;
                let bound = Float::with_val(256, &rhs * (1.0 + slack));
                ensure(lhs <= bound, || {
                    format!("{what} fails at r={:.3e}, T={t}: {} > {}", r.to_f64(), lhs.to_f64(), rhs.to_f64())
                })?;
            }
        }
    }
    Ok(format!("{instances} inequality instances hold"))
}

fn criterion_9() -> Check {
    let seq = generate(GalleryId::QRNew, &GeneratorParams::with_count(153)).map_err(e)?;
    let alphas: Vec<f64> = (1..=10).map(|k| f64::from(k) / 10.0).collect();
    let cs = [1.0, 10.0, 1e3, 1e6];
    let selector = PairSelector::Stride {
        period: 3,
        first: 0,
        second: 1,
        start: 0,
    };
    let scan = holder_violation_scan(&seq, &alphas, &cs, &selector).map_err(e)?;
    ensure(scan.all_witnessed, || {
        let missing: Vec<_> = scan.entries.iter().filter(|x| x.witness.is_none()).map(|x| (x.alpha, x.c)).collect();
        format!("no witness for {missing:?}")
    })?;
    let last_m = scan.entries.iter().filter_map(|x| x.witness.as_ref()).map(|w| w.i / 3).max().unwrap_or(0);
    ensure(last_m <= 50, || format!("witness needed m = {last_m}"))?;
    Ok(format!("{} (alpha, C) pairs witnessed, largest m = {last_m}", scan.entries.len()))
}

struct Run {
    code: i32,
    stdout: Vec<u8>,
}

fn cli(args: &[&str], stdin: &[u8]) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_orbitforge"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .expect("binary starts");
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: out.stdout,
    }
}

fn criterion_10() -> Check {
    let gallery = cli(&["gallery", "--id", "Ex3_1", "--count", "8"], b"");
    ensure(gallery.code == 0, || "gallery failed".into())?;
    let tower = gallery.stdout.clone();
    let qrnew = cli(&["gallery", "--id", "QRNew", "--count", "30"], b"").stdout;
    let dir = std::env::temp_dir().join(format!("orbitforge-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(e)?;
    let svg = dir.join("plot.svg");
    let svg_arg = svg.to_str().unwrap();
    let qc = ["--mu", "2", "--nu", "2", "--c", "1.01"];
    let with_qc = |verb: &[&'static str]| -> Vec<String> {
        verb.iter().chain(qc.iter()).map(|s| s.to_string()).collect()
    };
    let pipelines: Vec<(Vec<String>, &[u8])> = vec![
        (vec!["validate".into()], &tower),
        (vec!["classify".into()], &tower),
        (vec!["realize-poly".into()], br#"{"points": [["0","0"],["1","0"],["0","0"]]}"#),
        (vec!["probe-taylor".into(), "--accum".into(), "0".into(), "--limit".into(), "0".into(), "--window".into(), "3".into()], &tower),
        (with_qc(&["check-qr"]), &tower),
        (vec!["derive-holder".into()], &tower),
        (vec!["scan-holder".into(), "--stride".into(), "3,0,1,0".into()], &qrnew),
        (with_qc(&["build-qc"]), &tower),
        (with_qc(&["eval-qc", "--at", "0.3,0.2"]), &tower),
        (with_qc(&["audit-qc"]), &tower),
        (vec!["plot-orbit".into(), "--svg".into(), svg_arg.into()], &qrnew),
        (with_qc(&["plot-qc", "--svg", "PLOT"]), &tower),
    ];
    for (args, input) in &pipelines {
        let args: Vec<&str> = args.iter().map(|a| if a == "PLOT" { svg_arg } else { a.as_str() }).collect();
        let a = cli(&args, input);
        let svg_a = std::fs::read(&svg).ok();
        let b = cli(&args, input);
        let svg_b = std::fs::read(&svg).ok();
        ensure(a.stdout == b.stdout && a.code == b.code && svg_a == svg_b, || {
            format!("{args:?} is not reproducible")
        })?;
        ensure(a.code == 0 || a.code == 1, || format!("{args:?} exited {}", a.code))?;
    }
    let malformed: [&[u8]; 5] = [
        b"",
        b"{\"points\": [",
        br#"{"points": [["x", "0"]]}"#,
        br#"{"points": [["1", "0"]], "bogus": 1}"#,
        br#"{"tail": {"kind": "spiral"}, "points": [["1", "0"]]}"#,
    ];
    let verbs = ["validate", "classify", "check-qr", "build-qc", "audit-qc"];
    for verb in verbs {
        for input in malformed {
            let r = cli(&[verb], input);
            ensure(r.code == 2, || format!("{verb} on malformed input exited {}", r.code))?;
        }
    }
    ensure(cli(&["validate", "--no-such-flag"], &tower).code == 2, || "unknown flag accepted".into())?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} pipelines reproducible; {} malformed cases exit 2", pipelines.len(), verbs.len() * malformed.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("consistency regression", Duration::from_secs(1), criterion_1),
        ("periodic realizer", Duration::from_secs(10), criterion_2),
        ("taylor oracle", Duration::from_secs(30), criterion_3),
        ("worked examples", Duration::from_secs(60), criterion_4),
        ("growth conditions", Duration::from_secs(5), criterion_5),
        ("holder implication", Duration::from_secs(10), criterion_6),
        ("qc construction", Duration::from_secs(10), criterion_7),
        ("modulus bounds", Duration::from_secs(5), criterion_8),
        ("non-realizability scan", Duration::from_secs(5), criterion_9),
        ("cli determinism", Duration::from_secs(5), criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget {budget:?}")),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<24} {} ({:.2}s) {detail}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
