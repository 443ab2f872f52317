// SPDX-License-Identifier: Apache-2.0

use orbitforge_core::gallery::{self, GalleryId, GeneratorParams};
use orbitforge_core::io::{sequence_to_json, SequenceDocument};
use orbitforge_core::qc::{contraction_factor, verify_circle_identity, verify_outer_continuity};
use orbitforge_core::qr::QRParams;
use orbitforge_core::taylor::{estimate_coefficients, estimate_limit, estimate_with_escalation, AccumulationData};
use orbitforge_core::{
    build_periodic_realizer, build_qc_map, check_appendix_hypotheses, check_candidate_consistency, check_necessary,
    classify_orbit, derive_holder, germ_consistency_check, holder_violation_scan, periodicity_audit,
    polynomial_degree_hint, search_params, verify_boundary_continuity, verify_holder, verify_orbit_realization,
    verify_realization, BaseFunction, ComplexPoint, HolderExponents, OrbitError, OrbitSequence, PairSelector,
    PeriodicOrbitSpec, PiecewiseQCMap, Polynomial, ProbeConfig, QCHypotheses, QRGrid, Realizer, ToleranceConfig,
    MIN_PRECISION,
};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::{GlobalArgs, QrArgs, Verb};
use crate::input::{ingest, parse_point, parse_usize_list, read_input, HypothesesDoc, Ingested};
use crate::report::{digest, CliError, Mode, Outcome, Report, Verdict};
use crate::svg::{plot_orbit, plot_qc, Style};

/// Rendered output of one invocation.
pub struct Rendered {
    pub text: String,
    pub exit_code: u8,
}

struct Context {
    global: GlobalArgs,
    mode: Mode,
}

impl Context {
    fn precision_override(&self) -> Option<u32> {
        if self.global.fast {
            Some(MIN_PRECISION)
        } else {
            self.global.precision_bits
        }
    }

    fn tolerance(&self, seq: &OrbitSequence) -> Result<ToleranceConfig, CliError> {
        match self.global.tol {
            Some(t) => Ok(ToleranceConfig::new(t, t, 1e6)?),
            None => Ok(ToleranceConfig::for_precision(seq.precision_bits())),
        }
    }

    /// Absolute tolerance for map audits: `--tol`, else `2^-(bits-32)`.
    fn audit_tol(&self, seq: &OrbitSequence) -> f64 {
        self.global
            .tol
            .unwrap_or_else(|| (-(f64::from(seq.precision_bits()) - 32.0)).exp2().max(f64::MIN_POSITIVE))
    }
}

pub fn run(global: GlobalArgs, verb: Verb) -> Rendered {
    let name = verb.name();
    let ctx = Context {
        mode: if global.fast { Mode::Fast } else { Mode::Exact },
        global,
    };
    match dispatch(&ctx, verb) {
        Ok(Dispatched::Report {
            outcome,
            digest,
            precision_bits,
        }) => {
            let report = Report {
                verb: name,
                verdict: outcome.verdict,
                tool_version: crate::report::TOOL_VERSION,
                inputs_digest: digest,
                mode: ctx.mode,
                precision_bits,
                evidence: outcome.evidence,
                witness: outcome.witness,
                body: outcome.body,
            };
            Rendered {
                text: report.to_json(),
                exit_code: outcome.verdict.exit_code(),
            }
        }
        Ok(Dispatched::Document { text, exit_code }) => Rendered { text, exit_code },
        Err(e) => {
            eprintln!("orbitforge {name}: {e}");
            Rendered {
                text: e.to_json(name),
                exit_code: 2,
            }
        }
    }
}

enum Dispatched {
    Report {
        outcome: Outcome,
        digest: String,
        precision_bits: Option<u32>,
    },
    /// Verbs whose output is a document other than a report.
    Document { text: String, exit_code: u8 },
}

fn dispatch(ctx: &Context, verb: Verb) -> Result<Dispatched, CliError> {
    if let Verb::Gallery {
        id,
        count,
        b,
        a,
        max_term,
        delta_log2,
        eps,
        s,
        z0,
    } = verb
    {
        return gallery_verb(ctx, &id, count, b, a, max_term, delta_log2, eps, s, z0);
    }
    let raw = read_input(&ctx.global.input)?;
    let input = ingest(&raw, ctx.precision_override())?;
    let precision_bits = Some(input.sequence.precision_bits());
    let outcome = match verb {
        Verb::Validate => validate(ctx, &input)?,
        Verb::Classify => classify(ctx, &input)?,
        Verb::RealizePoly { base_function } => realize_poly(ctx, &input, base_function.as_deref())?,
        Verb::ProbeTaylor {
            accum,
            limit,
            max_coeffs,
            window,
            start,
            conv_tol,
            no_escalate,
        } => {
            let cfg = ProbeConfig {
                max_coeffs,
                window,
                conv_tol,
                precision_bits: input.sequence.precision_bits(),
            };
            probe_taylor(ctx, &input, accum.as_deref(), limit.as_deref(), start, &cfg, !no_escalate)?
        }
        Verb::CheckQr { qr, one_sided } => check_qr(&input, &qr, one_sided)?,
        Verb::DeriveHolder {
            qr,
            alpha,
            beta,
            n_start,
        } => derive_holder_verb(&input, &qr, alpha.zip(beta).map(|(alpha, beta)| HolderExponents {
            alpha,
            beta,
            n_start,
        }))?,
        Verb::ScanHolder { alpha, c, stride, pairs } => scan_holder(&input, &alpha, &c, stride.as_deref(), pairs.as_deref())?,
        Verb::BuildQc { qr, d } => with_map(&input, &qr, d, |map| Ok(build_qc_outcome(map)))?,
        Verb::EvalQc { at, qr, d } => {
            let z = parse_point(&at, input.sequence.precision_bits())?;
            with_map(&input, &qr, d, |map| eval_qc(map, &z))?
        }
        Verb::AuditQc {
            qr,
            d,
            samples,
            circle_samples,
        } => {
            let tol = ctx.audit_tol(&input.sequence);
            with_map(&input, &qr, d, |map| Ok(audit(map, samples, circle_samples, tol)))?
        }
        Verb::PlotQc { svg, qr, d, samples } => {
            let tol = ctx.audit_tol(&input.sequence);
            with_map(&input, &qr, d, |map| {
                let audit_outcome = audit(map, 64, 32, tol);
                let plot = plot_qc(map, samples, audit_outcome.verdict);
                write_file(&svg, &plot.svg)?;
                Ok(Outcome::new(
                    audit_outcome.verdict,
                    audit_outcome.evidence,
                    Value::Null,
                    json!({
                        "svg": svg.display().to_string(),
                        "svg_digest": digest(plot.svg.as_bytes()),
                        "circles": plot.circles,
                        "correspondences": plot.correspondences,
                        "k_bars": plot.bars,
                    }),
                ))
            })?
        }
        Verb::PlotOrbit { svg, style } => {
            let style: Style = match style {
                Some(s) => serde_json::from_str(&s).map_err(|e| CliError::Usage(format!("--style: {e}")))?,
                None => Style::default(),
            };
            let tol = ctx.tolerance(&input.sequence)?;
            let report = check_candidate_consistency(&input.sequence, &tol);
            let verdict = match &report {
                Ok(r) => Verdict::from_bool(r.consistent),
                Err(_) => Verdict::Fail,
            };
            let plot = plot_orbit(&input.sequence, &style, &tol, verdict);
            write_file(&svg, &plot.svg)?;
            Outcome::new(
                verdict,
                json!({ "consistency": report.as_ref().ok() }),
                report.ok().and_then(|r| r.witness).map_or(Value::Null, |w| json!(w)),
                json!({
                    "svg": svg.display().to_string(),
                    "svg_digest": digest(plot.svg.as_bytes()),
                    "glyphs": plot.glyphs,
                    "arrows": plot.arrows,
                }),
            )
        }
        Verb::Gallery { .. } => unreachable!("handled above"),
    };
    Ok(Dispatched::Report {
        outcome,
        digest: raw.digest,
        precision_bits,
    })
}

fn write_file(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Turns library errors raised during analysis into a fail outcome.
fn analysed(result: Result<Outcome, OrbitError>) -> Result<Outcome, CliError> {
    Ok(result.unwrap_or_else(|e| Outcome::from_error(&e)))
}

fn validate(ctx: &Context, input: &Ingested) -> Result<Outcome, CliError> {
    let tol = ctx.tolerance(&input.sequence)?;
    analysed(check_candidate_consistency(&input.sequence, &tol).map(|r| {
        Outcome::new(
            Verdict::from_bool(r.consistent),
            json!({ "pairs_checked": r.pairs_checked, "near_coincidences": r.near_coincidences }),
            r.witness.map_or(Value::Null, |(p, q)| json!({ "p": p, "q": q })),
            json!({ "consistent": r.consistent, "length": input.sequence.len() }),
        )
    }))
}

fn classify(ctx: &Context, input: &Ingested) -> Result<Outcome, CliError> {
    let tol = ctx.tolerance(&input.sequence)?;
    let hint = polynomial_degree_hint(&input.sequence).ok();
    analysed(classify_orbit(&input.sequence, &tol).map(|class| {
        Outcome::new(
            Verdict::Info,
            json!({ "reason": class.evidence, "exact": class.exact }),
            Value::Null,
            json!({ "class": class.tag, "exact": class.exact, "degree_hint": hint }),
        )
    }))
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum BaseFunctionDoc {
    Zero,
    Polynomial { coeffs: Vec<[String; 2]> },
    ExpShift { c: [String; 2] },
}

fn parse_base(text: Option<&str>, prec: u32) -> Result<BaseFunction, CliError> {
    let Some(text) = text else {
        return Ok(BaseFunction::zero(prec));
    };
    let doc: BaseFunctionDoc = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("--base-function: {e}")))?;
    Ok(match doc {
        BaseFunctionDoc::Zero => BaseFunction::zero(prec),
        BaseFunctionDoc::Polynomial { coeffs } => BaseFunction::Polynomial(Polynomial::new(
            coeffs
                .iter()
                .map(|[re, im]| ComplexPoint::parse(re, im, prec))
                .collect::<Result<_, _>>()?,
        )),
        BaseFunctionDoc::ExpShift { c: [re, im] } => BaseFunction::ExponentialShift(ComplexPoint::parse(&re, &im, prec)?),
    })
}

fn realize_poly(ctx: &Context, input: &Ingested, base: Option<&str>) -> Result<Outcome, CliError> {
    let seq = &input.sequence;
    let tol = ctx.tolerance(seq)?;
    let base = parse_base(base, seq.precision_bits())?;
    analysed((|| {
        let spec = PeriodicOrbitSpec::from_sequence(seq, &tol)?;
        let realizer = build_periodic_realizer(&spec, &base)?;
        let check = verify_realization(&realizer, seq, &tol);
        let orbit = spec.to_sequence()?;
        let cycle_check = verify_realization(&realizer, &orbit, &tol);
        let passed = check.passed && cycle_check.passed;
        let form = match &realizer {
            Realizer::Polynomial(p) => json!({
                "kind": "polynomial",
                "degree": p.degree(),
                "coefficients": p.coeffs(),
                "node_residual": p.node_residual.to_f64(),
                "conditioning": p.conditioning,
            }),
            Realizer::Transcendental(_) => json!({
                "kind": "entire",
                "conditioning": spec.conditioning(),
            }),
        };
        Ok(Outcome::new(
            Verdict::from_bool(passed),
            json!({ "prefix": check, "cycle": cycle_check }),
            check.first_failure.map_or(Value::Null, |n| json!({ "n": n })),
            json!({
                "n": spec.n(),
                "n_prime": spec.n_prime(),
                "period": spec.period(),
                "nodes": spec.nodes(),
                "realizer": form,
            }),
        ))
    })())
}

fn probe_taylor(
    ctx: &Context,
    input: &Ingested,
    accum: Option<&str>,
    limit: Option<&str>,
    start: usize,
    cfg: &ProbeConfig,
    escalate: bool,
) -> Result<Outcome, CliError> {
    let seq = &input.sequence;
    let prec = seq.precision_bits();
    let tol = ctx.tolerance(seq)?;
    let given_zeta = accum.map(|t| parse_point(t, prec)).transpose()?;
    let given_w = limit.map(|t| parse_point(t, prec)).transpose()?;
    analysed((|| {
        let tail = &seq.points()[start.min(seq.len())..];
        let mut notes = Vec::new();
        let mut estimate = |given: Option<ComplexPoint>, what: &str, pts: &[ComplexPoint]| -> Result<ComplexPoint, OrbitError> {
            if let Some(p) = given {
                return Ok(p);
            }
            let est = estimate_limit(pts, cfg.window.min(pts.len()), cfg.conv_tol)?;
            if !est.converged {
                return Err(OrbitError::NoLimit { spread: est.spread });
            }
            notes.push(format!("{what} estimated from the tail mean (spread {:.3e})", est.spread));
            Ok(est.point)
        };
        let zeta = estimate(given_zeta, "accumulation point", tail.get(..tail.len().saturating_sub(1)).unwrap_or(&[]))?;
        let w = estimate(given_w, "image limit", tail.get(1..).unwrap_or(&[]))?;
        let est = if escalate {
            let doc: SequenceDocument = input.doc.clone();
            let (zeta_text, w_text) = (zeta.to_strings(), w.to_strings());
            estimate_with_escalation(
                |bits| {
                    let s = doc.clone().into_sequence(Some(bits.max(prec)))?;
                    let p = s.precision_bits();
                    let z = ComplexPoint::parse(&zeta_text.0, &zeta_text.1, p)?;
                    let v = ComplexPoint::parse(&w_text.0, &w_text.1, p)?;
                    AccumulationData::from_orbit(&s, start, z, v)
                },
                cfg,
            )?
        } else {
            estimate_coefficients(&AccumulationData::from_orbit(seq, start, zeta.clone(), w.clone())?, cfg)?
        };
        let germ = germ_consistency_check(seq, &est, &tol);
        let verdict = if germ.checked == 0 {
            Verdict::Info
        } else {
            Verdict::from_bool(germ.consistent)
        };
        Ok(Outcome::new(
            verdict,
            json!({ "germ": germ, "notes": notes }),
            germ.mismatches.first().map_or(Value::Null, |n| json!({ "n": n })),
            json!({ "estimate": est }),
        ))
    })())
}

fn qr_params(qr: &QrArgs, seq: &OrbitSequence) -> Result<Result<(QRParams, &'static str), OrbitError>, CliError> {
    match (qr.mu, qr.nu) {
        (Some(mu), Some(nu)) => {
            let params = match (qr.c, qr.log2_c) {
                (_, Some(l)) => QRParams::from_log2_c(mu, nu, l, qr.n0),
                (c, None) => QRParams::new(mu, nu, c.unwrap_or(1.0), qr.n0),
            }
            .map_err(CliError::from)?;
            Ok(Ok((params, "flags")))
        }
        (None, None) => {
            let default = QRGrid::default();
            let grid = QRGrid {
                mu: qr.grid_mu.clone().unwrap_or(default.mu),
                nu: qr.grid_nu.clone().unwrap_or(default.nu),
                log2_c: qr.grid_log2_c.clone().unwrap_or(default.log2_c),
            };
            Ok(match search_params(seq, &grid) {
                Ok(Some(p)) => Ok((
                    QRParams {
                        n0: qr.n0,
                        ..p
                    },
                    "search",
                )),
                Ok(None) => Err(OrbitError::InvalidParameter(format!(
                    "no point of the {}-point grid satisfies the growth conditions",
                    grid.len()
                ))),
                Err(e) => Err(e),
            })
        }
        _ => Err(CliError::Usage("--mu and --nu must be given together".into())),
    }
}

fn check_qr(input: &Ingested, qr: &QrArgs, one_sided: bool) -> Result<Outcome, CliError> {
    let seq = &input.sequence;
    let params = qr_params(qr, seq)?;
    analysed(params.and_then(|(params, source)| {
        let report = if one_sided {
            check_appendix_hypotheses(seq, &params)?
        } else {
            check_necessary(seq, &params)?
        };
        Ok(Outcome::new(
            Verdict::from_bool(report.passed()),
            json!({ "e1_ok": report.e1_ok, "e1b_ok": report.e1b_ok, "checked": report.checked }),
            report.witnesses.first().map_or(Value::Null, |w| json!(w)),
            json!({ "params": params, "params_source": source, "one_sided": one_sided, "witnesses": report.witnesses }),
        ))
    }))
}

fn derive_holder_verb(input: &Ingested, qr: &QrArgs, given: Option<HolderExponents>) -> Result<Outcome, CliError> {
    let seq = &input.sequence;
    let exps = match given {
        Some(e) => Ok((e, None)),
        None => qr_params(qr, seq)?.and_then(|(p, _)| derive_holder(&p, seq).map(|e| (e, Some(p)))),
    };
    analysed(exps.and_then(|(exps, params)| {
        let report = verify_holder(seq, &exps)?;
        Ok(Outcome::new(
            Verdict::from_bool(report.passed),
            json!({ "checked": report.checked, "violations": report.violations.len() }),
            report.violations.first().map_or(Value::Null, |v| json!(v)),
            json!({ "exponents": exps, "params": params, "violations": report.violations }),
        ))
    }))
}

fn scan_holder(
    input: &Ingested,
    alpha: &[f64],
    c: &[f64],
    stride: Option<&str>,
    pairs: Option<&str>,
) -> Result<Outcome, CliError> {
    let selector = match (stride, pairs) {
        (Some(s), _) => match parse_usize_list(s, ',')?.as_slice() {
            &[period, first, second, start] => PairSelector::Stride {
                period,
                first,
                second,
                start,
            },
            _ => return Err(CliError::Usage("--stride expects period,first,second,start".into())),
        },
        (None, Some(p)) => PairSelector::Explicit(
            p.split(',')
                .map(|pair| match parse_usize_list(pair, ':')?.as_slice() {
                    &[i, j] => Ok((i, j)),
                    _ => Err(CliError::Usage(format!("pair `{pair}` must be i:j"))),
                })
                .collect::<Result<_, _>>()?,
        ),
        (None, None) => PairSelector::Consecutive,
    };
    analysed(holder_violation_scan(&input.sequence, alpha, c, &selector).map(|scan| {
        let unrefuted: Vec<_> = scan
            .entries
            .iter()
            .filter(|e| e.witness.is_none())
            .map(|e| json!({ "alpha": e.alpha, "c": e.c }))
            .collect();
        Outcome::new(
            Verdict::from_bool(!scan.all_witnessed),
            json!({ "all_witnessed": scan.all_witnessed, "pairs_examined": scan.pairs_examined, "unrefuted": unrefuted }),
            scan.entries
                .iter()
                .find_map(|e| e.witness.as_ref().map(|w| json!({ "alpha": e.alpha, "c": e.c, "pair": w })))
                .unwrap_or(Value::Null),
            json!({ "selector": selector, "entries": scan.entries }),
        )
    }))
}

/// Hypotheses from flags, else from the descriptor, else searched.
fn hypotheses(input: &Ingested, qr: &QrArgs, d: Option<f64>) -> Result<Result<QCHypotheses, OrbitError>, CliError> {
    let seq = &input.sequence;
    let flags_given = qr.mu.is_some() || qr.nu.is_some() || d.is_some();
    if let (Some(stored), false) = (input.hypotheses, flags_given) {
        return Ok(Ok(stored.to_hypotheses()?));
    }
    let params = qr_params(qr, seq)?;
    Ok(params.and_then(|(params, _)| {
        let d = match d {
            Some(d) => d,
            None => contraction_factor(seq)?,
        };
        Ok(QCHypotheses { params, d })
    }))
}

fn with_map<F>(input: &Ingested, qr: &QrArgs, d: Option<f64>, f: F) -> Result<Outcome, CliError>
where
    F: FnOnce(&PiecewiseQCMap) -> Result<Outcome, CliError>,
{
    match hypotheses(input, qr, d)?.and_then(|h| build_qc_map(&input.sequence, &h)) {
        Ok(map) => f(&map),
        Err(e) => Ok(Outcome::from_error(&e)),
    }
}

fn descriptor(map: &PiecewiseQCMap) -> Value {
    let seq: Value = serde_json::from_str(&sequence_to_json(map.sequence())).expect("sequence JSON is valid");
    json!({
        "sequence": seq,
        "hypotheses": map.hypotheses().map(HypothesesDoc::from_hypotheses),
        "annuli": map.annuli(),
        "outer_factor": map.outer_factor(),
    })
}

fn build_qc_outcome(map: &PiecewiseQCMap) -> Outcome {
    let dil = map.dilatation();
    Outcome::new(
        Verdict::from_bool(dil.within_bound.unwrap_or(true)),
        json!({ "k_global": dil.k_global, "sup_mu": dil.sup_mu, "uniform": dil.uniform, "within_bound": dil.within_bound }),
        Value::Null,
        {
            let mut d = descriptor(map);
            d["dilatation"] = json!(dil);
            d
        },
    )
}

fn eval_qc(map: &PiecewiseQCMap, z: &ComplexPoint) -> Result<Outcome, CliError> {
    Ok(match map.evaluate(z) {
        Ok(v) => Outcome::new(
            Verdict::Info,
            json!({ "k_global": map.k_global() }),
            Value::Null,
            json!({ "at": z, "value": v }),
        ),
        Err(e) => Outcome::from_error(&e),
    })
}

fn audit(map: &PiecewiseQCMap, samples: usize, circle_samples: usize, tol: f64) -> Outcome {
    let realization = verify_orbit_realization(map, tol);
    let seams: Vec<_> = (0..map.annuli().len().saturating_sub(1))
        .filter_map(|n| verify_boundary_continuity(map, n, samples, tol).ok())
        .collect();
    let outer = verify_outer_continuity(map, samples, tol);
    let circle = verify_circle_identity(map, circle_samples, tol);
    let periodic: Vec<usize> = map
        .annuli()
        .iter()
        .filter(|a| !periodicity_audit(a))
        .map(|a| a.n)
        .collect();
    let seams_ok = seams.iter().all(|s| s.passed);
    let bound_ok = map.dilatation().within_bound.unwrap_or(true);
    let passed = realization.passed && seams_ok && outer.passed && circle.passed && periodic.is_empty() && bound_ok;
    let witness = if let Some(n) = realization.failures.first() {
        json!({ "check": "realization", "n": n })
    } else if let Some(s) = seams.iter().find(|s| !s.passed) {
        json!({ "check": "seam", "n": s.seam })
    } else if let Some(n) = periodic.first() {
        json!({ "check": "periodicity", "n": n })
    } else {
        Value::Null
    };
    Outcome::new(
        Verdict::from_bool(passed),
        json!({
            "tolerance": tol,
            "realization": realization.passed,
            "seams": seams_ok,
            "outer": outer.passed,
            "circle_identity": circle.passed,
            "periodicity": periodic.is_empty(),
            "within_bound": bound_ok,
            "k_global": map.k_global(),
        }),
        witness,
        json!({
            "realization": realization,
            "seams": seams,
            "outer": { "passed": outer.passed, "max_discrepancy": outer.max_discrepancy, "samples": outer.samples },
            "circle_identity": circle,
            "periodicity_failures": periodic,
            "dilatation": map.dilatation(),
        }),
    )
}

#[allow(clippy::too_many_arguments)]
fn gallery_verb(
    ctx: &Context,
    id: &str,
    count: usize,
    b: Option<u32>,
    a: Option<f64>,
    max_term: Option<u32>,
    delta_log2: Option<i32>,
    eps: Option<f64>,
    s: Option<f64>,
    z0: Option<f64>,
) -> Result<Dispatched, CliError> {
    let id: GalleryId = id.parse()?;
    let defaults = GeneratorParams::with_count(count);
    let params = GeneratorParams {
        precision_bits: ctx.precision_override().unwrap_or(defaults.precision_bits),
        b: b.unwrap_or(defaults.b),
        a: a.unwrap_or(defaults.a),
        max_term: max_term.unwrap_or(defaults.max_term),
        delta_log2: delta_log2.unwrap_or(defaults.delta_log2),
        eps: eps.unwrap_or(defaults.eps),
        s: s.unwrap_or(defaults.s),
        z0: z0.or(defaults.z0),
        ..defaults
    };
    match gallery::generate(id, &params) {
        Ok(seq) => {
            let mut text = sequence_to_json(&seq);
            text.push('\n');
            Ok(Dispatched::Document { text, exit_code: 0 })
        }
        Err(e @ (OrbitError::InvalidParameter(_) | OrbitError::TooShort { .. })) => Err(CliError::Usage(e.to_string())),
        Err(e) => {
            let args = serde_json::to_vec(&json!({ "id": id, "params": params })).expect("params serialize");
            Ok(Dispatched::Report {
                outcome: Outcome::from_error(&e),
                digest: digest(&args),
                precision_bits: None,
            })
        }
    }
}
