// SPDX-License-Identifier: Apache-2.0

//! Orbit realizability toolkit.
//!
//! Given a finite prefix of a complex sequence, the crate checks whether it
//! can be the orbit of a self-map of the plane, builds explicit realizers
//! where a construction exists, recovers the Taylor germ forced at an
//! accumulation point, and tests the growth inequalities that govern
//! quasiregular realizability.

pub mod error;
pub mod gallery;
pub mod io;
pub mod model;
pub mod poly;
pub mod precision;
pub mod qc;
pub mod qr;
pub mod taylor;

pub use error::{OrbitError, Result};
pub use gallery::{ex3_4_sigma_schedule, generate, qrclever_apply, GalleryId, GeneratorParams, SigmaSchedule};
pub use io::{parse_sequence_json, sequence_to_json, SequenceDocument, TailDocument};
pub use model::{
    check_candidate_consistency, classify_orbit, first_repeat, polynomial_degree_hint, ConsistencyReport,
    DegreeHint, OrbitClass, OrbitSequence, OrbitTag, Tail, ToleranceConfig,
};
pub use poly::{
    build_periodic_realizer, iterate, realizer_family_member, verify_realization, BaseFunction, ComplexMap,
    Conditioning, EntireRealizer, PeriodicOrbitSpec, Polynomial, RealizationPolynomial, RealizationReport,
    Realizer,
};
pub use precision::{ComplexPoint, DEFAULT_PRECISION, MIN_PRECISION};
pub use qc::{
    build_qc_map, dilatation, modulus_bounds, periodicity_audit, verify_boundary_continuity, verify_orbit_realization,
    AnnulusMapParams, DilatationReport, PiecewiseQCMap, QCHypotheses,
};
pub use qr::{
    check_appendix_hypotheses, check_necessary, derive_holder, holder_violation_scan, search_params, verify_holder,
    HolderExponents, PairSelector, QRConditionReport, QRGrid, QRParams,
};
pub use taylor::{
    estimate_coefficients, estimate_order, estimate_with_escalation, germ_consistency_check, radius_probe,
    AccumulationData, ProbeConfig, RadiusEstimate, TaylorEstimate,
};
