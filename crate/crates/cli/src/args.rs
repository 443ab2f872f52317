// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "orbitforge", version, about = "Realizability checks for finite orbit prefixes")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Sequence or map JSON; `-` reads stdin.
    #[arg(long, global = true, default_value = "-")]
    pub input: String,
    /// Report destination; `-` writes stdout.
    #[arg(long, global = true, default_value = "-")]
    pub output: String,
    /// Parse coordinates at this precision instead of the file's own.
    #[arg(long, global = true)]
    pub precision_bits: Option<u32>,
    /// Equality and relative tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// 53-bit arithmetic; reports are marked `fast`.
    #[arg(long, global = true)]
    pub fast: bool,
}

/// Growth-condition parameters; omitted μ/ν trigger a grid search.
#[derive(Debug, Clone, Args)]
pub struct QrArgs {
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    /// Constant C (>= 1).
    #[arg(long, conflicts_with = "log2_c")]
    pub c: Option<f64>,
    #[arg(long)]
    pub log2_c: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub n0: usize,
    /// Comma-separated μ values for the search.
    #[arg(long, value_delimiter = ',')]
    pub grid_mu: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub grid_nu: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub grid_log2_c: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Finite-prefix consistency as a candidate orbit.
    Validate,
    /// Periodic / escaping / bounded / bungee classification.
    Classify,
    /// Polynomial or entire realizer for a periodic orbit.
    RealizePoly {
        /// `{"kind":"zero"}`, `{"kind":"polynomial","coeffs":[[re,im],..]}` or
        /// `{"kind":"exp-shift","c":[re,im]}`.
        #[arg(long)]
        base_function: Option<String>,
    },
    /// Order and Taylor coefficients at an accumulation point.
    ProbeTaylor {
        /// Accumulation point `re,im`; estimated from the tail if omitted.
        #[arg(long, allow_hyphen_values = true)]
        accum: Option<String>,
        /// Limit of the images `re,im`; estimated from the tail if omitted.
        #[arg(long, allow_hyphen_values = true)]
        limit: Option<String>,
        #[arg(long, default_value_t = 8)]
        max_coeffs: usize,
        #[arg(long, default_value_t = 6)]
        window: usize,
        /// First orbit index used as data.
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[arg(long, default_value_t = 1e-6)]
        conv_tol: f64,
        /// Disable automatic precision doubling.
        #[arg(long)]
        no_escalate: bool,
    },
    /// Two-sided growth conditions (or the one-sided variant).
    CheckQr {
        #[command(flatten)]
        qr: QrArgs,
        #[arg(long)]
        one_sided: bool,
    },
    /// Hölder exponents from growth parameters, verified on the prefix.
    DeriveHolder {
        #[command(flatten)]
        qr: QrArgs,
        /// Verify these exponents directly instead of deriving them.
        #[arg(long, requires = "beta")]
        alpha: Option<f64>,
        #[arg(long, requires = "alpha")]
        beta: Option<f64>,
        #[arg(long, default_value_t = 0)]
        n_start: usize,
    },
    /// Searches for pairs violating a Hölder bound.
    ScanHolder {
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1,10,1000,1000000")]
        c: Vec<f64>,
        /// `period,first,second,start`.
        #[arg(long, conflicts_with = "pairs")]
        stride: Option<String>,
        /// `i:j,i:j,…`.
        #[arg(long)]
        pairs: Option<String>,
    },
    /// Piecewise quasiconformal realizer; writes a map descriptor.
    BuildQc {
        #[command(flatten)]
        qr: QrArgs,
        /// Contraction factor; defaults to the largest observed ratio.
        #[arg(long)]
        d: Option<f64>,
    },
    /// Evaluates a built map at one point.
    EvalQc {
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[command(flatten)]
        qr: QrArgs,
        #[arg(long)]
        d: Option<f64>,
    },
    /// Runs every verification on a built map.
    AuditQc {
        #[command(flatten)]
        qr: QrArgs,
        #[arg(long)]
        d: Option<f64>,
        /// Angles per seam.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Angles for the circle identity.
        #[arg(long, default_value_t = 32)]
        circle_samples: usize,
    },
    /// SVG of annuli, image circles, point correspondences and K per annulus.
    PlotQc {
        #[arg(long)]
        svg: PathBuf,
        #[command(flatten)]
        qr: QrArgs,
        #[arg(long)]
        d: Option<f64>,
        /// Sample points per annulus.
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// SVG of the orbit with arrows and a log-modulus inset.
    PlotOrbit {
        #[arg(long)]
        svg: PathBuf,
        /// JSON style object; `{}` uses the default palette.
        #[arg(long)]
        style: Option<String>,
    },
    /// Writes a reference sequence in the standard JSON form.
    Gallery {
        #[arg(long)]
        id: String,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        b: Option<u32>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        max_term: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        delta_log2: Option<i32>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        z0: Option<f64>,
    },
}

impl Verb {
    pub fn name(&self) -> &'static str {
        match self {
            Verb::Validate => "validate",
            Verb::Classify => "classify",
            Verb::RealizePoly { .. } => "realize-poly",
            Verb::ProbeTaylor { .. } => "probe-taylor",
            Verb::CheckQr { .. } => "check-qr",
            Verb::DeriveHolder { .. } => "derive-holder",
            Verb::ScanHolder { .. } => "scan-holder",
            Verb::BuildQc { .. } => "build-qc",
            Verb::EvalQc { .. } => "eval-qc",
            Verb::AuditQc { .. } => "audit-qc",
            Verb::PlotQc { .. } => "plot-qc",
            Verb::PlotOrbit { .. } => "plot-orbit",
            Verb::Gallery { .. } => "gallery",
        }
    }
}
