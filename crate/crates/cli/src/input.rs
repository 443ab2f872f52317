// SPDX-License-Identifier: Apache-2.0

//! Reading sequences, map descriptors and point flags.

use std::io::Read;

use orbitforge_core::io::SequenceDocument;
use orbitforge_core::{ComplexPoint, OrbitSequence, QCHypotheses, QRParams};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::report::{digest, CliError};

pub struct RawInput {
    pub bytes: Vec<u8>,
    pub digest: String,
}

pub fn read_input(path: &str) -> Result<RawInput, CliError> {
    let mut bytes = Vec::new();
    let res = if path == "-" {
        std::io::stdin().read_to_end(&mut bytes).map(|_| ())
    } else {
        std::fs::read(path).map(|b| bytes = b)
    };
    res.map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    Ok(RawInput {
        digest: digest(&bytes),
        bytes,
    })
}

/// Hypotheses stored in a map descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesesDoc {
    pub mu: f64,
    pub nu: f64,
    pub c: f64,
    pub n0: usize,
    pub d: f64,
}

impl HypothesesDoc {
    pub fn from_hypotheses(h: &QCHypotheses) -> Self {
        HypothesesDoc {
            mu: h.params.mu,
            nu: h.params.nu,
            c: h.params.c,
            n0: h.params.n0,
            d: h.d,
        }
    }

    pub fn to_hypotheses(self) -> Result<QCHypotheses, CliError> {
        let params = QRParams::new(self.mu, self.nu, self.c, self.n0)?;
        Ok(QCHypotheses { params, d: self.d })
    }
}

/// Parsed input: the sequence document plus any stored map hypotheses.
pub struct Ingested {
    pub doc: SequenceDocument,
    pub sequence: OrbitSequence,
    pub hypotheses: Option<HypothesesDoc>,
}

/// Accepts a bare sequence, a map descriptor (`{"sequence": …}`) or a report
/// whose body is a descriptor.
pub fn ingest(raw: &RawInput, precision: Option<u32>) -> Result<Ingested, CliError> {
    let text = std::str::from_utf8(&raw.bytes).map_err(|e| CliError::Usage(format!("input is not UTF-8: {e}")))?;
    let value: Value = serde_json::from_str(text)?;
    let holder = match value.get("body") {
        Some(body) if body.get("sequence").is_some() => body,
        _ => &value,
    };
    let (seq_value, hyp_value) = match holder.get("sequence") {
        Some(seq) => (seq.clone(), holder.get("hypotheses").cloned()),
        None => (holder.clone(), None),
    };
    let doc: SequenceDocument = serde_json::from_value(seq_value)?;
    let hypotheses = hyp_value.map(serde_json::from_value).transpose()?;
    let sequence = doc.clone().into_sequence(precision)?;
    Ok(Ingested {
        doc,
        sequence,
        hypotheses,
    })
}

/// `re,im` or a bare real part.
pub fn parse_point(text: &str, prec: u32) -> Result<ComplexPoint, CliError> {
    let mut parts = text.split(',').map(str::trim);
    let re = parts.next().unwrap_or("");
    let im = parts.next().unwrap_or("0");
    if parts.next().is_some() {
        return Err(CliError::Usage(format!("expected `re,im`, got `{text}`")));
    }
    Ok(ComplexPoint::parse(re, im, prec)?)
}

pub fn parse_usize_list(text: &str, sep: char) -> Result<Vec<usize>, CliError> {
    text.split(sep)
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("`{t}` is not a non-negative integer")))
        })
        .collect()
}
