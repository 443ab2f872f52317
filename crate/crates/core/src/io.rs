// SPDX-License-Identifier: Apache-2.0

//! JSON form of a sequence prefix.
//!
//! ```json
//! {"precision_bits": 256,
//!  "tail": {"kind": "tends-to-zero"},
//!  "points": [["0.5", "0"], ["0.25", "0"]]}
//! ```
//!
//! Coordinates are decimal strings so no precision is lost in transit.

use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};
use crate::model::{OrbitSequence, Tail};
use crate::precision::{ComplexPoint, DEFAULT_PRECISION};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TailDocument {
    None,
    TendsToZero,
    TendsToPoint { point: [String; 2] },
    Escaping,
    PeriodicFrom { index: usize, period: usize },
    Bounded { bound: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceDocument {
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailDocument>,
    pub points: Vec<[String; 2]>,
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

fn json_error(e: serde_json::Error) -> OrbitError {
    OrbitError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

impl SequenceDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(json_error)
    }

    /// Parses coordinates at `precision` bits, or at the document's own setting.
    pub fn into_sequence(self, precision: Option<u32>) -> Result<OrbitSequence> {
        let prec = precision.unwrap_or(self.precision_bits);
        let points = self
            .points
            .iter()
            .map(|[re, im]| ComplexPoint::parse(re, im, prec))
            .collect::<Result<Vec<_>>>()?;
        let tail = match self.tail {
            None | Some(TailDocument::None) => None,
            Some(TailDocument::TendsToZero) => Some(Tail::TendsToZero),
            Some(TailDocument::TendsToPoint { point: [re, im] }) => {
                Some(Tail::TendsToPoint(ComplexPoint::parse(&re, &im, prec)?))
            }
            Some(TailDocument::Escaping) => Some(Tail::Escaping),
            Some(TailDocument::PeriodicFrom { index, period }) => Some(Tail::PeriodicFrom { index, period }),
            Some(TailDocument::Bounded { bound }) => Some(Tail::Bounded(bound)),
        };
        OrbitSequence::new(points, prec, tail)
    }

    pub fn from_sequence(seq: &OrbitSequence) -> Self {
        let pair = |z: &ComplexPoint| {
            let (re, im) = z.to_strings();
            [re, im]
        };
        let tail = seq.tail().map(|t| match t {
            Tail::TendsToZero => TailDocument::TendsToZero,
            Tail::TendsToPoint(p) => TailDocument::TendsToPoint { point: pair(p) },
            Tail::Escaping => TailDocument::Escaping,
            Tail::PeriodicFrom { index, period } => TailDocument::PeriodicFrom {
                index: *index,
                period: *period,
            },
            Tail::Bounded(b) => TailDocument::Bounded { bound: *b },
        });
        SequenceDocument {
            precision_bits: seq.precision_bits(),
            tail,
            points: seq.points().iter().map(pair).collect(),
        }
    }
}

pub fn parse_sequence_json(text: &str, precision: Option<u32>) -> Result<OrbitSequence> {
    SequenceDocument::from_json(text)?.into_sequence(precision)
}

pub fn sequence_to_json(seq: &OrbitSequence) -> String {
    serde_json::to_string_pretty(&SequenceDocument::from_sequence(seq)).expect("sequence documents always serialize")
}
