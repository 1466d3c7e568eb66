//! JSON and CSV file formats.
//!
//! Instance files: `{"prime": p, "n": n, "lines": [{"a": [...], "b": [...]}, ...]}`.
//! Constraint matrix files: `{"rows": p, "cols": m, "entries": ...}` with
//! `entries` either row-major flat or nested, and an optional `"rhs"`.
//! Integer lists (weights, lattice vectors): comma- or whitespace-separated.

use serde::{Deserialize, Serialize};

use crate::algebra::PrimeField;
use crate::error::{FormatError, LatticeError};
use crate::instance::{Instance, Line};
use crate::lattice::ConstraintMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineFile {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub prime: u64,
    pub n: usize,
    pub lines: Vec<LineFile>,
}

impl InstanceFile {
    pub fn from_json(s: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(s)?)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    /// Reduces every coordinate modulo the prime and validates the lines.
    pub fn to_instance(&self) -> Result<Instance, FormatError> {
        let field = PrimeField::new(self.prime)?;
        let lines = self
            .lines
            .iter()
            .map(|l| Line {
                a: l.a.iter().map(|&x| field.from_i64(x)).collect(),
                b: l.b.iter().map(|&x| field.from_i64(x)).collect(),
            })
            .collect();
        Ok(Instance::new(field, self.n, lines)?)
    }

    /// Coordinates written as symmetric representatives in `(-p/2, p/2]`.
    pub fn from_instance(inst: &Instance) -> Self {
        let f = inst.field();
        InstanceFile {
            prime: f.modulus(),
            n: inst.n(),
            lines: inst
                .lines()
                .iter()
                .map(|l| LineFile {
                    a: l.a.iter().map(|&x| f.to_i64(x)).collect(),
                    b: l.b.iter().map(|&x| f.to_i64(x)).collect(),
                })
                .collect(),
        }
    }
}

pub fn parse_instance(s: &str) -> Result<Instance, FormatError> {
    InstanceFile::from_json(s)?.to_instance()
}

pub fn instance_to_json(inst: &Instance) -> String {
    InstanceFile::from_instance(inst).to_json()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entries {
    Flat(Vec<i64>),
    Nested(Vec<Vec<i64>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Entries,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Vec<i64>>,
}

impl MatrixFile {
    pub fn to_constraint_matrix(&self) -> Result<ConstraintMatrix, FormatError> {
        let rows: Vec<Vec<i64>> = match &self.entries {
            Entries::Flat(v) => {
                if v.len() != self.rows * self.cols {
                    return Err(LatticeError::ShapeMismatch { expected: self.rows * self.cols, got: v.len() }.into());
                }
                if self.cols == 0 {
                    vec![Vec::new(); self.rows]
                } else {
                    v.chunks(self.cols).map(<[i64]>::to_vec).collect()
                }
            }
            Entries::Nested(v) => {
                if v.len() != self.rows {
                    return Err(LatticeError::ShapeMismatch { expected: self.rows, got: v.len() }.into());
                }
                v.clone()
            }
        };
        let d = ConstraintMatrix::new(rows, self.cols)?;
        Ok(match &self.rhs {
            Some(b) => d.with_rhs(b.clone())?,
            None => d,
        })
    }

    pub fn from_constraint_matrix(d: &ConstraintMatrix) -> Self {
        MatrixFile {
            rows: d.rows(),
            cols: d.cols(),
            entries: Entries::Nested(d.entries().iter().map(|r| r.iter().map(|&v| v as i64).collect()).collect()),
            rhs: d.rhs().map(<[i64]>::to_vec),
        }
    }
}

pub fn parse_matrix(s: &str) -> Result<ConstraintMatrix, FormatError> {
    serde_json::from_str::<MatrixFile>(s)?.to_constraint_matrix()
}

fn tokens(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty())
}

/// Signed integers separated by commas and/or whitespace.
pub fn parse_signed_list(s: &str) -> Result<Vec<i64>, FormatError> {
    tokens(s).map(|t| t.parse::<i64>().map_err(|e| FormatError::IntegerList(format!("{t:?}: {e}")))).collect()
}

/// Nonnegative integers separated by commas and/or whitespace.
pub fn parse_unsigned_list(s: &str) -> Result<Vec<u64>, FormatError> {
    tokens(s).map(|t| t.parse::<u64>().map_err(|e| FormatError::IntegerList(format!("{t:?}: {e}")))).collect()
}

pub fn format_list<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}
