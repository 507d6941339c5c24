//! Verification records shared by all labs.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    BoundarySensitive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
            Status::BoundarySensitive => "boundary-sensitive",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One checked relation. `margin` is signed so that negative means violated:
/// `rhs - lhs` for upper bounds, `lhs - rhs` for lower bounds and
/// `-|lhs - rhs|` for equalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub anchor: String,
    #[serde(deserialize_with = "nan_if_null")]
    pub lhs: f64,
    #[serde(deserialize_with = "nan_if_null")]
    pub rhs: f64,
    #[serde(deserialize_with = "nan_if_null")]
    pub margin: f64,
    pub tolerance: f64,
    pub status: Status,
    #[serde(default)]
    pub diagnostics: BTreeMap<String, Value>,
}

/// JSON has no NaN; serializers write `null`, so read it back as NaN.
fn nan_if_null<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

impl CheckRecord {
    fn build(id: String, anchor: &str, lhs: f64, rhs: f64, margin: f64, tol: f64) -> Self {
        let status = if margin >= -tol { Status::Pass } else { Status::Fail };
        Self {
            check_id: id,
            anchor: anchor.to_string(),
            lhs,
            rhs,
            margin,
            tolerance: tol,
            status,
            diagnostics: BTreeMap::new(),
        }
    }

    /// `lhs <= rhs` up to `tol`.
    pub fn upper(id: impl Into<String>, anchor: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::build(id.into(), anchor, lhs, rhs, rhs - lhs, tol)
    }

    /// `lhs >= rhs` up to `tol`.
    pub fn lower(id: impl Into<String>, anchor: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::build(id.into(), anchor, lhs, rhs, lhs - rhs, tol)
    }

    /// `lhs == rhs` up to `tol`.
    pub fn equal(id: impl Into<String>, anchor: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        // `0.0 - d` rather than `-d` so exact equality reports +0.
        Self::build(id.into(), anchor, lhs, rhs, 0.0 - (lhs - rhs).abs(), tol)
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.diagnostics.insert(key.to_string(), value.into());
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.diagnostics.insert(key.to_string(), value.into());
    }

    /// Downgrade a failed check whose verdict depends on an unconverged estimate.
    pub fn inconclusive_unless(mut self, converged: bool, reason: &str) -> Self {
        if self.status == Status::Fail && !converged {
            self.status = Status::Inconclusive;
            self.set("reason", reason);
        }
        self
    }

    pub fn mark_boundary(mut self, reason: &str) -> Self {
        self.status = Status::BoundarySensitive;
        self.set("reason", reason);
        self
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Counts of each status.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub boundary_sensitive: usize,
}

impl Tally {
    pub fn of<'a>(records: impl IntoIterator<Item = &'a CheckRecord>) -> Self {
        let mut t = Tally::default();
        for r in records {
            match r.status {
                Status::Pass => t.pass += 1,
                Status::Fail => t.fail += 1,
                Status::Inconclusive => t.inconclusive += 1,
                Status::BoundarySensitive => t.boundary_sensitive += 1,
            }
        }
        t
    }

    pub fn total(&self) -> usize {
        self.pass + self.fail + self.inconclusive + self.boundary_sensitive
    }
}
