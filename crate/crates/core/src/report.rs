//! Verification reports: named measurements with tolerances and verdicts.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Measured and recorded, not gated.
    Info,
}

/// How a measured value is compared against its bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
    #[serde(rename = "info")]
    Info,
}

/// Where a measurement came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub points: usize,
    pub trials: usize,
    pub seed: u64,
    pub method: String,
}

impl Provenance {
    pub fn new(points: usize, trials: usize, seed: u64, method: impl Into<String>) -> Self {
        Self {
            points,
            trials,
            seed,
            method: method.into(),
        }
    }

    /// A check with no sampling (exact symbolic or closed-form).
    pub fn exact(method: impl Into<String>) -> Self {
        Self::new(0, 0, 0, method)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub verdict: Verdict,
    pub provenance: Provenance,
}

impl Entry {
    /// Passes iff `value ≤ tol` (NaN fails).
    pub fn at_most(name: impl Into<String>, value: f64, tol: f64, provenance: Provenance) -> Self {
        Self::gated(name, value, Relation::AtMost, tol, value <= tol, provenance)
    }

    /// Passes iff `value ≥ bound`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64, provenance: Provenance) -> Self {
        Self::gated(name, value, Relation::AtLeast, bound, value >= bound, provenance)
    }

    /// Passes iff `value == expected` exactly (integer-valued checks).
    pub fn equal(name: impl Into<String>, value: f64, expected: f64, provenance: Provenance) -> Self {
        Self::gated(name, value, Relation::Equal, expected, value == expected, provenance)
    }

    pub fn info(name: impl Into<String>, value: f64, provenance: Provenance) -> Self {
        Self {
            name: name.into(),
            value,
            relation: Relation::Info,
            bound: None,
            verdict: Verdict::Info,
            provenance,
        }
    }

    /// A failed precondition or infrastructure step, recorded as a failing entry.
    pub fn failure(name: impl Into<String>, provenance: Provenance) -> Self {
        Self {
            name: name.into(),
            value: f64::NAN,
            relation: Relation::Info,
            bound: None,
            verdict: Verdict::Fail,
            provenance,
        }
    }

    fn gated(
        name: impl Into<String>,
        value: f64,
        relation: Relation,
        bound: f64,
        ok: bool,
        provenance: Provenance,
    ) -> Self {
        Self {
            name: name.into(),
            value,
            relation,
            bound: Some(bound),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            provenance,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// Entries produced by one check chain.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Entries(pub Vec<Entry>);

impl Entries {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn push(&mut self, e: Entry) {
        self.0.push(e);
    }

    pub fn extend(&mut self, other: Entries) {
        self.0.extend(other.0);
    }

    pub fn all_passed(&self) -> bool {
        self.0.iter().all(Entry::passed)
    }

    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.0.iter().find(|e| e.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.0.iter().filter(|e| !e.passed())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Entry> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl IntoIterator for Entries {
    type Item = Entry;
    type IntoIter = std::vec::IntoIter<Entry>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl FromIterator<Entry> for Entries {
    fn from_iter<T: IntoIterator<Item = Entry>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl std::fmt::Display for Entry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = match self.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Info => "info",
        };
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Equal => "==",
            Relation::Info => "",
        };
        write!(f, "[{verdict}] {}: {:.3e}", self.name, self.value)?;
        if let Some(b) = self.bound {
            write!(f, " {rel} {b:.1e}")?;
        }
        if !self.provenance.method.is_empty() && self.verdict == Verdict::Fail && self.value.is_nan() {
            write!(f, " ({})", self.provenance.method)?;
        }
        Ok(())
    }
}
