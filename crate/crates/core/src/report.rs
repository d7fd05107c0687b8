//! Experiment report rows and verdicts.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// Outcome of one audited claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Verdict {
    Holds,
    Fails,
    ExcludedNearBreakpoint,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::ExcludedNearBreakpoint => "excluded-near-breakpoint",
            Verdict::Indeterminate => "indeterminate",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    /// `lhs <= rhs` up to `tol`.
    pub fn le(lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::from_bool(lhs <= rhs + tol)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One line of an experiment report. `variant` names what the row measures
/// (a family such as `plain`, or a check such as `bound:lsc`); `value` is the
/// measured quantity and `lower`/`upper` the comparison bounds or enclosure.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReportRow {
    pub scenario: String,
    pub n: u64,
    pub kappa: Option<f64>,
    pub delta: Option<f64>,
    pub variant: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub verdict: Verdict,
    pub witness: String,
}

impl ReportRow {
    pub fn new(scenario: &str, n: u64, variant: &str, value: f64, verdict: Verdict) -> Self {
        ReportRow {
            scenario: String::from(scenario),
            n,
            kappa: None,
            delta: None,
            variant: String::from(variant),
            value,
            lower: None,
            upper: None,
            verdict,
            witness: String::new(),
        }
    }

    pub fn kappa(mut self, kappa: f64) -> Self {
        self.kappa = Some(kappa);
        self
    }

    pub fn delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn lower(mut self, lower: f64) -> Self {
        self.lower = Some(lower);
        self
    }

    pub fn upper(mut self, upper: f64) -> Self {
        self.upper = Some(upper);
        self
    }

    pub fn witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = witness.into();
        self
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        fn opt(a: Option<f64>, b: Option<f64>) -> Ordering {
            match (a, b) {
                (None, None) => Ordering::Equal,
                (None, Some(_)) => Ordering::Less,
                (Some(_), None) => Ordering::Greater,
                (Some(x), Some(y)) => x.total_cmp(&y),
            }
        }
        self.scenario
            .cmp(&other.scenario)
            .then(self.n.cmp(&other.n))
            .then(opt(self.kappa, other.kappa))
            .then(opt(self.delta, other.delta))
            .then(self.variant.cmp(&other.variant))
            .then(self.value.total_cmp(&other.value))
            .then(self.witness.cmp(&other.witness))
    }
}

/// Formats an assignment vector as `[a,b,c]`.
pub fn format_assignment(a: &[usize]) -> String {
    let mut s = String::from("[");
    for (k, v) in a.iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        s.push_str(&alloc::format!("{v}"));
    }
    s.push(']');
    s
}

/// Verdict counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Summary {
    pub holds: usize,
    pub fails: usize,
    pub excluded_near_breakpoint: usize,
    pub indeterminate: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn new(mut rows: Vec<ReportRow>) -> Self {
        rows.sort_by(ReportRow::key_cmp);
        ExperimentReport { rows }
    }

    pub fn extend(&mut self, rows: impl IntoIterator<Item = ReportRow>) {
        self.rows.extend(rows);
        self.rows.sort_by(ReportRow::key_cmp);
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for r in &self.rows {
            match r.verdict {
                Verdict::Holds => s.holds += 1,
                Verdict::Fails => s.fails += 1,
                Verdict::ExcludedNearBreakpoint => s.excluded_near_breakpoint += 1,
                Verdict::Indeterminate => s.indeterminate += 1,
            }
        }
        s
    }

    pub fn any_fails(&self) -> bool {
        self.rows.iter().any(|r| r.verdict == Verdict::Fails)
    }
}
