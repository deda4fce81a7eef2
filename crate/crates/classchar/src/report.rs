//! Structured verdicts shared by the verifiers, walks and class-square scans.

use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA: u32 = 1;

/// Serializes an exact rational as its `p/q` string.
pub fn ser_rational<S: serde::Serializer>(r: &num_rational::BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn ser_rational_vec<S: serde::Serializer>(v: &[num_rational::BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Hypothesis not met; the measured value is still recorded.
    Advisory,
    /// Asymptotic hypothesis unreachable; empirical value only.
    Vacuous,
    /// Monte Carlo or trend data, never a failure.
    Observational,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Fail dominates, then pass, then the soft verdicts.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Pass, _) | (_, Pass) => Pass,
            (Advisory, _) | (_, Advisory) => Advisory,
            (Vacuous, _) | (_, Vacuous) => Vacuous,
            _ => Observational,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub label: String,
    pub measured: f64,
    pub bound: f64,
    pub margin: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundRow {
    pub fn new(label: impl Into<String>, measured: f64, bound: f64, verdict: Verdict) -> BoundRow {
        BoundRow { label: label.into(), measured, bound, margin: bound - measured, verdict, note: None }
    }

    pub fn with_margin(mut self, margin: f64) -> BoundRow {
        self.margin = margin;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> BoundRow {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub schema: u32,
    pub claim: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub verdict: Verdict,
    pub rows: Vec<BoundRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub data: serde_json::Value,
}

impl BoundReport {
    pub fn new(claim: impl Into<String>, group: Option<String>) -> BoundReport {
        BoundReport {
            schema: REPORT_SCHEMA,
            claim: claim.into(),
            group,
            verdict: Verdict::Observational,
            rows: Vec::new(),
            notes: Vec::new(),
            data: serde_json::Value::Null,
        }
    }

    pub fn push(&mut self, row: BoundRow) {
        self.verdict = if self.rows.is_empty() { row.verdict } else { self.verdict.combine(row.verdict) };
        self.rows.push(row);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Re-labels failing rows and recomputes the overall verdict.
    pub fn downgrade_failures(&mut self, to: Verdict, note: impl Into<String>) {
        if self.passed() {
            return;
        }
        let rows = std::mem::take(&mut self.rows);
        for mut row in rows {
            if row.verdict == Verdict::Fail {
                row.verdict = to;
            }
            self.push(row);
        }
        self.note(note);
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundRow> {
        self.rows.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,measured,bound,margin,verdict,note\n");
        for r in &self.rows {
            let verdict = serde_json::to_value(r.verdict).unwrap();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                csv_field(&r.label),
                r.measured,
                r.bound,
                r.margin,
                verdict.as_str().unwrap(),
                csv_field(r.note.as_deref().unwrap_or(""))
            ));
        }
        out
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
