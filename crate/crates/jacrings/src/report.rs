//! Outcome records for identity checks and their machine-readable report.
//!
//! A check computes a difference that should vanish.  Over a field it must
//! vanish exactly; over a base with a nilpotent `psi` some identities only
//! hold modulo a power of `psi`, and the record then carries that power
//! instead of a bare pass/fail.

use serde_json::{json, Value};

use crate::algebra::Element;

/// Outcome of a single identity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    /// The difference vanished identically.
    Exact,
    /// The difference is a nonzero multiple of `psi^k` with `k >= 1`.
    ModPsi(u32),
    /// The difference is visible at `psi^0`.
    Failed,
    /// The check does not apply to the requested configuration.
    Skipped,
}

impl Status {
    pub fn is_failure(&self) -> bool {
        matches!(self, Status::Failed)
    }

    pub fn label(&self) -> String {
        match self {
            Status::Exact => "exact".into(),
            Status::ModPsi(k) => format!("holds-mod-psi^{k}"),
            Status::Failed => "failed".into(),
            Status::Skipped => "skipped".into(),
        }
    }
}

/// Grades a difference element: zero is exact, a `psi`-multiple holds
/// modulo that `psi` power, anything visible at `psi^0` fails.
pub fn status_of(diff: &Element) -> Status {
    match diff.min_psi_order() {
        None => Status::Exact,
        Some(k) if k >= 1 => Status::ModPsi(k),
        Some(_) => Status::Failed,
    }
}

/// Requires exact vanishing: any nonzero difference fails.
pub fn status_exact(diff: &Element) -> Status {
    if diff.is_zero() {
        Status::Exact
    } else {
        Status::Failed
    }
}

/// The leading term of a canonical rendering, used as a failure witness.
pub fn leading_term(el: &Element) -> String {
    let s = el.to_string();
    let cut = s[1..]
        .find(" + ")
        .into_iter()
        .chain(s[1..].find(" - "))
        .min()
        .map(|i| i + 1)
        .unwrap_or(s.len());
    s[..cut].to_string()
}

/// One line of a verification report.
#[derive(Clone, Debug)]
pub struct Record {
    /// Short identifier of the identity being checked.
    pub name: String,
    /// What the identity states, in words.
    pub rule: String,
    /// Instance parameters, e.g. `g=2 d=1 n=3`.
    pub params: String,
    pub status: Status,
    pub elapsed_ms: u128,
    /// Leading term of the difference when the check did not pass exactly.
    pub witness: String,
}

impl Record {
    /// Grades `diff` with `psi`-order tolerance (exact over a field).
    pub fn from_diff(name: &str, rule: &str, params: &str, diff: &Element) -> Record {
        let status = status_of(diff);
        Record::finish(name, rule, params, status, diff)
    }

    /// Grades `diff` requiring exact vanishing.
    pub fn from_diff_exact(name: &str, rule: &str, params: &str, diff: &Element) -> Record {
        let status = status_exact(diff);
        Record::finish(name, rule, params, status, diff)
    }

    pub fn from_bool(name: &str, rule: &str, params: &str, ok: bool, witness: &str) -> Record {
        Record {
            name: name.into(),
            rule: rule.into(),
            params: params.into(),
            status: if ok { Status::Exact } else { Status::Failed },
            elapsed_ms: 0,
            witness: if ok { String::new() } else { witness.into() },
        }
    }

    pub fn skipped(name: &str, rule: &str, params: &str, why: &str) -> Record {
        Record {
            name: name.into(),
            rule: rule.into(),
            params: params.into(),
            status: Status::Skipped,
            elapsed_ms: 0,
            witness: why.into(),
        }
    }

    fn finish(name: &str, rule: &str, params: &str, status: Status, diff: &Element) -> Record {
        let witness = if matches!(status, Status::Exact) {
            String::new()
        } else {
            leading_term(diff)
        };
        Record {
            name: name.into(),
            rule: rule.into(),
            params: params.into(),
            status,
            elapsed_ms: 0,
            witness,
        }
    }

    pub fn with_elapsed(mut self, elapsed_ms: u128) -> Record {
        self.elapsed_ms = elapsed_ms;
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "rule": self.rule,
            "params": self.params,
            "status": self.status.label(),
            "elapsed_ms": self.elapsed_ms,
            "witness": self.witness,
        })
    }

    /// One fixed-shape text line, `elapsed` excluded so output is
    /// byte-stable across runs.
    pub fn render(&self) -> String {
        let head = format!("[{}] {}", self.status.label(), self.name);
        if self.params.is_empty() {
            head
        } else {
            format!("{head} ({})", self.params)
        }
    }
}

/// A full verification run: configuration echo, generator tables, ordered
/// records, warnings, and window-cap hit count.
#[derive(Debug)]
pub struct RunReport {
    pub config: Value,
    pub generators: Value,
    pub records: Vec<Record>,
    pub warnings: Vec<String>,
    pub cap_hits: u64,
}

impl RunReport {
    pub fn failed(&self) -> bool {
        self.records.iter().any(|r| r.status.is_failure())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "config": self.config,
            "generators": self.generators,
            "records": self.records.iter().map(Record::to_json).collect::<Vec<_>>(),
            "warnings": self.warnings,
            "cap_hits": self.cap_hits,
            "failed": self.failed(),
        })
    }

    /// Plain-text rendering, one line per record, timing excluded.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        for r in &self.records {
            out.push_str(&r.render());
            out.push('\n');
        }
        let (pass, total) = (
            self.records
                .iter()
                .filter(|r| !r.status.is_failure())
                .count(),
            self.records.len(),
        );
        out.push_str(&format!(
            "{pass}/{total} checks passed{}\n",
            if self.cap_hits > 0 {
                format!(" ({} window-cap hits)", self.cap_hits)
            } else {
                String::new()
            }
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobian::JacobianRing;
    use crate::ModelConfig;

    #[test]
    fn status_grading() {
        let jac = JacobianRing::new(ModelConfig::new(2, 1)).unwrap();
        assert_eq!(status_of(&jac.zero()), Status::Exact);
        assert_eq!(status_of(&jac.one()), Status::Failed);
        let tails = jac.psi().mul(&jac.gen_c(2)).unwrap();
        assert_eq!(status_of(&tails), Status::ModPsi(1));
        assert_eq!(status_of(&tails.add(&jac.gen_c(3))), Status::Failed);
        assert_eq!(Status::ModPsi(2).label(), "holds-mod-psi^2");
        assert!(!Status::Skipped.is_failure());
    }

    #[test]
    fn witness_is_leading_term() {
        let jac = JacobianRing::new(ModelConfig::new(2, 0)).unwrap();
        let el = jac.gen_c(2).sub(&jac.gen_c(3).scale(&crate::combin::rat(7, 2)));
        assert_eq!(leading_term(&el), "c2");
        let neg = jac.gen_c(2).neg().sub(&jac.gen_c(3));
        assert_eq!(leading_term(&neg), "-c2");
        assert_eq!(leading_term(&jac.zero()), "0");
    }

    #[test]
    fn report_text_and_json_shape() {
        let jac = JacobianRing::new(ModelConfig::new(2, 0)).unwrap();
        let rec = Record::from_diff("triangle", "round trip is the identity", "g=2 d=0", &jac.zero());
        let rep = RunReport {
            config: serde_json::json!({"g": 2, "d": 0}),
            generators: serde_json::json!([]),
            records: vec![rec],
            warnings: vec!["sample".into()],
            cap_hits: 0,
        };
        assert!(!rep.failed());
        let text = rep.render_text();
        assert!(text.contains("[exact] triangle (g=2 d=0)"));
        assert!(text.contains("1/1 checks passed"));
        let v = rep.to_json();
        assert_eq!(v["records"][0]["status"], "exact");
        assert_eq!(v["failed"], false);
    }
}
