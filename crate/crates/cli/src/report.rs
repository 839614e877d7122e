//! JSON and text forms of a condition report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use tilespec_core::tiling::{InstanceDump, Witness};
use tilespec_core::{Arithmetic, ConditionReport, Group, Rational};

/// Serialized as `{"c1": true, ..., "witnesses": {...}, "mode": "exact", ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub group: String,
    pub measure: String,
    pub mode: Arithmetic,
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub c4: bool,
    pub c5: bool,
    /// Keyed by condition name, present only for failed conditions.
    pub witnesses: BTreeMap<String, Witness>,
    pub consistent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect: Option<InstanceDump>,
    pub notes: Vec<String>,
}

const LABELS: [&str; 5] = [
    "c1 tiling by translates",
    "c2 orthonormal translates",
    "c3 flat periodized spectrum",
    "c4 Parseval on dual lattice",
    "c5 dual lattice is a spectrum",
];

impl CheckReport {
    pub fn new(group: &Group, measure: Rational, report: &ConditionReport) -> CheckReport {
        let holds = report.holds();
        let witnesses = report
            .verdicts
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.witness.clone().map(|w| (format!("c{}", i + 1), w)))
            .collect();
        CheckReport {
            group: group.to_string(),
            measure: measure.to_string(),
            mode: report.mode,
            c1: holds[0],
            c2: holds[1],
            c3: holds[2],
            c4: holds[3],
            c5: holds[4],
            witnesses,
            consistent: report.consistent(),
            defect: report.defect.clone(),
            notes: report.notes.clone(),
        }
    }

    pub fn verdicts(&self) -> [bool; 5] {
        [self.c1, self.c2, self.c3, self.c4, self.c5]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "group {}  measure {}  mode {:?}",
            self.group, self.measure, self.mode
        );
        for (i, (label, ok)) in LABELS.iter().zip(self.verdicts()).enumerate() {
            let _ = write!(out, "  {label:<32} {}", if ok { "true" } else { "false" });
            if let Some(w) = self.witnesses.get(&format!("c{}", i + 1)) {
                let _ = write!(
                    out,
                    "   witness {}",
                    serde_json::to_string(w).expect("witnesses serialize")
                );
            }
            out.push('\n');
        }
        if self.consistent {
            let _ = writeln!(out, "  verdicts agree");
        } else {
            let _ = writeln!(
                out,
                "  DEFECT: verdicts disagree; instance {:?}",
                self.defect
            );
        }
        out
    }
}
