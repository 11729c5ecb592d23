//! The machine-readable report document and its building blocks.
//!
//! Field order is fixed by struct order; absent sections are omitted
//! entirely. Identical (command, inputs, seed) produce byte-identical JSON:
//! no timestamps, no paths, no map iteration order.

use blockspin_core::search::{CellAction, Decomposition, FlowState};
use blockspin_core::BitMatrix;
use serde::Serialize;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct ReportDocument {
    pub command: String,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<TrialsSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summands: Option<Vec<SummandSection>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remainder_dims: Option<[usize; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complete: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<StepSection>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<String>>,
}

impl ReportDocument {
    pub fn new(command: &str) -> Self {
        ReportDocument {
            command: command.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            input_sha256: None,
            seed: None,
            checks: Vec::new(),
            trials: None,
            summands: None,
            remainder_dims: None,
            complete: None,
            steps: None,
            rows: None,
        }
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Serialize)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Serialize)]
pub struct TrialsSection {
    pub trials: usize,
    pub ext_degree: u32,
    pub passes: usize,
    pub degenerate_redraws: usize,
    pub failures: Vec<String>,
}

#[derive(Serialize)]
pub struct SummandSection {
    pub dims: [usize; 4],
    pub label: String,
    /// Independent copies of the collapsed 4×4 action (1 when not scalar).
    pub copies: usize,
    /// The collapsed 4×4 matrix as four 4-character bit rows, when the
    /// action is a scalar multiple of the identity in every cell.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<String>>,
    /// Basis rows per direction, 8-character bitstrings, slot 1 leftmost.
    pub basis: [Vec<String>; 4],
    /// Cell action grid: action[j][k] lists the rows of the d_j × d_k
    /// matrix M_jk with rows(S_j)·b_jk = M_jk·rows(S_k).
    pub action: Vec<Vec<Vec<String>>>,
}

#[derive(Serialize)]
pub struct StepSection {
    pub step: usize,
    pub stationary: bool,
    pub decompositions: Vec<StepDecomposition>,
}

#[derive(Serialize)]
pub struct StepDecomposition {
    pub source: String,
    pub entries: Vec<StepEntry>,
    pub remainder_dims: [usize; 4],
}

#[derive(Serialize)]
pub struct StepEntry {
    pub label: String,
    pub dims: [usize; 4],
    pub copies: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<String>>,
}

/// A bit row as a string, lowest column index leftmost.
pub fn bitstring(row: u64, width: usize) -> String {
    (0..width)
        .map(|c| if (row >> c) & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn matrix_rows(m: &BitMatrix) -> Vec<String> {
    (0..m.nrows()).map(|r| bitstring(m.row(r), m.ncols())).collect()
}

pub fn action_grid(action: &CellAction) -> Vec<Vec<Vec<String>>> {
    (0..4)
        .map(|j| (0..4).map(|k| matrix_rows(action.cell(j, k))).collect())
        .collect()
}

pub fn summand_sections(dec: &Decomposition) -> Vec<SummandSection> {
    dec.summands
        .iter()
        .map(|s| SummandSection {
            dims: s.dims(),
            label: s.label.clone(),
            copies: s.collapsed.as_ref().map_or(1, |&(_, d)| d),
            matrix: s.collapsed.as_ref().map(|(m, _)| matrix_rows(m)),
            basis: std::array::from_fn(|j| matrix_rows(&s.basis[j])),
            action: action_grid(&s.action),
        })
        .collect()
}

pub fn step_sections(states: &[FlowState]) -> Vec<StepSection> {
    states
        .iter()
        .map(|st| StepSection {
            step: st.step,
            stationary: st.stationary,
            decompositions: st
                .decompositions
                .iter()
                .map(|d| StepDecomposition {
                    source: d.source.clone(),
                    entries: d
                        .entries
                        .iter()
                        .map(|e| StepEntry {
                            label: e.label.clone(),
                            dims: e.dims,
                            copies: e.copies,
                            matrix: e.matrix.as_ref().map(matrix_rows),
                        })
                        .collect(),
                    remainder_dims: d.remainder_dims,
                })
                .collect(),
        })
        .collect()
}

pub fn fmt_dims(d: [usize; 4]) -> String {
    format!("({},{},{},{})", d[0], d[1], d[2], d[3])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstrings_put_slot_one_leftmost() {
        assert_eq!(bitstring(0b0100_0100, 8), "00100010");
        assert_eq!(bitstring(1, 4), "1000");
    }

    #[test]
    fn json_reports_are_deterministic() {
        let mut doc = ReportDocument::new("decompose");
        doc.input_sha256 = Some("ab".into());
        doc.checks.push(CheckLine {
            name: "x".into(),
            pass: true,
            detail: None,
        });
        let a = doc.to_json();
        let b = doc.to_json();
        assert_eq!(a, b);
        assert!(a.starts_with("{\n  \"command\": \"decompose\""));
        assert!(a.ends_with('\n'));
    }
}
