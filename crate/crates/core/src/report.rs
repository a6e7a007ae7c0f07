//! Dimension tables recomputed live and checked against the golden file.

use serde::{Deserialize, Serialize};

use crate::catalog::theorem_representatives;
use crate::error::{Error, Result};
use crate::invariance::{classify, match_catalog};
use crate::scalars::{QuadExt, Rational, Scalar};

const GOLDEN: &str = include_str!("../golden/dimensions.json");

/// One expected kernel dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenRow {
    pub order: usize,
    pub weights: [String; 3],
    pub dimension: usize,
    pub case: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub expected: GoldenRow,
    pub dimension: usize,
    /// The theorem representatives are kernel members and span the kernel.
    pub spanned: bool,
    pub generators_agree: bool,
    pub representatives: Vec<String>,
}

impl ReportRow {
    pub fn passes(&self) -> bool {
        self.dimension == self.expected.dimension && self.spanned && self.generators_agree
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(ReportRow::passes)
    }

    pub fn failures(&self) -> Vec<&ReportRow> {
        self.rows.iter().filter(|r| !r.passes()).collect()
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("# Ternary invariant operators: kernel dimensions\n");
        let mut current = None;
        for row in &self.rows {
            if current != Some(row.expected.order) {
                current = Some(row.expected.order);
                out.push_str(&format!(
                    "\n## Order {}\n\n| weights | case | expected | computed | spanned | status | representatives |\n|---|---|---|---|---|---|---|\n",
                    row.expected.order
                ));
            }
            let w = &row.expected.weights;
            out.push_str(&format!(
                "| ({}, {}, {}) | {} | {} | {} | {} | {} | {} |\n",
                w[0],
                w[1],
                w[2],
                row.expected.case,
                row.expected.dimension,
                row.dimension,
                row.spanned,
                if row.passes() { "pass" } else { "FAIL" },
                row.representatives.join("; ").replace('|', "/"),
            ));
        }
        let failures = self.failures();
        out.push_str(&format!(
            "\n{} of {} rows pass.\n",
            self.rows.len() - failures.len(),
            self.rows.len()
        ));
        for f in failures {
            out.push_str(&format!(
                "- mismatch at order {} weights {:?}: expected {}, computed {}, spanned {}\n",
                f.expected.order, f.expected.weights, f.expected.dimension, f.dimension, f.spanned
            ));
        }
        out
    }
}

pub fn golden_rows() -> Result<Vec<GoldenRow>> {
    serde_json::from_str(GOLDEN).map_err(|e| Error::Format(e.to_string()))
}

fn evaluate<S: Scalar>(expected: GoldenRow, weights: [S; 3]) -> Result<ReportRow> {
    let c = classify(expected.order, weights.clone());
    let reps = theorem_representatives(expected.order, &weights)?;
    let verdict = match_catalog(&c.kernel, &reps)?;
    Ok(ReportRow {
        dimension: c.dimension(),
        spanned: verdict.spans && verdict.members.iter().all(|m| m.member),
        generators_agree: c.generators_agree,
        representatives: reps.into_iter().map(|r| r.name).collect(),
        expected,
    })
}

/// Evaluates one golden row; rational weights run over Q, the rest over Q(√21).
pub fn check_row(expected: GoldenRow) -> Result<ReportRow> {
    let parsed: Vec<QuadExt> = expected
        .weights
        .iter()
        .map(|w| w.parse())
        .collect::<Result<_>>()?;
    if parsed.iter().all(QuadExt::is_rational) {
        let w: Vec<Rational> = expected
            .weights
            .iter()
            .map(|w| w.parse())
            .collect::<Result<_>>()?;
        evaluate(expected, [w[0].clone(), w[1].clone(), w[2].clone()])
    } else {
        evaluate(
            expected,
            [parsed[0].clone(), parsed[1].clone(), parsed[2].clone()],
        )
    }
}

pub fn report_tables() -> Result<Report> {
    let rows = golden_rows()?
        .into_iter()
        .map(check_row)
        .collect::<Result<_>>()?;
    Ok(Report { rows })
}
