//! Reporting primitives shared by the verification routines.

use num_bigint::BigInt;
use serde::Serialize;

use crate::mpoly::{format_monomial, TruncatedSeries};

/// Outcome of one named check.  `first_discrepancy` names the graded-lex
/// smallest monomial where two series disagree.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_discrepancy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check { name: name.into(), pass: true, first_discrepancy: None, detail: None }
    }

    pub fn fail(name: impl Into<String>, discrepancy: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass: false,
            first_discrepancy: Some(discrepancy.into()),
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// Builds a check from a termwise series comparison.
    pub fn from_series_eq(
        name: impl Into<String>,
        left: &TruncatedSeries,
        right: &TruncatedSeries,
    ) -> Self {
        match left.first_difference(right) {
            None => Check::pass(name),
            Some((exps, a, b)) => Check::fail(
                name,
                format!("{}: left={} right={}", format_monomial(&exps), a, b),
            ),
        }
    }
}

pub fn describe_term(exps: &[i64], coeff: &BigInt) -> String {
    format!("{}*{}", coeff, format_monomial(exps))
}
