use serde::{Deserialize, Serialize};

/// Reproducible description of a violated relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Name of the relation that failed, e.g. `"sub-additivity"`.
    pub relation: String,
    /// The input that exhibits the failure.
    pub input: String,
    pub lhs: String,
    pub rhs: String,
}

impl Witness {
    pub fn new(
        relation: impl Into<String>,
        input: impl Into<String>,
        lhs: impl Into<String>,
        rhs: impl Into<String>,
    ) -> Self {
        Witness {
            relation: relation.into(),
            input: input.into(),
            lhs: lhs.into(),
            rhs: rhs.into(),
        }
    }
}

/// Outcome of every checker in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails(Witness),
    /// Non-conclusive: only a finite prefix could be inspected.
    NumericOnly { n_checked: u64, residual: f64 },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Fails(w) => Some(w),
            _ => None,
        }
    }

    pub fn fail(
        relation: impl Into<String>,
        input: impl Into<String>,
        lhs: impl Into<String>,
        rhs: impl Into<String>,
    ) -> Self {
        Verdict::Fails(Witness::new(relation, input, lhs, rhs))
    }

    /// Returns the first non-`Holds` verdict, or `Holds`.
    pub fn all(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        verdicts
            .into_iter()
            .find(|v| !v.holds())
            .unwrap_or(Verdict::Holds)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails(_) => "fails",
            Verdict::NumericOnly { .. } => "numeric-only",
        }
    }
}
