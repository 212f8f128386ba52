//! Structured outcome of checking one inequality against measured data.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// measured >= bound
    AtLeast,
    /// measured <= bound
    AtMost,
    /// measured > bound
    Exceeds,
}

/// Whether the inequality is expected to hold at every scale or only in the
/// "n sufficiently large" regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Exact,
    Asymptotic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub relation: Relation,
    pub measured: f64,
    pub bound: f64,
    /// Signed slack; non-negative exactly when the inequality holds.
    pub margin: f64,
    pub holds: bool,
    pub regime: Regime,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl LemmaReport {
    pub fn at_least(lemma: impl Into<String>, measured: f64, bound: f64, regime: Regime) -> Self {
        Self::new(lemma.into(), Relation::AtLeast, measured, bound, regime)
    }

    pub fn at_most(lemma: impl Into<String>, measured: f64, bound: f64, regime: Regime) -> Self {
        Self::new(lemma.into(), Relation::AtMost, measured, bound, regime)
    }

    pub fn exceeds(lemma: impl Into<String>, measured: f64, bound: f64, regime: Regime) -> Self {
        Self::new(lemma.into(), Relation::Exceeds, measured, bound, regime)
    }

    fn new(lemma: String, relation: Relation, measured: f64, bound: f64, regime: Regime) -> Self {
        let margin = match relation {
            Relation::AtLeast | Relation::Exceeds => measured - bound,
            Relation::AtMost => bound - measured,
        };
        let holds = match relation {
            Relation::AtLeast => measured >= bound,
            Relation::AtMost => measured <= bound,
            Relation::Exceeds => measured > bound,
        };
        LemmaReport {
            lemma,
            relation,
            measured,
            bound,
            margin,
            holds,
            regime,
            flags: Vec::new(),
        }
    }

    pub fn with_flag(mut self, flag: impl Into<String>) -> Self {
        self.flags.push(flag.into());
        self
    }
}
