use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::numeric::{ln_rational, to_f64};

/// One side of an inequality: exact when both sides are rational, otherwise
/// a natural-log-domain float.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum BoundValue {
    #[serde(with = "crate::numeric::serde_rational")]
    Exact(BigRational),
    Log(f64),
}

impl BoundValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            BoundValue::Exact(r) => to_f64(r),
            BoundValue::Log(x) => *x,
        }
    }
}

/// `lhs ≤ rhs`, checked exactly when both sides are exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub context: String,
    pub lhs: BoundValue,
    pub rhs: BoundValue,
    pub satisfied: bool,
    /// `rhs − lhs` in exact mode, or in the log domain otherwise. `None` when
    /// the left side is `−∞` (a vanishing spectrum entry).
    pub slack: Option<f64>,
}

impl BoundReport {
    pub fn new(context: String, lhs: BoundValue, rhs: BoundValue) -> Self {
        let (satisfied, slack) = match (&lhs, &rhs) {
            (BoundValue::Exact(a), BoundValue::Exact(b)) => (a <= b, Some(to_f64(&(b - a)))),
            (BoundValue::Exact(a), BoundValue::Log(b)) => Self::compare(ln_rational(a), *b),
            (BoundValue::Log(a), BoundValue::Exact(b)) => Self::compare(*a, ln_rational(b)),
            (BoundValue::Log(a), BoundValue::Log(b)) => Self::compare(*a, *b),
        };
        BoundReport { context, lhs, rhs, satisfied, slack }
    }

    fn compare(a: f64, b: f64) -> (bool, Option<f64>) {
        if a == f64::NEG_INFINITY {
            (true, None)
        } else {
            (a <= b, Some(b - a))
        }
    }
}
