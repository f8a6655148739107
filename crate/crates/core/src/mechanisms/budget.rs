//! Privacy budgets and composition accounting.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_open_unit, ensure_positive, Error, Result};

/// A privacy budget in one of the three supported flavors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "flavor", rename_all = "kebab-case")]
pub enum PrivacyBudget {
    /// ε-differential privacy.
    Pure { epsilon: f64 },
    /// (ε, δ)-differential privacy.
    Approx { epsilon: f64, delta: f64 },
    /// ρ-zero-concentrated differential privacy.
    Zcdp { rho: f64 },
}

impl PrivacyBudget {
    pub fn pure(epsilon: f64) -> Result<Self> {
        ensure_positive("epsilon", epsilon)?;
        Ok(PrivacyBudget::Pure { epsilon })
    }

    pub fn approx(epsilon: f64, delta: f64) -> Result<Self> {
        ensure_positive("epsilon", epsilon)?;
        ensure_open_unit("delta", delta)?;
        Ok(PrivacyBudget::Approx { epsilon, delta })
    }

    pub fn zcdp(rho: f64) -> Result<Self> {
        ensure_positive("rho", rho)?;
        Ok(PrivacyBudget::Zcdp { rho })
    }

    /// Checks the invariants of a budget built without the constructors (for
    /// example one deserialized from a config file).
    pub fn validate(&self) -> Result<()> {
        match *self {
            PrivacyBudget::Pure { epsilon } => PrivacyBudget::pure(epsilon).map(|_| ()),
            PrivacyBudget::Approx { epsilon, delta } => PrivacyBudget::approx(epsilon, delta).map(|_| ()),
            PrivacyBudget::Zcdp { rho } => PrivacyBudget::zcdp(rho).map(|_| ()),
        }
    }

    pub fn flavor(&self) -> &'static str {
        match self {
            PrivacyBudget::Pure { .. } => "pure",
            PrivacyBudget::Approx { .. } => "approx",
            PrivacyBudget::Zcdp { .. } => "zcdp",
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            PrivacyBudget::Pure { epsilon } | PrivacyBudget::Approx { epsilon, .. } => Some(epsilon),
            PrivacyBudget::Zcdp { .. } => None,
        }
    }

    /// Every parameter multiplied by `factor`, which must lie in (0, 1].
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor <= 1.0) {
            return Err(Error::param(format!("budget scale factor must lie in (0, 1], got {factor}")));
        }
        Ok(match *self {
            PrivacyBudget::Pure { epsilon } => PrivacyBudget::Pure { epsilon: epsilon * factor },
            PrivacyBudget::Approx { epsilon, delta } => {
                PrivacyBudget::Approx { epsilon: epsilon * factor, delta: delta * factor }
            }
            PrivacyBudget::Zcdp { rho } => PrivacyBudget::Zcdp { rho: rho * factor },
        })
    }

    /// Splits the budget into `parts` equal shares whose sequential
    /// composition is the original budget.
    pub fn split(&self, parts: usize) -> Result<Self> {
        if parts == 0 {
            return Err(Error::param("cannot split a budget into zero parts"));
        }
        self.scaled(1.0 / parts as f64)
    }

    /// Sequential composition of two budgets: ε and δ add, ρ adds. Pure and
    /// approximate budgets combine into an approximate one; zCDP only
    /// composes with zCDP.
    pub fn compose(&self, other: &PrivacyBudget) -> Result<Self> {
        use PrivacyBudget::*;
        Ok(match (*self, *other) {
            (Pure { epsilon: a }, Pure { epsilon: b }) => Pure { epsilon: a + b },
            (Pure { epsilon: a }, Approx { epsilon: b, delta })
            | (Approx { epsilon: b, delta }, Pure { epsilon: a }) => Approx { epsilon: a + b, delta },
            (Approx { epsilon: a, delta: da }, Approx { epsilon: b, delta: db }) => {
                Approx { epsilon: a + b, delta: da + db }
            }
            (Zcdp { rho: a }, Zcdp { rho: b }) => Zcdp { rho: a + b },
            (x, y) => return Err(Error::FlavorMismatch(x.flavor(), y.flavor())),
        })
    }

    /// Sequential composition of a list of budgets.
    pub fn compose_all(budgets: &[PrivacyBudget]) -> Result<Option<Self>> {
        let mut iter = budgets.iter();
        let Some(first) = iter.next() else { return Ok(None) };
        iter.try_fold(*first, |acc, b| acc.compose(b)).map(Some)
    }

    /// Parallel composition over disjoint data: the pointwise maximum.
    pub fn parallel(&self, other: &PrivacyBudget) -> Result<Self> {
        use PrivacyBudget::*;
        Ok(match (*self, *other) {
            (Pure { epsilon: a }, Pure { epsilon: b }) => Pure { epsilon: a.max(b) },
            (Pure { epsilon: a }, Approx { epsilon: b, delta })
            | (Approx { epsilon: b, delta }, Pure { epsilon: a }) => Approx { epsilon: a.max(b), delta },
            (Approx { epsilon: a, delta: da }, Approx { epsilon: b, delta: db }) => {
                Approx { epsilon: a.max(b), delta: da.max(db) }
            }
            (Zcdp { rho: a }, Zcdp { rho: b }) => Zcdp { rho: a.max(b) },
            (x, y) => return Err(Error::FlavorMismatch(x.flavor(), y.flavor())),
        })
    }

    /// True when both budgets have the same flavor and all parameters agree
    /// to relative tolerance `tol`.
    pub fn approx_eq(&self, other: &PrivacyBudget, tol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs());
        use PrivacyBudget::*;
        match (*self, *other) {
            (Pure { epsilon: a }, Pure { epsilon: b }) => close(a, b),
            (Approx { epsilon: a, delta: da }, Approx { epsilon: b, delta: db }) => close(a, b) && close(da, db),
            (Zcdp { rho: a }, Zcdp { rho: b }) => close(a, b),
            _ => false,
        }
    }
}

/// One line of a [`PrivacyLedger`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Charge {
    pub label: String,
    pub budget: PrivacyBudget,
}

/// Records every privacy charge made by an estimator. Charges compose
/// sequentially; work on disjoint partitions is recorded as a single
/// parallel charge.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PrivacyLedger {
    charges: Vec<Charge>,
}

impl PrivacyLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, label: impl Into<String>, budget: PrivacyBudget) {
        self.charges.push(Charge { label: label.into(), budget });
    }

    /// Charges the parallel composition of per-partition budgets.
    pub fn charge_parallel(&mut self, label: impl Into<String>, parts: &[PrivacyBudget]) -> Result<()> {
        let mut iter = parts.iter();
        let Some(first) = iter.next() else { return Ok(()) };
        let joint = iter.try_fold(*first, |acc, b| acc.parallel(b))?;
        self.charge(label, joint);
        Ok(())
    }

    /// Appends every charge of `other`, prefixing labels.
    pub fn absorb(&mut self, prefix: &str, other: PrivacyLedger) {
        for c in other.charges {
            self.charges.push(Charge { label: format!("{prefix}/{}", c.label), budget: c.budget });
        }
    }

    pub fn charges(&self) -> &[Charge] {
        &self.charges
    }

    /// Sequential composition of all charges, `None` when nothing was charged.
    pub fn total(&self) -> Result<Option<PrivacyBudget>> {
        let budgets: Vec<PrivacyBudget> = self.charges.iter().map(|c| c.budget).collect();
        PrivacyBudget::compose_all(&budgets)
    }
}
