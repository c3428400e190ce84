//! Numerical tolerances shared by every solver in the crate.

use serde::{Deserialize, Serialize};

/// Tolerance bands used to turn exact-real equilibrium conditions into
/// floating-point tests.
///
/// The defaults are the values every test in this repository is pinned to.
/// They can be overridden from a run configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Two population shares closer than this count as a tie for the majority.
    pub tie: f64,
    /// Utilities within this band of the maximum count as best responses.
    pub argmax: f64,
    /// Weights at or below this are outside the support of a distribution.
    pub support: f64,
    /// Allowed deviation of a distribution sum from one, and of the
    /// population-consistency equation componentwise.
    pub sum: f64,
    /// `|h(z)|` at or below this counts as a zero of the utility gap.
    pub h: f64,
    /// Equilibrium shares closer than this are the same equilibrium.
    pub dup: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tie: 1e-12,
            argmax: 1e-10,
            support: 1e-12,
            sum: 1e-12,
            h: 1e-10,
            dup: 1e-9,
        }
    }
}

impl Tolerances {
    /// Certificates whose deciding utility gap falls in
    /// `(argmax / 10, 10 * argmax]` are flagged as marginal.
    pub fn is_marginal_gap(&self, gap: f64) -> bool {
        gap > self.argmax / 10.0 && gap <= 10.0 * self.argmax
    }
}
