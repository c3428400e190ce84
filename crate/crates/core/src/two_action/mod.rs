//! Games with two actions.
//!
//! With `mu = (z, 1 - z)` and `mu_r = (y, 1 - y)`, herders play action 0
//! exactly when `z >= 1/2` (ties go to action 0), and population consistency
//! pins the rational share to
//!
//! ```text
//! y*(z) = z / alpha              if z <  1/2
//!       = 1 - (1 - z) / alpha    if z >= 1/2
//! ```
//!
//! so equilibria are indexed by `z` alone. Whether `(z, y*(z))` is an
//! equilibrium only depends on the sign of the utility gap
//! `h(z) = u(0, z) - u(1, z)` at `z` and at the candidate shares `alpha` and
//! `1 - alpha`; [`TwoActionSolver`] builds the full set from the zeros of
//! `h` and those sign conditions.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::game::{majority_action, Alpha, Distribution, GameError, Utility, UtilityKind};
use crate::tolerance::Tolerances;

mod equilibria;
pub mod random;
mod zeros;

pub use equilibria::{
    EquilibriumPoint, EquilibriumSet, Margins, PointTag, SweepRow, TwoActionSolver,
};
pub use zeros::{HZeroSet, Interval};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwoActionError {
    #[error("share {0} is outside [0, 1]")]
    Domain(f64),
    #[error("share {z} cannot arise with alpha = {alpha}: rational share would be {y}")]
    Infeasible { z: f64, alpha: f64, y: f64 },
    #[error("zero scan needs at least 64 grid cells, got {0}")]
    GridTooSmall(usize),
    #[error("h vanishes on {cells} of {grid_n} grid cells; the game is degenerate")]
    PlateauOverflow { cells: usize, grid_n: usize },
    #[error("supplied zero {z} has h = {h:e}")]
    InvalidZero { z: f64, h: f64 },
    #[error("expected a two-action utility, got {0} actions")]
    NotTwoActions(usize),
    #[error(transparent)]
    Game(#[from] GameError),
}

type ShareFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Closed-form social optimum attached to a catalog game.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KnownOptimum {
    pub value: f64,
    /// False when the value is a supremum approached but not reached.
    pub attained: bool,
}

/// A two-action game given by the utilities of each action as functions of
/// the share `z` playing action 0.
#[derive(Clone)]
pub struct TwoActionGame {
    name: String,
    u1: Arc<ShareFn>,
    u2: Arc<ShareFn>,
    analytic_zeros: Option<Vec<f64>>,
    optimum: Option<KnownOptimum>,
}

impl fmt::Debug for TwoActionGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoActionGame")
            .field("name", &self.name)
            .field("analytic_zeros", &self.analytic_zeros)
            .field("optimum", &self.optimum)
            .finish()
    }
}

impl TwoActionGame {
    pub fn new<F, G>(name: impl Into<String>, u1: F, u2: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        TwoActionGame {
            name: name.into(),
            u1: Arc::new(u1),
            u2: Arc::new(u2),
            analytic_zeros: None,
            optimum: None,
        }
    }

    /// Wraps a general utility over two actions.
    pub fn from_utility(
        name: impl Into<String>,
        u: Arc<dyn Utility>,
    ) -> Result<Self, TwoActionError> {
        if u.action_count() != 2 {
            return Err(TwoActionError::NotTwoActions(u.action_count()));
        }
        let (a, b) = (u.clone(), u);
        Ok(Self::new(
            name,
            move |z| a.eval(0, &Distribution::from_raw(vec![z, 1.0 - z])),
            move |z| b.eval(1, &Distribution::from_raw(vec![z, 1.0 - z])),
        ))
    }

    /// Known zeros of `h`, used instead of the grid scan. They are checked
    /// against `h` when the solver runs.
    pub fn with_analytic_zeros(mut self, zeros: Vec<f64>) -> Self {
        self.analytic_zeros = Some(zeros);
        self
    }

    pub fn without_analytic_zeros(mut self) -> Self {
        self.analytic_zeros = None;
        self
    }

    pub fn with_known_optimum(mut self, value: f64, attained: bool) -> Self {
        self.optimum = Some(KnownOptimum { value, attained });
        self
    }

    pub fn without_known_optimum(mut self) -> Self {
        self.optimum = None;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn analytic_zeros(&self) -> Option<&[f64]> {
        self.analytic_zeros.as_deref()
    }

    pub fn known_optimum(&self) -> Option<KnownOptimum> {
        self.optimum
    }

    /// Utility of action 0 at share `z`.
    pub fn u1(&self, z: f64) -> f64 {
        (self.u1)(z)
    }

    /// Utility of action 1 at share `z`.
    pub fn u2(&self, z: f64) -> f64 {
        (self.u2)(z)
    }

    /// `u1(z) - u2(z)` without a domain check.
    pub fn h(&self, z: f64) -> f64 {
        self.u1(z) - self.u2(z)
    }

    /// Average utility when a share `z` plays action 0.
    pub fn welfare(&self, z: f64) -> f64 {
        z * self.u1(z) + (1.0 - z) * self.u2(z)
    }

    /// The game as a general [`Utility`] over `mu = (z, 1 - z)`.
    pub fn utility(&self) -> TwoActionUtility {
        TwoActionUtility(self.clone())
    }
}

/// Adapter exposing a [`TwoActionGame`] through the general interface.
#[derive(Clone, Debug)]
pub struct TwoActionUtility(TwoActionGame);

impl Utility for TwoActionUtility {
    fn action_count(&self) -> usize {
        2
    }

    fn eval(&self, action: usize, mu: &Distribution) -> f64 {
        if action == 0 {
            self.0.u1(mu[0])
        } else {
            self.0.u2(mu[0])
        }
    }

    fn kind(&self) -> UtilityKind {
        UtilityKind::Catalog
    }
}

/// Utility gap `u1(z) - u2(z)`.
pub fn h_eval(game: &TwoActionGame, z: f64) -> Result<f64, TwoActionError> {
    if !(0.0..=1.0).contains(&z) {
        return Err(TwoActionError::Domain(z));
    }
    Ok(game.h(z))
}

/// Whether herders play action 0 at share `z`.
pub fn herd_on_first(z: f64, tol: &Tolerances) -> bool {
    majority_action(&Distribution::from_raw(vec![z, 1.0 - z]), tol.tie) == 0
}

/// Rational share of action 0 that makes `z` a consistent population share.
pub fn y_star(z: f64, alpha: Alpha, tol: &Tolerances) -> Result<f64, TwoActionError> {
    if !(0.0..=1.0).contains(&z) {
        return Err(TwoActionError::Domain(z));
    }
    let a = alpha.value();
    let y = if herd_on_first(z, tol) {
        1.0 - (1.0 - z) / a
    } else {
        z / a
    };
    if y < -tol.sum || y > 1.0 + tol.sum {
        return Err(TwoActionError::Infeasible { z, alpha: a, y });
    }
    Ok(y.clamp(0.0, 1.0))
}
