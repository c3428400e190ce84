//! The general finite-action model.
//!
//! A population plays actions `0..n`. An `alpha` fraction of it is rational
//! and best-responds to the population distribution `mu`; the rest herds onto
//! the majority action of `mu`, ties going to the smallest index. A pair
//! `(mu, mu_r)` is an equilibrium when
//!
//! 1. every action played by rational players is a best response to `mu`,
//! 2. `mu(a) = alpha * mu_r(a) + (1 - alpha) * [a == majority]`, and
//! 3. the majority used in (2) is the majority action of `mu` itself.
//!
//! Actions are indexed from zero. Literature that labels actions `1..n`
//! maps label `k` to index `k - 1`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::tolerance::Tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("an action set needs at least two actions, got {0}")]
    TooFewActions(usize),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("rationality fraction must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("dimension mismatch: expected {expected} actions, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("action index {action} out of range for {count} actions")]
    ActionOutOfRange { action: usize, count: usize },
}

/// A finite set of actions `0..count`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ActionSet(usize);

impl ActionSet {
    pub fn new(count: usize) -> Result<Self, GameError> {
        if count < 2 {
            return Err(GameError::TooFewActions(count));
        }
        Ok(ActionSet(count))
    }

    pub fn count(self) -> usize {
        self.0
    }
}

/// Fraction of rational players, in `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct Alpha(f64);

impl Alpha {
    pub const ONE: Alpha = Alpha(1.0);

    pub fn new(value: f64) -> Result<Self, GameError> {
        if !(value > 0.0 && value <= 1.0) {
            return Err(GameError::InvalidAlpha(value));
        }
        Ok(Alpha(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Probability mass over the actions of a game.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    /// Validates with the default sum tolerance.
    pub fn new(weights: Vec<f64>) -> Result<Self, GameError> {
        Self::with_tolerance(weights, Tolerances::default().sum)
    }

    pub fn with_tolerance(weights: Vec<f64>, sum_tol: f64) -> Result<Self, GameError> {
        if weights.len() < 2 {
            return Err(GameError::TooFewActions(weights.len()));
        }
        for (a, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < -sum_tol || w > 1.0 + sum_tol {
                return Err(GameError::InvalidDistribution(format!(
                    "weight {w} of action {a} is outside [0, 1]"
                )));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > sum_tol {
            return Err(GameError::InvalidDistribution(format!(
                "weights sum to {total}"
            )));
        }
        Ok(Distribution(weights))
    }

    /// Skips validation. Callers build the weights from a valid distribution
    /// by convex combination.
    pub(crate) fn from_raw(weights: Vec<f64>) -> Self {
        Distribution(weights)
    }

    /// All mass on `action`.
    pub fn point_mass(count: usize, action: usize) -> Result<Self, GameError> {
        ActionSet::new(count)?;
        if action >= count {
            return Err(GameError::ActionOutOfRange { action, count });
        }
        let mut w = vec![0.0; count];
        w[action] = 1.0;
        Ok(Distribution(w))
    }

    /// The two-action distribution `(z, 1 - z)`.
    pub fn two_action(z: f64) -> Result<Self, GameError> {
        Self::new(vec![z, 1.0 - z])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn weight(&self, action: usize) -> f64 {
        self.0[action]
    }

    /// Actions carrying more than `threshold` mass.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > threshold)
            .map(|(a, _)| a)
            .collect()
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;

    fn index(&self, action: usize) -> &f64 {
        &self.0[action]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UtilityKind {
    Catalog,
    Tabular,
    Expression,
}

/// Utility `u(a, mu)` of playing action `a` against population `mu`.
///
/// Implementations must be deterministic and free of side effects: solvers
/// call them concurrently and compare results bit for bit.
pub trait Utility: Send + Sync {
    fn action_count(&self) -> usize;

    fn eval(&self, action: usize, mu: &Distribution) -> f64;

    fn kind(&self) -> UtilityKind;
}

type UtilityFn = dyn Fn(usize, &[f64]) -> f64 + Send + Sync;

/// A utility given by a closed-form Rust closure.
#[derive(Clone)]
pub struct FnUtility {
    count: usize,
    f: Arc<UtilityFn>,
}

impl FnUtility {
    pub fn new<F>(count: usize, f: F) -> Self
    where
        F: Fn(usize, &[f64]) -> f64 + Send + Sync + 'static,
    {
        FnUtility {
            count,
            f: Arc::new(f),
        }
    }
}

impl fmt::Debug for FnUtility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnUtility").field("count", &self.count).finish()
    }
}

impl Utility for FnUtility {
    fn action_count(&self) -> usize {
        self.count
    }

    fn eval(&self, action: usize, mu: &Distribution) -> f64 {
        (self.f)(action, mu.weights())
    }

    fn kind(&self) -> UtilityKind {
        UtilityKind::Catalog
    }
}

/// A whole-population distribution together with its rational counterpart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfilePair {
    pub mu: Distribution,
    pub mu_r: Distribution,
}

impl ProfilePair {
    pub fn new(mu: Distribution, mu_r: Distribution) -> Result<Self, GameError> {
        if mu.len() != mu_r.len() {
            return Err(GameError::DimensionMismatch {
                expected: mu.len(),
                found: mu_r.len(),
            });
        }
        Ok(ProfilePair { mu, mu_r })
    }

    /// The pair `((z, 1 - z), (y, 1 - y))` of a two-action game.
    pub fn two_action(z: f64, y: f64) -> Result<Self, GameError> {
        Self::new(Distribution::two_action(z)?, Distribution::two_action(y)?)
    }
}

/// The action herding players choose: the smallest index whose weight is
/// within `tie` of the largest weight.
pub fn majority_action(mu: &Distribution, tie: f64) -> usize {
    let max = mu.weights().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    mu.weights()
        .iter()
        .position(|&w| w >= max - tie)
        .unwrap_or(0)
}

/// Population distribution produced by rational play `mu_r` when herders
/// all pick `majority`.
pub fn population_measure(mu_r: &Distribution, alpha: Alpha, majority: usize) -> Distribution {
    let a = alpha.value();
    let weights = mu_r
        .weights()
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let herd = if i == majority { 1.0 - a } else { 0.0 };
            a * w + herd
        })
        .collect();
    Distribution::from_raw(weights)
}

/// Utilities of every action against `mu`.
pub fn utilities(u: &dyn Utility, mu: &Distribution) -> Vec<f64> {
    (0..u.action_count()).map(|a| u.eval(a, mu)).collect()
}

/// Actions whose utility against `mu` is within `argmax_tol` of the best.
pub fn best_response_support(u: &dyn Utility, mu: &Distribution, argmax_tol: f64) -> Vec<usize> {
    let values = utilities(u, mu);
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= best - argmax_tol)
        .map(|(a, _)| a)
        .collect()
}

/// Evidence that a pair satisfies all three equilibrium conditions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub majority: usize,
    /// Largest shortfall of a rationally played action below the best utility.
    pub support_gap: f64,
    /// Largest componentwise error of the population-consistency equation.
    pub consistency_error: f64,
    /// Weight of the majority action minus the next largest weight.
    pub majority_lead: f64,
    /// Some action's utility gap sits close enough to the argmax band that
    /// the best-response set depends on the tolerance.
    pub marginal: bool,
}

/// Which equilibrium condition failed, and by how much.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "condition", rename_all = "kebab-case")]
pub enum Violation {
    /// A rationally played action is not a best response.
    Support { action: usize, utility_gap: f64 },
    /// `mu` is not the population measure of `mu_r` for any herd target.
    Consistency { max_deviation: f64 },
    /// `mu` is consistent with herders on `implied`, but the majority of
    /// `mu` is `actual`.
    Majority { implied: usize, actual: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Support {
                action,
                utility_gap,
            } => write!(
                f,
                "action {action} is played by rational players but is {utility_gap:e} below the best response"
            ),
            Violation::Consistency { max_deviation } => write!(
                f,
                "population measure is inconsistent with rational play (max deviation {max_deviation:e})"
            ),
            Violation::Majority { implied, actual } => write!(
                f,
                "herders follow action {implied} but the majority action is {actual}"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Yes(Certificate),
    No(Violation),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Yes(c) => Some(c),
            Verdict::No(_) => None,
        }
    }
}

fn max_deviation(a: &Distribution, b: &Distribution) -> f64 {
    a.weights()
        .iter()
        .zip(b.weights())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Checks the three equilibrium conditions for `pair`.
pub fn verify_alpha_rne(
    pair: &ProfilePair,
    u: &dyn Utility,
    alpha: Alpha,
    tol: &Tolerances,
) -> Result<Verdict, GameError> {
    let n = u.action_count();
    for d in [&pair.mu, &pair.mu_r] {
        if d.len() != n {
            return Err(GameError::DimensionMismatch {
                expected: n,
                found: d.len(),
            });
        }
    }

    let values = utilities(u, &pair.mu);
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let support = pair.mu_r.support(tol.support);
    let (worst_action, support_gap) = support
        .iter()
        .map(|&a| (a, best - values[a]))
        .fold((0, 0.0_f64), |acc, x| if x.1 > acc.1 { x } else { acc });
    if support_gap > tol.argmax {
        return Ok(Verdict::No(Violation::Support {
            action: worst_action,
            utility_gap: support_gap,
        }));
    }

    let majority = majority_action(&pair.mu, tol.tie);
    let expected = population_measure(&pair.mu_r, alpha, majority);
    let deviation = max_deviation(&pair.mu, &expected);
    if deviation > tol.sum {
        // Which herd target, if any, would make the pair consistent?
        let a = alpha.value();
        let residual: Vec<f64> = pair
            .mu
            .weights()
            .iter()
            .zip(pair.mu_r.weights())
            .map(|(m, r)| m - a * r)
            .collect();
        let implied = residual
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| {
                if v > acc.1 {
                    (i, v)
                } else {
                    acc
                }
            })
            .0;
        let alt = population_measure(&pair.mu_r, alpha, implied);
        if implied != majority && max_deviation(&pair.mu, &alt) <= tol.sum {
            return Ok(Verdict::No(Violation::Majority {
                implied,
                actual: majority,
            }));
        }
        return Ok(Verdict::No(Violation::Consistency {
            max_deviation: deviation,
        }));
    }

    let runner_up = pair
        .mu
        .weights()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != majority)
        .map(|(_, &w)| w)
        .fold(f64::NEG_INFINITY, f64::max);
    let marginal = values.iter().any(|&v| tol.is_marginal_gap(best - v));

    Ok(Verdict::Yes(Certificate {
        majority,
        support_gap,
        consistency_error: deviation,
        majority_lead: pair.mu[majority] - runner_up,
        marginal,
    }))
}
