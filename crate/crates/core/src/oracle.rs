//! Brute-force equilibrium search on a simplex grid.
//!
//! Every grid point `mu_r` is paired with every candidate herd target `m`.
//! The population measure follows from consistency, the candidate survives
//! if `m` really is the majority of that measure, and then each action in
//! the support of `mu_r` must be a best response. Grid points rarely hit an
//! equilibrium exactly, so with [`Acceptance::Crossing`] a point is also
//! kept when a neighbouring grid point with the same herd target satisfies
//! the violated condition: the condition then changes sign across the grid
//! edge and an exact equilibrium lies on it (for continuous utilities). The
//! neighbour may sit just past the majority switch, so that equilibria on
//! the switch itself are found.
//!
//! Accepted points are grouped into clusters of grid neighbours that share
//! the herd target.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::game::{
    majority_action, population_measure, utilities, ActionSet, Alpha, Distribution, GameError,
    ProfilePair, Utility,
};
use crate::simplex::{grid_size, neighbours, to_weights, SimplexGrid};
use crate::tolerance::Tolerances;
use crate::two_action::{EquilibriumSet, TwoActionError, TwoActionGame, TwoActionSolver};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("grid resolution must be at least 10, got {0}")]
    ResolutionTooSmall(u32),
    #[error("search needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("utility has {found} actions, expected {expected}")]
    ActionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    TwoAction(#[from] TwoActionError),
}

/// How close to an exact equilibrium a grid point must be.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "bound", rename_all = "kebab-case")]
pub enum Acceptance {
    /// Within the argmax tolerance, or the violated condition holds at a
    /// same-majority neighbour.
    Crossing,
    /// Every support action is within this bound of the best response.
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub resolution: u32,
    pub acceptance: Acceptance,
    /// Largest number of (grid point, herd target) evaluations allowed.
    pub budget: u64,
}

impl GridSpec {
    pub fn new(resolution: u32) -> Self {
        GridSpec {
            resolution,
            acceptance: Acceptance::Crossing,
            budget: 20_000_000,
        }
    }

    pub fn with_acceptance(mut self, acceptance: Acceptance) -> Self {
        self.acceptance = acceptance;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleHit {
    pub pair: ProfilePair,
    pub majority: usize,
    /// Grid coordinates of `mu_r`, in units of `1 / resolution`.
    pub grid_point: Vec<u32>,
    /// Largest utility shortfall of a support action below the best response.
    pub slack: f64,
    /// The bound `slack` was accepted against.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cluster {
    pub majority: usize,
    /// Member with the smallest slack; first in grid order on ties.
    pub representative: OracleHit,
    pub size: usize,
    /// Componentwise bounds of `mu` over the members.
    pub mu_lo: Vec<f64>,
    pub mu_hi: Vec<f64>,
}

impl Cluster {
    /// Distance from `mu` to the bounding box, in the max norm.
    pub fn distance(&self, mu: &[f64]) -> f64 {
        mu.iter()
            .zip(self.mu_lo.iter().zip(&self.mu_hi))
            .map(|(&x, (&lo, &hi))| (lo - x).max(x - hi).max(0.0))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Enumeration {
    /// Accepted points ordered by herd target, then grid order.
    pub hits: Vec<OracleHit>,
    pub clusters: Vec<Cluster>,
}

/// Per grid point and herd target: whether the target is the majority, and
/// each action's signed violation `max_{b != a} u_b - u_a`.
struct Evaluated {
    consistent: bool,
    /// The target trails the largest weight by at most one grid move, so
    /// the grid edge to a consistent neighbour ends on the majority switch.
    near: bool,
    violation: Vec<f64>,
}

fn evaluate(
    u: &dyn Utility,
    mu_r: &Distribution,
    alpha: Alpha,
    m: usize,
    slack: f64,
    tol: &Tolerances,
) -> (Distribution, Evaluated) {
    let mu = population_measure(mu_r, alpha, m);
    let consistent = majority_action(&mu, tol.tie) == m;
    let top = mu.weights().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let near = consistent || mu[m] >= top - slack;
    let values = if near { utilities(u, &mu) } else { Vec::new() };
    let violation = (0..values.len())
        .map(|a| {
            let best_other = values
                .iter()
                .enumerate()
                .filter(|&(b, _)| b != a)
                .map(|(_, &v)| v)
                .fold(f64::NEG_INFINITY, f64::max);
            best_other - values[a]
        })
        .collect();
    (mu, Evaluated { consistent, near, violation })
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // Smaller index becomes the root, so roots are deterministic.
        if ra < rb {
            self.0[rb] = ra;
        } else if rb < ra {
            self.0[ra] = rb;
        }
    }
}

/// All approximate equilibria on the grid.
pub fn enumerate_alpha_rne(
    u: &dyn Utility,
    actions: ActionSet,
    alpha: Alpha,
    grid: &GridSpec,
    tol: &Tolerances,
) -> Result<Enumeration, OracleError> {
    let n = actions.count();
    if u.action_count() != n {
        return Err(OracleError::ActionMismatch {
            expected: n,
            found: u.action_count(),
        });
    }
    if grid.resolution < 10 {
        return Err(OracleError::ResolutionTooSmall(grid.resolution));
    }
    let needed = grid_size(n, grid.resolution).saturating_mul(n as u64);
    if needed > grid.budget {
        return Err(OracleError::BudgetExceeded {
            needed,
            budget: grid.budget,
        });
    }

    let points: Vec<Vec<u32>> = SimplexGrid::new(n, grid.resolution).collect();
    let index: HashMap<&[u32], usize> = points.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let rationals: Vec<Distribution> = points
        .iter()
        .map(|p| Distribution::from_raw(to_weights(p, grid.resolution)))
        .collect();

    // One grid move shifts two weights of `mu` by `alpha / G` each.
    let switch_slack = 2.0 * alpha.value() / grid.resolution as f64 + tol.tie;
    let mut hits = Vec::new();
    let mut clusters = Vec::new();
    for m in 0..n {
        let evaluated: Vec<(Distribution, Evaluated)> = rationals
            .par_iter()
            .map(|mu_r| evaluate(u, mu_r, alpha, m, switch_slack, tol))
            .collect();

        let accepted: Vec<Option<(f64, f64)>> = (0..points.len())
            .into_par_iter()
            .map(|i| {
                let (_, ev) = &evaluated[i];
                if !ev.consistent {
                    return None;
                }
                let mut slack: f64 = 0.0;
                let mut bound: f64 = match grid.acceptance {
                    Acceptance::Crossing => tol.argmax,
                    Acceptance::Fixed(b) => b,
                };
                for a in rationals[i].support(tol.support) {
                    let v = ev.violation[a].max(0.0);
                    slack = slack.max(v);
                    if v <= bound {
                        continue;
                    }
                    let Acceptance::Crossing = grid.acceptance else {
                        return None;
                    };
                    // The condition for `a` must hold at some neighbour.
                    let step = neighbours(&points[i])
                        .filter_map(|q| {
                            let (_, other) = &evaluated[index[q.as_slice()]];
                            (other.near && other.violation[a] <= 0.0)
                                .then(|| ev.violation[a] - other.violation[a])
                        })
                        .fold(f64::INFINITY, f64::min);
                    if !step.is_finite() {
                        return None;
                    }
                    bound = bound.max(step);
                }
                Some((slack, bound))
            })
            .collect();

        let mut uf = UnionFind((0..points.len()).collect());
        for (i, acc) in accepted.iter().enumerate() {
            if acc.is_none() {
                continue;
            }
            for q in neighbours(&points[i]) {
                let j = index[q.as_slice()];
                if accepted[j].is_some() {
                    uf.union(i, j);
                }
            }
        }

        let mut by_root: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for (i, acc) in accepted.iter().enumerate() {
            let Some((slack, bound)) = *acc else { continue };
            let hit = OracleHit {
                pair: ProfilePair::new(evaluated[i].0.clone(), rationals[i].clone())?,
                majority: m,
                grid_point: points[i].clone(),
                slack,
                bound,
            };
            let root = uf.find(i);
            let k = *slot.entry(root).or_insert_with(|| {
                by_root.push((root, Vec::new()));
                by_root.len() - 1
            });
            by_root[k].1.push(hits.len());
            hits.push(hit);
        }

        for (_, members) in by_root {
            let mut mu_lo = vec![f64::INFINITY; n];
            let mut mu_hi = vec![f64::NEG_INFINITY; n];
            let mut best = members[0];
            for &h in &members {
                let w = hits[h].pair.mu.weights();
                for k in 0..n {
                    mu_lo[k] = mu_lo[k].min(w[k]);
                    mu_hi[k] = mu_hi[k].max(w[k]);
                }
                if hits[h].slack < hits[best].slack {
                    best = h;
                }
            }
            clusters.push(Cluster {
                majority: m,
                representative: hits[best].clone(),
                size: members.len(),
                mu_lo,
                mu_hi,
            });
        }
    }
    Ok(Enumeration { hits, clusters })
}

/// A theory point matched to an oracle cluster.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Match {
    pub z: f64,
    pub cluster: usize,
    /// Distance from `z` to the cluster's share range.
    pub distance: f64,
}

/// Range of the share `z` covered by an oracle cluster.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterRange {
    pub index: usize,
    pub majority: usize,
    pub z_lo: f64,
    pub z_hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheckReport {
    pub game: String,
    pub alpha: f64,
    pub resolution: u32,
    pub matched: Vec<Match>,
    /// Theory points with no cluster within `2 / resolution`.
    pub missed: Vec<f64>,
    /// Clusters with no theory point within `2 / resolution`.
    pub spurious: Vec<ClusterRange>,
}

impl CrossCheckReport {
    pub fn all_matched(&self) -> bool {
        self.missed.is_empty() && self.spurious.is_empty()
    }
}

/// Compares the grid search against the two-action solver.
pub fn cross_check(
    game: &TwoActionGame,
    alpha: Alpha,
    grid: &GridSpec,
    solver: &TwoActionSolver,
) -> Result<CrossCheckReport, OracleError> {
    let theory = solver.alpha_rne_set(game, alpha)?;
    cross_check_against(game, &theory, grid, &solver.tol)
}

/// Compares the grid search on `game` against a claimed equilibrium set,
/// which may come from a different source than the solver.
pub fn cross_check_against(
    game: &TwoActionGame,
    theory: &EquilibriumSet,
    grid: &GridSpec,
    tol: &Tolerances,
) -> Result<CrossCheckReport, OracleError> {
    let alpha = Alpha::new(theory.alpha)?;
    let found = enumerate_alpha_rne(&game.utility(), ActionSet::new(2)?, alpha, grid, tol)?;
    let reach = 2.0 / grid.resolution as f64;

    let ranges: Vec<ClusterRange> = found
        .clusters
        .iter()
        .enumerate()
        .map(|(index, c)| ClusterRange {
            index,
            majority: c.majority,
            z_lo: c.mu_lo[0],
            z_hi: c.mu_hi[0],
        })
        .collect();
    let gap = |r: &ClusterRange, lo: f64, hi: f64| (r.z_lo - hi).max(lo - r.z_hi).max(0.0);

    let mut used = vec![false; ranges.len()];
    let mut matched = Vec::new();
    let mut missed = Vec::new();
    for z in theory.zs() {
        let near: Vec<(usize, f64)> = ranges
            .iter()
            .map(|r| (r.index, gap(r, z, z)))
            .filter(|&(_, d)| d <= reach)
            .collect();
        match near.iter().min_by(|a, b| a.1.total_cmp(&b.1)) {
            Some(&(cluster, distance)) => matched.push(Match { z, cluster, distance }),
            None => missed.push(z),
        }
        for (i, _) in near {
            used[i] = true;
        }
    }
    for p in &theory.plateaus {
        let mut any = false;
        for r in &ranges {
            if gap(r, p.lo, p.hi) <= reach {
                used[r.index] = true;
                any = true;
            }
        }
        if !any {
            missed.push(p.lo);
        }
    }
    let spurious = ranges.into_iter().filter(|r| !used[r.index]).collect();

    Ok(CrossCheckReport {
        game: game.name().to_string(),
        alpha: alpha.value(),
        resolution: grid.resolution,
        matched,
        missed,
        spurious,
    })
}
