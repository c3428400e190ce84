//! Example games with closed-form equilibrium sets.
//!
//! Each `*_equilibria` function returns the case table for its game exactly
//! as stated in closed form, regime boundaries included. Points are still
//! run through the general equilibrium check, so a table entry that is not
//! an equilibrium shows up with `verified == false` rather than being
//! dropped.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{Alpha, Distribution, FnUtility, GameError, ProfilePair};
use crate::two_action::{
    EquilibriumPoint, EquilibriumSet, Margins, PointTag, TwoActionError, TwoActionGame,
    TwoActionSolver,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("routing needs gamma > 1, got {0}")]
    Gamma(f64),
    #[error("participation needs C < 1, got {0}")]
    FixedUtility(f64),
    #[error("participation needs P > 0, got {0}")]
    Reward(f64),
    #[error("the three-action example needs alpha < 1/2, got {0}")]
    Example1Alpha(f64),
    #[error("unknown preset {0:?}; expected routing, participation, bandwidth or example1")]
    UnknownPreset(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    TwoAction(#[from] TwoActionError),
}

/// Two-hub routing: hub 1 takes `gamma z`, hub 2 a constant 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoutingParams {
    pub gamma: f64,
}

impl RoutingParams {
    pub fn new(gamma: f64) -> Result<Self, CatalogError> {
        if gamma.is_finite() && gamma > 1.0 {
            Ok(RoutingParams { gamma })
        } else {
            Err(CatalogError::Gamma(gamma))
        }
    }

    /// Classical equilibrium share `1 / gamma`.
    pub fn delta(&self) -> f64 {
        1.0 / self.gamma
    }
}

/// Participants get `C` plus an equal share of the reward `P`; others get 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticipationParams {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "P")]
    pub p: f64,
}

impl ParticipationParams {
    pub fn new(c: f64, p: f64) -> Result<Self, CatalogError> {
        if !(c.is_finite() && c < 1.0) {
            return Err(CatalogError::FixedUtility(c));
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(CatalogError::Reward(p));
        }
        Ok(ParticipationParams { c, p })
    }

    /// `P >= 1 - C`: full participation pays at least the outside option.
    pub fn higher_reward(&self) -> bool {
        self.p >= 1.0 - self.c
    }

    /// Share at which participating and abstaining pay the same.
    pub fn break_even(&self) -> f64 {
        self.p / (1.0 - self.c)
    }

    /// Lower reward threshold `alpha (1 - C)`.
    pub fn p1(&self, alpha: Alpha) -> f64 {
        alpha.value() * (1.0 - self.c)
    }

    /// Upper reward threshold `(1 - alpha)(1 - C)`.
    pub fn p2(&self, alpha: Alpha) -> f64 {
        (1.0 - alpha.value()) * (1.0 - self.c)
    }
}

/// Full-rate transmitters get `1 - z`, half-rate ones `(1 - z) / 2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandwidthParams {}

pub fn routing_game(p: RoutingParams) -> TwoActionGame {
    let gamma = p.gamma;
    let delta = p.delta();
    TwoActionGame::new("routing", move |z| -gamma * z, |_| -1.0)
        .with_analytic_zeros(vec![delta])
        .with_known_optimum(delta / 4.0 - 1.0, true)
}

pub fn participation_game(p: ParticipationParams) -> TwoActionGame {
    let (c, reward) = (p.c, p.p);
    let z0 = p.break_even();
    let zeros = if z0 <= 1.0 { vec![z0] } else { Vec::new() };
    TwoActionGame::new(
        "participation",
        move |z| c + if z > 0.0 { reward / z } else { 0.0 },
        |_| 1.0,
    )
    .with_analytic_zeros(zeros)
    .with_known_optimum(1.0 + reward, false)
}

pub fn bandwidth_game(_: BandwidthParams) -> TwoActionGame {
    TwoActionGame::new("bandwidth", |z| 1.0 - z, |z| 0.5 * (1.0 - z))
        .with_analytic_zeros(vec![1.0])
        .with_known_optimum(0.5, true)
}

/// Tag a table entry would get from the general construction.
fn tag_for(game: &TwoActionGame, z: f64, alpha: f64, solver: &TwoActionSolver) -> PointTag {
    let tol = &solver.tol;
    if z == 0.0 {
        PointTag::Boundary0
    } else if z == 1.0 {
        PointTag::Boundary1
    } else if game.h(z).abs() <= tol.h {
        PointTag::ZeroOfH
    } else if (z - alpha).abs() <= tol.dup && alpha < 0.5 {
        PointTag::NewAlpha
    } else {
        PointTag::NewOneMinusAlpha
    }
}

fn table_set(
    game: &TwoActionGame,
    alpha: Alpha,
    mut zs: Vec<f64>,
    solver: &TwoActionSolver,
) -> EquilibriumSet {
    zs.sort_by(f64::total_cmp);
    zs.dedup_by(|a, b| (*a - *b).abs() <= solver.tol.dup);
    let a = alpha.value();
    let points = zs
        .into_iter()
        .map(|z| {
            let tag = tag_for(game, z, a, solver);
            solver.point(game, z, alpha, tag).unwrap_or_else(|_| {
                // Not reachable for this alpha: report it unverified.
                let h = game.h(z);
                EquilibriumPoint {
                    z,
                    y: f64::NAN,
                    tag,
                    margins: Margins { h, slack: f64::NAN },
                    verified: false,
                    marginal: false,
                }
            })
        })
        .collect();
    EquilibriumSet {
        game: game.name().to_string(),
        alpha: a,
        points,
        plateaus: Vec::new(),
        discontinuities: Vec::new(),
    }
}

/// Closed-form equilibrium shares of the routing game.
pub fn routing_table(p: RoutingParams, alpha: Alpha) -> Vec<f64> {
    let (d, a) = (p.delta(), alpha.value());
    if d <= 0.5 {
        if a <= d {
            vec![a, 1.0 - a]
        } else if a <= 0.5 {
            vec![d, 1.0 - a]
        } else {
            vec![d]
        }
    } else if a <= 1.0 - d {
        vec![a, 1.0 - a]
    } else if a < 0.5 {
        vec![d, a]
    } else {
        vec![d]
    }
}

/// Closed-form equilibrium shares of the participation game.
pub fn participation_table(p: ParticipationParams, alpha: Alpha) -> Vec<f64> {
    let a = alpha.value();
    if p.higher_reward() {
        return if a >= 0.5 { vec![0.0, 1.0] } else { vec![0.0, 1.0, a] };
    }
    let classical = vec![0.0, 1.0, p.break_even()];
    let with = |extra: f64| {
        let mut v = classical.clone();
        v.push(extra);
        v
    };
    if a > 0.5 {
        classical
    } else if a == 0.5 {
        if p.p < (1.0 - p.c) / 2.0 {
            with(0.5)
        } else {
            classical
        }
    } else if p.p <= p.p1(alpha) {
        with(1.0 - a)
    } else if p.p < p.p2(alpha) {
        vec![0.0, 1.0, a, 1.0 - a]
    } else {
        with(a)
    }
}

/// Closed-form equilibrium shares of the bandwidth game.
pub fn bandwidth_table(alpha: Alpha) -> Vec<f64> {
    let a = alpha.value();
    if a >= 0.5 {
        vec![1.0]
    } else {
        vec![a, 1.0]
    }
}

pub fn routing_equilibria(p: RoutingParams, alpha: Alpha, solver: &TwoActionSolver) -> EquilibriumSet {
    table_set(&routing_game(p), alpha, routing_table(p, alpha), solver)
}

pub fn participation_equilibria(
    p: ParticipationParams,
    alpha: Alpha,
    solver: &TwoActionSolver,
) -> EquilibriumSet {
    table_set(&participation_game(p), alpha, participation_table(p, alpha), solver)
}

pub fn bandwidth_equilibria(alpha: Alpha, solver: &TwoActionSolver) -> EquilibriumSet {
    table_set(&bandwidth_game(BandwidthParams {}), alpha, bandwidth_table(alpha), solver)
}

/// Three actions with `u(0, mu) > u(1, mu) > u(2, mu)` everywhere.
pub fn example1_utility() -> FnUtility {
    FnUtility::new(3, |a, mu| match a {
        0 => 2.0 + 0.1 * mu[0],
        1 => 1.0 + 0.5 * mu[1],
        _ => 0.5 * mu[2],
    })
}

/// Equilibrium pairs of the three-action example: everyone on action 0, and
/// herders on action 1 with rational players on action 0.
pub fn example1_fixture(alpha: Alpha) -> Result<Vec<ProfilePair>, CatalogError> {
    let a = alpha.value();
    if a >= 0.5 {
        return Err(CatalogError::Example1Alpha(a));
    }
    let rational = Distribution::point_mass(3, 0)?;
    Ok(vec![
        ProfilePair::new(rational.clone(), rational.clone())?,
        ProfilePair::new(Distribution::new(vec![a, 1.0 - a, 0.0])?, rational)?,
    ])
}

/// The fixture plus herders on action 2.
pub fn example1_pairs(alpha: Alpha) -> Result<Vec<ProfilePair>, CatalogError> {
    let mut pairs = example1_fixture(alpha)?;
    let a = alpha.value();
    pairs.push(ProfilePair::new(
        Distribution::new(vec![a, 0.0, 1.0 - a])?,
        Distribution::point_mass(3, 0)?,
    )?);
    Ok(pairs)
}

/// A named catalog game with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Preset {
    Routing(RoutingParams),
    Participation(ParticipationParams),
    Bandwidth,
    Example1,
}

impl Preset {
    pub const NAMES: [&'static str; 4] = ["routing", "participation", "bandwidth", "example1"];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Routing(_) => "routing",
            Preset::Participation(_) => "participation",
            Preset::Bandwidth => "bandwidth",
            Preset::Example1 => "example1",
        }
    }

    /// The two-action game, or `None` for the three-action example.
    pub fn two_action(&self) -> Option<TwoActionGame> {
        match *self {
            Preset::Routing(p) => Some(routing_game(p)),
            Preset::Participation(p) => Some(participation_game(p)),
            Preset::Bandwidth => Some(bandwidth_game(BandwidthParams {})),
            Preset::Example1 => None,
        }
    }

    /// Closed-form equilibrium set, where one exists.
    pub fn closed_form(&self, alpha: Alpha, solver: &TwoActionSolver) -> Option<EquilibriumSet> {
        match *self {
            Preset::Routing(p) => Some(routing_equilibria(p, alpha, solver)),
            Preset::Participation(p) => Some(participation_equilibria(p, alpha, solver)),
            Preset::Bandwidth => Some(bandwidth_equilibria(alpha, solver)),
            Preset::Example1 => None,
        }
    }

    pub fn utility(&self) -> Arc<dyn crate::game::Utility> {
        match self.two_action() {
            Some(g) => Arc::new(g.utility()),
            None => Arc::new(example1_utility()),
        }
    }
}

/// Shares only in `a`, and only in `b`, matched within `tol`.
pub fn set_difference(a: &[f64], b: &[f64], tol: f64) -> (Vec<f64>, Vec<f64>) {
    let only = |x: &[f64], y: &[f64]| {
        x.iter()
            .copied()
            .filter(|p| !y.iter().any(|q| (p - q).abs() <= tol))
            .collect()
    };
    (only(a, b), only(b, a))
}
