//! Equilibrium sets of two-action games.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::zeros::{find_h_zeros, HZeroSet, Interval};
use super::{y_star, TwoActionError, TwoActionGame};
use crate::game::{verify_alpha_rne, Alpha, ProfilePair};
use crate::tolerance::Tolerances;

/// Why a share is in the equilibrium set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointTag {
    /// `z = 0` with `h(0) <= 0`.
    Boundary0,
    /// `z = 1` with `h(1) >= 0`.
    Boundary1,
    /// An interior zero of `h`.
    ZeroOfH,
    /// `z = alpha` with `h(alpha) >= 0`, only for `alpha < 1/2`.
    NewAlpha,
    /// `z = 1 - alpha` with `h(1 - alpha) <= 0`, only for `alpha <= 1/2`.
    NewOneMinusAlpha,
}

impl PointTag {
    /// Higher wins when two candidates coincide.
    fn rank(self) -> u8 {
        match self {
            PointTag::Boundary0 | PointTag::Boundary1 => 3,
            PointTag::ZeroOfH => 2,
            PointTag::NewAlpha | PointTag::NewOneMinusAlpha => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PointTag::Boundary0 => "boundary-0",
            PointTag::Boundary1 => "boundary-1",
            PointTag::ZeroOfH => "zero-of-h",
            PointTag::NewAlpha => "new-alpha",
            PointTag::NewOneMinusAlpha => "new-one-minus-alpha",
        }
    }
}

impl fmt::Display for PointTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Slack in the inequality that certifies a point.
///
/// `slack` is `-h` for `boundary-0` and `new-one-minus-alpha`, `h` for
/// `boundary-1` and `new-alpha`, and `-|h|` for `zero-of-h`. Every emitted
/// point has `slack >= -eps_h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Margins {
    pub h: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumPoint {
    pub z: f64,
    pub y: f64,
    pub tag: PointTag,
    pub margins: Margins,
    /// The induced pair passed the general equilibrium check.
    pub verified: bool,
    pub marginal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumSet {
    pub game: String,
    pub alpha: f64,
    /// Sorted by `z`, no two closer than the duplicate tolerance.
    pub points: Vec<EquilibriumPoint>,
    /// Intervals of equilibria where `h` vanishes identically.
    pub plateaus: Vec<Interval>,
    /// Cells where `h` jumps across zero; never equilibria themselves.
    pub discontinuities: Vec<Interval>,
}

impl EquilibriumSet {
    pub fn zs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.z).collect()
    }

    pub fn contains(&self, z: f64, tol: f64) -> bool {
        self.points.iter().any(|p| (p.z - z).abs() <= tol)
            || self.plateaus.iter().any(|i| i.contains(z, tol))
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.plateaus.is_empty()
    }

    pub fn all_verified(&self) -> bool {
        self.points.iter().all(|p| p.verified)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub set: EquilibriumSet,
}

/// Builds equilibrium sets of two-action games.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoActionSolver {
    /// Cells in the zero scan of `h`.
    pub grid_n: usize,
    pub tol: Tolerances,
}

impl Default for TwoActionSolver {
    fn default() -> Self {
        TwoActionSolver {
            grid_n: 2048,
            tol: Tolerances::default(),
        }
    }
}

fn slack_for(tag: PointTag, h: f64) -> f64 {
    match tag {
        PointTag::Boundary0 | PointTag::NewOneMinusAlpha => -h,
        PointTag::Boundary1 | PointTag::NewAlpha => h,
        PointTag::ZeroOfH => -h.abs(),
    }
}

impl TwoActionSolver {
    pub fn new(grid_n: usize, tol: Tolerances) -> Self {
        TwoActionSolver { grid_n, tol }
    }

    pub fn find_h_zeros(&self, game: &TwoActionGame) -> Result<HZeroSet, TwoActionError> {
        find_h_zeros(game, self.grid_n, &self.tol)
    }

    /// Equilibrium point at share `z` for `alpha`, with its certificate.
    pub fn point(
        &self,
        game: &TwoActionGame,
        z: f64,
        alpha: Alpha,
        tag: PointTag,
    ) -> Result<EquilibriumPoint, TwoActionError> {
        let y = y_star(z, alpha, &self.tol)?;
        let h = game.h(z);
        let pair = ProfilePair::two_action(z, y)?;
        let verdict = verify_alpha_rne(&pair, &game.utility(), alpha, &self.tol)?;
        let marginal = verdict.certificate().is_some_and(|c| c.marginal);
        Ok(EquilibriumPoint {
            z,
            y,
            tag,
            margins: Margins {
                h,
                slack: slack_for(tag, h),
            },
            verified: verdict.is_yes(),
            marginal,
        })
    }

    /// Sorts, then merges candidates closer than the duplicate tolerance,
    /// keeping the strongest tag.
    fn merge(&self, mut points: Vec<EquilibriumPoint>, plateaus: &[Interval]) -> Vec<EquilibriumPoint> {
        points.retain(|p| !plateaus.iter().any(|i| i.contains(p.z, self.tol.dup)));
        points.sort_by(|a, b| a.z.total_cmp(&b.z));
        let mut out: Vec<EquilibriumPoint> = Vec::with_capacity(points.len());
        for p in points {
            match out.last_mut() {
                Some(last) if (p.z - last.z).abs() <= self.tol.dup => {
                    if p.tag.rank() > last.tag.rank() {
                        *last = p;
                    }
                }
                _ => out.push(p),
            }
        }
        out
    }

    /// Classical equilibria: every zero of `h`, plus `0` when `h(0) <= 0` and
    /// `1` when `h(1) >= 0`.
    pub fn classical_ne_set(&self, game: &TwoActionGame) -> Result<EquilibriumSet, TwoActionError> {
        let zeros = self.find_h_zeros(game)?;
        self.classical_from_zeros(game, &zeros)
    }

    fn classical_from_zeros(
        &self,
        game: &TwoActionGame,
        zeros: &HZeroSet,
    ) -> Result<EquilibriumSet, TwoActionError> {
        let one = Alpha::ONE;
        let mut candidates = Vec::new();
        for &z in &zeros.points {
            candidates.push(self.point(game, z, one, PointTag::ZeroOfH)?);
        }
        if game.h(0.0) <= self.tol.h {
            candidates.push(self.point(game, 0.0, one, PointTag::Boundary0)?);
        }
        if game.h(1.0) >= -self.tol.h {
            candidates.push(self.point(game, 1.0, one, PointTag::Boundary1)?);
        }
        Ok(EquilibriumSet {
            game: game.name().to_string(),
            alpha: 1.0,
            points: self.merge(candidates, &zeros.plateaus),
            plateaus: zeros.plateaus.clone(),
            discontinuities: zeros.discontinuities.clone(),
        })
    }

    /// Equilibria with an `alpha` fraction of rational players.
    ///
    /// Above one half this is the classical set. Otherwise classical points
    /// strictly inside `(alpha, 1 - alpha)` are dropped (no rational share
    /// reaches them), `1 - alpha` joins when `h(1 - alpha) <= 0`, and for
    /// `alpha < 1/2` the share `alpha` joins when `h(alpha) >= 0`.
    pub fn alpha_rne_set(
        &self,
        game: &TwoActionGame,
        alpha: Alpha,
    ) -> Result<EquilibriumSet, TwoActionError> {
        let zeros = self.find_h_zeros(game)?;
        let classical = self.classical_from_zeros(game, &zeros)?;
        let a = alpha.value();

        if a > 0.5 {
            let points = classical
                .points
                .iter()
                .map(|p| self.point(game, p.z, alpha, p.tag))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(EquilibriumSet {
                alpha: a,
                points,
                ..classical
            });
        }

        let mut candidates = Vec::new();
        for p in &classical.points {
            // Reachable iff a rational share exists for this alpha.
            if y_star(p.z, alpha, &self.tol).is_ok() {
                candidates.push(self.point(game, p.z, alpha, p.tag)?);
            }
        }
        let upper = 1.0 - a;
        if game.h(upper) <= self.tol.h {
            candidates.push(self.point(game, upper, alpha, PointTag::NewOneMinusAlpha)?);
        }
        if a < 0.5 && game.h(a) >= -self.tol.h {
            candidates.push(self.point(game, a, alpha, PointTag::NewAlpha)?);
        }

        let mut plateaus = Vec::new();
        for i in &classical.plateaus {
            for (lo, hi) in [(0.0, a), (upper, 1.0)] {
                let cut = Interval {
                    lo: i.lo.max(lo),
                    hi: i.hi.min(hi),
                };
                if cut.lo <= cut.hi {
                    plateaus.push(cut);
                }
            }
        }

        Ok(EquilibriumSet {
            game: classical.game,
            alpha: a,
            points: self.merge(candidates, &plateaus),
            plateaus,
            discontinuities: classical.discontinuities,
        })
    }

    /// Equilibrium sets along a list of `alpha` values, in input order.
    pub fn regime_sweep(
        &self,
        game: &TwoActionGame,
        alphas: &[Alpha],
    ) -> Result<Vec<SweepRow>, TwoActionError> {
        alphas
            .par_iter()
            .map(|&alpha| {
                Ok(SweepRow {
                    alpha: alpha.value(),
                    set: self.alpha_rne_set(game, alpha)?,
                })
            })
            .collect()
    }
}
