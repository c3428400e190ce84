//! Player and social utilities at equilibrium.
//!
//! For a two-action game at share `z`:
//!
//! * a rational player earns `y*(z) u1(z) + (1 - y*(z)) u2(z)`,
//! * a herder earns `u1(z)` if `z >= 1/2` and `u2(z)` otherwise,
//! * the social optimum is the supremum over `z` of the average utility
//!   `W(z) = z u1(z) + (1 - z) u2(z)`.
//!
//! With herders present, the average utility over the two populations is
//! `(alpha y* + (1 - alpha) [z >= 1/2]) u1 + (...) u2`, which by
//! consistency is again `W(z)`; the only difference is that `z` ranges over
//! the shares reachable for this `alpha`.

use serde::Serialize;

use crate::game::Alpha;
use crate::tolerance::Tolerances;
use crate::two_action::{
    herd_on_first, y_star, EquilibriumSet, TwoActionError, TwoActionGame, TwoActionSolver,
};

/// Slack used in every welfare comparison.
pub const WELFARE_TOL: f64 = 1e-9;

/// Offset used to probe one-sided limits.
const PROBE: f64 = 1e-9;

/// Expected utility of a rational player at share `z`.
pub fn utility_rational(
    game: &TwoActionGame,
    alpha: Alpha,
    z: f64,
    tol: &Tolerances,
) -> Result<f64, TwoActionError> {
    let y = y_star(z, alpha, tol)?;
    Ok(y * game.u1(z) + (1.0 - y) * game.u2(z))
}

/// Utility of a herding player at share `z`.
pub fn utility_irrational(game: &TwoActionGame, z: f64, tol: &Tolerances) -> Result<f64, TwoActionError> {
    if !(0.0..=1.0).contains(&z) {
        return Err(TwoActionError::Domain(z));
    }
    Ok(if herd_on_first(z, tol) {
        game.u1(z)
    } else {
        game.u2(z)
    })
}

/// Utility of a player at a classical equilibrium `z`: `u2(0)` at `z = 0`,
/// `u1(z)` elsewhere.
pub fn utility_classical(game: &TwoActionGame, z: f64) -> f64 {
    if z == 0.0 {
        game.u2(0.0)
    } else {
        game.u1(z)
    }
}

/// The average-utility objective in its two-population form.
pub fn mixed_welfare(
    game: &TwoActionGame,
    alpha: Alpha,
    z: f64,
    tol: &Tolerances,
) -> Result<f64, TwoActionError> {
    let a = alpha.value();
    let y = y_star(z, alpha, tol)?;
    let herd = if herd_on_first(z, tol) { 1.0 } else { 0.0 };
    let first = a * y + (1.0 - a) * herd;
    let second = a * (1.0 - y) + (1.0 - a) * (1.0 - herd);
    Ok(first * game.u1(z) + second * game.u2(z))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SocialOptimum {
    pub value: f64,
    /// Where the optimum is reached, or the point it is approached from.
    pub at: Option<f64>,
    /// False for a supremum that no share reaches.
    pub attained: bool,
    /// Taken from the game's known closed form.
    pub closed_form: bool,
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if hi - lo <= 1e-13 {
            break;
        }
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

struct Best {
    z: f64,
    value: f64,
    limit: bool,
}

impl Best {
    fn offer(&mut self, z: f64, value: f64) {
        if value.is_finite() && value > self.value {
            *self = Best { z, value, limit: false };
        }
    }
}

/// Supremum of `f` over the feasible part of `[lo, hi]`: grid maximum,
/// golden-section refinement around it, and one-sided probes at the ends
/// and at `extra` points.
fn maximize(f: &dyn Fn(f64) -> Option<f64>, lo: f64, hi: f64, grid_n: usize, extra: &[f64]) -> Best {
    let mut best = Best {
        z: lo,
        value: f64::NEG_INFINITY,
        limit: false,
    };
    let step = (hi - lo) / grid_n as f64;
    let zs: Vec<f64> = (0..=grid_n).map(|i| if i == grid_n { hi } else { lo + i as f64 * step }).collect();
    let mut best_i = 0;
    for (i, &z) in zs.iter().enumerate() {
        if let Some(v) = f(z) {
            if v > best.value {
                best_i = i;
            }
            best.offer(z, v);
        }
    }
    let (a, b) = (zs[best_i.saturating_sub(1)], zs[(best_i + 1).min(grid_n)]);
    let g = |z: f64| f(z).unwrap_or(f64::NEG_INFINITY);
    let (z, v) = golden_max(&g, a, b);
    best.offer(z, v);

    let mut probes = vec![(lo, lo + PROBE), (hi, hi - PROBE)];
    for &x in extra {
        probes.push((x, x - PROBE));
        probes.push((x, x + PROBE));
    }
    for &(at, z) in &probes {
        if !(lo..=hi).contains(&z) {
            continue;
        }
        if let Some(v) = f(z) {
            best.offer(z, v);
        }
        // A best value found right next to a point that falls short of it is
        // a one-sided limit at that point.
        let own = f(at).unwrap_or(f64::NEG_INFINITY);
        if (best.z - at).abs() <= 1e-6 && own < best.value - WELFARE_TOL {
            best.z = at;
            best.limit = true;
        }
    }
    best
}

/// Supremum of the average utility over all shares.
pub fn social_optimum(game: &TwoActionGame, grid_n: usize) -> SocialOptimum {
    if let Some(k) = game.known_optimum() {
        return SocialOptimum {
            value: k.value,
            at: None,
            attained: k.attained,
            closed_form: true,
        };
    }
    let f = |z: f64| Some(game.welfare(z));
    let best = maximize(&f, 0.0, 1.0, grid_n.max(256), &[]);
    SocialOptimum {
        value: best.value,
        at: Some(best.z),
        attained: !best.limit,
        closed_form: false,
    }
}

/// Supremum of the two-population average utility over shares reachable
/// with this `alpha`.
pub fn social_optimum_alpha(
    game: &TwoActionGame,
    alpha: Alpha,
    grid_n: usize,
    tol: &Tolerances,
) -> SocialOptimum {
    if alpha == Alpha::ONE {
        return social_optimum(game, grid_n);
    }
    let a = alpha.value();
    let f = |z: f64| mixed_welfare(game, alpha, z, tol).ok();
    let n = grid_n.max(256);
    let best = if a > 0.5 {
        maximize(&f, 0.0, 1.0, n, &[1.0 - a, a])
    } else {
        // Two disjoint feasible pieces.
        let left = maximize(&f, 0.0, a, n, &[]);
        let right = maximize(&f, 1.0 - a, 1.0, n, &[]);
        if right.value > left.value {
            right
        } else {
            left
        }
    };
    SocialOptimum {
        value: best.value,
        at: Some(best.z),
        attained: !best.limit,
        closed_form: false,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WelfareRow {
    pub z: f64,
    pub y_star: f64,
    pub u_rational: f64,
    pub u_irrational: f64,
    /// `z` is `alpha` or `1 - alpha` with `alpha <= 1/2`.
    pub herding: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalRow {
    pub z: f64,
    pub utility: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WelfareReport {
    pub game: String,
    pub alpha: f64,
    pub rows: Vec<WelfareRow>,
    pub classical: Vec<ClassicalRow>,
    pub u_social: SocialOptimum,
    pub u_social_alpha: SocialOptimum,
    /// Herders never beat rational players or the social optimum.
    pub prop1_holds: bool,
    /// Set when every equilibrium is classical: then all players earn the
    /// classical utility and nobody beats the social optimum.
    pub prop2: Option<bool>,
    /// Herding equilibria where rational players beat the social optimum.
    pub rational_beats_social: Vec<f64>,
    /// Pairs `(z, z1)` of a herding equilibrium and a classical one where
    /// herders at `z` beat players at `z1`.
    pub irrational_beats_some_classical: Vec<(f64, f64)>,
    /// Some herding equilibrium gives both player types more than every
    /// classical equilibrium.
    pub rational_to_be_irrational: bool,
    pub note: Option<String>,
}

/// Evaluates every welfare comparison at the equilibria in `set`.
pub fn compare(
    game: &TwoActionGame,
    alpha: Alpha,
    set: &EquilibriumSet,
    solver: &TwoActionSolver,
    grid_n: usize,
) -> Result<WelfareReport, TwoActionError> {
    let tol = &solver.tol;
    let a = alpha.value();
    let classical_set = solver.classical_ne_set(game)?;
    let classical: Vec<ClassicalRow> = classical_set
        .points
        .iter()
        .map(|p| ClassicalRow {
            z: p.z,
            utility: utility_classical(game, p.z),
        })
        .collect();

    let mut rows = Vec::with_capacity(set.points.len());
    for p in &set.points {
        let herding = a <= 0.5 && ((p.z - a).abs() <= tol.dup || (p.z - (1.0 - a)).abs() <= tol.dup);
        rows.push(WelfareRow {
            z: p.z,
            y_star: p.y,
            u_rational: utility_rational(game, alpha, p.z, tol)?,
            u_irrational: utility_irrational(game, p.z, tol)?,
            herding,
        });
    }

    let mut u_social = social_optimum(game, grid_n);
    if !u_social.closed_form {
        for z in set.zs().into_iter().chain(classical.iter().map(|c| c.z)) {
            let w = game.welfare(z);
            if w > u_social.value {
                u_social = SocialOptimum {
                    value: w,
                    at: Some(z),
                    attained: true,
                    closed_form: false,
                };
            }
        }
    }
    let u_social_alpha = social_optimum_alpha(game, alpha, grid_n, tol);
    let us = u_social.value;

    let prop1_holds = rows
        .iter()
        .all(|r| r.u_irrational <= r.u_rational + WELFARE_TOL && r.u_irrational <= us + WELFARE_TOL);

    let subset = set.points.iter().all(|p| classical_set.contains(p.z, tol.dup));
    let prop2 = subset.then(|| {
        rows.iter().all(|r| {
            (r.u_rational - r.u_irrational).abs() <= WELFARE_TOL
                && (r.u_irrational - utility_classical(game, r.z)).abs() <= WELFARE_TOL
                && us >= r.u_rational - WELFARE_TOL
        })
    });

    let herding: Vec<&WelfareRow> = rows.iter().filter(|r| r.herding).collect();
    let rational_beats_social = herding
        .iter()
        .filter(|r| r.u_rational > us + WELFARE_TOL)
        .map(|r| r.z)
        .collect();
    let irrational_beats_some_classical = herding
        .iter()
        .flat_map(|r| {
            classical
                .iter()
                .filter(|c| r.u_irrational > c.utility + WELFARE_TOL)
                .map(|c| (r.z, c.z))
        })
        .collect();
    let rational_to_be_irrational = !classical.is_empty()
        && herding.iter().any(|r| {
            classical.iter().all(|c| {
                r.u_irrational > c.utility + WELFARE_TOL && r.u_rational > c.utility + WELFARE_TOL
            })
        });

    let note = set
        .is_empty()
        .then(|| format!("no equilibria for alpha = {a}; comparisons are vacuous"));

    Ok(WelfareReport {
        game: set.game.clone(),
        alpha: a,
        rows,
        classical,
        u_social,
        u_social_alpha,
        prop1_holds,
        prop2,
        rational_beats_social,
        irrational_beats_some_classical,
        rational_to_be_irrational,
        note,
    })
}
