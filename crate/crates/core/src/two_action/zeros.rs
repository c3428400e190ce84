//! Locating the zero set of the utility gap.

use serde::Serialize;

use super::{TwoActionError, TwoActionGame};
use crate::tolerance::Tolerances;

/// Width below which a sign-change bracket is considered resolved.
const BRACKET_WIDTH: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, z: f64, slack: f64) -> bool {
        z >= self.lo - slack && z <= self.hi + slack
    }
}

/// Zeros of `h` on `[0, 1]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct HZeroSet {
    /// Isolated zeros, strictly increasing.
    pub points: Vec<f64>,
    /// Grid intervals on which `|h|` stays within tolerance.
    pub plateaus: Vec<Interval>,
    /// Grid cells where `h` changes sign without passing through zero.
    pub discontinuities: Vec<Interval>,
}

impl HZeroSet {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.plateaus.is_empty()
    }
}

/// Bisects a bracket with `h(lo)` and `h(hi)` of opposite signs. Returns the
/// best point found.
fn bisect(game: &TwoActionGame, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let lo_positive = game.h(lo) > 0.0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = game.h(mid);
        if v == 0.0 {
            return mid;
        }
        if (v > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= BRACKET_WIDTH && v.abs() <= tol {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    [mid, lo, hi]
        .into_iter()
        .min_by(|a, b| game.h(*a).abs().total_cmp(&game.h(*b).abs()))
        .expect("non-empty")
}

pub(super) fn find_h_zeros(
    game: &TwoActionGame,
    grid_n: usize,
    tol: &Tolerances,
) -> Result<HZeroSet, TwoActionError> {
    if let Some(zeros) = game.analytic_zeros() {
        let mut points = Vec::with_capacity(zeros.len());
        for &z in zeros {
            if !(0.0..=1.0).contains(&z) {
                return Err(TwoActionError::Domain(z));
            }
            let h = game.h(z);
            if h.abs() > tol.h {
                return Err(TwoActionError::InvalidZero { z, h });
            }
            points.push(z);
        }
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() <= tol.dup);
        return Ok(HZeroSet {
            points,
            ..HZeroSet::default()
        });
    }

    if grid_n < 64 {
        return Err(TwoActionError::GridTooSmall(grid_n));
    }
    let step = 1.0 / grid_n as f64;
    let zs: Vec<f64> = (0..=grid_n).map(|i| i as f64 * step).collect();
    let hs: Vec<f64> = zs.iter().map(|&z| game.h(z)).collect();
    let small: Vec<bool> = hs.iter().map(|v| v.abs() <= tol.h).collect();

    let mut out = HZeroSet::default();
    let mut plateau_cells = 0;

    // Runs of near-zero grid values: one point is a zero, more is a plateau.
    let mut i = 0;
    while i <= grid_n {
        if !small[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < grid_n && small[i + 1] {
            i += 1;
        }
        if i == start {
            out.points.push(zs[i]);
        } else {
            plateau_cells += i - start;
            out.plateaus.push(Interval {
                lo: zs[start],
                hi: zs[i],
            });
        }
        i += 1;
    }
    if plateau_cells > grid_n / 2 {
        return Err(TwoActionError::PlateauOverflow {
            cells: plateau_cells,
            grid_n,
        });
    }

    for k in 0..grid_n {
        if small[k] || small[k + 1] {
            continue;
        }
        if (hs[k] > 0.0) == (hs[k + 1] > 0.0) {
            continue;
        }
        let z = bisect(game, zs[k], zs[k + 1], tol.h);
        if game.h(z).abs() <= tol.h {
            out.points.push(z);
        } else {
            out.discontinuities.push(Interval {
                lo: zs[k],
                hi: zs[k + 1],
            });
        }
    }

    out.points.sort_by(f64::total_cmp);
    out.points.dedup_by(|a, b| (*a - *b).abs() <= tol.dup);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn routing_root() {
        let g = TwoActionGame::new("routing", |z| -2.0 * z, |_| -1.0);
        let zs = find_h_zeros(&g, 1000, &tol()).unwrap();
        assert_eq!(zs.points.len(), 1);
        assert!((zs.points[0] - 0.5).abs() < 1e-12);

        // Off-grid root, found by bisection.
        let g = TwoActionGame::new("routing", |z| -3.0 * z, |_| -1.0);
        let zs = find_h_zeros(&g, 1024, &tol()).unwrap();
        assert!((zs.points[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!(g.h(zs.points[0]).abs() <= 1e-10);
    }

    #[test]
    fn bandwidth_root_at_endpoint() {
        let g = TwoActionGame::new("bandwidth", |z| 1.0 - z, |z| 0.5 * (1.0 - z));
        let zs = find_h_zeros(&g, 256, &tol()).unwrap();
        assert_eq!(zs.points, vec![1.0]);
        assert!(zs.plateaus.is_empty() && zs.discontinuities.is_empty());
    }

    #[test]
    fn participation_discontinuity_is_reported_not_a_zero() {
        let (c, p) = (0.5, 0.6);
        let g = TwoActionGame::new("p", move |z| c + if z > 0.0 { p / z } else { 0.0 }, |_| 1.0);
        let zs = find_h_zeros(&g, 512, &tol()).unwrap();
        assert!(zs.points.is_empty());
        assert_eq!(zs.discontinuities.len(), 1);
        assert_eq!(zs.discontinuities[0].lo, 0.0);
    }

    #[test]
    fn plateau_detection_and_overflow() {
        // h = 0 on [0.25, 0.5], linear elsewhere.
        let g = TwoActionGame::new(
            "plateau",
            |z: f64| {
                if z < 0.25 {
                    0.25 - z
                } else if z <= 0.5 {
                    0.0
                } else {
                    0.5 - z
                }
            },
            |_| 0.0,
        );
        let zs = find_h_zeros(&g, 64, &tol()).unwrap();
        assert!(zs.points.is_empty());
        assert_eq!(zs.plateaus, vec![Interval { lo: 0.25, hi: 0.5 }]);

        let flat = TwoActionGame::new("flat", |_| 1.0, |_| 1.0);
        assert!(matches!(
            find_h_zeros(&flat, 64, &tol()),
            Err(TwoActionError::PlateauOverflow { cells: 64, .. })
        ));
    }

    #[test]
    fn analytic_zeros_are_validated() {
        let g = TwoActionGame::new("r", |z| -2.0 * z, |_| -1.0).with_analytic_zeros(vec![0.5]);
        assert_eq!(find_h_zeros(&g, 64, &tol()).unwrap().points, vec![0.5]);
        let bad = g.clone().with_analytic_zeros(vec![0.6]);
        assert!(matches!(
            find_h_zeros(&bad, 64, &tol()),
            Err(TwoActionError::InvalidZero { .. })
        ));
        assert!(matches!(
            find_h_zeros(&g.without_analytic_zeros(), 10, &tol()),
            Err(TwoActionError::GridTooSmall(10))
        ));
    }

    #[test]
    fn several_roots() {
        let g = TwoActionGame::new("cubic", |z| (z - 0.2) * (z - 0.5) * (z - 0.8), |_| 0.0);
        let zs = find_h_zeros(&g, 1000, &tol()).unwrap();
        assert_eq!(zs.points.len(), 3);
        for (got, want) in zs.points.iter().zip([0.2, 0.5, 0.8]) {
            assert!((got - want).abs() < 1e-9);
        }
    }
}
