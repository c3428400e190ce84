//! Seeded random two-action games with piecewise-linear utilities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::TwoActionGame;

/// Smallest gap between neighbouring breakpoints.
const MIN_SPACING: f64 = 0.02;

/// A continuous piecewise-linear function on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    /// Knots must start at 0, end at 1 and be strictly increasing.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Option<Self> {
        let ok = xs.len() >= 2
            && xs.len() == ys.len()
            && xs[0] == 0.0
            && xs[xs.len() - 1] == 1.0
            && xs.windows(2).all(|w| w[0] < w[1])
            && ys.iter().all(|y| y.is_finite());
        ok.then_some(PiecewiseLinear { xs, ys })
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let k = self.xs.partition_point(|&v| v <= x).clamp(1, self.xs.len() - 1);
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        let (y0, y1) = (self.ys[k - 1], self.ys[k]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn max_slope(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
            .fold(0.0, f64::max)
    }

    /// Sum with another piecewise-linear function, on the union of knots.
    fn combine(&self, other: &Self, sign: f64) -> Self {
        let mut xs: Vec<f64> = self.xs.iter().chain(&other.xs).copied().collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let ys = xs.iter().map(|&x| self.eval(x) + sign * other.eval(x)).collect();
        PiecewiseLinear { xs, ys }
    }

    fn random<R: Rng>(rng: &mut R) -> Self {
        let interior = rng.random_range(3..=8usize);
        let xs = loop {
            let mut xs: Vec<f64> = (0..interior).map(|_| rng.random_range(0.0..1.0)).collect();
            xs.push(0.0);
            xs.push(1.0);
            xs.sort_by(f64::total_cmp);
            if xs.windows(2).all(|w| w[1] - w[0] >= MIN_SPACING) {
                break xs;
            }
        };
        let ys = xs.iter().map(|_| rng.random_range(-1.0..=1.0)).collect();
        PiecewiseLinear { xs, ys }
    }
}

/// A game with piecewise-linear `u1` and `u2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RandomGame {
    pub index: usize,
    pub u1: PiecewiseLinear,
    pub u2: PiecewiseLinear,
}

impl RandomGame {
    pub fn game(&self) -> TwoActionGame {
        let (a, b) = (self.u1.clone(), self.u2.clone());
        TwoActionGame::new(format!("random-{}", self.index), move |z| a.eval(z), move |z| b.eval(z))
    }

    /// The utility gap as a piecewise-linear function.
    pub fn h(&self) -> PiecewiseLinear {
        self.u1.combine(&self.u2, -1.0)
    }

    /// Lipschitz constant of the utility gap.
    pub fn h_lipschitz(&self) -> f64 {
        self.h().max_slope()
    }
}

/// `count` games drawn from a ChaCha8 stream seeded with `seed`.
pub fn random_games(seed: u64, count: usize) -> Vec<RandomGame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|index| RandomGame {
            index,
            u1: PiecewiseLinear::random(&mut rng),
            u2: PiecewiseLinear::random(&mut rng),
        })
        .collect()
}
