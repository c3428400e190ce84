//! Utilities tabulated on a simplex grid.
//!
//! Values are given at every grid point of resolution `G` (see
//! [`crate::simplex`]) and interpolated linearly on the Freudenthal
//! triangulation of the grid. In cumulative coordinates
//! `c_k = G * (mu_0 + ... + mu_k)` the grid is the integer lattice inside
//! `0 <= c_0 <= ... <= c_{n-2} <= G`, and the Kuhn simplex containing a point
//! is found by sorting the fractional parts of `c`.

use std::collections::HashMap;

use thiserror::Error;

use crate::game::{Distribution, Utility, UtilityKind};
use crate::simplex::{grid_size, SimplexGrid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TabularError {
    #[error("a game needs at least two actions, got {0}")]
    TooFewActions(usize),
    #[error("grid resolution must be positive")]
    ZeroResolution,
    #[error("action {action} has {found} values, the grid has {expected} points")]
    WrongLength {
        action: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value at action {action}, grid point {index}")]
    NonFinite { action: usize, index: usize },
}

#[derive(Clone, Debug)]
pub struct TabularUtility {
    actions: usize,
    resolution: u32,
    /// `values[a][i]` is the utility of action `a` at grid point `i`.
    values: Vec<Vec<f64>>,
    index: HashMap<Vec<u32>, usize>,
}

impl TabularUtility {
    /// `values[a]` lists action `a`'s utility at each grid point in
    /// enumeration order.
    pub fn new(resolution: u32, values: Vec<Vec<f64>>) -> Result<Self, TabularError> {
        let actions = values.len();
        if actions < 2 {
            return Err(TabularError::TooFewActions(actions));
        }
        if resolution == 0 {
            return Err(TabularError::ZeroResolution);
        }
        let expected = grid_size(actions, resolution) as usize;
        for (action, row) in values.iter().enumerate() {
            if row.len() != expected {
                return Err(TabularError::WrongLength {
                    action,
                    expected,
                    found: row.len(),
                });
            }
            if let Some(index) = row.iter().position(|v| !v.is_finite()) {
                return Err(TabularError::NonFinite { action, index });
            }
        }
        let index = SimplexGrid::new(actions, resolution)
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        Ok(TabularUtility {
            actions,
            resolution,
            values,
            index,
        })
    }

    /// Tabulates `f` on the grid.
    pub fn sample<U: Utility + ?Sized>(u: &U, resolution: u32) -> Result<Self, TabularError> {
        let n = u.action_count();
        let mut values = vec![Vec::new(); n];
        for p in SimplexGrid::new(n, resolution) {
            let mu = Distribution::from_raw(crate::simplex::to_weights(&p, resolution));
            for (a, row) in values.iter_mut().enumerate() {
                row.push(u.eval(a, &mu));
            }
        }
        Self::new(resolution, values)
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    fn value_at(&self, action: usize, cumulative: &[i64]) -> f64 {
        let g = self.resolution as i64;
        let mut point = Vec::with_capacity(self.actions);
        let mut prev = 0;
        for &c in cumulative {
            point.push((c - prev) as u32);
            prev = c;
        }
        point.push((g - prev) as u32);
        self.values[action][self.index[&point]]
    }
}

impl Utility for TabularUtility {
    fn action_count(&self) -> usize {
        self.actions
    }

    fn eval(&self, action: usize, mu: &Distribution) -> f64 {
        let g = self.resolution as f64;
        let d = self.actions - 1;
        let mut running = 0.0;
        let mut base = Vec::with_capacity(d);
        let mut frac = Vec::with_capacity(d);
        for k in 0..d {
            running += mu.weight(k);
            let c = (running * g).clamp(0.0, g);
            let b = c.floor();
            base.push(b as i64);
            frac.push(c - b);
        }
        // Enforce monotone cumulative bases; rounding can break it by one ulp.
        for k in 1..d {
            if base[k] < base[k - 1] {
                base[k] = base[k - 1];
                frac[k] = 0.0;
            }
        }

        // Descending fractional parts; ties broken toward the larger index so
        // that zero-weight vertices are the only ones that can leave the grid.
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| frac[j].total_cmp(&frac[i]).then(j.cmp(&i)));

        let mut vertex = base.clone();
        let first = frac.get(order[0]).copied().unwrap_or(0.0);
        let mut total = 0.0;
        let w0 = 1.0 - first;
        if w0 > 0.0 {
            total += w0 * self.value_at(action, &vertex);
        }
        for (pos, &k) in order.iter().enumerate() {
            vertex[k] += 1;
            let next = order.get(pos + 1).map_or(0.0, |&j| frac[j]);
            let w = frac[k] - next;
            if w > 0.0 {
                total += w * self.value_at(action, &vertex);
            }
        }
        total
    }

    fn kind(&self) -> UtilityKind {
        UtilityKind::Tabular
    }
}
