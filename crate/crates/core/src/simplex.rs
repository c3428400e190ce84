//! Uniform grids on the probability simplex.
//!
//! A grid of resolution `G` over `n` actions holds every composition
//! `(x_0, ..., x_{n-1})` of `G` into non-negative integer parts; the grid
//! point is `x / G`. Points are enumerated lexicographically in
//! `(x_0, ..., x_{n-2})`, which for two actions is `z = 0, 1/G, ..., 1`.

/// Number of grid points, `C(G + n - 1, n - 1)`, saturating on overflow.
pub fn grid_size(actions: usize, resolution: u32) -> u64 {
    let k = actions.saturating_sub(1) as u64;
    let top = resolution as u64 + k;
    let mut acc: u64 = 1;
    for i in 0..k {
        // acc * (top - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul(top - i) {
            Some(v) => v / (i + 1),
            None => return u64::MAX,
        };
    }
    acc
}

/// Lexicographic iterator over compositions of `resolution` into `actions`
/// parts.
#[derive(Clone, Debug)]
pub struct SimplexGrid {
    resolution: u32,
    current: Option<Vec<u32>>,
}

impl SimplexGrid {
    pub fn new(actions: usize, resolution: u32) -> Self {
        let mut first = vec![0; actions];
        if let Some(last) = first.last_mut() {
            *last = resolution;
        }
        SimplexGrid {
            resolution,
            current: if actions == 0 { None } else { Some(first) },
        }
    }
}

impl Iterator for SimplexGrid {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.clone()?;
        let n = out.len();
        // Advance: find the rightmost free coordinate that can grow, i.e.
        // the last one among 0..n-1 whose suffix still holds spare mass.
        let mut next = out.clone();
        let mut advanced = false;
        for i in (0..n.saturating_sub(1)).rev() {
            let used: u32 = next[..=i].iter().sum();
            if used < self.resolution {
                next[i] += 1;
                for x in next.iter_mut().take(n - 1).skip(i + 1) {
                    *x = 0;
                }
                let used: u32 = next[..n - 1].iter().sum();
                next[n - 1] = self.resolution - used;
                advanced = true;
                break;
            }
        }
        self.current = if advanced { Some(next) } else { None };
        Some(out)
    }
}

/// Grid neighbours of `point`: one unit of mass moved between two coordinates.
pub fn neighbours(point: &[u32]) -> impl Iterator<Item = Vec<u32>> + '_ {
    let n = point.len();
    (0..n).flat_map(move |from| {
        (0..n).filter_map(move |to| {
            if from == to || point[from] == 0 {
                return None;
            }
            let mut p = point.to_vec();
            p[from] -= 1;
            p[to] += 1;
            Some(p)
        })
    })
}

/// Grid point as weights.
pub fn to_weights(point: &[u32], resolution: u32) -> Vec<f64> {
    let g = resolution as f64;
    point.iter().map(|&x| x as f64 / g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_every_composition_once() {
        for n in 2..=4 {
            for g in [1, 2, 5, 7] {
                let pts: Vec<_> = SimplexGrid::new(n, g).collect();
                assert_eq!(pts.len() as u64, grid_size(n, g), "n={n} g={g}");
                for p in &pts {
                    assert_eq!(p.iter().sum::<u32>(), g);
                }
                let mut sorted = pts.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), pts.len());
                // Lexicographic in the free coordinates.
                for w in pts.windows(2) {
                    assert!(w[0][..n - 1] < w[1][..n - 1]);
                }
            }
        }
    }

    #[test]
    fn two_action_order_is_ascending_z() {
        let pts: Vec<_> = SimplexGrid::new(2, 4).collect();
        assert_eq!(pts, vec![vec![0, 4], vec![1, 3], vec![2, 2], vec![3, 1], vec![4, 0]]);
    }

    #[test]
    fn sizes() {
        assert_eq!(grid_size(2, 400), 401);
        assert_eq!(grid_size(3, 100), 5151);
        assert_eq!(grid_size(200, u32::MAX), u64::MAX);
    }

    #[test]
    fn neighbour_moves() {
        let nb: Vec<_> = neighbours(&[0, 2]).collect();
        assert_eq!(nb, vec![vec![1, 1]]);
        assert_eq!(neighbours(&[1, 1, 1]).count(), 6);
    }
}
