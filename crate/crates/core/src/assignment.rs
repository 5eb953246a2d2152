//! Exact p-Wasserstein distance between equal-size clouds via the assignment
//! problem.
//!
//! For empirical measures with uniform weights, optimal transport reduces to
//! a minimum-cost perfect matching. This module solves it exactly with a
//! shortest-augmenting-path (Jonker-Volgenant style) solver in O(N^3), and is
//! the ground-truth oracle the sliced estimators are validated against.

use ndarray::ArrayView1;

use crate::dataset::PointCloud;
use crate::error::{Error, Result};

/// Largest N accepted by default; the solver is cubic and anything bigger is
/// better served by an approximate method.
pub const DEFAULT_ASSIGNMENT_CAP: usize = 2048;

/// An optimal matching: `permutation[i]` is the index of the target point
/// paired with source point `i`, and `cost` is `(1/N sum ||x_i -
/// y_perm(i)||^p)^(1/p)` at that matching.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentResult {
    pub permutation: Vec<usize>,
    pub cost: f64,
}

/// Exact W_p between two equal-size clouds, with the default size cap.
pub fn exact_wp(x: &PointCloud, y: &PointCloud, p: f64) -> Result<AssignmentResult> {
    exact_wp_capped(x, y, p, DEFAULT_ASSIGNMENT_CAP)
}

/// As [`exact_wp`] with an explicit size cap.
pub fn exact_wp_capped(
    x: &PointCloud,
    y: &PointCloud,
    p: f64,
    cap: usize,
) -> Result<AssignmentResult> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::SizeMismatch(n, y.len()));
    }
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("p must be in [1, inf), got {p}")));
    }

    // Row-major cost matrix of ||x_i - y_j||^p.
    let mut cost = vec![0.0f64; n * n];
    for i in 0..n {
        let xi = x.points().row(i);
        for j in 0..n {
            cost[i * n + j] = dist_pth_power(xi, y.points().row(j), p);
        }
    }

    let permutation = solve_square_assignment(n, &cost)?;
    let total: f64 = permutation
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i * n + j])
        .sum();
    Ok(AssignmentResult {
        permutation,
        cost: (total / n as f64).powf(1.0 / p),
    })
}

fn dist_pth_power(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>, p: f64) -> f64 {
    let mut sq = 0.0;
    for (ai, bi) in a.iter().zip(b.iter()) {
        let d = ai - bi;
        sq += d * d;
    }
    if p == 2.0 {
        sq
    } else {
        sq.sqrt().powf(p)
    }
}

/// Minimum-cost perfect matching on a square cost matrix (row-major), by
/// successive shortest augmenting paths with dual potentials.
fn solve_square_assignment(n: usize, cost: &[f64]) -> Result<Vec<usize>> {
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("assignment costs"));
    }

    let mut u = vec![0.0f64; n]; // row potentials
    let mut v = vec![0.0f64; n]; // column potentials
    let mut shortest = vec![0.0f64; n];
    let mut path = vec![usize::MAX; n]; // predecessor row per column
    let mut col4row = vec![usize::MAX; n];
    let mut row4col = vec![usize::MAX; n];
    let mut in_rows = vec![false; n];
    let mut in_cols = vec![false; n];
    let mut remaining = vec![0usize; n];

    for cur_row in 0..n {
        // Dijkstra from cur_row over the reduced costs until a free column.
        let mut min_val = 0.0f64;
        let mut num_remaining = n;
        for (k, slot) in remaining.iter_mut().enumerate() {
            *slot = n - k - 1;
        }
        in_rows.iter_mut().for_each(|b| *b = false);
        in_cols.iter_mut().for_each(|b| *b = false);
        shortest.iter_mut().for_each(|c| *c = f64::INFINITY);

        let mut i = cur_row;
        let sink = loop {
            in_rows[i] = true;
            let mut lowest = f64::INFINITY;
            let mut index = usize::MAX;
            for k in 0..num_remaining {
                let j = remaining[k];
                let r = min_val + cost[i * n + j] - u[i] - v[j];
                if r < shortest[j] {
                    path[j] = i;
                    shortest[j] = r;
                }
                if shortest[j] < lowest
                    || (shortest[j] == lowest && row4col[j] == usize::MAX)
                {
                    lowest = shortest[j];
                    index = k;
                }
            }
            min_val = lowest;
            if !min_val.is_finite() {
                return Err(Error::NonFinite("assignment reduced costs"));
            }
            let j = remaining[index];
            in_cols[j] = true;
            num_remaining -= 1;
            remaining[index] = remaining[num_remaining];
            if row4col[j] == usize::MAX {
                break j;
            }
            i = row4col[j];
        };

        // Update potentials so visited reduced costs stay tight.
        u[cur_row] += min_val;
        for r in 0..n {
            if in_rows[r] && r != cur_row {
                u[r] += min_val - shortest[col4row[r]];
            }
        }
        for c in 0..n {
            if in_cols[c] {
                v[c] -= min_val - shortest[c];
            }
        }

        // Augment: flip matched edges along the alternating path.
        let mut j = sink;
        loop {
            let i = path[j];
            row4col[j] = i;
            std::mem::swap(&mut col4row[i], &mut j);
            if i == cur_row {
                break;
            }
        }
    }

    Ok(col4row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{sample, DatasetKind, DatasetSpec};
    use crate::one_d::wasserstein_1d;
    use crate::rng::seed_rng;
    use ndarray::Array2;
    use rand::Rng;

    fn random_cloud(n: usize, d: usize, rng: &mut impl Rng) -> PointCloud {
        let mut pts = Array2::zeros((n, d));
        for i in 0..n {
            for j in 0..d {
                pts[[i, j]] = rng.gen_range(-3.0..3.0);
            }
        }
        PointCloud::new(pts).unwrap()
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 1 {
            return vec![vec![0]];
        }
        let mut out = Vec::new();
        for tail in permutations(n - 1) {
            for pos in 0..n {
                let mut perm = tail.clone();
                perm.insert(pos, n - 1);
                out.push(perm);
            }
        }
        out
    }

    fn brute_force_cost(x: &PointCloud, y: &PointCloud, p: f64) -> f64 {
        let n = x.len();
        let best = permutations(n)
            .into_iter()
            .map(|perm| {
                perm.iter()
                    .enumerate()
                    .map(|(i, &j)| {
                        let d: f64 = x
                            .points()
                            .row(i)
                            .iter()
                            .zip(y.points().row(j).iter())
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum();
                        d.sqrt().powf(p)
                    })
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        (best / n as f64).powf(1.0 / p)
    }

    fn is_bijection(perm: &[usize]) -> bool {
        let mut seen = vec![false; perm.len()];
        perm.iter().all(|&j| {
            j < seen.len() && !std::mem::replace(&mut seen[j], true)
        })
    }

    #[test]
    fn single_pair() {
        let x = PointCloud::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let y = PointCloud::from_rows(&[vec![3.0, 4.0]]).unwrap();
        let r = exact_wp(&x, &y, 2.0).unwrap();
        assert!((r.cost - 5.0).abs() <= 1e-12);
        assert_eq!(r.permutation, vec![0]);
    }

    #[test]
    fn same_multiset_reordered_costs_zero() {
        let x = PointCloud::from_rows(&[vec![1.0, 2.0], vec![-1.0, 0.5], vec![3.0, 3.0]]).unwrap();
        let y = PointCloud::from_rows(&[vec![3.0, 3.0], vec![1.0, 2.0], vec![-1.0, 0.5]]).unwrap();
        let r = exact_wp(&x, &y, 2.0).unwrap();
        assert_eq!(r.cost, 0.0);
        assert!(is_bijection(&r.permutation));
    }

    #[test]
    fn two_point_example() {
        let x = PointCloud::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let y = PointCloud::from_rows(&[vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let r = exact_wp(&x, &y, 2.0).unwrap();
        assert!((r.cost - 1.0).abs() <= 1e-12);
        assert!(is_bijection(&r.permutation));
    }

    #[test]
    fn agrees_with_brute_force_small_n() {
        let mut rng = seed_rng(83);
        for trial in 0..60 {
            let n = rng.gen_range(1..=7);
            let d = rng.gen_range(1..=3);
            let p = [1.0, 2.0, 3.0][trial % 3];
            let x = random_cloud(n, d, &mut rng);
            let y = random_cloud(n, d, &mut rng);
            let fast = exact_wp(&x, &y, p).unwrap();
            let brute = brute_force_cost(&x, &y, p);
            assert!(
                (fast.cost - brute).abs() <= 1e-12 * brute.max(1.0),
                "n={n} d={d} p={p}: {} vs {brute}",
                fast.cost
            );
            assert!(is_bijection(&fast.permutation));
        }
    }

    #[test]
    fn returned_permutation_attains_returned_cost() {
        let mut rng = seed_rng(84);
        let x = random_cloud(32, 2, &mut rng);
        let y = random_cloud(32, 2, &mut rng);
        let r = exact_wp(&x, &y, 2.0).unwrap();
        let total: f64 = r
            .permutation
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                x.points()
                    .row(i)
                    .iter()
                    .zip(y.points().row(j).iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            })
            .sum();
        let recomputed = (total / 32.0).sqrt();
        assert!((r.cost - recomputed).abs() <= 1e-12 * recomputed.max(1.0));
    }

    #[test]
    fn metric_axioms_on_random_clouds() {
        let mut rng = seed_rng(85);
        for _ in 0..15 {
            let n = rng.gen_range(2..=32);
            let a = random_cloud(n, 2, &mut rng);
            let b = random_cloud(n, 2, &mut rng);
            let c = random_cloud(n, 2, &mut rng);
            for p in [1.0, 2.0] {
                let ab = exact_wp(&a, &b, p).unwrap().cost;
                let ba = exact_wp(&b, &a, p).unwrap().cost;
                let ac = exact_wp(&a, &c, p).unwrap().cost;
                let cb = exact_wp(&c, &b, p).unwrap().cost;
                assert!(ab >= 0.0);
                assert!((ab - ba).abs() <= 1e-12 * ab.max(1.0));
                assert!(ab <= ac + cb + 1e-9);
            }
            assert_eq!(exact_wp(&a, &a, 2.0).unwrap().cost, 0.0);
        }
    }

    #[test]
    fn one_dimensional_matches_sorted_formula() {
        let mut rng = seed_rng(86);
        for _ in 0..20 {
            let n = rng.gen_range(1..=40);
            let x = random_cloud(n, 1, &mut rng);
            let y = random_cloud(n, 1, &mut rng);
            let xs: Vec<f64> = x.points().column(0).to_vec();
            let ys: Vec<f64> = y.points().column(0).to_vec();
            for p in [1.0, 2.0, 3.0] {
                let oracle = exact_wp(&x, &y, p).unwrap().cost;
                let sorted = wasserstein_1d(&xs, &ys, p).unwrap();
                assert!(
                    (oracle - sorted).abs() <= 1e-10 * sorted.max(1.0),
                    "n={n} p={p}: {oracle} vs {sorted}"
                );
            }
        }
    }

    #[test]
    fn moderate_size_runs_and_beats_identity_matching() {
        let spec_x = DatasetSpec::new(DatasetKind::gaussians8(), 128, 1);
        let spec_y = DatasetSpec::new(DatasetKind::circle(), 128, 2);
        let x = sample(&spec_x).unwrap();
        let y = sample(&spec_y).unwrap();
        let r = exact_wp(&x, &y, 2.0).unwrap();
        let identity: f64 = (0..128)
            .map(|i| {
                x.points()
                    .row(i)
                    .iter()
                    .zip(y.points().row(i).iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            })
            .sum();
        let identity_cost = (identity / 128.0).sqrt();
        assert!(r.cost <= identity_cost + 1e-12);
        assert!(r.cost > 0.0);
    }

    #[test]
    fn invalid_inputs_rejected() {
        let x = PointCloud::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let y2 = PointCloud::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!(exact_wp(&x, &y2, 2.0).is_err());

        let y3 = PointCloud::from_rows(&[vec![0.0, 0.0, 0.0]]).unwrap();
        assert!(exact_wp(&x, &y3, 2.0).is_err());

        let y = PointCloud::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert!(exact_wp(&x, &y, 0.5).is_err());
        assert!(matches!(
            exact_wp_capped(&y2, &y2, 2.0, 1),
            Err(Error::CapExceeded { n: 2, cap: 1 })
        ));
    }
}
