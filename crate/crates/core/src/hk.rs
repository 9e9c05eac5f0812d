//! Held–Karp lower bound by subgradient ascent over 1-trees.
//!
//! Node 0 is the special node. For potentials `pi`, the 1-tree is a minimum
//! spanning tree on nodes `1..n` under `d(i,j) + pi_i + pi_j` plus the two
//! cheapest re-weighted edges at node 0; its weight minus `2 * sum(pi)` is a
//! valid lower bound on every tour. The ascent moves `pi` along
//! `degree - 2` with step `lambda * (ub - L) / |g|^2`, halving `lambda`
//! after `iterations / 50` consecutive steps without improvement.

use crate::error::{Error, Result};
use crate::instances::Instance;
use crate::oracles::depth_first_shortcut;
use crate::tree::{minimum_spanning_tree, root_tree};

pub const DEFAULT_ITERATIONS: usize = 1000;

/// Instances up to this size get a cached distance matrix.
const MATRIX_LIMIT: usize = 4000;

#[derive(Clone, Debug, PartialEq)]
pub struct OneTree {
    pub special: usize,
    /// Spanning-tree edges over the other nodes.
    pub mst_edges: Vec<(usize, usize)>,
    /// The two edges at the special node.
    pub special_edges: [(usize, usize); 2],
    /// Re-weighted total, before subtracting `2 * sum(pi)`.
    pub total: f64,
    pub degree: Vec<usize>,
}

enum Distances<'a> {
    Matrix(Vec<f64>, usize),
    Lazy(&'a Instance),
}

impl Distances<'_> {
    fn new(inst: &Instance) -> Distances<'_> {
        let n = inst.len();
        if n <= MATRIX_LIMIT {
            let mut m = vec![0.0; n * n];
            for a in 0..n {
                for b in 0..n {
                    m[a * n + b] = inst.dist(a, b);
                }
            }
            Distances::Matrix(m, n)
        } else {
            Distances::Lazy(inst)
        }
    }

    #[inline]
    fn get(&self, a: usize, b: usize) -> f64 {
        match self {
            Distances::Matrix(m, n) => m[a * n + b],
            Distances::Lazy(inst) => inst.dist(a, b),
        }
    }
}

fn one_tree(dist: &Distances<'_>, n: usize, pi: &[f64]) -> OneTree {
    let mut degree = vec![0usize; n];
    let mut mst_edges = Vec::with_capacity(n.saturating_sub(2));
    let mut total = 0.0;

    // Prim over nodes 1..n.
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut from = vec![usize::MAX; n];
    in_tree[0] = true;
    let mut u = 1;
    in_tree[1] = true;
    for _ in 2..n {
        let mut next = usize::MAX;
        let mut next_w = f64::INFINITY;
        for v in 2..n {
            if in_tree[v] {
                continue;
            }
            let w = dist.get(u, v) + pi[u] + pi[v];
            if w < best[v] {
                best[v] = w;
                from[v] = u;
            }
            if best[v] < next_w {
                next_w = best[v];
                next = v;
            }
        }
        in_tree[next] = true;
        total += next_w;
        degree[next] += 1;
        degree[from[next]] += 1;
        mst_edges.push((from[next], next));
        u = next;
    }

    let mut first = (f64::INFINITY, usize::MAX);
    let mut second = (f64::INFINITY, usize::MAX);
    for v in 1..n {
        let w = dist.get(0, v) + pi[0] + pi[v];
        if w < first.0 {
            second = first;
            first = (w, v);
        } else if w < second.0 {
            second = (w, v);
        }
    }
    total += first.0 + second.0;
    degree[0] = 2;
    degree[first.1] += 1;
    degree[second.1] += 1;
    OneTree {
        special: 0,
        mst_edges,
        special_edges: [(0, first.1), (0, second.1)],
        total,
        degree,
    }
}

/// The 1-tree for potentials `pi`.
pub fn compute_one_tree(inst: &Instance, pi: &[f64]) -> Result<OneTree> {
    let n = inst.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!("1-trees need n >= 3, got {n}")));
    }
    if pi.len() != n {
        return Err(Error::InvalidInput("one potential per node required".into()));
    }
    Ok(one_tree(&Distances::new(inst), n, pi))
}

/// Lower bound with the depth-first double-tree tour as the target value.
pub fn held_karp_lower_bound(inst: &Instance, iterations: usize) -> Result<f64> {
    if inst.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "Held-Karp bound needs n >= 3, got {}",
            inst.len()
        )));
    }
    let tree = root_tree(&minimum_spanning_tree(inst), inst.len())?;
    let ub = depth_first_shortcut(inst, &tree).weight;
    held_karp_with_upper_bound(inst, iterations, ub)
}

/// Lower bound from an ascent aimed at `upper_bound`: the best 1-tree value seen.
pub fn held_karp_with_upper_bound(inst: &Instance, iterations: usize, upper_bound: f64) -> Result<f64> {
    held_karp_trace(inst, iterations, upper_bound).map(|t| t.last().copied().unwrap_or(f64::NEG_INFINITY))
}

/// Best-so-far bound after every ascent step. Stops early once the 1-tree
/// is a tour or reaches `upper_bound`.
pub fn held_karp_trace(inst: &Instance, iterations: usize, upper_bound: f64) -> Result<Vec<f64>> {
    let n = inst.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!("Held-Karp bound needs n >= 3, got {n}")));
    }
    let dist = Distances::new(inst);
    let mut pi = vec![0.0; n];
    let mut best = f64::NEG_INFINITY;
    let mut trace = Vec::with_capacity(iterations);
    let mut lambda = 2.0;
    let patience = (iterations / 50).max(1);
    let mut stale = 0;

    for _ in 0..iterations.max(1) {
        let t = one_tree(&dist, n, &pi);
        let bound = t.total - 2.0 * pi.iter().sum::<f64>();
        if bound > best {
            best = bound;
            stale = 0;
        } else {
            stale += 1;
            if stale >= patience {
                lambda /= 2.0;
                stale = 0;
            }
        }
        trace.push(best);
        let norm2: f64 = t.degree.iter().map(|&d| (d as f64 - 2.0).powi(2)).sum();
        let gap = upper_bound - bound;
        if norm2 == 0.0 || gap <= 0.0 {
            break;
        }
        let step = lambda * gap / norm2;
        for (p, &d) in pi.iter_mut().zip(&t.degree) {
            *p += step * (d as f64 - 2.0);
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{generate_uniform, Metric, Point};
    use crate::oracles::brute_force_optimal;

    fn inst(coords: &[(f64, f64)]) -> Instance {
        let pts = coords.iter().map(|&(x, y)| Point::new(x, y)).collect();
        Instance::from_points("t", pts, Metric::EuclidReal).unwrap()
    }

    #[test]
    fn triangle_bound_is_perimeter() {
        let i = inst(&[(0.0, 0.0), (4.0, 0.0), (0.0, 3.0)]);
        assert!((held_karp_lower_bound(&i, 50).unwrap() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn unit_square() {
        let i = inst(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let b = held_karp_lower_bound(&i, 200).unwrap();
        assert!((3.9..=4.0 + 1e-12).contains(&b), "bound {b}");
    }

    #[test]
    fn one_tree_shape() {
        let i = generate_uniform(12, 3, 1.0).unwrap();
        let t = compute_one_tree(&i, &[0.0; 12]).unwrap();
        assert_eq!(t.mst_edges.len() + 2, 12);
        assert_eq!(t.degree.iter().sum::<usize>(), 24);
        assert!(t.degree.iter().all(|&d| d >= 1));

        let pi: Vec<f64> = (0..12).map(|k| k as f64 * 0.01).collect();
        let shifted = compute_one_tree(&i, &pi).unwrap();
        // every 1-tree has n edges, so re-weighting shifts its weight by sum(pi * deg)
        let plain: f64 = shifted
            .mst_edges
            .iter()
            .chain(&shifted.special_edges)
            .map(|&(a, b)| i.dist(a, b))
            .sum();
        let expect: f64 = plain + pi.iter().zip(&shifted.degree).map(|(p, &d)| p * d as f64).sum::<f64>();
        assert!((shifted.total - expect).abs() < 1e-12);
    }

    #[test]
    fn bound_is_below_optimum() {
        for seed in 0..5 {
            let i = generate_uniform(8, seed, 100.0).unwrap();
            let opt = brute_force_optimal(&i).unwrap().weight;
            let b = held_karp_lower_bound(&i, 300).unwrap();
            assert!(b <= opt + 1e-9, "seed {seed}: {b} > {opt}");
        }
    }

    #[test]
    fn best_so_far_is_monotone() {
        let i = generate_uniform(40, 5, 1.0).unwrap();
        let trace = held_karp_trace(&i, 400, 1e9).unwrap();
        assert!(trace.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn needs_three_nodes() {
        assert!(held_karp_lower_bound(&inst(&[(0.0, 0.0), (1.0, 0.0)]), 10).is_err());
    }
}
