#![allow(dead_code)]

use doubletree::tree::{minimum_spanning_tree, root_tree};
use doubletree::{Instance, Metric, Point, RootedTree};

pub fn instance(coords: &[(f64, f64)]) -> Instance {
    let pts = coords.iter().map(|&(x, y)| Point::new(x, y)).collect();
    Instance::from_points("t", pts, Metric::EuclidReal).unwrap()
}

pub fn mst_tree(inst: &Instance) -> RootedTree {
    root_tree(&minimum_spanning_tree(inst), inst.len()).unwrap()
}

/// Nodes of `T(u)`.
pub fn subtree(tree: &RootedTree, u: usize) -> Vec<usize> {
    let mut out = vec![u];
    let mut i = 0;
    while i < out.len() {
        out.extend_from_slice(tree.children(out[i]));
        i += 1;
    }
    out
}

/// Every permutation of `items`, by Heap's algorithm.
pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    fn go(k: usize, v: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(v.clone());
            return;
        }
        for i in 0..k - 1 {
            go(k - 1, v, out);
            if k.is_multiple_of(2) {
                v.swap(i, k - 1);
            } else {
                v.swap(0, k - 1);
            }
        }
        go(k - 1, v, out);
    }
    let mut v = items.to_vec();
    let mut out = Vec::new();
    go(v.len(), &mut v, &mut out);
    out
}

/// Minimum weight of a path that starts at `u`, visits `u + T(V)` exactly
/// once and ends at `a`, with every `T(w)` (`w` in `T(V)`) on a contiguous
/// stretch. Indexed by `a`; `None` where no such path ends.
pub fn brute_sweep(inst: &Instance, tree: &RootedTree, u: usize, v_set: &[usize]) -> Vec<Option<f64>> {
    let nodes: Vec<usize> = v_set.iter().flat_map(|&c| subtree(tree, c)).collect();
    let mut best = vec![None::<f64>; tree.len()];
    for perm in permutations(&nodes) {
        let mut pos = vec![usize::MAX; tree.len()];
        for (i, &x) in perm.iter().enumerate() {
            pos[x] = i;
        }
        let ok = nodes.iter().all(|&w| {
            let ps: Vec<usize> = subtree(tree, w).iter().map(|&x| pos[x]).collect();
            ps.iter().max().unwrap() - ps.iter().min().unwrap() + 1 == ps.len()
        });
        if !ok {
            continue;
        }
        let mut w = inst.dist(u, perm[0]);
        for p in perm.windows(2) {
            w += inst.dist(p[0], p[1]);
        }
        let a = *perm.last().unwrap();
        if best[a].is_none_or(|b| w < b) {
            best[a] = Some(w);
        }
    }
    best
}

/// Conformance by counting, for every node, how many maximal runs of
/// `T(u)` appear in the cyclic order.
pub fn conforming_by_runs(order: &[usize], tree: &RootedTree) -> bool {
    let n = order.len();
    (0..n).all(|u| {
        let inside: Vec<bool> = {
            let s = subtree(tree, u);
            order.iter().map(|x| s.contains(x)).collect()
        };
        if inside.iter().all(|&b| b) {
            return true;
        }
        let starts = (0..n).filter(|&i| inside[i] && !inside[(i + n - 1) % n]).count();
        starts == 1
    })
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}
