//! Ground truth for small instances and the depth-first baseline.

use crate::downsweep::Tour;
use crate::error::{Error, Result};
use crate::instances::Instance;
use crate::tree::RootedTree;

/// Largest instance the exhaustive searches accept.
pub const MAX_ENUMERATION_N: usize = 11;

/// Whether every subtree `T(u)` occupies a contiguous arc of the tour.
///
/// With the tour rotated to start at the root, no subtree other than the
/// whole tree contains position 0, so each must fill a plain interval:
/// `max_pos - min_pos + 1 == |T(u)|`.
pub fn is_conforming(tour: &Tour, tree: &RootedTree) -> Result<bool> {
    let n = tree.len();
    if !tour.is_permutation(n) {
        return Err(Error::InvalidInput(format!(
            "tour of length {} is not a permutation of the tree's {n} nodes",
            tour.len()
        )));
    }
    let start = tour.order.iter().position(|&v| v == tree.root()).unwrap();
    let mut pos = vec![0usize; n];
    for (i, &v) in tour.order.iter().enumerate() {
        pos[v] = (i + n - start) % n;
    }
    let mut lo = pos.clone();
    let mut hi = pos;
    for &u in tree.postorder().iter() {
        if hi[u] - lo[u] + 1 != tree.subtree_size(u) {
            return Ok(false);
        }
        if let Some(p) = tree.parent(u) {
            lo[p] = lo[p].min(lo[u]);
            hi[p] = hi[p].max(hi[u]);
        }
    }
    Ok(true)
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Minimum over all Hamiltonian cycles accepted by `keep`, one per
/// rotation/reflection class (node 0 first, `order[1] < order[n-1]`).
/// Cycles are visited in lexicographic order and ties keep the first.
fn enumerate_min(inst: &Instance, mut keep: impl FnMut(&[usize]) -> bool) -> Result<Option<Tour>> {
    let n = inst.len();
    if n > MAX_ENUMERATION_N {
        return Err(Error::Guard(format!(
            "exhaustive search is limited to n <= {MAX_ENUMERATION_N}, got {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut best: Option<Tour> = None;
    loop {
        if n < 3 || order[1] < order[n - 1] {
            let w = inst.cycle_weight(&order);
            if best.as_ref().is_none_or(|b| w < b.weight) && keep(&order) {
                best = Some(Tour {
                    order: order.clone(),
                    weight: w,
                });
            }
        }
        if n < 2 || !next_permutation(&mut order[1..]) {
            break;
        }
    }
    Ok(best)
}

/// Lightest tour among those conforming to `tree`.
pub fn enumerate_conforming_min(inst: &Instance, tree: &RootedTree) -> Result<Tour> {
    if tree.len() != inst.len() {
        return Err(Error::InvalidInput("tree and instance sizes differ".into()));
    }
    let mut scratch = Tour {
        order: Vec::new(),
        weight: 0.0,
    };
    enumerate_min(inst, |order| {
        scratch.order.clear();
        scratch.order.extend_from_slice(order);
        is_conforming(&scratch, tree).unwrap_or(false)
    })?
    .ok_or_else(|| Error::Invariant("no conforming tour found".into()))
}

/// Every conforming cycle of `tree`, in canonical form (see [`enumerate_min`]).
pub fn conforming_tours(tree: &RootedTree) -> Result<Vec<Vec<usize>>> {
    let n = tree.len();
    if n > MAX_ENUMERATION_N {
        return Err(Error::Guard(format!(
            "exhaustive search is limited to n <= {MAX_ENUMERATION_N}, got {n}"
        )));
    }
    let mut out = Vec::new();
    let mut tour = Tour {
        order: (0..n).collect(),
        weight: 0.0,
    };
    loop {
        if (n < 3 || tour.order[1] < tour.order[n - 1]) && is_conforming(&tour, tree)? {
            out.push(tour.order.clone());
        }
        if n < 2 || !next_permutation(&mut tour.order[1..]) {
            break;
        }
    }
    Ok(out)
}

/// Optimal tour by exhaustive search.
pub fn brute_force_optimal(inst: &Instance) -> Result<Tour> {
    enumerate_min(inst, |_| true)?.ok_or_else(|| Error::Invariant("no tour found".into()))
}

/// Shortcut the doubled tree in depth-first preorder (children ascending).
pub fn depth_first_shortcut(inst: &Instance, tree: &RootedTree) -> Tour {
    Tour::from_order(inst, tree.preorder().to_vec())
}
