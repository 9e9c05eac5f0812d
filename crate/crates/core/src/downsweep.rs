//! Top-down reconstruction of the optimal conforming tour.
//!
//! A path `P^u_V(a)` is split along the tree path `u = v_0, ..., v_k = a`.
//! Around every inner `v_i` the remaining children are split into the part
//! swept before arriving at `v_i` and the part swept after leaving it; the
//! best choice of splits is a shortest path through a small layered graph
//! whose arcs are bipartition values. Each arc fixes one edge of the tour and
//! leaves independent sub-paths, which are expanded from an explicit stack.

use crate::error::{Error, Result};
use crate::instances::Instance;
use crate::tree::RootedTree;
use crate::upsweep::{BipartitionTable, ChildMask, UpsweepResult};

#[derive(Clone, Debug, PartialEq)]
pub struct Tour {
    pub order: Vec<usize>,
    pub weight: f64,
}

impl Tour {
    pub fn from_order(inst: &Instance, order: Vec<usize>) -> Self {
        let weight = inst.cycle_weight(&order);
        Tour { order, weight }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Whether `order` lists every node of `0..n` exactly once.
    pub fn is_permutation(&self, n: usize) -> bool {
        if self.order.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        self.order
            .iter()
            .all(|&v| v < n && !std::mem::replace(&mut seen[v], true))
    }
}

/// A layered DAG with full forward connections between consecutive layers.
/// Arc weights are produced on demand; `None` marks a missing arc.
pub struct LayeredGraph<F> {
    pub layer_sizes: Vec<usize>,
    pub arc: F,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayeredPath {
    /// Chosen vertex in every layer.
    pub vertices: Vec<usize>,
    pub weight: f64,
}

/// Forward relaxation layer by layer. Ties keep the lowest-numbered
/// predecessor, and the lowest-numbered vertex in the last layer.
pub fn layered_shortest_path<F>(g: &LayeredGraph<F>) -> Result<LayeredPath>
where
    F: Fn(usize, usize, usize) -> Option<f64>,
{
    let layers = g.layer_sizes.len();
    if layers == 0 || g.layer_sizes.contains(&0) {
        return Err(Error::InvalidInput("layered graph needs nonempty layers".into()));
    }
    let mut dist: Vec<Option<f64>> = vec![Some(0.0); g.layer_sizes[0]];
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(layers);
    for layer in 0..layers - 1 {
        let next_size = g.layer_sizes[layer + 1];
        let mut next: Vec<Option<f64>> = vec![None; next_size];
        let mut from = vec![usize::MAX; next_size];
        for (t, slot) in next.iter_mut().enumerate() {
            for (s, ds) in dist.iter().enumerate() {
                let (Some(ds), Some(w)) = (ds, (g.arc)(layer, s, t)) else {
                    continue;
                };
                let cand = ds + w;
                if slot.is_none_or(|cur| cand < cur) {
                    *slot = Some(cand);
                    from[t] = s;
                }
            }
        }
        if next.iter().all(Option::is_none) {
            return Err(Error::Invariant(format!("layer {} is unreachable", layer + 1)));
        }
        back.push(from);
        dist = next;
    }
    let (mut t, weight) = dist
        .iter()
        .enumerate()
        .filter_map(|(i, d)| d.map(|d| (i, d)))
        .fold(None, |best: Option<(usize, f64)>, (i, d)| match best {
            Some((_, bd)) if bd <= d => best,
            _ => Some((i, d)),
        })
        .unwrap();
    let mut vertices = vec![0; layers];
    vertices[layers - 1] = t;
    for layer in (0..layers - 1).rev() {
        t = back[layer][t];
        vertices[layer] = t;
    }
    Ok(LayeredPath { vertices, weight })
}

/// Deposit the low bits of `index` into the set bits of `space`.
fn deposit(index: usize, space: u32) -> u32 {
    let mut out = 0;
    let mut i = 0;
    for bit in 0..32 {
        if space >> bit & 1 == 1 {
            if index >> i & 1 == 1 {
                out |= 1 << bit;
            }
            i += 1;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DownsweepStats {
    /// Tree-path edges summed over every expanded sub-path.
    pub path_edges: usize,
    pub layered_graphs: usize,
}

#[derive(Clone, Copy, Debug)]
enum Item {
    Node(usize),
    Forward(usize, ChildMask, usize),
    Reverse(usize, ChildMask, usize),
}

impl Item {
    fn flipped(self) -> Self {
        match self {
            Item::Node(v) => Item::Node(v),
            Item::Forward(u, m, a) => Item::Reverse(u, m, a),
            Item::Reverse(u, m, a) => Item::Forward(u, m, a),
        }
    }
}

/// The pieces of `P^u_V(a)` after `u`, in order.
fn expand(
    tree: &RootedTree,
    bips: &BipartitionTable,
    u: usize,
    mask: ChildMask,
    a: usize,
    stats: &mut DownsweepStats,
) -> Result<Vec<Item>> {
    let mut path = vec![a];
    let mut cur = a;
    while cur != u {
        cur = tree
            .parent(cur)
            .ok_or_else(|| Error::InvalidInput(format!("{a} is not below {u}")))?;
        path.push(cur);
    }
    path.reverse();
    let k = path.len() - 1;
    if k == 0 {
        return Err(Error::InvalidInput(format!("destination {a} equals the start node")));
    }
    let first = tree.child_index(path[1]).unwrap();
    if !mask.contains(first) {
        return Err(Error::InvalidInput(format!("{a} is not in T(V) for node {u}")));
    }
    stats.path_edges += k;
    stats.layered_graphs += 1;

    // Children of v_i still free to split, for 0 < i < k.
    let free: Vec<u32> = (0..=k)
        .map(|i| {
            if i == 0 || i == k {
                0
            } else {
                let next = tree.child_index(path[i + 1]).unwrap();
                ChildMask::full(tree.children(path[i]).len()).without(next).0
            }
        })
        .collect();
    let source_after = mask.without(first);
    let sink_before = ChildMask::full(tree.children(a).len());
    let after = |layer: usize, t: usize| -> ChildMask {
        if layer == 0 {
            source_after
        } else {
            ChildMask(free[layer] & !deposit(t, free[layer]))
        }
    };
    let before = |layer: usize, t: usize| -> ChildMask {
        if layer == k {
            sink_before
        } else {
            ChildMask(deposit(t, free[layer]))
        }
    };

    let mut layer_sizes = vec![1usize];
    layer_sizes.extend((1..k).map(|i| 1usize << free[i].count_ones()));
    layer_sizes.push(1);
    let graph = LayeredGraph {
        layer_sizes,
        arc: |layer: usize, s: usize, t: usize| {
            bips.get(path[layer + 1], after(layer, s), before(layer + 1, t))
                .map(|e| e.weight)
        },
    };
    let best = layered_shortest_path(&graph)?;

    let mut items = Vec::new();
    for i in 0..k {
        let out_mask = after(i, best.vertices[i]);
        let in_mask = before(i + 1, best.vertices[i + 1]);
        let e = bips
            .get(path[i + 1], out_mask, in_mask)
            .ok_or_else(|| Error::Invariant(format!("missing bipartition entry at node {}", path[i + 1])))?;
        if !out_mask.is_empty() {
            items.push(Item::Forward(path[i], out_mask, e.exit));
        }
        if !in_mask.is_empty() {
            items.push(Item::Reverse(path[i + 1], in_mask, e.entry));
        }
        items.push(Item::Node(path[i + 1]));
    }
    Ok(items)
}

fn run_stack(
    tree: &RootedTree,
    bips: &BipartitionTable,
    start: Item,
    out: &mut Vec<usize>,
    stats: &mut DownsweepStats,
) -> Result<()> {
    let mut stack = vec![start];
    while let Some(item) = stack.pop() {
        match item {
            Item::Node(v) => out.push(v),
            Item::Forward(u, mask, a) => {
                let items = expand(tree, bips, u, mask, a, stats)?;
                stack.extend(items.into_iter().rev());
            }
            Item::Reverse(u, mask, a) => {
                let items = expand(tree, bips, u, mask, a, stats)?;
                stack.extend(items.into_iter().map(Item::flipped));
            }
        }
    }
    Ok(())
}

/// The node sequence of `P^u_V(a)`: starts at `u`, sweeps `u + T(V)` and ends at `a`.
pub fn reconstruct_path(
    tree: &RootedTree,
    result: &UpsweepResult,
    u: usize,
    mask: ChildMask,
    a: usize,
) -> Result<Vec<usize>> {
    let mut stats = DownsweepStats::default();
    reconstruct_path_with_stats(tree, result, u, mask, a, &mut stats)
}

pub fn reconstruct_path_with_stats(
    tree: &RootedTree,
    result: &UpsweepResult,
    u: usize,
    mask: ChildMask,
    a: usize,
    stats: &mut DownsweepStats,
) -> Result<Vec<usize>> {
    let bips = tables_for(tree, result)?;
    if u >= tree.len() || a >= tree.len() {
        return Err(Error::InvalidInput("node out of range".into()));
    }
    let mut out = vec![u];
    run_stack(tree, bips, Item::Forward(u, mask, a), &mut out, stats)?;
    Ok(out)
}

fn tables_for<'a>(tree: &RootedTree, result: &'a UpsweepResult) -> Result<&'a BipartitionTable> {
    if !result.matches_tree(tree) {
        return Err(Error::InvalidInput("upsweep result was computed on a different tree".into()));
    }
    result
        .bipartitions
        .as_ref()
        .ok_or_else(|| Error::Config("upsweep did not retain bipartition tables".into()))
}

/// Rebuild the tour whose weight the upsweep reported.
pub fn downsweep(inst: &Instance, tree: &RootedTree, result: &UpsweepResult) -> Result<Tour> {
    downsweep_with_stats(inst, tree, result).map(|(t, _)| t)
}

pub fn downsweep_with_stats(
    inst: &Instance,
    tree: &RootedTree,
    result: &UpsweepResult,
) -> Result<(Tour, DownsweepStats)> {
    let root = tree.root();
    let full = ChildMask::full(tree.children(root).len());
    let mut stats = DownsweepStats::default();
    let order = reconstruct_path_with_stats(tree, result, root, full, result.best_a, &mut stats)?;
    let tour = Tour::from_order(inst, order);
    if !tour.is_permutation(tree.len()) {
        return Err(Error::Invariant("reconstructed tour is not a permutation".into()));
    }
    Ok((tour, stats))
}
