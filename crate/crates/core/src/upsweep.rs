//! Bottom-up dynamic program over the rooted tree.
//!
//! For the current node `u` and a set `V` of its children, `D^u_V(a)` is the
//! weight of the lightest conforming path that starts at `u`, sweeps
//! `u + T(V)` and stops at `a`. Tables are built children-first; the root's
//! table closes the tour.
//!
//! A node's [`SweepTable`] stores destinations grouped by child (children in
//! ascending order), and for every child-subset mask `V` one contiguous block
//! holding the values of every destination below a child in `V`. With a finite
//! search depth `k` a node only keeps destinations within tree distance `k`.

use crate::error::{Error, Result};
use crate::instances::Instance;
use crate::tree::RootedTree;

/// Largest child count a node may have; tables grow as `4^d`.
pub const MAX_CHILDREN: usize = 20;

/// Default cap on simultaneously stored table entries.
pub const DEFAULT_MAX_ENTRIES: usize = 1 << 28;

/// Subset of a node's children, one bit per position in `children(u)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChildMask(pub u32);

impl ChildMask {
    pub const EMPTY: ChildMask = ChildMask(0);

    pub fn full(count: usize) -> Self {
        ChildMask(((1u64 << count) - 1) as u32)
    }

    pub fn single(index: usize) -> Self {
        ChildMask(1 << index)
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 >> index & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn with(self, index: usize) -> Self {
        ChildMask(self.0 | 1 << index)
    }

    pub fn without(self, index: usize) -> Self {
        ChildMask(self.0 & !(1 << index))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits >> i & 1 == 1)
    }

    /// Mask of the given children of `u`.
    pub fn from_children(tree: &RootedTree, u: usize, nodes: &[usize]) -> Result<Self> {
        let kids = tree.children(u);
        let mut mask = ChildMask::EMPTY;
        for &c in nodes {
            let j = kids
                .binary_search(&c)
                .map_err(|_| Error::InvalidInput(format!("{c} is not a child of {u}")))?;
            mask = mask.with(j);
        }
        Ok(mask)
    }
}

/// Search depth `k` bounding how far below a node destinations are tracked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Depth {
    Limited(usize),
    Unlimited,
}

impl Depth {
    pub fn limit(self) -> usize {
        match self {
            Depth::Limited(k) => k,
            Depth::Unlimited => usize::MAX,
        }
    }
}

impl std::fmt::Display for Depth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Depth::Limited(k) => write!(f, "{k}"),
            Depth::Unlimited => f.write_str("inf"),
        }
    }
}

/// Which tables survive the run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Retention {
    /// Child tables are dropped once their parent is done; weight only.
    WeightOnly,
    /// Keep every bipartition value, enough to reconstruct the tour.
    Bipartitions,
    /// Keep bipartitions and every node's sweep table.
    All,
}

#[derive(Clone, Copy, Debug)]
pub struct UpsweepConfig {
    pub depth: Depth,
    pub retention: Retention,
    pub max_entries: usize,
}

impl UpsweepConfig {
    pub fn new(depth: Depth, retention: Retention) -> Self {
        UpsweepConfig {
            depth,
            retention,
            max_entries: DEFAULT_MAX_ENTRIES,
        }
    }
}

/// `D^u_V(a)` for one node `u` and every `V` in `2^C(u)`.
#[derive(Clone, Debug)]
pub struct SweepTable {
    node: usize,
    dest: Vec<u32>,
    child_start: Vec<u32>,
    block_start: Vec<usize>,
    values: Vec<f64>,
}

impl SweepTable {
    pub fn node(&self) -> usize {
        self.node
    }

    pub fn child_count(&self) -> usize {
        self.child_start.len() - 1
    }

    /// Number of stored values.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Every stored destination, grouped by child.
    pub fn destinations(&self) -> impl Iterator<Item = usize> + '_ {
        self.dest.iter().map(|&a| a as usize)
    }

    fn child_range(&self, j: usize) -> std::ops::Range<usize> {
        self.child_start[j] as usize..self.child_start[j + 1] as usize
    }

    fn child_len(&self, j: usize) -> usize {
        (self.child_start[j + 1] - self.child_start[j]) as usize
    }

    /// Offset of child `j`'s values inside the block for `mask` (`j` in `mask`).
    fn sub_block(&self, mask: u32, j: usize) -> usize {
        let mut off = self.block_start[mask as usize];
        for i in 0..j {
            if mask >> i & 1 == 1 {
                off += self.child_len(i);
            }
        }
        off
    }

    /// `D^u_V(a)`, or `None` when `a` is outside `T(V)` or beyond the search depth.
    pub fn get(&self, mask: ChildMask, a: usize) -> Option<f64> {
        if mask.0 as usize >= self.block_start.len() - 1 {
            return None;
        }
        let q = self.dest.iter().position(|&d| d as usize == a)?;
        let j = (0..self.child_count()).find(|&j| self.child_range(j).contains(&q))?;
        if !mask.contains(j) {
            return None;
        }
        Some(self.values[self.sub_block(mask.0, j) + q - self.child_start[j] as usize])
    }

    /// All `(a, D^u_V(a))` stored for `mask`.
    pub fn entries(&self, mask: ChildMask) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        if mask.0 as usize >= self.block_start.len() - 1 {
            return out;
        }
        let mut off = self.block_start[mask.0 as usize];
        for j in mask.indices() {
            for q in self.child_range(j) {
                out.push((self.dest[q] as usize, self.values[off]));
                off += 1;
            }
        }
        out
    }
}

/// One `D^u_{V,W}(v)` value together with the edge `(exit, entry)` through
/// which the optimal path leaves `u + T(V)` and enters `T(W) + v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BipartitionEntry {
    pub weight: f64,
    pub exit: usize,
    pub entry: usize,
}

/// `D^u_{V,W}(v)` for every non-root `v` (its parent `u` is implied).
#[derive(Clone, Debug)]
pub struct BipartitionTable {
    start: Vec<usize>,
    child_bits: Vec<u8>,
    own_index: Vec<u8>,
    entries: Vec<BipartitionEntry>,
}

impl BipartitionTable {
    fn new(tree: &RootedTree, max_entries: usize) -> Result<Self> {
        let n = tree.len();
        let mut start = Vec::with_capacity(n + 1);
        let mut child_bits = vec![0u8; n];
        let mut own_index = vec![0u8; n];
        let mut total = 0usize;
        for v in 0..n {
            start.push(total);
            child_bits[v] = tree.children(v).len() as u8;
            if let Some(u) = tree.parent(v) {
                own_index[v] = tree.child_index(v).unwrap() as u8;
                total += (1usize << tree.children(u).len()) << tree.children(v).len();
            }
        }
        start.push(total);
        if total > max_entries {
            return Err(Error::Guard(format!(
                "bipartition table needs {total} entries, limit is {max_entries}"
            )));
        }
        let blank = BipartitionEntry {
            weight: 0.0,
            exit: 0,
            entry: 0,
        };
        Ok(BipartitionTable {
            start,
            child_bits,
            own_index,
            entries: vec![blank; total],
        })
    }

    fn slot(&self, v: usize, parent_mask: u32, mask: u32) -> usize {
        self.start[v] + ((parent_mask as usize) << self.child_bits[v]) + mask as usize
    }

    fn set(&mut self, v: usize, parent_mask: u32, mask: u32, entry: BipartitionEntry) {
        let s = self.slot(v, parent_mask, mask);
        self.entries[s] = entry;
    }

    /// `D^u_{V,W}(v)` where `u = parent(v)`, `V` masks `C(u)` and `W` masks `C(v)`.
    /// `None` for the root, for `V` containing `v`, or for masks out of range.
    pub fn get(&self, v: usize, parent_mask: ChildMask, mask: ChildMask) -> Option<BipartitionEntry> {
        let span = self.start.get(v + 1)? - self.start[v];
        if span == 0 || parent_mask.contains(self.own_index[v] as usize) {
            return None;
        }
        if (mask.0 as usize) >> self.child_bits[v] != 0 {
            return None;
        }
        let s = self.slot(v, parent_mask.0, mask.0);
        (s < self.start[v + 1]).then(|| self.entries[s])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Work counters for checking the time and space bounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UpsweepStats {
    /// Inner-loop candidate evaluations across both recurrences.
    pub evaluations: u64,
    /// Largest number of sweep-table values alive at once.
    pub peak_live_entries: usize,
    pub max_children: usize,
}

#[derive(Clone, Debug)]
pub struct UpsweepResult {
    pub weight: f64,
    pub best_a: usize,
    pub depth: Depth,
    pub root_table: SweepTable,
    pub bipartitions: Option<BipartitionTable>,
    /// Every node's sweep table, only with [`Retention::All`].
    pub tables: Option<Vec<SweepTable>>,
    pub stats: UpsweepStats,
    pub(crate) parents: Vec<Option<usize>>,
}

impl UpsweepResult {
    pub fn table(&self, u: usize) -> Option<&SweepTable> {
        self.tables.as_ref().map(|t| &t[u])
    }

    /// Whether this result was computed on `tree`.
    pub fn matches_tree(&self, tree: &RootedTree) -> bool {
        self.parents == tree.parents()
    }
}

/// Run the upsweep in the tree's natural post-order.
pub fn upsweep(inst: &Instance, tree: &RootedTree, cfg: UpsweepConfig) -> Result<UpsweepResult> {
    upsweep_in_order(inst, tree, cfg, &tree.postorder())
}

/// Run the upsweep visiting nodes in `order`, which must list every node
/// after all of its children.
pub fn upsweep_in_order(
    inst: &Instance,
    tree: &RootedTree,
    cfg: UpsweepConfig,
    order: &[usize],
) -> Result<UpsweepResult> {
    let n = tree.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 nodes, got {n}")));
    }
    if inst.len() != n {
        return Err(Error::InvalidInput(format!(
            "instance has {} nodes but tree has {n}",
            inst.len()
        )));
    }
    if cfg.depth == Depth::Limited(0) {
        return Err(Error::Config("search depth must be at least 1".into()));
    }
    if tree.max_children() > MAX_CHILDREN {
        return Err(Error::Guard(format!(
            "a node has {} children, at most {MAX_CHILDREN} are supported",
            tree.max_children()
        )));
    }
    check_postorder(tree, order)?;

    let mut bips = match cfg.retention {
        Retention::WeightOnly => None,
        _ => Some(BipartitionTable::new(tree, cfg.max_entries)?),
    };
    let mut tables: Vec<Option<SweepTable>> = vec![None; n];
    let mut stats = UpsweepStats {
        max_children: tree.max_children(),
        ..Default::default()
    };
    let mut live = 0usize;
    let limit = cfg.depth.limit();

    for &u in order {
        let kids = tree.children(u);
        let child_tables: Vec<&SweepTable> = kids
            .iter()
            .map(|&c| tables[c].as_ref().expect("children are processed first"))
            .collect();
        let planned = planned_entries(tree, u, limit, &child_tables);
        if live + planned > cfg.max_entries {
            return Err(Error::Guard(format!(
                "sweep tables need {} live entries, limit is {}",
                live + planned,
                cfg.max_entries
            )));
        }
        let table = process_node(inst, tree, u, limit, &child_tables, bips.as_mut(), &mut stats);
        live += table.len();
        stats.peak_live_entries = stats.peak_live_entries.max(live);
        if cfg.retention != Retention::All {
            for &c in kids {
                live -= tables[c].take().map_or(0, |t| t.len());
            }
        }
        tables[u] = Some(table);
    }

    let root = tree.root();
    let root_table = tables[root].clone().unwrap();
    let full = ChildMask::full(tree.children(root).len());
    let mut best: Option<(f64, usize)> = None;
    for (a, w) in root_table.entries(full) {
        let total = w + inst.dist(a, root);
        if best.is_none_or(|(bw, ba)| total < bw || (total == bw && a < ba)) {
            best = Some((total, a));
        }
    }
    let (weight, best_a) =
        best.ok_or_else(|| Error::Invariant("root table has no full-mask entries".into()))?;

    let tables = match cfg.retention {
        Retention::All => Some(tables.into_iter().map(Option::unwrap).collect()),
        _ => None,
    };
    Ok(UpsweepResult {
        weight,
        best_a,
        depth: cfg.depth,
        root_table,
        bipartitions: bips,
        tables,
        stats,
        parents: tree.parents().to_vec(),
    })
}

fn check_postorder(tree: &RootedTree, order: &[usize]) -> Result<()> {
    let n = tree.len();
    if order.len() != n {
        return Err(Error::InvalidInput("processing order must list every node once".into()));
    }
    let mut done = vec![false; n];
    for &u in order {
        if u >= n || done[u] {
            return Err(Error::InvalidInput(format!("bad or repeated node {u} in order")));
        }
        if tree.children(u).iter().any(|&c| !done[c]) {
            return Err(Error::InvalidInput(format!("node {u} scheduled before its children")));
        }
        done[u] = true;
    }
    Ok(())
}

fn planned_entries(tree: &RootedTree, u: usize, limit: usize, child_tables: &[&SweepTable]) -> usize {
    let du = tree.depth(u);
    let total: usize = child_tables
        .iter()
        .map(|t| 1 + t.destinations().filter(|&a| tree.depth(a) - du <= limit).count())
        .sum();
    if child_tables.is_empty() {
        0
    } else {
        total << (child_tables.len() - 1)
    }
}

#[inline]
fn better(w: f64, x: usize, y: usize, best: &BipartitionEntry) -> bool {
    w < best.weight || (w == best.weight && (x, y) < (best.exit, best.entry))
}

/// Build `D^u_V(.)` for every `V` in `2^C(u)` from the finished child tables.
///
/// Masks are visited in increasing numeric order, so `V` is complete before
/// any `V + v` is extended from it. Bipartition values are written to `bips`
/// when given.
pub fn process_node(
    inst: &Instance,
    tree: &RootedTree,
    u: usize,
    limit: usize,
    child_tables: &[&SweepTable],
    mut bips: Option<&mut BipartitionTable>,
    stats: &mut UpsweepStats,
) -> SweepTable {
    let kids = tree.children(u);
    let m = kids.len();
    let du = tree.depth(u);

    let mut dest = Vec::new();
    let mut child_start = vec![0u32];
    for (&c, ct) in kids.iter().zip(child_tables) {
        dest.push(c as u32);
        dest.extend(ct.dest.iter().copied().filter(|&a| tree.depth(a as usize) - du <= limit));
        child_start.push(dest.len() as u32);
    }
    let masks = 1usize << m;
    let mut block_start = Vec::with_capacity(masks + 1);
    block_start.push(0);
    for mask in 0..masks {
        let size: usize = (0..m)
            .filter(|j| mask >> j & 1 == 1)
            .map(|j| (child_start[j + 1] - child_start[j]) as usize)
            .sum();
        block_start.push(block_start[mask] + size);
    }
    let mut table = SweepTable {
        node: u,
        dest,
        child_start,
        block_start,
        values: Vec::new(),
    };
    table.values = vec![0.0; table.block_start[masks]];

    let mut xs: Vec<(usize, f64)> = Vec::new();
    let mut reach: Vec<(f64, usize)> = Vec::new();
    let mut bip: Vec<BipartitionEntry> = Vec::new();
    for mask in 0..masks as u32 {
        xs.clear();
        xs.extend(table.entries(ChildMask(mask)));
        for j in (0..m).filter(|&j| mask >> j & 1 == 0) {
            let child = child_tables[j];
            bipartition_weights(inst, u, kids[j], &xs, child, &mut reach, &mut bip, stats);
            if let Some(b) = bips.as_deref_mut() {
                for (w, e) in bip.iter().enumerate() {
                    b.set(kids[j], mask, w as u32, *e);
                }
            }
            extend_sweep(tree, &mut table, mask, j, limit, child, &bip, stats);
        }
    }
    table
}

/// `D^u_{V,W}(v)` for every `W` in `2^C(v)`, given the stored entries `xs`
/// of `D^u_V`.
///
/// The exit-side minimum `min_x D^u_V(x) + d(x,y)` depends only on the entry
/// node `y`, so it is computed once per `y` and shared by every `W`.
#[allow(clippy::too_many_arguments)]
fn bipartition_weights(
    inst: &Instance,
    u: usize,
    v: usize,
    xs: &[(usize, f64)],
    child: &SweepTable,
    reach: &mut Vec<(f64, usize)>,
    out: &mut Vec<BipartitionEntry>,
    stats: &mut UpsweepStats,
) {
    reach.clear();
    let ys = std::iter::once(v).chain(child.destinations());
    if xs.is_empty() {
        reach.extend(ys.map(|y| (inst.dist(u, y), u)));
        stats.evaluations += reach.len() as u64;
    } else {
        for y in ys {
            let mut best = (f64::INFINITY, usize::MAX);
            for &(x, dx) in xs {
                let w = dx + inst.dist(x, y);
                if w < best.0 || (w == best.0 && x < best.1) {
                    best = (w, x);
                }
            }
            reach.push(best);
        }
        stats.evaluations += (xs.len() * reach.len()) as u64;
    }

    let mv = child.child_count();
    out.clear();
    out.push(BipartitionEntry {
        weight: reach[0].0,
        exit: reach[0].1,
        entry: v,
    });
    for w in 1..1u32 << mv {
        let mut best = BipartitionEntry {
            weight: f64::INFINITY,
            exit: usize::MAX,
            entry: usize::MAX,
        };
        for jp in ChildMask(w).indices() {
            let off = child.sub_block(w, jp);
            let range = child.child_range(jp);
            let vals = &child.values[off..off + range.len()];
            for (q, &dv) in range.zip(vals) {
                let (e, x) = reach[q + 1];
                let cand = e + dv;
                let y = child.dest[q] as usize;
                if better(cand, x, y, &best) {
                    best = BipartitionEntry {
                        weight: cand,
                        exit: x,
                        entry: y,
                    };
                }
            }
        }
        stats.evaluations += (child.block_start[w as usize + 1] - child.block_start[w as usize]) as u64;
        out.push(best);
    }
}

/// Fill `D^u_{V+v}(a)` for `v = children(u)[j]` and every kept `a` in `T(v)`:
/// `a = v` takes `D^u_{V,C(v)}(v)`, deeper `a` the best bipartition
/// `W + W' = C(v)` with `a` in `T(W')`.
#[allow(clippy::too_many_arguments)]
fn extend_sweep(
    tree: &RootedTree,
    table: &mut SweepTable,
    mask: u32,
    j: usize,
    limit: usize,
    child: &SweepTable,
    bip: &[BipartitionEntry],
    stats: &mut UpsweepStats,
) {
    let du = tree.depth(table.node);
    let target = table.sub_block(mask | 1 << j, j);
    let mv = child.child_count();
    let full_v = (1u32 << mv) - 1;
    table.values[target] = bip[full_v as usize].weight;

    let mut p = target + 1;
    let mut keep: Vec<usize> = Vec::new();
    let mut acc: Vec<f64> = Vec::new();
    for jp in 0..mv {
        let range = child.child_range(jp);
        keep.clear();
        keep.extend(
            (0..range.len()).filter(|&q| tree.depth(child.dest[range.start + q] as usize) - du <= limit),
        );
        if keep.is_empty() {
            continue;
        }
        acc.clear();
        acc.resize(keep.len(), f64::INFINITY);
        let bit = 1u32 << jp;
        for w in (0..=full_v).filter(|w| w & bit == 0) {
            let base = bip[w as usize].weight;
            let off = child.sub_block(full_v ^ w, jp);
            for (slot, &q) in acc.iter_mut().zip(&keep) {
                let cand = base + child.values[off + q];
                if cand < *slot {
                    *slot = cand;
                }
            }
            stats.evaluations += keep.len() as u64;
        }
        table.values[p..p + acc.len()].copy_from_slice(&acc);
        p += acc.len();
    }
    debug_assert_eq!(p, target + table.child_len(j));
}

/// Direct evaluation of `D^u_{V,W}(v)` from stored sweep tables, scanning
/// every exit/entry pair. Used to cross-check the tables built by
/// [`process_node`]; needs a result computed with [`Retention::All`].
pub fn bipartition_path_weight(
    inst: &Instance,
    tree: &RootedTree,
    result: &UpsweepResult,
    u: usize,
    parent_mask: ChildMask,
    v: usize,
    mask: ChildMask,
) -> Result<Option<f64>> {
    let j = tree
        .children(u)
        .binary_search(&v)
        .map_err(|_| Error::InvalidInput(format!("{v} is not a child of {u}")))?;
    if parent_mask.contains(j) {
        return Err(Error::InvalidInput(format!("{v} already belongs to V")));
    }
    let (tu, tv) = match (result.table(u), result.table(v)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Config("sweep tables were not retained".into())),
    };
    let xs = if parent_mask.is_empty() { vec![(u, 0.0)] } else { tu.entries(parent_mask) };
    let ys = if mask.is_empty() { vec![(v, 0.0)] } else { tv.entries(mask) };
    let best = xs
        .iter()
        .flat_map(|&(x, dx)| ys.iter().map(move |&(y, dy)| dx + inst.dist(x, y) + dy))
        .fold(None, |acc: Option<f64>, w| Some(acc.map_or(w, |a| a.min(w))));
    Ok(best)
}
