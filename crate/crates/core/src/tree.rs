//! Minimum spanning trees, rooting, and the degree-increasing transformation.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::instances::Instance;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    pub w: f64,
}

/// Prim's algorithm with a dense O(n^2) scan.
///
/// Edges are compared by `(weight, min endpoint, max endpoint)`, a strict
/// total order, so the tree is unique even with duplicate points.
pub fn minimum_spanning_tree(inst: &Instance) -> Vec<TreeEdge> {
    let n = inst.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut from = vec![usize::MAX; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));

    let better = |w: f64, a: usize, b: usize, cur_w: f64, cur_a: usize, cur_b: usize| -> bool {
        let k = (a.min(b), a.max(b));
        let cur = (cur_a.min(cur_b), cur_a.max(cur_b));
        w < cur_w || (w == cur_w && k < cur)
    };

    let mut u = 0;
    in_tree[0] = true;
    for _ in 1..n {
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let w = inst.dist(u, v);
            if from[v] == usize::MAX || better(w, u, v, best[v], from[v], v) {
                best[v] = w;
                from[v] = u;
            }
        }
        let mut next = usize::MAX;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            if next == usize::MAX || better(best[v], from[v], v, best[next], from[next], next) {
                next = v;
            }
        }
        in_tree[next] = true;
        edges.push(TreeEdge {
            a: from[next],
            b: next,
            w: best[next],
        });
        u = next;
    }
    edges
}

pub fn tree_weight(edges: &[TreeEdge]) -> f64 {
    edges.iter().map(|e| e.w).sum()
}

/// A rooted spanning tree. Children lists are sorted ascending by node index;
/// child-subset masks elsewhere refer to positions in these lists.
#[derive(Clone, Debug, PartialEq)]
pub struct RootedTree {
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    subtree_size: Vec<usize>,
    depth: Vec<usize>,
    /// Preorder position of each node (children visited in ascending order).
    preorder_pos: Vec<usize>,
    preorder: Vec<usize>,
    max_children: usize,
}

impl RootedTree {
    /// Build from a parent array. Fails unless `parent` describes a single
    /// tree rooted at `root`.
    pub fn from_parents(root: usize, parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        if root >= n {
            return Err(Error::NotATree(format!("root {root} out of range")));
        }
        if parent[root].is_some() {
            return Err(Error::NotATree("root has a parent".into()));
        }
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            match *p {
                Some(p) if p >= n || p == v => {
                    return Err(Error::NotATree(format!("bad parent {p} for node {v}")))
                }
                Some(p) => children[p].push(v),
                None if v != root => return Err(Error::NotATree(format!("node {v} has no parent"))),
                None => {}
            }
        }
        for c in &mut children {
            c.sort_unstable();
        }

        let mut depth = vec![usize::MAX; n];
        let mut preorder = Vec::with_capacity(n);
        let mut stack = vec![root];
        depth[root] = 0;
        while let Some(u) = stack.pop() {
            preorder.push(u);
            for &c in children[u].iter().rev() {
                depth[c] = depth[u] + 1;
                stack.push(c);
            }
        }
        if preorder.len() != n {
            return Err(Error::NotATree("parent links contain a cycle".into()));
        }
        let mut preorder_pos = vec![0; n];
        for (i, &u) in preorder.iter().enumerate() {
            preorder_pos[u] = i;
        }
        let mut subtree_size = vec![1; n];
        for &u in preorder.iter().rev() {
            if let Some(p) = parent[u] {
                subtree_size[p] += subtree_size[u];
            }
        }
        let max_children = children.iter().map(Vec::len).max().unwrap_or(0);
        Ok(RootedTree {
            root,
            parent,
            children,
            subtree_size,
            depth,
            preorder_pos,
            preorder,
            max_children,
        })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, u: usize) -> Option<usize> {
        self.parent[u]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, u: usize) -> &[usize] {
        &self.children[u]
    }

    pub fn subtree_size(&self, u: usize) -> usize {
        self.subtree_size[u]
    }

    pub fn depth(&self, u: usize) -> usize {
        self.depth[u]
    }

    pub fn max_children(&self) -> usize {
        self.max_children
    }

    /// Nodes in depth-first preorder, children in ascending order.
    pub fn preorder(&self) -> &[usize] {
        &self.preorder
    }

    /// Nodes with every child before its parent.
    pub fn postorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.len());
        let mut stack = vec![(self.root, false)];
        while let Some((u, expanded)) = stack.pop() {
            if expanded {
                order.push(u);
            } else {
                stack.push((u, true));
                for &c in self.children[u].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        order
    }

    /// Whether `a` lies in the subtree `T(u)`.
    #[inline]
    pub fn in_subtree(&self, u: usize, a: usize) -> bool {
        let pu = self.preorder_pos[u];
        let pa = self.preorder_pos[a];
        pa >= pu && pa < pu + self.subtree_size[u]
    }

    /// Index of `child` within `children(parent(child))`.
    pub fn child_index(&self, child: usize) -> Option<usize> {
        let p = self.parent[child]?;
        self.children[p].binary_search(&child).ok()
    }

    /// Tree edges as `(parent, child)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (p, v)))
    }

    pub fn lowest_common_ancestor(&self, mut a: usize, mut b: usize) -> usize {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap();
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap();
        }
        while a != b {
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
        }
        a
    }

    /// Number of edges on the tree path between `a` and `b`.
    pub fn tree_distance(&self, a: usize, b: usize) -> usize {
        let l = self.lowest_common_ancestor(a, b);
        self.depth[a] + self.depth[b] - 2 * self.depth[l]
    }
}

/// Root an unrooted spanning tree at its lowest-indexed leaf.
pub fn root_tree(edges: &[TreeEdge], n: usize) -> Result<RootedTree> {
    if n == 0 {
        return Err(Error::NotATree("empty node set".into()));
    }
    if edges.len() != n - 1 {
        return Err(Error::NotATree(format!("{} edges for {n} nodes", edges.len())));
    }
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        if e.a >= n || e.b >= n || e.a == e.b {
            return Err(Error::NotATree(format!("bad edge ({}, {})", e.a, e.b)));
        }
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    let root = if n == 1 {
        0
    } else {
        adj.iter()
            .position(|nb| nb.len() == 1)
            .ok_or_else(|| Error::NotATree("no leaf found".into()))?
    };
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some(u);
                reached += 1;
                queue.push_back(v);
            }
        }
    }
    if reached != n {
        return Err(Error::NotATree("edges do not connect all nodes".into()));
    }
    RootedTree::from_parents(root, parent)
}

/// Breadth-first degree-increasing pass.
///
/// Starting below the root's unique child, each dequeued node `v` hands all
/// of its children to `parent(v)` whenever `|C(parent(v))| + |C(v)| <= limit`,
/// i.e. whenever the parent's resulting child count stays within the limit.
/// Counts are read from the tree as transformed so far. Every tour that
/// conforms to the input tree also conforms to the output.
pub fn degree_increase(tree: &RootedTree, limit: usize) -> Result<RootedTree> {
    if limit == 0 {
        return Err(Error::Config("degree limit must be at least 1".into()));
    }
    let root = tree.root();
    if tree.len() == 1 {
        return Ok(tree.clone());
    }
    let top = match tree.children(root) {
        [only] => *only,
        other => {
            return Err(Error::Invariant(format!(
                "root {root} has {} children, expected exactly one",
                other.len()
            )))
        }
    };
    let mut parent: Vec<Option<usize>> = tree.parents().to_vec();
    let mut children: Vec<Vec<usize>> = (0..tree.len()).map(|u| tree.children(u).to_vec()).collect();

    let mut queue: VecDeque<usize> = children[top].iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        queue.extend(children[v].iter().copied());
        let p = parent[v].expect("queued nodes are never the root");
        if children[v].is_empty() || children[p].len() + children[v].len() > limit {
            continue;
        }
        let moved = std::mem::take(&mut children[v]);
        for &w in &moved {
            parent[w] = Some(p);
        }
        children[p].extend(moved);
        children[p].sort_unstable();
    }
    RootedTree::from_parents(root, parent)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(e: &TreeEdge) -> (usize, usize) {
        (e.a.min(e.b), e.a.max(e.b))
    }
    use crate::instances::{generate_uniform, Metric, Point};

    fn line(n: usize) -> Instance {
        let pts = (0..n).map(|i| Point::new(i as f64, 0.0)).collect();
        Instance::from_points("line", pts, Metric::EuclidReal).unwrap()
    }

    fn path_tree(n: usize) -> RootedTree {
        let parent = (0..n).map(|i| i.checked_sub(1)).collect();
        RootedTree::from_parents(0, parent).unwrap()
    }

    #[test]
    fn mst_small_cases() {
        let two = Instance::from_points("2", vec![Point::new(0.0, 0.0), Point::new(3.0, 4.0)], Metric::EuclidReal)
            .unwrap();
        let e = minimum_spanning_tree(&two);
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].w, 5.0);

        let e = minimum_spanning_tree(&line(3));
        let mut keys: Vec<_> = e.iter().map(key).collect();
        keys.sort();
        assert_eq!(keys, vec![(0, 1), (1, 2)]);
        assert_eq!(tree_weight(&e), 2.0);

        assert!(minimum_spanning_tree(&line(1)).is_empty());
    }

    #[test]
    fn mst_is_deterministic_with_duplicates() {
        let pts = vec![Point::new(0.0, 0.0); 5];
        let inst = Instance::from_points("dup", pts, Metric::EuclidReal).unwrap();
        let e = minimum_spanning_tree(&inst);
        let keys: Vec<_> = e.iter().map(key).collect();
        assert_eq!(keys, vec![(0, 1), (0, 2), (0, 3), (0, 4)]);
    }

    #[test]
    fn rooting_rules() {
        let path = [
            TreeEdge { a: 1, b: 0, w: 1.0 },
            TreeEdge { a: 2, b: 1, w: 1.0 },
        ];
        let t = root_tree(&path, 3).unwrap();
        assert_eq!(t.root(), 0);
        assert_eq!(t.children(0), &[1]);
        assert_eq!(t.children(1), &[2]);

        let star: Vec<_> = (1..5).map(|b| TreeEdge { a: 0, b, w: 1.0 }).collect();
        let t = root_tree(&star, 5).unwrap();
        assert_eq!(t.root(), 1);
        assert_eq!(t.children(1), &[0]);
        assert_eq!(t.children(0), &[2, 3, 4]);
        assert_eq!(t.max_children(), 3);
        assert_eq!(t.subtree_size(1), 5);
        assert_eq!(t.subtree_size(0), 4);
        assert_eq!(t.depth(4), 2);

        assert!(root_tree(&[TreeEdge { a: 3, b: 2, w: 1.0 }], 2).is_err());
        let t = root_tree(&[TreeEdge { a: 1, b: 0, w: 1.0 }], 2).unwrap();
        assert_eq!(t.root(), 0);
    }

    #[test]
    fn rooting_rejects_non_trees() {
        let cyc = [
            TreeEdge { a: 0, b: 1, w: 1.0 },
            TreeEdge { a: 1, b: 2, w: 1.0 },
            TreeEdge { a: 2, b: 0, w: 1.0 },
        ];
        assert!(root_tree(&cyc, 4).is_err());
        let split = [
            TreeEdge { a: 0, b: 1, w: 1.0 },
            TreeEdge { a: 1, b: 0, w: 1.0 },
            TreeEdge { a: 2, b: 3, w: 1.0 },
        ];
        assert!(root_tree(&split, 4).is_err());
        assert!(RootedTree::from_parents(0, vec![None, Some(2), Some(1)]).is_err());
    }

    #[test]
    fn degree_increase_path() {
        let t = path_tree(4);
        let out = degree_increase(&t, 4).unwrap();
        assert_eq!(out.children(1), &[2, 3]);
        assert!(out.children(2).is_empty());
        assert_eq!(out.root(), 0);

        // Parent keeps |C| = 1, v has one child: needs limit >= 2.
        assert_eq!(degree_increase(&t, 1).unwrap(), t);
        assert_eq!(degree_increase(&t, 2).unwrap().children(1), &[2, 3]);

        let two = path_tree(2);
        assert_eq!(degree_increase(&two, 5).unwrap(), two);
    }

    #[test]
    fn degree_increase_uses_current_counts() {
        // 0 - 1 - {2, 3}; 2 - {4}; 3 - {5}
        let parent = vec![None, Some(0), Some(1), Some(1), Some(2), Some(3)];
        let t = RootedTree::from_parents(0, parent).unwrap();
        // v = 2: |C(1)| + |C(2)| = 2 + 1 = 3 <= 3, node 4 moves up and C(1) grows to 3.
        // v = 3: 3 + 1 = 4 > 3, stays.
        let out = degree_increase(&t, 3).unwrap();
        assert_eq!(out.children(1), &[2, 3, 4]);
        assert_eq!(out.children(3), &[5]);
    }

    #[test]
    fn degree_increase_requires_single_root_child() {
        let t = RootedTree::from_parents(0, vec![None, Some(0), Some(0)]).unwrap();
        assert!(matches!(degree_increase(&t, 5), Err(Error::Invariant(_))));
    }

    fn bfs_distance(t: &RootedTree, a: usize, b: usize) -> usize {
        let n = t.len();
        let mut adj = vec![Vec::new(); n];
        for (p, c) in t.edges() {
            adj[p].push(c);
            adj[c].push(p);
        }
        let mut dist = vec![usize::MAX; n];
        dist[a] = 0;
        let mut q = VecDeque::from([a]);
        while let Some(u) = q.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
            }
        }
        dist[b]
    }

    #[test]
    fn tree_distance_matches_bfs() {
        let t = path_tree(3);
        assert_eq!(t.tree_distance(0, 2), 2);
        assert_eq!(t.tree_distance(1, 1), 0);

        let inst = generate_uniform(50, 9, 1.0).unwrap();
        let t = root_tree(&minimum_spanning_tree(&inst), 50).unwrap();
        for a in 0..50 {
            for b in 0..50 {
                assert_eq!(t.tree_distance(a, b), bfs_distance(&t, a, b));
            }
        }
    }

    #[test]
    fn orders_and_membership() {
        let t = RootedTree::from_parents(0, vec![None, Some(0), Some(1), Some(1), Some(3)]).unwrap();
        assert_eq!(t.preorder(), &[0, 1, 2, 3, 4]);
        assert_eq!(t.postorder(), vec![2, 4, 3, 1, 0]);
        assert!(t.in_subtree(3, 4));
        assert!(!t.in_subtree(2, 4));
        assert_eq!(t.child_index(3), Some(1));
        assert_eq!(t.child_index(0), None);
    }
}
