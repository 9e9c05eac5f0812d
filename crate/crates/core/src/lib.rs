//! Minimum-weight double-tree shortcutting for metric TSP.
//!
//! Among all tours obtained by shortcutting an Euler tour of the doubled
//! minimum spanning tree, [`upsweep`] finds the weight of the lightest one in
//! `O(4^d n^2)` time and `O(2^d n)` space, where `d` is the largest child
//! count in the rooted tree, and [`downsweep`] rebuilds that tour. The
//! `DT_{D,k}` variants bound the search depth (`k`) and enlarge the tour
//! neighbourhood by raising node degrees up to `D` ([`degree_increase`]).
//!
//! ```
//! use doubletree::{generate_uniform, solve, Heuristic};
//!
//! let inst = generate_uniform(200, 7, 1.0).unwrap();
//! let tour = solve(&inst, Heuristic::FULL).unwrap();
//! assert!(tour.is_permutation(200));
//! ```

pub mod bench;
pub mod downsweep;
pub mod error;
pub mod hk;
pub mod instances;
pub mod oracles;
pub mod tree;
pub mod upsweep;

pub use bench::{Heuristic, RunRecord};
pub use downsweep::{downsweep, reconstruct_path, Tour};
pub use error::{Error, Result};
pub use hk::held_karp_lower_bound;
pub use instances::{generate_clustered, generate_uniform, parse_tsplib, write_tsplib, Instance, Metric, Point};
pub use oracles::{brute_force_optimal, depth_first_shortcut, enumerate_conforming_min, is_conforming};
pub use tree::{degree_increase, minimum_spanning_tree, root_tree, tree_weight, RootedTree, TreeEdge};
pub use upsweep::{upsweep, ChildMask, Depth, Retention, UpsweepConfig, UpsweepResult};

/// Build the rooted minimum spanning tree, apply the heuristic and return its tour.
pub fn solve(inst: &Instance, h: Heuristic) -> Result<Tour> {
    let tree = root_tree(&minimum_spanning_tree(inst), inst.len())?;
    let tree = if h.degree_limit > 1 {
        degree_increase(&tree, h.degree_limit)?
    } else {
        tree
    };
    let up = upsweep(inst, &tree, UpsweepConfig::new(h.depth, Retention::Bipartitions))?;
    downsweep(inst, &tree, &up)
}
