mod common;

use common::{close, instance, mst_tree};
use doubletree::downsweep::{layered_shortest_path, LayeredGraph};
use doubletree::hk::held_karp_lower_bound;
use doubletree::upsweep::upsweep_in_order;
use doubletree::{
    brute_force_optimal, degree_increase, depth_first_shortcut, downsweep, enumerate_conforming_min, is_conforming,
    parse_tsplib, upsweep, write_tsplib, Depth, Instance, Metric, Point, Retention, RootedTree, UpsweepConfig,
};
use proptest::prelude::*;

fn points(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..1000.0f64, 0.0..1000.0f64), n)
}

fn weight(inst: &Instance, tree: &RootedTree, depth: Depth) -> f64 {
    upsweep(inst, tree, UpsweepConfig::new(depth, Retention::WeightOnly))
        .unwrap()
        .weight
}

/// Post-order that visits children from the highest index down.
fn reversed_postorder(tree: &RootedTree) -> Vec<usize> {
    let mut order = Vec::new();
    let mut stack = vec![(tree.root(), false)];
    while let Some((u, done)) = stack.pop() {
        if done {
            order.push(u);
        } else {
            stack.push((u, true));
            stack.extend(tree.children(u).iter().map(|&c| (c, false)));
        }
    }
    order
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn exact_on_small_instances(coords in points(4..=9)) {
        let inst = instance(&coords);
        let tree = mst_tree(&inst);
        let res = upsweep(&inst, &tree, UpsweepConfig::new(Depth::Unlimited, Retention::Bipartitions)).unwrap();
        let best = enumerate_conforming_min(&inst, &tree).unwrap();
        prop_assert!(close(res.weight, best.weight));
        let tour = downsweep(&inst, &tree, &res).unwrap();
        prop_assert!(close(tour.weight, best.weight));
        prop_assert!(is_conforming(&tour, &tree).unwrap());
    }

    #[test]
    fn within_factor_two_and_below_depth_first(coords in points(4..=9)) {
        let inst = instance(&coords);
        let tree = mst_tree(&inst);
        let w = weight(&inst, &tree, Depth::Unlimited);
        prop_assert!(w <= 2.0 * brute_force_optimal(&inst).unwrap().weight * (1.0 + 1e-12));
        prop_assert!(w <= depth_first_shortcut(&inst, &tree).weight * (1.0 + 1e-12));
    }

    #[test]
    fn deeper_search_never_hurts(coords in points(10..=60)) {
        let inst = instance(&coords);
        let tree = mst_tree(&inst);
        let full = weight(&inst, &tree, Depth::Unlimited);
        let mut prev = f64::INFINITY;
        for k in [1, 2, 3, 5, 8, 60] {
            let w = weight(&inst, &tree, Depth::Limited(k));
            prop_assert!(w <= prev * (1.0 + 1e-12), "k {} gave {} after {}", k, w, prev);
            prop_assert!(w >= full * (1.0 - 1e-12));
            prev = w;
        }
        prop_assert!(close(prev, full));
    }

    #[test]
    fn degree_increase_never_hurts(coords in points(4..=40), limit in 3usize..=6) {
        let inst = instance(&coords);
        let tree = mst_tree(&inst);
        let bigger = degree_increase(&tree, limit).unwrap();
        prop_assert_eq!(bigger.root(), tree.root());
        prop_assert!(bigger.max_children() <= limit.max(tree.max_children()));
        prop_assert!(weight(&inst, &bigger, Depth::Unlimited) <= weight(&inst, &tree, Depth::Unlimited) * (1.0 + 1e-12));
    }

    #[test]
    fn child_order_does_not_matter(coords in points(4..=50), k in 1usize..=6) {
        let inst = instance(&coords);
        let tree = mst_tree(&inst);
        let cfg = UpsweepConfig::new(Depth::Limited(k), Retention::WeightOnly);
        let a = upsweep(&inst, &tree, cfg).unwrap().weight;
        let b = upsweep_in_order(&inst, &tree, cfg, &reversed_postorder(&tree)).unwrap().weight;
        prop_assert!(close(a, b));
    }

    #[test]
    fn tours_conform_at_every_depth(coords in points(4..=80), k in 1usize..=6, limit in prop::sample::select(vec![1usize, 3, 4, 5])) {
        let inst = instance(&coords);
        let tree = mst_tree(&inst);
        let tree = if limit > 1 { degree_increase(&tree, limit).unwrap() } else { tree };
        let res = upsweep(&inst, &tree, UpsweepConfig::new(Depth::Limited(k), Retention::Bipartitions)).unwrap();
        let tour = downsweep(&inst, &tree, &res).unwrap();
        prop_assert!(tour.is_permutation(inst.len()));
        prop_assert!(is_conforming(&tour, &tree).unwrap());
        prop_assert!(close(tour.weight, res.weight));
    }

    #[test]
    fn lower_bound_below_tours(coords in points(3..=30)) {
        let inst = instance(&coords);
        let tree = mst_tree(&inst);
        let hk = held_karp_lower_bound(&inst, 200).unwrap();
        prop_assert!(hk <= weight(&inst, &tree, Depth::Unlimited) * (1.0 + 1e-9));
        prop_assert!(hk <= depth_first_shortcut(&inst, &tree).weight * (1.0 + 1e-9));
    }

    #[test]
    fn triangle_inequality(coords in points(3..=50)) {
        let inst = instance(&coords);
        prop_assert_eq!(inst.check_triangle_inequality(1e-9), None);
    }

    #[test]
    fn tsplib_round_trip(coords in prop::collection::vec((-1e7..1e7f64, -1e7..1e7f64), 1..40), rounded in any::<bool>()) {
        let metric = if rounded { Metric::EuclidRoundedTsplib } else { Metric::EuclidReal };
        let pts: Vec<Point> = coords.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let inst = Instance::from_points("rt", pts, metric).unwrap();
        let back = parse_tsplib(&write_tsplib(&inst).unwrap()).unwrap();
        prop_assert_eq!(back.points(), inst.points());
        prop_assert_eq!(back.metric(), inst.metric());
        prop_assert_eq!(back.name(), "rt");
    }

    #[test]
    fn layered_path_is_shortest(
        sizes in prop::collection::vec(1usize..=4, 2..=5),
        weights in prop::collection::vec(prop::option::weighted(0.85, 0.0..10.0f64), 5 * 16),
    ) {
        let arc = |layer: usize, s: usize, t: usize| weights[(layer * 16 + s * 4 + t) % weights.len()];
        let g = LayeredGraph { layer_sizes: sizes.clone(), arc };
        // exhaustive: every choice of one vertex per layer
        let total: usize = sizes.iter().product();
        let mut best: Option<f64> = None;
        for code in 0..total {
            let mut c = code;
            let pick: Vec<usize> = sizes.iter().map(|&s| { let v = c % s; c /= s; v }).collect();
            let w: Option<f64> = (0..sizes.len() - 1).map(|l| arc(l, pick[l], pick[l + 1])).sum();
            if let Some(w) = w {
                if best.is_none_or(|b| w < b) {
                    best = Some(w);
                }
            }
        }
        match (layered_shortest_path(&g), best) {
            (Ok(p), Some(b)) => {
                prop_assert!((p.weight - b).abs() < 1e-9);
                let w: f64 = (0..sizes.len() - 1).map(|l| arc(l, p.vertices[l], p.vertices[l + 1]).unwrap()).sum();
                prop_assert!((w - p.weight).abs() < 1e-9);
            }
            (Err(_), None) => {}
            (Err(_), Some(b)) => prop_assert!(false, "no path reported but {} exists", b),
            (Ok(p), None) => prop_assert!(false, "path {:?} reported where none exists", p),
        }
    }
}
