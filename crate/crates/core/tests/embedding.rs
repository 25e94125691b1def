//! Tree invariants under rerooting and subdivision, and the embedding of the
//! minimal nonlinear tree into larger hosts.

use std::collections::BTreeSet;

use proptest::prelude::*;
use treebraid_core::{
    check_type_preservation, classify, critical_cells, embed_t_min, raag_status, theta_cell,
    CellStatus, ConfigSpace, Endpoint, Item, PlaneTree, ROOT,
};

/// A random tree on `parents.len() + 2` vertices: vertex 1 hangs off the
/// root, and vertex `i + 2` hangs off some earlier non-root vertex.
fn random_tree(parents: &[usize]) -> PlaneTree {
    let m = parents.len() + 2;
    let mut children = vec![Vec::new(); m];
    children[0].push(1);
    for (i, &p) in parents.iter().enumerate() {
        let v = i + 2;
        children[1 + p % (v - 1)].push(v);
    }
    PlaneTree::order_vertices(0, &children, None).unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn linearity_survives_reroot_and_subdivision(parents in prop::collection::vec(0usize..64, 1..14), n in 1usize..6) {
        let t = random_tree(&parents);
        let verdict = raag_status(&t, n);
        let (sub, map) = t.subdivide_for(n);
        prop_assert!(sub.is_sufficiently_subdivided(n).unwrap());
        prop_assert_eq!(sub.is_linear(), t.is_linear());
        prop_assert_eq!(raag_status(&sub, n), verdict);
        prop_assert_eq!(sub.essential_vertices().len(), t.essential_vertices().len());
        for (v, &image) in map.iter().enumerate().take(t.vertex_count()) {
            prop_assert_eq!(sub.degree(image), t.degree(v));
        }
        for leaf in (1..t.vertex_count()).filter(|&v| t.degree(v) == 1) {
            let (r, renumber) = t.reroot(leaf).unwrap();
            prop_assert_eq!(renumber[leaf], ROOT);
            prop_assert_eq!(r.is_linear(), t.is_linear());
            prop_assert_eq!(raag_status(&r, n), verdict);
            for (v, &image) in renumber.iter().enumerate() {
                prop_assert_eq!(r.degree(image), t.degree(v));
            }
        }
    }
}

#[test]
fn rerooting_rejects_inner_vertices() {
    let t = PlaneTree::canonical_t_min();
    assert!(t.reroot(3).is_err());
    assert!(t.reroot(99).is_err());
    assert_eq!(t.reroot(ROOT).unwrap().0, t);
}

fn check_host(n: usize) {
    let (host, _) = PlaneTree::canonical_t_min().subdivide_for(n);
    let emb = embed_t_min(&host, n).unwrap();
    assert_eq!(emb.strands(), n);
    assert_eq!(emb.basepoint_gap, n - 4);
    assert_eq!(emb.host.distance(ROOT, emb.image_of(ROOT)), n - 4);
    assert_eq!(
        raag_status(&emb.source, 4),
        raag_status(&PlaneTree::canonical_t_min(), 4)
    );

    let source = ConfigSpace::new(emb.source.clone(), 4).unwrap();
    let mut images = BTreeSet::new();
    for dim in 0..=2 {
        for c in critical_cells(&source, dim) {
            let img = theta_cell(&c, &emb).unwrap();
            assert_eq!(img.len(), n);
            assert_eq!(
                classify(&emb.host, &img),
                CellStatus::Critical,
                "{c} -> {img}"
            );
            assert!(images.insert(img));
        }
    }

    // Breaking an edge before or after the map gives the same cell.
    for c in source.enumerate(2).iter().step_by(11) {
        let img = theta_cell(c, &emb).unwrap();
        for e in c.edges() {
            let host_edge = img
                .items()
                .iter()
                .filter_map(|it| it.as_edge())
                .find(|he| he.initial() == emb.image_of(e.initial()))
                .unwrap();
            assert_eq!(
                emb.host.parent(host_edge.initial()),
                Some(emb.image_of(emb.source.terminal(e)))
            );
            for end in [Endpoint::Initial, Endpoint::Terminal] {
                let below = c.break_edges(&emb.source, &[(e, end)]).unwrap();
                let host_below = img.break_edges(&emb.host, &[(host_edge, end)]).unwrap();
                assert_eq!(theta_cell(&below, &emb).unwrap(), host_below);
            }
        }
    }
    // Every image carries all the fillers.
    for c in source.enumerate(1).iter().step_by(5) {
        let img = theta_cell(c, &emb).unwrap();
        for &f in &emb.fillers {
            assert!(img.items().contains(&Item::vertex(f)));
        }
    }
}

#[test]
fn five_strand_host() {
    check_host(5);
}

#[test]
fn six_strand_host() {
    check_host(6);
}

#[test]
fn four_strand_types_are_preserved_in_larger_hosts() {
    for n in [5, 6] {
        let (host, _) = PlaneTree::canonical_t_min().subdivide_for(n);
        let emb = embed_t_min(&host, n).unwrap();
        let report = check_type_preservation(&emb, 2).unwrap();
        assert!(report.passed(), "n = {n}: {:?}", report.failures.first());
    }
}
