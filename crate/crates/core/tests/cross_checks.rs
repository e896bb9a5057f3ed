use galled_census_core::dup_trees::{
    dup_by_repeats, dup_by_repeats_row, dup_total, dup_total_via_relation, enumerate_dup_trees, BTable,
};
use galled_census_core::galled::{
    brute_force_galled, for_each_phylo_tree, galled_joint, galled_max_retic, galled_total, lower_bound_l,
    lower_bound_l_joint, upper_bound_u,
};
use galled_census_core::one_component::{one_component_count, one_component_total, NTable};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// `sum_T prod_v 1-GN_{c(v)}` over every phylogenetic tree `T`.
fn tree_sum_upper_bound(n: usize, table: &NTable) -> BigUint {
    let weights: Vec<BigUint> = (0..=n)
        .map(|c| if c < 2 { BigUint::one() } else { one_component_total(table, c).unwrap() })
        .collect();
    let mut sum = BigUint::zero();
    for_each_phylo_tree(n, |tree| {
        let mut w = BigUint::one();
        for children in tree.internal_nodes() {
            w *= &weights[children.len()];
        }
        sum += w;
    });
    sum
}

#[test]
fn recursion_matches_brute_force() {
    let t = NTable::build(8).unwrap();
    for n in 1..=6 {
        assert_eq!(galled_joint(n, &t).unwrap(), brute_force_galled(n, &t).unwrap(), "n={n}");
    }
}

#[test]
fn upper_bound_matches_tree_sum() {
    let t = NTable::build(8).unwrap();
    for n in 1..=7 {
        assert_eq!(upper_bound_u(n, &t).unwrap(), tree_sum_upper_bound(n, &t), "n={n}");
    }
}

#[test]
fn sandwich_and_cellwise_lower_bound() {
    let t = NTable::build(11).unwrap();
    for n in 1..=10 {
        let joint = galled_joint(n, &t).unwrap();
        let gn = joint.total().clone();
        assert!(lower_bound_l(n, &t).unwrap() <= gn, "n={n}");
        assert!(gn <= upper_bound_u(n, &t).unwrap(), "n={n}");
        for (k, j, c) in joint.cells() {
            assert!(lower_bound_l_joint(n, k, j, &t).unwrap() <= *c, "n={n} k={k} j={j}");
        }
    }
    assert_eq!(lower_bound_l(3, &t).unwrap(), galled_total(3, &t).unwrap());
}

#[test]
fn dup_paths_agree() {
    let t = NTable::build(31).unwrap();
    let b = BTable::build(31).unwrap();
    for n in 1..=30 {
        let du = dup_total(&b, n).unwrap();
        assert_eq!(du, dup_total_via_relation(&t, n).unwrap(), "n={n}");
        let row: BigUint = dup_by_repeats_row(&t, n).unwrap().into_iter().sum();
        assert_eq!(row, du, "n={n}");
    }
    for n in 1..=4 {
        let free: BigUint = enumerate_dup_trees(n, true).unwrap().into_iter().sum();
        assert_eq!(free, one_component_total(&t, n).unwrap());
        let all = enumerate_dup_trees(n, false).unwrap();
        for (k, c) in all.iter().enumerate() {
            assert_eq!(c, &dup_by_repeats(&t, n, k).unwrap());
        }
    }
}

#[test]
fn max_retic_closed_form() {
    let t = NTable::build(9).unwrap();
    for n in 2..=8 {
        assert_eq!(
            galled_joint(n, &t).unwrap().count(2 * n - 2, n - 2),
            galled_max_retic(n).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn joint_table_invariants(n in 2usize..=14) {
        let t = NTable::build(n + 1).unwrap();
        let joint = galled_joint(n, &t).unwrap();
        let by_retic: BigUint = (0..=2 * n - 2).map(|k| joint.by_retic(k)).sum();
        prop_assert_eq!(&by_retic, joint.total());
        for (k, j, c) in joint.cells() {
            if j > k || k > n + j {
                prop_assert!(c.is_zero());
            }
            if j == 0 && k <= n {
                prop_assert_eq!(c, &one_component_count(&t, n, k).unwrap());
            }
        }
    }

    #[test]
    fn dup_row_is_monotone_in_leaf_choice(n in 1usize..=20, k in 0usize..=20) {
        prop_assume!(k <= n);
        let t = NTable::build(n + 1).unwrap();
        // Choosing which labels repeat can only add dup-trees beyond the free ones.
        prop_assert!(dup_by_repeats(&t, n, k).unwrap() >= one_component_count(&t, n, k).unwrap());
    }
}
