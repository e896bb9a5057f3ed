//! Dup-trees: rooted binary trees on `n` labels, each used once or twice.
//!
//! `B_n^(k)` follows the sibling of the one-component recurrence
//!
//! ```text
//! B_n^(k) = (n+k-2) B_n^(k-1)
//!         + 1/2 sum_{d=1}^{k-1} C(k-1,d) (2d-1)!! (B_{n-d}^(k-1-d) - B_{n-d+1}^(k-1-d))
//! ```
//!
//! seeded by `B_n^(0) = (2n-5)!!` and `B_n^(1) = (n-1)(2n-5)!!`, and
//! `DU_n = sum_k C(n,k) B_{n+1}^(k)`. Twin-cherry-free dup-trees are in
//! bijection with one-component galled networks, which gives a second
//! route to `DU_n` through the `N` table.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::one_component::{
    one_component_count, one_component_row, one_component_total, NTable, Recurrence, Triangle,
};
use crate::series::binomial;

/// Largest `n` accepted by [`enumerate_dup_trees`].
pub const DUP_ORACLE_MAX_N: usize = 4;

/// Memoized `B_n^(k)` for `2 <= n <= n_max`, `0 <= k <= n-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BTable(Triangle);

impl BTable {
    pub fn build(n_max: usize) -> Result<BTable> {
        Triangle::build(Recurrence::DupTree, n_max).map(BTable)
    }

    /// Restores a table from rows indexed `rows[n][k]` (rows 0 and 1 empty).
    pub fn from_rows(rows: Vec<Vec<BigUint>>) -> Result<BTable> {
        Triangle::from_rows(Recurrence::DupTree, rows).map(BTable)
    }

    pub fn n_max(&self) -> usize {
        self.0.n_max()
    }

    pub fn get(&self, n: usize, k: usize) -> Option<&BigUint> {
        self.0.get(n, k)
    }

    /// `B_n^(k)`; a domain error outside the table.
    pub fn value(&self, n: usize, k: usize) -> Result<BigUint> {
        self.0.value(n, k)
    }

    pub fn rows(&self) -> &[Vec<BigUint>] {
        self.0.rows()
    }
}

/// `DU_n = sum_k C(n,k) B_{n+1}^(k)`.
pub fn dup_total(table: &BTable, n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::Domain("dup-trees need at least one label".into()));
    }
    table.0.require(n + 1)?;
    (0..=n).try_fold(BigUint::zero(), |acc, k| {
        Ok(acc + binomial(n, k) * table.value(n + 1, k)?)
    })
}

/// `DU_n = sum_k 2^(n-k) 1-GN_{n,k}`.
pub fn dup_total_via_relation(table: &NTable, n: usize) -> Result<BigUint> {
    let row = one_component_row(table, n)?;
    Ok(row
        .into_iter()
        .enumerate()
        .map(|(k, c)| c << (n - k))
        .sum())
}

/// `DU_{n,k} = sum_{l<=k} C(n-l, k-l) 1-GN_{n,l}`: dup-trees with `k` labels used twice.
pub fn dup_by_repeats(table: &NTable, n: usize, k: usize) -> Result<BigUint> {
    if k > n {
        return Err(Error::Domain(format!(
            "at most {n} of {n} labels can repeat, asked for {k}"
        )));
    }
    let row = one_component_row(table, n)?;
    Ok(row
        .into_iter()
        .enumerate()
        .take(k + 1)
        .map(|(l, c)| binomial(n - l, k - l) * c)
        .sum())
}

/// `[DU_{n,0}, ..., DU_{n,n}]`.
pub fn dup_by_repeats_row(table: &NTable, n: usize) -> Result<Vec<BigUint>> {
    let row = one_component_row(table, n)?;
    Ok((0..=n)
        .map(|k| {
            row.iter()
                .enumerate()
                .take(k + 1)
                .map(|(l, c)| binomial(n - l, k - l) * c)
                .sum()
        })
        .collect())
}

/// Twin-cherry-free dup-trees on `n` labels; equal to `1-GN_n`.
pub fn fdu_total(table: &NTable, n: usize) -> Result<BigUint> {
    one_component_total(table, n)
}

/// Twin-cherry-free dup-trees with `k` repeated labels; equal to `1-GN_{n,k}`.
pub fn fdu_by_repeats(table: &NTable, n: usize, k: usize) -> Result<BigUint> {
    one_component_count(table, n, k)
}

#[derive(Debug, Clone)]
enum Tree {
    Leaf(usize),
    Node(Box<Tree>, Box<Tree>),
}

impl Tree {
    fn canonical(&self) -> String {
        match self {
            Tree::Leaf(l) => l.to_string(),
            Tree::Node(a, b) => {
                let (a, b) = (a.canonical(), b.canonical());
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                format!("({lo},{hi})")
            }
        }
    }

    /// Every tree obtained by grafting a new leaf onto one edge, root edge included.
    fn insertions(&self, label: usize) -> Vec<Tree> {
        let mut out = vec![Tree::Node(Box::new(self.clone()), Box::new(Tree::Leaf(label)))];
        if let Tree::Node(a, b) = self {
            for t in a.insertions(label) {
                out.push(Tree::Node(Box::new(t), b.clone()));
            }
            for t in b.insertions(label) {
                out.push(Tree::Node(a.clone(), Box::new(t)));
            }
        }
        out
    }

    fn has_twin_cherry(&self) -> bool {
        match self {
            Tree::Leaf(_) => false,
            Tree::Node(a, b) => match (a.as_ref(), b.as_ref()) {
                (Tree::Leaf(x), Tree::Leaf(y)) => x == y,
                _ => a.has_twin_cherry() || b.has_twin_cherry(),
            },
        }
    }
}

/// Distinct binary trees on the label multiset, in canonical form.
fn trees_on_multiset(labels: &[usize]) -> BTreeMap<String, Tree> {
    let mut stage = BTreeMap::new();
    let Some((&first, rest)) = labels.split_first() else {
        return stage;
    };
    stage.insert(first.to_string(), Tree::Leaf(first));
    for &label in rest {
        let mut next = BTreeMap::new();
        for tree in stage.values() {
            for t in tree.insertions(label) {
                next.entry(t.canonical()).or_insert(t);
            }
        }
        stage = next;
    }
    stage
}

/// Counts dup-trees on labels `1..=n` by number of repeated labels by
/// generating every tree explicitly. Refuses `n > 4`.
pub fn enumerate_dup_trees(n: usize, twin_cherry_free: bool) -> Result<Vec<BigUint>> {
    if n == 0 {
        return Err(Error::Domain("dup-trees need at least one label".into()));
    }
    if n > DUP_ORACLE_MAX_N {
        return Err(Error::ResourceGuard {
            what: "dup-tree enumeration",
            limit: DUP_ORACLE_MAX_N,
            requested: n,
        });
    }
    let mut counts = vec![0u64; n + 1];
    for mask in 0u32..(1 << n) {
        let mut labels: Vec<usize> = (1..=n).collect();
        labels.extend((1..=n).filter(|l| mask & (1 << (l - 1)) != 0));
        let trees = trees_on_multiset(&labels);
        let kept = trees
            .values()
            .filter(|t| !twin_cherry_free || !t.has_twin_cherry())
            .count();
        counts[mask.count_ones() as usize] += kept as u64;
    }
    Ok(counts.into_iter().map(BigUint::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn b_values() {
        let b = BTable::build(8).unwrap();
        assert_eq!(b.value(3, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(b.value(3, 1).unwrap(), BigUint::from(2u32));
        assert_eq!(b.value(3, 2).unwrap(), BigUint::from(6u32));
        assert!(matches!(b.value(3, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn small_totals() {
        let b = BTable::build(6).unwrap();
        let t = NTable::build(6).unwrap();
        assert_eq!(dup_total(&b, 1).unwrap(), BigUint::from(2u32));
        assert_eq!(dup_total(&b, 2).unwrap(), BigUint::from(11u32));
        assert_eq!(dup_total_via_relation(&t, 1).unwrap(), BigUint::from(2u32));
        assert_eq!(dup_total_via_relation(&t, 2).unwrap(), BigUint::from(11u32));
        assert_eq!(dup_by_repeats_row(&t, 2).unwrap(), ints(&[1, 4, 6]));
        assert_eq!(dup_by_repeats(&t, 2, 2).unwrap(), BigUint::from(6u32));
        assert!(matches!(dup_by_repeats(&t, 2, 3), Err(Error::Domain(_))));
        assert_eq!(fdu_total(&t, 2).unwrap(), BigUint::from(6u32));
        assert_eq!(fdu_total(&t, 3).unwrap(), BigUint::from(168u32));
    }

    #[test]
    fn oracle_boundaries() {
        assert_eq!(enumerate_dup_trees(1, true).unwrap(), ints(&[1, 0]));
        assert_eq!(enumerate_dup_trees(1, false).unwrap(), ints(&[1, 1]));
        assert_eq!(enumerate_dup_trees(2, true).unwrap(), ints(&[1, 2, 3]));
        assert_eq!(enumerate_dup_trees(2, false).unwrap(), ints(&[1, 4, 6]));
        assert!(matches!(
            enumerate_dup_trees(5, false),
            Err(Error::ResourceGuard { limit: 4, .. })
        ));
    }

    #[test]
    fn distinct_labels_give_binary_tree_count() {
        // (2n-3)!! rooted binary trees on n distinct labels.
        for (n, e) in [(1usize, 1usize), (2, 1), (3, 3), (4, 15), (5, 105)] {
            let labels: Vec<usize> = (1..=n).collect();
            assert_eq!(trees_on_multiset(&labels).len(), e);
        }
    }

    #[test]
    fn oracle_matches_formulas() {
        let t = NTable::build(6).unwrap();
        for n in 1..=4 {
            assert_eq!(enumerate_dup_trees(n, false).unwrap(), dup_by_repeats_row(&t, n).unwrap());
            assert_eq!(enumerate_dup_trees(n, true).unwrap(), one_component_row(&t, n).unwrap());
        }
    }

    #[test]
    fn free_fraction_moves_toward_limit() {
        let b = BTable::build(31).unwrap();
        let t = NTable::build(31).unwrap();
        let limit = (-0.5f64).exp();
        let gaps: Vec<f64> = [10usize, 20, 30]
            .iter()
            .map(|&n| {
                let r = crate::series::ratio_to_f64(
                    &fdu_total(&t, n).unwrap(),
                    &dup_total(&b, n).unwrap(),
                );
                assert!(r > 0.0 && r < 1.0);
                (r - limit).abs()
            })
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    }
}
