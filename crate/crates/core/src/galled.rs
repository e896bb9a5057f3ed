//! Galled networks through their tree decomposition.
//!
//! Every galled network with `n` leaves arises from a multifurcating
//! phylogenetic tree on `n` leaves by replacing each internal node `v`
//! with a one-component galled network on `c(v)` leaves. Children of `v`
//! that are internal must hang below a reticulation; leaf children may or
//! may not. A node with `r` reticulation children contributes
//! `N_{c(v)+1}^(r)` networks.
//!
//! Two marks are tracked: `u` counts inner reticulations (one per
//! non-root internal node of the tree) and `w` counts reticulations.
//!
//! [`galled_joint`] evaluates the decomposition with a labelled-product
//! recursion over `h_m = m! [z^m] H(z, u, w)`, where `H` is the marked EGF
//! of trees rooted at an internal node. [`galled_egf`] solves the same
//! fixed point directly on [`MarkedSeries`]; [`brute_force_galled`] walks
//! every tree. Tests pin all three against each other.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::one_component::{one_component_total, NTable};
use crate::series::{
    binomial, double_factorial, factorial, reciprocal_power, series_mul, ExactRational, MarkCaps,
    MarkPoly, MarkedSeries,
};

/// Largest `n` accepted by [`brute_force_galled`].
pub const BRUTE_FORCE_MAX_N: usize = 8;

/// Exact counts `GN_{n,k,j}` for one `n`: `k` reticulations, `j` of them inner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GalledJointTable {
    n: usize,
    /// `counts[k][j]`, `0 <= k <= 2n-2`, `0 <= j <= min(n-2, k)`.
    counts: Vec<Vec<BigUint>>,
    total: BigUint,
}

impl GalledJointTable {
    fn empty(n: usize) -> Self {
        let max_k = (2 * n).saturating_sub(2);
        let max_j = n.saturating_sub(2);
        let counts = (0..=max_k)
            .map(|k| vec![BigUint::zero(); max_j.min(k) + 1])
            .collect();
        GalledJointTable {
            n,
            counts,
            total: BigUint::zero(),
        }
    }

    fn add(&mut self, k: usize, j: usize, v: &BigUint) -> Result<()> {
        let slot = self
            .counts
            .get_mut(k)
            .and_then(|row| row.get_mut(j))
            .ok_or_else(|| {
                Error::Contract(format!(
                    "cell (k={k}, j={j}) lies outside the support for n={}",
                    self.n
                ))
            })?;
        *slot += v;
        self.total += v;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_retic(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn max_inner(&self) -> usize {
        self.n.saturating_sub(2)
    }

    /// `GN_{n,k,j}`; zero outside the support.
    pub fn count(&self, k: usize, j: usize) -> BigUint {
        self.counts
            .get(k)
            .and_then(|row| row.get(j))
            .cloned()
            .unwrap_or_default()
    }

    /// `GN_n`.
    pub fn total(&self) -> &BigUint {
        &self.total
    }

    /// `GN_{n,k} = sum_j GN_{n,k,j}`.
    pub fn by_retic(&self, k: usize) -> BigUint {
        self.counts
            .get(k)
            .map(|row| row.iter().sum())
            .unwrap_or_default()
    }

    /// Tree nodes of every network with `k` reticulations: `n + k - 1`.
    pub fn tree_node_count(&self, k: usize) -> usize {
        self.n + k - 1
    }

    /// All in-support cells as `(k, j, count)`, zeros included.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, &BigUint)> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(k, row)| row.iter().enumerate().map(move |(j, c)| (k, j, c)))
    }
}

/// Coefficient algebra for the decomposition recursion.
trait Marks: Clone {
    fn nil() -> Self;
    fn unit() -> Self;
    fn vanishes(&self) -> bool;
    fn add_scaled(&mut self, other: &Self, factor: &BigUint);
    fn mul(&self, other: &Self) -> Self;
    /// A leaf child sitting below a reticulation.
    fn marked_leaf() -> Self;
    /// A subtree child with weight `h`; always below an inner reticulation.
    fn subtree(h: &Self) -> Self;
}

impl Marks for BigUint {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_scaled(&mut self, other: &Self, factor: &BigUint) {
        *self += other * factor;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn marked_leaf() -> Self {
        One::one()
    }
    fn subtree(h: &Self) -> Self {
        h.clone()
    }
}

/// Dense integer polynomial in `u` (inner reticulations) and `v` (leaves
/// below a reticulation), indexed `[u][v]`. A network's reticulation count
/// is the sum of the two degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
struct JointPoly {
    rows: Vec<Vec<BigUint>>,
}

impl JointPoly {
    fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    fn resized(&self, u_len: usize, w_len: usize) -> Vec<Vec<BigUint>> {
        let mut rows = self.rows.clone();
        rows.resize(u_len, Vec::new());
        for r in rows.iter_mut() {
            r.resize(w_len, BigUint::zero());
        }
        rows
    }
}

impl Marks for JointPoly {
    fn nil() -> Self {
        JointPoly { rows: Vec::new() }
    }
    fn unit() -> Self {
        JointPoly {
            rows: vec![vec![BigUint::one()]],
        }
    }
    fn vanishes(&self) -> bool {
        self.rows.iter().flatten().all(|c| c.is_zero())
    }
    fn add_scaled(&mut self, other: &Self, factor: &BigUint) {
        if factor.is_zero() || Marks::vanishes(other) {
            return;
        }
        let u_len = self.rows.len().max(other.rows.len());
        let w_len = self.width().max(other.width());
        self.rows = self.resized(u_len, w_len);
        for (dst, src) in self.rows.iter_mut().zip(&other.rows) {
            for (d, s) in dst.iter_mut().zip(src) {
                if !s.is_zero() {
                    *d += s * factor;
                }
            }
        }
    }
    fn mul(&self, other: &Self) -> Self {
        if Marks::vanishes(self) || Marks::vanishes(other) {
            return JointPoly::nil();
        }
        let u_len = self.rows.len() + other.rows.len() - 1;
        let w_len = self.width() + other.width() - 1;
        // Kronecker substitution: pack each grid into one integer with
        // slots wide enough that no product coefficient overflows.
        let max_bits = |p: &JointPoly| p.rows.iter().flatten().map(BigUint::bits).max().unwrap_or(0);
        let terms = (self.rows.len() * self.width()).min(other.rows.len() * other.width());
        let bits = max_bits(self) + max_bits(other) + u64::from(usize::BITS - terms.leading_zeros()) + 1;
        let slot = bits.div_ceil(32) as usize;
        let pack = |p: &JointPoly| {
            let mut digits = vec![0u32; (u_len * w_len) * slot];
            for (u, row) in p.rows.iter().enumerate() {
                for (w, c) in row.iter().enumerate() {
                    let at = (u * w_len + w) * slot;
                    for (i, d) in c.to_u32_digits().into_iter().enumerate() {
                        digits[at + i] = d;
                    }
                }
            }
            BigUint::new(digits)
        };
        let digits = (pack(self) * pack(other)).to_u32_digits();
        let rows = (0..u_len)
            .map(|u| {
                (0..w_len)
                    .map(|w| {
                        let at = (u * w_len + w) * slot;
                        let hi = (at + slot).min(digits.len());
                        if at >= hi {
                            BigUint::zero()
                        } else {
                            BigUint::from_slice(&digits[at..hi])
                        }
                    })
                    .collect()
            })
            .collect();
        JointPoly { rows }
    }
    fn marked_leaf() -> Self {
        JointPoly {
            rows: vec![vec![BigUint::zero(), BigUint::one()]],
        }
    }
    fn subtree(h: &Self) -> Self {
        // u * h
        let mut rows = vec![vec![BigUint::zero(); h.width()]];
        rows.extend(h.rows.iter().cloned());
        JointPoly { rows }
    }
}

/// `h_m = m! [z^m] H` for `m = 0..=n` (entries 0 and 1 are zero).
///
/// The root of a tree on `m >= 2` labels has `c >= 2` children, `r` of which
/// are marked (below a reticulation). Unmarked children are leaves; marked
/// children are leaves or subtrees. With `Q[r][s]` the weighted number of
/// ways to lay out `r` marked children on `s` labels,
///
/// ```text
/// h_m = sum_{r, f : r + f >= 2} N_{r+f+1}^(r) C(m, f) Q[r][m-f]
/// Q[r][s] = sum_t C(s-1, t-1) g_t Q[r-1][s-t],   g_1 = v, g_t = u h_t.
/// ```
///
/// Every marked child carries one reticulation, so marking marked leaves
/// with `v` and subtrees with `u` records the reticulation count as `j + v`.
fn decomposition<M: Marks>(n: usize, table: &NTable) -> Result<Vec<M>> {
    table.require(n + 1)?;
    let mut h: Vec<M> = vec![M::nil(); n + 1];
    let mut g: Vec<M> = vec![M::nil(); n + 1];
    // q[r][s]
    let mut q: Vec<Vec<M>> = vec![vec![M::nil(); n + 1]; n + 1];
    q[0][0] = M::unit();
    if n >= 1 {
        g[1] = M::marked_leaf();
        q[1][1] = g[1].clone();
    }
    for m in 2..=n {
        for r in 2..=m {
            let mut acc = M::nil();
            for t in 1..=(m - r + 1) {
                if g[t].vanishes() || q[r - 1][m - t].vanishes() {
                    continue;
                }
                acc.add_scaled(&g[t].mul(&q[r - 1][m - t]), &binomial(m - 1, t - 1));
            }
            q[r][m] = acc;
        }
        let mut hm = M::nil();
        for r in 0..=m {
            for f in 0..=(m - r) {
                let c = r + f;
                if c < 2 || q[r][m - f].vanishes() {
                    continue;
                }
                let root = table.value(c + 1, r)? * binomial(m, f);
                hm.add_scaled(&q[r][m - f], &root);
            }
        }
        g[m] = M::subtree(&hm);
        q[1][m] = g[m].clone();
        h[m] = hm;
    }
    Ok(h)
}

/// `GN_{n,k,j}` for all `k, j`. Needs the table through `n + 1`.
pub fn galled_joint(n: usize, table: &NTable) -> Result<GalledJointTable> {
    if n == 0 {
        return Err(Error::Domain("networks need at least one leaf".into()));
    }
    let mut out = GalledJointTable::empty(n);
    if n == 1 {
        out.add(0, 0, &BigUint::one())?;
        return Ok(out);
    }
    let h = decomposition::<JointPoly>(n, table)?;
    for (j, row) in h[n].rows.iter().enumerate() {
        for (v, c) in row.iter().enumerate() {
            if !c.is_zero() {
                out.add(j + v, j, c)?;
            }
        }
    }
    Ok(out)
}

/// `[GN_0, GN_1, ..., GN_n]` with `GN_0 = 0`, using unmarked weights.
pub fn galled_totals(n: usize, table: &NTable) -> Result<Vec<BigUint>> {
    let mut h = decomposition::<BigUint>(n, table)?;
    if n >= 1 {
        h[1] = BigUint::one();
    }
    Ok(h)
}

/// `GN_n`, the number of galled networks with `n` leaves.
pub fn galled_total(n: usize, table: &NTable) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::Domain("networks need at least one leaf".into()));
    }
    Ok(galled_totals(n, table)?.swap_remove(n))
}

/// Per-node weight `W(a, b; w) = sum_j C(a, j-b) N_{a+b+1}^(j) w^j` for a node
/// with `a` leaf children and `b` internal children.
fn node_weight(a: usize, b: usize, table: &NTable) -> Result<Vec<BigUint>> {
    let c = a + b;
    let mut poly = vec![BigUint::zero(); c + 1];
    for (j, slot) in poly.iter_mut().enumerate().skip(b) {
        *slot = binomial(a, j - b) * table.value(c + 1, j)?;
    }
    Ok(poly)
}

/// The marked EGF `H(z, u, w)` of trees rooted at an internal node, solved
/// as the fixed point of
///
/// ```text
/// H = sum_{a+b >= 2} W(a, b; w) z^a / a! (u H)^b / b!
/// ```
///
/// by `n` rounds of substitution starting from `H = 0`. Each round fixes at
/// least one more z-degree since `H` has valuation 2.
pub fn galled_egf(n: usize, table: &NTable) -> Result<MarkedSeries> {
    if n == 0 {
        return Err(Error::Domain("networks need at least one leaf".into()));
    }
    table.require(n + 1)?;
    let caps = MarkCaps::for_leaves(n);
    // leaf_parts[b] = sum_a W(a, b) z^a / a!
    let max_b = n / 2;
    let mut leaf_parts = Vec::with_capacity(max_b + 1);
    for b in 0..=max_b {
        let mut s = MarkedSeries::zero(n, caps);
        for a in 0..=n.saturating_sub(b) {
            if a + b < 2 {
                continue;
            }
            let inv_fact = ExactRational::new(BigInt::one(), BigInt::from(factorial(a)));
            let mut p = MarkPoly::zero(caps);
            for (j, c) in node_weight(a, b, table)?.into_iter().enumerate() {
                p.add_term(0, j, ExactRational::from_integer(c.into()) * &inv_fact);
            }
            s.set_coeff(a, p)?;
        }
        leaf_parts.push(s);
    }

    let mut h = MarkedSeries::zero(n, caps);
    for _ in 0..n {
        let uh = h.shift_marks(1, 0);
        let mut power = MarkedSeries::one(n, caps); // (uH)^b / b!
        let mut next = MarkedSeries::zero(n, caps);
        for (b, part) in leaf_parts.iter().enumerate() {
            if b > 0 {
                let inv_b = ExactRational::new(BigInt::one(), BigInt::from(b));
                power = series_mul(&power, &uh)?.scale(&inv_b);
                if power.is_zero() {
                    break;
                }
            }
            next = next.add(&series_mul(part, &power)?)?;
        }
        h = next;
    }
    Ok(h)
}

/// Reads `GN_{n,k,j} = n! [z^n u^j w^k] H` off the EGF from [`galled_egf`].
pub fn joint_from_egf(n: usize, h: &MarkedSeries) -> Result<GalledJointTable> {
    let mut out = GalledJointTable::empty(n);
    if n == 1 {
        out.add(0, 0, &BigUint::one())?;
        return Ok(out);
    }
    if h.order() < n {
        return Err(Error::Contract(format!(
            "EGF known to order {} but n={n}",
            h.order()
        )));
    }
    let scaled = h.coeff(n).scale(&ExactRational::from_integer(factorial(n).into()));
    let ints = scaled.to_integer_terms().ok_or_else(|| Error::NonIntegral {
        context: format!("n! [z^{n}] H"),
    })?;
    for (j, k, c) in ints {
        let (sign, mag) = c.into_parts();
        if sign == num_bigint::Sign::Minus {
            return Err(Error::NonIntegral {
                context: format!("negative count at n={n}, k={k}, j={j}"),
            });
        }
        out.add(k, j, &mag)?;
    }
    Ok(out)
}

/// Node of a [`PhyloTree`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PhyloNode {
    Leaf(usize),
    Internal(Vec<usize>),
}

/// Rooted leaf-labelled tree whose internal nodes have at least two
/// children. Node 0 is the root. Child order carries no meaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhyloTree {
    nodes: Vec<PhyloNode>,
}

impl PhyloTree {
    pub fn nodes(&self) -> &[PhyloNode] {
        &self.nodes
    }

    pub fn internal_nodes(&self) -> impl Iterator<Item = &[usize]> {
        self.nodes.iter().filter_map(|n| match n {
            PhyloNode::Internal(ch) => Some(ch.as_slice()),
            PhyloNode::Leaf(_) => None,
        })
    }

    /// `(c_lf(v), c_nlf(v))` for an internal node with the given children.
    pub fn child_split(&self, children: &[usize]) -> (usize, usize) {
        let leaves = children
            .iter()
            .filter(|&&c| matches!(self.nodes[c], PhyloNode::Leaf(_)))
            .count();
        (leaves, children.len() - leaves)
    }
}

/// All set partitions of `items` into at least two blocks.
fn partitions_into_two_or_more(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    fn go(items: &[usize], i: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == items.len() {
            if blocks.len() >= 2 {
                out.push(blocks.clone());
            }
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(items[i]);
            go(items, i + 1, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![items[i]]);
        go(items, i + 1, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(items, 0, &mut Vec::new(), &mut out);
    out
}

/// Calls `visit` once for every phylogenetic tree on the labels `1..=n`.
pub fn for_each_phylo_tree(n: usize, mut visit: impl FnMut(&PhyloTree)) {
    if n == 0 {
        return;
    }
    if n == 1 {
        visit(&PhyloTree {
            nodes: vec![PhyloNode::Leaf(1)],
        });
        return;
    }
    fn expand(
        tree: &mut PhyloTree,
        pending: &mut Vec<(usize, Vec<usize>)>,
        visit: &mut dyn FnMut(&PhyloTree),
    ) {
        let Some((node, block)) = pending.pop() else {
            visit(tree);
            return;
        };
        for partition in partitions_into_two_or_more(&block) {
            let node_mark = tree.nodes.len();
            let pending_mark = pending.len();
            let mut children = Vec::with_capacity(partition.len());
            for part in partition {
                let id = tree.nodes.len();
                children.push(id);
                if part.len() == 1 {
                    tree.nodes.push(PhyloNode::Leaf(part[0]));
                } else {
                    tree.nodes.push(PhyloNode::Internal(Vec::new()));
                    pending.push((id, part));
                }
            }
            tree.nodes[node] = PhyloNode::Internal(children);
            expand(tree, pending, visit);
            tree.nodes.truncate(node_mark);
            pending.truncate(pending_mark);
        }
        tree.nodes[node] = PhyloNode::Internal(Vec::new());
        pending.push((node, block));
    }
    let mut tree = PhyloTree {
        nodes: vec![PhyloNode::Internal(Vec::new())],
    };
    let mut pending = vec![(0, (1..=n).collect())];
    expand(&mut tree, &mut pending, &mut visit);
}

/// `GN_{n,k,j}` by summing the decomposition formula over every tree.
/// Refuses `n > 8`.
pub fn brute_force_galled(n: usize, table: &NTable) -> Result<GalledJointTable> {
    if n == 0 {
        return Err(Error::Domain("networks need at least one leaf".into()));
    }
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::ResourceGuard {
            what: "brute-force galled enumeration",
            limit: BRUTE_FORCE_MAX_N,
            requested: n,
        });
    }
    table.require(n + 1)?;
    let mut out = GalledJointTable::empty(n);
    if n == 1 {
        out.add(0, 0, &BigUint::one())?;
        return Ok(out);
    }
    let mut weights: HashMap<(usize, usize), Vec<BigUint>> = HashMap::new();
    let mut failure = None;
    for_each_phylo_tree(n, |tree| {
        if failure.is_some() {
            return;
        }
        let mut poly = vec![BigUint::one()];
        let mut internal = 0usize;
        for children in tree.internal_nodes() {
            internal += 1;
            let split = tree.child_split(children);
            let w = match weights.get(&split) {
                Some(w) => w,
                None => match node_weight(split.0, split.1, table) {
                    Ok(w) => weights.entry(split).or_insert(w),
                    Err(e) => {
                        failure = Some(e);
                        return;
                    }
                },
            };
            let mut next = vec![BigUint::zero(); poly.len() + w.len() - 1];
            for (i, a) in poly.iter().enumerate() {
                for (j, b) in w.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            poly = next;
        }
        for (k, c) in poly.iter().enumerate() {
            if !c.is_zero() {
                if let Err(e) = out.add(k, internal - 1, c) {
                    failure = Some(e);
                    return;
                }
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// `GN_{n,2n-2} = (2n-3)!! 3^(n-1)`: binary trees whose internal nodes
/// all carry the two-reticulation cherry network.
pub fn galled_max_retic(n: usize) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::Domain(format!("needs n >= 2, got {n}")));
    }
    Ok(double_factorial(2 * n as i64 - 3)? * BigUint::from(3u32).pow(n as u32 - 1))
}

/// Lower bound `L_n <= GN_n` from trees whose root children are leaves or
/// cherries:
///
/// ```text
/// L_n = sum_j C(n,2j) (2j)! 3^j / j! sum_l C(n-2j, l) N_{n-j+1}^(l+j)
/// ```
pub fn lower_bound_l(n: usize, table: &NTable) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::Domain("networks need at least one leaf".into()));
    }
    table.require(n + 1)?;
    let mut total = BigUint::zero();
    for j in 0..=n / 2 {
        let trees = binomial(n, 2 * j) * factorial(2 * j) / factorial(j)
            * BigUint::from(3u32).pow(j as u32);
        let inner: BigUint = (0..=n - 2 * j)
            .map(|l| binomial(n - 2 * j, l) * table.value_or_zero(n - j + 1, l + j))
            .sum();
        total += trees * inner;
    }
    Ok(total)
}

/// Refinement `L_{n,k,j}` of [`lower_bound_l`]: `k` reticulations and `j`
/// cherries (equivalently `j` inner reticulations).
pub fn lower_bound_l_joint(n: usize, k: usize, j: usize, table: &NTable) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::Domain("networks need at least one leaf".into()));
    }
    table.require(n + 1)?;
    if 2 * j > n || k < j {
        return Ok(BigUint::zero());
    }
    // (sum_l C(2,l) N_3^(l) w^l)^j = (1 + 2w + 3w^2)^j
    let cherry: Vec<BigUint> = (0..=2)
        .map(|l| binomial(2, l) * table.value_or_zero(3, l))
        .collect();
    let mut cherries = vec![BigUint::one()];
    for _ in 0..j {
        let mut next = vec![BigUint::zero(); cherries.len() + 2];
        for (i, a) in cherries.iter().enumerate() {
            for (l, b) in cherry.iter().enumerate() {
                next[i + l] += a * b;
            }
        }
        cherries = next;
    }
    let trees = binomial(n, 2 * j) * factorial(2 * j) / (factorial(j) << j);
    let free = k - j;
    let mut sum = BigUint::zero();
    for l in 0..=(n - 2 * j).min(free) {
        let Some(c) = cherries.get(free - l) else {
            continue;
        };
        sum += c * binomial(n - 2 * j, l) * table.value_or_zero(n - j + 1, j + l);
    }
    Ok(trees * sum)
}

/// Upper bound `U_n >= GN_n`, the tree sum with node weight `1-GN_{c(v)}`:
///
/// ```text
/// U_n = (n-1)! [z^(n-1)] (1 - M(z))^(-n),   M(z) = sum_{l>=1} 1-GN_{l+1}/(l+1)! z^l.
/// ```
pub fn upper_bound_u(n: usize, table: &NTable) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::Domain("networks need at least one leaf".into()));
    }
    table.require(n)?;
    let order = n - 1;
    let mut coeffs = vec![ExactRational::zero()];
    for l in 1..=order {
        let num = BigInt::from(one_component_total(table, l + 1)?);
        coeffs.push(ExactRational::new(num, BigInt::from(factorial(l + 1))));
    }
    let m = MarkedSeries::from_scalars(coeffs, MarkCaps::SCALAR)?;
    let inv = reciprocal_power(&m, n, order)?;
    let value =
        inv.coeff(order).coeff(0, 0) * ExactRational::from_integer(factorial(order).into());
    if !value.is_integer() {
        return Err(Error::NonIntegral {
            context: format!("U_{n}"),
        });
    }
    Ok(value.to_integer().into_parts().1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(s: &str) -> BigUint {
        s.replace(',', "").parse().unwrap()
    }

    fn table() -> NTable {
        NTable::build(11).unwrap()
    }

    #[test]
    fn totals_small() {
        let t = table();
        assert_eq!(galled_total(1, &t).unwrap(), big("1"));
        assert_eq!(galled_total(2, &t).unwrap(), big("6"));
        assert_eq!(galled_total(3, &t).unwrap(), big("240"));
        assert_eq!(galled_total(4, &t).unwrap(), big("20,502"));
        assert_eq!(
            galled_total(10, &t).unwrap(),
            big("19,327,089,427,089,478,650")
        );
    }

    #[test]
    fn joint_cells_at_seven() {
        let j = galled_joint(7, &table()).unwrap();
        assert_eq!(j.count(8, 1), big("18,868,231,935"));
        assert_eq!(j.count(12, 5), big("7,577,955"));
        assert_eq!(j.total(), &big("167,357,180,970"));
        assert_eq!(j.tree_node_count(12), 18);
    }

    #[test]
    fn joint_total_matches_scalar_path() {
        let t = table();
        for n in 1..=10 {
            assert_eq!(galled_joint(n, &t).unwrap().total(), &galled_total(n, &t).unwrap());
        }
    }

    #[test]
    fn egf_fixed_point_matches_recursion() {
        let t = table();
        for n in 1..=6 {
            let h = galled_egf(n, &t).unwrap();
            assert_eq!(h.valuation(), if n >= 2 { Some(2) } else { None });
            assert_eq!(joint_from_egf(n, &h).unwrap(), galled_joint(n, &t).unwrap(), "n={n}");
        }
    }

    #[test]
    fn phylo_tree_counts() {
        // Rooted multifurcating leaf-labelled trees: 1, 1, 4, 26, 236, 2752.
        let expected = [1usize, 1, 4, 26, 236, 2752];
        for (i, &e) in expected.iter().enumerate() {
            let mut count = 0;
            for_each_phylo_tree(i + 1, |tree| {
                assert!(tree.internal_nodes().all(|ch| ch.len() >= 2));
                count += 1;
            });
            assert_eq!(count, e, "n={}", i + 1);
        }
    }

    #[test]
    fn brute_force_small() {
        let t = table();
        assert_eq!(brute_force_galled(3, &t).unwrap().total(), &big("240"));
        let one = brute_force_galled(1, &t).unwrap();
        assert_eq!(one.count(0, 0), big("1"));
        assert_eq!(one.total(), &big("1"));
        assert!(matches!(
            brute_force_galled(9, &NTable::build(10).unwrap()),
            Err(Error::ResourceGuard { limit: 8, .. })
        ));
    }

    #[test]
    fn max_retic_values() {
        assert_eq!(galled_max_retic(2).unwrap(), big("3"));
        assert_eq!(galled_max_retic(3).unwrap(), big("27"));
        assert_eq!(galled_max_retic(7).unwrap(), big("7,577,955"));
        assert!(matches!(galled_max_retic(1), Err(Error::Domain(_))));
    }

    #[test]
    fn lower_bound_values() {
        let t = table();
        assert_eq!(lower_bound_l(1, &t).unwrap(), big("1"));
        assert_eq!(lower_bound_l(3, &t).unwrap(), big("240"));
        assert_eq!(lower_bound_l_joint(3, 0, 0, &t).unwrap(), big("3"));
        assert_eq!(lower_bound_l_joint(7, 9, 4, &t).unwrap(), big("0"));
        assert!(lower_bound_l(7, &t).unwrap() <= big("167,357,180,970"));
    }

    #[test]
    fn lower_bound_joint_sums_to_total() {
        let t = table();
        for n in 1..=10 {
            let mut sum = BigUint::zero();
            for j in 0..=n / 2 {
                for k in 0..=2 * n {
                    sum += lower_bound_l_joint(n, k, j, &t).unwrap();
                }
            }
            assert_eq!(sum, lower_bound_l(n, &t).unwrap(), "n={n}");
        }
    }

    #[test]
    fn upper_bound_small() {
        let t = table();
        assert_eq!(upper_bound_u(1, &t).unwrap(), big("1"));
        assert_eq!(upper_bound_u(2, &t).unwrap(), big("6"));
        // star: 1-GN_3 = 168; three binary trees: (1-GN_2)^2 = 36 each.
        assert_eq!(upper_bound_u(3, &t).unwrap(), big("276"));
    }

    #[test]
    fn slices_and_support() {
        let t = table();
        for n in 2..=9 {
            let joint = galled_joint(n, &t).unwrap();
            for k in 0..=n {
                assert_eq!(
                    joint.count(k, 0),
                    crate::one_component::one_component_count(&t, n, k).unwrap()
                );
            }
            assert_eq!(joint.count(2 * n - 2, n - 2), galled_max_retic(n).unwrap());
            for (k, j, c) in joint.cells() {
                if k > n + j {
                    assert!(c.is_zero(), "n={n} k={k} j={j}");
                }
            }
        }
    }
}
