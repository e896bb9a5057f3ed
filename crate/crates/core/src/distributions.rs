//! Exact finite-`n` distributions under the uniform model and their
//! distance to the limit laws.
//!
//! Outcomes are reindexed from table coordinates here and nowhere else:
//!
//! * one-component: `k = n - Z_n` with weight `1-GN_{n,n-k}`;
//! * galled: `(j, n - Y_n)` with weight `GN_{n,k,j}` where `k` is the number
//!   of reticulations, so `n - Y_n = n - k` may be negative;
//! * dup-trees: `k = n - R_n` with weight `DU_{n,n-k}`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::asymptotics::{ln_biguint, log_asym, poisson_pmf, Family, LimitPmfXY, DEFAULT_TRUNCATION};
use crate::dup_trees::{dup_by_repeats_row, dup_total, fdu_total, BTable};
use crate::error::{Error, Result};
use crate::galled::{galled_joint, galled_totals, GalledJointTable};
use crate::one_component::{one_component_row, one_component_total, NTable};
use crate::series::{ratio_to_f64, ExactRational};

/// Probability mass function with exact integer weights over a common total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pmf<O> {
    outcomes: Vec<O>,
    counts: Vec<BigUint>,
    total: BigUint,
}

impl<O: Ord + Clone> Pmf<O> {
    /// Outcomes are sorted; repeated outcomes are merged.
    pub fn from_counts(cells: impl IntoIterator<Item = (O, BigUint)>) -> Result<Pmf<O>> {
        let mut merged: BTreeMap<O, BigUint> = BTreeMap::new();
        for (o, c) in cells {
            *merged.entry(o).or_default() += c;
        }
        let total: BigUint = merged.values().sum();
        if total.is_zero() {
            return Err(Error::Domain("a distribution needs positive total weight".into()));
        }
        let (outcomes, counts) = merged.into_iter().unzip();
        Ok(Pmf {
            outcomes,
            counts,
            total,
        })
    }

    pub fn support(&self) -> &[O] {
        &self.outcomes
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    /// Common denominator; the counts sum to it.
    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn iter(&self) -> impl Iterator<Item = (&O, &BigUint)> {
        self.outcomes.iter().zip(&self.counts)
    }

    pub fn count(&self, outcome: &O) -> BigUint {
        self.outcomes
            .binary_search(outcome)
            .map(|i| self.counts[i].clone())
            .unwrap_or_default()
    }

    /// Exact probability of `outcome`, reduced.
    pub fn weight(&self, outcome: &O) -> ExactRational {
        ExactRational::new(
            BigInt::from(self.count(outcome)),
            BigInt::from(self.total.clone()),
        )
    }

    pub fn weights(&self) -> Vec<ExactRational> {
        self.counts
            .iter()
            .map(|c| ExactRational::new(BigInt::from(c.clone()), BigInt::from(self.total.clone())))
            .collect()
    }

    pub fn probs(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|c| ratio_to_f64(c, &self.total))
            .collect()
    }

    pub fn prob_map(&self) -> BTreeMap<O, f64> {
        self.outcomes.iter().cloned().zip(self.probs()).collect()
    }

    /// Pushes the distribution forward along `f`.
    pub fn marginal<P: Ord + Clone>(&self, f: impl Fn(&O) -> P) -> Pmf<P> {
        let mut merged: BTreeMap<P, BigUint> = BTreeMap::new();
        for (o, c) in self.iter() {
            *merged.entry(f(o)).or_default() += c;
        }
        let (outcomes, counts) = merged.into_iter().unzip();
        Pmf {
            outcomes,
            counts,
            total: self.total.clone(),
        }
    }

    /// Conditions on `keep`; fails if the event has probability zero.
    pub fn restrict(&self, keep: impl Fn(&O) -> bool) -> Result<Pmf<O>> {
        Pmf::from_counts(
            self.iter()
                .filter(|(o, _)| keep(o))
                .map(|(o, c)| (o.clone(), c.clone())),
        )
    }

    /// Most likely outcome; the smallest one on ties.
    pub fn mode(&self) -> &O {
        let mut best = 0;
        for (i, c) in self.counts.iter().enumerate() {
            if c > &self.counts[best] {
                best = i;
            }
        }
        &self.outcomes[best]
    }
}

/// `P(n - Z_n = k) = 1-GN_{n,n-k} / 1-GN_n` for `k = 0..=n`.
pub fn dist_one_component(table: &NTable, n: usize) -> Result<Pmf<usize>> {
    let row = one_component_row(table, n)?;
    Pmf::from_counts(row.into_iter().enumerate().map(|(k, c)| (n - k, c)))
}

/// `P(X_n = j, n - Y_n = n - k) = GN_{n,k,j} / GN_n` over the nonzero cells.
pub fn dist_galled_joint(joint: &GalledJointTable) -> Result<Pmf<(usize, i64)>> {
    let n = joint.n() as i64;
    Pmf::from_counts(
        joint
            .cells()
            .filter(|(_, _, c)| !c.is_zero())
            .map(|(k, j, c)| ((j, n - k as i64), c.clone())),
    )
}

/// `P(n - R_n = k) = DU_{n,n-k} / DU_n` for `k = 0..=n`.
pub fn dist_dup_repeats(table: &NTable, n: usize) -> Result<Pmf<usize>> {
    let row = dup_by_repeats_row(table, n)?;
    Pmf::from_counts(row.into_iter().enumerate().map(|(k, c)| (n - k, c)))
}

/// `1/2 sum |p - q|`, outcomes missing from one side counting as zero.
pub fn tv_distance<O: Ord>(p: &BTreeMap<O, f64>, q: &BTreeMap<O, f64>) -> f64 {
    let mut sum = 0.0;
    for (o, &pv) in p {
        sum += (pv - q.get(o).copied().unwrap_or(0.0)).abs();
    }
    for (o, &qv) in q {
        if !p.contains_key(o) {
            sum += qv.abs();
        }
    }
    sum / 2.0
}

/// `Poisson(lambda)` on `0..=k_max`.
pub fn poisson_map(lambda: f64, k_max: usize) -> Result<BTreeMap<usize, f64>> {
    (0..=k_max).map(|k| Ok((k, poisson_pmf(lambda, k)?))).collect()
}

/// Distance from `n - Z_n` to `Poisson(1/2)`.
pub fn tv_one_component_to_limit(pmf: &Pmf<usize>) -> Result<f64> {
    let k_max = pmf.support().last().copied().unwrap_or(0) + DEFAULT_TRUNCATION;
    Ok(tv_distance(&pmf.prob_map(), &poisson_map(0.5, k_max)?))
}

/// Distance from `(X_n, n - Y_n)` to the limit law truncated at the default.
pub fn tv_joint_to_limit(pmf: &Pmf<(usize, i64)>) -> f64 {
    let limit = LimitPmfXY::build(DEFAULT_TRUNCATION, DEFAULT_TRUNCATION);
    let q = limit.cells.iter().map(|(&o, c)| (o, c.prob)).collect();
    tv_distance(&pmf.prob_map(), &q)
}

/// Distance from the law of `X_n` to `Poisson(3/8)`.
pub fn tv_inner_to_limit(pmf: &Pmf<(usize, i64)>) -> Result<f64> {
    let x = pmf.marginal(|&(j, _)| j);
    let k_max = x.support().last().copied().unwrap_or(0) + DEFAULT_TRUNCATION;
    Ok(tv_distance(&x.prob_map(), &poisson_map(0.375, k_max)?))
}

/// Diagnostics for one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    /// `tv(n - Z_n, Poisson(1/2))`.
    pub tv_one_component: f64,
    /// `tv((X_n, n - Y_n), limit)`; `None` when `n` exceeds the joint cap.
    pub tv_joint: Option<f64>,
    /// `1-GN_n / GN_n`.
    pub one_component_fraction: f64,
    /// `|1-GN_n / GN_n - e^(-3/8)|`.
    pub one_component_fraction_gap: f64,
    /// `FDU_n / DU_n`.
    pub free_dup_fraction: f64,
    /// `|FDU_n / DU_n - e^(-1/2)|`.
    pub free_dup_fraction_gap: f64,
    /// `ln(exact) - ln(asymptotic)` for one-component, galled, dup, fdu.
    pub ln_gaps: Vec<(Family, f64)>,
}

/// Computes a [`ConvergenceRow`] for each `n`, in the given order.
///
/// The tables must reach `max(ns) + 1`. The joint distance is computed
/// only for `n <= joint_max_n`.
pub fn convergence_report(
    ns: &[usize],
    ntable: &NTable,
    btable: &BTable,
    joint_max_n: usize,
) -> Result<Vec<ConvergenceRow>> {
    if let Some(&bad) = ns.iter().find(|&&n| n < 2) {
        return Err(Error::Domain(format!("report needs n >= 2, got {bad}")));
    }
    let Some(&max_n) = ns.iter().max() else {
        return Ok(Vec::new());
    };
    let galled = galled_totals(max_n, ntable)?;
    let e38 = (-0.375f64).exp();
    let e12 = (-0.5f64).exp();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let oc = one_component_total(ntable, n)?;
        let gn = &galled[n];
        let du = dup_total(btable, n)?;
        let fdu = fdu_total(ntable, n)?;
        let tv_joint = if n <= joint_max_n {
            Some(tv_joint_to_limit(&dist_galled_joint(&galled_joint(n, ntable)?)?))
        } else {
            None
        };
        let oc_frac = ratio_to_f64(&oc, gn);
        let fdu_frac = ratio_to_f64(&fdu, &du);
        let mut ln_gaps = Vec::with_capacity(4);
        for (family, exact) in [
            (Family::OneComponent, &oc),
            (Family::Galled, gn),
            (Family::Dup, &du),
            (Family::Fdu, &fdu),
        ] {
            let asym = log_asym(family, n, None)?;
            ln_gaps.push((family, ln_biguint(exact) - asym.ln_value));
        }
        rows.push(ConvergenceRow {
            n,
            tv_one_component: tv_one_component_to_limit(&dist_one_component(ntable, n)?)?,
            tv_joint,
            one_component_fraction: oc_frac,
            one_component_fraction_gap: (oc_frac - e38).abs(),
            free_dup_fraction: fdu_frac,
            free_dup_fraction_gap: (fdu_frac - e12).abs(),
            ln_gaps,
        });
    }
    Ok(rows)
}
