//! One-component galled networks.
//!
//! `N_n^(k)` counts one-component galled networks with `n-1` leaves whose
//! `k` reticulation children carry the labels `1..k`. The table obeys
//!
//! ```text
//! N_n^(k) = (n+k-3) N_n^(k-1) + (k-1) N_n^(k-2)
//!         + 1/2 sum_{d=1}^{k-1} C(k-1,d) (2d-1)!! (N_{n-d}^(k-1-d) - N_{n-d+1}^(k-1-d))
//! ```
//!
//! for `2 <= k <= n-1`, seeded by `N_n^(0) = (2n-5)!!` and
//! `N_n^(1) = (n-2)(2n-5)!!`. Networks with `n` leaves and `k`
//! reticulations number `C(n,k) N_{n+1}^(k)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::series::{binomial, double_factorial, factorial};

/// Which of the two sibling recurrences a [`Triangle`] follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Recurrence {
    /// `N_n^(k)`: one-component galled networks.
    OneComponent,
    /// `B_n^(k)`: dup-trees.
    DupTree,
}

impl Recurrence {
    fn name(self) -> &'static str {
        match self {
            Recurrence::OneComponent => "N",
            Recurrence::DupTree => "B",
        }
    }
}

/// Triangular table `T[n][k]`, `2 <= n <= n_max`, `0 <= k <= n-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Triangle {
    kind: Recurrence,
    rows: Vec<Vec<BigUint>>,
}

impl Triangle {
    pub(crate) fn build(kind: Recurrence, n_max: usize) -> Result<Triangle> {
        if n_max < 2 {
            return Err(Error::Domain(format!("table needs n_max >= 2, got {n_max}")));
        }
        // Signed copies avoid a conversion per lookup in the inner sum.
        let mut rows: Vec<Vec<BigInt>> = vec![Vec::new(), Vec::new()];
        // coefs[k-1][d] = C(k-1, d) (2d-1)!!
        let mut coefs: Vec<Vec<BigInt>> = Vec::new();
        let mut dfact: Vec<BigInt> = vec![BigInt::from(1)]; // (2d-1)!! for d = 0, 1, ...
        let zero = BigInt::zero();

        for n in 2..=n_max {
            let seed = BigInt::from(double_factorial(2 * n as i64 - 5)?);
            let mut row: Vec<BigInt> = Vec::with_capacity(n);
            let k1_factor = match kind {
                Recurrence::OneComponent => n - 2,
                Recurrence::DupTree => n - 1,
            };
            row.push(seed.clone());
            row.push(seed * k1_factor);

            for k in 2..n {
                while coefs.len() < k {
                    let m = coefs.len();
                    while dfact.len() <= m {
                        let d = dfact.len();
                        let next = &dfact[d - 1] * (2 * d as i64 - 1);
                        dfact.push(next);
                    }
                    coefs.push(
                        (0..=m)
                            .map(|d| BigInt::from(binomial(m, d)) * &dfact[d])
                            .collect(),
                    );
                }
                let lookup = |nn: usize, kk: usize| -> &BigInt {
                    let r = if nn == n { &row } else { &rows[nn] };
                    r.get(kk).unwrap_or(&zero)
                };

                let main: BigInt = match kind {
                    Recurrence::OneComponent => &row[k - 1] * (n + k - 3) + &row[k - 2] * (k - 1),
                    Recurrence::DupTree => &row[k - 1] * (n + k - 2),
                };
                let mut twice = main * 2u32;
                for d in 1..k {
                    let diff = lookup(n - d, k - 1 - d) - lookup(n - d + 1, k - 1 - d);
                    twice += &coefs[k - 1][d] * diff;
                }
                if twice.is_negative() || twice.is_odd() {
                    return Err(Error::NonIntegral {
                        context: format!("{}_{n}^({k})", kind.name()),
                    });
                }
                row.push(twice / 2u32);
            }
            rows.push(row);
        }
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.into_parts().1).collect())
            .collect();
        Ok(Triangle { kind, rows })
    }

    /// Rebuilds a table from stored rows, checking shape and seed columns.
    pub(crate) fn from_rows(kind: Recurrence, rows: Vec<Vec<BigUint>>) -> Result<Triangle> {
        if rows.len() < 3 {
            return Err(Error::Parse(format!("{} table needs n_max >= 2", kind.name())));
        }
        for (n, row) in rows.iter().enumerate() {
            let expected = if n < 2 { 0 } else { n };
            if row.len() != expected {
                return Err(Error::Parse(format!(
                    "{} table row n={n} has {} entries, expected {expected}",
                    kind.name(),
                    row.len()
                )));
            }
            if n >= 2 {
                let seed = double_factorial(2 * n as i64 - 5)?;
                let k1 = match kind {
                    Recurrence::OneComponent => n - 2,
                    Recurrence::DupTree => n - 1,
                };
                if row[0] != seed || row[1] != &seed * k1 {
                    return Err(Error::Parse(format!(
                        "{} table row n={n} has wrong seed values",
                        kind.name()
                    )));
                }
            }
        }
        Ok(Triangle { kind, rows })
    }

    pub(crate) fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub(crate) fn get(&self, n: usize, k: usize) -> Option<&BigUint> {
        self.rows.get(n).and_then(|r| r.get(k))
    }

    pub(crate) fn value(&self, n: usize, k: usize) -> Result<BigUint> {
        self.get(n, k).cloned().ok_or_else(|| {
            Error::Domain(format!(
                "{}_{n}^({k}) is outside the table (2 <= n <= {}, 0 <= k <= n-1)",
                self.kind.name(),
                self.n_max()
            ))
        })
    }

    pub(crate) fn rows(&self) -> &[Vec<BigUint>] {
        &self.rows
    }

    /// `sum_k C(n,k) T[n+1][k]` style lookups need the table through `n+1`.
    pub(crate) fn require(&self, n_plus_one: usize) -> Result<()> {
        if n_plus_one > self.n_max() {
            return Err(Error::Contract(format!(
                "{} table built to n={} but n={n_plus_one} is required",
                self.kind.name(),
                self.n_max()
            )));
        }
        Ok(())
    }
}

/// Memoized `N_n^(k)` for `2 <= n <= n_max`, `0 <= k <= n-1`.
///
/// Built eagerly and immutable afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NTable(Triangle);

impl NTable {
    pub fn build(n_max: usize) -> Result<NTable> {
        Triangle::build(Recurrence::OneComponent, n_max).map(NTable)
    }

    /// Restores a table from rows indexed `rows[n][k]` (rows 0 and 1 empty).
    pub fn from_rows(rows: Vec<Vec<BigUint>>) -> Result<NTable> {
        Triangle::from_rows(Recurrence::OneComponent, rows).map(NTable)
    }

    pub fn n_max(&self) -> usize {
        self.0.n_max()
    }

    pub fn get(&self, n: usize, k: usize) -> Option<&BigUint> {
        self.0.get(n, k)
    }

    pub fn value(&self, n: usize, k: usize) -> Result<BigUint> {
        self.0.value(n, k)
    }

    /// `N` with the out-of-range-is-zero convention.
    pub fn value_or_zero(&self, n: usize, k: usize) -> BigUint {
        self.get(n, k).cloned().unwrap_or_default()
    }

    pub fn rows(&self) -> &[Vec<BigUint>] {
        self.0.rows()
    }

    pub(crate) fn require(&self, n_plus_one: usize) -> Result<()> {
        self.0.require(n_plus_one)
    }
}

/// `1-GN_{n,k} = C(n,k) N_{n+1}^(k)`.
pub fn one_component_count(table: &NTable, n: usize, k: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::Domain("networks need at least one leaf".into()));
    }
    if k > n {
        return Err(Error::Domain(format!(
            "a one-component network with {n} leaves has at most {n} reticulations, asked for {k}"
        )));
    }
    table.require(n + 1)?;
    Ok(binomial(n, k) * table.value(n + 1, k)?)
}

/// `[1-GN_{n,0}, ..., 1-GN_{n,n}]`.
pub fn one_component_row(table: &NTable, n: usize) -> Result<Vec<BigUint>> {
    (0..=n).map(|k| one_component_count(table, n, k)).collect()
}

/// `1-GN_n`, the number of one-component galled networks with `n` leaves.
pub fn one_component_total(table: &NTable, n: usize) -> Result<BigUint> {
    Ok(one_component_row(table, n)?.into_iter().sum())
}

/// Outcome of one family of inequalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub statement: &'static str,
    pub instances: usize,
    pub counterexample: Option<String>,
}

impl BoundCheck {
    fn new(name: &'static str, statement: &'static str) -> Self {
        BoundCheck {
            name,
            statement,
            instances: 0,
            counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, at: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(at());
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsReport {
    pub n_max: usize,
    pub checks: Vec<BoundCheck>,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(BoundCheck::passed)
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks the known inequalities for `N_n^(k)` and `1-GN_{n,k}` on every
/// admissible index pair the table covers. `N` indices run to
/// `table.n_max()`, `1-GN` indices to `table.n_max() - 1`.
///
/// All comparisons are cleared of denominators and done in integers.
pub fn verify_bounds(table: &NTable) -> Result<BoundsReport> {
    let n_max = table.n_max();
    let big = |x: usize| BigUint::from(x);
    let nv = |n: usize, k: usize| table.value_or_zero(n, k);

    let mut lower = BoundCheck::new(
        "n_lower",
        "N_n^(k) >= (n+k-3) N_n^(k-1) + (k-1)/2 N_n^(k-2), 2 <= k <= n-1",
    );
    let mut upper = BoundCheck::new(
        "n_upper",
        "N_n^(k) <= (n+k-3) N_n^(k-1) + (k-1)/2 (N_n^(k-2) + N_{n-1}^(k-2)), 2 <= k <= n-1",
    );
    let mut vertical = BoundCheck::new(
        "n_vertical",
        "N_n^(k) >= (n+k-5/2) N_{n-1}^(k), 0 <= k <= n-2",
    );
    for n in 2..=n_max {
        for k in 2..n {
            let lhs = nv(n, k) * 2u32;
            let base = nv(n, k - 1) * big(2 * (n + k - 3)) + nv(n, k - 2) * big(k - 1);
            lower.record(lhs >= base, || format!("n={n}, k={k}"));
            let cap = &base + nv(n - 1, k - 2) * big(k - 1);
            upper.record(lhs <= cap, || format!("n={n}, k={k}"));
        }
        if n >= 3 {
            for k in 0..=n - 2 {
                let ok = nv(n, k) * 2u32 >= nv(n - 1, k) * big(2 * n + 2 * k - 5);
                vertical.record(ok, || format!("n={n}, k={k}"));
            }
        }
    }

    let mut step = BoundCheck::new(
        "one_comp_step",
        "1-GN_{n,k+1} >= (n-k)(n+k-1)/(k+1) 1-GN_{n,k}, 0 <= k <= n-1",
    );
    let mut increasing = BoundCheck::new("one_comp_increasing", "1-GN_{n,k} increasing in k, n >= 2");
    let mut ceiling = BoundCheck::new(
        "one_comp_ceiling",
        "1-GN_{n,k} <= C(n,k) (n+k-2)!/(2n-2)! 1-GN_{n,n}, 0 <= k <= n, n >= 2",
    );
    let mut growth = BoundCheck::new(
        "one_comp_vertical",
        "1-GN_{n,k} >= n(2n+2k-3)/(2(n-k)) 1-GN_{n-1,k}, 0 <= k <= n-1",
    );
    let mut prev_row: Option<Vec<BigUint>> = None;
    for n in 1..n_max {
        let row = one_component_row(table, n)?;
        for k in 0..n {
            let ok = &row[k + 1] * big(k + 1) >= &row[k] * big((n - k) * (n + k - 1));
            step.record(ok, || format!("n={n}, k={k}"));
        }
        if n >= 2 {
            for k in 0..n {
                increasing.record(row[k + 1] > row[k], || format!("n={n}, k={k}"));
            }
            let top = factorial(2 * n - 2);
            for k in 0..=n {
                let ok = &row[k] * &top <= binomial(n, k) * factorial(n + k - 2) * &row[n];
                ceiling.record(ok, || format!("n={n}, k={k}"));
            }
        }
        if let Some(prev) = &prev_row {
            for k in 0..n {
                let ok = &row[k] * big(2 * (n - k)) >= &prev[k] * big(n * (2 * n + 2 * k - 3));
                growth.record(ok, || format!("n={n}, k={k}"));
            }
        }
        prev_row = Some(row);
    }

    Ok(BoundsReport {
        n_max,
        checks: vec![lower, upper, vertical, step, increasing, ceiling, growth],
    })
}
