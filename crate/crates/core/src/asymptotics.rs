//! First-order asymptotics and the limit law of the reticulation statistics.
//!
//! Every family grows like `C n^-1 (8/e^2)^n n^(2n)`; only the constant
//! differs. Values are compared in log space because the counts leave the
//! `f64` range near `n = 80`.
//!
//! The joint limit of `(X_n, n - Y_n)` (inner reticulations, leaves minus
//! reticulations) for galled networks is
//!
//! ```text
//! P(X = j, Y = k) = e^(-7/8) / (16^j j!) [z^(j-k)] e^(1/(2z)) (1 + 2z + 3z^2)^j
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::series::{factorial, rational_to_f64, ExactRational};

/// Default truncation of the limit law in both coordinates.
pub const DEFAULT_TRUNCATION: usize = 40;

/// Largest probability mass [`limit_moments`] lets the truncation drop.
pub const MOMENT_RESIDUAL_TOLERANCE: f64 = 1e-12;

/// Counting families with known first-order asymptotics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    OneComponent,
    Galled,
    Dup,
    /// Twin-cherry-free dup-trees.
    Fdu,
    /// One-component networks with `n - k` reticulations, `k` fixed.
    OneComponentNearMax,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::OneComponent,
        Family::Galled,
        Family::Dup,
        Family::Fdu,
        Family::OneComponentNearMax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::OneComponent => "one-component",
            Family::Galled => "galled",
            Family::Dup => "dup",
            Family::Fdu => "fdu",
            Family::OneComponentNearMax => "one-component-near-max",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == norm)
            .ok_or_else(|| Error::Domain(format!("unknown family '{s}'")))
    }
}

/// Natural log of the first-order asymptotic value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEstimate {
    pub family: Family,
    pub n: usize,
    pub k: Option<usize>,
    pub ln_value: f64,
}

/// `ln C` for the family's leading constant.
fn ln_constant(family: Family, k: Option<usize>) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let ln4 = 2.0 * ln2;
    match family {
        // sqrt(2 e e^(1/4)) / 4
        Family::Galled => 0.5 * (ln2 + 1.25) - ln4,
        // sqrt(2 e^(1/2)) / 4
        Family::OneComponent | Family::Fdu => 0.5 * (ln2 + 0.5) - ln4,
        // sqrt(2 e e^(1/2)) / 4
        Family::Dup => 0.5 * (ln2 + 1.5) - ln4,
        // sqrt(2) / (k! 2^(k+2) e^(1/4))
        Family::OneComponentNearMax => {
            let k = k.unwrap_or(0);
            let ln_fact: f64 = (2..=k).map(|i| (i as f64).ln()).sum();
            0.5 * ln2 - ln_fact - (k as f64 + 2.0) * ln2 - 0.25
        }
    }
}

/// `ln C - ln n + n (ln 8 - 2) + 2n ln n`.
pub fn log_asym(family: Family, n: usize, k: Option<usize>) -> Result<LogEstimate> {
    if n < 2 {
        return Err(Error::Domain(format!("asymptotics need n >= 2, got {n}")));
    }
    match (family, k) {
        (Family::OneComponentNearMax, None) => {
            return Err(Error::Domain(format!("{family} needs k")));
        }
        (Family::OneComponentNearMax, Some(k)) if k > n => {
            return Err(Error::Domain(format!("k={k} exceeds n={n}")));
        }
        (Family::OneComponentNearMax, Some(_)) => {}
        (_, Some(_)) => return Err(Error::Domain(format!("{family} takes no k"))),
        (_, None) => {}
    }
    let nf = n as f64;
    let ln_value =
        ln_constant(family, k) - nf.ln() + nf * (8f64.ln() - 2.0) + 2.0 * nf * nf.ln();
    Ok(LogEstimate {
        family,
        n,
        k,
        ln_value,
    })
}

/// `ln x` from the bit length and the top 64 bits; `-inf` at zero.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return x.to_u64().map_or(f64::NAN, |v| (v as f64).ln());
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `[z^m] e^(1/(2z)) (1 + 2z + 3z^2)^j` as an exact rational.
pub fn laurent_coeff(j: usize, m: i64) -> ExactRational {
    let mut poly = vec![BigUint::from(1u32)];
    for _ in 0..j {
        let mut next = vec![BigUint::zero(); poly.len() + 2];
        for (i, c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] += c * 2u32;
            next[i + 2] += c * 3u32;
        }
        poly = next;
    }
    let mut sum = ExactRational::zero();
    for (l, p) in poly.into_iter().enumerate() {
        let d = l as i64 - m;
        if d < 0 {
            continue;
        }
        let d = d as usize;
        let den = factorial(d) << d;
        sum += ExactRational::new(BigInt::from(p), BigInt::from(den));
    }
    sum
}

/// Rational part `laurent_coeff(j, j-k) / (16^j j!)` of the limit pmf.
pub fn limit_pmf_rational(j: usize, k: i64) -> ExactRational {
    if k < -(j as i64) {
        return ExactRational::zero();
    }
    let den = factorial(j) << (4 * j);
    laurent_coeff(j, j as i64 - k) / ExactRational::from_integer(BigInt::from(den))
}

/// `P(X = j, Y = k)` in the limit; zero for `k < -j`.
pub fn limit_pmf_xy(j: usize, k: i64) -> f64 {
    if k < -(j as i64) {
        return 0.0;
    }
    (-7.0f64 / 8.0).exp() * rational_to_f64(&limit_pmf_rational(j, k))
}

/// One cell of [`LimitPmfXY`].
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCell {
    /// Probability divided by `e^(-7/8)`.
    pub rational: ExactRational,
    pub prob: f64,
}

/// The limit law truncated to `j <= j_max`, `-j <= k <= k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitPmfXY {
    pub j_max: usize,
    pub k_max: usize,
    pub cells: BTreeMap<(usize, i64), LimitCell>,
}

impl LimitPmfXY {
    pub fn build(j_max: usize, k_max: usize) -> LimitPmfXY {
        let scale = (-7.0f64 / 8.0).exp();
        let mut cells = BTreeMap::new();
        for j in 0..=j_max {
            for k in -(j as i64)..=k_max as i64 {
                let rational = limit_pmf_rational(j, k);
                let prob = scale * rational_to_f64(&rational);
                cells.insert((j, k), LimitCell { rational, prob });
            }
        }
        LimitPmfXY {
            j_max,
            k_max,
            cells,
        }
    }

    pub fn mass(&self) -> f64 {
        self.cells.values().map(|c| c.prob).sum()
    }

    pub fn prob(&self, j: usize, k: i64) -> f64 {
        self.cells.get(&(j, k)).map_or(0.0, |c| c.prob)
    }
}

/// `Poisson(3/8)` pmf, the limit of the inner-reticulation count.
pub fn limit_x_marginal(j: usize) -> f64 {
    // 3/8 > 0, so this cannot fail.
    poisson_pmf(0.375, j).unwrap_or(0.0)
}

/// Mean and variance of `Y` under the limit law truncated at `(j_max, k_max)`.
pub fn limit_moments(j_max: usize, k_max: usize) -> Result<(f64, f64)> {
    let pmf = LimitPmfXY::build(j_max, k_max);
    let mass = pmf.mass();
    let residual = (1.0 - mass).abs();
    if residual > MOMENT_RESIDUAL_TOLERANCE {
        return Err(Error::Tolerance {
            residual,
            tolerance: MOMENT_RESIDUAL_TOLERANCE,
        });
    }
    let mut mean = 0.0;
    let mut second = 0.0;
    for (&(_, k), cell) in &pmf.cells {
        let k = k as f64;
        mean += k * cell.prob;
        second += k * k * cell.prob;
    }
    mean /= mass;
    second /= mass;
    Ok((mean, second - mean * mean))
}

/// `e^-lambda lambda^k / k!`.
pub fn poisson_pmf(lambda: f64, k: usize) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("Poisson rate must be positive, got {lambda}")));
    }
    let ln_fact: f64 = (2..=k).map(|i| (i as f64).ln()).sum();
    Ok((k as f64 * lambda.ln() - lambda - ln_fact).exp())
}
