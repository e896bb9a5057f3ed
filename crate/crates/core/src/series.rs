//! Exact big-number helpers and truncated power series in `z` whose
//! coefficients are polynomials in the two marks `u` (inner reticulations)
//! and `w` (reticulations).
//!
//! Series are dense in `z` and sparse in `(u, w)`. Every series carries a
//! pair of mark caps; products silently drop monomials whose mark degrees
//! exceed the caps. Callers pick caps beyond which all counts are known to
//! vanish, so the truncation is exact.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number with a canonical (reduced, positive denominator) form.
pub type ExactRational = BigRational;

/// `m!! = m (m-2) ... 1` for odd `m >= -1`, with `(-1)!! = 1`.
pub fn double_factorial(m: i64) -> Result<BigUint> {
    if m < -1 || m % 2 == 0 {
        return Err(Error::Domain(format!(
            "double factorial needs an odd argument >= -1, got {m}"
        )));
    }
    let mut acc = BigUint::one();
    let mut f = m;
    while f > 1 {
        acc *= f as u64;
        f -= 2;
    }
    Ok(acc)
}

pub fn factorial(n: usize) -> BigUint {
    (2..=n as u64).fold(BigUint::one(), |acc, f| acc * f)
}

/// Binomial coefficient; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= (n - i) as u64;
        acc /= (i + 1) as u64;
    }
    acc
}

/// Converts an exact rational to the nearest `f64` without going through
/// possibly-overflowing integer conversions.
pub fn rational_to_f64(r: &ExactRational) -> f64 {
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * ratio_to_f64(r.numer().magnitude(), r.denom().magnitude())
}

/// `num / den` as `f64`, accurate to the last bit for arbitrary sizes.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    assert!(!den.is_zero(), "division by zero");
    // Scale so that the integer quotient carries ~80 significant bits.
    let shift = 80i64 - (num.bits() as i64 - den.bits() as i64);
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let q = q.to_f64().unwrap_or(f64::INFINITY);
    q * 2f64.powi(-(shift as i32))
}

/// Degree caps shared by every mark polynomial in a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MarkCaps {
    pub max_u: usize,
    pub max_w: usize,
}

impl MarkCaps {
    pub const SCALAR: MarkCaps = MarkCaps { max_u: 0, max_w: 0 };

    pub fn new(max_u: usize, max_w: usize) -> Self {
        MarkCaps { max_u, max_w }
    }

    /// Caps for galled networks with `n` leaves: at most `n-2` inner
    /// reticulations and `2n-2` reticulations.
    pub fn for_leaves(n: usize) -> Self {
        MarkCaps {
            max_u: n.saturating_sub(2),
            max_w: (2 * n).saturating_sub(2),
        }
    }

    fn admits(&self, u: usize, w: usize) -> bool {
        u <= self.max_u && w <= self.max_w
    }
}

/// Sparse polynomial in `u`, `w` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkPoly {
    terms: BTreeMap<(usize, usize), ExactRational>,
    caps: MarkCaps,
}

impl MarkPoly {
    pub fn zero(caps: MarkCaps) -> Self {
        MarkPoly {
            terms: BTreeMap::new(),
            caps,
        }
    }

    pub fn constant(c: ExactRational, caps: MarkCaps) -> Self {
        Self::monomial(0, 0, c, caps)
    }

    /// `c u^u_deg w^w_deg`; zero if the monomial lies beyond the caps.
    pub fn monomial(u_deg: usize, w_deg: usize, c: ExactRational, caps: MarkCaps) -> Self {
        let mut p = Self::zero(caps);
        p.add_term(u_deg, w_deg, c);
        p
    }

    pub fn caps(&self) -> MarkCaps {
        self.caps
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, u_deg: usize, w_deg: usize) -> ExactRational {
        self.terms
            .get(&(u_deg, w_deg))
            .cloned()
            .unwrap_or_else(ExactRational::zero)
    }

    /// Nonzero terms in increasing `(u, w)` order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &ExactRational)> {
        self.terms.iter().map(|(&(u, w), c)| (u, w, c))
    }

    pub fn add_term(&mut self, u_deg: usize, w_deg: usize, c: ExactRational) {
        if c.is_zero() || !self.caps.admits(u_deg, w_deg) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((u_deg, w_deg)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_caps(&self, other: &MarkPoly) -> Result<()> {
        if self.caps != other.caps {
            return Err(Error::Contract(format!(
                "mark caps differ: {:?} vs {:?}",
                self.caps, other.caps
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &MarkPoly) -> Result<MarkPoly> {
        self.check_caps(other)?;
        let mut out = self.clone();
        for (u, w, c) in other.terms() {
            out.add_term(u, w, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &ExactRational) -> MarkPoly {
        let mut out = MarkPoly::zero(self.caps);
        if factor.is_zero() {
            return out;
        }
        for (u, w, c) in self.terms() {
            out.terms.insert((u, w), c * factor);
        }
        out
    }

    /// Multiplies by `u^du w^dw`, dropping what falls beyond the caps.
    pub fn shift(&self, du: usize, dw: usize) -> MarkPoly {
        let mut out = MarkPoly::zero(self.caps);
        for (u, w, c) in self.terms() {
            out.add_term(u + du, w + dw, c.clone());
        }
        out
    }

    pub fn mul(&self, other: &MarkPoly) -> Result<MarkPoly> {
        self.check_caps(other)?;
        let mut out = MarkPoly::zero(self.caps);
        for (u1, w1, c1) in self.terms() {
            for (u2, w2, c2) in other.terms() {
                out.add_term(u1 + u2, w1 + w2, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Coefficients as integers, or `None` if any is fractional.
    pub fn to_integer_terms(&self) -> Option<Vec<(usize, usize, BigInt)>> {
        self.terms()
            .map(|(u, w, c)| c.is_integer().then(|| (u, w, c.to_integer())))
            .collect()
    }
}

impl fmt::Display for MarkPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (u, w, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            if u > 0 {
                write!(f, "*u^{u}")?;
            }
            if w > 0 {
                write!(f, "*w^{w}")?;
            }
        }
        Ok(())
    }
}

/// Power series in `z` truncated after `z^order` (inclusive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedSeries {
    coeffs: Vec<MarkPoly>,
    caps: MarkCaps,
}

impl MarkedSeries {
    pub fn zero(order: usize, caps: MarkCaps) -> Self {
        MarkedSeries {
            coeffs: vec![MarkPoly::zero(caps); order + 1],
            caps,
        }
    }

    pub fn one(order: usize, caps: MarkCaps) -> Self {
        let mut s = Self::zero(order, caps);
        s.coeffs[0] = MarkPoly::constant(ExactRational::one(), caps);
        s
    }

    /// Scalar (mark-free) series from rational coefficients `c_0, c_1, ...`.
    pub fn from_scalars(coeffs: Vec<ExactRational>, caps: MarkCaps) -> Result<Self> {
        let polys = coeffs
            .into_iter()
            .map(|c| MarkPoly::constant(c, caps))
            .collect();
        Self::from_coeffs(polys, caps)
    }

    pub fn from_coeffs(coeffs: Vec<MarkPoly>, caps: MarkCaps) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Contract("a series needs at least one coefficient".into()));
        }
        if let Some(bad) = coeffs.iter().find(|p| p.caps != caps) {
            return Err(Error::Contract(format!(
                "coefficient caps {:?} differ from series caps {:?}",
                bad.caps, caps
            )));
        }
        Ok(MarkedSeries { coeffs, caps })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn caps(&self) -> MarkCaps {
        self.caps
    }

    pub fn coeff(&self, z_deg: usize) -> &MarkPoly {
        &self.coeffs[z_deg]
    }

    pub fn coeffs(&self) -> &[MarkPoly] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, z_deg: usize, p: MarkPoly) -> Result<()> {
        if p.caps != self.caps {
            return Err(Error::Contract("coefficient caps differ from series caps".into()));
        }
        if z_deg > self.order() {
            return Err(Error::Contract(format!(
                "z-degree {z_deg} beyond series order {}",
                self.order()
            )));
        }
        self.coeffs[z_deg] = p;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(MarkPoly::is_zero)
    }

    /// Lowest z-degree carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|p| !p.is_zero())
    }

    pub fn truncate(&self, order: usize) -> MarkedSeries {
        let mut coeffs: Vec<MarkPoly> = self.coeffs.iter().take(order + 1).cloned().collect();
        coeffs.resize(order + 1, MarkPoly::zero(self.caps));
        MarkedSeries {
            coeffs,
            caps: self.caps,
        }
    }

    fn check_caps(&self, other: &MarkedSeries) -> Result<()> {
        if self.caps != other.caps {
            return Err(Error::Contract(format!(
                "series caps differ: {:?} vs {:?}",
                self.caps, other.caps
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &MarkedSeries) -> Result<MarkedSeries> {
        self.check_caps(other)?;
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|i| self.coeffs[i].add(&other.coeffs[i]))
            .collect::<Result<_>>()?;
        Ok(MarkedSeries {
            coeffs,
            caps: self.caps,
        })
    }

    pub fn scale(&self, factor: &ExactRational) -> MarkedSeries {
        MarkedSeries {
            coeffs: self.coeffs.iter().map(|p| p.scale(factor)).collect(),
            caps: self.caps,
        }
    }

    /// Multiplies every coefficient by `u^du w^dw`.
    pub fn shift_marks(&self, du: usize, dw: usize) -> MarkedSeries {
        MarkedSeries {
            coeffs: self.coeffs.iter().map(|p| p.shift(du, dw)).collect(),
            caps: self.caps,
        }
    }

    /// Multiplies every coefficient by the mark polynomial `p`.
    pub fn mul_poly(&self, p: &MarkPoly) -> Result<MarkedSeries> {
        if p.caps != self.caps {
            return Err(Error::Contract("polynomial caps differ from series caps".into()));
        }
        let coeffs = self.coeffs.iter().map(|c| c.mul(p)).collect::<Result<_>>()?;
        Ok(MarkedSeries {
            coeffs,
            caps: self.caps,
        })
    }
}

/// Truncated Cauchy product; the result has order `min(a.order, b.order)`.
pub fn series_mul(a: &MarkedSeries, b: &MarkedSeries) -> Result<MarkedSeries> {
    a.check_caps(b)?;
    let order = a.order().min(b.order());
    let mut out = MarkedSeries::zero(order, a.caps);
    for i in 0..=order {
        if a.coeffs[i].is_zero() {
            continue;
        }
        for j in 0..=(order - i) {
            if b.coeffs[j].is_zero() {
                continue;
            }
            let prod = a.coeffs[i].mul(&b.coeffs[j])?;
            out.coeffs[i + j] = out.coeffs[i + j].add(&prod)?;
        }
    }
    Ok(out)
}

/// `(1 - m)^(-n)` truncated after `z^order`, for `m` without constant term.
///
/// Expands `sum_i C(n-1+i, i) m^i`, which terminates at `i = order` since
/// `m^i` has valuation at least `i`.
pub fn reciprocal_power(m: &MarkedSeries, n: usize, order: usize) -> Result<MarkedSeries> {
    if n == 0 {
        return Err(Error::Domain("reciprocal_power needs n >= 1".into()));
    }
    if !m.coeffs[0].is_zero() {
        return Err(Error::Contract(
            "reciprocal_power needs a series with zero constant term".into(),
        ));
    }
    if m.order() < order {
        return Err(Error::Contract(format!(
            "series known to order {} but order {order} requested",
            m.order()
        )));
    }
    let m = m.truncate(order);
    let mut acc = MarkedSeries::one(order, m.caps);
    let mut power = MarkedSeries::one(order, m.caps);
    for i in 1..=order {
        power = series_mul(&power, &m)?;
        if power.is_zero() {
            break;
        }
        let c = ExactRational::from_integer(BigInt::from(binomial(n - 1 + i, i)));
        acc = acc.add(&power.scale(&c))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> ExactRational {
        ExactRational::from_integer(n.into())
    }

    fn scalar(coeffs: &[i64], caps: MarkCaps) -> MarkedSeries {
        MarkedSeries::from_scalars(coeffs.iter().map(|&c| q(c)).collect(), caps).unwrap()
    }

    #[test]
    fn double_factorial_values() {
        assert_eq!(double_factorial(-1).unwrap(), BigUint::one());
        assert_eq!(double_factorial(1).unwrap(), BigUint::one());
        assert_eq!(double_factorial(5).unwrap(), BigUint::from(15u32));
        assert_eq!(double_factorial(17).unwrap(), BigUint::from(34_459_425u64));
    }

    #[test]
    fn double_factorial_rejects_even_and_small() {
        assert!(matches!(double_factorial(4), Err(Error::Domain(_))));
        assert!(matches!(double_factorial(0), Err(Error::Domain(_))));
        assert!(matches!(double_factorial(-3), Err(Error::Domain(_))));
    }

    #[test]
    fn binomial_edges() {
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial(10, 3), BigUint::from(120u32));
        assert_eq!(binomial(60, 30), "118264581564861424".parse().unwrap());
    }

    #[test]
    fn ratio_to_f64_handles_huge_operands() {
        let big = factorial(300);
        assert_eq!(ratio_to_f64(&big, &big), 1.0);
        let r = ratio_to_f64(&(&big * 3u32), &(&big * 8u32));
        assert_eq!(r, 0.375);
        assert_eq!(ratio_to_f64(&BigUint::zero(), &big), 0.0);
        let third = ratio_to_f64(&BigUint::one(), &BigUint::from(3u32));
        assert_eq!(third, 1.0 / 3.0);
    }

    #[test]
    fn mul_difference_of_squares() {
        let caps = MarkCaps::SCALAR;
        let a = scalar(&[1, 1, 0], caps);
        let b = scalar(&[1, -1, 0], caps);
        assert_eq!(series_mul(&a, &b).unwrap(), scalar(&[1, 0, -1], caps));
    }

    #[test]
    fn mul_truncates() {
        let caps = MarkCaps::SCALAR;
        let a = scalar(&[0, 0, 1, 0], caps);
        assert!(series_mul(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn mul_with_marks() {
        let caps = MarkCaps::new(2, 2);
        let mut a = MarkedSeries::one(2, caps);
        a.set_coeff(1, MarkPoly::monomial(1, 1, q(1), caps)).unwrap();
        let sq = series_mul(&a, &a).unwrap();
        assert_eq!(sq.coeff(0), &MarkPoly::constant(q(1), caps));
        assert_eq!(sq.coeff(1), &MarkPoly::monomial(1, 1, q(2), caps));
        assert_eq!(sq.coeff(2), &MarkPoly::monomial(2, 2, q(1), caps));
    }

    #[test]
    fn mul_drops_terms_beyond_caps() {
        let caps = MarkCaps::new(1, 1);
        let mut a = MarkedSeries::one(2, caps);
        a.set_coeff(1, MarkPoly::monomial(1, 1, q(1), caps)).unwrap();
        let sq = series_mul(&a, &a).unwrap();
        assert!(sq.coeff(2).is_zero());
    }

    #[test]
    fn mul_rejects_cap_mismatch() {
        let a = MarkedSeries::one(2, MarkCaps::new(1, 1));
        let b = MarkedSeries::one(2, MarkCaps::new(1, 2));
        assert!(matches!(series_mul(&a, &b), Err(Error::Contract(_))));
    }

    #[test]
    fn reciprocal_power_examples() {
        let caps = MarkCaps::SCALAR;
        let m = scalar(&[0, 3, 40], caps);
        assert_eq!(reciprocal_power(&m, 3, 2).unwrap(), scalar(&[1, 9, 174], caps));

        let zero = MarkedSeries::zero(4, caps);
        assert_eq!(reciprocal_power(&zero, 5, 4).unwrap(), MarkedSeries::one(4, caps));

        let z = scalar(&[0, 1, 0, 0], caps);
        assert_eq!(reciprocal_power(&z, 1, 3).unwrap(), scalar(&[1, 1, 1, 1], caps));
    }

    #[test]
    fn reciprocal_power_rejects_constant_term() {
        let m = scalar(&[1, 1], MarkCaps::SCALAR);
        assert!(matches!(reciprocal_power(&m, 2, 1), Err(Error::Contract(_))));
    }

    fn arb_poly(caps: MarkCaps) -> impl Strategy<Value = MarkPoly> {
        prop::collection::vec((0..=caps.max_u, 0..=caps.max_w, -5i64..=5), 0..4).prop_map(
            move |terms| {
                let mut p = MarkPoly::zero(caps);
                for (u, w, c) in terms {
                    p.add_term(u, w, q(c));
                }
                p
            },
        )
    }

    fn arb_series(order: usize, caps: MarkCaps) -> impl Strategy<Value = MarkedSeries> {
        prop::collection::vec(arb_poly(caps), order + 1)
            .prop_map(move |coeffs| MarkedSeries::from_coeffs(coeffs, caps).unwrap())
    }

    const CAPS: MarkCaps = MarkCaps { max_u: 2, max_w: 3 };

    proptest! {
        #[test]
        fn ring_laws(a in arb_series(4, CAPS), b in arb_series(4, CAPS), c in arb_series(4, CAPS)) {
            let ab = series_mul(&a, &b).unwrap();
            prop_assert_eq!(&ab, &series_mul(&b, &a).unwrap());
            prop_assert_eq!(
                series_mul(&ab, &c).unwrap(),
                series_mul(&a, &series_mul(&b, &c).unwrap()).unwrap()
            );
            prop_assert_eq!(
                series_mul(&a, &b.add(&c).unwrap()).unwrap(),
                ab.add(&series_mul(&a, &c).unwrap()).unwrap()
            );
        }

        #[test]
        fn reciprocal_power_inverts(tail in arb_series(4, CAPS), n in 1usize..5) {
            let mut m = tail;
            m.set_coeff(0, MarkPoly::zero(CAPS)).unwrap();
            let inv = reciprocal_power(&m, n, 4).unwrap();
            let one_minus_m = MarkedSeries::one(4, CAPS).add(&m.scale(&q(-1))).unwrap();
            let mut prod = inv;
            for _ in 0..n {
                prod = series_mul(&prod, &one_minus_m).unwrap();
            }
            prop_assert_eq!(prod, MarkedSeries::one(4, CAPS));
        }

        #[test]
        fn stored_rationals_are_normalized(a in arb_series(3, CAPS), b in arb_series(3, CAPS)) {
            let half = ExactRational::new(1.into(), 2.into());
            let p = series_mul(&a.scale(&half), &b).unwrap();
            for poly in p.coeffs() {
                for (_, _, c) in poly.terms() {
                    prop_assert!(!c.is_zero());
                    let renorm = ExactRational::new(c.numer().clone(), c.denom().clone());
                    prop_assert_eq!(&renorm, c);
                }
            }
        }
    }
}
