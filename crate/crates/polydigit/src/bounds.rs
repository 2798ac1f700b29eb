//! Two-sided growth bounds for the ratio s_q(p(n)) / s_q(n).
//!
//! Upper direction: for nonnegative p the ratio is at most
//! c1·(log_q n)^(1−1/h); both branches of the underlying min-bound are
//! computed exactly. Lower direction: a set with the distinct-sum property
//! (a B_h set, built greedily here) packs binom(N+h−1, N−1) noninterfering
//! blocks into p(n) while s_q(n) stays N, forcing ratio ≥ N^(h−1)/h!.
//! Polynomials with a negative coefficient instead grow like (q−1)·k along
//! n = q^k.
//!
//! All logarithms are integer digit lengths; no floating point enters any
//! inequality.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::digitsum::{digit_length, digit_sum, Base};
use crate::error::{Error, Result};
use crate::intpoly::StudyPolynomial;
use crate::witness::RatioRecord;

/// A strictly increasing set of positive integers, all divisible by
/// `modulus`, whose h-fold sums (with repetition) are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BhSet {
    ys: Vec<u64>,
    h: u32,
    modulus: u64,
}

impl BhSet {
    pub fn elements(&self) -> &[u64] {
        &self.ys
    }

    pub fn order(&self) -> u32 {
        self.h
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    /// Brute-force check of the distinct-sum property over every multiset of
    /// size h (the defining invariant).
    pub fn distinct_sums_hold(&self) -> bool {
        distinct_h_sums(&self.ys, self.h).is_some()
    }
}

// All h-multiset sums, or None as soon as two collide.
fn distinct_h_sums(ys: &[u64], h: u32) -> Option<HashSet<u128>> {
    let mut sums = HashSet::new();
    let mut stack: Vec<(usize, u32, u128)> = vec![(0, h, 0)];
    while let Some((start, left, acc)) = stack.pop() {
        if left == 0 {
            if !sums.insert(acc) {
                return None;
            }
            continue;
        }
        for (offset, &y) in ys.iter().enumerate().skip(start) {
            stack.push((offset, left - 1, acc + y as u128));
        }
    }
    Some(sums)
}

/// Greedily extend multiples of `modulus` into a B_h set of the requested
/// size. Each candidate is accepted iff the distinct-sum property still holds
/// for the extended set, so the invariant is enforced constructively.
pub fn greedy_bh_set(size: usize, h: u32, modulus: u64) -> Result<BhSet> {
    if size == 0 {
        return Err(Error::Domain("B_h set size must be at least 1".into()));
    }
    if h == 0 {
        return Err(Error::Domain("B_h order must be at least 1".into()));
    }
    if modulus == 0 {
        return Err(Error::Domain("modulus must be at least 1".into()));
    }
    let mut ys: Vec<u64> = Vec::with_capacity(size);
    let mut candidate = modulus;
    while ys.len() < size {
        ys.push(candidate);
        if distinct_h_sums(&ys, h).is_none() {
            ys.pop();
        }
        candidate += modulus;
    }
    Ok(BhSet { ys, h, modulus })
}

/// min{(q−1)(⌊log_q p(n)⌋ + 1), p(s_q(n))}, an exact upper bound for
/// s_q(p(n)) when p has nonnegative coefficients and n ≥ 1.
pub fn poly_digit_sum_upper(p: &StudyPolynomial, n: &BigUint, q: Base) -> Result<BigUint> {
    if !p.has_nonnegative_coeffs() {
        return Err(Error::Domain(
            "upper bound requires nonnegative coefficients; use the negative-coefficient bound"
                .into(),
        ));
    }
    if n.is_zero() {
        return Err(Error::Domain("upper bound requires n >= 1".into()));
    }
    let value = p.poly().eval_biguint(n).magnitude().clone();
    let by_length = BigUint::from(q.get() - 1) * digit_length(&value, q);
    let by_submult = p
        .poly()
        .eval(&BigInt::from(digit_sum(n, q)))
        .magnitude()
        .clone();
    Ok(by_length.min(by_submult))
}

/// The branch constant for [`ratio_upper_bound`]:
/// c1 = max((q−1)(h + A0), λ(h+1)) with A0 = digitlen_q(λ(h+1)).
pub fn ratio_upper_constant(p: &StudyPolynomial, q: Base) -> BigUint {
    let h = p.degree() as u64;
    let packed = p.lambda() * BigUint::from(h + 1);
    let a0 = digit_length(&packed, q);
    let by_length = BigUint::from(q.get() - 1) * (BigUint::from(h) + BigUint::from(a0));
    by_length.max(packed)
}

/// Exact rational upper bound c1·L/⌊L^(1/h)⌋ ≥ ratio(n), with L the digit
/// length of n. Since ⌊L^(1/h)⌋ ≤ L^(1/h), this dominates c1·L^(1−1/h) and
/// keeps the same sublinear growth in log_q n.
pub fn ratio_upper_bound(p: &StudyPolynomial, n: &BigUint, q: Base) -> Result<BigRational> {
    if n < &BigUint::from(2u32) {
        return Err(Error::Domain("ratio upper bound requires n >= 2".into()));
    }
    if !p.has_nonnegative_coeffs() {
        return Err(Error::Domain(
            "ratio upper bound requires nonnegative coefficients".into(),
        ));
    }
    let c1 = ratio_upper_constant(p, q);
    let length = BigUint::from(digit_length(n, q));
    let root = length.nth_root(p.degree());
    debug_assert!(!root.is_zero());
    Ok(BigRational::new(
        BigInt::from(c1 * length),
        BigInt::from(root),
    ))
}

/// Smallest k with q^k > λ(h+1)·h!, i.e. the digit length of λ·(h+1)!.
/// Blocks of the lower-bound construction then never reach q^k.
pub fn block_exponent(p: &StudyPolynomial, q: Base) -> u64 {
    let h = p.degree();
    let mut factorial = BigUint::one();
    for i in 1..=(h as u64 + 1) {
        factorial *= i;
    }
    digit_length(&(p.lambda() * factorial), q)
}

/// A lower-bound certificate: the witness record, the B_h set behind it, the
/// block exponent, and the block count binom(N+h−1, N−1) that s_q(p(n)) is
/// certified to reach.
#[derive(Debug, Clone)]
pub struct LowerBoundWitness {
    pub record: RatioRecord,
    pub bh: BhSet,
    pub block_exponent: u64,
    pub block_count: BigUint,
}

impl LowerBoundWitness {
    /// ratio ≥ block_count / N (which in turn is ≥ N^(h−1)/h!).
    pub fn ratio_floor(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.block_count.clone()),
            BigInt::from(self.bh.len()),
        )
    }
}

/// Build n = Σ q^(y_i) over a greedy B_h set of the given size. Then
/// s_q(n) = size exactly, while every degree-h block of p(n) lands on a
/// distinct noninterfering position, so s_q(p(n)) ≥ binom(size+h−1, size−1).
pub fn lower_bound_witness(p: &StudyPolynomial, q: Base, size: usize) -> Result<LowerBoundWitness> {
    let h = p.degree();
    if !p.has_nonnegative_coeffs() {
        return Err(Error::Domain(
            "lower-bound construction requires nonnegative coefficients".into(),
        ));
    }
    if size < h as usize {
        return Err(Error::Domain(format!(
            "set size must be at least the degree {h}, got {size}"
        )));
    }
    let k = block_exponent(p, q);
    let bh = greedy_bh_set(size, h, k + 1)?;
    let mut n = BigUint::zero();
    for &y in bh.elements() {
        n += q.power(y);
    }
    let record = RatioRecord::compute(p, q, &n)?;
    if record.sn() != size as u128 {
        return Err(Error::Construction(format!(
            "s_q(n) = {} but the construction promises {size}",
            record.sn()
        )));
    }
    let block_count = num_integer::binomial(
        BigUint::from(size as u64 + h as u64 - 1),
        BigUint::from(h as u64),
    );
    if BigUint::from(record.spn()) < block_count {
        return Err(Error::Construction(format!(
            "s_q(p(n)) = {} fell below the block count {block_count}",
            record.spn()
        )));
    }
    Ok(LowerBoundWitness {
        record,
        bh,
        block_exponent: k,
        block_count,
    })
}

/// Lower bound k(q−1) − s_q(−a_j−1) ≤ s_q(p(q^k)) for a polynomial with at
/// least one negative coefficient, a_j being the negative coefficient of
/// smallest index. Validated directly; a failure means k is too small for
/// the blocks of p(q^k) to split.
pub fn negative_coeff_lower_bound(p: &StudyPolynomial, q: Base, k: u64) -> Result<u128> {
    let a_j = p
        .poly()
        .coeffs()
        .iter()
        .find(|c| c.is_negative())
        .ok_or_else(|| {
            Error::Domain("polynomial has no negative coefficient; use the B_h lower bound".into())
        })?;
    let defect = digit_sum(&(a_j.magnitude() - BigUint::one()), q);
    let bound = (q.get() as u128 - 1) * k as u128;
    if bound < defect {
        return Err(Error::Validation(format!(
            "k = {k} is too small: the bound k(q-1) - s_q(-a_j-1) is negative"
        )));
    }
    let bound = bound - defect;
    let value = p.poly().eval_biguint(&q.power(k));
    if value.is_negative() {
        return Err(Error::Validation(format!(
            "k = {k} is too small: p(q^k) = {value} is negative"
        )));
    }
    let actual = digit_sum(value.magnitude(), q);
    if actual < bound {
        return Err(Error::Validation(format!(
            "k = {k} is too small: s_q(p(q^k)) = {actual} is below the bound {bound}"
        )));
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    fn b(q: u64) -> Base {
        Base::new(q).unwrap()
    }

    fn study(s: &str) -> StudyPolynomial {
        StudyPolynomial::from_str(s).unwrap()
    }

    #[test]
    fn greedy_singleton() {
        let set = greedy_bh_set(1, 3, 1).unwrap();
        assert_eq!(set.elements(), &[1]);
        assert!(set.distinct_sums_hold());
    }

    #[test]
    fn greedy_sidon_set_brute_forced() {
        let set = greedy_bh_set(4, 2, 1).unwrap();
        assert_eq!(set.len(), 4);
        assert!(set.distinct_sums_hold());
        // Pairwise sums with repetition: C(5,2) of them, all distinct.
        let ys = set.elements();
        let mut sums = HashSet::new();
        for i in 0..ys.len() {
            for j in i..ys.len() {
                assert!(sums.insert(ys[i] + ys[j]), "collision at ({i},{j})");
            }
        }
    }

    #[test]
    fn greedy_respects_modulus() {
        let set = greedy_bh_set(3, 3, 6).unwrap();
        assert!(set.elements().iter().all(|y| y % 6 == 0));
        assert!(set.distinct_sums_hold());
    }

    #[test]
    fn greedy_brute_force_box() {
        for h in 2..=4u32 {
            for size in 1..=8usize {
                for modulus in [1u64, 4, 6] {
                    let set = greedy_bh_set(size, h, modulus).unwrap();
                    assert_eq!(set.len(), size);
                    assert!(set.distinct_sums_hold(), "h={h} size={size}");
                }
            }
        }
    }

    #[test]
    fn upper_bound_dominates_digit_sum() {
        let p = study("x^2");
        for q in [2u64, 10] {
            let base = b(q);
            let n = BigUint::from(q - 1);
            let bound = poly_digit_sum_upper(&p, &n, base).unwrap();
            let actual = digit_sum(&(&n * &n), base);
            assert!(BigUint::from(actual) <= bound);
        }
        // Exhaustive check against the minimal cube-deficit point.
        let n = BigUint::from(407_182_835_067u64);
        let p3 = study("x^3");
        let bound = poly_digit_sum_upper(&p3, &n, b(2)).unwrap();
        let actual = digit_sum(&(&n * &n * &n), b(2));
        assert!(BigUint::from(actual) <= bound);
    }

    #[test]
    fn upper_bound_branch_values() {
        // Both branches computed by hand for x^2+1 at n = 10^6 over base 10:
        // p(n) = 10^12 + 1 has 13 digits -> 9·13 = 117; p(s(n)) = p(1) = 2.
        let p = study("x^2+1");
        let n = BigUint::from(1_000_000u64);
        assert_eq!(poly_digit_sum_upper(&p, &n, b(10)).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn upper_bound_rejects_negative_coeffs() {
        assert!(poly_digit_sum_upper(&study("x^2-1"), &BigUint::from(5u32), b(2)).is_err());
    }

    #[test]
    fn ratio_upper_bound_dominates_exhaustively() {
        let p = study("x^2");
        let base = b(2);
        for v in 2u64..=100_000 {
            let n = BigUint::from(v);
            let bound = ratio_upper_bound(&p, &n, base).unwrap();
            let spn = digit_sum(&(&n * &n), base);
            let sn = digit_sum(&n, base);
            let ratio = BigRational::new(BigInt::from(spn), BigInt::from(sn));
            assert!(ratio <= bound, "n={v}: {ratio} > {bound}");
        }
    }

    #[test]
    fn ratio_upper_bound_grows_sublinearly() {
        // bound / L shrinks as n grows through powers of two.
        let p = study("x^3");
        let base = b(2);
        let mut previous: Option<BigRational> = None;
        for k in [4u64, 16, 64, 256, 1024] {
            let n = base.power(k);
            let bound = ratio_upper_bound(&p, &n, base).unwrap();
            let l = BigRational::from_integer(BigInt::from(digit_length(&n, base)));
            let normalized = bound / l;
            if let Some(prev) = previous {
                assert!(normalized < prev);
            }
            previous = Some(normalized);
        }
        // Powers of the base have ratio exactly 1, far below the bound.
        let n = base.power(64);
        let record = RatioRecord::compute(&p, base, &n).unwrap();
        assert_eq!(record.ratio(), &BigRational::from_integer(BigInt::one()));
    }

    #[test]
    fn block_exponent_fixtures() {
        // digitlen_2(1·3!) = 3 and digitlen_2(1·4!) = 5.
        assert_eq!(block_exponent(&study("x^2"), b(2)), 3);
        assert_eq!(block_exponent(&study("x^3"), b(2)), 5);
        // Very large bases need a single digit.
        assert_eq!(block_exponent(&study("x^2"), b(1 << 40)), 1);
    }

    #[test]
    fn block_exponent_clears_packed_coefficients() {
        for s in ["x^2", "x^3", "3x^4+x+2"] {
            let p = study(s);
            for q in [2u64, 3, 10] {
                let k = block_exponent(&p, b(q));
                let h = p.degree() as u64;
                let mut hfact = BigUint::one();
                for i in 1..=h {
                    hfact *= i;
                }
                let packed = p.lambda() * BigUint::from(h + 1) * hfact;
                assert!(packed < b(q).power(k));
            }
        }
    }

    #[test]
    fn lower_bound_witness_small_square() {
        let w = lower_bound_witness(&study("x^2"), b(2), 2).unwrap();
        assert_eq!(w.record.sn(), 2);
        assert!(w.record.spn() >= 3);
        assert_eq!(w.block_count, BigUint::from(3u32));
    }

    #[test]
    fn lower_bound_witness_fixture_ratios() {
        // binom(5,3)/4 = 10/4 for squares on four elements.
        let w = lower_bound_witness(&study("x^2"), b(2), 4).unwrap();
        assert_eq!(w.block_count, BigUint::from(10u32));
        assert!(w.record.ratio() >= &w.ratio_floor());
        // binom(5,2)/3 = 10/3 for cubes on three elements over base 3.
        let w = lower_bound_witness(&study("x^3"), b(3), 3).unwrap();
        assert_eq!(w.block_count, BigUint::from(10u32));
        assert!(w.record.ratio() >= &BigRational::new(BigInt::from(10), BigInt::from(3)));
    }

    #[test]
    fn lower_bound_witness_beats_power_rule() {
        // ratio ≥ N^(h−1)/h! follows from the block count.
        for (p, q, size) in [("x^2", 2u64, 5usize), ("x^2", 3, 6), ("x^3", 2, 4)] {
            let p = study(p);
            let h = p.degree() as u64;
            let w = lower_bound_witness(&p, b(q), size).unwrap();
            let mut hfact = BigUint::one();
            for i in 1..=h {
                hfact *= i;
            }
            let floor = BigRational::new(
                BigInt::from(BigUint::from(size as u64).pow(h as u32 - 1)),
                BigInt::from(hfact),
            );
            assert!(w.record.ratio() >= &floor, "p={p} q={q} size={size}");
        }
    }

    #[test]
    fn negative_growth_fixtures() {
        // x^2 − 1 at 2^10: all-ones expansion, 20 ones against bound 10.
        assert_eq!(negative_coeff_lower_bound(&study("x^2-1"), b(2), 10).unwrap(), 10);
        let v = b(2).power(20) - BigUint::one();
        assert_eq!(digit_sum(&v, b(2)), 20);
        // x^2 − x at 2^10: bound 10 is attained exactly.
        assert_eq!(negative_coeff_lower_bound(&study("x^2-x"), b(2), 10).unwrap(), 10);
        let v = b(2).power(20) - b(2).power(10);
        assert_eq!(digit_sum(&v, b(2)), 10);
        // The carrier itself: negative coefficient at index 2, bound k(q−1).
        let carrier = study("3x^4+3x^3-x^2+3x+3");
        assert_eq!(negative_coeff_lower_bound(&carrier, b(2), 20).unwrap(), 20);
    }

    #[test]
    fn negative_growth_requires_negative_coefficient() {
        assert!(negative_coeff_lower_bound(&study("x^2"), b(2), 10).is_err());
    }

    #[test]
    fn negative_growth_single_point_rate() {
        // At n = q^k the ratio itself is at least the bound, since s_q(n)=1;
        // this is the observed (q−1−ε)·k growth rate at one point.
        for (s, q, k) in [("x^2-1", 2u64, 16u64), ("x^3-2x+5", 3, 9), ("2x^4+x-7", 2, 12)] {
            let p = study(s);
            let base = b(q);
            let bound = negative_coeff_lower_bound(&p, base, k).unwrap();
            let n = base.power(k);
            let record = RatioRecord::compute(&p, base, &n).unwrap();
            assert_eq!(record.sn(), 1);
            assert!(record.spn() >= bound);
        }
    }

    #[test]
    fn bh_set_serializes_as_json() {
        let set = greedy_bh_set(4, 2, 3).unwrap();
        let json = serde_json::to_string(&set).unwrap();
        let back: BhSet = serde_json::from_str(&json).unwrap();
        assert_eq!(set, back);
    }
}
