//! Base-q digit expansions and the digit-sum function with its exact
//! splitting identities.
//!
//! Everything here is exact integer arithmetic. The central function is
//! [`digit_sum`]; the splitting identities
//!
//! ```text
//! s_q(a·q^k + b) = s_q(a) + s_q(b)                      (1 ≤ b < q^k)
//! s_q(a·q^k − b) = s_q(a−1) + (q−1)·k − s_q(b−1)        (1 ≤ b < q^k)
//! s_q(a + b)     = s_q(a) + s_q(b) − (q−1)·carries(a,b)
//! ```
//!
//! are exposed both as fast evaluators ([`split_pos`], [`split_neg`]) and as
//! checked verifiers ([`verify_split_pos`], [`verify_split_neg`]) that compare
//! the identity value against a direct expansion.
//!
//! Digit sums are returned as `u128`: a value would need more than 2^64
//! base-q digits in memory before the sum of its digits could overflow,
//! which is not physically representable.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A positional base q ≥ 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Base {
    q: u64,
}

impl Base {
    pub fn new(q: u64) -> Result<Base> {
        if q < 2 {
            return Err(Error::InvalidBase(q));
        }
        Ok(Base { q })
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.q
    }

    pub fn to_biguint(self) -> BigUint {
        BigUint::from(self.q)
    }

    /// q^k as an arbitrary-precision integer.
    pub fn power(self, k: u64) -> BigUint {
        let k = u32::try_from(k).expect("exponent too large");
        self.to_biguint().pow(k)
    }

    /// Some(j) when q = 2^j.
    #[inline]
    pub fn log2_exact(self) -> Option<u32> {
        if self.q.is_power_of_two() {
            Some(self.q.trailing_zeros())
        } else {
            None
        }
    }

    /// Largest (q^t, t) with q^t ≤ u64::MAX, used to batch digit extraction
    /// into machine-word divisions.
    pub fn word_chunk(self) -> (u64, u32) {
        let mut chunk = self.q;
        let mut per = 1u32;
        while let Some(next) = chunk.checked_mul(self.q) {
            chunk = next;
            per += 1;
        }
        (chunk, per)
    }
}

impl std::fmt::Display for Base {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.q)
    }
}

/// Base-q expansion of a nonnegative integer, least-significant digit first.
///
/// Canonical form: every digit is in `0..q`, the last digit is nonzero, and
/// the empty sequence represents zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitString {
    digits: Vec<u64>,
    base: Base,
}

impl DigitString {
    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Reconstruct the represented value, Σ digits[i]·q^i.
    pub fn value(&self) -> BigUint {
        let mut acc = BigUint::zero();
        for &d in self.digits.iter().rev() {
            acc = acc * self.base.q + d;
        }
        acc
    }

    /// Sum of the digits.
    pub fn sum(&self) -> u128 {
        self.digits.iter().map(|&d| d as u128).sum()
    }
}

fn trim_trailing_zeros(digits: &mut Vec<u64>) {
    while digits.last() == Some(&0) {
        digits.pop();
    }
}

/// Expand `n` in base q.
pub fn to_digits(n: &BigUint, base: Base) -> DigitString {
    let mut digits = if n.is_zero() {
        Vec::new()
    } else if let Some(j) = base.log2_exact() {
        digits_pow2(n, j)
    } else if base.q <= 256 {
        n.to_radix_le(base.q as u32).into_iter().map(u64::from).collect()
    } else {
        digits_by_division(n, base)
    };
    trim_trailing_zeros(&mut digits);
    DigitString { digits, base }
}

// q = 2^j: slide a bit window over the little-endian limbs.
fn digits_pow2(n: &BigUint, j: u32) -> Vec<u64> {
    let mask: u128 = (1u128 << j) - 1;
    let mut digits = Vec::with_capacity((n.bits() as usize) / j as usize + 1);
    let mut window: u128 = 0;
    let mut avail: u32 = 0;
    for limb in n.iter_u64_digits() {
        window |= (limb as u128) << avail;
        avail += 64;
        while avail >= j {
            digits.push((window & mask) as u64);
            window >>= j;
            avail -= j;
        }
    }
    while window != 0 || avail > 0 {
        digits.push((window & mask) as u64);
        window >>= j;
        avail = avail.saturating_sub(j);
    }
    digits
}

fn digits_by_division(n: &BigUint, base: Base) -> Vec<u64> {
    let (chunk, per) = base.word_chunk();
    let chunk_big = BigUint::from(chunk);
    let mut rest = n.clone();
    let mut digits = Vec::new();
    while !rest.is_zero() {
        let (quot, rem) = num_integer::Integer::div_rem(&rest, &chunk_big);
        let mut r = rem.to_u64().expect("remainder fits a word");
        for _ in 0..per {
            digits.push(r % base.q);
            r /= base.q;
        }
        rest = quot;
    }
    digits
}

/// s_q(n), the sum of the base-q digits of n. `digit_sum(0) = 0`.
pub fn digit_sum(n: &BigUint, base: Base) -> u128 {
    if n.is_zero() {
        return 0;
    }
    if base.q == 2 {
        return n.count_ones() as u128;
    }
    if let Some(j) = base.log2_exact() {
        let mask: u128 = (1u128 << j) - 1;
        let mut sum: u128 = 0;
        let mut window: u128 = 0;
        let mut avail: u32 = 0;
        for limb in n.iter_u64_digits() {
            window |= (limb as u128) << avail;
            avail += 64;
            while avail >= j {
                sum += window & mask;
                window >>= j;
                avail -= j;
            }
        }
        while window != 0 {
            sum += window & mask;
            window >>= j;
        }
        return sum;
    }
    if base.q <= 256 {
        return n.to_radix_le(base.q as u32).iter().map(|&d| d as u128).sum();
    }
    let (chunk, per) = base.word_chunk();
    let chunk_big = BigUint::from(chunk);
    let mut rest = n.clone();
    let mut sum: u128 = 0;
    while !rest.is_zero() {
        let (quot, rem) = num_integer::Integer::div_rem(&rest, &chunk_big);
        let mut r = rem.to_u64().expect("remainder fits a word");
        for _ in 0..per {
            sum += (r % base.q) as u128;
            r /= base.q;
        }
        rest = quot;
    }
    sum
}

/// Number of base-q digits of n: ⌊log_q n⌋ + 1 for n ≥ 1, and 0 for n = 0.
pub fn digit_length(n: &BigUint, base: Base) -> u64 {
    if n.is_zero() {
        return 0;
    }
    if let Some(j) = base.log2_exact() {
        return n.bits().div_ceil(j as u64);
    }
    // Count digits by batched division without materializing them.
    let (chunk, per) = base.word_chunk();
    let chunk_big = BigUint::from(chunk);
    let mut rest = n.clone();
    let mut full_chunks: u64 = 0;
    let mut top: u64 = 0;
    while !rest.is_zero() {
        let (quot, rem) = num_integer::Integer::div_rem(&rest, &chunk_big);
        if quot.is_zero() {
            top = rem.to_u64().expect("remainder fits a word");
        } else {
            full_chunks += 1;
        }
        rest = quot;
    }
    let mut top_len = 0u64;
    while top > 0 {
        top_len += 1;
        top /= base.q;
    }
    full_chunks * per as u64 + top_len
}

fn check_split_preconditions(a: &BigUint, b: &BigUint, k: u64, base: Base, op: &str) -> Result<()> {
    if a.is_zero() {
        return Err(Error::Domain(format!("{op}: a must be at least 1")));
    }
    if k == 0 {
        return Err(Error::Domain(format!("{op}: k must be at least 1")));
    }
    if b.is_zero() {
        return Err(Error::Domain(format!("{op}: b must be at least 1")));
    }
    if *b >= base.power(k) {
        return Err(Error::Domain(format!(
            "{op}: b must be below q^k = {}^{}, got b = {}",
            base.q, k, b
        )));
    }
    Ok(())
}

/// s_q(a·q^k + b) evaluated through the identity s_q(a) + s_q(b).
///
/// Requires 1 ≤ b < q^k, a ≥ 1, k ≥ 1 (the digit blocks of a and b then
/// occupy disjoint positions).
pub fn split_pos(a: &BigUint, b: &BigUint, k: u64, base: Base) -> Result<u128> {
    check_split_preconditions(a, b, k, base, "split_pos")?;
    Ok(digit_sum(a, base) + digit_sum(b, base))
}

/// s_q(a·q^k − b) evaluated through the identity
/// s_q(a−1) + (q−1)·k − s_q(b−1), for 1 ≤ b < q^k, a ≥ 1, k ≥ 1.
pub fn split_neg(a: &BigUint, b: &BigUint, k: u64, base: Base) -> Result<u128> {
    check_split_preconditions(a, b, k, base, "split_neg")?;
    let one = BigUint::one();
    let positive = digit_sum(&(a - &one), base) + (base.q as u128 - 1) * k as u128;
    let negative = digit_sum(&(b - &one), base);
    debug_assert!(positive >= negative);
    Ok(positive - negative)
}

/// Verifier form of [`split_pos`]: also expands a·q^k + b directly and fails
/// with a validation error on any mismatch.
pub fn verify_split_pos(a: &BigUint, b: &BigUint, k: u64, base: Base) -> Result<u128> {
    let identity = split_pos(a, b, k, base)?;
    let direct = digit_sum(&(a * base.power(k) + b), base);
    if identity != direct {
        return Err(Error::Validation(format!(
            "split_pos identity {identity} != direct digit sum {direct} for a={a}, b={b}, k={k}, q={}",
            base.q
        )));
    }
    Ok(identity)
}

/// Verifier form of [`split_neg`].
pub fn verify_split_neg(a: &BigUint, b: &BigUint, k: u64, base: Base) -> Result<u128> {
    let identity = split_neg(a, b, k, base)?;
    let direct = digit_sum(&(a * base.power(k) - b), base);
    if identity != direct {
        return Err(Error::Validation(format!(
            "split_neg identity {identity} != direct digit sum {direct} for a={a}, b={b}, k={k}, q={}",
            base.q
        )));
    }
    Ok(identity)
}

/// Number of carry operations when adding a and b in base q; the value r with
/// s_q(a+b) = s_q(a) + s_q(b) − (q−1)·r.
pub fn carry_count(a: &BigUint, b: &BigUint, base: Base) -> u128 {
    let lhs = digit_sum(&(a + b), base);
    let parts = digit_sum(a, base) + digit_sum(b, base);
    debug_assert!(parts >= lhs);
    let diff = parts - lhs;
    let step = base.q as u128 - 1;
    debug_assert_eq!(diff % step, 0, "carry defect must be a multiple of q-1");
    diff / step
}

/// Digit sums over machine words, cached per base. This is the inner loop of
/// the exhaustive search paths, so the base decomposition (popcount shortcut,
/// power-of-two shift width, or the largest base power fitting a word) is
/// resolved once up front.
#[derive(Debug, Clone, Copy)]
pub struct NativeDigitSum {
    q: u64,
    log2: Option<u32>,
    chunk: u64,
    per: u32,
}

impl NativeDigitSum {
    pub fn new(base: Base) -> Self {
        let (chunk, per) = base.word_chunk();
        NativeDigitSum {
            q: base.get(),
            log2: base.log2_exact(),
            chunk,
            per,
        }
    }

    #[inline]
    pub fn sum_u64(&self, n: u64) -> u128 {
        if self.q == 2 {
            return n.count_ones() as u128;
        }
        self.sum_u128(n as u128)
    }

    #[inline]
    pub fn sum_u128(&self, mut n: u128) -> u128 {
        if self.q == 2 {
            return n.count_ones() as u128;
        }
        if let Some(j) = self.log2 {
            let mask: u128 = (1u128 << j) - 1;
            let mut sum: u128 = 0;
            while n != 0 {
                sum += n & mask;
                n >>= j;
            }
            return sum;
        }
        let mut sum: u128 = 0;
        while n != 0 {
            let mut r = (n % self.chunk as u128) as u64;
            n /= self.chunk as u128;
            for _ in 0..self.per {
                sum += (r % self.q) as u128;
                r /= self.q;
                if r == 0 {
                    break;
                }
            }
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Num;
    use proptest::prelude::*;

    fn b(q: u64) -> Base {
        Base::new(q).unwrap()
    }

    fn n(v: u128) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn base_rejects_trivial_moduli() {
        assert!(Base::new(0).is_err());
        assert!(Base::new(1).is_err());
        assert!(Base::new(2).is_ok());
    }

    #[test]
    fn to_digits_zero_is_empty() {
        let d = to_digits(&BigUint::zero(), b(2));
        assert!(d.is_empty());
        assert_eq!(d.value(), BigUint::zero());
    }

    #[test]
    fn to_digits_small_binary() {
        assert_eq!(to_digits(&n(7), b(2)).digits(), &[1, 1, 1]);
        assert_eq!(to_digits(&n(225), b(2)).digits(), &[1, 0, 0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn digit_sum_examples() {
        assert_eq!(digit_sum(&n(7), b(2)), 3);
        for k in [0u64, 1, 5, 40] {
            assert_eq!(digit_sum(&b(2).power(k), b(2)), 1);
            assert_eq!(digit_sum(&b(10).power(k), b(10)), 1);
        }
        // The smallest n with s_2(n^3) < s_2(n).
        let first = BigUint::from_str_radix("407182835067", 10).unwrap();
        let v = digit_sum(&first, b(2));
        let cube = &first * &first * &first;
        assert!(digit_sum(&cube, b(2)) < v);
    }

    #[test]
    fn split_pos_examples() {
        assert_eq!(split_pos(&n(5), &n(3), 2, b(2)).unwrap(), 4);
        for q in [2u64, 3, 10, 16] {
            let base = b(q);
            assert_eq!(
                split_pos(&BigUint::one(), &n((q - 1) as u128), 1, base).unwrap(),
                q as u128
            );
        }
        assert_eq!(verify_split_pos(&n(3), &n(225), 8, b(2)).unwrap(), 6);
    }

    #[test]
    fn split_neg_examples() {
        assert_eq!(split_neg(&n(1), &n(1), 3, b(2)).unwrap(), 3);
        for q in [2u64, 3, 10, 16] {
            for k in 1..6 {
                assert_eq!(
                    verify_split_neg(&BigUint::one(), &BigUint::one(), k, b(q)).unwrap(),
                    (q as u128 - 1) * k as u128
                );
            }
        }
        assert_eq!(verify_split_neg(&n(3), &n(5), 4, b(2)).unwrap(), 4);
        assert_eq!(digit_sum(&n(43), b(2)), 4);
    }

    #[test]
    fn split_preconditions_name_the_failing_bound() {
        let err = split_pos(&BigUint::zero(), &n(1), 1, b(2)).unwrap_err();
        assert!(err.to_string().contains("a must be"));
        let err = split_pos(&n(1), &n(4), 2, b(2)).unwrap_err();
        assert!(err.to_string().contains("q^k"));
        let err = split_neg(&n(1), &BigUint::zero(), 2, b(2)).unwrap_err();
        assert!(err.to_string().contains("b must be at least 1"));
        let err = split_neg(&n(1), &n(1), 0, b(2)).unwrap_err();
        assert!(err.to_string().contains("k must be"));
    }

    #[test]
    fn carry_count_examples() {
        assert_eq!(carry_count(&n(1), &n(1), b(2)), 1);
        assert_eq!(carry_count(&n(12345), &BigUint::zero(), b(10)), 0);
        assert_eq!(carry_count(&n(7), &n(9), b(10)), 1);
    }

    #[test]
    fn digit_length_matches_expansion() {
        for q in [2u64, 3, 10, 16, 257, 1_000_003] {
            let base = b(q);
            for v in [1u128, 2, 9, 10, 99, 100, 1 << 40, u128::from(u64::MAX) + 5] {
                let big = n(v);
                assert_eq!(digit_length(&big, base), to_digits(&big, base).len() as u64);
            }
            assert_eq!(digit_length(&BigUint::zero(), base), 0);
        }
    }

    #[test]
    fn native_digit_sum_matches_bignum() {
        for q in [2u64, 3, 4, 8, 10, 16, 97, 1 << 33] {
            let base = b(q);
            let fast = NativeDigitSum::new(base);
            for v in [0u128, 1, 2, 9, 127, 1 << 20, u128::MAX / 7, u128::MAX] {
                assert_eq!(fast.sum_u128(v), digit_sum(&n(v), base), "q={q} v={v}");
            }
        }
    }

    fn arb_biguint(max_bytes: usize) -> impl Strategy<Value = BigUint> {
        prop::collection::vec(any::<u8>(), 0..=max_bytes)
            .prop_map(|bytes| BigUint::from_bytes_le(&bytes))
    }

    fn arb_base() -> impl Strategy<Value = Base> {
        prop_oneof![
            Just(2u64),
            Just(3u64),
            Just(10u64),
            Just(16u64),
            2u64..2000,
            (1u64 << 32)..(1u64 << 34),
        ]
        .prop_map(|q| Base::new(q).unwrap())
    }

    proptest! {
        #[test]
        fn roundtrip(base in arb_base(), value in arb_biguint(80)) {
            let digits = to_digits(&value, base);
            prop_assert!(digits.digits().iter().all(|&d| d < base.get()));
            prop_assert!(digits.digits().last() != Some(&0));
            prop_assert_eq!(digits.value(), value.clone());
            prop_assert_eq!(digits.sum(), digit_sum(&value, base));
        }

        #[test]
        fn subadditive_and_submultiplicative(base in arb_base(), a in arb_biguint(32), c in arb_biguint(32)) {
            prop_assert!(digit_sum(&(&a + &c), base) <= digit_sum(&a, base) + digit_sum(&c, base));
            prop_assert!(digit_sum(&(&a * &c), base) <= digit_sum(&a, base) * digit_sum(&c, base));
        }

        #[test]
        fn splits_agree_with_direct_expansion(
            base in arb_base(),
            a in arb_biguint(24).prop_map(|v| v + 1u32),
            raw in arb_biguint(24),
            k in 1u64..80,
        ) {
            let qk = base.power(k);
            let b = &raw % &qk;
            let b = if b.is_zero() { BigUint::one() } else { b };
            prop_assert!(verify_split_pos(&a, &b, k, base).is_ok());
            prop_assert!(verify_split_neg(&a, &b, k, base).is_ok());
        }

        #[test]
        fn strong_additivity(base in arb_base(), a in arb_biguint(24), low in arb_biguint(24), k in 1u64..80) {
            let b = &low % base.power(k);
            let combined = &a * base.power(k) + &b;
            prop_assert_eq!(
                digit_sum(&combined, base),
                digit_sum(&a, base) + digit_sum(&b, base)
            );
        }

        #[test]
        fn carry_identity(base in arb_base(), a in arb_biguint(32), c in arb_biguint(32)) {
            let r = carry_count(&a, &c, base);
            let lhs = digit_sum(&(&a + &c), base) + (base.get() as u128 - 1) * r;
            prop_assert_eq!(lhs, digit_sum(&a, base) + digit_sum(&c, base));
        }

        #[test]
        fn digit_sum_bounded_by_length(base in arb_base(), raw in arb_biguint(48)) {
            let value = raw + 1u32;
            let bound = (base.get() as u128 - 1) * digit_length(&value, base) as u128;
            prop_assert!(digit_sum(&value, base) <= bound);
        }
    }
}
