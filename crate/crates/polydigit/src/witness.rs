//! Explicit witnesses for small digit-sum ratios.
//!
//! For a study polynomial p of degree h and any ε with 0 < ε < h(4h+1) this
//! module constructs an integer n = carrier_m(q^k) + b whose certified ratio
//! s_q(p(n)) / s_q(n) is below ε, together with exact bound data
//! (B, C) such that n < B·C^(1/ε). The same construction, swept over all
//! multipliers m with a fixed number of base-q digits, yields a family of
//! distinct witnesses below a given N whose size is at least N^α for an
//! explicit rational exponent α.
//!
//! All certificates are re-derived from scratch: digit sums are recomputed on
//! n and p(n) directly, ratios are exact rationals, and the n < B·C^(1/ε)
//! comparison is done by integer powering. Any internal inconsistency
//! surfaces as a `Construction` error rather than a silently wrong record.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::digitsum::{digit_length, digit_sum, Base};
use crate::error::{Error, Result};
use crate::intpoly::{carrier, min_multiplier, parse_poly, shift_bound, StudyPolynomial};

/// An exact certificate for one evaluation point: n, s_q(n), s_q(p(n)) and
/// the reduced ratio. No floating point anywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioRecord {
    n: BigUint,
    sn: u128,
    spn: u128,
    ratio: BigRational,
}

impl RatioRecord {
    /// Assemble a record from already-computed digit sums. `sn` must be
    /// positive (it is for every n ≥ 1).
    pub fn new(n: BigUint, sn: u128, spn: u128) -> Result<Self> {
        if sn == 0 {
            return Err(Error::Construction(format!(
                "digit sum of n = {n} came out zero"
            )));
        }
        let ratio = BigRational::new(BigInt::from(spn), BigInt::from(sn));
        Ok(RatioRecord { n, sn, spn, ratio })
    }

    /// Compute the record for `n` from scratch (arbitrary-precision path).
    /// Fails with a domain error when n = 0 or p(n) < 0.
    pub fn compute(p: &StudyPolynomial, q: Base, n: &BigUint) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::Domain("ratio requires n >= 1".into()));
        }
        let value = p.poly().eval_biguint(n);
        if value.is_negative() {
            return Err(Error::Domain(format!(
                "p(n) = {value} is negative at n = {n}; the ratio is undefined"
            )));
        }
        let sn = digit_sum(n, q);
        let spn = digit_sum(value.magnitude(), q);
        Self::new(n.clone(), sn, spn)
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn sn(&self) -> u128 {
        self.sn
    }

    pub fn spn(&self) -> u128 {
        self.spn
    }

    pub fn ratio(&self) -> &BigRational {
        &self.ratio
    }

    pub fn ratio_below(&self, epsilon: &BigRational) -> bool {
        &self.ratio < epsilon
    }

    /// Re-derive the record from scratch and compare field by field.
    pub fn reverify(&self, p: &StudyPolynomial, q: Base) -> Result<()> {
        let fresh = Self::compute(p, q, &self.n)?;
        if fresh != *self {
            return Err(Error::Validation(format!(
                "certificate mismatch at n = {}: stored ({}, {}), recomputed ({}, {})",
                self.n, self.sn, self.spn, fresh.sn, fresh.spn
            )));
        }
        Ok(())
    }
}

impl fmt::Display for RatioRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} s(n)={} s(p(n))={} ratio={}/{}",
            self.n,
            self.sn,
            self.spn,
            self.ratio.numer(),
            self.ratio.denom()
        )
    }
}

/// JSON-lines form of a record. `n` is a decimal string because it routinely
/// exceeds native integer width; the construction parameters are present only
/// on records produced by a construction (search hits carry none).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecordJson {
    pub n: String,
    pub sn: u64,
    pub spn: u64,
    pub ratio_num: u64,
    pub ratio_den: u64,
    pub q: u64,
    pub poly: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<u64>,
}

fn to_u64(value: u128, what: &str) -> Result<u64> {
    u64::try_from(value)
        .map_err(|_| Error::Construction(format!("{what} = {value} does not fit a u64 field")))
}

impl RecordJson {
    pub fn from_record(
        record: &RatioRecord,
        q: Base,
        poly: &StudyPolynomial,
        params: Option<&WitnessParams>,
    ) -> Result<Self> {
        let (m, k, b) = match params {
            Some(p) => (
                Some(p.multiplier().to_u64().ok_or_else(|| {
                    Error::Construction("multiplier does not fit a u64 field".into())
                })?),
                Some(p.exponent()),
                Some(p.shift().to_u64().ok_or_else(|| {
                    Error::Construction("shift does not fit a u64 field".into())
                })?),
            ),
            None => (None, None, None),
        };
        Ok(RecordJson {
            n: record.n().to_string(),
            sn: to_u64(record.sn(), "s_q(n)")?,
            spn: to_u64(record.spn(), "s_q(p(n))")?,
            ratio_num: record
                .ratio()
                .numer()
                .to_u64()
                .ok_or_else(|| Error::Construction("ratio numerator does not fit a u64".into()))?,
            ratio_den: record
                .ratio()
                .denom()
                .to_u64()
                .ok_or_else(|| Error::Construction("ratio denominator does not fit a u64".into()))?,
            q: q.get(),
            poly: poly.to_string(),
            m,
            k,
            b,
        })
    }

    /// Certificates are self-checking: re-parse the inputs, recompute both
    /// digit sums and the reduced ratio, and compare.
    pub fn verify(&self) -> Result<()> {
        let q = Base::new(self.q)?;
        let poly = StudyPolynomial::new(parse_poly(&self.poly)?)?;
        let n = self
            .n
            .parse::<BigUint>()
            .map_err(|_| Error::Parse(format!("bad decimal n {:?}", self.n)))?;
        let record = RatioRecord::compute(&poly, q, &n)?;
        if record.sn() != self.sn as u128 || record.spn() != self.spn as u128 {
            return Err(Error::Validation(format!(
                "record for n = {} has digit sums ({}, {}), certificate claims ({}, {})",
                n,
                record.sn(),
                record.spn(),
                self.sn,
                self.spn
            )));
        }
        let claimed = BigRational::new(BigInt::from(self.ratio_num), BigInt::from(self.ratio_den));
        if record.ratio() != &claimed {
            return Err(Error::Validation(format!(
                "record for n = {n} has ratio {}, certificate claims {claimed}",
                record.ratio()
            )));
        }
        Ok(())
    }
}

/// Parse an exact rational from "num/den" or a plain integer string.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = num
        .parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("bad rational numerator {num:?}")))?;
    let den = den
        .parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("bad rational denominator {den:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse("rational denominator must be nonzero".into()));
    }
    Ok(BigRational::new(num, den))
}

/// carrier_m(x) = m·x^4 + m·x^3 − x^2 + m·x + m evaluated at x, as an
/// unsigned value (positive for every x ≥ 2, m ≥ 3).
pub fn carrier_value(m: &BigUint, x: &BigUint) -> BigUint {
    let x2 = x * x;
    let x4 = &x2 * &x2;
    let x3 = &x2 * x;
    let positive = m * (&x4 + &x3 + x + 1u32);
    debug_assert!(positive > x2);
    positive - x2
}

fn identity_carrier_sum(q: Base, m: &BigUint, k: u64, b: &BigUint) -> u128 {
    let qm1 = (q.get() - 1) as u128;
    let m_minus_1 = m - 1u32;
    qm1 * k as u128 + digit_sum(&m_minus_1, q) + 2 * digit_sum(m, q) + digit_sum(&(m + b), q)
}

fn check_multiplier(m: &BigUint) -> Result<()> {
    if *m < BigUint::from(3u32) {
        return Err(Error::Domain(format!(
            "multiplier m must be at least 3, got {m}"
        )));
    }
    Ok(())
}

/// Smallest exponent k at which the five digit blocks of carrier_m(q^k) + b
/// stop interfering, found by direct scan.
pub fn minimal_block_exponent(q: Base, m: &BigUint, b: &BigUint) -> Result<u64> {
    check_multiplier(m)?;
    let cap = digit_length(&(m + b), q) + 2;
    for k in 1..=cap {
        let x = q.power(k);
        if x <= m + b {
            continue;
        }
        let direct = digit_sum(&(carrier_value(m, &x) + b), q);
        if direct == identity_carrier_sum(q, m, k, b) {
            return Ok(k);
        }
    }
    Err(Error::Construction(format!(
        "no admissible block exponent below {cap} for q={q}, m={m}, b={b}"
    )))
}

/// s_q(carrier_m(q^k)) through the block identity
/// (q−1)·k + s_q(m−1) + 3·s_q(m), validated against a direct expansion.
///
/// When the blocks interfere (k too small) the error names the smallest
/// admissible k.
pub fn carrier_digit_sum(q: Base, m: &BigUint, k: u64) -> Result<u128> {
    shifted_carrier_digit_sum(q, m, k, &BigUint::zero())
}

/// s_q(carrier_m(q^k) + b) through the identity
/// (q−1)·k + s_q(m−1) + 2·s_q(m) + s_q(m+b), for q^k > m + b ≥ m.
pub fn shifted_carrier_digit_sum(q: Base, m: &BigUint, k: u64, b: &BigUint) -> Result<u128> {
    check_multiplier(m)?;
    if q.power(k) <= m + b {
        return Err(Error::Domain(format!(
            "identity requires q^k > m + b; got q^k = {}^{k}, m + b = {}",
            q.get(),
            m + b
        )));
    }
    let identity = identity_carrier_sum(q, m, k, b);
    let direct = digit_sum(&(carrier_value(m, &q.power(k)) + b), q);
    if identity != direct {
        let minimal = minimal_block_exponent(q, m, b)?;
        return Err(Error::Validation(format!(
            "digit blocks interfere at k = {k} (identity {identity}, direct {direct}); \
             smallest admissible k is {minimal}"
        )));
    }
    Ok(identity)
}

/// One fully-specified witness construction: base, polynomial, target ε,
/// shift b, multiplier m, block exponent k, and the exact bound data.
///
/// `bound_factor` (B = 2mq^4) and `bound_base` (C = (q·X)^(16h+4), with
/// X = λh(4·m·max(b,1)·h)^h the cap on the composed coefficients) certify
/// n < B·C^(1/ε) for the built witness.
#[derive(Debug, Clone)]
pub struct WitnessParams {
    q: Base,
    poly: StudyPolynomial,
    epsilon: BigRational,
    b: BigUint,
    m: BigUint,
    k: u64,
    coefficient_cap: BigUint,
    bound_factor: BigUint,
    bound_base: BigUint,
}

fn epsilon_parts(epsilon: &BigRational) -> (BigUint, BigUint) {
    (
        epsilon.numer().magnitude().clone(),
        epsilon.denom().magnitude().clone(),
    )
}

fn check_epsilon_range(epsilon: &BigRational, h: u32) -> Result<()> {
    if !epsilon.is_positive() {
        return Err(Error::Domain(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let cap = BigRational::from_integer(BigInt::from(h as u64 * (4 * h as u64 + 1)));
    if *epsilon >= cap {
        return Err(Error::Domain(format!(
            "epsilon must be below h(4h+1) = {cap}, got {epsilon}"
        )));
    }
    Ok(())
}

impl WitnessParams {
    /// Validate and complete a parameter tuple. Checks 0 < ε < h(4h+1),
    /// m ≥ 3, q^k > m + b, that p(x+b) has nonnegative coefficients and that
    /// p(x+b) composed with the carrier does too, then fills in the bounds.
    pub fn new(
        q: Base,
        poly: StudyPolynomial,
        epsilon: BigRational,
        b: BigUint,
        m: BigUint,
        k: u64,
    ) -> Result<Self> {
        let h = poly.degree();
        check_epsilon_range(&epsilon, h)?;
        check_multiplier(&m)?;
        if q.power(k) <= &m + &b {
            return Err(Error::Domain(format!(
                "need q^k > m + b; got q = {}, k = {k}, m = {m}, b = {b}",
                q.get()
            )));
        }
        let shifted = poly.poly().shift(&BigInt::from(b.clone()));
        if !shifted.has_nonnegative_coeffs() {
            return Err(Error::Domain(format!(
                "shift b = {b} leaves negative coefficients in p(x+b)"
            )));
        }
        let composed = shifted.compose(&carrier(&BigInt::from(m.clone()))?);
        if !composed.has_nonnegative_coeffs() {
            return Err(Error::Domain(format!(
                "multiplier m = {m} leaves negative coefficients in the composition"
            )));
        }
        let b_hat = if b.is_zero() { BigUint::one() } else { b.clone() };
        let coefficient_cap =
            poly.lambda() * BigUint::from(h) * (BigUint::from(4u32) * &m * &b_hat * h).pow(h);
        debug_assert!(composed.max_abs_coeff() <= coefficient_cap);
        let bound_factor = BigUint::from(2u32) * &m * q.power(4);
        let bound_base = (q.to_biguint() * &coefficient_cap).pow(16 * h + 4);
        Ok(WitnessParams {
            q,
            poly,
            epsilon,
            b,
            m,
            k,
            coefficient_cap,
            bound_factor,
            bound_base,
        })
    }

    pub fn base(&self) -> Base {
        self.q
    }

    pub fn poly(&self) -> &StudyPolynomial {
        &self.poly
    }

    pub fn epsilon(&self) -> &BigRational {
        &self.epsilon
    }

    pub fn shift(&self) -> &BigUint {
        &self.b
    }

    pub fn multiplier(&self) -> &BigUint {
        &self.m
    }

    pub fn exponent(&self) -> u64 {
        self.k
    }

    /// B = 2mq^4.
    pub fn bound_factor(&self) -> &BigUint {
        &self.bound_factor
    }

    /// C = (q·λh(4·m·max(b,1)·h)^h)^(16h+4).
    pub fn bound_base(&self) -> &BigUint {
        &self.bound_base
    }

    /// The witness value n = carrier_m(q^k) + b.
    pub fn witness_value(&self) -> BigUint {
        carrier_value(&self.m, &self.q.power(self.k)) + &self.b
    }

    /// Exact check of n < B·C^(1/ε), done as n^num < B^num · C^den for
    /// ε = num/den.
    pub fn bound_holds(&self, n: &BigUint) -> Result<bool> {
        let (num, den) = epsilon_parts(&self.epsilon);
        let num = num.to_u32().ok_or_else(|| {
            Error::Domain("epsilon numerator too large for exact powering".into())
        })?;
        let den = den.to_u32().ok_or_else(|| {
            Error::Domain("epsilon denominator too large for exact powering".into())
        })?;
        Ok(n.pow(num) < self.bound_factor.pow(num) * self.bound_base.pow(den))
    }

    /// Replace k by the smallest exponent whose witness is directly certified
    /// below ε. Small exponents (below the block-stabilization point) are
    /// checked one by one; beyond it the digit sums are affine in k and the
    /// minimal k solves a linear inequality. The result never exceeds the
    /// current k.
    pub fn tightened(&self) -> Result<WitnessParams> {
        let q = self.q;
        let shifted = self.poly.poly().shift(&BigInt::from(self.b.clone()));
        let composed = shifted.compose(&carrier(&BigInt::from(self.m.clone()))?);
        let block_sum: u128 = composed
            .coeffs()
            .iter()
            .map(|c| digit_sum(c.magnitude(), q))
            .sum();
        let stable = digit_length(&composed.max_abs_coeff(), q)
            .max(digit_length(&(&self.m + &self.b), q))
            .max(1);
        let (enum_, eden) = epsilon_parts(&self.epsilon);
        let mut best: Option<u64> = None;
        // Below the stabilization point the ratio is irregular; test directly.
        for k in 1..stable.min(self.k) {
            if q.power(k) <= &self.m + &self.b {
                continue;
            }
            let n = carrier_value(&self.m, &q.power(k)) + &self.b;
            let record = RatioRecord::compute(&self.poly, q, &n)?;
            if record.ratio_below(&self.epsilon) {
                best = Some(k);
                break;
            }
        }
        if best.is_none() {
            // s_q(n) = (q−1)k + fixed and s_q(p(n)) = block_sum from here on;
            // the smallest admissible k solves
            // num·((q−1)k + fixed) > den·block_sum.
            let fixed = identity_carrier_sum(q, &self.m, 0, &self.b);
            let qm1 = (q.get() - 1) as u128;
            let lhs = &eden * BigUint::from(block_sum);
            let rhs = &enum_ * BigUint::from(fixed);
            let solved = if lhs <= rhs {
                stable
            } else {
                let gap = &lhs - &rhs;
                let step = &enum_ * BigUint::from(qm1);
                let k = (&gap / &step) + 1u32;
                k.to_u64()
                    .ok_or_else(|| Error::Domain("epsilon too small: exponent overflows".into()))?
                    .max(stable)
            };
            best = Some(solved.min(self.k));
        }
        let k = best.expect("set above");
        WitnessParams::new(
            q,
            self.poly.clone(),
            self.epsilon.clone(),
            self.b.clone(),
            self.m.clone(),
            k,
        )
    }
}

/// Pick (b, m, k) and the bounds for the given target ε.
///
/// b comes from [`shift_bound`] (zero when p is already nonnegative), m from
/// [`min_multiplier`], and k = ⌊(4h+1)·d/ε⌋ + 1 where d is the base-q digit
/// length of the largest composed coefficient bound. That k provably yields
/// ratio < ε while keeping the witness below B·C^(1/ε); both facts are
/// re-checked exactly by [`build_witness`].
pub fn choose_parameters(
    p: &StudyPolynomial,
    q: Base,
    epsilon: &BigRational,
) -> Result<WitnessParams> {
    let h = p.degree();
    check_epsilon_range(epsilon, h)?;
    let b = shift_bound(p);
    let shifted = p.poly().shift(&BigInt::from(b.clone()));
    let m = min_multiplier(&shifted)?;
    // Composed coefficients are nonnegative at this m, so the largest one is
    // exactly the block bound entering the exponent choice.
    let block_max = shifted.compose(&carrier(&m)?).max_abs_coeff();
    let d = digit_length(&block_max, q);
    let (num, den) = epsilon_parts(epsilon);
    let k_floor = (BigUint::from(4 * h as u64 + 1) * BigUint::from(d) * &den) / &num;
    let k = k_floor
        .to_u64()
        .and_then(|k| k.checked_add(1))
        .ok_or_else(|| Error::Domain("epsilon too small: exponent overflows".into()))?;
    WitnessParams::new(q, p.clone(), epsilon.clone(), b, m.magnitude().clone(), k)
}

/// Build the witness n = carrier_m(q^k) + b and certify every promised
/// property: the digit-sum identity for s_q(n), ratio < ε, n < B·C^(1/ε) and
/// the cap s_q(p(n)) ≤ (q−1)(4h+1)·digitlen(X). Failures are construction
/// errors — they indicate a bug, not bad input.
pub fn build_witness(params: &WitnessParams) -> Result<RatioRecord> {
    let q = params.q;
    let n = params.witness_value();
    let record = RatioRecord::compute(&params.poly, q, &n)?;
    let identity = identity_carrier_sum(q, &params.m, params.k, &params.b);
    if record.sn() != identity {
        return Err(Error::Construction(format!(
            "s_q(n) = {} disagrees with the block identity value {identity}",
            record.sn()
        )));
    }
    if !record.ratio_below(&params.epsilon) {
        return Err(Error::Construction(format!(
            "witness ratio {} is not below epsilon {}",
            record.ratio(),
            params.epsilon
        )));
    }
    if !params.bound_holds(&n)? {
        return Err(Error::Construction(
            "witness exceeds the B·C^(1/eps) bound".into(),
        ));
    }
    let h = params.poly.degree();
    let cap = (q.get() as u128 - 1)
        * (4 * h as u128 + 1)
        * digit_length(&params.coefficient_cap, q) as u128;
    if record.spn() > cap {
        return Err(Error::Construction(format!(
            "s_q(p(n)) = {} exceeds the coefficient-cap bound {cap}",
            record.spn()
        )));
    }
    Ok(record)
}

/// The constant C with ratio ≤ log C / log n along the witness chain, kept as
/// the exact integer C so that exp of the constant is exact by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecayConstant {
    c: BigUint,
}

impl DecayConstant {
    /// The exact integer C (the constant itself is log C).
    pub fn exp_exact(&self) -> &BigUint {
        &self.c
    }

    /// Floating approximation of log C, for display only.
    pub fn log_approx(&self) -> f64 {
        let bits = self.c.bits();
        if bits <= 53 {
            return self.c.to_f64().unwrap_or(f64::MAX).ln();
        }
        let shift = bits - 53;
        let top = (&self.c >> shift).to_f64().unwrap_or(f64::MAX);
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }

    /// Exact check of ratio ≤ log C / log n, i.e. n^spn ≤ C^sn.
    pub fn dominates(&self, record: &RatioRecord) -> Result<bool> {
        let spn = u32::try_from(record.spn())
            .map_err(|_| Error::Domain("digit sum too large for exact powering".into()))?;
        let sn = u32::try_from(record.sn())
            .map_err(|_| Error::Domain("digit sum too large for exact powering".into()))?;
        Ok(record.n().pow(spn) <= self.c.pow(sn))
    }
}

/// The decay constant for (p, q): log C with
/// C = (q·λh(4·m·max(b,1)·h)^h)^(16h+4) built from the module's own shift and
/// multiplier choices.
pub fn decay_constant(p: &StudyPolynomial, q: Base) -> Result<DecayConstant> {
    let h = p.degree();
    let b = shift_bound(p);
    let shifted = p.poly().shift(&BigInt::from(b.clone()));
    let m = min_multiplier(&shifted)?.magnitude().clone();
    let b_hat = if b.is_zero() { BigUint::one() } else { b };
    let cap = p.lambda() * BigUint::from(h) * (BigUint::from(4u32) * &m * &b_hat * h).pow(h);
    Ok(DecayConstant {
        c: (q.to_biguint() * cap).pow(16 * h + 4),
    })
}

/// α = ε / (4(4h+1)(h+1) + ε), the family-size exponent, as an exact
/// rational.
pub fn density_exponent(epsilon: &BigRational, h: u32) -> Result<BigRational> {
    if !epsilon.is_positive() {
        return Err(Error::Domain(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if h < 2 {
        return Err(Error::Domain(format!("degree must be at least 2, got {h}")));
    }
    let d = BigInt::from(4u64 * (4 * h as u64 + 1) * (h as u64 + 1));
    Ok(epsilon / (epsilon + BigRational::from_integer(d)))
}

/// A family of witnesses indexed by every admissible multiplier with exactly
/// `digits` base-q digits, all sharing one exponent k0.
#[derive(Debug, Clone)]
pub struct DensityFamily {
    pub base: Base,
    pub poly: StudyPolynomial,
    pub epsilon: BigRational,
    /// Number of base-q digits of the multiplier index.
    pub digits: u64,
    /// Exponent actually used: the smallest one satisfying the exact
    /// digit-length inequality (and exceeding `digits`).
    pub k0: u64,
    /// The large-i closed form ⌊(4h+1)(h+1)·i/ε⌋, reported for reference.
    pub k0_closed_form: u64,
    pub shift: BigUint,
    pub alpha: BigRational,
    pub records: Vec<RatioRecord>,
}

impl DensityFamily {
    pub fn count(&self) -> u64 {
        self.records.len() as u64
    }

    /// Exact check of count ≥ N^α for N = q^(4·k0 + digits), performed as
    /// count^den ≥ q^(N_exponent·num) with α = num/den.
    pub fn family_size_bound_holds(&self) -> Result<bool> {
        let num = self
            .alpha
            .numer()
            .magnitude()
            .to_u64()
            .ok_or_else(|| Error::Domain("alpha numerator too large".into()))?;
        let den = self
            .alpha
            .denom()
            .magnitude()
            .to_u32()
            .ok_or_else(|| Error::Domain("alpha denominator too large".into()))?;
        let n_exponent = (4 * self.k0 + self.digits) * num;
        let n_exponent = u32::try_from(n_exponent)
            .map_err(|_| Error::Domain("family exponent too large for exact powering".into()))?;
        Ok(BigUint::from(self.count()).pow(den) >= self.base.to_biguint().pow(n_exponent))
    }
}

struct DensityPlan {
    m_lo: u64,
    m_hi: u64,
    k0: u64,
    k0_closed: u64,
    closed_ok: bool,
}

fn density_plan(
    p_shifted: &crate::intpoly::IntPolynomial,
    q: Base,
    epsilon: &BigRational,
    digits: u64,
    m_floor: &BigUint,
    b: &BigUint,
) -> Result<DensityPlan> {
    let h = p_shifted.degree().expect("validated") as u64;
    let (num, den) = epsilon_parts(epsilon);
    let range_lo = q.power(digits - 1);
    let range_hi = q.power(digits);
    let m_hi = range_hi.to_u64().ok_or_else(|| {
        Error::Domain(format!("q^{digits} is too large to enumerate multipliers"))
    })?;
    let m_lo_big = if *m_floor > range_lo {
        m_floor.clone()
    } else {
        range_lo
    };
    let m_lo = m_lo_big.to_u64().expect("below m_hi which fits");
    if m_lo >= m_hi {
        return Ok(DensityPlan {
            m_lo,
            m_hi,
            k0: 0,
            k0_closed: 0,
            closed_ok: false,
        });
    }
    let m_max = BigUint::from(m_hi - 1);
    let abs_max = p_shifted
        .compose(&carrier(&BigInt::from(m_max.clone()))?.abs())
        .max_abs_coeff();
    let dstar = digit_length(&abs_max, q);
    // smallest k0 with (4h+1)·dstar ≤ ε·k0, also above the digit count of
    // the index and large enough that q^k0 > m + b for every family member
    let needed = (BigUint::from(4 * h + 1) * BigUint::from(dstar) * &den).div_ceil(&num);
    let needed = needed
        .to_u64()
        .ok_or_else(|| Error::Domain("epsilon too small: family exponent overflows".into()))?;
    let k0 = needed
        .max(digits + 1)
        .max(digit_length(&(&m_max + b), q));
    let closed =
        (BigUint::from(4 * h + 1) * BigUint::from(h + 1) * BigUint::from(digits) * &den) / &num;
    let k0_closed = closed.to_u64().unwrap_or(u64::MAX);
    let closed_ok = k0_closed > digits && k0_closed >= k0;
    Ok(DensityPlan {
        m_lo,
        m_hi,
        k0,
        k0_closed,
        closed_ok,
    })
}

/// Generate one witness per admissible multiplier m with exactly `digits`
/// base-q digits, all with the same exponent k0, each certified below ε.
///
/// Errors with the smallest admissible digit count when `digits` is too small
/// for the closed-form exponent to be valid. The family enumeration is
/// parallel over the multiplier range and merged in ascending order.
pub fn density_family(
    p: &StudyPolynomial,
    q: Base,
    epsilon: &BigRational,
    digits: u64,
) -> Result<DensityFamily> {
    if !epsilon.is_positive() {
        return Err(Error::Domain(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if digits == 0 {
        return Err(Error::Domain(
            "multiplier digit count must be at least 1".into(),
        ));
    }
    let h = p.degree();
    let b = shift_bound(p);
    let shifted = p.poly().shift(&BigInt::from(b.clone()));
    let m_floor = min_multiplier(&shifted)?.magnitude().clone();
    let plan = density_plan(&shifted, q, epsilon, digits, &m_floor, &b)?;
    if plan.m_lo >= plan.m_hi || !plan.closed_ok {
        // Find the smallest digit count that admits the construction.
        for candidate in digits + 1..digits + 512 {
            let alt = density_plan(&shifted, q, epsilon, candidate, &m_floor, &b)?;
            if alt.m_lo < alt.m_hi && alt.closed_ok {
                return Err(Error::Domain(format!(
                    "digit count {digits} is too small for this family; \
                     the smallest admissible digit count is {candidate}"
                )));
            }
        }
        return Err(Error::Domain(format!(
            "digit count {digits} is too small for this family"
        )));
    }
    let xk = q.power(plan.k0);
    let expect_len = 4 * plan.k0 + digits;
    let records: Vec<RatioRecord> = (plan.m_lo..plan.m_hi)
        .into_par_iter()
        .map(|m| -> Result<RatioRecord> {
            let mb = BigUint::from(m);
            let n = carrier_value(&mb, &xk) + &b;
            let record = RatioRecord::compute(p, q, &n)?;
            if !record.ratio_below(epsilon) {
                return Err(Error::Construction(format!(
                    "family member m = {m} has ratio {} >= {epsilon}",
                    record.ratio()
                )));
            }
            if b.is_zero() && digit_length(&n, q) != expect_len {
                return Err(Error::Construction(format!(
                    "family member m = {m} has {} digits, expected {expect_len}",
                    digit_length(&n, q)
                )));
            }
            Ok(record)
        })
        .collect::<Result<Vec<_>>>()?;
    for pair in records.windows(2) {
        if pair[0].n() >= pair[1].n() {
            return Err(Error::Construction(
                "family members are not strictly increasing".into(),
            ));
        }
    }
    Ok(DensityFamily {
        base: q,
        poly: p.clone(),
        epsilon: epsilon.clone(),
        digits,
        k0: plan.k0,
        k0_closed_form: plan.k0_closed,
        shift: b,
        alpha: density_exponent(epsilon, h)?,
        records,
    })
}
