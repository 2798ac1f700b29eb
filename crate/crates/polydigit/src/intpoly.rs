//! Exact integer polynomial arithmetic: evaluation, products, powers, shifts
//! and composition, plus the coefficient machinery behind the witness
//! constructions.
//!
//! Coefficients are stored ascending (`coeffs[i]` multiplies x^i) and kept
//! canonical: the vector is empty for the zero polynomial and otherwise ends
//! in a nonzero coefficient. Degrees in this crate stay tiny (at most a few
//! dozen), so multiplication is plain convolution.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPolynomial {
            coeffs: vec![BigInt::one()],
        }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The monomial c·x^deg.
    pub fn monomial(c: BigInt, deg: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); deg + 1];
        coeffs[deg] = c;
        Self::from_coeffs(coeffs)
    }

    /// Build from ascending coefficients; trailing zeros are stripped.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPolynomial { coeffs };
        p.normalize();
        p
    }

    pub fn from_i64_coeffs(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn normalize(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of x^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// Largest absolute coefficient (zero polynomial gives 0).
    pub fn max_abs_coeff(&self) -> BigUint {
        self.coeffs
            .iter()
            .map(|c| c.magnitude().clone())
            .max()
            .unwrap_or_else(BigUint::zero)
    }

    /// Coefficient-wise absolute value.
    pub fn abs(&self) -> Self {
        IntPolynomial {
            coeffs: self.coeffs.iter().map(|c| c.abs()).collect(),
        }
    }

    /// Horner evaluation at an integer point.
    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_biguint(&self, x: &BigUint) -> BigInt {
        self.eval(&BigInt::from_biguint(Sign::Plus, x.clone()))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(len);
        for i in 0..len {
            coeffs.push(self.coeff(i) + rhs.coeff(i));
        }
        Self::from_coeffs(coeffs)
    }

    /// Schoolbook product; degrees here never exceed a few dozen.
    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(coeffs)
    }

    /// p^e by repeated squaring; p^0 = 1.
    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one();
        let mut square = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&square);
            }
            e >>= 1;
            if e > 0 {
                square = square.mul(&square);
            }
        }
        result
    }

    /// The polynomial x ↦ p(x + b).
    pub fn shift(&self, b: &BigInt) -> Self {
        let inner = Self::from_coeffs(vec![b.clone(), BigInt::one()]);
        self.compose(&inner)
    }

    /// Horner composition p(inner(x)).
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Self::constant(c.clone()));
        }
        acc
    }
}

impl fmt::Display for IntPolynomial {
    /// Compact human form, highest power first: `x^3-2x+5`, `-x^2+3`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            let mag = c.magnitude();
            if i == 0 {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}")?;
                }
                if i == 1 {
                    write!(f, "x")?;
                } else {
                    write!(f, "x^{i}")?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for IntPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_poly(s)
    }
}

/// Parse either the human form (`x^3-2x+5`, `2*x^4 + x - 7`) or the
/// ascending coefficient list (`5,-2,0,1`).
pub fn parse_poly(input: &str) -> Result<IntPolynomial> {
    let trimmed = input.trim();
    if trimmed.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    if trimmed.contains('x') {
        parse_human(trimmed)
    } else if trimmed.contains(',') {
        let coeffs = trimmed
            .split(',')
            .map(|part| {
                BigInt::from_str(part.trim())
                    .map_err(|_| Error::Parse(format!("bad coefficient {part:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntPolynomial::from_coeffs(coeffs))
    } else {
        let c = BigInt::from_str(trimmed)
            .map_err(|_| Error::Parse(format!("bad polynomial {trimmed:?}")))?;
        Ok(IntPolynomial::constant(c))
    }
}

fn parse_human(input: &str) -> Result<IntPolynomial> {
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let bytes = compact.as_bytes();
    let mut terms: Vec<(BigInt, usize)> = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let mut negative = false;
        let mut saw_sign = false;
        while i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            if bytes[i] == b'-' {
                negative = !negative;
            }
            saw_sign = true;
            i += 1;
        }
        let digits_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coeff_str = &compact[digits_start..i];
        if i < bytes.len() && bytes[i] == b'*' {
            i += 1;
        }
        let (magnitude, power) = if i < bytes.len() && bytes[i] == b'x' {
            i += 1;
            let power = if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let exp_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if exp_start == i {
                    return Err(Error::Parse(format!("missing exponent in {input:?}")));
                }
                compact[exp_start..i]
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad exponent in {input:?}")))?
            } else {
                1
            };
            let mag = if coeff_str.is_empty() {
                BigInt::one()
            } else {
                BigInt::from_str(coeff_str).map_err(|_| Error::Parse(format!("bad term in {input:?}")))?
            };
            (mag, power)
        } else {
            if coeff_str.is_empty() {
                return Err(Error::Parse(format!(
                    "expected a term at byte {digits_start} of {input:?}"
                )));
            }
            let mag = BigInt::from_str(coeff_str)
                .map_err(|_| Error::Parse(format!("bad constant in {input:?}")))?;
            (mag, 0)
        };
        let _ = saw_sign;
        let coeff = if negative { -magnitude } else { magnitude };
        terms.push((coeff, power));
    }
    if terms.is_empty() {
        return Err(Error::Parse(format!("no terms in {input:?}")));
    }
    let top = terms.iter().map(|&(_, p)| p).max().unwrap_or(0);
    let mut coeffs = vec![BigInt::zero(); top + 1];
    for (c, p) in terms {
        coeffs[p] += c;
    }
    Ok(IntPolynomial::from_coeffs(coeffs))
}

/// A polynomial under study: degree h ≥ 2 with positive leading coefficient.
/// Caches λ = max |a_i|.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StudyPolynomial {
    poly: IntPolynomial,
    h: u32,
    lambda: BigUint,
}

impl StudyPolynomial {
    pub fn new(poly: IntPolynomial) -> Result<Self> {
        let degree = poly
            .degree()
            .ok_or_else(|| Error::Domain("the zero polynomial cannot be studied".into()))?;
        if degree < 2 {
            return Err(Error::Domain(format!(
                "polynomial degree must be at least 2, got {degree}"
            )));
        }
        let leading = poly.leading().expect("nonzero by construction");
        if !leading.is_positive() {
            return Err(Error::Domain(format!(
                "leading coefficient must be positive, got {leading}"
            )));
        }
        let lambda = poly.max_abs_coeff();
        Ok(StudyPolynomial {
            poly,
            h: degree as u32,
            lambda,
        })
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.poly
    }

    pub fn degree(&self) -> u32 {
        self.h
    }

    pub fn lambda(&self) -> &BigUint {
        &self.lambda
    }

    pub fn leading(&self) -> &BigInt {
        self.poly.leading().expect("degree >= 2")
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.poly.has_nonnegative_coeffs()
    }
}

impl fmt::Display for StudyPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

impl FromStr for StudyPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StudyPolynomial::new(parse_poly(s)?)
    }
}

/// The degree-4 carrier polynomial m·x^4 + m·x^3 − x^2 + m·x + m, m ≥ 3.
///
/// Its value at q^k splits into five noninterfering digit blocks, so the
/// digit sum grows linearly in k, while every power has strictly positive,
/// k-independent block coefficients. That mismatch is what drives the
/// small-ratio witnesses.
pub fn carrier(m: &BigInt) -> Result<IntPolynomial> {
    if *m < BigInt::from(3) {
        return Err(Error::Domain(format!(
            "carrier multiplier m must be at least 3, got {m}"
        )));
    }
    Ok(IntPolynomial::from_coeffs(vec![
        m.clone(),
        m.clone(),
        -BigInt::one(),
        m.clone(),
        m.clone(),
    ]))
}

/// Coefficients of carrier(m)^h, ascending; 4h+1 of them, all strictly
/// positive for m ≥ 3 and bounded by (2mh)^h, with endpoints m^h and h·m^h.
pub fn carrier_power_coeffs(m: &BigInt, h: u32) -> Result<Vec<BigInt>> {
    if h < 2 {
        return Err(Error::Domain(format!(
            "carrier power requires h >= 2, got {h}"
        )));
    }
    let power = carrier(m)?.pow(h);
    let coeffs = power.coeffs().to_vec();
    debug_assert_eq!(coeffs.len(), 4 * h as usize + 1);
    debug_assert!(coeffs.iter().all(|c| c.is_positive()));
    Ok(coeffs)
}

/// Shift making every coefficient of p(x+b) nonnegative: zero when p already
/// has nonnegative coefficients, otherwise 1 + ⌈λ / a_h⌉.
pub fn shift_bound(p: &StudyPolynomial) -> BigUint {
    if p.has_nonnegative_coeffs() {
        return BigUint::zero();
    }
    let lambda = BigInt::from(p.lambda().clone());
    let b = BigInt::one() + lambda.div_ceil(p.leading());
    let b = b.magnitude().clone();
    debug_assert!(p
        .poly()
        .shift(&BigInt::from(b.clone()))
        .has_nonnegative_coeffs());
    b
}

/// Smallest multiplier m at or above the closed-form candidate
/// max(3, ⌈(2a_1 / (h(3h−5)a_h))^{1/(h−1)}⌉) for which every coefficient of
/// p_shifted(carrier_m(x)) is nonnegative, verified by direct composition.
///
/// Only the x^2 coefficient of the composition can be negative (the carrier
/// is nonnegative except at x^2, and p_shifted has nonnegative coefficients),
/// and it is eventually positive in m, so the loop terminates.
pub fn min_multiplier(p_shifted: &IntPolynomial) -> Result<BigInt> {
    let degree = p_shifted
        .degree()
        .ok_or_else(|| Error::Domain("cannot pick a multiplier for the zero polynomial".into()))?;
    if degree < 2 {
        return Err(Error::Domain(format!(
            "multiplier selection requires degree >= 2, got {degree}"
        )));
    }
    if !p_shifted.has_nonnegative_coeffs() {
        return Err(Error::Domain(
            "multiplier selection requires nonnegative coefficients; shift the polynomial first"
                .into(),
        ));
    }
    let h = degree as u32;
    assert!(3 * h >= 5 + 1, "h >= 2 forces 3h-5 >= 1");
    let a1 = p_shifted.coeff(1);
    let ah = p_shifted.leading().expect("nonzero").clone();
    let mut m = BigInt::from(3);
    if a1.is_positive() {
        let numerator = BigUint::from(2u32) * a1.magnitude();
        let denominator = BigUint::from(h) * BigUint::from(3 * h - 5) * ah.magnitude();
        let target = numerator.div_ceil(&denominator);
        let mut root = target.nth_root(h - 1);
        while root.pow(h - 1) < target {
            root += 1u32;
        }
        let candidate = BigInt::from(root);
        if candidate > m {
            m = candidate;
        }
    }
    loop {
        let composed = p_shifted.compose(&carrier(&m)?);
        if composed.has_nonnegative_coeffs() {
            return Ok(m);
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(s: &str) -> IntPolynomial {
        parse_poly(s).unwrap()
    }

    fn study(s: &str) -> StudyPolynomial {
        StudyPolynomial::from_str(s).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(poly("x^2").eval(&BigInt::zero()), BigInt::zero());
        assert_eq!(poly("x^3-2x+5").eval(&BigInt::from(10)), BigInt::from(985));
        let t3 = carrier(&BigInt::from(3)).unwrap();
        let x = BigInt::from(1u64 << 8);
        let expected = BigInt::from(3u128 * (1 << 32) + 3 * (1 << 24) - (1 << 16) + 3 * (1 << 8) + 3);
        assert_eq!(t3.eval(&x), expected);
    }

    #[test]
    fn carrier_examples() {
        assert!(carrier(&BigInt::from(2)).is_err());
        let t3 = carrier(&BigInt::from(3)).unwrap();
        assert_eq!(
            t3.coeffs(),
            IntPolynomial::from_i64_coeffs(&[3, 3, -1, 3, 3]).coeffs()
        );
        assert_eq!(t3.degree(), Some(4));
        assert!(t3.pow(2).has_nonnegative_coeffs());
        assert!(t3.pow(3).has_nonnegative_coeffs());
    }

    #[test]
    fn carrier_power_fixture_values() {
        let m = BigInt::from(3);
        let squared = carrier_power_coeffs(&m, 2).unwrap();
        assert_eq!(squared[4], BigInt::from(37));
        let cubed = carrier_power_coeffs(&m, 3).unwrap();
        assert_eq!(cubed.len(), 13);
        assert_eq!(cubed.iter().max().unwrap(), &BigInt::from(225));
        assert_eq!(cubed[0], BigInt::from(27));
        assert_eq!(cubed[1], BigInt::from(81));
    }

    #[test]
    fn carrier_power_endpoint_and_size_sweep() {
        // Positivity, the (2mh)^h cap, the m^h·h!·e^h intermediate cap, and
        // the endpoint values, across the whole tested parameter box.
        // e is sandwiched by 2718281828/10^9 < e < 2718281829/10^9.
        let e_lo = BigUint::from(2_718_281_828u64);
        let scale = BigUint::from(10u32).pow(9);
        for h in 2u32..=8 {
            let mut factorial = BigUint::one();
            for i in 1..=h {
                factorial *= i;
            }
            for m in 3u32..=50 {
                let mb = BigInt::from(m);
                let coeffs = carrier_power_coeffs(&mb, h).unwrap();
                assert_eq!(coeffs.len(), 4 * h as usize + 1);
                let mh = BigUint::from(m).pow(h);
                let cap = (BigUint::from(2 * m * h)).pow(h);
                // c ≤ m^h·h!·e^h checked against the lower sandwich bound of e,
                // so success implies the true inequality.
                let inter_lhs = |c: &BigUint| c * scale.pow(h);
                let inter_rhs = &mh * &factorial * e_lo.pow(h);
                for c in &coeffs {
                    assert!(c.is_positive(), "h={h} m={m}");
                    let mag = c.magnitude();
                    assert!(mag <= &cap, "h={h} m={m}");
                    assert!(inter_lhs(mag) <= inter_rhs, "intermediate bound h={h} m={m}");
                }
                assert_eq!(coeffs[0].magnitude(), &mh);
                assert_eq!(coeffs[4 * h as usize].magnitude(), &mh);
                let hmh = BigUint::from(h) * &mh;
                assert_eq!(coeffs[1].magnitude(), &hmh);
                assert_eq!(coeffs[4 * h as usize - 1].magnitude(), &hmh);
            }
        }
    }

    #[test]
    fn shift_examples() {
        assert_eq!(poly("x^2").shift(&BigInt::zero()), poly("x^2"));
        assert_eq!(poly("x^2-1").shift(&BigInt::from(2)), poly("x^2+4x+3"));
        let p = study("x^2-10");
        let b = shift_bound(&p);
        assert_eq!(b, BigUint::from(11u32));
        assert_eq!(
            p.poly().shift(&BigInt::from(11)),
            poly("x^2+22x+111")
        );
    }

    #[test]
    fn shift_bound_examples() {
        assert_eq!(shift_bound(&study("x^3-2x+5")), BigUint::from(6u32));
        // Already-nonnegative polynomials keep b = 0.
        assert_eq!(shift_bound(&study("2x^2+x+1")), BigUint::zero());
        let p = study("x^3-2x+5");
        let shifted = p.poly().shift(&BigInt::from(6));
        assert_eq!(shifted, poly("x^3+18x^2+106x+209"));
    }

    #[test]
    fn min_multiplier_examples() {
        for h in [2usize, 3, 4, 5] {
            let p = IntPolynomial::monomial(BigInt::one(), h);
            assert_eq!(min_multiplier(&p).unwrap(), BigInt::from(3));
        }
        assert_eq!(min_multiplier(&poly("x^3+x")).unwrap(), BigInt::from(3));
        // Candidate region starts at 2·100/(2·1·1) = 100 and verifies there.
        assert_eq!(min_multiplier(&poly("x^2+100x")).unwrap(), BigInt::from(100));
        assert!(min_multiplier(&poly("x^2-1")).is_err());
    }

    #[test]
    fn pow_basics() {
        assert_eq!(poly("x^2+3x").pow(0), IntPolynomial::one());
        assert_eq!(poly("x+1").pow(2), poly("x^2+2x+1"));
        assert_eq!(carrier(&BigInt::from(3)).unwrap().pow(3).coeffs().len(), 13);
    }

    #[test]
    fn parser_accepts_both_forms() {
        assert_eq!(poly("5,-2,0,1"), poly("x^3-2x+5"));
        assert_eq!(poly("2*x^4 + x - 7"), poly("2x^4+x-7"));
        assert_eq!(poly("-x^2+3"), IntPolynomial::from_i64_coeffs(&[3, 0, -1]));
        assert_eq!(poly("x"), IntPolynomial::from_i64_coeffs(&[0, 1]));
        assert_eq!(poly("42"), IntPolynomial::from_i64_coeffs(&[42]));
        assert!(parse_poly("").is_err());
        assert!(parse_poly("x^").is_err());
        assert!(parse_poly("+").is_err());
    }

    #[test]
    fn display_roundtrips_through_parser() {
        for s in ["x^3-2x+5", "2x^4+x-7", "-x^2+3", "0", "x^2+22x+111", "x"] {
            let p = poly(s);
            assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn study_polynomial_validation() {
        assert!(StudyPolynomial::from_str("x+1").is_err());
        assert!(StudyPolynomial::from_str("-x^2+1").is_err());
        let p = study("2x^4+x-7");
        assert_eq!(p.degree(), 4);
        assert_eq!(p.lambda(), &BigUint::from(7u32));
    }

    fn arb_poly(max_coeff: i64, max_deg: usize) -> impl Strategy<Value = IntPolynomial> {
        prop::collection::vec(-max_coeff..=max_coeff, 1..=max_deg + 1)
            .prop_map(|v| IntPolynomial::from_i64_coeffs(&v))
    }

    proptest! {
        #[test]
        fn mul_is_evaluation_homomorphic(
            a in arb_poly(50, 6),
            b in arb_poly(50, 6),
            x in -1000i64..1000,
        ) {
            let x = BigInt::from(x);
            prop_assert_eq!(a.mul(&b).eval(&x), a.eval(&x) * b.eval(&x));
        }

        #[test]
        fn pow_is_evaluation_homomorphic(a in arb_poly(9, 4), e in 0u32..5, x in -60i64..60) {
            let x = BigInt::from(x);
            prop_assert_eq!(a.pow(e).eval(&x), a.eval(&x).pow(e));
        }

        #[test]
        fn shift_is_exact(a in arb_poly(100, 6), b in -100i64..100, x in -100i64..100) {
            let b = BigInt::from(b);
            let x = BigInt::from(x);
            prop_assert_eq!(a.shift(&b).eval(&x), a.eval(&(&x + &b)));
        }

        #[test]
        fn shift_bound_yields_nonnegative_coeffs(
            mut coeffs in prop::collection::vec(-1_000_000i64..=1_000_000, 3..=9),
            lead in 1i64..=1_000_000,
        ) {
            let top = coeffs.len() - 1;
            coeffs[top] = lead;
            let p = StudyPolynomial::new(IntPolynomial::from_i64_coeffs(&coeffs)).unwrap();
            let b = shift_bound(&p);
            let shifted = p.poly().shift(&BigInt::from(b));
            prop_assert!(shifted.has_nonnegative_coeffs());
        }
    }
}
