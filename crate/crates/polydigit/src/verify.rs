//! End-to-end verification suite.
//!
//! Each function here checks one acceptance criterion exactly as stated and
//! returns a short human summary on success or a description of the first
//! failure. `run_all` executes the whole battery (the multi-hour exhaustive
//! scan only when `long` is set) and is what `polydigit verify-paper` prints.
//!
//! Randomized batteries use a fixed seed so a failure is reproducible.

use std::time::Instant;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{greedy_bh_set, lower_bound_witness, negative_coeff_lower_bound};
use crate::digitsum::{carry_count, digit_sum, verify_split_neg, verify_split_pos, Base};
use crate::intpoly::{carrier_power_coeffs, StudyPolynomial};
use crate::search::{average_digit_sum, find_first_below, ratio_record, ScanOptions};
use crate::witness::{
    build_witness, carrier_digit_sum, carrier_value, choose_parameters, density_family,
    minimal_block_exponent, parse_ratio, shifted_carrier_digit_sum, WitnessParams,
};

pub type VerifyResult = std::result::Result<String, String>;

const SEED: u64 = 0x5d1_917;
const RANDOM_ROUNDS: usize = 100_000;

fn base(q: u64) -> Base {
    Base::new(q).expect("fixed base")
}

fn study(s: &str) -> StudyPolynomial {
    s.parse().expect("fixed polynomial")
}

fn eps(s: &str) -> BigRational {
    parse_ratio(s).expect("fixed rational")
}

fn fail<T: std::fmt::Display>(context: &str, err: T) -> String {
    format!("{context}: {err}")
}

/// Criterion 1: splitting identities and the carry identity on randomized
/// admissible tuples over q in {2, 3, 10, 16}.
pub fn identity_suite() -> VerifyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checked = 0usize;
    for q in [2u64, 3, 10, 16] {
        let b = base(q);
        let powers: Vec<BigUint> = (0..=32).map(|k| b.power(k)).collect();
        for round in 0..RANDOM_ROUNDS {
            let a = rng.gen_biguint(96) + 1u32;
            let k = rng.gen_range(1..=32u64);
            let mut small = rng.gen_biguint_below(&powers[k as usize]);
            if small.is_zero() {
                small = BigUint::one();
            }
            verify_split_pos(&a, &small, k, b)
                .map_err(|e| fail(&format!("q={q} round={round} split_pos"), e))?;
            verify_split_neg(&a, &small, k, b)
                .map_err(|e| fail(&format!("q={q} round={round} split_neg"), e))?;
            let c = rng.gen_biguint(96);
            let r = carry_count(&a, &c, b);
            let lhs = digit_sum(&(&a + &c), b) + (q as u128 - 1) * r;
            if lhs != digit_sum(&a, b) + digit_sum(&c, b) {
                return Err(format!("q={q} round={round}: carry identity failed"));
            }
            checked += 3;
        }
    }
    Ok(format!("{checked} identity checks across 4 bases, zero failures"))
}

/// Criterion 2: subadditivity and submultiplicativity on random pairs.
pub fn subadditivity_suite() -> VerifyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut checked = 0usize;
    for q in [2u64, 3, 10, 16] {
        let b = base(q);
        for round in 0..RANDOM_ROUNDS {
            let x = rng.gen_biguint(128);
            let y = rng.gen_biguint(128);
            let sx = digit_sum(&x, b);
            let sy = digit_sum(&y, b);
            if digit_sum(&(&x + &y), b) > sx + sy {
                return Err(format!("q={q} round={round}: subadditivity failed"));
            }
            if digit_sum(&(&x * &y), b) > sx * sy {
                return Err(format!("q={q} round={round}: submultiplicativity failed"));
            }
            checked += 2;
        }
    }
    Ok(format!("{checked} comparisons across 4 bases, zero failures"))
}

/// Criterion 3: carrier power coefficients for h in 2..=8, m in 3..=50 —
/// strict positivity, the (2mh)^h cap and the exact endpoint values.
pub fn carrier_coefficient_sweep() -> VerifyResult {
    let mut checked = 0usize;
    for h in 2u32..=8 {
        for m in 3u32..=50 {
            let coeffs = carrier_power_coeffs(&BigInt::from(m), h)
                .map_err(|e| fail(&format!("h={h} m={m}"), e))?;
            if coeffs.len() != 4 * h as usize + 1 {
                return Err(format!("h={h} m={m}: wrong coefficient count"));
            }
            let cap = BigUint::from(2 * m * h).pow(h);
            for (i, c) in coeffs.iter().enumerate() {
                if c.sign() != num_bigint::Sign::Plus {
                    return Err(format!("h={h} m={m}: coefficient {i} not positive"));
                }
                if c.magnitude() > &cap {
                    return Err(format!("h={h} m={m}: coefficient {i} exceeds (2mh)^h"));
                }
            }
            let mh = BigUint::from(m).pow(h);
            let hmh = BigUint::from(h) * &mh;
            let top = 4 * h as usize;
            if coeffs[0].magnitude() != &mh
                || coeffs[top].magnitude() != &mh
                || coeffs[1].magnitude() != &hmh
                || coeffs[top - 1].magnitude() != &hmh
            {
                return Err(format!("h={h} m={m}: endpoint coefficients wrong"));
            }
            checked += coeffs.len();
        }
    }
    Ok(format!("{checked} coefficients verified exactly"))
}

/// Criterion 4: the base-2 cube construction at m = 3 — peak coefficient
/// 225, s_2 values k+7 and 50, and the k = 44 witness below 2^178.
pub fn worked_example() -> VerifyResult {
    let q = base(2);
    let m = BigUint::from(3u32);
    let cubed = carrier_power_coeffs(&BigInt::from(3), 3).map_err(|e| fail("cube", e))?;
    let peak = cubed.iter().map(|c| c.magnitude().clone()).max().unwrap();
    if peak != BigUint::from(225u32) {
        return Err(format!("peak cube coefficient is {peak}, expected 225"));
    }
    let minimal = minimal_block_exponent(q, &m, &BigUint::zero()).map_err(|e| fail("scan", e))?;
    for k in minimal..=64 {
        let got = carrier_digit_sum(q, &m, k).map_err(|e| fail(&format!("k={k}"), e))?;
        if got != k as u128 + 7 {
            return Err(format!("s_2(carrier_3(2^{k})) = {got}, expected k+7"));
        }
    }
    for k in 8u64..=64 {
        let value = carrier_value(&m, &q.power(k));
        let cube = (&value * &value) * &value;
        let got = digit_sum(&cube, q);
        if got != 50 {
            return Err(format!("s_2(carrier_3(2^{k})^3) = {got}, expected 50"));
        }
    }
    let params = WitnessParams::new(q, study("x^3"), eps("1"), BigUint::zero(), m, 44)
        .map_err(|e| fail("params", e))?;
    let record = build_witness(&params).map_err(|e| fail("witness", e))?;
    if record.sn() != 51 || record.spn() != 50 {
        return Err(format!(
            "witness digit sums ({}, {}), expected (51, 50)",
            record.sn(),
            record.spn()
        ));
    }
    if record.n() >= &(BigUint::one() << 178) {
        return Err("witness is not below 2^178".into());
    }
    Ok("peak 225, k+7 and 50 block sums, 50/51 witness below 2^178".into())
}

/// Criterion 5: the full parameter pipeline over five polynomials, three
/// bases and three epsilons — ratio < ε and n < B·C^(1/ε), all exact.
pub fn witness_pipeline() -> VerifyResult {
    let mut built = 0usize;
    for poly in ["x^2", "x^3", "x^5", "x^3-2x+5", "2x^4+x-7"] {
        let p = study(poly);
        for q in [2u64, 3, 10] {
            for e in ["1", "1/2", "1/10"] {
                let context = format!("p={poly} q={q} eps={e}");
                let epsilon = eps(e);
                let params = choose_parameters(&p, base(q), &epsilon)
                    .map_err(|err| fail(&context, err))?;
                // build_witness certifies ratio < ε and the B·C^(1/ε) cap.
                let record = build_witness(&params).map_err(|err| fail(&context, err))?;
                if !record.ratio_below(&epsilon) {
                    return Err(format!("{context}: ratio not below epsilon"));
                }
                built += 1;
            }
        }
    }
    Ok(format!("{built} witnesses built and certified"))
}

/// Criterion 6: the carrier block identities against direct digit sums for
/// every fixture (q in {2,3,10}, m in 3..=40, six exponents upward from the
/// smallest admissible one, shifts b in {0, 1, 6}).
pub fn block_identity_sweep() -> VerifyResult {
    let mut checked = 0usize;
    for q in [2u64, 3, 10] {
        let b = base(q);
        for m in 3u64..=40 {
            let m = BigUint::from(m);
            for shift in [0u64, 1, 6] {
                let shift = BigUint::from(shift);
                let start = minimal_block_exponent(b, &m, &shift)
                    .map_err(|e| fail(&format!("q={q} m={m} b={shift}"), e))?;
                for k in start..start + 6 {
                    shifted_carrier_digit_sum(b, &m, k, &shift)
                        .map_err(|e| fail(&format!("q={q} m={m} b={shift} k={k}"), e))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} block identities validated, zero mismatches"))
}

/// Criterion 7: the distinct-sum lower-bound construction for h in {2,3},
/// q in {2,3}, set sizes up to 6.
pub fn lower_bound_suite() -> VerifyResult {
    let mut checked = 0usize;
    for (h, poly) in [(2u32, "x^2"), (3, "x^3")] {
        let p = study(poly);
        for q in [2u64, 3] {
            for size in h as usize..=6 {
                let context = format!("h={h} q={q} N={size}");
                // Internally enforces s_q(n) = N and
                // s_q(p(n)) >= binom(N+h-1, N-1).
                let witness =
                    lower_bound_witness(&p, base(q), size).map_err(|e| fail(&context, e))?;
                if !witness.bh.distinct_sums_hold() {
                    return Err(format!("{context}: distinct-sum property failed"));
                }
                checked += 1;
            }
        }
        // Exhaustive brute force over the small box of greedy sets.
        for size in 1..=8usize {
            let set = greedy_bh_set(size, h, 1).map_err(|e| fail("greedy", e))?;
            if !set.distinct_sums_hold() {
                return Err(format!("greedy h={h} N={size}: collision found"));
            }
        }
    }
    Ok(format!("{checked} lower-bound witnesses certified"))
}

/// Criterion 8: the k(q−1) − s_q(−a_j−1) growth bound on 20 fixtures with a
/// negative coefficient.
pub fn negative_growth_suite() -> VerifyResult {
    let polys = ["x^2-1", "x^2-x", "x^3-2x+5", "3x^4+3x^3-x^2+3x+3", "2x^4+x-7"];
    let mut checked = 0usize;
    for poly in polys {
        let p = study(poly);
        for q in [2u64, 3] {
            for k in [10u64, 15] {
                let context = format!("p={poly} q={q} k={k}");
                // Validates bound <= s_q(p(q^k)) internally.
                negative_coeff_lower_bound(&p, base(q), k).map_err(|e| fail(&context, e))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} growth bounds validated"))
}

/// Criterion 9: the density family at (h=2, q=2, ε=1, i=6) — every member
/// below ε, members distinct, and family size at least N^α exactly; plus the
/// degree-3 family at i = 13.
pub fn density_suite() -> VerifyResult {
    let one = eps("1");
    for (poly, digits) in [("x^2", 6u64), ("x^3", 13)] {
        let context = format!("p={poly} i={digits}");
        let family =
            density_family(&study(poly), base(2), &one, digits).map_err(|e| fail(&context, e))?;
        for record in &family.records {
            if !record.ratio_below(&one) {
                return Err(format!("{context}: member above epsilon"));
            }
        }
        // Distinctness is enforced on construction; re-check here.
        for pair in family.records.windows(2) {
            if pair[0].n() >= pair[1].n() {
                return Err(format!("{context}: members not strictly increasing"));
            }
        }
        match family.family_size_bound_holds() {
            Ok(true) => {}
            Ok(false) => return Err(format!("{context}: family count below N^alpha")),
            Err(e) => return Err(fail(&context, e)),
        }
    }
    Ok("families at i=6 (32 members) and i=13 (4096 members) meet the N^alpha floor".into())
}

const FIRST_CUBE_DEFICIT: u64 = 407_182_835_067;

/// Criterion 10 (short): no n below 2^28 has s_2(n^3) < s_2(n), and the
/// known first such n checks instantly.
pub fn record_search_short() -> VerifyResult {
    let p = study("x^3");
    let q = base(2);
    let one = eps("1");
    let hit = find_first_below(&p, q, &one, &(BigUint::one() << 28), &ScanOptions::default())
        .map_err(|e| fail("scan", e))?;
    if let Some(n) = hit {
        return Err(format!("unexpected hit below 2^28 at n = {n}"));
    }
    let known = BigUint::from(FIRST_CUBE_DEFICIT);
    let record = ratio_record(&p, q, &known).map_err(|e| fail("known n", e))?;
    if record.spn() >= record.sn() {
        return Err(format!(
            "known value fails: s_2(n^3) = {} vs s_2(n) = {}",
            record.spn(),
            record.sn()
        ));
    }
    Ok(format!(
        "no hit below 2^28; n = {FIRST_CUBE_DEFICIT} has s_2(n^3) = {} < s_2(n) = {}",
        record.spn(),
        record.sn()
    ))
}

/// Criterion 10 (long, opt-in): the exhaustive scan to 2^40 finds exactly
/// 407182835067 as the first value with s_2(n^3) < s_2(n). Hours-scale.
pub fn record_search_long(checkpoint: Option<std::path::PathBuf>) -> VerifyResult {
    let opts = ScanOptions {
        checkpoint,
        progress: true,
        ..ScanOptions::default()
    };
    let hit = find_first_below(
        &study("x^3"),
        base(2),
        &eps("1"),
        &(BigUint::one() << 40),
        &opts,
    )
    .map_err(|e| fail("scan", e))?;
    match hit {
        Some(n) if n == BigUint::from(FIRST_CUBE_DEFICIT) => Ok(format!(
            "exhaustive scan to 2^40: first hit is exactly {FIRST_CUBE_DEFICIT}"
        )),
        Some(n) => Err(format!("first hit was {n}, expected {FIRST_CUBE_DEFICIT}")),
        None => Err("no hit found below 2^40".into()),
    }
}

/// Criterion 11: average digit-sum order at q = 2, N = 2^20 — Σ s_2(n)
/// within 5% of N·log N/(2·log 2), and the squared sum within 15% of twice
/// the plain sum. (Tolerances are engineering choices for an asymptotic
/// statement.)
pub fn average_order_suite() -> VerifyResult {
    let n = 1u64 << 20;
    let (plain, squared) =
        average_digit_sum(base(2), &BigUint::from(n), 2).map_err(|e| fail("sums", e))?;
    let plain_f = plain.to_f64().ok_or("sum overflow")?;
    let squared_f = squared.to_f64().ok_or("sum overflow")?;
    let target = (n as f64) * (n as f64).ln() / (2.0 * std::f64::consts::LN_2);
    let rel = (plain_f - target).abs() / target;
    if rel > 0.05 {
        return Err(format!(
            "sum {plain} deviates {:.2}% from {target:.0} (cap 5%)",
            rel * 100.0
        ));
    }
    let ratio = squared_f / plain_f;
    if (ratio - 2.0).abs() / 2.0 > 0.15 {
        return Err(format!("squared/plain ratio {ratio:.4} outside 2 ± 15%"));
    }
    Ok(format!(
        "sum within {:.2}% of the average order, squared ratio {ratio:.3}",
        rel * 100.0
    ))
}

/// One executed criterion.
pub struct CriterionReport {
    pub id: &'static str,
    pub name: &'static str,
    pub outcome: VerifyResult,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.outcome.is_ok()
    }
}

/// Run every criterion in order; the exhaustive 2^40 reproduction only when
/// `long` is set.
pub fn run_all(long: bool) -> Vec<CriterionReport> {
    let mut suite: Vec<(&'static str, &'static str, Box<dyn Fn() -> VerifyResult>)> = vec![
        ("1", "splitting and carry identities", Box::new(identity_suite)),
        ("2", "subadditivity and submultiplicativity", Box::new(subadditivity_suite)),
        ("3", "carrier power coefficient sweep", Box::new(carrier_coefficient_sweep)),
        ("4", "worked base-2 cube example", Box::new(worked_example)),
        ("5", "witness parameter pipeline", Box::new(witness_pipeline)),
        ("6", "block identity sweep", Box::new(block_identity_sweep)),
        ("7", "distinct-sum lower bounds", Box::new(lower_bound_suite)),
        ("8", "negative-coefficient growth", Box::new(negative_growth_suite)),
        ("9", "density families", Box::new(density_suite)),
        ("10", "record search (short)", Box::new(record_search_short)),
        ("11", "average digit-sum order", Box::new(average_order_suite)),
    ];
    if long {
        suite.push((
            "10-long",
            "record search (exhaustive to 2^40)",
            Box::new(|| record_search_long(None)),
        ));
    }
    suite
        .into_iter()
        .map(|(id, name, run)| {
            let start = Instant::now();
            let outcome = run();
            CriterionReport {
                id,
                name,
                outcome,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}
