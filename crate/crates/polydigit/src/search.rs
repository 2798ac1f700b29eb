//! Exhaustive ratio scanning: record tables, first-below searches, counting
//! and digit-sum averages.
//!
//! The inner loop runs on fixed-width integers whenever λ(h+1)·n^h provably
//! fits in an i128 (so Horner evaluation cannot overflow), falling back to
//! arbitrary precision per element past that limit; both paths produce
//! identical records. Work is split into contiguous blocks scanned in
//! parallel. Each block reports the candidates that improve on the block's
//! own running minimum, and candidates are filtered against the global
//! minimum only at merge time, so the result is independent of the
//! partitioning. Long scans checkpoint (next n, records so far) to a JSON
//! state file that refuses to resume under mismatched parameters.

use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::digitsum::{digit_sum, Base, NativeDigitSum};
use crate::error::{Error, Result};
use crate::intpoly::StudyPolynomial;
use crate::witness::{density_exponent, RatioRecord, RecordJson};

/// Half-open scan interval [lo, hi).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanRange {
    lo: BigUint,
    hi: BigUint,
}

impl ScanRange {
    pub fn new(lo: BigUint, hi: BigUint) -> Result<Self> {
        if lo >= hi {
            return Err(Error::Domain(format!(
                "scan range must satisfy lo < hi, got [{lo}, {hi})"
            )));
        }
        Ok(ScanRange { lo, hi })
    }

    pub fn lo(&self) -> &BigUint {
        &self.lo
    }

    pub fn hi(&self) -> &BigUint {
        &self.hi
    }

    fn to_u128(&self) -> Result<(u128, u128)> {
        let lo = self.lo.to_u128();
        let hi = self.hi.to_u128();
        match (lo, hi) {
            (Some(lo), Some(hi)) => Ok((lo, hi)),
            _ => Err(Error::Domain(
                "scan bounds beyond 2^128 are not enumerable".into(),
            )),
        }
    }
}

/// Strictly improving records: ratios strictly decreasing, n strictly
/// increasing.
#[derive(Debug, Clone, Default)]
pub struct RecordTable {
    records: Vec<RatioRecord>,
}

impl RecordTable {
    pub fn new() -> Self {
        RecordTable::default()
    }

    pub fn push(&mut self, record: RatioRecord) -> Result<()> {
        if let Some(last) = self.records.last() {
            if record.n() <= last.n() || record.ratio() >= last.ratio() {
                return Err(Error::Construction(format!(
                    "record table ordering violated by n = {}",
                    record.n()
                )));
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[RatioRecord] {
        &self.records
    }

    pub fn last(&self) -> Option<&RatioRecord> {
        self.records.last()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Knobs for the scanning drivers. `block` is the parallel work unit;
/// `checkpoint_every` bounds how many values are rescanned after a crash.
#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub block: u128,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_every: u128,
    pub progress: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            block: 1 << 20,
            checkpoint: None,
            checkpoint_every: 1 << 30,
            progress: false,
        }
    }
}

/// Fixed-width evaluator. `limit` is the largest n for which
/// λ(h+1)·n^h ≤ i128::MAX; up to there every Horner partial sum is bounded
/// by λ(h+1)·n^h in absolute value, so i128 arithmetic cannot overflow.
struct FastEval {
    coeffs: Vec<i128>,
    limit: u128,
}

impl FastEval {
    fn new(p: &StudyPolynomial) -> Self {
        let coeffs: Option<Vec<i128>> = p.poly().coeffs().iter().map(|c| c.to_i128()).collect();
        match coeffs {
            Some(coeffs) => {
                let h = p.degree();
                let denom = p.lambda() * BigUint::from(h as u64 + 1);
                let cap = BigUint::from(i128::MAX as u128) / denom;
                let limit = cap.nth_root(h).to_u128().unwrap_or(0);
                FastEval { coeffs, limit }
            }
            None => FastEval {
                coeffs: Vec::new(),
                limit: 0,
            },
        }
    }

    #[inline]
    fn eval(&self, n: u128) -> i128 {
        let n = n as i128;
        let mut acc: i128 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * n + c;
        }
        acc
    }
}

// a.0/a.1 < b.0/b.1 by cross multiplication, widening only when u128
// products would overflow (possible for digit sums over enormous bases).
#[inline]
fn ratio_less(a: (u128, u128), b: (u128, u128)) -> bool {
    match (a.0.checked_mul(b.1), b.0.checked_mul(a.1)) {
        (Some(x), Some(y)) => x < y,
        _ => BigUint::from(a.0) * BigUint::from(b.1) < BigUint::from(b.0) * BigUint::from(a.1),
    }
}

/// Exact ε as a native pair when it fits, for the hot loops.
#[derive(Clone, Copy)]
struct NativeEps {
    num: u128,
    den: u128,
}

impl NativeEps {
    fn of(epsilon: &BigRational) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::Domain(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        match (
            epsilon.numer().magnitude().to_u128(),
            epsilon.denom().magnitude().to_u128(),
        ) {
            (Some(num), Some(den)) => Ok(NativeEps { num, den }),
            _ => Err(Error::Domain(
                "epsilon numerator/denominator beyond 2^128 are not supported by the scanner"
                    .into(),
            )),
        }
    }

    #[inline]
    fn admits(&self, sn: u128, spn: u128) -> bool {
        ratio_less((spn, sn), (self.num, self.den))
    }
}

struct Scanner<'a> {
    poly: &'a StudyPolynomial,
    q: Base,
    fast: FastEval,
    ds: NativeDigitSum,
}

impl<'a> Scanner<'a> {
    fn new(poly: &'a StudyPolynomial, q: Base) -> Self {
        Scanner {
            poly,
            q,
            fast: FastEval::new(poly),
            ds: NativeDigitSum::new(q),
        }
    }

    /// Digit sums (s_q(n), s_q(p(n))) or None when p(n) < 0.
    #[inline]
    fn sums(&self, n: u128) -> Option<(u128, u128)> {
        if n <= self.fast.limit {
            let value = self.fast.eval(n);
            if value < 0 {
                return None;
            }
            Some((self.ds.sum_u128(n), self.ds.sum_u128(value as u128)))
        } else {
            self.sums_big(n)
        }
    }

    #[cold]
    fn sums_big(&self, n: u128) -> Option<(u128, u128)> {
        let nb = BigUint::from(n);
        let value = self.poly.poly().eval_biguint(&nb);
        if value.is_negative() {
            return None;
        }
        Some((
            digit_sum(&nb, self.q),
            digit_sum(value.magnitude(), self.q),
        ))
    }

    // Candidates improving on the block-local minimum, in order of n.
    fn block_records(&self, lo: u128, hi: u128) -> Vec<(u128, u128, u128)> {
        let mut best: Option<(u128, u128)> = None;
        let mut out = Vec::new();
        for n in lo.max(1)..hi {
            if let Some((sn, spn)) = self.sums(n) {
                let improves = match best {
                    None => true,
                    Some(b) => ratio_less((spn, sn), b),
                };
                if improves {
                    best = Some((spn, sn));
                    out.push((n, sn, spn));
                }
            }
        }
        out
    }

    fn block_first_below(&self, eps: NativeEps, lo: u128, hi: u128) -> Option<u128> {
        for n in lo.max(1)..hi {
            if let Some((sn, spn)) = self.sums(n) {
                if eps.admits(sn, spn) {
                    return Some(n);
                }
            }
        }
        None
    }

    fn block_count(&self, eps: NativeEps, lo: u128, hi: u128) -> u64 {
        let mut count = 0;
        for n in lo.max(1)..hi {
            if let Some((sn, spn)) = self.sums(n) {
                if eps.admits(sn, spn) {
                    count += 1;
                }
            }
        }
        count
    }
}

fn blocks(lo: u128, hi: u128, block: u128) -> Vec<(u128, u128)> {
    let mut out = Vec::new();
    let mut start = lo;
    while start < hi {
        let end = hi.min(start.saturating_add(block));
        out.push((start, end));
        start = end;
    }
    out
}

/// The record for a single n, using the fixed-width fast path when the value
/// provably fits and arbitrary precision otherwise. Both paths agree.
pub fn ratio_record(p: &StudyPolynomial, q: Base, n: &BigUint) -> Result<RatioRecord> {
    if n.is_zero() {
        return Err(Error::Domain("ratio requires n >= 1".into()));
    }
    let scanner = Scanner::new(p, q);
    if let Some(nn) = n.to_u128() {
        if nn <= scanner.fast.limit {
            let value = scanner.fast.eval(nn);
            if value < 0 {
                return Err(Error::Domain(format!(
                    "p(n) = {value} is negative at n = {n}; the ratio is undefined"
                )));
            }
            return RatioRecord::new(
                n.clone(),
                scanner.ds.sum_u128(nn),
                scanner.ds.sum_u128(value as u128),
            );
        }
    }
    RatioRecord::compute(p, q, n)
}

/// Scan [lo, hi) for running-minimum records of the ratio. Values with
/// p(n) < 0 are skipped. Deterministic for every partitioning.
pub fn scan_records(
    p: &StudyPolynomial,
    q: Base,
    range: &ScanRange,
    opts: &ScanOptions,
) -> Result<RecordTable> {
    let (lo, hi) = range.to_u128()?;
    let scanner = Scanner::new(p, q);
    let mut table = RecordTable::new();
    let mut start = lo;
    if let Some(path) = &opts.checkpoint {
        if path.exists() {
            let cp = Checkpoint::load(path)?;
            cp.validate(CHECKPOINT_RECORDS, q, p, None, range)?;
            start = cp.next_n()?;
            for json in &cp.records {
                json.verify()?;
                table.push(json_to_record(json)?)?;
            }
        }
    }
    while start < hi {
        let chunk_end = hi.min(start.saturating_add(opts.checkpoint_every));
        let chunk: Vec<Vec<(u128, u128, u128)>> = blocks(start, chunk_end, opts.block)
            .into_par_iter()
            .map(|(blo, bhi)| scanner.block_records(blo, bhi))
            .collect();
        for candidate in chunk.into_iter().flatten() {
            let (n, sn, spn) = candidate;
            let improves = match table.last() {
                None => true,
                Some(best) => ratio_less((spn, sn), (best.spn(), best.sn())),
            };
            if improves {
                table.push(RatioRecord::new(BigUint::from(n), sn, spn)?)?;
            }
        }
        start = chunk_end;
        if let Some(path) = &opts.checkpoint {
            Checkpoint::of_records(q, p, range, start, &table)?.save(path)?;
        }
        if opts.progress {
            eprintln!("scanned up to n = {start} ({} records)", table.len());
        }
    }
    Ok(table)
}

/// Smallest n < limit with ratio below ε, or None. Blocks are processed in
/// order with early exit at the first hit, so the result is the true minimum.
pub fn find_first_below(
    p: &StudyPolynomial,
    q: Base,
    epsilon: &BigRational,
    limit: &BigUint,
    opts: &ScanOptions,
) -> Result<Option<BigUint>> {
    let eps = NativeEps::of(epsilon)?;
    let range = ScanRange::new(BigUint::from(1u32), limit.clone())?;
    let (lo, hi) = range.to_u128()?;
    let scanner = Scanner::new(p, q);
    let mut start = lo;
    if let Some(path) = &opts.checkpoint {
        if path.exists() {
            let cp = Checkpoint::load(path)?;
            cp.validate(CHECKPOINT_FIRST_BELOW, q, p, Some(epsilon), &range)?;
            start = cp.next_n()?;
        }
    }
    while start < hi {
        let chunk_end = hi.min(start.saturating_add(opts.checkpoint_every));
        let hits: Vec<Option<u128>> = blocks(start, chunk_end, opts.block)
            .into_par_iter()
            .map(|(blo, bhi)| scanner.block_first_below(eps, blo, bhi))
            .collect();
        if let Some(n) = hits.into_iter().flatten().next() {
            return Ok(Some(BigUint::from(n)));
        }
        start = chunk_end;
        if let Some(path) = &opts.checkpoint {
            Checkpoint::of_first_below(q, p, epsilon, &range, start)?.save(path)?;
        }
        if opts.progress {
            eprintln!("no hit below n = {start}");
        }
    }
    Ok(None)
}

/// Exact count of n in [1, limit) with ratio below ε (points with p(n) < 0
/// are excluded: the ratio is undefined there).
pub fn count_below(
    p: &StudyPolynomial,
    q: Base,
    epsilon: &BigRational,
    limit: &BigUint,
) -> Result<u64> {
    let eps = NativeEps::of(epsilon)?;
    let hi = limit
        .to_u128()
        .ok_or_else(|| Error::Domain("count limit beyond 2^128 is not enumerable".into()))?;
    if hi <= 1 {
        return Ok(0);
    }
    let scanner = Scanner::new(p, q);
    let total = blocks(1, hi, ScanOptions::default().block)
        .into_par_iter()
        .map(|(blo, bhi)| scanner.block_count(eps, blo, bhi))
        .sum();
    Ok(total)
}

/// One row of the counting table: how many n < threshold fall below ε, next
/// to the density floor N^α (approximated only for display; the exact
/// comparison lives in the density-family certificate).
#[derive(Debug, Clone)]
pub struct CountRow {
    pub threshold: BigUint,
    pub count: u64,
    pub alpha_bound: f64,
}

/// Counts at every power of q up to the limit (plus the limit itself), with
/// the N^α column derived from the density exponent for this (ε, h).
pub fn count_table(
    p: &StudyPolynomial,
    q: Base,
    epsilon: &BigRational,
    limit: &BigUint,
) -> Result<Vec<CountRow>> {
    let eps = NativeEps::of(epsilon)?;
    let hi = limit
        .to_u128()
        .ok_or_else(|| Error::Domain("count limit beyond 2^128 is not enumerable".into()))?;
    let alpha = density_exponent(epsilon, p.degree())?;
    let alpha_f = alpha.numer().to_f64().unwrap_or(0.0) / alpha.denom().to_f64().unwrap_or(1.0);
    let scanner = Scanner::new(p, q);
    let mut thresholds = Vec::new();
    let mut power = q.get() as u128;
    while power < hi {
        thresholds.push(power);
        power = match power.checked_mul(q.get() as u128) {
            Some(next) => next,
            None => break,
        };
    }
    thresholds.push(hi);
    let mut rows = Vec::with_capacity(thresholds.len());
    let mut done: u128 = 1;
    let mut running: u64 = 0;
    for threshold in thresholds {
        if threshold > done {
            running += blocks(done, threshold, ScanOptions::default().block)
                .into_par_iter()
                .map(|(blo, bhi)| scanner.block_count(eps, blo, bhi))
                .sum::<u64>();
            done = threshold;
        }
        rows.push(CountRow {
            threshold: BigUint::from(threshold),
            count: running,
            alpha_bound: (threshold as f64).powf(alpha_f),
        });
    }
    Ok(rows)
}

/// (Σ_{n<limit} s_q(n), Σ_{n<limit} s_q(n^h)). The second sum tends to h
/// times the first.
pub fn average_digit_sum(q: Base, limit: &BigUint, h: u32) -> Result<(BigUint, BigUint)> {
    if h == 0 {
        return Err(Error::Domain("power must be at least 1".into()));
    }
    let hi = limit
        .to_u128()
        .ok_or_else(|| Error::Domain("average limit beyond 2^128 is not enumerable".into()))?;
    if hi < 2 {
        return Err(Error::Domain("average requires limit >= 2".into()));
    }
    let ds = NativeDigitSum::new(q);
    let (plain, powered) = blocks(1, hi, ScanOptions::default().block)
        .into_par_iter()
        .map(|(blo, bhi)| {
            let mut plain: u128 = 0;
            let mut powered = BigUint::zero();
            let mut powered_native: u128 = 0;
            for n in blo..bhi {
                plain += ds.sum_u128(n);
                match n.checked_pow(h) {
                    Some(v) => powered_native += ds.sum_u128(v),
                    None => {
                        let v = BigUint::from(n).pow(h);
                        powered += digit_sum(&v, q);
                    }
                }
            }
            (plain, powered + powered_native)
        })
        .reduce(
            || (0u128, BigUint::zero()),
            |a, b| (a.0 + b.0, a.1 + b.1),
        );
    Ok((BigUint::from(plain), powered))
}

const CHECKPOINT_VERSION: u32 = 1;
const CHECKPOINT_RECORDS: &str = "records";
const CHECKPOINT_FIRST_BELOW: &str = "first-below";

/// Resumable scan state. A checkpoint only resumes a scan with the same
/// mode, base, polynomial, ε and range; anything else is rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub mode: String,
    pub q: u64,
    pub poly: String,
    pub epsilon: Option<String>,
    pub lo: String,
    pub hi: String,
    pub next_n: String,
    pub records: Vec<RecordJson>,
}

fn json_to_record(json: &RecordJson) -> Result<RatioRecord> {
    let n = json
        .n
        .parse::<BigUint>()
        .map_err(|_| Error::Parse(format!("bad decimal n {:?} in checkpoint", json.n)))?;
    RatioRecord::new(n, json.sn as u128, json.spn as u128)
}

impl Checkpoint {
    fn of_records(
        q: Base,
        p: &StudyPolynomial,
        range: &ScanRange,
        next_n: u128,
        table: &RecordTable,
    ) -> Result<Self> {
        let records = table
            .records()
            .iter()
            .map(|r| RecordJson::from_record(r, q, p, None))
            .collect::<Result<Vec<_>>>()?;
        Ok(Checkpoint {
            version: CHECKPOINT_VERSION,
            mode: CHECKPOINT_RECORDS.into(),
            q: q.get(),
            poly: p.to_string(),
            epsilon: None,
            lo: range.lo().to_string(),
            hi: range.hi().to_string(),
            next_n: next_n.to_string(),
            records,
        })
    }

    fn of_first_below(
        q: Base,
        p: &StudyPolynomial,
        epsilon: &BigRational,
        range: &ScanRange,
        next_n: u128,
    ) -> Result<Self> {
        Ok(Checkpoint {
            version: CHECKPOINT_VERSION,
            mode: CHECKPOINT_FIRST_BELOW.into(),
            q: q.get(),
            poly: p.to_string(),
            epsilon: Some(format!("{}/{}", epsilon.numer(), epsilon.denom())),
            lo: range.lo().to_string(),
            hi: range.hi().to_string(),
            next_n: next_n.to_string(),
            records: Vec::new(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_string_pretty(self)?)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    fn next_n(&self) -> Result<u128> {
        self.next_n
            .parse::<u128>()
            .map_err(|_| Error::Parse(format!("bad checkpoint position {:?}", self.next_n)))
    }

    fn validate(
        &self,
        mode: &str,
        q: Base,
        p: &StudyPolynomial,
        epsilon: Option<&BigRational>,
        range: &ScanRange,
    ) -> Result<()> {
        if self.version != CHECKPOINT_VERSION {
            return Err(Error::CheckpointMismatch(format!(
                "version {} (expected {CHECKPOINT_VERSION})",
                self.version
            )));
        }
        let expected_eps = epsilon.map(|e| format!("{}/{}", e.numer(), e.denom()));
        let mismatches = [
            (self.mode != mode, "mode"),
            (self.q != q.get(), "base"),
            (self.poly != p.to_string(), "polynomial"),
            (self.epsilon != expected_eps, "epsilon"),
            (self.lo != range.lo().to_string(), "range start"),
            (self.hi != range.hi().to_string(), "range end"),
        ];
        for (bad, what) in mismatches {
            if bad {
                return Err(Error::CheckpointMismatch(format!(
                    "checkpoint {what} does not match this invocation"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::parse_ratio;
    use rand::{Rng, SeedableRng};
    use std::str::FromStr;

    fn b(q: u64) -> Base {
        Base::new(q).unwrap()
    }

    fn study(s: &str) -> StudyPolynomial {
        StudyPolynomial::from_str(s).unwrap()
    }

    fn big(v: u128) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn ratio_record_examples() {
        let p = study("x^2");
        for k in [1u64, 7, 19] {
            let record = ratio_record(&p, b(2), &b(2).power(k)).unwrap();
            assert_eq!(record.ratio(), &BigRational::from_integer(1.into()));
        }
        let record = ratio_record(&p, b(10), &big(3)).unwrap();
        assert_eq!(record.ratio(), &BigRational::from_integer(3.into()));
        assert!(ratio_record(&study("2x^4+x-7"), b(2), &big(1)).is_err());
        assert!(ratio_record(&p, b(2), &BigUint::zero()).is_err());
    }

    #[test]
    fn fast_and_big_paths_agree_near_the_limit() {
        let p = study("x^2");
        let q = b(2);
        let limit = FastEval::new(&p).limit;
        assert!(limit > 1 << 62);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1_000_000 {
            let offset = rng.gen_range(0..(1u128 << 20));
            let n = if rng.gen_bool(0.5) {
                limit - offset
            } else {
                limit + offset
            };
            let nb = big(n);
            let fast = ratio_record(&p, q, &nb).unwrap();
            let slow = RatioRecord::compute(&p, q, &nb).unwrap();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn degenerate_range_yields_single_record() {
        let p = study("x^2");
        let range = ScanRange::new(big(5), big(6)).unwrap();
        let table = scan_records(&p, b(2), &range, &ScanOptions::default()).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table.records()[0].n(), &big(5));
    }

    #[test]
    fn scan_records_matches_sequential_reference() {
        let p = study("x^2");
        let q = b(2);
        let range = ScanRange::new(big(1), big(1 << 16)).unwrap();
        let table = scan_records(&p, q, &range, &ScanOptions::default()).unwrap();

        // Sequential oracle, computed independently via bignum arithmetic.
        let mut expected: Vec<(BigUint, BigRational)> = Vec::new();
        let mut best: Option<BigRational> = None;
        for v in 1u64..(1 << 16) {
            let n = BigUint::from(v);
            let record = RatioRecord::compute(&p, q, &n).unwrap();
            if best.as_ref().map_or(true, |b| record.ratio() < b) {
                best = Some(record.ratio().clone());
                expected.push((n, record.ratio().clone()));
            }
        }
        let got: Vec<(BigUint, BigRational)> = table
            .records()
            .iter()
            .map(|r| (r.n().clone(), r.ratio().clone()))
            .collect();
        assert_eq!(got, expected);
        for record in table.records() {
            record.reverify(&p, q).unwrap();
        }
        for pair in table.records().windows(2) {
            assert!(pair[0].ratio() > pair[1].ratio());
            assert!(pair[0].n() < pair[1].n());
        }
    }

    #[test]
    fn scan_records_is_partition_invariant() {
        let p = study("x^3");
        let q = b(2);
        let range = ScanRange::new(big(1), big(40_000)).unwrap();
        let len = 40_000u128;
        let reference = scan_records(
            &p,
            q,
            &range,
            &ScanOptions {
                block: len,
                ..ScanOptions::default()
            },
        )
        .unwrap();
        for partitions in [2u128, 4, 8] {
            let opts = ScanOptions {
                block: len.div_ceil(partitions),
                ..ScanOptions::default()
            };
            let table = scan_records(&p, q, &range, &opts).unwrap();
            assert_eq!(table.len(), reference.len(), "partitions = {partitions}");
            for (a, c) in table.records().iter().zip(reference.records()) {
                assert_eq!(a, c);
            }
        }
    }

    #[test]
    fn first_below_trivial_hit() {
        let p = study("x^2");
        let found =
            find_first_below(&p, b(2), &parse_ratio("2").unwrap(), &big(10), &ScanOptions::default())
                .unwrap();
        assert_eq!(found, Some(big(1)));
    }

    #[test]
    fn first_below_consistent_with_count() {
        let p = study("x^3");
        let q = b(2);
        let eps = parse_ratio("1").unwrap();
        let limit = big(1 << 22);
        let found = find_first_below(&p, q, &eps, &limit, &ScanOptions::default()).unwrap();
        assert_eq!(found, None);
        assert_eq!(count_below(&p, q, &eps, &limit).unwrap(), 0);
    }

    #[test]
    fn count_below_monotone() {
        let p = study("x^2");
        let q = b(2);
        let eps1 = parse_ratio("1").unwrap();
        let eps2 = parse_ratio("2").unwrap();
        let c_small = count_below(&p, q, &eps1, &big(1 << 12)).unwrap();
        let c_wide = count_below(&p, q, &eps2, &big(1 << 12)).unwrap();
        let c_far = count_below(&p, q, &eps1, &big(1 << 14)).unwrap();
        assert!(c_small <= c_wide);
        assert!(c_small <= c_far);
    }

    #[test]
    fn count_table_rows_are_cumulative() {
        let p = study("x^2");
        let rows = count_table(&p, b(2), &parse_ratio("2").unwrap(), &big(4096)).unwrap();
        assert!(!rows.is_empty());
        for pair in rows.windows(2) {
            assert!(pair[0].threshold < pair[1].threshold);
            assert!(pair[0].count <= pair[1].count);
        }
        let direct = count_below(&p, b(2), &parse_ratio("2").unwrap(), &big(4096)).unwrap();
        assert_eq!(rows.last().unwrap().count, direct);
    }

    #[test]
    fn average_digit_sum_closed_forms() {
        // Σ_{n<10} s_10(n) = 45, with h = 1 both sums agree.
        let (plain, powered) = average_digit_sum(b(10), &big(10), 1).unwrap();
        assert_eq!(plain, BigUint::from(45u32));
        assert_eq!(powered, BigUint::from(45u32));
        // Σ_{n<2^k} s_2(n) = k·2^(k−1).
        for k in [8u32, 12, 16] {
            let (plain, _) = average_digit_sum(b(2), &big(1 << k), 1).unwrap();
            assert_eq!(plain, BigUint::from(k as u64) << (k - 1));
        }
    }

    #[test]
    fn checkpoint_roundtrip_and_resume() {
        let p = study("x^2");
        let q = b(2);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.json");
        let range = ScanRange::new(big(1), big(1 << 14)).unwrap();
        let opts = ScanOptions {
            checkpoint: Some(path.clone()),
            checkpoint_every: 1 << 12,
            ..ScanOptions::default()
        };
        let full = scan_records(&p, q, &range, &opts).unwrap();
        assert!(path.exists());

        // Rewind the checkpoint to the first boundary (keeping exactly the
        // records found below it) and resume; the final table must agree.
        let mut cp = Checkpoint::load(&path).unwrap();
        cp.next_n = (1u64 << 12).to_string();
        cp.records
            .retain(|r| r.n.parse::<u64>().unwrap() < (1 << 12));
        cp.save(&path).unwrap();
        let resumed = scan_records(&p, q, &range, &opts).unwrap();
        assert_eq!(resumed.len(), full.len());
        for (a, c) in resumed.records().iter().zip(full.records()) {
            assert_eq!(a, c);
        }
    }

    #[test]
    fn checkpoint_rejects_mismatched_parameters() {
        let p = study("x^2");
        let q = b(2);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.json");
        let range = ScanRange::new(big(1), big(1 << 12)).unwrap();
        let opts = ScanOptions {
            checkpoint: Some(path.clone()),
            checkpoint_every: 1 << 10,
            ..ScanOptions::default()
        };
        scan_records(&p, q, &range, &opts).unwrap();
        let err = scan_records(&study("x^3"), q, &range, &opts).unwrap_err();
        assert!(matches!(err, Error::CheckpointMismatch(_)), "{err}");
        let err = scan_records(&p, b(3), &range, &opts).unwrap_err();
        assert!(matches!(err, Error::CheckpointMismatch(_)), "{err}");
        let other = ScanRange::new(big(1), big(1 << 11)).unwrap();
        let err = scan_records(&p, q, &other, &opts).unwrap_err();
        assert!(matches!(err, Error::CheckpointMismatch(_)), "{err}");
    }

    #[test]
    fn first_below_checkpoint_rejects_other_epsilon() {
        let p = study("x^3");
        let q = b(2);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("first.json");
        let opts = ScanOptions {
            checkpoint: Some(path.clone()),
            checkpoint_every: 1 << 10,
            ..ScanOptions::default()
        };
        let limit = big(1 << 12);
        assert_eq!(
            find_first_below(&p, q, &parse_ratio("1").unwrap(), &limit, &opts).unwrap(),
            None
        );
        let err =
            find_first_below(&p, q, &parse_ratio("1/2").unwrap(), &limit, &opts).unwrap_err();
        assert!(matches!(err, Error::CheckpointMismatch(_)), "{err}");
    }

    #[test]
    fn scan_skips_negative_values() {
        // 2x^4 + x − 7 is negative at n = 1 only; the scan must start its
        // record table at n = 2.
        let p = study("2x^4+x-7");
        let range = ScanRange::new(big(1), big(64)).unwrap();
        let table = scan_records(&p, b(2), &range, &ScanOptions::default()).unwrap();
        assert_eq!(table.records()[0].n(), &big(2));
    }
}
