//! Exhaustive scanning: record-low ratios, first value below a threshold,
//! counts and digit-sum averages. The scan is parallel and deterministic.
//!
//! Run with: cargo run --release --example record_search

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use polydigit::search::{
    average_digit_sum, count_below, find_first_below, scan_records, ScanOptions, ScanRange,
};
use polydigit::witness::parse_ratio;
use polydigit::{Base, StudyPolynomial};

fn main() -> polydigit::Result<()> {
    let p: StudyPolynomial = "x^2".parse()?;
    let q = Base::new(2)?;

    let range = ScanRange::new(BigUint::from(1u32), BigUint::from(1u64 << 16))?;
    let table = scan_records(&p, q, &range, &ScanOptions::default())?;
    println!("record-low ratios of s_2(n^2)/s_2(n) up to 2^16:");
    for record in table.records() {
        println!("  n = {:>6}  ratio = {}", record.n(), record.ratio());
    }

    // The cube keeps its ratio at 1 or above for a long time: no hit below
    // 2^24 (the first one is near 2^39).
    let cube: StudyPolynomial = "x^3".parse()?;
    let one = parse_ratio("1")?;
    let hit = find_first_below(&cube, q, &one, &BigUint::from(1u64 << 24), &ScanOptions::default())?;
    println!("first n < 2^24 with s_2(n^3) < s_2(n): {hit:?}");

    let below = count_below(&p, q, &one, &BigUint::from(1u64 << 20))?;
    println!("squares below ratio 1 up to 2^20: {below}");

    // On average s_q(n^h) is h times s_q(n).
    let (plain, squared) = average_digit_sum(q, &BigUint::from(1u64 << 20), 2)?;
    println!(
        "sum s_2(n) = {plain}, sum s_2(n^2) = {squared}, ratio {:.3}",
        squared.to_f64().unwrap() / plain.to_f64().unwrap()
    );
    Ok(())
}
