//! Growth bounds in both directions: how large s_q(p(n))/s_q(n) can get and
//! a construction that attains a large ratio.
//!
//! Run with: cargo run --example growth_bounds

use num_bigint::BigUint;
use polydigit::bounds::{
    lower_bound_witness, negative_coeff_lower_bound, poly_digit_sum_upper, ratio_upper_bound,
};
use polydigit::search::ratio_record;
use polydigit::{Base, StudyPolynomial};

fn main() -> polydigit::Result<()> {
    let q = Base::new(2)?;
    let square: StudyPolynomial = "x^2".parse()?;

    // Upper bound at a single point, both sides printed.
    let n = BigUint::from(1_234_567u64);
    let record = ratio_record(&square, q, &n)?;
    let cap = poly_digit_sum_upper(&square, &n, q)?;
    let bound = ratio_upper_bound(&square, &n, q)?;
    println!("n = {n}: s_2(n^2) = {} <= {cap}", record.spn());
    println!("ratio {} <= {bound}", record.ratio());

    // Lower direction: a distinct-sum set pins many noninterfering blocks.
    let witness = lower_bound_witness(&square, q, 5)?;
    println!(
        "distinct-sum set {:?} (block spacing {})",
        witness.bh.elements(),
        witness.bh.modulus()
    );
    println!(
        "s_2(n) = {}, s_2(n^2) = {} >= {} blocks -> ratio >= {}",
        witness.record.sn(),
        witness.record.spn(),
        witness.block_count,
        witness.ratio_floor()
    );

    // Negative coefficients force ratio growth ~ (q−1)·k along n = q^k.
    let p: StudyPolynomial = "x^2-1".parse()?;
    for k in [10u64, 20, 40] {
        let bound = negative_coeff_lower_bound(&p, q, k)?;
        let at = ratio_record(&p, q, &q.power(k))?;
        println!(
            "k = {k}: s_2(p(2^{k})) = {} >= {bound}, ratio = {}",
            at.spn(),
            at.ratio()
        );
    }
    Ok(())
}
