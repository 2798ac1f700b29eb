//! Build an explicit n with s_q(p(n))/s_q(n) below a target ε, with the
//! exact bound n < B·C^(1/ε), and emit the self-checking JSON certificate.
//!
//! Run with: cargo run --example small_ratio_witness

use polydigit::witness::{build_witness, choose_parameters, parse_ratio, RecordJson};
use polydigit::{Base, StudyPolynomial};

fn main() -> polydigit::Result<()> {
    let p: StudyPolynomial = "x^3".parse()?;
    let q = Base::new(2)?;
    let epsilon = parse_ratio("1")?;

    // Formula-driven parameters, then the smallest certified exponent.
    let params = choose_parameters(&p, q, &epsilon)?.tightened()?;
    println!(
        "p = {p}, q = {q}, epsilon = {epsilon}: b = {}, m = {}, k = {}",
        params.shift(),
        params.multiplier(),
        params.exponent()
    );
    println!(
        "cap: n < B·C^(1/eps) with B = {} and C of {} bits",
        params.bound_factor(),
        params.bound_base().bits()
    );

    let record = build_witness(&params)?;
    println!("witness: {record}");

    // The JSON line re-verifies from scratch: parse, recompute, compare.
    let json = RecordJson::from_record(&record, q, &p, Some(&params))?;
    let line = serde_json::to_string(&json).expect("serializable");
    println!("{line}");
    json.verify()?;
    println!("certificate re-verified");

    // A shifted example: negative coefficients force b > 0.
    let p: StudyPolynomial = "x^3-2x+5".parse()?;
    let params = choose_parameters(&p, q, &parse_ratio("1/2")?)?.tightened()?;
    let record = build_witness(&params)?;
    println!(
        "p = {p}: b = {}, m = {}, k = {}, ratio = {}",
        params.shift(),
        params.multiplier(),
        params.exponent(),
        record.ratio()
    );
    Ok(())
}
