//! How often is the ratio small? One witness per admissible multiplier with
//! a fixed digit count gives at least N^α values below N, for an explicit
//! rational α.
//!
//! Run with: cargo run --example density_family

use polydigit::digitsum::digit_length;
use polydigit::witness::{density_family, parse_ratio};
use polydigit::{Base, StudyPolynomial};

fn main() -> polydigit::Result<()> {
    let p: StudyPolynomial = "x^2".parse()?;
    let q = Base::new(2)?;
    let epsilon = parse_ratio("1")?;

    let family = density_family(&p, q, &epsilon, 6)?;
    println!(
        "multipliers with 6 binary digits: {} members at k0 = {} (closed form {})",
        family.count(),
        family.k0,
        family.k0_closed_form
    );
    println!("alpha = {}", family.alpha);

    let total_digits = 4 * family.k0 + family.digits;
    println!(
        "every member has exactly {total_digits} binary digits, so N = 2^{total_digits}"
    );
    println!(
        "count {} >= N^alpha: {}",
        family.count(),
        family.family_size_bound_holds()?
    );

    for record in family.records.iter().take(3) {
        println!(
            "  ratio {}  ({} digits)",
            record.ratio(),
            digit_length(record.n(), q)
        );
    }
    println!("  ... ({} members total, all below epsilon)", family.count());
    Ok(())
}
