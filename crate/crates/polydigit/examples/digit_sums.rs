//! Base-q expansions, digit sums, and the exact splitting identities.
//!
//! Run with: cargo run --example digit_sums

use num_bigint::BigUint;
use polydigit::digitsum::{
    carry_count, digit_sum, to_digits, verify_split_neg, verify_split_pos, Base,
};

fn main() -> polydigit::Result<()> {
    let two = Base::new(2)?;
    let ten = Base::new(10)?;

    let n = BigUint::from(225u32);
    let digits = to_digits(&n, two);
    println!("225 in base 2 (LSB first): {:?}", digits.digits());
    println!("s_2(225) = {}", digit_sum(&n, two));
    println!("s_10(225) = {}", digit_sum(&n, ten));

    // Strong q-additivity: gluing digit blocks adds digit sums.
    let a = BigUint::from(3u32);
    let b = BigUint::from(225u32);
    let glued = &a * two.power(8) + &b;
    println!(
        "s_2(3·2^8 + 225) = {} = s_2(3) + s_2(225) = {}",
        digit_sum(&glued, two),
        verify_split_pos(&a, &b, 8, two)?
    );

    // The subtractive identity walks through a borrow chain exactly.
    println!(
        "s_2(3·2^4 − 5) = {} (identity value, checked against the expansion)",
        verify_split_neg(&a, &BigUint::from(5u32), 4, two)?
    );

    // Carry count: each carry in a + b costs q−1 in the digit sum.
    let x = BigUint::from(777u32);
    let y = BigUint::from(223u32);
    println!(
        "adding {x} + {y} in base 10 needs {} carries",
        carry_count(&x, &y, ten)
    );
    Ok(())
}
