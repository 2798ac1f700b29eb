//! The degree-4 carrier polynomial m·x^4 + m·x^3 − x^2 + m·x + m.
//!
//! Its value at q^k has digit sum (q−1)k + s_q(m−1) + 3·s_q(m), growing with
//! k, while every fixed power has digit sum independent of k. This example
//! prints both effects.
//!
//! Run with: cargo run --example construction_polynomial

use num_bigint::{BigInt, BigUint};
use polydigit::digitsum::{digit_sum, Base};
use polydigit::intpoly::{carrier, carrier_power_coeffs};
use polydigit::witness::{carrier_digit_sum, carrier_value};

fn main() -> polydigit::Result<()> {
    let q = Base::new(2)?;
    let m = BigUint::from(3u32);

    let t = carrier(&BigInt::from(3))?;
    println!("carrier at m = 3: {t}");

    let cubed = carrier_power_coeffs(&BigInt::from(3), 3)?;
    println!(
        "cube coefficients: {:?}",
        cubed.iter().map(|c| c.to_string()).collect::<Vec<_>>()
    );
    let peak = cubed.iter().map(|c| c.magnitude()).max().unwrap();
    println!("peak coefficient {peak} (so blocks split once 2^k > {peak})");

    // Digit sum of the value grows linearly in k...
    for k in [8u64, 16, 32, 44] {
        println!("s_2(carrier_3(2^{k})) = {}", carrier_digit_sum(q, &m, k)?);
    }
    // ...while the digit sum of its cube freezes at 50.
    for k in [8u64, 16, 32, 44] {
        let v = carrier_value(&m, &q.power(k));
        let cube = (&v * &v) * &v;
        println!("s_2(carrier_3(2^{k})^3) = {}", digit_sum(&cube, q));
    }
    Ok(())
}
