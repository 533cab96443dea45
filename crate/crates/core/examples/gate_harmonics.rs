//! Fourier series of one unit's on/off gate: magnitudes follow a sinc
//! envelope, the turn-on instant only rotates phases.
//!
//!     cargo run --example gate_harmonics -- [duration] [turn_on]

use std::env;

use tmirs::gate_fourier_coeff;

fn main() -> tmirs::Result<()> {
    let mut args = env::args().skip(1);
    let duration: f64 = args.next().map_or(0.7, |s| s.parse().expect("duration"));
    let turn_on: f64 = args.next().map_or(0.25, |s| s.parse().expect("turn_on"));

    println!("gate on at {turn_on}, for {duration} of the period");
    println!("   h      |G(h)|      arg G(h)");
    let mut energy = 0.0;
    for h in -8..=8 {
        let g = gate_fourier_coeff(h, turn_on, duration)?;
        energy += g.norm_sqr();
        println!("{h:>4}  {:>10.6}  {:>+10.4}", g.norm(), g.arg());
    }
    // Parseval: the full series sums to the duty cycle.
    println!("sum |G(h)|^2 over |h| <= 8: {energy:.6} (limit {duration})");

    // Wrapping past the end of the period changes nothing.
    let a = gate_fourier_coeff(3, 0.8, 0.5)?;
    let b = gate_fourier_coeff(3, -0.2, 0.5)?;
    println!("wrap check: |G(0.8) - G(-0.2)| = {:.2e}", (a - b).norm());
    Ok(())
}
