//! Steering phases of the reference surface and the array-factor cut through
//! the legitimate direction.
//!
//!     cargo run --example array_factor

use num_complex::Complex64;
use tmirs::{array_factor, transmit_gain, Direction, SystemGeometry};

fn main() -> tmirs::Result<()> {
    let g = SystemGeometry::reference();
    let legit = g.legit_direction;
    println!(
        "{}x{} units, lambda = {:.3} mm, transmit gain beta*K = {}",
        g.irs_rows,
        g.irs_cols,
        g.carrier_wavelength * 1e3,
        transmit_gain(&g)
    );

    for (m, n) in [(0, 0), (0, 1), (1, 0), (15, 15)] {
        let a = array_factor(&g, m, n, &legit)?;
        println!("a[{m},{n}] at legit = {:.4} (phase {:+.3} rad)", a, a.arg());
    }

    // Phase-aligned sum over the surface, normalized to 1 at the legit direction.
    let weights: Vec<Complex64> = (0..g.n_units())
        .map(|k| array_factor(&g, k / g.irs_cols, k % g.irs_cols, &legit).map(|a| a.conj()))
        .collect::<tmirs::Result<_>>()?;
    println!("\nphi = 30 deg cut");
    println!("theta   |AF|/MN");
    for theta in (0..=90).step_by(5) {
        let dir = Direction::from_degrees(theta as f64, 30.0)?;
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, w) in weights.iter().enumerate() {
            sum += w * array_factor(&g, k / g.irs_cols, k % g.irs_cols, &dir)?;
        }
        let level = sum.norm() / g.n_units() as f64;
        println!("{theta:>5}   {level:.4} {}", "#".repeat((level * 40.0) as usize));
    }
    Ok(())
}
