//! Builds the subcarrier scrambling operator for a planar schedule and shows
//! that it is diagonal at the legitimate direction but not elsewhere.
//!
//!     cargo run --example scrambling_operator

use num_complex::Complex64;
use tmirs::{design_planar, scramble, scrambling_operator, Direction, OfdmConfig, SystemGeometry};

fn main() -> tmirs::Result<()> {
    let g = SystemGeometry::reference();
    let ofdm = OfdmConfig::default();
    let schedule = design_planar(&g, 0.7, 1)?;
    let grid = schedule.grid();

    for (label, dir) in [
        ("legit (40, 30)", g.legit_direction),
        ("(40, 35)", Direction::from_degrees(40.0, 35.0)?),
        ("(60, -20)", Direction::from_degrees(60.0, -20.0)?),
    ] {
        let op = scrambling_operator(&g, &ofdm, grid, &dir)?;
        let d0 = op.diagonal();
        let strongest = op
            .offsets()
            .filter(|&k| k != 0)
            .max_by(|&a, &b| op.coeff(a).norm().total_cmp(&op.coeff(b).norm()))
            .unwrap();
        println!(
            "{label:<16} coeff(0) = {:>9.3}  residual {:.2e}  strongest offset {strongest:+} ({:.3})",
            d0.norm(),
            op.offdiag_residual(),
            op.coeff(strongest).norm()
        );
    }

    // A single active subcarrier spreads over its neighbours off-axis.
    let mut d = vec![Complex64::new(0.0, 0.0); ofdm.n_subcarriers];
    d[10] = Complex64::new(1.0, 0.0);
    let op = scrambling_operator(&g, &ofdm, grid, &Direction::from_degrees(60.0, -20.0)?)?;
    let y = scramble(&op, &d)?;
    let spread: Vec<String> = y[6..15].iter().map(|v| format!("{:.1}", v.norm())).collect();
    println!("impulse on subcarrier 10 at (60, -20): |y[6..15]| = [{}]", spread.join(", "));
    Ok(())
}
