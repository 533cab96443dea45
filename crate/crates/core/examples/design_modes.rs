//! Designs every schedule mode for the reference surface and prints the
//! cancellation report at the legitimate direction.
//!
//!     cargo run --example design_modes

use tmirs::{
    design, validate_schedule, DesignMode, LineOrientation, LinearOptions, OfdmConfig,
    SystemGeometry,
};

fn main() -> tmirs::Result<()> {
    let g = SystemGeometry::reference();
    let ofdm = OfdmConfig::default();
    let column = LineOrientation::Column;
    let modes = [
        DesignMode::Linear { orientation: column, options: LinearOptions::uniform_lines(0.7) },
        DesignMode::Linear { orientation: LineOrientation::Row, options: LinearOptions::default() },
        DesignMode::Planar { duration: 0.7 },
        DesignMode::Enhanced {
            orientation: column,
            hop_period: 256,
            n_hops: 64,
            duration_range: (0.3, 0.9),
        },
        DesignMode::Planar { duration: 1.0 },
    ];

    for mode in modes {
        let schedule = design(&g, &mode, 7)?;
        let report = validate_schedule(&g, &ofdm, &schedule)?;
        let first = schedule.grid();
        println!("{:?}", mode);
        println!(
            "  unit (0,0): on {:.4} for {:.3}; unit (0,1): on {:.4} for {:.3}",
            first.get(0, 0).turn_on,
            first.get(0, 0).duration,
            first.get(0, 1).turn_on,
            first.get(0, 1).duration
        );
        println!(
            "  hops {:>2}  |coeff(0)| >= {:.1}  residual {:.2e}  outside structure {:.2e}  offsets {:?}  {}",
            report.hops_checked,
            report.min_diagonal_magnitude,
            report.max_offdiag_residual,
            report.max_nonstructural_residual,
            report.surviving_offsets,
            if report.cancellation_ok() { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}
