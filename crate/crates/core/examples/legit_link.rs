//! QPSK over OFDM through a planar TM-IRS: clean at the legitimate user,
//! scrambled a few degrees away.
//!
//!     cargo run --release --example legit_link -- [snr_db]

use std::env;

use tmirs::{
    design_planar, theoretical_legit_gain, Direction, Equalizer, LinkConfig, LinkSimulator,
    OfdmConfig, SystemGeometry,
};

fn main() -> tmirs::Result<()> {
    let snr_db: f64 = env::args().nth(1).map_or(0.0, |s| s.parse().expect("snr_db"));
    let g = SystemGeometry::reference();
    let ofdm = OfdmConfig::default();
    let schedule = design_planar(&g, 0.7, 1)?;
    println!(
        "legit gain {:.1}, {} symbols x {} subcarriers, {snr_db} dB",
        theoretical_legit_gain(&g, schedule.grid())?.norm(),
        ofdm.n_symbols,
        ofdm.n_subcarriers
    );

    for equalizer in [Equalizer::GenieDiagonal, Equalizer::LegitGain] {
        let link = LinkConfig::new(Some(snr_db), equalizer, 42)?;
        let sim = LinkSimulator::new(&g, &ofdm, &schedule, &link)?;
        println!("\n{equalizer:?}");
        for (theta, phi) in [(40.0, 30.0), (40.0, 32.0), (42.0, 30.0), (40.0, 40.0), (20.0, -45.0)] {
            let est = sim.simulate(&Direction::from_degrees(theta, phi)?, 0);
            println!(
                "  ({theta:>4}, {phi:>5})  BER {:.3e}  ({} / {})",
                est.ber, est.bit_errors, est.bits_total
            );
        }
    }
    Ok(())
}
