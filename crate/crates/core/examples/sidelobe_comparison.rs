//! Counts low-BER "leak" directions outside a cap around the legitimate user
//! for each design mode on a 2-degree grid.
//!
//!     cargo run --release --example sidelobe_comparison -- [symbols] [seed] [genie|legit]

use std::env;

use tmirs::{
    run_sweep, AngleRange, BerMap, DesignMode, Direction, Equalizer, LineOrientation, LinearOptions,
    LinkConfig, SweepSpec,
};

const CAP_RADIUS_DEG: f64 = 5.0;
const LEAK_BER: f64 = 0.1;

fn leaks(map: &BerMap, legit: &Direction) -> (usize, usize) {
    let mut off_cap = 0;
    let mut low = 0;
    for (t, p, e) in map.points() {
        let dir = Direction::from_degrees(t, p).unwrap();
        if dir.angular_distance(legit).to_degrees() <= CAP_RADIUS_DEG {
            continue;
        }
        off_cap += 1;
        if e.ber < LEAK_BER {
            low += 1;
        }
    }
    (low, off_cap)
}

fn main() -> tmirs::Result<()> {
    let mut args = env::args().skip(1);
    let symbols: usize = args.next().map_or(1024, |s| s.parse().expect("symbols"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    let equalizer = match args.next().as_deref() {
        Some("legit") => Equalizer::LegitGain,
        _ => Equalizer::GenieDiagonal,
    };

    let hop_period = 256;
    let modes = [
        (
            "static linear (common 0.7)",
            DesignMode::Linear {
                orientation: LineOrientation::Column,
                options: LinearOptions::uniform_lines(0.7),
            },
        ),
        (
            "static linear (random)",
            DesignMode::Linear {
                orientation: LineOrientation::Column,
                options: LinearOptions::default(),
            },
        ),
        (
            "static linear row (0.7)",
            DesignMode::Linear {
                orientation: LineOrientation::Row,
                options: LinearOptions::uniform_lines(0.7),
            },
        ),
        ("planar", DesignMode::Planar { duration: 0.7 }),
        (
            "enhanced linear",
            DesignMode::Enhanced {
                orientation: LineOrientation::Column,
                hop_period,
                n_hops: symbols.div_ceil(hop_period),
                duration_range: (0.3, 0.9),
            },
        ),
    ];

    let link = LinkConfig::new(Some(0.0), equalizer, seed)?;
    println!("{symbols} symbols per point, seed {seed}, 0 dB, {equalizer:?}");
    for (name, mode) in modes {
        let mut spec = SweepSpec::reference(mode, link);
        spec.ofdm.n_symbols = symbols;
        spec.theta_deg = AngleRange::new(0.0, 90.0, 2.0);
        spec.phi_deg = AngleRange::new(-90.0, 90.0, 2.0);
        let out = run_sweep(&spec)?;
        let legit = spec.geometry.legit_direction;
        let (low, total) = leaks(&out.map, &legit);
        let at_legit = tmirs::simulate_direction(
            &spec.geometry,
            &spec.ofdm,
            &out.schedule,
            &legit,
            &link,
            u64::MAX,
        )?;
        println!(
            "{name:<28} leaks {low:>5}/{total} ({:.4})  legit BER {:.2e}  {:.1}s",
            low as f64 / total as f64,
            at_legit.ber,
            out.map.metadata.runtime_s
        );
    }
    Ok(())
}
