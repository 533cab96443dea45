//! Sweeps BER over the angular plane and writes CSV, metadata and a PGM
//! heatmap (dark = low BER).
//!
//!     cargo run --release --example ber_map -- [out_dir] [step_deg]

use std::env;
use std::path::PathBuf;

use tmirs::{run_sweep, AngleRange, DesignMode, Equalizer, LinkConfig, SweepSpec};

fn main() -> tmirs::Result<()> {
    let mut args = env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| ".".into()));
    let step: f64 = args.next().map_or(2.0, |s| s.parse().expect("step_deg"));

    let link = LinkConfig::new(Some(0.0), Equalizer::GenieDiagonal, 1)?;
    let mut spec = SweepSpec::reference(DesignMode::Planar { duration: 0.7 }, link);
    spec.ofdm.n_symbols = 128;
    spec.theta_deg = AngleRange::new(0.0, 90.0, step);
    spec.phi_deg = AngleRange::new(-90.0, 90.0, step);

    let outcome = run_sweep(&spec)?;
    let map = &outcome.map;
    map.write_csv(&out.join("planar_ber.csv"))?;
    map.write_pgm(&out.join("planar_ber.pgm"))?;
    map.write_metadata(&out.join("planar_ber.json"))?;

    // several cells are usually error-free; report the one at the legit user
    let legit = map
        .points()
        .min_by(|a, b| {
            let da = (a.0 - 40.0).abs() + (a.1 - 30.0).abs();
            let db = (b.0 - 40.0).abs() + (b.1 - 30.0).abs();
            da.total_cmp(&db)
        })
        .unwrap();
    let zero = map.points().filter(|p| p.2.ber == 0.0).count();
    println!(
        "{}x{} grid in {:.1} s; BER {:.2e} at ({}, {}) next to the legit user; {zero} error-free points",
        map.rows(),
        map.cols(),
        map.metadata.runtime_s,
        legit.2.ber,
        legit.0,
        legit.1
    );
    println!("wrote planar_ber.{{csv,pgm,json}} to {}", out.display());
    Ok(())
}
