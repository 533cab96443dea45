//! Round-trips an enhanced (hopping) schedule through its JSON layout and
//! checks that hops are distinct.
//!
//!     cargo run --example schedule_json -- [path]

use std::env;

use tmirs::designer::ensure_distinct_hops;
use tmirs::{design_enhanced, LineOrientation, SystemGeometry, TmSchedule};

fn main() -> tmirs::Result<()> {
    let g = SystemGeometry::reference();
    let schedule = design_enhanced(&g, LineOrientation::Column, 256, 4, (0.3, 0.9), 3)?;
    let json = schedule.to_json(&g)?;

    if let Some(path) = env::args().nth(1) {
        std::fs::write(&path, &json).map_err(|source| tmirs::Error::Io { path: path.clone(), source })?;
        println!("wrote {path}");
    }

    let (g2, back) = TmSchedule::from_json(&json)?;
    assert_eq!(g2, g);
    assert_eq!(back, schedule);
    ensure_distinct_hops(back.hops())?;
    println!("{} bytes, {} hops every {:?} symbols", json.len(), back.hops().len(), back.hop_period());
    for symbol in [0, 255, 256, 1023, 1024] {
        let grid = back.grid_for_symbol(symbol);
        println!(
            "symbol {symbol:>4} -> hop {} (column 0 duration {:.4})",
            back.grid_index(symbol),
            grid.get(0, 0).duration
        );
    }
    Ok(())
}
