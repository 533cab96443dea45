//! Cross-checks the harmonic engine against time-domain integration, both
//! closed-form and by brute-force sampling.
//!
//!     cargo run --release --example oracle_check -- [instances] [seed]

use std::env;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tmirs::oracle::max_relative_error;
use tmirs::{demod_exact, demod_sampled, verify_random_instances, OracleInstance};

fn main() -> tmirs::Result<()> {
    let mut args = env::args().skip(1);
    let n: usize = args.next().map_or(200, |s| s.parse().expect("instances"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));

    let summary = verify_random_instances(n, seed)?;
    println!(
        "{} random instances: max relative error engine vs exact = {:.3e}",
        summary.instances, summary.max_relative_error
    );

    // Sampled integration converges slowly: the error tracks 1/L.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = OracleInstance::random(&mut rng)?;
    let exact = demod_exact(&inst.geometry, &inst.ofdm, &inst.grid, &inst.direction, &inst.symbols)?;
    println!(
        "\ninstance: {}x{} surface, {} subcarriers, {:?}",
        inst.grid.rows(),
        inst.grid.cols(),
        inst.ofdm.n_subcarriers,
        inst.schedule.mode
    );
    let ns = inst.ofdm.n_subcarriers;
    for log2 in [10, 12, 14, 16] {
        let l = (1usize << log2) / ns * ns;
        let sampled =
            demod_sampled(&inst.geometry, &inst.ofdm, &inst.grid, &inst.direction, &inst.symbols, l)?;
        println!("  L = {l:>6}: sampled vs exact {:.3e}", max_relative_error(&sampled, &exact));
    }
    Ok(())
}
