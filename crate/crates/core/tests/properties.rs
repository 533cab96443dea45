use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tmirs::oracle::max_relative_error;
use tmirs::{
    demod_exact, design, gate_fourier_coeff, scrambling_operator, DesignMode, Direction,
    Equalizer, LineOrientation, LinearOptions, LinkConfig, LinkSimulator, OfdmConfig,
    OracleInstance, SystemGeometry, TmSchedule,
};

fn small_geometry(rows: usize, cols: usize) -> SystemGeometry {
    let mut g = SystemGeometry::reference();
    g.irs_rows = rows;
    g.irs_cols = cols;
    g
}

fn any_mode() -> impl Strategy<Value = DesignMode> {
    prop_oneof![
        Just(DesignMode::Linear {
            orientation: LineOrientation::Column,
            options: LinearOptions::default()
        }),
        Just(DesignMode::Linear {
            orientation: LineOrientation::Row,
            options: LinearOptions::uniform_lines(0.6)
        }),
        (0.05f64..=1.0).prop_map(|duration| DesignMode::Planar { duration }),
        (1usize..4, 2usize..5).prop_map(|(hop_period, n_hops)| DesignMode::Enhanced {
            orientation: LineOrientation::Column,
            hop_period,
            n_hops,
            duration_range: (0.3, 0.9),
        }),
    ]
}

fn direction() -> impl Strategy<Value = Direction> {
    (0.0f64..=90.0, -180.0f64..180.0).prop_map(|(t, p)| Direction::from_degrees(t, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn engine_matches_time_domain(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = OracleInstance::random(&mut rng).unwrap();
        let err = inst.engine_vs_exact().unwrap();
        prop_assert!(err < 1e-9, "relative error {err:e}");
    }

    #[test]
    fn operator_is_toeplitz(
        rows in 2usize..6, cols in 2usize..6, ns in 2usize..12,
        mode in any_mode(), dir in direction(), seed in any::<u64>(),
    ) {
        let g = small_geometry(rows, cols);
        let ofdm = OfdmConfig::new(ns, 120e3, 24e9, 1).unwrap();
        let schedule = design(&g, &mode, seed).unwrap();
        let op = scrambling_operator(&g, &ofdm, schedule.grid(), &dir).unwrap();
        let dense = op.to_dense();
        for i in 0..ns {
            for s in 0..ns {
                let want = op.coeff(i as i64 - s as i64);
                prop_assert_eq!(dense[i][s], want);
            }
        }
        // applying the operator is a matrix-vector product
        let d: Vec<Complex64> = (0..ns).map(|k| Complex64::new(k as f64, 1.0 - k as f64)).collect();
        let y = op.apply(&d).unwrap();
        let direct: Vec<Complex64> = dense
            .iter()
            .map(|row| row.iter().zip(&d).map(|(c, x)| c * x).sum())
            .collect();
        prop_assert!(max_relative_error(&y, &direct) < 1e-12);
    }

    #[test]
    fn wrapped_gate_splits_into_two_pieces(h in -40i64..40, on in 0.0f64..1.0, dur in 0.0f64..=1.0) {
        prop_assume!(on + dur > 1.0);
        let whole = gate_fourier_coeff(h, on, dur).unwrap();
        let tail = gate_fourier_coeff(h, on, 1.0 - on).unwrap();
        let head = gate_fourier_coeff(h, 0.0, on + dur - 1.0).unwrap();
        prop_assert!((whole - tail - head).norm() < 1e-12);
    }

    #[test]
    fn wrapped_gates_match_oracle(on in 0.5f64..1.0, dur in 0.3f64..1.0, dir in direction()) {
        // every unit wraps past the end of the period
        let g = small_geometry(2, 3);
        let ofdm = OfdmConfig::new(6, 120e3, 24e9, 1).unwrap();
        let schedule = design(&g, &DesignMode::Planar { duration: dur }, 9).unwrap();
        let units = schedule
            .grid()
            .units()
            .iter()
            .map(|u| tmirs::UnitTmParams::new((on + u.turn_on) % 1.0, dur, u.weight).unwrap())
            .collect();
        let grid = tmirs::TmGrid::new(2, 3, units).unwrap();
        let d: Vec<Complex64> = (0..6).map(|k| Complex64::from_polar(1.0, k as f64)).collect();
        let exact = demod_exact(&g, &ofdm, &grid, &dir, &d).unwrap();
        let engine = scrambling_operator(&g, &ofdm, &grid, &dir).unwrap().apply(&d).unwrap();
        prop_assert!(max_relative_error(&engine, &exact) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn simulation_is_deterministic(mode in any_mode(), dir in direction(), seed in any::<u64>(), stream in any::<u64>()) {
        let g = small_geometry(4, 4);
        let ofdm = OfdmConfig::new(16, 120e3, 24e9, 16).unwrap();
        let schedule = design(&g, &mode, seed).unwrap();
        let link = LinkConfig::new(Some(0.0), Equalizer::GenieDiagonal, seed).unwrap();
        let a = LinkSimulator::new(&g, &ofdm, &schedule, &link).unwrap().simulate(&dir, stream);
        let b = LinkSimulator::new(&g, &ofdm, &schedule, &link).unwrap().simulate(&dir, stream);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn ber_ignores_global_weight_phase(angle in -3.1f64..3.1, dir in direction(), seed in any::<u64>()) {
        let g = small_geometry(4, 4);
        let ofdm = OfdmConfig::new(16, 120e3, 24e9, 16).unwrap();
        let schedule = design(&g, &DesignMode::Planar { duration: 0.7 }, seed).unwrap();
        let rotated = TmSchedule::fixed(
            schedule.mode,
            schedule.grid().rotate_weights(Complex64::from_polar(1.0, angle)),
            schedule.seed,
        );
        let link = LinkConfig::new(None, Equalizer::GenieDiagonal, 5).unwrap();
        let a = LinkSimulator::new(&g, &ofdm, &schedule, &link).unwrap().simulate(&dir, 3);
        let b = LinkSimulator::new(&g, &ofdm, &rotated, &link).unwrap().simulate(&dir, 3);
        prop_assert_eq!(a.bit_errors, b.bit_errors);
    }
}

#[test]
fn noiseless_diagonal_directions_are_error_free() {
    let g = small_geometry(6, 6);
    let ofdm = OfdmConfig::new(32, 120e3, 24e9, 8).unwrap();
    let schedule = design(&g, &DesignMode::Planar { duration: 1.0 }, 2).unwrap();
    let link = LinkConfig::new(None, Equalizer::GenieDiagonal, 1).unwrap();
    let sim = LinkSimulator::new(&g, &ofdm, &schedule, &link).unwrap();
    for (t, p) in [(0.0, 0.0), (30.0, 60.0), (75.0, -120.0)] {
        let e = sim.simulate(&Direction::from_degrees(t, p).unwrap(), 0);
        assert_eq!(e.bit_errors, 0, "at ({t}, {p})");
    }
}
