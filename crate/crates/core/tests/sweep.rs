use tmirs::{run_sweep, AngleRange, DesignMode, Equalizer, LinkConfig, SweepSpec};

fn planar(seed: u64, symbols: usize) -> SweepSpec {
    let link = LinkConfig::new(Some(0.0), Equalizer::GenieDiagonal, seed).unwrap();
    let mut spec = SweepSpec::reference(DesignMode::Planar { duration: 0.7 }, link);
    spec.ofdm.n_symbols = symbols;
    spec
}

#[test]
fn planar_minimum_sits_at_legit_user() {
    let mut spec = planar(1, 64);
    spec.theta_deg = AngleRange::new(0.0, 90.0, 2.0);
    spec.phi_deg = AngleRange::new(-90.0, 90.0, 2.0);
    let map = run_sweep(&spec).unwrap().map;
    let min = map.estimates.iter().map(|e| e.ber).fold(f64::INFINITY, f64::min);
    // the minimum is attained (possibly among ties) within one step of (40, 30)
    let near = map
        .points()
        .filter(|(_, _, e)| e.ber == min)
        .any(|(t, p, _)| (t - 40.0).abs() <= 2.0 && (p - 30.0).abs() <= 2.0);
    assert!(near, "minimum BER {min} not attained next to the legit user");
}

#[test]
fn single_point_at_legit_user() {
    let mut spec = planar(3, 1024);
    spec.theta_deg = AngleRange::new(40.0, 40.0, 1.0);
    spec.phi_deg = AngleRange::new(30.0, 30.0, 1.0);
    let map = run_sweep(&spec).unwrap().map;
    assert_eq!(map.estimates.len(), 1);
    assert!(map.estimates[0].ber < 1e-4);
    assert_eq!(map.estimates[0].bits_total, 1024 * 64 * 2);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let mut spec = planar(5, 8);
    spec.theta_deg = AngleRange::new(20.0, 60.0, 10.0);
    spec.phi_deg = AngleRange::new(0.0, 60.0, 15.0);
    let parallel = run_sweep(&spec).unwrap().map.to_csv();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| run_sweep(&spec).unwrap().map.to_csv());
    assert_eq!(parallel, serial);
}
