//! End-to-end acceptance checks. Every criterion prints one PASS/FAIL line;
//! the test fails at the end if any criterion failed.
//!
//! Full scale (criterion 5 runs two 2^14-symbol sweeps) takes roughly
//! 15 minutes on one core; build with optimizations.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tmirs::{
    design_linear, design_planar, run_sweep, scrambling_operator, verify_random_instances,
    AngleRange, BerMap, DesignMode, Direction, Equalizer, LineOrientation, LinearOptions,
    LinkConfig, LinkSimulator, OfdmConfig, SweepSpec, SystemGeometry, TmGrid, TmSchedule,
    UnitTmParams,
};

const SEED: u64 = 1;
const CAP_DEG: f64 = 5.0;
const LEAK_BER: f64 = 0.1;

struct Report {
    failed: Vec<u32>,
}

impl Report {
    fn record(&mut self, id: u32, name: &str, pass: bool, detail: String) {
        println!("[{}] criterion {id}: {name} -- {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(id);
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

fn table1() -> (SystemGeometry, OfdmConfig) {
    (SystemGeometry::reference(), OfdmConfig::new(64, 120e3, 24e9, 1024).unwrap())
}

fn static_linear() -> DesignMode {
    DesignMode::Linear {
        orientation: LineOrientation::Column,
        options: LinearOptions::uniform_lines(0.7),
    }
}

fn grid_spec(mode: DesignMode, seed: u64, symbols: usize) -> SweepSpec {
    let link = LinkConfig::new(Some(0.0), Equalizer::GenieDiagonal, seed).unwrap();
    let mut spec = SweepSpec::reference(mode, link);
    spec.ofdm.n_symbols = symbols;
    spec.theta_deg = AngleRange::new(0.0, 90.0, 2.0);
    spec.phi_deg = AngleRange::new(-90.0, 90.0, 2.0);
    spec
}

/// Unit vector from degrees, written out independently of the library.
fn unit(theta_deg: f64, phi_deg: f64) -> [f64; 3] {
    let (t, p) = (theta_deg.to_radians(), phi_deg.to_radians());
    [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
}

fn off_cap_bers(map: &BerMap) -> Vec<f64> {
    let legit = unit(40.0, 30.0);
    map.points()
        .filter(|(t, p, _)| {
            let u = unit(*t, *p);
            let dot: f64 = u.iter().zip(&legit).map(|(a, b)| a * b).sum();
            dot.clamp(-1.0, 1.0).acos().to_degrees() > CAP_DEG
        })
        .map(|(_, _, e)| e.ber)
        .collect()
}

fn leak_count(bers: &[f64], threshold: f64) -> usize {
    bers.iter().filter(|&&b| b < threshold).count()
}

fn legit_ber(spec: &SweepSpec, schedule: &TmSchedule) -> f64 {
    LinkSimulator::new(&spec.geometry, &spec.ofdm, schedule, &spec.link)
        .unwrap()
        .simulate(&spec.geometry.legit_direction, u64::MAX)
        .ber
}

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    let summary = verify_random_instances(256, SEED).unwrap();
    let secs = start.elapsed().as_secs_f64();
    r.record(
        1,
        "oracle equivalence",
        summary.instances >= 200 && summary.max_relative_error < 1e-9 && secs < 60.0,
        format!(
            "{} instances, max rel err {:.2e} (< 1e-9), {secs:.1} s (< 60 s)",
            summary.instances, summary.max_relative_error
        ),
    );
}

fn criterion_2(r: &mut Report) {
    let start = Instant::now();
    let (g, ofdm) = table1();
    let schedule = design_planar(&g, 0.7, SEED).unwrap();
    let op = scrambling_operator(&g, &ofdm, schedule.grid(), &g.legit_direction).unwrap();
    // beta * K * M * N * dtau
    let expected = 1.0 * 8.0 * 16.0 * 16.0 * 0.7;
    let diag_err = (op.diagonal() - Complex64::new(expected, 0.0)).norm();
    let residual = op.offdiag_residual();
    let link = LinkConfig::new(Some(0.0), Equalizer::GenieDiagonal, SEED).unwrap();
    let ber = LinkSimulator::new(&g, &ofdm, &schedule, &link)
        .unwrap()
        .simulate(&g.legit_direction, 0)
        .ber;
    r.record(
        2,
        "planar legit preservation",
        residual < 1e-10 && diag_err <= 1e-6 && ber < 1e-4,
        format!(
            "residual {residual:.2e} (< 1e-10), diagonal {:.9} (1433.6 +- 1e-6), BER {ber:.2e} (< 1e-4), {:.1} s",
            op.diagonal().re,
            start.elapsed().as_secs_f64()
        ),
    );
}

fn criterion_3(r: &mut Report) {
    let (g, ofdm) = table1();
    let dtau = 0.7;
    let schedule = design_linear(
        &g,
        LineOrientation::Column,
        &LinearOptions::uniform_lines(dtau),
        SEED,
    )
    .unwrap();
    let op = scrambling_operator(&g, &ofdm, schedule.grid(), &g.legit_direction).unwrap();
    let d0 = op.diagonal().norm();
    let mut worst_other = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    for k in op.offsets().filter(|&k| k != 0) {
        let ratio = op.coeff(k).norm() / d0;
        if k % 16 == 0 {
            worst_excess = worst_excess.max(ratio - sinc(k as f64 * PI * dtau).abs());
        } else {
            worst_other = worst_other.max(ratio);
        }
    }
    let link = LinkConfig::new(Some(0.0), Equalizer::GenieDiagonal, SEED).unwrap();
    let ber = LinkSimulator::new(&g, &ofdm, &schedule, &link)
        .unwrap()
        .simulate(&g.legit_direction, 0)
        .ber;
    r.record(
        3,
        "linear structural residual",
        worst_other < 1e-10 && worst_excess <= 1e-12 && ber < 1e-3,
        format!(
            "max rel coeff off multiples of 16 {worst_other:.2e} (< 1e-10), \
             max |c(k)|/|c(0)| - |sinc(k pi dtau)| at k = +-16,32,48: {worst_excess:.2e} (<= 1e-12), \
             BER {ber:.2e} (< 1e-3)"
        ),
    );
}

/// Criteria 4 and 7. Static linear leakage depends strongly on the drawn
/// turn-on order, so the mode comparison averages over five design seeds;
/// the seed-1 pair is rerun for the determinism check.
fn criteria_4_and_7(r: &mut Report) {
    let start = Instant::now();
    let seeds = 1..=5u64;
    let mut planar_total = 0.0;
    let mut linear_total = 0.0;
    let mut per_seed = Vec::new();
    let mut first_csv = None;
    for seed in seeds.clone() {
        let planar = run_sweep(&grid_spec(DesignMode::Planar { duration: 0.7 }, seed, 1024)).unwrap();
        let linear = run_sweep(&grid_spec(static_linear(), seed, 1024)).unwrap();
        let p_bers = off_cap_bers(&planar.map);
        let l_bers = off_cap_bers(&linear.map);
        let pf = leak_count(&p_bers, LEAK_BER) as f64 / p_bers.len() as f64;
        let lf = leak_count(&l_bers, LEAK_BER) as f64 / l_bers.len() as f64;
        planar_total += pf;
        linear_total += lf;
        per_seed.push(format!("{seed}: {pf:.4}/{lf:.4}"));
        if seed == SEED {
            first_csv = Some((planar.map.to_csv(), linear.map.to_csv()));
        }
    }
    let n = seeds.count() as f64;
    let (planar_mean, linear_mean) = (planar_total / n, linear_total / n);
    r.record(
        4,
        "planar scrambles more than static linear",
        planar_mean < linear_mean,
        format!(
            "off-cap fraction with BER < 0.1, mean over seeds: planar {planar_mean:.4} vs linear {linear_mean:.4} (need planar < linear) \
             [seed: planar/linear {}], {:.0} s",
            per_seed.join(", "),
            start.elapsed().as_secs_f64()
        ),
    );

    let (planar_csv, linear_csv) = first_csv.unwrap();
    let again_planar = run_sweep(&grid_spec(DesignMode::Planar { duration: 0.7 }, SEED, 1024)).unwrap();
    let again_linear = run_sweep(&grid_spec(static_linear(), SEED, 1024)).unwrap();
    let same = again_planar.map.to_csv() == planar_csv && again_linear.map.to_csv() == linear_csv;
    r.record(
        7,
        "determinism",
        same,
        format!(
            "seed-{SEED} planar and linear sweeps rerun: CSV {} ({} bytes)",
            if same { "byte-identical" } else { "DIFFERS" },
            planar_csv.len() + linear_csv.len()
        ),
    );
}

fn criterion_5(r: &mut Report) {
    let start = Instant::now();
    let symbols = 1 << 14;
    let hop_period = 256;
    let enhanced = DesignMode::Enhanced {
        orientation: LineOrientation::Column,
        hop_period,
        n_hops: symbols / hop_period,
        duration_range: (0.3, 0.9),
    };
    let base_spec = grid_spec(static_linear(), SEED, symbols);
    let enh_spec = grid_spec(enhanced, SEED, symbols);
    let base = run_sweep(&base_spec).unwrap();
    let enh = run_sweep(&enh_spec).unwrap();
    let b_bers = off_cap_bers(&base.map);
    let e_bers = off_cap_bers(&enh.map);
    let (b, e) = (leak_count(&b_bers, LEAK_BER), leak_count(&e_bers, LEAK_BER));
    let legit = legit_ber(&enh_spec, &enh.schedule);
    let profile: Vec<String> = [1e-2, 1e-3, 1e-5]
        .iter()
        .map(|&t| format!("<{t:e}: {}/{}", leak_count(&b_bers, t), leak_count(&e_bers, t)))
        .collect();
    r.record(
        5,
        "enhanced linear suppresses sidelobes",
        e < b && legit < 1e-3,
        format!(
            "off-cap points with BER < 0.1: enhanced {e} vs static {b} of {} (need enhanced < static); legit BER {legit:.2e} (< 1e-3); \
             static/enhanced at stricter thresholds [{}]; {} hops; {:.0} s",
            b_bers.len(),
            profile.join(", "),
            enh.schedule.grids().len(),
            start.elapsed().as_secs_f64()
        ),
    );
}

fn criterion_6(r: &mut Report) {
    let (g, ofdm) = table1();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    // Independent always-on schedule: conjugate steering weights, no gating.
    let weights = tmirs::design_weights(&g);
    let units = weights
        .iter()
        .map(|&w| UnitTmParams::new(rng.gen_range(0.0..1.0), 1.0, w).unwrap())
        .collect();
    let grid = TmGrid::new(g.irs_rows, g.irs_cols, units).unwrap();
    let schedule = TmSchedule::fixed(tmirs::ScheduleMode::Custom, grid, None);
    let link = LinkConfig::new(Some(60.0), Equalizer::GenieDiagonal, SEED).unwrap();
    let sim = LinkSimulator::new(&g, &ofdm, &schedule, &link).unwrap();

    let mut worst_residual = 0.0f64;
    let mut errors = 0;
    let mut min_gain = f64::INFINITY;
    for k in 0..100u64 {
        let dir = Direction::from_degrees(rng.gen_range(0.0..=90.0), rng.gen_range(-180.0..180.0)).unwrap();
        let op = scrambling_operator(&g, &ofdm, schedule.grid(), &dir).unwrap();
        worst_residual = worst_residual.max(op.offdiag_residual());
        min_gain = min_gain.min(op.diagonal().norm());
        errors += sim.simulate(&dir, k).bit_errors;
    }
    r.record(
        6,
        "no-scrambling control",
        worst_residual < 1e-12 && errors == 0,
        format!(
            "100 directions: max residual {worst_residual:.2e} (< 1e-12); \
             {errors} bit errors at 60 dB (smallest |coeff(0)| {min_gain:.3})"
        ),
    );
}

#[test]
fn acceptance() {
    let mut report = Report { failed: Vec::new() };
    criterion_1(&mut report);
    criterion_2(&mut report);
    criterion_3(&mut report);
    criterion_6(&mut report);
    criteria_4_and_7(&mut report);
    criterion_5(&mut report);
    assert!(report.failed.is_empty(), "failed criteria: {:?}", report.failed);
}
