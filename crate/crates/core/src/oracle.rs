//! Time-domain reference for the harmonic engine.
//!
//! Rebuilds the received subcarrier symbols from the gated waveform itself,
//! with no Fourier series: each unit reflects the OFDM symbol only inside
//! its on-window(s), and a matched filter integrates the result against each
//! subcarrier over one symbol period. [`demod_exact`] integrates in closed
//! form per window; [`demod_sampled`] uses an `L`-point discrete transform.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use crate::designer::{design, DesignMode, LinearOptions};
use crate::error::{invalid, Error, Result};
use crate::geometry::{array_factor, Direction, OfdmConfig, SystemGeometry};
use crate::harmonic::scrambling_operator;
use crate::schedule::{LineOrientation, TmGrid, TmSchedule};

/// One contiguous on-window of a gate, normalized to the period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateInterval {
    pub start: f64,
    pub end: f64,
}

impl GateInterval {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

/// Splits the on-window `[turn_on, turn_on + duration)` of one period into
/// at most two sub-intervals of `[0, 1]`.
pub fn gate_intervals(turn_on: f64, duration: f64) -> Vec<GateInterval> {
    let end = turn_on + duration;
    if duration >= 1.0 {
        vec![GateInterval {
            start: 0.0,
            end: 1.0,
        }]
    } else if end <= 1.0 {
        vec![GateInterval {
            start: turn_on,
            end,
        }]
    } else {
        vec![
            GateInterval {
                start: turn_on,
                end: 1.0,
            },
            GateInterval {
                start: 0.0,
                end: end - 1.0,
            },
        ]
    }
}

/// Signal arriving at the IRS per unit of baseband, summed explicitly over
/// the transmit elements with their steering weights.
fn incident_gain(geometry: &SystemGeometry) -> Complex64 {
    let k_wave = 2.0 * PI / geometry.carrier_wavelength;
    let s = geometry.irs_angle_from_tx.sin();
    let sum: Complex64 = (0..geometry.tx_elements)
        .map(|k| {
            let path = Complex64::from_polar(1.0, -k_wave * k as f64 * geometry.tx_spacing * s);
            let w = Complex64::from_polar(1.0, k_wave * k as f64 * geometry.tx_spacing * s);
            path * w
        })
        .sum();
    geometry.path_loss * sum
}

fn unit_factors(
    geometry: &SystemGeometry,
    grid: &TmGrid,
    dir: &Direction,
) -> Result<Vec<Complex64>> {
    let incident = incident_gain(geometry);
    grid.iter()
        .map(|(m, n, p)| {
            Ok(incident
                * array_factor(geometry, m, n, &geometry.tx_direction)?
                * array_factor(geometry, m, n, dir)?
                * p.weight)
        })
        .collect()
}

fn check_inputs(
    geometry: &SystemGeometry,
    ofdm: &OfdmConfig,
    grid: &TmGrid,
    d: &[Complex64],
) -> Result<()> {
    geometry.validate()?;
    ofdm.validate()?;
    grid.check_geometry(geometry)?;
    if d.len() != ofdm.n_subcarriers {
        return Err(Error::DimensionMismatch {
            expected: format!("{} symbols", ofdm.n_subcarriers),
            actual: format!("{} symbols", d.len()),
        });
    }
    Ok(())
}

/// Matched-filter output of every subcarrier over one OFDM symbol, with the
/// gated exponentials integrated in closed form.
///
/// The carrier is kept in the exponents: the integrand for source `s` and
/// filter `i` oscillates at `(f_c + s f_s) - (f_c + i f_s)`.
pub fn demod_exact(
    geometry: &SystemGeometry,
    ofdm: &OfdmConfig,
    grid: &TmGrid,
    dir: &Direction,
    d: &[Complex64],
) -> Result<Vec<Complex64>> {
    check_inputs(geometry, ofdm, grid, d)?;
    let factors = unit_factors(geometry, grid, dir)?;
    let period = ofdm.symbol_duration();
    let ns = ofdm.n_subcarriers;
    let freq = |k: usize| ofdm.carrier_freq + k as f64 * ofdm.subcarrier_spacing;

    let windows: Vec<Vec<(f64, f64)>> = grid
        .units()
        .iter()
        .map(|p| {
            gate_intervals(p.turn_on, p.duration)
                .into_iter()
                .map(|w| (w.start * period, w.end * period))
                .collect()
        })
        .collect();

    let mut out = vec![Complex64::new(0.0, 0.0); ns];
    for (i, o) in out.iter_mut().enumerate() {
        for (s, &ds) in d.iter().enumerate() {
            if ds == Complex64::new(0.0, 0.0) {
                continue;
            }
            let df = freq(s) - freq(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (factor, win) in factors.iter().zip(&windows) {
                let integral: Complex64 = win
                    .iter()
                    .map(|&(ta, tb)| {
                        if s == i {
                            Complex64::new((tb - ta) / period, 0.0)
                        } else {
                            let w = 2.0 * PI * df;
                            (Complex64::from_polar(1.0, w * tb) - Complex64::from_polar(1.0, w * ta))
                                / Complex64::new(0.0, w * period)
                        }
                    })
                    .sum();
                acc += factor * integral;
            }
            *o += acc * ds;
        }
    }
    Ok(out)
}

/// Discrete counterpart of [`demod_exact`] with `samples_per_period`
/// samples per OFDM symbol, evaluated at baseband.
///
/// Gate edges are snapped to the nearest sample, so each edge moves by at
/// most `1 / (2 L)` of a period and the result differs from the exact one
/// by `O(1 / L)` relative to the signal magnitude. Always-on gates have no
/// edges and match to rounding error.
pub fn demod_sampled(
    geometry: &SystemGeometry,
    ofdm: &OfdmConfig,
    grid: &TmGrid,
    dir: &Direction,
    d: &[Complex64],
    samples_per_period: usize,
) -> Result<Vec<Complex64>> {
    check_inputs(geometry, ofdm, grid, d)?;
    let ns = ofdm.n_subcarriers;
    let l = samples_per_period;
    if l < 4 * ns || l % ns != 0 {
        return Err(invalid(format!(
            "oversampling {l} must be a multiple of {ns} and at least {}",
            4 * ns
        )));
    }
    let factors = unit_factors(geometry, grid, dir)?;

    // Baseband OFDM symbol: x[k] = sum_s d[s] exp(j 2 pi s k / L).
    let mut planner = FftPlanner::<f64>::new();
    let mut x = vec![Complex64::new(0.0, 0.0); l];
    x[..ns].copy_from_slice(d);
    planner.plan_fft_inverse(l).process(&mut x);

    // Composite gate g[k] = sum_mn factor_mn * u_mn[k], built from edge deltas.
    let mut delta = vec![Complex64::new(0.0, 0.0); l + 1];
    for (p, f) in grid.units().iter().zip(&factors) {
        if p.duration >= 1.0 {
            delta[0] += f;
            delta[l] -= f;
            continue;
        }
        let mut on = (p.turn_on * l as f64).round() as usize;
        let mut off = ((p.turn_on + p.duration) * l as f64).round() as usize;
        if on >= l {
            on -= l;
            off -= l;
        }
        if off <= l {
            delta[on] += f;
            delta[off] -= f;
        } else {
            delta[on] += f;
            delta[l] -= f;
            delta[0] += f;
            delta[off - l] -= f;
        }
    }
    let mut gate = Complex64::new(0.0, 0.0);
    for (k, xk) in x.iter_mut().enumerate() {
        gate += delta[k];
        *xk *= gate;
    }

    planner.plan_fft_forward(l).process(&mut x);
    let scale = 1.0 / l as f64;
    Ok(x[..ns].iter().map(|v| v * scale).collect())
}


/// A randomly drawn small problem used to cross-check the harmonic engine.
#[derive(Debug, Clone)]
pub struct OracleInstance {
    pub geometry: SystemGeometry,
    pub ofdm: OfdmConfig,
    pub schedule: TmSchedule,
    /// Grid actually compared; for hopping schedules a random hop.
    pub grid: TmGrid,
    pub direction: Direction,
    pub symbols: Vec<Complex64>,
}

impl OracleInstance {
    /// Draws an instance with `M, N` in `2..=8`, `N_s` in `2..=16`, a random
    /// design family, random link angles, path loss and direction.
    pub fn random(rng: &mut impl Rng) -> Result<Self> {
        let mut geometry = SystemGeometry::reference();
        geometry.irs_rows = rng.gen_range(2..=8);
        geometry.irs_cols = rng.gen_range(2..=8);
        geometry.tx_elements = rng.gen_range(1..=8);
        geometry.irs_angle_from_tx = rng.gen_range(-1.5..1.5);
        geometry.tx_direction = random_direction(rng);
        geometry.legit_direction = random_direction(rng);
        geometry.path_loss = Complex64::from_polar(rng.gen_range(0.1..2.0), rng.gen_range(-PI..PI));
        let ns = rng.gen_range(2..=16);
        let ofdm = OfdmConfig::new(ns, 120e3, rng.gen_range(1e9..1e11), 1)?;
        let seed = rng.gen();
        let orientation = if rng.gen_bool(0.5) {
            LineOrientation::Column
        } else {
            LineOrientation::Row
        };
        let mode = match rng.gen_range(0..4) {
            0 => DesignMode::Linear {
                orientation: LineOrientation::Column,
                options: LinearOptions::default(),
            },
            1 => DesignMode::Linear {
                orientation: LineOrientation::Row,
                options: LinearOptions::default(),
            },
            2 => DesignMode::Planar {
                duration: rng.gen_range(0.05..=1.0),
            },
            _ => DesignMode::Enhanced {
                orientation,
                hop_period: rng.gen_range(1..=8),
                n_hops: rng.gen_range(2..=6),
                duration_range: (0.1, 0.95),
            },
        };
        let schedule = design(&geometry, &mode, seed)?;
        let grid = schedule.grids()[rng.gen_range(0..schedule.grids().len())].clone();
        let direction = random_direction(rng);
        let symbols = (0..ns)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Ok(Self {
            geometry,
            ofdm,
            schedule,
            grid,
            direction,
            symbols,
        })
    }

    /// Largest deviation between the harmonic engine and [`demod_exact`],
    /// relative to the largest exact output magnitude.
    pub fn engine_vs_exact(&self) -> Result<f64> {
        let exact = demod_exact(
            &self.geometry,
            &self.ofdm,
            &self.grid,
            &self.direction,
            &self.symbols,
        )?;
        let engine = scrambling_operator(&self.geometry, &self.ofdm, &self.grid, &self.direction)?
            .apply(&self.symbols)?;
        Ok(max_relative_error(&engine, &exact))
    }
}

fn random_direction(rng: &mut impl Rng) -> Direction {
    Direction {
        theta: rng.gen_range(0.0..=FRAC_PI_2),
        phi: rng.gen_range(-PI..PI),
    }
}

/// `max_i |a_i - b_i| / max_i |b_i|` (0 when both vanish).
pub fn max_relative_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let err = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    if err == 0.0 {
        0.0
    } else {
        err / scale
    }
}

/// Summary of a batch of engine-versus-oracle comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSummary {
    pub instances: usize,
    pub max_relative_error: f64,
}

/// Compares the engine with [`demod_exact`] on `instances` random problems.
pub fn verify_random_instances(instances: usize, seed: u64) -> Result<OracleSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        worst = worst.max(OracleInstance::random(&mut rng)?.engine_vs_exact()?);
    }
    Ok(OracleSummary {
        instances,
        max_relative_error: worst,
    })
}
