//! Monte Carlo link: QPSK framing, scrambling toward one direction,
//! receiver noise, one-tap equalization and bit-error counting.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{transmit_gain, Direction, OfdmConfig, SystemGeometry};
use crate::harmonic::{HarmonicTable, ScramblingOperator};
use crate::schedule::{TmGrid, TmSchedule};

/// Receiver scaling applied before slicing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Equalizer {
    /// Divide by the gain the legitimate receiver expects.
    LegitGain,
    /// Divide by the receiver's own diagonal coefficient (best-case eavesdropper).
    GenieDiagonal,
}

/// Noise level, equalizer and master seed of a link simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    /// Data-symbol power over noise power in dB; `None` is noiseless.
    pub symbol_snr_db: Option<f64>,
    pub equalizer: Equalizer,
    pub master_seed: u64,
}

impl LinkConfig {
    pub fn new(symbol_snr_db: Option<f64>, equalizer: Equalizer, master_seed: u64) -> Result<Self> {
        if let Some(snr) = symbol_snr_db {
            if !snr.is_finite() {
                return Err(invalid(format!("SNR {snr} dB is not finite")));
            }
        }
        Ok(Self {
            symbol_snr_db,
            equalizer,
            master_seed,
        })
    }

    /// Per-subcarrier complex noise variance for unit-power symbols.
    pub fn noise_variance(&self) -> f64 {
        self.symbol_snr_db
            .map_or(0.0, |snr| 10f64.powf(-snr / 10.0))
    }
}

/// Bit-error count at one direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerEstimate {
    pub theta: f64,
    pub phi: f64,
    pub bit_errors: u64,
    pub bits_total: u64,
    pub ber: f64,
}

impl BerEstimate {
    pub fn direction(&self) -> Direction {
        Direction {
            theta: self.theta,
            phi: self.phi,
        }
    }
}

/// Gray-mapped QPSK: bit pair `(b0, b1)` maps to `((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)`.
///
/// Bits are `0` or `1`; the count must be even.
pub fn qpsk_modulate(bits: &[u8]) -> Result<Vec<Complex64>> {
    if bits.len() % 2 != 0 {
        return Err(invalid(format!("odd bit count {}", bits.len())));
    }
    bits.chunks_exact(2)
        .map(|pair| match (pair[0], pair[1]) {
            (b0 @ 0..=1, b1 @ 0..=1) => Ok(qpsk_point(b0, b1)),
            _ => Err(invalid("bits must be 0 or 1")),
        })
        .collect()
}

fn qpsk_point(b0: u8, b1: u8) -> Complex64 {
    let level = |b: u8| if b == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    Complex64::new(level(b0), level(b1))
}

/// Hard decision per quadrant. A zero component (or NaN) decides bit `0`.
pub fn qpsk_demodulate(symbols: &[Complex64]) -> Vec<u8> {
    symbols
        .iter()
        .flat_map(|z| [u8::from(z.re < 0.0), u8::from(z.im < 0.0)])
        .collect()
}

/// Gain the legitimate receiver sees on every subcarrier:
/// `beta * K * sum_mn duration_mn`.
pub fn theoretical_legit_gain(geometry: &SystemGeometry, grid: &TmGrid) -> Result<Complex64> {
    grid.check_geometry(geometry)?;
    let total: f64 = grid.units().iter().map(|u| u.duration).sum();
    Ok(transmit_gain(geometry) * total)
}

/// Circular complex Gaussian sample with `E|z|^2 = variance`.
pub fn complex_noise(rng: &mut impl Rng, variance: f64) -> Complex64 {
    let sigma = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * sigma, im * sigma)
}

/// Random stream for direction `stream` of a run seeded with `master_seed`.
///
/// Stream 0 of each seed is left to schedule design.
pub fn direction_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream.wrapping_add(1));
    rng
}

/// Toeplitz operator embedded in a circulant so it can be applied with
/// two FFTs of length `>= 2 N_s - 1`.
struct FastToeplitz {
    n: usize,
    spectrum: Vec<Complex64>,
}

impl FastToeplitz {
    fn new(op: &ScramblingOperator, fft_len: usize, forward: &dyn Fft<f64>) -> Self {
        let n = op.n_subcarriers();
        let mut col = vec![Complex64::new(0.0, 0.0); fft_len];
        for k in 0..n {
            col[k] = op.coeff(k as i64);
        }
        for k in 1..n {
            col[fft_len - k] = op.coeff(-(k as i64));
        }
        forward.process(&mut col);
        let scale = 1.0 / fft_len as f64;
        col.iter_mut().for_each(|c| *c *= scale);
        Self { n, spectrum: col }
    }

    /// `buf[..n]` holds the input on entry and the output on return.
    fn apply(&self, buf: &mut [Complex64], forward: &dyn Fft<f64>, inverse: &dyn Fft<f64>) {
        buf[self.n..].fill(Complex64::new(0.0, 0.0));
        forward.process(buf);
        buf.iter_mut().zip(&self.spectrum).for_each(|(b, s)| *b *= s);
        inverse.process(buf);
    }
}

/// Reusable simulator for one geometry and schedule. Harmonic tables are
/// built once, so evaluating many directions only pays for the
/// per-direction operator and the Monte Carlo itself.
pub struct LinkSimulator {
    ofdm: OfdmConfig,
    schedule: TmSchedule,
    link: LinkConfig,
    tables: Vec<HarmonicTable>,
    legit_gains: Vec<Complex64>,
    fft_len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl LinkSimulator {
    pub fn new(
        geometry: &SystemGeometry,
        ofdm: &OfdmConfig,
        schedule: &TmSchedule,
        link: &LinkConfig,
    ) -> Result<Self> {
        schedule.check_geometry(geometry)?;
        let tables = schedule
            .grids()
            .iter()
            .map(|g| HarmonicTable::new(geometry, ofdm, g))
            .collect::<Result<Vec<_>>>()?;
        let legit_gains = schedule
            .grids()
            .iter()
            .map(|g| theoretical_legit_gain(geometry, g))
            .collect::<Result<Vec<_>>>()?;
        let fft_len = (2 * ofdm.n_subcarriers - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        Ok(Self {
            ofdm: *ofdm,
            schedule: schedule.clone(),
            link: *link,
            tables,
            legit_gains,
            fft_len,
            forward: planner.plan_fft_forward(fft_len),
            inverse: planner.plan_fft_inverse(fft_len),
        })
    }

    pub fn link(&self) -> &LinkConfig {
        &self.link
    }

    /// Scrambling operators toward `dir`, one per schedule grid.
    pub fn operators(&self, dir: &Direction) -> Vec<ScramblingOperator> {
        self.tables.iter().map(|t| t.operator(dir)).collect()
    }

    /// Runs all OFDM symbols toward `dir` with random stream `stream`.
    pub fn simulate(&self, dir: &Direction, stream: u64) -> BerEstimate {
        let ns = self.ofdm.n_subcarriers;
        let mut rng = direction_rng(self.link.master_seed, stream);
        let noise_var = self.link.noise_variance();
        let ops = self.operators(dir);
        let fast: Vec<FastToeplitz> = ops
            .iter()
            .map(|op| FastToeplitz::new(op, self.fft_len, &*self.forward))
            .collect();
        let eq: Vec<Complex64> = ops
            .iter()
            .zip(&self.legit_gains)
            .map(|(op, legit)| {
                let g = match self.link.equalizer {
                    Equalizer::GenieDiagonal => op.diagonal(),
                    Equalizer::LegitGain => *legit,
                };
                if g.norm() > 0.0 {
                    g.inv()
                } else {
                    Complex64::new(1.0, 0.0)
                }
            })
            .collect();

        let words = (2 * ns).div_ceil(64);
        let mut tx_bits = vec![0u64; words];
        let mut buf = vec![Complex64::new(0.0, 0.0); self.fft_len];
        let mut errors = 0u64;
        for mu in 0..self.ofdm.n_symbols {
            let gi = self.schedule.grid_index(mu);
            tx_bits.iter_mut().for_each(|w| *w = rng.next_u64());
            for (k, slot) in buf[..ns].iter_mut().enumerate() {
                let b = bit_pair(&tx_bits, k);
                *slot = qpsk_point((b & 1) as u8, (b >> 1) as u8);
            }
            fast[gi].apply(&mut buf, &*self.forward, &*self.inverse);
            for (k, y) in buf[..ns].iter().enumerate() {
                let mut r = *y;
                if noise_var > 0.0 {
                    r += complex_noise(&mut rng, noise_var);
                }
                let z = r * eq[gi];
                let rx = u64::from(z.re < 0.0) | (u64::from(z.im < 0.0) << 1);
                errors += u64::from((rx ^ bit_pair(&tx_bits, k)).count_ones());
            }
        }
        let total = 2 * (ns * self.ofdm.n_symbols) as u64;
        BerEstimate {
            theta: dir.theta,
            phi: dir.phi,
            bit_errors: errors,
            bits_total: total,
            ber: errors as f64 / total as f64,
        }
    }
}

fn bit_pair(words: &[u64], k: usize) -> u64 {
    let bit = 2 * k;
    (words[bit / 64] >> (bit % 64)) & 0b11
}

/// Bit-error rate toward `dir` over `ofdm.n_symbols` OFDM symbols.
pub fn simulate_direction(
    geometry: &SystemGeometry,
    ofdm: &OfdmConfig,
    schedule: &TmSchedule,
    dir: &Direction,
    link: &LinkConfig,
    stream: u64,
) -> Result<BerEstimate> {
    Ok(LinkSimulator::new(geometry, ofdm, schedule, link)?.simulate(dir, stream))
}
