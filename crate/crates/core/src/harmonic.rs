//! Harmonic analysis of the periodically gated IRS.
//!
//! Each unit's on/off gate is a periodic pulse train with period equal to the
//! OFDM symbol duration, so its `h`-th Fourier coefficient moves energy from
//! subcarrier `s` to subcarrier `s + h`. Summed over the surface this gives a
//! Toeplitz operator per direction mapping transmitted to received symbols.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{transmit_gain, Direction, OfdmConfig, SystemGeometry};
use crate::schedule::TmGrid;

const SINC_SERIES_CUTOFF: f64 = 1e-8;

/// Time-modulation parameters of a single IRS unit.
///
/// `turn_on` and `duration` are normalized by the gate period. The off
/// instant `turn_on + duration` may exceed 1, in which case the on window
/// wraps into the next period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitTmParams {
    pub turn_on: f64,
    pub duration: f64,
    pub weight: Complex64,
}

impl UnitTmParams {
    pub fn new(turn_on: f64, duration: f64, weight: Complex64) -> Result<Self> {
        let p = Self {
            turn_on,
            duration,
            weight,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.turn_on) {
            return Err(invalid(format!("turn-on {} outside [0, 1)", self.turn_on)));
        }
        check_duration(self.duration)?;
        if !((self.weight.norm() - 1.0).abs() <= 1e-12) {
            return Err(invalid(format!(
                "weight {} is not unit-modulus",
                self.weight
            )));
        }
        Ok(())
    }

    /// Normalized off instant, taken modulo one period.
    pub fn turn_off(&self) -> f64 {
        (self.turn_on + self.duration).rem_euclid(1.0)
    }
}

fn check_duration(duration: f64) -> Result<()> {
    if duration > 0.0 && duration <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("on-duration {duration} outside (0, 1]")))
    }
}

/// `sin(x) / x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_SERIES_CUTOFF {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `sin(pi x)`, exactly zero at integers.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    let r = if r > 0.5 {
        1.0 - r
    } else if r < -0.5 {
        -1.0 - r
    } else {
        r
    };
    (PI * r).sin()
}

pub(crate) fn gate_coeff_unchecked(h: i64, turn_on: f64, duration: f64) -> Complex64 {
    if h == 0 {
        return Complex64::new(duration, 0.0);
    }
    let hf = h as f64;
    // duration * sinc(h pi duration), reduced so that h * duration in Z gives 0
    let mag = sin_pi(hf * duration) / (PI * hf);
    Complex64::from_polar(1.0, -hf * PI * (2.0 * turn_on + duration)) * mag
}

/// Coefficient of the `h`-th harmonic of a unit-amplitude periodic gate that
/// is on for `duration` starting at `turn_on` (both normalized).
pub fn gate_fourier_coeff(h: i64, turn_on: f64, duration: f64) -> Result<Complex64> {
    check_duration(duration)?;
    if !(0.0..1.0).contains(&turn_on) {
        return Err(invalid(format!("turn-on {turn_on} outside [0, 1)")));
    }
    Ok(gate_coeff_unchecked(h, turn_on, duration))
}

/// Coefficient of the `h`-th harmonic produced by unit `(m, n)` toward `dir`:
/// the two array factors, the unit weight and the gate coefficient.
pub fn harmonic_coeff(
    geometry: &SystemGeometry,
    m: usize,
    n: usize,
    params: &UnitTmParams,
    h: i64,
    dir: &Direction,
) -> Result<Complex64> {
    geometry.check_unit(m, n)?;
    params.validate()?;
    let spatial = geometry.array_factor_unchecked(m, n, dir)
        * geometry.array_factor_unchecked(m, n, &geometry.tx_direction)
        * params.weight;
    Ok(spatial * gate_coeff_unchecked(h, params.turn_on, params.duration))
}

/// Toeplitz operator mapping the transmitted symbol vector of one OFDM
/// symbol to the received vector at one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ScramblingOperator {
    pub direction: Direction,
    n_subcarriers: usize,
    /// Index `offset + n_subcarriers - 1` holds the coefficient of `offset = i - s`.
    coeffs: Vec<Complex64>,
}

impl ScramblingOperator {
    /// Builds an operator from coefficients ordered by offset
    /// `-(n_subcarriers - 1) ..= n_subcarriers - 1`.
    pub fn from_coeffs(direction: Direction, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 3 || coeffs.len() % 2 == 0 {
            return Err(invalid(format!(
                "coefficient vector of length {} is not 2*N_s - 1",
                coeffs.len()
            )));
        }
        Ok(Self {
            direction,
            n_subcarriers: coeffs.len().div_ceil(2),
            coeffs,
        })
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    /// Coefficient at subcarrier offset `i - s`.
    pub fn coeff(&self, offset: i64) -> Complex64 {
        let max = self.n_subcarriers as i64 - 1;
        assert!(offset.abs() <= max, "offset {offset} outside +/-{max}");
        self.coeffs[(offset + max) as usize]
    }

    pub fn diagonal(&self) -> Complex64 {
        self.coeff(0)
    }

    /// All coefficients, ordered from offset `-(N_s - 1)` to `N_s - 1`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Largest `|coeff(offset)| / |coeff(0)|` over nonzero offsets.
    /// Infinite when the diagonal vanishes but some off-diagonal does not.
    pub fn offdiag_residual(&self) -> f64 {
        let diag = self.diagonal().norm();
        let max_off = self
            .offsets()
            .filter(|&o| o != 0)
            .map(|o| self.coeff(o).norm())
            .fold(0.0, f64::max);
        if max_off == 0.0 {
            0.0
        } else {
            max_off / diag
        }
    }

    pub fn offsets(&self) -> impl Iterator<Item = i64> {
        let max = self.n_subcarriers as i64 - 1;
        -max..=max
    }

    /// Dense `N_s x N_s` matrix, row `i`, column `s`.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let ns = self.n_subcarriers as i64;
        (0..ns)
            .map(|i| (0..ns).map(|s| self.coeff(i - s)).collect())
            .collect()
    }

    /// Applies the operator: `out[i] = sum_s coeff(i - s) * d[s]`.
    pub fn apply(&self, d: &[Complex64]) -> Result<Vec<Complex64>> {
        if d.len() != self.n_subcarriers {
            return Err(Error::DimensionMismatch {
                expected: format!("{} symbols", self.n_subcarriers),
                actual: format!("{} symbols", d.len()),
            });
        }
        let ns = self.n_subcarriers;
        // coeffs[i - s + ns - 1] for s = 0.. is a descending run; reverse once
        // so each output is a contiguous dot product.
        let rev: Vec<Complex64> = self.coeffs.iter().rev().copied().collect();
        Ok((0..ns)
            .map(|i| {
                rev[ns - 1 - i..2 * ns - 1 - i]
                    .iter()
                    .zip(d)
                    .map(|(c, x)| c * x)
                    .sum()
            })
            .collect())
    }
}

/// Scrambles one OFDM symbol's worth of data with `op`.
pub fn scramble(op: &ScramblingOperator, d: &[Complex64]) -> Result<Vec<Complex64>> {
    op.apply(d)
}

/// Direction-independent part of the harmonic coefficients of a grid.
///
/// Holds `beta * K * a_mn(tx) * c_mn * G(h)` for every unit and every
/// in-band harmonic, so evaluating the operator at a new direction costs
/// `O(N_s * M * N)` complex multiply-adds and no transcendental calls
/// beyond the `M + N` separable array factors.
#[derive(Debug, Clone)]
pub struct HarmonicTable {
    geometry: SystemGeometry,
    n_subcarriers: usize,
    table: Vec<Complex64>,
}

impl HarmonicTable {
    pub fn new(geometry: &SystemGeometry, ofdm: &OfdmConfig, grid: &TmGrid) -> Result<Self> {
        geometry.validate()?;
        ofdm.validate()?;
        grid.check_geometry(geometry)?;
        let ns = ofdm.n_subcarriers;
        let width = 2 * ns - 1;
        let max = ns as i64 - 1;
        let gain = transmit_gain(geometry);
        let mut table = Vec::with_capacity(grid.len() * width);
        for (m, n, p) in grid.iter() {
            let spatial = gain
                * geometry.array_factor_unchecked(m, n, &geometry.tx_direction)
                * p.weight;
            table.extend((-max..=max).map(|h| spatial * gate_coeff_unchecked(h, p.turn_on, p.duration)));
        }
        Ok(Self {
            geometry: geometry.clone(),
            n_subcarriers: ns,
            table,
        })
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    /// Scrambling operator toward `dir`.
    pub fn operator(&self, dir: &Direction) -> ScramblingOperator {
        let width = 2 * self.n_subcarriers - 1;
        let (rows, cols) = self.geometry.separable_factors(dir);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); width];
        for (unit, chunk) in self.table.chunks_exact(width).enumerate() {
            let w = rows[unit / cols.len()] * cols[unit % cols.len()];
            for (acc, t) in coeffs.iter_mut().zip(chunk) {
                *acc += w * t;
            }
        }
        ScramblingOperator {
            direction: *dir,
            n_subcarriers: self.n_subcarriers,
            coeffs,
        }
    }
}

/// Scrambling operator of `grid` toward `dir`:
/// `coeff(offset) = beta * K * sum_mn B(offset, unit, dir)`.
pub fn scrambling_operator(
    geometry: &SystemGeometry,
    ofdm: &OfdmConfig,
    grid: &TmGrid,
    dir: &Direction,
) -> Result<ScramblingOperator> {
    Ok(HarmonicTable::new(geometry, ofdm, grid)?.operator(dir))
}
