//! Physical and waveform configuration: IRS/transmitter geometry, OFDM
//! numerology, far-field directions, and the array-factor primitives.
//!
//! Angles are radians everywhere in this module. Degree conversion happens
//! at the configuration boundary (see [`crate::config`]).

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Free-space speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// A far-field direction seen from the IRS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    /// Elevation from the IRS normal, in `[0, pi/2]`.
    pub theta: f64,
    /// Azimuth, in `[-pi, pi)`.
    pub phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(invalid(format!("elevation {theta} rad outside [0, pi/2]")));
        }
        if !(-PI..PI).contains(&phi) {
            return Err(invalid(format!("azimuth {phi} rad outside [-pi, pi)")));
        }
        Ok(Self { theta, phi })
    }

    /// Builds a direction from degrees. The azimuth is wrapped into `[-180, 180)`.
    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Result<Self> {
        if !theta_deg.is_finite() || !phi_deg.is_finite() {
            return Err(invalid("non-finite angle"));
        }
        let phi_wrapped = (phi_deg + 180.0).rem_euclid(360.0) - 180.0;
        Self::new(theta_deg.to_radians(), phi_wrapped.to_radians())
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta.to_degrees()
    }

    pub fn phi_deg(&self) -> f64 {
        self.phi.to_degrees()
    }

    /// Direction cosines `(sin(theta)cos(phi), sin(theta)sin(phi))` projected on the IRS plane.
    pub fn planar_cosines(&self) -> (f64, f64) {
        let s = self.theta.sin();
        (s * self.phi.cos(), s * self.phi.sin())
    }

    /// Unit vector in the IRS frame.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (u, v) = self.planar_cosines();
        [u, v, self.theta.cos()]
    }

    /// Great-circle angle to `other`, in radians.
    pub fn angular_distance(&self, other: &Direction) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        dot.clamp(-1.0, 1.0).acos()
    }
}

/// IRS grid, transmitter array and the fixed angles of the link.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemGeometry {
    /// M: number of IRS rows (x axis).
    pub irs_rows: usize,
    /// N: number of IRS columns (y axis).
    pub irs_cols: usize,
    pub unit_spacing_x: f64,
    pub unit_spacing_y: f64,
    pub carrier_wavelength: f64,
    pub tx_elements: usize,
    pub tx_spacing: f64,
    /// Direction of the IRS as seen from the transmitter broadside.
    pub irs_angle_from_tx: f64,
    /// Transmitter direction seen from the IRS.
    pub tx_direction: Direction,
    /// Direction of the legitimate receiver seen from the IRS.
    pub legit_direction: Direction,
    pub path_loss: Complex64,
}

impl SystemGeometry {
    /// Half-wavelength IRS and transmitter spacings, unit path loss.
    pub fn half_wavelength(
        irs_rows: usize,
        irs_cols: usize,
        tx_elements: usize,
        carrier_wavelength: f64,
        irs_angle_from_tx: f64,
        tx_direction: Direction,
        legit_direction: Direction,
    ) -> Result<Self> {
        let half = carrier_wavelength / 2.0;
        let g = Self {
            irs_rows,
            irs_cols,
            unit_spacing_x: half,
            unit_spacing_y: half,
            carrier_wavelength,
            tx_elements,
            tx_spacing: half,
            irs_angle_from_tx,
            tx_direction,
            legit_direction,
            path_loss: Complex64::new(1.0, 0.0),
        };
        g.validate()?;
        Ok(g)
    }

    /// The reference setup: 16x16 IRS at 24 GHz, 8-element transmitter,
    /// IRS at 30 deg from the transmitter, transmitter at (15, 10) deg and
    /// legitimate user at (40, 30) deg from the IRS.
    pub fn reference() -> Self {
        Self::half_wavelength(
            16,
            16,
            8,
            SPEED_OF_LIGHT / 24e9,
            30f64.to_radians(),
            Direction::from_degrees(15.0, 10.0).expect("static angle"),
            Direction::from_degrees(40.0, 30.0).expect("static angle"),
        )
        .expect("reference geometry is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.irs_rows == 0 || self.irs_cols == 0 {
            return Err(invalid("IRS must have at least one row and one column"));
        }
        if self.tx_elements == 0 {
            return Err(invalid("transmitter needs at least one element"));
        }
        for (name, v) in [
            ("unit_spacing_x", self.unit_spacing_x),
            ("unit_spacing_y", self.unit_spacing_y),
            ("carrier_wavelength", self.carrier_wavelength),
            ("tx_spacing", self.tx_spacing),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.irs_angle_from_tx.is_finite() {
            return Err(invalid("irs_angle_from_tx must be finite"));
        }
        Direction::new(self.tx_direction.theta, self.tx_direction.phi)?;
        Direction::new(self.legit_direction.theta, self.legit_direction.phi)?;
        if !(self.path_loss.re.is_finite() && self.path_loss.im.is_finite()) {
            return Err(invalid("path loss must be finite"));
        }
        Ok(())
    }

    pub fn n_units(&self) -> usize {
        self.irs_rows * self.irs_cols
    }

    /// Per-row and per-column phase factors whose products give `a_mn(dir)`.
    ///
    /// `rows[m] = a_m0(dir)` and `cols[n] = a_0n(dir)`.
    pub fn separable_factors(&self, dir: &Direction) -> (Vec<Complex64>, Vec<Complex64>) {
        let (u, v) = dir.planar_cosines();
        let k = 2.0 * PI / self.carrier_wavelength;
        let rows = (0..self.irs_rows)
            .map(|m| Complex64::from_polar(1.0, -k * m as f64 * self.unit_spacing_x * u))
            .collect();
        let cols = (0..self.irs_cols)
            .map(|n| Complex64::from_polar(1.0, -k * n as f64 * self.unit_spacing_y * v))
            .collect();
        (rows, cols)
    }

    pub(crate) fn array_factor_unchecked(&self, m: usize, n: usize, dir: &Direction) -> Complex64 {
        let (u, v) = dir.planar_cosines();
        let phase = -2.0 * PI / self.carrier_wavelength
            * (m as f64 * self.unit_spacing_x * u + n as f64 * self.unit_spacing_y * v);
        Complex64::from_polar(1.0, phase)
    }

    pub(crate) fn check_unit(&self, m: usize, n: usize) -> Result<()> {
        if m >= self.irs_rows || n >= self.irs_cols {
            return Err(invalid(format!(
                "unit ({m}, {n}) outside {}x{} IRS",
                self.irs_rows, self.irs_cols
            )));
        }
        Ok(())
    }
}

impl Default for SystemGeometry {
    fn default() -> Self {
        Self::reference()
    }
}

/// Far-field array factor of unit `(m, n)` toward `dir`.
pub fn array_factor(
    geometry: &SystemGeometry,
    m: usize,
    n: usize,
    dir: &Direction,
) -> Result<Complex64> {
    geometry.check_unit(m, n)?;
    Ok(geometry.array_factor_unchecked(m, n, dir))
}

/// Composite transmitter gain at the IRS.
///
/// The transmit weights `exp(j 2 pi k d_t sin(theta_I) / lambda)` exactly undo
/// the steering phases of the `K` elements, so the array collapses to `beta * K`.
pub fn transmit_gain(geometry: &SystemGeometry) -> Complex64 {
    geometry.path_loss * geometry.tx_elements as f64
}

/// OFDM numerology. The gate period equals the symbol duration `1 / f_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmConfig {
    pub n_subcarriers: usize,
    pub subcarrier_spacing: f64,
    pub carrier_freq: f64,
    pub n_symbols: usize,
}

impl OfdmConfig {
    pub fn new(
        n_subcarriers: usize,
        subcarrier_spacing: f64,
        carrier_freq: f64,
        n_symbols: usize,
    ) -> Result<Self> {
        let cfg = Self {
            n_subcarriers,
            subcarrier_spacing,
            carrier_freq,
            n_symbols,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_subcarriers < 2 {
            return Err(invalid("at least two subcarriers required"));
        }
        if self.n_symbols == 0 {
            return Err(invalid("at least one OFDM symbol required"));
        }
        if !(self.subcarrier_spacing.is_finite() && self.subcarrier_spacing > 0.0) {
            return Err(invalid("subcarrier spacing must be positive"));
        }
        if !(self.carrier_freq.is_finite() && self.carrier_freq >= 0.0) {
            return Err(invalid("carrier frequency must be finite and nonnegative"));
        }
        Ok(())
    }

    /// Symbol duration `T_p = 1 / f_s`, also the gate period.
    pub fn symbol_duration(&self) -> f64 {
        1.0 / self.subcarrier_spacing
    }

    /// Largest subcarrier offset `N_s - 1` that can mix in-band.
    pub fn max_offset(&self) -> usize {
        self.n_subcarriers - 1
    }
}

impl Default for OfdmConfig {
    /// 64 subcarriers at 120 kHz spacing on a 24 GHz carrier, 1024 symbols.
    fn default() -> Self {
        Self {
            n_subcarriers: 64,
            subcarrier_spacing: 120e3,
            carrier_freq: 24e9,
            n_symbols: 1024,
        }
    }
}
