//! JSON configuration. All angles are degrees here; lengths are meters.
//!
//! ```json
//! {
//!   "seed": 1,
//!   "geometry": { "irs_rows": 16, "irs_cols": 16, "tx_elements": 8,
//!                 "irs_angle_from_tx_deg": 30, "tx_elevation_deg": 15,
//!                 "tx_azimuth_deg": 10, "legit_elevation_deg": 40,
//!                 "legit_azimuth_deg": 30 },
//!   "ofdm": { "n_subcarriers": 64, "subcarrier_spacing_hz": 120000,
//!             "carrier_freq_hz": 24e9, "n_symbols": 1024 },
//!   "design": { "mode": "planar", "duration": 0.7 },
//!   "link": { "snr_db": 0, "equalizer": "genie_diagonal" },
//!   "sweep": { "theta_deg": { "start": 0, "stop": 90, "step": 1 },
//!              "phi_deg": { "start": -90, "stop": 90, "step": 1 } },
//!   "output": { "csv": "ber.csv", "pgm": "ber.pgm" }
//! }
//! ```
//!
//! Every section and key is optional; missing values take the defaults of
//! the reference setup.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::designer::{DesignMode, DurationPolicy, LinearOptions, DEFAULT_DURATION_RANGE};
use crate::error::{invalid, Error, Result};
use crate::geometry::{Direction, OfdmConfig, SystemGeometry, SPEED_OF_LIGHT};
use crate::link::{Equalizer, LinkConfig};
use crate::schedule::LineOrientation;
use crate::sweep::{AngleRange, SweepSpec, DEFAULT_MAX_POINTS};

/// Geometry in external units. Spacings default to half a wavelength and
/// the wavelength defaults to `c / carrier_freq_hz`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub irs_rows: usize,
    pub irs_cols: usize,
    pub unit_spacing_x_m: Option<f64>,
    pub unit_spacing_y_m: Option<f64>,
    pub carrier_wavelength_m: Option<f64>,
    pub tx_elements: usize,
    pub tx_spacing_m: Option<f64>,
    pub irs_angle_from_tx_deg: f64,
    pub tx_elevation_deg: f64,
    pub tx_azimuth_deg: f64,
    pub legit_elevation_deg: f64,
    pub legit_azimuth_deg: f64,
    pub path_loss_re: f64,
    pub path_loss_im: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            irs_rows: 16,
            irs_cols: 16,
            unit_spacing_x_m: None,
            unit_spacing_y_m: None,
            carrier_wavelength_m: None,
            tx_elements: 8,
            tx_spacing_m: None,
            irs_angle_from_tx_deg: 30.0,
            tx_elevation_deg: 15.0,
            tx_azimuth_deg: 10.0,
            legit_elevation_deg: 40.0,
            legit_azimuth_deg: 30.0,
            path_loss_re: 1.0,
            path_loss_im: 0.0,
        }
    }
}

impl GeometryConfig {
    pub fn from_geometry(g: &SystemGeometry) -> Self {
        Self {
            irs_rows: g.irs_rows,
            irs_cols: g.irs_cols,
            unit_spacing_x_m: Some(g.unit_spacing_x),
            unit_spacing_y_m: Some(g.unit_spacing_y),
            carrier_wavelength_m: Some(g.carrier_wavelength),
            tx_elements: g.tx_elements,
            tx_spacing_m: Some(g.tx_spacing),
            irs_angle_from_tx_deg: g.irs_angle_from_tx.to_degrees(),
            tx_elevation_deg: g.tx_direction.theta_deg(),
            tx_azimuth_deg: g.tx_direction.phi_deg(),
            legit_elevation_deg: g.legit_direction.theta_deg(),
            legit_azimuth_deg: g.legit_direction.phi_deg(),
            path_loss_re: g.path_loss.re,
            path_loss_im: g.path_loss.im,
        }
    }

    /// Resolves against the reference 24 GHz carrier.
    pub fn to_geometry(&self) -> Result<SystemGeometry> {
        self.resolve(OfdmConfig::default().carrier_freq)
    }

    /// Resolves defaults using `carrier_freq` (Hz) for the wavelength.
    pub fn resolve(&self, carrier_freq: f64) -> Result<SystemGeometry> {
        let lambda = match self.carrier_wavelength_m {
            Some(l) => l,
            None if carrier_freq > 0.0 => SPEED_OF_LIGHT / carrier_freq,
            None => return Err(invalid("need carrier_wavelength_m or a positive carrier")),
        };
        let g = SystemGeometry {
            irs_rows: self.irs_rows,
            irs_cols: self.irs_cols,
            unit_spacing_x: self.unit_spacing_x_m.unwrap_or(lambda / 2.0),
            unit_spacing_y: self.unit_spacing_y_m.unwrap_or(lambda / 2.0),
            carrier_wavelength: lambda,
            tx_elements: self.tx_elements,
            tx_spacing: self.tx_spacing_m.unwrap_or(lambda / 2.0),
            irs_angle_from_tx: self.irs_angle_from_tx_deg.to_radians(),
            tx_direction: Direction::from_degrees(self.tx_elevation_deg, self.tx_azimuth_deg)?,
            legit_direction: Direction::from_degrees(
                self.legit_elevation_deg,
                self.legit_azimuth_deg,
            )?,
            path_loss: Complex64::new(self.path_loss_re, self.path_loss_im),
        };
        g.validate()?;
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OfdmSection {
    pub n_subcarriers: usize,
    pub subcarrier_spacing_hz: f64,
    pub carrier_freq_hz: f64,
    pub n_symbols: usize,
}

impl Default for OfdmSection {
    fn default() -> Self {
        let d = OfdmConfig::default();
        Self {
            n_subcarriers: d.n_subcarriers,
            subcarrier_spacing_hz: d.subcarrier_spacing,
            carrier_freq_hz: d.carrier_freq,
            n_symbols: d.n_symbols,
        }
    }
}

impl OfdmSection {
    pub fn to_ofdm(&self) -> Result<OfdmConfig> {
        OfdmConfig::new(
            self.n_subcarriers,
            self.subcarrier_spacing_hz,
            self.carrier_freq_hz,
            self.n_symbols,
        )
    }
}

/// Mode names accepted by the `mode` key and the `--mode` flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ModeName {
    LinearColumn,
    LinearRow,
    Planar,
    EnhancedColumn,
    EnhancedRow,
}

/// How linear-mode line durations are set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineDurations {
    /// All lines use `duration`.
    Common,
    /// Lines draw distinct durations from `duration_range`.
    Distinct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignSection {
    pub mode: ModeName,
    /// On-duration for planar mode and for linear mode with common durations.
    pub duration: f64,
    pub duration_range: (f64, f64),
    pub line_durations: LineDurations,
    pub shared_permutation: bool,
    pub random_offsets: bool,
    pub hop_period: usize,
    /// Defaults to enough hops to cover every OFDM symbol once.
    pub n_hops: Option<usize>,
}

impl Default for DesignSection {
    fn default() -> Self {
        Self {
            mode: ModeName::Planar,
            duration: 0.7,
            duration_range: DEFAULT_DURATION_RANGE,
            line_durations: LineDurations::Distinct,
            shared_permutation: false,
            random_offsets: true,
            hop_period: 256,
            n_hops: None,
        }
    }
}

impl DesignSection {
    pub fn to_mode(&self, n_symbols: usize) -> Result<DesignMode> {
        let linear = |orientation| {
            let durations = match self.line_durations {
                LineDurations::Common => DurationPolicy::Common(self.duration),
                LineDurations::Distinct => DurationPolicy::Distinct {
                    min: self.duration_range.0,
                    max: self.duration_range.1,
                },
            };
            DesignMode::Linear {
                orientation,
                options: LinearOptions {
                    durations,
                    shared_permutation: self.shared_permutation,
                    random_offsets: self.random_offsets,
                },
            }
        };
        let enhanced = |orientation| -> Result<DesignMode> {
            if self.hop_period == 0 {
                return Err(invalid("hop_period must be positive"));
            }
            let n_hops = self
                .n_hops
                .unwrap_or_else(|| n_symbols.div_ceil(self.hop_period).max(1));
            Ok(DesignMode::Enhanced {
                orientation,
                hop_period: self.hop_period,
                n_hops,
                duration_range: self.duration_range,
            })
        };
        Ok(match self.mode {
            ModeName::LinearColumn => linear(LineOrientation::Column),
            ModeName::LinearRow => linear(LineOrientation::Row),
            ModeName::Planar => DesignMode::Planar {
                duration: self.duration,
            },
            ModeName::EnhancedColumn => enhanced(LineOrientation::Column)?,
            ModeName::EnhancedRow => enhanced(LineOrientation::Row)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSection {
    /// Data-symbol power over noise power. `null` disables noise.
    pub snr_db: Option<f64>,
    pub equalizer: Equalizer,
}

impl Default for LinkSection {
    fn default() -> Self {
        Self {
            snr_db: Some(0.0),
            equalizer: Equalizer::GenieDiagonal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub theta_deg: AngleRange,
    pub phi_deg: AngleRange,
    pub max_points: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            theta_deg: AngleRange::new(0.0, 90.0, 1.0),
            phi_deg: AngleRange::new(-90.0, 90.0, 1.0),
            max_points: DEFAULT_MAX_POINTS,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub csv: Option<PathBuf>,
    pub pgm: Option<PathBuf>,
    /// Run metadata or validation report.
    pub json: Option<PathBuf>,
    pub schedule: Option<PathBuf>,
}

/// Whole configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    pub geometry: GeometryConfig,
    pub ofdm: OfdmSection,
    pub design: DesignSection,
    pub link: LinkSection,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            geometry: GeometryConfig::default(),
            ofdm: OfdmSection::default(),
            design: DesignSection::default(),
            link: LinkSection::default(),
            sweep: SweepSection::default(),
            output: OutputSection::default(),
        }
    }
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Resolves into a runnable sweep specification.
    pub fn to_spec(&self) -> Result<SweepSpec> {
        let ofdm = self.ofdm.to_ofdm()?;
        let geometry = self.geometry.resolve(ofdm.carrier_freq)?;
        let mode = self.design.to_mode(ofdm.n_symbols)?;
        let link = LinkConfig::new(self.link.snr_db, self.link.equalizer, self.seed)?;
        let spec = SweepSpec {
            geometry,
            ofdm,
            mode,
            design_seed: self.seed,
            link,
            theta_deg: self.sweep.theta_deg,
            phi_deg: self.sweep.phi_deg,
            max_points: self.sweep.max_points,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_reference_setup() {
        let cfg = SimConfig::from_json("{}").unwrap();
        let spec = cfg.to_spec().unwrap();
        assert_eq!(spec.geometry, SystemGeometry::reference());
        assert_eq!(spec.ofdm, OfdmConfig::default());
        assert_eq!(spec.mode, DesignMode::Planar { duration: 0.7 });
        assert_eq!(spec.grid_shape(), (91, 181));
    }

    #[test]
    fn doc_example_parses() {
        let text = r#"{
          "seed": 1,
          "geometry": { "irs_rows": 16, "irs_cols": 16, "tx_elements": 8,
                        "irs_angle_from_tx_deg": 30, "tx_elevation_deg": 15,
                        "tx_azimuth_deg": 10, "legit_elevation_deg": 40,
                        "legit_azimuth_deg": 30 },
          "ofdm": { "n_subcarriers": 64, "subcarrier_spacing_hz": 120000,
                    "carrier_freq_hz": 24e9, "n_symbols": 1024 },
          "design": { "mode": "planar", "duration": 0.7 },
          "link": { "snr_db": 0, "equalizer": "genie_diagonal" },
          "sweep": { "theta_deg": { "start": 0, "stop": 90, "step": 1 },
                     "phi_deg": { "start": -90, "stop": 90, "step": 1 } },
          "output": { "csv": "ber.csv", "pgm": "ber.pgm" }
        }"#;
        let cfg = SimConfig::from_json(text).unwrap();
        assert_eq!(cfg.output.csv.as_deref(), Some(Path::new("ber.csv")));
        cfg.to_spec().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(SimConfig::from_json(r#"{"geometry": {"rows": 3}}"#).is_err());
    }

    #[test]
    fn enhanced_hops_cover_symbols() {
        let mut cfg = SimConfig::default();
        cfg.design.mode = ModeName::EnhancedColumn;
        cfg.ofdm.n_symbols = 16384;
        let spec = cfg.to_spec().unwrap();
        match spec.mode {
            DesignMode::Enhanced { n_hops, hop_period, .. } => {
                assert_eq!((n_hops, hop_period), (64, 256))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn geometry_echo_roundtrip() {
        let g = SystemGeometry::reference();
        let back = GeometryConfig::from_geometry(&g).to_geometry().unwrap();
        assert!((back.legit_direction.theta - g.legit_direction.theta).abs() < 1e-12);
        assert!((back.tx_direction.phi - g.tx_direction.phi).abs() < 1e-12);
        assert_eq!(back.irs_rows, g.irs_rows);
        assert!((back.unit_spacing_x - g.unit_spacing_x).abs() < 1e-15);
    }
}
