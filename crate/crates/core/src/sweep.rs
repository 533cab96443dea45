//! Angular BER sweeps and their CSV / PGM / JSON outputs.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::designer::{design, validate_schedule, DesignMode, DesignReport};
use crate::error::{invalid, Error, Result};
use crate::geometry::{Direction, OfdmConfig, SystemGeometry};
use crate::link::{BerEstimate, LinkConfig, LinkSimulator};
use crate::schedule::TmSchedule;

pub const DEFAULT_MAX_POINTS: usize = 1_000_000;

/// Offset added to BER values before taking the log for the heatmap.
pub const HEATMAP_EPSILON: f64 = 1e-10;

pub const CSV_HEADER: &str = "theta_deg,phi_deg,ber";

/// Inclusive range of angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl AngleRange {
    pub const fn new(start: f64, stop: f64, step: f64) -> Self {
        Self { start, stop, step }
    }

    /// A range holding the single value `at`.
    pub const fn single(at: f64) -> Self {
        Self::new(at, at, 1.0)
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(invalid(format!("{name} range has non-finite bounds")));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(invalid(format!("{name} step must be positive, got {}", self.step)));
        }
        if self.stop < self.start {
            return Err(invalid(format!(
                "{name} range [{}, {}] is empty",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        self.stop < self.start
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| self.start + k as f64 * self.step)
            .collect()
    }
}

/// Everything needed to design a schedule and sweep it over an angular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub geometry: SystemGeometry,
    pub ofdm: OfdmConfig,
    pub mode: DesignMode,
    pub design_seed: u64,
    pub link: LinkConfig,
    /// Elevation grid in degrees; rows of the map.
    pub theta_deg: AngleRange,
    /// Azimuth grid in degrees; columns of the map.
    pub phi_deg: AngleRange,
    pub max_points: usize,
}

impl SweepSpec {
    /// Reference geometry and numerology on the default 1-degree grid.
    pub fn reference(mode: DesignMode, link: LinkConfig) -> Self {
        Self {
            geometry: SystemGeometry::reference(),
            ofdm: OfdmConfig::default(),
            mode,
            design_seed: link.master_seed,
            link,
            theta_deg: AngleRange::new(0.0, 90.0, 1.0),
            phi_deg: AngleRange::new(-90.0, 90.0, 1.0),
            max_points: DEFAULT_MAX_POINTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.ofdm.validate()?;
        self.theta_deg.validate("elevation")?;
        self.phi_deg.validate("azimuth")?;
        if self.theta_deg.start < 0.0 || self.theta_deg.values().last().copied().unwrap_or(0.0) > 90.0 {
            return Err(invalid("elevation grid must stay within [0, 90] degrees"));
        }
        let (rows, cols) = self.grid_shape();
        let points = rows.saturating_mul(cols);
        if points > self.max_points {
            return Err(invalid(format!(
                "grid has {points} points, above the cap of {}",
                self.max_points
            )));
        }
        Ok(())
    }

    /// `(elevation count, azimuth count)`.
    pub fn grid_shape(&self) -> (usize, usize) {
        (self.theta_deg.len(), self.phi_deg.len())
    }

    /// Grid directions in row-major order (elevation-major).
    pub fn directions(&self) -> Result<Vec<Direction>> {
        let phis = self.phi_deg.values();
        self.theta_deg
            .values()
            .into_iter()
            .flat_map(|t| phis.iter().map(move |&p| Direction::from_degrees(t, p)))
            .collect()
    }

    pub fn design_schedule(&self) -> Result<TmSchedule> {
        design(&self.geometry, &self.mode, self.design_seed)
    }
}

/// Run metadata written next to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub mode: String,
    pub design: DesignMode,
    pub schedule_digest: String,
    pub n_subcarriers: usize,
    pub n_symbols: usize,
    pub snr_db: Option<f64>,
    pub equalizer: crate::link::Equalizer,
    pub theta_deg: AngleRange,
    pub phi_deg: AngleRange,
    pub rows: usize,
    pub cols: usize,
    pub runtime_s: f64,
}

/// BER over the angular grid, row-major with elevation as the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct BerMap {
    pub theta_deg: Vec<f64>,
    pub phi_deg: Vec<f64>,
    pub estimates: Vec<BerEstimate>,
    pub metadata: RunMetadata,
}

impl BerMap {
    pub fn rows(&self) -> usize {
        self.theta_deg.len()
    }

    pub fn cols(&self) -> usize {
        self.phi_deg.len()
    }

    pub fn at(&self, row: usize, col: usize) -> &BerEstimate {
        &self.estimates[row * self.cols() + col]
    }

    /// Grid coordinates `(theta_deg, phi_deg, estimate)` in row-major order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, &BerEstimate)> {
        let cols = self.cols();
        self.estimates
            .iter()
            .enumerate()
            .map(move |(i, e)| (self.theta_deg[i / cols], self.phi_deg[i % cols], e))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * self.estimates.len() + 32);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for (t, p, e) in self.points() {
            let _ = writeln!(out, "{t},{p},{}", e.ber);
        }
        out
    }

    /// 8-bit binary PGM: one pixel per grid point, row = elevation index,
    /// gray level linear in `log10(ber + 1e-10)` over `[-10, 0]`; black is
    /// the lowest BER.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.cols(), self.rows()).into_bytes();
        out.extend(self.estimates.iter().map(|e| heatmap_level(e.ber)));
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_file(path, self.to_csv().as_bytes())
    }

    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_pgm())
    }

    pub fn write_metadata(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.metadata)?;
        write_file(path, text.as_bytes())
    }
}

/// Gray level for one BER value.
pub fn heatmap_level(ber: f64) -> u8 {
    let v = (ber + HEATMAP_EPSILON).log10().clamp(-10.0, 0.0);
    ((v + 10.0) / 10.0 * 255.0).round() as u8
}

/// Writes `bytes` to `path`, mapping failures to [`Error::Io`].
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(bytes).map_err(io)
}

/// SHA-256 of the schedule's JSON layout, hex encoded.
pub fn schedule_digest(geometry: &SystemGeometry, schedule: &TmSchedule) -> Result<String> {
    let json = schedule.to_json(geometry)?;
    let digest = Sha256::digest(json.as_bytes());
    Ok(digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    }))
}

/// Result of [`run_sweep`].
pub struct SweepOutcome {
    pub schedule: TmSchedule,
    pub map: BerMap,
}

/// Designs the schedule and evaluates the BER at every grid point in
/// parallel. Grid point `k` (row-major) uses random stream `k`, so results
/// do not depend on evaluation order or thread count.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let schedule = spec.design_schedule()?;
    let map = sweep_schedule(spec, &schedule)?;
    Ok(SweepOutcome { schedule, map })
}

/// Evaluates an already designed schedule over the grid of `spec`.
pub fn sweep_schedule(spec: &SweepSpec, schedule: &TmSchedule) -> Result<BerMap> {
    spec.validate()?;
    let started = Instant::now();
    let directions = spec.directions()?;
    let sim = LinkSimulator::new(&spec.geometry, &spec.ofdm, schedule, &spec.link)?;
    let estimates: Vec<BerEstimate> = directions
        .par_iter()
        .enumerate()
        .map(|(k, dir)| sim.simulate(dir, k as u64))
        .collect();
    let (rows, cols) = spec.grid_shape();
    let metadata = RunMetadata {
        seed: spec.link.master_seed,
        mode: schedule.mode.name().to_string(),
        design: spec.mode,
        schedule_digest: schedule_digest(&spec.geometry, schedule)?,
        n_subcarriers: spec.ofdm.n_subcarriers,
        n_symbols: spec.ofdm.n_symbols,
        snr_db: spec.link.symbol_snr_db,
        equalizer: spec.link.equalizer,
        theta_deg: spec.theta_deg,
        phi_deg: spec.phi_deg,
        rows,
        cols,
        runtime_s: started.elapsed().as_secs_f64(),
    };
    Ok(BerMap {
        theta_deg: spec.theta_deg.values(),
        phi_deg: spec.phi_deg.values(),
        estimates,
        metadata,
    })
}

/// Designs the schedule of `spec` and checks it at the legitimate direction.
pub fn run_validate(spec: &SweepSpec) -> Result<(TmSchedule, DesignReport)> {
    spec.geometry.validate()?;
    spec.ofdm.validate()?;
    let schedule = spec.design_schedule()?;
    let report = validate_schedule(&spec.geometry, &spec.ofdm, &schedule)?;
    Ok((schedule, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::Equalizer;

    fn small_spec() -> SweepSpec {
        let link = LinkConfig::new(Some(0.0), Equalizer::GenieDiagonal, 4).unwrap();
        let mut spec = SweepSpec::reference(DesignMode::Planar { duration: 0.7 }, link);
        spec.ofdm.n_symbols = 8;
        spec.theta_deg = AngleRange::new(30.0, 50.0, 10.0);
        spec.phi_deg = AngleRange::new(20.0, 40.0, 5.0);
        spec
    }

    #[test]
    fn range_lengths() {
        assert_eq!(AngleRange::new(0.0, 90.0, 1.0).len(), 91);
        assert_eq!(AngleRange::new(0.0, 90.0, 2.0).len(), 46);
        assert_eq!(AngleRange::new(-90.0, 90.0, 2.0).len(), 91);
        assert_eq!(AngleRange::new(0.0, 1.0, 0.1).len(), 11);
        assert_eq!(AngleRange::single(40.0).values(), vec![40.0]);
        assert!(AngleRange::new(10.0, 0.0, 1.0).validate("azimuth").is_err());
        assert!(AngleRange::new(0.0, 10.0, 0.0).validate("azimuth").is_err());
    }

    #[test]
    fn cap_is_enforced_before_compute() {
        let mut spec = small_spec();
        spec.max_points = 14;
        assert!(matches!(run_sweep(&spec), Err(Error::InvalidInput(_))));
        spec.theta_deg = AngleRange::new(0.0, 95.0, 5.0);
        spec.max_points = DEFAULT_MAX_POINTS;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn csv_and_pgm_layout() {
        let spec = small_spec();
        let out = run_sweep(&spec).unwrap();
        let csv = out.map.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 1 + 15);
        assert!(lines[1].starts_with("30,20,"));
        assert!(lines[15].starts_with("50,40,"));

        let pgm = out.map.to_pgm();
        let header = b"P5\n5 3\n255\n";
        assert_eq!(&pgm[..header.len()], header);
        let pixels = &pgm[header.len()..];
        assert_eq!(pixels.len(), 15);
        assert_eq!(pixels[0], heatmap_level(out.map.at(0, 0).ber));
        assert_eq!(pixels[14], heatmap_level(out.map.at(2, 4).ber));
    }

    #[test]
    fn heatmap_levels() {
        assert_eq!(heatmap_level(0.0), 0);
        assert_eq!(heatmap_level(1.0), 255);
        assert_eq!(heatmap_level(1e-5), 128);
    }

    #[test]
    fn digest_is_stable_hex() {
        let spec = small_spec();
        let s = spec.design_schedule().unwrap();
        let a = schedule_digest(&spec.geometry, &s).unwrap();
        assert_eq!(a.len(), 64);
        assert_eq!(a, schedule_digest(&spec.geometry, &s).unwrap());
    }
}
