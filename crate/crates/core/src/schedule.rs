//! Time-modulation schedules and their JSON layout.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::GeometryConfig;
use crate::error::{invalid, Error, Result};
use crate::geometry::SystemGeometry;
use crate::harmonic::UnitTmParams;

/// Which IRS dimension a linear-mode design cancels along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineOrientation {
    /// Turn-on instants spread over the `N` units of each fixed row `m`;
    /// one duration per row.
    Column,
    /// Turn-on instants spread over the `M` units of each fixed column `n`;
    /// one duration per column.
    Row,
}

/// Tag recording how a schedule was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMode {
    LinearColumn,
    LinearRow,
    Planar,
    EnhancedColumn,
    EnhancedRow,
    /// Hand-built grid with no structural guarantee.
    Custom,
}

impl ScheduleMode {
    pub fn linear(orientation: LineOrientation) -> Self {
        match orientation {
            LineOrientation::Column => Self::LinearColumn,
            LineOrientation::Row => Self::LinearRow,
        }
    }

    pub fn enhanced(orientation: LineOrientation) -> Self {
        match orientation {
            LineOrientation::Column => Self::EnhancedColumn,
            LineOrientation::Row => Self::EnhancedRow,
        }
    }

    /// Line orientation of linear and enhanced schedules.
    pub fn orientation(&self) -> Option<LineOrientation> {
        match self {
            Self::LinearColumn | Self::EnhancedColumn => Some(LineOrientation::Column),
            Self::LinearRow | Self::EnhancedRow => Some(LineOrientation::Row),
            Self::Planar | Self::Custom => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::LinearColumn => "linear_column",
            Self::LinearRow => "linear_row",
            Self::Planar => "planar",
            Self::EnhancedColumn => "enhanced_column",
            Self::EnhancedRow => "enhanced_row",
            Self::Custom => "custom",
        }
    }
}

/// `M x N` grid of unit parameters, stored row-major (`m * N + n`).
#[derive(Debug, Clone, PartialEq)]
pub struct TmGrid {
    rows: usize,
    cols: usize,
    units: Vec<UnitTmParams>,
}

impl TmGrid {
    pub fn new(rows: usize, cols: usize, units: Vec<UnitTmParams>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid("grid must be at least 1x1"));
        }
        if units.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} units", rows * cols),
                actual: format!("{} units", units.len()),
            });
        }
        for u in &units {
            u.validate()?;
        }
        Ok(Self { rows, cols, units })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn get(&self, m: usize, n: usize) -> &UnitTmParams {
        &self.units[m * self.cols + n]
    }

    pub fn units(&self) -> &[UnitTmParams] {
        &self.units
    }

    /// `(m, n, params)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &UnitTmParams)> {
        let cols = self.cols;
        self.units
            .iter()
            .enumerate()
            .map(move |(i, p)| (i / cols, i % cols, p))
    }

    /// Copy of the grid with every duration replaced.
    pub fn with_duration(&self, duration: f64) -> Result<Self> {
        let units = self
            .units
            .iter()
            .map(|u| UnitTmParams::new(u.turn_on, duration, u.weight))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { units, ..*self })
    }

    /// Copy of the grid with every weight multiplied by `rotation`.
    pub fn rotate_weights(&self, rotation: Complex64) -> Self {
        let units = self
            .units
            .iter()
            .map(|u| UnitTmParams {
                weight: u.weight * rotation,
                ..*u
            })
            .collect();
        Self { units, ..*self }
    }

    pub fn check_geometry(&self, geometry: &SystemGeometry) -> Result<()> {
        if self.rows != geometry.irs_rows || self.cols != geometry.irs_cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{} grid", geometry.irs_rows, geometry.irs_cols),
                actual: format!("{}x{} grid", self.rows, self.cols),
            });
        }
        Ok(())
    }

    /// Parameters quantized to a `1e-12` lattice, used to decide whether two
    /// grids are the same parameter set.
    pub fn canonical_key(&self) -> Vec<i64> {
        const Q: f64 = 1e12;
        self.units
            .iter()
            .flat_map(|u| {
                [u.turn_on, u.duration, u.weight.re, u.weight.im]
                    .map(|x| (x * Q).round() as i64)
            })
            .collect()
    }
}

/// A static grid, or a sequence of grids that hop every `hop_period` OFDM symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct TmSchedule {
    pub mode: ScheduleMode,
    grid: TmGrid,
    hops: Vec<TmGrid>,
    hop_period: usize,
    pub seed: Option<u64>,
}

impl TmSchedule {
    pub fn fixed(mode: ScheduleMode, grid: TmGrid, seed: Option<u64>) -> Self {
        Self {
            mode,
            grid,
            hops: Vec::new(),
            hop_period: 0,
            seed,
        }
    }

    pub fn hopping(
        mode: ScheduleMode,
        hops: Vec<TmGrid>,
        hop_period: usize,
        seed: Option<u64>,
    ) -> Result<Self> {
        if hop_period == 0 {
            return Err(invalid("hop period must be at least one OFDM symbol"));
        }
        let first = hops
            .first()
            .ok_or_else(|| invalid("hop sequence is empty"))?
            .clone();
        if hops
            .iter()
            .any(|g| g.rows != first.rows || g.cols != first.cols)
        {
            return Err(invalid("hop grids differ in size"));
        }
        Ok(Self {
            mode,
            grid: first,
            hops,
            hop_period,
            seed,
        })
    }

    /// The static grid, or the first hop.
    pub fn grid(&self) -> &TmGrid {
        &self.grid
    }

    pub fn hops(&self) -> &[TmGrid] {
        &self.hops
    }

    pub fn is_hopping(&self) -> bool {
        !self.hops.is_empty()
    }

    /// Hop period in OFDM symbols; `None` for static schedules.
    pub fn hop_period(&self) -> Option<usize> {
        self.is_hopping().then_some(self.hop_period)
    }

    /// Every distinct grid the schedule cycles through.
    pub fn grids(&self) -> &[TmGrid] {
        if self.hops.is_empty() {
            std::slice::from_ref(&self.grid)
        } else {
            &self.hops
        }
    }

    /// Index into [`Self::grids`] active during OFDM symbol `symbol`.
    /// The hop list repeats once exhausted.
    pub fn grid_index(&self, symbol: usize) -> usize {
        if self.hops.is_empty() {
            0
        } else {
            (symbol / self.hop_period) % self.hops.len()
        }
    }

    pub fn grid_for_symbol(&self, symbol: usize) -> &TmGrid {
        &self.grids()[self.grid_index(symbol)]
    }

    pub fn check_geometry(&self, geometry: &SystemGeometry) -> Result<()> {
        self.grids().iter().try_for_each(|g| g.check_geometry(geometry))
    }

    /// Serializes the schedule, echoing `geometry` in degrees.
    pub fn to_json(&self, geometry: &SystemGeometry) -> Result<String> {
        let doc = ScheduleDocument {
            geometry: GeometryConfig::from_geometry(geometry),
            mode: self.mode,
            seed: self.seed,
            hop_period: self.hop_period(),
            grid: GridDocument::from_grid(&self.grid),
            hops: self.hops.iter().map(GridDocument::from_grid).collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<(SystemGeometry, Self)> {
        let doc: ScheduleDocument = serde_json::from_str(text)?;
        let geometry = doc.geometry.to_geometry()?;
        let grid = doc.grid.to_grid()?;
        let schedule = if doc.hops.is_empty() {
            Self::fixed(doc.mode, grid, doc.seed)
        } else {
            let hops = doc
                .hops
                .iter()
                .map(GridDocument::to_grid)
                .collect::<Result<Vec<_>>>()?;
            let period = doc
                .hop_period
                .ok_or_else(|| invalid("hop list present without hop_period"))?;
            Self::hopping(doc.mode, hops, period, doc.seed)?
        };
        schedule.check_geometry(&geometry)?;
        Ok((geometry, schedule))
    }
}

/// On-disk schedule layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleDocument {
    pub geometry: GeometryConfig,
    pub mode: ScheduleMode,
    pub seed: Option<u64>,
    pub hop_period: Option<usize>,
    pub grid: GridDocument,
    #[serde(default)]
    pub hops: Vec<GridDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridDocument {
    pub rows: usize,
    pub cols: usize,
    pub units: Vec<UnitDocument>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct UnitDocument {
    pub m: usize,
    pub n: usize,
    pub tau_on: f64,
    pub delta_tau: f64,
    pub weight_re: f64,
    pub weight_im: f64,
}

impl GridDocument {
    fn from_grid(grid: &TmGrid) -> Self {
        Self {
            rows: grid.rows,
            cols: grid.cols,
            units: grid
                .iter()
                .map(|(m, n, p)| UnitDocument {
                    m,
                    n,
                    tau_on: p.turn_on,
                    delta_tau: p.duration,
                    weight_re: p.weight.re,
                    weight_im: p.weight.im,
                })
                .collect(),
        }
    }

    fn to_grid(&self) -> Result<TmGrid> {
        let mut slots: Vec<Option<UnitTmParams>> = vec![None; self.rows * self.cols];
        for u in &self.units {
            if u.m >= self.rows || u.n >= self.cols {
                return Err(invalid(format!("unit ({}, {}) outside grid", u.m, u.n)));
            }
            let slot = &mut slots[u.m * self.cols + u.n];
            if slot.is_some() {
                return Err(invalid(format!("unit ({}, {}) listed twice", u.m, u.n)));
            }
            *slot = Some(UnitTmParams::new(
                u.tau_on,
                u.delta_tau,
                Complex64::new(u.weight_re, u.weight_im),
            )?);
        }
        let units = slots
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| invalid("grid is missing units"))?;
        TmGrid::new(self.rows, self.cols, units)
    }
}
