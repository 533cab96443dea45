//! Time-modulation schedule design.
//!
//! At the legitimate direction the conjugate weights remove every spatial
//! phase, so the harmonic at offset `i - s` is proportional to
//! `sum_mn exp(-j 2 pi (i - s) tau_mn)`. The designs below place the turn-on
//! instants on roots of unity so that sum vanishes:
//!
//! * linear mode: the `L` instants of every line are `offset + perm(q) / L`,
//!   cancelling every offset that is not a multiple of `L`;
//! * planar mode: all `M * N` instants are `offset + perm(q) / (M N)`,
//!   cancelling every offset that is not a multiple of `M * N`;
//! * enhanced mode: fresh linear draws every `hop_period` OFDM symbols.

use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{OfdmConfig, SystemGeometry};
use crate::harmonic::{HarmonicTable, UnitTmParams};
use crate::schedule::{LineOrientation, ScheduleMode, TmGrid, TmSchedule};

/// Minimum gap between two line durations drawn for the same grid.
pub const MIN_DURATION_SEPARATION: f64 = 1e-3;

/// Default interval for randomly drawn line durations.
pub const DEFAULT_DURATION_RANGE: (f64, f64) = (0.3, 0.9);

/// Residual below which an offset counts as cancelled.
pub const CANCELLATION_TOLERANCE: f64 = 1e-10;

const MAX_DRAW_ATTEMPTS: usize = 100_000;

/// How the per-line on-durations of a linear design are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DurationPolicy {
    /// Every line uses the same duration.
    Common(f64),
    /// Lines draw pairwise distinct durations uniformly from `[min, max]`.
    Distinct { min: f64, max: f64 },
}

/// Knobs of a linear-mode draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearOptions {
    pub durations: DurationPolicy,
    /// Use one permutation for every line instead of one per line.
    pub shared_permutation: bool,
    /// Draw a per-line offset in `[0, 1/L)`; otherwise all offsets are zero.
    pub random_offsets: bool,
}

impl Default for LinearOptions {
    fn default() -> Self {
        Self {
            durations: DurationPolicy::Distinct {
                min: DEFAULT_DURATION_RANGE.0,
                max: DEFAULT_DURATION_RANGE.1,
            },
            shared_permutation: false,
            random_offsets: true,
        }
    }
}

impl LinearOptions {
    /// One random order reused on every line, zero offsets and a single
    /// duration: the fixed pattern with the most pronounced sidelobes.
    pub fn uniform_lines(duration: f64) -> Self {
        Self {
            durations: DurationPolicy::Common(duration),
            shared_permutation: true,
            random_offsets: false,
        }
    }
}

/// Which family of schedules to generate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DesignMode {
    Linear {
        orientation: LineOrientation,
        options: LinearOptions,
    },
    Planar {
        duration: f64,
    },
    Enhanced {
        orientation: LineOrientation,
        hop_period: usize,
        n_hops: usize,
        duration_range: (f64, f64),
    },
}

impl DesignMode {
    pub fn schedule_mode(&self) -> ScheduleMode {
        match self {
            Self::Linear { orientation, .. } => ScheduleMode::linear(*orientation),
            Self::Planar { .. } => ScheduleMode::Planar,
            Self::Enhanced { orientation, .. } => ScheduleMode::enhanced(*orientation),
        }
    }
}

/// Generates a schedule for `mode` from `seed`.
pub fn design(geometry: &SystemGeometry, mode: &DesignMode, seed: u64) -> Result<TmSchedule> {
    match *mode {
        DesignMode::Linear {
            orientation,
            options,
        } => design_linear(geometry, orientation, &options, seed),
        DesignMode::Planar { duration } => design_planar(geometry, duration, seed),
        DesignMode::Enhanced {
            orientation,
            hop_period,
            n_hops,
            duration_range,
        } => design_enhanced(geometry, orientation, hop_period, n_hops, duration_range, seed),
    }
}

/// Unit weights `c_mn = conj(a_mn(legit) * a_mn(tx))`, row-major.
pub fn design_weights(geometry: &SystemGeometry) -> Vec<Complex64> {
    let (lr, lc) = geometry.separable_factors(&geometry.legit_direction);
    let (tr, tc) = geometry.separable_factors(&geometry.tx_direction);
    let mut w = Vec::with_capacity(geometry.n_units());
    for m in 0..geometry.irs_rows {
        for n in 0..geometry.irs_cols {
            let a = lr[m] * lc[n] * tr[m] * tc[n];
            // renormalize so |w| = 1 to machine precision
            w.push(a.conj() / a.norm());
        }
    }
    w
}

fn line_shape(geometry: &SystemGeometry, orientation: LineOrientation) -> (usize, usize) {
    match orientation {
        LineOrientation::Column => (geometry.irs_rows, geometry.irs_cols),
        LineOrientation::Row => (geometry.irs_cols, geometry.irs_rows),
    }
}

fn draw_distinct_durations(
    rng: &mut impl Rng,
    count: usize,
    min: f64,
    max: f64,
) -> Result<Vec<f64>> {
    check_duration_range(min, max)?;
    let needed = (count.saturating_sub(1)) as f64 * MIN_DURATION_SEPARATION;
    if max - min < 2.0 * needed {
        return Err(Error::Design(format!(
            "duration range [{min}, {max}] cannot supply {count} durations \
             separated by {MIN_DURATION_SEPARATION}"
        )));
    }
    let mut out: Vec<f64> = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > MAX_DRAW_ATTEMPTS {
            return Err(Error::Design(format!(
                "gave up drawing {count} distinct durations from [{min}, {max}]"
            )));
        }
        let d = rng.gen_range(min..=max);
        if out.iter().all(|x| (x - d).abs() >= MIN_DURATION_SEPARATION) {
            out.push(d);
        }
    }
    Ok(out)
}

fn check_duration_range(min: f64, max: f64) -> Result<()> {
    if !(min > 0.0 && max < 1.0 && min < max) {
        return Err(invalid(format!(
            "duration range [{min}, {max}] must be nonempty and strictly inside (0, 1)"
        )));
    }
    Ok(())
}

fn draw_linear_grid(
    geometry: &SystemGeometry,
    orientation: LineOrientation,
    options: &LinearOptions,
    rng: &mut impl Rng,
) -> Result<TmGrid> {
    let (n_lines, line_len) = line_shape(geometry, orientation);
    if line_len < 2 {
        return Err(invalid(format!(
            "linear {orientation:?} design needs at least two units per line, got {line_len}"
        )));
    }
    let durations = match options.durations {
        DurationPolicy::Common(d) => {
            if !(d > 0.0 && d <= 1.0) {
                return Err(invalid(format!("on-duration {d} outside (0, 1]")));
            }
            vec![d; n_lines]
        }
        DurationPolicy::Distinct { min, max } => draw_distinct_durations(rng, n_lines, min, max)?,
    };
    let base: Vec<usize> = (0..line_len).collect();
    let shared = options.shared_permutation.then(|| {
        let mut p = base.clone();
        p.shuffle(rng);
        p
    });
    let step = 1.0 / line_len as f64;

    let weights = design_weights(geometry);
    let mut turn_on = vec![0.0; geometry.n_units()];
    let mut duration = vec![0.0; geometry.n_units()];
    for (line, &d) in durations.iter().enumerate() {
        let perm = match &shared {
            Some(p) => p.clone(),
            None => {
                let mut p = base.clone();
                p.shuffle(rng);
                p
            }
        };
        let offset = if options.random_offsets {
            rng.gen_range(0.0..step)
        } else {
            0.0
        };
        for (q, &slot) in perm.iter().enumerate() {
            let (m, n) = match orientation {
                LineOrientation::Column => (line, q),
                LineOrientation::Row => (q, line),
            };
            let idx = m * geometry.irs_cols + n;
            turn_on[idx] = offset + slot as f64 / line_len as f64;
            duration[idx] = d;
        }
    }
    let units = (0..geometry.n_units())
        .map(|i| UnitTmParams::new(turn_on[i], duration[i], weights[i]))
        .collect::<Result<Vec<_>>>()?;
    TmGrid::new(geometry.irs_rows, geometry.irs_cols, units)
}

/// Linear-mode schedule.
///
/// For [`LineOrientation::Column`], each row `m` holds the `N` instants
/// `offset_m + perm_m(n) / N` and a single duration; `Row` is the transpose.
pub fn design_linear(
    geometry: &SystemGeometry,
    orientation: LineOrientation,
    options: &LinearOptions,
    seed: u64,
) -> Result<TmSchedule> {
    geometry.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = draw_linear_grid(geometry, orientation, options, &mut rng)?;
    Ok(TmSchedule::fixed(
        ScheduleMode::linear(orientation),
        grid,
        Some(seed),
    ))
}

/// Planar-mode schedule: a random permutation of `{q / (M N)}` plus a global
/// offset in `[0, 1 / (M N))`, one common duration.
pub fn design_planar(geometry: &SystemGeometry, duration: f64, seed: u64) -> Result<TmSchedule> {
    geometry.validate()?;
    let units = geometry.n_units();
    if units < 2 {
        return Err(invalid("planar design needs at least two IRS units"));
    }
    if !(duration > 0.0 && duration <= 1.0) {
        return Err(invalid(format!("on-duration {duration} outside (0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..units).collect();
    perm.shuffle(&mut rng);
    let offset = rng.gen_range(0.0..1.0 / units as f64);
    let weights = design_weights(geometry);
    let params = perm
        .iter()
        .zip(weights)
        .map(|(&q, w)| UnitTmParams::new(offset + q as f64 / units as f64, duration, w))
        .collect::<Result<Vec<_>>>()?;
    let grid = TmGrid::new(geometry.irs_rows, geometry.irs_cols, params)?;
    Ok(TmSchedule::fixed(ScheduleMode::Planar, grid, Some(seed)))
}

/// Enhanced linear mode: `n_hops` independent linear draws (fresh
/// permutations, offsets and distinct per-line durations), switched every
/// `hop_period` OFDM symbols. With `n_hops == 1` this is exactly
/// [`design_linear`] with default options over `duration_range`.
pub fn design_enhanced(
    geometry: &SystemGeometry,
    orientation: LineOrientation,
    hop_period: usize,
    n_hops: usize,
    duration_range: (f64, f64),
    seed: u64,
) -> Result<TmSchedule> {
    geometry.validate()?;
    if n_hops == 0 {
        return Err(invalid("enhanced mode needs at least one hop"));
    }
    if hop_period == 0 {
        return Err(invalid("hop period must be at least one OFDM symbol"));
    }
    let (min, max) = duration_range;
    check_duration_range(min, max)?;
    let options = LinearOptions {
        durations: DurationPolicy::Distinct { min, max },
        ..LinearOptions::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if n_hops == 1 {
        let grid = draw_linear_grid(geometry, orientation, &options, &mut rng)?;
        return Ok(TmSchedule::fixed(
            ScheduleMode::linear(orientation),
            grid,
            Some(seed),
        ));
    }
    let mut seen = HashSet::with_capacity(n_hops);
    let mut hops = Vec::with_capacity(n_hops);
    let mut attempts = 0;
    while hops.len() < n_hops {
        attempts += 1;
        if attempts > n_hops + MAX_DRAW_ATTEMPTS {
            return Err(Error::Design("could not draw enough distinct hops".into()));
        }
        let grid = draw_linear_grid(geometry, orientation, &options, &mut rng)?;
        if seen.insert(grid.canonical_key()) {
            hops.push(grid);
        }
    }
    ensure_distinct_hops(&hops)?;
    TmSchedule::hopping(
        ScheduleMode::enhanced(orientation),
        hops,
        hop_period,
        Some(seed),
    )
}

/// Fails if two grids carry the same parameter set (quantized to `1e-12`).
pub fn ensure_distinct_hops(hops: &[TmGrid]) -> Result<()> {
    let mut seen = HashSet::with_capacity(hops.len());
    for (i, g) in hops.iter().enumerate() {
        if !seen.insert(g.canonical_key()) {
            return Err(Error::Design(format!("hop {i} repeats an earlier parameter set")));
        }
    }
    Ok(())
}

/// Outcome of checking a schedule at the legitimate direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub mode: ScheduleMode,
    /// Max over hops and nonzero offsets of `|coeff(offset)| / |coeff(0)|`.
    pub max_offdiag_residual: f64,
    /// Same maximum restricted to offsets outside `surviving_offsets`.
    pub max_nonstructural_residual: f64,
    /// Offsets whose root-of-unity sum does not vanish, ascending.
    pub surviving_offsets: Vec<i64>,
    /// Smallest `|coeff(0)|` over hops.
    pub min_diagonal_magnitude: f64,
    pub hops_checked: usize,
}

impl DesignReport {
    /// True when every offset outside the structurally surviving set cancels.
    pub fn cancellation_ok(&self) -> bool {
        self.max_nonstructural_residual < CANCELLATION_TOLERANCE
    }
}

/// Root-of-unity sums of the instants of every cancellation group at
/// `offset`; returns the largest magnitude relative to the group size.
fn structural_sum(grid: &TmGrid, mode: ScheduleMode, offset: i64) -> Option<f64> {
    let term = |t: f64| Complex64::from_polar(1.0, -2.0 * PI * offset as f64 * t);
    let groups: Vec<Vec<f64>> = match mode.orientation() {
        Some(LineOrientation::Column) => (0..grid.rows())
            .map(|m| (0..grid.cols()).map(|n| grid.get(m, n).turn_on).collect())
            .collect(),
        Some(LineOrientation::Row) => (0..grid.cols())
            .map(|n| (0..grid.rows()).map(|m| grid.get(m, n).turn_on).collect())
            .collect(),
        None if mode == ScheduleMode::Planar => {
            vec![grid.units().iter().map(|u| u.turn_on).collect()]
        }
        None => return None,
    };
    Some(
        groups
            .iter()
            .map(|g| g.iter().map(|&t| term(t)).sum::<Complex64>().norm() / g.len() as f64)
            .fold(0.0, f64::max),
    )
}

/// Checks that the operator at the legitimate direction is diagonal up to
/// the offsets the design cannot cancel.
///
/// Surviving offsets come from the design's root-of-unity sums (per line
/// for linear modes, over the surface for planar). Custom grids have no
/// structure to consult, so an offset survives when its residual exceeds
/// [`CANCELLATION_TOLERANCE`].
pub fn validate_schedule(
    geometry: &SystemGeometry,
    ofdm: &OfdmConfig,
    schedule: &TmSchedule,
) -> Result<DesignReport> {
    schedule.check_geometry(geometry)?;
    let legit = geometry.legit_direction;
    let mut surviving = std::collections::BTreeSet::new();
    let mut max_res: f64 = 0.0;
    let mut min_diag = f64::INFINITY;
    let mut ops = Vec::with_capacity(schedule.grids().len());
    for grid in schedule.grids() {
        let op = HarmonicTable::new(geometry, ofdm, grid)?.operator(&legit);
        let diag = op.diagonal().norm();
        min_diag = min_diag.min(diag);
        for offset in op.offsets().filter(|&o| o != 0) {
            let ratio = relative(op.coeff(offset).norm(), diag);
            max_res = max_res.max(ratio);
            let survives = match structural_sum(grid, schedule.mode, offset) {
                Some(s) => s > CANCELLATION_TOLERANCE,
                None => ratio >= CANCELLATION_TOLERANCE,
            };
            if survives {
                surviving.insert(offset);
            }
        }
        ops.push(op);
    }
    let max_nonstructural = ops
        .iter()
        .flat_map(|op| {
            let diag = op.diagonal().norm();
            op.offsets()
                .filter(|o| *o != 0 && !surviving.contains(o))
                .map(move |o| relative(op.coeff(o).norm(), diag))
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);
    Ok(DesignReport {
        mode: schedule.mode,
        max_offdiag_residual: max_res,
        max_nonstructural_residual: max_nonstructural,
        surviving_offsets: surviving.into_iter().collect(),
        min_diagonal_magnitude: min_diag,
        hops_checked: ops.len(),
    })
}

fn relative(value: f64, reference: f64) -> f64 {
    if value == 0.0 {
        0.0
    } else {
        value / reference
    }
}
