//! OFDM directional modulation with a time-modulated intelligent
//! reflecting surface (TM-IRS).
//!
//! Every IRS unit is switched on for a fraction of each OFDM symbol. The
//! periodic gating creates harmonics at multiples of the subcarrier spacing,
//! so each received subcarrier becomes a weighted mix of all transmitted
//! subcarriers. The on/off schedule and the unit weights are chosen so the
//! mixing cancels toward one direction and scrambles the data everywhere
//! else.
//!
//! * [`geometry`]: surface and transmitter layout, OFDM numerology, array factors.
//! * [`harmonic`]: gate Fourier coefficients and the per-direction scrambling operator.
//! * [`designer`]: linear, planar and hopping schedule designs, and their validation.
//! * [`oracle`]: time-domain matched-filter reference for the harmonic engine.
//! * [`link`]: QPSK Monte Carlo with receiver noise and bit-error counting.
//! * [`sweep`]: angular BER maps with CSV, PGM and JSON output.
//! * [`config`]: JSON configuration in degrees.

pub mod config;
pub mod designer;
pub mod error;
pub mod geometry;
pub mod harmonic;
pub mod link;
pub mod oracle;
pub mod schedule;
pub mod sweep;

pub use designer::{
    design, design_enhanced, design_linear, design_planar, design_weights, validate_schedule,
    DesignMode, DesignReport, DurationPolicy, LinearOptions,
};
pub use error::{Error, Result};
pub use geometry::{array_factor, transmit_gain, Direction, OfdmConfig, SystemGeometry};
pub use harmonic::{
    gate_fourier_coeff, harmonic_coeff, scramble, scrambling_operator, HarmonicTable,
    ScramblingOperator, UnitTmParams,
};
pub use link::{
    qpsk_demodulate, qpsk_modulate, simulate_direction, theoretical_legit_gain, BerEstimate,
    Equalizer, LinkConfig, LinkSimulator,
};
pub use oracle::{demod_exact, demod_sampled, verify_random_instances, OracleInstance};
pub use schedule::{LineOrientation, ScheduleMode, TmGrid, TmSchedule};
pub use sweep::{run_sweep, run_validate, AngleRange, BerMap, SweepSpec};
