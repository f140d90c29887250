//! Minimum-energy labelings when no pattern has a positive energy.

mod fft;
mod solver;

pub use fft::{
    assemble_f_via_fft, correlate, correlate_direct, correlate_fft, fft_pattern_costs, indicator, placement_energies,
    PatternCostTable, FFT_MIN_N, FFT_MIN_P,
};
pub use solver::{check_nonpositive, map_nonpositive, Choice, Energy, MapMessages, MapModel, MapOptions, MapSolution};
