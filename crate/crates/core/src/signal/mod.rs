//! Synthetic scenarios, sampling, numerical differentiation and CSV I/O.

mod csv_io;
mod scenario;
mod series;

pub use csv_io::{fmt_num, read_csv, read_series, write_csv, write_series, write_table, TIME_JITTER_REL};
pub use scenario::{
    builtin_scenario, AmplitudeLaw, FrequencyLaw, Harmonic, WaveformScenario, BETA, BUILTIN_NAMES,
    OMEGA_O, V_NOMINAL,
};
pub use series::{
    derivative_stacks, differentiate, differentiate_with, sample_series, DerivativeSource,
    DerivedSeries, SampledSeries,
};
