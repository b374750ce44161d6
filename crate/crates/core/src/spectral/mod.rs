//! Periodic-grid Fourier infrastructure: grids, fields, Fourier multipliers,
//! Sobolev norms, the free propagator, the scaling map and mixed
//! space-time norms.

mod field;
pub mod fourier;
mod grid;
mod mixed;
mod ops;
mod working;

pub use field::{ComplexField, EDGE_DECAY_LIMIT};
pub use grid::{GridSpec, MIN_POINTS};
pub use mixed::{mixed_norm, MixedNormSpec, OuterVariable, Trajectory};
pub use ops::{
    apply_multiplier, dealias_in_place, derivative, fractional_derivative, free_propagate,
    line_sobolev_norm, rescale, sobolev_norm, spectral_antiderivative, RESCALE_RANGE,
    SOBOLEV_RANGE,
};
pub use working::{
    xt_norm, xt_prefix_curve, xt_terms, XtAccumulator, XtTerms, DEFAULT_N0, DEFAULT_Q_GRID,
};

pub(crate) use mixed::trapezoid_weights;
pub(crate) use ops::symbol;
