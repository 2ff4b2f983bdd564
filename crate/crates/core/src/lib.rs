//! Empirical mode decomposition with the classical envelope-mean sifting
//! function and the midpoint variant, which interpolates the signal at the
//! midpoints between consecutive extrema instead of averaging the max/min
//! envelopes.
//!
//! The crate is organised bottom-up:
//!
//! - [`signal`]: uniform grids, tone synthesis, norms and the signal CSV format.
//! - [`extrema`]: local extrema and midpoint detection.
//! - [`interp`]: natural cubic splines and piecewise Lagrange interpolants.
//! - [`sift`]: sifting functions, IMF extraction and full decomposition.
//! - [`spectral`]: tone projections and periodogram peaks.
//! - [`quad`]: adaptive Gauss–Kronrod quadrature and bracketed root finding.
//! - [`oracles`]: continuous-time checks of the projection, perturbation and
//!   convergence properties of both sifting functions.

pub mod error;
pub mod extrema;
pub mod interp;
pub mod oracles;
pub mod quad;
pub mod sift;
pub mod signal;
pub mod spectral;

pub use error::{EmdError, Result};
pub use extrema::{
    compute_midpoints, find_extrema, refine_extrema, ExtremaSet, Extremum, MidpointSet,
};
pub use interp::{
    fit_lagrange_covering, fit_lagrange_piecewise, fit_spline, fit_spline_with, Interpolant,
    InterpolantKind, Knots, SplineBoundary,
};
pub use sift::{
    decompose, extract_imf, sift_once, sifting_function, ConvergenceNorm, Decomposition,
    EnvelopeInterp, ExtremaLocation, Imf, SiftConfig, SiftMethod,
};
pub use signal::{
    make_grid, signal_norm, synthesize, NormKind, Point, SampledSignal, TimeGrid, Tone, ToneRecipe,
};
pub use spectral::{
    power_spectrum, project_onto_tone, spectral_peak_distance, ProjectionReport, SpectrumReport,
    Window,
};
