//! Numerical probes of univalence along rays `t ↦ tφ` in the Bers embedding.
//!
//! * [`series`]: truncated Taylor, exterior and bivariate series.
//! * [`schwarzian`]: Schwarzians, hyperbolic norms and univalence gates.
//! * [`grunsky`]: Grunsky coefficients, truncated norms and certificates.
//! * [`ode`]: maps with prescribed Schwarzian and boundary diagnostics.
//! * [`beltrami`]: Ahlfors–Weill coefficients and extremality pairings.
//! * [`polygon`]: polygon exterior maps and their Schwarzians.
//! * [`probe`]: ray scans, job files and reports.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod beltrami;
pub mod grunsky;
pub mod ode;
pub mod polygon;
pub mod probe;
pub mod scalar;
pub mod schwarzian;
pub mod series;

pub use beltrami::{
    a1sq_lower_bound, aw_coefficient, extremality_lower_bound, BeltramiError, BeltramiField,
    Convention, DiskQuadrature, HarmonicBeltrami, PairingBound, TeichmullerType, TrialBasis,
    TrialKind,
};
pub use grunsky::{
    grunsky_from_map, grunsky_norm, grunsky_scale, univalence_certificate, Certificate,
    GrunskyCoefficients, GrunskyError, GrunskyMatrix, GrunskyNorm, PowerConfig,
};
pub use ode::{
    germ_at_infinity, injectivity_test, schwarzian_roundtrip, solve_schwarz, Injectivity,
    MapBoundarySamples, OdeError, SchwarzSolution, SolverConfig,
};
pub use polygon::{
    circular_polygon_schwarzian, regular_ngon_exterior_map, werner_value, PolygonError, PolygonSpec,
};
pub use probe::{
    emit_report, run_job, run_ray_scan, JobError, JobSpec, RayScanRecord, ReportFormat, ScanReport,
};
pub use scalar::{Cx, Real};
pub use schwarzian::{
    bnorm_grid, bnorm_rational_boundary, schwarzian_of_series, univalence_gate, Domain, Evaluate,
    Gate, GridConfig, HyperbolicNorm, RationalSchwarzian, SchwarzianError, SchwarzianSource,
    SeriesAtInfinity,
};
pub use series::{BivariateSeries, ExteriorSeries, SeriesError, TaylorSeries};

pub type C64 = Cx<f64>;
pub type TaylorSeries64 = TaylorSeries<f64>;
pub type ExteriorSeries64 = ExteriorSeries<f64>;
pub type RationalSchwarzian64 = RationalSchwarzian<f64>;
pub type GrunskyMatrix64 = GrunskyMatrix<f64>;
pub type MapBoundarySamples64 = MapBoundarySamples<f64>;
pub type TrialBasis64 = TrialBasis<f64>;
