//! Nonparametric survival analysis with a cure fraction.
//!
//! The crate is organised bottom-up:
//!
//! - [`sample_io`]: per-subject records, CSV ingestion and validation
//! - [`km`]: product-limit curves, step-function evaluation and the
//!   censoring-adjusted risk table
//! - [`cure_rate`]: tail and extrapolated cure-fraction estimators, and
//!   bootstrap selection of the extrapolation scale
//! - [`susceptible`]: latency (susceptible) survival curves, the risk-set
//!   susceptible proportion and the self-consistency check
//! - [`tau`]: two-sample tau processes and their population functionals
//! - [`inference`]: seeded bootstrap, normal intervals and the cure-rate
//!   difference test
//! - [`simlab`]: mixture-cure scenario generators and the Monte Carlo
//!   experiment runner

pub mod cure_rate;
pub mod dist;
pub mod inference;
pub mod km;
pub mod quadrature;
pub mod rng;
pub mod sample_io;
pub mod simlab;
pub mod sum;
pub mod susceptible;
pub mod tau;

pub use cure_rate::{CureMethod, CureRateEstimate};
pub use km::{RiskTable, Side, StepFunction};
pub use sample_io::{Arm, Sample, Subject};
pub use susceptible::SusceptibleCurve;
pub use tau::{TauCurve, TauKind};
