//! Robust probability on finite sample spaces: models given by families of
//! priors, quasi-sure analysis, localization of risk measures, one-period
//! superhedging and the robust FTAP, robust optimization by aggregation, and
//! exact interval-mixture examples on `(0, 1)`.
//!
//! Every algorithm is generic over [`Scalar`]; [`Rational`] is the exact
//! default used by the CLI and the acceptance suite.

pub mod acceptance;
pub mod continuum;
pub mod gen;
pub mod linalg;
pub mod lp;
pub mod market;
pub mod model;
pub mod optimize;
pub mod oracle;
pub mod outcomes;
pub mod risk;
pub mod scalar;
pub mod sensitivity;

pub use num_rational::{BigRational, Rational64};

pub use lp::{LinearProgram, LpError, LpOutcome, Relation, Sense};
pub use market::{MarketError, MarketModel, MartingaleSelector, Strategy};
pub use model::{ModelError, ProbabilityMeasure, QView, RandomVariable, RobustModel, SignedMeasure};
pub use optimize::OptimizeError;
pub use outcomes::OutcomeSet;
pub use risk::{Constraint, MaxAffineRiskMeasure, RiskError};
pub use scalar::{Extended, Scalar};
pub use sensitivity::{FiniteRvSet, RvFamily, SensitivityError};

/// Exact arbitrary-precision rationals.
pub type Rational = BigRational;
/// Random variable over exact rationals.
pub type Rv = RandomVariable<Rational>;
/// Robust model over exact rationals.
pub type Model = RobustModel<Rational>;
/// Market over exact rationals.
pub type Market = MarketModel<Rational>;
