//! Quasi-normal modes of de Sitter–Reissner–Nordström and de Sitter–Schwarzschild
//! black holes from a barrier-top Birkhoff normal form, with independent
//! numerical resonance solvers.

pub mod barrier;
pub mod bnf;
pub mod chart;
pub mod error;
pub mod geometry;
pub mod lattice;
pub mod numerics;
pub mod oracle;
pub mod scalar;

pub use error::{QnmError, Result};
pub use geometry::{HorizonKind, Model};

pub type BlackHoleParams = geometry::BlackHoleParams<f64>;
pub type HorizonData = geometry::HorizonData<f64>;
pub type Horizon = geometry::Horizon<f64>;
pub type BarrierExpansion = barrier::BarrierExpansion<f64>;
pub type BarrierLocation = barrier::BarrierLocation<f64>;
pub type Symbol = bnf::GradedSymbol<f64>;
pub type ExactSymbol = bnf::GradedSymbol<num_rational::BigRational>;
pub type SymbolicSymbol = bnf::GradedSymbol<bnf::ParamPoly>;
pub type BnfCoefficients = bnf::BnfCoefficients<f64>;
