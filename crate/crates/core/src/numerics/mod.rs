//! Numerical building blocks shared by the chart and the oracles.

pub mod fit;
pub mod ode;
pub mod quadrature;
pub mod spectral;
pub mod zeros;
