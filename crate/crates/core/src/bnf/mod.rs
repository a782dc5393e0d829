//! Graded symbol algebra with the Moyal product and the quantum Birkhoff
//! normal form at a hyperbolic fixed point.

pub mod coefficient;
pub mod energy;
pub mod normal_form;
pub mod symbol;

pub use coefficient::{Coefficient, ParamPoly};
pub use energy::{
    effective_order, energy_expansion, energy_series, energy_series_raw, max_energy_order,
    star_powers, weyl_to_star,
};
pub use normal_form::{
    barrier_normal_form, model_symbol, normal_form_for_order, normalize_hamiltonian, printed_c2,
    printed_d0, reduce_to_normal_form, theorem_b02, B12Candidates, BnfCoefficients, BnfEntry,
    ClosedForms, ModelCoefficients, NamedCoefficient, NormalizationRecord, NormalizedHamiltonian,
    Provenance,
};
pub use symbol::{Basis, ComplexSymbol, GradedSymbol, Monomial};

pub fn moyal_bracket<C: Coefficient>(
    a: &GradedSymbol<C>,
    b: &GradedSymbol<C>,
    j: u32,
) -> GradedSymbol<C> {
    a.moyal_bracket(b, j)
}
