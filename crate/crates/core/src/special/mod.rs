//! Special functions and quadrature used by the mode and channel code.

mod bessel;
mod gamma;
mod quadrature;
mod thermal;

pub use bessel::{
    bessel_mod_first, bessel_mod_first_scaled, bessel_mod_second, bessel_mod_second_integral,
    bessel_mod_second_scaled, bessel_mod_second_series,
};
pub(crate) use bessel::{BesselIOrder, BesselKOrder};
pub use gamma::{gamma, ln_gamma};
pub use quadrature::{
    adaptive_integrate, adaptive_integrate_many, Estimate, QuadratureSpec, VectorEstimate,
};
pub use thermal::{cross_weight, fermi_weight, squeeze_cos_sin};
