//! Free liberation of a pair of symmetries: the spectral law `ν_t` of
//! `R U_t S U_t*`, computed along the characteristics of the radial flow.

pub mod chart;
pub mod density;
pub mod flow;
pub mod params;
pub mod stationary;

pub use chart::{exit_chart, ExitChart};
pub use density::{boundary_k, kappa_density, nu_t, nu_t_detailed, support_estimate, BoundarySolver, DEFAULT_NODES, FlowHerglotz, NuOptions, NuResult};
pub use flow::{characteristic_flow, k0_eval, k0_squared, v_eval, CharacteristicRecord, Flow};
pub use params::LiberationParams;
pub use stationary::{stationary_arcs, stationary_density, stationary_measure};
