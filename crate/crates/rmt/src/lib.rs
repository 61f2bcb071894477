//! Finite-dimensional Monte Carlo model: Brownian motion on `U(d)`,
//! symmetries with prescribed traces, and empirical spectra of
//! `R U_t S U_t*` and `P U_t Q U_t* P`.

pub mod empirical;
pub mod symmetry;
pub mod unitary;

pub use empirical::{
    empirical_jacobi, empirical_jacobi_from, empirical_nu, empirical_nu_from, jacobi_spectrum, nu_angles,
    sample_config, sample_paths, EmpiricalJacobi, EmpiricalNu, McConfig,
};
pub use symmetry::{haar_unitary, make_symmetry_pair, Structure, SymmetryPair};
pub use unitary::{exp_i_hermitian, sample_unitary_bm, unitarity_defect, CMat};
