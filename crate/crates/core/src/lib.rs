//! Counting lattice points on high-dimensional discrete spheres and balls,
//! together with the analytic machinery that goes with them: saddle-point
//! asymptotics for the counts, Krawtchouk polynomials, combinatorial Fourier
//! multipliers on the torus, discrete diffusion semigroups, finite-torus
//! simulation of the associated averaging operators, and a multi-parameter
//! Rademacher-Menshov inequality with its dyadic interval decomposition.
//!
//! Everything that can be exact is exact: shell counts are arbitrary-precision
//! integers, Krawtchouk values and series coefficients are big rationals, and
//! floating point only enters where transcendental functions force it.

pub mod bounds;
pub mod comb;
pub mod counting;
pub mod error;
pub mod krawtchouk;
pub mod multiplier;
pub mod rm;
pub mod saddle;
pub mod series;
pub mod torus;

pub use bounds::{check_bounds, BoundReport, BoundSuite};
pub use counting::{
    ball_count, brute_force_shell, concentration_report, d_count, enumerate_dnbar, sphere_count,
    theta_coeffs, Cap, CoefficientSeries, ConcentrationReport, CountTable, MultiIndex,
};
pub use error::{Error, Result};
pub use krawtchouk::{kr, kr_row, uniform_bound_c, uniform_bound_holds};
pub use multiplier::{
    beta_bruteforce, beta_eval, beta_table, delta_beta, delta_beta_formula, p_tilde,
    semigroup_symbol, spherical_symbol, BetaTable, DifferenceSpec, MultiplierValue, SphericalSplit,
    TorusPoint,
};
pub use rm::{dyadic_decompose, rm_check, rm_check_random, DyadicDecomposition, RmReport};
pub use saddle::{
    b_coeffs, binom_estimate, estimate_table, inversion_coeffs, log_estimate, solve_saddle,
    EstimateRow, SaddleSolution, SeriesCoefficients, SeriesKind, Theta,
};
pub use torus::{
    apply, empirical_norm_ratio, make_kernel, maximal_function, verify_semigroup_properties,
    KernelKind, KernelSpec, NormRatioReport, SemigroupReport, TorusFunction,
};
