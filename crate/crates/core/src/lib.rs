//! Stationary measures of a source/sink quantum walk on a finite path.
//!
//! A two-state coined walk runs on sites 0..M with a unit source feeding the
//! right-mover at site 0 and both ends absorbing. Driven at frequency xi, the
//! field relaxes to a fixed point whose site profile ("comfortability") this
//! crate computes two independent ways:
//!
//! * closed form, via Chebyshev second-kind recurrences ([`stationary`]),
//! * direct time evolution or a dense linear solve ([`dynamics`]).
//!
//! The [`limit`] module holds the weak limit laws of the rescaled profile
//! (cubic, sine-squared, uniform, geometric) together with Kolmogorov-Smirnov
//! diagnostics measuring how fast finite paths approach them.
//!
//! ```
//! use qwalk_core::{comfortability, Coin};
//!
//! let coin = Coin::hadamard();
//! let omega = std::f64::consts::FRAC_PI_4; // band boundary for Hadamard
//! let energy = comfortability(2, &coin, omega).unwrap();
//! assert!((energy - 1.6).abs() < 1e-12);
//! ```

pub mod coin;
pub mod dynamics;
pub mod error;
pub mod limit;
pub mod stationary;

pub use num_complex::Complex64;

pub use coin::{
    classify_regime, lambda_roots, omega_of, theta_of, xi_from_theta, Branch, Coin, Region,
    RegimeKind, RegimeParams, WalkConfig, DEFAULT_REGIME_EPS,
};
pub use dynamics::{
    eigen_residual, empirical_distribution, run_until_stationary, solve_fixed_point, ChiralPair,
    StationaryRun, WalkState,
};
pub use error::Error;
pub use limit::{
    c_norm, convergence_sweep, geometric_limit_pmf, konno_density, ks_distance, limit_cdf,
    limit_density, select_limit_law, sweep_row, LimitLaw, Scaling, SweepRow, SMALL_THETA_STAR,
};
pub use stationary::{
    ab_form, comfortability, site_relative_probability, stationary_distribution, StationaryProfile,
};
