//! Weak limit laws of the rescaled comfortability profile, the Konno
//! comparison density, and Kolmogorov-Smirnov convergence diagnostics.
//!
//! On the rescaled axis x = n/M the profile converges to a point mass (deep
//! Bout), the cubic density 3(1-x)^2 (band boundary), the normalized
//! sine-squared family c(theta*) sin^2((1-x) theta*) (oscillatory band under
//! M theta -> theta* scaling), or the uniform density (fixed frequency in the
//! band). Deep Bout is quantitative only on the unscaled site axis, where the
//! profile tends to the geometric pmf (1 - lambda_+^{-2}) lambda_+^{-2j}.

use std::fmt;

use crate::coin::{
    lambda_roots, omega_of, xi_from_theta, Branch, Coin, Region, RegimeKind, RegimeParams,
    DEFAULT_REGIME_EPS,
};
use crate::error::Error;
use crate::stationary::{stationary_distribution, StationaryProfile};

/// Below this theta*, the closed forms for c(theta*) and F_{theta*} lose all
/// digits to cancellation and Taylor forms take over.
pub const SMALL_THETA_STAR: f64 = 1e-4;

/// A limit law on the rescaled interval `[0,1]`, except for `Geometric`, which
/// lives on the raw site axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitLaw {
    /// Unit mass at x = 0; the rescaled shadow of the Bout regime.
    PointMass,
    /// Density 3(1-x)^2.
    Cubic,
    /// Density c(theta*) sin^2((1-x) theta*), 0 < theta* < infinity.
    SineSquared { theta_star: f64 },
    /// Density 1 on `[0,1]`.
    Uniform,
    /// pmf (1 - lambda_+^{-2}) lambda_+^{-2j} on sites j = 0, 1, ...
    Geometric { lambda_plus: f64 },
}

impl LimitLaw {
    /// Panics unless 0 < theta* < infinity.
    pub fn sine_squared(theta_star: f64) -> Self {
        assert!(
            theta_star > 0.0 && theta_star.is_finite(),
            "SineSquared requires 0 < theta_star < infinity"
        );
        LimitLaw::SineSquared { theta_star }
    }

    /// Panics unless |lambda_plus| > 1.
    pub fn geometric(lambda_plus: f64) -> Self {
        assert!(lambda_plus.abs() > 1.0, "Geometric requires |lambda_plus| > 1");
        LimitLaw::Geometric { lambda_plus }
    }
}

impl fmt::Display for LimitLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitLaw::PointMass => f.write_str("point-mass"),
            LimitLaw::Cubic => f.write_str("cubic"),
            LimitLaw::SineSquared { theta_star } => write!(f, "sine-squared(theta*={theta_star})"),
            LimitLaw::Uniform => f.write_str("uniform"),
            LimitLaw::Geometric { lambda_plus } => write!(f, "geometric(lambda+={lambda_plus})"),
        }
    }
}

/// How the driving frequency is tied to M in a limit experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scaling {
    /// xi held constant; theta (if any) stays of order one.
    FixedXi(f64),
    /// theta = theta*/M, so M theta -> theta*; xi derived per M.
    ThetaStarOverM(f64),
}

/// The law the profile converges to under the given regime and scaling.
///
/// The point mass is never auto-selected: on the rescaled axis the Bout
/// profile degenerates to it, but the quantitative statement is the
/// geometric law on raw sites, so that is what fixed-frequency Bout returns.
pub fn select_limit_law(params: &RegimeParams, scaling: Scaling) -> Result<LimitLaw, Error> {
    match scaling {
        Scaling::FixedXi(_) => Ok(match params.kind() {
            RegimeKind::Bout { lambda_plus, .. } => LimitLaw::geometric(lambda_plus),
            RegimeKind::Boundary => LimitLaw::Cubic,
            RegimeKind::Bin { .. } => LimitLaw::Uniform,
        }),
        Scaling::ThetaStarOverM(theta_star) => match params.region() {
            Region::Bout => Err(Error::InconsistentScaling { region: Region::Bout }),
            Region::Boundary => Ok(LimitLaw::Cubic),
            Region::Bin => Ok(if theta_star == 0.0 {
                LimitLaw::Cubic
            } else if theta_star.is_infinite() {
                LimitLaw::Uniform
            } else {
                LimitLaw::sine_squared(theta_star)
            }),
        },
    }
}

/// Normalizer of the sine-squared density: 2/(1 - sin(2 theta*)/(2 theta*)),
/// switching to its Taylor form near zero where the closed form cancels.
pub fn c_norm(theta_star: f64) -> f64 {
    debug_assert!(theta_star > 0.0);
    if theta_star < SMALL_THETA_STAR {
        return 3.0 / (theta_star * theta_star) * (1.0 + theta_star * theta_star / 5.0);
    }
    2.0 / (1.0 - (2.0 * theta_star).sin() / (2.0 * theta_star))
}

/// Pointwise density on the rescaled axis; zero outside `[0,1]`.
pub fn limit_density(law: &LimitLaw, x: f64) -> Result<f64, Error> {
    let inside = (0.0..=1.0).contains(&x);
    match law {
        LimitLaw::PointMass => Err(Error::Unsupported {
            reason: "the point mass has no pointwise density; use its CDF",
        }),
        LimitLaw::Geometric { .. } => Err(Error::Unsupported {
            reason: "the geometric law is discrete; use the pmf",
        }),
        LimitLaw::Cubic => Ok(if inside { 3.0 * (1.0 - x) * (1.0 - x) } else { 0.0 }),
        LimitLaw::Uniform => Ok(if inside { 1.0 } else { 0.0 }),
        LimitLaw::SineSquared { theta_star } => Ok(if inside {
            c_norm(*theta_star) * ((1.0 - x) * theta_star).sin().powi(2)
        } else {
            0.0
        }),
    }
}

/// CDF, defined for every law; right-continuous, 0 below the support and 1
/// above it. `Geometric` is on the raw site axis.
pub fn limit_cdf(law: &LimitLaw, y: f64) -> f64 {
    match law {
        LimitLaw::PointMass => {
            if y < 0.0 {
                0.0
            } else {
                1.0
            }
        }
        LimitLaw::Cubic => cubic_cdf(y),
        LimitLaw::Uniform => y.clamp(0.0, 1.0),
        LimitLaw::SineSquared { theta_star } => sine_squared_cdf(*theta_star, y),
        LimitLaw::Geometric { lambda_plus } => {
            if y < 0.0 {
                0.0
            } else {
                let r = 1.0 / (lambda_plus * lambda_plus);
                1.0 - r.powf(y.floor() + 1.0)
            }
        }
    }
}

fn cubic_cdf(y: f64) -> f64 {
    let t = y.clamp(0.0, 1.0);
    t * (t * t - 3.0 * t + 3.0)
}

fn sine_squared_cdf(theta_star: f64, y: f64) -> f64 {
    let t = y.clamp(0.0, 1.0);
    let u = 2.0 * theta_star;
    if theta_star < SMALL_THETA_STAR {
        // second-order expansion in u around the cubic law:
        //   F = C + (u^2/20)(C - Q),  C = 1-(1-t)^3,  Q = 1-(1-t)^5
        let c3 = 1.0 - (1.0 - t).powi(3);
        let c5 = 1.0 - (1.0 - t).powi(5);
        return c3 + u * u / 20.0 * (c3 - c5);
    }
    let s = u.sin() / u;
    (t + ((u * (1.0 - t)).sin() - u.sin()) / u) / (1.0 - s)
}

/// Limiting site pmf (1 - lambda_+^{-2}) lambda_+^{-2j}; requires Bout.
pub fn geometric_limit_pmf(coin: &Coin, omega: f64, j: usize) -> Result<f64, Error> {
    let (lambda_plus, _) = lambda_roots(coin, omega)?;
    let r = 1.0 / (lambda_plus * lambda_plus);
    Ok((1.0 - r) * r.powf(j as f64))
}

/// Ballistic-scaling density of the unrestricted walk, as a comparison curve;
/// zero outside (-|a|, |a|) and divergent (large finite) at the edges.
pub fn konno_density(coin: &Coin, x: f64) -> f64 {
    let abs_a = coin.abs_a();
    if x.abs() >= abs_a {
        return 0.0;
    }
    let aa = abs_a * abs_a;
    (1.0 - aa).sqrt() / (std::f64::consts::PI * (1.0 - x * x) * (aa - x * x).sqrt())
}

/// Exact sup distance between the profile's step CDF and the law.
///
/// The sup of |step - continuous| is attained at the jumps, so it is enough
/// to compare the running mass S(n) with the law at n/M and at (n+1)/M (the
/// one-sided limit from below of the next jump). The geometric law is a step
/// function on the same site lattice, so there plain per-site comparison is
/// already exact.
pub fn ks_distance(profile: &StationaryProfile, law: &LimitLaw) -> f64 {
    let cum = profile.site_cdf();
    let m = profile.m();
    match law {
        LimitLaw::Geometric { .. } => (0..m)
            .map(|j| (cum[j] - limit_cdf(law, j as f64)).abs())
            .fold(0.0, f64::max),
        _ => {
            let mf = m as f64;
            (0..m)
                .map(|n| {
                    let s = cum[n];
                    let lo = (s - limit_cdf(law, n as f64 / mf)).abs();
                    let hi = (s - limit_cdf(law, (n as f64 + 1.0) / mf)).abs();
                    lo.max(hi)
                })
                .fold(0.0, f64::max)
        }
    }
}

/// One convergence-diagnostic row: KS distance of the M-site profile from
/// the selected law, plus how far the effective M*theta sits from its target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub m: usize,
    pub regime: Region,
    /// M*theta at this M in Bin, 0 at the boundary, NaN in Bout (no theta).
    pub theta_star_effective: f64,
    pub ks: f64,
}

/// Computes one sweep row, deriving xi from the scaling scheme.
pub fn sweep_row(coin: &Coin, scaling: Scaling, m: usize) -> Result<SweepRow, Error> {
    if m == 0 {
        return Err(Error::ZeroSites);
    }
    let xi = match scaling {
        Scaling::FixedXi(xi) => xi,
        Scaling::ThetaStarOverM(theta_star) => {
            if theta_star == 0.0 {
                // theta -> 0 limit of the Plus branch: the band boundary
                coin.abs_a().acos() - coin.det_phase() / 2.0
            } else {
                xi_from_theta(coin, theta_star / m as f64, Branch::Plus)?
            }
        }
    };
    let params = RegimeParams::from_xi(coin, xi, DEFAULT_REGIME_EPS);
    let law = select_limit_law(&params, scaling)?;
    let profile = stationary_distribution(m, coin, omega_of(coin, xi))?;
    let ks = ks_distance(&profile, &law);
    let theta_star_effective = match params.kind() {
        RegimeKind::Bin { theta } => m as f64 * theta,
        RegimeKind::Boundary => 0.0,
        RegimeKind::Bout { .. } => f64::NAN,
    };
    Ok(SweepRow { m, regime: params.region(), theta_star_effective, ks })
}

/// Sweep across path lengths; fails on the first inconsistent row.
pub fn convergence_sweep(coin: &Coin, scaling: Scaling, ms: &[usize]) -> Result<Vec<SweepRow>, Error> {
    ms.iter().map(|&m| sweep_row(coin, scaling, m)).collect()
}
