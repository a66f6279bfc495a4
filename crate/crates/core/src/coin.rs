//! Coin validation, the frequency-to-band map, and the Chebyshev recurrence
//! that the closed forms are built from.
//!
//! The driving frequency enters every formula through
//! `omega = arg(det C0)/2 + xi`, and the band of `omega` is decided by
//! comparing `|cos omega|` with `|a|`:
//!
//! * `Bout`, `|cos omega| > |a|`: geometric profiles, governed by the real
//!   reciprocal roots `lambda_+, lambda_-`;
//! * `BoundaryB`, equality: polynomial (critical) profiles;
//! * `Bin`, `|cos omega| < |a|`: oscillatory profiles, governed by the
//!   angle `theta` with `|a| cos theta = |cos omega|`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::error::Error;

/// Max entrywise deviation of C†C from I accepted by [`Coin::new`].
pub const UNITARITY_TOL: f64 = 1e-12;

/// Entries with modulus at or below this are treated as zero (trivial coin).
pub const TRIVIAL_ENTRY_TOL: f64 = 1e-12;

/// Default half-width, in `|cos omega| - |a|`, of the boundary band.
///
/// Wide enough that exact-arithmetic boundary inputs (e.g. the Hadamard coin
/// at omega = pi/4) land on the boundary despite rounding, narrow enough not
/// to swallow deliberate near-boundary scans.
pub const DEFAULT_REGIME_EPS: f64 = 1e-10;

/// A validated 2x2 unitary coin with all entries nonzero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coin {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    det_phase: f64,
}

impl Coin {
    /// Validates unitarity (to [`UNITARITY_TOL`]) and non-triviality, and
    /// caches the determinant phase as the principal argument in [0, 2pi).
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, Error> {
        let deviation = [
            (a.norm_sqr() + b.norm_sqr() - 1.0).abs(),
            (c.norm_sqr() + d.norm_sqr() - 1.0).abs(),
            (a * c.conj() + b * d.conj()).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        if [a, b, c, d].iter().any(|z| z.norm() <= TRIVIAL_ENTRY_TOL) {
            return Err(Error::TrivialCoin);
        }
        let det = a * d - b * c;
        let det_phase = det.arg().rem_euclid(TAU);
        Ok(Self { a, b, c, d, det_phase })
    }

    /// The Hadamard coin, entries `1/sqrt(2)` with a `-1/sqrt(2)` corner.
    pub fn hadamard() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self::new(h, h, h, -h).expect("Hadamard coin is unitary and nontrivial")
    }

    /// Real rotation by `angle`: a = d = cos, b = sin, c = -sin.
    ///
    /// Fails with [`Error::TrivialCoin`] at multiples of pi/2, where an entry
    /// vanishes.
    pub fn rotation(angle: f64) -> Result<Self, Error> {
        let (s, c) = angle.sin_cos();
        Self::new(
            Complex64::new(c, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(c, 0.0),
        )
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    pub fn d(&self) -> Complex64 {
        self.d
    }

    /// Entries in row-major order (a, b, c, d).
    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn abs_a(&self) -> f64 {
        self.a.norm()
    }

    pub fn abs_b(&self) -> f64 {
        self.b.norm()
    }

    /// arg(det C0) in [0, 2pi).
    pub fn det_phase(&self) -> f64 {
        self.det_phase
    }
}

/// omega = arg(det C0)/2 + xi, reduced to [0, 2pi).
pub fn omega_of(coin: &Coin, xi: f64) -> f64 {
    (coin.det_phase / 2.0 + xi).rem_euclid(TAU)
}

/// The Chebyshev argument cos(omega)/|a| shared by all closed forms.
pub(crate) fn cheb_arg(coin: &Coin, omega: f64) -> f64 {
    omega.cos() / coin.abs_a()
}

/// zeta(m) = U_{m-1}(cos omega / |a|), by the three-term recurrence.
///
/// The recurrence is exact at the band boundary (where trigonometric closed
/// forms degenerate) and free of branch cuts; closed forms live in the tests.
pub fn chebyshev_zeta(m: usize, coin: &Coin, omega: f64) -> f64 {
    zeta_at(m, cheb_arg(coin, omega))
}

pub(crate) fn zeta_at(m: usize, x: f64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let mut prev = 0.0_f64;
    let mut cur = 1.0_f64;
    for _ in 1..m {
        (prev, cur) = (cur, 2.0 * x * cur - prev);
    }
    cur
}

/// Frequency band tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Bout,
    Boundary,
    Bin,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Bout => "Bout",
            Region::Boundary => "BoundaryB",
            Region::Bin => "Bin",
        })
    }
}

/// Band tag together with the quantity that parametrizes it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeKind {
    Bout { lambda_plus: f64, lambda_minus: f64 },
    Boundary,
    Bin { theta: f64 },
}

/// Everything the limit laws need to know about one (coin, frequency) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeParams {
    xi: f64,
    omega: f64,
    kind: RegimeKind,
    theta_star: Option<f64>,
}

impl RegimeParams {
    /// Classifies by the given frequency; `xi` is recovered from it.
    pub fn classify(coin: &Coin, omega: f64, eps: f64) -> Self {
        classify_regime(coin, omega, eps)
    }

    /// Classifies by the inflow frequency, keeping the caller's `xi` verbatim.
    pub fn from_xi(coin: &Coin, xi: f64, eps: f64) -> Self {
        let mut params = classify_regime(coin, omega_of(coin, xi), eps);
        params.xi = xi;
        params
    }

    /// Attaches the `M * theta` scaling target this regime is meant to track.
    pub fn with_theta_star(mut self, theta_star: f64) -> Self {
        self.theta_star = Some(theta_star);
        self
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn kind(&self) -> RegimeKind {
        self.kind
    }

    pub fn region(&self) -> Region {
        match self.kind {
            RegimeKind::Bout { .. } => Region::Bout,
            RegimeKind::Boundary => Region::Boundary,
            RegimeKind::Bin { .. } => Region::Bin,
        }
    }

    pub fn theta(&self) -> Option<f64> {
        match self.kind {
            RegimeKind::Bin { theta } => Some(theta),
            _ => None,
        }
    }

    pub fn lambdas(&self) -> Option<(f64, f64)> {
        match self.kind {
            RegimeKind::Bout { lambda_plus, lambda_minus } => Some((lambda_plus, lambda_minus)),
            _ => None,
        }
    }

    pub fn theta_star(&self) -> Option<f64> {
        self.theta_star
    }
}

/// Assigns `omega` to a band, comparing `|cos omega| - |a|` against `eps`.
pub fn classify_regime(coin: &Coin, omega: f64, eps: f64) -> RegimeParams {
    debug_assert!(eps >= 0.0);
    let x = cheb_arg(coin, omega);
    let gap = omega.cos().abs() - coin.abs_a();
    let kind = if gap.abs() <= eps {
        RegimeKind::Boundary
    } else if gap > 0.0 {
        let (lambda_plus, lambda_minus) = roots_at(x);
        RegimeKind::Bout { lambda_plus, lambda_minus }
    } else {
        RegimeKind::Bin { theta: theta_at(x) }
    };
    RegimeParams {
        xi: (omega - coin.det_phase / 2.0).rem_euclid(TAU),
        omega,
        kind,
        theta_star: None,
    }
}

/// The deformed angle, folded into (0, pi/2]: arccos(x) for x > 0,
/// pi - arccos(x) otherwise.
pub fn theta_of(coin: &Coin, omega: f64) -> Result<f64, Error> {
    let x = cheb_arg(coin, omega);
    if x.abs() >= 1.0 {
        return Err(Error::OutOfRegime { required: Region::Bin });
    }
    Ok(theta_at(x))
}

fn theta_at(x: f64) -> f64 {
    if x > 0.0 {
        x.acos()
    } else {
        std::f64::consts::PI - x.acos()
    }
}

/// Real reciprocal roots of `lambda^2 - 2x lambda + 1 = 0` with |λ₊| > 1,
/// larger root from the quadratic formula, smaller as its reciprocal.
pub fn lambda_roots(coin: &Coin, omega: f64) -> Result<(f64, f64), Error> {
    let x = cheb_arg(coin, omega);
    if x.abs() <= 1.0 {
        return Err(Error::OutOfRegime { required: Region::Bout });
    }
    Ok(roots_at(x))
}

fn roots_at(x: f64) -> (f64, f64) {
    let plus = x.signum() * (x.abs() + (x * x - 1.0).sqrt());
    (plus, 1.0 / plus)
}

/// Which sign of cos(omega) realizes a requested `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Inverse of the theta map: a frequency `xi` with
/// `theta_of(omega_of(xi)) = theta`, on the chosen sign branch.
pub fn xi_from_theta(coin: &Coin, theta: f64, branch: Branch) -> Result<f64, Error> {
    if !(theta > 0.0 && theta <= FRAC_PI_2) {
        return Err(Error::OutOfRegime { required: Region::Bin });
    }
    let cos_omega = match branch {
        Branch::Plus => coin.abs_a() * theta.cos(),
        Branch::Minus => -coin.abs_a() * theta.cos(),
    };
    Ok(cos_omega.acos() - coin.det_phase / 2.0)
}

/// Path length, coin, and inflow frequency for one walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    m: usize,
    coin: Coin,
    xi: f64,
}

impl WalkConfig {
    pub fn new(m: usize, coin: Coin, xi: f64) -> Result<Self, Error> {
        if m == 0 {
            return Err(Error::ZeroSites);
        }
        Ok(Self { m, coin, xi })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coin(&self) -> &Coin {
        &self.coin
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn omega(&self) -> f64 {
        omega_of(&self.coin, self.xi)
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use proptest::prelude::*;

    /// U(2) element from a global phase, two relative phases, and a mixing
    /// angle; det phase is 2*delta.
    pub(crate) fn coin_from_angles(delta: f64, alpha: f64, beta: f64, phi: f64) -> Coin {
        let polar = |t: f64| Complex64::from_polar(1.0, t);
        let (s, c) = phi.sin_cos();
        Coin::new(
            polar(delta + alpha) * c,
            polar(delta + beta) * s,
            -polar(delta - beta) * s,
            polar(delta - alpha) * c,
        )
        .expect("angle parametrization is unitary")
    }

    /// Coins with the mixing angle kept away from 0 and pi/2 so that no
    /// entry is near zero.
    pub(crate) fn any_coin() -> impl Strategy<Value = Coin> {
        (0.0..TAU, 0.0..TAU, 0.0..TAU, 0.1..(FRAC_PI_2 - 0.1))
            .prop_map(|(delta, alpha, beta, phi)| coin_from_angles(delta, alpha, beta, phi))
    }
}
