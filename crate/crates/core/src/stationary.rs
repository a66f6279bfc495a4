//! Closed-form stationary profiles: per-site weights, total mass, and the
//! trigonometric (A, B) form valid inside the oscillatory band.
//!
//! Everything here is a ratio of Chebyshev values zeta(m) evaluated at
//! x = cos(omega)/|a|. Deep in Bout the raw values grow like lambda_+^m and
//! leave f64 range, so the table renormalizes every entry by zeta(M) (built
//! from the backward ratio recurrence, which is stable there) and carries the
//! compensating factor 1/zeta(M)^2 through the site and energy formulas.

use std::f64::consts::FRAC_PI_2;

use crate::coin::{cheb_arg, classify_regime, Coin, Region, DEFAULT_REGIME_EPS};
use crate::error::Error;

/// Once (M+1) ln|lambda_+| passes this, zeta(M+1)^2 would approach f64
/// overflow and the table switches to normalized storage.
const RENORM_LOG_LIMIT: f64 = 300.0;

/// zeta(0..=M+1), possibly all divided by zeta(M).
pub(crate) struct ZetaTable {
    x: f64,
    vals: Vec<f64>,
    inv_norm_sq: f64,
}

impl ZetaTable {
    pub(crate) fn new(m: usize, x: f64) -> Self {
        if x.abs() > 1.0 {
            let lam = x.abs() + (x * x - 1.0).sqrt();
            if (m as f64 + 1.0) * lam.ln() > RENORM_LOG_LIMIT {
                return Self::normalized(m, x);
            }
        }
        Self::direct(m, x)
    }

    fn direct(m: usize, x: f64) -> Self {
        let mut vals = Vec::with_capacity(m + 2);
        vals.push(0.0);
        vals.push(1.0);
        for _ in 1..=m {
            let next = 2.0 * x * vals[vals.len() - 1] - vals[vals.len() - 2];
            vals.push(next);
        }
        Self { x, vals, inv_norm_sq: 1.0 }
    }

    /// Entries zeta(j)/zeta(M) via rho_j = zeta(j)/zeta(j+1) = 1/(2x - rho_{j-1}).
    ///
    /// Requires |x| > 1, where zeta has no zeros and |rho_j| < 1, so the
    /// downward products only shrink.
    fn normalized(m: usize, x: f64) -> Self {
        let mut rho = vec![0.0; m + 1];
        for j in 1..=m {
            rho[j] = 1.0 / (2.0 * x - rho[j - 1]);
        }
        let mut vals = vec![0.0; m + 2];
        vals[m] = 1.0;
        for k in (1..m).rev() {
            vals[k] = rho[k] * vals[k + 1];
        }
        vals[m + 1] = 1.0 / rho[m];
        let inv_norm = vals[1]; // zeta(1)/zeta(M) = 1/zeta(M)
        Self { x, vals, inv_norm_sq: inv_norm * inv_norm }
    }

    /// Site weight r(n): squared norm of the stationary state at site n under
    /// unit inflow.
    pub(crate) fn site_relative(&self, n: usize, m: usize, aa: f64, bb: f64) -> f64 {
        let v = &self.vals;
        let inv = self.inv_norm_sq;
        let denom = aa * inv + bb * v[m] * v[m];
        (aa * inv + bb * (v[m - n - 1] * v[m - n - 1] + v[m - n] * v[m - n])) / denom
    }

    /// Total stationary mass; undefined at |x| = 1 (see `boundary_energy`).
    pub(crate) fn energy(&self, m: usize, aa: f64, bb: f64) -> f64 {
        let v = &self.vals;
        let inv = self.inv_norm_sq;
        let mf = m as f64;
        let bracket = v[m + 1] * v[m + 1] - v[m - 1] * v[m - 1] - 4.0 * mf * inv;
        let num = mf * aa * inv + bb / (4.0 * (self.x * self.x - 1.0)) * bracket;
        let den = aa * inv + bb * v[m] * v[m];
        num / den
    }
}

/// Total mass at the band boundary, the x -> +-1 limit of the generic
/// formula (where both its numerator and denominator degenerate).
fn boundary_energy(m: usize, aa: f64, bb: f64) -> f64 {
    let mf = m as f64;
    let m2 = mf * mf;
    mf * (3.0 * aa + bb + 2.0 * bb * m2) / (3.0 * (aa + bb * m2))
}

/// Squared norm of the stationary state at site n, normalized to unit inflow.
pub fn site_relative_probability(n: usize, m: usize, coin: &Coin, omega: f64) -> Result<f64, Error> {
    if m == 0 {
        return Err(Error::ZeroSites);
    }
    if n >= m {
        return Err(Error::IndexOutOfRange { n, m });
    }
    let table = ZetaTable::new(m, cheb_arg(coin, omega));
    Ok(table.site_relative(n, m, coin.a().norm_sqr(), coin.b().norm_sqr()))
}

/// Total stationary mass held on the path (the normalizer of `mu`).
pub fn comfortability(m: usize, coin: &Coin, omega: f64) -> Result<f64, Error> {
    if m == 0 {
        return Err(Error::ZeroSites);
    }
    let aa = coin.a().norm_sqr();
    let bb = coin.b().norm_sqr();
    if classify_regime(coin, omega, DEFAULT_REGIME_EPS).region() == Region::Boundary {
        return Ok(boundary_energy(m, aa, bb));
    }
    let table = ZetaTable::new(m, cheb_arg(coin, omega));
    Ok(table.energy(m, aa, bb))
}

/// Full closed-form profile: site weights, normalized distribution, and mass.
pub fn stationary_distribution(m: usize, coin: &Coin, omega: f64) -> Result<StationaryProfile, Error> {
    if m == 0 {
        return Err(Error::ZeroSites);
    }
    let aa = coin.a().norm_sqr();
    let bb = coin.b().norm_sqr();
    let table = ZetaTable::new(m, cheb_arg(coin, omega));
    let site_norm_sq: Vec<f64> = (0..m).map(|n| table.site_relative(n, m, aa, bb)).collect();
    let total = comfortability(m, coin, omega)?;
    Ok(StationaryProfile::from_parts(site_norm_sq, total))
}

/// Oscillatory-band profile in trigonometric form: returns (A_M, B_M(n)) with
/// mu(n) = B_M(n)/A_M, for theta in (0, pi/2].
pub fn ab_form(m: usize, n: usize, coin: &Coin, theta: f64) -> Result<(f64, f64), Error> {
    if m == 0 {
        return Err(Error::ZeroSites);
    }
    if n >= m {
        return Err(Error::IndexOutOfRange { n, m });
    }
    if !(theta > 0.0 && theta <= FRAC_PI_2) {
        return Err(Error::OutOfRegime { required: Region::Bin });
    }
    let aa = coin.a().norm_sqr();
    let bb = coin.b().norm_sqr();
    let mf = m as f64;
    let s2 = theta.sin().powi(2);
    let a_m = (bb + aa * s2) * mf - bb / 4.0 * (2.0 * mf * theta).sin() * (2.0 * theta).sin() / s2;
    let k1 = (mf - n as f64 - 1.0) * theta;
    let k2 = (mf - n as f64) * theta;
    let b_mn = aa * s2 + bb * (k1.sin().powi(2) + k2.sin().powi(2));
    Ok((a_m, b_mn))
}

/// A stationary distribution over the path, from either the closed form or a
/// simulated field.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryProfile {
    site_norm_sq: Vec<f64>,
    mu: Vec<f64>,
    cum: Vec<f64>,
    comfortability: f64,
}

impl StationaryProfile {
    pub(crate) fn from_parts(site_norm_sq: Vec<f64>, comfortability: f64) -> Self {
        let mu: Vec<f64> = site_norm_sq.iter().map(|r| r / comfortability).collect();
        let mut cum = Vec::with_capacity(mu.len());
        let mut acc = 0.0;
        for w in &mu {
            acc += w;
            cum.push(acc);
        }
        Self { site_norm_sq, mu, cum, comfortability }
    }

    pub fn m(&self) -> usize {
        self.mu.len()
    }

    /// Unnormalized per-site squared norms.
    pub fn site_norm_sq(&self) -> &[f64] {
        &self.site_norm_sq
    }

    /// Normalized site distribution.
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// The normalizer: sum of the site weights.
    pub fn comfortability(&self) -> f64 {
        self.comfortability
    }

    /// Running mass through each site.
    pub fn site_cdf(&self) -> &[f64] {
        &self.cum
    }

    /// CDF of the rescaled measure putting mu(n) at n/M; right-continuous.
    pub fn cumulative(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let m = self.mu.len();
        let idx = ((x * m as f64).floor() as usize).min(m - 1);
        self.cum[idx]
    }
}
