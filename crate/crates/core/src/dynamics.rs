//! Direct time evolution of the open walk and the fixed-point solve of its
//! stationary state.
//!
//! The field is stored in the rotating frame phi_t = e^{i xi t} psi_t, where
//! the left inflow is the constant unit injection (0, 1) into site 0 and a
//! stationary state is a literal fixed point of the update map. The update is
//!
//! ```text
//! phi_{t+1}(j) = e^{i xi} [P phi_t(j+1) + Q phi_t(j-1)] + delta_{j,0} (0, 1)
//! ```
//!
//! with P = |L><L| C0, Q = |R><R| C0, and amplitudes emitted past either end
//! accumulated into absorption counters instead of propagated. The lab-frame
//! field psi is recovered on demand by undoing the phase.

use num_complex::Complex64;

use crate::coin::WalkConfig;
use crate::error::Error;
use crate::stationary::StationaryProfile;

/// Condition-estimate ceiling for the stationary linear solve.
const COND_LIMIT: f64 = 1e12;

/// Left and right chiral amplitudes at one site.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChiralPair {
    pub l: Complex64,
    pub r: Complex64,
}

impl ChiralPair {
    pub fn norm_sq(&self) -> f64 {
        self.l.norm_sqr() + self.r.norm_sqr()
    }
}

/// The evolving field on the path plus absorption bookkeeping.
#[derive(Debug, Clone)]
pub struct WalkState {
    config: WalkConfig,
    rot: Complex64,
    field: Vec<ChiralPair>,
    scratch: Vec<ChiralPair>,
    t: usize,
    absorbed_left: f64,
    absorbed_right: f64,
}

impl WalkState {
    /// Zero field at t = 0; the external tail of the inflow is represented
    /// implicitly by the injection rule in [`WalkState::step`].
    pub fn new(config: WalkConfig) -> Self {
        let m = config.m();
        Self {
            config,
            rot: Complex64::from_polar(1.0, config.xi()),
            field: vec![ChiralPair::default(); m],
            scratch: vec![ChiralPair::default(); m],
            t: 0,
            absorbed_left: 0.0,
            absorbed_right: 0.0,
        }
    }

    pub fn config(&self) -> &WalkConfig {
        &self.config
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn absorbed_left(&self) -> f64 {
        self.absorbed_left
    }

    pub fn absorbed_right(&self) -> f64 {
        self.absorbed_right
    }

    /// One time step: scatter, absorb at both ends, inject the unit inflow.
    pub fn step(&mut self) {
        let coin = *self.config.coin();
        let (a, b) = (coin.a(), coin.b());
        let (c, d) = (coin.c(), coin.d());
        let m = self.field.len();
        for p in self.scratch.iter_mut() {
            *p = ChiralPair::default();
        }
        for j in 0..m {
            let cur = self.field[j];
            let out_l = self.rot * (a * cur.l + b * cur.r);
            let out_r = self.rot * (c * cur.l + d * cur.r);
            if j == 0 {
                self.absorbed_left += out_l.norm_sqr();
            } else {
                self.scratch[j - 1].l = out_l;
            }
            if j == m - 1 {
                self.absorbed_right += out_r.norm_sqr();
            } else {
                self.scratch[j + 1].r = out_r;
            }
        }
        self.scratch[0].r += Complex64::new(1.0, 0.0);
        std::mem::swap(&mut self.field, &mut self.scratch);
        self.t += 1;
    }

    /// The rotating-frame field phi_t.
    pub fn phi(&self) -> &[ChiralPair] {
        &self.field
    }

    /// The lab-frame field psi_t = e^{-i xi t} phi_t.
    pub fn psi(&self) -> Vec<ChiralPair> {
        let phase = Complex64::from_polar(1.0, -self.config.xi() * self.t as f64);
        self.field
            .iter()
            .map(|p| ChiralPair { l: phase * p.l, r: phase * p.r })
            .collect()
    }

    /// Squared norm currently held on the path.
    pub fn internal_norm_sq(&self) -> f64 {
        self.field.iter().map(ChiralPair::norm_sq).sum()
    }

    /// |t - (internal + absorbed)|: each step injects exactly unit squared
    /// norm and the full-line walk is unitary, so this is pure rounding.
    pub fn bookkeeping_defect(&self) -> f64 {
        (self.t as f64 - (self.internal_norm_sq() + self.absorbed_left + self.absorbed_right)).abs()
    }
}

/// A converged (or best-effort) stationary snapshot.
#[derive(Debug, Clone)]
pub struct StationaryRun {
    /// First step index from which another step no longer moves the field
    /// beyond the tolerance.
    pub t: usize,
    /// Sup over sites of the change produced by that last step.
    pub residual: f64,
    /// The evolved walk, one step past `t`.
    pub state: WalkState,
}

impl StationaryRun {
    pub fn phi_star(&self) -> &[ChiralPair] {
        self.state.phi()
    }
}

/// Iterates until the sup-norm change of phi per step drops to `tol`.
pub fn run_until_stationary(
    config: &WalkConfig,
    tol: f64,
    t_max: usize,
) -> Result<StationaryRun, Error> {
    let mut state = WalkState::new(*config);
    let mut prev = state.field.clone();
    let mut residual = f64::INFINITY;
    for t in 0..t_max {
        prev.copy_from_slice(&state.field);
        state.step();
        residual = state
            .field
            .iter()
            .zip(&prev)
            .map(|(new, old)| ((new.l - old.l).norm_sqr() + (new.r - old.r).norm_sqr()).sqrt())
            .fold(0.0, f64::max);
        if residual <= tol {
            return Ok(StationaryRun { t, residual, state });
        }
    }
    Err(Error::NoConvergence {
        best: Box::new(StationaryRun { t: t_max, residual, state }),
    })
}

/// The stationary update image e^{i xi} A phi + b, with absorption dropped
/// and the unit injection applied.
fn apply_internal(config: &WalkConfig, field: &[ChiralPair]) -> Vec<ChiralPair> {
    let coin = *config.coin();
    let rot = Complex64::from_polar(1.0, config.xi());
    let (a, b) = (coin.a(), coin.b());
    let (c, d) = (coin.c(), coin.d());
    let m = field.len();
    let mut out = vec![ChiralPair::default(); m];
    for j in 0..m {
        let cur = field[j];
        if j > 0 {
            out[j - 1].l = rot * (a * cur.l + b * cur.r);
        }
        if j + 1 < m {
            out[j + 1].r = rot * (c * cur.l + d * cur.r);
        }
    }
    out[0].r += Complex64::new(1.0, 0.0);
    out
}

/// Sup over sites of the defect of the stationary equation at `phi_star`.
pub fn eigen_residual(phi_star: &[ChiralPair], config: &WalkConfig) -> f64 {
    let image = apply_internal(config, phi_star);
    phi_star
        .iter()
        .zip(&image)
        .map(|(f, g)| ((f.l - g.l).norm_sqr() + (f.r - g.r).norm_sqr()).sqrt())
        .fold(0.0, f64::max)
}

/// Distribution read off a field: per-site squared norms normalized by their
/// sum, which doubles as the empirical comfortability.
pub fn empirical_distribution(phi_star: &[ChiralPair]) -> Result<StationaryProfile, Error> {
    let norms: Vec<f64> = phi_star.iter().map(ChiralPair::norm_sq).collect();
    let total: f64 = norms.iter().sum();
    if total <= 1e-300 {
        return Err(Error::ZeroField);
    }
    Ok(StationaryProfile::from_parts(norms, total))
}

/// Solves (I - e^{i xi} A) phi = b directly: dense complex LU with partial
/// pivoting on the 2M x 2M system, with a cheap pivot-ratio condition check.
pub fn solve_fixed_point(config: &WalkConfig) -> Result<Vec<ChiralPair>, Error> {
    let m = config.m();
    let n = 2 * m;
    let coin = *config.coin();
    let rot = Complex64::from_polar(1.0, config.xi());
    let (a, b) = (coin.a(), coin.b());
    let (c, d) = (coin.c(), coin.d());

    // unknowns ordered (L0, R0, L1, R1, ...)
    let mut mat = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..m {
        mat[2 * j * n + 2 * j] = Complex64::new(1.0, 0.0);
        mat[(2 * j + 1) * n + 2 * j + 1] = Complex64::new(1.0, 0.0);
        if j + 1 < m {
            mat[2 * j * n + 2 * (j + 1)] -= rot * a;
            mat[2 * j * n + 2 * (j + 1) + 1] -= rot * b;
        }
        if j >= 1 {
            mat[(2 * j + 1) * n + 2 * (j - 1)] -= rot * c;
            mat[(2 * j + 1) * n + 2 * (j - 1) + 1] -= rot * d;
        }
    }
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    rhs[1] = Complex64::new(1.0, 0.0);

    let y = lu_solve(&mut mat, n, &mut rhs)?;
    Ok((0..m).map(|j| ChiralPair { l: y[2 * j], r: y[2 * j + 1] }).collect())
}

/// In-place LU with partial pivoting; returns the solution and rejects
/// systems whose pivot ratio max|U_kk|/min|U_kk| exceeds [`COND_LIMIT`].
fn lu_solve(mat: &mut [Complex64], n: usize, rhs: &mut [Complex64]) -> Result<Vec<Complex64>, Error> {
    let mut max_piv = 0.0_f64;
    let mut min_piv = f64::INFINITY;
    for k in 0..n {
        let mut p = k;
        let mut best = mat[k * n + k].norm();
        for r in (k + 1)..n {
            let v = mat[r * n + k].norm();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best == 0.0 {
            return Err(Error::SingularSystem { cond_estimate: f64::INFINITY });
        }
        if p != k {
            for col in 0..n {
                mat.swap(k * n + col, p * n + col);
            }
            rhs.swap(k, p);
        }
        max_piv = max_piv.max(best);
        min_piv = min_piv.min(best);
        let pivot = mat[k * n + k];
        for r in (k + 1)..n {
            let factor = mat[r * n + k] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            mat[r * n + k] = Complex64::new(0.0, 0.0);
            for col in (k + 1)..n {
                let sub = factor * mat[k * n + col];
                mat[r * n + col] -= sub;
            }
            let dec = factor * rhs[k];
            rhs[r] -= dec;
        }
    }
    let cond_estimate = max_piv / min_piv;
    if cond_estimate > COND_LIMIT {
        return Err(Error::SingularSystem { cond_estimate });
    }
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for k in (0..n).rev() {
        let mut acc = rhs[k];
        for col in (k + 1)..n {
            acc -= mat[k * n + col] * y[col];
        }
        y[k] = acc / mat[k * n + k];
    }
    Ok(y)
}
