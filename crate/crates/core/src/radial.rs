//! Per-channel singular radial eigenproblems
//! `-u'' + c/r^2 u = lambda u`, c = gamma(gamma+1), on an interval [a, b].
//!
//! Two independent routes:
//! - closed-form shooting: the eigenvalues are the roots of a 2x2 boundary
//!   determinant built from the Bessel fundamental system (oscillatory J/Y
//!   for lambda > 0, modified I/K for lambda < 0, plain powers at lambda = 0),
//!   located by sign scan plus bisection;
//! - a finite-difference oracle on a grid uniform in log r, reduced to a
//!   symmetric tridiagonal eigenproblem and Richardson-extrapolated across
//!   grid sizes.
//!
//! At a = 0 the left condition is a branch selection instead of a cap: the
//! solution space is one-dimensional and the eigenvalue condition is scalar.

use crate::bessel;
use crate::channel::CapCondition;
use crate::error::{Error, Result};
use crate::quad;
use crate::tridiag::SymTridiag;

/// Behavior selection at the singular endpoint r = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchSelection {
    /// The regular branch, behavior r^{nu + 1/2} = r^{max(gamma+1, -gamma)}.
    Minimal,
    /// The decaying branch r^{-gamma} = r^{1/2 - nu}; legal only for
    /// nu in (0, 1), i.e. |gamma| < 1/2.
    RMinusGamma,
}

/// Left endpoint data: a cap when a > 0, a branch selection when a = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeftCondition {
    Cap(CapCondition),
    Branch(BranchSelection),
}

/// One radial eigenproblem.
#[derive(Debug, Clone)]
pub struct RadialProblem {
    /// gamma (gamma + 1); must be >= -1/4.
    pub potential_coeff: f64,
    /// (a, b) with 0 <= a < b.
    pub interval: (f64, f64),
    pub left: LeftCondition,
    pub right: CapCondition,
    /// Number of eigenvalues requested.
    pub count: usize,
}

impl RadialProblem {
    /// Bessel order of the fundamental system: nu = sqrt(c + 1/4).
    pub fn nu(&self) -> f64 {
        (self.potential_coeff + 0.25).max(0.0).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.interval;
        if !(a >= 0.0) || !(b > a) {
            return Err(Error::invalid(format!("bad interval ({a}, {b})")));
        }
        if self.potential_coeff < -0.25 - 1e-12 {
            return Err(Error::invalid(format!(
                "potential coefficient below the critical value -1/4: {}",
                self.potential_coeff
            )));
        }
        match (&self.left, a) {
            (LeftCondition::Cap(_), a) if a > 0.0 => {}
            (LeftCondition::Branch(sel), a) if a == 0.0 => {
                if *sel == BranchSelection::RMinusGamma {
                    let nu = self.nu();
                    if !(nu > 0.0 && nu < 1.0) {
                        return Err(Error::invalid(format!(
                            "decaying-branch selection needs nu in (0,1), got nu = {nu}"
                        )));
                    }
                }
            }
            _ => {
                return Err(Error::invalid(
                    "a = 0 requires a branch selection, a > 0 requires a cap",
                ));
            }
        }
        if self.count == 0 {
            return Err(Error::invalid("request at least one eigenvalue"));
        }
        Ok(())
    }
}

const NEAR_INT: f64 = 1e-8;

fn near_integer_order(nu: f64) -> Option<i64> {
    let r = nu.round();
    ((nu - r).abs() <= NEAR_INT).then_some(r as i64)
}

// ---------------------------------------------------------------------------
// Fundamental systems
// ---------------------------------------------------------------------------

/// Basis of two solutions at a given lambda. `u1` is the regular branch
/// (behavior r^{nu+1/2} at the origin, no log), `u2` the singular one
/// (r^{1/2-nu}, carrying the log for integer order).
#[derive(Debug, Clone, Copy)]
enum Basis {
    /// lambda > 0: sqrt(r) J_{+-nu}(k r) (non-integer) or J_n / Y_n.
    OscFrac {
        nu: f64,
        k: f64,
    },
    OscInt {
        n: i64,
        k: f64,
    },
    /// lambda < 0: sqrt(r) I_nu(s r) and the decaying sqrt(r) K_nu(s r).
    Dec {
        nu: f64,
        s: f64,
    },
    /// lambda = 0: powers r^{1/2 +- nu}.
    ZeroPow {
        nu: f64,
    },
    /// lambda = 0, nu = 0: sqrt(r), sqrt(r) log r.
    ZeroLog,
}

impl Basis {
    fn for_lambda(nu: f64, lambda: f64) -> Basis {
        if lambda > 0.0 {
            let k = lambda.sqrt();
            match near_integer_order(nu) {
                Some(n) => Basis::OscInt { n, k },
                None => Basis::OscFrac { nu, k },
            }
        } else if lambda < 0.0 {
            Basis::Dec {
                nu,
                s: (-lambda).sqrt(),
            }
        } else if near_integer_order(nu) == Some(0) {
            Basis::ZeroLog
        } else {
            Basis::ZeroPow { nu }
        }
    }

    /// (u, u') of basis member `which` (0 = regular, 1 = singular) at r.
    fn eval(&self, which: usize, r: f64) -> (f64, f64) {
        let sq = r.sqrt();
        match *self {
            Basis::OscFrac { nu, k } => {
                let order = if which == 0 { nu } else { -nu };
                let x = k * r;
                let j = bessel::bessel_j(order, x);
                let dj = bessel::bessel_j_prime(order, x);
                (sq * j, 0.5 / sq * j + sq * k * dj)
            }
            Basis::OscInt { n, k } => {
                let x = k * r;
                if which == 0 {
                    let j = bessel::bessel_j(n as f64, x);
                    let dj = bessel::bessel_j_prime(n as f64, x);
                    (sq * j, 0.5 / sq * j + sq * k * dj)
                } else {
                    let y = bessel::bessel_y_int(n, x);
                    let dy = bessel::bessel_y_int_prime(n, x);
                    (sq * y, 0.5 / sq * y + sq * k * dy)
                }
            }
            Basis::Dec { nu, s } => {
                let x = s * r;
                if which == 0 {
                    let i = bessel::bessel_i(nu, x);
                    let di = bessel::bessel_i_prime(nu, x);
                    (sq * i, 0.5 / sq * i + sq * s * di)
                } else {
                    let k = bessel::bessel_k(nu, x);
                    let dk = bessel::bessel_k_prime(nu, x);
                    (sq * k, 0.5 / sq * k + sq * s * dk)
                }
            }
            Basis::ZeroPow { nu } => {
                let e = if which == 0 { nu + 0.5 } else { 0.5 - nu };
                (r.powf(e), e * r.powf(e - 1.0))
            }
            Basis::ZeroLog => {
                if which == 0 {
                    (sq, 0.5 / sq)
                } else {
                    (sq * r.ln(), 0.5 / sq * r.ln() + 1.0 / sq)
                }
            }
        }
    }

    /// Coefficient that converts the raw `which = 1` coordinate into the
    /// coefficient of the singular power r^{1/2 - nu} (the log coefficient
    /// for nu = 0).
    fn singular_leading(&self) -> f64 {
        match *self {
            Basis::OscFrac { nu, k } => {
                let (lg, sg) = bessel::ln_gamma_sign(1.0 - nu);
                sg * (-nu * (k / 2.0).ln() - lg).exp()
            }
            Basis::OscInt { n, k } => {
                if n == 0 {
                    2.0 / std::f64::consts::PI
                } else {
                    -factorial(n - 1) / std::f64::consts::PI * (2.0 / k).powi(n as i32)
                }
            }
            Basis::Dec { nu, s } => {
                if nu <= NEAR_INT {
                    -1.0
                } else {
                    let (lg, _) = bessel::ln_gamma_sign(nu);
                    0.5 * (lg + nu * (2.0 / s).ln()).exp()
                }
            }
            Basis::ZeroPow { .. } | Basis::ZeroLog => 1.0,
        }
    }
}

fn factorial(n: i64) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Snap a boundary-form coefficient that should vanish identically (matched
/// Robin caps) to exact zero, removing the one source of catastrophic
/// cancellation at tiny inner radii.
fn snap(coef: f64, scale: f64) -> f64 {
    if coef.abs() <= 1e-11 * (scale.abs() + 1.0) {
        0.0
    } else {
        coef
    }
}

/// Boundary form of a cap at endpoint r applied to basis member `which`.
///
/// Robin and Neumann forms are evaluated as (x C'(x) + c C(x)) / sqrt(r)
/// with c = 1/2 - kappa, rewritten through the Bessel recurrences so the
/// leading-order cancellation of matched caps happens in exact arithmetic:
///
///   x J_o'(x) + c J_o(x) = (o + c) J_o(x) - x J_{o+1}(x)
///   x Y_n'(x) + c Y_n(x) = (c - n) Y_n(x) + x Y_{n-1}(x)
///   x I_v'(x) + c I_v(x) = (v + c) I_v(x) + x I_{v+1}(x)
///   x K_v'(x) + c K_v(x) = (c - v) K_v(x) - x K_{v-1}(x)
fn cap_form(basis: &Basis, cap: &CapCondition, r: f64, which: usize) -> f64 {
    let kappa = match cap {
        CapCondition::Dirichlet => {
            let (u, _) = basis.eval(which, r);
            return u;
        }
        CapCondition::Neumann => 0.0,
        CapCondition::Robin { kappa } => *kappa,
    };
    let c = 0.5 - kappa;
    let sq = r.sqrt();
    match *basis {
        Basis::OscFrac { nu, k } => {
            let o = if which == 0 { nu } else { -nu };
            let x = k * r;
            let coef = snap(o + c, o.abs() + c.abs());
            (coef * bessel::bessel_j(o, x) - x * bessel::bessel_j(o + 1.0, x)) / sq
        }
        Basis::OscInt { n, k } => {
            let x = k * r;
            if which == 0 {
                let coef = snap(n as f64 + c, n.unsigned_abs() as f64 + c.abs());
                (coef * bessel::bessel_j(n as f64, x) - x * bessel::bessel_j(n as f64 + 1.0, x))
                    / sq
            } else {
                let coef = snap(c - n as f64, n.unsigned_abs() as f64 + c.abs());
                (coef * bessel::bessel_y_int(n, x) + x * bessel::bessel_y_int(n - 1, x)) / sq
            }
        }
        Basis::Dec { nu, s } => {
            let x = s * r;
            if which == 0 {
                let coef = snap(nu + c, nu + c.abs());
                (coef * bessel::bessel_i(nu, x) + x * bessel::bessel_i(nu + 1.0, x)) / sq
            } else {
                let coef = snap(c - nu, nu + c.abs());
                (coef * bessel::bessel_k(nu, x) - x * bessel::bessel_k(nu - 1.0, x)) / sq
            }
        }
        Basis::ZeroPow { nu } => {
            let e = if which == 0 { nu + 0.5 } else { 0.5 - nu };
            let coef = snap(e - kappa, e.abs() + kappa.abs());
            coef * r.powf(e - 1.0)
        }
        Basis::ZeroLog => {
            if which == 0 {
                snap(c, kappa.abs()) / sq
            } else {
                (snap(c, kappa.abs()) * r.ln() + 1.0) / sq
            }
        }
    }
}

/// Column-normalized boundary determinant for the cap-cap problem.
/// Positive rescaling of each column preserves the root set and the sign
/// pattern while taming the huge dynamic range near a tiny inner radius.
fn boundary_determinant(
    basis: &Basis,
    a: f64,
    b: f64,
    left: &CapCondition,
    right: &CapCondition,
) -> f64 {
    let col = |which: usize| -> (f64, f64) {
        let ba = cap_form(basis, left, a, which);
        let bb = cap_form(basis, right, b, which);
        normalize_column(ba, bb)
    };
    let (a1, b1) = col(0);
    let (a2, b2) = col(1);
    a1 * b2 - a2 * b1
}

fn normalize_column(ba: f64, bb: f64) -> (f64, f64) {
    if !ba.is_finite() || !bb.is_finite() {
        // an overflowed entry dominates the column entirely
        let sa = if ba.is_finite() { 0.0 } else { ba.signum() };
        let sb = if bb.is_finite() { 0.0 } else { bb.signum() };
        return (sa, sb);
    }
    let s = ba.abs().max(bb.abs());
    if s == 0.0 {
        (0.0, 0.0)
    } else {
        (ba / s, bb / s)
    }
}

/// Scalar eigenvalue condition for a branch problem at a = 0.
fn branch_condition(basis: &Basis, which: usize, b: f64, right: &CapCondition) -> f64 {
    let v = cap_form(basis, right, b, which);
    if !v.is_finite() {
        v.signum()
    } else {
        v
    }
}

// ---------------------------------------------------------------------------
// Shooting
// ---------------------------------------------------------------------------

/// Eigenvalues by closed-form shooting. Output strictly increasing; within
/// one channel every eigenvalue is simple, multiplicity is applied by the
/// callers that know the channel multiplicities.
pub fn shoot_eigenvalues(p: &RadialProblem) -> Result<Vec<f64>> {
    p.validate()?;
    let nu = p.nu();
    let (a, b) = p.interval;
    let mut found: Vec<f64> = Vec::new();

    let det = |lambda: f64| -> f64 {
        let basis = Basis::for_lambda(nu, lambda);
        match &p.left {
            LeftCondition::Cap(cap) => boundary_determinant(&basis, a, b, cap, &p.right),
            LeftCondition::Branch(sel) => {
                let which = if *sel == BranchSelection::Minimal {
                    0
                } else {
                    1
                };
                branch_condition(&basis, which, b, &p.right)
            }
        }
    };

    // exact zero mode
    let zero_is_eigen = {
        let basis = Basis::for_lambda(nu, 0.0);
        let v = match &p.left {
            LeftCondition::Cap(cap) => boundary_determinant(&basis, a, b, cap, &p.right),
            LeftCondition::Branch(sel) => {
                let which = if *sel == BranchSelection::Minimal {
                    0
                } else {
                    1
                };
                branch_condition(&basis, which, b, &p.right)
            }
        };
        v.abs() <= 1e-9
    };

    // negative eigenvalues: log scan in s = sqrt(-lambda)
    let kappa_mag = cap_kappa_mag(&p.left).max(cap_kappa_mag_right(&p.right));
    let a_eff = if a > 0.0 { a } else { b };
    let s_hi = (5.0 + 2.0 * nu + 2.0 * kappa_mag) / a_eff;
    let s_lo = 1e-6 / b;
    let n_steps = 60 * ((s_hi / s_lo).log10().ceil() as usize).max(1);
    let mut negatives: Vec<f64> = Vec::new();
    {
        let ratio = (s_hi / s_lo).powf(1.0 / n_steps as f64);
        let mut s_prev = s_lo;
        let mut d_prev = det(-s_prev * s_prev);
        for i in 1..=n_steps {
            let s = s_lo * ratio.powi(i as i32);
            let d = det(-s * s);
            if d_prev != 0.0 && d != 0.0 && d_prev.signum() != d.signum() {
                let root_s = bisect(|t| det(-t * t), s_prev, s);
                negatives.push(-root_s * root_s);
            }
            s_prev = s;
            d_prev = d;
        }
    }
    negatives.sort_by(|x, y| x.partial_cmp(y).unwrap());
    found.extend(negatives);
    if zero_is_eigen {
        found.push(0.0);
    }

    // positive eigenvalues: scan in k = sqrt(lambda) with a quarter of the
    // asymptotic spacing pi / (b - a)
    let len = b - a;
    let step = std::f64::consts::PI / len / 4.0;
    let k_limit =
        std::f64::consts::PI / len * (p.count as f64 + 15.0) + (nu + 2.5 * nu.cbrt() + 5.0) / b;
    let mut k_prev = step * 1e-7;
    let mut d_prev = det(k_prev * k_prev);
    let mut k = step;
    while found.len() < p.count && k <= k_limit {
        let d = det(k * k);
        if d_prev != 0.0 && d != 0.0 && d_prev.signum() != d.signum() {
            let root_k = bisect(|t| det(t * t), k_prev, k);
            found.push(root_k * root_k);
        } else if d == 0.0 {
            found.push(k * k);
        }
        k_prev = k;
        d_prev = d;
        k += step;
    }
    if found.len() < p.count {
        return Err(Error::solver(format!(
            "root scan exhausted: found {} of {} eigenvalues scanning lambda in \
             [-{:.3e}, {:.3e}] (interval ({a}, {b}), nu = {nu})",
            found.len(),
            p.count,
            s_hi * s_hi,
            k_limit * k_limit,
        )));
    }
    found.truncate(p.count);
    Ok(found)
}

fn cap_kappa_mag(left: &LeftCondition) -> f64 {
    match left {
        LeftCondition::Cap(CapCondition::Robin { kappa }) => kappa.abs(),
        _ => 0.0,
    }
}

fn cap_kappa_mag_right(right: &CapCondition) -> f64 {
    match right {
        CapCondition::Robin { kappa } => kappa.abs(),
        _ => 0.0,
    }
}

/// Sign-change bisection to relative 1e-12 in the scanned variable.
fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo.signum() != fm.signum() {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        if hi - lo <= 1e-13 * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

// ---------------------------------------------------------------------------
// Eigenfunction access
// ---------------------------------------------------------------------------

/// A solved radial eigenfunction, as coefficients over the fundamental
/// system, L2-normalized on the problem interval.
#[derive(Debug, Clone)]
pub struct RadialMode {
    basis: Basis,
    /// Coefficients of (regular, singular) basis members.
    pub coef: (f64, f64),
    pub lambda: f64,
    /// L2 norm of the un-normalized combination; coef already divided by it.
    pub norm: f64,
}

impl RadialMode {
    pub fn eval(&self, r: f64) -> f64 {
        let (u1, _) = self.basis.eval(0, r);
        let (u2, _) = self.basis.eval(1, r);
        self.coef.0 * u1 + self.coef.1 * u2
    }

    /// Coefficient of the singular power r^{1/2 - nu} (log coefficient when
    /// nu = 0) in the normalized eigenfunction.
    pub fn singular_coefficient(&self) -> f64 {
        self.coef.1 * self.basis.singular_leading()
    }
}

/// Reconstruct the eigenfunction for an eigenvalue produced by
/// [`shoot_eigenvalues`].
pub fn eigenfunction(p: &RadialProblem, lambda: f64) -> Result<RadialMode> {
    p.validate()?;
    let nu = p.nu();
    let (a, b) = p.interval;
    let basis = Basis::for_lambda(nu, lambda);
    let coef = match &p.left {
        LeftCondition::Cap(cap) => {
            let ba1 = cap_form(&basis, cap, a, 0);
            let ba2 = cap_form(&basis, cap, a, 1);
            if !ba2.is_finite() {
                (1.0, 0.0)
            } else {
                let s = ba1.abs().max(ba2.abs()).max(1e-300);
                (-ba2 / s, ba1 / s)
            }
        }
        LeftCondition::Branch(sel) => {
            if *sel == BranchSelection::Minimal {
                (1.0, 0.0)
            } else {
                (0.0, 1.0)
            }
        }
    };
    let mut mode = RadialMode {
        basis,
        coef,
        lambda,
        norm: 1.0,
    };
    // L2 normalization; integrand smooth on log panels
    let lo = if a > 0.0 { a } else { b * 1e-9 };
    let mut f = |r: f64| mode.eval(r).powi(2);
    let (mass, _) = quad::integrate_adaptive(&mut f, lo, b, 1e-10, &[]);
    let norm = mass.max(0.0).sqrt();
    if !(norm > 0.0) {
        return Err(Error::solver(
            "eigenfunction normalization failed".to_string(),
        ));
    }
    mode.coef.0 /= norm;
    mode.coef.1 /= norm;
    mode.norm = norm;
    Ok(mode)
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

/// Finite-difference eigenvalues with Richardson extrapolation.
///
/// Returns (lambda, error_estimate) per index. For a > 0 this is the direct
/// log-grid discretization; for a = 0 the problem is solved on truncated
/// intervals [delta, b] with the branch-matched Robin condition at delta and
/// extrapolated delta -> 0.
pub fn fd_eigenvalues(p: &RadialProblem, grid_sizes: &[usize]) -> Result<Vec<(f64, f64)>> {
    p.validate()?;
    if grid_sizes.len() < 2 {
        return Err(Error::invalid(
            "need at least two grid sizes for extrapolation",
        ));
    }
    let mut sizes = grid_sizes.to_vec();
    sizes.sort_unstable();
    let (a, b) = p.interval;
    match &p.left {
        LeftCondition::Cap(cap) => fd_cap_problem(p, *cap, a, b, &sizes),
        LeftCondition::Branch(sel) => {
            // truncated-interval oracle: the branch-matched Robin condition
            // at a small delta reproduces the selected behavior up to
            // O(lambda delta^2); two delta values bound the endpoint effect
            let e = match sel {
                BranchSelection::Minimal => p.nu() + 0.5,
                BranchSelection::RMinusGamma => 0.5 - p.nu(),
            };
            let deltas = [b * 4e-3, b * 1e-3];
            let mut per_delta: Vec<Vec<(f64, f64)>> = Vec::new();
            for &d in &deltas {
                let sub = RadialProblem {
                    potential_coeff: p.potential_coeff,
                    interval: (d, b),
                    left: LeftCondition::Cap(CapCondition::Robin { kappa: e }),
                    right: p.right,
                    count: p.count,
                };
                per_delta.push(fd_cap_problem(
                    &sub,
                    CapCondition::Robin { kappa: e },
                    d,
                    b,
                    &sizes,
                )?);
            }
            let mut out = Vec::with_capacity(p.count);
            for j in 0..p.count {
                let (coarse, _) = per_delta[0][j];
                let (fine, grid_est) = per_delta[1][j];
                out.push((fine, grid_est + (fine - coarse).abs()));
            }
            Ok(out)
        }
    }
}

fn fd_cap_problem(
    p: &RadialProblem,
    left: CapCondition,
    a: f64,
    b: f64,
    sizes: &[usize],
) -> Result<Vec<(f64, f64)>> {
    let mut raw: Vec<Vec<f64>> = Vec::with_capacity(sizes.len());
    for &m in sizes {
        raw.push(fd_solve_grid(p, left, a, b, m));
    }
    let hs: Vec<f64> = sizes
        .iter()
        .map(|&m| ((b / a).ln() / m as f64).powi(2))
        .collect();
    let mut out = Vec::with_capacity(p.count);
    for j in 0..p.count {
        let vals: Vec<f64> = raw.iter().map(|v| v[j]).collect();
        let (ext, est) = neville_to_zero(&hs, &vals);
        // the raw sequence must approach the extrapolated value
        let d_last = (vals[vals.len() - 1] - ext).abs();
        let d_prev = (vals[vals.len() - 2] - ext).abs();
        if d_last > 0.5 * d_prev && d_last > 1e-7 * ext.abs().max(1.0) {
            return Err(Error::solver(format!(
                "non-convergent Richardson extrapolation at index {j}: residuals {d_prev:.3e} -> {d_last:.3e}"
            )));
        }
        out.push((ext, est));
    }
    Ok(out)
}

/// Assemble and solve one log-grid discretization.
///
/// The substitution u = r^g phi with g equal to the left Robin coefficient
/// absorbs the left boundary term of the quadratic form exactly: the
/// problem becomes
///
///   -(W1 phi')' + ct W1 phi = lambda W2 phi,   W1 = e^{(2g-1)x},
///   W2 = e^{(2g+1)x},  ct = c - g(g-1),  x = log r,
///
/// with a natural condition at the left end. Without this gauge the Robin
/// boundary row cancels the bulk form to exponential precision for
/// decaying-branch quasi-modes at tiny inner radii and loses them entirely.
/// The right cap contributes the remaining boundary term
/// (g - kappa_b) W1(x_b) phi(b)^2.
fn fd_solve_grid(p: &RadialProblem, left: CapCondition, a: f64, b: f64, m: usize) -> Vec<f64> {
    let xa = a.ln();
    let xb = b.ln();
    let h = (xb - xa) / m as f64;
    let g = match left {
        CapCondition::Dirichlet => 0.0,
        CapCondition::Neumann => 0.0,
        CapCondition::Robin { kappa } => kappa,
    };
    let ct = p.potential_coeff - g * (g - 1.0);
    // weights shifted by x_a so the exponentials stay in range; the scaling
    // multiplies the computed eigenvalues by e^{2 x_a}
    let w1 = |x: f64| ((2.0 * g - 1.0) * (x - xa)).exp();
    let w2 = |x: f64| ((2.0 * g + 1.0) * (x - xa)).exp();
    let keep_left = !matches!(left, CapCondition::Dirichlet);
    let keep_right = !matches!(p.right, CapCondition::Dirichlet);
    let i0 = if keep_left { 0 } else { 1 };
    let i1 = if keep_right { m } else { m - 1 };
    let n = i1 - i0 + 1;
    let mut q_diag = vec![0.0; n];
    let mut q_off = vec![0.0; n.saturating_sub(1)];
    let mut mass = vec![0.0; n];
    let node = |i: usize| xa + i as f64 * h;
    for (row, i) in (i0..=i1).enumerate() {
        let x = node(i);
        let cell = if i == 0 || i == m { 0.5 } else { 1.0 };
        q_diag[row] = ct * w1(x) * cell;
        mass[row] = w2(x) * cell;
        if i > 0 {
            q_diag[row] += w1(x - 0.5 * h) / (h * h);
        }
        if i < m {
            q_diag[row] += w1(x + 0.5 * h) / (h * h);
        }
        if row + 1 < n {
            q_off[row] = -w1(x + 0.5 * h) / (h * h);
        }
    }
    if keep_right {
        let kappa_b = match p.right {
            CapCondition::Neumann => 0.0,
            CapCondition::Robin { kappa } => kappa,
            CapCondition::Dirichlet => unreachable!(),
        };
        q_diag[n - 1] += (g - kappa_b) * w1(xb) / h;
    }
    let d: Vec<f64> = q_diag.iter().zip(&mass).map(|(a, m)| a / m).collect();
    let e: Vec<f64> = (0..n - 1)
        .map(|i| q_off[i] / (mass[i] * mass[i + 1]).sqrt())
        .collect();
    // undo the weight shift: Q scales by e^{(2g-1)xa}, M by e^{(2g+1)xa}
    let scale = (-2.0 * xa).exp();
    let mut out: Vec<f64> = SymTridiag::new(d, e)
        .smallest_eigenvalues(p.count)
        .into_iter()
        .map(|l| l * scale)
        .collect();
    // Quasi-mode refinement. A matched left Robin cap makes the gauged
    // potential vanish; with a Dirichlet right cap the form is then a pure
    // sum of squares over the difference stencil. The lowest eigenvalue can
    // sit many orders below the matrix scale (an inverse-log or power
    // quasi-mode), where entrywise Sturm arithmetic loses it; inverse
    // iteration on the factored form with a square-sum Rayleigh quotient is
    // immune to that cancellation.
    if keep_left && !keep_right && ct.abs() <= 1e-9 {
        let cells = m; // nodes 0..m-1 kept, phi_m = 0
        let gdiag: Vec<f64> = (0..cells)
            .map(|i| w1(node(i) + 0.5 * h).sqrt() / h)
            .collect();
        // G phi: row i = gdiag[i] (phi_{i+1} - phi_i), with phi_m = 0
        let mut phi = vec![1.0f64; n];
        for _ in 0..6 {
            // solve G^T G y = M phi by two bidiagonal sweeps
            let rhs: Vec<f64> = (0..n).map(|i| mass[i] * phi[i]).collect();
            // forward: G^T z = rhs with (G^T z)_i = gdiag[i-1] z_{i-1} - gdiag[i] z_i
            let mut z = vec![0.0f64; cells];
            z[0] = -rhs[0] / gdiag[0];
            for i in 1..n {
                z[i] = (gdiag[i - 1] * z[i - 1] - rhs[i]) / gdiag[i];
            }
            // backward: G y = z with row i = gdiag[i] (y_{i+1} - y_i), y_m = 0
            let mut y = vec![0.0f64; n];
            y[n - 1] = -z[cells - 1] / gdiag[cells - 1];
            for i in (0..n - 1).rev() {
                y[i] = y[i + 1] - z[i] / gdiag[i];
            }
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in &mut y {
                *v /= norm;
            }
            phi = y;
        }
        let mut q_val = 0.0f64;
        for i in 0..cells {
            let diff = if i + 1 < n {
                phi[i + 1] - phi[i]
            } else {
                -phi[i]
            };
            q_val += gdiag[i] * gdiag[i] * diff * diff;
        }
        let m_val: f64 = (0..n).map(|i| mass[i] * phi[i] * phi[i]).sum();
        out[0] = q_val / m_val * scale;
    }
    out
}

/// Neville extrapolation of (h2_i, v_i) to h2 = 0; returns (value, change of
/// the last refinement) as the error estimate.
fn neville_to_zero(h2: &[f64], vals: &[f64]) -> (f64, f64) {
    let n = vals.len();
    let mut t = vals.to_vec();
    let mut prev_best = t[n - 1];
    let mut best = t[n - 1];
    for m in 1..n {
        for i in (m..n).rev() {
            let num = t[i] - t[i - 1];
            let den = h2[i - m] / h2[i] - 1.0;
            t[i] += num / den;
        }
        prev_best = best;
        best = t[n - 1];
    }
    (best, (best - prev_best).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dirichlet_problem(c: f64, a: f64, b: f64, count: usize) -> RadialProblem {
        RadialProblem {
            potential_coeff: c,
            interval: (a, b),
            left: LeftCondition::Cap(CapCondition::Dirichlet),
            right: CapCondition::Dirichlet,
            count,
        }
    }

    #[test]
    fn free_channel_minimal_branch_sine_series() {
        // gamma = 0, [0,1], minimal branch ~ sin(k r), Dirichlet at 1
        let p = RadialProblem {
            potential_coeff: 0.0,
            interval: (0.0, 1.0),
            left: LeftCondition::Branch(BranchSelection::Minimal),
            right: CapCondition::Dirichlet,
            count: 5,
        };
        let got = shoot_eigenvalues(&p).unwrap();
        for (i, l) in got.iter().enumerate() {
            let want = ((i + 1) as f64 * std::f64::consts::PI).powi(2);
            assert!((l - want).abs() < 1e-9 * want, "{l} vs {want}");
        }
    }

    #[test]
    fn free_channel_decaying_branch_cosine_series() {
        let p = RadialProblem {
            potential_coeff: 0.0,
            interval: (0.0, 1.0),
            left: LeftCondition::Branch(BranchSelection::RMinusGamma),
            right: CapCondition::Dirichlet,
            count: 5,
        };
        let got = shoot_eigenvalues(&p).unwrap();
        for (i, l) in got.iter().enumerate() {
            let want = ((i as f64 + 0.5) * std::f64::consts::PI).powi(2);
            assert!((l - want).abs() < 1e-9 * want, "{l} vs {want}");
        }
    }

    #[test]
    fn gamma_one_first_eigenvalue_solves_tan_x_equals_x() {
        // gamma = 1 minimal branch: sqrt(r) J_{3/2}(k r); Dirichlet at 1
        // puts k at the roots of tan x = x
        let p = RadialProblem {
            potential_coeff: 2.0,
            interval: (0.0, 1.0),
            left: LeftCondition::Branch(BranchSelection::Minimal),
            right: CapCondition::Dirichlet,
            count: 1,
        };
        let got = shoot_eigenvalues(&p).unwrap()[0];
        // oracle: bisection on tan x = x in (pi, 3 pi / 2)
        let f = |x: f64| x.tan() - x;
        let mut lo = std::f64::consts::PI + 1e-9;
        let mut hi = 1.5 * std::f64::consts::PI - 1e-9;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == f(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x1 = 0.5 * (lo + hi);
        assert!((x1 - 4.493409457909064).abs() < 1e-9);
        assert!(
            (got - x1 * x1).abs() < 1e-8 * x1 * x1,
            "{got} vs {}",
            x1 * x1
        );
    }

    #[test]
    fn interval_sine_series_with_tiny_inner_radius() {
        for eps in [1e-2, 1e-4] {
            let a = eps / 2.0;
            let p = dirichlet_problem(0.0, a, 1.0, 3);
            let got = shoot_eigenvalues(&p).unwrap();
            for (i, l) in got.iter().enumerate() {
                let want = ((i + 1) as f64 * std::f64::consts::PI / (1.0 - a)).powi(2);
                assert!(
                    (l - want).abs() <= 1e-10 * want,
                    "eps={eps} k={}: {l} vs {want}",
                    i + 1
                );
            }
        }
    }

    #[test]
    fn neumann_left_quarter_wave() {
        let eps = 1e-2f64;
        let a = eps / 2.0;
        let p = RadialProblem {
            potential_coeff: 0.0,
            interval: (a, 1.0),
            left: LeftCondition::Cap(CapCondition::Neumann),
            right: CapCondition::Dirichlet,
            count: 3,
        };
        let got = shoot_eigenvalues(&p).unwrap();
        for (i, l) in got.iter().enumerate() {
            let want = ((i as f64 + 0.5) * std::f64::consts::PI / (1.0 - a)).powi(2);
            assert!((l - want).abs() < 1e-10 * want, "{l} vs {want}");
        }
    }

    #[test]
    fn matched_robin_zero_mode_detected() {
        // Robin(-gamma) at both endpoints: r^{-gamma} is an exact zero mode
        let g = 0.8f64;
        let p = RadialProblem {
            potential_coeff: g * (g + 1.0),
            interval: (0.25, 1.0),
            left: LeftCondition::Cap(CapCondition::Robin { kappa: -g }),
            right: CapCondition::Robin { kappa: -g },
            count: 2,
        };
        let got = shoot_eigenvalues(&p).unwrap();
        assert_eq!(got[0], 0.0);
        assert!(got[1] > 0.1);
    }

    #[test]
    fn negative_eigenvalue_for_attractive_caps() {
        // gamma = -1/2 (critical potential), Neumann-Neumann on [0.1, 1]:
        // the constant trial makes the form negative, so lambda_1 < 0
        let p = RadialProblem {
            potential_coeff: -0.25,
            interval: (0.1, 1.0),
            left: LeftCondition::Cap(CapCondition::Neumann),
            right: CapCondition::Neumann,
            count: 3,
        };
        let got = shoot_eigenvalues(&p).unwrap();
        assert!(got[0] < -0.1, "expected a bound state, got {:?}", got);
        // cross-check against the finite-difference oracle
        let fd = fd_eigenvalues(&p, &[128, 256, 512]).unwrap();
        for (s, (f, _)) in got.iter().zip(&fd) {
            assert!((s - f).abs() < 1e-6 * s.abs().max(1.0), "{s} vs {f}");
        }
    }

    #[test]
    fn fd_half_interval_sine() {
        let p = dirichlet_problem(0.0, 0.5, 1.0, 1);
        let got = fd_eigenvalues(&p, &[64, 128, 256]).unwrap();
        let want = (std::f64::consts::PI / 0.5).powi(2);
        assert!(
            (got[0].0 - want).abs() < 1e-6 * want,
            "{} vs {want}",
            got[0].0
        );
    }

    #[test]
    fn fd_matches_quarter_wave_at_small_eps() {
        let eps = 1e-3f64;
        let p = RadialProblem {
            potential_coeff: 0.0,
            interval: (eps / 2.0, 1.0),
            left: LeftCondition::Cap(CapCondition::Neumann),
            right: CapCondition::Dirichlet,
            count: 1,
        };
        let got = fd_eigenvalues(&p, &[128, 256, 512, 1024]).unwrap();
        let want = (0.5 * std::f64::consts::PI / (1.0 - eps / 2.0)).powi(2);
        assert!(
            (got[0].0 - want).abs() < 1e-6 * want,
            "{} vs {want} (est {})",
            got[0].0,
            got[0].1
        );
    }

    #[test]
    fn dual_route_agreement_on_inner_tenth() {
        let p = dirichlet_problem(2.0, 0.1, 1.0, 5);
        let shot = shoot_eigenvalues(&p).unwrap();
        let fd = fd_eigenvalues(&p, &[96, 192, 384, 768]).unwrap();
        for (s, (f, est)) in shot.iter().zip(&fd) {
            assert!(
                (s - f).abs() <= 1e-6 * s.abs().max(1.0),
                "{s} vs {f} (est {est})"
            );
        }
    }

    #[test]
    fn scaling_law_exact() {
        // r -> s r maps eigenvalues to lambda / s^2 with caps transported
        let base = RadialProblem {
            potential_coeff: 0.75,
            interval: (0.2, 0.8),
            left: LeftCondition::Cap(CapCondition::Robin { kappa: -0.5 }),
            right: CapCondition::Dirichlet,
            count: 4,
        };
        let scaled = RadialProblem {
            potential_coeff: 0.75,
            interval: (0.1, 0.4),
            left: base.left,
            right: base.right,
            count: 4,
        };
        let lb = shoot_eigenvalues(&base).unwrap();
        let ls = shoot_eigenvalues(&scaled).unwrap();
        for (x, y) in lb.iter().zip(&ls) {
            assert!((y - 4.0 * x).abs() <= 1e-10 * y.abs(), "{y} vs {}", 4.0 * x);
        }
    }

    #[test]
    fn dirichlet_and_neumann_interlace() {
        let base = |right: CapCondition| RadialProblem {
            potential_coeff: 0.75,
            interval: (0.1, 1.0),
            left: LeftCondition::Cap(CapCondition::Dirichlet),
            right,
            count: 5,
        };
        let d = shoot_eigenvalues(&base(CapCondition::Dirichlet)).unwrap();
        let n = shoot_eigenvalues(&base(CapCondition::Neumann)).unwrap();
        for i in 0..4 {
            assert!(
                n[i] <= d[i] && d[i] <= n[i + 1],
                "interlacing broken at {i}"
            );
        }
    }

    #[test]
    fn positivity_with_dirichlet_right() {
        // holds for the singular endpoint (either branch) and for a
        // Dirichlet inner cap; attractive Robin caps can and do bind
        let mut rng = crate::rng::Rng::new(5);
        for _ in 0..30 {
            let g = rng.range(-0.5, 2.0);
            let p = RadialProblem {
                potential_coeff: g * (g + 1.0),
                interval: (rng.range(0.05, 0.4), 1.0),
                left: LeftCondition::Cap(CapCondition::Dirichlet),
                right: CapCondition::Dirichlet,
                count: 1,
            };
            let l = shoot_eigenvalues(&p).unwrap()[0];
            assert!(l > 0.0, "gamma={g}: {l}");
        }
        for _ in 0..20 {
            let g = rng.range(-0.5, 2.5);
            let p = RadialProblem {
                potential_coeff: g * (g + 1.0),
                interval: (0.0, 1.0),
                left: LeftCondition::Branch(BranchSelection::Minimal),
                right: CapCondition::Dirichlet,
                count: 1,
            };
            let l = shoot_eigenvalues(&p).unwrap()[0];
            assert!(l > 0.0, "minimal branch gamma={g}: {l}");
        }
        for _ in 0..20 {
            let g = rng.range(-0.45, 0.45);
            let p = RadialProblem {
                potential_coeff: g * (g + 1.0),
                interval: (0.0, 1.0),
                left: LeftCondition::Branch(BranchSelection::RMinusGamma),
                right: CapCondition::Dirichlet,
                count: 1,
            };
            let l = shoot_eigenvalues(&p).unwrap()[0];
            assert!(l > 0.0, "decaying branch gamma={g}: {l}");
        }
    }

    #[test]
    fn eigenfunction_normalized_and_satisfies_bcs() {
        let p = dirichlet_problem(2.0, 0.1, 1.0, 1);
        let l = shoot_eigenvalues(&p).unwrap()[0];
        let mode = eigenfunction(&p, l).unwrap();
        assert!(mode.eval(0.1).abs() < 1e-7);
        assert!(mode.eval(1.0).abs() < 1e-7);
        let mut f = |r: f64| mode.eval(r).powi(2);
        let (mass, _) = quad::integrate_adaptive(&mut f, 0.1, 1.0, 1e-10, &[]);
        assert!((mass - 1.0).abs() < 1e-7);
    }

    #[test]
    fn branch_problem_fd_oracle_agrees() {
        // gamma = 1 minimal-branch limit problem vs truncated-interval fd
        let p = RadialProblem {
            potential_coeff: 2.0,
            interval: (0.0, 1.0),
            left: LeftCondition::Branch(BranchSelection::Minimal),
            right: CapCondition::Dirichlet,
            count: 2,
        };
        let shot = shoot_eigenvalues(&p).unwrap();
        let fd = fd_eigenvalues(&p, &[128, 256, 512]).unwrap();
        for (s, (f, _)) in shot.iter().zip(&fd) {
            assert!((s - f).abs() < 2e-5 * s.abs(), "{s} vs {f}");
        }
    }

    #[test]
    fn invalid_problem_shapes_rejected() {
        let mut p = dirichlet_problem(0.0, 0.0, 1.0, 1);
        assert!(p.validate().is_err()); // a = 0 with a cap
        p.interval = (0.2, 0.1);
        assert!(p.validate().is_err());
        let p = RadialProblem {
            potential_coeff: 2.0, // nu = 1.5, decaying branch illegal
            interval: (0.0, 1.0),
            left: LeftCondition::Branch(BranchSelection::RMinusGamma),
            right: CapCondition::Dirichlet,
            count: 1,
        };
        assert!(p.validate().is_err());
    }
}
