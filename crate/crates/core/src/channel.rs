//! Scalar radial channels, cap conditions, and the extension decision.
//!
//! Every boundary eigenvalue gamma turns into one scalar channel
//! `-u'' + gamma(gamma+1)/r^2 u = lambda u`. The smooth interiors of the two
//! glued pieces are replaced by cap conditions: a Dirichlet / Neumann /
//! Robin endpoint condition at r = 1 (stable piece) and at the inner cap
//! radius (collapsing piece). This keeps every channel an exact scalar ODE,
//! which is the central modeling decision of the artifact.
//!
//! The per-channel scalar of the harmonic-extension trace operator decides
//! everything about the limit problem: membership of the channel in the
//! extension space W (|gamma| < 1/2), square-integrable harmonic fields
//! (gamma > 1/2), and the half-rate extended states (gamma = 1/2).

use crate::cross_section::{ASpectrumEntry, GAMMA_MERGE_TOL};
use crate::error::{Error, Result};

/// One scalar radial channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub gamma: f64,
    pub mult: usize,
    /// gamma (gamma + 1), the coefficient of 1/r^2 in the radial operator.
    pub potential_coeff: f64,
    /// Exponents (gamma + 1, -gamma) of the two harmonic power solutions.
    pub branch_exponents: (f64, f64),
}

/// Endpoint condition standing in for a smooth interior.
///
/// Robin is the scale-covariant form u'(a) - (kappa/a) u(a) = 0; kappa is
/// dimensionless, so the condition transports along the cone scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapCondition {
    Dirichlet,
    Neumann,
    Robin { kappa: f64 },
}

impl CapCondition {
    /// Apply the boundary form to (u(a), u'(a)) at the endpoint a.
    pub fn apply(&self, a: f64, u: f64, du: f64) -> f64 {
        match self {
            CapCondition::Dirichlet => u,
            CapCondition::Neumann => du,
            CapCondition::Robin { kappa } => du - kappa / a * u,
        }
    }

    pub fn label(&self) -> String {
        match self {
            CapCondition::Dirichlet => "dirichlet".into(),
            CapCondition::Neumann => "neumann".into(),
            CapCondition::Robin { kappa } => format!("robin({kappa:?})"),
        }
    }
}

/// Per-channel cap override keyed by the channel eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapOverride {
    pub gamma: f64,
    pub cap: CapCondition,
}

/// The desk-scale geometry: channels plus cap data.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub channels: Vec<Channel>,
    /// Inner cap radius of the collapsing piece, in (0, 1).
    pub r0: f64,
    /// Cap at r = eps * r0 in the eps-problem, at r = r0 in the model problem.
    pub cap_m2: CapCondition,
    /// Cap at r = 1, standing in for the stable interior.
    pub cap_m1: CapCondition,
    /// Per-channel overrides of cap_m2 (e.g. branch-matched Robin caps).
    pub overrides_m2: Vec<CapOverride>,
    /// Per-channel overrides of cap_m1.
    pub overrides_m1: Vec<CapOverride>,
}

impl Geometry {
    pub fn new(
        channels: Vec<Channel>,
        r0: f64,
        cap_m2: CapCondition,
        cap_m1: CapCondition,
    ) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::invalid("geometry needs at least one channel"));
        }
        if !(r0 > 0.0 && r0 < 1.0) {
            return Err(Error::invalid(format!("r0 must lie in (0, 1), got {r0}")));
        }
        Ok(Geometry {
            channels,
            r0,
            cap_m2,
            cap_m1,
            overrides_m2: Vec::new(),
            overrides_m1: Vec::new(),
        })
    }

    pub fn cap_m2_for(&self, gamma: f64) -> CapCondition {
        lookup_override(&self.overrides_m2, gamma).unwrap_or(self.cap_m2)
    }

    pub fn cap_m1_for(&self, gamma: f64) -> CapCondition {
        lookup_override(&self.overrides_m1, gamma).unwrap_or(self.cap_m1)
    }
}

fn lookup_override(list: &[CapOverride], gamma: f64) -> Option<CapCondition> {
    list.iter()
        .find(|o| (o.gamma - gamma).abs() <= GAMMA_MERGE_TOL * gamma.abs().max(1.0))
        .map(|o| o.cap)
}

/// Build channels from a boundary spectrum: one channel per distinct
/// eigenvalue, multiplicity carried over.
pub fn make_channels(a_spectrum: &[ASpectrumEntry]) -> Result<Vec<Channel>> {
    if a_spectrum.is_empty() {
        return Err(Error::invalid("empty boundary spectrum"));
    }
    Ok(a_spectrum
        .iter()
        .map(|e| Channel {
            gamma: e.gamma,
            mult: e.mult,
            potential_coeff: e.gamma * (e.gamma + 1.0),
            branch_exponents: (e.gamma + 1.0, -e.gamma),
        })
        .collect())
}

/// Result of the per-channel trace computation: a finite scalar, or the
/// marker for a cap solution that cannot be normalized at r = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TScalar {
    Finite(f64),
    Infinite,
}

impl TScalar {
    pub fn is_zero(&self) -> bool {
        matches!(self, TScalar::Finite(v) if *v == 0.0)
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            TScalar::Finite(v) => Some(*v),
            TScalar::Infinite => None,
        }
    }
}

/// Trace scalar of the harmonic extension on [r0, 1].
///
/// Solves the channel's harmonic equation with the cap imposed at r0 and the
/// normalization u(1) = 1, and returns t = (u' + gamma u)(1): the first-order
/// trace that annihilates the decaying branch r^{-gamma}. For gamma = -1/2
/// the degenerate power pair is replaced by the log basis r^{1/2},
/// r^{1/2} log r, and t extracts the log coefficient.
pub fn t_scalar(ch: &Channel, r0: f64, cap: CapCondition) -> Result<TScalar> {
    if !(r0 > 0.0 && r0 < 1.0) {
        return Err(Error::invalid(format!("r0 must lie in (0, 1), got {r0}")));
    }
    let g = ch.gamma;
    let log_case = (g + 0.5).abs() <= GAMMA_MERGE_TOL;
    // basis values and derivatives at r0 and 1; t-functional coefficients
    // (t kills u2, the decaying/no-log branch, and scales u1)
    let (b1, b2, u1_at_1, u2_at_1, t_coeff) = if log_case {
        // u1 = r^{1/2} log r (log branch), u2 = r^{1/2}
        let u1 = |r: f64| r.sqrt() * r.ln();
        let du1 = |r: f64| 0.5 / r.sqrt() * r.ln() + 1.0 / r.sqrt();
        let u2 = |r: f64| r.sqrt();
        let du2 = |r: f64| 0.5 / r.sqrt();
        (
            cap.apply(r0, u1(r0), du1(r0)),
            cap.apply(r0, u2(r0), du2(r0)),
            u1(1.0),
            u2(1.0),
            1.0, // (d/dr + gamma/r) of u1 at 1 equals 1; of u2 equals 0
        )
    } else {
        // u1 = r^{gamma+1}, u2 = r^{-gamma}
        let e1 = g + 1.0;
        let e2 = -g;
        (
            cap.apply(r0, r0.powf(e1), e1 * r0.powf(e1 - 1.0)),
            cap.apply(r0, r0.powf(e2), e2 * r0.powf(e2 - 1.0)),
            1.0,
            1.0,
            2.0 * g + 1.0, // (d/dr + gamma/r) r^{gamma+1} at 1
        )
    };
    if b1.abs() <= 1e-14 && b2.abs() <= 1e-14 {
        return Err(Error::solver(format!(
            "degenerate cap for channel gamma = {g}: the cap annihilates both harmonic branches"
        )));
    }
    // solve a*b1 + b*b2 = 0, a*u1(1) + b*u2(1) = 1
    let det = b1 * u2_at_1 - b2 * u1_at_1;
    let scale = b1.abs().max(b2.abs()) * u1_at_1.abs().max(u2_at_1.abs());
    if det.abs() <= 1e-14 * scale.max(1e-300) {
        // cap solution vanishes at r = 1; no normalizable harmonic
        return Ok(TScalar::Infinite);
    }
    let a = -b2 / det;
    // exact-zero detection relative to the solution magnitude
    let b = b1 / det;
    let t = t_coeff * a;
    if t.abs() <= 1e-12 * (a.abs() + b.abs()).max(1e-300) * t_coeff.abs().max(1.0) {
        return Ok(TScalar::Finite(0.0));
    }
    Ok(TScalar::Finite(t))
}

/// The extension decision: per-channel trace scalars, the space W, and the
/// integer pieces of the zero-multiplicity count.
#[derive(Debug, Clone)]
pub struct WDecision {
    /// (gamma, t) per channel, sorted by gamma.
    pub t_scalars: Vec<(f64, TScalar)>,
    /// Channels with |gamma| < 1/2 and vanishing trace scalar: the space W,
    /// always a union of full eigenspaces in the scalar model.
    pub w_members: Vec<f64>,
    /// Multiplicity total of channels gamma > 1/2 with vanishing trace:
    /// square-integrable harmonic fields on the infinite-cone completion.
    pub dim_ker_d2: usize,
    /// Multiplicity total of gamma = 1/2 channels with vanishing trace:
    /// extended states with a genuine boundary component at the 1/2 level.
    pub i_half: usize,
    /// Multiplicity total of channels whose limit-branch harmonic satisfies
    /// the cap at r = 1 exactly: kernel of the limit operator.
    pub dim_ker_limit: usize,
}

impl WDecision {
    pub fn zero_multiplicity(&self) -> usize {
        self.dim_ker_limit + self.dim_ker_d2 + self.i_half
    }

    pub fn contains(&self, gamma: f64) -> bool {
        self.w_members
            .iter()
            .any(|&g| (g - gamma).abs() <= GAMMA_MERGE_TOL * gamma.abs().max(1.0))
    }
}

/// Exponent of the harmonic branch the limit operator uses in a channel:
/// the decaying branch r^{-gamma} for W-members and for gamma <= -1/2
/// (where it is the regular one), the growing branch r^{gamma+1} otherwise.
pub fn limit_branch_exponent(gamma: f64, in_w: bool) -> f64 {
    if in_w || gamma <= -0.5 + GAMMA_MERGE_TOL {
        -gamma
    } else {
        gamma + 1.0
    }
}

/// Compute the extension decision for a geometry.
pub fn compute_w_decision(geom: &Geometry) -> Result<WDecision> {
    let mut t_scalars = Vec::with_capacity(geom.channels.len());
    let mut w_members = Vec::new();
    let mut dim_ker_d2 = 0usize;
    let mut i_half = 0usize;
    for ch in &geom.channels {
        let cap = geom.cap_m2_for(ch.gamma);
        let t = t_scalar(ch, geom.r0, cap)?;
        t_scalars.push((ch.gamma, t));
        if t.is_zero() {
            if ch.gamma.abs() < 0.5 - GAMMA_MERGE_TOL {
                w_members.push(ch.gamma);
            } else if (ch.gamma - 0.5).abs() <= GAMMA_MERGE_TOL {
                i_half += ch.mult;
            } else if ch.gamma > 0.5 {
                dim_ker_d2 += ch.mult;
            }
        }
    }
    // kernel of the limit operator: limit-branch harmonic matching the cap
    // at r = 1 exactly
    let mut dim_ker_limit = 0usize;
    for ch in &geom.channels {
        let in_w = w_members
            .iter()
            .any(|&g| (g - ch.gamma).abs() <= GAMMA_MERGE_TOL * ch.gamma.abs().max(1.0));
        let e = limit_branch_exponent(ch.gamma, in_w);
        let cap = geom.cap_m1_for(ch.gamma);
        // boundary form applied to r^e at r = 1: u = 1, u' = e
        let value = cap.apply(1.0, 1.0, e);
        if value.abs() <= 1e-12 {
            dim_ker_limit += ch.mult;
        }
    }
    Ok(WDecision {
        t_scalars,
        w_members,
        dim_ker_d2,
        i_half,
        dim_ker_limit,
    })
}
