//! Assembly of finite-eps and limit spectra, and the pseudomode Rayleigh
//! quotient.
//!
//! At finite eps each channel is one exact scalar problem on [eps r0, 1]
//! (the conical matching conditions hold identically in the exact-cone
//! model, so no extra gluing constraints appear). The limit report combines
//! the branch-rule spectra on [0, 1] with the integer zero-multiplicity from
//! the extension decision; the zero count is never a numerical count.

use crate::channel::{Geometry, TScalar, WDecision};
use crate::error::Result;
use crate::quad;
use crate::radial::{shoot_eigenvalues, BranchSelection, LeftCondition, RadialProblem};
use crate::Error as E;

/// Solver provenance of a spectrum entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverTag {
    Shooting,
    FiniteDifference,
}

impl SolverTag {
    pub fn label(&self) -> &'static str {
        match self {
            SolverTag::Shooting => "shooting",
            SolverTag::FiniteDifference => "fd",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "shooting" => Ok(SolverTag::Shooting),
            "fd" => Ok(SolverTag::FiniteDifference),
            other => Err(E::invalid(format!("unknown solver tag `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry {
    pub lambda: f64,
    pub gamma: f64,
    pub mult: usize,
    pub solver: SolverTag,
}

/// A spectrum at one eps (or the limit when `eps` is `None`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub eps: Option<f64>,
    pub entries: Vec<SpectrumEntry>,
    /// Multiplicity of zero in the limit spectrum (limit reports only);
    /// always the exact integer from the extension decision.
    pub zero_mult: Option<usize>,
}

impl SpectrumReport {
    /// Eigenvalues expanded with multiplicity, ascending. Limit reports
    /// prepend their zero block.
    pub fn expanded(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if let Some(z) = self.zero_mult {
            out.extend(std::iter::repeat_n(0.0, z));
        }
        for e in &self.entries {
            out.extend(std::iter::repeat_n(e.lambda, e.mult));
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    /// (lambda, gamma) pairs expanded with multiplicity, ascending.
    pub fn expanded_labeled(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for e in &self.entries {
            out.extend(std::iter::repeat_n((e.lambda, e.gamma), e.mult));
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }
}

fn sort_entries(entries: &mut [SpectrumEntry]) {
    entries.sort_by(|a, b| {
        (a.lambda, a.gamma)
            .partial_cmp(&(b.lambda, b.gamma))
            .unwrap()
    });
}

fn truncate_by_mult(entries: &mut Vec<SpectrumEntry>, count: usize) {
    let mut cum = 0usize;
    let mut keep = entries.len();
    for (i, e) in entries.iter().enumerate() {
        cum += e.mult;
        if cum >= count {
            keep = i + 1;
            break;
        }
    }
    entries.truncate(keep);
}

/// The radial problem of one channel at finite eps.
pub fn channel_problem_at_eps(
    geom: &Geometry,
    gamma: f64,
    eps: f64,
    count: usize,
) -> RadialProblem {
    let ch = geom
        .channels
        .iter()
        .find(|c| c.gamma == gamma)
        .expect("channel_problem_at_eps: unknown channel");
    RadialProblem {
        potential_coeff: ch.potential_coeff,
        interval: (eps * geom.r0, 1.0),
        left: LeftCondition::Cap(geom.cap_m2_for(gamma)),
        right: geom.cap_m1_for(gamma),
        count,
    }
}

/// Spectrum of the glued problem at finite eps: per channel, shooting on
/// [eps r0, 1] with the inner cap on the left and the outer cap on the
/// right, merged across channels with channel multiplicities and truncated
/// to the `count` smallest (the last kept entry may push past `count`).
pub fn eps_spectrum(geom: &Geometry, eps: f64, count: usize) -> Result<SpectrumReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(E::invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    let mut entries: Vec<SpectrumEntry> = Vec::new();
    for ch in &geom.channels {
        let p = channel_problem_at_eps(geom, ch.gamma, eps, count);
        let lams = shoot_eigenvalues(&p)
            .map_err(|e| E::solver(format!("channel gamma = {}: {e}", ch.gamma)))?;
        for l in lams {
            entries.push(SpectrumEntry {
                lambda: l,
                gamma: ch.gamma,
                mult: ch.mult,
                solver: SolverTag::Shooting,
            });
        }
    }
    sort_entries(&mut entries);
    truncate_by_mult(&mut entries, count);
    Ok(SpectrumReport {
        eps: Some(eps),
        entries,
        zero_mult: None,
    })
}

/// Threshold below which a shot limit eigenvalue is identified with the
/// exactly-counted zero block.
const LIMIT_ZERO_TOL: f64 = 1e-9;

/// Spectrum of the limit operator: per channel, the branch-rule problem on
/// [0, 1]; positive eigenvalues merged with multiplicities, the zero
/// multiplicity taken from the extension decision as an exact integer.
pub fn limit_spectrum(geom: &Geometry, w: &WDecision, count: usize) -> Result<SpectrumReport> {
    let mut entries: Vec<SpectrumEntry> = Vec::new();
    for ch in &geom.channels {
        let branch = if w.contains(ch.gamma) {
            BranchSelection::RMinusGamma
        } else {
            BranchSelection::Minimal
        };
        let p = RadialProblem {
            potential_coeff: ch.potential_coeff,
            interval: (0.0, 1.0),
            left: LeftCondition::Branch(branch),
            right: geom.cap_m1_for(ch.gamma),
            count,
        };
        let lams = shoot_eigenvalues(&p)
            .map_err(|e| E::solver(format!("channel gamma = {}: {e}", ch.gamma)))?;
        for l in lams {
            if l > LIMIT_ZERO_TOL {
                entries.push(SpectrumEntry {
                    lambda: l,
                    gamma: ch.gamma,
                    mult: ch.mult,
                    solver: SolverTag::Shooting,
                });
            }
        }
    }
    sort_entries(&mut entries);
    truncate_by_mult(&mut entries, count);
    Ok(SpectrumReport {
        eps: None,
        entries,
        zero_mult: Some(w.zero_multiplicity()),
    })
}

/// Rayleigh quotient and norm of the discrete pseudomode.
#[derive(Debug, Clone, Copy)]
pub struct PseudomodeQuotient {
    pub rayleigh: f64,
    pub l2_norm: f64,
}

/// Cut-off profile: 1 below 1/2, cubic smoothstep down to 0 at 1.
pub fn cutoff_xi(r: f64) -> f64 {
    if r <= 0.5 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        let s = 2.0 * r - 1.0;
        1.0 - s * s * (3.0 - 2.0 * s)
    }
}

fn cutoff_xi_prime(r: f64) -> f64 {
    if r <= 0.5 || r >= 1.0 {
        0.0
    } else {
        let s = 2.0 * r - 1.0;
        -12.0 * s * (1.0 - s)
    }
}

/// Build the transplanted pseudomode of a trace-free channel and return its
/// Rayleigh quotient and norm.
///
/// The section on the stable side is xi(r) r^{-gamma} on [eps, 1]; the
/// collapsing side carries the matching-scaled harmonic eps^{1/2-gamma}
/// rho^{-gamma} on [r0, 1], whose first-order energy vanishes identically.
/// For gamma = 1/2 the whole mode is scaled by |log eps|^{-1/2}; the norm
/// then converges to the norm of the generating boundary value (here 1),
/// while the quotient decays at the inverse-log rate. For |gamma| < 1/2 the
/// same construction keeps an order-one quotient: it is not a quasimode.
pub fn pseudomode_quotient(geom: &Geometry, eps: f64, gamma: f64) -> Result<PseudomodeQuotient> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(E::invalid(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    let ch = geom
        .channels
        .iter()
        .find(|c| c.gamma == gamma)
        .ok_or_else(|| E::invalid(format!("no channel with gamma = {gamma}")))?;
    let t = crate::channel::t_scalar(ch, geom.r0, geom.cap_m2_for(gamma))?;
    if !matches!(t, TScalar::Finite(v) if v == 0.0) {
        return Err(E::invalid(format!(
            "channel gamma = {gamma} has nonzero trace scalar; the harmonic does not extend"
        )));
    }
    let g = gamma;
    let half_case = (g - 0.5).abs() <= 1e-12;
    let norm_factor_sq = if half_case {
        1.0 / (1.0 / eps).ln()
    } else {
        1.0
    };
    // panel-doubling loop on the quotient itself
    let mut panels = 8usize;
    let mut prev: Option<PseudomodeQuotient> = None;
    for _ in 0..14 {
        let q = pseudomode_at_resolution(geom, eps, g, norm_factor_sq, panels);
        if let Some(p) = prev {
            let dr = (q.rayleigh - p.rayleigh).abs() / q.rayleigh.abs().max(1e-300);
            let dn = (q.l2_norm - p.l2_norm).abs() / q.l2_norm.abs().max(1e-300);
            if dr < 1e-3 && dn < 1e-3 {
                return Ok(q);
            }
        }
        prev = Some(q);
        panels *= 2;
    }
    Err(E::solver(
        "pseudomode quadrature did not settle".to_string(),
    ))
}

fn pseudomode_at_resolution(
    geom: &Geometry,
    eps: f64,
    g: f64,
    norm_factor_sq: f64,
    panels: usize,
) -> PseudomodeQuotient {
    let breaks = [0.5];
    // stable-side mass: int_eps^1 xi^2 r^{-2 gamma} dr
    let mut mass1 = |r: f64| cutoff_xi(r).powi(2) * r.powf(-2.0 * g);
    let m1 = quad::integrate_log_panels(&mut mass1, eps, 1.0, panels, &breaks);
    // collapsing-side mass: eps^{1-2 gamma} int_{r0}^1 rho^{-2 gamma} drho
    let mut mass2 = |rho: f64| rho.powf(-2.0 * g);
    let m2 = eps.powf(1.0 - 2.0 * g)
        * quad::integrate_log_panels(&mut mass2, geom.r0, 1.0, panels, &breaks);
    // first-order energy: only the cut-off derivative survives
    let mut energy = |r: f64| cutoff_xi_prime(r).powi(2) * r.powf(-2.0 * g);
    let q = quad::integrate_log_panels(&mut energy, 0.5, 1.0, panels, &[]);
    let norm_sq = norm_factor_sq * (m1 + m2);
    PseudomodeQuotient {
        rayleigh: norm_factor_sq * q / norm_sq,
        l2_norm: norm_sq.sqrt(),
    }
}

/// Count of eigenvalues (with multiplicity) below a threshold, the
/// small-eigenvalue counter used for the zero-multiplicity comparison.
pub fn count_below(report: &SpectrumReport, threshold: f64) -> usize {
    report
        .entries
        .iter()
        .filter(|e| e.lambda < threshold)
        .map(|e| e.mult)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{compute_w_decision, CapCondition, CapOverride, Channel};

    fn ch(gamma: f64, mult: usize) -> Channel {
        Channel {
            gamma,
            mult,
            potential_coeff: gamma * (gamma + 1.0),
            branch_exponents: (gamma + 1.0, -gamma),
        }
    }

    fn single_gamma0(cap_m2: CapCondition, cap_m1: CapCondition) -> Geometry {
        Geometry::new(vec![ch(0.0, 1)], 0.5, cap_m2, cap_m1).unwrap()
    }

    #[test]
    fn eps_spectrum_free_channel_dirichlet() {
        let geom = single_gamma0(CapCondition::Dirichlet, CapCondition::Dirichlet);
        let eps = 0.01;
        let rep = eps_spectrum(&geom, eps, 4).unwrap();
        for (i, e) in rep.entries.iter().enumerate() {
            let want = ((i + 1) as f64 * std::f64::consts::PI / (1.0 - eps * 0.5)).powi(2);
            assert!(
                (e.lambda - want).abs() < 1e-9 * want,
                "{} vs {want}",
                e.lambda
            );
        }
    }

    #[test]
    fn eps_spectrum_free_channel_neumann_left() {
        let geom = single_gamma0(CapCondition::Neumann, CapCondition::Dirichlet);
        let eps = 0.01;
        let rep = eps_spectrum(&geom, eps, 4).unwrap();
        for (i, e) in rep.entries.iter().enumerate() {
            let want = ((i as f64 + 0.5) * std::f64::consts::PI / (1.0 - eps * 0.5)).powi(2);
            assert!((e.lambda - want).abs() < 1e-9 * want);
        }
    }

    #[test]
    fn limit_spectrum_branch_depends_on_w() {
        // Dirichlet inner cap: 0 not in W -> sine series
        let geom = single_gamma0(CapCondition::Dirichlet, CapCondition::Dirichlet);
        let w = compute_w_decision(&geom).unwrap();
        let rep = limit_spectrum(&geom, &w, 3).unwrap();
        assert_eq!(rep.zero_mult, Some(0));
        for (i, e) in rep.entries.iter().enumerate() {
            let want = ((i + 1) as f64 * std::f64::consts::PI).powi(2);
            assert!((e.lambda - want).abs() < 1e-8 * want);
        }
        // Neumann inner cap: 0 in W -> cosine series
        let geom = single_gamma0(CapCondition::Neumann, CapCondition::Dirichlet);
        let w = compute_w_decision(&geom).unwrap();
        assert!(w.contains(0.0));
        let rep = limit_spectrum(&geom, &w, 3).unwrap();
        for (i, e) in rep.entries.iter().enumerate() {
            let want = ((i as f64 + 0.5) * std::f64::consts::PI).powi(2);
            assert!((e.lambda - want).abs() < 1e-8 * want);
        }
    }

    #[test]
    fn zero_mult_assembles_from_decision() {
        // half channel (mult 2, matched Robin), an L2 channel (3/4, matched
        // Robin override), and a W channel whose harmonic matches the outer cap
        let mut geom = Geometry::new(
            vec![ch(0.0, 1), ch(0.5, 2), ch(0.75, 1)],
            0.5,
            CapCondition::Robin { kappa: -0.5 },
            CapCondition::Robin { kappa: 0.0 },
        )
        .unwrap();
        geom.overrides_m2.push(CapOverride {
            gamma: 0.75,
            cap: CapCondition::Robin { kappa: -0.75 },
        });
        geom.overrides_m2.push(CapOverride {
            gamma: 0.0,
            cap: CapCondition::Neumann,
        });
        let w = compute_w_decision(&geom).unwrap();
        assert_eq!(w.i_half, 2);
        assert_eq!(w.dim_ker_d2, 1);
        assert_eq!(w.dim_ker_limit, 1);
        let rep = limit_spectrum(&geom, &w, 6).unwrap();
        assert_eq!(rep.zero_mult, Some(4));
        // every reported entry is positive: the zero block is integer-only
        assert!(rep.entries.iter().all(|e| e.lambda > 0.0));
    }

    #[test]
    fn entries_sorted_and_truncated_by_multiplicity() {
        let geom = Geometry::new(
            vec![ch(0.0, 2), ch(1.0, 3)],
            0.5,
            CapCondition::Dirichlet,
            CapCondition::Dirichlet,
        )
        .unwrap();
        let rep = eps_spectrum(&geom, 0.01, 5).unwrap();
        let total: usize = rep.entries.iter().map(|e| e.mult).sum();
        assert!(total >= 5 && total <= 5 + 2);
        for w in rep.entries.windows(2) {
            assert!(w[0].lambda <= w[1].lambda);
        }
    }

    #[test]
    fn pseudomode_half_channel_log_rate() {
        let geom = Geometry::new(
            vec![ch(0.5, 1)],
            0.5,
            CapCondition::Robin { kappa: -0.5 },
            CapCondition::Dirichlet,
        )
        .unwrap();
        let q4 = pseudomode_quotient(&geom, 1e-4, 0.5).unwrap();
        let q8 = pseudomode_quotient(&geom, 1e-8, 0.5).unwrap();
        // quotient decays roughly like 1/|log eps|: halving |log eps|
        let ratio = q4.rayleigh / q8.rayleigh;
        assert!(
            (ratio - 2.0).abs() < 0.35,
            "expected ~2, got {ratio} ({} vs {})",
            q4.rayleigh,
            q8.rayleigh
        );
        // the norm approaches the boundary-value norm 1
        assert!((q8.l2_norm - 1.0).abs() < 0.05, "norm {}", q8.l2_norm);
    }

    #[test]
    fn pseudomode_window_channel_is_not_a_quasimode() {
        let geom = Geometry::new(
            vec![ch(0.0, 1)],
            0.5,
            CapCondition::Neumann,
            CapCondition::Dirichlet,
        )
        .unwrap();
        let q4 = pseudomode_quotient(&geom, 1e-4, 0.0).unwrap();
        let q8 = pseudomode_quotient(&geom, 1e-8, 0.0).unwrap();
        assert!(q8.rayleigh > 0.5 * q4.rayleigh);
        assert!(q8.rayleigh > 0.1);
    }

    #[test]
    fn pseudomode_requires_trace_free_channel() {
        let geom = single_gamma0(CapCondition::Dirichlet, CapCondition::Dirichlet);
        assert!(pseudomode_quotient(&geom, 1e-4, 0.0).is_err());
    }

    #[test]
    fn collapsing_side_mass_change_of_variables() {
        // the mass carried by the collapsing side equals the glued-coordinate
        // mass of the same harmonic on [eps r0, eps]: exact change of variables
        let g = 0.5f64;
        let eps = 1e-3f64;
        let r0 = 0.5f64;
        let mut glued = |r: f64| (eps.powf(0.5 - g) * (r / eps).powf(-g)).powi(2) / eps;
        let lhs = quad::integrate_log_panels(&mut glued, eps * r0, eps, 64, &[]);
        let mut unscaled = |rho: f64| (eps.powf(0.5 - g) * rho.powf(-g)).powi(2);
        let rhs = quad::integrate_log_panels(&mut unscaled, r0, 1.0, 64, &[]);
        assert!((lhs - rhs).abs() < 1e-10 * rhs.abs());
    }
}
