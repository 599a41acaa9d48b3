//! Cross-route invariants of the radial machinery at the assembly level.

use conespec::channel::{compute_w_decision, CapCondition, Channel, Geometry};
use conespec::convergence::{match_and_fit, sweep};
use conespec::quad;
use conespec::radial::{
    eigenfunction, fd_eigenvalues, shoot_eigenvalues, LeftCondition, RadialProblem,
};
use conespec::spectra::{channel_problem_at_eps, eps_spectrum};

fn ch(gamma: f64, mult: usize) -> Channel {
    Channel {
        gamma,
        mult,
        potential_coeff: gamma * (gamma + 1.0),
        branch_exponents: (gamma + 1.0, -gamma),
    }
}

#[test]
fn dual_route_agreement_out_to_gamma_three() {
    let caps = [
        (CapCondition::Dirichlet, CapCondition::Dirichlet),
        (CapCondition::Neumann, CapCondition::Dirichlet),
        (CapCondition::Dirichlet, CapCondition::Robin { kappa: -0.4 }),
    ];
    for &gamma in &[-3.0, -2.4, 2.6, 3.0] {
        for &(left, right) in &caps {
            let p = RadialProblem {
                potential_coeff: gamma * (gamma + 1.0),
                interval: (0.1, 1.0),
                left: LeftCondition::Cap(left),
                right,
                count: 5,
            };
            let shot = shoot_eigenvalues(&p).unwrap();
            let fd = fd_eigenvalues(&p, &[96, 192, 384, 768]).unwrap();
            for (s, (f, _)) in shot.iter().zip(&fd) {
                assert!(
                    (s - f).abs() <= 1e-6 * s.abs().max(1.0),
                    "gamma={gamma}: {s} vs {f}"
                );
            }
        }
    }
}

#[test]
fn half_channel_small_eigenvalue_cross_checked_by_fd() {
    // matched Robin inner cap: the first eigenvalue decays like an inverse
    // log; the finite-difference route confirms each swept value
    let geom = Geometry::new(
        vec![ch(0.5, 1)],
        0.5,
        CapCondition::Robin { kappa: -0.5 },
        CapCondition::Dirichlet,
    )
    .unwrap();
    let mut prev = f64::INFINITY;
    for &eps in &[1e-2f64, 1e-4, 1e-6] {
        let rep = eps_spectrum(&geom, eps, 1).unwrap();
        let lam = rep.entries[0].lambda;
        assert!(lam > 0.0 && lam < prev, "eps={eps}: {lam} (prev {prev})");
        prev = lam;
        let p = channel_problem_at_eps(&geom, 0.5, eps, 1);
        let fd = fd_eigenvalues(&p, &[256, 512, 1024]).unwrap();
        assert!(
            (fd[0].0 - lam).abs() < 1e-6 * lam.max(0.01),
            "eps={eps}: shooting {lam} vs fd {}",
            fd[0].0
        );
    }
}

#[test]
fn gluing_trace_scaling_is_a_change_of_variables() {
    // the collapsing-side section of a computed eigenfunction carries
    // exactly the mass of the glued-coordinate eigenfunction over the cap
    // collar: identity under rho = r / eps
    let geom = Geometry::new(
        vec![ch(0.75, 1)],
        0.5,
        CapCondition::Robin { kappa: -0.75 },
        CapCondition::Dirichlet,
    )
    .unwrap();
    let eps = 1e-3;
    let rep = eps_spectrum(&geom, eps, 1).unwrap();
    let p = channel_problem_at_eps(&geom, 0.75, eps, 1);
    let mode = eigenfunction(&p, rep.entries[0].lambda).unwrap();
    let mut glued = |r: f64| mode.eval(r).powi(2);
    let (lhs, ok1) = quad::integrate_adaptive(&mut glued, eps * geom.r0, eps, 1e-10, &[]);
    // sigma_2(rho) = sqrt(eps) u(eps rho) on [r0, 1]
    let mut unscaled = |rho: f64| (eps.sqrt() * mode.eval(eps * rho)).powi(2);
    let (rhs, ok2) = quad::integrate_adaptive(&mut unscaled, geom.r0, 1.0, 1e-10, &[]);
    assert!(ok1 && ok2);
    assert!(
        (lhs - rhs).abs() <= 1e-8 * lhs.abs().max(1e-300),
        "{lhs} vs {rhs}"
    );
}

#[test]
fn channel_label_of_leading_eigenvalue_stabilizes() {
    let geom = Geometry::new(
        vec![ch(0.0, 1), ch(0.5, 2)],
        0.5,
        CapCondition::Robin { kappa: -0.5 },
        CapCondition::Dirichlet,
    )
    .unwrap();
    let mut labels = Vec::new();
    for k in 2..=10 {
        let eps = 10f64.powf(-(k as f64) / 2.0);
        let rep = eps_spectrum(&geom, eps, 1).unwrap();
        labels.push(rep.expanded_labeled()[0].1);
    }
    // eventually constant: the tail of the sweep agrees
    let tail = &labels[labels.len() - 4..];
    assert!(tail.iter().all(|g| *g == tail[0]), "{labels:?}");
}

#[test]
fn sweep_limit_row_reproduces_limit_spectrum() {
    let geom = Geometry::new(
        vec![ch(0.0, 1)],
        0.5,
        CapCondition::Neumann,
        CapCondition::Dirichlet,
    )
    .unwrap();
    let w = compute_w_decision(&geom).unwrap();
    let eps_list: Vec<f64> = (1..=4).map(|k| 10f64.powi(-k)).collect();
    let table = sweep(&geom, &w, &eps_list, 3).unwrap();
    let direct = conespec::spectra::limit_spectrum(&geom, &w, 3).unwrap();
    assert_eq!(table.limit, direct);
}

#[test]
fn dirichlet_model_converges_monotonically_for_first_ten() {
    // closed-form model: lambda_N(eps) = (N pi / (1 - eps/2))^2 decreases to
    // N^2 pi^2 along the dyadic sweep, index by index
    let geom = Geometry::new(
        vec![ch(0.0, 1)],
        0.5,
        CapCondition::Dirichlet,
        CapCondition::Dirichlet,
    )
    .unwrap();
    let w = compute_w_decision(&geom).unwrap();
    let eps_list: Vec<f64> = (2..=10).map(|k| 10f64.powf(-(k as f64) / 2.0)).collect();
    let table = sweep(&geom, &w, &eps_list, 10).unwrap();
    for n in 1..=10usize {
        let limit = table.limit_lambda(n).unwrap();
        let closed = (n as f64 * std::f64::consts::PI).powi(2);
        assert!((limit - closed).abs() < 1e-7 * closed);
        let mut prev = f64::INFINITY;
        for i in 0..eps_list.len() {
            let lam = table.lambda_at(i, n).unwrap();
            assert!(lam < prev, "index {n} not monotone at sweep point {i}");
            assert!(lam > limit, "index {n} crossed its limit");
            prev = lam;
        }
        let last = table.lambda_at(eps_list.len() - 1, n).unwrap();
        assert!((last - limit).abs() < 1e-4 * limit);
    }
}

#[test]
fn pseudomode_halving_matches_log_ratio() {
    // halving eps changes the quotient by the ratio of the logs, up to the
    // subleading corrections
    let geom = Geometry::new(
        vec![ch(0.5, 1)],
        0.5,
        CapCondition::Robin { kappa: -0.5 },
        CapCondition::Dirichlet,
    )
    .unwrap();
    let eps = 1e-4f64;
    let q1 = conespec::spectra::pseudomode_quotient(&geom, eps, 0.5).unwrap();
    let q2 = conespec::spectra::pseudomode_quotient(&geom, eps / 2.0, 0.5).unwrap();
    let got = q1.rayleigh / q2.rayleigh;
    let want = (1.0 / (eps / 2.0)).ln() / (1.0 / eps).ln();
    assert!(
        (got - want).abs() <= 0.1 * want,
        "quotient ratio {got} vs log ratio {want}"
    );
}

#[test]
fn fit_results_invariant_under_table_permutation() {
    let geom = Geometry::new(
        vec![ch(0.0, 1)],
        0.5,
        CapCondition::Neumann,
        CapCondition::Dirichlet,
    )
    .unwrap();
    let w = compute_w_decision(&geom).unwrap();
    let eps_list: Vec<f64> = (1..=6).map(|k| 10f64.powi(-k)).collect();
    let table = sweep(&geom, &w, &eps_list, 2).unwrap();
    let fits = match_and_fit(&table).unwrap();
    // shuffle the rows and refit
    let mut shuffled = table.clone();
    shuffled.eps_list.rotate_left(2);
    shuffled.reports.rotate_left(2);
    shuffled.eps_list.swap(0, 3);
    shuffled.reports.swap(0, 3);
    let fits2 = match_and_fit(&shuffled).unwrap();
    for (a, b) in fits.iter().zip(&fits2) {
        assert_eq!(format!("{:?}", a.outcome), format!("{:?}", b.outcome));
    }
}
