//! Gauss-Legendre quadrature on composite panels.
//!
//! Radial integrands carry 1/r-type weights down to r = eps, so panels are
//! laid out uniformly in log r and refined by doubling until the value
//! settles.

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on P_n; no tabulated constants.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-based initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed-rule integral of `f` over [a, b].
pub fn integrate<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    nodes: &[f64],
    weights: &[f64],
) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Composite integral over [a, b] on `panels` log-spaced panels.
///
/// Extra break points (cut-off kinks, support edges) can be forced through
/// `breaks`; they are inserted into the panel layout exactly.
pub fn integrate_log_panels<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    panels: usize,
    breaks: &[f64],
) -> f64 {
    assert!(a > 0.0 && b > a);
    let (nodes, weights) = gauss_legendre(16);
    let la = a.ln();
    let lb = b.ln();
    let mut cuts: Vec<f64> = (0..=panels)
        .map(|i| (la + (lb - la) * i as f64 / panels as f64).exp())
        .collect();
    for &br in breaks {
        if br > a && br < b {
            cuts.push(br);
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut acc = 0.0;
    for pair in cuts.windows(2) {
        acc += integrate(f, pair[0], pair[1], &nodes, &weights);
    }
    acc
}

/// Composite log-panel integral with panel doubling until the relative
/// change drops below `rel_tol`. Returns (value, converged).
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    rel_tol: f64,
    breaks: &[f64],
) -> (f64, bool) {
    let mut panels = 8;
    let mut prev = integrate_log_panels(f, a, b, panels, breaks);
    for _ in 0..12 {
        panels *= 2;
        let next = integrate_log_panels(f, a, b, panels, breaks);
        let scale = next.abs().max(prev.abs()).max(1e-300);
        if (next - prev).abs() <= rel_tol * scale {
            return (next, true);
        }
        prev = next;
    }
    (prev, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_nodes_integrate_polynomials_exactly() {
        // n-point rule is exact through degree 2n-1.
        let (nodes, weights) = gauss_legendre(8);
        for deg in 0..=15usize {
            let mut f = |x: f64| x.powi(deg as i32);
            let got = integrate(&mut f, -1.0, 1.0, &nodes, &weights);
            let expect = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            assert!((got - expect).abs() < 1e-13, "deg {deg}: {got} vs {expect}");
        }
    }

    #[test]
    fn high_order_rule_matches_analytic_value() {
        let (nodes, weights) = gauss_legendre(32);
        let mut f = |x: f64| (3.0 * x).cos();
        let got = integrate(&mut f, -1.0, 1.0, &nodes, &weights);
        let expect = 2.0 * (3.0f64).sin() / 3.0;
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn log_panels_handle_inverse_weight() {
        //  int_eps^1 dr/r = |log eps| exactly on log panels.
        let eps = 1e-8;
        let mut f = |r: f64| 1.0 / r;
        let got = integrate_log_panels(&mut f, eps, 1.0, 32, &[]);
        assert!((got - (1.0 / eps).ln()).abs() < 1e-10);
    }

    #[test]
    fn adaptive_doubling_converges() {
        let mut f = |r: f64| r.powf(-0.5);
        let (got, ok) = integrate_adaptive(&mut f, 1e-6, 1.0, 1e-12, &[]);
        assert!(ok);
        let expect = 2.0 * (1.0 - 1e-3);
        assert!((got - expect).abs() < 1e-9);
    }
}
