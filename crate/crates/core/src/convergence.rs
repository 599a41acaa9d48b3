//! Sweep orchestration, convergence-rate fitting, trace-decay checks, and
//! the Hardy inequality property.

use crate::channel::{Geometry, WDecision};
use crate::error::Result;
use crate::quad;
use crate::radial::eigenfunction;
use crate::spectra::{channel_problem_at_eps, eps_spectrum, limit_spectrum, SpectrumReport};
use crate::Error as E;

/// Default sweep: 10^{-k/2} for k = 2..=16, spanning the inverse-log regime
/// without underflow in the inner radius.
pub fn default_eps_list() -> Vec<f64> {
    (2..=16).map(|k| 10f64.powf(-(k as f64) / 2.0)).collect()
}

/// The sweep table: one spectrum per eps plus the limit report.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub eps_list: Vec<f64>,
    pub reports: Vec<SpectrumReport>,
    pub limit: SpectrumReport,
    pub count: usize,
}

impl SweepTable {
    /// lambda_N(eps) for 1-based index n; expanded with multiplicity.
    pub fn lambda_at(&self, eps_idx: usize, n: usize) -> Option<f64> {
        self.reports[eps_idx].expanded().get(n - 1).copied()
    }

    pub fn limit_lambda(&self, n: usize) -> Option<f64> {
        self.limit.expanded().get(n - 1).copied()
    }
}

/// Run the sweep: one eps-spectrum per point, the limit once.
pub fn sweep(geom: &Geometry, w: &WDecision, eps_list: &[f64], count: usize) -> Result<SweepTable> {
    if eps_list.is_empty() {
        return Err(E::invalid("empty eps list"));
    }
    for pair in eps_list.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(E::invalid("eps list must be strictly decreasing"));
        }
    }
    if !(eps_list[0] < 1.0 && eps_list[eps_list.len() - 1] > 0.0) {
        return Err(E::invalid("eps values must lie in (0, 1)"));
    }
    let reports: Result<Vec<SpectrumReport>> = eps_list
        .iter()
        .map(|&e| eps_spectrum(geom, e, count))
        .collect();
    let limit = limit_spectrum(geom, w, count)?;
    Ok(SweepTable {
        eps_list: eps_list.to_vec(),
        reports: reports?,
        limit,
        count,
    })
}

/// Parallel sweep over eps points; results identical to [`sweep`].
pub fn sweep_parallel(
    geom: &Geometry,
    w: &WDecision,
    eps_list: &[f64],
    count: usize,
    threads: usize,
) -> Result<SweepTable> {
    if threads <= 1 || eps_list.len() <= 1 {
        return sweep(geom, w, eps_list, count);
    }
    for pair in eps_list.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(E::invalid("eps list must be strictly decreasing"));
        }
    }
    let mut slots: Vec<Option<Result<SpectrumReport>>> = Vec::new();
    slots.resize_with(eps_list.len(), || None);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..threads.min(eps_list.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= eps_list.len() {
                    break;
                }
                let rep = eps_spectrum(geom, eps_list[i], count);
                slots.lock().unwrap()[i] = Some(rep);
            });
        }
    });
    let mut reports = Vec::with_capacity(eps_list.len());
    for slot in slots.into_inner().unwrap().iter_mut() {
        reports.push(slot.take().expect("sweep worker missed a slot")?);
    }
    let limit = limit_spectrum(geom, w, count)?;
    Ok(SweepTable {
        eps_list: eps_list.to_vec(),
        reports,
        limit,
        count,
    })
}

/// Candidate rate families for the error fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateFamily {
    /// err ~ eps^alpha
    Power,
    /// err ~ 1/|log eps|
    InverseLog,
    /// err ~ eps^alpha |log eps|^beta
    PowerLog,
}

#[derive(Debug, Clone)]
pub enum FitOutcome {
    /// The column is constant to rounding: rate 0.
    Converged,
    /// Error sequence not monotone; no fit attempted.
    NonMonotone,
    Fit {
        family: RateFamily,
        alpha: f64,
        beta: f64,
        r_squared: f64,
    },
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub n: usize,
    pub limit_lambda: f64,
    pub outcome: FitOutcome,
}

/// Least-squares fit of |lambda_N(eps) - lambda_N| against the candidate
/// families, per index. Zero-limit indices are tried against the
/// inverse-log family first.
pub fn match_and_fit(table: &SweepTable) -> Result<Vec<FitResult>> {
    if table.eps_list.len() < 4 {
        return Err(E::invalid("need at least 4 eps points to fit rates"));
    }
    // order rows by decreasing eps so the fits ignore the table's ordering
    let mut order: Vec<usize> = (0..table.eps_list.len()).collect();
    order.sort_by(|&i, &j| table.eps_list[j].partial_cmp(&table.eps_list[i]).unwrap());
    let eps_sorted: Vec<f64> = order.iter().map(|&i| table.eps_list[i]).collect();
    let limit_exp = table.limit.expanded();
    let n_max = limit_exp.len().min(
        table
            .reports
            .iter()
            .map(|r| r.expanded().len())
            .min()
            .unwrap_or(0),
    );
    let mut out = Vec::new();
    for n in 1..=n_max {
        let lam_lim = limit_exp[n - 1];
        let lams: Vec<f64> = order
            .iter()
            .map(|&i| table.lambda_at(i, n).unwrap())
            .collect();
        let scale = lams
            .iter()
            .fold(lam_lim.abs(), |m, l| m.max(l.abs()))
            .max(1.0);
        let spread = lams.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - lams.iter().cloned().fold(f64::INFINITY, f64::min);
        let errs: Vec<f64> = lams.iter().map(|l| (l - lam_lim).abs()).collect();
        let max_err = errs.iter().cloned().fold(0.0, f64::max);
        if spread <= 1e-12 * scale || max_err <= 1e-11 * scale {
            out.push(FitResult {
                n,
                limit_lambda: lam_lim,
                outcome: FitOutcome::Converged,
            });
            continue;
        }
        // monotonicity: errors must not grow as eps decreases
        let floor = 1e-12 * scale;
        let mut monotone = true;
        for pair in errs.windows(2) {
            if pair[1] > 1.5 * pair[0] && pair[1] > 100.0 * floor {
                monotone = false;
                break;
            }
        }
        if !monotone {
            out.push(FitResult {
                n,
                limit_lambda: lam_lim,
                outcome: FitOutcome::NonMonotone,
            });
            continue;
        }
        let xs_eps: Vec<f64> = eps_sorted.iter().map(|e| e.ln()).collect();
        let xs_log: Vec<f64> = eps_sorted.iter().map(|e| (1.0 / e).ln().ln()).collect();
        let ys: Vec<f64> = errs.iter().map(|e| e.max(floor).ln()).collect();
        let power = fit_linear(&xs_eps, &ys);
        let invlog = fit_fixed_slope(&xs_log, &ys, -1.0);
        let powerlog = fit_two(&xs_eps, &xs_log, &ys);
        let zero_limit = lam_lim.abs() <= 1e-9;
        let outcome = if zero_limit && invlog.1 >= 0.99 {
            FitOutcome::Fit {
                family: RateFamily::InverseLog,
                alpha: 1.0,
                beta: 0.0,
                r_squared: invlog.1,
            }
        } else {
            // prefer the single-exponent family unless the mixed one clearly wins
            if powerlog.2 > power.1 + 0.005 && powerlog.2 > invlog.1 + 0.005 {
                FitOutcome::Fit {
                    family: RateFamily::PowerLog,
                    alpha: powerlog.0,
                    beta: powerlog.1,
                    r_squared: powerlog.2,
                }
            } else if invlog.1 > power.1 {
                FitOutcome::Fit {
                    family: RateFamily::InverseLog,
                    alpha: 1.0,
                    beta: 0.0,
                    r_squared: invlog.1,
                }
            } else {
                FitOutcome::Fit {
                    family: RateFamily::Power,
                    alpha: power.0,
                    beta: 0.0,
                    r_squared: power.1,
                }
            }
        };
        out.push(FitResult {
            n,
            limit_lambda: lam_lim,
            outcome,
        });
    }
    Ok(out)
}

/// Simple linear regression y = c + slope x; returns (slope, r_squared).
pub fn fit_linear(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let c = my - slope * mx;
    (
        slope,
        r_squared(ys, &xs.iter().map(|x| c + slope * x).collect::<Vec<_>>()),
    )
}

/// Fit y = c + slope x with the slope pinned; returns (c, r_squared).
fn fit_fixed_slope(xs: &[f64], ys: &[f64], slope: f64) -> (f64, f64) {
    let n = xs.len() as f64;
    let c = ys.iter().zip(xs).map(|(y, x)| y - slope * x).sum::<f64>() / n;
    (
        c,
        r_squared(ys, &xs.iter().map(|x| c + slope * x).collect::<Vec<_>>()),
    )
}

/// Two-regressor least squares y = c + a x1 + b x2; returns (a, b, r_squared).
fn fit_two(x1: &[f64], x2: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = x1.len() as f64;
    let m1 = x1.iter().sum::<f64>() / n;
    let m2 = x2.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut s11, mut s22, mut s12, mut s1y, mut s2y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..x1.len() {
        let d1 = x1[i] - m1;
        let d2 = x2[i] - m2;
        let dy = ys[i] - my;
        s11 += d1 * d1;
        s22 += d2 * d2;
        s12 += d1 * d2;
        s1y += d1 * dy;
        s2y += d2 * dy;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() < 1e-12 * (s11 * s22).max(1e-300) {
        // collinear regressors: fall back to the single-slope fit
        let (a, r2) = fit_linear(x1, ys);
        return (a, 0.0, r2);
    }
    let a = (s1y * s22 - s2y * s12) / det;
    let b = (s2y * s11 - s1y * s12) / det;
    let c = my - a * m1 - b * m2;
    let model: Vec<f64> = (0..x1.len()).map(|i| c + a * x1[i] + b * x2[i]).collect();
    (a, b, r_squared(ys, &model))
}

fn r_squared(ys: &[f64], model: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let my = ys.iter().sum::<f64>() / n;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = ys.iter().zip(model).map(|(y, m)| (y - m) * (y - m)).sum();
    if ss_tot <= 0.0 {
        return 1.0;
    }
    1.0 - ss_res / ss_tot
}

// ---------------------------------------------------------------------------
// Trace decay
// ---------------------------------------------------------------------------

/// Channel bands of the trace-decay lemmas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaBand {
    /// gamma <= -1: square-root decay of the gluing trace.
    Low,
    /// gamma in (-1, 0): positive power decay, exponent geometry-dependent.
    Mid,
    /// gamma = 1/2: inverse-square-root-log laws.
    Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayLaw {
    /// quantity ~ eps^alpha: `exponent` is alpha.
    PowerEps,
    /// quantity ~ |log eps|^{-beta}: `exponent` is beta.
    PowerLog,
}

#[derive(Debug, Clone)]
pub struct BandDecay {
    pub band: GammaBand,
    pub law: DecayLaw,
    /// What is being fitted: the gluing trace or the singular coefficient.
    pub quantity: &'static str,
    pub exponent: f64,
    pub r_squared: f64,
}

/// Fit the decay of the N-th eigenmode's gluing trace (value at r = eps)
/// over the sweep, per band of its channel. Modes in channels outside every
/// band produce an empty result.
pub fn trace_decay_check(geom: &Geometry, eps_list: &[f64], n: usize) -> Result<Vec<BandDecay>> {
    if eps_list.len() < 3 {
        return Err(E::invalid("need at least 3 eps points for a decay fit"));
    }
    let count = n + 4;
    let mut traces: Vec<f64> = Vec::new();
    let mut coefs: Vec<f64> = Vec::new();
    let mut gamma_of_mode: Option<f64> = None;
    for &eps in eps_list {
        let rep = eps_spectrum(geom, eps, count)?;
        let labeled = rep.expanded_labeled();
        let &(lambda, gamma) = labeled
            .get(n - 1)
            .ok_or_else(|| E::solver(format!("sweep produced fewer than {n} eigenvalues")))?;
        match gamma_of_mode {
            None => gamma_of_mode = Some(gamma),
            Some(g) if g == gamma => {}
            Some(g) => {
                return Err(E::solver(format!(
                    "channel label of mode {n} not stable along the sweep: {g} vs {gamma}"
                )));
            }
        }
        let p = channel_problem_at_eps(geom, gamma, eps, count);
        let mode = eigenfunction(&p, lambda)?;
        traces.push(mode.eval(eps).abs());
        coefs.push(mode.singular_coefficient().abs());
    }
    let gamma = gamma_of_mode.unwrap();
    let mut out = Vec::new();
    let ln_eps: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let ln_log: Vec<f64> = eps_list.iter().map(|e| (1.0 / e).ln().ln()).collect();
    if gamma <= -1.0 {
        let ys: Vec<f64> = traces.iter().map(|t| t.max(1e-300).ln()).collect();
        let (slope, r2) = fit_linear(&ln_eps, &ys);
        out.push(BandDecay {
            band: GammaBand::Low,
            law: DecayLaw::PowerEps,
            quantity: "gluing trace",
            exponent: slope,
            r_squared: r2,
        });
    } else if gamma > -1.0 && gamma < 0.0 {
        let ys: Vec<f64> = traces.iter().map(|t| t.max(1e-300).ln()).collect();
        let (slope, r2) = fit_linear(&ln_eps, &ys);
        out.push(BandDecay {
            band: GammaBand::Mid,
            law: DecayLaw::PowerEps,
            quantity: "gluing trace",
            exponent: slope,
            r_squared: r2,
        });
    } else if (gamma - 0.5).abs() <= 1e-12 {
        // scaled trace eps^{1/2} u(eps) ~ |log eps|^{-beta}
        let ys: Vec<f64> = traces
            .iter()
            .zip(eps_list)
            .map(|(t, e)| (t * e.sqrt()).max(1e-300).ln())
            .collect();
        let (slope, r2) = fit_linear(&ln_log, &ys);
        out.push(BandDecay {
            band: GammaBand::Half,
            law: DecayLaw::PowerLog,
            quantity: "scaled gluing trace",
            exponent: -slope,
            r_squared: r2,
        });
        // singular coefficient d ~ |log eps|^{-beta}
        let ys: Vec<f64> = coefs.iter().map(|c| c.max(1e-300).ln()).collect();
        let (slope, r2) = fit_linear(&ln_log, &ys);
        out.push(BandDecay {
            band: GammaBand::Half,
            law: DecayLaw::PowerLog,
            quantity: "singular coefficient",
            exponent: -slope,
            r_squared: r2,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Hardy inequality
// ---------------------------------------------------------------------------

/// A smooth compactly supported bump on (center - width, center + width).
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }

    pub fn eval(&self, r: f64) -> f64 {
        let s = (r - self.center) / self.width;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        self.amplitude * (-1.0 / (1.0 - s * s)).exp()
    }

    pub fn deriv(&self, r: f64) -> f64 {
        let s = (r - self.center) / self.width;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - s * s;
        self.amplitude * (-1.0 / q).exp() * (-2.0 * s / (q * q)) / self.width
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HardyReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluate both sides of the Hardy-type inequality for a bump supported in
/// (e, infinity):
///
///   lambda != -1/2: (lambda + 1/2)^2 int v^2 / r^2 <= int |r^{-lambda} (r^lambda v)'|^2
///   lambda  = -1/2: int v^2 / ((r log r)^2 log log r) <= int r |(r^{-1/2} v)'|^2
pub fn hardy_check(lambda: f64, v: &Bump, panels: usize) -> Result<HardyReport> {
    let (lo, hi) = v.support();
    if !(lo > std::f64::consts::E) {
        return Err(E::invalid(format!(
            "bump support [{lo}, {hi}] must lie strictly above e"
        )));
    }
    let log_case = (lambda + 0.5).abs() <= 1e-12;
    let mut lhs_f = |r: f64| {
        let val = v.eval(r);
        if log_case {
            let lr = r.ln();
            val * val / ((r * lr).powi(2) * lr.ln())
        } else {
            val * val / (r * r)
        }
    };
    let lhs_int = quad::integrate_log_panels(&mut lhs_f, lo, hi, panels, &[]);
    let lhs = if log_case {
        lhs_int
    } else {
        (lambda + 0.5).powi(2) * lhs_int
    };
    // r^{-2 lambda} |d/dr (r^lambda v)|^2 = (v' + lambda v / r)^2
    let mut rhs_f = |r: f64| {
        let d = v.deriv(r) + lambda * v.eval(r) / r;
        d * d
    };
    let rhs = quad::integrate_log_panels(&mut rhs_f, lo, hi, panels, &[]);
    Ok(HardyReport {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-8),
    })
}
