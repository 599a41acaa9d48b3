//! Integer-level cohomology predictions: square-integrable cohomology of the
//! infinite-cone completion, Mayer-Vietoris feasibility, and the
//! product-sphere small-eigenvalue table.
//!
//! Everything here is exact integer arithmetic on user- or catalog-supplied
//! Betti numbers; no cohomology is computed from triangulations.

use crate::error::{Error, Result};
use crate::Error as E;

/// Betti data of a gluing decomposition M = M1 u_Sigma M2, dim M = m,
/// dim Sigma = n = m - 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyInput {
    pub name: String,
    pub m: usize,
    /// Lengths m + 1 (degrees 0..=m).
    pub betti_m1: Vec<usize>,
    pub betti_m2: Vec<usize>,
    pub betti_m: Vec<usize>,
    /// Length m (degrees 0..=n).
    pub betti_sigma: Vec<usize>,
    /// Relative Betti numbers of (M2, Sigma), length m + 1.
    pub relative_betti_m2: Vec<usize>,
    /// Rank of H^{(n+1)/2}(M2, Sigma) -> H^{(n+1)/2}(M2); needed only when
    /// n is odd.
    pub image_rank_mid: Option<usize>,
}

impl CohomologyInput {
    pub fn validate(&self) -> Result<()> {
        let m = self.m;
        if m < 2 {
            return Err(E::invalid("glued manifold dimension must be at least 2"));
        }
        let check = |name: &str, v: &Vec<usize>, len: usize| -> Result<()> {
            if v.len() != len {
                return Err(E::invalid(format!(
                    "{name} must have {len} entries for m = {m}, got {}",
                    v.len()
                )));
            }
            Ok(())
        };
        check("betti_m1", &self.betti_m1, m + 1)?;
        check("betti_m2", &self.betti_m2, m + 1)?;
        check("betti_m", &self.betti_m, m + 1)?;
        check("betti_sigma", &self.betti_sigma, m)?;
        check("relative_betti_m2", &self.relative_betti_m2, m + 1)?;
        Ok(())
    }

    fn n(&self) -> usize {
        self.m - 1
    }
}

/// Dimension of the square-integrable harmonic k-forms on the infinite-cone
/// completion of M2: relative cohomology below the middle degree, absolute
/// above it, and the image rank exactly at the middle (n odd).
pub fn l2_cohomology(inp: &CohomologyInput, k: usize) -> Result<usize> {
    inp.validate()?;
    if k > inp.m {
        return Err(E::invalid(format!("degree {k} out of range 0..={}", inp.m)));
    }
    let n = inp.n();
    // middle degree (n+1)/2 exists as an integer only for odd n
    if n % 2 == 1 && 2 * k == n + 1 {
        return inp.image_rank_mid.ok_or_else(|| {
            E::invalid(format!(
                "degree {k} is the middle degree for n = {n}; image_rank_mid is required"
            ))
        });
    }
    if 2 * k < n + 1 {
        Ok(inp.relative_betti_m2[k])
    } else {
        Ok(inp.betti_m2[k])
    }
}

/// One inconsistency found by the Mayer-Vietoris feasibility check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MvFailure {
    pub degree: usize,
    pub position: &'static str,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct MvReport {
    pub consistent: bool,
    pub failures: Vec<MvFailure>,
}

/// Feasibility of the long exact sequence
/// 0 -> H^0(M) -> H^0(M1) + H^0(M2) -> H^0(Sigma) -> H^1(M) -> ...
/// from dimensions alone: running ranks r_i = dim_i - r_{i-1} must stay
/// non-negative and end at zero. Any single perturbed entry breaks the
/// terminal condition.
pub fn mv_check(inp: &CohomologyInput) -> Result<MvReport> {
    inp.validate()?;
    let m = inp.m;
    let mut dims: Vec<(usize, &'static str, usize)> = Vec::new();
    for k in 0..=m {
        dims.push((k, "glued", inp.betti_m[k]));
        dims.push((k, "pieces", inp.betti_m1[k] + inp.betti_m2[k]));
        dims.push((
            k,
            "cross-section",
            if k < m { inp.betti_sigma[k] } else { 0 },
        ));
    }
    let mut failures = Vec::new();
    let mut rank_prev: i64 = 0;
    for (degree, position, dim) in &dims {
        let rank_next = *dim as i64 - rank_prev;
        if rank_next < 0 {
            failures.push(MvFailure {
                degree: *degree,
                position,
                message: format!(
                    "term H^{degree} ({position}) of dimension {dim} cannot absorb incoming rank {rank_prev}"
                ),
            });
            rank_prev = 0;
        } else {
            rank_prev = rank_next;
        }
    }
    if rank_prev != 0 {
        failures.push(MvFailure {
            degree: m,
            position: "terminal",
            message: format!("sequence does not terminate exactly: trailing rank {rank_prev}"),
        });
    }
    Ok(MvReport {
        consistent: failures.is_empty(),
        failures,
    })
}

// ---------------------------------------------------------------------------
// Product-sphere predictions
// ---------------------------------------------------------------------------

/// Domain classification of the degree-n2 volume-form channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainClass {
    /// gamma = 0: the harmonic sits in the zero-eigenvalue block of the
    /// boundary operator and needs the W-extension.
    ZeroOfA,
    /// gamma < 0: the harmonic lies in the minimal domain.
    Minimal,
    /// gamma > 0: already square-integrable on the cone.
    SquareIntegrable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetPrediction {
    pub manifold: String,
    /// Degree carrying the small coexact eigenvalue.
    pub coexact_degree: usize,
    /// Dual degree carrying the small exact eigenvalue.
    pub exact_degree: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub n1: usize,
    pub n2: usize,
    /// Boundary-operator eigenvalue of the volume-form channel:
    /// gamma = n2 - n/2.
    pub gamma: f64,
    /// Whether gamma lies in the window (-1/2, 1/2] where the extension
    /// choice matters.
    pub in_window: bool,
    /// Exactly on the -1/2 boundary: outside the open window, flagged.
    pub boundary_half: bool,
    pub domain: DomainClass,
    /// Gluing of two disk bundles: the round sphere S^{n1+n2+1}.
    pub sphere_target: TargetPrediction,
    /// Surgery presentation S^{n1} x S^{n2+1}; needs n2 < n1 so the middle
    /// cohomology of the target vanishes in degree n2.
    pub product_target: Option<TargetPrediction>,
}

/// Small-eigenvalue prediction for the product construction
/// M1 = W1 x Sigma2, M2 = Sigma1 x W2 with spheres.
pub fn predict_small_eigenvalues(n1: usize, n2: usize) -> Result<Prediction> {
    if n2 > n1 {
        return Err(E::invalid(format!(
            "need n2 <= n1, got n1 = {n1}, n2 = {n2}"
        )));
    }
    if n1 + n2 < 2 {
        return Err(E::invalid("need n1 + n2 >= 2"));
    }
    let n = n1 + n2;
    let m = n + 1;
    let gamma = n2 as f64 - n as f64 / 2.0;
    let in_window = gamma > -0.5 && gamma <= 0.5;
    let boundary_half = gamma == -0.5;
    let domain = if gamma == 0.0 {
        DomainClass::ZeroOfA
    } else if gamma < 0.0 {
        DomainClass::Minimal
    } else {
        DomainClass::SquareIntegrable
    };
    let sphere_target = TargetPrediction {
        manifold: format!("S^{m}"),
        coexact_degree: n2,
        exact_degree: m - n2,
    };
    let product_target = (n2 < n1).then(|| TargetPrediction {
        manifold: format!("S^{n1} x S^{}", n2 + 1),
        coexact_degree: n2,
        exact_degree: m - n2,
    });
    Ok(Prediction {
        n1,
        n2,
        gamma,
        in_window,
        boundary_half,
        domain,
        sphere_target,
        product_target,
    })
}

// ---------------------------------------------------------------------------
// Decomposition catalog
// ---------------------------------------------------------------------------

fn kunneth(a: &[usize], b: &[usize], len: usize) -> Vec<usize> {
    let mut out = vec![0usize; len];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            if i + j < len {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn sphere(n: usize) -> Vec<usize> {
    let mut b = vec![0usize; n + 1];
    b[0] += 1;
    b[n] += 1;
    b
}

/// The sphere decomposition S^m = (D^{n1+1} x S^{n2}) u (S^{n1} x D^{n2+1}),
/// glued along S^{n1} x S^{n2}.
pub fn sphere_decomposition(n1: usize, n2: usize) -> Result<CohomologyInput> {
    if n1 == 0 || n2 > n1 || n1 + n2 < 2 {
        return Err(E::invalid(
            "sphere decomposition needs 1 <= n2 <= n1, n1 + n2 >= 2",
        ));
    }
    let n = n1 + n2;
    let m = n + 1;
    let pad = |mut v: Vec<usize>, len: usize| {
        v.resize(len, 0);
        v
    };
    // D^{n1+1} x S^{n2} retracts to S^{n2}; the other piece to S^{n1}
    let betti_m1 = pad(sphere(n2), m + 1);
    let betti_m2 = pad(sphere(n1), m + 1);
    let betti_sigma = pad(kunneth(&sphere(n1), &sphere(n2), n + 1), m);
    let betti_m = pad(sphere(m), m + 1);
    // H^j(M2, Sigma) is dual to H_{m-j}(S^{n1}): degrees n2 + 1 and m
    let mut relative = vec![0usize; m + 1];
    relative[m] += 1;
    relative[n2 + 1] += 1;
    // middle-degree image rank (n odd): the generator of the middle relative
    // group maps by the self-intersection of the core sphere, which has
    // trivial normal bundle in the product piece, so the map is zero
    let image_rank_mid = (n % 2 == 1).then_some(0);
    let inp = CohomologyInput {
        name: format!(
            "sphere S^{m} = D^{} x S^{n2} u S^{n1} x D^{}",
            n1 + 1,
            n2 + 1
        ),
        m,
        betti_m1,
        betti_m2,
        betti_m,
        betti_sigma,
        relative_betti_m2: relative,
        image_rank_mid,
    };
    inp.validate()?;
    Ok(inp)
}

/// The L-fold connected sum of S^k x S^l split as
/// (S^{k-1} x (S^{l+1} minus L+1 disks)) u (D^k x (L+1 copies of S^l)).
pub fn connected_sum_decomposition(k: usize, l: usize, copies: usize) -> Result<CohomologyInput> {
    if k < 1 || l < 1 || copies < 1 || k + l < 2 {
        return Err(E::invalid("connected sum needs k, l, copies >= 1"));
    }
    let m = k + l;
    let pad = |mut v: Vec<usize>, len: usize| {
        v.resize(len, 0);
        v
    };
    // S^{l+1} minus (copies+1) disks retracts to a wedge of `copies` l-spheres
    let mut punctured = vec![0usize; l + 1];
    punctured[0] = 1;
    punctured[l] += copies;
    let betti_m1 = pad(kunneth(&sphere(k - 1), &punctured, m + 1), m + 1);
    // D^k x (L+1 copies of S^l) retracts to the disjoint spheres
    let mut m2 = vec![0usize; l + 1];
    m2[0] = copies + 1;
    m2[l] += copies + 1;
    let betti_m2 = pad(m2, m + 1);
    let mut disjoint = vec![0usize; l + 1];
    disjoint[0] = copies + 1;
    disjoint[l] += copies + 1;
    let betti_sigma = pad(kunneth(&sphere(k - 1), &disjoint, m), m);
    // connected sum of `copies` products S^k x S^l
    let mut betti_m = vec![0usize; m + 1];
    betti_m[0] = 1;
    betti_m[m] += 1;
    betti_m[k] += copies;
    betti_m[l] += copies;
    // H^j(M2, Sigma) dual to (copies+1) H_{m-j}(S^l): degrees k and m
    let mut relative = vec![0usize; m + 1];
    relative[m] += copies + 1;
    relative[k] += copies + 1;
    let image_rank_mid = ((m - 1) % 2 == 1).then_some(0);
    let inp = CohomologyInput {
        name: format!("connected sum of {copies} copies of S^{k} x S^{l}"),
        m,
        betti_m1,
        betti_m2,
        betti_m,
        betti_sigma,
        relative_betti_m2: relative,
        image_rank_mid,
    };
    inp.validate()?;
    Ok(inp)
}

/// The shipped catalog of decompositions.
pub fn catalog() -> Vec<CohomologyInput> {
    vec![
        sphere_decomposition(1, 1).unwrap(),
        sphere_decomposition(2, 1).unwrap(),
        sphere_decomposition(2, 2).unwrap(),
        sphere_decomposition(3, 1).unwrap(),
        connected_sum_decomposition(2, 3, 2).unwrap(),
        connected_sum_decomposition(2, 2, 3).unwrap(),
    ]
}

/// Parse a decomposition data file (strict key-value schema):
/// ```text
/// name = sphere 2 1
/// m = 4
/// betti_m1 = 1 1 0 0 0
/// betti_m2 = 1 0 1 0 0
/// betti_m = 1 0 0 0 1
/// betti_sigma = 1 1 1 1
/// relative_betti_m2 = 0 0 1 0 1
/// image_rank_mid = 0        # optional; required for odd cross-section dim
/// ```
pub fn parse_cohomology_file(text: &str) -> Result<CohomologyInput> {
    let mut name = String::new();
    let mut m: Option<usize> = None;
    let mut lists: std::collections::BTreeMap<&str, Vec<usize>> = Default::default();
    let mut image_rank_mid: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(line_no, format!("expected `key = value`, got `{line}`"))
        })?;
        let key = key.trim();
        let value = value.trim();
        let parse_list = |v: &str| -> Result<Vec<usize>> {
            v.split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| {
                        Error::config(line_no, format!("cannot parse `{t}` as a Betti number"))
                    })
                })
                .collect()
        };
        match key {
            "name" => name = value.to_string(),
            "m" => {
                m = Some(value.parse().map_err(|_| {
                    Error::config(line_no, format!("cannot parse `{value}` for field `m`"))
                })?);
            }
            "betti_m1" | "betti_m2" | "betti_m" | "betti_sigma" | "relative_betti_m2" => {
                let stable = match key {
                    "betti_m1" => "betti_m1",
                    "betti_m2" => "betti_m2",
                    "betti_m" => "betti_m",
                    "betti_sigma" => "betti_sigma",
                    _ => "relative_betti_m2",
                };
                lists.insert(stable, parse_list(value)?);
            }
            "image_rank_mid" => {
                image_rank_mid = Some(value.parse().map_err(|_| {
                    Error::config(
                        line_no,
                        format!("cannot parse `{value}` for image_rank_mid"),
                    )
                })?);
            }
            other => return Err(Error::config(line_no, format!("unknown key `{other}`"))),
        }
    }
    let m = m.ok_or_else(|| Error::config(0, "missing field `m`"))?;
    let need = |k: &str| -> Result<Vec<usize>> {
        lists
            .get(k)
            .cloned()
            .ok_or_else(|| Error::config(0, format!("missing field `{k}`")))
    };
    let inp = CohomologyInput {
        name,
        m,
        betti_m1: need("betti_m1")?,
        betti_m2: need("betti_m2")?,
        betti_m: need("betti_m")?,
        betti_sigma: need("betti_sigma")?,
        relative_betti_m2: need("relative_betti_m2")?,
        image_rank_mid,
    };
    inp.validate()?;
    Ok(inp)
}

pub fn load_cohomology_file(path: &str) -> Result<CohomologyInput> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_cohomology_file(&text)
}

/// Serialize a decomposition in the data-file schema (inverse of
/// [`parse_cohomology_file`]).
pub fn render_cohomology_file(inp: &CohomologyInput) -> String {
    let join = |v: &[usize]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = format!(
        "name = {}\nm = {}\nbetti_m1 = {}\nbetti_m2 = {}\nbetti_m = {}\nbetti_sigma = {}\nrelative_betti_m2 = {}\n",
        inp.name,
        inp.m,
        join(&inp.betti_m1),
        join(&inp.betti_m2),
        join(&inp.betti_m),
        join(&inp.betti_sigma),
        join(&inp.relative_betti_m2),
    );
    if let Some(r) = inp.image_rank_mid {
        out.push_str(&format!("image_rank_mid = {r}\n"));
    }
    out
}
