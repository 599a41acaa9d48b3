//! Spectral data of the cross-section and the induced spectrum of the cone
//! boundary operator.
//!
//! The input is purely spectral: Betti numbers and the eigenvalues mu^2 of
//! the coexact p-form spectrum of the cross-section. From those the boundary
//! operator's eigenvalues come in two families,
//!
//!   +-(p - n/2)                      one pair per harmonic degree p,
//!   +-1/2 +- sqrt(mu^2 + ((n-1)/2 - p)^2)   four per coexact mode,
//!
//! with the generating multiplicities carried along and accidental
//! coincidences merged by addition.

use crate::error::{Error, Result};
use Error as E;

/// Relative tolerance for treating two boundary eigenvalues as equal.
/// Catalog data are exact rationals or square roots in double precision.
pub const GAMMA_MERGE_TOL: f64 = 1e-12;

/// One coexact eigenvalue of the cross-section: degree, eigenvalue, and
/// multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoexactMode {
    pub p: usize,
    pub mu_sq: f64,
    pub mult: usize,
}

/// Spectral data of a compact n-dimensional cross-section.
#[derive(Debug, Clone)]
pub struct CrossSectionSpectrum {
    pub n: usize,
    /// dim H^p for p = 0..=n.
    pub betti: Vec<usize>,
    /// Coexact p-form eigenvalues, sorted by (p, mu_sq), duplicates merged.
    pub coexact_modes: Vec<CoexactMode>,
    /// Retention bound: a coexact mode is kept only when every boundary
    /// eigenvalue it generates satisfies |gamma| <= cutoff.
    pub cutoff: f64,
}

/// Where a boundary eigenvalue comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    /// Harmonic degree-p content; `sign` picks the member of the +- pair.
    Harmonic { p: usize, sign: i8 },
    /// Coexact mode; the two signs pick the branch s1*1/2 + s2*sqrt(...).
    Coexact {
        p: usize,
        mu_sq: f64,
        s_half: i8,
        s_root: i8,
    },
}

/// One eigenvalue of the boundary operator with multiplicity and origins.
#[derive(Debug, Clone)]
pub struct ASpectrumEntry {
    pub gamma: f64,
    pub mult: usize,
    pub origins: Vec<Origin>,
}

impl CrossSectionSpectrum {
    /// Validate and normalize raw data: Poincare duality on the Betti list,
    /// positive coexact eigenvalues, sorted modes with duplicates merged.
    pub fn new(
        n: usize,
        betti: Vec<usize>,
        mut coexact_modes: Vec<CoexactMode>,
        cutoff: f64,
    ) -> Result<Self> {
        if n < 2 {
            return Err(E::invalid(format!(
                "cross-section dimension n must be at least 2 (got {n})"
            )));
        }
        if betti.len() != n + 1 {
            return Err(E::invalid(format!(
                "betti list must have n+1 = {} entries (got {})",
                n + 1,
                betti.len()
            )));
        }
        for p in 0..=n {
            if betti[p] != betti[n - p] {
                return Err(E::invalid(format!(
                    "betti numbers violate Poincare duality: betti[{p}] = {} vs betti[{}] = {}",
                    betti[p],
                    n - p,
                    betti[n - p]
                )));
            }
        }
        if !(cutoff > 0.0) {
            return Err(E::invalid(format!(
                "cutoff must be positive (got {cutoff})"
            )));
        }
        for m in &coexact_modes {
            if !(m.mu_sq > 0.0) {
                return Err(E::invalid(format!(
                    "coexact eigenvalue must be positive (got {} in degree {}); harmonic \
                     content belongs in the betti list",
                    m.mu_sq, m.p
                )));
            }
            if m.p >= n {
                return Err(E::invalid(format!(
                    "coexact degree must satisfy p <= n-1 (got p = {} with n = {n})",
                    m.p
                )));
            }
            if m.mult == 0 {
                return Err(E::invalid("coexact multiplicity must be positive"));
            }
        }
        coexact_modes.sort_by(|a, b| (a.p, a.mu_sq).partial_cmp(&(b.p, b.mu_sq)).unwrap());
        // merge duplicate (p, mu_sq) pairs
        let mut merged: Vec<CoexactMode> = Vec::with_capacity(coexact_modes.len());
        for m in coexact_modes {
            if let Some(last) = merged.last_mut() {
                if last.p == m.p
                    && (last.mu_sq - m.mu_sq).abs() <= GAMMA_MERGE_TOL * last.mu_sq.max(1.0)
                {
                    last.mult += m.mult;
                    continue;
                }
            }
            merged.push(m);
        }
        // retention: drop modes whose largest generated |gamma| exceeds cutoff
        let kept = merged
            .into_iter()
            .filter(|m| {
                let root = (m.mu_sq + offset_sq(n, m.p)).sqrt();
                0.5 + root <= cutoff * (1.0 + GAMMA_MERGE_TOL)
            })
            .collect();
        Ok(CrossSectionSpectrum {
            n,
            betti,
            coexact_modes: kept,
            cutoff,
        })
    }
}

fn offset_sq(n: usize, p: usize) -> f64 {
    let off = (n as f64 - 1.0) / 2.0 - p as f64;
    off * off
}

/// Spectrum of the cone boundary operator from cross-section data.
///
/// Entries are sorted by eigenvalue; equal eigenvalues are merged with
/// multiplicities added and origins concatenated; entries with
/// |gamma| > cutoff are dropped.
pub fn build_a_spectrum(cs: &CrossSectionSpectrum) -> Vec<ASpectrumEntry> {
    let half_n = cs.n as f64 / 2.0;
    let mut raw: Vec<(f64, usize, Origin)> = Vec::new();
    for (p, &b) in cs.betti.iter().enumerate() {
        if b == 0 {
            continue;
        }
        let g = p as f64 - half_n;
        raw.push((g, b, Origin::Harmonic { p, sign: 1 }));
        raw.push((-g, b, Origin::Harmonic { p, sign: -1 }));
    }
    for m in &cs.coexact_modes {
        let root = (m.mu_sq + offset_sq(cs.n, m.p)).sqrt();
        for &s_half in &[1i8, -1] {
            for &s_root in &[1i8, -1] {
                let g = s_half as f64 * 0.5 + s_root as f64 * root;
                raw.push((
                    g,
                    m.mult,
                    Origin::Coexact {
                        p: m.p,
                        mu_sq: m.mu_sq,
                        s_half,
                        s_root,
                    },
                ));
            }
        }
    }
    raw.retain(|(g, _, _)| g.abs() <= cs.cutoff * (1.0 + GAMMA_MERGE_TOL));
    raw.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out: Vec<ASpectrumEntry> = Vec::new();
    for (g, mult, origin) in raw {
        if let Some(last) = out.last_mut() {
            if (g - last.gamma).abs() <= GAMMA_MERGE_TOL * g.abs().max(1.0) {
                last.mult += mult;
                last.origins.push(origin);
                continue;
            }
        }
        out.push(ASpectrumEntry {
            gamma: g,
            mult,
            origins: vec![origin],
        });
    }
    out
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

/// Construct a cross-section from the built-in catalog.
///
/// Keys and parameters:
/// - `circle` `[cutoff]` - unit circle; rejected standalone (n = 1).
/// - `flat_torus` `[n, side, cutoff]` - flat n-torus of side length `side`.
/// - `round_sphere` `[n, cutoff]` - unit round n-sphere. Ships Betti numbers
///   and the function (degree-0) coexact spectrum only; higher-degree coexact
///   modes are not included in the default catalog.
/// - `product_spheres` `[n1, n2, cutoff]` - product of unit round spheres.
///   Same restriction: degree-0 coexact data plus full Betti numbers.
/// - `disjoint_union` `[n, copies, cutoff]` - disjoint copies of the round
///   n-sphere.
/// - `custom_file` - parsed from a data file, see [`parse_cross_section_file`].
pub fn catalog_lookup(name: &str, params: &[f64]) -> Result<CrossSectionSpectrum> {
    match name {
        "circle" => {
            // constructed for completeness; always rejected by the n >= 2 rule
            Err(E::invalid(
                "cross-section dimension n must be at least 2 (got 1: a circle alone is \
                 not an admissible cross-section)",
            ))
        }
        "flat_torus" => {
            let [n, side, cutoff] = expect_params::<3>(name, params)?;
            flat_torus(n as usize, side, cutoff)
        }
        "round_sphere" => {
            let [n, cutoff] = expect_params::<2>(name, params)?;
            round_sphere(n as usize, 1, cutoff)
        }
        "product_spheres" => {
            let [n1, n2, cutoff] = expect_params::<3>(name, params)?;
            product_spheres(n1 as usize, n2 as usize, cutoff)
        }
        "disjoint_union" => {
            let [n, copies, cutoff] = expect_params::<3>(name, params)?;
            round_sphere(n as usize, copies as usize, cutoff)
        }
        "custom_file" => Err(E::invalid(
            "catalog key `custom_file` takes a path, not numeric parameters; load it \
             through `load_cross_section_file` (config: source = file, path = ...)",
        )),
        other => Err(E::invalid(format!(
            "unknown catalog key `{other}` (known: circle, flat_torus, round_sphere, \
             product_spheres, disjoint_union, custom_file)"
        ))),
    }
}

fn expect_params<const K: usize>(name: &str, params: &[f64]) -> Result<[f64; K]> {
    if params.len() != K {
        return Err(E::invalid(format!(
            "catalog entry `{name}` takes {K} parameters, got {}",
            params.len()
        )));
    }
    let mut out = [0.0; K];
    out.copy_from_slice(params);
    Ok(out)
}

/// Flat n-torus with side length `side`: lattice eigenvalues
/// (2 pi / side)^2 |k|^2 on functions, extended to p-forms by the flat
/// structure, with the coexact part peeled off degree by degree.
fn flat_torus(n: usize, side: f64, cutoff: f64) -> Result<CrossSectionSpectrum> {
    if n < 2 {
        return Err(E::invalid(format!(
            "cross-section dimension n must be at least 2 (got {n})"
        )));
    }
    if !(side > 0.0) {
        return Err(E::invalid("torus side length must be positive"));
    }
    let betti: Vec<usize> = (0..=n).map(|p| binomial(n, p)).collect();
    // Largest mu^2 any retained mode may need, over all degrees.
    let mu_max = mu_budget(n, cutoff);
    let scale = (2.0 * std::f64::consts::PI / side).powi(2);
    let mut lattice: Vec<(f64, usize)> = Vec::new(); // (|k|^2 scaled, count)
    let q_max = (mu_max / scale).floor() as i64;
    let k_max = (q_max as f64).sqrt().floor() as i64;
    let mut counts: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();
    enumerate_lattice(n, k_max, q_max, &mut vec![0; n], 0, &mut counts);
    for (&q, &c) in &counts {
        if q == 0 {
            continue;
        }
        let val = scale * q as f64;
        if val <= mu_max {
            lattice.push((val, c));
        }
    }
    // Full p-form spectrum has multiplicity C(n,p) * lattice count; peel the
    // exact part (= coexact in degree p-1) to isolate coexact modes.
    let mut modes = Vec::new();
    let mut prev_coexact: Vec<(f64, usize)> = Vec::new(); // coexact degree p-1
    for p in 0..n {
        let mut cur: Vec<(f64, usize)> = Vec::new();
        for (i, &(val, c)) in lattice.iter().enumerate() {
            let full = binomial(n, p) * c;
            let exact = prev_coexact.get(i).map_or(0, |&(_, m)| m);
            let coexact = full - exact;
            cur.push((val, coexact));
            if coexact > 0 {
                modes.push(CoexactMode {
                    p,
                    mu_sq: val,
                    mult: coexact,
                });
            }
        }
        prev_coexact = cur;
    }
    CrossSectionSpectrum::new(n, betti, modes, cutoff)
}

fn enumerate_lattice(
    n: usize,
    k_max: i64,
    q_max: i64,
    point: &mut Vec<i64>,
    depth: usize,
    counts: &mut std::collections::BTreeMap<i64, usize>,
) {
    if depth == n {
        let q: i64 = point.iter().map(|k| k * k).sum();
        if q <= q_max {
            *counts.entry(q).or_insert(0) += 1;
        }
        return;
    }
    for k in -k_max..=k_max {
        point[depth] = k;
        enumerate_lattice(n, k_max, q_max, point, depth + 1, counts);
    }
}

/// Upper bound on mu^2 for modes that can survive the cutoff in any degree.
fn mu_budget(n: usize, cutoff: f64) -> f64 {
    let root_max = (cutoff - 0.5).max(0.0);
    // smallest offset over degrees maximizes the admissible mu^2
    let mut min_off = f64::INFINITY;
    for p in 0..n {
        min_off = min_off.min(offset_sq(n, p));
    }
    (root_max * root_max - min_off).max(0.0)
}

/// Round n-sphere data (optionally several disjoint copies): Betti numbers
/// plus the function spectrum k(k+n-1) with the harmonic-polynomial counting
/// multiplicity.
fn round_sphere(n: usize, copies: usize, cutoff: f64) -> Result<CrossSectionSpectrum> {
    if n < 2 {
        return Err(E::invalid(format!(
            "cross-section dimension n must be at least 2 (got {n})"
        )));
    }
    if copies == 0 {
        return Err(E::invalid("disjoint union needs at least one copy"));
    }
    let mut betti = vec![0usize; n + 1];
    betti[0] = copies;
    betti[n] = copies;
    let mu_max = mu_budget(n, cutoff);
    let mut modes = Vec::new();
    let mut k = 1usize;
    loop {
        let mu = (k * (k + n - 1)) as f64;
        if mu > mu_max {
            break;
        }
        modes.push(CoexactMode {
            p: 0,
            mu_sq: mu,
            mult: copies * sphere_harmonic_mult(n, k),
        });
        k += 1;
    }
    CrossSectionSpectrum::new(n, betti, modes, cutoff)
}

/// Dimension of degree-k spherical harmonics on the n-sphere:
/// C(n+k, k) - C(n+k-2, k-2).
fn sphere_harmonic_mult(n: usize, k: usize) -> usize {
    binomial(n + k, k)
        - if k >= 2 {
            binomial(n + k - 2, k - 2)
        } else {
            0
        }
}

/// Product of two round spheres. Betti numbers by the product rule; the
/// degree-0 coexact spectrum from sums of factor function eigenvalues.
fn product_spheres(n1: usize, n2: usize, cutoff: f64) -> Result<CrossSectionSpectrum> {
    if n1 == 0 || n2 == 0 {
        return Err(E::invalid(
            "product_spheres factors must have dimension >= 1",
        ));
    }
    let n = n1 + n2;
    let b1 = sphere_betti(n1);
    let b2 = sphere_betti(n2);
    let mut betti = vec![0usize; n + 1];
    for p in 0..=n {
        let mut acc = 0;
        for a in 0..=p.min(n1) {
            let b = p - a;
            if b <= n2 {
                acc += b1[a] * b2[b];
            }
        }
        betti[p] = acc;
    }
    let mu_max = mu_budget(n, cutoff);
    // factor function spectra including the constant (mu^2 = 0, mult 1)
    let spec1 = sphere_function_spectrum(n1, mu_max);
    let spec2 = sphere_function_spectrum(n2, mu_max);
    let mut sums: Vec<(f64, usize)> = Vec::new();
    for &(m1, c1) in &spec1 {
        for &(m2, c2) in &spec2 {
            let s = m1 + m2;
            if s > 0.0 && s <= mu_max {
                sums.push((s, c1 * c2));
            }
        }
    }
    sums.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut modes: Vec<CoexactMode> = Vec::new();
    for (val, c) in sums {
        if let Some(last) = modes.last_mut() {
            if (last.mu_sq - val).abs() <= GAMMA_MERGE_TOL * val.max(1.0) {
                last.mult += c;
                continue;
            }
        }
        modes.push(CoexactMode {
            p: 0,
            mu_sq: val,
            mult: c,
        });
    }
    CrossSectionSpectrum::new(n, betti, modes, cutoff)
}

fn sphere_betti(n: usize) -> Vec<usize> {
    let mut b = vec![0usize; n + 1];
    b[0] += 1;
    b[n] += 1; // n = 0 gives the two-point space: betti [2]
    b
}

fn sphere_function_spectrum(n: usize, mu_max: f64) -> Vec<(f64, usize)> {
    let mut out = vec![(0.0, 1usize)];
    if n == 0 {
        // two points: one extra "alternating" mode at eigenvalue 0 has no
        // Laplace content; the constant on each point is harmonic only
        out[0].1 = 2;
        return out;
    }
    let mut k = 1usize;
    loop {
        let mu = (k * (k + n - 1)) as f64;
        if mu > mu_max {
            break;
        }
        out.push((mu, sphere_harmonic_mult(n, k)));
        k += 1;
    }
    out
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

// ---------------------------------------------------------------------------
// Custom cross-section files
// ---------------------------------------------------------------------------

/// Parse a cross-section data file.
///
/// Schema (strict; unknown keys rejected with their line number):
/// ```text
/// n = 2
/// cutoff = 2.5
/// betti = 1 0 1
/// coexact = 0 2.0 3      # degree, mu^2, multiplicity; repeatable
/// ```
/// `#` starts a comment; blank lines are ignored.
pub fn parse_cross_section_file(text: &str) -> Result<CrossSectionSpectrum> {
    let mut n: Option<usize> = None;
    let mut cutoff: Option<f64> = None;
    let mut betti: Option<Vec<usize>> = None;
    let mut modes: Vec<CoexactMode> = Vec::new();
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
        match key {
            "n" => {
                n = Some(parse_field(line_no, "n", value)?);
            }
            "cutoff" => {
                cutoff = Some(parse_field(line_no, "cutoff", value)?);
            }
            "betti" => {
                let list: Result<Vec<usize>> = value
                    .split_whitespace()
                    .map(|t| parse_field(line_no, "betti", t))
                    .collect();
                betti = Some(list?);
            }
            "coexact" => {
                let toks: Vec<&str> = value.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(Error::config(
                        line_no,
                        format!(
                            "field `coexact` takes 3 values (degree mu_sq mult), got {}",
                            toks.len()
                        ),
                    ));
                }
                modes.push(CoexactMode {
                    p: parse_field(line_no, "coexact degree", toks[0])?,
                    mu_sq: parse_field(line_no, "coexact mu_sq", toks[1])?,
                    mult: parse_field(line_no, "coexact mult", toks[2])?,
                });
            }
            other => {
                return Err(Error::config(line_no, format!("unknown key `{other}`")));
            }
        }
    }
    let n = n.ok_or_else(|| Error::config(0, "missing field `n`"))?;
    let cutoff = cutoff.ok_or_else(|| Error::config(0, "missing field `cutoff`"))?;
    let betti = betti.ok_or_else(|| Error::config(0, "missing field `betti`"))?;
    CrossSectionSpectrum::new(n, betti, modes, cutoff)
}

fn parse_field<T: std::str::FromStr>(line: usize, field: &str, tok: &str) -> Result<T> {
    tok.parse::<T>()
        .map_err(|_| Error::config(line, format!("cannot parse `{tok}` for field `{field}`")))
}

/// Load a custom cross-section from disk.
pub fn load_cross_section_file(path: &str) -> Result<CrossSectionSpectrum> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_cross_section_file(&text)
}
