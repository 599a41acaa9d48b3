//! Run-configuration files: a strict sectioned key-value format.
//!
//! ```text
//! [run]
//! cmd = sweep                 # a-spectrum | eps-spectrum | limit-spectrum |
//!                             # sweep | pseudomode | topology | verify
//!
//! [cross_section]
//! source = catalog            # catalog | inline | file
//! catalog = round_sphere
//! params = 2 2.0              # entry parameters (dimensions, sizes, cutoff)
//! # inline source instead uses: n, cutoff, betti, coexact (repeatable)
//! # file source uses: path = <data file>
//!
//! [geometry]
//! r0 = 0.5
//! cap_m1 = dirichlet          # dirichlet | neumann | robin <kappa>
//! cap_m2 = robin -0.5
//! override_m2 = 0.75 robin -0.75   # per-channel cap override (repeatable)
//! override_m1 = 0.5 neumann
//! channels = 0.5 2            # explicit channel gamma/mult (repeatable),
//!                             # alternative to a cross_section section
//!
//! [sweep]
//! eps = 1e-2 1e-3 1e-4        # explicit list, strictly decreasing
//! eps_dyadic = 2 16           # or 10^{-k/2} for k in 2..=16
//! count = 8
//!
//! [pseudomode]
//! gamma = 0.5
//!
//! [topology]
//! file = configs/topology/sphere_2_1.cohom   # repeatable
//! predict = 2 1                              # n1 n2 (repeatable)
//!
//! [outputs]
//! dir = out
//! ```
//!
//! Unknown sections and keys are rejected with their line number.

use crate::channel::{CapCondition, CapOverride, Channel, Geometry};
use crate::cross_section::{
    build_a_spectrum, catalog_lookup, load_cross_section_file, CoexactMode, CrossSectionSpectrum,
};
use crate::error::{Error, Result};
use crate::Error as E;

#[derive(Debug, Clone, Default)]
pub struct CrossSectionConfig {
    pub source: Option<String>,
    pub catalog: Option<String>,
    pub params: Vec<f64>,
    pub n: Option<usize>,
    pub cutoff: Option<f64>,
    pub betti: Option<Vec<usize>>,
    pub coexact: Vec<CoexactMode>,
    pub path: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct GeometryConfig {
    pub r0: Option<f64>,
    pub cap_m1: Option<CapCondition>,
    pub cap_m2: Option<CapCondition>,
    pub overrides_m1: Vec<CapOverride>,
    pub overrides_m2: Vec<CapOverride>,
    pub channels: Vec<(f64, usize)>,
}

#[derive(Debug, Clone, Default)]
pub struct SweepConfig {
    pub eps: Vec<f64>,
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct TopologyConfig {
    pub files: Vec<String>,
    pub predictions: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub cmd: Option<String>,
    pub cross_section: Option<CrossSectionConfig>,
    pub geometry: Option<GeometryConfig>,
    pub sweep: Option<SweepConfig>,
    pub pseudomode_gamma: Option<f64>,
    pub topology: Option<TopologyConfig>,
    pub out_dir: Option<String>,
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::config(line_no, format!("malformed section `{line}`")))?;
            section = name.trim().to_string();
            match section.as_str() {
                "run" | "cross_section" | "geometry" | "sweep" | "pseudomode" | "topology"
                | "outputs" => {}
                other => {
                    return Err(Error::config(
                        line_no,
                        format!("unknown section `[{other}]`"),
                    ))
                }
            }
            match section.as_str() {
                "cross_section" => {
                    cfg.cross_section.get_or_insert_with(Default::default);
                }
                "geometry" => {
                    cfg.geometry.get_or_insert_with(Default::default);
                }
                "sweep" => {
                    cfg.sweep.get_or_insert_with(Default::default);
                }
                "topology" => {
                    cfg.topology.get_or_insert_with(Default::default);
                }
                _ => {}
            }
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(line_no, format!("expected `key = value`, got `{line}`"))
        })?;
        let key = key.trim();
        let value = value.trim();
        match section.as_str() {
            "" => {
                return Err(Error::config(
                    line_no,
                    format!("key `{key}` appears before any [section]"),
                ))
            }
            "run" => match key {
                "cmd" => cfg.cmd = Some(value.to_string()),
                other => {
                    return Err(Error::config(
                        line_no,
                        format!("unknown key `{other}` in [run]"),
                    ))
                }
            },
            "cross_section" => {
                let cs = cfg.cross_section.as_mut().unwrap();
                match key {
                    "source" => cs.source = Some(value.to_string()),
                    "catalog" => cs.catalog = Some(value.to_string()),
                    "params" => cs.params = parse_f64_list(line_no, value)?,
                    "n" => cs.n = Some(parse_one(line_no, key, value)?),
                    "cutoff" => cs.cutoff = Some(parse_one(line_no, key, value)?),
                    "betti" => cs.betti = Some(parse_usize_list(line_no, value)?),
                    "coexact" => {
                        let toks = parse_f64_list(line_no, value)?;
                        if toks.len() != 3 {
                            return Err(Error::config(
                                line_no,
                                "coexact takes 3 values: degree mu_sq mult".to_string(),
                            ));
                        }
                        cs.coexact.push(CoexactMode {
                            p: toks[0] as usize,
                            mu_sq: toks[1],
                            mult: toks[2] as usize,
                        });
                    }
                    "path" => cs.path = Some(value.to_string()),
                    other => {
                        return Err(Error::config(
                            line_no,
                            format!("unknown key `{other}` in [cross_section]"),
                        ))
                    }
                }
            }
            "geometry" => {
                let g = cfg.geometry.as_mut().unwrap();
                match key {
                    "r0" => g.r0 = Some(parse_one(line_no, key, value)?),
                    "cap_m1" => g.cap_m1 = Some(parse_cap(line_no, value)?),
                    "cap_m2" => g.cap_m2 = Some(parse_cap(line_no, value)?),
                    "override_m1" | "override_m2" => {
                        let (gamma_tok, cap_part) =
                            value.split_once(char::is_whitespace).ok_or_else(|| {
                                Error::config(line_no, "override needs `gamma cap`".to_string())
                            })?;
                        let gamma: f64 = parse_one(line_no, "override gamma", gamma_tok)?;
                        let cap = parse_cap(line_no, cap_part.trim())?;
                        let ov = CapOverride { gamma, cap };
                        if key == "override_m1" {
                            g.overrides_m1.push(ov);
                        } else {
                            g.overrides_m2.push(ov);
                        }
                    }
                    "channels" => {
                        let toks = parse_f64_list(line_no, value)?;
                        if toks.len() != 2 {
                            return Err(Error::config(
                                line_no,
                                "channels takes 2 values per line: gamma mult".to_string(),
                            ));
                        }
                        g.channels.push((toks[0], toks[1] as usize));
                    }
                    other => {
                        return Err(Error::config(
                            line_no,
                            format!("unknown key `{other}` in [geometry]"),
                        ))
                    }
                }
            }
            "sweep" => {
                let s = cfg.sweep.as_mut().unwrap();
                match key {
                    "eps" => s.eps = parse_f64_list(line_no, value)?,
                    "eps_dyadic" => {
                        let ks = parse_usize_list(line_no, value)?;
                        if ks.len() != 2 || ks[0] > ks[1] {
                            return Err(Error::config(
                                line_no,
                                "eps_dyadic takes `k_lo k_hi` with k_lo <= k_hi".to_string(),
                            ));
                        }
                        s.eps = (ks[0]..=ks[1])
                            .map(|k| 10f64.powf(-(k as f64) / 2.0))
                            .collect();
                    }
                    "count" => s.count = Some(parse_one(line_no, key, value)?),
                    other => {
                        return Err(Error::config(
                            line_no,
                            format!("unknown key `{other}` in [sweep]"),
                        ))
                    }
                }
            }
            "pseudomode" => match key {
                "gamma" => cfg.pseudomode_gamma = Some(parse_one(line_no, key, value)?),
                other => {
                    return Err(Error::config(
                        line_no,
                        format!("unknown key `{other}` in [pseudomode]"),
                    ))
                }
            },
            "topology" => {
                let t = cfg.topology.as_mut().unwrap();
                match key {
                    "file" => t.files.push(value.to_string()),
                    "predict" => {
                        let toks = parse_usize_list(line_no, value)?;
                        if toks.len() != 2 {
                            return Err(Error::config(
                                line_no,
                                "predict takes `n1 n2`".to_string(),
                            ));
                        }
                        t.predictions.push((toks[0], toks[1]));
                    }
                    other => {
                        return Err(Error::config(
                            line_no,
                            format!("unknown key `{other}` in [topology]"),
                        ))
                    }
                }
            }
            "outputs" => match key {
                "dir" => cfg.out_dir = Some(value.to_string()),
                other => {
                    return Err(Error::config(
                        line_no,
                        format!("unknown key `{other}` in [outputs]"),
                    ))
                }
            },
            _ => unreachable!(),
        }
    }
    Ok(cfg)
}

pub fn load_config(path: &str) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

fn parse_one<T: std::str::FromStr>(line: usize, field: &str, tok: &str) -> Result<T> {
    tok.parse::<T>()
        .map_err(|_| Error::config(line, format!("cannot parse `{tok}` for `{field}`")))
}

fn parse_f64_list(line: usize, value: &str) -> Result<Vec<f64>> {
    value
        .split_whitespace()
        .map(|t| parse_one(line, "list entry", t))
        .collect()
}

fn parse_usize_list(line: usize, value: &str) -> Result<Vec<usize>> {
    value
        .split_whitespace()
        .map(|t| parse_one(line, "list entry", t))
        .collect()
}

fn parse_cap(line: usize, value: &str) -> Result<CapCondition> {
    let mut toks = value.split_whitespace();
    let kind = toks.next().unwrap_or("");
    match kind {
        "dirichlet" => Ok(CapCondition::Dirichlet),
        "neumann" => Ok(CapCondition::Neumann),
        "robin" => {
            let kappa_tok = toks
                .next()
                .ok_or_else(|| Error::config(line, "robin cap needs a kappa value".to_string()))?;
            Ok(CapCondition::Robin {
                kappa: parse_one(line, "kappa", kappa_tok)?,
            })
        }
        other => Err(Error::config(line, format!("unknown cap kind `{other}`"))),
    }
}

/// Materialize the cross-section (when configured).
pub fn build_cross_section(cfg: &CrossSectionConfig) -> Result<CrossSectionSpectrum> {
    let source = cfg.source.as_deref().unwrap_or("catalog");
    match source {
        "catalog" => {
            let name = cfg.catalog.as_deref().ok_or_else(|| {
                E::invalid("cross_section: catalog source needs `catalog = <name>`")
            })?;
            catalog_lookup(name, &cfg.params)
        }
        "inline" => {
            let n = cfg
                .n
                .ok_or_else(|| E::invalid("cross_section: inline source needs `n`"))?;
            let cutoff = cfg
                .cutoff
                .ok_or_else(|| E::invalid("cross_section: inline source needs `cutoff`"))?;
            let betti = cfg
                .betti
                .clone()
                .ok_or_else(|| E::invalid("cross_section: inline source needs `betti`"))?;
            CrossSectionSpectrum::new(n, betti, cfg.coexact.clone(), cutoff)
        }
        "file" => {
            let path = cfg
                .path
                .as_deref()
                .ok_or_else(|| E::invalid("cross_section: file source needs `path`"))?;
            load_cross_section_file(path)
        }
        other => Err(E::invalid(format!(
            "unknown cross_section source `{other}`"
        ))),
    }
}

/// Materialize the geometry from its section (plus cross-section channels
/// when no explicit channel list is given).
pub fn build_geometry(cfg: &RunConfig) -> Result<Geometry> {
    let g = cfg
        .geometry
        .as_ref()
        .ok_or_else(|| E::invalid("missing [geometry] section"))?;
    let channels: Vec<Channel> = if !g.channels.is_empty() {
        g.channels
            .iter()
            .map(|&(gamma, mult)| Channel {
                gamma,
                mult,
                potential_coeff: gamma * (gamma + 1.0),
                branch_exponents: (gamma + 1.0, -gamma),
            })
            .collect()
    } else {
        let cs_cfg = cfg.cross_section.as_ref().ok_or_else(|| {
            E::invalid("geometry needs either explicit `channels` or a [cross_section] section")
        })?;
        let cs = build_cross_section(cs_cfg)?;
        crate::channel::make_channels(&build_a_spectrum(&cs))?
    };
    let mut geom = Geometry::new(
        channels,
        g.r0.unwrap_or(0.5),
        g.cap_m2.unwrap_or(CapCondition::Dirichlet),
        g.cap_m1.unwrap_or(CapCondition::Dirichlet),
    )?;
    geom.overrides_m1 = g.overrides_m1.clone();
    geom.overrides_m2 = g.overrides_m2.clone();
    Ok(geom)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
[run]
cmd = sweep

[cross_section]
source = inline
n = 2
cutoff = 2.0
betti = 1 0 1
coexact = 0 2.0 3

[geometry]
r0 = 0.5
cap_m1 = dirichlet
cap_m2 = robin -0.5
override_m2 = 0.75 robin -0.75

[sweep]
eps = 1e-1 1e-2 1e-3
count = 6

[outputs]
dir = out
";

    #[test]
    fn parses_full_config() {
        let cfg = parse_config(SAMPLE).unwrap();
        assert_eq!(cfg.cmd.as_deref(), Some("sweep"));
        let geom = build_geometry(&cfg).unwrap();
        assert_eq!(geom.channels.len(), 4);
        assert_eq!(geom.overrides_m2.len(), 1);
        assert_eq!(cfg.sweep.as_ref().unwrap().eps.len(), 3);
    }

    #[test]
    fn rejects_unknown_keys_with_line() {
        let bad = "[run]\ncmd = sweep\nspeed = fast\n";
        match parse_config(bad).unwrap_err() {
            Error::Config { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("speed"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rejects_unknown_sections_and_orphan_keys() {
        assert!(parse_config("[wormholes]\n").is_err());
        assert!(parse_config("cmd = sweep\n").is_err());
    }

    #[test]
    fn dyadic_eps_expansion() {
        let cfg = parse_config("[sweep]\neps_dyadic = 2 6\ncount = 2\n").unwrap();
        let eps = cfg.sweep.unwrap().eps;
        assert_eq!(eps.len(), 5);
        assert!((eps[0] - 0.1).abs() < 1e-15);
        for pair in eps.windows(2) {
            assert!(pair[1] < pair[0]);
        }
    }

    #[test]
    fn explicit_channels_bypass_cross_section() {
        let cfg = parse_config("[geometry]\nchannels = 0.5 2\nchannels = -1 1\ncap_m1 = neumann\n")
            .unwrap();
        let geom = build_geometry(&cfg).unwrap();
        assert_eq!(geom.channels.len(), 2);
        assert_eq!(geom.channels[0].mult, 2);
        assert_eq!(geom.cap_m1, CapCondition::Neumann);
    }
}
