//! Batch front door: flag parsing, pipeline dispatch, artifact writing.
//!
//! Exit codes: 0 success, 1 input error, 2 verification failure.

use crate::channel::compute_w_decision;
use crate::config::{build_cross_section, build_geometry, load_config, RunConfig};
use crate::convergence::{match_and_fit, sweep_parallel};
use crate::cross_section::build_a_spectrum;
use crate::error::{Error, Result};
use crate::report;
use crate::spectra::{eps_spectrum, limit_spectrum, pseudomode_quotient};
use crate::topology;
use crate::verify;
use crate::Error as E;

#[derive(Debug, Default)]
struct CliArgs {
    cmd: Option<String>,
    out_dir: Option<String>,
    threads: usize,
    only: String,
    config_path: Option<String>,
}

fn parse_args(argv: &[String]) -> Result<CliArgs> {
    let mut args = CliArgs {
        threads: 1,
        ..Default::default()
    };
    let mut it = argv.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--cmd" => {
                args.cmd = Some(
                    it.next()
                        .ok_or_else(|| E::invalid("--cmd needs a value"))?
                        .clone(),
                )
            }
            "--out-dir" => {
                args.out_dir = Some(
                    it.next()
                        .ok_or_else(|| E::invalid("--out-dir needs a value"))?
                        .clone(),
                )
            }
            "--threads" => {
                let v = it
                    .next()
                    .ok_or_else(|| E::invalid("--threads needs a value"))?;
                args.threads = v
                    .parse()
                    .map_err(|_| E::invalid(format!("bad thread count `{v}`")))?;
            }
            "--only" => {
                args.only = it
                    .next()
                    .ok_or_else(|| E::invalid("--only needs a value"))?
                    .clone();
            }
            "--help" | "-h" => {
                args.cmd = Some("help".to_string());
            }
            other if other.starts_with("--") => {
                return Err(E::invalid(format!("unknown flag `{other}`")));
            }
            path => {
                if args.config_path.is_some() {
                    return Err(E::invalid("more than one config path given"));
                }
                args.config_path = Some(path.to_string());
            }
        }
    }
    Ok(args)
}

const USAGE: &str = "\
usage: conespec [--cmd CMD] [--out-dir DIR] [--threads N] [--only FILTER] [config.cfg]

commands (from --cmd or the [run] section of the config):
  a-spectrum      boundary-operator spectrum table from the cross-section
  eps-spectrum    spectrum of the glued problem at the first sweep eps
  limit-spectrum  limit spectrum with the exact zero multiplicity
  sweep           eps sweep, limit match, and rate fits
  pseudomode      pseudomode Rayleigh quotients over the sweep
  topology        cohomology catalog checks and predictions
  verify          built-in verification suite (--only filters criteria)
";

/// Entry point; returns the process exit code.
pub fn main_entry() -> i32 {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match run_cli(&argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn run_cli(argv: &[String]) -> Result<i32> {
    let args = parse_args(argv)?;
    if args.cmd.as_deref() == Some("help") {
        println!("{USAGE}");
        return Ok(0);
    }
    if args.cmd.as_deref() == Some("verify") && args.config_path.is_none() {
        return run_verify(&args.only, args.out_dir.as_deref());
    }
    let config_path = args
        .config_path
        .as_deref()
        .ok_or_else(|| E::invalid("missing config path (or --cmd verify); see --help"))?;
    let cfg = load_config(config_path)?;
    let cmd = args
        .cmd
        .clone()
        .or_else(|| cfg.cmd.clone())
        .ok_or_else(|| E::invalid("no command: pass --cmd or set `cmd` in [run]"))?;
    let out_dir = args
        .out_dir
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| "out".to_string());
    match cmd.as_str() {
        "verify" => run_verify(&args.only, Some(&out_dir)),
        "a-spectrum" => run_a_spectrum(&cfg, &out_dir),
        "eps-spectrum" => run_eps_spectrum(&cfg, &out_dir),
        "limit-spectrum" => run_limit_spectrum(&cfg, &out_dir),
        "sweep" => run_sweep(&cfg, &out_dir, args.threads),
        "pseudomode" => run_pseudomode(&cfg, &out_dir),
        "topology" => run_topology(&cfg, &out_dir),
        other => Err(E::invalid(format!("unknown command `{other}`"))),
    }
}

fn ensure_dir(dir: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_artifact(dir: &str, name: &str, content: &str) -> Result<()> {
    let path = format!("{dir}/{name}");
    std::fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
    println!("wrote {path}");
    Ok(())
}

fn sweep_spec(cfg: &RunConfig) -> Result<(Vec<f64>, usize)> {
    let s = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| E::invalid("missing [sweep] section"))?;
    let eps = if s.eps.is_empty() {
        crate::convergence::default_eps_list()
    } else {
        s.eps.clone()
    };
    Ok((eps, s.count.unwrap_or(8)))
}

fn run_a_spectrum(cfg: &RunConfig, out_dir: &str) -> Result<i32> {
    let cs_cfg = cfg
        .cross_section
        .as_ref()
        .ok_or_else(|| E::invalid("missing [cross_section] section"))?;
    let cs = build_cross_section(cs_cfg)?;
    let a = build_a_spectrum(&cs);
    ensure_dir(out_dir)?;
    let mut csv = String::from("gamma,mult,origins\n");
    for e in &a {
        let origins: Vec<String> = e.origins.iter().map(|o| format!("{o:?}")).collect();
        csv.push_str(&format!(
            "{},{},\"{}\"\n",
            report::fmt_f64(e.gamma),
            e.mult,
            origins.join("; ")
        ));
    }
    write_artifact(out_dir, "a_spectrum.csv", &csv)?;
    println!("gamma     mult");
    for e in &a {
        println!("{:>9} {:>5}", report::fmt_f64(e.gamma), e.mult);
    }
    Ok(0)
}

fn run_eps_spectrum(cfg: &RunConfig, out_dir: &str) -> Result<i32> {
    let geom = build_geometry(cfg)?;
    let (eps_list, count) = sweep_spec(cfg)?;
    let rep = eps_spectrum(&geom, eps_list[0], count)?;
    ensure_dir(out_dir)?;
    write_artifact(out_dir, "spectrum_eps.csv", &report::report_to_csv(&rep))?;
    write_artifact(out_dir, "spectrum_eps.json", &report::report_to_json(&rep))?;
    Ok(0)
}

fn run_limit_spectrum(cfg: &RunConfig, out_dir: &str) -> Result<i32> {
    let geom = build_geometry(cfg)?;
    let (_, count) = sweep_spec(cfg).unwrap_or((vec![], 8));
    let w = compute_w_decision(&geom)?;
    let rep = limit_spectrum(&geom, &w, count)?;
    ensure_dir(out_dir)?;
    write_artifact(out_dir, "spectrum_limit.csv", &report::report_to_csv(&rep))?;
    write_artifact(
        out_dir,
        "spectrum_limit.json",
        &report::report_to_json(&rep),
    )?;
    println!(
        "zero multiplicity = {} (ker limit {} + ker collapsing {} + half modes {})",
        w.zero_multiplicity(),
        w.dim_ker_limit,
        w.dim_ker_d2,
        w.i_half
    );
    Ok(0)
}

fn run_sweep(cfg: &RunConfig, out_dir: &str, threads: usize) -> Result<i32> {
    let geom = build_geometry(cfg)?;
    let (eps_list, count) = sweep_spec(cfg)?;
    let w = compute_w_decision(&geom)?;
    let table = sweep_parallel(&geom, &w, &eps_list, count, threads.max(1))?;
    let fits = match_and_fit(&table)?;
    ensure_dir(out_dir)?;
    write_artifact(out_dir, "sweep.csv", &report::sweep_to_csv(&table))?;
    write_artifact(out_dir, "fits.json", &report::fits_to_json(&fits))?;
    let n_idx = table.limit.expanded().len().min(count);
    for n in 1..=n_idx {
        write_artifact(
            out_dir,
            &format!("sweep_{n}.dat"),
            &report::index_data_file(&table, n),
        )?;
    }
    for f in &fits {
        println!(
            "index {} -> limit {}: {:?}",
            f.n,
            report::fmt_f64(f.limit_lambda),
            f.outcome
        );
    }
    Ok(0)
}

fn run_pseudomode(cfg: &RunConfig, out_dir: &str) -> Result<i32> {
    let geom = build_geometry(cfg)?;
    let (eps_list, _) = sweep_spec(cfg)?;
    let gamma = cfg
        .pseudomode_gamma
        .ok_or_else(|| E::invalid("missing [pseudomode] gamma"))?;
    ensure_dir(out_dir)?;
    let mut csv = String::from("eps,rayleigh,l2_norm\n");
    for &eps in &eps_list {
        let q = pseudomode_quotient(&geom, eps, gamma)?;
        csv.push_str(&format!(
            "{},{},{}\n",
            report::fmt_f64(eps),
            report::fmt_f64(q.rayleigh),
            report::fmt_f64(q.l2_norm)
        ));
    }
    write_artifact(out_dir, "pseudomode.csv", &csv)?;
    Ok(0)
}

fn run_topology(cfg: &RunConfig, out_dir: &str) -> Result<i32> {
    let t = cfg
        .topology
        .as_ref()
        .ok_or_else(|| E::invalid("missing [topology] section"))?;
    ensure_dir(out_dir)?;
    let mut out = String::new();
    for path in &t.files {
        let inp = topology::load_cohomology_file(path)?;
        let rep = topology::mv_check(&inp)?;
        out.push_str(&format!(
            "{}: exact-sequence feasibility {}\n",
            inp.name,
            if rep.consistent { "ok" } else { "FAILED" }
        ));
        for f in &rep.failures {
            out.push_str(&format!(
                "  degree {} ({}): {}\n",
                f.degree, f.position, f.message
            ));
        }
        out.push_str("  l2 cohomology:");
        for k in 0..=inp.m {
            out.push_str(&format!(" {}", topology::l2_cohomology(&inp, k)?));
        }
        out.push('\n');
    }
    for &(n1, n2) in &t.predictions {
        let p = topology::predict_small_eigenvalues(n1, n2)?;
        out.push_str(&format!(
            "({n1},{n2}): gamma = {}, window = {}, domain = {:?}, sphere target {} degrees ({}, {})",
            report::fmt_f64(p.gamma),
            p.in_window,
            p.domain,
            p.sphere_target.manifold,
            p.sphere_target.coexact_degree,
            p.sphere_target.exact_degree
        ));
        if let Some(t) = &p.product_target {
            out.push_str(&format!(
                "; product target {} degrees ({}, {})",
                t.manifold, t.coexact_degree, t.exact_degree
            ));
        }
        out.push('\n');
    }
    print!("{out}");
    write_artifact(out_dir, "topology.txt", &out)?;
    Ok(0)
}

fn run_verify(only: &str, out_dir: Option<&str>) -> Result<i32> {
    let reports = verify::run_all(only);
    if reports.is_empty() {
        return Err(E::invalid(format!("no criterion matches filter `{only}`")));
    }
    let mut all_pass = true;
    let mut csv = String::from("id,name,passed,seconds,details\n");
    for r in &reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "{status} {} {} ({:.2}s): {}",
            r.id, r.name, r.seconds, r.details
        );
        csv.push_str(&format!(
            "{},{},{},{:.3},\"{}\"\n",
            r.id,
            r.name,
            r.passed,
            r.seconds,
            r.details.replace('"', "'")
        ));
        all_pass &= r.passed;
    }
    if let Some(dir) = out_dir {
        ensure_dir(dir)?;
        write_artifact(dir, "verify_report.csv", &csv)?;
    }
    Ok(if all_pass { 0 } else { 2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_parsing() {
        let args = parse_args(&[
            "--cmd".into(),
            "sweep".into(),
            "--threads".into(),
            "4".into(),
            "run.cfg".into(),
        ])
        .unwrap();
        assert_eq!(args.cmd.as_deref(), Some("sweep"));
        assert_eq!(args.threads, 4);
        assert_eq!(args.config_path.as_deref(), Some("run.cfg"));
        assert!(parse_args(&["--bogus".into()]).is_err());
    }

    #[test]
    fn missing_section_is_input_error() {
        let dir = std::env::temp_dir().join("conespec_cli_test");
        std::fs::create_dir_all(&dir).unwrap();
        let cfg_path = dir.join("no_geometry.cfg");
        std::fs::write(
            &cfg_path,
            "[run]\ncmd = sweep\n[sweep]\neps = 0.1 0.01 0.001 0.0001\n",
        )
        .unwrap();
        let err = run_cli(&[cfg_path.to_string_lossy().to_string()]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("geometry"), "{msg}");
    }
}
