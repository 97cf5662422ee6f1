use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use ssys_core::dynamics::{
    bautin_search, poincare_return, BautinOptions, IntegratorOptions, Termination,
};
use ssys_core::forms::ssystem_to_scheme;
use ssys_core::portrait::{portrait_frame, seed_grid, seed_orbit, to_svg, PortraitOptions};
use ssys_core::report::{classify as classify_input, AnalysisInput};
use ssys_core::ParameterScheme;

use crate::config::{AnalysisConfig, ConfigError};
use crate::Common;

fn load(c: &Common) -> Result<AnalysisConfig> {
    let Some(path) = &c.config else {
        return Ok(AnalysisConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| ConfigError {
        line: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    AnalysisConfig::parse(&text)
        .map_err(|e| anyhow::Error::new(e).context(path.display().to_string()))
}

/// Command-line flags override config keys; `base` applies when neither the
/// file nor the flags mention the integrator.
fn integrator(
    c: &Common,
    cfg: &AnalysisConfig,
    base: IntegratorOptions,
) -> Result<IntegratorOptions> {
    let mut o = if cfg.integrator_set {
        cfg.integrator
    } else {
        base
    };
    if let Some(m) = c.method {
        o.method = m;
    }
    if let Some(x) = c.rel_tol {
        o.rel_tol = x;
    }
    if let Some(x) = c.abs_tol {
        o.abs_tol = x;
    }
    if let Some(x) = c.max_time {
        o.max_time = x;
    }
    o.validate().map_err(|e| ConfigError {
        line: None,
        message: format!("integrator flags: {e}"),
    })?;
    Ok(o)
}

fn section(c: &Common, cfg: &AnalysisConfig) -> Result<ssys_core::dynamics::Section> {
    match c.section {
        Some(a) if !a.is_finite() => Err(ConfigError {
            line: None,
            message: "--section must be a finite angle".into(),
        }
        .into()),
        Some(a) => Ok(ssys_core::dynamics::Section { angle: a }),
        None => Ok(cfg.section),
    }
}

fn out_dir(c: &Common, cfg: &AnalysisConfig) -> Result<PathBuf> {
    let dir = c
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn write(dir: &Path, name: &str, content: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let p = dir.join(name);
    fs::write(&p, content).with_context(|| format!("writing {}", p.display()))?;
    written.push(p);
    Ok(())
}

fn json<T: Serialize>(x: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(x)?;
    s.push('\n');
    Ok(s)
}

fn scheme_of(cfg: &AnalysisConfig) -> Result<ParameterScheme> {
    match cfg.input()? {
        AnalysisInput::Scheme(s) => Ok(s),
        AnalysisInput::SSystem(sys) => Ok(ssystem_to_scheme(&sys, &cfg.tolerance)
            .context("no exponential form for this S-system")?
            .1),
    }
}

pub fn classify(c: &Common) -> Result<Vec<PathBuf>> {
    let cfg = load(c)?;
    let input = cfg.input()?;
    let report = classify_input(&input, &cfg.tolerance);
    let dir = out_dir(c, &cfg)?;
    let mut written = Vec::new();
    write(&dir, "report.json", &json(&report)?, &mut written)?;
    Ok(written)
}

#[derive(Serialize)]
struct SeedSummary {
    seed: [f64; 2],
    termination: Option<Termination>,
    samples: usize,
    closed: Option<bool>,
    error: Option<String>,
}

pub fn portrait(c: &Common) -> Result<Vec<PathBuf>> {
    let cfg = load(c)?;
    let s = scheme_of(&cfg)?;
    let opts = PortraitOptions {
        window: cfg.window,
        grid: cfg.grid,
        integrator: integrator(c, &cfg, IntegratorOptions::portrait())?,
        detect_closed: cfg.detect_closed,
    };
    let mut p = portrait_frame(&s, &opts, &cfg.tolerance)?;
    p.orbits = seed_grid(&opts.window, opts.grid)
        .par_iter()
        .map(|&x| seed_orbit(&s, x, &opts))
        .collect();

    let mut traj = String::from("seed,t,u,v\n");
    let mut seeds = Vec::new();
    for (i, o) in p.orbits.iter().enumerate() {
        if let Some(tr) = &o.trajectory {
            for q in &tr.samples {
                let _ = writeln!(traj, "{i},{},{},{}", q.t, q.u, q.v);
            }
        }
        seeds.push(SeedSummary {
            seed: o.seed,
            termination: o.trajectory.as_ref().map(|t| t.termination),
            samples: o.trajectory.as_ref().map_or(0, |t| t.samples.len()),
            closed: o.closed,
            error: o.error.clone(),
        });
    }
    let mut null = String::from("name,alpha,beta,u0,v0,u1,v1\n");
    for (name, n) in ["u", "v"].iter().zip(&p.nullclines) {
        match n.segment {
            Some([a, b]) => {
                let _ = writeln!(
                    null,
                    "{name},{},{},{},{},{},{}",
                    n.alpha, n.beta, a[0], a[1], b[0], b[1]
                );
            }
            None => {
                let _ = writeln!(null, "{name},{},{},,,,", n.alpha, n.beta);
            }
        }
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        scheme: ParameterScheme,
        window: ssys_core::portrait::Window,
        equilibrium_curve: bool,
        nullclines: &'a [ssys_core::portrait::Nullcline; 2],
        seeds: Vec<SeedSummary>,
    }
    let summary = Summary {
        scheme: s,
        window: p.window,
        equilibrium_curve: p.equilibrium_curve,
        nullclines: &p.nullclines,
        seeds,
    };

    let dir = out_dir(c, &cfg)?;
    let mut written = Vec::new();
    write(&dir, "trajectories.csv", &traj, &mut written)?;
    write(&dir, "nullclines.csv", &null, &mut written)?;
    write(&dir, "portrait.json", &json(&summary)?, &mut written)?;
    write(&dir, "portrait.svg", &to_svg(&p), &mut written)?;
    Ok(written)
}

pub fn poincare(c: &Common) -> Result<Vec<PathBuf>> {
    let cfg = load(c)?;
    let s = scheme_of(&cfg)?;
    let sec = section(c, &cfg)?;
    let opts = integrator(c, &cfg, IntegratorOptions::oracle())?;
    let n = cfg.sweep_count;
    let [lo, hi] = cfg.sweep;
    let cs: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let rows: Vec<_> = cs
        .par_iter()
        .map(|&c0| (c0, poincare_return(&s, sec, c0, &opts)))
        .collect();
    let mut csv = String::from("c,return,displacement,return_time,winding,error\n");
    let mut ok = 0;
    for (c0, r) in &rows {
        match r {
            Ok(x) => {
                ok += 1;
                let _ = writeln!(
                    csv,
                    "{c0},{},{},{},{},",
                    x.coordinate,
                    x.coordinate - c0,
                    x.return_time,
                    x.winding
                );
            }
            Err(e) => {
                let msg = e.to_string().replace([',', '\n'], ";");
                let _ = writeln!(csv, "{c0},,,,,{msg}");
            }
        }
    }
    let _ = writeln!(csv, "# section_angle={}", sec.angle);
    let dir = out_dir(c, &cfg)?;
    let mut written = Vec::new();
    write(&dir, "poincare.csv", &csv, &mut written)?;
    if ok == 0 {
        bail!(
            "no seed returned to the section; see {}",
            written[0].display()
        );
    }
    Ok(written)
}

pub fn bautin_demo(c: &Common) -> Result<Vec<PathBuf>> {
    let cfg = load(c)?;
    let mut opts = BautinOptions::default();
    let base = opts.integrator;
    opts.integrator = integrator(c, &cfg, base)?;
    if c.section.is_some() || cfg.section != Default::default() {
        opts.section = section(c, &cfg)?;
    }
    let report = bautin_search(&opts, &cfg.tolerance).context("two-cycle search")?;
    let dir = out_dir(c, &cfg)?;
    let mut written = Vec::new();
    write(&dir, "bautin.json", &json(&report)?, &mut written)?;
    Ok(written)
}
