//! Flat TOML configuration. Grammar:
//!
//! ```toml
//! # input: either the eight scheme entries ...
//! a1 = 0.0
//! a2 = 0.0
//! a3 = -1.0
//! a4 = 1.0
//! b1 = 1.0
//! b2 = -1.0
//! b3 = 0.0
//! b4 = 0.0
//! # ... or an S-system
//! # alpha1 alpha2 beta1 beta2 g11 g12 g21 g22 h11 h12 h21 h22
//!
//! # integrator (all optional)
//! method = "dormand_prince"   # or "rosenbrock"
//! rel_tol = 1e-10
//! abs_tol = 1e-12
//! max_time = 1e4
//! max_step = 1.0
//! escape_radius = 1e3
//!
//! # portrait window (optional)
//! u_min = -3.0
//! u_max = 3.0
//! v_min = -3.0
//! v_max = 3.0
//! grid = 7
//! detect_closed = false
//!
//! # section and return-map sweep (optional)
//! section_angle = 0.0
//! c_min = 0.1
//! c_max = 2.0
//! c_count = 20
//!
//! eq_tol = 1e-12
//! out = "results"
//! ```

use std::fmt;
use std::path::PathBuf;

use serde::Deserialize;
use ssys_core::dynamics::{IntegratorOptions, Method, Section};
use ssys_core::portrait::Window;
use ssys_core::report::AnalysisInput;
use ssys_core::{ParameterScheme, SSystem, Tolerance};

const SCHEME_KEYS: [&str; 8] = ["a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4"];
const SSYSTEM_KEYS: [&str; 12] = [
    "alpha1", "alpha2", "beta1", "beta2", "g11", "g12", "g21", "g22", "h11", "h12", "h21", "h22",
];

/// Malformed configuration; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config line {l}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    a1: Option<f64>,
    a2: Option<f64>,
    a3: Option<f64>,
    a4: Option<f64>,
    b1: Option<f64>,
    b2: Option<f64>,
    b3: Option<f64>,
    b4: Option<f64>,
    alpha1: Option<f64>,
    alpha2: Option<f64>,
    beta1: Option<f64>,
    beta2: Option<f64>,
    g11: Option<f64>,
    g12: Option<f64>,
    g21: Option<f64>,
    g22: Option<f64>,
    h11: Option<f64>,
    h12: Option<f64>,
    h21: Option<f64>,
    h22: Option<f64>,
    method: Option<Method>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_time: Option<f64>,
    max_step: Option<f64>,
    escape_radius: Option<f64>,
    u_min: Option<f64>,
    u_max: Option<f64>,
    v_min: Option<f64>,
    v_max: Option<f64>,
    grid: Option<usize>,
    detect_closed: Option<bool>,
    section_angle: Option<f64>,
    c_min: Option<f64>,
    c_max: Option<f64>,
    c_count: Option<usize>,
    eq_tol: Option<f64>,
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub input: Option<AnalysisInput>,
    pub integrator: IntegratorOptions,
    /// Integrator keys set explicitly in the file.
    pub integrator_set: bool,
    pub window: Window,
    pub grid: usize,
    pub detect_closed: bool,
    pub section: Section,
    pub sweep: [f64; 2],
    pub sweep_count: usize,
    pub tolerance: Tolerance,
    pub out: Option<PathBuf>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            input: None,
            integrator: IntegratorOptions::oracle(),
            integrator_set: false,
            window: Window::default(),
            grid: 7,
            detect_closed: false,
            section: Section::positive_u_axis(),
            sweep: [0.1, 2.0],
            sweep_count: 20,
            tolerance: Tolerance::default(),
            out: None,
        }
    }
}

/// First line (1-based) on which `key` is assigned.
fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}

fn err(text: &str, key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line: line_of(text, key),
        message: message.into(),
    }
}

impl AnalysisConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: Raw = toml::from_str(text).map_err(|e| ConfigError {
            line: e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1),
            message: e.message().to_string(),
        })?;
        let mut c = AnalysisConfig::default();

        let scheme = [
            raw.a1, raw.a2, raw.a3, raw.a4, raw.b1, raw.b2, raw.b3, raw.b4,
        ];
        let ssys = [
            raw.alpha1, raw.alpha2, raw.beta1, raw.beta2, raw.g11, raw.g12, raw.g21, raw.g22,
            raw.h11, raw.h12, raw.h21, raw.h22,
        ];
        let first_set = |keys: &[&'static str], vals: &[Option<f64>]| {
            keys.iter()
                .zip(vals)
                .find(|(_, v)| v.is_some())
                .map(|(k, _)| *k)
        };
        let first_missing = |keys: &[&'static str], vals: &[Option<f64>]| {
            keys.iter()
                .zip(vals)
                .find(|(_, v)| v.is_none())
                .map(|(k, _)| *k)
        };
        match (
            first_set(&SCHEME_KEYS, &scheme),
            first_set(&SSYSTEM_KEYS, &ssys),
        ) {
            (Some(_), Some(k)) => {
                return Err(err(
                    text,
                    k,
                    format!("`{k}` given together with scheme entries; use one input form"),
                ))
            }
            (Some(k), None) => {
                if let Some(m) = first_missing(&SCHEME_KEYS, &scheme) {
                    return Err(err(text, k, format!("scheme input is missing `{m}`")));
                }
                let v: Vec<f64> = scheme.iter().map(|x| x.unwrap_or_default()).collect();
                let s = ParameterScheme::new([v[0], v[1], v[2], v[3]], [v[4], v[5], v[6], v[7]])
                    .map_err(|e| err(text, k, e.to_string()))?;
                c.input = Some(AnalysisInput::Scheme(s));
            }
            (None, Some(k)) => {
                if let Some(m) = first_missing(&SSYSTEM_KEYS, &ssys) {
                    return Err(err(text, k, format!("S-system input is missing `{m}`")));
                }
                let v: Vec<f64> = ssys.iter().map(|x| x.unwrap_or_default()).collect();
                let s = SSystem::new(
                    [v[0], v[1]],
                    [v[2], v[3]],
                    [[v[4], v[5]], [v[6], v[7]]],
                    [[v[8], v[9]], [v[10], v[11]]],
                )
                .map_err(|e| err(text, k, e.to_string()))?;
                c.input = Some(AnalysisInput::SSystem(s));
            }
            (None, None) => {}
        }

        let io = &mut c.integrator;
        let mut set = false;
        if let Some(m) = raw.method {
            io.method = m;
            set = true;
        }
        for (slot, val) in [
            (&mut io.rel_tol, raw.rel_tol),
            (&mut io.abs_tol, raw.abs_tol),
            (&mut io.max_time, raw.max_time),
            (&mut io.max_step, raw.max_step),
            (&mut io.escape_radius, raw.escape_radius),
        ] {
            if let Some(v) = val {
                *slot = v;
                set = true;
            }
        }
        c.integrator_set = set;
        if let Err(e) = c.integrator.validate() {
            let key = [
                "rel_tol",
                "abs_tol",
                "max_time",
                "max_step",
                "escape_radius",
            ]
            .into_iter()
            .find(|k| line_of(text, k).is_some())
            .unwrap_or("rel_tol");
            return Err(err(text, key, e.to_string()));
        }

        let d = Window::default();
        let w = Window {
            u: [raw.u_min.unwrap_or(d.u[0]), raw.u_max.unwrap_or(d.u[1])],
            v: [raw.v_min.unwrap_or(d.v[0]), raw.v_max.unwrap_or(d.v[1])],
        };
        if let Err(e) = w.validate() {
            let key = if w.u[0] < w.u[1] { "v_min" } else { "u_min" };
            return Err(err(text, key, e.to_string()));
        }
        c.window = w;
        if let Some(g) = raw.grid {
            if g == 0 {
                return Err(err(text, "grid", "grid must be at least 1"));
            }
            c.grid = g;
        }
        c.detect_closed = raw.detect_closed.unwrap_or(false);

        if let Some(a) = raw.section_angle {
            if !a.is_finite() {
                return Err(err(text, "section_angle", "section angle must be finite"));
            }
            c.section = Section { angle: a };
        }
        c.sweep = [
            raw.c_min.unwrap_or(c.sweep[0]),
            raw.c_max.unwrap_or(c.sweep[1]),
        ];
        if !(c.sweep[0] > 0.0 && c.sweep[0] <= c.sweep[1] && c.sweep[1].is_finite()) {
            return Err(err(
                text,
                "c_min",
                format!("need 0 < c_min <= c_max, got {:?}", c.sweep),
            ));
        }
        if let Some(n) = raw.c_count {
            if n == 0 {
                return Err(err(text, "c_count", "c_count must be at least 1"));
            }
            c.sweep_count = n;
        }
        if let Some(t) = raw.eq_tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(err(text, "eq_tol", "eq_tol must be positive"));
            }
            c.tolerance = Tolerance { eq: t, det: t };
        }
        c.out = raw.out;
        Ok(c)
    }

    pub fn input(&self) -> Result<AnalysisInput, ConfigError> {
        self.input.ok_or_else(|| ConfigError {
            line: None,
            message: "no input: give a1..b4 or alpha1..h22".into(),
        })
    }
}
