//! Phase-portrait data: nullclines, seed-grid trajectories, SVG rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classify::jacobian;
use crate::dynamics::{
    integrate, orbit_closed, poincare_return, IntegratorOptions, Section, Trajectory,
};
use crate::error::{Error, Result};
use crate::scheme::ParameterScheme;
use crate::Tolerance;

/// Rectangle `[u0, u1] x [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub u: [f64; 2],
    pub v: [f64; 2],
}

impl Default for Window {
    fn default() -> Self {
        Self {
            u: [-3.0, 3.0],
            v: [-3.0, 3.0],
        }
    }
}

impl Window {
    pub fn new(u: [f64; 2], v: [f64; 2]) -> Result<Self> {
        let w = Self { u, v };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] < r[1];
        if ok(self.u) && ok(self.v) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "window bounds must be finite and ordered: u {:?}, v {:?}",
                self.u, self.v
            )))
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        (self.u[0]..=self.u[1]).contains(&p[0]) && (self.v[0]..=self.v[1]).contains(&p[1])
    }
}

/// The line `alpha u + beta v = 0` on which one field component vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Nullcline {
    pub alpha: f64,
    pub beta: f64,
    /// Part of the line inside the window; `None` when it misses the window
    /// or when `alpha = beta = 0` (the component vanishes everywhere).
    pub segment: Option<[[f64; 2]; 2]>,
}

impl Nullcline {
    fn new(alpha: f64, beta: f64, w: &Window) -> Self {
        Self {
            alpha,
            beta,
            segment: clip_line([beta, -alpha], w),
        }
    }
}

/// Clips the line `{t d}` to the window.
fn clip_line(d: [f64; 2], w: &Window) -> Option<[[f64; 2]; 2]> {
    if d == [0.0, 0.0] {
        return None;
    }
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for (di, [lo, hi]) in [(d[0], w.u), (d[1], w.v)] {
        if di == 0.0 {
            if !(lo <= 0.0 && 0.0 <= hi) {
                return None;
            }
        } else {
            let (a, b) = (lo / di, hi / di);
            t0 = t0.max(a.min(b));
            t1 = t1.min(a.max(b));
        }
    }
    (t0 <= t1).then(|| [[t0 * d[0], t0 * d[1]], [t1 * d[0], t1 * d[1]]])
}

/// u-nullcline `(a1 - a2) u + (b1 - b2) v = 0` and v-nullcline
/// `(a3 - a4) u + (b3 - b4) v = 0`.
pub fn nullclines(s: &ParameterScheme, w: &Window) -> [Nullcline; 2] {
    let j = jacobian(s);
    [
        Nullcline::new(j.j11, j.j12, w),
        Nullcline::new(j.j21, j.j22, w),
    ]
}

/// `n x n` grid of seeds covering the window, row by row from the bottom.
pub fn seed_grid(w: &Window, n: usize) -> Vec<[f64; 2]> {
    let at = |r: [f64; 2], i: usize| {
        if n == 1 {
            0.5 * (r[0] + r[1])
        } else {
            r[0] + (r[1] - r[0]) * i as f64 / (n - 1) as f64
        }
    };
    (0..n)
        .flat_map(|j| (0..n).map(move |i| [at(w.u, i), at(w.v, j)]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortraitOptions {
    pub window: Window,
    pub grid: usize,
    pub integrator: IntegratorOptions,
    /// Test each seed for a closed orbit and, when closed, keep exactly one
    /// revolution.
    pub detect_closed: bool,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        Self {
            window: Window::default(),
            grid: 7,
            integrator: IntegratorOptions::portrait(),
            detect_closed: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedOrbit {
    pub seed: [f64; 2],
    pub trajectory: Option<Trajectory>,
    pub closed: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Portrait {
    pub scheme: ParameterScheme,
    pub window: Window,
    pub nullclines: [Nullcline; 2],
    /// `det J = 0`: the nullclines coincide or one is void, so equilibria
    /// fill a line or the plane.
    pub equilibrium_curve: bool,
    pub orbits: Vec<SeedOrbit>,
}

/// Trajectory from one seed. Errors are kept in the record.
pub fn seed_orbit(s: &ParameterScheme, seed: [f64; 2], opts: &PortraitOptions) -> SeedOrbit {
    let mut closed = None;
    let mut iopts = opts.integrator;
    if opts.detect_closed && seed != [0.0, 0.0] {
        // closure is judged to 1e-6 relative, beyond drawing tolerances
        let tight = IntegratorOptions {
            rel_tol: opts.integrator.rel_tol.min(1e-10),
            abs_tol: opts.integrator.abs_tol.min(1e-12),
            ..opts.integrator
        };
        match orbit_closed(s, seed, &tight) {
            Ok(c) => {
                closed = Some(c);
                if c {
                    let r = seed[0].hypot(seed[1]);
                    if let Ok(x) = poincare_return(s, Section::through(seed), r, &tight) {
                        iopts.max_time = x.return_time;
                    }
                }
            }
            Err(e) => {
                return SeedOrbit {
                    seed,
                    trajectory: None,
                    closed: None,
                    error: Some(e.to_string()),
                }
            }
        }
    }
    match integrate(s, seed, &iopts) {
        Ok(tr) => SeedOrbit {
            seed,
            trajectory: Some(tr),
            closed,
            error: None,
        },
        Err(f) => SeedOrbit {
            seed,
            trajectory: None,
            closed,
            error: Some(f.to_string()),
        },
    }
}

/// Portrait skeleton without trajectories; fill `orbits` with
/// [`seed_orbit`] in seed order.
pub fn portrait_frame(
    s: &ParameterScheme,
    opts: &PortraitOptions,
    tol: &Tolerance,
) -> Result<Portrait> {
    opts.window.validate()?;
    opts.integrator.validate()?;
    let scale = tol.scale_of(s);
    Ok(Portrait {
        scheme: *s,
        window: opts.window,
        nullclines: nullclines(s, &opts.window),
        equilibrium_curve: tol.is_zero(jacobian(s).det(), scale, 2),
        orbits: Vec::new(),
    })
}

pub fn compute_portrait(
    s: &ParameterScheme,
    opts: &PortraitOptions,
    tol: &Tolerance,
) -> Result<Portrait> {
    let mut p = portrait_frame(s, opts, tol)?;
    p.orbits = seed_grid(&opts.window, opts.grid)
        .into_iter()
        .map(|x| seed_orbit(s, x, opts))
        .collect();
    Ok(p)
}

const SIZE: f64 = 600.0;
const PAD: f64 = 20.0;
const U_COLOR: &str = "#d62728";
const V_COLOR: &str = "#2ca02c";

/// Hand-written SVG: trajectories in dark blue, u-nullcline red, v-nullcline
/// green, seeds as dots.
pub fn to_svg(p: &Portrait) -> String {
    let w = &p.window;
    let span = SIZE - 2.0 * PAD;
    let px = |q: [f64; 2]| {
        let x = PAD + (q[0] - w.u[0]) / (w.u[1] - w.u[0]) * span;
        let y = PAD + (w.v[1] - q[1]) / (w.v[1] - w.v[0]) * span;
        (x, y)
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(
        out,
        r##"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="#ffffff"/>"##
    );
    let (x0, y0) = px([w.u[0], w.v[0]]);
    let (x1, y1) = px([w.u[1], w.v[1]]);
    let _ = writeln!(
        out,
        r##"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#999999"/>"##,
        x1 - x0,
        y0 - y1
    );
    let _ = writeln!(
        out,
        r##"<g fill="none" stroke="#1f3b73" stroke-width="0.8">"##
    );
    for o in &p.orbits {
        let Some(tr) = &o.trajectory else { continue };
        let mut run: Vec<(f64, f64)> = Vec::new();
        let flush = |run: &mut Vec<(f64, f64)>, out: &mut String| {
            if run.len() >= 2 {
                let pts: Vec<String> = run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(out, r#"<polyline points="{}"/>"#, pts.join(" "));
            }
            run.clear();
        };
        for s in &tr.samples {
            let q = [s.u, s.v];
            if w.contains(q) {
                run.push(px(q));
            } else {
                flush(&mut run, &mut out);
            }
        }
        flush(&mut run, &mut out);
    }
    let _ = writeln!(out, "</g>");
    for (n, color, name) in [
        (&p.nullclines[0], U_COLOR, "u-nullcline"),
        (&p.nullclines[1], V_COLOR, "v-nullcline"),
    ] {
        if let Some([a, b]) = n.segment {
            let ((xa, ya), (xb, yb)) = (px(a), px(b));
            let _ = writeln!(
                out,
                r#"<line class="{name}" x1="{xa:.2}" y1="{ya:.2}" x2="{xb:.2}" y2="{yb:.2}" stroke="{color}" stroke-width="2"/>"#
            );
        }
    }
    let _ = writeln!(out, r##"<g fill="#1f3b73">"##);
    for o in &p.orbits {
        if w.contains(o.seed) {
            let (x, y) = px(o.seed);
            let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2"/>"#);
        }
    }
    let _ = writeln!(out, "</g>");
    if w.contains([0.0, 0.0]) {
        let (x, y) = px([0.0, 0.0]);
        let _ = writeln!(
            out,
            r##"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="#000000"/>"##
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerance = Tolerance {
        eq: 1e-12,
        det: 1e-12,
    };

    #[test]
    fn nullcline_clipping() {
        let w = Window::new([-1.0, 2.0], [-3.0, 3.0]).unwrap();
        // u = v
        assert_eq!(clip_line([1.0, 1.0], &w), Some([[-1.0, -1.0], [2.0, 2.0]]));
        // vertical axis
        assert_eq!(clip_line([0.0, 1.0], &w), Some([[0.0, -3.0], [0.0, 3.0]]));
        let off = Window::new([1.0, 2.0], [-1.0, 1.0]).unwrap();
        assert_eq!(clip_line([0.0, 1.0], &off), None);
        assert_eq!(clip_line([0.0, 0.0], &w), None);
    }

    #[test]
    fn field_vanishes_on_nullclines() {
        let s = ParameterScheme::new([0.4, -1.1, 0.7, 2.0], [1.3, -0.2, 0.5, -0.9]).unwrap();
        let [nu, nv] = nullclines(&s, &Window::default());
        for (k, n) in [(0, nu), (1, nv)] {
            let [a, b] = n.segment.unwrap();
            for t in [0.0, 0.3, 0.7, 1.0] {
                let q = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                assert!(s.field(q)[k].abs() < 1e-12, "{k} {q:?}");
            }
        }
    }

    #[test]
    fn grid_and_window_validation() {
        let g = seed_grid(&Window::default(), 3);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], [-3.0, -3.0]);
        assert_eq!(g[4], [0.0, 0.0]);
        assert!(Window::new([1.0, 0.0], [0.0, 1.0]).is_err());
    }

    #[test]
    fn center_portrait_closes() {
        let s = ParameterScheme::new([0.0, 0.0, -1.0, 1.0], [1.0, -1.0, 0.0, 0.0]).unwrap();
        let opts = PortraitOptions {
            grid: 3,
            detect_closed: true,
            integrator: IntegratorOptions::oracle(),
            ..PortraitOptions::default()
        };
        let p = compute_portrait(&s, &opts, &TOL).unwrap();
        assert!(p
            .orbits
            .iter()
            .filter(|o| o.seed != [0.0, 0.0])
            .all(|o| o.closed == Some(true)));
        let svg = to_svg(&p);
        assert!(svg.contains(U_COLOR) && svg.contains(V_COLOR));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg, to_svg(&compute_portrait(&s, &opts, &TOL).unwrap()));
    }

    #[test]
    fn degenerate_scheme_renders() {
        let s = ParameterScheme::new([1.0, 0.0, 1.0, 0.0], [1.0, 0.0, 1.0, 0.0]).unwrap();
        let p = compute_portrait(
            &s,
            &PortraitOptions {
                grid: 2,
                ..Default::default()
            },
            &TOL,
        )
        .unwrap();
        assert!(p.equilibrium_curve);
        assert!(to_svg(&p).contains("u-nullcline"));
    }
}
