//! Orbits of a scheme followed to their end, with slides along a fast
//! nullcline taken in one jump.
//!
//! Where one equation is faster than the other by a factor `e^g` with `g`
//! above [`SLOW_SCALE_GAP`], an orbit that reaches an attracting nullcline of
//! the fast equation stays within `e^-g` of that line. The line passes
//! through the origin and the slow equation keeps one sign on each half of
//! it, so the slide either heads for the origin or away from it. Along the
//! line `g` is concave in the slow coordinate, which makes the place where
//! the slide ends (gap back down to [`SLIDE_RESUME_GAP`]) a single crossing.

use serde::Serialize;

use super::integrator::{
    orbit_fate, IntegrationFailure, IntegratorOptions, OrbitFate, SlowScaledField, Termination,
    SLOW_SCALE_GAP,
};
use crate::scheme::ParameterScheme;

/// Gap at which a jump along a nullcline hands back to the integrator.
pub const SLIDE_RESUME_GAP: f64 = 20.0;

const CHUNK_STEPS: usize = 50_000;
const CHUNK_RESTARTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeFate {
    pub fate: OrbitFate,
    /// Number of jumps along a fast nullcline.
    pub slides: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Slide {
    /// Resume at this point on the nullcline.
    Jump([f64; 2]),
    /// The slide leaves the escape radius at this point.
    Escape([f64; 2]),
}

fn log_sum(p: f64, q: f64) -> f64 {
    p.max(q) + (-(p - q).abs()).exp().ln_1p()
}

/// The slide from `x`, if `x` sits on an attracting nullcline of an
/// equation faster than the other by more than `e^SLOW_SCALE_GAP`.
fn slide(s: &ParameterScheme, x: [f64; 2], escape_radius: f64) -> Option<Slide> {
    let e: [f64; 4] = std::array::from_fn(|i| s.exponent_gap(i, 0, x[0], x[1]));
    let (lu, lv) = (log_sum(e[0], e[1]), log_sum(e[2], e[3]));
    let k = if lu - lv > SLOW_SCALE_GAP {
        0
    } else if lv - lu > SLOW_SCALE_GAP {
        1
    } else {
        return None;
    };
    let o = 1 - k;
    let diff = |eq: usize| [s.a[2 * eq] - s.a[2 * eq + 1], s.b[2 * eq] - s.b[2 * eq + 1]];
    let (p, q) = (diff(k), diff(o));
    // Attracting in the fast coordinate, and inside the layer. With the fast
    // speed capped the integrator chatters across the line with an amplitude
    // that grows with the coordinates, hence the relative part.
    let layer = 1.0 + 1e-6 * (p[0] * x[0]).abs().max((p[1] * x[1]).abs());
    if !(p[k] < 0.0) || s.exponent_gap(2 * k, 2 * k + 1, x[0], x[1]).abs() > layer {
        return None;
    }
    let point = |y: f64| {
        let mut z = [0.0; 2];
        z[o] = y;
        z[k] = -p[o] / p[k] * y;
        z
    };
    let gap = |y: f64| {
        let z = point(y);
        let d = |i: usize| s.exponent_gap(i, 2 * k, z[0], z[1]);
        std::f64::consts::LN_2 - log_sum(d(2 * o), d(2 * o + 1))
    };
    // sign of the slow equation along the line is sign(c y)
    let c = q[k] * (-p[o] / p[k]) + q[o];
    let y0 = x[o];
    if c == 0.0 || y0 == 0.0 || !c.is_finite() || gap(y0) <= SLOW_SCALE_GAP {
        return None;
    }
    let bisect = |mut inside: f64, mut outside: f64| {
        for _ in 0..200 {
            let m = 0.5 * (inside + outside);
            if m == inside || m == outside {
                break;
            }
            if gap(m) > SLIDE_RESUME_GAP {
                inside = m;
            } else {
                outside = m;
            }
        }
        outside
    };
    let norm = |z: [f64; 2]| z[0].hypot(z[1]);
    if c < 0.0 {
        // towards the origin, where the gap is 0
        return Some(Slide::Jump(point(bisect(y0, 0.0))));
    }
    let mut y = y0;
    loop {
        let next = 2.0 * y;
        if gap(next) <= SLIDE_RESUME_GAP {
            return Some(Slide::Jump(point(bisect(y, next))));
        }
        if norm(point(next)) > escape_radius || !next.is_finite() {
            return Some(Slide::Escape(point(next)));
        }
        y = next;
    }
}

/// Fate of the orbit of `s` through `x0`, integrated on [`SlowScaledField`]
/// with clock restarts, jumping along fast nullclines where the integrator
/// stalls on them. `opts.max_steps` bounds the total work and
/// `max_restarts` the total number of clock restarts.
pub fn scheme_fate(
    s: &ParameterScheme,
    x0: [f64; 2],
    opts: &IntegratorOptions,
    max_restarts: usize,
) -> Result<SchemeFate, IntegrationFailure> {
    let field = SlowScaledField(*s);
    let chunk = IntegratorOptions {
        max_steps: opts.max_steps.min(CHUNK_STEPS),
        ..*opts
    };
    let calls = (opts.max_steps / chunk.max_steps).max(1);
    let (mut x, mut restarts, mut slides) = (x0, 0, 0);
    for _ in 0..calls {
        let before = x;
        let budget = max_restarts.saturating_sub(restarts);
        let stalled = match orbit_fate(&field, x, &chunk, budget.min(CHUNK_RESTARTS)) {
            Ok(f) if f.termination != Termination::TimeLimit => {
                return Ok(SchemeFate {
                    fate: OrbitFate {
                        restarts: restarts + f.restarts,
                        ..f
                    },
                    slides,
                })
            }
            Ok(f) => {
                restarts += f.restarts + 1;
                x = f.end;
                None
            }
            Err(e) => match e.partial.last() {
                Some(q) => {
                    x = [q.u, q.v];
                    Some(e)
                }
                None => return Err(e),
            },
        };
        match slide(s, x, opts.escape_radius) {
            Some(Slide::Jump(y)) => {
                x = y;
                slides += 1;
            }
            Some(Slide::Escape(y)) => {
                return Ok(SchemeFate {
                    fate: OrbitFate {
                        termination: Termination::Escaped,
                        end: y,
                        restarts,
                    },
                    slides: slides + 1,
                })
            }
            None => {
                if let Some(e) = stalled {
                    if x == before {
                        return Err(e);
                    }
                }
            }
        }
        if restarts > max_restarts {
            break;
        }
    }
    Ok(SchemeFate {
        fate: OrbitFate {
            termination: Termination::TimeLimit,
            end: x,
            restarts,
        },
        slides,
    })
}
