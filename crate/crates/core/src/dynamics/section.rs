//! Return maps on a ray through the origin, closed-orbit tests and
//! limit-cycle search.

use serde::{Deserialize, Serialize};

use super::integrator::{norm, Event, IntegratorOptions, PlanarField, Reversed, Stepper};
use crate::error::{Error, Result};

/// The ray `{c (cos angle, sin angle) : c > 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub angle: f64,
}

impl Default for Section {
    fn default() -> Self {
        Self::positive_u_axis()
    }
}

impl Section {
    pub const fn positive_u_axis() -> Self {
        Self { angle: 0.0 }
    }

    pub fn through(x: [f64; 2]) -> Self {
        Self {
            angle: x[1].atan2(x[0]),
        }
    }

    pub fn direction(&self) -> [f64; 2] {
        [self.angle.cos(), self.angle.sin()]
    }

    pub fn normal(&self) -> [f64; 2] {
        [-self.angle.sin(), self.angle.cos()]
    }

    pub fn point(&self, c: f64) -> [f64; 2] {
        let d = self.direction();
        [c * d[0], c * d[1]]
    }

    pub fn coordinate(&self, x: [f64; 2]) -> f64 {
        dot(self.direction(), x)
    }

    /// Signed distance from the line carrying the ray.
    pub fn residual(&self, x: [f64; 2]) -> f64 {
        dot(self.normal(), x)
    }
}

#[inline]
fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
fn angle_between(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] * b[1] - a[1] * b[0]).atan2(dot(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectionCrossing {
    pub section: Section,
    pub coordinate: f64,
    pub return_time: f64,
    /// Accumulated polar angle along the orbit, about `±2 pi` for one turn.
    pub winding: f64,
    /// Distance of the refined crossing from the section line.
    pub residual: f64,
}

/// Follows the orbit from `section.point(c0)` to its next crossing of the
/// section in the same direction.
pub fn poincare_return<F: PlanarField + ?Sized>(
    field: &F,
    section: Section,
    c0: f64,
    opts: &IntegratorOptions,
) -> Result<SectionCrossing> {
    opts.validate()?;
    if !(c0 > 0.0) || !c0.is_finite() {
        return Err(Error::Domain(format!(
            "section coordinate must be positive, got {c0}"
        )));
    }
    let x0 = section.point(c0);
    let n = section.normal();
    let f0 = field.eval(x0);
    let flux = dot(n, f0);
    if !(flux.abs() > 1e-14 * norm(f0).max(f64::MIN_POSITIVE)) {
        return Err(Error::Domain(format!(
            "field is tangent to the section at c = {c0}"
        )));
    }
    let s0 = flux.signum();
    let g = |x: [f64; 2]| s0 * dot(n, x);

    let mut st = Stepper::new(field, x0, opts);
    let mut winding = 0.0;
    let mut prev = x0;
    // the start lies on the section; rounding must not count it as a crossing
    let mut g_prev = 0.0;
    loop {
        if let Event::Stop(term) = st.check() {
            return Err(Error::NoReturn(format!(
                "orbit from c = {c0} ended with {term} at t = {}",
                st.t
            )));
        }
        st.step()
            .map_err(|(t, reason)| Error::Integration { t, reason })?;
        let x = st.x;
        let gb = g(x);
        if g_prev < 0.0 && gb >= 0.0 {
            let d = st.dense.expect("a step was taken");
            let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
            let tol = 1e-14 * c0.max(1.0);
            let mut y = x;
            let mut th = 1.0;
            for _ in 0..200 {
                th = 0.5 * (lo + hi);
                y = d.eval(th);
                let gy = g(y);
                if gy.abs() <= tol || hi - lo <= 4.0 * f64::EPSILON {
                    break;
                }
                if gy < 0.0 {
                    lo = th;
                } else {
                    hi = th;
                }
            }
            let coordinate = section.coordinate(y);
            if coordinate > 0.0 {
                winding += angle_between(prev, y);
                return Ok(SectionCrossing {
                    section,
                    coordinate,
                    return_time: d.t0 + th * d.h,
                    winding,
                    residual: section.residual(y),
                });
            }
        }
        winding += angle_between(prev, x);
        prev = x;
        g_prev = gb;
    }
}

/// `true` iff the orbit through `x0` comes back to within
/// `1e-6 |x0|` of its start after one turn around the origin.
pub fn orbit_closed<F: PlanarField + ?Sized>(
    field: &F,
    x0: [f64; 2],
    opts: &IntegratorOptions,
) -> Result<bool> {
    orbit_closed_within(field, x0, 1e-6 * norm(x0), opts)
}

pub fn orbit_closed_within<F: PlanarField + ?Sized>(
    field: &F,
    x0: [f64; 2],
    tol_close: f64,
    opts: &IntegratorOptions,
) -> Result<bool> {
    let r0 = norm(x0);
    if !(r0 > 0.0) {
        return Err(Error::Domain("closed-orbit test needs x0 != 0".into()));
    }
    match poincare_return(field, Section::through(x0), r0, opts) {
        Ok(c) => {
            Ok((c.coordinate - r0).abs() <= tol_close && c.winding.abs() > std::f64::consts::PI)
        }
        Err(Error::NoReturn(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleStability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitCycle {
    pub coordinate: f64,
    pub stability: CycleStability,
    pub period: f64,
    /// Derivative of the return map at the fixed point.
    pub slope: f64,
    /// Width of the final bisection bracket.
    pub bracket: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedDisplacement {
    pub c: f64,
    /// `P(c) - c`; when the forward return is missing, minus the backward
    /// displacement, which has the same sign.
    pub displacement: Option<f64>,
    pub backward: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitCycleReport {
    pub section: Section,
    pub c_range: [f64; 2],
    pub cycles: Vec<LimitCycle>,
    /// Every successful seed had `|P(c) - c| <= 1e-7 c`: a continuum of
    /// closed orbits, no isolated cycles.
    pub continuum: bool,
    pub seeds: Vec<SeedDisplacement>,
}

const ROOT_TOL: f64 = 1e-9;
const DEDUP_TOL: f64 = 1e-6;
const CONTINUUM_REL: f64 = 1e-7;

/// Signed displacement at `c` and whether the backward map was used.
fn displacement<F: PlanarField + ?Sized>(
    field: &F,
    section: Section,
    c: f64,
    opts: &IntegratorOptions,
) -> Result<(f64, bool)> {
    match poincare_return(field, section, c, opts) {
        Ok(x) => Ok((x.coordinate - c, false)),
        Err(fwd @ (Error::NoReturn(_) | Error::Integration { .. })) => {
            match poincare_return(&Reversed(field), section, c, opts) {
                Ok(x) => Ok((c - x.coordinate, true)),
                Err(_) => Err(fwd),
            }
        }
        Err(e) => Err(e),
    }
}

/// Return-map slope at `c`, from the forward map when available.
fn slope<F: PlanarField + ?Sized>(
    field: &F,
    section: Section,
    c: f64,
    opts: &IntegratorOptions,
) -> Result<(f64, f64)> {
    let h = (1e-5 * c).max(1e-9);
    let fwd = |x: f64| poincare_return(field, section, x, opts);
    match (fwd(c + h), fwd(c - h)) {
        (Ok(p), Ok(m)) => {
            let period = fwd(c)
                .map(|x| x.return_time)
                .unwrap_or(0.5 * (p.return_time + m.return_time));
            Ok(((p.coordinate - m.coordinate) / (2.0 * h), period))
        }
        _ => {
            let rev = Reversed(field);
            let p = poincare_return(&rev, section, c + h, opts)?;
            let m = poincare_return(&rev, section, c - h, opts)?;
            let inv = (p.coordinate - m.coordinate) / (2.0 * h);
            Ok((1.0 / inv, 0.5 * (p.return_time + m.return_time)))
        }
    }
}

/// Geometric grid of `n` seeds over `[lo, hi]`.
pub fn geometric_seeds(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let r = (hi / lo).ln();
    (0..n)
        .map(|i| lo * (r * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Locates the fixed points of the return map in `c_range` from the sign
/// changes of `P(c) - c` on a geometric seed grid.
pub fn find_limit_cycles<F: PlanarField + ?Sized>(
    field: &F,
    section: Section,
    c_range: [f64; 2],
    n_seeds: usize,
    opts: &IntegratorOptions,
) -> Result<LimitCycleReport> {
    let [lo, hi] = c_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || n_seeds < 2 {
        return Err(Error::Domain(format!(
            "need 0 < lo < hi and at least two seeds, got {c_range:?}, {n_seeds}"
        )));
    }
    let seeds: Vec<SeedDisplacement> = geometric_seeds(lo, hi, n_seeds)
        .into_iter()
        .map(|c| match displacement(field, section, c, opts) {
            Ok((d, backward)) => SeedDisplacement {
                c,
                displacement: Some(d),
                backward,
                error: None,
            },
            Err(Error::Domain(m)) => SeedDisplacement {
                c,
                displacement: None,
                backward: false,
                error: Some(m),
            },
            Err(e) => SeedDisplacement {
                c,
                displacement: None,
                backward: false,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let ok: Vec<(f64, f64)> = seeds
        .iter()
        .filter_map(|s| s.displacement.map(|d| (s.c, d)))
        .collect();
    let continuum = !ok.is_empty() && ok.iter().all(|&(c, d)| d.abs() <= CONTINUUM_REL * c);
    let mut cycles: Vec<LimitCycle> = Vec::new();
    if !continuum {
        for w in ok.windows(2) {
            let ((mut a, da), (mut b, db)) = (w[0], w[1]);
            let root = if da == 0.0 {
                a
            } else if db == 0.0 {
                b
            } else if da.signum() != db.signum() {
                let sa = da.signum();
                while b - a > ROOT_TOL {
                    let m = 0.5 * (a + b);
                    let dm = match displacement(field, section, m, opts) {
                        Ok((d, _)) => d,
                        Err(_) => break,
                    };
                    if dm == 0.0 {
                        a = m;
                        b = m;
                    } else if dm.signum() == sa {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                0.5 * (a + b)
            } else {
                continue;
            };
            if cycles
                .last()
                .is_some_and(|c| (c.coordinate - root).abs() < DEDUP_TOL)
            {
                continue;
            }
            let (k, period) = slope(field, section, root, opts)?;
            let stability = if k.abs() < 1.0 {
                CycleStability::Stable
            } else {
                CycleStability::Unstable
            };
            cycles.push(LimitCycle {
                coordinate: root,
                stability,
                period,
                slope: k,
                bracket: b - a,
            });
        }
    }
    Ok(LimitCycleReport {
        section,
        c_range,
        cycles,
        continuum,
        seeds,
    })
}

/// Outcome of `n` successive returns, for conservation checks.
pub fn successive_returns<F: PlanarField + ?Sized>(
    field: &F,
    section: Section,
    c0: f64,
    n: usize,
    opts: &IntegratorOptions,
) -> Result<Vec<SectionCrossing>> {
    let mut out = Vec::with_capacity(n);
    let mut c = c0;
    let mut t = 0.0;
    for _ in 0..n {
        let mut x = poincare_return(field, section, c, opts)?;
        t += x.return_time;
        x.return_time = t;
        c = x.coordinate;
        out.push(x);
    }
    Ok(out)
}

/// Sense of rotation of the orbit through `x0` over its first step, by the
/// sign of `x0 x f(x0)`: positive is anticlockwise.
pub fn rotation_sign<F: PlanarField + ?Sized>(field: &F, x0: [f64; 2]) -> f64 {
    let f = field.eval(x0);
    (x0[0] * f[1] - x0[1] * f[0]).signum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::integrator::FnField;
    use crate::scheme::ParameterScheme;

    fn global_center() -> ParameterScheme {
        ParameterScheme::new([0.0, 0.0, -1.0, 1.0], [1.0, -1.0, 0.0, 0.0]).unwrap()
    }

    /// `r' = p(r)`, `theta' = 1`.
    fn radial(p: impl Fn(f64) -> f64) -> FnField<impl Fn([f64; 2]) -> [f64; 2]> {
        FnField(move |x: [f64; 2]| {
            let r = norm(x);
            let g = if r > 0.0 { p(r) / r } else { 0.0 };
            [g * x[0] - x[1], g * x[1] + x[0]]
        })
    }

    #[test]
    fn center_returns_to_start() {
        let s = global_center();
        let opts = IntegratorOptions::oracle();
        for c0 in [0.1, 1.0, 3.0] {
            let x = poincare_return(&s, Section::default(), c0, &opts).unwrap();
            assert!((x.coordinate - c0).abs() < 1e-7, "{c0}: {x:?}");
            assert!(x.residual.abs() < 1e-10);
            assert!((x.winding.abs() - 2.0 * std::f64::consts::PI).abs() < 1e-6);
        }
        assert!(orbit_closed(&s, [3.0, 0.0], &opts).unwrap());
        assert!(orbit_closed(&s, [-0.4, 1.3], &opts).unwrap());
    }

    #[test]
    fn circle_period_and_coordinate() {
        let f = radial(|_| 0.0);
        let sec = Section { angle: 1.0 };
        let x = poincare_return(&f, sec, 2.0, &IntegratorOptions::oracle()).unwrap();
        assert!((x.return_time - 2.0 * std::f64::consts::PI).abs() < 1e-8);
        assert!((x.coordinate - 2.0).abs() < 1e-9);
    }

    #[test]
    fn stable_and_unstable_cycles_of_normal_form() {
        // origin stable, 0.5 unstable, 1.2 stable
        let f = radial(|r| r * (r - 0.5) * (1.2 - r));
        let rep = find_limit_cycles(
            &f,
            Section::default(),
            [0.05, 2.0],
            30,
            &IntegratorOptions::oracle(),
        )
        .unwrap();
        assert!(!rep.continuum);
        assert_eq!(rep.cycles.len(), 2, "{rep:?}");
        assert!((rep.cycles[0].coordinate - 0.5).abs() < 1e-8);
        assert_eq!(rep.cycles[0].stability, CycleStability::Unstable);
        assert!((rep.cycles[1].coordinate - 1.2).abs() < 1e-8);
        assert_eq!(rep.cycles[1].stability, CycleStability::Stable);
        assert!(rep.cycles.iter().all(|c| c.bracket <= 1e-9));
        assert!((rep.cycles[0].period - 2.0 * std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn unstable_cycle_with_escaping_outside() {
        // origin stable, cycle at 1 unstable, outside escapes
        let f = radial(|r| r * (r - 1.0));
        let opts = IntegratorOptions {
            escape_radius: 20.0,
            ..IntegratorOptions::oracle()
        };
        let rep = find_limit_cycles(&f, Section { angle: 2.5 }, [0.2, 3.0], 12, &opts).unwrap();
        assert_eq!(rep.cycles.len(), 1);
        assert!((rep.cycles[0].coordinate - 1.0).abs() < 1e-8);
        assert_eq!(rep.cycles[0].stability, CycleStability::Unstable);
        assert!(rep.seeds.iter().any(|s| s.backward));
    }

    #[test]
    fn center_flags_continuum() {
        let rep = find_limit_cycles(
            &global_center(),
            Section::default(),
            [0.1, 2.0],
            8,
            &IntegratorOptions::oracle(),
        )
        .unwrap();
        assert!(rep.continuum);
        assert!(rep.cycles.is_empty());
    }

    #[test]
    fn stable_focus_is_not_closed() {
        let s = ParameterScheme::new([-1.0, 0.0, -1.0, 1.0], [1.0, -1.0, -1.0, 0.0]).unwrap();
        let opts = IntegratorOptions::oracle();
        assert!(!orbit_closed(&s, [1.0, 0.0], &opts).unwrap());
        let x = poincare_return(&s, Section::default(), 0.5, &opts).unwrap();
        assert!(x.coordinate < 0.5);
        let y =
            poincare_return(&s.time_reverse(), Section::default(), x.coordinate, &opts).unwrap();
        assert!((y.coordinate - 0.5).abs() < 1e-7);
    }

    #[test]
    fn tangency_and_bad_input() {
        let f = FnField(|x: [f64; 2]| [x[0], x[1]]);
        let opts = IntegratorOptions::oracle();
        assert!(matches!(
            poincare_return(&f, Section::default(), 1.0, &opts),
            Err(Error::Domain(_))
        ));
        assert!(poincare_return(&f, Section::default(), -1.0, &opts).is_err());
        assert!(orbit_closed(&f, [0.0, 0.0], &opts).is_err());
    }

    #[test]
    fn no_return_is_reported() {
        let f = radial(|r| r);
        let opts = IntegratorOptions {
            escape_radius: 10.0,
            ..IntegratorOptions::oracle()
        };
        assert!(matches!(
            poincare_return(&f, Section::default(), 1.0, &opts),
            Err(Error::NoReturn(_))
        ));
        assert!(!orbit_closed(&f, [1.0, 0.0], &opts).unwrap());
    }
}
