//! Aggregated classification record.

use serde::{Deserialize, Serialize};

use crate::classify::{
    boundedness_status, focal_values, global_stability_all_gamma, hopf_ell1, is_center,
    is_global_center, jacobian, local_stability_all_gamma, orientation, BoundednessStatus,
    CenterCase, L2Branch, Orientation, SecondFocal, StabilityVerdict,
};
use crate::forms::{ssystem_to_scheme, EquilibriumResult, Mat2, SSystem};
use crate::scheme::{ParameterScheme, SignMatrix};
use crate::Tolerance;

/// Either an S-system or a scheme in exponential form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisInput {
    SSystem(SSystem),
    Scheme(ParameterScheme),
}

/// Every field is always serialized; `null` marks "not applicable".
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub equilibrium: Option<EquilibriumResult>,
    pub gamma: Option<[f64; 2]>,
    pub scheme: Option<ParameterScheme>,
    pub trace: Option<f64>,
    pub det: Option<f64>,
    pub sign_matrix: Option<SignMatrix>,
    pub local_verdict: Option<StabilityVerdict>,
    pub global_verdict: Option<StabilityVerdict>,
    pub boundedness: Option<BoundednessStatus>,
    pub center: bool,
    pub center_cases: Vec<CenterCase>,
    #[serde(rename = "L1")]
    pub l1: Option<f64>,
    #[serde(rename = "L2")]
    pub l2: Option<f64>,
    pub l2_branch: Option<String>,
    pub ell1: Option<f64>,
    pub global_center: Option<bool>,
    pub orientation: Option<Orientation>,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    fn empty() -> Self {
        Self {
            equilibrium: None,
            gamma: None,
            scheme: None,
            trace: None,
            det: None,
            sign_matrix: None,
            local_verdict: None,
            global_verdict: None,
            boundedness: None,
            center: false,
            center_cases: Vec::new(),
            l1: None,
            l2: None,
            l2_branch: None,
            ell1: None,
            global_center: None,
            orientation: None,
            notes: Vec::new(),
        }
    }
}

/// Runs every classifier. Failures of individual classifiers become notes;
/// only the shape of the input decides which fields can be filled.
pub fn classify(input: &AnalysisInput, tol: &Tolerance) -> ClassificationReport {
    let mut r = ClassificationReport::empty();
    let (scheme, g, h) = match input {
        AnalysisInput::SSystem(sys) => {
            let eq = sys.solve_equilibrium(tol);
            r.equilibrium = Some(eq);
            if eq == EquilibriumResult::DegenerateNoneOrInfinite {
                r.notes.push(
                    "det(G - H) = 0: no unique positive equilibrium, nothing to classify".into(),
                );
                return r;
            }
            match ssystem_to_scheme(sys, tol) {
                Ok((scaled, s)) => {
                    r.gamma = Some(scaled.gamma);
                    (s, sys.g, sys.h)
                }
                Err(e) => {
                    r.notes.push(format!("exponential form unavailable: {e}"));
                    return r;
                }
            }
        }
        AnalysisInput::Scheme(s) => {
            let (g, h) = s.unit_gamma_exponents();
            r.notes
                .push("kinetic orders inferred from the scheme with gamma = (1, 1)".into());
            (*s, g, h)
        }
    };
    fill(&mut r, &scheme, &g, &h, tol);
    r
}

fn fill(r: &mut ClassificationReport, s: &ParameterScheme, g: &Mat2, h: &Mat2, tol: &Tolerance) {
    let j = jacobian(s);
    let scale = tol.scale_of(s);
    r.scheme = Some(*s);
    r.trace = Some(j.trace());
    r.det = Some(j.det());
    r.sign_matrix = Some(j.sign_matrix(tol.eq * scale));
    if tol.is_zero(j.det(), scale, 2) {
        r.notes
            .push("det J = 0: the origin lies on a curve of equilibria".into());
    }
    let mut note = |what: &str, e: crate::Error| r.notes.push(format!("{what}: {e}"));
    let local = local_stability_all_gamma(g, h, tol)
        .map_err(|e| note("local stability", e))
        .ok();
    let global = global_stability_all_gamma(g, h, tol)
        .map_err(|e| note("global stability", e))
        .ok();
    let bounded = boundedness_status(s, tol)
        .map_err(|e| note("boundedness", e))
        .ok();
    let focal = focal_values(s, tol)
        .map_err(|e| note("focal values", e))
        .ok();
    let ell1 = hopf_ell1(s, tol).ok();
    let verdict = is_center(s, tol);
    let global_center = is_global_center(s, tol).ok();
    let orient = orientation(s, tol).ok();
    r.local_verdict = local;
    r.global_verdict = global;
    r.boundedness = bounded;
    r.center = verdict.is_center;
    r.center_cases = verdict.cases.clone();
    if !verdict.consistent {
        r.notes.push(format!(
            "center families and focal values disagree: {}",
            verdict.explanation
        ));
    }
    if let Some(f) = focal {
        r.l1 = Some(f.l1);
        r.l2 = f.l2.value();
        r.l2_branch = match f.l2 {
            SecondFocal::Value { branch, .. } => Some(
                match branch {
                    L2Branch::B => "b",
                    L2Branch::C2 => "c2",
                    L2Branch::C4 => "c4",
                }
                .to_string(),
            ),
            SecondFocal::ZeroByIntegrability { case } => Some(format!("integrable ({case})")),
            SecondFocal::UndefinedRequiresL1Zero => None,
        };
    }
    r.ell1 = ell1;
    r.global_center = global_center;
    r.orientation = orient;
}
