//! Dependent/independent classification of degree-p defect extensions by
//! two routes: the distance `γ = dist(η, K)` and the set `I_1`.

use serde::Serialize;

use crate::coeffs::Coeff;
use crate::error::{Error, Result};
use crate::exact::{Cut, Rat, Val};
use crate::plateau::{detect_limit, ApproxFamily, PlateauRecord};
use crate::poly::Poly;
use crate::valuation::{pi_member, Case, NewtonPolygon, PiLine};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Dependent,
    Independent,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Dependent => "dependent",
            Verdict::Independent => "independent",
        }
    }
}

/// The labelled points of the degree-p figure at one `ρ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Figure {
    pub rho: usize,
    pub polygon: NewtonPolygon,
    pub pi: PiLine,
    pub p1: (usize, Val),
    pub p2: (usize, Val),
    pub p3: (usize, Val),
    pub p2_on_pi: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifyResult {
    pub case: Case,
    pub gamma: Cut,
    pub delta: Cut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Val>,
    #[serde(rename = "I1")]
    pub i1: Vec<u32>,
    pub verdict: Verdict,
    pub routes_agree: bool,
    pub distance_route: Verdict,
    pub key_poly_route: Verdict,
    pub gammas: Vec<Val>,
    pub figure: Figure,
}

/// Builds the figure data from a plateau record at member `rho`.
pub fn figure(record: &PlateauRecord, rho: usize) -> Result<Figure> {
    let r = record
        .rhos
        .get(rho)
        .ok_or_else(|| Error::Config(format!("rho = {rho} is beyond the computed family")))?;
    let d = record.stats.defect_degree;
    let b = record.stats.b.finite().cloned().ok_or_else(|| Error::Invariant("B must be finite".into()))?;
    let pi = PiLine::new(d as u64, b);
    let points = r.nu_coeffs.iter().cloned().enumerate().collect();
    Ok(Figure {
        rho,
        polygon: NewtonPolygon::from_points(points),
        p1: (0, r.gamma.scale(d as i64)?),
        p2: (1, r.nu_coeffs.get(1).cloned().unwrap_or(Val::Inf)),
        p3: (d, Val::zero()),
        p2_on_pi: pi_member(1, &r.beta[1], &pi),
        pi,
    })
}

/// Classifies a degree-p extension from its single plateau record.
pub fn classify_degree_p<C: Coeff>(
    g: &Poly<C>,
    case: Case,
    fam: &ApproxFamily<C>,
    record: &PlateauRecord,
    figure_rho: Option<usize>,
) -> Result<ClassifyResult> {
    let p = g.prime();
    let pr = p.as_i64();
    if g.deg() as u64 != p.get() || fam.degree != 1 || record.stats.defect_degree as u64 != p.get() {
        return Err(Error::NotDefect(format!("expected a single degree-1 plateau with defect {p}")));
    }
    let alpha = match case {
        Case::ArtinSchreier => None,
        Case::Kummer => {
            if C::CHAR_P {
                return Err(Error::Backend("the Kummer case needs mixed characteristic".into()));
            }
            let va = g.coeff(0).val()?;
            if va != Val::zero() {
                return Err(Error::NotDefect(format!("Kummer case needs v(a) = 0, got {va}")));
            }
            Some(Val::Fin(Rat::frac(1, pr - 1)))
        }
    };
    let gamma = record.stats.b.clone();
    let bound = alpha.clone().unwrap_or(Val::zero());
    let gammas: Vec<Val> = record.rhos.iter().map(|r| r.gamma.clone()).collect();
    if let Some(r) = record.rhos.iter().find(|r| r.gamma >= bound) {
        return Err(Error::Invariant(format!("gamma_{} = {} is not below {bound}", r.rho, r.gamma)));
    }
    if gamma > bound {
        return Err(Error::Invariant(format!("gamma = {gamma} exceeds {bound}")));
    }

    // ν_{x-b}(g) = v(g(b)) = p·ν(x-b) at every member
    let delta = gamma.scale(pr)?;
    for r in &record.rhos {
        let pg = r.gamma.scale(pr)?;
        if r.nu_q != r.nu_coeffs[0] || r.nu_q != pg {
            return Err(Error::Invariant(format!(
                "shortcut identity fails at rho = {}: nu_Q(g) = {}, v(g(b)) = {}, p*gamma = {pg}",
                r.rho, r.nu_q, r.nu_coeffs[0]
            )));
        }
        if r.nu_q >= delta {
            return Err(Error::Invariant(format!("nu_(x-b)(g) = {} reaches delta = {delta}", r.nu_q)));
        }
    }
    let nus: Vec<Val> = record.rhos.iter().map(|r| r.nu_q.clone()).collect();
    if let Some(l) = detect_limit(&nus, p.get()) {
        if Val::Fin(l.clone()) != delta {
            return Err(Error::Invariant(format!("sup of nu_(x-b)(g) is {l:?}, expected {delta}")));
        }
    }
    if let Some(vals) = &fam.residual_vals {
        if *vals != nus {
            return Err(Error::Invariant("stepper residual values differ from nu_(x-b)(g)".into()));
        }
    }

    let distance_route = if gamma == bound { Verdict::Independent } else { Verdict::Dependent };
    let key_poly_route = match record.i_set.as_slice() {
        [] => Verdict::Dependent,
        [0] => Verdict::Independent,
        other => return Err(Error::Invariant(format!("I_1 = {other:?} in degree p"))),
    };
    if distance_route != key_poly_route {
        return Err(Error::RoutesDisagree {
            distance: distance_route.as_str().into(),
            key_poly: key_poly_route.as_str().into(),
        });
    }
    let rho = figure_rho.unwrap_or(2.min(record.rhos.len() - 1));
    Ok(ClassifyResult {
        case,
        gamma: Cut::minus(gamma),
        delta: Cut::minus(delta),
        alpha,
        i1: record.i_set.clone(),
        verdict: key_poly_route,
        routes_agree: true,
        distance_route,
        key_poly_route,
        gammas,
        figure: figure(record, rho)?,
    })
}
