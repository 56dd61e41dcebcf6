//! Runs configured extensions through the analysis pipeline.

use serde::Serialize;

use crate::classify::{classify_degree_p, ClassifyResult};
use crate::coeffs::{Coeff, CycElem, FpElem, PrimeChar};
use crate::config::{BackendKind, OracleKind, RunConfig};
use crate::error::{Error, Result};
use crate::exact::Val;
use crate::plateau::{analyze_extension, as_root_lazy, build_family, ApproxFamily, DefectReport, Extension};
use crate::plateau::{GeneratorSpec, StageSpec};
use crate::poly::Poly;
use crate::series::parse::{parse_poly, parse_series};
use crate::series::Series;
use crate::valuation::{expansion_values, min_argmin, Case, NewtonPolygon, NuOracle};

/// A parsed extension with its oracle.
pub struct Prepared<C: Coeff> {
    pub p: PrimeChar,
    pub g: Poly<C>,
    pub case: Option<Case>,
    pub a: Option<Series<C>>,
    pub oracle: NuOracle<C>,
    pub budget: usize,
}

impl<C: Coeff> Prepared<C> {
    pub fn extension(&self) -> Extension<'_, C> {
        Extension { g: &self.g, case: self.case.unwrap_or(Case::ArtinSchreier), a: self.a.as_ref(), oracle: &self.oracle, budget: self.budget }
    }
}

/// `x^p - x - a` or `x^p - a`.
pub fn default_g<C: Coeff>(case: Case, a: &Series<C>) -> Poly<C> {
    let p = a.prime();
    let xp = Poly::x(p).pow(p.get() as u32);
    let base = match case {
        Case::ArtinSchreier => &xp - &Poly::x(p),
        Case::Kummer => xp,
    };
    &base - &Poly::constant(a.clone())
}

pub fn prepare<C: Coeff>(cfg: &RunConfig) -> Result<Prepared<C>> {
    let expected = match cfg.backend {
        BackendKind::EqualChar => "equal-char",
        BackendKind::MixedChar => "mixed-char",
    };
    if C::BACKEND != expected {
        return Err(Error::Backend(format!("config asks for {expected}, running {}", C::BACKEND)));
    }
    let p = cfg.prime_char()?;
    let a = cfg.a.as_deref().map(|t| parse_series::<C>(t, p)).transpose()?;
    let g = match (&cfg.g, cfg.case, &a) {
        (Some(t), _, _) => parse_poly::<C>(t, p)?,
        (None, Some(case), Some(a)) => default_g(case, a),
        _ => return Err(Error::Config("give either `g` or both `case` and `a`".into())),
    };
    if !g.is_monic() || g.deg() < 2 {
        return Err(Error::Config(format!("g = {g} must be monic of degree at least 2")));
    }
    let budget = cfg.budget.series;
    let oracle = match (cfg.oracle, &cfg.eta, cfg.case) {
        (Some(OracleKind::Shortcut), _, Some(case)) => NuOracle::shortcut(g.clone(), case),
        (_, Some(eta), _) => NuOracle::root_eval(g.clone(), parse_series::<C>(eta, p)?),
        (_, None, Some(Case::ArtinSchreier)) if cfg.g.is_none() => {
            let a = a.as_ref().expect("checked above");
            NuOracle::root_eval(g.clone(), Series::Lazy(as_root_lazy(a)?))
        }
        (None, None, Some(case)) => NuOracle::shortcut(g.clone(), case),
        _ => return Err(Error::Config("no root `eta` given for the root-eval oracle".into())),
    };
    Ok(Prepared { p, g, case: cfg.case, a, oracle: oracle.with_budget(budget), budget })
}

fn not_defect(e: Error) -> Error {
    match e {
        Error::RootFound(_) | Error::ResidueUnsolvable(_) | Error::NotDefect(_) => Error::NotDefect(e.to_string()),
        e => e,
    }
}

pub fn build_stages<C: Coeff>(cfg: &RunConfig, prep: &Prepared<C>) -> Result<Vec<ApproxFamily<C>>> {
    if cfg.stages.is_empty() {
        return Err(Error::Config("no stages given".into()));
    }
    let ext = prep.extension();
    cfg.stages
        .iter()
        .enumerate()
        .map(|(i, s)| build_family(s, &ext).map_err(|e| not_defect(e).at_stage(i + 1)))
        .collect()
}

pub fn analyze<C: Coeff>(cfg: &RunConfig) -> Result<DefectReport> {
    let prep = prepare::<C>(cfg)?;
    let stages = build_stages(cfg, &prep)?;
    analyze_extension(&prep.g, &stages, &prep.oracle, &cfg.analysis_options())
}

/// The single stage used by `classify` when the config lists none.
pub fn default_stage(case: Case) -> StageSpec {
    let generator = match case {
        Case::ArtinSchreier => GeneratorSpec::AsStepper { a: None, power: None },
        Case::Kummer => GeneratorSpec::NewtonStepper { b0: "0".into() },
    };
    StageSpec { degree: 1, generator, steps: 12, gamma_hint: None }
}

pub fn classify<C: Coeff>(cfg: &RunConfig) -> Result<(ClassifyResult, DefectReport)> {
    let case = cfg.case.ok_or_else(|| Error::Config("classify needs `case`".into()))?;
    let mut cfg = cfg.clone();
    if cfg.stages.is_empty() {
        cfg.stages.push(default_stage(case));
    }
    if cfg.stages.len() != 1 {
        return Err(Error::Config("classify takes a single stage".into()));
    }
    let prep = prepare::<C>(&cfg)?;
    if prep.g.deg() as u64 != prep.p.get() {
        return Err(Error::Config(format!("classify needs deg g = p, got {}", prep.g.deg())));
    }
    let stages = build_stages(&cfg, &prep)?;
    let report =
        analyze_extension(&prep.g, &stages, &prep.oracle, &cfg.analysis_options()).map_err(not_defect)?;
    let res = classify_degree_p(&prep.g, case, &stages[0], &report.plateaus[0], cfg.output.rho)?;
    Ok((res, report))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpandReport {
    pub f: String,
    pub q: String,
    /// `a_{Q,i}`, lowest index first.
    pub coeffs: Vec<String>,
    pub nu_coeffs: Vec<Val>,
    pub nu_of_q: Val,
    /// `L_Q(f)`: the terms `a_i Q^i` attaining `ν_Q(f)`.
    pub leading_form: Vec<String>,
    pub nu_q: Val,
    pub argmin: Vec<usize>,
    pub deg_q: usize,
    pub polygon: NewtonPolygon,
}

pub fn expand<C: Coeff>(cfg: &RunConfig) -> Result<ExpandReport> {
    let sect = cfg.expand.as_ref().ok_or_else(|| Error::Config("missing [expand] section".into()))?;
    let prep = prepare::<C>(cfg)?;
    let f = parse_poly::<C>(&sect.f, prep.p)?;
    let q = parse_poly::<C>(&sect.q, prep.p)?;
    let exp = f.q_expansion(&q)?;
    let gamma_q = prep.oracle.nu(&q)?;
    let vals = expansion_values(&exp, &gamma_q, &prep.oracle)?;
    let (nu_q, argmin) = min_argmin(&vals);
    let leading_form = argmin.iter().map(|&i| format!("({}) * Q^{i}", exp.coeffs[i])).collect();
    Ok(ExpandReport {
        f: f.to_string(),
        q: q.to_string(),
        coeffs: exp.coeffs.iter().map(|c| c.to_string()).collect(),
        polygon: NewtonPolygon::from_points(vals.iter().map(|(a, _)| a.clone()).enumerate().collect()),
        nu_coeffs: vals.into_iter().map(|(a, _)| a).collect(),
        nu_of_q: gamma_q,
        leading_form,
        deg_q: argmin.last().copied().unwrap_or(0),
        nu_q,
        argmin,
    })
}

pub fn analyze_config(cfg: &RunConfig) -> Result<DefectReport> {
    match cfg.backend {
        BackendKind::EqualChar => analyze::<FpElem>(cfg),
        BackendKind::MixedChar => analyze::<CycElem>(cfg),
    }
}

pub fn classify_config(cfg: &RunConfig) -> Result<(ClassifyResult, DefectReport)> {
    match cfg.backend {
        BackendKind::EqualChar => classify::<FpElem>(cfg),
        BackendKind::MixedChar => classify::<CycElem>(cfg),
    }
}

pub fn expand_config(cfg: &RunConfig) -> Result<ExpandReport> {
    match cfg.backend {
        BackendKind::EqualChar => expand::<FpElem>(cfg),
        BackendKind::MixedChar => expand::<CycElem>(cfg),
    }
}
