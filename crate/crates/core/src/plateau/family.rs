use serde::{Deserialize, Serialize};

use crate::coeffs::Coeff;
use crate::error::{Error, Result};
use crate::exact::Val;
use crate::poly::Poly;
use crate::series::parse::{parse_poly, parse_series};
use crate::series::{FiniteSum, Series};
use crate::valuation::{Case, NuOracle};

use super::stepper::{as_root_stepper, newton_stepper, StepperRun};

/// One approximant `Q_ρ` with its value `γ_ρ = ν(Q_ρ)`.
#[derive(Clone, Debug)]
pub struct Member<C: Coeff> {
    pub rho: usize,
    pub q: Poly<C>,
    pub gamma: Val,
}

/// Monic approximants of a common degree with strictly increasing values.
#[derive(Clone, Debug)]
pub struct ApproxFamily<C: Coeff> {
    pub degree: usize,
    pub members: Vec<Member<C>>,
    /// `B = sup γ_ρ`, from a recognised pattern or a user hint.
    pub sup_hint: Option<Val>,
    /// For degree-one families: the approximants `b_ρ` of `Q_ρ = x - b_ρ`.
    pub bs: Option<Vec<FiniteSum<C>>>,
    /// Values `ν_{x-b_ρ}(g) = v(g(b_ρ))` when a stepper produced the family.
    pub residual_vals: Option<Vec<Val>>,
    pub generator: String,
}

impl<C: Coeff> ApproxFamily<C> {
    fn from_run(run: StepperRun<C>, generator: &str) -> Self {
        let members = run
            .bs
            .iter()
            .zip(&run.gammas)
            .enumerate()
            .map(|(rho, (b, g))| Member { rho, q: Poly::linear(&Series::Exact(b.clone())), gamma: g.clone() })
            .collect();
        ApproxFamily {
            degree: 1,
            members,
            sup_hint: run.sup_hint(),
            bs: Some(run.bs),
            residual_vals: Some(run.residual_vals),
            generator: generator.to_string(),
        }
    }

    /// Checks the family contract: monic members of the declared degree
    /// with strictly increasing values.
    pub fn validate(&self) -> Result<()> {
        if self.members.len() < 2 {
            return Err(Error::Config("a family needs at least two members".into()));
        }
        for m in &self.members {
            if !m.q.is_monic() || m.q.deg() != self.degree {
                return Err(Error::Invariant(format!("Q_{} = {} is not monic of degree {}", m.rho, m.q, self.degree)));
            }
        }
        for w in self.members.windows(2) {
            if w[1].gamma <= w[0].gamma {
                return Err(Error::Stalled { step: w[1].rho, value: w[1].gamma.to_string() });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// Stepper for `x^q - x = a` (the extension's own `a` if omitted;
    /// `q = p` unless `power` is given).
    AsStepper {
        #[serde(default)]
        a: Option<String>,
        #[serde(default)]
        power: Option<u64>,
    },
    /// Newton-Puiseux stepper on `g` from `b0`.
    NewtonStepper {
        #[serde(default = "default_b0")]
        b0: String,
    },
    /// Polynomials and values listed verbatim.
    Explicit { polys: Vec<String>, gammas: Vec<Val> },
    /// `Q_ρ = inner(x) - b'_ρ` with `b'_ρ` from the Artin-Schreier stepper on
    /// `a`; values come from the oracle.
    Composed { inner: String, a: String },
}

fn default_b0() -> String {
    "0".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageSpec {
    pub degree: usize,
    #[serde(flatten)]
    pub generator: GeneratorSpec,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub gamma_hint: Option<Val>,
}

fn default_steps() -> usize {
    12
}

/// What a family generator may consult about the extension.
pub struct Extension<'a, C: Coeff> {
    pub g: &'a Poly<C>,
    pub case: Case,
    pub a: Option<&'a Series<C>>,
    pub oracle: &'a NuOracle<C>,
    pub budget: usize,
}

pub fn build_family<C: Coeff>(spec: &StageSpec, ext: &Extension<'_, C>) -> Result<ApproxFamily<C>> {
    let p = ext.g.prime();
    let mut fam = match &spec.generator {
        GeneratorSpec::AsStepper { a, power } => {
            let a = match a {
                Some(text) => parse_series::<C>(text, p)?,
                None => ext.a.cloned().ok_or_else(|| Error::Config("as_stepper needs `a`".into()))?,
            };
            let q = power.unwrap_or(p.get());
            ApproxFamily::from_run(as_root_stepper(&a, q, spec.steps, ext.budget)?, "as_stepper")
        }
        GeneratorSpec::NewtonStepper { b0 } => {
            let b0 = parse_series::<C>(b0, p)?;
            let b0 = b0.as_exact().ok_or_else(|| Error::Config("b0 must be a finite sum".into()))?;
            ApproxFamily::from_run(newton_stepper(ext.g, ext.case, b0, spec.steps, ext.budget)?, "newton_stepper")
        }
        GeneratorSpec::Explicit { polys, gammas } => {
            if polys.len() != gammas.len() {
                return Err(Error::Config("explicit generator: polys and gammas differ in length".into()));
            }
            let members = polys
                .iter()
                .zip(gammas)
                .enumerate()
                .map(|(rho, (q, g))| Ok(Member { rho, q: parse_poly::<C>(q, p)?, gamma: g.clone() }))
                .collect::<Result<Vec<_>>>()?;
            ApproxFamily {
                degree: spec.degree,
                members,
                sup_hint: None,
                bs: None,
                residual_vals: None,
                generator: "explicit".into(),
            }
        }
        GeneratorSpec::Composed { inner, a } => {
            let inner = parse_poly::<C>(inner, p)?;
            let run = as_root_stepper(&parse_series::<C>(a, p)?, p.get(), spec.steps, ext.budget)?;
            let members = run
                .bs
                .iter()
                .enumerate()
                .map(|(rho, b)| {
                    let q = &inner - &Poly::constant(Series::Exact(b.clone()));
                    let gamma = ext.oracle.nu(&q)?;
                    Ok(Member { rho, q, gamma })
                })
                .collect::<Result<Vec<_>>>()?;
            ApproxFamily {
                degree: inner.deg(),
                members,
                sup_hint: run.sup_hint(),
                bs: None,
                residual_vals: None,
                generator: "composed".into(),
            }
        }
    };
    if fam.degree != spec.degree {
        return Err(Error::Config(format!(
            "stage declares degree {} but its generator yields degree {}",
            spec.degree, fam.degree
        )));
    }
    if spec.gamma_hint.is_some() {
        fam.sup_hint = spec.gamma_hint.clone();
    }
    fam.validate()?;
    Ok(fam)
}
