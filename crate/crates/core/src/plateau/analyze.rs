use std::collections::BTreeSet;

use serde::Serialize;

use crate::coeffs::Coeff;
use crate::error::{Error, Result};
use crate::exact::Val;
use crate::poly::{taylor_expand, Poly};
use crate::valuation::{min_argmin, pi_member, NuOracle, PiLine};

use super::family::ApproxFamily;

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    /// Consecutive members over which `J` must be constant.
    pub window: usize,
    /// Refinements used when checking the reduced polynomial.
    pub verify_refinements: usize,
    /// Budget for consistency checks of lazy identities.
    pub verify_budget: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { window: 3, verify_refinements: 3, verify_budget: 8 }
    }
}

/// Observations at one family member `Q_ρ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoRecord {
    pub rho: usize,
    pub q: String,
    pub gamma: Val,
    /// `ν(a_{ρi}(F))` for `i = 0..=D`.
    pub nu_coeffs: Vec<Val>,
    pub nu_q: Val,
    pub argmin: Vec<usize>,
    pub deg_q: usize,
    /// `β_i = ν(∂_i L(h_ρ))` for `i = 0..=D`.
    pub beta: Vec<Val>,
    pub j: Vec<usize>,
    pub support: Vec<usize>,
    /// Two of the values `β_k + kγ_ρ` coincide; the member is skipped.
    pub collision: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlateauStats {
    pub b: Val,
    pub bbar: Val,
    pub defect_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReducedCheck {
    pub rho: usize,
    pub nu_q_reduced: Val,
    pub nu_q_f: Val,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlateauRecord {
    pub stage: usize,
    pub n: usize,
    pub generator: String,
    pub f: String,
    #[serde(flatten)]
    pub stats: PlateauStats,
    /// `D = p^{d_i}`.
    pub d: u32,
    pub rhos: Vec<RhoRecord>,
    pub stabilization_index: usize,
    pub b_n: Vec<usize>,
    pub i_set: Vec<u32>,
    pub f_reduced: String,
    pub reduced_checks: Vec<ReducedCheck>,
    /// `ν(∂_k L(Q_0))` for `k = 1..D-1`, where the oracle can evaluate it.
    pub beta_base: Vec<Option<Val>>,
}

/// `B` (from the family's supremum), `D = deg F / n` and `B̄ = D·B`.
pub fn plateau_stats<C: Coeff>(fam: &ApproxFamily<C>, f: &Poly<C>) -> Result<PlateauStats> {
    let d = plateau_defect(f, fam)?;
    let b = fam.sup_hint.clone().ok_or(Error::BUnknown)?;
    for m in &fam.members {
        if m.gamma >= b {
            return Err(Error::HintInconsistent { rho: m.rho, gamma: m.gamma.to_string(), bound: b.to_string() });
        }
    }
    let bbar = b.scale(d as i64)?;
    Ok(PlateauStats { b, bbar, defect_degree: d })
}

/// `deg F / n`, which must be a power of `p`.
pub fn plateau_defect<C: Coeff>(f: &Poly<C>, fam: &ApproxFamily<C>) -> Result<usize> {
    let (df, n) = (f.deg(), fam.degree);
    if n == 0 || df % n != 0 {
        return Err(Error::Invariant(format!("deg F = {df} is not a multiple of the stage degree {n}")));
    }
    let d = df / n;
    if f.prime().log_exact(d as u64).is_none() {
        return Err(Error::NonPPower(d));
    }
    Ok(d)
}

/// `J_ρ(F) = {j ∈ 1..=D : ν(a_{ρj}) + jγ_ρ > B̄}`; absent indices count as
/// `∞` and therefore belong to `J`.
pub fn j_set(nu_coeffs: &[Val], gamma: &Val, bbar: &Val, d: usize) -> Result<Vec<usize>> {
    let mut j = Vec::new();
    for k in 1..=d {
        let v = nu_coeffs.get(k).cloned().unwrap_or(Val::Inf);
        if v + gamma.scale(k as i64)? > *bbar {
            j.push(k);
        }
    }
    Ok(j)
}

fn rho_record<C: Coeff>(
    f: &Poly<C>,
    fam: &ApproxFamily<C>,
    rho: usize,
    stats: &PlateauStats,
    oracle: &NuOracle<C>,
    opts: &AnalysisOptions,
) -> Result<RhoRecord> {
    let d = stats.defect_degree;
    let m = &fam.members[rho];
    let exp = f.q_expansion(&m.q)?;
    if exp.coeffs.len() != d + 1 || exp.coeff(d).exact_eq(&Poly::one(f.prime())) != Some(true) {
        return Err(Error::Invariant(format!("a_{{Q,D}}(F) != 1 at rho = {rho}")));
    }
    let nu_coeffs = exp.coeffs.iter().map(|a| oracle.nu(a)).collect::<Result<Vec<_>>>()?;
    let totals = nu_coeffs
        .iter()
        .enumerate()
        .map(|(i, v)| Ok((v.clone(), v.clone() + m.gamma.scale(i as i64)?)))
        .collect::<Result<Vec<_>>>()?;
    let (nu_q, argmin) = min_argmin(&totals);
    let deg_q = argmin.last().copied().unwrap_or(0);
    let j = j_set(&nu_coeffs, &m.gamma, &stats.bbar, d)?;

    // Taylor expansion about Q_ρ, written from the base expansion L
    let h = &fam.members[0].q - &m.q;
    let terms = taylor_expand(f, &m.q, &h, opts.verify_budget)?;
    let beta = (0..=d)
        .map(|i| terms.get(i).map_or(Ok(Val::Inf), |t| oracle.nu(t)))
        .collect::<Result<Vec<_>>>()?;
    if beta != nu_coeffs {
        return Err(Error::Invariant(format!("Taylor coefficients disagree with the Q-expansion at rho = {rho}")));
    }
    let mut seen = BTreeSet::new();
    let mut collision = false;
    for (k, b) in beta.iter().enumerate().skip(1) {
        if b.is_inf() {
            continue;
        }
        if !seen.insert(b.clone() + m.gamma.scale(k as i64)?) {
            collision = true;
        }
    }
    Ok(RhoRecord {
        rho,
        q: m.q.to_string(),
        gamma: m.gamma.clone(),
        nu_coeffs,
        nu_q,
        argmin,
        deg_q,
        beta,
        j,
        support: exp.support,
        collision,
    })
}

/// Result of the search for the stable `J`.
#[derive(Clone, Debug)]
pub struct BSet {
    pub rhos: Vec<RhoRecord>,
    pub b_n: Vec<usize>,
    pub stabilization_index: usize,
}

/// `B_n(F) = {1..D-1} \ J_{ρ1}(F)`, where `ρ1` starts the first window of
/// non-colliding members with constant `J`, cross-checked against π.
pub fn b_set<C: Coeff>(
    f: &Poly<C>,
    fam: &ApproxFamily<C>,
    stats: &PlateauStats,
    oracle: &NuOracle<C>,
    opts: &AnalysisOptions,
) -> Result<BSet> {
    let d = stats.defect_degree;
    let rhos = (0..fam.members.len())
        .map(|rho| rho_record(f, fam, rho, stats, oracle, opts))
        .collect::<Result<Vec<_>>>()?;
    for w in rhos.windows(2) {
        if !w[0].j.iter().all(|k| w[1].j.contains(k)) {
            return Err(Error::Invariant(format!("J not monotone between rho = {} and {}", w[0].rho, w[1].rho)));
        }
    }
    let usable: Vec<&RhoRecord> = rhos.iter().filter(|r| !r.collision).collect();
    let start = usable
        .windows(opts.window.max(1))
        .find(|w| w.iter().all(|r| r.j == w[0].j))
        .map(|w| w[0])
        .ok_or(Error::NotStabilized(fam.members.len()))?;
    let (Val::Fin(b), Val::Fin(_)) = (&stats.b, &stats.bbar) else {
        return Err(Error::Invariant("B must be finite".into()));
    };
    let line = PiLine::new(d as u64, b.clone());
    for k in 1..d {
        if !start.j.contains(&k) != pi_member(k, &start.beta[k], &line) {
            return Err(Error::PiLineDisagreement { k, rho: start.rho });
        }
    }
    let b_n: Vec<usize> = (1..d).filter(|k| !start.j.contains(k)).collect();
    for &k in &b_n {
        if f.prime().log_exact(k as u64).is_none() {
            return Err(Error::NonPPower(k));
        }
    }
    let stabilization_index = start.rho;
    Ok(BSet { rhos, b_n, stabilization_index })
}

/// `F_{S,ρ} = a_{ρ0} + Σ_{s∈S} a_{ρs} Q_ρ^s + Q_ρ^D`.
pub fn reduced_limit_kp<C: Coeff>(f: &Poly<C>, q: &Poly<C>, s: &[usize], d: usize) -> Result<Poly<C>> {
    let exp = f.q_expansion(q)?;
    if exp.coeff(d).exact_eq(&Poly::one(f.prime())) != Some(true) {
        return Err(Error::Invariant("a_{Q,D}(F) != 1".into()));
    }
    let mut out = &exp.coeff(0) + &q.pow(d as u32);
    for &k in s {
        out = &out + &(&exp.coeff(k) * &q.pow(k as u32));
    }
    Ok(out)
}

/// `ν_{Q_σ}` of `F` and of `H` at the given members.
pub fn compare_truncations<C: Coeff>(
    f: &Poly<C>,
    h: &Poly<C>,
    fam: &ApproxFamily<C>,
    rhos: impl IntoIterator<Item = usize>,
    oracle: &NuOracle<C>,
) -> Result<Vec<ReducedCheck>> {
    rhos.into_iter()
        .map(|rho| {
            let m = &fam.members[rho];
            let (nu_q_f, _) = crate::valuation::nu_trunc(f, &m.q, &m.gamma, oracle)?;
            let (nu_q_reduced, _) = crate::valuation::nu_trunc(h, &m.q, &m.gamma, oracle)?;
            Ok(ReducedCheck { rho, nu_q_reduced, nu_q_f })
        })
        .collect()
}

/// Full analysis of one plateau with limit key polynomial `F`.
pub fn analyze_stage<C: Coeff>(
    stage: usize,
    f: &Poly<C>,
    fam: &ApproxFamily<C>,
    oracle: &NuOracle<C>,
    opts: &AnalysisOptions,
) -> Result<PlateauRecord> {
    let p = f.prime();
    for m in &fam.members {
        let nu = oracle.nu(&m.q)?;
        if nu != m.gamma {
            return Err(Error::Invariant(format!("gamma_{} = {} but nu(Q_{}) = {nu}", m.rho, m.gamma, m.rho)));
        }
    }
    let stats = plateau_stats(fam, f)?;
    let d = stats.defect_degree;
    let bs = b_set(f, fam, &stats, oracle, opts)?;
    let rho1 = bs.stabilization_index;
    let last = fam.members.len() - 1;

    // ν_Q(F) = D·γ and deg_Q(F) = D at the deepest members
    for r in &bs.rhos[last.saturating_sub(2)..] {
        if r.nu_q != r.gamma.scale(d as i64)? {
            return Err(Error::Invariant(format!("nu_Q(F) = {} != D*gamma at rho = {}", r.nu_q, r.rho)));
        }
        if r.deg_q != d {
            return Err(Error::Invariant(format!("deg_Q(F) = {} != {d} at rho = {}", r.deg_q, r.rho)));
        }
    }
    for r in &bs.rhos[rho1..] {
        if let Some(k) = bs.b_n.iter().find(|k| !r.support.contains(k)) {
            return Err(Error::Invariant(format!("{k} in B_n is missing from L_Q(F) at rho = {}", r.rho)));
        }
    }

    let checks_to = rho1 + opts.verify_refinements;
    if checks_to > last {
        return Err(Error::NotStabilized(fam.members.len()));
    }
    let f_red = reduced_limit_kp(f, &fam.members[rho1].q, &bs.b_n, d)?;
    let reduced_checks = compare_truncations(f, &f_red, fam, rho1 + 1..=checks_to, oracle)?;
    if let Some(c) = reduced_checks.iter().find(|c| c.nu_q_f != c.nu_q_reduced) {
        return Err(Error::VerificationFailed(format!(
            "nu_Q(F_reduced) = {} != nu_Q(F) = {} at rho = {}",
            c.nu_q_reduced, c.nu_q_f, c.rho
        )));
    }
    // B_n does not depend on the choice between F and its reduction
    let again = b_set(&f_red, fam, &stats, oracle, opts)?;
    if again.b_n != bs.b_n {
        return Err(Error::Invariant(format!("B_n(F) = {:?} but B_n(F_reduced) = {:?}", bs.b_n, again.b_n)));
    }

    let base = f.q_expansion(&fam.members[0].q)?.as_xpoly();
    let beta_base = (1..d)
        .map(|k| match oracle.nu(&base.hasse(k).eval(&fam.members[0].q)) {
            Ok(v) => Ok(Some(v)),
            Err(Error::ShortcutUnsupported(_) | Error::ShortcutRadius { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    for k in 1..d {
        if let Some(v) = &beta_base[k - 1] {
            if *v != bs.rhos[last].beta[k] {
                return Err(Error::Invariant(format!("beta_{k} differs between the base and rho = {last}")));
            }
        }
    }

    let i_set = bs.b_n.iter().map(|&k| p.log_exact(k as u64).unwrap()).collect();
    Ok(PlateauRecord {
        stage,
        n: fam.degree,
        generator: fam.generator.clone(),
        f: f.to_string(),
        d: p.log_exact(d as u64).unwrap(),
        stats,
        rhos: bs.rhos,
        stabilization_index: rho1,
        b_n: bs.b_n,
        i_set,
        f_reduced: f_red.to_string(),
        reduced_checks,
        beta_base,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectReport {
    pub p: u64,
    pub backend: String,
    pub g: String,
    pub degrees: Vec<usize>,
    pub plateaus: Vec<PlateauRecord>,
    /// `d = d_1 + … + d_r`.
    pub d: u32,
    /// `p^d`.
    pub defect: u64,
}

/// Analyses every stage; stage `i` uses the first member of stage `i+1` as
/// its limit key polynomial and the last stage uses `g`.
pub fn analyze_extension<C: Coeff>(
    g: &Poly<C>,
    stages: &[ApproxFamily<C>],
    oracle: &NuOracle<C>,
    opts: &AnalysisOptions,
) -> Result<DefectReport> {
    if stages.is_empty() {
        return Err(Error::Config("no stages".into()));
    }
    for (i, w) in stages.windows(2).enumerate() {
        if w[1].degree <= w[0].degree {
            return Err(Error::Config(format!("stage degrees must increase (stage {})", i + 2)));
        }
    }
    let mut plateaus = Vec::new();
    for (i, fam) in stages.iter().enumerate() {
        let f = match stages.get(i + 1) {
            Some(next) => next.members[0].q.clone(),
            None => g.clone(),
        };
        plateaus.push(analyze_stage(i + 1, &f, fam, oracle, opts).map_err(|e| e.at_stage(i + 1))?);
    }
    let d: u32 = plateaus.iter().map(|r| r.d).sum();
    let p = g.prime();
    Ok(DefectReport {
        p: p.get(),
        backend: C::BACKEND.to_string(),
        g: g.to_string(),
        degrees: stages.iter().map(|s| s.degree).collect(),
        plateaus,
        d,
        defect: p.get().pow(d),
    })
}
