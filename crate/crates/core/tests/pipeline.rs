use valdef::classify::Verdict;
use valdef::config::ExpandSection;
use valdef::error::Error;
use valdef::fixtures;
use valdef::plateau::{compare_truncations, reduced_limit_kp, DefectReport};
use valdef::run::{analyze_config, build_stages, classify_config, expand_config, prepare};
use valdef::series::parse::parse_poly;
use valdef::{FpElem, Poly, Rat, Val};

fn pow_frac(base: u64, e: u32) -> Rat {
    Rat::new(1, base.pow(e)).unwrap()
}

/// J grows along the family and every member of B_n is a power of p.
fn check_invariants(report: &DefectReport) {
    let p = report.p;
    for pl in &report.plateaus {
        for w in pl.rhos.windows(2) {
            assert!(w[0].j.iter().all(|k| w[1].j.contains(k)), "J not monotone at rho = {}", w[1].rho);
        }
        for &k in &pl.b_n {
            let mut m = k as u64;
            while m.is_multiple_of(p) {
                m /= p;
            }
            assert_eq!(m, 1, "{k} is not a power of {p}");
        }
    }
}

#[test]
fn independent_artin_schreier() {
    for (text, p) in [(fixtures::AS_INDEPENDENT_P2, 2u64), (fixtures::AS_INDEPENDENT_P3, 3), (fixtures::AS_INDEPENDENT_P5, 5)] {
        let cfg = fixtures::load(text).unwrap();
        let (res, report) = classify_config(&cfg).unwrap();
        assert_eq!(res.verdict, Verdict::Independent);
        assert!(res.routes_agree);
        assert_eq!(res.i1, vec![0]);
        assert_eq!(res.gamma.bound, Val::zero());
        assert!(!res.gamma.attained);
        for (n, g) in res.gammas.iter().enumerate() {
            assert_eq!(*g, Val::Fin(-pow_frac(p, n as u32 + 1)), "p = {p}, N = {n}");
        }
        assert!(res.figure.p2_on_pi);
        check_invariants(&report);
    }
}

#[test]
fn dependent_artin_schreier() {
    let cfg = fixtures::load(fixtures::AS_DEPENDENT).unwrap();
    let (res, report) = classify_config(&cfg).unwrap();
    assert_eq!(res.verdict, Verdict::Dependent);
    assert!(res.i1.is_empty());
    assert_eq!(report.plateaus[0].stats.b, Val::frac(-1, 1));
    assert_eq!(report.plateaus[0].stats.bbar, Val::frac(-2, 1));
    for (n, g) in res.gammas.iter().enumerate() {
        assert_eq!(*g, Val::Fin(&Rat::int(-1) - &pow_frac(2, n as u32 + 1)));
    }
    assert!(!res.figure.p2_on_pi);
    assert_eq!(res.figure.polygon.points[0], (0, Val::frac(-9, 4)));
    check_invariants(&report);
}

#[test]
fn kummer() {
    let cfg = fixtures::load(fixtures::KUMMER_P2).unwrap();
    let (res, report) = classify_config(&cfg).unwrap();
    assert_eq!(res.verdict, Verdict::Independent);
    assert_eq!(res.alpha, Some(Val::frac(1, 1)));
    assert_eq!(res.gamma.bound, Val::frac(1, 1));
    assert!(res.gammas.iter().all(|g| *g < Val::frac(1, 1)));
    for (n, g) in res.gammas.iter().enumerate() {
        assert_eq!(*g, Val::Fin(&Rat::one() - &pow_frac(2, n as u32 + 1)));
    }
    check_invariants(&report);
}

#[test]
fn delta_is_p_gamma() {
    for text in [fixtures::AS_INDEPENDENT_P3, fixtures::AS_DEPENDENT, fixtures::KUMMER_P2] {
        let (res, _) = classify_config(&fixtures::load(text).unwrap()).unwrap();
        let p = res.figure.pi.defect_degree as i64;
        assert_eq!(res.delta.bound, res.gamma.bound.scale(p).unwrap());
    }
}

#[test]
fn single_stage_tower() {
    let report = analyze_config(&fixtures::load(fixtures::TOWER).unwrap()).unwrap();
    assert_eq!(report.d, 2);
    assert_eq!(report.defect, 4);
    assert_eq!(report.plateaus[0].stats.defect_degree, 4);
    for r in &report.plateaus[0].rhos[report.plateaus[0].rhos.len() - 3..] {
        assert_eq!(r.deg_q, 4);
    }
    check_invariants(&report);
}

#[test]
fn staged_tower_reports_stage_one() {
    match analyze_config(&fixtures::load(fixtures::TOWER_STAGED).unwrap()) {
        Err(Error::Stage { stage, .. }) => assert_eq!(stage, 1),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn expand_worked_example() {
    let mut cfg = fixtures::load(fixtures::AS_INDEPENDENT_P2).unwrap();
    cfg.expand = Some(ExpandSection { f: "x^2 + x + t^(-1)".into(), q: "x + t^(-1/2)".into() });
    let rep = expand_config(&cfg).unwrap();
    assert_eq!(rep.nu_q, Val::frac(-1, 2));
    assert_eq!(rep.argmin, vec![0, 2]);
    assert_eq!(rep.deg_q, 2);
    assert_eq!(rep.nu_of_q, Val::frac(-1, 4));

    cfg.expand = Some(ExpandSection { f: "x".into(), q: "x".into() });
    let rep = expand_config(&cfg).unwrap();
    assert_eq!(rep.coeffs, vec!["0".to_string(), "1".to_string()]);
    assert_eq!(rep.nu_q, Val::frac(-1, 2));
}

#[test]
fn dependent_reduced_key_polynomial_is_x2_plus_b_plus_a() {
    let cfg = fixtures::load(fixtures::AS_DEPENDENT).unwrap();
    let prep = prepare::<FpElem>(&cfg).unwrap();
    let fam = &build_stages(&cfg, &prep).unwrap()[0];
    let bs = fam.bs.as_ref().unwrap();
    let a = prep.a.clone().unwrap();
    for rho in 2..6 {
        let f = reduced_limit_kp(&prep.g, &fam.members[rho].q, &[], 2).unwrap();
        let x2: Poly<FpElem> = parse_poly("x^2", prep.p).unwrap();
        let want = &(&x2 + &Poly::constant(bs[rho].clone().into())) + &Poly::constant(a.clone());
        assert!((&f - &want).consistent_with_zero(32).unwrap(), "rho = {rho}");
        let checks = compare_truncations(&prep.g, &f, fam, rho + 1..=rho + 3, &prep.oracle).unwrap();
        assert!(checks.iter().all(|c| c.nu_q_f == c.nu_q_reduced));
    }
}

#[test]
fn bad_inputs_are_input_errors() {
    let bad_prime = fixtures::AS_INDEPENDENT_P2.replace("prime = 2", "prime = 4");
    let e = fixtures::load(&bad_prime).and_then(|c| classify_config(&c).map(|_| ())).unwrap_err();
    assert!(e.is_input_error(), "{e}");
    assert!(e.to_string().contains("not prime"));

    let mut cfg = fixtures::load(fixtures::AS_INDEPENDENT_P2).unwrap();
    cfg.stages.clear();
    assert!(analyze_config(&cfg).unwrap_err().is_input_error());

    cfg.expand = Some(ExpandSection { f: "x^^2".into(), q: "x".into() });
    assert!(expand_config(&cfg).unwrap_err().is_input_error());
}
