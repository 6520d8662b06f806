use std::collections::HashMap;

use bpcobar::algebra::{AlgebraConfig, GammaElement, Mono};
use bpcobar::hopf::Hopf;
use bpcobar::plocal::{is_p_local, rat, PLocal};
use bpcobar::solver::{derive_t_chain, TChain};
use bpcobar::tensor::Target;
use num_traits::One;

fn setup() -> (Hopf, TChain) {
    let h = Hopf::new(AlgebraConfig::default()).unwrap();
    let c = derive_t_chain(&h).unwrap();
    (h, c)
}

#[test]
fn t1_particular_and_kernel() {
    let (_, c) = setup();
    let t1 = c.get("T1").unwrap();
    assert_eq!(t1.element.constant.to_string(), "2 v1^2 h1^2 - 6 v1 h1^3 + 9/2 h1^4");
    assert_eq!(t1.solution.homogeneous_basis.len(), 2);
    let k2 = t1.solution.combine(&t1.solution.homogeneous_basis[1]);
    assert_eq!(k2.to_string(), "v1 h1^3 + 3 h2 - 3 h1^4");
}

#[test]
fn t4_family() {
    let (_, c) = setup();
    let t4 = c.get("T4").unwrap();
    assert_eq!(t4.element.constant.to_string(), "-v1 h1^2 + h1^3");
    assert_eq!(t4.element.params["T4.k1"].to_string(), "v1^2 h1 - 3 v1 h1^2 + 3 h1^3");
}

#[test]
fn forced_congruences() {
    let (_, c) = setup();
    let t5 = c.get("T5").unwrap();
    let cg = &t5.solution.congruence_constraints;
    assert!(cg.iter().any(|x| x.label.ends_with("[h2]") && x.residue == rat(-1, 1) && x.modulus == 3.into()));
    assert_eq!(t5.element.constant.to_string(), "-h2 + 3/4 h1^4");
    let t3 = c.get("T3").unwrap();
    assert!(t3
        .solution
        .congruence_constraints
        .iter()
        .any(|x| x.label == "c2[v1 v2 h1]" && x.residue == rat(0, 1) && x.modulus == 3.into()));
    assert_eq!(
        t3.element.constant.to_string(),
        "1/2 v2 h1^2 + 1/2 v1^3 h1^3 - 1/2 v1^2 h2 - 1/2 v1^2 h1^4 + v1 h1 h2 - 3/2 h1^2 h2 + 3/4 h1^6"
    );
    let t2 = c.get("T2").unwrap();
    assert_eq!(
        t2.element.constant.to_string(),
        "-v2 h1 - 2 v1^3 h1^2 + 5 v1^2 h1^3 - v1 h2 - 11/2 v1 h1^4 + 3 h1 h2 + 3/2 h1^5"
    );
}

#[test]
fn congruences_are_necessary() {
    let (_, c) = setup();
    for e in &c.entries {
        let s = &e.solution;
        for cg in &s.congruence_constraints {
            let mut vals = s.parameter_values.clone();
            vals[cg.param] += num_rational::BigRational::one();
            let x = s.rational_point(&vals);
            assert!(x.iter().any(|q| !is_p_local(q, 3)), "{} {}", e.name, cg);
            let x = s.rational_point(&s.parameter_values);
            assert!(x.iter().all(|q| is_p_local(q, 3)));
        }
    }
}

#[test]
fn leading_terms() {
    let (_, c) = setup();
    for (name, got, want, ok) in c.leading_report() {
        assert!(ok, "{name}: {got} vs {want}");
    }
}

#[test]
fn y7_comodule_grid() {
    let (h, c) = setup();
    let names = c.param_names();
    for g in 0..9usize {
        let vals: HashMap<String, PLocal> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), PLocal::from_int(((g + i * (g / 3 + 1)) % 3) as i64)))
            .collect();
        assert!(h.check_coassociativity(&c.y7_even(&vals)).unwrap(), "grid point {g}");
    }
}

#[test]
fn perturbed_t1_breaks_coassociativity() {
    let (h, c) = setup();
    let mut m = c.y7_even(&HashMap::new());
    for (g, t) in m.coaction.get_mut(&Target::X(34)).unwrap() {
        if *t == Target::X(18) {
            *g = g.add(&GammaElement::mono(Mono::h(1, 4), PLocal::one()));
        }
    }
    assert!(!h.check_coassociativity(&m).unwrap());
}
