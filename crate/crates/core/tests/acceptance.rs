//! Acceptance suite: one line per criterion, exact values only.

use std::panic::{catch_unwind, AssertUnwindSafe};

use twogroups_core::automorphisms::{
    aut_group_order, brute_force_aut, fusion_classes, is_at_group, known_aut_generators, verify_central_automorphisms,
};
use twogroups_core::catalog::{discover_entry, entry_path, load_entry, DEFAULT_BUDGET, SPORADIC};
use twogroups_core::constructions::{
    build_a2, build_b2, build_p_epsilon, check_p_epsilon_presentation, A2Params, PepsParams,
};
use twogroups_core::verify::{
    run_all, run_catalog, run_sanity, run_scenario, run_small_eliminations, run_sl2_omega, run_sp_lambda,
    run_theorem_dual, ClaimStatus, Config, Options, Report, Scenario, Verdict,
};
use twogroups_core::FiniteGroup;

fn passed(r: &Report) {
    let bad: Vec<_> = r.claims.iter().filter(|c| matches!(c.status, ClaimStatus::Fail | ClaimStatus::Unknown)).collect();
    assert_eq!(r.verdict, Verdict::Pass, "{}: {bad:?}", r.scenario);
}

fn computed<'a>(r: &'a Report, id: &str) -> &'a str {
    &r.claim(id).unwrap_or_else(|| panic!("{}: no claim {id}", r.scenario)).computed
}

fn classes(g: &FiniteGroup) -> Vec<usize> {
    fusion_classes(g, &known_aut_generators(g).unwrap()).sorted_sizes()
}

fn aut_order(g: &FiniteGroup) -> u128 {
    aut_group_order(g, &known_aut_generators(g).unwrap())
}

fn c1_a2_3_1() {
    let g = build_a2(A2Params::new(3, 1)).unwrap();
    assert_eq!(g.order(), 64);
    assert!(g.is_special_2group());
    assert_eq!(g.exponent(), 4);
    assert_eq!(g.involution_count(), 7);
    assert_eq!(classes(&g), [1, 7, 56]);
    let generated = aut_order(&g);
    assert_eq!(generated, 512 * 21);
    let brute = brute_force_aut(&g).unwrap();
    assert_eq!(aut_group_order(&g, &brute), generated);
}

fn c2_b2() {
    let b1 = build_b2(1, None).unwrap();
    // Q₈ is the only non-abelian group of order 8 with a single involution.
    assert_eq!(b1.order(), 8);
    assert!(!b1.is_abelian());
    assert_eq!(b1.involution_count(), 1);
    let q8 = twogroups_core::constructions::build_generalized_quaternion(8).unwrap();
    let iso = b1.find_isomorphism(&q8).expect("B2(1) is isomorphic to Q8");
    for x in b1.elements() {
        for y in b1.elements() {
            assert_eq!(iso[b1.mul(x, y) as usize], q8.mul(iso[x as usize], iso[y as usize]));
        }
    }
    let g = build_b2(2, None).unwrap();
    assert_eq!(g.order(), 64);
    assert_eq!(g.center().order(), 4);
    assert_eq!(classes(&g), [1, 3, 60]);
    assert_eq!(aut_order(&g), 256 * 60);
    let slow = run_scenario(&Scenario::SuzukiSuite, &Options { slow: true, ..Options::default() }).unwrap();
    passed(&slow);
    assert_eq!(computed(&slow, "b2_2-brute-force"), "15360");
}

fn c3_p_epsilon() {
    let params = PepsParams::standard();
    assert_eq!(params.field.poly(), 0x5B);
    let g = build_p_epsilon(params).unwrap();
    assert_eq!(g.order(), 512);
    let z = g.center();
    let inv: Vec<_> = g.elements().filter(|&x| g.element_order(x) == 2).collect();
    assert_eq!(inv.len(), 7);
    assert!(inv.iter().all(|&x| z.contains(x)));
    assert_eq!(classes(&g), [1, 7, 504]);
    let pres = check_p_epsilon_presentation(params).unwrap();
    for rel in &pres.relations {
        assert!(rel.holds, "{} expected {} computed {}", rel.relation, rel.expected, rel.computed);
    }
    assert_eq!(pres.relations.len(), 45);
    assert_eq!(aut_order(&g), (1 << 18) * 63);
}

fn c4_dual_n3() {
    let r = run_theorem_dual(3, &Options::default()).unwrap();
    passed(&r);
    assert_eq!(computed(&r, "lambda2-is-dual"), "isomorphic");
    assert_eq!(computed(&r, "v-not-self-dual"), "not isomorphic");
    assert_eq!(computed(&r, "v-transitive"), "{7}");
    assert_eq!(computed(&r, "m-transitive"), "{7}");
}

fn c5_dual_n6() {
    let r = run_theorem_dual(6, &Options::default()).unwrap();
    passed(&r);
    assert_eq!(computed(&r, "decomposition-dims"), "6+9=15");
    assert_eq!(computed(&r, "a-transitive"), "{63}");
    assert_eq!(computed(&r, "even-branch"), "isomorphic");
}

fn c6_omega() {
    let r = run_sl2_omega(2, &Options::default()).unwrap();
    passed(&r);
    assert_eq!(computed(&r, "b-dim"), "4");
    assert_eq!(computed(&r, "orbit-sizes"), "{5,10}");
}

fn c7_eliminations() {
    let opts = Options::default();
    for t in &SPORADIC {
        let r = run_small_eliminations(t.name, &opts).unwrap();
        passed(&r);
        assert!(r.claim("no-transitive-quotient-of-dim-n").is_some());
    }
    for t in SPORADIC.iter().filter(|t| t.n == 4) {
        let shipped = load_entry(&entry_path(&opts.data_dir, t)).unwrap();
        assert_eq!(discover_entry(t, t.seed, DEFAULT_BUDGET).unwrap(), shipped);
    }
}

fn c8_central_automorphisms() {
    for g in [
        build_a2(A2Params::new(3, 1)).unwrap(),
        build_a2(A2Params::new(5, 1)).unwrap(),
        build_b2(2, None).unwrap(),
        build_p_epsilon(PepsParams::standard()).unwrap(),
    ] {
        let r = verify_central_automorphisms(&g).unwrap();
        assert!(r.all_central_maps_certified, "{}", g.name());
        let z = g.center().order() as u128;
        assert_eq!(r.kernel_order, z.pow(r.dim_v as u32), "{}", g.name());
        assert_eq!(r.fusion_classes, r.orbits_v + r.orbits_m - 1, "{}", g.name());
        assert_eq!(r.fusion_classes, classes(&g).len());
        assert!(r.commutator_map_equivariant && r.commutator_map_rank == r.dim_m, "{}", g.name());
        assert!(r.passed(), "{r:?}");
    }
}

fn c9_catalog() {
    let r = run_catalog().unwrap();
    passed(&r);
    for n in 2..=10u32 {
        let want = format!("order {} transitive true solvable true", n as u128 * ((1u128 << n) - 1));
        assert_eq!(computed(&r, &format!("gamma_l1_{n}")), want);
    }
    // 168 = 7·6·4, 60 = 5!/2, 720 = 6!, 979200 = 4⁴·(4²−1)·(4⁴−1).
    let orders: Vec<&str> = r.claims.iter().filter(|c| c.id.starts_with("order-")).map(|c| c.computed.as_str()).collect();
    assert_eq!(orders, ["168", "60", "720", "979200"]);
}

fn c10_sp_lambda() {
    for f in [1, 2] {
        let r = run_sp_lambda(f, &Options::default()).unwrap();
        passed(&r);
        assert_eq!(computed(&r, "t0-dim"), "1");
        assert_eq!(computed(&r, "top-irreducible"), "true");
        assert_eq!(computed(&r, "t-gf2-dim"), (5 * f).to_string());
    }
}

fn c11_sanity() {
    let r = run_sanity().unwrap();
    passed(&r);
    let z4 = twogroups_core::constructions::build_homocyclic(2, 4).unwrap();
    let auts = brute_force_aut(&z4).unwrap();
    assert!(is_at_group(&z4, &auts));
    assert_eq!(computed(&r, "q16-involutions"), "1");
}

fn c12_determinism() {
    let cfg = Config { jobs: 4, ..Config::default() };
    let a = run_all(&cfg).unwrap();
    let b = run_all(&Config { jobs: 1, ..Config::default() }).unwrap();
    assert_eq!(a.len(), Scenario::defaults().len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.to_json(), y.to_json());
    }
    let single = run_scenario(&Scenario::SuzukiSuite, &Options::default()).unwrap();
    assert_eq!(single.to_json(), a.iter().find(|r| r.scenario == "suzuki-suite").unwrap().to_json());
    assert!(a.iter().all(|r| r.elapsed_ms.is_none()));
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn()); 12] = [
        ("A2(3,1) structure, fusion and Aut order with brute-force cross-check", c1_a2_3_1),
        ("B2(1) = Q8 and B2(2) structure, fusion and Aut order", c2_b2),
        ("P(eps) structure, presentation and Aut order", c3_p_epsilon),
        ("dual module instance n = 3", c4_dual_n3),
        ("dual module instance n = 6", c5_dual_n6),
        ("Omega4- orbit sizes", c6_omega),
        ("small eliminations", c7_eliminations),
        ("central automorphism suite", c8_central_automorphisms),
        ("catalog orders", c9_catalog),
        ("symplectic exterior square", c10_sp_lambda),
        ("homocyclic and quaternion sanity", c11_sanity),
        ("determinism", c12_determinism),
    ];
    let mut failures = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let ok = catch_unwind(AssertUnwindSafe(check)).is_ok();
        println!("criterion {:>2}: {} {name}", i + 1, if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures.push(i + 1);
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
