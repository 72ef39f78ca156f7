use proptest::prelude::*;

use subdiag::algebra::{expectation, random_d_unitary, random_element, BlockPartition, Flavor, SubAlg};
use subdiag::beurling::{beurling_extract, random_invariant_subspace, Subspace};
use subdiag::factor::{canonicalize, inner_outer, inner_outer_via_projection, is_outer, pair_distance};
use subdiag::fkdet::fk_det;
use subdiag::matcore::CMatrix;
use subdiag::report::Report;
use subdiag::rng;
use subdiag::suites::{run_suite, SuiteConfig};

fn block_alg() -> impl Strategy<Value = SubAlg> {
    (1usize..=5)
        .prop_flat_map(|n| (Just(n), 0..(1usize << (n - 1))))
        .prop_map(|(n, k)| SubAlg::block_upper(BlockPartition::all(n).swap_remove(k)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expectation_is_multiplicative_on_a(alg in block_alg(), seed in any::<u64>()) {
        let a = random_element(&alg, Flavor::General, seed, 1e3).unwrap();
        let b = random_element(&alg, Flavor::General, seed ^ 1, 1e3).unwrap();
        let lhs = expectation(&(&a * &b), &alg).unwrap();
        let rhs = &expectation(&a, &alg).unwrap() * &expectation(&b, &alg).unwrap();
        prop_assert!(lhs.dist(&rhs) <= 1e-12 * (1.0 + a.frob_norm() * b.frob_norm()));
    }

    #[test]
    fn determinant_is_multiplicative(n in 1usize..=6, seed in any::<u64>()) {
        let mut r = rng::stream(seed, 0);
        let a = rng::gaussian_matrix(n, &mut r);
        let b = rng::gaussian_matrix(n, &mut r);
        let (da, db, dab) = (fk_det(&a), fk_det(&b), fk_det(&(&a * &b)));
        prop_assert!((dab - da * db).abs() <= 1e-9 * dab.max(1e-300));
    }

    #[test]
    fn inner_outer_is_unique_up_to_d_unitaries(alg in block_alg(), seed in any::<u64>()) {
        let f = rng::gaussian_matrix(alg.n(), &mut rng::stream(seed, 1));
        let v = random_d_unitary(&alg, seed).unwrap();
        // f = (u v*)(v h) is another inner-outer pair; canonical forms agree
        let io = inner_outer(&f, &alg).unwrap();
        let moved = subdiag::factor::InnerOuter {
            inner_u: &io.inner_u * &v.adjoint(),
            outer_h: &v * &io.outer_h,
        };
        let a = canonicalize(&io, &alg).unwrap();
        let b = canonicalize(&moved, &alg).unwrap();
        prop_assert!(pair_distance(&a, &b) <= 1e-9);
        let c = inner_outer_via_projection(&f, &alg).unwrap();
        prop_assert!(pair_distance(&a, &c) <= 1e-8);
        prop_assert!(is_outer(&a.outer_h, &alg).unwrap().outer);
    }

    #[test]
    fn beurling_reconstructs_the_subspace(alg in block_alg(), seed in any::<u64>(), gens in 1usize..4) {
        let k = random_invariant_subspace(&alg, seed, gens).unwrap();
        let d = beurling_extract(&k, &alg).unwrap();
        let mut acc = Subspace::zero(alg.n());
        for u in &d.isometries {
            let gen: Vec<CMatrix> = alg.a_basis().iter().map(|a| u * a).collect();
            acc = acc.join(&Subspace::span(alg.n(), &gen).unwrap());
        }
        prop_assert!(acc.distance(&k) <= 1e-8);
        prop_assert!(d.type2_part.is_zero());
    }
}

#[test]
fn suite_reports_are_deterministic_across_runs() {
    let alg = SubAlg::block_upper(BlockPartition::parse("1,2").unwrap());
    let mut cfg = SuiteConfig::new(alg, 99, 4);
    cfg.szego.restarts = 3;
    let run = || {
        let suites =
            ["jensen", "inner-outer", "szego-l2", "beurling"].iter().map(|s| run_suite(s, &cfg).unwrap()).collect();
        serde_json::to_string(&Report::new(99, serde_json::Value::Null, suites).without_timings()).unwrap()
    };
    assert_eq!(run(), run());
}
