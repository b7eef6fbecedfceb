use num_complex::Complex64;
use proptest::prelude::*;

use clifford_malliavin::antisym::{contract_hat_dense, AntiTensor};
use clifford_malliavin::chaos::CliffordElement;
use clifford_malliavin::grid::TimeGrid;
use clifford_malliavin::io;
use clifford_malliavin::ito::{check_adapted, clark_ocone};
use clifford_malliavin::malliavin::{derivative, divergence, inv_number, number_operator};
use clifford_malliavin::oracle::MatrixOracle;
use clifford_malliavin::par::Execution;
use clifford_malliavin::random::{random_element, random_process, random_tensor, rng_for};

const TOL: f64 = 1e-10;

fn setup() -> impl Strategy<Value = (u64, usize, f64)> {
    (any::<u64>(), 1usize..=6, prop_oneof![Just(1.0), Just(0.5), 0.1f64..3.0])
}

fn elements(seed: u64, d: usize, width: f64, max_degree: usize) -> (TimeGrid, [CliffordElement; 3]) {
    let grid = TimeGrid::new(d, width).unwrap();
    let mut rng = rng_for(seed, 0);
    let e = [(); 3].map(|_| random_element(&mut rng, grid, max_degree));
    (grid, e)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn product_is_associative((seed, d, w) in setup()) {
        let (_, [f, g, h]) = elements(seed, d, w, 3);
        let left = f.multiply(&g).unwrap().multiply(&h).unwrap();
        let right = f.multiply(&g.multiply(&h).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right).unwrap() < TOL);
    }

    #[test]
    fn adjoint_reverses_products((seed, d, w) in setup()) {
        let (_, [f, g, _]) = elements(seed, d, w, 3);
        let lhs = f.multiply(&g).unwrap().adjoint();
        let rhs = g.adjoint().multiply(&f.adjoint()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < TOL);
        prop_assert_eq!(f.adjoint().adjoint(), f);
    }

    #[test]
    fn grading_is_an_automorphism((seed, d, w) in setup()) {
        let (_, [f, g, _]) = elements(seed, d, w, 4);
        let lhs = f.multiply(&g).unwrap().beta();
        let rhs = f.beta().multiply(&g.beta()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < TOL);
    }

    #[test]
    fn state_is_tracial_and_faithful((seed, d, w) in setup()) {
        let (_, [f, g, _]) = elements(seed, d, w, 4);
        let fg = f.multiply(&g).unwrap().state();
        let gf = g.multiply(&f).unwrap().state();
        prop_assert!((fg - gf).norm() < TOL);
        let ff = f.adjoint().multiply(&f).unwrap().state();
        prop_assert!((ff.re - f.norm_sqr()).abs() < TOL && ff.im.abs() < TOL);
    }

    #[test]
    fn execution_policies_agree((seed, d, w) in setup()) {
        let (_, [f, g, _]) = elements(seed, d, w, 6);
        let seq = f.multiply_with(&g, Execution::Sequential).unwrap();
        let par = f.multiply_with(&g, Execution::Parallel).unwrap();
        prop_assert_eq!(seq, par);
    }

    #[test]
    fn fast_contraction_matches_dense((seed, d) in (any::<u64>(), 1usize..=5), p in 0usize..=3, q in 0usize..=3) {
        let grid = TimeGrid::unit(d).unwrap();
        let mut rng = rng_for(seed, 1);
        let f = random_tensor(&mut rng, grid, p.min(d));
        let g = random_tensor(&mut rng, grid, q.min(d));
        for r in 0..=f.degree().min(g.degree()) {
            let fast = f.contract_hat(&g, r).unwrap();
            let dense = contract_hat_dense(&f, &g, r).unwrap();
            prop_assert!(fast.max_abs_diff(&dense).unwrap() < TOL);
        }
    }

    #[test]
    fn derivative_and_divergence_are_adjoint((seed, d, w) in setup()) {
        let grid = TimeGrid::new(d, w).unwrap();
        let mut rng = rng_for(seed, 2);
        let f = random_element(&mut rng, grid, 4);
        let u = random_process(&mut rng, grid, 4);
        let lhs = derivative(&f).inner(&u).unwrap();
        let rhs = f.l2_inner(&divergence(&u)).unwrap();
        prop_assert!((lhs - rhs).norm() < TOL);
    }

    #[test]
    fn number_operator_counts_degree((seed, d, w) in setup()) {
        let (_, [f, _, _]) = elements(seed, d, w, d);
        let rf = number_operator(&f);
        let dd = divergence(&derivative(&f));
        prop_assert!(rf.max_abs_diff(&dd).unwrap() < TOL);
        for (n, level) in f.levels().iter().enumerate() {
            let want = level.scale(Complex64::new(n as f64, 0.0));
            prop_assert!(rf.level(n).max_abs_diff(&want).unwrap() < TOL);
        }
        let centred = f.try_sub(&CliffordElement::scalar(f.grid(), f.state())).unwrap();
        let back = number_operator(&inv_number(&centred).unwrap());
        prop_assert!(back.max_abs_diff(&centred).unwrap() < TOL);
    }

    #[test]
    fn clark_ocone_reconstructs((seed, d, w) in setup()) {
        let (_, [f, _, _]) = elements(seed, d, w, 4);
        let co = clark_ocone(&f);
        prop_assert!(check_adapted(co.integrand.process()));
        prop_assert!(f.distance(&co.reconstruct()).unwrap() < TOL);
    }

    #[test]
    fn oracle_is_a_homomorphism((seed, d) in (any::<u64>(), 1usize..=5)) {
        let (grid, [f, g, _]) = elements(seed, d, 1.0, 3);
        let oracle = MatrixOracle::new(grid).unwrap();
        let lhs = oracle.to_matrix(&f.multiply(&g).unwrap()).unwrap();
        let rhs = oracle.to_matrix(&f).unwrap().multiply(&oracle.to_matrix(&g).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-9);
        let state = oracle.to_matrix(&f).unwrap().vacuum_expectation();
        prop_assert!((state - f.state()).norm() < TOL);
    }

    #[test]
    fn wedge_is_graded_commutative((seed, d) in (any::<u64>(), 1usize..=6), p in 0usize..=3, q in 0usize..=3) {
        let grid = TimeGrid::unit(d).unwrap();
        let mut rng = rng_for(seed, 3);
        let f = random_tensor(&mut rng, grid, p.min(d));
        let g = random_tensor(&mut rng, grid, q.min(d));
        let sign = if f.degree() * g.degree() % 2 == 0 { 1.0 } else { -1.0 };
        let fg = f.wedge(&g).unwrap();
        let gf = g.wedge(&f).unwrap().scale(Complex64::new(sign, 0.0));
        prop_assert!(fg.max_abs_diff(&gf).unwrap() < TOL);
    }

    #[test]
    fn json_round_trip((seed, d, w) in setup()) {
        let (_, [f, _, _]) = elements(seed, d, w, d);
        let text = serde_json::to_string(&io::ElementJson::from(&f)).unwrap();
        let back = io::element_from_json(&text).unwrap();
        prop_assert_eq!(back, f);
    }
}

#[test]
fn basis_wedges_alternate() {
    let grid = TimeGrid::unit(3).unwrap();
    let e12 = AntiTensor::basis(grid, &[1, 2]).unwrap();
    let e21 = AntiTensor::basis(grid, &[2, 1]).unwrap();
    assert!(e12.add(&e21).unwrap().is_zero());
    assert!(AntiTensor::basis(grid, &[2, 2]).is_err() || AntiTensor::basis(grid, &[2, 2]).unwrap().is_zero());
}
