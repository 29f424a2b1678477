mod common;

use common::lambda_max_problem;
use matcube::linalg::{random_hermitian, HermitianMatrix, RandomStream};
use matcube::sdp::{
    decode_hermitian, feasibility, solve, Feasibility, SdpProblem, SdpProblemJson, Settings, Status, SymBlockMatrix,
};
use matcube::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn simplex_pair(rhs: f64) -> SdpProblem {
    // x₁ + x₂ = rhs over two 1×1 blocks.
    let mut a = SymBlockMatrix::new();
    a.add(0, 0, 0, 1.0);
    a.add(1, 0, 0, 1.0);
    SdpProblem::new(vec![1, 1], SymBlockMatrix::new(), vec![a], vec![rhs]).unwrap()
}

#[test]
fn repeated_constraint_is_rank_deficient() {
    let mut a = SymBlockMatrix::new();
    a.add(0, 0, 0, 1.0);
    let r = SdpProblem::new(vec![2], SymBlockMatrix::new(), vec![a.clone(), a.scaled(2.0)], vec![1.0, 2.0]);
    assert!(matches!(r, Err(Error::RankDeficient { .. })));
}

#[test]
fn shape_errors() {
    let mut a = SymBlockMatrix::new();
    a.add(3, 0, 0, 1.0);
    assert!(SdpProblem::new(vec![2], SymBlockMatrix::new(), vec![a], vec![1.0]).is_err());
    let mut a = SymBlockMatrix::new();
    a.add(0, 0, 0, 1.0);
    assert!(SdpProblem::new(vec![2], SymBlockMatrix::new(), vec![a], vec![]).is_err());
}

#[test]
fn linear_program_blocks() {
    match feasibility(&simplex_pair(1.0), &Settings::default(), 1e-8).unwrap() {
        Feasibility::Feasible { witness, residual } => {
            assert!(residual <= 1e-8);
            assert!(witness.iter().all(|w| w[(0, 0)] >= 0.0));
        }
        other => panic!("{other:?}"),
    }
    assert!(feasibility(&simplex_pair(-0.5), &Settings::default(), 1e-8).unwrap().is_infeasible());
}

#[test]
fn json_round_trip() {
    let p = lambda_max_problem(&HermitianMatrix::diag(&[1.0, 2.0]));
    let text = serde_json::to_string(&p.to_json()).unwrap();
    let q = SdpProblem::from_json(&serde_json::from_str::<SdpProblemJson>(&text).unwrap()).unwrap();
    assert_eq!(q.num_constraints(), p.num_constraints());
    let a = solve(&p, &Settings::default());
    let b = solve(&q, &Settings::default());
    assert!((a.primal_objective - b.primal_objective).abs() < 1e-12);
}

#[test]
fn decode_embedding() {
    let mut r = RandomStream::new(1, 0);
    let h = random_hermitian(3, &mut r);
    let e: DMatrix<f64> = h.real_embedding();
    assert!(decode_hermitian(&e).max_abs_diff(&h) < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lambda_max_matches_eigensolver(seed in any::<u64>(), d in 1usize..5) {
        let h = random_hermitian(d, &mut RandomStream::new(seed, 0));
        let s = solve(&lambda_max_problem(&h), &Settings::default());
        prop_assert_eq!(s.status, Status::Optimal);
        let want = h.lambda_max().unwrap();
        prop_assert!((s.primal_objective - want).abs() <= 1e-6 * (1.0 + want.abs()));
        prop_assert!((s.dual_objective - want).abs() <= 1e-6 * (1.0 + want.abs()));
    }

    #[test]
    fn trace_identity_at_every_iterate(seed in any::<u64>(), d in 1usize..4) {
        let h = random_hermitian(d, &mut RandomStream::new(seed, 1));
        let s = solve(&lambda_max_problem(&h), &Settings::default());
        for r in &s.trace {
            let gap = r.primal_objective - r.dual_objective;
            let parts = r.complementarity + r.dual_residual_dot - r.primal_residual_dot;
            let scale = 1.0 + r.primal_objective.abs() + r.dual_objective.abs() + r.complementarity;
            prop_assert!((gap - parts).abs() <= 1e-9 * scale);
            prop_assert!(r.complementarity >= 0.0);
        }
        // once feasible, weak duality proper
        prop_assert!(s.primal_objective >= s.dual_objective - 1e-7);
    }

    #[test]
    fn row_rescaling_keeps_the_optimum(seed in any::<u64>()) {
        let mut r = RandomStream::new(seed, 2);
        let h = random_hermitian(2, &mut r);
        let p = lambda_max_problem(&h);
        let c: Vec<f64> = (0..p.num_constraints()).map(|_| 0.5 + r.uniform()).collect();
        let q = p.rescale_rows(&c).unwrap();
        let a = solve(&p, &Settings::default());
        let b = solve(&q, &Settings::default());
        prop_assert!((a.primal_objective - b.primal_objective).abs() <= 1e-6);
    }
}
