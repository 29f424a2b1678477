mod common;

use common::{herm, random_physical_assemblage, random_unbiased, sharp};
use matcube::constructions::{optimal_assemblage, pauli_inequality};
use matcube::linalg::{pauli, random_hermitian, HermitianMatrix, RandomStream};
use matcube::steering::{
    assemblage_to_povms, assemblage_value, decompose, has_lhs, jointly_measurable, povms_to_assemblage, vl_value,
    vq_seesaw, vq_value, violation, Assemblage, PovmCollection, SteeringInequality,
};
use proptest::prelude::*;

#[test]
fn zero_inequality() {
    let f = SteeringInequality::zero(3, 2);
    assert_eq!(vl_value(&f).unwrap(), 0.0);
    assert_eq!(vq_value(&f).unwrap(), 0.0);
    assert_eq!(violation(&f).unwrap(), 1.0);
}

#[test]
fn json_keys() {
    let f = pauli_inequality(2).unwrap();
    let v = serde_json::to_value(f.to_json()).unwrap();
    assert!(v.get("Fplus").is_some() && v.get("Fminus").is_some());
    let back = SteeringInequality::from_json(&serde_json::from_value(v).unwrap()).unwrap();
    assert_eq!(back.fplus, f.fplus);
}

#[test]
fn invalid_assemblages_are_rejected() {
    let [x, _, _] = pauli();
    let neg = herm(x.scale_real(0.5));
    assert!(Assemblage::new(vec![neg.clone()], vec![neg]).is_err());
    let half = HermitianMatrix::identity(2).scale(0.25);
    let other = HermitianMatrix::diag(&[0.5, 0.0]);
    assert!(Assemblage::new(vec![half.clone(), other.clone()], vec![half, other]).is_err());
}

#[test]
fn optimal_assemblages_reach_g() {
    for g in [2, 3] {
        let f = pauli_inequality(g).unwrap();
        let a = optimal_assemblage(g).unwrap();
        assert!((assemblage_value(&f, &a).unwrap() - g as f64).abs() < 1e-9);
        let d = a.d as f64;
        assert!(a.average_state().max_abs_diff(&HermitianMatrix::identity(a.d).scale(1.0 / d)) < 1e-12);
        assert!(has_lhs(&a).unwrap().is_no());
    }
}

#[test]
fn rank_deficient_average_state() {
    // σ̄ = |0⟩⟨0|: everything lives on a one-dimensional support.
    let p = HermitianMatrix::diag(&[0.3, 0.0]);
    let m = HermitianMatrix::diag(&[0.7, 0.0]);
    let a = Assemblage::new(vec![p.clone(), m.clone()], vec![m, p]).unwrap();
    let img = assemblage_to_povms(&a).unwrap();
    assert_eq!(img.povms.n, 1);
    assert!(has_lhs(&a).unwrap().is_yes());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // V_L(F) = max_ε λ_max(Σ F_{ε_x|x})/... agrees with an explicit scan over signs,
    // and V_Q(F) = 0 exactly when F = 0 (positive for random F).
    #[test]
    fn classical_value_by_enumeration(seed in any::<u64>(), g in 1usize..4, d in 1usize..4) {
        let mut r = RandomStream::new(seed, 0);
        let fp: Vec<_> = (0..g).map(|_| random_hermitian(d, &mut r)).collect();
        let fm: Vec<_> = (0..g).map(|_| random_hermitian(d, &mut r)).collect();
        let f = SteeringInequality::new(fp.clone(), fm.clone()).unwrap();
        let mut best = f64::NEG_INFINITY;
        for mask in 0..1u32 << g {
            let mut s = HermitianMatrix::zeros(d);
            for x in 0..g {
                s = &s + if mask >> x & 1 == 0 { &fp[x] } else { &fm[x] };
            }
            best = best.max(s.lambda_max().unwrap());
        }
        prop_assert!((vl_value(&f).unwrap() - best).abs() <= 1e-10 * (1.0 + best.abs()));
    }

    #[test]
    fn decomposition_reassembles(seed in any::<u64>(), g in 1usize..4, d in 1usize..4) {
        let mut r = RandomStream::new(seed, 1);
        let f = SteeringInequality::new(
            (0..g).map(|_| random_hermitian(d, &mut r)).collect(),
            (0..g).map(|_| random_hermitian(d, &mut r)).collect(),
        ).unwrap();
        let ab = decompose(&f);
        for x in 0..g {
            prop_assert!((&ab.aplus[x] + &ab.aminus[x]).max_abs_diff(&f.fplus[x]) <= 1e-12);
            prop_assert!((&ab.aplus[x] - &ab.aminus[x]).max_abs_diff(&f.fminus[x]) <= 1e-12);
        }
    }

    // Quantum value dominates every assemblage value, and the seesaw sits
    // between the classical and quantum values.
    #[test]
    fn value_ordering(seed in any::<u64>(), g in 1usize..4, d in 1usize..3) {
        let mut r = RandomStream::new(seed, 2);
        let f = random_unbiased(g, d, &mut r);
        let vl = vl_value(&f).unwrap();
        let vq = vq_value(&f).unwrap();
        let ss = vq_seesaw(&f, 2, 4, &r.split(7)).unwrap();
        prop_assert!(vl <= ss + 1e-9);
        prop_assert!(ss <= vq + 1e-5);
        prop_assert!(vq / vl <= (g as f64).sqrt() + 1e-5);
    }

    #[test]
    fn biased_value_dominates_classical(seed in any::<u64>()) {
        let mut r = RandomStream::new(seed, 3);
        let f = SteeringInequality::new(
            (0..2).map(|_| random_hermitian(2, &mut r)).collect(),
            (0..2).map(|_| random_hermitian(2, &mut r)).collect(),
        ).unwrap();
        let vl = vl_value(&f).unwrap();
        let vq = vq_value(&f).unwrap();
        let ss = vq_seesaw(&f, 2, 4, &r.split(1)).unwrap();
        prop_assert!(vl <= vq + 1e-9);
        prop_assert!(ss <= vq + 1e-4 * (1.0 + vq.abs()), "seesaw {} vs vq {}", ss, vq);
    }

    // V_Q is positively homogeneous.
    #[test]
    fn homogeneity(seed in any::<u64>(), c in 0.1f64..5.0) {
        let mut r = RandomStream::new(seed, 4);
        let f = random_unbiased(2, 2, &mut r);
        let a = vq_value(&f).unwrap();
        let b = vq_value(&f.scaled(c)).unwrap();
        prop_assert!((b - c * a).abs() <= 1e-5 * (1.0 + c * a));
    }

    #[test]
    fn isomorphism_round_trip(seed in any::<u64>()) {
        let mut r = RandomStream::new(seed, 5);
        let a = random_physical_assemblage(2, &mut r);
        let img = assemblage_to_povms(&a).unwrap();
        let back = img.lift(&povms_to_assemblage(&img.povms, &img.sigma_bar).unwrap()).unwrap();
        for x in 0..2 {
            prop_assert!(back.sigma_plus[x].max_abs_diff(&a.sigma_plus[x]) <= 1e-9);
        }
        let again = assemblage_to_povms(&povms_to_assemblage(&img.povms, &img.sigma_bar).unwrap()).unwrap();
        for x in 0..2 {
            prop_assert!(again.povms.eplus[x].max_abs_diff(&img.povms.eplus[x]) <= 1e-9);
        }
    }

    // Exchanging the two POVMs does not change compatibility.
    #[test]
    fn jm_is_swap_invariant(seed in any::<u64>()) {
        let mut r = RandomStream::new(seed, 6);
        let a = random_physical_assemblage(2, &mut r);
        let p = assemblage_to_povms(&a).unwrap().povms;
        let q = PovmCollection::new(
            vec![p.eplus[1].clone(), p.eplus[0].clone()],
            vec![p.eminus[1].clone(), p.eminus[0].clone()],
        ).unwrap();
        prop_assert_eq!(jointly_measurable(&p).unwrap().label(), jointly_measurable(&q).unwrap().label());
    }
}

#[test]
fn noisy_pair_becomes_compatible() {
    let [x, _, z] = pauli();
    let p = PovmCollection::from_plus(vec![sharp(&x), sharp(&z)]).unwrap();
    assert!(jointly_measurable(&p.with_noise(&[0.7, 0.7]).unwrap()).unwrap().is_yes());
    assert!(jointly_measurable(&p.with_noise(&[0.72, 0.72]).unwrap()).unwrap().is_no());
}
