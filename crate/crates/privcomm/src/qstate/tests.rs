use super::*;
use crate::random::{ginibre, haar_unitary, random_channel, random_density, random_pure, rng_from_seed};
use crate::tol;
use proptest::prelude::*;
use rand::Rng as _;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Matrix square root of a Hermitian PSD matrix, for test oracles only.
fn psd_sqrt(m: &CMat) -> CMat {
    let eig = hermitian_eigen(m).unwrap();
    let n = m.nrows();
    let mut out = CMat::zeros(n, n);
    for j in 0..n {
        let lam = eig.values[j].max(0.0).sqrt();
        let col = eig.vectors.column(j);
        out += col * col.adjoint() * c(lam, 0.0);
    }
    out
}

/// Independent Uhlmann fidelity oracle: tr sqrt(sqrt(r1) r2 sqrt(r1)).
fn fidelity_oracle(r1: &DensityMatrix, r2: &DensityMatrix) -> f64 {
    let s = psd_sqrt(r1.matrix());
    let inner = &s * r2.matrix() * &s;
    let eig = hermitian_eigen(&inner).unwrap();
    eig.values.iter().map(|&v| v.max(0.0).sqrt()).sum()
}

#[test]
fn basis_states_are_orthonormal() {
    let a = PureState::basis(vec![2, 3], &[1, 2]).unwrap();
    let b = PureState::basis(vec![2, 3], &[0, 2]).unwrap();
    assert_eq!(a.overlap(&a).unwrap(), c(1.0, 0.0));
    assert_eq!(a.overlap(&b).unwrap(), c(0.0, 0.0));
    assert_eq!(a.amplitudes()[1 * 3 + 2], c(1.0, 0.0));
}

#[test]
fn pure_state_rejects_unnormalized() {
    let v = CVec::from_vec(vec![c(1.0, 0.0), c(0.5, 0.0)]);
    assert!(PureState::new(vec![2], v).is_err());
}

#[test]
fn density_rejects_non_psd() {
    let mut m = CMat::identity(2, 2);
    m[(0, 0)] = c(1.5, 0.0);
    m[(1, 1)] = c(-0.5, 0.0);
    assert!(DensityMatrix::new(vec![2], m).is_err());
}

#[test]
fn pure_distance_matches_frozen_value() {
    // Overlap 0.99 gives distance 2*sqrt(1 - 0.99^2).
    let p1 = PureState::basis(vec![2], &[0]).unwrap();
    let amps = CVec::from_vec(vec![c(0.99, 0.0), c((1.0f64 - 0.99 * 0.99).sqrt(), 0.0)]);
    let p2 = PureState::new(vec![2], amps).unwrap();
    let d = pure_state_distance(&p1, &p2).unwrap();
    assert!((d - 0.2821347195933177).abs() < 1e-12, "d = {d}");
}

#[test]
fn pure_distance_agrees_with_trace_norm_route() {
    let mut rng = rng_from_seed(11);
    for _ in 0..100 {
        let p1 = random_pure(&mut rng, vec![6]);
        let p2 = random_pure(&mut rng, vec![6]);
        let via_overlap = pure_state_distance(&p1, &p2).unwrap();
        let via_eigen = trace_norm_distance(&p1.to_density(), &p2.to_density()).unwrap();
        assert!((via_overlap - via_eigen).abs() < tol::PROPERTY, "{via_overlap} vs {via_eigen}");
    }
}

#[test]
fn trace_norm_distance_is_unitarily_invariant() {
    let mut rng = rng_from_seed(12);
    for _ in 0..50 {
        let r1 = random_density(&mut rng, vec![5]);
        let r2 = random_density(&mut rng, vec![5]);
        let u = haar_unitary(&mut rng, 5);
        let rot = |r: &DensityMatrix| {
            DensityMatrix::new(vec![5], u.matrix() * r.matrix() * u.matrix().adjoint()).unwrap()
        };
        let d = trace_norm_distance(&r1, &r2).unwrap();
        let d_rot = trace_norm_distance(&rot(&r1), &rot(&r2)).unwrap();
        assert!((d - d_rot).abs() < tol::PROPERTY);
        assert!((0.0..=2.0 + tol::PROPERTY).contains(&d));
    }
}

#[test]
fn trace_norm_satisfies_triangle_inequality() {
    let mut rng = rng_from_seed(13);
    for _ in 0..50 {
        let a = random_density(&mut rng, vec![4]);
        let b = random_density(&mut rng, vec![4]);
        let m = random_density(&mut rng, vec![4]);
        let ab = trace_norm_distance(&a, &b).unwrap();
        let am = trace_norm_distance(&a, &m).unwrap();
        let mb = trace_norm_distance(&m, &b).unwrap();
        assert!(ab <= am + mb + tol::PROPERTY);
    }
}

#[test]
fn helstrom_achieves_trace_distance_and_beats_random_povms() {
    let mut rng = rng_from_seed(14);
    for _ in 0..30 {
        let r1 = random_density(&mut rng, vec![4]);
        let r2 = random_density(&mut rng, vec![4]);
        let d = trace_norm_distance(&r1, &r2).unwrap();
        let h = helstrom_measurement(&r1, &r2).unwrap();
        assert!((h.outcome_l1 - d).abs() < tol::PROPERTY, "helstrom {} vs {}", h.outcome_l1, d);
        // Projectors resolve the identity.
        let sum = &h.projector_pos + &h.projector_neg;
        assert!((sum - CMat::identity(4, 4)).norm() < tol::PROPERTY);
        // No two-outcome POVM separates better.
        for _ in 0..20 {
            let u = haar_unitary(&mut rng, 4);
            let mut e1 = CMat::zeros(4, 4);
            for j in 0..4 {
                let w: f64 = rng.gen();
                let col = u.matrix().column(j);
                e1 += col * col.adjoint() * c(w, 0.0);
            }
            let diff = r1.matrix() - r2.matrix();
            let l1 = 2.0 * (&e1 * &diff).trace().re.abs();
            assert!(l1 <= h.outcome_l1 + tol::PROPERTY);
        }
    }
}

#[test]
fn helstrom_on_orthogonal_states_is_perfect() {
    let r1 = PureState::basis(vec![2], &[0]).unwrap().to_density();
    let r2 = PureState::basis(vec![2], &[1]).unwrap().to_density();
    let h = helstrom_measurement(&r1, &r2).unwrap();
    assert!((h.outcome_l1 - 2.0).abs() < 1e-12);
}

#[test]
fn partial_trace_recovers_tensor_factors() {
    let mut rng = rng_from_seed(15);
    for _ in 0..30 {
        let a = random_density(&mut rng, vec![2]);
        let b = random_density(&mut rng, vec![3]);
        let ab = a.tensor(&b);
        let ta = ab.partial_trace(&[0]).unwrap();
        let tb = ab.partial_trace(&[1]).unwrap();
        assert!((ta.matrix() - a.matrix()).norm() < tol::PROPERTY);
        assert!((tb.matrix() - b.matrix()).norm() < tol::PROPERTY);
    }
}

#[test]
fn partial_trace_of_bell_pair_is_maximally_mixed() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amps = CVec::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
    let bell = PureState::new(vec![2, 2], amps).unwrap().to_density();
    let half = bell.partial_trace(&[0]).unwrap();
    let mixed = DensityMatrix::maximally_mixed(vec![2]);
    assert!((half.matrix() - mixed.matrix()).norm() < 1e-12);
}

#[test]
fn partial_trace_keep_order_permutes_subsystems() {
    let mut rng = rng_from_seed(16);
    let a = random_density(&mut rng, vec![2]);
    let b = random_density(&mut rng, vec![3]);
    let ab = a.tensor(&b);
    let swapped = ab.partial_trace(&[1, 0]).unwrap();
    let direct = b.tensor(&a);
    assert_eq!(swapped.dims(), &[3, 2]);
    assert!((swapped.matrix() - direct.matrix()).norm() < tol::PROPERTY);
}

#[test]
fn channel_apply_matches_dilation_route() {
    let mut rng = rng_from_seed(17);
    for &(dim, nk) in &[(2usize, 1usize), (2, 2), (3, 2), (4, 3), (2, 4)] {
        for _ in 0..10 {
            let ch = random_channel(&mut rng, dim, nk).unwrap();
            let rho = random_density(&mut rng, vec![dim]);
            let direct = ch.apply(&rho).unwrap();
            let dilated = ch.apply_via_dilation(&rho).unwrap();
            assert!(
                (direct.matrix() - dilated.matrix()).norm() < tol::PROPERTY,
                "dim {dim} nk {nk}"
            );
        }
    }
}

#[test]
fn channel_rejects_non_trace_preserving() {
    let k = CMat::identity(2, 2) * c(0.9, 0.0);
    assert!(Channel::new(vec![k]).is_err());
}

#[test]
fn purification_traces_back_to_input() {
    let mut rng = rng_from_seed(18);
    for dim in [2usize, 3, 5] {
        for _ in 0..20 {
            let rho = random_density(&mut rng, vec![dim]);
            let psi = purify(&rho).unwrap();
            assert_eq!(psi.dims(), &[dim, dim]);
            let back = psi.to_density().partial_trace(&[0]).unwrap();
            assert!((back.matrix() - rho.matrix()).norm() < tol::PROPERTY);
        }
    }
}

#[test]
fn purification_of_pure_state_has_blank_ancilla() {
    let mut rng = rng_from_seed(19);
    let phi = random_pure(&mut rng, vec![3]);
    let psi = purify(&phi.to_density()).unwrap();
    let expected = phi.tensor(&PureState::basis(vec![3], &[0]).unwrap());
    let ov = psi.overlap(&expected).unwrap().norm();
    assert!((ov - 1.0).abs() < 1e-7, "overlap {ov}");
}

#[test]
fn uhlmann_fidelity_matches_independent_oracle() {
    let mut rng = rng_from_seed(20);
    for _ in 0..40 {
        let r1 = random_density(&mut rng, vec![3]);
        let r2 = random_density(&mut rng, vec![3]);
        let p1 = purify(&r1).unwrap();
        let p2 = purify(&r2).unwrap();
        let al = uhlmann_align(&p1, &p2, 1).unwrap();
        let f_oracle = fidelity_oracle(&r1, &r2);
        assert!((al.fidelity - f_oracle).abs() < tol::PROPERTY, "{} vs {}", al.fidelity, f_oracle);
        // Realized overlap equals the fidelity.
        let ov = p1.overlap(&al.aligned_phi2).unwrap();
        assert!((ov.norm() - al.fidelity).abs() < tol::PROPERTY);
        // Reduced state of the aligned purification is unchanged.
        let red = al.aligned_phi2.to_density().partial_trace(&[0]).unwrap();
        assert!((red.matrix() - r2.matrix()).norm() < tol::PROPERTY);
        assert!((al.aligned_distance - 2.0 * (1.0 - al.fidelity * al.fidelity).sqrt()).abs() < tol::PROPERTY);
    }
}

#[test]
fn aligned_purification_distance_bounded_by_root_trace_distance() {
    let mut rng = rng_from_seed(21);
    for _ in 0..60 {
        let r1 = random_density(&mut rng, vec![4]);
        let r2 = random_density(&mut rng, vec![4]);
        let p1 = purify(&r1).unwrap();
        let p2 = purify(&r2).unwrap();
        let al = uhlmann_align(&p1, &p2, 1).unwrap();
        let d = trace_norm_distance(&r1, &r2).unwrap();
        assert!(al.aligned_distance <= 2.0 * d.sqrt() + tol::PROPERTY, "{} vs {}", al.aligned_distance, d);
        // Alignment can only help: unaligned overlap is no larger.
        let raw = p1.overlap(&p2).unwrap().norm();
        assert!(raw <= al.fidelity + tol::PROPERTY);
    }
}

#[test]
fn measure_standard_obeys_born_rule() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amps = CVec::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
    let bell = PureState::new(vec![2, 2], amps).unwrap();
    let outcomes = measure_standard(&bell, &[0]).unwrap();
    assert_eq!(outcomes.len(), 2);
    for o in &outcomes {
        assert!((o.probability - 0.5).abs() < 1e-12);
        // Collapsed state is the matching basis state on both subsystems.
        let expect = PureState::basis(vec![2, 2], &[o.outcome[0], o.outcome[0]]).unwrap();
        assert!((o.state.overlap(&expect).unwrap().norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn measure_standard_probabilities_sum_to_one() {
    let mut rng = rng_from_seed(22);
    for _ in 0..20 {
        let psi = random_pure(&mut rng, vec![2, 3, 2]);
        for subs in [vec![0], vec![1], vec![2, 0], vec![0, 1, 2]] {
            let outcomes = measure_standard(&psi, &subs).unwrap();
            let total: f64 = outcomes.iter().map(|o| o.probability).sum();
            assert!((total - 1.0).abs() < 1e-9);
            for o in &outcomes {
                assert!((o.state.amplitudes().norm() - 1.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn apply_unitary_on_subsystems_matches_kronecker() {
    let mut rng = rng_from_seed(23);
    for _ in 0..20 {
        let psi = random_pure(&mut rng, vec![2, 3, 2]);
        let u = haar_unitary(&mut rng, 3);
        let applied = psi.apply_unitary(&u, &[1]).unwrap();
        let full = CMat::identity(2, 2).kronecker(u.matrix()).kronecker(&CMat::identity(2, 2));
        let expected = &full * psi.amplitudes();
        assert!((applied.amplitudes() - expected).norm() < tol::PROPERTY);
    }
}

#[test]
fn apply_unitary_respects_subsystem_listing_order() {
    // CNOT with control listed second acts as if the factors were swapped.
    let mut cnot = CMat::zeros(4, 4);
    cnot[(0, 0)] = c(1.0, 0.0);
    cnot[(1, 1)] = c(1.0, 0.0);
    cnot[(2, 3)] = c(1.0, 0.0);
    cnot[(3, 2)] = c(1.0, 0.0);
    let u = Unitary::new(cnot).unwrap();
    let s10 = PureState::basis(vec![2, 2], &[1, 0]).unwrap();
    let straight = s10.apply_unitary(&u, &[0, 1]).unwrap();
    assert!((straight.overlap(&PureState::basis(vec![2, 2], &[1, 1]).unwrap()).unwrap().norm() - 1.0).abs() < 1e-12);
    let s01 = PureState::basis(vec![2, 2], &[0, 1]).unwrap();
    let reversed = s01.apply_unitary(&u, &[1, 0]).unwrap();
    assert!((reversed.overlap(&PureState::basis(vec![2, 2], &[1, 1]).unwrap()).unwrap().norm() - 1.0).abs() < 1e-12);
}

#[test]
fn unitary_with_first_column_is_unitary_and_correct() {
    let mut rng = rng_from_seed(24);
    for _ in 0..20 {
        let v = random_pure(&mut rng, vec![5]);
        let u = Unitary::with_first_column(v.amplitudes()).unwrap();
        let col0 = u.matrix().column(0).into_owned();
        assert!((col0 - v.amplitudes()).norm() < tol::PROPERTY);
    }
}

#[test]
fn permutation_unitary_maps_basis_states() {
    let u = Unitary::permutation(&[2, 0, 1]).unwrap();
    let e0 = PureState::basis(vec![3], &[0]).unwrap();
    let mapped = e0.apply_unitary(&u, &[0]).unwrap();
    let e2 = PureState::basis(vec![3], &[2]).unwrap();
    assert!((mapped.overlap(&e2).unwrap().norm() - 1.0).abs() < 1e-12);
}

#[test]
fn ginibre_has_expected_shape() {
    let mut rng = rng_from_seed(25);
    let g = ginibre(&mut rng, 3, 5);
    assert_eq!((g.nrows(), g.ncols()), (3, 5));
}

proptest! {
    #[test]
    fn flatten_unflatten_roundtrip(flat in 0usize..360) {
        let dims = [3usize, 4, 5, 6];
        let mut multi = [0usize; 4];
        unflatten(flat, &dims, &mut multi);
        prop_assert_eq!(flatten(&multi, &dims), flat);
    }

    #[test]
    fn mixture_stays_valid(w in 0.01f64..0.99) {
        let mut rng = rng_from_seed(26);
        let a = random_density(&mut rng, vec![3]);
        let b = random_density(&mut rng, vec![3]);
        let m = DensityMatrix::mixture(&[(w, &a), (1.0 - w, &b)]).unwrap();
        prop_assert!((m.matrix().trace().re - 1.0).abs() < 1e-9);
        let d_am = trace_norm_distance(&a, &m).unwrap();
        let d_ab = trace_norm_distance(&a, &b).unwrap();
        prop_assert!(d_am <= (1.0 - w) * d_ab + 1e-8);
    }
}
