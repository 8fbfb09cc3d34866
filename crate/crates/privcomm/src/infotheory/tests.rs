use super::*;
use crate::qstate::{trace_norm_distance, C64, CMat, DensityMatrix, PureState};
use crate::random::{random_density, random_probs, rng_from_seed};
use proptest::prelude::*;

fn dist(pairs: &[(usize, f64)]) -> ProbDist {
    ProbDist::from_pairs(pairs.iter().map(|&(l, w)| (vec![l], w))).unwrap()
}

fn diag_density(weights: &[f64]) -> DensityMatrix {
    let n = weights.len();
    let mut m = CMat::zeros(n, n);
    for (i, &w) in weights.iter().enumerate() {
        m[(i, i)] = C64::new(w, 0.0);
    }
    DensityMatrix::new(vec![n], m).unwrap()
}

#[test]
fn shannon_matches_frozen_values() {
    assert_eq!(shannon_entropy(&dist(&[(0, 1.0)])), 0.0);
    let u4 = ProbDist::uniform((0..4).map(|i| vec![i])).unwrap();
    assert!((shannon_entropy(&u4) - 2.0).abs() < 1e-12);
    let skew = dist(&[(0, 0.75), (1, 0.25)]);
    assert!((shannon_entropy(&skew) - 0.8112781244591329).abs() < 1e-12);
    assert!((binary_entropy(0.25) - 0.8112781244591329).abs() < 1e-12);
}

#[test]
fn von_neumann_matches_frozen_values() {
    let pure = PureState::basis(vec![4], &[2]).unwrap().to_density();
    assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-9);
    let mixed = DensityMatrix::maximally_mixed(vec![2]);
    assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-12);
    let skew = diag_density(&[0.75, 0.25]);
    assert!((von_neumann_entropy(&skew).unwrap() - 0.8112781244591329).abs() < 1e-9);
}

#[test]
fn l1_distance_matches_frozen_values() {
    let p = dist(&[(0, 1.0)]);
    let q = dist(&[(0, 0.75), (1, 0.25)]);
    assert_eq!(l1_distance(&p, &p), 0.0);
    assert!((l1_distance(&p, &q) - 0.5).abs() < 1e-12);
    let r = dist(&[(5, 1.0)]);
    assert!((l1_distance(&p, &r) - 2.0).abs() < 1e-12);
}

#[test]
fn probdist_validates() {
    assert!(ProbDist::from_pairs([(vec![0], 0.5), (vec![1], 0.6)]).is_err());
    assert!(ProbDist::from_pairs([(vec![0], 1.5), (vec![1], -0.5)]).is_err());
    let d = ProbDist::uniform_grid(&[2, 3]).unwrap();
    assert_eq!(d.support_len(), 6);
    let m = d.marginal(&[1]).unwrap();
    assert!((m.prob(&[2]) - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn classical_cq_entropy_is_shannon() {
    let d = ProbDist::uniform_grid(&[2, 2]).unwrap();
    let s = CqState::classical(&["x", "y"], &d).unwrap();
    assert!((s.entropy(&["x", "y"]).unwrap() - 2.0).abs() < 1e-12);
    assert!((s.entropy(&["x"]).unwrap() - 1.0).abs() < 1e-12);
    assert!(s.entropy(&[]).unwrap().abs() < 1e-12);
    assert!(s.entropy(&["z"]).is_err());
    assert!(s.entropy(&["x", "x"]).is_err());
}

#[test]
fn cq_entropy_is_additive_on_products() {
    // Same quantum block for every classical value: S(x,Q) = H(x) + S(block).
    let block = diag_density(&[0.75, 0.25]);
    let s = CqState::with_quantum(
        &["x"],
        "Q",
        (0..4).map(|x| (vec![x], 0.25, block.clone())),
    )
    .unwrap();
    let joint = s.entropy(&["x", "Q"]).unwrap();
    assert!((joint - (2.0 + 0.8112781244591329)).abs() < 1e-9);
    assert!((s.entropy(&["Q"]).unwrap() - 0.8112781244591329).abs() < 1e-9);
}

#[test]
fn cq_entropy_of_orthogonal_encoding_quantum_register() {
    let s = CqState::with_quantum(
        &["x"],
        "Q",
        (0..2).map(|x| (vec![x], 0.5, PureState::basis(vec![2], &[x]).unwrap().to_density())),
    )
    .unwrap();
    // Average block is I/2.
    assert!((s.entropy(&["Q"]).unwrap() - 1.0).abs() < 1e-9);
    // Blocks are pure, so S(x,Q) = H(x).
    assert!((s.entropy(&["x", "Q"]).unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn cmi_on_independent_registers_is_zero() {
    let d = ProbDist::uniform_grid(&[2, 3]).unwrap();
    let s = CqState::classical(&["x", "y"], &d).unwrap();
    let i = s.mutual_information(&["x"], &["y"]).unwrap();
    assert!(i.abs() < 1e-12);
}

#[test]
fn cmi_of_copy_is_entropy() {
    let d = ProbDist::from_pairs([(vec![0, 0], 0.75), (vec![1, 1], 0.25)]).unwrap();
    let s = CqState::classical(&["a", "b"], &d).unwrap();
    let i = s.mutual_information(&["a"], &["b"]).unwrap();
    assert!((i - 0.8112781244591329).abs() < 1e-9);
}

#[test]
fn cmi_of_perfect_encoding_equals_conditional_entropy() {
    // Q holds x exactly; x,y uniform and independent: I(Q:x|y) = H(x|y) = 1.
    let mut blocks = Vec::new();
    for x in 0..2usize {
        for y in 0..2usize {
            blocks.push((vec![x, y], 0.25, PureState::basis(vec![2], &[x]).unwrap().to_density()));
        }
    }
    let s = CqState::with_quantum(&["x", "y"], "Q", blocks).unwrap();
    let i = s.conditional_mutual_information(&["Q"], &["x"], &["y"]).unwrap();
    assert!((i - 1.0).abs() < 1e-9, "I = {i}");
    assert!(s.conditional_mutual_information(&["Q"], &["x"], &["x"]).is_err());
}

#[test]
fn continuity_bound_matches_frozen_values() {
    assert_eq!(continuity_bound(0.0, 5.0).unwrap(), 0.0);
    assert!((continuity_bound(0.5, 3.0).unwrap() - 2.0).abs() < 1e-12);
    assert!((continuity_bound(0.25, 4.0).unwrap() - 1.5).abs() < 1e-12);
    assert!(continuity_bound(0.6, 3.0).is_err());
    assert!(continuity_bound(-0.1, 3.0).is_err());
}

#[test]
fn max_entropy_bound_matches_frozen_values() {
    assert!((max_entropy_bound(1.0, 7.0).unwrap() - 7.0).abs() < 1e-12);
    assert!((max_entropy_bound(0.5, 2.0).unwrap() - 1.5).abs() < 1e-12);
    assert!((max_entropy_bound(0.25, 8.0).unwrap() - 2.5).abs() < 1e-12);
    assert!(max_entropy_bound(0.0, 3.0).is_err());
    assert!(max_entropy_bound(1.1, 3.0).is_err());
}

#[test]
fn average_encoding_on_orthogonal_uniform_blocks() {
    let s = CqState::with_quantum(
        &["x"],
        "Q",
        (0..2).map(|x| (vec![x], 0.5, PureState::basis(vec![2], &[x]).unwrap().to_density())),
    )
    .unwrap();
    let (lhs, rhs) = average_encoding_check(&s).unwrap();
    assert!((lhs - 1.0).abs() < 1e-9, "lhs = {lhs}");
    assert!((rhs - (2.0 * std::f64::consts::LN_2).sqrt()).abs() < 1e-9, "rhs = {rhs}");
    assert!(lhs <= rhs + 1e-7);
}

#[test]
fn entropy_continuity_holds_for_random_distribution_pairs() {
    let mut rng = rng_from_seed(31);
    let n_bits = 3.0;
    for _ in 0..200 {
        let p = random_probs(&mut rng, 8);
        let q = random_probs(&mut rng, 8);
        let d_raw: f64 = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum();
        // Pull q toward p so the l1 distance is in range.
        let t = if d_raw > 0.5 { 0.5 / d_raw } else { 1.0 };
        let q: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a + t * (b - a)).collect();
        let d: f64 = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum();
        let lhs = (shannon_from_weights(p) - shannon_from_weights(q)).abs();
        let bound = continuity_bound(d.min(0.5), n_bits).unwrap();
        assert!(lhs <= bound + 1e-7, "lhs {lhs} bound {bound} d {d}");
    }
}

#[test]
fn entropy_continuity_holds_for_random_density_pairs() {
    let mut rng = rng_from_seed(32);
    let n_bits = 2.0;
    let cap = 1.0 / std::f64::consts::E;
    for _ in 0..100 {
        let a = random_density(&mut rng, vec![4]);
        let b = random_density(&mut rng, vec![4]);
        let d_raw = trace_norm_distance(&a, &b).unwrap();
        let t = if d_raw > cap { cap / d_raw * 0.999 } else { 1.0 };
        let b = DensityMatrix::mixture(&[(1.0 - t, &a), (t, &b)]).unwrap();
        let d = trace_norm_distance(&a, &b).unwrap();
        let lhs = (von_neumann_entropy(&a).unwrap() - von_neumann_entropy(&b).unwrap()).abs();
        let bound = continuity_bound(d.min(0.5), n_bits).unwrap();
        assert!(lhs <= bound + 1e-7, "lhs {lhs} bound {bound} d {d}");
    }
}

#[test]
fn max_entropy_bound_holds_for_subnormalized_weights() {
    let mut rng = rng_from_seed(33);
    for _ in 0..200 {
        let gamma: f64 = rand::Rng::gen_range(&mut rng, 0.05..1.0);
        let p: Vec<f64> = random_probs(&mut rng, 16).into_iter().map(|w| w * gamma).collect();
        let lhs = shannon_from_weights(p);
        let bound = max_entropy_bound(gamma, 4.0).unwrap();
        assert!(lhs <= bound + 1e-7, "lhs {lhs} bound {bound} gamma {gamma}");
    }
}

#[test]
fn average_encoding_inequality_holds_on_random_ensembles() {
    let mut rng = rng_from_seed(34);
    for _ in 0..100 {
        let probs = random_probs(&mut rng, 4);
        let blocks = probs
            .iter()
            .enumerate()
            .map(|(x, &w)| (vec![x], w, random_density(&mut rng, vec![3])));
        let s = CqState::with_quantum(&["x"], "Q", blocks).unwrap();
        let (lhs, rhs) = average_encoding_check(&s).unwrap();
        assert!(lhs <= rhs + 1e-7, "lhs {lhs} rhs {rhs}");
    }
}

#[test]
fn entropy_is_subadditive_on_random_bipartite_states() {
    let mut rng = rng_from_seed(35);
    for _ in 0..100 {
        let joint = random_density(&mut rng, vec![3, 4]);
        let a = joint.partial_trace(&[0]).unwrap();
        let b = joint.partial_trace(&[1]).unwrap();
        let s_ab = von_neumann_entropy(&joint).unwrap();
        let s_a = von_neumann_entropy(&a).unwrap();
        let s_b = von_neumann_entropy(&b).unwrap();
        assert!(s_ab <= s_a + s_b + 1e-7);
        // Araki-Lieb in the other direction.
        assert!(s_ab >= (s_a - s_b).abs() - 1e-7);
    }
}

#[test]
fn cmi_with_classical_conditioning_is_nonnegative() {
    let mut rng = rng_from_seed(36);
    for _ in 0..60 {
        let probs = random_probs(&mut rng, 6);
        let mut blocks = Vec::new();
        let mut i = 0;
        for x in 0..3usize {
            for y in 0..2usize {
                blocks.push((vec![x, y], probs[i], random_density(&mut rng, vec![3])));
                i += 1;
            }
        }
        let s = CqState::with_quantum(&["x", "y"], "Q", blocks).unwrap();
        let cmi = s.conditional_mutual_information(&["Q"], &["x"], &["y"]).unwrap();
        assert!(cmi >= 0.0, "cmi = {cmi}");
        let cmi_rev = s.conditional_mutual_information(&["x"], &["Q"], &["y"]).unwrap();
        assert!((cmi - cmi_rev).abs() < 1e-8);
    }
}

proptest! {
    #[test]
    fn holevo_is_nonnegative_and_bounded_by_label_entropy(seed in 0u64..500) {
        let mut rng = rng_from_seed(seed);
        let probs = random_probs(&mut rng, 3);
        let blocks: Vec<DensityMatrix> = (0..3).map(|_| random_density(&mut rng, vec![2])).collect();
        let parts: Vec<(f64, &DensityMatrix)> = probs.iter().copied().zip(blocks.iter()).collect();
        let chi = holevo_information(&parts).unwrap();
        prop_assert!(chi >= -1e-9);
        prop_assert!(chi <= shannon_from_weights(probs) + 1e-9);
    }
}
