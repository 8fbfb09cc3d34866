use super::*;
use crate::model::{
    OutputRule, ProtocolViews, QAction, QStep, RegisterDecl, UnitaryGen, Visibility,
};
use crate::qstate::Unitary;
use proptest::prelude::*;
use std::sync::Arc;

fn xor_matrix() -> CommMatrix {
    CommMatrix::from_fn(2, 2, |x, y| x ^ y)
}

fn and_matrix() -> CommMatrix {
    CommMatrix::from_fn(2, 2, |x, y| x & y)
}

fn idmin_matrix(n: usize) -> CommMatrix {
    CommMatrix::from_fn(1 << n, 1 << n, |x, y| if x <= y { 2 * x + 1 } else { 2 * y })
}

#[test]
fn closure_splits_xor_rows_into_singletons() {
    let p = equivalence_closure(&xor_matrix(), Axis::Rows);
    assert_eq!(p.classes, vec![vec![0], vec![1]]);
}

#[test]
fn closure_merges_and_rows_through_shared_zero() {
    let p = equivalence_closure(&and_matrix(), Axis::Rows);
    assert_eq!(p.classes, vec![vec![0, 1]]);
}

#[test]
fn closure_on_smallest_identified_minimum_rows() {
    let m = idmin_matrix(1);
    assert_eq!(m.get(0, 0), 1);
    assert_eq!(m.get(1, 0), 0);
    assert_eq!(m.get(1, 1), 3);
    let p = equivalence_closure(&m, Axis::Rows);
    assert_eq!(p.classes, vec![vec![0], vec![1]]);
}

#[test]
fn closure_is_transitive_across_chained_matches() {
    // Row 0 matches row 1 in column 0, row 1 matches row 2 in column 1;
    // rows 0 and 2 share nothing directly but join through row 1.
    let m = CommMatrix::new(3, 2, vec![0, 1, 0, 2, 3, 2]).unwrap();
    let p = equivalence_closure(&m, Axis::Rows);
    assert_eq!(p.classes, vec![vec![0, 1, 2]]);
}

#[test]
fn partition_covers_all_indices_disjointly() {
    let m = idmin_matrix(2);
    for axis in [Axis::Rows, Axis::Cols] {
        let p = equivalence_closure(&m, axis);
        let mut seen: Vec<usize> = p.classes.iter().flatten().copied().collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..4).collect::<Vec<_>>());
    }
}

#[test]
fn and_matrix_is_its_own_forbidden_witness() {
    let w = find_forbidden_submatrix(&and_matrix()).unwrap();
    assert_eq!(w.rows, vec![0, 1]);
    assert_eq!(w.cols, vec![0, 1]);
    assert!(witness_is_forbidden(&and_matrix(), &w));
}

#[test]
fn xor_and_identified_minimum_have_no_forbidden_submatrix() {
    assert!(find_forbidden_submatrix(&xor_matrix()).is_none());
    for n in 1..=3 {
        assert!(find_forbidden_submatrix(&idmin_matrix(n)).is_none(), "n = {n}");
    }
}

#[test]
fn search_recurses_into_an_embedded_bad_block() {
    // The top-left 2x2 block is an AND pattern; the 5s keep the outer
    // rectangle decomposable so the witness must come from recursion.
    let m = CommMatrix::new(
        4,
        4,
        vec![0, 0, 5, 5, 0, 1, 5, 5, 5, 5, 2, 2, 5, 5, 2, 2],
    )
    .unwrap();
    let w = find_forbidden_submatrix(&m).unwrap();
    assert_eq!(w.rows, vec![0, 1]);
    assert_eq!(w.cols, vec![0, 1]);
    assert!(witness_is_forbidden(&m, &w));
}

#[test]
fn privacy_decision_matches_examples() {
    assert!(!is_private(&and_matrix()));
    assert!(is_private(&xor_matrix()));
    for n in 1..=3 {
        assert!(is_private(&idmin_matrix(n)), "n = {n}");
    }
}

#[test]
fn synthesis_of_monochromatic_matrix_is_zero_rounds() {
    let m = CommMatrix::from_fn(3, 4, |_, _| 7);
    let p = synthesize_private_protocol(&m).unwrap();
    assert_eq!(p.max_depth(), 0);
    assert_eq!(p.eval(2, 3).unwrap().output, Output::Value(7));
}

#[test]
fn synthesis_of_xor_is_two_announcements() {
    let m = xor_matrix();
    let p = synthesize_private_protocol(&m).unwrap();
    assert_eq!(p.max_depth(), 2);
    for x in 0..2 {
        for y in 0..2 {
            assert_eq!(p.eval(x, y).unwrap().output, Output::Value(x ^ y));
        }
    }
    let mu = ProbDist::uniform_grid(&[2, 2]).unwrap();
    assert!(privacy::max_privacy_loss(&p, &mu, &m).unwrap() < 1e-10);
}

#[test]
fn synthesis_depth_on_identified_minimum_is_exhaustive_search() {
    let m = idmin_matrix(2);
    let p = synthesize_private_protocol(&m).unwrap();
    assert_eq!(p.max_depth(), 6);
    for x in 0..4 {
        for y in 0..4 {
            assert_eq!(p.eval(x, y).unwrap().output, Output::Value(m.get(x, y)));
        }
    }
    let mu = ProbDist::uniform_grid(&[4, 4]).unwrap();
    assert!(privacy::max_privacy_loss(&p, &mu, &m).unwrap() < 1e-10);
}

#[test]
fn synthesis_fails_on_and_with_the_witness() {
    match synthesize_private_protocol(&and_matrix()) {
        Err(SynthesisError::NotPrivate(w)) => {
            assert!(witness_is_forbidden(&and_matrix(), &w));
        }
        other => panic!("expected a forbidden witness, got {other:?}"),
    }
}

#[test]
fn corners_check_flags_and_and_or_but_not_xor() {
    let and = corners_check(&and_matrix()).unwrap().unwrap();
    assert_eq!(and, CornersViolation { rows: [0, 1], cols: [0, 1] });
    let or = CommMatrix::new(2, 2, vec![0, 1, 1, 1]).unwrap();
    assert!(corners_check(&or).unwrap().is_some());
    assert!(corners_check(&xor_matrix()).unwrap().is_none());
    let ternary = CommMatrix::new(2, 2, vec![0, 1, 2, 1]).unwrap();
    assert!(corners_check(&ternary).is_err());
}

#[test]
fn xor_decomposition_examples() {
    let d = xor_decompose(&xor_matrix()).unwrap();
    assert_eq!(d.row_bits, vec![0, 1]);
    assert_eq!(d.col_bits, vec![0, 1]);
    assert!(xor_decompose(&and_matrix()).is_none());
    // Normalizing a(0) = 0 pushes the constant into the column map.
    let ones = CommMatrix::from_fn(2, 3, |_, _| 1);
    let d = xor_decompose(&ones).unwrap();
    assert_eq!(d.row_bits, vec![0, 0]);
    assert_eq!(d.col_bits, vec![1, 1, 1]);
}

#[test]
fn corners_absence_and_xor_form_coincide_exhaustively() {
    // All Boolean matrices with both sides at most 4.
    for rows in 1..=4usize {
        for cols in 1..=4usize {
            for code in 0..(1usize << (rows * cols)) {
                let entries: Vec<usize> =
                    (0..rows * cols).map(|i| (code >> i) & 1).collect();
                let m = CommMatrix::new(rows, cols, entries).unwrap();
                let clean = corners_check(&m).unwrap().is_none();
                let split = xor_decompose(&m).is_some();
                assert_eq!(clean, split, "{rows}x{cols} code {code}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decision_synthesis_and_witness_agree(
        rows in 1usize..=4,
        cols in 1usize..=4,
        seed in any::<u64>(),
    ) {
        use rand::{Rng as _, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<usize> =
            (0..rows * cols).map(|_| rng.gen_range(0..3)).collect();
        let m = CommMatrix::new(rows, cols, entries).unwrap();
        match find_forbidden_submatrix(&m) {
            Some(w) => {
                prop_assert!(witness_is_forbidden(&m, &w));
                prop_assert!(!is_private(&m));
                prop_assert!(matches!(
                    synthesize_private_protocol(&m),
                    Err(SynthesisError::NotPrivate(_))
                ));
            }
            None => {
                prop_assert!(is_private(&m));
                let p = synthesize_private_protocol(&m).unwrap();
                for x in 0..rows {
                    for y in 0..cols {
                        prop_assert_eq!(
                            p.eval(x, y).unwrap().output,
                            Output::Value(m.get(x, y))
                        );
                    }
                }
                let mu = ProbDist::uniform_grid(&[rows, cols]).unwrap();
                let loss = privacy::max_privacy_loss(&p, &mu, &m).unwrap();
                prop_assert!(loss < 1e-10, "loss {}", loss);
            }
        }
    }
}

fn no_output() -> OutputRule {
    Arc::new(|_, _, _, _| Output::Abort)
}

fn output_from_shared(f: CommMatrix, sel: fn(&[usize]) -> (usize, usize)) -> OutputRule {
    Arc::new(move |_, _, shared, _| {
        let (x, y) = sel(shared);
        Output::Value(f.get(x, y))
    })
}

/// Each player encodes its bit into a fresh qubit and ships it across.
fn qubit_exchange(f: CommMatrix) -> QuantumProtocol {
    let enc = |gen_dim: usize| -> UnitaryGen {
        Arc::new(move |b, _| {
            Ok(if b == 1 { Unitary::permutation(&[1, 0]).unwrap() } else { Unitary::identity(gen_dim) })
        })
    };
    QuantumProtocol::new(
        2,
        2,
        vec![
            RegisterDecl { label: "ma".into(), dim: 2, owner_at_start: Player::Al },
            RegisterDecl { label: "mb".into(), dim: 2, owner_at_start: Player::Bob },
        ],
        vec![
            QStep { actor: Player::Al, action: QAction::Apply { registers: vec![0], gen: enc(2) } },
            QStep { actor: Player::Al, action: QAction::Send { registers: vec![0] } },
            QStep { actor: Player::Bob, action: QAction::Apply { registers: vec![1], gen: enc(2) } },
            QStep { actor: Player::Bob, action: QAction::Send { registers: vec![1] } },
            QStep { actor: Player::Al, action: QAction::Measure { registers: vec![1], visibility: Visibility::Shared } },
            QStep { actor: Player::Bob, action: QAction::Measure { registers: vec![0], visibility: Visibility::Shared } },
        ],
        output_from_shared(f, |shared| (shared[1], shared[0])),
    )
    .unwrap()
}

#[test]
fn extraction_of_qubit_exchange_for_xor_is_depth_two() {
    let q = qubit_exchange(xor_matrix());
    let tree = extract_protocol_tree(&q, &xor_matrix()).unwrap();
    assert_eq!(tree.depth(), 2);
    assert!(tree.depth() <= q.n_boundaries());
    assert_eq!(tree.leaves().len(), 4);
    for leaf in tree.leaves() {
        let v = leaf.value.unwrap();
        assert_eq!(v, leaf.rows[0] ^ leaf.cols[0]);
        assert_eq!(leaf.rows.len(), 1);
        assert_eq!(leaf.cols.len(), 1);
    }
}

#[test]
fn extraction_of_constant_protocol_is_a_single_leaf() {
    // The protocol chats away, but the function never splits.
    let f = CommMatrix::from_fn(2, 2, |_, _| 4);
    let q = QuantumProtocol::new(
        2,
        2,
        vec![RegisterDecl { label: "m".into(), dim: 2, owner_at_start: Player::Al }],
        vec![QStep { actor: Player::Al, action: QAction::Send { registers: vec![0] } }],
        Arc::new(|_, _, _, _| Output::Value(4)),
    )
    .unwrap();
    let tree = extract_protocol_tree(&q, &f).unwrap();
    assert_eq!(tree.depth(), 0);
    assert_eq!(tree.nodes.len(), 1);
    assert_eq!(tree.nodes[tree.root].value, Some(4));
}

#[test]
fn extraction_recovers_identified_minimum_structure() {
    // Announcements mirror the private protocol; once Al says x = 0 the
    // value is settled and Bob must answer with a fixed dummy.
    let m = idmin_matrix(1);
    let q = QuantumProtocol::new(
        2,
        2,
        vec![RegisterDecl { label: "w".into(), dim: 2, owner_at_start: Player::Al }],
        vec![
            QStep { actor: Player::Al, action: QAction::Announce { gen: Arc::new(|x, _, _| Ok(x)) } },
            QStep {
                actor: Player::Bob,
                action: QAction::Announce {
                    gen: Arc::new(|y, shared, _| Ok(if shared[0] == 0 { 0 } else { y })),
                },
            },
        ],
        output_from_shared(m.clone(), |shared| (shared[0], if shared[0] == 0 { 0 } else { shared[1] })),
    )
    .unwrap();
    let tree = extract_protocol_tree(&q, &m).unwrap();
    assert_eq!(tree.depth(), 2);
    let leaves = tree.leaves();
    assert_eq!(leaves.len(), 3);
    let top = leaves.iter().find(|l| l.rows == vec![0]).unwrap();
    assert_eq!(top.cols, vec![0, 1]);
    assert_eq!(top.value, Some(1));
    for leaf in &leaves {
        assert!(witness_is_forbidden(&m, &ForbiddenWitness { rows: leaf.rows.clone(), cols: leaf.cols.clone() }) == false);
        assert!(leaf.value.is_some());
    }
}

#[test]
fn extraction_rejects_a_lossy_protocol() {
    // Announcing x outright computes AND but loses a bit.
    let m = and_matrix();
    let q = QuantumProtocol::new(
        2,
        2,
        vec![RegisterDecl { label: "w".into(), dim: 2, owner_at_start: Player::Al }],
        vec![
            QStep { actor: Player::Al, action: QAction::Announce { gen: Arc::new(|x, _, _| Ok(x)) } },
            QStep { actor: Player::Bob, action: QAction::Announce { gen: Arc::new(|y, _, _| Ok(y)) } },
        ],
        output_from_shared(m.clone(), |shared| (shared[0], shared[1])),
    )
    .unwrap();
    assert!(extract_protocol_tree(&q, &m).is_err());
}

#[test]
fn extraction_rejects_a_wrong_protocol() {
    let f = xor_matrix();
    let q = QuantumProtocol::new(
        2,
        2,
        vec![RegisterDecl { label: "w".into(), dim: 2, owner_at_start: Player::Al }],
        vec![QStep { actor: Player::Al, action: QAction::Send { registers: vec![0] } }],
        no_output(),
    )
    .unwrap();
    assert!(extract_protocol_tree(&q, &f).is_err());
}
