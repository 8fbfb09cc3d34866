//! A quantum protocol for the AND of two bits with abort-only error and
//! per-round leakage controlled by a parameter δ.
//!
//! Each round uses a fresh triple of qubits: Al prepares a two-qubit pair
//! that is almost independent of his bit, Bob marks it against his own bit
//! using a blank third qubit, and everything is returned. After all rounds
//! Al measures privately and announces abort or the result. A round is
//! informative with probability δ²/4, so ⌈ln 3/(δ²/4)⌉ rounds push the abort
//! probability below 1/3 while each message stays within trace distance
//! δ·√(2−δ²/4) across Al's inputs.

use std::sync::Arc;

use crate::model::{
    AnnounceGen, Output, OutputRule, Player, QAction, QStep, QuantumProtocol, RegisterDecl,
    UnitaryGen, Visibility,
};
use crate::qstate::{pure_state_distance, C64, CVec, PureState, Unitary};
use crate::{Error, Result};

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "leakage parameter δ = {delta} outside (0, 0.5]"
        )));
    }
    Ok(())
}

/// Rounds needed to push the abort probability (1−δ²/4)^k below 1/3:
/// ⌈ln 3 / (δ²/4)⌉.
pub fn and_round_count(delta: f64) -> Result<usize> {
    check_delta(delta)?;
    Ok((3.0_f64.ln() / (delta * delta / 4.0)).ceil() as usize)
}

/// Al's two-qubit round state for input bit x: amplitude δ/2 on |0x⟩ and
/// √(1−δ²/4) on |11⟩.
fn round_pair(delta: f64, x: usize) -> CVec {
    let mut v = CVec::zeros(4);
    v[if x == 0 { 0 } else { 2 }] = C64::new(delta / 2.0, 0.0);
    v[3] = C64::new((1.0 - delta * delta / 4.0).sqrt(), 0.0);
    v
}

/// Bob's round unitary for y = 1 on (pair, blank): swaps |100⟩ ↔ |101⟩ and
/// fixes everything else, so both support states of the x = 0 pair are fixed.
fn bob_mark() -> Result<Unitary> {
    Unitary::permutation(&[0, 1, 2, 3, 5, 4, 6, 7])
}

/// Decodes the flattened measurement of all round triples: scanning rounds
/// most significant first, octal digit 5 (|101⟩) means both inputs were 1 and
/// digits 0 or 4 (|000⟩, |100⟩) mean some input was 0. Returns the announce
/// symbol: 0 abort, 1 result 0, 2 result 1.
fn decode_outcome(sym: usize, rounds: usize) -> usize {
    for i in 0..rounds {
        match (sym >> (3 * (rounds - 1 - i))) & 7 {
            0b101 => return 2,
            0b000 | 0b100 => return 1,
            _ => {}
        }
    }
    0
}

/// The AND protocol at leakage δ with the default round count.
pub fn and_protocol(delta: f64) -> Result<QuantumProtocol> {
    and_protocol_with_rounds(delta, and_round_count(delta)?)
}

/// The AND protocol with an explicit round count. Engine runs need
/// 3·rounds qubits, so only small counts are simulable; the default count
/// from [`and_round_count`] still constructs fine for structural checks.
pub fn and_protocol_with_rounds(delta: f64, rounds: usize) -> Result<QuantumProtocol> {
    check_delta(delta)?;
    if rounds == 0 {
        return Err(Error::InvalidArgument("round count must be positive".into()));
    }
    let mut registers = Vec::with_capacity(3 * rounds);
    for i in 0..rounds {
        registers.push(RegisterDecl {
            label: format!("a{i}"),
            dim: 2,
            owner_at_start: Player::Al,
        });
        registers.push(RegisterDecl {
            label: format!("b{i}"),
            dim: 2,
            owner_at_start: Player::Al,
        });
        registers.push(RegisterDecl {
            label: format!("c{i}"),
            dim: 2,
            owner_at_start: Player::Bob,
        });
    }
    let prep: UnitaryGen =
        Arc::new(move |x, _| Unitary::with_first_column(&round_pair(delta, x)));
    let mark: UnitaryGen = Arc::new(move |y, _| {
        if y == 0 {
            Ok(Unitary::identity(8))
        } else {
            bob_mark()
        }
    });
    let mut steps = Vec::new();
    for i in 0..rounds {
        let (a, b, c) = (3 * i, 3 * i + 1, 3 * i + 2);
        steps.push(QStep {
            actor: Player::Al,
            action: QAction::Apply { registers: vec![a, b], gen: prep.clone() },
        });
        steps.push(QStep { actor: Player::Al, action: QAction::Send { registers: vec![a, b] } });
        steps.push(QStep {
            actor: Player::Bob,
            action: QAction::Apply { registers: vec![a, b, c], gen: mark.clone() },
        });
        steps.push(QStep {
            actor: Player::Bob,
            action: QAction::Send { registers: vec![a, b, c] },
        });
    }
    steps.push(QStep {
        actor: Player::Al,
        action: QAction::Measure {
            registers: (0..3 * rounds).collect(),
            visibility: Visibility::Private,
        },
    });
    let announce: AnnounceGen = Arc::new(move |_, _, records| {
        let sym = *records
            .last()
            .ok_or_else(|| Error::InvalidState("announce before measurement".into()))?;
        Ok(decode_outcome(sym, rounds))
    });
    steps.push(QStep { actor: Player::Al, action: QAction::Announce { gen: announce } });
    let rule: OutputRule = Arc::new(|_, _, shared, _| match shared.last() {
        Some(1) => Output::Value(0),
        Some(2) => Output::Value(1),
        _ => Output::Abort,
    });
    QuantumProtocol::new(2, 2, registers, steps, rule)
}

/// Closed-form figures of the AND protocol, computed from one round's states.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AndAnalysis {
    pub delta: f64,
    pub rounds: usize,
    /// Probability of announcing the correct value, identical on all four
    /// input pairs.
    pub success_probability: f64,
    pub abort_probability: f64,
    /// Trace distance between the x = 0 and x = 1 pair states Bob receives,
    /// attained each time Al sends: δ·√(2−δ²/4).
    pub bob_round_leakage: f64,
    /// Largest y-distance of the triple Al gets back on a constant-AND input
    /// pair; zero because Bob's unitary fixes the x = 0 support.
    pub al_round_leakage: f64,
    pub qubits_sent: usize,
}

/// Analysis for the default round count at leakage δ. Engine-independent:
/// works at round counts far beyond simulable sizes.
pub fn and_analysis(delta: f64) -> Result<AndAnalysis> {
    let rounds = and_round_count(delta)?;
    let abort = (1.0 - delta * delta / 4.0).powi(rounds as i32);
    let pair = |x| PureState::new(vec![2, 2], round_pair(delta, x));
    let bob_round_leakage = pure_state_distance(&pair(0)?, &pair(1)?)?;
    // Al's returned triple for x = 0: identical for y = 0 and y = 1.
    let blank = PureState::basis(vec![2], &[0])?;
    let triple = pair(0)?.tensor(&blank);
    let marked = triple.apply_unitary(&bob_mark()?, &[0, 1, 2])?;
    let al_round_leakage =
        pure_state_distance(&triple, &marked)?;
    Ok(AndAnalysis {
        delta,
        rounds,
        success_probability: 1.0 - abort,
        abort_probability: abort,
        bob_round_leakage,
        al_round_leakage,
        qubits_sent: 5 * rounds,
    })
}
