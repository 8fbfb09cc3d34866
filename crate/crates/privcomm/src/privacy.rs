//! Privacy loss and leakage of protocol executions.
//!
//! Both quantities live on a player's view: the shared transcript, the
//! player's private records, and the quantum registers they hold. Privacy
//! loss is the conditional mutual information I(view : other input | own
//! input, function value) in bits. Leakage is the worst trace-norm distance
//! between views on input pairs the function value does not separate.
//!
//! Round 0 is the initial state (before any communication); round t >= 1 is
//! the t-th boundary: after the t-th delivery, measurement, or announcement.

use crate::infotheory::{CqState, ProbDist};
use crate::model::{
    check_input_dist, CommMatrix, DeterministicProtocol, Player, PlayerView, ProtocolViews,
    RandomizedProtocol,
};
use crate::qstate::{hermitian_trace_norm, CMat, DensityMatrix};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Loss and leakage figures for one player's view at one round.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RoundFigures {
    pub round: usize,
    /// The viewing player; figures measure what this view reveals about the
    /// other player's input.
    pub player: Player,
    pub privacy_loss_bits: f64,
    pub leakage_trace_norm: f64,
    pub expected_leakage: f64,
}

/// Per-round privacy figures for a protocol under one input distribution.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PrivacyReport {
    pub protocol: String,
    pub distribution: String,
    pub per_round: Vec<RoundFigures>,
    pub max_loss_bits: f64,
    pub max_leakage: f64,
}

fn check_shape<P: ProtocolViews + ?Sized>(proto: &P, f: &CommMatrix) -> Result<()> {
    let (n_x, n_y) = proto.input_ranges();
    if f.rows() != n_x || f.cols() != n_y {
        return Err(Error::DimensionMismatch(format!(
            "protocol inputs {n_x}x{n_y} vs matrix {}x{}",
            f.rows(),
            f.cols()
        )));
    }
    Ok(())
}

fn check_round<P: ProtocolViews + ?Sized>(proto: &P, round: usize) -> Result<()> {
    if round > proto.n_boundaries() {
        return Err(Error::InvalidArgument(format!(
            "round {round} out of range (protocol has {} boundaries)",
            proto.n_boundaries()
        )));
    }
    Ok(())
}

/// One player's views for every input pair at a fixed round >= 1.
struct RoundViews {
    n_y: usize,
    views: Vec<PlayerView>,
}

impl RoundViews {
    fn gather<P: ProtocolViews + ?Sized>(proto: &P, round: usize, player: Player) -> Result<Self> {
        let (n_x, n_y) = proto.input_ranges();
        let mut views = Vec::with_capacity(n_x * n_y);
        for x in 0..n_x {
            for y in 0..n_y {
                views.push(proto.views_at(x, y, round - 1, player)?);
            }
        }
        Ok(Self { n_y, views })
    }

    fn at(&self, x: usize, y: usize) -> &PlayerView {
        &self.views[x * self.n_y + y]
    }
}

/// Block trace-norm distance between two views: histories are perfectly
/// distinguishable classical flags, so the distance is the sum over histories
/// of the trace norm of the weighted state difference.
pub(crate) fn view_distance(a: &PlayerView, b: &PlayerView) -> Result<f64> {
    #[derive(Default)]
    struct Acc {
        w: [f64; 2],
        m: [Option<CMat>; 2],
    }
    let mut keys: BTreeMap<(Vec<usize>, Vec<usize>), Acc> = BTreeMap::new();
    for (side, view) in [a, b].into_iter().enumerate() {
        for c in &view.components {
            let e = keys.entry((c.shared.clone(), c.records.clone())).or_default();
            e.w[side] += c.weight;
            if let Some(state) = &c.state {
                let scaled = state.matrix() * crate::qstate::C64::new(c.weight, 0.0);
                match &mut e.m[side] {
                    Some(m) => *m += scaled,
                    slot => *slot = Some(scaled),
                }
            }
        }
    }
    let mut total = 0.0;
    for acc in keys.values() {
        for side in 0..2 {
            if acc.w[side] > 0.0 && acc.m[side].is_none() && acc.m[1 - side].is_some() {
                return Err(Error::InvalidState(
                    "classical and quantum components mixed on one history".into(),
                ));
            }
        }
        total += match (&acc.m[0], &acc.m[1]) {
            (None, None) => (acc.w[0] - acc.w[1]).abs(),
            (m0, m1) => {
                let n = m0.as_ref().or(m1.as_ref()).unwrap().nrows();
                let zero = CMat::zeros(n, n);
                let diff = m0.as_ref().unwrap_or(&zero) - m1.as_ref().unwrap_or(&zero);
                hermitian_trace_norm(&diff)?
            }
        };
    }
    Ok(total)
}

/// Joint state of (X, Y, F, history) with the player's quantum register,
/// weighted by mu and the per-input view decomposition.
fn cq_from(rv: &RoundViews, mu: &ProbDist, f: &CommMatrix) -> Result<CqState> {
    let mut hist_ids: BTreeMap<(Vec<usize>, Vec<usize>), usize> = BTreeMap::new();
    struct Block {
        w: f64,
        parts: Vec<(f64, DensityMatrix)>,
        classical: bool,
    }
    let mut blocks: BTreeMap<Vec<usize>, Block> = BTreeMap::new();
    for (label, w) in mu.iter() {
        if w == 0.0 {
            continue;
        }
        let (x, y) = (label[0], label[1]);
        for c in &rv.at(x, y).components {
            let next = hist_ids.len();
            let h = *hist_ids.entry((c.shared.clone(), c.records.clone())).or_insert(next);
            let key = vec![x, y, f.get(x, y), h];
            let e = blocks
                .entry(key)
                .or_insert(Block { w: 0.0, parts: Vec::new(), classical: false });
            e.w += w * c.weight;
            match &c.state {
                Some(s) => e.parts.push((w * c.weight, s.clone())),
                None => e.classical = true,
            }
        }
    }
    // Pruned branches may shave a little mass; renormalize it away.
    let total: f64 = blocks.values().map(|b| b.w).sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::Numerical(format!("view mass sums to {total}")));
    }
    let names = ["x", "y", "f", "hist"];
    let quantum = blocks.values().any(|b| !b.parts.is_empty());
    if !quantum {
        let dist = ProbDist::from_pairs(blocks.into_iter().map(|(k, b)| (k, b.w / total)))?;
        return CqState::classical(&names, &dist);
    }
    let mut entries = Vec::with_capacity(blocks.len());
    for (label, b) in blocks {
        if b.classical {
            return Err(Error::InvalidState(
                "classical and quantum components mixed in one view".into(),
            ));
        }
        let parts: Vec<(f64, &DensityMatrix)> =
            b.parts.iter().map(|(pw, s)| (pw / b.w, s)).collect();
        entries.push((label, b.w / total, DensityMatrix::mixture(&parts)?));
    }
    CqState::with_quantum(&names, "view", entries)
}

fn loss_from(rv: &RoundViews, mu: &ProbDist, f: &CommMatrix, player: Player) -> Result<f64> {
    let cq = cq_from(rv, mu, f)?;
    let (own, other) = match player {
        Player::Al => ("x", "y"),
        Player::Bob => ("y", "x"),
    };
    let mut view_regs = vec!["hist"];
    if cq.has_quantum() {
        view_regs.push("view");
    }
    let raw = cq.conditional_mutual_information(&view_regs, &[other], &[own, "f"])?;
    if raw < 0.0 {
        return Err(Error::Numerical(format!("privacy loss {raw} below tolerance")));
    }
    Ok(raw)
}

fn leakage_from(rv: &RoundViews, f: &CommMatrix, player: Player) -> Result<f64> {
    let mut worst = 0.0_f64;
    match player {
        // Bob's view may separate x values the function does not.
        Player::Bob => {
            for y in 0..f.cols() {
                for x1 in 0..f.rows() {
                    for x2 in x1 + 1..f.rows() {
                        if f.get(x1, y) == f.get(x2, y) {
                            worst = worst.max(view_distance(rv.at(x1, y), rv.at(x2, y))?);
                        }
                    }
                }
            }
        }
        Player::Al => {
            for x in 0..f.rows() {
                for y1 in 0..f.cols() {
                    for y2 in y1 + 1..f.cols() {
                        if f.get(x, y1) == f.get(x, y2) {
                            worst = worst.max(view_distance(rv.at(x, y1), rv.at(x, y2))?);
                        }
                    }
                }
            }
        }
    }
    Ok(worst)
}

fn expected_from(rv: &RoundViews, mu: &ProbDist, f: &CommMatrix, player: Player) -> Result<f64> {
    let mut cache: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
    let mut total = 0.0;
    for (label, w) in mu.iter() {
        if w == 0.0 {
            continue;
        }
        let (x, y) = (label[0], label[1]);
        match player {
            // Al's view against an f-equivalent alternative for Bob.
            Player::Al => {
                let matching = f.matching_cols(x, y);
                let z: f64 = matching.iter().map(|&y2| mu.prob(&[x, y2])).sum();
                for &y2 in &matching {
                    let p = w * mu.prob(&[x, y2]) / z;
                    if p == 0.0 || y2 == y {
                        continue;
                    }
                    let key = (x, y.min(y2), y.max(y2));
                    let d = match cache.get(&key) {
                        Some(&d) => d,
                        None => {
                            let d = view_distance(rv.at(x, y), rv.at(x, y2))?;
                            cache.insert(key, d);
                            d
                        }
                    };
                    total += p * d;
                }
            }
            Player::Bob => {
                let matching = f.matching_rows(x, y);
                let z: f64 = matching.iter().map(|&x2| mu.prob(&[x2, y])).sum();
                for &x2 in &matching {
                    let p = w * mu.prob(&[x2, y]) / z;
                    if p == 0.0 || x2 == x {
                        continue;
                    }
                    let key = (y, x.min(x2), x.max(x2));
                    let d = match cache.get(&key) {
                        Some(&d) => d,
                        None => {
                            let d = view_distance(rv.at(x, y), rv.at(x2, y))?;
                            cache.insert(key, d);
                            d
                        }
                    };
                    total += p * d;
                }
            }
        }
    }
    Ok(total)
}

/// Joint classical-quantum state of (X, Y, F, view history) and the player's
/// quantum register at a round, under mu.
pub fn joint_cq_state<P: ProtocolViews + ?Sized>(
    proto: &P,
    mu: &ProbDist,
    f: &CommMatrix,
    round: usize,
    player: Player,
) -> Result<CqState> {
    check_shape(proto, f)?;
    check_input_dist(f, mu)?;
    check_round(proto, round)?;
    if round == 0 {
        // Initial state: empty history, no quantum content.
        let dist = ProbDist::from_pairs(
            mu.iter().map(|(l, w)| (vec![l[0], l[1], f.get(l[0], l[1]), 0], w)),
        )?;
        return CqState::classical(&["x", "y", "f", "hist"], &dist);
    }
    let rv = RoundViews::gather(proto, round, player)?;
    cq_from(&rv, mu, f)
}

/// I(view : other input | own input, F) in bits for one player at one round.
pub fn privacy_loss<P: ProtocolViews + ?Sized>(
    proto: &P,
    mu: &ProbDist,
    f: &CommMatrix,
    round: usize,
    player: Player,
) -> Result<f64> {
    check_shape(proto, f)?;
    check_input_dist(f, mu)?;
    check_round(proto, round)?;
    if round == 0 {
        // Views before any communication are input-independent.
        return Ok(0.0);
    }
    let rv = RoundViews::gather(proto, round, player)?;
    loss_from(&rv, mu, f, player)
}

/// Maximum privacy loss over every round and both players.
pub fn max_privacy_loss<P: ProtocolViews + ?Sized>(
    proto: &P,
    mu: &ProbDist,
    f: &CommMatrix,
) -> Result<f64> {
    check_shape(proto, f)?;
    check_input_dist(f, mu)?;
    let mut worst = 0.0_f64;
    for round in 1..=proto.n_boundaries() {
        for player in [Player::Al, Player::Bob] {
            let rv = RoundViews::gather(proto, round, player)?;
            worst = worst.max(loss_from(&rv, mu, f, player)?);
        }
    }
    Ok(worst)
}

/// Worst trace-norm distance of the player's views over input pairs with
/// equal function value, at one round. In [0, 2].
pub fn leakage<P: ProtocolViews + ?Sized>(
    proto: &P,
    f: &CommMatrix,
    round: usize,
    player: Player,
) -> Result<f64> {
    check_shape(proto, f)?;
    check_round(proto, round)?;
    if round == 0 {
        return Ok(0.0);
    }
    let rv = RoundViews::gather(proto, round, player)?;
    leakage_from(&rv, f, player)
}

/// Expectation of the view distance on f-equivalent alternatives: the other
/// input is resampled from mu conditioned on the own input and the function
/// value.
pub fn expected_leakage<P: ProtocolViews + ?Sized>(
    proto: &P,
    mu: &ProbDist,
    f: &CommMatrix,
    round: usize,
    player: Player,
) -> Result<f64> {
    check_shape(proto, f)?;
    check_input_dist(f, mu)?;
    check_round(proto, round)?;
    if round == 0 {
        return Ok(0.0);
    }
    let rv = RoundViews::gather(proto, round, player)?;
    expected_from(&rv, mu, f, player)
}

/// Full per-round loss and leakage table with maxima.
pub fn privacy_report<P: ProtocolViews + ?Sized>(
    proto: &P,
    mu: &ProbDist,
    f: &CommMatrix,
    protocol_desc: &str,
    distribution_desc: &str,
) -> Result<PrivacyReport> {
    check_shape(proto, f)?;
    check_input_dist(f, mu)?;
    let mut per_round = Vec::new();
    let mut max_loss = 0.0_f64;
    let mut max_leakage = 0.0_f64;
    for round in 0..=proto.n_boundaries() {
        for player in [Player::Al, Player::Bob] {
            let figures = if round == 0 {
                RoundFigures {
                    round,
                    player,
                    privacy_loss_bits: 0.0,
                    leakage_trace_norm: 0.0,
                    expected_leakage: 0.0,
                }
            } else {
                let rv = RoundViews::gather(proto, round, player)?;
                RoundFigures {
                    round,
                    player,
                    privacy_loss_bits: loss_from(&rv, mu, f, player)?,
                    leakage_trace_norm: leakage_from(&rv, f, player)?,
                    expected_leakage: expected_from(&rv, mu, f, player)?,
                }
            };
            max_loss = max_loss.max(figures.privacy_loss_bits);
            max_leakage = max_leakage.max(figures.leakage_trace_norm);
            per_round.push(figures);
        }
    }
    Ok(PrivacyReport {
        protocol: protocol_desc.to_string(),
        distribution: distribution_desc.to_string(),
        per_round,
        max_loss_bits: max_loss,
        max_leakage,
    })
}

/// Entropy continuity form of leakage-to-loss: n·δ − δ·log₂ δ, valid for
/// leakage δ ≤ 1/e on n-bit inputs.
pub fn leak_to_loss_bound(delta: f64, n_bits: usize) -> Result<f64> {
    let cap = std::f64::consts::E.recip();
    if !(0.0..=1.0).contains(&delta) || delta > cap {
        return Err(Error::InvalidArgument(format!("leakage {delta} outside [0, 1/e]")));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    Ok(n_bits as f64 * delta - delta * delta.log2())
}

/// Pinsker-style loss-to-leakage: 2·sqrt(2·ln 2 · loss).
pub fn loss_to_leak_bound(loss: f64) -> Result<f64> {
    if loss < 0.0 {
        return Err(Error::InvalidArgument(format!("negative privacy loss {loss}")));
    }
    Ok(2.0 * (2.0 * std::f64::consts::LN_2 * loss).sqrt())
}

/// Minimum round count 1/(12·sqrt(δ)) forced by leakage δ on functions with a
/// corners pattern. Unbounded as δ → 0, so zero leakage is rejected.
pub fn cornersleak_round_bound(delta: f64) -> Result<f64> {
    if delta <= 0.0 {
        return Err(Error::InvalidArgument(
            "round bound is unbounded at zero leakage".into(),
        ));
    }
    Ok(1.0 / (12.0 * delta.sqrt()))
}

/// The chosen seed of [`best_deterministic_for_distribution`].
#[derive(Debug, Clone)]
pub struct BestSeed {
    pub index: usize,
    /// weight_error·error + weight_loss·max privacy loss of that seed.
    pub score: f64,
    pub protocol: DeterministicProtocol,
}

/// Picks the seed minimizing weight_error·error + weight_loss·max_privacy_loss
/// on mu. The minimum is at most the seed average, hence at most twice it.
pub fn best_deterministic_for_distribution(
    r: &RandomizedProtocol,
    mu: &ProbDist,
    f: &CommMatrix,
    weight_error: f64,
    weight_loss: f64,
) -> Result<BestSeed> {
    if weight_error < 0.0 || weight_loss < 0.0 {
        return Err(Error::InvalidArgument("negative objective weights".into()));
    }
    let mut best: Option<BestSeed> = None;
    for (index, (w, p)) in r.seeds().iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let error = p.error_on(f, mu)?;
        let loss = max_privacy_loss(p, mu, f)?;
        let score = weight_error * error + weight_loss * loss;
        if best.as_ref().map_or(true, |b| score < b.score) {
            best = Some(BestSeed { index, score, protocol: p.clone() });
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("no seed with positive probability".into()))
}
