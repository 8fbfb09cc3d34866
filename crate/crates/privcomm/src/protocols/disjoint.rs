//! A sublinear quantum protocol for set disjointness: distributed Grover
//! search run in restarted stages of geometrically growing length.
//!
//! One message register of dimension 4n+1 travels back and forth: n search
//! indices with two bit sub-registers each, plus one extra lift component
//! that keeps every pair of possible messages non-orthogonal. Al prepares a
//! near-uniform superposition, writes his bits into the first sub-register,
//! and sends; Bob phases the components indexed by his set; Al undoes the
//! write and reflects about the mean. After each stage Al measures the
//! register openly and both announce their bit at the measured index, so a
//! hit (both bits 1) is verified classically and ends the search: from then
//! on the register is parked on the lift component. Disjoint inputs are
//! never misreported; intersecting ones escape all stages with probability
//! at most 1/3.

use std::sync::Arc;

use crate::model::{
    AnnounceGen, CommMatrix, Output, OutputRule, Player, QAction, QStep, QuantumProtocol,
    RegisterDecl, UnitaryGen, Visibility,
};
use crate::qstate::{C64, CMat, CVec, Unitary};
use crate::{tol, Error, Result};

/// Perturbation budget for the message lift; the lift amplitude δ starts at
/// min(ε/2, 0.1) and halves until all same-boundary message overlaps clear
/// [`tol::NONORTH_MIN`].
const LIFT_EPS: f64 = 1e-3;

/// Transcript entries with three or more lift outcomes carry probability
/// mass below 1e-18 and are dropped from the exact loss accounting.
const MAX_LIFT_OUTCOMES: usize = 2;

/// f(x, y) = 1 when the bitmask sets x and y are disjoint, else 0.
pub fn disjointness_matrix(n: usize) -> Result<CommMatrix> {
    if n == 0 || n > 8 {
        return Err(Error::InvalidArgument(format!(
            "universe size {n} outside 1..=8 for an explicit matrix"
        )));
    }
    let size = 1usize << n;
    Ok(CommMatrix::from_fn(size, size, |x, y| usize::from(x & y == 0)))
}

/// Stage layout of the search.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct GroverStagePlan {
    /// Universe size, a power of two.
    pub n: usize,
    /// Grover iterations per stage: ⌈1.2^(j−1)⌉, truncated so the total stays
    /// within 9√n.
    pub stage_iterations: Vec<usize>,
    /// Message register dimension: n indices × 2 bits + 1 lift component.
    pub register_dim: usize,
}

impl GroverStagePlan {
    pub fn stage_count(&self) -> usize {
        self.stage_iterations.len()
    }

    pub fn total_iterations(&self) -> usize {
        self.stage_iterations.iter().sum()
    }
}

/// Default plan: at most ⌈3·log₂ n⌉ stages of ⌈1.2^(j−1)⌉ iterations,
/// truncated once the running total would pass 9√n.
pub fn disjointness_stage_plan(n: usize) -> Result<GroverStagePlan> {
    check_universe(n)?;
    let cap = 9.0 * (n as f64).sqrt();
    let max_stages = (3.0 * (n as f64).log2()).ceil() as usize;
    let mut stage_iterations = Vec::new();
    let mut total = 0.0;
    for j in 1..=max_stages {
        let m = 1.2_f64.powi(j as i32 - 1).ceil() as usize;
        if total + m as f64 > cap {
            break;
        }
        stage_iterations.push(m);
        total += m as f64;
    }
    Ok(GroverStagePlan { n, stage_iterations, register_dim: 4 * n + 1 })
}

fn check_universe(n: usize) -> Result<()> {
    if !n.is_power_of_two() || n < 2 || n > 16 {
        return Err(Error::InvalidArgument(format!(
            "universe size {n} is not a power of two in 2..=16"
        )));
    }
    Ok(())
}

fn check_plan(n: usize, plan: &GroverStagePlan) -> Result<()> {
    check_universe(n)?;
    if plan.n != n {
        return Err(Error::InvalidArgument(format!(
            "plan is for universe {}, protocol for {n}",
            plan.n
        )));
    }
    if plan.register_dim != 4 * n + 1 {
        return Err(Error::InvalidArgument("plan register dimension must be 4n+1".into()));
    }
    if plan.stage_iterations.is_empty() || plan.stage_iterations.iter().any(|&m| m == 0) {
        return Err(Error::InvalidArgument("plan needs positive iteration counts".into()));
    }
    Ok(())
}

/// Per-index amplitudes (marked, unmarked) of the live search state after
/// `iters` Grover iterations against k marked indices. The lift component
/// keeps amplitude δ throughout.
fn grover_amps(n: usize, delta: f64, iters: usize, k: usize) -> (f64, f64) {
    let nf = n as f64;
    let mut m = ((1.0 - delta * delta) / nf).sqrt();
    let mut u = m;
    for _ in 0..iters {
        m = -m;
        let mean = (k as f64 * m + (n - k) as f64 * u) / nf;
        m = 2.0 * mean - m;
        u = 2.0 * mean - u;
    }
    (m, u)
}

/// Per-index outcome probabilities (marked, unmarked) of each stage's
/// measurement, for every overlap size k.
fn stage_probs(plan: &GroverStagePlan, delta: f64) -> Vec<Vec<(f64, f64)>> {
    plan.stage_iterations
        .iter()
        .map(|&iters| {
            (0..=plan.n)
                .map(|k| {
                    let (m, u) = grover_amps(plan.n, delta, iters, k);
                    (m * m, u * u)
                })
                .collect()
        })
        .collect()
}

/// Probability that an input pair with overlap k survives every stage
/// unreported. Zero overlap never reports, so its error is exactly 0.
fn miss_probability(plan: &GroverStagePlan, delta: f64, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let mut miss = 1.0;
    for &iters in &plan.stage_iterations {
        let (m, _) = grover_amps(plan.n, delta, iters, k);
        miss *= 1.0 - k as f64 * m * m;
    }
    miss
}

/// Lower bound on |⟨φ|ψ⟩| over all same-boundary message pairs.
///
/// A live message after t in-stage iterations has per-index amplitude m (on
/// its ≤ k marked indices, first bit 1) or u (elsewhere, first bit equal to
/// the owner's input bit), plus δ on the lift component, so any pairwise
/// inner product has the form δ² + A·m₁m₂ ± (B·m₁u₂ + C·u₁m₂) + D·u₁u₂ for
/// agreement counts A, B, C, D ≥ 0 with A+B+C+D ≤ n (minus signs on the
/// return leg, where marked components are phased). Minimizing over this
/// count superset lower-bounds the true minimum. Stopped branches send the
/// bare lift state: overlap δ against live messages, 1 among themselves.
fn min_message_overlap(plan: &GroverStagePlan, delta: f64) -> f64 {
    let n = plan.n;
    let mut best = delta.min(1.0);
    for &iters in &plan.stage_iterations {
        for t in 0..iters {
            let amps: Vec<(f64, f64)> = (0..=n).map(|k| grover_amps(n, delta, t, k)).collect();
            for (k1, &(m1, u1)) in amps.iter().enumerate() {
                for (k2, &(m2, u2)) in amps.iter().enumerate() {
                    for sign in [1.0, -1.0] {
                        let p_mm = m1 * m2;
                        let p_mu = sign * m1 * u2;
                        let p_um = sign * u1 * m2;
                        let p_uu = u1 * u2;
                        for a in 0..=k1.min(k2) {
                            for b in 0..=k1 - a {
                                for c in 0..=k2 - a {
                                    if a + b + c > n {
                                        break;
                                    }
                                    let base = delta * delta
                                        + a as f64 * p_mm
                                        + b as f64 * p_mu
                                        + c as f64 * p_um;
                                    let d_max = (n - a - b - c) as f64;
                                    let mut check = |d: f64| {
                                        best = best.min((base + d * p_uu).abs());
                                    };
                                    check(0.0);
                                    check(d_max);
                                    if p_uu.abs() > 1e-12 {
                                        let root = (-base / p_uu).round().clamp(0.0, d_max);
                                        check(root);
                                        check((root - 1.0).max(0.0));
                                        check((root + 1.0).min(d_max));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    best
}

/// Closed-form figures of one plan at its chosen lift amplitude.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DisjointnessAnalysis {
    pub plan: GroverStagePlan,
    /// Lift amplitude in use after any halvings.
    pub delta: f64,
    /// P(wrong output) indexed by |x ∩ y|. Entry 0 is exactly 0.
    pub error_by_overlap: Vec<f64>,
    /// Certified lower bound on same-boundary message overlaps.
    pub min_message_overlap: f64,
}

impl DisjointnessAnalysis {
    pub fn error_probability(&self, x: usize, y: usize) -> f64 {
        self.error_by_overlap[(x & y).count_ones() as usize]
    }
}

/// Analysis for universe n under the given plan (default plan when `None`):
/// per-overlap error probabilities and the message overlap bound, with the
/// lift amplitude halved from min(ε/2, 0.1) until the bound clears
/// [`tol::NONORTH_MIN`].
pub fn disjointness_analysis(
    n: usize,
    plan: Option<GroverStagePlan>,
) -> Result<DisjointnessAnalysis> {
    let plan = match plan {
        Some(p) => {
            check_plan(n, &p)?;
            p
        }
        None => disjointness_stage_plan(n)?,
    };
    let mut delta = (LIFT_EPS / 2.0).min(0.1);
    for _ in 0..=64 {
        let overlap = min_message_overlap(&plan, delta);
        if overlap > tol::NONORTH_MIN {
            let error_by_overlap = (0..=n).map(|k| miss_probability(&plan, delta, k)).collect();
            return Ok(DisjointnessAnalysis {
                plan,
                delta,
                error_by_overlap,
                min_message_overlap: overlap,
            });
        }
        delta /= 2.0;
    }
    Err(Error::Numerical("no lift amplitude separates all message pairs".into()))
}

/// Initial live state: amplitude √((1−δ²)/n) on each |index i, bits 00⟩
/// component, δ on the lift component.
fn initial_state(n: usize, delta: f64) -> CVec {
    let dim = 4 * n + 1;
    let amp = ((1.0 - delta * delta) / n as f64).sqrt();
    let mut v = CVec::zeros(dim);
    for i in 0..n {
        v[4 * i] = C64::new(amp, 0.0);
    }
    v[4 * n] = C64::new(delta, 0.0);
    v
}

/// Self-inverse permutation XOR-ing input bits into the first bit
/// sub-register: components 4i+b₁b₂ with x_i = 1 swap b₁.
fn write_permutation(n: usize, x: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..4 * n + 1).collect();
    for i in 0..n {
        if (x >> i) & 1 == 1 {
            p.swap(4 * i, 4 * i + 2);
            p.swap(4 * i + 1, 4 * i + 3);
        }
    }
    p
}

/// Diagonal ±1 phase keyed to Bob's set: component 4i+2b₁+b₂ gets
/// (−1)^(b₂ ⊕ (b₁ ∧ y_i)); the lift component is fixed.
fn phase_unitary(n: usize, y: usize) -> Result<Unitary> {
    let dim = 4 * n + 1;
    let mut mat = CMat::zeros(dim, dim);
    for c in 0..dim {
        let sign = if c < 4 * n {
            let i = c / 4;
            let b1 = (c >> 1) & 1;
            let b2 = c & 1;
            if b2 ^ (b1 & ((y >> i) & 1)) == 1 {
                -1.0
            } else {
                1.0
            }
        } else {
            1.0
        };
        mat[(c, c)] = C64::new(sign, 0.0);
    }
    Unitary::new(mat)
}

/// Reflection about the uniform vector on the n |i, 00⟩ components, identity
/// on the bit-carrying and lift components.
fn diffusion_unitary(n: usize) -> Result<Unitary> {
    let dim = 4 * n + 1;
    let mut mat = CMat::identity(dim, dim);
    for i in 0..n {
        for j in 0..n {
            let delta_ij = if i == j { 1.0 } else { 0.0 };
            mat[(4 * i, 4 * j)] = C64::new(2.0 / n as f64 - delta_ij, 0.0);
        }
    }
    Unitary::new(mat)
}

/// True once some finished stage announced bits (1, 1): the hit is verified
/// and the search is over.
fn is_stopped(shared: &[usize]) -> bool {
    shared.chunks_exact(3).any(|c| c[1] == 1 && c[2] == 1)
}

/// The protocol for universe n under the given plan (default when `None`),
/// at the lift amplitude chosen by [`disjointness_analysis`]. Engine runs
/// are practical up to n = 4; larger universes go through the analysis path.
pub fn disjointness_protocol(n: usize, plan: Option<GroverStagePlan>) -> Result<QuantumProtocol> {
    let analysis = disjointness_analysis(n, plan)?;
    let plan = analysis.plan;
    let delta = analysis.delta;
    let dim = plan.register_dim;

    let n_caught = n;
    let prep: UnitaryGen = Arc::new(move |_x, shared: &[usize]| {
        let prev = if shared.is_empty() { 0 } else { shared[shared.len() - 3] };
        if is_stopped(shared) {
            let mut p: Vec<usize> = (0..dim).collect();
            p.swap(prev, dim - 1);
            Unitary::permutation(&p)
        } else {
            let lift = Unitary::with_first_column(&initial_state(n_caught, delta))?;
            if prev == 0 {
                Ok(lift)
            } else {
                let mut p: Vec<usize> = (0..dim).collect();
                p.swap(0, prev);
                Unitary::permutation(&p)?.then(&lift)
            }
        }
    });
    let write: UnitaryGen = Arc::new(move |x, shared: &[usize]| {
        if is_stopped(shared) {
            return Ok(Unitary::identity(dim));
        }
        Unitary::permutation(&write_permutation(n_caught, x))
    });
    let phase: UnitaryGen = Arc::new(move |y, shared: &[usize]| {
        if is_stopped(shared) {
            return Ok(Unitary::identity(dim));
        }
        phase_unitary(n_caught, y)
    });
    let diffusion = diffusion_unitary(n)?;
    let reflect: UnitaryGen = Arc::new(move |x, shared: &[usize]| {
        if is_stopped(shared) {
            return Ok(Unitary::identity(dim));
        }
        Unitary::permutation(&write_permutation(n_caught, x))?.then(&diffusion)
    });
    let bit_of = move |input: usize, shared: &[usize], offset: usize| -> Result<usize> {
        let len = shared.len();
        if len < offset {
            return Err(Error::InvalidState("announce before stage outcome".into()));
        }
        let sym = shared[len - offset];
        if sym >= 4 * n_caught {
            return Ok(0);
        }
        Ok((input >> (sym / 4)) & 1)
    };
    let announce_x: AnnounceGen = Arc::new(move |x, shared, _| bit_of(x, shared, 1));
    let announce_y: AnnounceGen = Arc::new(move |y, shared, _| bit_of(y, shared, 2));

    let mut steps = Vec::new();
    for &iters in &plan.stage_iterations {
        steps.push(QStep {
            actor: Player::Al,
            action: QAction::Apply { registers: vec![0], gen: prep.clone() },
        });
        for _ in 0..iters {
            steps.push(QStep {
                actor: Player::Al,
                action: QAction::Apply { registers: vec![0], gen: write.clone() },
            });
            steps.push(QStep { actor: Player::Al, action: QAction::Send { registers: vec![0] } });
            steps.push(QStep {
                actor: Player::Bob,
                action: QAction::Apply { registers: vec![0], gen: phase.clone() },
            });
            steps.push(QStep { actor: Player::Bob, action: QAction::Send { registers: vec![0] } });
            steps.push(QStep {
                actor: Player::Al,
                action: QAction::Apply { registers: vec![0], gen: reflect.clone() },
            });
        }
        steps.push(QStep {
            actor: Player::Al,
            action: QAction::Measure { registers: vec![0], visibility: Visibility::Shared },
        });
        steps.push(QStep { actor: Player::Al, action: QAction::Announce { gen: announce_x.clone() } });
        steps.push(QStep { actor: Player::Bob, action: QAction::Announce { gen: announce_y.clone() } });
    }
    let rule: OutputRule = Arc::new(|_, _, shared, _| {
        if is_stopped(shared) {
            Output::Value(0)
        } else {
            Output::Value(1)
        }
    });
    let registers = vec![RegisterDecl {
        label: "search".into(),
        dim,
        owner_at_start: Player::Al,
    }];
    QuantumProtocol::new(1 << n, 1 << n, registers, steps, rule)
}

/// Transcript cut at which [`disjointness_transcript_loss`] is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cut {
    /// Right after stage s's outcome symbol enters the transcript, before
    /// its two announces. Stages are 0-based.
    Measure(usize),
    /// After stage s's announces.
    StageEnd(usize),
}

/// Pending last entry at a measure cut: the outcome index is on the
/// transcript but its input bits are not yet announced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pending {
    None,
    Lift,
    /// Fresh index inside the conditioned support; the unknown input's bit
    /// there decides between the marked and unmarked outcome rate.
    InFresh,
    /// Repeat of a support index already revealed as bit 0.
    InRepeat,
    OutFresh,
    OutRepeat,
}

struct LossTables {
    binom: Vec<Vec<f64>>,
    /// surj[t][d]: ordered surjections from t slots onto d labels.
    surj: Vec<Vec<f64>>,
}

impl LossTables {
    fn new(limit: usize) -> Self {
        let mut binom = vec![vec![0.0; limit + 1]; limit + 1];
        for i in 0..=limit {
            binom[i][0] = 1.0;
            for j in 1..=i {
                binom[i][j] = binom[i - 1][j - 1] + if j <= i - 1 { binom[i - 1][j] } else { 0.0 };
            }
        }
        let mut stirling = vec![vec![0.0; limit + 1]; limit + 1];
        stirling[0][0] = 1.0;
        for t in 1..=limit {
            for d in 1..=t {
                stirling[t][d] = d as f64 * stirling[t - 1][d] + stirling[t - 1][d - 1];
            }
        }
        let mut surj = vec![vec![0.0; limit + 1]; limit + 1];
        let mut fact = 1.0;
        let mut facts = vec![1.0; limit + 1];
        for d in 1..=limit {
            fact *= d as f64;
            facts[d] = fact;
        }
        for t in 0..=limit {
            for d in 0..=limit {
                surj[t][d] = stirling[t][d] * facts[d];
            }
        }
        Self { binom, surj }
    }

    fn c(&self, n: usize, k: usize) -> f64 {
        if k > n {
            0.0
        } else {
            self.binom[n][k]
        }
    }
}

fn entropy_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Transcript entropy given both inputs, as a function of the overlap k:
/// stage outcome entropies weighted by the probability the search is still
/// live, over `full` completed stages plus optionally the next measurement.
fn transcript_entropy_by_overlap(
    probs: &[Vec<(f64, f64)>],
    n: usize,
    delta: f64,
    k: usize,
    full: usize,
    pending_stage: Option<usize>,
) -> f64 {
    let p_lift = delta * delta;
    let stage_h = |s: usize| {
        let (pm, pu) = probs[s][k];
        k as f64 * entropy_term(pm) + (n - k) as f64 * entropy_term(pu) + entropy_term(p_lift)
    };
    let mut alive = 1.0;
    let mut h = 0.0;
    for s in 0..full {
        h += alive * stage_h(s);
        let (pm, _) = probs[s][k];
        alive *= 1.0 - k as f64 * pm;
    }
    if let Some(s) = pending_stage {
        h += alive * stage_h(s);
    }
    h
}

/// Exact privacy loss (conditional mutual information, bits) of the shared
/// transcript against the other player's input under uniform inputs. The
/// construction treats the two inputs symmetrically at both cut flavors, so
/// the value is the same for either viewing player.
///
/// Computed by grouping transcripts into equal-probability classes: which
/// stages produced lift outcomes, where the verified hit happened (if
/// anywhere), how many distinct indices inside and outside the conditioned
/// support were visited (and with which announced bit), and the pending
/// class of an unannounced final outcome. Group probabilities mix over the
/// unknown input's overlap with the conditioned support; multiplicities
/// count index assignments through surjection numbers.
pub fn disjointness_transcript_loss(
    plan: &GroverStagePlan,
    delta: f64,
    cut: Cut,
) -> Result<f64> {
    check_plan(plan.n, plan)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("lift amplitude {delta} outside (0, 1)")));
    }
    let n = plan.n;
    let (completed, pending_stage) = match cut {
        Cut::Measure(s) if s < plan.stage_count() => (s, Some(s)),
        Cut::StageEnd(s) if s < plan.stage_count() => (s + 1, None),
        _ => {
            return Err(Error::InvalidArgument("cut past the last stage".into()));
        }
    };
    let probs = stage_probs(plan, delta);
    let tables = LossTables::new(n.max(completed + 1).max(16));
    let p_lift = delta * delta;

    let mut loss = 0.0;
    for w in 0..=n {
        let p_w = tables.c(n, w) / (1u64 << n) as f64;
        // Counts of the unknown input per overlap k and per output value.
        let m1 = (1u64 << (n - w)) as f64;
        let m0 = (1u64 << n) as f64 - m1;
        let p_v1 = m1 / (1u64 << n) as f64;

        // H(T | other input, this input = representative of weight w).
        let mut h_given_both = [0.0_f64; 2];
        for k in 0..=w {
            let h_k = transcript_entropy_by_overlap(&probs, n, delta, k, completed, pending_stage);
            if k == 0 {
                h_given_both[1] += h_k;
            } else {
                h_given_both[0] += tables.c(w, k) * (m1 / m0) * h_k;
            }
        }

        // H(T | this input, f): sum of −q·log q over transcript groups.
        let mut h_transcript = [0.0_f64; 2];
        let mut total_mass = [0.0_f64; 2];
        // Choice of the verified-hit stage (None: still live at the cut).
        for stop in (0..completed).map(Some).chain([None]) {
            let live = stop.unwrap_or(completed);
            let pendings: &[Pending] = match (stop, pending_stage) {
                // After a verified hit the remaining outcomes are the parked
                // lift component with certainty: no entropy, no choices.
                (Some(_), _) | (None, None) => &[Pending::None],
                (None, Some(_)) => &[
                    Pending::Lift,
                    Pending::InFresh,
                    Pending::InRepeat,
                    Pending::OutFresh,
                    Pending::OutRepeat,
                ],
            };
            // Lift-outcome stages among the live prefix.
            let mut lift_sets: Vec<Vec<usize>> = vec![Vec::new()];
            for count in 1..=MAX_LIFT_OUTCOMES.min(live) {
                lift_sets.extend(subsets_of_size(live, count));
            }
            for lift_set in &lift_sets {
                let u_stages: Vec<usize> =
                    (0..live).filter(|s| !lift_set.contains(s)).collect();
                let m = u_stages.len();
                // Per-overlap probability of one concrete transcript with
                // this stage pattern, index labels aside.
                let mut base = vec![0.0_f64; w + 1];
                for (k, b) in base.iter_mut().enumerate() {
                    let mut p = p_lift.powi(lift_set.len() as i32);
                    for &s in &u_stages {
                        p *= probs[s][k].1;
                    }
                    if let Some(s) = stop {
                        p *= probs[s][k].0;
                    }
                    *b = p;
                }
                for &pending in pendings {
                    for t_in in 0..=m {
                        let t_out = m - t_in;
                        for d_in in 0..=t_in.min(w) {
                            if tables.surj[t_in][d_in] == 0.0 {
                                continue;
                            }
                            // Unnormalized per-transcript weight by overlap,
                            // out-pool factor 2^free_out deferred.
                            let marked = usize::from(stop.is_some());
                            let reserved = d_in
                                + marked
                                + usize::from(matches!(pending, Pending::InFresh));
                            if reserved > w {
                                continue;
                            }
                            let free_in = w - reserved;
                            let mut group = vec![0.0_f64; w + 1];
                            for k in 0..=w {
                                let fixed_ones = marked;
                                let pend_factor = |k: usize| match pending {
                                    Pending::None => 1.0,
                                    Pending::Lift => p_lift,
                                    Pending::InFresh | Pending::InRepeat | Pending::OutFresh
                                    | Pending::OutRepeat => {
                                        probs[pending_stage.unwrap()][k].1
                                    }
                                };
                                match pending {
                                    Pending::InFresh => {
                                        // Bit 0 at the pending support index.
                                        if k >= fixed_ones {
                                            group[k] += tables.c(free_in, k - fixed_ones)
                                                * base[k]
                                                * pend_factor(k);
                                        }
                                        // Bit 1: the pending index is marked.
                                        if k >= fixed_ones + 1 {
                                            group[k] += tables.c(free_in, k - fixed_ones - 1)
                                                * base[k]
                                                * probs[pending_stage.unwrap()][k].0;
                                        }
                                    }
                                    _ => {
                                        if k >= fixed_ones {
                                            group[k] += tables.c(free_in, k - fixed_ones)
                                                * base[k]
                                                * pend_factor(k);
                                        }
                                    }
                                }
                            }
                            for d_out in 0..=t_out.min(n - w) {
                                if tables.surj[t_out][d_out] == 0.0 {
                                    continue;
                                }
                                let out_reserved =
                                    d_out + usize::from(matches!(pending, Pending::OutFresh));
                                if out_reserved > n - w {
                                    continue;
                                }
                                let free_out = n - w - out_reserved;
                                let pend_mult = match pending {
                                    Pending::None | Pending::Lift => 1.0,
                                    Pending::InFresh => (w - d_in - marked) as f64,
                                    Pending::InRepeat => d_in as f64,
                                    Pending::OutFresh => (n - w - d_out) as f64,
                                    Pending::OutRepeat => d_out as f64,
                                };
                                if pend_mult == 0.0 {
                                    continue;
                                }
                                let mark_mult = if stop.is_some() {
                                    (w - d_in) as f64
                                } else {
                                    1.0
                                };
                                if mark_mult == 0.0 {
                                    continue;
                                }
                                // Bit labels of distinct outside indices.
                                for d_out1 in 0..=d_out {
                                    let mult = tables.c(m, t_in)
                                        * tables.c(w, d_in)
                                        * tables.surj[t_in][d_in]
                                        * tables.c(n - w, d_out)
                                        * tables.surj[t_out][d_out]
                                        * tables.c(d_out, d_out1)
                                        * mark_mult
                                        * pend_mult;
                                    if mult == 0.0 {
                                        continue;
                                    }
                                    // The pending fresh-outside bit stays
                                    // free: both values counted by free_out
                                    // plus the unpinned pending index.
                                    let out_pool = match pending {
                                        Pending::OutFresh => free_out + 1,
                                        _ => free_out,
                                    };
                                    let scale = (1u64 << out_pool) as f64;
                                    let q1 = if stop.is_none() {
                                        group[0] * scale / m1
                                    } else {
                                        0.0
                                    };
                                    let q0: f64 = (1..=w)
                                        .map(|k| group[k] * scale)
                                        .sum::<f64>()
                                        / m0;
                                    if q1 > 0.0 {
                                        h_transcript[1] += mult * entropy_term(q1);
                                        total_mass[1] += mult * q1;
                                    }
                                    if q0 > 0.0 && m0 > 0.0 {
                                        h_transcript[0] += mult * entropy_term(q0);
                                        total_mass[0] += mult * q0;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        if (total_mass[1] - 1.0).abs() > 1e-9 {
            return Err(Error::Numerical(format!(
                "transcript classes for weight {w} sum to {} on disjoint inputs",
                total_mass[1]
            )));
        }
        if w > 0 && (total_mass[0] - 1.0).abs() > 1e-9 {
            return Err(Error::Numerical(format!(
                "transcript classes for weight {w} sum to {} on intersecting inputs",
                total_mass[0]
            )));
        }
        let slice = p_v1 * (h_transcript[1] - h_given_both[1])
            + (1.0 - p_v1) * (h_transcript[0] - h_given_both[0]);
        loss += p_w * slice;
    }
    Ok(loss.max(0.0))
}

fn subsets_of_size(universe: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(start: usize, universe: usize, size: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for i in start..universe {
            current.push(i);
            rec(i + 1, universe, size, current, out);
            current.pop();
        }
    }
    rec(0, universe, size, &mut current, &mut out);
    out
}
