//! Protocols for the identified-minimum function on n-bit inputs: both
//! players learn min(x, y) together with which side holds it, encoded as
//! 2x+1 when x ≤ y and 2y otherwise.
//!
//! Three constructions share one query language ("is z ≥ y?"):
//!
//! - [`idmin_private`] scans z = 0, 1, 2, ... and is exact with zero privacy
//!   loss, at worst-case cost 2(2^n − 1) messages.
//! - [`idmin_leaky_uniform`] probes geometrically spaced query values,
//!   halving the live interval level by level, and stops after
//!   ⌈log₂(1/δ)⌉ levels. Exponentially cheaper, with error and expected
//!   leakage both controlled by δ.
//! - [`idmin_leaky_adapted`] keeps the geometric query ranks but maps them
//!   through quantiles of a per-x conditional distribution on y, so queries
//!   concentrate where the mass is.

use crate::model::{build_protocol, CommMatrix, DeterministicProtocol, NodeSpec, Output, Player};
use crate::{Error, Result};

const MAX_BITS: usize = 10;

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_BITS {
        return Err(Error::InvalidArgument(format!(
            "input width {n} bits outside 1..={MAX_BITS}"
        )));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("error budget δ = {delta} outside (0, 1)")));
    }
    Ok(())
}

fn value(x: usize, y: usize) -> usize {
    if x <= y {
        2 * x + 1
    } else {
        2 * y
    }
}

/// 2x+1 where x ≤ y, else 2y.
pub fn idmin_matrix(n: usize) -> Result<CommMatrix> {
    check_n(n)?;
    let size = 1usize << n;
    Ok(CommMatrix::from_fn(size, size, value))
}

/// The single function value on the live rectangle, if there is one.
fn rect_value(xs: &[usize], ys: &[usize]) -> Option<usize> {
    let v = value(xs[0], ys[0]);
    for &x in xs {
        for &y in ys {
            if value(x, y) != v {
                return None;
            }
        }
    }
    Some(v)
}

/// Exact protocol: for z = 0, 1, 2, ... Al spends one bit on whether z < x
/// and Bob one bit on whether z ≥ y, until the live rectangle is
/// monochromatic. The transcript is a function of (y, f) and of (x, f), so
/// the privacy loss is zero on every distribution; the worst case (both
/// inputs maximal) takes exactly 2(2^n − 1) messages.
pub fn idmin_private(n: usize) -> Result<DeterministicProtocol> {
    check_n(n)?;
    let size = 1usize << n;
    build_protocol(size, size, &|t, xs, ys| {
        if let Some(v) = rect_value(xs, ys) {
            return Ok(NodeSpec::Done { output: Output::Value(v) });
        }
        let z = t.len() / 2;
        if t.len() % 2 == 0 {
            Ok(NodeSpec::Speak {
                owner: Player::Al,
                bit_cost: 1,
                message: Box::new(move |x| usize::from(x > z)),
            })
        } else {
            Ok(NodeSpec::Speak {
                owner: Player::Bob,
                bit_cost: 1,
                message: Box::new(move |y| usize::from(z >= y)),
            })
        }
    })
}

/// How one level of a leaky schedule behaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum LevelKind {
    /// Geometrically ranked queries, ending in announce-or-recurse.
    Scheduled,
    /// Consecutive queries over whatever interval is still live (exact).
    Fallback,
    /// Level budget exhausted: abort here.
    Stopped,
}

/// One recursion level of a leaky query schedule.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LevelPlan {
    /// Geometric growth rate of the query ranks, δ/(16·n_rem).
    pub gamma: f64,
    /// Bits of input range nominally unresolved at this level.
    pub n_rem: usize,
    /// Nominal start of the unresolved interval.
    pub lo: usize,
    /// Branch point: x ≤ mid announces x, x > mid recurses.
    pub mid: usize,
    /// Query values, strictly increasing. Empty for fallback and stopped
    /// levels (fallback queries depend on the live sets, not on a schedule).
    pub queries: Vec<usize>,
    pub kind: LevelKind,
}

/// The per-level query plan behind a leaky protocol.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct QuerySchedule {
    pub delta: f64,
    pub levels: Vec<LevelPlan>,
}

/// Ranks ⌈(1+γ)^i⌉ for i = 0, 1, ..., deduplicated, stopping at cap.
fn geometric_ranks(gamma: f64, cap: usize) -> Vec<usize> {
    let mut ranks = Vec::new();
    let mut p = 1.0_f64;
    loop {
        let l = p.ceil() as usize;
        if l >= cap {
            break;
        }
        if ranks.last() != Some(&l) {
            ranks.push(l);
        }
        p *= 1.0 + gamma;
    }
    ranks
}

/// Levels shared by every leaky variant: scheduled while more than three
/// bits remain and the level budget ⌈log₂(1/δ)⌉ allows, then a fallback or a
/// stop. The stop check comes first: a stopped protocol aborts even when the
/// interval is small enough to fall back.
fn plan_levels(
    n: usize,
    delta: f64,
    queries_for: &mut dyn FnMut(usize, usize, f64) -> (Vec<usize>, usize),
) -> Vec<LevelPlan> {
    let budget = (1.0 / delta).log2().ceil() as usize;
    let mut levels = Vec::new();
    let mut lo = 0usize;
    let mut n_rem = n;
    for level in 0.. {
        if level >= budget {
            levels.push(LevelPlan {
                gamma: 0.0,
                n_rem,
                lo,
                mid: lo,
                queries: Vec::new(),
                kind: LevelKind::Stopped,
            });
            break;
        }
        if n_rem <= 3 {
            levels.push(LevelPlan {
                gamma: 0.0,
                n_rem,
                lo,
                mid: lo,
                queries: Vec::new(),
                kind: LevelKind::Fallback,
            });
            break;
        }
        let gamma = delta / (16.0 * n_rem as f64);
        let (queries, mid) = queries_for(lo, n_rem, gamma);
        debug_assert!(queries.windows(2).all(|w| w[0] < w[1]));
        levels.push(LevelPlan { gamma, n_rem, lo, mid, queries, kind: LevelKind::Scheduled });
        lo = mid;
        n_rem -= 1;
    }
    levels
}

/// Schedule for uniform inputs: level queries sit at lo + rank and the
/// branch point halves the interval.
pub fn uniform_query_schedule(n: usize, delta: f64) -> Result<QuerySchedule> {
    check_n(n)?;
    check_delta(delta)?;
    let levels = plan_levels(n, delta, &mut |lo, n_rem, gamma| {
        let half = 1usize << (n_rem - 1);
        let queries = geometric_ranks(gamma, half).into_iter().map(|l| lo + l).collect();
        (queries, lo + half)
    });
    Ok(QuerySchedule { delta, levels })
}

/// Least r > lo with μ({lo+1..r}) ≥ rank·μ({lo, ...})/2^n_rem, capped at the
/// top of the domain. On the uniform distribution this is exactly lo + rank.
fn quantile(mu: &[f64], lo: usize, n_rem: usize, rank: usize) -> usize {
    let tail: f64 = mu[lo..].iter().sum();
    let need = rank as f64 * tail / (1u64 << n_rem) as f64;
    let mut acc = 0.0;
    for r in lo + 1..mu.len() {
        acc += mu[r];
        if acc >= need - 1e-12 {
            return r;
        }
    }
    mu.len() - 1
}

/// Schedule adapted to one conditional distribution μ(y|x): the geometric
/// ranks are mapped through μ-quantiles of the unresolved interval, so
/// queries crowd where μ puts mass. On uniform μ this reproduces
/// [`uniform_query_schedule`]; on a point mass at y₀ ≥ 1 every rank maps to
/// y₀ and each level queries it once.
pub fn adapted_query_schedule(n: usize, delta: f64, mu: &[f64]) -> Result<QuerySchedule> {
    check_n(n)?;
    check_delta(delta)?;
    let size = 1usize << n;
    if mu.len() != size {
        return Err(Error::DimensionMismatch(format!(
            "conditional has {} weights, domain has {size}",
            mu.len()
        )));
    }
    if mu.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidArgument("conditional weights must be nonnegative".into()));
    }
    let total: f64 = mu.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!("conditional sums to {total}, not 1")));
    }
    let levels = plan_levels(n, delta, &mut |lo, n_rem, gamma| {
        let half = 1usize << (n_rem - 1);
        let mid = quantile(mu, lo, n_rem, half);
        let mut queries: Vec<usize> = Vec::new();
        for l in geometric_ranks(gamma, half) {
            let z = quantile(mu, lo, n_rem, l);
            if queries.last().is_none_or(|&q| z > q) {
                queries.push(z);
            }
        }
        (queries, mid)
    });
    Ok(QuerySchedule { delta, levels })
}

/// How ask messages are encoded.
enum AskMode<'a> {
    /// One shared schedule: asks are 1-bit continue/end flags since the
    /// queried value follows from the transcript position.
    Positional(&'a QuerySchedule),
    /// Per-x schedules: each ask carries the queried value (0 means end).
    Explicit(&'a [QuerySchedule]),
}

impl AskMode<'_> {
    fn structure(&self) -> &[LevelPlan] {
        match self {
            AskMode::Positional(s) => &s.levels,
            // Level kinds depend only on (n, δ), so any row describes the
            // level structure.
            AskMode::Explicit(s) => &s[0].levels,
        }
    }
}

/// Where a transcript stands in the level state machine.
#[derive(Debug, Clone, Copy)]
enum Phase {
    Ask { lv: usize, qi: usize },
    Answer { lv: usize, qi: usize, z: usize },
    Branch { lv: usize },
    AnnounceX,
    RevealY,
    FallbackAsk,
    FallbackAnswer,
    Done(Output),
}

fn enter_level(structure: &[LevelPlan], lv: usize) -> Phase {
    match structure[lv].kind {
        LevelKind::Stopped => Phase::Done(Output::Abort),
        LevelKind::Fallback => Phase::FallbackAsk,
        LevelKind::Scheduled => Phase::Ask { lv, qi: 0 },
    }
}

/// In positional mode an exhausted query list skips straight to the branch
/// node; in explicit mode exhaustion is per input, signalled by symbol 0.
fn normalize(mode: &AskMode, phase: Phase) -> Phase {
    if let (AskMode::Positional(s), Phase::Ask { lv, qi }) = (mode, phase) {
        if qi >= s.levels[lv].queries.len() {
            return Phase::Branch { lv };
        }
    }
    phase
}

fn walk(mode: &AskMode, t: &[usize]) -> Result<Phase> {
    let structure = mode.structure();
    let mut phase = normalize(mode, enter_level(structure, 0));
    for &sym in t {
        phase = match phase {
            Phase::Ask { lv, qi } => match mode {
                AskMode::Positional(s) => {
                    if sym == 1 {
                        Phase::Answer { lv, qi, z: s.levels[lv].queries[qi] }
                    } else {
                        Phase::Branch { lv }
                    }
                }
                AskMode::Explicit(_) => {
                    if sym == 0 {
                        Phase::Branch { lv }
                    } else {
                        Phase::Answer { lv, qi, z: sym }
                    }
                }
            },
            Phase::Answer { lv, qi, .. } => {
                if sym == 0 {
                    normalize(mode, Phase::Ask { lv, qi: qi + 1 })
                } else {
                    Phase::RevealY
                }
            }
            Phase::Branch { lv } => {
                if sym == 0 {
                    Phase::AnnounceX
                } else {
                    normalize(mode, enter_level(structure, lv + 1))
                }
            }
            Phase::AnnounceX => Phase::Done(Output::Value(2 * sym + 1)),
            Phase::RevealY => Phase::Done(Output::Value(2 * sym)),
            // Fallback ends (Al done, or Bob yes) pin the rectangle to one
            // function value, so those children resolve monochromatically
            // before the walk is consulted.
            Phase::FallbackAsk => {
                if sym == 1 {
                    Phase::FallbackAnswer
                } else {
                    return Err(Error::InvalidState("fallback end without a resolved value".into()));
                }
            }
            Phase::FallbackAnswer => {
                if sym == 0 {
                    Phase::FallbackAsk
                } else {
                    return Err(Error::InvalidState("fallback hit without a resolved value".into()));
                }
            }
            Phase::Done(_) => {
                return Err(Error::InvalidState("transcript continues past a leaf".into()));
            }
        };
    }
    Ok(phase)
}

fn emit(mode: &AskMode, n: usize, phase: Phase, ys: &[usize]) -> NodeSpec {
    let speak = |owner, bit_cost, message: Box<dyn Fn(usize) -> usize>| NodeSpec::Speak {
        owner,
        bit_cost,
        message,
    };
    match phase {
        Phase::Done(output) => NodeSpec::Done { output },
        Phase::Ask { lv, qi } => match mode {
            AskMode::Positional(s) => {
                let z = s.levels[lv].queries[qi];
                speak(Player::Al, 1, Box::new(move |x| usize::from(z < x)))
            }
            AskMode::Explicit(scheds) => {
                let next: Vec<usize> = scheds
                    .iter()
                    .enumerate()
                    .map(|(x, s)| {
                        let q = &s.levels[lv].queries;
                        if qi < q.len() && q[qi] < x {
                            q[qi]
                        } else {
                            0
                        }
                    })
                    .collect();
                speak(Player::Al, n, Box::new(move |x| next[x]))
            }
        },
        Phase::Answer { z, .. } => speak(Player::Bob, 1, Box::new(move |y| usize::from(z >= y))),
        Phase::Branch { lv } => match mode {
            AskMode::Positional(s) => {
                let mid = s.levels[lv].mid;
                speak(Player::Al, 1, Box::new(move |x| usize::from(x > mid)))
            }
            AskMode::Explicit(scheds) => {
                let mids: Vec<usize> = scheds.iter().map(|s| s.levels[lv].mid).collect();
                speak(Player::Al, 1, Box::new(move |x| usize::from(x > mids[x])))
            }
        },
        Phase::AnnounceX => speak(Player::Al, n, Box::new(|x| x)),
        Phase::RevealY => speak(Player::Bob, n, Box::new(|y| y)),
        // The fallback queries min(live ys), min(live ys)+1, ... so a yes
        // pins y exactly and an end pins x exactly. The live minimum is
        // transcript-determined, hence known to both players.
        Phase::FallbackAsk | Phase::FallbackAnswer => {
            let z = *ys.iter().min().expect("live set nonempty");
            match phase {
                Phase::FallbackAsk => speak(Player::Al, 1, Box::new(move |x| usize::from(x > z))),
                _ => speak(Player::Bob, 1, Box::new(move |y| usize::from(z >= y))),
            }
        }
    }
}

fn leaky_tree(n: usize, mode: &AskMode) -> Result<DeterministicProtocol> {
    let size = 1usize << n;
    build_protocol(size, size, &|t, xs, ys| {
        if let Some(v) = rect_value(xs, ys) {
            return Ok(NodeSpec::Done { output: Output::Value(v) });
        }
        Ok(emit(mode, n, walk(mode, t)?, ys))
    })
}

/// The leaky protocol for uniform inputs. Queries follow
/// [`uniform_query_schedule`]; each scheduled level spends one bit per ask
/// and answer, reveals y (n bits) on a hit, and otherwise announces x
/// (n bits) or recurses on the top half. Stops after ⌈log₂(1/δ)⌉ levels.
pub fn idmin_leaky_uniform(n: usize, delta: f64) -> Result<DeterministicProtocol> {
    let sched = uniform_query_schedule(n, delta)?;
    leaky_tree(n, &AskMode::Positional(&sched))
}

/// The leaky protocol adapted to conditional distributions μ(y|x), one row
/// per x. Al's queries follow his own row's quantile schedule, so each ask
/// carries the queried value explicitly (n bits) rather than a positional
/// flag.
pub fn idmin_leaky_adapted(
    n: usize,
    delta: f64,
    conditionals: &[Vec<f64>],
) -> Result<DeterministicProtocol> {
    check_n(n)?;
    check_delta(delta)?;
    let size = 1usize << n;
    if conditionals.len() != size {
        return Err(Error::DimensionMismatch(format!(
            "{} conditional rows for domain size {size}",
            conditionals.len()
        )));
    }
    let scheds: Vec<QuerySchedule> = conditionals
        .iter()
        .map(|row| adapted_query_schedule(n, delta, row))
        .collect::<Result<_>>()?;
    leaky_tree(n, &AskMode::Explicit(&scheds))
}
