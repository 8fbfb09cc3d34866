//! Deterministic message trees and seed mixtures over them.

use super::{CommMatrix, Output, Player, PlayerView, ProtocolViews, ViewComponent};
use crate::infotheory::ProbDist;
use crate::{Error, Result};
use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

const NODE_BUDGET: usize = 1 << 22;
const SEED_BUDGET: usize = 1 << 20;

/// A node of a deterministic protocol tree.
#[derive(Debug, Clone)]
pub enum Node {
    /// One message: the owner maps their input to a child edge symbol.
    Speak {
        owner: Player,
        /// Bits charged for this message.
        bit_cost: usize,
        /// Symbol per owner input value (meaningful on reachable inputs).
        message: Vec<usize>,
        children: BTreeMap<usize, usize>,
    },
    Leaf { output: Output },
}

/// A two-party deterministic protocol as a rooted message tree.
#[derive(Debug, Clone)]
pub struct DeterministicProtocol {
    n_x: usize,
    n_y: usize,
    nodes: Vec<Node>,
    root: usize,
    max_depth: usize,
}

/// What happens at one transcript position, produced by protocol builders.
pub enum NodeSpec {
    /// The owner sends a message chosen by their input.
    Speak {
        owner: Player,
        bit_cost: usize,
        message: Box<dyn Fn(usize) -> usize>,
    },
    /// The protocol ends with this output.
    Done { output: Output },
}

/// Builds the reachable protocol tree by walking transcripts. `spec` sees the
/// transcript so far plus the sets of inputs consistent with it and decides
/// the next step. Unreachable inputs never constrain the tree.
pub fn build_protocol(
    n_x: usize,
    n_y: usize,
    spec: &dyn Fn(&[usize], &[usize], &[usize]) -> Result<NodeSpec>,
) -> Result<DeterministicProtocol> {
    if n_x == 0 || n_y == 0 {
        return Err(Error::InvalidArgument("empty input range".into()));
    }
    let mut nodes: Vec<Node> = Vec::new();
    let mut max_depth = 0usize;
    // Stack of (node slot, transcript, live x, live y).
    struct Frame {
        slot: usize,
        transcript: Vec<usize>,
        xs: Vec<usize>,
        ys: Vec<usize>,
    }
    nodes.push(Node::Leaf { output: Output::Abort });
    let mut stack = vec![Frame {
        slot: 0,
        transcript: Vec::new(),
        xs: (0..n_x).collect(),
        ys: (0..n_y).collect(),
    }];
    while let Some(frame) = stack.pop() {
        max_depth = max_depth.max(frame.transcript.len());
        match spec(&frame.transcript, &frame.xs, &frame.ys)? {
            NodeSpec::Done { output } => {
                nodes[frame.slot] = Node::Leaf { output };
            }
            NodeSpec::Speak { owner, bit_cost, message } => {
                let live: &[usize] = match owner {
                    Player::Al => &frame.xs,
                    Player::Bob => &frame.ys,
                };
                let n_own = match owner {
                    Player::Al => n_x,
                    Player::Bob => n_y,
                };
                let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for &v in live {
                    groups.entry(message(v)).or_default().push(v);
                }
                let filler = *groups
                    .keys()
                    .next()
                    .ok_or_else(|| Error::InvalidState("node with no live inputs".into()))?;
                let mut table = vec![filler; n_own];
                for &v in live {
                    table[v] = message(v);
                }
                let mut children = BTreeMap::new();
                for (sym, members) in groups {
                    if nodes.len() >= NODE_BUDGET {
                        return Err(Error::Resource(format!("protocol tree exceeds {NODE_BUDGET} nodes")));
                    }
                    let slot = nodes.len();
                    nodes.push(Node::Leaf { output: Output::Abort });
                    children.insert(sym, slot);
                    let mut transcript = frame.transcript.clone();
                    transcript.push(sym);
                    let (xs, ys) = match owner {
                        Player::Al => (members, frame.ys.clone()),
                        Player::Bob => (frame.xs.clone(), members),
                    };
                    stack.push(Frame { slot, transcript, xs, ys });
                }
                nodes[frame.slot] = Node::Speak { owner, bit_cost, message: table, children };
            }
        }
    }
    Ok(DeterministicProtocol { n_x, n_y, nodes, root: 0, max_depth })
}

/// Result of running a deterministic protocol on one input pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalOutcome {
    pub output: Output,
    pub transcript: Vec<usize>,
    /// Total message bits charged along the path.
    pub bits: usize,
}

impl EvalOutcome {
    pub fn rounds(&self) -> usize {
        self.transcript.len()
    }
}

impl DeterministicProtocol {
    /// Single-leaf protocol with a constant output.
    pub fn constant(n_x: usize, n_y: usize, output: Output) -> Self {
        Self { n_x, n_y, nodes: vec![Node::Leaf { output }], root: 0, max_depth: 0 }
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Tree nodes in construction order; child indices point into this slice.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// Runs the protocol. Errors if the tree's message function points at a
    /// missing child (malformed tree).
    pub fn eval(&self, x: usize, y: usize) -> Result<EvalOutcome> {
        if x >= self.n_x || y >= self.n_y {
            return Err(Error::InvalidArgument(format!("input ({x}, {y}) out of range")));
        }
        let mut node = self.root;
        let mut transcript = Vec::new();
        let mut bits = 0usize;
        loop {
            match &self.nodes[node] {
                Node::Leaf { output } => {
                    return Ok(EvalOutcome { output: *output, transcript, bits });
                }
                Node::Speak { owner, bit_cost, message, children } => {
                    let own = match owner {
                        Player::Al => x,
                        Player::Bob => y,
                    };
                    let sym = message[own];
                    let child = children.get(&sym).ok_or_else(|| {
                        Error::InvalidState(format!("message symbol {sym} has no child edge"))
                    })?;
                    transcript.push(sym);
                    bits += bit_cost;
                    node = *child;
                }
            }
        }
    }

    /// Probability of not outputting f(x, y), under mu. Abort counts as error.
    pub fn error_on(&self, f: &CommMatrix, mu: &ProbDist) -> Result<f64> {
        super::check_input_dist(f, mu)?;
        let mut err = 0.0;
        for (label, w) in mu.iter() {
            if w == 0.0 {
                continue;
            }
            let out = self.eval(label[0], label[1])?.output;
            if out != Output::Value(f.get(label[0], label[1])) {
                err += w;
            }
        }
        Ok(err)
    }

    /// Worst-case message bits over all input pairs.
    pub fn max_bits(&self) -> Result<usize> {
        let mut worst = 0;
        for x in 0..self.n_x {
            for y in 0..self.n_y {
                worst = worst.max(self.eval(x, y)?.bits);
            }
        }
        Ok(worst)
    }

    /// Worst-case rounds (messages sent) over all input pairs.
    pub fn max_rounds(&self) -> Result<usize> {
        let mut worst = 0;
        for x in 0..self.n_x {
            for y in 0..self.n_y {
                worst = worst.max(self.eval(x, y)?.rounds());
            }
        }
        Ok(worst)
    }
}

impl ProtocolViews for DeterministicProtocol {
    fn input_ranges(&self) -> (usize, usize) {
        (self.n_x, self.n_y)
    }

    fn n_boundaries(&self) -> usize {
        self.max_depth
    }

    fn views_at(&self, x: usize, y: usize, boundary: usize, _player: Player) -> Result<PlayerView> {
        if boundary >= self.max_depth {
            return Err(Error::InvalidArgument(format!("boundary {boundary} out of range")));
        }
        let full = self.eval(x, y)?.transcript;
        let cut = full.len().min(boundary + 1);
        Ok(PlayerView {
            components: vec![ViewComponent {
                shared: full[..cut].to_vec(),
                records: Vec::new(),
                weight: 1.0,
                state: None,
            }],
        })
    }
}

/// Whether protocol randomness is a shared public coin or has been moved into
/// the first player's private coin (announced in-band).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinVisibility {
    Public,
    PrivateSplit,
}

/// A mixture of deterministic protocols. Privacy accounting treats the
/// realized seed as visible (public coin, or announced private coin); views
/// prepend the seed index to the transcript.
#[derive(Debug, Clone)]
pub struct RandomizedProtocol {
    seeds: Vec<(f64, DeterministicProtocol)>,
    visibility: CoinVisibility,
}

impl RandomizedProtocol {
    pub fn new(seeds: Vec<(f64, DeterministicProtocol)>, visibility: CoinVisibility) -> Result<Self> {
        let first = seeds.first().ok_or_else(|| Error::InvalidArgument("empty seed list".into()))?;
        let (n_x, n_y) = (first.1.n_x, first.1.n_y);
        let mut total = 0.0;
        for (w, p) in &seeds {
            if *w < 0.0 {
                return Err(Error::InvalidArgument("negative seed probability".into()));
            }
            if p.n_x != n_x || p.n_y != n_y {
                return Err(Error::DimensionMismatch("seeds with different input ranges".into()));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("seed probabilities sum to {total}")));
        }
        Ok(Self { seeds, visibility })
    }

    pub fn seeds(&self) -> &[(f64, DeterministicProtocol)] {
        &self.seeds
    }

    pub fn visibility(&self) -> CoinVisibility {
        self.visibility
    }

    pub fn error_on(&self, f: &CommMatrix, mu: &ProbDist) -> Result<f64> {
        let mut err = 0.0;
        for (w, p) in &self.seeds {
            if *w > 0.0 {
                err += w * p.error_on(f, mu)?;
            }
        }
        Ok(err)
    }

    /// Seed-expected worst-case communication bits.
    pub fn expected_max_bits(&self) -> Result<f64> {
        let mut bits = 0.0;
        for (w, p) in &self.seeds {
            bits += w * p.max_bits()? as f64;
        }
        Ok(bits)
    }
}

impl ProtocolViews for RandomizedProtocol {
    fn input_ranges(&self) -> (usize, usize) {
        let p = &self.seeds[0].1;
        (p.n_x, p.n_y)
    }

    fn n_boundaries(&self) -> usize {
        self.seeds.iter().map(|(_, p)| p.max_depth).max().unwrap_or(0)
    }

    fn views_at(&self, x: usize, y: usize, boundary: usize, player: Player) -> Result<PlayerView> {
        let mut components = Vec::new();
        for (idx, (w, p)) in self.seeds.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            // Shorter seeds absorb: their view past the end is the final one.
            let b = boundary.min(p.max_depth.saturating_sub(1));
            let inner = if p.max_depth == 0 {
                PlayerView {
                    components: vec![ViewComponent {
                        shared: Vec::new(),
                        records: Vec::new(),
                        weight: 1.0,
                        state: None,
                    }],
                }
            } else {
                p.views_at(x, y, b, player)?
            };
            for c in inner.components {
                let mut shared = Vec::with_capacity(c.shared.len() + 1);
                shared.push(idx);
                shared.extend_from_slice(&c.shared);
                components.push(ViewComponent { shared, weight: w * c.weight, ..c });
            }
        }
        Ok(PlayerView { components })
    }
}

fn majority(votes: &[Output]) -> Output {
    let mut counts: BTreeMap<Output, usize> = BTreeMap::new();
    for v in votes {
        *counts.entry(*v).or_insert(0) += 1;
    }
    // Highest count wins; ties break toward the smallest value, with Abort
    // losing to any value (Ord puts Value(_) before Abort).
    let mut best = Output::Abort;
    let mut best_count = 0;
    for (out, count) in counts {
        if count > best_count {
            best = out;
            best_count = count;
        }
    }
    best
}

fn chain_trees(trees: &[&DeterministicProtocol]) -> Result<DeterministicProtocol> {
    let (n_x, n_y) = (trees[0].n_x, trees[0].n_y);
    let mut nodes: Vec<Node> = Vec::new();
    let mut max_depth = 0usize;

    fn copy(
        trees: &[&DeterministicProtocol],
        stage: usize,
        src: usize,
        depth: usize,
        votes: &mut Vec<Output>,
        nodes: &mut Vec<Node>,
        max_depth: &mut usize,
    ) -> Result<usize> {
        if nodes.len() >= NODE_BUDGET {
            return Err(Error::Resource(format!("boosted tree exceeds {NODE_BUDGET} nodes")));
        }
        match &trees[stage].nodes[src] {
            Node::Leaf { output } => {
                votes.push(*output);
                let slot = if stage + 1 < trees.len() {
                    copy(trees, stage + 1, trees[stage + 1].root, depth, votes, nodes, max_depth)?
                } else {
                    *max_depth = (*max_depth).max(depth);
                    let slot = nodes.len();
                    nodes.push(Node::Leaf { output: majority(votes) });
                    slot
                };
                votes.pop();
                Ok(slot)
            }
            Node::Speak { owner, bit_cost, message, children } => {
                let slot = nodes.len();
                nodes.push(Node::Leaf { output: Output::Abort });
                let mut new_children = BTreeMap::new();
                for (&sym, &child) in children {
                    let c = copy(trees, stage, child, depth + 1, votes, nodes, max_depth)?;
                    new_children.insert(sym, c);
                }
                nodes[slot] = Node::Speak {
                    owner: *owner,
                    bit_cost: *bit_cost,
                    message: message.clone(),
                    children: new_children,
                };
                Ok(slot)
            }
        }
    }

    let mut votes = Vec::new();
    let root = copy(trees, 0, trees[0].root, 0, &mut votes, &mut nodes, &mut max_depth)?;
    Ok(DeterministicProtocol { n_x, n_y, nodes, root, max_depth })
}

/// Runs the protocol t times on independent seeds and outputs the majority.
/// Seed tuples are materialized, so t and the seed count must stay small.
pub fn boost(r: &RandomizedProtocol, t: usize) -> Result<RandomizedProtocol> {
    if t % 2 == 0 || t == 0 {
        return Err(Error::InvalidArgument(format!("repetition count {t} must be odd")));
    }
    if t == 1 {
        return Ok(r.clone());
    }
    let k = r.seeds.len();
    let tuples = k.checked_pow(t as u32).filter(|&n| n <= SEED_BUDGET).ok_or_else(|| {
        Error::Resource(format!("boost would create {k}^{t} seeds (budget {SEED_BUDGET})"))
    })?;
    let mut seeds = Vec::with_capacity(tuples);
    let mut index = vec![0usize; t];
    loop {
        let mut prob = 1.0;
        let trees: Vec<&DeterministicProtocol> = index
            .iter()
            .map(|&i| {
                prob *= r.seeds[i].0;
                &r.seeds[i].1
            })
            .collect();
        if prob > 0.0 {
            seeds.push((prob, chain_trees(&trees)?));
        }
        // Odometer increment over seed tuples.
        let mut pos = 0;
        loop {
            if pos == t {
                return RandomizedProtocol::new(seeds, r.visibility);
            }
            index[pos] += 1;
            if index[pos] < k {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
}

/// Replaces a public-coin protocol by a uniform mixture over k sampled seeds,
/// each prefixed with Al announcing the sampled index (⌈log₂ k⌉ bits).
pub fn sparsify_public_coin(r: &RandomizedProtocol, k: usize, rng_seed: u64) -> Result<RandomizedProtocol> {
    if r.visibility != CoinVisibility::Public {
        return Err(Error::InvalidArgument("sparsification applies to public-coin protocols".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("seed count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let weights: Vec<f64> = r.seeds.iter().map(|(w, _)| *w).collect();
    let picker = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidArgument(format!("bad seed weights: {e}")))?;
    let index_bits = (k as f64).log2().ceil() as usize;
    let mut seeds = Vec::with_capacity(k);
    for j in 0..k {
        let chosen = &r.seeds[picker.sample(&mut rng)].1;
        if k == 1 {
            seeds.push((1.0, chosen.clone()));
            break;
        }
        // Prefix node: Al announces the index j, then the chosen seed runs.
        let mut nodes = vec![Node::Leaf { output: Output::Abort }];
        let offset = nodes.len();
        nodes.extend(chosen.nodes.iter().cloned().map(|n| match n {
            Node::Speak { owner, bit_cost, message, children } => Node::Speak {
                owner,
                bit_cost,
                message,
                children: children.into_iter().map(|(s, c)| (s, c + offset)).collect(),
            },
            leaf => leaf,
        }));
        nodes[0] = Node::Speak {
            owner: Player::Al,
            bit_cost: index_bits,
            message: vec![j; chosen.n_x],
            children: [(j, chosen.root + offset)].into_iter().collect(),
        };
        seeds.push((
            1.0 / k as f64,
            DeterministicProtocol {
                n_x: chosen.n_x,
                n_y: chosen.n_y,
                nodes,
                root: 0,
                max_depth: chosen.max_depth + 1,
            },
        ));
    }
    RandomizedProtocol::new(seeds, CoinVisibility::PrivateSplit)
}
