//! Protocol representations and exact execution engines.
//!
//! Three protocol classes share one evaluation interface: deterministic
//! message trees, seed mixtures over them, and quantum round protocols. The
//! unifying object is the per-boundary player view: a mixture over classical
//! histories of (optionally) quantum reduced states, from which the privacy
//! module builds classical-quantum states.

mod classical;
mod quantum;

pub use classical::{
    boost, build_protocol, sparsify_public_coin, CoinVisibility, DeterministicProtocol, EvalOutcome,
    Node, NodeSpec, RandomizedProtocol,
};
pub use quantum::{
    AnnounceGen, BoundarySnapshot, ExecutionResult, FinalBranch, OutputRule, QAction, QStep,
    QuantumProtocol, RegisterDecl, UnitaryGen, Visibility,
};

use crate::infotheory::ProbDist;
use crate::qstate::DensityMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Al,
    Bob,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Al => Player::Bob,
            Player::Bob => Player::Al,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::Al => 0,
            Player::Bob => 1,
        }
    }
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Player::Al => write!(f, "al"),
            Player::Bob => write!(f, "bob"),
        }
    }
}

/// A protocol output: a value from the function alphabet or a give-up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Output {
    Value(usize),
    Abort,
}

impl std::fmt::Display for Output {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Output::Value(v) => write!(f, "{v}"),
            Output::Abort => write!(f, "abort"),
        }
    }
}

/// The communication matrix of a finite function f(x, y), stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<usize>,
}

impl CommMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<usize>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("communication matrix must be nonempty".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for x in 0..rows {
            for y in 0..cols {
                entries.push(f(x, y));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> usize {
        self.entries[x * self.cols + y]
    }

    /// Sorted distinct output values.
    pub fn alphabet(&self) -> Vec<usize> {
        let mut a = self.entries.clone();
        a.sort_unstable();
        a.dedup();
        a
    }

    /// Input bit length when both sides are powers of two of equal size.
    pub fn input_bits(&self) -> Option<usize> {
        if self.rows == self.cols && self.rows.is_power_of_two() {
            Some(self.rows.trailing_zeros() as usize)
        } else {
            None
        }
    }

    /// The y values equivalent to `y` for leakage against the row player:
    /// those with f(x, y') = f(x, y) for the given x.
    pub fn matching_cols(&self, x: usize, y: usize) -> Vec<usize> {
        let v = self.get(x, y);
        (0..self.cols).filter(|&y2| self.get(x, y2) == v).collect()
    }

    pub fn matching_rows(&self, x: usize, y: usize) -> Vec<usize> {
        let v = self.get(x, y);
        (0..self.rows).filter(|&x2| self.get(x2, y) == v).collect()
    }
}

/// One classical history in a player's view: the shared transcript, the
/// player's private outcome record, its probability, and the quantum state of
/// the registers the player holds (None for classical protocols).
#[derive(Debug, Clone)]
pub struct ViewComponent {
    pub shared: Vec<usize>,
    pub records: Vec<usize>,
    pub weight: f64,
    pub state: Option<DensityMatrix>,
}

/// A player's complete view at one round boundary for one input pair.
#[derive(Debug, Clone)]
pub struct PlayerView {
    pub components: Vec<ViewComponent>,
}

impl PlayerView {
    /// Total probability mass (1 up to pruning).
    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|c| c.weight).sum()
    }
}

/// Uniform evaluation interface for privacy analysis: per input pair and
/// round boundary, each player's view.
pub trait ProtocolViews {
    /// (|X|, |Y|).
    fn input_ranges(&self) -> (usize, usize);

    /// Number of round boundaries (after each message delivery and after each
    /// measurement). Views requested past a shorter execution path absorb at
    /// that path's final state.
    fn n_boundaries(&self) -> usize;

    /// The view of `player` at `boundary` when the inputs are (x, y).
    fn views_at(&self, x: usize, y: usize, boundary: usize, player: Player) -> Result<PlayerView>;

    /// Both players' views at every boundary for one input pair. Engines that
    /// can produce all boundaries in one pass override this.
    fn all_views(&self, x: usize, y: usize) -> Result<Vec<[PlayerView; 2]>> {
        (0..self.n_boundaries())
            .map(|b| {
                Ok([
                    self.views_at(x, y, b, Player::Al)?,
                    self.views_at(x, y, b, Player::Bob)?,
                ])
            })
            .collect()
    }
}

/// Validates that a distribution over input pairs matches a matrix shape.
pub fn check_input_dist(f: &CommMatrix, mu: &ProbDist) -> Result<()> {
    for (label, w) in mu.iter() {
        if label.len() != 2 {
            return Err(Error::InvalidArgument("input distribution labels must be (x, y)".into()));
        }
        if w > 0.0 && (label[0] >= f.rows() || label[1] >= f.cols()) {
            return Err(Error::InvalidArgument(format!(
                "input pair ({}, {}) outside {}x{} matrix",
                label[0],
                label[1],
                f.rows(),
                f.cols()
            )));
        }
    }
    Ok(())
}
