//! Exact branch execution of quantum protocols.
//!
//! A protocol is a fixed sequence of steps over declared registers. The
//! engine keeps a weighted list of branches, each holding a pure state split
//! into tensor factors; factors merge only when a step spans them, so product
//! structure is preserved across independent registers. Measurements fork
//! branches per outcome. View boundaries sit after every send, measurement,
//! and announcement.

use super::{Output, Player, PlayerView, ProtocolViews, ViewComponent};
use crate::qstate::{dims_product, flatten, measure_standard, unflatten, CVec, DensityMatrix, PureState, Unitary};
use crate::{tol, Error, Result};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Builds the unitary for an apply step from the actor's input and the shared
/// transcript so far.
pub type UnitaryGen = Arc<dyn Fn(usize, &[usize]) -> Result<Unitary> + Send + Sync>;

/// Computes an announced classical symbol from the actor's input, the shared
/// transcript, and the actor's private records.
pub type AnnounceGen = Arc<dyn Fn(usize, &[usize], &[usize]) -> Result<usize> + Send + Sync>;

/// Maps (player, own input, shared transcript, own records) to that player's
/// output.
pub type OutputRule = Arc<dyn Fn(Player, usize, &[usize], &[usize]) -> Output + Send + Sync>;

#[derive(Debug, Clone)]
pub struct RegisterDecl {
    pub label: String,
    pub dim: usize,
    pub owner_at_start: Player,
}

/// Where a measurement outcome is recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Visibility {
    /// Appended to the transcript both players see.
    Shared,
    /// Appended to the measuring player's private records.
    Private,
}

#[derive(Clone)]
pub enum QAction {
    /// Unitary on the listed registers (in listed order).
    Apply { registers: Vec<usize>, gen: UnitaryGen },
    /// Standard-basis measurement of the listed registers; the flattened
    /// outcome becomes one classical symbol.
    Measure { registers: Vec<usize>, visibility: Visibility },
    /// Hand the listed registers to the other player.
    Send { registers: Vec<usize> },
    /// Append a classical symbol to the shared transcript.
    Announce { gen: AnnounceGen },
}

impl std::fmt::Debug for QAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QAction::Apply { registers, .. } => write!(f, "Apply({registers:?})"),
            QAction::Measure { registers, visibility } => {
                write!(f, "Measure({registers:?}, {visibility:?})")
            }
            QAction::Send { registers } => write!(f, "Send({registers:?})"),
            QAction::Announce { .. } => write!(f, "Announce"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct QStep {
    pub actor: Player,
    pub action: QAction,
}

/// One completed execution branch.
#[derive(Debug, Clone)]
pub struct FinalBranch {
    pub weight: f64,
    pub shared: Vec<usize>,
    pub records: [Vec<usize>; 2],
    pub outputs: [Output; 2],
}

/// Outcome branches of a full run. Branch weights plus the pruned mass sum
/// to 1 within [`tol::VALIDATION`].
#[derive(Debug, Clone)]
pub struct ExecutionResult {
    pub branches: Vec<FinalBranch>,
    pub pruned_mass: f64,
}

impl ExecutionResult {
    pub fn output_distribution(&self, player: Player) -> BTreeMap<Output, f64> {
        let mut dist = BTreeMap::new();
        for b in &self.branches {
            *dist.entry(b.outputs[player.index()]).or_insert(0.0) += b.weight;
        }
        dist
    }

    pub fn output_probability(&self, player: Player, output: Output) -> f64 {
        self.branches
            .iter()
            .filter(|b| b.outputs[player.index()] == output)
            .map(|b| b.weight)
            .sum()
    }
}

/// Both players' views at one boundary.
#[derive(Debug, Clone)]
pub struct BoundarySnapshot {
    pub label: String,
    pub step_index: usize,
    pub views: [PlayerView; 2],
}

#[derive(Clone)]
struct Factor {
    /// Register indices in the state's subsystem order (not sorted).
    regs: Vec<usize>,
    state: PureState,
}

#[derive(Clone)]
struct Branch {
    weight: f64,
    shared: Vec<usize>,
    records: [Vec<usize>; 2],
    factors: Vec<Factor>,
}

enum Recording {
    Nothing,
    All,
    Only(usize),
}

#[derive(Clone)]
pub struct QuantumProtocol {
    n_x: usize,
    n_y: usize,
    registers: Vec<RegisterDecl>,
    steps: Vec<QStep>,
    output_rule: OutputRule,
    dim_budget: usize,
    branch_budget: usize,
    /// Ownership before step i; last entry is final ownership.
    owner_at: Vec<Vec<Player>>,
    /// Whether a register has been touched by Apply/Measure before step i.
    active_at: Vec<Vec<bool>>,
    /// Steps that end a view boundary (Send, Measure, Announce).
    boundary_steps: Vec<usize>,
}

fn check_registers(regs: &[usize], n: usize) -> Result<()> {
    if regs.is_empty() {
        return Err(Error::InvalidArgument("step lists no registers".into()));
    }
    let mut seen = vec![false; n];
    for &r in regs {
        if r >= n {
            return Err(Error::InvalidArgument(format!("register {r} out of range")));
        }
        if seen[r] {
            return Err(Error::InvalidArgument(format!("register {r} repeated in one step")));
        }
        seen[r] = true;
    }
    Ok(())
}

impl QuantumProtocol {
    pub fn new(
        n_x: usize,
        n_y: usize,
        registers: Vec<RegisterDecl>,
        steps: Vec<QStep>,
        output_rule: OutputRule,
    ) -> Result<Self> {
        if n_x == 0 || n_y == 0 {
            return Err(Error::InvalidArgument("empty input range".into()));
        }
        for r in &registers {
            if r.dim == 0 {
                return Err(Error::InvalidArgument(format!("register {} has dimension 0", r.label)));
            }
        }
        let n = registers.len();
        let mut owner: Vec<Player> = registers.iter().map(|r| r.owner_at_start).collect();
        let mut active = vec![false; n];
        let mut owner_at = Vec::with_capacity(steps.len() + 1);
        let mut active_at = Vec::with_capacity(steps.len() + 1);
        let mut boundary_steps = Vec::new();
        for (i, step) in steps.iter().enumerate() {
            owner_at.push(owner.clone());
            active_at.push(active.clone());
            match &step.action {
                QAction::Apply { registers: regs, .. } | QAction::Measure { registers: regs, .. } => {
                    check_registers(regs, n)?;
                    for &r in regs {
                        if owner[r] != step.actor {
                            return Err(Error::InvalidArgument(format!(
                                "step {i}: {} does not hold register {r}",
                                step.actor
                            )));
                        }
                        active[r] = true;
                    }
                    if matches!(step.action, QAction::Measure { .. }) {
                        boundary_steps.push(i);
                    }
                }
                QAction::Send { registers: regs } => {
                    check_registers(regs, n)?;
                    for &r in regs {
                        if owner[r] != step.actor {
                            return Err(Error::InvalidArgument(format!(
                                "step {i}: {} cannot send register {r} they do not hold",
                                step.actor
                            )));
                        }
                        owner[r] = step.actor.other();
                    }
                    boundary_steps.push(i);
                }
                QAction::Announce { .. } => boundary_steps.push(i),
            }
        }
        owner_at.push(owner);
        active_at.push(active);
        Ok(Self {
            n_x,
            n_y,
            registers,
            steps,
            output_rule,
            dim_budget: tol::DEFAULT_DIM_BUDGET,
            branch_budget: tol::DEFAULT_BRANCH_BUDGET,
            owner_at,
            active_at,
            boundary_steps,
        })
    }

    pub fn with_budgets(mut self, dim_budget: usize, branch_budget: usize) -> Self {
        self.dim_budget = dim_budget;
        self.branch_budget = branch_budget;
        self
    }

    pub fn registers(&self) -> &[RegisterDecl] {
        &self.registers
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// The acting player of each view boundary, in boundary order.
    pub fn boundary_actors(&self) -> Vec<Player> {
        self.boundary_steps.iter().map(|&i| self.steps[i].actor).collect()
    }

    /// Runs the protocol to completion and applies the output rule.
    pub fn run(&self, x: usize, y: usize) -> Result<ExecutionResult> {
        let (branches, _, pruned_mass) = self.execute(x, y, Recording::Nothing)?;
        let branches = branches
            .into_iter()
            .map(|b| {
                let outputs = [
                    (self.output_rule)(Player::Al, x, &b.shared, &b.records[0]),
                    (self.output_rule)(Player::Bob, y, &b.shared, &b.records[1]),
                ];
                FinalBranch { weight: b.weight, shared: b.shared, records: b.records, outputs }
            })
            .collect();
        Ok(ExecutionResult { branches, pruned_mass })
    }

    /// Runs the protocol and records both players' views at every boundary.
    pub fn boundaries(&self, x: usize, y: usize) -> Result<Vec<BoundarySnapshot>> {
        let (_, snapshots, _) = self.execute(x, y, Recording::All)?;
        Ok(snapshots)
    }

    fn input_of(&self, player: Player, x: usize, y: usize) -> usize {
        match player {
            Player::Al => x,
            Player::Bob => y,
        }
    }

    fn execute(
        &self,
        x: usize,
        y: usize,
        rec: Recording,
    ) -> Result<(Vec<Branch>, Vec<BoundarySnapshot>, f64)> {
        if x >= self.n_x || y >= self.n_y {
            return Err(Error::InvalidArgument(format!("input ({x}, {y}) out of range")));
        }
        let mut branches = vec![Branch {
            weight: 1.0,
            shared: Vec::new(),
            records: [Vec::new(), Vec::new()],
            factors: self
                .registers
                .iter()
                .enumerate()
                .map(|(r, decl)| {
                    Ok(Factor { regs: vec![r], state: PureState::basis(vec![decl.dim], &[0])? })
                })
                .collect::<Result<Vec<_>>>()?,
        }];
        let mut pruned_mass = 0.0;
        let mut snapshots = Vec::new();
        let mut boundary_idx = 0usize;
        for (i, step) in self.steps.iter().enumerate() {
            let input = self.input_of(step.actor, x, y);
            match &step.action {
                QAction::Apply { registers, gen } => {
                    let want: usize = registers.iter().map(|&r| self.registers[r].dim).product();
                    for branch in &mut branches {
                        let u = gen(input, &branch.shared)?;
                        if u.dim() != want {
                            return Err(Error::DimensionMismatch(format!(
                                "step {i}: unitary dimension {} does not match registers {registers:?} (dimension {want})",
                                u.dim()
                            )));
                        }
                        let fi = self.merge_factors(branch, registers, i)?;
                        let factor = &mut branch.factors[fi];
                        let positions: Vec<usize> = registers
                            .iter()
                            .map(|r| factor.regs.iter().position(|q| q == r).unwrap())
                            .collect();
                        factor.state = factor.state.apply_unitary(&u, &positions)?;
                    }
                }
                QAction::Send { .. } => {}
                QAction::Announce { gen } => {
                    for branch in &mut branches {
                        let sym = gen(input, &branch.shared, &branch.records[step.actor.index()])?;
                        branch.shared.push(sym);
                    }
                }
                QAction::Measure { registers, visibility } => {
                    let sub_dims: Vec<usize> =
                        registers.iter().map(|&r| self.registers[r].dim).collect();
                    let mut next = Vec::new();
                    for mut branch in branches {
                        let fi = self.merge_factors(&mut branch, registers, i)?;
                        let factor = branch.factors.swap_remove(fi);
                        let positions: Vec<usize> = registers
                            .iter()
                            .map(|r| factor.regs.iter().position(|q| q == r).unwrap())
                            .collect();
                        let outcomes = measure_standard(&factor.state, &positions)?;
                        let covered: f64 = outcomes.iter().map(|o| o.probability).sum();
                        pruned_mass += branch.weight * (1.0 - covered).max(0.0);
                        for oc in &outcomes {
                            let mut nb = branch.clone();
                            nb.weight *= oc.probability;
                            if nb.weight < tol::PRUNE {
                                pruned_mass += nb.weight;
                                continue;
                            }
                            for (j, &r) in registers.iter().enumerate() {
                                nb.factors.push(Factor {
                                    regs: vec![r],
                                    state: PureState::basis(vec![sub_dims[j]], &[oc.outcome[j]])?,
                                });
                            }
                            if let Some(residual) = split_residual(&factor, &positions, oc)? {
                                nb.factors.push(residual);
                            }
                            let sym = flatten(&oc.outcome, &sub_dims);
                            match visibility {
                                Visibility::Shared => nb.shared.push(sym),
                                Visibility::Private => nb.records[step.actor.index()].push(sym),
                            }
                            next.push(nb);
                        }
                    }
                    if next.len() > self.branch_budget {
                        return Err(Error::Resource(format!(
                            "step {i}: {} branches exceed budget {}",
                            next.len(),
                            self.branch_budget
                        )));
                    }
                    branches = next;
                }
            }
            let total: f64 = branches.iter().map(|b| b.weight).sum();
            if (total + pruned_mass - 1.0).abs() > tol::VALIDATION {
                return Err(Error::Numerical(format!(
                    "step {i}: branch weights sum to {total} (pruned {pruned_mass})"
                )));
            }
            if self.boundary_steps.get(boundary_idx) == Some(&i) {
                let record = match rec {
                    Recording::All => true,
                    Recording::Only(b) => b == boundary_idx,
                    Recording::Nothing => false,
                };
                if record {
                    let snap = BoundarySnapshot {
                        label: format!("step {i} {} {}", step.actor, action_kind(&step.action)),
                        step_index: i,
                        views: [
                            self.views_for(&branches, i, Player::Al)?,
                            self.views_for(&branches, i, Player::Bob)?,
                        ],
                    };
                    snapshots.push(snap);
                    if matches!(rec, Recording::Only(_)) {
                        return Ok((branches, snapshots, pruned_mass));
                    }
                }
                boundary_idx += 1;
            }
        }
        Ok((branches, snapshots, pruned_mass))
    }

    /// Merges all factors overlapping `registers` into one; returns its index.
    fn merge_factors(&self, branch: &mut Branch, registers: &[usize], step: usize) -> Result<usize> {
        let hit: Vec<usize> = branch
            .factors
            .iter()
            .enumerate()
            .filter(|(_, f)| f.regs.iter().any(|r| registers.contains(r)))
            .map(|(i, _)| i)
            .collect();
        debug_assert!(!hit.is_empty());
        if hit.len() == 1 {
            return Ok(hit[0]);
        }
        let dim: usize = hit.iter().map(|&i| branch.factors[i].state.dim()).product();
        if dim > self.dim_budget {
            return Err(Error::Resource(format!(
                "step {step}: merged factor dimension {dim} exceeds budget {}",
                self.dim_budget
            )));
        }
        let mut regs = Vec::new();
        let mut state: Option<PureState> = None;
        for &i in &hit {
            let f = &branch.factors[i];
            regs.extend_from_slice(&f.regs);
            state = Some(match state {
                None => f.state.clone(),
                Some(s) => s.tensor(&f.state),
            });
        }
        for &i in hit.iter().rev() {
            branch.factors.remove(i);
        }
        branch.factors.push(Factor { regs, state: state.unwrap() });
        Ok(branch.factors.len() - 1)
    }

    /// One player's view over all branches at the boundary ending at `step`:
    /// shared transcript, own records, and the reduced state on held registers
    /// that some gate or measurement has touched (untouched registers sit in
    /// their initial basis state and carry nothing).
    fn views_for(&self, branches: &[Branch], step: usize, player: Player) -> Result<PlayerView> {
        let owner = &self.owner_at[step + 1];
        let active = &self.active_at[step + 1];
        let held: Vec<usize> = (0..self.registers.len())
            .filter(|&r| owner[r] == player && active[r])
            .collect();
        let mut components = Vec::with_capacity(branches.len());
        for b in branches {
            let state = if held.is_empty() { None } else { Some(self.reduced_state(b, &held)?) };
            components.push(ViewComponent {
                shared: b.shared.clone(),
                records: b.records[player.index()].clone(),
                weight: b.weight,
                state,
            });
        }
        Ok(PlayerView { components })
    }

    /// Reduced density matrix on `held` (ascending register order).
    fn reduced_state(&self, branch: &Branch, held: &[usize]) -> Result<DensityMatrix> {
        let mut piece_regs: Vec<usize> = Vec::new();
        let mut acc: Option<DensityMatrix> = None;
        for f in &branch.factors {
            let mut pairs: Vec<(usize, usize)> = f
                .regs
                .iter()
                .enumerate()
                .filter(|(_, r)| held.contains(r))
                .map(|(p, &r)| (r, p))
                .collect();
            if pairs.is_empty() {
                continue;
            }
            pairs.sort_unstable();
            let keep: Vec<usize> = pairs.iter().map(|&(_, p)| p).collect();
            let dm = f.state.to_density().partial_trace(&keep)?;
            let total = acc.as_ref().map_or(1, |a| a.dim()) * dm.dim();
            if total > self.dim_budget {
                return Err(Error::Resource(format!(
                    "view dimension {total} exceeds budget {}",
                    self.dim_budget
                )));
            }
            piece_regs.extend(pairs.iter().map(|&(r, _)| r));
            acc = Some(match acc {
                None => dm,
                Some(a) => a.tensor(&dm),
            });
        }
        let acc = acc.ok_or_else(|| Error::InvalidState("held register missing from state".into()))?;
        let mut order: Vec<usize> = held.to_vec();
        order.sort_unstable();
        let perm: Vec<usize> = order
            .iter()
            .map(|r| piece_regs.iter().position(|q| q == r).unwrap())
            .collect();
        acc.partial_trace(&perm)
    }
}

fn action_kind(a: &QAction) -> &'static str {
    match a {
        QAction::Apply { .. } => "apply",
        QAction::Measure { .. } => "measure",
        QAction::Send { .. } => "send",
        QAction::Announce { .. } => "announce",
    }
}

/// State of the unmeasured subsystems of a collapsed factor, if any.
fn split_residual(
    factor: &Factor,
    positions: &[usize],
    oc: &crate::qstate::MeasurementOutcome,
) -> Result<Option<Factor>> {
    let dims = factor.state.dims();
    let keep: Vec<usize> = (0..dims.len()).filter(|p| !positions.contains(p)).collect();
    if keep.is_empty() {
        return Ok(None);
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&p| dims[p]).collect();
    let mut amps = CVec::zeros(dims_product(&kept_dims));
    let mut kept_multi = vec![0usize; keep.len()];
    let mut full = vec![0usize; dims.len()];
    for (j, &p) in positions.iter().enumerate() {
        full[p] = oc.outcome[j];
    }
    for i in 0..amps.len() {
        unflatten(i, &kept_dims, &mut kept_multi);
        for (t, &p) in keep.iter().enumerate() {
            full[p] = kept_multi[t];
        }
        amps[i] = oc.state.amplitudes()[flatten(&full, dims)];
    }
    let regs: Vec<usize> = keep.iter().map(|&p| factor.regs[p]).collect();
    Ok(Some(Factor { regs, state: PureState::new(kept_dims, amps)? }))
}

impl ProtocolViews for QuantumProtocol {
    fn input_ranges(&self) -> (usize, usize) {
        (self.n_x, self.n_y)
    }

    fn n_boundaries(&self) -> usize {
        self.boundary_steps.len()
    }

    fn views_at(&self, x: usize, y: usize, boundary: usize, player: Player) -> Result<PlayerView> {
        if boundary >= self.boundary_steps.len() {
            return Err(Error::InvalidArgument(format!("boundary {boundary} out of range")));
        }
        let (_, mut snapshots, _) = self.execute(x, y, Recording::Only(boundary))?;
        let snap = snapshots.pop().ok_or_else(|| Error::InvalidState("boundary not reached".into()))?;
        Ok(snap.views[player.index()].clone())
    }

    fn all_views(&self, x: usize, y: usize) -> Result<Vec<[PlayerView; 2]>> {
        Ok(self.boundaries(x, y)?.into_iter().map(|s| s.views).collect())
    }
}
