//! Combinatorial characterization of privately computable functions.
//!
//! Two rows of a communication matrix are directly related when some column
//! gives them equal entries; the equivalence is the transitive closure of
//! that relation (same for columns). A submatrix is forbidden when all its
//! rows are equivalent, all its columns are equivalent, and it is not
//! monochromatic. A function is computable with zero privacy loss exactly
//! when its matrix contains no forbidden submatrix, and in that case a
//! deterministic zero-loss protocol falls out of the class decomposition.

use crate::model::{
    build_protocol, CommMatrix, DeterministicProtocol, NodeSpec, Output, Player, PlayerView,
    QuantumProtocol,
};
use crate::infotheory::ProbDist;
use crate::{privacy, tol, Error, Result};
use std::collections::BTreeMap;

/// Which index set of a communication matrix an operation works on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Rows,
    Cols,
}

/// Partition of row (or column) indices into equivalence classes.
///
/// Classes are disjoint, cover every index, are each sorted ascending, and
/// are ordered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct EquivPartition {
    pub classes: Vec<Vec<usize>>,
}

/// A submatrix with all rows equivalent, all columns equivalent, and at
/// least two distinct entries. Its presence rules out any zero-loss
/// protocol, quantum or classical.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ForbiddenWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }

    // Roots stay the smallest member of their class.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn entry(m: &CommMatrix, axis: Axis, item: usize, other: usize) -> usize {
    match axis {
        Axis::Rows => m.get(item, other),
        Axis::Cols => m.get(other, item),
    }
}

/// Equivalence classes of `items` (row or column indices) relative to the
/// rectangle `items` x `others`, as the transitive closure of sharing an
/// entry at some position of `others`.
fn classes_in(m: &CommMatrix, items: &[usize], others: &[usize], axis: Axis) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(items.len());
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            if others
                .iter()
                .any(|&o| entry(m, axis, items[i], o) == entry(m, axis, items[j], o))
            {
                uf.union(i, j);
            }
        }
    }
    let mut grouped: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..items.len() {
        let root = uf.find(i);
        grouped.entry(root).or_default().push(items[i]);
    }
    grouped.into_values().collect()
}

fn monochromatic(m: &CommMatrix, rows: &[usize], cols: &[usize]) -> Option<usize> {
    let v = m.get(rows[0], cols[0]);
    for &r in rows {
        for &c in cols {
            if m.get(r, c) != v {
                return None;
            }
        }
    }
    Some(v)
}

/// Equivalence classes of the full matrix along one axis.
pub fn equivalence_closure(m: &CommMatrix, axis: Axis) -> EquivPartition {
    let (items, others): (Vec<usize>, Vec<usize>) = match axis {
        Axis::Rows => ((0..m.rows()).collect(), (0..m.cols()).collect()),
        Axis::Cols => ((0..m.cols()).collect(), (0..m.rows()).collect()),
    };
    EquivPartition { classes: classes_in(m, &items, &others, axis) }
}

fn search(m: &CommMatrix, rows: &[usize], cols: &[usize]) -> Option<ForbiddenWitness> {
    if monochromatic(m, rows, cols).is_some() {
        return None;
    }
    let row_classes = classes_in(m, rows, cols, Axis::Rows);
    if row_classes.len() >= 2 {
        return row_classes.iter().find_map(|class| search(m, class, cols));
    }
    let col_classes = classes_in(m, cols, rows, Axis::Cols);
    if col_classes.len() >= 2 {
        return col_classes.iter().find_map(|class| search(m, rows, class));
    }
    Some(ForbiddenWitness { rows: rows.to_vec(), cols: cols.to_vec() })
}

/// Finds a forbidden submatrix by recursive class decomposition, or reports
/// that none exists.
pub fn find_forbidden_submatrix(m: &CommMatrix) -> Option<ForbiddenWitness> {
    let rows: Vec<usize> = (0..m.rows()).collect();
    let cols: Vec<usize> = (0..m.cols()).collect();
    search(m, &rows, &cols)
}

/// Direct definition check of a claimed witness, independent of the search:
/// one row class, one column class, at least two entries.
pub fn witness_is_forbidden(m: &CommMatrix, w: &ForbiddenWitness) -> bool {
    if w.rows.is_empty() || w.cols.is_empty() {
        return false;
    }
    monochromatic(m, &w.rows, &w.cols).is_none()
        && classes_in(m, &w.rows, &w.cols, Axis::Rows).len() == 1
        && classes_in(m, &w.cols, &w.rows, Axis::Cols).len() == 1
}

/// Whether the function admits a protocol with zero privacy loss.
/// [`find_forbidden_submatrix`] supplies the witness when it does not.
pub fn is_private(m: &CommMatrix) -> bool {
    find_forbidden_submatrix(m).is_none()
}

/// Why private-protocol synthesis failed.
#[derive(Debug, thiserror::Error)]
pub enum SynthesisError {
    #[error("matrix contains a forbidden {}x{} submatrix", .0.rows.len(), .0.cols.len())]
    NotPrivate(ForbiddenWitness),
    #[error(transparent)]
    Build(#[from] Error),
}

fn class_announcement(
    m: &CommMatrix,
    classes: &[Vec<usize>],
    owner: Player,
) -> NodeSpec {
    let side = match owner {
        Player::Al => m.rows(),
        Player::Bob => m.cols(),
    };
    let mut class_of = vec![0usize; side];
    for (ci, class) in classes.iter().enumerate() {
        for &i in class {
            class_of[i] = ci;
        }
    }
    let bits = (classes.len() as f64).log2().ceil() as usize;
    NodeSpec::Speak { owner, bit_cost: bits, message: Box::new(move |i| class_of[i]) }
}

/// Builds the zero-loss protocol tree for a matrix with no forbidden
/// submatrix: each node announces the speaker's equivalence class relative
/// to the live rectangle, leaves output the monochromatic value.
pub fn synthesize_private_protocol(
    m: &CommMatrix,
) -> std::result::Result<DeterministicProtocol, SynthesisError> {
    if let Some(w) = find_forbidden_submatrix(m) {
        return Err(SynthesisError::NotPrivate(w));
    }
    let p = build_protocol(m.rows(), m.cols(), &|_, xs, ys| {
        if let Some(v) = monochromatic(m, xs, ys) {
            return Ok(NodeSpec::Done { output: Output::Value(v) });
        }
        let row_classes = classes_in(m, xs, ys, Axis::Rows);
        if row_classes.len() >= 2 {
            return Ok(class_announcement(m, &row_classes, Player::Al));
        }
        let col_classes = classes_in(m, ys, xs, Axis::Cols);
        if col_classes.len() >= 2 {
            return Ok(class_announcement(m, &col_classes, Player::Bob));
        }
        Err(Error::InvalidState(
            "non-monochromatic rectangle with a single class on both axes".into(),
        ))
    })?;
    Ok(p)
}

/// A 2x2 rectangle holding exactly three equal Boolean entries. Any such
/// rectangle already rules out a zero-loss protocol.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CornersViolation {
    pub rows: [usize; 2],
    pub cols: [usize; 2],
}

/// Scans all 2x2 rectangles of a Boolean matrix for one with exactly three
/// equal entries; returns the lexicographically first.
pub fn corners_check(m: &CommMatrix) -> Result<Option<CornersViolation>> {
    if m.alphabet().iter().any(|&v| v > 1) {
        return Err(Error::InvalidArgument(
            "corners condition is defined for Boolean matrices".into(),
        ));
    }
    for x1 in 0..m.rows() {
        for x2 in x1 + 1..m.rows() {
            for y1 in 0..m.cols() {
                for y2 in y1 + 1..m.cols() {
                    let ones =
                        m.get(x1, y1) + m.get(x1, y2) + m.get(x2, y1) + m.get(x2, y2);
                    if ones == 1 || ones == 3 {
                        return Ok(Some(CornersViolation {
                            rows: [x1, x2],
                            cols: [y1, y2],
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Additive split f(x, y) = a(x) XOR b(y) of a Boolean matrix, normalized
/// so the first row maps to 0.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct XorDecomposition {
    pub row_bits: Vec<usize>,
    pub col_bits: Vec<usize>,
}

/// Tries to split a Boolean matrix as f(x, y) = a(x) XOR b(y). Fixing
/// a(0) = 0 forces b(y) = m(0, y) and a(x) = m(x, 0) XOR b(0); the split
/// exists exactly when that reconstruction matches every entry.
pub fn xor_decompose(m: &CommMatrix) -> Option<XorDecomposition> {
    if m.alphabet().iter().any(|&v| v > 1) {
        return None;
    }
    let col_bits: Vec<usize> = (0..m.cols()).map(|y| m.get(0, y)).collect();
    let row_bits: Vec<usize> = (0..m.rows()).map(|x| m.get(x, 0) ^ col_bits[0]).collect();
    for x in 0..m.rows() {
        for y in 0..m.cols() {
            if m.get(x, y) != row_bits[x] ^ col_bits[y] {
                return None;
            }
        }
    }
    Some(XorDecomposition { row_bits, col_bits })
}

/// One rectangle of a decomposition tree. Internal nodes carry the split
/// axis and children; leaves carry the monochromatic value.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TreeNode {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub axis: Option<Axis>,
    pub children: Vec<usize>,
    pub value: Option<usize>,
}

/// Layered rectangle tree: children partition their parent along one axis,
/// every layer splits the same axis, leaf rectangles are monochromatic.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DecompositionTree {
    pub nodes: Vec<TreeNode>,
    pub root: usize,
}

impl DecompositionTree {
    pub fn depth(&self) -> usize {
        fn rec(tree: &DecompositionTree, node: usize) -> usize {
            tree.nodes[node]
                .children
                .iter()
                .map(|&c| 1 + rec(tree, c))
                .max()
                .unwrap_or(0)
        }
        rec(self, self.root)
    }

    pub fn leaves(&self) -> Vec<&TreeNode> {
        self.nodes.iter().filter(|n| n.children.is_empty()).collect()
    }
}

/// Rebuilds the rectangle decomposition a zero-loss quantum protocol
/// induces on its communication matrix.
///
/// At each view boundary the sending player's inputs are grouped by the
/// receiver's view, two inputs counting as equal when their views are
/// within trace distance 1e-7 for every opposing input in the rectangle.
/// Boundaries that split nothing are skipped, so the tree depth is at most
/// the number of boundaries. Requires error below 1/2 on every input pair
/// and measured privacy loss at most 1e-7 under the uniform distribution.
pub fn extract_protocol_tree(q: &QuantumProtocol, f: &CommMatrix) -> Result<DecompositionTree> {
    let (n_x, n_y) = {
        use crate::model::ProtocolViews;
        q.input_ranges()
    };
    if f.rows() != n_x || f.cols() != n_y {
        return Err(Error::DimensionMismatch(format!(
            "protocol inputs {n_x}x{n_y} vs matrix {}x{}",
            f.rows(),
            f.cols()
        )));
    }
    for x in 0..n_x {
        for y in 0..n_y {
            let run = q.run(x, y)?;
            for player in [Player::Al, Player::Bob] {
                let correct = run.output_probability(player, Output::Value(f.get(x, y)));
                if correct <= 0.5 {
                    return Err(Error::InvalidArgument(format!(
                        "error {} on inputs ({x}, {y}) is not below 1/2",
                        1.0 - correct
                    )));
                }
            }
        }
    }
    let mu = ProbDist::uniform_grid(&[n_x, n_y])?;
    let loss = privacy::max_privacy_loss(q, &mu, f)?;
    if loss > tol::MESSAGE_EQ {
        return Err(Error::InvalidArgument(format!(
            "protocol loses {loss} bits; tree extraction needs zero loss"
        )));
    }

    let actors = q.boundary_actors();
    // views[x][y][t] = both players' views at boundary t.
    let mut views: Vec<Vec<Vec<[PlayerView; 2]>>> = Vec::with_capacity(n_x);
    for x in 0..n_x {
        let mut row = Vec::with_capacity(n_y);
        for y in 0..n_y {
            row.push(q.boundaries(x, y)?.into_iter().map(|b| b.views).collect());
        }
        views.push(row);
    }

    let mut nodes = vec![TreeNode {
        rows: (0..n_x).collect(),
        cols: (0..n_y).collect(),
        axis: None,
        children: Vec::new(),
        value: monochromatic(f, &(0..n_x).collect::<Vec<_>>(), &(0..n_y).collect::<Vec<_>>()),
    }];
    let mut frontier = vec![0usize];

    for (t, &sender) in actors.iter().enumerate() {
        if frontier.iter().all(|&n| nodes[n].value.is_some()) {
            break;
        }
        let receiver = sender.other();
        // Group the sender's inputs inside each open rectangle.
        let mut splits: Vec<(usize, Vec<Vec<usize>>)> = Vec::new();
        for &ni in &frontier {
            if nodes[ni].value.is_some() {
                continue;
            }
            let (items, others) = match sender {
                Player::Al => (nodes[ni].rows.clone(), nodes[ni].cols.clone()),
                Player::Bob => (nodes[ni].cols.clone(), nodes[ni].rows.clone()),
            };
            let mut uf = UnionFind::new(items.len());
            for i in 0..items.len() {
                for j in i + 1..items.len() {
                    let mut near = 0usize;
                    for &o in &others {
                        let ((x1, y1), (x2, y2)) = match sender {
                            Player::Al => ((items[i], o), (items[j], o)),
                            Player::Bob => ((o, items[i]), (o, items[j])),
                        };
                        let d = privacy::view_distance(
                            &views[x1][y1][t][receiver.index()],
                            &views[x2][y2][t][receiver.index()],
                        )?;
                        if d <= tol::MESSAGE_EQ {
                            near += 1;
                        }
                    }
                    if near == others.len() {
                        uf.union(i, j);
                    } else if near > 0 {
                        return Err(Error::InvalidState(format!(
                            "boundary {t} message grouping is inconsistent across the rectangle"
                        )));
                    }
                }
            }
            let mut grouped: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for i in 0..items.len() {
                let root = uf.find(i);
                grouped.entry(root).or_default().push(items[i]);
            }
            splits.push((ni, grouped.into_values().collect()));
        }
        if splits.iter().all(|(_, classes)| classes.len() == 1) {
            continue;
        }
        let axis = match sender {
            Player::Al => Axis::Rows,
            Player::Bob => Axis::Cols,
        };
        let mut next = Vec::new();
        for &ni in &frontier {
            if nodes[ni].value.is_some() {
                next.push(ni);
            }
        }
        for (ni, classes) in splits {
            nodes[ni].axis = Some(axis);
            for class in classes {
                let (rows, cols) = match axis {
                    Axis::Rows => (class, nodes[ni].cols.clone()),
                    Axis::Cols => (nodes[ni].rows.clone(), class),
                };
                let value = monochromatic(f, &rows, &cols);
                let child = nodes.len();
                nodes.push(TreeNode { rows, cols, axis: None, children: Vec::new(), value });
                nodes[ni].children.push(child);
                next.push(child);
            }
        }
        frontier = next;
    }

    if let Some(&open) = frontier.iter().find(|&&n| nodes[n].value.is_none()) {
        return Err(Error::InvalidState(format!(
            "rounds exhausted with a non-monochromatic {}x{} rectangle left",
            nodes[open].rows.len(),
            nodes[open].cols.len()
        )));
    }
    Ok(DecompositionTree { nodes, root: 0 })
}

#[cfg(test)]
mod tests;
