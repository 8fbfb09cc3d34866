//! Input file loading: communication matrices, input distributions, and
//! deterministic protocol trees, all JSON with strict validation.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;

use privcomm::infotheory::ProbDist;
use privcomm::model::{build_protocol, CommMatrix, DeterministicProtocol, NodeSpec, Output, Player};
use privcomm::protocols::GroverStagePlan;
use privcomm::{Error, Result};

/// Explicit distribution weights must sum to 1 within this before the exact
/// normalizing division.
pub const DIST_SUM_TOL: f64 = 1e-6;

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    rows: usize,
    cols: usize,
    alphabet: Vec<usize>,
    entries: Vec<Vec<usize>>,
}

/// Loads a communication matrix from `{"rows", "cols", "alphabet",
/// "entries"}` JSON, checking shape and alphabet membership.
pub fn load_matrix(path: &Path) -> Result<CommMatrix> {
    let text = read_file(path)?;
    let file: MatrixFile = parse_json(path, &text)?;
    let alphabet: BTreeSet<usize> = file.alphabet.iter().copied().collect();
    if alphabet.is_empty() {
        return Err(Error::InvalidArgument(format!("{}: empty alphabet", path.display())));
    }
    if file.entries.len() != file.rows {
        return Err(Error::InvalidArgument(format!(
            "{}: {} entry rows for a {}-row matrix",
            path.display(),
            file.entries.len(),
            file.rows
        )));
    }
    let mut flat = Vec::with_capacity(file.rows * file.cols);
    for (r, row) in file.entries.iter().enumerate() {
        if row.len() != file.cols {
            return Err(Error::InvalidArgument(format!(
                "{}: entry row {r} has {} values, expected {}",
                path.display(),
                row.len(),
                file.cols
            )));
        }
        for (c, &v) in row.iter().enumerate() {
            if !alphabet.contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "{}: entry ({r}, {c}) = {v} is outside the alphabet",
                    path.display()
                )));
            }
            flat.push(v);
        }
    }
    CommMatrix::new(file.rows, file.cols, flat)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DistFile {
    #[serde(rename = "type", default)]
    kind: Option<String>,
    #[serde(default)]
    weights: Option<Vec<Vec<f64>>>,
}

/// Loads an input distribution for an `n_x` by `n_y` input space from
/// `{"type": "uniform"}` or `{"weights": [[...]]}` JSON. Explicit weights
/// are normalized after the [`DIST_SUM_TOL`] sum check.
pub fn load_dist(path: &Path, n_x: usize, n_y: usize) -> Result<ProbDist> {
    let text = read_file(path)?;
    let file: DistFile = parse_json(path, &text)?;
    match (file.kind.as_deref(), file.weights) {
        (Some("uniform"), None) => ProbDist::uniform_grid(&[n_x, n_y]),
        (Some(kind), None) => Err(Error::InvalidArgument(format!(
            "{}: unsupported distribution type `{kind}`",
            path.display()
        ))),
        (None, Some(weights)) => {
            if weights.len() != n_x {
                return Err(Error::InvalidArgument(format!(
                    "{}: {} weight rows for {n_x} row inputs",
                    path.display(),
                    weights.len()
                )));
            }
            let mut pairs = Vec::with_capacity(n_x * n_y);
            let mut total = 0.0;
            for (x, row) in weights.iter().enumerate() {
                if row.len() != n_y {
                    return Err(Error::InvalidArgument(format!(
                        "{}: weight row {x} has {} values, expected {n_y}",
                        path.display(),
                        row.len()
                    )));
                }
                for (y, &w) in row.iter().enumerate() {
                    if !w.is_finite() || w < 0.0 {
                        return Err(Error::InvalidArgument(format!(
                            "{}: weight ({x}, {y}) = {w} is not a finite nonnegative number",
                            path.display()
                        )));
                    }
                    total += w;
                    pairs.push((vec![x, y], w));
                }
            }
            if (total - 1.0).abs() > DIST_SUM_TOL {
                return Err(Error::InvalidArgument(format!(
                    "{}: weights sum to {total}, more than {DIST_SUM_TOL} away from 1",
                    path.display()
                )));
            }
            ProbDist::from_pairs(pairs.into_iter().map(|(label, w)| (label, w / total)))
        }
        _ => Err(Error::InvalidArgument(format!(
            "{}: exactly one of \"type\" and \"weights\" must be present",
            path.display()
        ))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeFile {
    n_x: usize,
    n_y: usize,
    root: NodeFile,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeFile {
    #[serde(default)]
    output: Option<serde_json::Value>,
    #[serde(default)]
    owner: Option<String>,
    #[serde(default)]
    bits: Option<usize>,
    #[serde(default)]
    message_by_input: Option<Vec<usize>>,
    #[serde(default)]
    children: Option<BTreeMap<String, NodeFile>>,
}

enum TreeNode {
    Leaf(Output),
    Inner { owner: Player, bits: usize, message: Vec<usize>, children: BTreeMap<usize, TreeNode> },
}

fn convert(path: &Path, node: NodeFile, n_x: usize, n_y: usize) -> Result<TreeNode> {
    let bad = |msg: String| Error::InvalidArgument(format!("{}: {msg}", path.display()));
    match node {
        NodeFile { output: Some(value), owner: None, bits: None, message_by_input: None, children: None } => {
            let output = match &value {
                serde_json::Value::String(s) if s == "abort" => Output::Abort,
                serde_json::Value::Number(v) => Output::Value(
                    v.as_u64()
                        .ok_or_else(|| bad(format!("leaf output {v} is not a nonnegative integer")))?
                        as usize,
                ),
                other => return Err(bad(format!("leaf output {other} is neither an integer nor \"abort\""))),
            };
            Ok(TreeNode::Leaf(output))
        }
        NodeFile {
            output: None,
            owner: Some(owner),
            bits,
            message_by_input: Some(message),
            children: Some(children),
        } => {
            let owner = match owner.as_str() {
                "al" => Player::Al,
                "bob" => Player::Bob,
                other => return Err(bad(format!("owner `{other}` is neither \"al\" nor \"bob\""))),
            };
            let expected = match owner {
                Player::Al => n_x,
                Player::Bob => n_y,
            };
            if message.len() != expected {
                return Err(bad(format!(
                    "message_by_input has {} entries for {expected} {owner} inputs",
                    message.len()
                )));
            }
            let max_symbol = message.iter().copied().max().unwrap_or(0);
            let default_bits = (usize::BITS - max_symbol.leading_zeros()).max(1) as usize;
            let bits = bits.unwrap_or(default_bits);
            if bits == 0 {
                return Err(bad("node bit cost must be positive".into()));
            }
            let mut kids = BTreeMap::new();
            for (key, child) in children {
                let symbol: usize = key
                    .parse()
                    .map_err(|_| bad(format!("child key `{key}` is not an integer symbol")))?;
                kids.insert(symbol, convert(path, child, n_x, n_y)?);
            }
            Ok(TreeNode::Inner { owner, bits, message, children: kids })
        }
        _ => Err(bad(
            "each node needs either \"output\" alone or \"owner\", \"message_by_input\", and \
             \"children\""
                .into(),
        )),
    }
}

/// Loads a deterministic protocol from nested `{"n_x", "n_y", "root"}` tree
/// JSON. Leaves carry `"output"`; inner nodes carry `"owner"`,
/// `"message_by_input"` (one symbol per owner input), `"children"` keyed by
/// symbol, and an optional `"bits"` cost defaulting to the widest symbol.
pub fn load_tree(path: &Path) -> Result<DeterministicProtocol> {
    let text = read_file(path)?;
    let file: TreeFile = parse_json(path, &text)?;
    let root = convert(path, file.root, file.n_x, file.n_y)?;
    build_protocol(file.n_x, file.n_y, &|t, _xs, _ys| {
        let mut node = &root;
        for &symbol in t {
            node = match node {
                TreeNode::Inner { children, .. } => children.get(&symbol).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "{}: transcript {t:?} has no child for symbol {symbol}",
                        path.display()
                    ))
                })?,
                TreeNode::Leaf(_) => {
                    return Err(Error::InvalidState(format!(
                        "{}: transcript {t:?} descends past a leaf",
                        path.display()
                    )))
                }
            };
        }
        Ok(match node {
            TreeNode::Leaf(output) => NodeSpec::Done { output: *output },
            TreeNode::Inner { owner, bits, message, .. } => {
                let message = message.clone();
                NodeSpec::Speak {
                    owner: *owner,
                    bit_cost: *bits,
                    message: Box::new(move |input| message[input]),
                }
            }
        })
    })
}

/// Parses a comma-separated list of integers.
pub fn parse_usize_list(s: &str, what: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|tok| {
            tok.trim().parse::<usize>().map_err(|_| {
                Error::InvalidArgument(format!("{what}: cannot parse `{tok}` as an integer"))
            })
        })
        .collect()
}

/// Parses a comma-separated list of finite floats.
pub fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| {
            let value: f64 = tok.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("{what}: cannot parse `{tok}` as a number"))
            })?;
            if !value.is_finite() {
                return Err(Error::InvalidArgument(format!("{what}: `{tok}` is not finite")));
            }
            Ok(value)
        })
        .collect()
}

/// Builds a Grover stage plan for universe size `n` from a comma-separated
/// iteration list; the register dimension is fixed by the construction.
pub fn stage_plan(n: usize, stages: &str) -> Result<GroverStagePlan> {
    let stage_iterations = parse_usize_list(stages, "--stages")?;
    Ok(GroverStagePlan { n, stage_iterations, register_dim: 4 * n + 1 })
}
