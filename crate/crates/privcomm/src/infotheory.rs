//! Entropies, mutual information on classical-quantum states, and the entropy
//! inequalities the privacy analysis relies on.
//!
//! A [`CqState`] keeps one density-matrix block per classical index tuple and
//! never materializes the full tensor product; entropies of register subsets
//! come from the block decomposition S = H(classical) + sum of block
//! entropies. All logarithms are base 2 and all entropies are in bits.

use crate::qstate::DensityMatrix;
use crate::tol;
use crate::{Error, Result};
use std::collections::BTreeMap;

/// x*log2(x) with the 0 log 0 = 0 convention.
fn xlog2(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Shannon entropy of a weight slice (weights need not be normalized here;
/// callers validate where it matters).
pub fn shannon_from_weights(weights: impl IntoIterator<Item = f64>) -> f64 {
    -weights.into_iter().map(xlog2).sum::<f64>()
}

/// Binary entropy H2(p).
pub fn binary_entropy(p: f64) -> f64 {
    shannon_from_weights([p, 1.0 - p])
}

/// A probability distribution over integer-tuple outcome labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDist {
    weights: BTreeMap<Vec<usize>, f64>,
}

impl ProbDist {
    pub fn new(weights: BTreeMap<Vec<usize>, f64>) -> Result<Self> {
        let mut total = 0.0;
        for (label, &w) in &weights {
            if w < -1e-12 {
                return Err(Error::InvalidArgument(format!("negative weight {w} at {label:?}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > tol::VALIDATION {
            return Err(Error::InvalidState(format!("distribution weights sum to {total}")));
        }
        Ok(Self { weights })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Vec<usize>, f64)>) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for (label, w) in pairs {
            *weights.entry(label).or_insert(0.0) += w;
        }
        Self::new(weights)
    }

    pub fn uniform(labels: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let labels: Vec<_> = labels.into_iter().collect();
        if labels.is_empty() {
            return Err(Error::InvalidArgument("uniform distribution over empty support".into()));
        }
        let w = 1.0 / labels.len() as f64;
        Self::from_pairs(labels.into_iter().map(|l| (l, w)))
    }

    /// Uniform distribution over the full product grid of the given dims.
    pub fn uniform_grid(dims: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        let mut labels = Vec::with_capacity(total);
        for mut flat in 0..total {
            let mut label = vec![0usize; dims.len()];
            for j in (0..dims.len()).rev() {
                label[j] = flat % dims[j];
                flat /= dims[j];
            }
            labels.push(label);
        }
        Self::uniform(labels)
    }

    pub fn prob(&self, label: &[usize]) -> f64 {
        self.weights.get(label).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, f64)> {
        self.weights.iter().map(|(l, &w)| (l, w))
    }

    pub fn support_len(&self) -> usize {
        self.weights.values().filter(|&&w| w > 0.0).count()
    }

    /// Marginal over the listed coordinates.
    pub fn marginal(&self, coords: &[usize]) -> Result<ProbDist> {
        let mut out: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (label, &w) in &self.weights {
            if coords.iter().any(|&c| c >= label.len()) {
                return Err(Error::InvalidArgument("marginal coordinate out of range".into()));
            }
            let key: Vec<usize> = coords.iter().map(|&c| label[c]).collect();
            *out.entry(key).or_insert(0.0) += w;
        }
        ProbDist::new(out)
    }
}

pub fn shannon_entropy(p: &ProbDist) -> f64 {
    shannon_from_weights(p.weights.values().copied())
}

/// Sum of |p - q| over the union of supports; in [0, 2].
pub fn l1_distance(p: &ProbDist, q: &ProbDist) -> f64 {
    let mut labels: Vec<&Vec<usize>> = p.weights.keys().chain(q.weights.keys()).collect();
    labels.sort();
    labels.dedup();
    labels.iter().map(|l| (p.prob(l) - q.prob(l)).abs()).sum()
}

/// Von Neumann entropy in bits, from eigenvalues clamped into [0,1].
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eigs = rho.eigenvalues()?;
    Ok(shannon_from_weights(eigs))
}

/// Holevo information of an ensemble: S(avg) - sum of weighted entropies.
/// Weights must sum to 1.
pub fn holevo_information(parts: &[(f64, &DensityMatrix)]) -> Result<f64> {
    let avg = DensityMatrix::mixture(parts)?;
    let mut chi = von_neumann_entropy(&avg)?;
    for (w, rho) in parts {
        if *w > 0.0 {
            chi -= w * von_neumann_entropy(rho)?;
        }
    }
    Ok(chi)
}

/// A classical-quantum state: a distribution over classical index tuples with
/// one quantum block per tuple. The classical coordinates and the quantum
/// register are addressed by name.
#[derive(Debug, Clone)]
pub struct CqState {
    classical_names: Vec<String>,
    quantum_name: Option<String>,
    blocks: BTreeMap<Vec<usize>, (f64, Option<DensityMatrix>)>,
}

impl CqState {
    /// Classical-only state from a distribution; labels index the named
    /// coordinates.
    pub fn classical(names: &[&str], dist: &ProbDist) -> Result<Self> {
        let mut blocks = BTreeMap::new();
        for (label, w) in dist.iter() {
            if label.len() != names.len() {
                return Err(Error::DimensionMismatch("label arity != number of coordinate names".into()));
            }
            blocks.insert(label.clone(), (w, None));
        }
        Ok(Self {
            classical_names: names.iter().map(|s| s.to_string()).collect(),
            quantum_name: None,
            blocks,
        })
    }

    /// Classical coordinates plus one quantum register; one block per tuple.
    pub fn with_quantum(
        names: &[&str],
        quantum_name: &str,
        blocks: impl IntoIterator<Item = (Vec<usize>, f64, DensityMatrix)>,
    ) -> Result<Self> {
        if names.contains(&quantum_name) {
            return Err(Error::InvalidArgument("quantum register name collides with a classical one".into()));
        }
        let mut map = BTreeMap::new();
        let mut total = 0.0;
        let mut dim = None;
        for (label, w, rho) in blocks {
            if label.len() != names.len() {
                return Err(Error::DimensionMismatch("label arity != number of coordinate names".into()));
            }
            if w < -1e-12 {
                return Err(Error::InvalidArgument("negative block weight".into()));
            }
            match dim {
                None => dim = Some(rho.dim()),
                Some(d) if d != rho.dim() => {
                    return Err(Error::DimensionMismatch("blocks of different quantum dimension".into()))
                }
                _ => {}
            }
            total += w;
            if map.insert(label, (w, Some(rho))).is_some() {
                return Err(Error::InvalidArgument("duplicate classical label".into()));
            }
        }
        if (total - 1.0).abs() > tol::VALIDATION {
            return Err(Error::InvalidState(format!("block weights sum to {total}")));
        }
        Ok(Self {
            classical_names: names.iter().map(|s| s.to_string()).collect(),
            quantum_name: Some(quantum_name.to_string()),
            blocks: map,
        })
    }

    pub fn has_quantum(&self) -> bool {
        self.quantum_name.is_some()
    }

    fn resolve(&self, registers: &[&str]) -> Result<(Vec<usize>, bool)> {
        let mut classical = Vec::new();
        let mut quantum = false;
        for &r in registers {
            if let Some(pos) = self.classical_names.iter().position(|n| n == r) {
                if classical.contains(&pos) {
                    return Err(Error::InvalidArgument(format!("register {r} repeated")));
                }
                classical.push(pos);
            } else if self.quantum_name.as_deref() == Some(r) {
                if quantum {
                    return Err(Error::InvalidArgument(format!("register {r} repeated")));
                }
                quantum = true;
            } else {
                return Err(Error::InvalidArgument(format!("unknown register {r}")));
            }
        }
        Ok((classical, quantum))
    }

    /// Entropy of the reduced state on the named registers. Classical part by
    /// grouping blocks on the kept coordinates; including the quantum register
    /// adds the entropy of the average block within each group.
    pub fn entropy(&self, registers: &[&str]) -> Result<f64> {
        let (coords, quantum) = self.resolve(registers)?;
        let mut groups: BTreeMap<Vec<usize>, (f64, Vec<(f64, &DensityMatrix)>)> = BTreeMap::new();
        for (label, (w, rho)) in &self.blocks {
            if *w <= 0.0 {
                continue;
            }
            let key: Vec<usize> = coords.iter().map(|&c| label[c]).collect();
            let entry = groups.entry(key).or_insert((0.0, Vec::new()));
            entry.0 += w;
            if quantum {
                let rho = rho
                    .as_ref()
                    .ok_or_else(|| Error::InvalidArgument("state has no quantum register".into()))?;
                entry.1.push((*w, rho));
            }
        }
        let mut s = shannon_from_weights(groups.values().map(|(w, _)| *w));
        if quantum {
            for (w_group, parts) in groups.values() {
                let normalized: Vec<(f64, &DensityMatrix)> =
                    parts.iter().map(|&(w, rho)| (w / w_group, rho)).collect();
                let avg = DensityMatrix::mixture(&normalized)?;
                s += w_group * von_neumann_entropy(&avg)?;
            }
        }
        Ok(s)
    }

    /// I(a : b | c) = S(ac) + S(bc) - S(c) - S(abc). Register sets must be
    /// disjoint. Small negative values (above -[`tol::INFO`]) are clamped to 0.
    pub fn conditional_mutual_information(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        for (set1, set2) in [(a, b), (a, c), (b, c)] {
            for r in set1 {
                if set2.contains(r) {
                    return Err(Error::InvalidArgument(format!("register {r} in two sets")));
                }
            }
        }
        fn join<'a>(u: &[&'a str], v: &[&'a str]) -> Vec<&'a str> {
            u.iter().chain(v.iter()).copied().collect()
        }
        let ac = self.entropy(&join(a, c))?;
        let bc = self.entropy(&join(b, c))?;
        let cc = self.entropy(c)?;
        let abc = self.entropy(&join(&join(a, b), c))?;
        let raw = ac + bc - cc - abc;
        if raw < 0.0 && raw >= -tol::INFO {
            return Ok(0.0);
        }
        Ok(raw)
    }

    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        self.conditional_mutual_information(a, b, &[])
    }
}

/// Entropy continuity bound d*n - d*log2(d). Admissible for distributions on
/// n-bit strings with l1 distance d <= 1/2; for density matrices on n qubits
/// the same expression bounds the entropy difference when the trace-norm
/// distance is at most 1/e.
pub fn continuity_bound(d: f64, n_bits: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&d) {
        return Err(Error::InvalidArgument(format!("distance {d} outside [0, 1/2]")));
    }
    Ok(d * n_bits - xlog2(d))
}

/// Bound on -sum p_x log p_x for subnormalized weights with total mass at most
/// gamma over n-bit labels: gamma*n - gamma*log2(gamma).
pub fn max_entropy_bound(gamma: f64, n_bits: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidArgument(format!("mass {gamma} outside (0, 1]")));
    }
    Ok(gamma * n_bits - xlog2(gamma))
}

/// Evaluates both sides of the average-encoding inequality on a cq state:
/// lhs = sum_x p_x ||avg - rho_x||_1, rhs = sqrt(2 ln 2 * I(Q : X)) where X is
/// the full classical index. Contract: lhs <= rhs + tolerance.
pub fn average_encoding_check(s: &CqState) -> Result<(f64, f64)> {
    let quantum = s
        .quantum_name
        .clone()
        .ok_or_else(|| Error::InvalidArgument("average encoding needs a quantum register".into()))?;
    let parts: Vec<(f64, &DensityMatrix)> = s
        .blocks
        .values()
        .filter(|(w, _)| *w > 0.0)
        .map(|(w, rho)| (*w, rho.as_ref().expect("quantum register present")))
        .collect();
    let avg = DensityMatrix::mixture(&parts)?;
    let mut lhs = 0.0;
    for (w, rho) in &parts {
        lhs += w * crate::qstate::trace_norm_distance(&avg, rho)?;
    }
    let names: Vec<&str> = s.classical_names.iter().map(|n| n.as_str()).collect();
    let mi = s.mutual_information(&[quantum.as_str()], &names)?;
    let rhs = (2.0 * std::f64::consts::LN_2 * mi.max(0.0)).sqrt();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests;
