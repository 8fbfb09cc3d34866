//! Brute-force cross-checks, kept independent of the analysis modules:
//! monochromatic rectangle search, mass-weighted correct rectangles, and a
//! from-scratch privacy verifier that recomputes transcript information
//! with plain counting loops.

use std::collections::BTreeMap;

use crate::infotheory::ProbDist;
use crate::model::{check_input_dist, CommMatrix, DeterministicProtocol, Output, Player};
use crate::{tol, Error, Result};

/// Node budget for the branch-and-bound rectangle search.
const SEARCH_BUDGET: usize = 1 << 24;

/// Sides above this go through branch and bound instead of subset
/// enumeration.
const EXHAUSTIVE_SIDE: usize = 16;

/// Hard cap on either matrix side for rectangle search.
const MAX_SIDE: usize = 64;

/// A rectangle rows × cols on which the matrix is constant.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct MonochromaticRectangle {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub value: usize,
    /// min(|rows|, |cols|).
    pub width: usize,
}

/// Widest monochromatic rectangle, width = min(|rows|, |cols|). Exhaustive
/// over subsets of the smaller side up to 16 entries; branch and bound with
/// a node budget above that, capped at 64 per side.
pub fn max_monochromatic_width(f: &CommMatrix) -> Result<MonochromaticRectangle> {
    if f.rows() > MAX_SIDE || f.cols() > MAX_SIDE {
        return Err(Error::InvalidArgument(format!(
            "rectangle search capped at {MAX_SIDE} per side, got {}x{}",
            f.rows(),
            f.cols()
        )));
    }
    let transposed = f.rows() > f.cols();
    let g = if transposed {
        CommMatrix::from_fn(f.cols(), f.rows(), |r, c| f.get(c, r))
    } else {
        f.clone()
    };
    let mut best = if g.rows() <= EXHAUSTIVE_SIDE {
        exhaustive_rectangle(&g)
    } else {
        branch_bound_rectangle(&g)?
    };
    if transposed {
        std::mem::swap(&mut best.rows, &mut best.cols);
    }
    Ok(best)
}

fn cols_mask(g: &CommMatrix, row: usize, value: usize) -> u64 {
    let mut mask = 0u64;
    for c in 0..g.cols() {
        if g.get(row, c) == value {
            mask |= 1 << c;
        }
    }
    mask
}

fn unpack_bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

fn rect_from(rows: Vec<usize>, colmask: u64, value: usize) -> MonochromaticRectangle {
    let cols = unpack_bits(colmask);
    let width = rows.len().min(cols.len());
    MonochromaticRectangle { rows, cols, value, width }
}

fn exhaustive_rectangle(g: &CommMatrix) -> MonochromaticRectangle {
    let mut best = rect_from(vec![0], cols_mask(g, 0, g.get(0, 0)), g.get(0, 0));
    for value in g.alphabet() {
        let rowmask: Vec<u64> = (0..g.rows()).map(|r| cols_mask(g, r, value)).collect();
        for a in 1u32..1 << g.rows() {
            let mut mask = u64::MAX >> (64 - g.cols());
            let mut rows = Vec::new();
            for (r, &rm) in rowmask.iter().enumerate() {
                if a >> r & 1 == 1 {
                    mask &= rm;
                    rows.push(r);
                }
            }
            if rows.len().min(mask.count_ones() as usize) > best.width {
                best = rect_from(rows, mask, value);
            }
        }
    }
    best
}

struct RectSearch<'a> {
    rowmask: &'a [u64],
    value: usize,
    nodes: usize,
    best: MonochromaticRectangle,
}

impl RectSearch<'_> {
    fn descend(&mut self, from: usize, chosen: &mut Vec<usize>, mask: u64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > SEARCH_BUDGET {
            return Err(Error::Resource("rectangle search budget exhausted".into()));
        }
        if chosen.len().min(mask.count_ones() as usize) > self.best.width {
            self.best = rect_from(chosen.clone(), mask, self.value);
        }
        for r in from..self.rowmask.len() {
            let narrowed = mask & self.rowmask[r];
            if narrowed == 0 {
                continue;
            }
            // Even if every remaining row kept this column set, the width
            // could not beat the incumbent.
            let ceiling = (chosen.len() + 1 + self.rowmask.len() - r - 1)
                .min(narrowed.count_ones() as usize);
            if ceiling <= self.best.width {
                continue;
            }
            chosen.push(r);
            self.descend(r + 1, chosen, narrowed)?;
            chosen.pop();
        }
        Ok(())
    }
}

fn branch_bound_rectangle(g: &CommMatrix) -> Result<MonochromaticRectangle> {
    let mut best = rect_from(vec![0], cols_mask(g, 0, g.get(0, 0)), g.get(0, 0));
    let mut nodes = 0;
    for value in g.alphabet() {
        let rowmask: Vec<u64> = (0..g.rows()).map(|r| cols_mask(g, r, value)).collect();
        let mut search = RectSearch { rowmask: &rowmask, value, nodes, best };
        let full = u64::MAX >> (64 - g.cols());
        search.descend(0, &mut Vec::new(), full)?;
        nodes = search.nodes;
        best = search.best;
    }
    Ok(best)
}

/// Deterministic-communication lower bound implied by the widest
/// monochromatic rectangle of a 2ⁿ×2ⁿ matrix: (n − log₂ r)/2 − 1, reported
/// as-is (negative for easy functions).
pub fn cl0_lower_bound(f: &CommMatrix) -> Result<f64> {
    if f.rows() != f.cols() || !f.rows().is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "lower bound needs a square power-of-two matrix, got {}x{}",
            f.rows(),
            f.cols()
        )));
    }
    let r = max_monochromatic_width(f)?.width as f64;
    let n_bits = (f.rows() as f64).log2();
    Ok((n_bits - r.log2()) / 2.0 - 1.0)
}

/// A rectangle with its mass and the mass on which the matrix misses the
/// target value.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RectangleStat {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub mass: f64,
    pub error_mass: f64,
}

/// Heaviest rectangle that is correct for `value` up to relative error
/// `eps`: maximizes μ(A×B) subject to μ((A×B) ∩ {f ≠ value}) ≤ eps·μ(A×B).
/// The empty rectangle (mass 0) is always feasible. Exhaustive over row
/// subsets; for each, columns with error within their own budget are all
/// taken and the remaining few are searched exactly. Sides capped at 16.
pub fn largest_correct_rectangle(
    f: &CommMatrix,
    mu: &ProbDist,
    value: usize,
    eps: f64,
) -> Result<RectangleStat> {
    check_input_dist(f, mu)?;
    if f.rows() > EXHAUSTIVE_SIDE || f.cols() > EXHAUSTIVE_SIDE {
        return Err(Error::InvalidArgument(format!(
            "correct-rectangle search capped at {EXHAUSTIVE_SIDE} per side"
        )));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidArgument(format!("relative error {eps} outside [0, 1]")));
    }
    let (n_rows, n_cols) = (f.rows(), f.cols());
    let w = |r: usize, c: usize| mu.prob(&[r, c]);
    let mut best =
        RectangleStat { rows: Vec::new(), cols: Vec::new(), mass: 0.0, error_mass: 0.0 };
    for a in 1u32..1 << n_rows {
        let rows: Vec<usize> = (0..n_rows).filter(|&r| a >> r & 1 == 1).collect();
        let mut mass_c = vec![0.0_f64; n_cols];
        let mut err_c = vec![0.0_f64; n_cols];
        for &r in &rows {
            for c in 0..n_cols {
                let p = w(r, c);
                mass_c[c] += p;
                if f.get(r, c) != value {
                    err_c[c] += p;
                }
            }
        }
        // Columns already within their own error budget always help; the
        // rest compete for the slack they leave.
        let mut cols = Vec::new();
        let mut mass = 0.0;
        let mut err = 0.0;
        let mut budget = 0.0;
        let mut costly: Vec<(usize, f64)> = Vec::new();
        for c in 0..n_cols {
            let cost = err_c[c] - eps * mass_c[c];
            if cost <= tol::PRUNE {
                if mass_c[c] > 0.0 {
                    cols.push(c);
                    mass += mass_c[c];
                    err += err_c[c];
                    budget -= cost;
                }
            } else {
                costly.push((c, cost));
            }
        }
        costly.retain(|&(_, cost)| cost <= budget + tol::PRUNE);
        if costly.len() > 20 {
            return Err(Error::Resource(
                "too many error-heavy columns for exhaustive search".into(),
            ));
        }
        let mut extra_cols: Vec<usize> = Vec::new();
        let mut extra_mass = 0.0;
        for pick in 0u32..1 << costly.len() {
            let mut pm = 0.0;
            let mut pc = 0.0;
            for (i, &(c_idx, cost)) in costly.iter().enumerate() {
                if pick >> i & 1 == 1 {
                    pm += mass_c[c_idx];
                    pc += cost;
                }
            }
            if pc <= budget + tol::PRUNE && pm > extra_mass {
                extra_mass = pm;
                extra_cols = costly
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| pick >> i & 1 == 1)
                    .map(|(_, &(c_idx, _))| c_idx)
                    .collect();
            }
        }
        if mass + extra_mass > best.mass {
            cols.extend(&extra_cols);
            cols.sort_unstable();
            for &c in &extra_cols {
                err += err_c[c];
            }
            best = RectangleStat { rows, cols, mass: mass + extra_mass, error_mass: err };
        }
    }
    Ok(best)
}

/// One round's recomputed losses, both players.
#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifiedRound {
    pub round: usize,
    pub al_loss_bits: f64,
    pub bob_loss_bits: f64,
}

/// Transcript information recomputed from nothing but protocol evaluations.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PrivacyVerifyReport {
    /// Outer index follows the distribution list; inner rounds run from 0 to
    /// the protocol depth.
    pub rounds_by_distribution: Vec<Vec<VerifiedRound>>,
    pub max_loss_bits: f64,
    /// Mass of inputs whose output differs from the matrix, per distribution.
    pub error_by_distribution: Vec<f64>,
}

/// Recomputes error and per-round privacy loss for a deterministic protocol
/// by direct counting: transcripts are determined by the inputs, so
/// I(T : other | own, F) = H(T | own, F), evaluated as a plain sum over
/// (own input, function value) groups of prefix-histogram entropies.
pub fn exhaustive_privacy_verify(
    p: &DeterministicProtocol,
    f: &CommMatrix,
    dists: &[ProbDist],
) -> Result<PrivacyVerifyReport> {
    if f.rows() != p.n_x() || f.cols() != p.n_y() {
        return Err(Error::DimensionMismatch(format!(
            "protocol inputs {}x{} vs matrix {}x{}",
            p.n_x(),
            p.n_y(),
            f.rows(),
            f.cols()
        )));
    }
    if dists.is_empty() {
        return Err(Error::InvalidArgument("no distributions to verify against".into()));
    }
    let mut transcripts = Vec::with_capacity(p.n_x() * p.n_y());
    let mut correct = Vec::with_capacity(p.n_x() * p.n_y());
    for x in 0..p.n_x() {
        for y in 0..p.n_y() {
            let outcome = p.eval(x, y)?;
            correct.push(outcome.output == Output::Value(f.get(x, y)));
            transcripts.push(outcome.transcript);
        }
    }
    let mut rounds_by_distribution = Vec::with_capacity(dists.len());
    let mut error_by_distribution = Vec::with_capacity(dists.len());
    let mut max_loss = 0.0_f64;
    for mu in dists {
        check_input_dist(f, mu)?;
        let error = mu
            .iter()
            .filter(|(l, _)| !correct[l[0] * p.n_y() + l[1]])
            .map(|(_, w)| w)
            .sum();
        error_by_distribution.push(error);
        let mut rounds = Vec::with_capacity(p.max_depth() + 1);
        for round in 0..=p.max_depth() {
            let figures = if round == 0 {
                VerifiedRound { round, al_loss_bits: 0.0, bob_loss_bits: 0.0 }
            } else {
                VerifiedRound {
                    round,
                    al_loss_bits: prefix_loss(&transcripts, p, f, mu, round, Player::Al),
                    bob_loss_bits: prefix_loss(&transcripts, p, f, mu, round, Player::Bob),
                }
            };
            max_loss = max_loss.max(figures.al_loss_bits).max(figures.bob_loss_bits);
            rounds.push(figures);
        }
        rounds_by_distribution.push(rounds);
    }
    Ok(PrivacyVerifyReport { rounds_by_distribution, max_loss_bits: max_loss, error_by_distribution })
}

fn prefix_loss(
    transcripts: &[Vec<usize>],
    p: &DeterministicProtocol,
    f: &CommMatrix,
    mu: &ProbDist,
    round: usize,
    player: Player,
) -> f64 {
    // (own input, function value) -> (group mass, prefix histogram)
    let mut groups: BTreeMap<(usize, usize), (f64, BTreeMap<Vec<usize>, f64>)> = BTreeMap::new();
    for (label, w) in mu.iter() {
        if w <= 0.0 {
            continue;
        }
        let (x, y) = (label[0], label[1]);
        let own = match player {
            Player::Al => x,
            Player::Bob => y,
        };
        let t = &transcripts[x * p.n_y() + y];
        let prefix = t[..t.len().min(round)].to_vec();
        let entry = groups.entry((own, f.get(x, y))).or_default();
        entry.0 += w;
        *entry.1.entry(prefix).or_default() += w;
    }
    let mut h = 0.0;
    for (mass, histogram) in groups.values() {
        for &m in histogram.values() {
            if m > 0.0 {
                h -= m * (m / mass).log2();
            }
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;
    use crate::privacy::privacy_loss;
    use crate::protocols::{disjointness_matrix, idmin_leaky_uniform, idmin_matrix, idmin_private};
    use crate::random::rng_from_seed;
    use crate::structure::{is_private, synthesize_private_protocol};

    fn xor_matrix(side: usize) -> CommMatrix {
        CommMatrix::from_fn(side, side, |x, y| x ^ y)
    }

    fn assert_monochromatic(f: &CommMatrix, rect: &MonochromaticRectangle) {
        for &r in &rect.rows {
            for &c in &rect.cols {
                assert_eq!(f.get(r, c), rect.value);
            }
        }
        assert_eq!(rect.width, rect.rows.len().min(rect.cols.len()));
    }

    fn brute_force_width(g: &CommMatrix) -> usize {
        let mut best = 0;
        for value in g.alphabet() {
            let rowmask: Vec<u64> = (0..g.rows()).map(|r| cols_mask(g, r, value)).collect();
            for a in 1u32..1 << g.rows() {
                let mut mask = u64::MAX >> (64 - g.cols());
                let mut n_rows = 0usize;
                for (r, &rm) in rowmask.iter().enumerate() {
                    if a >> r & 1 == 1 {
                        mask &= rm;
                        n_rows += 1;
                    }
                }
                best = best.max(n_rows.min(mask.count_ones() as usize));
            }
        }
        best
    }

    #[test]
    fn monochromatic_widths_are_frozen() {
        let cases: &[(CommMatrix, usize)] = &[
            (disjointness_matrix(2).unwrap(), 2),
            (xor_matrix(4), 1),
            (CommMatrix::from_fn(4, 4, |_, _| 7), 4),
            (xor_matrix(2), 1),
            (idmin_matrix(2).unwrap(), 1),
        ];
        for (f, expected) in cases {
            let rect = max_monochromatic_width(f).unwrap();
            assert_eq!(rect.width, *expected);
            assert_monochromatic(f, &rect);
        }
    }

    #[test]
    fn branch_and_bound_agrees_with_subset_enumeration() {
        let mut rng = rng_from_seed(41);
        for _ in 0..5 {
            let entries: Vec<usize> = (0..17 * 17).map(|_| rng.gen_range(0..3)).collect();
            let f = CommMatrix::from_fn(17, 17, |r, c| entries[r * 17 + c]);
            let rect = max_monochromatic_width(&f).unwrap();
            assert_monochromatic(&f, &rect);
            assert_eq!(rect.width, brute_force_width(&f));
        }
    }

    #[test]
    fn tall_matrices_search_the_transposed_side() {
        let mut rng = rng_from_seed(42);
        let entries: Vec<usize> = (0..17 * 3).map(|_| rng.gen_range(0..2)).collect();
        let f = CommMatrix::from_fn(17, 3, |r, c| entries[r * 3 + c]);
        let rect = max_monochromatic_width(&f).unwrap();
        assert_monochromatic(&f, &rect);
        assert!(rect.rows.iter().all(|&r| r < 17));
        assert!(rect.cols.iter().all(|&c| c < 3));
        let t = CommMatrix::from_fn(3, 17, |r, c| f.get(c, r));
        assert_eq!(rect.width, brute_force_width(&t));
    }

    #[test]
    fn rectangle_search_rejects_oversized_matrices() {
        let f = CommMatrix::from_fn(65, 4, |_, _| 0);
        assert!(matches!(max_monochromatic_width(&f), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn communication_lower_bounds_are_frozen() {
        assert_eq!(cl0_lower_bound(&CommMatrix::from_fn(4, 4, |_, _| 7)).unwrap(), -1.0);
        assert_eq!(cl0_lower_bound(&xor_matrix(2)).unwrap(), -0.5);
        assert_eq!(cl0_lower_bound(&disjointness_matrix(2).unwrap()).unwrap(), -0.5);
        assert_eq!(cl0_lower_bound(&idmin_matrix(2).unwrap()).unwrap(), 0.0);
        assert!(matches!(
            cl0_lower_bound(&CommMatrix::from_fn(2, 4, |_, _| 0)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            cl0_lower_bound(&CommMatrix::from_fn(3, 3, |_, _| 0)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn heaviest_correct_rectangles_are_frozen() {
        let uniform = ProbDist::uniform_grid(&[4, 4]).unwrap();
        let disj = disjointness_matrix(2).unwrap();
        let ones = largest_correct_rectangle(&disj, &uniform, 1, 0.0).unwrap();
        assert!((ones.mass - 0.25).abs() < tol::VALIDATION);
        assert_eq!(ones.error_mass, 0.0);
        let zeros = largest_correct_rectangle(&disj, &uniform, 0, 0.0).unwrap();
        assert!((zeros.mass - 0.25).abs() < tol::VALIDATION);
        let xor = xor_matrix(4);
        let diag = largest_correct_rectangle(&xor, &uniform, 0, 0.0).unwrap();
        assert!((diag.mass - 0.0625).abs() < tol::VALIDATION);
        let all = largest_correct_rectangle(&xor, &uniform, 0, 1.0).unwrap();
        assert!((all.mass - 1.0).abs() < tol::VALIDATION);
        assert!(matches!(
            largest_correct_rectangle(&disj, &uniform, 1, -0.1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            largest_correct_rectangle(&disj, &uniform, 1, 1.1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn correct_rectangles_respect_budget_and_grow_with_eps() {
        let mut rng = rng_from_seed(43);
        let entries: Vec<usize> = (0..36).map(|_| rng.gen_range(0..2)).collect();
        let f = CommMatrix::from_fn(6, 6, |r, c| entries[r * 6 + c]);
        let weights = crate::random::random_probs(&mut rng, 36);
        let w = &weights;
        let pairs: Vec<(Vec<usize>, f64)> = (0..6)
            .flat_map(|x| (0..6).map(move |y| (vec![x, y], w[x * 6 + y])))
            .collect();
        let mu = ProbDist::from_pairs(pairs).unwrap();
        let mut last_mass = 0.0;
        for eps in [0.0, 0.1, 0.3, 1.0] {
            let rect = largest_correct_rectangle(&f, &mu, 1, eps).unwrap();
            assert!(rect.error_mass <= eps * rect.mass + tol::PROPERTY);
            assert!(rect.mass >= last_mass - tol::PRUNE);
            last_mass = rect.mass;
            let mut mass = 0.0;
            let mut err = 0.0;
            for &r in &rect.rows {
                for &c in &rect.cols {
                    let p = mu.prob(&[r, c]);
                    mass += p;
                    if f.get(r, c) != 1 {
                        err += p;
                    }
                }
            }
            assert!((mass - rect.mass).abs() < tol::PROPERTY);
            assert!((err - rect.error_mass).abs() < tol::PROPERTY);
        }
    }

    fn skewed_grid(side: usize) -> ProbDist {
        let total: f64 = (0..side)
            .flat_map(|x| (0..side).map(move |y| ((x + 1) * (y + 2)) as f64))
            .sum();
        ProbDist::from_pairs((0..side).flat_map(|x| {
            (0..side).map(move |y| (vec![x, y], ((x + 1) * (y + 2)) as f64 / total))
        }))
        .unwrap()
    }

    fn assert_verifier_matches_analyzer(
        p: &DeterministicProtocol,
        f: &CommMatrix,
        dists: &[ProbDist],
    ) -> PrivacyVerifyReport {
        let report = exhaustive_privacy_verify(p, f, dists).unwrap();
        for (mu, rounds) in dists.iter().zip(&report.rounds_by_distribution) {
            assert_eq!(rounds.len(), p.max_depth() + 1);
            for figures in rounds {
                let al = privacy_loss(p, mu, f, figures.round, Player::Al).unwrap();
                let bob = privacy_loss(p, mu, f, figures.round, Player::Bob).unwrap();
                assert!(
                    (figures.al_loss_bits - al).abs() < tol::INFO,
                    "round {}: verifier {} vs analyzer {al}",
                    figures.round,
                    figures.al_loss_bits
                );
                assert!(
                    (figures.bob_loss_bits - bob).abs() < tol::INFO,
                    "round {}: verifier {} vs analyzer {bob}",
                    figures.round,
                    figures.bob_loss_bits
                );
            }
        }
        report
    }

    #[test]
    fn verifier_agrees_with_analyzer_on_a_private_protocol() {
        let f = idmin_matrix(2).unwrap();
        let p = idmin_private(2).unwrap();
        let dists = [ProbDist::uniform_grid(&[4, 4]).unwrap(), skewed_grid(4)];
        let report = assert_verifier_matches_analyzer(&p, &f, &dists);
        assert!(report.max_loss_bits <= tol::INFO);
        assert!(report.error_by_distribution.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn verifier_agrees_with_analyzer_on_a_leaky_protocol() {
        let f = idmin_matrix(4).unwrap();
        let p = idmin_leaky_uniform(4, 0.25).unwrap();
        let uniform = ProbDist::uniform_grid(&[16, 16]).unwrap();
        let report = assert_verifier_matches_analyzer(&p, &f, &[uniform]);
        // Exactly one of the 256 input pairs is announced wrong.
        assert!((report.error_by_distribution[0] - 1.0 / 256.0).abs() < tol::VALIDATION);
        assert!(report.max_loss_bits > 0.0);
    }

    #[test]
    fn verifier_agrees_with_analyzer_on_a_synthesized_protocol() {
        let f = idmin_matrix(2).unwrap();
        assert!(is_private(&f));
        let p = synthesize_private_protocol(&f).unwrap();
        let dists = [ProbDist::uniform_grid(&[4, 4]).unwrap(), skewed_grid(4)];
        let report = assert_verifier_matches_analyzer(&p, &f, &dists);
        assert!(report.max_loss_bits <= tol::INFO);
        assert!(report.error_by_distribution.iter().all(|&e| e == 0.0));
        let bound = cl0_lower_bound(&f).unwrap();
        assert!(p.max_bits().unwrap() as f64 >= bound);
    }

    #[test]
    fn verifier_rejects_mismatched_inputs() {
        let p = idmin_private(2).unwrap();
        let uniform = ProbDist::uniform_grid(&[4, 4]).unwrap();
        assert!(matches!(
            exhaustive_privacy_verify(&p, &idmin_matrix(3).unwrap(), &[uniform]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            exhaustive_privacy_verify(&p, &idmin_matrix(2).unwrap(), &[]),
            Err(Error::InvalidArgument(_))
        ));
    }
}
