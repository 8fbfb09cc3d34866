//! Lifting a family of unit vectors so that no two members are orthogonal.

use crate::qstate::{C64, CVec};
use crate::{tol, Error, Result};

/// Appends one fresh dimension with amplitude δ to every vector, rescaling
/// the original amplitudes by √(1−δ²). The lifted pair overlap is
/// δ² + (1−δ²)·⟨v_i|v_j⟩, so originally orthogonal vectors end up with
/// overlap exactly δ².
///
/// δ starts at min(ε/2, 0.1), which keeps every lift within distance ε of the
/// zero-padded original, and is halved whenever some pair overlap lands
/// within [`tol::NONORTH_MIN`] of zero. Returns the lifted vectors and the
/// chosen δ.
pub fn nonorthogonalize(vectors: &[CVec], eps: f64) -> Result<(Vec<CVec>, f64)> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("lift budget ε = {eps} must be positive")));
    }
    if vectors.is_empty() {
        return Err(Error::InvalidArgument("no vectors to lift".into()));
    }
    let dim = vectors[0].len();
    for v in vectors {
        if v.len() != dim {
            return Err(Error::DimensionMismatch(
                "vectors in one family must share a dimension".into(),
            ));
        }
        if (v.norm() - 1.0).abs() > tol::VALIDATION {
            return Err(Error::InvalidState(format!("vector norm {} is not 1", v.norm())));
        }
    }
    let mut overlaps = Vec::new();
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            overlaps.push(vectors[i].dotc(&vectors[j]));
        }
    }
    let mut delta = (eps / 2.0).min(0.1);
    for _ in 0..=64 {
        let d2 = delta * delta;
        let collision = overlaps
            .iter()
            .any(|ip| (ip * (1.0 - d2) + C64::new(d2, 0.0)).norm() <= tol::NONORTH_MIN);
        if !collision {
            let scale = C64::new((1.0 - d2).sqrt(), 0.0);
            let lifted = vectors
                .iter()
                .map(|v| {
                    CVec::from_fn(dim + 1, |i, _| {
                        if i < dim {
                            v[i] * scale
                        } else {
                            C64::new(delta, 0.0)
                        }
                    })
                })
                .collect();
            return Ok((lifted, delta));
        }
        delta /= 2.0;
    }
    Err(Error::Numerical(
        "no non-orthogonalizing δ found after 64 halvings".into(),
    ))
}
