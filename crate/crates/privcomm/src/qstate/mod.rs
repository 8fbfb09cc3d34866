//! Pure states, density matrices, unitaries, channels and measurements over
//! arbitrary finite-dimensional subsystem splits.
//!
//! Subsystem dimensions are arbitrary positive integers, not just qubits, so a
//! d-dimensional message register can be a single subsystem. Basis indexing is
//! row-major with the leftmost subsystem most significant, matching the
//! convention of the Kronecker product: for dims [d1, d2], basis index
//! i = i1*d2 + i2.

mod linalg;

pub use linalg::{hermitian_eigen, HermitianEigen};

use crate::tol;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CVec = DVector<C64>;
pub type CMat = DMatrix<C64>;

pub(crate) fn dims_product(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Iterate the multi-index for `flat` under row-major `dims`.
pub(crate) fn unflatten(mut flat: usize, dims: &[usize], out: &mut [usize]) {
    for j in (0..dims.len()).rev() {
        out[j] = flat % dims[j];
        flat /= dims[j];
    }
}

pub(crate) fn flatten(multi: &[usize], dims: &[usize]) -> usize {
    let mut flat = 0;
    for j in 0..dims.len() {
        flat = flat * dims[j] + multi[j];
    }
    flat
}

/// A normalized pure state over a list of subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: CVec,
}

impl PureState {
    /// Builds a state from amplitudes, validating the norm to [`tol::VALIDATION`].
    pub fn new(dims: Vec<usize>, amps: CVec) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument("subsystem dims must be positive".into()));
        }
        if dims_product(&dims) != amps.len() {
            return Err(Error::DimensionMismatch(format!(
                "dims product {} != amplitude count {}",
                dims_product(&dims),
                amps.len()
            )));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > tol::VALIDATION {
            return Err(Error::InvalidState(format!("pure state norm {norm} is not 1")));
        }
        Ok(Self { dims, amps })
    }

    /// Basis state |i1, i2, ...> for the given dims.
    pub fn basis(dims: Vec<usize>, multi: &[usize]) -> Result<Self> {
        if multi.len() != dims.len() || multi.iter().zip(&dims).any(|(&i, &d)| i >= d) {
            return Err(Error::InvalidArgument("basis index out of range".into()));
        }
        let n = dims_product(&dims);
        let mut amps = CVec::zeros(n);
        amps[flatten(multi, &dims)] = C64::new(1.0, 0.0);
        Ok(Self { dims, amps })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// <self|other>.
    pub fn overlap(&self, other: &PureState) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch("overlap of states with different dims".into()));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState { dims, amps: self.amps.kronecker(&other.amps) }
    }

    pub fn to_density(&self) -> DensityMatrix {
        let mat = &self.amps * self.amps.adjoint();
        DensityMatrix { dims: self.dims.clone(), mat }
    }

    /// Applies a unitary on the listed subsystems (in the listed order).
    pub fn apply_unitary(&self, u: &Unitary, subsystems: &[usize]) -> Result<PureState> {
        let amps = apply_matrix_on_subsystems(&u.mat, &self.amps, &self.dims, subsystems)?;
        Ok(PureState { dims: self.dims.clone(), amps })
    }

    /// Re-groups the flat amplitude vector under a new dims split of the same
    /// total dimension.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<PureState> {
        if dims_product(&dims) != self.amps.len() {
            return Err(Error::DimensionMismatch("with_dims changes total dimension".into()));
        }
        Ok(PureState { dims, amps: self.amps.clone() })
    }
}

/// A density matrix over a list of subsystem dimensions. Validated to be
/// Hermitian, unit trace, and positive semidefinite up to [`tol::VALIDATION`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: CMat,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, mat: CMat) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument("subsystem dims must be positive".into()));
        }
        let n = dims_product(&dims);
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "dims product {} != matrix shape {}x{}",
                n,
                mat.nrows(),
                mat.ncols()
            )));
        }
        let herm_dev = (&mat - mat.adjoint()).norm();
        if herm_dev > tol::VALIDATION * (n as f64) {
            return Err(Error::InvalidState(format!("density matrix not Hermitian (dev {herm_dev:.3e})")));
        }
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > tol::VALIDATION || trace.im.abs() > tol::VALIDATION {
            return Err(Error::InvalidState(format!("density matrix trace {trace} is not 1")));
        }
        let eig = hermitian_eigen(&mat)?;
        if let Some(&min) = eig.values.iter().min_by(|a, b| a.total_cmp(b)) {
            if min < -tol::EIGENVALUE_SLACK * (n as f64) {
                return Err(Error::InvalidState(format!("density matrix not PSD (min eigenvalue {min:.3e})")));
            }
        }
        Ok(Self { dims, mat })
    }

    /// Maximally mixed state on the given dims.
    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n = dims_product(&dims);
        let mat = CMat::identity(n, n) / C64::new(n as f64, 0.0);
        Self { dims, mat }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix { dims, mat: self.mat.kronecker(&other.mat) }
    }

    /// Eigenvalues clamped into [0,1]; values outside by more than
    /// [`tol::EIGENVALUE_SLACK`] (scaled by dimension) are rejected upstream.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = hermitian_eigen(&self.mat)?;
        Ok(eig.values.iter().map(|&v| v.clamp(0.0, 1.0)).collect())
    }

    /// Convex mixture of density matrices; weights must sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
        let (w0, first) = parts.first().ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let mut total = *w0;
        let mut mat = first.mat.clone() * C64::new(*w0, 0.0);
        for (w, dm) in &parts[1..] {
            if dm.dims != first.dims {
                return Err(Error::DimensionMismatch("mixture of states with different dims".into()));
            }
            mat += dm.mat.clone() * C64::new(*w, 0.0);
            total += *w;
        }
        if (total - 1.0).abs() > tol::VALIDATION {
            return Err(Error::InvalidState(format!("mixture weights sum to {total}")));
        }
        Ok(DensityMatrix { dims: first.dims.clone(), mat })
    }

    /// Traces out every subsystem not in `keep`; result subsystems follow the
    /// order of `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let k = self.dims.len();
        if keep.iter().any(|&s| s >= k) {
            return Err(Error::InvalidArgument("partial_trace keep index out of range".into()));
        }
        let mut seen = vec![false; k];
        for &s in keep {
            if seen[s] {
                return Err(Error::InvalidArgument("partial_trace keep index repeated".into()));
            }
            seen[s] = true;
        }
        let traced: Vec<usize> = (0..k).filter(|&s| !seen[s]).collect();
        let keep_dims: Vec<usize> = keep.iter().map(|&s| self.dims[s]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&s| self.dims[s]).collect();
        let nk = dims_product(&keep_dims);
        let nt = dims_product(&traced_dims);

        let mut out = CMat::zeros(nk, nk);
        let mut row_multi = vec![0usize; keep.len()];
        let mut col_multi = vec![0usize; keep.len()];
        let mut tr_multi = vec![0usize; traced.len()];
        let mut full_row = vec![0usize; k];
        let mut full_col = vec![0usize; k];
        for i in 0..nk {
            unflatten(i, &keep_dims, &mut row_multi);
            for j in 0..nk {
                unflatten(j, &keep_dims, &mut col_multi);
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..nt {
                    unflatten(t, &traced_dims, &mut tr_multi);
                    for (pos, &s) in keep.iter().enumerate() {
                        full_row[s] = row_multi[pos];
                        full_col[s] = col_multi[pos];
                    }
                    for (pos, &s) in traced.iter().enumerate() {
                        full_row[s] = tr_multi[pos];
                        full_col[s] = tr_multi[pos];
                    }
                    acc += self.mat[(flatten(&full_row, &self.dims), flatten(&full_col, &self.dims))];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(DensityMatrix { dims: keep_dims, mat: out })
    }

    /// Purity tr(rho^2).
    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }
}

/// A unitary matrix. Validated to [`tol::VALIDATION`].
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    mat: CMat,
}

impl Unitary {
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch("unitary must be square".into()));
        }
        let n = mat.nrows();
        let dev = (mat.adjoint() * &mat - CMat::identity(n, n)).norm();
        if dev > tol::VALIDATION * (n as f64) {
            return Err(Error::InvalidState(format!("matrix is not unitary (dev {dev:.3e})")));
        }
        Ok(Self { mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: CMat::identity(dim, dim) }
    }

    /// Permutation unitary: basis state i is mapped to basis state perm[i].
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            seen[p] = true;
        }
        let mut mat = CMat::zeros(n, n);
        for (i, &p) in perm.iter().enumerate() {
            mat[(p, i)] = C64::new(1.0, 0.0);
        }
        Ok(Self { mat })
    }

    /// A unitary whose first column is `first` (deterministic completion).
    pub fn with_first_column(first: &CVec) -> Result<Self> {
        let n = first.len();
        let norm = first.norm();
        if (norm - 1.0).abs() > tol::VALIDATION {
            return Err(Error::InvalidState("first column must be a unit vector".into()));
        }
        let cols = complete_isometry_columns(&[first.clone()], n)?;
        let mut mat = CMat::zeros(n, n);
        for (j, c) in cols.iter().enumerate() {
            mat.set_column(j, c);
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn then(&self, later: &Unitary) -> Result<Unitary> {
        if self.dim() != later.dim() {
            return Err(Error::DimensionMismatch("composing unitaries of different dims".into()));
        }
        Ok(Unitary { mat: &later.mat * &self.mat })
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary { mat: self.mat.adjoint() }
    }
}

/// Extends the given orthonormal columns to an orthonormal basis of C^n by
/// Gram-Schmidt over standard basis vectors (deterministic).
fn complete_isometry_columns(cols: &[CVec], n: usize) -> Result<Vec<CVec>> {
    let mut basis: Vec<CVec> = cols.to_vec();
    for j in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = CVec::zeros(n);
        v[j] = C64::new(1.0, 0.0);
        for b in &basis {
            let coef = b.dotc(&v);
            v -= b * coef;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / C64::new(norm, 0.0));
        }
    }
    if basis.len() != n {
        return Err(Error::Numerical("failed to complete orthonormal basis".into()));
    }
    Ok(basis)
}

/// A quantum channel in Kraus form, mapping dim `d` to dim `d'` states.
#[derive(Debug, Clone)]
pub struct Channel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<CMat>,
}

impl Channel {
    pub fn new(kraus: Vec<CMat>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::InvalidArgument("channel needs Kraus operators".into()))?;
        let (out_dim, in_dim) = (first.nrows(), first.ncols());
        if kraus.iter().any(|k| k.nrows() != out_dim || k.ncols() != in_dim) {
            return Err(Error::DimensionMismatch("Kraus operators of mixed shapes".into()));
        }
        let mut completeness = CMat::zeros(in_dim, in_dim);
        for k in &kraus {
            completeness += k.adjoint() * k;
        }
        let dev = (completeness - CMat::identity(in_dim, in_dim)).norm();
        if dev > tol::VALIDATION * (in_dim as f64) {
            return Err(Error::InvalidState(format!("Kraus operators not trace-preserving (dev {dev:.3e})")));
        }
        Ok(Self { in_dim, out_dim, kraus })
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// Sum_j K_j rho K_j^dag. The output is a single-subsystem state of the
    /// channel's output dimension.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.in_dim {
            return Err(Error::DimensionMismatch("channel input dim mismatch".into()));
        }
        let mut out = CMat::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out += k * &rho.mat * k.adjoint();
        }
        DensityMatrix::new(vec![self.out_dim], out)
    }

    /// The isometry V = sum_j |j> (x) K_j with environment dimension equal to
    /// the number of Kraus operators. V^dag V = I on the input space.
    pub fn dilation_isometry(&self) -> CMat {
        let k = self.kraus.len();
        let mut v = CMat::zeros(k * self.out_dim, self.in_dim);
        for (j, kr) in self.kraus.iter().enumerate() {
            v.view_mut((j * self.out_dim, 0), (self.out_dim, self.in_dim)).copy_from(kr);
        }
        v
    }

    /// Applies the channel along the dilation route: append a blank
    /// environment, act with a unitary extension of the dilation isometry,
    /// trace the environment back out. Equal to [`Channel::apply`].
    pub fn apply_via_dilation(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.in_dim {
            return Err(Error::DimensionMismatch("channel input dim mismatch".into()));
        }
        let k = self.kraus.len();
        let big = k * self.out_dim;
        let v = self.dilation_isometry();
        let v_cols: Vec<CVec> = (0..self.in_dim).map(|j| v.column(j).into_owned()).collect();
        let basis = complete_isometry_columns(&v_cols, big)?;
        let mut u = CMat::zeros(big, big);
        for (j, c) in basis.iter().enumerate() {
            u.set_column(j, c);
        }
        // Input embedded as rho (x) |0><0| on an environment of dim big/in_dim
        // would need big divisible by in_dim; instead embed by padding the
        // input into the first in_dim basis states of the big space, which is
        // exactly where U reads its columns from.
        let mut embedded = CMat::zeros(big, big);
        embedded.view_mut((0, 0), (self.in_dim, self.in_dim)).copy_from(&rho.mat);
        let evolved = &u * embedded * u.adjoint();
        // Environment index j, system index s interleaved as j*out_dim + s.
        let env_then_sys = DensityMatrix { dims: vec![k, self.out_dim], mat: evolved };
        env_then_sys.partial_trace(&[1])
    }
}

/// Applies `mat` (square, of the product dimension of the listed subsystems)
/// to the amplitude vector `amps` over `dims`, acting on `subsystems` in the
/// listed order and identity elsewhere.
pub fn apply_matrix_on_subsystems(
    mat: &CMat,
    amps: &CVec,
    dims: &[usize],
    subsystems: &[usize],
) -> Result<CVec> {
    let k = dims.len();
    if subsystems.iter().any(|&s| s >= k) {
        return Err(Error::InvalidArgument("subsystem index out of range".into()));
    }
    let mut seen = vec![false; k];
    for &s in subsystems {
        if seen[s] {
            return Err(Error::InvalidArgument("subsystem index repeated".into()));
        }
        seen[s] = true;
    }
    let sub_dims: Vec<usize> = subsystems.iter().map(|&s| dims[s]).collect();
    let d_act = dims_product(&sub_dims);
    if mat.nrows() != d_act || mat.ncols() != d_act {
        return Err(Error::DimensionMismatch(format!(
            "operator dim {} != product of target subsystem dims {}",
            mat.nrows(),
            d_act
        )));
    }
    let rest: Vec<usize> = (0..k).filter(|&s| !seen[s]).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&s| dims[s]).collect();
    let d_rest = dims_product(&rest_dims);

    // Gather amplitudes into (act, rest) layout, multiply, scatter back.
    let mut full_multi = vec![0usize; k];
    let mut act_multi = vec![0usize; subsystems.len()];
    let mut rest_multi = vec![0usize; rest.len()];
    let mut index_of = vec![0usize; d_act * d_rest];
    for a in 0..d_act {
        unflatten(a, &sub_dims, &mut act_multi);
        for r in 0..d_rest {
            unflatten(r, &rest_dims, &mut rest_multi);
            for (pos, &s) in subsystems.iter().enumerate() {
                full_multi[s] = act_multi[pos];
            }
            for (pos, &s) in rest.iter().enumerate() {
                full_multi[s] = rest_multi[pos];
            }
            index_of[a * d_rest + r] = flatten(&full_multi, dims);
        }
    }
    let mut out = amps.clone();
    let mut col = CVec::zeros(d_act);
    for r in 0..d_rest {
        for a in 0..d_act {
            col[a] = amps[index_of[a * d_rest + r]];
        }
        let res = mat * &col;
        for a in 0..d_act {
            out[index_of[a * d_rest + r]] = res[a];
        }
    }
    Ok(out)
}

/// Trace-norm distance ||rho1 - rho2||_1 = sum of absolute eigenvalues of the
/// Hermitian difference. Ranges over [0, 2] for states.
pub fn trace_norm_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch("trace distance of different dims".into()));
    }
    let diff = &a.mat - &b.mat;
    let eig = hermitian_eigen(&diff)?;
    Ok(eig.values.iter().map(|v| v.abs()).sum())
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn hermitian_trace_norm(m: &CMat) -> Result<f64> {
    let eig = hermitian_eigen(m)?;
    Ok(eig.values.iter().map(|v| v.abs()).sum())
}

/// Trace-norm distance between pure states: 2*sqrt(1 - |<phi1|phi2>|^2).
pub fn pure_state_distance(phi1: &PureState, phi2: &PureState) -> Result<f64> {
    let ov = phi1.overlap(phi2)?;
    let m = ov.norm_sqr().min(1.0);
    Ok(2.0 * (1.0 - m).sqrt())
}

/// The optimal two-outcome distinguishing measurement for a pair of states:
/// projectors onto the nonnegative and negative eigenspaces of rho1 - rho2.
pub struct HelstromMeasurement {
    pub projector_pos: CMat,
    pub projector_neg: CMat,
    /// l1 distance between the two induced outcome distributions; equals the
    /// trace-norm distance of the inputs.
    pub outcome_l1: f64,
}

pub fn helstrom_measurement(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<HelstromMeasurement> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch("helstrom of different dims".into()));
    }
    let diff = &rho1.mat - &rho2.mat;
    let eig = hermitian_eigen(&diff)?;
    let n = diff.nrows();
    let mut pos = CMat::zeros(n, n);
    let mut neg = CMat::zeros(n, n);
    for (j, &v) in eig.values.iter().enumerate() {
        let col = eig.vectors.column(j);
        let proj = col * col.adjoint();
        if v >= 0.0 {
            pos += proj;
        } else {
            neg += proj;
        }
    }
    let p1_pos = (&pos * &rho1.mat).trace().re;
    let p2_pos = (&pos * &rho2.mat).trace().re;
    let p1_neg = (&neg * &rho1.mat).trace().re;
    let p2_neg = (&neg * &rho2.mat).trace().re;
    let outcome_l1 = (p1_pos - p2_pos).abs() + (p1_neg - p2_neg).abs();
    Ok(HelstromMeasurement { projector_pos: pos, projector_neg: neg, outcome_l1 })
}

/// A purification of `rho` over dims (x) [d]: sum_i sqrt(l_i) |v_i>|i> with
/// eigenvalues sorted descending, so a pure input purifies to |psi>|0>.
pub fn purify(rho: &DensityMatrix) -> Result<PureState> {
    let eig = hermitian_eigen(&rho.mat)?;
    let d = rho.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.values[b].total_cmp(&eig.values[a]));
    let mut amps = CVec::zeros(d * d);
    for (anc, &j) in order.iter().enumerate() {
        let lam = eig.values[j].clamp(0.0, 1.0);
        if lam == 0.0 {
            continue;
        }
        let root = lam.sqrt();
        let col = eig.vectors.column(j);
        for s in 0..d {
            amps[s * d + anc] += col[s] * C64::new(root, 0.0);
        }
    }
    // Renormalize the clamping residue away; it is bounded by the validation
    // tolerance times dimension.
    let norm = amps.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::Numerical(format!("purification norm drifted to {norm}")));
    }
    amps /= C64::new(norm, 0.0);
    let mut dims = rho.dims.clone();
    dims.push(d);
    Ok(PureState { dims, amps })
}

/// Result of aligning the ancilla parts of two purifications.
pub struct UhlmannAlignment {
    /// Unitary on the ancilla part to apply to phi2.
    pub unitary: Unitary,
    /// (I (x) U) |phi2>.
    pub aligned_phi2: PureState,
    /// Uhlmann fidelity of the reduced system states, realized as the overlap
    /// |<phi1|(I (x) U)|phi2>|.
    pub fidelity: f64,
    /// Pure-state distance between phi1 and the aligned phi2.
    pub aligned_distance: f64,
}

/// Aligns the purifying registers of two pure states over the same dims. The
/// first `n_sys` subsystems are the system, the rest the purifier. The
/// alignment maximizes the overlap, realizing the Uhlmann fidelity of the
/// reduced system states.
pub fn uhlmann_align(phi1: &PureState, phi2: &PureState, n_sys: usize) -> Result<UhlmannAlignment> {
    if phi1.dims != phi2.dims {
        return Err(Error::DimensionMismatch("aligning states with different dims".into()));
    }
    if n_sys == 0 || n_sys >= phi1.dims.len() {
        return Err(Error::InvalidArgument("system split must leave both parts nonempty".into()));
    }
    let d_sys: usize = phi1.dims[..n_sys].iter().product();
    let d_anc: usize = phi1.dims[n_sys..].iter().product();
    // Amplitude index = s*d_anc + k; reshape into (sys x anc) matrices.
    let reshape = |p: &PureState| {
        let mut m = CMat::zeros(d_sys, d_anc);
        for s in 0..d_sys {
            for k in 0..d_anc {
                m[(s, k)] = p.amps[s * d_anc + k];
            }
        }
        m
    };
    let a1 = reshape(phi1);
    let a2 = reshape(phi2);
    // Overlap after acting with U on the ancilla of phi2 is tr(C U^T) with
    // C = A1^dag A2; the maximizing U comes from the SVD of C^T.
    let c_t = (a1.adjoint() * &a2).transpose();
    let svd = c_t.svd(true, true);
    let u_svd = svd.u.ok_or_else(|| Error::Numerical("svd failed".into()))?;
    let v_t = svd.v_t.ok_or_else(|| Error::Numerical("svd failed".into()))?;
    let fidelity: f64 = svd.singular_values.iter().sum();
    let u = v_t.adjoint() * u_svd.adjoint();
    let aligned_mat = &a2 * u.transpose();
    let unitary = Unitary::new(u)?;
    let mut amps = CVec::zeros(d_sys * d_anc);
    for s in 0..d_sys {
        for k in 0..d_anc {
            amps[s * d_anc + k] = aligned_mat[(s, k)];
        }
    }
    let aligned_phi2 = PureState { dims: phi2.dims.clone(), amps };
    let aligned_distance = pure_state_distance(phi1, &aligned_phi2)?;
    Ok(UhlmannAlignment { unitary, aligned_phi2, fidelity: fidelity.min(1.0), aligned_distance })
}

/// One outcome of a standard-basis measurement.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    /// Outcome value per measured subsystem, in the order they were listed.
    pub outcome: Vec<usize>,
    pub probability: f64,
    /// Post-measurement state; measured subsystems are collapsed in place to
    /// the outcome basis states.
    pub state: PureState,
}

/// Standard-basis measurement of the listed subsystems. Outcomes with
/// probability below [`tol::PRUNE`] are dropped; the returned probabilities
/// are renormalized only by that pruned mass (reported separately).
pub fn measure_standard(psi: &PureState, subsystems: &[usize]) -> Result<Vec<MeasurementOutcome>> {
    let k = psi.dims.len();
    if subsystems.iter().any(|&s| s >= k) {
        return Err(Error::InvalidArgument("measured subsystem out of range".into()));
    }
    let sub_dims: Vec<usize> = subsystems.iter().map(|&s| psi.dims[s]).collect();
    let n_out = dims_product(&sub_dims);
    let n = psi.dim();
    let mut buckets: Vec<Vec<(usize, C64)>> = vec![Vec::new(); n_out];
    let mut multi = vec![0usize; k];
    for i in 0..n {
        let a = psi.amps[i];
        if a.norm_sqr() == 0.0 {
            continue;
        }
        unflatten(i, &psi.dims, &mut multi);
        let sub_multi: Vec<usize> = subsystems.iter().map(|&s| multi[s]).collect();
        buckets[flatten(&sub_multi, &sub_dims)].push((i, a));
    }
    let mut outcomes = Vec::new();
    let mut out_multi = vec![0usize; subsystems.len()];
    for (o, entries) in buckets.iter().enumerate() {
        let p: f64 = entries.iter().map(|(_, a)| a.norm_sqr()).sum();
        if p < tol::PRUNE {
            continue;
        }
        let mut amps = CVec::zeros(n);
        let scale = C64::new(1.0 / p.sqrt(), 0.0);
        for &(i, a) in entries {
            amps[i] = a * scale;
        }
        unflatten(o, &sub_dims, &mut out_multi);
        outcomes.push(MeasurementOutcome {
            outcome: out_multi.clone(),
            probability: p,
            state: PureState { dims: psi.dims.clone(), amps },
        });
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests;
