//! Haar-averaged linear stabilizer entropies of subspaces.
//!
//! Every average here has the form `1 - D binom(d_S + 3, 4)^{-1} T` where `T`
//! is the trace of the WH fourth-moment operator
//! `Q = D^{-2} sum_a D_a (x) D_a^dag (x) D_a (x) D_a^dag` against the
//! symmetric projector, restricted to the subspace.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::magic::{char_function, CharFunction};
use crate::par;
use crate::wh::{canonical_linear, displacement, tau_table, Flavor, HilbertSpec, SymplecticIndex};

const ISOMETRY_TOL: f64 = 1e-10;
const PROJECTOR_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-8;
const SUPPORT_TOL: f64 = 1e-12;
const GROUP_TOL: f64 = 1e-8;
/// Largest host dimension accepted by [`dense_average_oracle`].
pub const DENSE_ORACLE_MAX_DIM: usize = 6;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.norm()))
}

/// `binom(m + 3, 4)`.
pub fn binom4(m: usize) -> f64 {
    let m = m as f64;
    m * (m + 1.0) * (m + 2.0) * (m + 3.0) / 24.0
}

/// An isometry `V : C^{d_S} -> C^{d_B}` into a WH-structured host space.
#[derive(Clone, Debug)]
pub struct Embedding {
    big: HilbertSpec,
    columns: DMatrix<Complex64>,
}

impl Embedding {
    pub fn new(big: HilbertSpec, columns: DMatrix<Complex64>) -> Result<Self> {
        if columns.nrows() != big.dim() {
            return Err(Error::Dimension(format!(
                "embedding has {} rows, host dimension is {}",
                columns.nrows(),
                big.dim()
            )));
        }
        let ds = columns.ncols();
        if ds == 0 || ds > big.dim() {
            return Err(Error::Dimension(format!("subspace dimension {ds} out of range")));
        }
        let gram = columns.adjoint() * &columns - DMatrix::<Complex64>::identity(ds, ds);
        let err = max_abs(&gram);
        if err > ISOMETRY_TOL {
            return Err(Error::Precondition(format!(
                "columns are not orthonormal (deviation {err:.2e})"
            )));
        }
        Ok(Self { big, columns })
    }

    pub fn big(&self) -> &HilbertSpec {
        &self.big
    }

    pub fn small_dim(&self) -> usize {
        self.columns.ncols()
    }

    pub fn columns(&self) -> &DMatrix<Complex64> {
        &self.columns
    }

    /// `V psi` for subspace amplitudes `psi`.
    pub fn encode(&self, amplitudes: &[Complex64]) -> Result<Vec<Complex64>> {
        if amplitudes.len() != self.small_dim() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for a subspace of dimension {}",
                amplitudes.len(),
                self.small_dim()
            )));
        }
        Ok((&self.columns * nalgebra::DVector::from_column_slice(amplitudes)).iter().copied().collect())
    }

    pub fn projector(&self) -> SubspaceProjector {
        SubspaceProjector {
            big: self.big,
            matrix: &self.columns * self.columns.adjoint(),
            rank: self.small_dim(),
        }
    }
}

/// Orthogonal projector onto a subspace of a WH-structured host space.
#[derive(Clone, Debug)]
pub struct SubspaceProjector {
    big: HilbertSpec,
    matrix: DMatrix<Complex64>,
    rank: usize,
}

impl SubspaceProjector {
    pub fn new(big: HilbertSpec, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = big.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension(format!(
                "projector is {}x{}, host dimension is {dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = max_abs(&(&matrix - matrix.adjoint()));
        let idem = max_abs(&(&matrix * &matrix - &matrix));
        if idem > PROJECTOR_TOL {
            return Err(Error::Precondition(format!("projector idempotency violated (deviation {idem:.2e})")));
        }
        if herm > PROJECTOR_TOL {
            return Err(Error::Precondition(format!("projector hermiticity violated (deviation {herm:.2e})")));
        }
        let trace = matrix.trace().re;
        let rank = trace.round();
        if (trace - rank).abs() > TRACE_TOL || rank < 1.0 {
            return Err(Error::Precondition(format!("projector trace {trace} is not a positive integer")));
        }
        Ok(Self {
            big,
            matrix,
            rank: rank as usize,
        })
    }

    pub fn identity(big: HilbertSpec) -> Self {
        let dim = big.dim();
        Self {
            big,
            matrix: DMatrix::identity(dim, dim),
            rank: dim,
        }
    }

    /// Rank-one projector onto a (normalized) vector.
    pub fn from_state(big: HilbertSpec, amplitudes: &[Complex64]) -> Result<Self> {
        let v = DMatrix::from_column_slice(amplitudes.len(), 1, amplitudes);
        Embedding::new(big, v).map(|e| e.projector())
    }

    pub fn big(&self) -> &HilbertSpec {
        &self.big
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn char_function(&self) -> Result<CharFunction> {
        Ok(char_function(&self.big, &self.matrix)?.with_rank(self.rank))
    }

    /// An orthonormal basis of the range.
    pub fn isometry(&self) -> Result<Embedding> {
        let eig = nalgebra::SymmetricEigen::new(self.matrix.clone());
        let keep: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&i| eig.eigenvalues[i] > 0.5)
            .collect();
        if keep.len() != self.rank {
            return Err(Error::Numerical(format!(
                "eigen-decomposition found rank {} instead of {}",
                keep.len(),
                self.rank
            )));
        }
        let cols: Vec<_> = keep.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
        Embedding::new(self.big, DMatrix::from_columns(&cols))
    }
}

/// Number of indices with `2a = 0 mod d`; the only group-dependent input to
/// the Haar average over the whole space.
pub fn square_root_count(spec: &HilbertSpec) -> f64 {
    let g = if spec.d() % 2 == 0 { 2.0f64 } else { 1.0 };
    g.powi(2 * spec.n() as i32)
}

fn flavor_square_count(dim: usize, flavor: Flavor) -> Result<f64> {
    match flavor {
        Flavor::OddQudit if dim % 2 == 1 => Ok(1.0),
        Flavor::EvenQudit if dim % 2 == 0 => Ok(4.0),
        Flavor::Multiqubit if dim.is_power_of_two() => Ok((dim * dim) as f64),
        _ => Err(Error::Domain(format!(
            "flavor {} does not apply to dimension {dim}",
            flavor.name()
        ))),
    }
}

fn q_sym_from_count(dim: usize, count: f64) -> f64 {
    let d = dim as f64;
    (3.0 * d.powi(4) + 12.0 * d.powi(3) + 8.0 * d * d + count * d * d) / (24.0 * d * d)
}

/// `Tr(Q Pi_sym)` for the closed-form case selected by the flavor of `spec`.
pub fn q_sym_trace(spec: &HilbertSpec) -> f64 {
    let d = spec.dim() as f64;
    match spec.flavor() {
        Flavor::OddQudit => (d + 1.0) * (d + 3.0) / 8.0,
        Flavor::EvenQudit => (d + 2.0) * (d + 2.0) / 8.0,
        Flavor::Multiqubit => (d + 1.0) * (d + 2.0) / 6.0,
    }
}

/// Average intrinsic linear stabilizer entropy of a `dim`-dimensional space
/// under the given flavor.
pub fn intrinsic_ase_dim(dim: usize, flavor: Flavor) -> Result<f64> {
    if dim == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    let d = dim as f64;
    flavor_square_count(dim, flavor)?;
    Ok(match flavor {
        Flavor::OddQudit => 1.0 - 3.0 / (d + 2.0),
        Flavor::EvenQudit => 1.0 - 3.0 * (d + 2.0) / ((d + 1.0) * (d + 3.0)),
        Flavor::Multiqubit => 1.0 - 4.0 / (d + 3.0),
    })
}

/// Closed-form intrinsic average for `small`, by its flavor.
pub fn intrinsic_ase(small: &HilbertSpec) -> Result<f64> {
    intrinsic_ase_dim(small.dim(), small.flavor())
}

/// Haar average of the linear stabilizer entropy over the whole space of
/// `spec`, for the WH group actually carried by `(d, n)`. Agrees with
/// [`intrinsic_ase`] for single qudits and qubit registers and also covers
/// registers of several even qudits with `d > 2`.
pub fn group_intrinsic_ase(spec: &HilbertSpec) -> f64 {
    let dim = spec.dim();
    let t = q_sym_from_count(dim, square_root_count(spec));
    1.0 - dim as f64 * t / binom4(dim)
}

fn finish_average(big: &HilbertSpec, rank: usize, t: f64) -> Result<f64> {
    let v = 1.0 - big.dim() as f64 * t / binom4(rank);
    if v < -1e-9 || v > 1.0 + 1e-9 {
        return Err(Error::Numerical(format!("average stabilizer entropy {v} outside [0, 1]")));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Support of a characteristic function with its indices expanded.
struct Support {
    lin: Vec<usize>,
    raw: Vec<i64>,
    vals: Vec<Complex64>,
    width: usize,
}

impl Support {
    fn new(cf: &CharFunction) -> Self {
        let spec = cf.spec();
        let (d, n) = (spec.d(), spec.n());
        let lin = cf.support(SUPPORT_TOL);
        let mut raw = Vec::with_capacity(lin.len() * 2 * n);
        for &l in &lin {
            raw.extend(SymplecticIndex::from_linear(l, d, n).as_i64());
        }
        let vals = lin.iter().map(|&l| cf.values()[l]).collect();
        Self {
            lin,
            raw,
            vals,
            width: 2 * n,
        }
    }

    fn len(&self) -> usize {
        self.lin.len()
    }

    fn idx(&self, i: usize) -> &[i64] {
        &self.raw[i * self.width..(i + 1) * self.width]
    }
}

#[inline]
fn form(a: &[i64], b: &[i64]) -> i64 {
    a.chunks_exact(2)
        .zip(b.chunks_exact(2))
        .map(|(p, q)| p[1] * q[0] - p[0] * q[1])
        .sum()
}

#[inline]
fn lookup(cf: &CharFunction, raw: &[i64]) -> Complex64 {
    let (neg, lin) = canonical_linear(raw, cf.spec().d());
    let v = cf.values()[lin];
    if neg {
        -v
    } else {
        v
    }
}

/// `Tr(Q Pi^{(x)4} Pi_sym)` from the characteristic function of `Pi`.
pub fn fourth_moment_trace(cf: &CharFunction) -> Result<f64> {
    let spec = *cf.spec();
    let d = spec.d();
    let two_d = 2 * d as i64;
    let dim = spec.dim() as f64;
    let tau = tau_table(d);
    let sup = Support::new(cf);
    let k = sup.len();
    let w = sup.width;

    let mut forms = vec![0usize; k * k];
    for i in 0..k {
        for j in 0..k {
            forms[i * k + j] = form(sup.idx(i), sup.idx(j)).rem_euclid(two_d) as usize;
        }
    }

    let t1: f64 = sup.vals.iter().map(|v| v.norm_sqr() * v.norm_sqr()).sum();

    let t2 = par::sum_complex(k, |i| {
        let pa = sup.vals[i].norm_sqr();
        (0..k)
            .map(|j| tau[(2 * forms[i * k + j]) % (2 * d)] * (pa * sup.vals[j].norm_sqr()))
            .sum()
    });

    let t3 = par::sum_complex(k, |i| {
        let a = sup.idx(i);
        let sq = sup.vals[i] * sup.vals[i];
        let mut buf = vec![0i64; w];
        let mut acc = zero();
        for j in 0..k {
            let b = sup.idx(j);
            for t in 0..w {
                buf[t] = b[t] + 2 * a[t];
            }
            acc += sq * sup.vals[j] * lookup(cf, &buf).conj();
        }
        acc
    });

    let t4 = par::sum_complex(k, |i| {
        let a = sup.idx(i);
        let mut buf = vec![0i64; w];
        let mut acc = zero();
        for j in 0..k {
            let b = sup.idx(j);
            let ab = sup.vals[i] * sup.vals[j];
            let f_ab = forms[i * k + j] as i64;
            for c_i in 0..k {
                let c = sup.idx(c_i);
                for t in 0..w {
                    buf[t] = a[t] + b[t] + c[t];
                }
                let s = lookup(cf, &buf);
                if s.norm_sqr() == 0.0 {
                    continue;
                }
                let e = (f_ab - forms[i * k + c_i] as i64 - forms[c_i * k + j] as i64).rem_euclid(two_d);
                acc += ab * sup.vals[c_i] * s.conj() * tau[e as usize];
            }
        }
        acc
    });

    let (dd, n) = (spec.d(), spec.n());
    let t5 = par::sum_complex(spec.num_indices(), |l| {
        let a = SymplecticIndex::from_linear(l, dd, n).as_i64();
        let mut buf = vec![0i64; w];
        let mut inner = zero();
        for j in 0..k {
            let b = sup.idx(j);
            for t in 0..w {
                buf[t] = b[t] - 2 * a[t];
            }
            inner += sup.vals[j] * lookup(cf, &buf).conj();
        }
        Complex64::new(inner.norm_sqr(), 0.0)
    });

    let total = (Complex64::new(3.0 * dim * dim * t1, 0.0)
        + t2 * (6.0 * dim)
        + t3 * (6.0 * dim)
        + t4 * 8.0
        + t5)
        / 24.0;
    if total.im.abs() > 1e-8 * total.re.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "fourth-moment trace has imaginary residue {:.3e}",
            total.im
        )));
    }
    Ok(total.re)
}

/// Average extrinsic linear stabilizer entropy of the states in the range of
/// `projector`, measured with the host WH group.
pub fn extrinsic_ase(projector: &SubspaceProjector) -> Result<f64> {
    let cf = projector.char_function()?;
    let t = fourth_moment_trace(&cf)?;
    finish_average(projector.big(), projector.rank(), t)
}

/// Per-displacement accumulator of the fourth-moment trace for an isometry.
/// Uses `A_a = V^dag D_a V` and the cycle structure of `S_4` acting on
/// `A (x) A^dag (x) A (x) A^dag`.
pub(crate) struct CompressedEvaluator {
    spec: HilbertSpec,
    ops: Vec<(Vec<usize>, Vec<Complex64>)>,
}

impl CompressedEvaluator {
    pub(crate) fn new(spec: &HilbertSpec) -> Result<Self> {
        let (d, n) = (spec.d(), spec.n());
        let mut ops = Vec::with_capacity(spec.num_indices());
        for l in 0..spec.num_indices() {
            let op = displacement(spec, &SymplecticIndex::from_linear(l, d, n))?;
            let phases = (0..op.dim()).map(|k| op.phase(k)).collect();
            ops.push((op.perm().to_vec(), phases));
        }
        Ok(Self { spec: *spec, ops })
    }

    /// `sum_sigma Tr((A (x) A^dag (x) A (x) A^dag) T_sigma)` for `A = V^dag D_a V`.
    fn term(&self, l: usize, v: &DMatrix<Complex64>, vh: &DMatrix<Complex64>) -> f64 {
        let (perm, phases) = &self.ops[l];
        let ds = v.ncols();
        let mut dv = DMatrix::<Complex64>::zeros(v.nrows(), ds);
        for (k, (&p, &ph)) in perm.iter().zip(phases).enumerate() {
            for c in 0..ds {
                dv[(p, c)] = ph * v[(k, c)];
            }
        }
        let a = vh * dv;
        let a2 = &a * &a;
        let aah = &a * a.adjoint();
        let t1 = a.trace();
        let t2 = a.norm_squared();
        let s2 = a2.trace();
        let q3: Complex64 = a2.iter().zip(a.iter()).map(|(x, y)| x * y.conj()).sum();
        let f1 = aah.norm_squared();
        let f2 = a2.norm_squared();
        let n1 = t1.norm_sqr();
        n1 * n1 + 4.0 * t2 * n1 + 2.0 * (s2 * t1.conj() * t1.conj()).re + 2.0 * t2 * t2 + s2.norm_sqr()
            + 8.0 * (t1 * q3.conj()).re
            + 2.0 * f1
            + 4.0 * f2
    }

    pub(crate) fn trace(&self, v: &DMatrix<Complex64>) -> f64 {
        let vh = v.adjoint();
        let dim = self.spec.dim() as f64;
        let sum = par::sum_complex(self.ops.len(), |l| Complex64::new(self.term(l, v, &vh), 0.0));
        sum.re / (24.0 * dim * dim)
    }

    pub(crate) fn average(&self, v: &DMatrix<Complex64>) -> f64 {
        1.0 - self.spec.dim() as f64 * self.trace(v) / binom4(v.ncols())
    }
}

/// Extrinsic average computed directly from an isometry. Same value as
/// [`extrinsic_ase`], at `O(D^3 d_S^2)` cost independent of sparsity.
pub fn extrinsic_ase_embedding(embedding: &Embedding) -> Result<f64> {
    let eval = CompressedEvaluator::new(embedding.big())?;
    let t = eval.trace(embedding.columns());
    finish_average(embedding.big(), embedding.small_dim(), t)
}

/// Extrinsic minus intrinsic average, with the intrinsic case chosen by
/// `small_flavor`.
pub fn ase_gap(projector: &SubspaceProjector, small_flavor: Flavor) -> Result<f64> {
    Ok(extrinsic_ase(projector)? - intrinsic_ase_dim(projector.rank(), small_flavor)?)
}

/// Expected gap of a Haar-random `d_S`-dimensional subspace of `big`.
pub fn expected_gap_random_subspace(big: &HilbertSpec, small_dim: usize, small_flavor: Flavor) -> Result<f64> {
    if small_dim == 0 || small_dim > big.dim() {
        return Err(Error::Domain(format!(
            "subspace dimension {small_dim} outside [1, {}]",
            big.dim()
        )));
    }
    Ok(group_intrinsic_ase(big) - intrinsic_ase_dim(small_dim, small_flavor)?)
}

/// Brute-force evaluation on `(C^D)^{(x)4}`: materializes `Q` and contracts
/// it against `Pi^{(x)4} T_sigma` for all 24 permutations.
pub fn dense_average_oracle(projector: &SubspaceProjector) -> Result<f64> {
    let spec = *projector.big();
    let dim = spec.dim();
    if dim > DENSE_ORACLE_MAX_DIM {
        return Err(Error::Size(format!(
            "dense oracle limited to dimension {DENSE_ORACLE_MAX_DIM}, got {dim}"
        )));
    }
    let big = dim.pow(4);
    let mut q = DMatrix::<Complex64>::zeros(big, big);
    let norm = 1.0 / (dim * dim) as f64;
    for l in 0..spec.num_indices() {
        let da = displacement(&spec, &SymplecticIndex::from_linear(l, spec.d(), spec.n()))?.to_dense();
        let dah = da.adjoint();
        let term = da.kronecker(&dah).kronecker(&da).kronecker(&dah);
        q += term * Complex64::new(norm, 0.0);
    }

    let p = projector.matrix();
    let digits = |i: usize| [i / (dim * dim * dim), (i / (dim * dim)) % dim, (i / dim) % dim, i % dim];
    let mut total = zero();
    for sigma in permutations4() {
        for i in 0..big {
            let di = digits(i);
            let permuted = [di[sigma[0]], di[sigma[1]], di[sigma[2]], di[sigma[3]]];
            for j in 0..big {
                let qv = q[(i, j)];
                if qv == zero() {
                    continue;
                }
                let dj = digits(j);
                let mut prod = Complex64::new(1.0, 0.0);
                for m in 0..4 {
                    prod *= p[(dj[m], permuted[m])];
                }
                total += qv * prod;
            }
        }
    }
    let t = total / 24.0;
    if t.im.abs() > 1e-8 {
        return Err(Error::Numerical(format!("oracle trace has imaginary part {}", t.im)));
    }
    finish_average(&spec, projector.rank(), t.re)
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    p.iter().for_each(|&x| seen[x] = true);
                    if seen.iter().all(|&s| s) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn check_group(elements: &[DMatrix<Complex64>], dim: usize) -> Result<usize> {
    if elements.is_empty() {
        return Err(Error::NotAGroup("empty element list".into()));
    }
    if elements.iter().any(|g| g.nrows() != dim || g.ncols() != dim) {
        return Err(Error::Dimension("group element has the wrong shape".into()));
    }
    let find = |m: &DMatrix<Complex64>| elements.iter().position(|g| max_abs(&(g - m)) < GROUP_TOL);
    let identity = find(&DMatrix::identity(dim, dim))
        .ok_or_else(|| Error::NotAGroup("identity missing".into()))?;
    for (i, g) in elements.iter().enumerate() {
        for (j, h) in elements.iter().enumerate() {
            if find(&(g * h)).is_none() {
                return Err(Error::NotAGroup(format!("product of elements {i} and {j} not in the list")));
            }
        }
    }
    Ok(identity)
}

/// Projector onto the trivial-representation subspace of a finite group of
/// unitaries.
pub fn invariant_projector(big: &HilbertSpec, elements: &[DMatrix<Complex64>]) -> Result<SubspaceProjector> {
    let chars = vec![Complex64::new(1.0, 0.0); elements.len()];
    isotypic_projector(big, elements, &chars, 1)
}

/// `(dim V / |G|) sum_g conj(xi(g)) g` for a character `xi`.
pub fn isotypic_projector(
    big: &HilbertSpec,
    elements: &[DMatrix<Complex64>],
    characters: &[Complex64],
    irrep_dim: usize,
) -> Result<SubspaceProjector> {
    let dim = big.dim();
    let identity = check_group(elements, dim)?;
    if characters.len() != elements.len() {
        return Err(Error::BadCharacter(format!(
            "{} character values for {} elements",
            characters.len(),
            elements.len()
        )));
    }
    if (characters[identity] - Complex64::new(irrep_dim as f64, 0.0)).norm() > GROUP_TOL {
        return Err(Error::BadCharacter(format!(
            "character at identity is {}, expected {irrep_dim}",
            characters[identity]
        )));
    }
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (g, xi) in elements.iter().zip(characters) {
        m += g * xi.conj();
    }
    m *= Complex64::new(irrep_dim as f64 / elements.len() as f64, 0.0);
    let idem = max_abs(&(&m * &m - &m));
    if idem > GROUP_TOL {
        return Err(Error::BadCharacter(format!("result not idempotent (deviation {idem:.2e})")));
    }
    SubspaceProjector::new(*big, m).map_err(|e| match e {
        Error::Precondition(msg) => Error::BadCharacter(msg),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magic::{linear_se, PureState};
    use crate::wh::random_clifford;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_isometry(dim: usize, ds: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        let g = DMatrix::from_fn(dim, ds, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        g.qr().q()
    }

    #[test]
    fn intrinsic_closed_forms() {
        let q = |d: usize| intrinsic_ase_dim(d, Flavor::qudit_for(d)).unwrap();
        assert!((q(2) - 0.2).abs() < 1e-12);
        assert!((q(3) - 0.4).abs() < 1e-12);
        assert!((q(5) - 4.0 / 7.0).abs() < 1e-12);
        assert!((q(4) - 17.0 / 35.0).abs() < 1e-12);
        assert!((intrinsic_ase(&HilbertSpec::qubits(2).unwrap()).unwrap() - 3.0 / 7.0).abs() < 1e-12);
        assert!(intrinsic_ase_dim(6, Flavor::Multiqubit).is_err());
        assert!(intrinsic_ase_dim(5, Flavor::EvenQudit).is_err());
    }

    #[test]
    fn q_sym_trace_matches_counting_formula() {
        assert!((q_sym_trace(&HilbertSpec::qubits(1).unwrap()) - 2.0).abs() < 1e-14);
        assert!((q_sym_trace(&HilbertSpec::qudit(3).unwrap()) - 3.0).abs() < 1e-14);
        for dim in 1..=64usize {
            let mut flavors = vec![];
            if dim % 2 == 1 {
                flavors.push(Flavor::OddQudit);
            } else {
                flavors.push(Flavor::EvenQudit);
            }
            if dim.is_power_of_two() && dim > 1 {
                flavors.push(Flavor::Multiqubit);
            }
            for f in flavors {
                let count = flavor_square_count(dim, f).unwrap();
                let t = q_sym_from_count(dim, count);
                let via = 1.0 - dim as f64 * t / binom4(dim);
                assert!((via - intrinsic_ase_dim(dim, f).unwrap()).abs() < 1e-12, "dim {dim}");
                if dim > 1 {
                    let (d, n) = if f == Flavor::Multiqubit { (2, dim.trailing_zeros() as usize) } else { (dim, 1) };
                    let spec = HilbertSpec::new(d, n, f).unwrap();
                    assert!((q_sym_trace(&spec) - t).abs() < 1e-9 * t);
                }
            }
        }
    }

    #[test]
    fn identity_projector_gives_group_average() {
        for &(d, n) in &[(2, 1), (2, 2), (2, 3), (3, 1), (4, 1), (5, 1), (6, 1), (3, 2), (4, 2)] {
            let spec = HilbertSpec::multiqudit(d, n).unwrap();
            let ext = extrinsic_ase(&SubspaceProjector::identity(spec)).unwrap();
            assert!((ext - group_intrinsic_ase(&spec)).abs() < 1e-10, "(d, n) = ({d}, {n})");
            if n == 1 || d == 2 {
                assert!((ext - intrinsic_ase(&spec).unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn three_routes_agree_on_random_projectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(d, n) in &[(2, 1), (3, 1), (2, 2), (5, 1), (6, 1)] {
            let spec = HilbertSpec::multiqudit(d, n).unwrap();
            let dim = spec.dim();
            for ds in 1..=dim {
                let emb = Embedding::new(spec, random_isometry(dim, ds, &mut rng)).unwrap();
                let p = emb.projector();
                let a = extrinsic_ase(&p).unwrap();
                let b = extrinsic_ase_embedding(&emb).unwrap();
                let o = dense_average_oracle(&p).unwrap();
                assert!((a - o).abs() < 1e-8, "bracket {a} vs oracle {o} at ({d},{n}) rank {ds}");
                assert!((b - o).abs() < 1e-8, "compressed {b} vs oracle {o} at ({d},{n}) rank {ds}");
            }
        }
    }

    #[test]
    fn routes_agree_beyond_oracle_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for &(d, n) in &[(2, 3), (3, 2), (8, 1), (4, 2)] {
            let spec = HilbertSpec::multiqudit(d, n).unwrap();
            let dim = spec.dim();
            for ds in [1, 2, dim / 2, dim - 1] {
                let emb = Embedding::new(spec, random_isometry(dim, ds, &mut rng)).unwrap();
                let a = extrinsic_ase(&emb.projector()).unwrap();
                let b = extrinsic_ase_embedding(&emb).unwrap();
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rank_one_projector_is_linear_se() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for &(d, n) in &[(2, 2), (3, 1), (4, 1), (2, 3)] {
            let spec = HilbertSpec::multiqudit(d, n).unwrap();
            let v = random_isometry(spec.dim(), 1, &mut rng);
            let psi = PureState::new(v.column(0).iter().copied().collect()).unwrap();
            let p = SubspaceProjector::from_state(spec, psi.amplitudes()).unwrap();
            assert!((extrinsic_ase(&p).unwrap() - linear_se(&spec, &psi).unwrap()).abs() < 1e-10);
        }
        let spec = HilbertSpec::qubits(2).unwrap();
        let p = SubspaceProjector::from_state(spec, PureState::basis(4, 2).amplitudes()).unwrap();
        assert!(dense_average_oracle(&p).unwrap().abs() < 1e-10);
    }

    #[test]
    fn clifford_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for &(d, n) in &[(2, 3), (3, 2), (5, 1)] {
            let spec = HilbertSpec::multiqudit(d, n).unwrap();
            let dim = spec.dim();
            for _ in 0..4 {
                let v = random_isometry(dim, 1 + rng.random_range(0..dim - 1), &mut rng);
                let u = random_clifford(&spec, &mut rng).unwrap();
                let a = extrinsic_ase(&Embedding::new(spec, v.clone()).unwrap().projector()).unwrap();
                let b = extrinsic_ase(&Embedding::new(spec, &u * v).unwrap().projector()).unwrap();
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gss_and_spin_fractions() {
        let s3 = 1.0 / 3f64.sqrt();
        let mut cols = DMatrix::<Complex64>::zeros(8, 2);
        cols[(0, 0)] = c(1.0);
        for k in [1, 2, 4] {
            cols[(k, 1)] = c(s3);
        }
        let qubits = Embedding::new(HilbertSpec::qubits(3).unwrap(), cols.clone()).unwrap();
        let p = qubits.projector();
        assert!((extrinsic_ase(&p).unwrap() - 5.0 / 9.0).abs() < 1e-9);
        assert!((ase_gap(&p, Flavor::Multiqubit).unwrap() - 16.0 / 45.0).abs() < 1e-9);

        let qudit = Embedding::new(HilbertSpec::qudit(8).unwrap(), cols).unwrap();
        let p = qudit.projector();
        assert!((extrinsic_ase(&p).unwrap() - 83.0 / 135.0).abs() < 1e-9);
        assert!((ase_gap(&p, Flavor::EvenQudit).unwrap() - 56.0 / 135.0).abs() < 1e-9);
    }

    #[test]
    fn expected_gap_examples() {
        let big = HilbertSpec::qubits(5).unwrap();
        assert!(expected_gap_random_subspace(&big, 32, Flavor::Multiqubit).unwrap().abs() < 1e-12);
        assert!(expected_gap_random_subspace(&big, 31, Flavor::OddQudit).unwrap() < 0.0);
        assert!(expected_gap_random_subspace(&big, 3, Flavor::OddQudit).unwrap() > 0.0);
        assert!(expected_gap_random_subspace(&big, 33, Flavor::OddQudit).is_err());
    }

    #[test]
    fn projector_validation() {
        let spec = HilbertSpec::qubits(1).unwrap();
        let m = DMatrix::from_element(2, 2, c(1.0));
        assert!(SubspaceProjector::new(spec, m).is_err());
        let p = SubspaceProjector::identity(spec);
        assert_eq!(p.isometry().unwrap().small_dim(), 2);
        assert!(dense_average_oracle(&SubspaceProjector::identity(HilbertSpec::qubits(3).unwrap())).is_err());
        assert!(Embedding::new(spec, DMatrix::from_element(2, 1, c(1.0))).is_err());
    }

    #[test]
    fn group_projectors() {
        let spec = HilbertSpec::qubits(2).unwrap();
        let id = DMatrix::<Complex64>::identity(4, 4);
        let mut swap = DMatrix::<Complex64>::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap[(i, j)] = c(1.0);
        }
        let elements = vec![id.clone(), swap.clone()];
        let anti = isotypic_projector(&spec, &elements, &[c(1.0), c(-1.0)], 1).unwrap();
        assert_eq!(anti.rank(), 1);
        let expected = (&id - &swap) * c(0.5);
        assert!(max_abs(&(anti.matrix() - expected)) < 1e-12);
        assert_eq!(invariant_projector(&spec, &elements).unwrap().rank(), 3);
        assert!(matches!(isotypic_projector(&spec, &elements, &[c(2.0), c(0.0)], 1), Err(Error::BadCharacter(_))));
        assert!(matches!(invariant_projector(&spec, &[swap]), Err(Error::NotAGroup(_))));
        let trivial = invariant_projector(&spec, &[id.clone()]).unwrap();
        assert_eq!(trivial.rank(), 4);

        // Z_3 acting by the clock operator: the three isotypic projectors sum to I.
        let q = HilbertSpec::qudit(3).unwrap();
        let z = displacement(&q, &SymplecticIndex::new(vec![0, 1], 3).unwrap()).unwrap().to_dense();
        let group = vec![DMatrix::identity(3, 3), z.clone(), &z * &z];
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let mut sum = DMatrix::<Complex64>::zeros(3, 3);
        for k in 0..3 {
            let chars: Vec<_> = (0..3).map(|g| w.powu((k * g) as u32)).collect();
            sum += isotypic_projector(&q, &group, &chars, 1).unwrap().matrix();
        }
        assert!(max_abs(&(sum - DMatrix::identity(3, 3))) < 1e-12);
    }
}
