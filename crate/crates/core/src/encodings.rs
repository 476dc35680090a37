//! Spin-j encodings: symmetrized qubits, Majorana constellations and
//! SU(2)-invariant sectors of several spins.

use std::collections::HashMap;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::averages::{Embedding, SubspaceProjector};
use crate::error::{Error, Result};
use crate::wh::HilbertSpec;

const NORM_TOL: f64 = 1e-10;
const ROOT_RESIDUAL: f64 = 1e-8;
const ZERO_EIG: f64 = 1e-8;
/// Largest host dimension for [`spin_zero_projector`].
pub const SPIN_HOST_MAX_DIM: usize = 4096;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Pure spin-j state with amplitudes over `|j, m>`, `m = j, j-1, ..., -j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinState {
    two_j: u32,
    amplitudes: Vec<Complex64>,
}

impl SpinState {
    pub fn new(two_j: u32, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != two_j as usize + 1 {
            return Err(Error::Dimension(format!(
                "spin {}/2 needs {} amplitudes, got {}",
                two_j,
                two_j + 1,
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Precondition(format!("spin state norm {norm} is not 1")));
        }
        Ok(Self { two_j, amplitudes })
    }

    /// `|j, m>` with `m = j - index`.
    pub fn basis(two_j: u32, index: usize) -> Self {
        let mut amplitudes = vec![c(0.0); two_j as usize + 1];
        amplitudes[index] = c(1.0);
        Self { two_j, amplitudes }
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Star {
    Finite(Complex64),
    Infinity,
}

/// Multiset of `2j` stars.
#[derive(Clone, Debug, PartialEq)]
pub struct StarConstellation {
    stars: Vec<Star>,
}

impl StarConstellation {
    pub fn new(stars: Vec<Star>) -> Self {
        Self { stars }
    }

    pub fn stars(&self) -> &[Star] {
        &self.stars
    }

    pub fn len(&self) -> usize {
        self.stars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stars.is_empty()
    }

    pub fn count_infinite(&self) -> usize {
        self.stars.iter().filter(|s| matches!(s, Star::Infinity)).count()
    }
}

/// Columns `|j, m> -> ` uniform superposition of the `2j`-bit strings with
/// `j + m` ones (a one is a spin-up qubit).
pub fn symmetric_qubit_embedding(two_j: u32) -> Result<Embedding> {
    if two_j == 0 {
        return Err(Error::Domain("spin 0 has no qubit encoding".into()));
    }
    let big = HilbertSpec::qubits(two_j as usize)?;
    let dim = big.dim();
    let mut cols = DMatrix::<Complex64>::zeros(dim, two_j as usize + 1);
    for bits in 0..dim {
        let ones = (bits as u32).count_ones();
        let index = (two_j - ones) as usize;
        cols[(bits, index)] = c(1.0 / binomial(two_j, ones).sqrt());
    }
    Embedding::new(big, cols)
}

/// Coefficients of `p(z)`, lowest degree first.
fn majorana_coefficients(psi: &SpinState) -> Vec<Complex64> {
    let two_j = psi.two_j;
    let mut coeffs = vec![c(0.0); two_j as usize + 1];
    for (i, &amp) in psi.amplitudes.iter().enumerate() {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[two_j as usize - i] = amp * (sign * binomial(two_j, i as u32).sqrt());
    }
    coeffs
}

fn eval_poly(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = c(0.0);
    let mut dp = c(0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(vec![]);
    }
    let lead = coeffs[deg];
    let mut companion = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        companion[(i, i - 1)] = c(1.0);
    }
    for i in 0..deg {
        companion[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let roots = nalgebra::Schur::new(companion)
        .eigenvalues()
        .ok_or_else(|| Error::Numerical(format!("Schur form did not triangularize for {coeffs:?}")))?;
    let scale = coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    roots
        .iter()
        .map(|&r0| {
            let mut r = r0;
            let mut best = eval_poly(coeffs, r).0.norm();
            for _ in 0..8 {
                let (p, dp) = eval_poly(coeffs, r);
                if dp.norm() == 0.0 {
                    break;
                }
                let next = r - p / dp;
                let val = eval_poly(coeffs, next).0.norm();
                if val < best {
                    r = next;
                    best = val;
                } else {
                    break;
                }
            }
            let backward = best / (scale * r.norm().max(1.0).powi(deg as i32));
            if backward > ROOT_RESIDUAL {
                return Err(Error::Numerical(format!(
                    "root {r} has residual {backward:.2e} for coefficients {coeffs:?}"
                )));
            }
            Ok(r)
        })
        .collect()
}

/// Majorana stars of a spin state: roots of
/// `p(z) = sum_m (-1)^{j-m} sqrt(binom(2j, j-m)) psi_m z^{j+m}`, padded with
/// infinity up to `2j`.
pub fn majorana_roots(psi: &SpinState) -> Result<StarConstellation> {
    let coeffs = majorana_coefficients(psi);
    let scale = coeffs.iter().fold(0.0f64, |m, a| m.max(a.norm()));
    let tiny = 1e-14 * scale;
    let top = coeffs
        .iter()
        .rposition(|a| a.norm() > tiny)
        .ok_or_else(|| Error::Precondition("zero spin state".into()))?;
    let bottom = coeffs.iter().position(|a| a.norm() > tiny).unwrap_or(0);
    let mut stars = vec![Star::Finite(c(0.0)); bottom];
    stars.extend(poly_roots(&coeffs[bottom..=top])?.into_iter().map(Star::Finite));
    stars.extend(std::iter::repeat_n(Star::Infinity, psi.two_j as usize - top));
    Ok(StarConstellation { stars })
}

/// Inverse stereographic projection onto the unit sphere.
pub fn roots_to_bloch(star: Star) -> [f64; 3] {
    match star {
        Star::Infinity => [0.0, 0.0, -1.0],
        Star::Finite(a) => {
            let r2 = a.norm_sqr();
            [2.0 * a.re / (1.0 + r2), 2.0 * a.im / (1.0 + r2), (1.0 - r2) / (1.0 + r2)]
        }
    }
}

/// Qubit states `(up, down)` for each star.
pub fn roots_to_product_state(stars: &StarConstellation) -> Vec<[Complex64; 2]> {
    stars
        .stars
        .iter()
        .map(|s| match *s {
            Star::Infinity => [c(0.0), c(1.0)],
            Star::Finite(a) => {
                let norm = (1.0 + a.norm_sqr()).sqrt();
                [c(1.0 / norm), a / norm]
            }
        })
        .collect()
}

/// Normalized projection of `q_1 (x) ... (x) q_N` onto the symmetric
/// subspace, in the computational basis with spin up as bit 1.
pub fn symmetrized_product(qubits: &[[Complex64; 2]]) -> Result<Vec<Complex64>> {
    let n = qubits.len();
    let dim = 1usize << n;
    let mut product = vec![c(1.0); dim];
    for (bits, amp) in product.iter_mut().enumerate() {
        for (k, q) in qubits.iter().enumerate() {
            let up = (bits >> (n - 1 - k)) & 1 == 1;
            *amp *= if up { q[0] } else { q[1] };
        }
    }
    let mut class_mean = vec![c(0.0); n + 1];
    for (bits, amp) in product.iter().enumerate() {
        class_mean[bits.count_ones() as usize] += amp;
    }
    for (w, mean) in class_mean.iter_mut().enumerate() {
        *mean /= binomial(n as u32, w as u32);
    }
    let mut out: Vec<Complex64> = (0..dim).map(|b| class_mean[b.count_ones() as usize]).collect();
    let norm = out.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return Err(Error::Numerical("symmetrized product vanishes".into()));
    }
    out.iter_mut().for_each(|a| *a /= norm);
    Ok(out)
}

/// Linear stabilizer entropy of a single qubit from its Bloch vector.
pub fn qubit_linear_se(bloch: [f64; 3]) -> f64 {
    1.0 - (1.0 + bloch.iter().map(|v| v.powi(4)).sum::<f64>()) / 2.0
}

/// Stabilizer entropy of the star qubits taken as a direct sum:
/// `sum_k M(q_k)`.
pub fn separable_qubit_se(psi: &SpinState) -> Result<f64> {
    Ok(majorana_roots(psi)?
        .stars
        .iter()
        .map(|&s| qubit_linear_se(roots_to_bloch(s)))
        .sum())
}

/// Gauss-Legendre in `cos(theta)` times a uniform `phi` grid; weights sum to 1.
pub(crate) fn sphere_rule(n_theta: usize, n_phi: usize) -> Vec<([f64; 3], f64)> {
    let gl = GaussLegendre::new(NonZeroUsize::new(n_theta).expect("positive node count"));
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for &(x, w) in gl.as_node_weight_pairs() {
        let s = (1.0 - x * x).max(0.0).sqrt();
        for k in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64;
            out.push(([s * phi.cos(), s * phi.sin(), x], w / (2.0 * n_phi as f64)));
        }
    }
    out
}

/// Haar average of [`separable_qubit_se`]. Each star of a Haar-random spin
/// state is uniformly distributed on the sphere, so the average is `2j` times
/// the sphere average of the single-qubit entropy.
pub fn separable_qubit_ase(two_j: u32) -> f64 {
    let mean: f64 = sphere_rule(8, 16).iter().map(|&(n, w)| w * qubit_linear_se(n)).sum();
    two_j as f64 * mean
}

/// Dense total angular momentum `(J_x, J_y, J_z)` on `count` spins of `two_j`.
pub fn total_spin_operators(two_j: u32, count: usize) -> Result<[DMatrix<Complex64>; 3]> {
    let local = two_j as usize + 1;
    let dim = local
        .checked_pow(count as u32)
        .filter(|&v| v <= SPIN_HOST_MAX_DIM)
        .ok_or_else(|| Error::Size(format!("{local}^{count} exceeds {SPIN_HOST_MAX_DIM}")))?;
    let j = two_j as f64 / 2.0;
    let mut jp = DMatrix::<Complex64>::zeros(local, local);
    let mut jz = DMatrix::<Complex64>::zeros(local, local);
    for k in 0..local {
        let m = j - k as f64;
        jz[(k, k)] = c(m);
        if k > 0 {
            jp[(k - 1, k)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt());
        }
    }
    let jx_local = (&jp + jp.adjoint()) * c(0.5);
    let jy_local = (&jp - jp.adjoint()) * Complex64::new(0.0, -0.5);
    let site_sum = |op: &DMatrix<Complex64>| {
        let mut total = DMatrix::<Complex64>::zeros(dim, dim);
        for site in 0..count {
            let mut term = DMatrix::<Complex64>::identity(1, 1);
            for s in 0..count {
                term = if s == site {
                    term.kronecker(op)
                } else {
                    term.kronecker(&DMatrix::identity(local, local))
                };
            }
            total += term;
        }
        total
    };
    Ok([site_sum(&jx_local), site_sum(&jy_local), site_sum(&jz)])
}

/// Orthonormal basis of the spin-0 sector of `count` spins of `two_j`; host
/// digit `k` of each site is `m = j - k`.
pub fn spin_zero_embedding(two_j: u32, count: usize) -> Result<Embedding> {
    if count == 0 {
        return Err(Error::Domain("need at least one spin".into()));
    }
    let local = two_j as usize + 1;
    let big = HilbertSpec::multiqudit(local, count)?;
    if big.dim() > SPIN_HOST_MAX_DIM {
        return Err(Error::Size(format!("host dimension {} exceeds {SPIN_HOST_MAX_DIM}", big.dim())));
    }
    let dim = big.dim();
    let digits = |mut s: usize| {
        let mut out = vec![0usize; count];
        for q in (0..count).rev() {
            out[q] = s % local;
            s /= local;
        }
        out
    };
    // Twice the total magnetic number.
    let two_m = |s: usize| digits(s).iter().map(|&k| two_j as i64 - 2 * k as i64).sum::<i64>();
    let zero_block: Vec<usize> = (0..dim).filter(|&s| two_m(s) == 0).collect();
    let one_block: Vec<usize> = (0..dim).filter(|&s| two_m(s) == 2).collect();
    if zero_block.is_empty() {
        return Err(Error::Domain("no spin-0 sector: total spin is half-integer".into()));
    }
    let one_pos: HashMap<usize, usize> = one_block.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let j = two_j as f64 / 2.0;
    let mut raise = DMatrix::<f64>::zeros(one_block.len().max(1), zero_block.len());
    for (col, &s) in zero_block.iter().enumerate() {
        let ds = digits(s);
        for site in 0..count {
            let k = ds[site];
            if k == 0 {
                continue;
            }
            let m = j - k as f64;
            let mut up = ds.clone();
            up[site] = k - 1;
            let target = up.iter().fold(0usize, |acc, &v| acc * local + v);
            let row = one_pos[&target];
            raise[(row, col)] += (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        }
    }
    // On the M = 0 block, J^2 = J_- J_+.
    let j2 = raise.transpose() * &raise;
    let eig = nalgebra::SymmetricEigen::new(j2);
    let mut cols = Vec::new();
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() < ZERO_EIG {
            let mut v = DVector::<Complex64>::zeros(dim);
            for (r, &s) in zero_block.iter().enumerate() {
                v[s] = c(eig.eigenvectors[(r, i)]);
            }
            cols.push(v);
        } else if lambda < 2.0 - 1e-8 {
            return Err(Error::Numerical(format!("J^2 eigenvalue {lambda} inside the (0, 2) gap")));
        }
    }
    if cols.is_empty() {
        return Err(Error::Domain("spin-0 sector is empty".into()));
    }
    Embedding::new(big, DMatrix::from_columns(&cols))
}

/// Projector onto the SU(2)-invariant sector of identical spins, given as
/// `2j` per site. Mixed spins have no uniform qudit host and are rejected.
pub fn spin_zero_projector(two_js: &[u32]) -> Result<SubspaceProjector> {
    let first = *two_js.first().ok_or_else(|| Error::Domain("empty spin list".into()))?;
    if two_js.iter().any(|&t| t != first) {
        return Err(Error::Unsupported("mixed spins have no uniform qudit host".into()));
    }
    if first == 0 {
        return Err(Error::Domain("spin-0 sites carry no qudit".into()));
    }
    Ok(spin_zero_embedding(first, two_js.len())?.projector())
}

/// Span of `|000>` and `(|001> + |010> + |100>)/sqrt 3` on an 8-dimensional host.
pub fn gss_embedding(big: &HilbertSpec) -> Result<Embedding> {
    if big.dim() != 8 {
        return Err(Error::Dimension(format!("GSS lives in dimension 8, host has {}", big.dim())));
    }
    let s = 1.0 / 3f64.sqrt();
    let mut cols = DMatrix::<Complex64>::zeros(8, 2);
    cols[(0, 0)] = c(1.0);
    for k in [1, 2, 4] {
        cols[(k, 1)] = c(s);
    }
    Embedding::new(*big, cols)
}

pub fn gss_projector(big: &HilbertSpec) -> Result<SubspaceProjector> {
    Ok(gss_embedding(big)?.projector())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averages::{ase_gap, extrinsic_ase, intrinsic_ase_dim};
    use crate::wh::Flavor;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spin(two_j: u32, rng: &mut ChaCha8Rng) -> SpinState {
        let v: Vec<Complex64> = (0..=two_j)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        SpinState::new(two_j, v.into_iter().map(|a| a / n).collect()).unwrap()
    }

    fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm()
    }

    fn round_trip(psi: &SpinState) -> f64 {
        let emb = symmetric_qubit_embedding(psi.two_j()).unwrap();
        let encoded = emb.columns() * DVector::from_column_slice(psi.amplitudes());
        let stars = majorana_roots(psi).unwrap();
        assert_eq!(stars.len(), psi.two_j() as usize);
        let sym = symmetrized_product(&roots_to_product_state(&stars)).unwrap();
        fidelity(encoded.as_slice(), &sym)
    }

    #[test]
    fn symmetric_embedding_columns() {
        let emb = symmetric_qubit_embedding(2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let col = emb.columns().column(1);
        assert!((col[1] - c(r)).norm() < 1e-15 && (col[2] - c(r)).norm() < 1e-15);
        assert_eq!(emb.columns()[(3, 0)], c(1.0));
        assert_eq!(emb.columns()[(0, 2)], c(1.0));
        let one = symmetric_qubit_embedding(1).unwrap();
        assert_eq!(one.columns()[(1, 0)], c(1.0));
        assert_eq!(one.columns()[(0, 1)], c(1.0));
        // Swapping the first two qubits of the j = 2 encoding fixes every column.
        let emb = symmetric_qubit_embedding(4).unwrap();
        for col in emb.columns().column_iter() {
            for b in 0..16usize {
                let (hi, lo) = ((b >> 3) & 1, (b >> 2) & 1);
                let swapped = (b & 0b0011) | (lo << 3) | (hi << 2);
                assert!((col[b] - col[swapped]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn spin_one_gaps_vanish() {
        let emb = symmetric_qubit_embedding(2).unwrap();
        let gap = ase_gap(&emb.projector(), Flavor::OddQudit).unwrap();
        assert!(gap.abs() < 1e-9);
        let sep = separable_qubit_ase(2) - intrinsic_ase_dim(3, Flavor::OddQudit).unwrap();
        assert!(sep.abs() < 1e-12);
    }

    #[test]
    fn majorana_examples() {
        let top = majorana_roots(&SpinState::basis(4, 0)).unwrap();
        assert!(top.stars().iter().all(|s| *s == Star::Finite(c(0.0))));
        let bottom = majorana_roots(&SpinState::basis(4, 4)).unwrap();
        assert_eq!(bottom.count_infinite(), 4);
        let mid = majorana_roots(&SpinState::basis(2, 1)).unwrap();
        assert_eq!(mid.count_infinite(), 1);
        let b: Vec<_> = mid.stars().iter().map(|&s| roots_to_bloch(s)).collect();
        assert!((b[0][2] + b[1][2]).abs() < 1e-15);
        assert_eq!(roots_to_bloch(Star::Finite(c(0.0))), [0.0, 0.0, 1.0]);
        assert_eq!(roots_to_bloch(Star::Infinity), [0.0, 0.0, -1.0]);
        assert!((roots_to_bloch(Star::Finite(c(1.0)))[0] - 1.0).abs() < 1e-15);
        let q = roots_to_product_state(&majorana_roots(&SpinState::basis(2, 0)).unwrap());
        assert!(q.iter().all(|v| v[0] == c(1.0) && v[1] == c(0.0)));
    }

    #[test]
    fn majorana_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for two_j in 1..=8 {
            for _ in 0..25 {
                assert!((round_trip(&random_spin(two_j, &mut rng)) - 1.0).abs() < 1e-7);
            }
            for k in 0..=two_j as usize {
                assert!((round_trip(&SpinState::basis(two_j, k)) - 1.0).abs() < 1e-7);
            }
        }
        // Coherent states: every star coincides.
        for two_j in [3u32, 6, 8] {
            let alpha = Complex64::new(0.3, -1.2);
            let norm = (1.0 + alpha.norm_sqr()).sqrt();
            let qubits = vec![[c(1.0 / norm), alpha / norm]; two_j as usize];
            let sym = symmetrized_product(&qubits).unwrap();
            let emb = symmetric_qubit_embedding(two_j).unwrap();
            let amps = emb.columns().adjoint() * DVector::from_column_slice(&sym);
            let psi = SpinState::new(two_j, amps.iter().copied().collect()).unwrap();
            assert!((round_trip(&psi) - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn spin_zero_ranks() {
        assert_eq!(spin_zero_projector(&[1, 1, 1, 1]).unwrap().rank(), 2);
        assert_eq!(spin_zero_projector(&[2, 2, 2, 2]).unwrap().rank(), 3);
        assert_eq!(spin_zero_projector(&[1; 6]).unwrap().rank(), 5);
        assert!(spin_zero_projector(&[1, 1, 1]).is_err());
        assert!(spin_zero_projector(&[1, 2]).is_err());
    }

    #[test]
    fn tetrahedron_fraction() {
        let p = spin_zero_projector(&[1, 1, 1, 1]).unwrap();
        assert!((extrinsic_ase(&p).unwrap() - 17.0 / 45.0).abs() < 1e-9);
    }

    #[test]
    fn spin_zero_is_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for (two_j, count) in [(1u32, 4usize), (2, 4)] {
            let p = spin_zero_projector(&vec![two_j; count]).unwrap();
            let [jx, jy, jz] = total_spin_operators(two_j, count).unwrap();
            for _ in 0..20 {
                let mut axis = [0.0; 3];
                axis.iter_mut().for_each(|a| *a = rng.random::<f64>() - 0.5);
                let theta = rng.random::<f64>() * 6.0;
                let gen = (&jx * c(axis[0]) + &jy * c(axis[1]) + &jz * c(axis[2])) * Complex64::new(0.0, theta);
                let r = gen.exp();
                let comm = &r * p.matrix() - p.matrix() * &r;
                assert!(comm.norm() < 1e-8);
            }
        }
    }

    #[test]
    fn gss_is_orthonormal_as_printed() {
        let p = gss_projector(&HilbertSpec::qubits(3).unwrap()).unwrap();
        assert_eq!(p.rank(), 2);
        assert!((extrinsic_ase(&p).unwrap() - 5.0 / 9.0).abs() < 1e-9);
        let q = gss_projector(&HilbertSpec::qudit(8).unwrap()).unwrap();
        assert!((extrinsic_ase(&q).unwrap() - 83.0 / 135.0).abs() < 1e-9);
        assert!(gss_projector(&HilbertSpec::qubits(2).unwrap()).is_err());
    }

    #[test]
    fn sphere_rule_moments() {
        let rule = sphere_rule(8, 16);
        let total: f64 = rule.iter().map(|r| r.1).sum();
        assert!((total - 1.0).abs() < 1e-14);
        let z4: f64 = rule.iter().map(|r| r.1 * r.0[2].powi(4)).sum();
        assert!((z4 - 0.2).abs() < 1e-14);
        let x4: f64 = rule.iter().map(|r| r.1 * r.0[0].powi(4)).sum();
        assert!((x4 - 0.2).abs() < 1e-14);
        assert!((separable_qubit_ase(1) - 0.2).abs() < 1e-14);
    }
}
