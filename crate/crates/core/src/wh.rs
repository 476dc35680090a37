//! Weyl-Heisenberg group algebra over `Z_d^{2n}`.
//!
//! Symplectic indices use the interleaved layout `(x_1, z_1, ..., x_n, z_n)`;
//! qudit 1 is the most significant digit of a computational basis label, so
//! `kron(A, B)` acts with `A` on qudit 1. Displacements are
//! `D_a = tau^{x.z} X^x Z^z` with `omega = exp(2 pi i / d)` and
//! `tau = -exp(i pi / d)`, giving `D_a |k> = tau^{x.z + 2 z.k} |k + x>`.
//!
//! With this convention `D_(1,1) = -Y` at `d = 2`. Every entropy in the crate
//! depends on `|Tr(D_a^dag O)|` only, so the Pauli-Y sign is immaterial.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest total dimension accepted for dense work.
pub const MAX_DIM: usize = 1 << 14;

/// Which closed-form averaging case applies to a Hilbert space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    OddQudit,
    EvenQudit,
    Multiqubit,
}

impl Flavor {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "odd" | "odd-qudit" => Ok(Flavor::OddQudit),
            "even" | "even-qudit" | "qudit" => Ok(Flavor::EvenQudit),
            "multiqubit" | "qubits" | "qubit" => Ok(Flavor::Multiqubit),
            other => Err(Error::Domain(format!("unknown flavor `{other}`"))),
        }
    }

    /// The qudit flavor matching the parity of `dim`.
    pub fn qudit_for(dim: usize) -> Self {
        if dim % 2 == 1 {
            Flavor::OddQudit
        } else {
            Flavor::EvenQudit
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Flavor::OddQudit => "odd-qudit",
            Flavor::EvenQudit => "even-qudit",
            Flavor::Multiqubit => "multiqubit",
        }
    }
}

/// Local dimension, number of qudits and averaging flavor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertSpec {
    d: usize,
    n: usize,
    flavor: Flavor,
    dim: usize,
}

impl HilbertSpec {
    pub fn new(d: usize, n: usize, flavor: Flavor) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidSpec(format!("local dimension {d} < 2")));
        }
        if n < 1 {
            return Err(Error::InvalidSpec("need at least one qudit".into()));
        }
        let dim = (d as u64)
            .checked_pow(n as u32)
            .filter(|&v| v <= MAX_DIM as u64)
            .ok_or_else(|| Error::InvalidSpec(format!("d^n = {d}^{n} exceeds {MAX_DIM}")))?
            as usize;
        match flavor {
            Flavor::Multiqubit if d != 2 => {
                return Err(Error::InvalidSpec(format!(
                    "multiqubit flavor requires d = 2, got d = {d}"
                )))
            }
            Flavor::OddQudit if dim % 2 == 0 => {
                return Err(Error::InvalidSpec(format!(
                    "odd-qudit flavor requires odd total dimension, got {dim}"
                )))
            }
            Flavor::EvenQudit if dim % 2 == 1 => {
                return Err(Error::InvalidSpec(format!(
                    "even-qudit flavor requires even total dimension, got {dim}"
                )))
            }
            _ => {}
        }
        Ok(Self { d, n, flavor, dim })
    }

    /// A single qudit of dimension `dim`, flavor chosen by parity.
    pub fn qudit(dim: usize) -> Result<Self> {
        Self::new(dim, 1, Flavor::qudit_for(dim))
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(2, n, Flavor::Multiqubit)
    }

    /// `n` qudits of dimension `d`; qubits default to the multiqubit flavor.
    pub fn multiqudit(d: usize, n: usize) -> Result<Self> {
        let flavor = if d == 2 {
            Flavor::Multiqubit
        } else {
            Flavor::qudit_for(d.pow(n as u32))
        };
        Self::new(d, n, flavor)
    }

    pub fn with_flavor(self, flavor: Flavor) -> Result<Self> {
        Self::new(self.d, self.n, flavor)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Total dimension `d^n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of reduced symplectic indices, `d^{2n}`.
    pub fn num_indices(&self) -> usize {
        self.dim * self.dim
    }
}

/// Element of `Z_d^{2n}` in interleaved layout.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymplecticIndex(Vec<u32>);

impl SymplecticIndex {
    pub fn new(components: Vec<u32>, d: usize) -> Result<Self> {
        if components.len() % 2 != 0 {
            return Err(Error::Dimension(format!(
                "symplectic index needs even length, got {}",
                components.len()
            )));
        }
        if let Some(c) = components.iter().find(|&&c| c as usize >= d) {
            return Err(Error::Domain(format!("component {c} not reduced mod {d}")));
        }
        Ok(Self(components))
    }

    /// Reduce arbitrary integers mod `d` (no sign bookkeeping).
    pub fn reduced(raw: &[i64], d: usize) -> Self {
        Self(raw.iter().map(|&c| c.rem_euclid(d as i64) as u32).collect())
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; 2 * n])
    }

    pub fn from_linear(mut linear: usize, d: usize, n: usize) -> Self {
        let mut c = vec![0u32; 2 * n];
        for slot in c.iter_mut().rev() {
            *slot = (linear % d) as u32;
            linear /= d;
        }
        Self(c)
    }

    pub fn to_linear(&self, d: usize) -> usize {
        self.0.iter().fold(0usize, |acc, &c| acc * d + c as usize)
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len() / 2
    }

    pub fn x(&self, qudit: usize) -> u32 {
        self.0[2 * qudit]
    }

    pub fn z(&self, qudit: usize) -> u32 {
        self.0[2 * qudit + 1]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn as_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&c| c as i64).collect()
    }

    /// `(self + other) mod d`, dropping the even-d sign.
    pub fn add_mod(&self, other: &Self, d: usize) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| ((a + b) as usize % d) as u32)
                .collect(),
        )
    }

    pub fn neg_mod(&self, d: usize) -> Self {
        Self(self.0.iter().map(|&a| ((d - a as usize) % d) as u32).collect())
    }

    pub fn scale_mod(&self, k: usize, d: usize) -> Self {
        Self(self.0.iter().map(|&a| ((a as usize * k) % d) as u32).collect())
    }
}

/// Exponent of `tau`, reduced mod `2d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhaseExponent(u32);

impl PhaseExponent {
    pub fn new(value: i64, d: usize) -> Self {
        Self(value.rem_euclid(2 * d as i64) as u32)
    }

    pub fn value(&self) -> u32 {
        self.0
    }

    pub fn to_complex(self, d: usize) -> Complex64 {
        tau_pow(self.0 as i64, d)
    }
}

/// `tau^e` for `tau = -exp(i pi / d)`, exact on the `2d`-th roots of unity.
pub fn tau_pow(e: i64, d: usize) -> Complex64 {
    let two_d = 2 * d as i64;
    let r = (e.rem_euclid(two_d) * (d as i64 + 1)).rem_euclid(two_d);
    Complex64::from_polar(1.0, PI * r as f64 / d as f64)
}

/// Table of `tau^e` for `e` in `0..2d`.
pub fn tau_table(d: usize) -> Vec<Complex64> {
    (0..2 * d as i64).map(|e| tau_pow(e, d)).collect()
}

/// Symplectic product `sum_i (a_z b_x - a_x b_z)` on raw integer vectors.
pub fn symplectic_raw(a: &[i64], b: &[i64]) -> i64 {
    a.chunks_exact(2)
        .zip(b.chunks_exact(2))
        .map(|(p, q)| p[1] * q[0] - p[0] * q[1])
        .sum()
}

/// `[a, b]` reduced mod `2d`. Callers needing an `omega` exponent reduce mod `d`.
pub fn symplectic_form(a: &SymplecticIndex, b: &SymplecticIndex, d: usize) -> Result<u32> {
    if a.0.len() != b.0.len() {
        return Err(Error::Dimension(format!(
            "symplectic form of lengths {} and {}",
            a.0.len(),
            b.0.len()
        )));
    }
    Ok(symplectic_raw(&a.as_i64(), &b.as_i64()).rem_euclid(2 * d as i64) as u32)
}

/// Split `raw = x + d y` with `x = raw mod d` and return `(sign, x)` such that
/// `D_raw = sign * D_x`.
pub fn canonicalize_index(raw: &[i64], d: usize) -> (i8, SymplecticIndex) {
    let x = SymplecticIndex::reduced(raw, d);
    if d % 2 == 1 {
        return (1, x);
    }
    let xi = x.as_i64();
    let y: Vec<i64> = raw
        .iter()
        .zip(&xi)
        .map(|(&r, &xr)| (r - xr) / d as i64)
        .collect();
    let s = symplectic_raw(&xi, &y);
    (if s.rem_euclid(2) == 0 { 1 } else { -1 }, x)
}

/// Sign and linear index of an unreduced index; allocation free.
#[inline]
pub(crate) fn canonical_linear(raw: &[i64], d: usize) -> (bool, usize) {
    let di = d as i64;
    let mut linear = 0usize;
    let mut parity = 0i64;
    for pair in raw.chunks_exact(2) {
        let (x0, x1) = (pair[0].rem_euclid(di), pair[1].rem_euclid(di));
        linear = (linear * d + x0 as usize) * d + x1 as usize;
        if d % 2 == 0 {
            let (y0, y1) = ((pair[0] - x0) / di, (pair[1] - x1) / di);
            parity += x1 * y0 - x0 * y1;
        }
    }
    (parity.rem_euclid(2) == 1, linear)
}

/// `D_a D_b = tau^e D_c` with `c = (a + b) mod d`; returns `(e, c)`.
pub fn mul_indices(
    a: &SymplecticIndex,
    b: &SymplecticIndex,
    d: usize,
) -> Result<(PhaseExponent, SymplecticIndex)> {
    let form = symplectic_form(a, b, d)? as i64;
    let raw: Vec<i64> = a.0.iter().zip(&b.0).map(|(&p, &q)| (p + q) as i64).collect();
    let (sign, c) = canonicalize_index(&raw, d);
    let e = if sign < 0 { form + d as i64 } else { form };
    Ok((PhaseExponent::new(e, d), c))
}

/// Sparse operator `O |k> = phase[k] |perm[k]>`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedPermOp {
    d: usize,
    perm: Vec<usize>,
    exps: Vec<u32>,
}

impl GeneralizedPermOp {
    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn phase(&self, k: usize) -> Complex64 {
        tau_pow(self.exps[k] as i64, self.d)
    }

    pub fn phase_exponent(&self, k: usize) -> PhaseExponent {
        PhaseExponent(self.exps[k])
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let table = tau_table(self.d);
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (k, &amp) in v.iter().enumerate() {
            out[self.perm[k]] = table[self.exps[k] as usize] * amp;
        }
        out
    }

    /// `<v| O |v>`.
    pub fn expectation(&self, v: &[Complex64]) -> Complex64 {
        let table = tau_table(self.d);
        v.iter()
            .enumerate()
            .map(|(k, &amp)| v[self.perm[k]].conj() * table[self.exps[k] as usize] * amp)
            .sum()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            m[(self.perm[k], k)] = self.phase(k);
        }
        m
    }
}

/// Base-`d` digits of every basis label, qudit 1 first.
pub(crate) fn basis_digits(d: usize, n: usize) -> Vec<u32> {
    let dim = d.pow(n as u32);
    let mut digits = vec![0u32; dim * n];
    for k in 0..dim {
        let mut r = k;
        for q in (0..n).rev() {
            digits[k * n + q] = (r % d) as u32;
            r /= d;
        }
    }
    digits
}

/// The displacement operator `D_a` on `spec`.
pub fn displacement(spec: &HilbertSpec, a: &SymplecticIndex) -> Result<GeneralizedPermOp> {
    let (d, n) = (spec.d(), spec.n());
    if a.n() != n {
        return Err(Error::Dimension(format!(
            "index for {} qudits used on {n}",
            a.n()
        )));
    }
    if a.0.iter().any(|&c| c as usize >= d) {
        return Err(Error::Domain("displacement index not reduced".into()));
    }
    let dim = spec.dim();
    let two_d = 2 * d;
    let xz: usize = (0..n).map(|q| (a.x(q) * a.z(q)) as usize).sum();
    let mut perm = vec![0usize; dim];
    let mut exps = vec![0u32; dim];
    for k in 0..dim {
        let mut r = k;
        let mut image = 0usize;
        let mut place = 1usize;
        let mut e = xz;
        for q in (0..n).rev() {
            let digit = r % d;
            r /= d;
            image += ((digit + a.x(q) as usize) % d) * place;
            place *= d;
            e += 2 * a.z(q) as usize * digit;
        }
        perm[k] = image;
        exps[k] = (e % two_d) as u32;
    }
    Ok(GeneralizedPermOp { d, perm, exps })
}

/// Index bookkeeping for fast whole-frame transforms: every reduced index is
/// split into a shift label `x` and a clock label `z`, each a basis label.
pub(crate) struct Frame {
    pub d: usize,
    pub n: usize,
    pub dim: usize,
    digits: Vec<u32>,
    spread_x: Vec<usize>,
    spread_z: Vec<usize>,
    omega: Vec<Complex64>,
    tau: Vec<Complex64>,
}

impl Frame {
    pub fn new(d: usize, n: usize) -> Self {
        let dim = d.pow(n as u32);
        let digits = basis_digits(d, n);
        let mut spread_x = vec![0usize; dim];
        let mut spread_z = vec![0usize; dim];
        for k in 0..dim {
            let (mut sx, mut sz) = (0usize, 0usize);
            for q in 0..n {
                let digit = digits[k * n + q] as usize;
                sx = (sx * d + digit) * d;
                sz = (sz * d) * d + digit;
            }
            spread_x[k] = sx;
            spread_z[k] = sz;
        }
        let omega = (0..d)
            .map(|t| Complex64::from_polar(1.0, 2.0 * PI * t as f64 / d as f64))
            .collect();
        Self {
            d,
            n,
            dim,
            digits,
            spread_x,
            spread_z,
            omega,
            tau: tau_table(d),
        }
    }

    #[inline]
    pub fn index_of(&self, x: usize, z: usize) -> usize {
        self.spread_x[x] + self.spread_z[z]
    }

    /// Digitwise `(k + x) mod d`.
    #[inline]
    pub fn shift(&self, k: usize, x: usize) -> usize {
        let n = self.n;
        let mut out = 0usize;
        for q in 0..n {
            let s = (self.digits[k * n + q] + self.digits[x * n + q]) as usize % self.d;
            out = out * self.d + s;
        }
        out
    }

    #[inline]
    pub fn dot(&self, x: usize, z: usize) -> usize {
        let n = self.n;
        (0..n)
            .map(|q| (self.digits[x * n + q] * self.digits[z * n + q]) as usize)
            .sum()
    }

    /// In-place `out[z] = sum_k omega^{sign z.k} buf[k]`, one axis at a time.
    pub fn dft(&self, buf: &mut [Complex64], inverse_sign: bool) {
        let d = self.d;
        let mut scratch = vec![Complex64::new(0.0, 0.0); d];
        let mut stride = 1usize;
        for _ in 0..self.n {
            let block = stride * d;
            for base in (0..self.dim).step_by(block) {
                for off in 0..stride {
                    for (z, s) in scratch.iter_mut().enumerate() {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..d {
                            let t = (z * k) % d;
                            let w = if inverse_sign {
                                self.omega[(d - t) % d]
                            } else {
                                self.omega[t]
                            };
                            acc += w * buf[base + off + k * stride];
                        }
                        *s = acc;
                    }
                    for (z, s) in scratch.iter().enumerate() {
                        buf[base + off + z * stride] = *s;
                    }
                }
            }
            stride = block;
        }
    }

    /// `Tr(D_a^dag O)` for every reduced index `a`.
    pub fn coefficients_of_operator(&self, op: &DMatrix<Complex64>) -> Vec<Complex64> {
        let dim = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        let mut buf = vec![Complex64::new(0.0, 0.0); dim];
        for x in 0..dim {
            for (k, slot) in buf.iter_mut().enumerate() {
                *slot = op[(self.shift(k, x), k)];
            }
            self.dft(&mut buf, true);
            for (z, &h) in buf.iter().enumerate() {
                let e = (2 * self.d - self.dot(x, z) % (2 * self.d)) % (2 * self.d);
                out[self.index_of(x, z)] = self.tau[e] * h;
            }
        }
        out
    }

    /// `<psi| D_a |psi>` for every reduced index `a`.
    pub fn expectations_of_state(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let dim = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        let mut buf = vec![Complex64::new(0.0, 0.0); dim];
        for x in 0..dim {
            for (k, slot) in buf.iter_mut().enumerate() {
                *slot = psi[self.shift(k, x)].conj() * psi[k];
            }
            self.dft(&mut buf, false);
            for (z, &h) in buf.iter().enumerate() {
                let e = self.dot(x, z) % (2 * self.d);
                out[self.index_of(x, z)] = self.tau[e] * h;
            }
        }
        out
    }
}

/// Clifford generators used to build random words.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffordGate {
    /// `|k> -> d^{-1/2} sum_j omega^{jk} |j>` on one qudit.
    Fourier(usize),
    /// `|k> -> tau^{k^2} |k>` on one qudit.
    Phase(usize),
    /// `|j,k> -> omega^{jk} |j,k>` on two qudits.
    ControlledZ(usize, usize),
    Swap(usize, usize),
}

fn gate_matrix(spec: &HilbertSpec, gate: CliffordGate) -> DMatrix<Complex64> {
    let (d, n, dim) = (spec.d(), spec.n(), spec.dim());
    let digits = basis_digits(d, n);
    let tau = tau_table(d);
    let label = |ds: &[u32]| ds.iter().fold(0usize, |acc, &v| acc * d + v as usize);
    let mut m = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        let ds = &digits[k * n..(k + 1) * n];
        match gate {
            CliffordGate::Fourier(q) => {
                let norm = 1.0 / (d as f64).sqrt();
                let mut out = ds.to_vec();
                for j in 0..d {
                    out[q] = j as u32;
                    m[(label(&out), k)] = tau[(2 * j * ds[q] as usize) % (2 * d)] * norm;
                }
            }
            CliffordGate::Phase(q) => {
                let v = ds[q] as usize;
                m[(k, k)] = tau[(v * v) % (2 * d)];
            }
            CliffordGate::ControlledZ(p, q) => {
                m[(k, k)] = tau[(2 * ds[p] as usize * ds[q] as usize) % (2 * d)];
            }
            CliffordGate::Swap(p, q) => {
                let mut out = ds.to_vec();
                out.swap(p, q);
                m[(label(&out), k)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    m
}

/// Dense unitary of a gate word, applied left to right.
pub fn clifford_word(spec: &HilbertSpec, word: &[CliffordGate]) -> Result<DMatrix<Complex64>> {
    let n = spec.n();
    let mut u = DMatrix::identity(spec.dim(), spec.dim());
    for &gate in word {
        let ok = match gate {
            CliffordGate::Fourier(q) | CliffordGate::Phase(q) => q < n,
            CliffordGate::ControlledZ(p, q) | CliffordGate::Swap(p, q) => p < n && q < n && p != q,
        };
        if !ok {
            return Err(Error::Domain(format!("gate {gate:?} invalid on {n} qudits")));
        }
        u = gate_matrix(spec, gate) * u;
    }
    Ok(u)
}

/// Checks that `U D_a U^dag` is a phase times a single displacement for every
/// generator `a` (one `X` or `Z` on one qudit).
pub fn is_clifford(spec: &HilbertSpec, u: &DMatrix<Complex64>) -> bool {
    let (d, n, dim) = (spec.d(), spec.n(), spec.dim());
    let frame = Frame::new(d, n);
    let threshold = dim as f64 - 1e-8;
    for slot in 0..2 * n {
        let mut comps = vec![0u32; 2 * n];
        comps[slot] = 1;
        let a = SymplecticIndex(comps);
        let da = match displacement(spec, &a) {
            Ok(op) => op.to_dense(),
            Err(_) => return false,
        };
        let conj = u * da * u.adjoint();
        let coeffs = frame.coefficients_of_operator(&conj);
        let hits = coeffs.iter().filter(|c| c.norm() >= threshold).count();
        if hits != 1 {
            return false;
        }
    }
    true
}

/// A random Clifford unitary built from a word of at least 20 generators.
pub fn random_clifford<R: Rng + ?Sized>(spec: &HilbertSpec, rng: &mut R) -> Result<DMatrix<Complex64>> {
    let n = spec.n();
    let len = 20 + 4 * n;
    let mut word = Vec::with_capacity(len);
    for _ in 0..len {
        let choice = if n > 1 { rng.random_range(0..4) } else { rng.random_range(0..2) };
        let q = rng.random_range(0..n);
        let gate = match choice {
            0 => CliffordGate::Fourier(q),
            1 => CliffordGate::Phase(q),
            other => {
                let mut p = rng.random_range(0..n - 1);
                if p >= q {
                    p += 1;
                }
                if other == 2 {
                    CliffordGate::ControlledZ(q, p)
                } else {
                    CliffordGate::Swap(q, p)
                }
            }
        };
        word.push(gate);
    }
    let u = clifford_word(spec, &word)?;
    if !is_clifford(spec, &u) {
        return Err(Error::Internal(format!(
            "generator word failed the normalizer check: {word:?}"
        )));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `tau^{a1 a2} X^{a1} Z^{a2}` from explicit clock and shift matrices.
    fn dense_oracle(d: usize, comps: &[i64]) -> DMatrix<Complex64> {
        let omega = Complex64::from_polar(1.0, 2.0 * PI / d as f64);
        let tau = -Complex64::from_polar(1.0, PI / d as f64);
        let mut x = DMatrix::<Complex64>::zeros(d, d);
        let mut z = DMatrix::<Complex64>::zeros(d, d);
        for k in 0..d {
            x[((k + 1) % d, k)] = c(1.0, 0.0);
            z[(k, k)] = omega.powu(k as u32);
        }
        let mut total = DMatrix::<Complex64>::identity(1, 1);
        for pair in comps.chunks(2) {
            let pow = |m: &DMatrix<Complex64>, e: i64| {
                let e = e.rem_euclid(d as i64) as usize;
                let mut r = DMatrix::identity(d, d);
                for _ in 0..e {
                    r = &r * m;
                }
                r
            };
            // X^{a1} with a1 possibly >= d: X^d = I, Z^d = I, phase keeps full exponent.
            let phase = tau.powi((pair[0] * pair[1]) as i32);
            let local = pow(&x, pair[0]) * pow(&z, pair[1]) * phase;
            total = total.kronecker(&local);
        }
        total
    }

    fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
        (a - b).iter().all(|v| v.norm() < tol)
    }

    #[test]
    fn symplectic_form_examples() {
        let a = SymplecticIndex::new(vec![1, 0], 2).unwrap();
        let b = SymplecticIndex::new(vec![0, 1], 2).unwrap();
        assert_eq!(symplectic_form(&a, &b, 2).unwrap(), 3);
        assert_eq!(symplectic_form(&a, &a, 2).unwrap(), 0);
        let a = SymplecticIndex::new(vec![2, 1, 0, 3], 5).unwrap();
        let b = SymplecticIndex::new(vec![1, 1, 2, 0], 5).unwrap();
        // (1*1 - 2*1) + (3*2 - 0*0) = 5
        assert_eq!(symplectic_form(&a, &b, 5).unwrap(), 5);
        let short = SymplecticIndex::zero(1);
        assert!(matches!(symplectic_form(&a, &short, 5), Err(Error::Dimension(_))));
    }

    #[test]
    fn displacement_examples() {
        let spec = HilbertSpec::qubits(1).unwrap();
        let id = displacement(&spec, &SymplecticIndex::zero(1)).unwrap();
        assert!(close(&id.to_dense(), &DMatrix::identity(2, 2), 1e-14));
        let x = displacement(&spec, &SymplecticIndex::new(vec![1, 0], 2).unwrap()).unwrap();
        assert_eq!(x.perm(), &[1, 0]);
        assert!((0..2).all(|k| (x.phase(k) - c(1.0, 0.0)).norm() < 1e-14));

        let spec3 = HilbertSpec::qudit(3).unwrap();
        let op = displacement(&spec3, &SymplecticIndex::new(vec![1, 2], 3).unwrap()).unwrap();
        let tau = -Complex64::from_polar(1.0, PI / 3.0);
        let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let dense = op.to_dense();
        for k in 0..3 {
            let expected = tau.powu(2) * omega.powu(2 * k as u32);
            assert!((dense[((k + 1) % 3, k)] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn displacement_matches_dense_oracle() {
        for &(d, n) in &[(2, 1), (2, 2), (3, 1), (3, 2), (4, 1), (5, 1), (6, 1)] {
            let spec = HilbertSpec::multiqudit(d, n).unwrap();
            for lin in 0..spec.num_indices() {
                let a = SymplecticIndex::from_linear(lin, d, n);
                let sparse = displacement(&spec, &a).unwrap().to_dense();
                assert!(close(&sparse, &dense_oracle(d, &a.as_i64()), 1e-12), "d={d} a={a:?}");
            }
        }
    }

    #[test]
    fn orthogonality_up_to_27() {
        for &(d, n) in &[(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (4, 1), (5, 1), (4, 2)] {
            let spec = HilbertSpec::multiqudit(d, n).unwrap();
            let dim = spec.dim() as f64;
            let ops: Vec<_> = (0..spec.num_indices())
                .map(|l| displacement(&spec, &SymplecticIndex::from_linear(l, d, n)).unwrap())
                .collect();
            for (i, a) in ops.iter().enumerate() {
                for (j, b) in ops.iter().enumerate() {
                    // Tr(D_a^dag D_b) = sum_k conj(a[k]) b[k] where perms agree.
                    let tr: Complex64 = (0..spec.dim())
                        .filter(|&k| a.perm()[k] == b.perm()[k])
                        .map(|k| a.phase(k).conj() * b.phase(k))
                        .sum();
                    let expected = if i == j { dim } else { 0.0 };
                    assert!((tr - c(expected, 0.0)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn adjoint_is_negated_index() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(d, n) in &[(2, 2), (3, 2), (4, 1), (6, 1)] {
            let spec = HilbertSpec::multiqudit(d, n).unwrap();
            for _ in 0..50 {
                let a = SymplecticIndex::from_linear(rng.random_range(0..spec.num_indices()), d, n);
                let raw: Vec<i64> = a.as_i64().iter().map(|v| -v).collect();
                let (sign, x) = canonicalize_index(&raw, d);
                let lhs = displacement(&spec, &a).unwrap().to_dense().adjoint();
                let rhs = displacement(&spec, &x).unwrap().to_dense() * c(sign as f64, 0.0);
                assert!(close(&lhs, &rhs, 1e-12));
            }
        }
    }

    #[test]
    fn mul_indices_examples() {
        let spec = HilbertSpec::qubits(1).unwrap();
        let a = SymplecticIndex::new(vec![1, 0], 2).unwrap();
        let b = SymplecticIndex::new(vec![0, 1], 2).unwrap();
        let (e, cidx) = mul_indices(&a, &b, 2).unwrap();
        let lhs = displacement(&spec, &a).unwrap().to_dense() * displacement(&spec, &b).unwrap().to_dense();
        let rhs = displacement(&spec, &cidx).unwrap().to_dense() * e.to_complex(2);
        assert!(close(&lhs, &rhs, 1e-12));

        let (e, cidx) = mul_indices(&a, &a, 2).unwrap();
        assert!(cidx.is_zero());
        assert!((e.to_complex(2) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn mul_indices_matches_dense_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(d, n) in &[(2, 1), (2, 2), (3, 1), (3, 2), (4, 1), (5, 1)] {
            let spec = HilbertSpec::multiqudit(d, n).unwrap();
            for _ in 0..500 {
                let a = SymplecticIndex::from_linear(rng.random_range(0..spec.num_indices()), d, n);
                let b = SymplecticIndex::from_linear(rng.random_range(0..spec.num_indices()), d, n);
                let (e, cidx) = mul_indices(&a, &b, d).unwrap();
                let lhs = displacement(&spec, &a).unwrap().to_dense()
                    * displacement(&spec, &b).unwrap().to_dense();
                let rhs = displacement(&spec, &cidx).unwrap().to_dense() * e.to_complex(d);
                assert!(close(&lhs, &rhs, 1e-10), "d={d} n={n} a={a:?} b={b:?}");
            }
        }
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize_index(&[3, 1], 3), (1, SymplecticIndex(vec![0, 1])));
        assert_eq!(canonicalize_index(&[2, 1], 2), (-1, SymplecticIndex(vec![0, 1])));
        assert_eq!(canonicalize_index(&[0, 0], 7), (1, SymplecticIndex(vec![0, 0])));
        let spec = HilbertSpec::qubits(1).unwrap();
        let lhs = dense_oracle(2, &[2, 1]);
        let rhs = displacement(&spec, &SymplecticIndex(vec![0, 1])).unwrap().to_dense() * c(-1.0, 0.0);
        assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn canonicalize_sign_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [2usize, 3, 4] {
            for n in [1usize, 2] {
                let spec = HilbertSpec::multiqudit(d, n).unwrap();
                for _ in 0..200 {
                    let raw: Vec<i64> = (0..2 * n).map(|_| rng.random_range(-3 * d as i64..3 * d as i64)).collect();
                    let (sign, x) = canonicalize_index(&raw, d);
                    let (neg, lin) = canonical_linear(&raw, d);
                    assert_eq!(neg, sign < 0);
                    assert_eq!(lin, x.to_linear(d));
                    let rhs = displacement(&spec, &x).unwrap().to_dense() * c(sign as f64, 0.0);
                    assert!(close(&dense_oracle(d, &raw), &rhs, 1e-10), "d={d} raw={raw:?}");
                }
            }
        }
    }

    #[test]
    fn hadamard_swaps_x_and_z() {
        let spec = HilbertSpec::qubits(1).unwrap();
        let h = clifford_word(&spec, &[CliffordGate::Fourier(0)]).unwrap();
        let x = dense_oracle(2, &[1, 0]);
        let z = dense_oracle(2, &[0, 1]);
        assert!(close(&(&h * &x * h.adjoint()), &z, 1e-12));
        assert!(close(&(&h * &z * h.adjoint()), &x, 1e-12));
    }

    #[test]
    fn qutrit_fourier_action() {
        let spec = HilbertSpec::qudit(3).unwrap();
        let f = clifford_word(&spec, &[CliffordGate::Fourier(0)]).unwrap();
        let frame = Frame::new(3, 1);
        let check = |op: DMatrix<Complex64>, target: &[u32]| {
            let coeffs = frame.coefficients_of_operator(&op);
            let idx = SymplecticIndex(target.to_vec()).to_linear(3);
            assert!((coeffs[idx].norm() - 3.0).abs() < 1e-9);
        };
        check(&f * dense_oracle(3, &[1, 0]) * f.adjoint(), &[0, 1]);
        check(&f * dense_oracle(3, &[0, 1]) * f.adjoint(), &[2, 0]);
    }

    #[test]
    fn random_cliffords_are_unitary_normalizers() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &(d, n) in &[(2, 1), (2, 3), (3, 2), (4, 1), (5, 1), (6, 1)] {
            let spec = HilbertSpec::multiqudit(d, n).unwrap();
            for _ in 0..5 {
                let u = random_clifford(&spec, &mut rng).unwrap();
                let id = DMatrix::<Complex64>::identity(spec.dim(), spec.dim());
                assert!(close(&(u.adjoint() * &u), &id, 1e-10));
            }
        }
    }

    #[test]
    fn frame_transforms_match_sparse_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &(d, n) in &[(2, 2), (3, 2), (4, 1), (6, 1)] {
            let spec = HilbertSpec::multiqudit(d, n).unwrap();
            let frame = Frame::new(d, n);
            let dim = spec.dim();
            let op = DMatrix::<Complex64>::from_fn(dim, dim, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            let psi: Vec<Complex64> = (0..dim).map(|_| c(rng.random::<f64>(), rng.random::<f64>())).collect();
            let coeffs = frame.coefficients_of_operator(&op);
            let exps = frame.expectations_of_state(&psi);
            for lin in 0..spec.num_indices() {
                let da = displacement(&spec, &SymplecticIndex::from_linear(lin, d, n)).unwrap();
                let direct = (da.to_dense().adjoint() * &op).trace();
                assert!((coeffs[lin] - direct).norm() < 1e-9);
                assert!((exps[lin] - da.expectation(&psi)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(HilbertSpec::new(3, 2, Flavor::Multiqubit).is_err());
        assert!(HilbertSpec::new(3, 2, Flavor::EvenQudit).is_err());
        assert!(HilbertSpec::new(2, 2, Flavor::OddQudit).is_err());
        assert!(HilbertSpec::new(2, 3, Flavor::EvenQudit).is_ok());
        assert!(HilbertSpec::new(1, 3, Flavor::OddQudit).is_err());
        assert!(HilbertSpec::new(2, 40, Flavor::Multiqubit).is_err());
    }
}
