//! Haar sampling and Monte Carlo estimates of subspace averages.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::averages::{extrinsic_ase_embedding, CompressedEvaluator, Embedding, SubspaceProjector};
use crate::encodings::{separable_qubit_se, SpinState};
use crate::error::{Error, Result};
use crate::magic::{PureState, SeEvaluator};
use crate::optimize::{bfgs, BfgsSettings};
use crate::par;
use crate::wh::HilbertSpec;

/// Mean and standard error of a Monte Carlo average.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McResult {
    pub fn from_values(values: &[f64], seed: u64) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::Domain(format!("need at least 2 samples, got {n}")));
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Ok(Self {
            mean,
            stderr: (var / n as f64).sqrt(),
            samples: n,
            seed,
        })
    }
}

/// Independent stream for sample `index` under `seed`; results do not depend
/// on how samples are spread over threads.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Gaussian vector, normalized.
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<PureState> {
    if dim == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    if dim == 1 {
        return Ok(PureState::basis(1, 0));
    }
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| complex_normal(rng)).collect();
        if v.iter().any(|a| a.norm_sqr() > 0.0) {
            return PureState::normalized(v);
        }
    }
}

/// Orthonormalize columns with the phases of `R`'s diagonal moved into `Q`,
/// which makes the result unitarily invariant for Gaussian input.
pub(crate) fn orthonormalize(m: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let (q, r) = m.qr().unpack();
    let mut q = q;
    for k in 0..r.ncols().min(r.nrows()) {
        let diag = r[(k, k)];
        if diag.norm() < 1e-12 {
            return Err(Error::Numerical("rank-deficient matrix".into()));
        }
        let phase = diag / diag.norm();
        for row in 0..q.nrows() {
            q[(row, k)] *= phase;
        }
    }
    Ok(q)
}

/// Haar-random `d_S`-dimensional subspace of `big`.
pub fn haar_embedding<R: Rng + ?Sized>(big: &HilbertSpec, small_dim: usize, rng: &mut R) -> Result<Embedding> {
    if small_dim == 0 || small_dim > big.dim() {
        return Err(Error::Domain(format!("subspace dimension {small_dim} outside [1, {}]", big.dim())));
    }
    loop {
        let g = DMatrix::from_fn(big.dim(), small_dim, |_, _| complex_normal(rng));
        match orthonormalize(g) {
            Ok(q) => return Embedding::new(*big, q),
            Err(Error::Numerical(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

fn sample_values(emb: &Embedding, samples: usize, seed: u64, offset: u64) -> Result<Vec<f64>> {
    let eval = SeEvaluator::new(emb.big());
    let ds = emb.small_dim();
    par::map_collect(samples, |i| {
        let mut rng = stream_rng(seed, offset + i as u64);
        let psi = haar_state(ds, &mut rng)?;
        eval.linear_se_raw(&emb.encode(psi.amplitudes())?)
    })
    .into_iter()
    .collect()
}

/// Monte Carlo estimate of the extrinsic ASE of an embedding.
pub fn mc_ase(emb: &Embedding, samples: usize, seed: u64) -> Result<McResult> {
    if samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {samples}")));
    }
    McResult::from_values(&sample_values(emb, samples, seed, 0)?, seed)
}

pub fn mc_ase_projector(projector: &SubspaceProjector, samples: usize, seed: u64) -> Result<McResult> {
    mc_ase(&projector.isometry()?, samples, seed)
}

/// Average of `runs` independent Monte Carlo runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McRuns {
    pub mean: f64,
    /// Standard deviation of the run means.
    pub run_std: f64,
    /// `run_std / sqrt(runs)`.
    pub stderr: f64,
    pub runs: usize,
    pub samples_per_run: usize,
    pub seed: u64,
}

/// The repeated-run protocol, e.g. 20 runs of 1000 samples.
pub fn mc_ase_runs(emb: &Embedding, runs: usize, samples_per_run: usize, seed: u64) -> Result<McRuns> {
    if runs < 2 {
        return Err(Error::Domain("need at least 2 runs".into()));
    }
    let means = (0..runs)
        .map(|r| {
            let vals = sample_values(emb, samples_per_run, seed, (r * samples_per_run) as u64)?;
            Ok(McResult::from_values(&vals, seed)?.mean)
        })
        .collect::<Result<Vec<f64>>>()?;
    let summary = McResult::from_values(&means, seed)?;
    Ok(McRuns {
        mean: summary.mean,
        run_std: summary.stderr * (runs as f64).sqrt(),
        stderr: summary.stderr,
        runs,
        samples_per_run,
        seed,
    })
}

/// Median over repetitions of `(exact - mc)^2` at each sample count.
pub fn mc_convergence_curve(
    emb: &Embedding,
    sample_grid: &[usize],
    repetitions: usize,
    seed: u64,
) -> Result<Vec<(usize, f64)>> {
    if sample_grid.is_empty() || sample_grid.iter().any(|&s| s < 2) || repetitions == 0 {
        return Err(Error::Domain("sample grid must be non-empty with counts >= 2".into()));
    }
    let exact = extrinsic_ase_embedding(emb)?;
    let mut offset = 0u64;
    let mut out = Vec::with_capacity(sample_grid.len());
    for &s in sample_grid {
        let mut errs = Vec::with_capacity(repetitions);
        for _ in 0..repetitions {
            let vals = sample_values(emb, s, seed, offset)?;
            offset += s as u64;
            let mean = vals.iter().sum::<f64>() / s as f64;
            errs.push((exact - mean).powi(2));
        }
        errs.sort_by(|a, b| a.total_cmp(b));
        let mid = errs.len() / 2;
        let median = if errs.len() % 2 == 1 {
            errs[mid]
        } else {
            0.5 * (errs[mid - 1] + errs[mid])
        };
        out.push((s, median));
    }
    Ok(out)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(usize, f64)]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|&(x, y)| ((x as f64).ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Domain("need two positive points for a slope".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// How each subspace's average is obtained in [`subspace_ensemble_stats`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubspaceAverage {
    Exact,
    MonteCarlo { samples: usize },
}

/// Statistics of the subspace ASE over Haar-random subspaces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub mean: f64,
    /// Spread of the per-subspace averages.
    pub std: f64,
    /// Standard error of `mean`, including the per-subspace sampling error
    /// when averages are estimated.
    pub stderr: f64,
    pub subspaces: usize,
    pub seed: u64,
}

pub fn subspace_ensemble_stats(
    big: &HilbertSpec,
    small_dim: usize,
    num_subspaces: usize,
    method: SubspaceAverage,
    seed: u64,
) -> Result<EnsembleStats> {
    if num_subspaces < 2 {
        return Err(Error::Domain("need at least 2 subspaces".into()));
    }
    let exact = CompressedEvaluator::new(big)?;
    let results = (0..num_subspaces)
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let emb = haar_embedding(big, small_dim, &mut rng)?;
            match method {
                SubspaceAverage::Exact => Ok((exact.average(emb.columns()), 0.0)),
                SubspaceAverage::MonteCarlo { samples } => {
                    let r = mc_ase(&emb, samples, rng.random())?;
                    Ok((r.mean, r.stderr))
                }
            }
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let n = num_subspaces as f64;
    let mean = results.iter().map(|r| r.0).sum::<f64>() / n;
    let var = results.iter().map(|r| (r.0 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let inner: f64 = results.iter().map(|r| r.1 * r.1).sum::<f64>() / (n * n);
    Ok(EnsembleStats {
        mean,
        std: var.sqrt(),
        stderr: (var / n + inner).sqrt(),
        subspaces: num_subspaces,
        seed,
    })
}

/// Orthonormal basis of the orthogonal complement of the embedding's range.
pub fn complement_basis(emb: &Embedding) -> Result<DMatrix<Complex64>> {
    let db = emb.big().dim();
    let ds = emb.small_dim();
    if ds == db {
        return Err(Error::Domain("the subspace is the whole space; its complement is empty".into()));
    }
    let comp = DMatrix::<Complex64>::identity(db, db) - emb.columns() * emb.columns().adjoint();
    let eig = nalgebra::SymmetricEigen::new(comp);
    let cols: Vec<_> = (0..db)
        .filter(|&i| eig.eigenvalues[i] > 0.5)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.len() != db - ds {
        return Err(Error::Numerical("complement has the wrong dimension".into()));
    }
    Ok(DMatrix::from_columns(&cols))
}

/// `(E psi + kappa) / sqrt 2` for a unit `kappa` orthogonal to the range.
pub fn complement_state(emb: &Embedding, psi: &PureState, kappa: &[Complex64]) -> Result<PureState> {
    if emb.small_dim() == emb.big().dim() {
        return Err(Error::Domain("no complement for a full-space embedding".into()));
    }
    if psi.dim() != emb.small_dim() || kappa.len() != emb.big().dim() {
        return Err(Error::Dimension("state sizes do not match the embedding".into()));
    }
    let k = DVector::from_column_slice(kappa);
    let knorm = k.norm();
    let overlap = (emb.columns().adjoint() * &k).norm();
    if (knorm - 1.0).abs() > 1e-8 || overlap > 1e-8 {
        return Err(Error::Precondition(format!(
            "kappa must be a unit vector in the complement (norm {knorm}, overlap {overlap:.2e})"
        )));
    }
    let v = emb.columns() * DVector::from_column_slice(psi.amplitudes()) + k;
    PureState::normalized(v.iter().copied().collect())
}

fn kappa_from_params(basis: &DMatrix<Complex64>, x: &[f64]) -> Option<Vec<Complex64>> {
    let coeffs = DVector::from_iterator(basis.ncols(), x.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])));
    let norm = coeffs.norm();
    if norm < 1e-12 {
        return None;
    }
    Some((basis * coeffs / Complex64::new(norm, 0.0)).iter().copied().collect())
}

fn minimize_over_kappa<F>(basis: &DMatrix<Complex64>, restarts: usize, seed: u64, objective: F) -> Result<(Vec<Complex64>, f64)>
where
    F: Fn(&[Complex64]) -> Option<f64> + Sync,
{
    if restarts == 0 {
        return Err(Error::Domain("need at least one restart".into()));
    }
    let settings = BfgsSettings::default();
    let dim = 2 * basis.ncols();
    let outcomes = par::map_collect(restarts, |r| {
        let mut rng = stream_rng(seed, r as u64);
        let x0: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        bfgs(|x| kappa_from_params(basis, x).and_then(|k| objective(&k)), &x0, &settings)
    });
    let best = outcomes
        .into_iter()
        .flatten()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or_else(|| Error::Optimization("every restart failed".into()))?;
    let kappa = kappa_from_params(basis, &best.x).ok_or_else(|| Error::Optimization("degenerate optimum".into()))?;
    Ok((kappa, best.value))
}

/// The complement vector minimizing the linear SE of one encoded state.
pub fn optimal_complement_per_state(
    emb: &Embedding,
    psi: &PureState,
    restarts: usize,
    seed: u64,
) -> Result<(Vec<Complex64>, f64)> {
    let basis = complement_basis(emb)?;
    let eval = SeEvaluator::new(emb.big());
    minimize_over_kappa(&basis, restarts, seed, |k| {
        complement_state(emb, psi, k).ok().and_then(|s| eval.linear_se(&s).ok())
    })
}

/// One complement vector minimizing the Monte Carlo average over the
/// subspace, with the sample states fixed by `seed`.
pub fn optimal_fixed_complement(
    emb: &Embedding,
    samples: usize,
    restarts: usize,
    seed: u64,
) -> Result<(Vec<Complex64>, McResult)> {
    if samples < 2 {
        return Err(Error::Domain("need at least 2 samples".into()));
    }
    let basis = complement_basis(emb)?;
    let eval = SeEvaluator::new(emb.big());
    let states = (0..samples)
        .map(|i| haar_state(emb.small_dim(), &mut stream_rng(seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let values_for = |k: &[Complex64]| -> Option<Vec<f64>> {
        states
            .iter()
            .map(|psi| complement_state(emb, psi, k).ok().and_then(|s| eval.linear_se(&s).ok()))
            .collect()
    };
    let (kappa, _) = minimize_over_kappa(&basis, restarts, seed ^ 0x5eed, |k| {
        values_for(k).map(|v| v.iter().sum::<f64>() / v.len() as f64)
    })?;
    let vals = values_for(&kappa).ok_or_else(|| Error::Optimization("optimum is not evaluable".into()))?;
    Ok((kappa, McResult::from_values(&vals, seed)?))
}

/// Monte Carlo average of the separable-qubit entropy over Haar spin-`j`
/// states, as a check on the quadrature value.
pub fn mc_separable_ase(two_j: u32, samples: usize, seed: u64) -> Result<McResult> {
    if samples < 2 {
        return Err(Error::Domain("need at least 2 samples".into()));
    }
    let dim = two_j as usize + 1;
    let vals = par::map_collect(samples, |i| {
        let psi = haar_state(dim, &mut stream_rng(seed, i as u64))?;
        separable_qubit_se(&SpinState::new(two_j, psi.into_amplitudes())?)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    McResult::from_values(&vals, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averages::{extrinsic_ase, group_intrinsic_ase};
    use crate::magic::linear_se;

    #[test]
    fn haar_state_moments() {
        assert_eq!(haar_state(1, &mut stream_rng(0, 0)).unwrap().amplitudes()[0], Complex64::new(1.0, 0.0));
        let dim = 4;
        let vals: Vec<f64> = (0..20_000)
            .map(|i| haar_state(dim, &mut stream_rng(1, i)).unwrap().amplitudes()[0].norm_sqr())
            .collect();
        let r = McResult::from_values(&vals, 1).unwrap();
        assert!((r.mean - 0.25).abs() < 5.0 * r.stderr);

        let spec = HilbertSpec::qudit(5).unwrap();
        let vals: Vec<f64> = (0..10_000)
            .map(|i| linear_se(&spec, &haar_state(5, &mut stream_rng(2, i)).unwrap()).unwrap())
            .collect();
        let r = McResult::from_values(&vals, 2).unwrap();
        assert!((r.mean - 4.0 / 7.0).abs() < 4.0 * r.stderr);
    }

    #[test]
    fn haar_embeddings_are_isometries() {
        let big = HilbertSpec::qubits(3).unwrap();
        for i in 0..10 {
            let e = haar_embedding(&big, 1 + i % 8, &mut stream_rng(3, i as u64)).unwrap();
            assert_eq!(e.small_dim(), 1 + i % 8);
        }
    }

    #[test]
    fn mc_matches_exact_and_is_deterministic() {
        let big = HilbertSpec::qudit(6).unwrap();
        let emb = haar_embedding(&big, 3, &mut stream_rng(4, 0)).unwrap();
        let a = mc_ase(&emb, 4000, 9).unwrap();
        let b = mc_ase(&emb, 4000, 9).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        let exact = extrinsic_ase(&emb.projector()).unwrap();
        assert!((a.mean - exact).abs() < 4.0 * a.stderr);

        let stab = SubspaceProjector::from_state(big, crate::magic::PureState::basis(6, 2).amplitudes()).unwrap();
        let r = mc_ase_projector(&stab, 50, 1).unwrap();
        assert!(r.mean.abs() < 1e-12 && r.stderr < 1e-12);
        assert!(mc_ase(&emb, 1, 0).is_err());
    }

    #[test]
    fn stderr_scaling() {
        let big = HilbertSpec::qudit(5).unwrap();
        let emb = haar_embedding(&big, 2, &mut stream_rng(5, 0)).unwrap();
        let small = mc_ase(&emb, 500, 1).unwrap();
        let large = mc_ase(&emb, 8000, 2).unwrap();
        let ratio = small.stderr / large.stderr;
        assert!(ratio > 4.0 / 1.5 && ratio < 4.0 * 1.5, "ratio {ratio}");
    }

    #[test]
    fn convergence_curve_shape() {
        let big = HilbertSpec::qudit(4).unwrap();
        let emb = haar_embedding(&big, 3, &mut stream_rng(6, 0)).unwrap();
        let curve = mc_convergence_curve(&emb, &[16, 64, 256, 1024], 31, 3).unwrap();
        let slope = loglog_slope(&curve).unwrap();
        assert!((slope + 1.0).abs() < 0.4, "slope {slope}");
        assert!(mc_convergence_curve(&emb, &[], 3, 0).is_err());
    }

    #[test]
    fn ensemble_mean_is_host_average() {
        let big = HilbertSpec::qudit(5).unwrap();
        let s = subspace_ensemble_stats(&big, 2, 200, SubspaceAverage::Exact, 7).unwrap();
        assert!((s.mean - group_intrinsic_ase(&big)).abs() < 4.0 * s.stderr);
        let full = subspace_ensemble_stats(&big, 5, 5, SubspaceAverage::Exact, 7).unwrap();
        assert!(full.std < 1e-10);
        let mc = subspace_ensemble_stats(&big, 2, 20, SubspaceAverage::MonteCarlo { samples: 200 }, 7).unwrap();
        assert!(mc.stderr > 0.0);
    }

    #[test]
    fn complements() {
        let big = HilbertSpec::qudit(4).unwrap();
        let emb = haar_embedding(&big, 2, &mut stream_rng(8, 0)).unwrap();
        let basis = complement_basis(&emb).unwrap();
        assert_eq!(basis.ncols(), 2);
        let kappa: Vec<Complex64> = basis.column(0).iter().copied().collect();
        let psi = haar_state(2, &mut stream_rng(8, 1)).unwrap();
        let s = complement_state(&emb, &psi, &kappa).unwrap();
        let encoded = emb.columns() * DVector::from_column_slice(psi.amplitudes());
        let overlap: Complex64 = encoded.iter().zip(s.amplitudes()).map(|(a, b)| a.conj() * b).sum();
        assert!((overlap.norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let back = emb.columns().adjoint() * DVector::from_column_slice(s.amplitudes());
        let fid: Complex64 = back.iter().zip(psi.amplitudes()).map(|(a, b)| a.conj() * b).sum();
        assert!((fid.norm() / back.norm() - 1.0).abs() < 1e-12);
        let inside: Vec<Complex64> = emb.columns().column(0).iter().copied().collect();
        assert!(complement_state(&emb, &psi, &inside).is_err());
        let full = haar_embedding(&big, 4, &mut stream_rng(8, 2)).unwrap();
        assert!(complement_basis(&full).is_err());

        let eval = SeEvaluator::new(&big);
        let (k, best) = optimal_complement_per_state(&emb, &psi, 4, 1).unwrap();
        for i in 0..20 {
            let mut rng = stream_rng(9, i);
            let c: Vec<Complex64> = (0..2).map(|_| complex_normal(&mut rng)).collect();
            let n = (c[0].norm_sqr() + c[1].norm_sqr()).sqrt();
            let trial: Vec<Complex64> = (&basis * DVector::from_vec(c) / Complex64::new(n, 0.0)).iter().copied().collect();
            let v = eval.linear_se(&complement_state(&emb, &psi, &trial).unwrap()).unwrap();
            assert!(best <= v + 1e-9);
        }
        let norm: f64 = k.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-8);

        let (k, r) = optimal_fixed_complement(&emb, 50, 2, 3).unwrap();
        assert!((emb.columns().adjoint() * DVector::from_vec(k)).norm() < 1e-8);
        assert_eq!(r.samples, 50);
    }

    #[test]
    fn separable_sampling_agrees_with_quadrature() {
        let r = mc_separable_ase(2, 4000, 4).unwrap();
        assert!((r.mean - crate::encodings::separable_qubit_ase(2)).abs() < 4.0 * r.stderr);
    }
}
