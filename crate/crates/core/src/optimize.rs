//! Extremizing the subspace average over embeddings of fixed dimension.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::averages::{extrinsic_ase_embedding, intrinsic_ase_dim, CompressedEvaluator, Embedding};
use crate::error::{Error, Result};
use crate::estimate::{haar_state, orthonormalize, stream_rng};
use crate::magic::SeEvaluator;
use crate::par;
use crate::wh::{Flavor, HilbertSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// The exact average.
    Exact,
    /// A sample mean over fixed Haar states (common random numbers).
    MonteCarlo { samples: usize, seed: u64 },
    /// Exact up to host dimension 16, otherwise 1000 fixed samples.
    Auto,
}

impl Objective {
    fn resolve(self, big: &HilbertSpec, seed: u64) -> Self {
        match self {
            Self::Auto if big.dim() <= 16 => Self::Exact,
            Self::Auto => Self::MonteCarlo { samples: 1000, seed },
            other => other,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub gradient_step: f64,
    pub tolerance: f64,
    pub objective: Objective,
    pub direction: Direction,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iters: 300,
            gradient_step: 1e-6,
            tolerance: 1e-12,
            objective: Objective::Auto,
            direction: Direction::Minimize,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BfgsSettings {
    pub max_iters: usize,
    pub gradient_step: f64,
    /// Stop once an iteration improves the value by less than this.
    pub tolerance: f64,
}

impl Default for BfgsSettings {
    fn default() -> Self {
        Self {
            max_iters: 300,
            gradient_step: 1e-6,
            tolerance: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BfgsOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn gradient<F: Fn(&[f64]) -> Option<f64>>(f: &F, x: &[f64], h: f64) -> Option<Vec<f64>> {
    let mut xp = x.to_vec();
    let mut g = vec![0.0; x.len()];
    for i in 0..x.len() {
        let orig = xp[i];
        xp[i] = orig + h;
        let fp = f(&xp)?;
        xp[i] = orig - h;
        let fm = f(&xp)?;
        xp[i] = orig;
        g[i] = (fp - fm) / (2.0 * h);
    }
    Some(g)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Quasi-Newton minimization with finite-difference gradients and Armijo
/// backtracking. `f` returns `None` where it cannot be evaluated; the line
/// search treats such points as rejected. Returns `None` only when `x0`
/// itself is not evaluable.
pub fn bfgs<F: Fn(&[f64]) -> Option<f64>>(f: F, x0: &[f64], settings: &BfgsSettings) -> Option<BfgsOutcome> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x)?;
    let mut g = gradient(&f, &x, settings.gradient_step)?;
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut converged = false;
    let mut iterations = 0;
    let mut stalls = 0;
    while iterations < settings.max_iters {
        iterations += 1;
        let gv = nalgebra::DVector::from_column_slice(&g);
        let mut p: Vec<f64> = (-(&h * &gv)).iter().copied().collect();
        let mut slope = dot(&p, &g);
        if slope >= 0.0 {
            h = DMatrix::identity(n, n);
            p = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        if slope.abs() < 1e-30 {
            converged = true;
            break;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + step * b).collect();
            if let Some(ft) = f(&trial) {
                if ft <= fx + 1e-4 * step * slope {
                    accepted = Some((trial, ft));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((xn, fnew)) = accepted else {
            // No descent along a quasi-Newton or gradient direction: stationary
            // to within finite-difference accuracy.
            converged = true;
            break;
        };
        let Some(gn) = gradient(&f, &xn, settings.gradient_step) else {
            break;
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 {
            let sv = nalgebra::DVector::from_vec(s);
            let yv = nalgebra::DVector::from_vec(y);
            let rho = 1.0 / sy;
            let i = DMatrix::<f64>::identity(n, n);
            let left = &i - rho * &sv * yv.transpose();
            let right = &i - rho * &yv * sv.transpose();
            h = &left * &h * &right + rho * &sv * sv.transpose();
        }
        let improvement = fx - fnew;
        x = xn;
        fx = fnew;
        g = gn;
        if improvement < settings.tolerance {
            stalls += 1;
            if stalls >= 3 {
                converged = true;
                break;
            }
        } else {
            stalls = 0;
        }
    }
    Some(BfgsOutcome {
        x,
        value: fx,
        iterations,
        converged,
    })
}

/// Isometry from `2 d_B d_S` real parameters (row-major real/imaginary
/// pairs), orthonormalized with a phase-fixed QR.
pub fn embedding_from_params(big: &HilbertSpec, small_dim: usize, params: &[f64]) -> Result<Embedding> {
    let db = big.dim();
    if small_dim == 0 || small_dim > db {
        return Err(Error::Domain(format!("subspace dimension {small_dim} outside [1, {db}]")));
    }
    if params.len() != 2 * db * small_dim {
        return Err(Error::Dimension(format!(
            "expected {} parameters, got {}",
            2 * db * small_dim,
            params.len()
        )));
    }
    let m = DMatrix::from_fn(db, small_dim, |r, c| {
        let k = 2 * (r * small_dim + c);
        Complex64::new(params[k], params[k + 1])
    });
    Embedding::new(*big, orthonormalize(m)?)
}

/// Objective evaluator shared across restarts.
enum Evaluator {
    Exact(CompressedEvaluator),
    Sampled { se: SeEvaluator, states: DMatrix<Complex64> },
}

impl Evaluator {
    fn new(big: &HilbertSpec, small_dim: usize, objective: Objective) -> Result<Self> {
        Ok(match objective {
            Objective::Exact | Objective::Auto => Self::Exact(CompressedEvaluator::new(big)?),
            Objective::MonteCarlo { samples, seed } => {
                if samples < 2 {
                    return Err(Error::Domain("need at least 2 samples".into()));
                }
                let cols = (0..samples)
                    .map(|i| {
                        haar_state(small_dim, &mut stream_rng(seed, i as u64))
                            .map(|s| nalgebra::DVector::from_vec(s.into_amplitudes()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::Sampled {
                    se: SeEvaluator::new(big),
                    states: DMatrix::from_columns(&cols),
                }
            }
        })
    }

    fn value(&self, v: &DMatrix<Complex64>) -> Option<f64> {
        match self {
            Self::Exact(e) => Some(e.average(v)),
            Self::Sampled { se, states } => {
                let encoded = v * states;
                let mut sum = 0.0;
                for col in encoded.column_iter() {
                    let amps: Vec<Complex64> = col.iter().copied().collect();
                    sum += se.linear_se_raw(&amps).ok()?;
                }
                Some(sum / states.ncols() as f64)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExtremizeResult {
    pub embedding: Embedding,
    /// Exact average of `embedding`.
    pub value: f64,
    /// Best objective value from every restart that produced one.
    pub restart_values: Vec<f64>,
    /// Restarts whose line search ended without convergence.
    pub unconverged: usize,
}

/// Search for the smallest or largest average over `d_S`-dimensional
/// subspaces of `big`, with independent random restarts.
pub fn extremize_ase(big: &HilbertSpec, small_dim: usize, config: &OptimizerConfig) -> Result<ExtremizeResult> {
    if config.restarts == 0 {
        return Err(Error::Domain("need at least one restart".into()));
    }
    if !(config.gradient_step > 1e-8 && config.gradient_step < 1e-2) {
        return Err(Error::Domain(format!(
            "gradient step {} outside (1e-8, 1e-2)",
            config.gradient_step
        )));
    }
    if config.max_iters == 0 {
        return Err(Error::Domain("iteration cap must be positive".into()));
    }
    let db = big.dim();
    if small_dim == 0 || small_dim > db {
        return Err(Error::Domain(format!("subspace dimension {small_dim} outside [1, {db}]")));
    }
    let eval = Evaluator::new(big, small_dim, config.objective.resolve(big, config.seed))?;
    let sign = match config.direction {
        Direction::Minimize => 1.0,
        Direction::Maximize => -1.0,
    };
    let settings = BfgsSettings {
        max_iters: config.max_iters,
        gradient_step: config.gradient_step,
        tolerance: config.tolerance,
    };
    let nparams = 2 * db * small_dim;
    let objective = |x: &[f64]| {
        embedding_from_params(big, small_dim, x)
            .ok()
            .and_then(|e| eval.value(e.columns()))
            .map(|v| sign * v)
    };
    let outcomes = par::map_collect(config.restarts, |r| {
        let mut rng = stream_rng(config.seed, r as u64);
        let x0: Vec<f64> = (0..nparams).map(|_| rng.sample(StandardNormal)).collect();
        bfgs(objective, &x0, &settings)
    });
    let unconverged = outcomes.iter().flatten().filter(|o| !o.converged).count();
    let done: Vec<BfgsOutcome> = outcomes.into_iter().flatten().collect();
    // Ties within 1e-9 go to the earliest restart.
    let best = done
        .iter()
        .fold(None::<&BfgsOutcome>, |acc, o| match acc {
            Some(b) if o.value >= b.value - 1e-9 => Some(b),
            _ => Some(o),
        })
        .ok_or_else(|| Error::Optimization("no restart produced an evaluable point".into()))?;
    let embedding = embedding_from_params(big, small_dim, &best.x)?;
    let exact = extrinsic_ase_embedding(&embedding)?;
    Ok(ExtremizeResult {
        embedding,
        value: exact,
        restart_values: done.iter().map(|o| sign * o.value).collect(),
        unconverged,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d_s: usize,
    pub min_ase: f64,
    pub max_ase: f64,
    pub intrinsic_small: f64,
    pub intrinsic_big: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Places where the minimum curve decreases with `d_S` by more than the
    /// optimizer tolerance.
    pub findings: Vec<String>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d_S,min_ase,max_ase,intrinsic_small,intrinsic_big\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.12},{:.12},{:.12},{:.12}\n",
                r.d_s, r.min_ase, r.max_ase, r.intrinsic_small, r.intrinsic_big
            ));
        }
        out
    }
}

/// Minimum and maximum average for every `d_S` in `dims`. The intrinsic
/// reference for `d_S` is the single-qudit value.
pub fn extremal_sweep(big: &HilbertSpec, dims: &[usize], config: &OptimizerConfig) -> Result<SweepReport> {
    let intrinsic_big = crate::averages::group_intrinsic_ase(big);
    let mut rows = Vec::with_capacity(dims.len());
    for &ds in dims {
        let mut lo = *config;
        lo.direction = Direction::Minimize;
        let mut hi = *config;
        hi.direction = Direction::Maximize;
        let min = extremize_ase(big, ds, &lo)?.value;
        let max = extremize_ase(big, ds, &hi)?.value;
        let small = if ds == 1 { 0.0 } else { intrinsic_ase_dim(ds, Flavor::qudit_for(ds))? };
        rows.push(SweepRow {
            d_s: ds,
            min_ase: min,
            max_ase: max,
            intrinsic_small: small,
            intrinsic_big,
        });
    }
    let findings = rows
        .windows(2)
        .filter(|w| w[1].d_s > w[0].d_s && w[1].min_ase < w[0].min_ase - 1e-6)
        .map(|w| {
            format!(
                "minimum decreases from {:.6} at d_S={} to {:.6} at d_S={}",
                w[0].min_ase, w[0].d_s, w[1].min_ase, w[1].d_s
            )
        })
        .collect();
    Ok(SweepReport { rows, findings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averages::extrinsic_ase;

    #[test]
    fn bfgs_on_rosenbrock() {
        let f = |x: &[f64]| Some((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let out = bfgs(f, &[-1.2, 1.0], &BfgsSettings { max_iters: 500, ..Default::default() }).unwrap();
        assert!((out.x[0] - 1.0).abs() < 1e-4 && (out.x[1] - 1.0).abs() < 1e-4, "{:?}", out.x);
        assert!(bfgs(|_: &[f64]| None, &[0.0], &BfgsSettings::default()).is_none());
    }

    #[test]
    fn params_give_isometries() {
        let big = HilbertSpec::qudit(4).unwrap();
        let p: Vec<f64> = (0..16).map(|i| (i as f64 * 0.7).sin()).collect();
        let e = embedding_from_params(&big, 2, &p).unwrap();
        assert_eq!(e.small_dim(), 2);
        assert!(embedding_from_params(&big, 2, &p[..15]).is_err());
        assert!(embedding_from_params(&big, 2, &[0.0; 16]).is_err());
    }

    #[test]
    fn qudit_four_pair_reaches_intrinsic() {
        let big = HilbertSpec::qudit(4).unwrap();
        let cfg = OptimizerConfig { restarts: 6, seed: 3, ..Default::default() };
        let r = extremize_ase(&big, 2, &cfg).unwrap();
        assert!((r.value - 0.2).abs() < 1e-4, "{}", r.value);
        assert!((extrinsic_ase(&r.embedding.projector()).unwrap() - r.value).abs() < 1e-9);
        let cfg = OptimizerConfig { direction: Direction::Maximize, ..cfg };
        let r = extremize_ase(&big, 2, &cfg).unwrap();
        assert!(r.value > 0.2);
    }

    #[test]
    fn sampled_objective_runs() {
        let big = HilbertSpec::qudit(3).unwrap();
        let cfg = OptimizerConfig {
            restarts: 2,
            max_iters: 30,
            objective: Objective::MonteCarlo { samples: 40, seed: 1 },
            ..Default::default()
        };
        let r = extremize_ase(&big, 2, &cfg).unwrap();
        assert!(r.value >= 0.0 && r.value < 1.0);
    }

    #[test]
    fn config_validation_and_full_space() {
        let big = HilbertSpec::qudit(3).unwrap();
        let bad = OptimizerConfig { gradient_step: 0.1, ..Default::default() };
        assert!(extremize_ase(&big, 2, &bad).is_err());
        assert!(extremize_ase(&big, 4, &OptimizerConfig::default()).is_err());
        for direction in [Direction::Minimize, Direction::Maximize] {
            let cfg = OptimizerConfig { restarts: 2, direction, ..Default::default() };
            let r = extremize_ase(&big, 3, &cfg).unwrap();
            assert!((r.value - 0.4).abs() < 1e-9);
        }
    }

    #[test]
    fn canonical_params() {
        let big = HilbertSpec::qudit(5).unwrap();
        let mut p = vec![0.0; 2 * 5 * 2];
        p[0] = 1.0;
        p[2 * (2 + 1)] = 1.0;
        let e = embedding_from_params(&big, 2, &p).unwrap();
        let id = DMatrix::<Complex64>::identity(5, 2);
        assert!((e.columns() - id).norm() < 1e-14);
    }

    #[test]
    fn finite_difference_consistency() {
        let big = HilbertSpec::qudit(4).unwrap();
        let eval = CompressedEvaluator::new(&big).unwrap();
        let f = |x: &[f64]| eval.average(embedding_from_params(&big, 2, x).unwrap().columns());
        let h = 1e-5;
        for i in 0..20u64 {
            let mut rng = stream_rng(31, i);
            let x: Vec<f64> = (0..16).map(|_| rng.sample(StandardNormal)).collect();
            let dir: Vec<f64> = (0..16).map(|_| rng.sample(StandardNormal)).collect();
            let along = |t: f64| f(&x.iter().zip(&dir).map(|(a, b)| a + t * b).collect::<Vec<_>>());
            let d1 = (along(h) - along(-h)) / (2.0 * h);
            let d2 = (along(h / 2.0) - along(-h / 2.0)) / h;
            assert!((d1 - d2).abs() <= 0.05 * d1.abs().max(1e-6), "{d1} vs {d2}");
        }
    }

    #[test]
    fn sweep_csv() {
        let big = HilbertSpec::qudit(3).unwrap();
        let cfg = OptimizerConfig { restarts: 2, ..Default::default() };
        let rep = extremal_sweep(&big, &[1, 2, 3], &cfg).unwrap();
        assert_eq!(rep.rows.len(), 3);
        assert!(rep.rows[0].min_ase.abs() < 1e-6);
        assert!((rep.rows[2].min_ase - rep.rows[2].max_ase).abs() < 1e-9);
        let csv = rep.to_csv();
        assert!(csv.starts_with("d_S,min_ase,max_ase,intrinsic_small,intrinsic_big\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
