//! Characteristic functions, Weyl-Heisenberg distributions and stabilizer
//! entropies of pure states.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::wh::{canonical_linear, Frame, HilbertSpec};

const NORM_TOL: f64 = 1e-10;
const NEGATIVE_CLAMP: f64 = 1e-10;

/// `chi_a = Tr(D_a^dag O) / D` over every reduced index.
#[derive(Clone, Debug)]
pub struct CharFunction {
    spec: HilbertSpec,
    values: Vec<Complex64>,
    rank: Option<usize>,
}

impl CharFunction {
    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Subspace dimension when built from a projector.
    pub fn rank(&self) -> Option<usize> {
        self.rank
    }

    pub(crate) fn with_rank(mut self, rank: usize) -> Self {
        self.rank = Some(rank);
        self
    }

    /// Value at an arbitrary integer index, folding in the even-d sign.
    pub fn eval_at(&self, raw: &[i64]) -> Complex64 {
        let (neg, lin) = canonical_linear(raw, self.spec.d());
        if neg {
            -self.values[lin]
        } else {
            self.values[lin]
        }
    }

    /// Linear indices whose value exceeds `tol` in magnitude.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| self.values[i].norm() > tol)
            .collect()
    }
}

/// Free-function form of [`CharFunction::eval_at`].
pub fn eval_char_at(cf: &CharFunction, raw: &[i64]) -> Complex64 {
    cf.eval_at(raw)
}

pub fn char_function(spec: &HilbertSpec, op: &DMatrix<Complex64>) -> Result<CharFunction> {
    let dim = spec.dim();
    if op.nrows() != dim || op.ncols() != dim {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, space has dimension {dim}",
            op.nrows(),
            op.ncols()
        )));
    }
    let frame = Frame::new(spec.d(), spec.n());
    let scale = 1.0 / dim as f64;
    let values = frame
        .coefficients_of_operator(op)
        .into_iter()
        .map(|v| v * scale)
        .collect();
    Ok(CharFunction {
        spec: *spec,
        values,
        rank: None,
    })
}

/// Unit-norm state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Precondition(format!("state norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescale to unit norm; rejects the zero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::Precondition("cannot normalize the zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        PureState { amplitudes }
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Reusable evaluator holding the index tables of one Hilbert space.
pub struct SeEvaluator {
    spec: HilbertSpec,
    frame: Frame,
}

impl SeEvaluator {
    pub fn new(spec: &HilbertSpec) -> Self {
        Self {
            spec: *spec,
            frame: Frame::new(spec.d(), spec.n()),
        }
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    fn check(&self, amplitudes: &[Complex64]) -> Result<()> {
        if amplitudes.len() != self.spec.dim() {
            return Err(Error::Dimension(format!(
                "state of length {} on a space of dimension {}",
                amplitudes.len(),
                self.spec.dim()
            )));
        }
        Ok(())
    }

    /// `|Tr(D_a^dag psi)|` for every index.
    pub fn abs_traces(&self, psi: &PureState) -> Result<Vec<f64>> {
        self.check(psi.amplitudes())?;
        Ok(self
            .frame
            .expectations_of_state(psi.amplitudes())
            .into_iter()
            .map(|v| v.norm())
            .collect())
    }

    pub fn distribution(&self, psi: &PureState) -> Result<Vec<f64>> {
        let inv = 1.0 / self.spec.dim() as f64;
        Ok(self
            .abs_traces(psi)?
            .into_iter()
            .map(|t| t * t * inv)
            .collect())
    }

    /// `1 - (1/D) sum_a |Tr(D_a^dag psi)|^4` on raw amplitudes (assumed unit norm).
    pub fn linear_se_raw(&self, amplitudes: &[Complex64]) -> Result<f64> {
        self.check(amplitudes)?;
        let sum: f64 = self
            .frame
            .expectations_of_state(amplitudes)
            .into_iter()
            .map(|v| v.norm_sqr() * v.norm_sqr())
            .sum();
        clamp_entropy(1.0 - sum / self.spec.dim() as f64)
    }

    pub fn linear_se(&self, psi: &PureState) -> Result<f64> {
        self.linear_se_raw(psi.amplitudes())
    }
}

fn clamp_entropy(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -NEGATIVE_CLAMP {
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!(
            "stabilizer entropy {v} is negative beyond tolerance"
        )))
    }
}

/// `P_a = |Tr(D_a^dag psi)|^2 / D`.
pub fn wh_distribution(spec: &HilbertSpec, psi: &PureState) -> Result<Vec<f64>> {
    let p = SeEvaluator::new(spec).distribution(psi)?;
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::Numerical(format!("distribution sums to {total}")));
    }
    Ok(p)
}

/// Stabilizer Renyi entropy of order `alpha` (natural log).
pub fn renyi_se(spec: &HilbertSpec, psi: &PureState, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("Renyi order {alpha} must be positive")));
    }
    if (alpha - 1.0).abs() < 1e-12 {
        return Err(Error::Unsupported("Renyi order 1 (Shannon limit)".into()));
    }
    let p = wh_distribution(spec, psi)?;
    let moment: f64 = p.iter().filter(|&&v| v > 0.0).map(|v| v.powf(alpha)).sum();
    clamp_entropy(moment.ln() / (1.0 - alpha) - (spec.dim() as f64).ln())
}

/// Linear (2-Tsallis) stabilizer entropy.
pub fn linear_se(spec: &HilbertSpec, psi: &PureState) -> Result<f64> {
    SeEvaluator::new(spec).linear_se(psi)
}

/// `(1/D) sum_a |Tr(D_a^dag psi)|`, which lower-bounds the robustness of magic.
pub fn st_norm(spec: &HilbertSpec, psi: &PureState) -> Result<f64> {
    let traces = SeEvaluator::new(spec).abs_traces(psi)?;
    Ok(traces.iter().sum::<f64>() / spec.dim() as f64)
}

/// `sqrt(1 / (1 - M))`, a lower bound on the robustness of magic.
pub fn robustness_lower_bound(linear: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&linear) {
        return Err(Error::Domain(format!(
            "linear stabilizer entropy {linear} outside [0, 1)"
        )));
    }
    Ok((1.0 / (1.0 - linear)).sqrt())
}

/// Maximum of the order-`alpha` Renyi entropy over all pure states.
pub fn se_upper_bound(spec: &HilbertSpec, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || (alpha - 1.0).abs() < 1e-12 {
        return Err(Error::Domain(format!("Renyi order {alpha} not supported")));
    }
    let dim = spec.dim() as f64;
    let inner = (1.0 + (dim - 1.0) * (dim + 1.0).powf(1.0 - alpha)) / dim;
    Ok(inner.ln() / (1.0 - alpha))
}
