use serde_json::{json, Value};
use stabgap::averages::{extrinsic_ase_embedding, intrinsic_ase_dim};
use stabgap::encodings::{
    majorana_roots, roots_to_bloch, roots_to_product_state, separable_qubit_se, spin_zero_projector,
    symmetric_qubit_embedding, symmetrized_product, SpinState,
};
use stabgap::magic::{linear_se, renyi_se, robustness_lower_bound, se_upper_bound, st_norm, PureState};
use stabgap::{Complex64, Error, Flavor, HilbertSpec, Result};

/// Host dimensions above this are refused to keep the page responsive.
pub const MAX_DIM: usize = 729;

fn amplitudes(re: &[f64], im: &[f64]) -> Result<Vec<Complex64>> {
    if re.len() != im.len() {
        return Err(Error::Dimension(format!("{} real parts, {} imaginary parts", re.len(), im.len())));
    }
    Ok(re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect())
}

pub fn state_entropies(d: usize, n: usize, re: &[f64], im: &[f64]) -> Result<Value> {
    let spec = HilbertSpec::multiqudit(d, n)?;
    if spec.dim() > MAX_DIM {
        return Err(Error::Size(format!("dimension {} above {MAX_DIM}", spec.dim())));
    }
    let psi = PureState::normalized(amplitudes(re, im)?)?;
    let m = linear_se(&spec, &psi)?;
    Ok(json!({
        "flavor": spec.flavor().name(),
        "linear": m,
        "renyi2": renyi_se(&spec, &psi, 2.0)?,
        "renyi2_max": se_upper_bound(&spec, 2.0)?,
        "st_norm": st_norm(&spec, &psi)?,
        "robustness_lower_bound": robustness_lower_bound(m)?,
    }))
}

pub fn polyhedron_gap(faces: usize, two_j: u32) -> Result<Value> {
    if faces < 2 || two_j == 0 {
        return Err(Error::Domain("need at least 2 faces and positive spin".into()));
    }
    let host = (two_j as usize + 1).checked_pow(faces as u32).unwrap_or(usize::MAX);
    if host > MAX_DIM {
        return Err(Error::Size(format!("host dimension {host} above {MAX_DIM}")));
    }
    let emb = spin_zero_projector(&vec![two_j; faces])?.isometry()?;
    let ds = emb.small_dim();
    let ext = extrinsic_ase_embedding(&emb)?;
    let intrinsic = if ds == 1 { 0.0 } else { intrinsic_ase_dim(ds, Flavor::qudit_for(ds))? };
    Ok(json!({
        "host_dim": host,
        "d_small": ds,
        "extrinsic": ext,
        "intrinsic": intrinsic,
        "gap": ext - intrinsic,
    }))
}

pub fn majorana_stars(two_j: u32, re: &[f64], im: &[f64]) -> Result<Value> {
    if two_j == 0 || two_j > 8 {
        return Err(Error::Domain("spin must be between 1/2 and 4".into()));
    }
    let psi = SpinState::new(two_j, PureState::normalized(amplitudes(re, im)?)?.into_amplitudes())?;
    let stars = majorana_roots(&psi)?;
    let emb = symmetric_qubit_embedding(two_j)?;
    let encoded = emb.encode(psi.amplitudes())?;
    let rebuilt = symmetrized_product(&roots_to_product_state(&stars))?;
    let overlap: Complex64 = encoded.iter().zip(&rebuilt).map(|(a, b)| a.conj() * b).sum();
    let qubits = HilbertSpec::qubits(two_j as usize)?;
    let bloch: Vec<[f64; 3]> = stars.stars().iter().map(|&s| roots_to_bloch(s)).collect();
    Ok(json!({
        "stars": bloch,
        "symmetrized_se": linear_se(&qubits, &PureState::new(encoded)?)?,
        "separable_se": separable_qubit_se(&psi)?,
        "round_trip_fidelity": overlap.norm_sqr(),
    }))
}
