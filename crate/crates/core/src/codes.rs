//! Totally isotropic sets, stabilizer codespaces and their closed-form gaps.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::averages::{intrinsic_ase_dim, SubspaceProjector};
use crate::error::{Error, Result};
use crate::wh::{displacement, mul_indices, symplectic_form, tau_pow, Flavor, HilbertSpec, SymplecticIndex};

/// Largest index space scanned by [`a_set`].
pub const A_SET_SCAN_LIMIT: usize = 100_000_000;

/// Additive subgroup of `Z_d^{2n}` with pairwise vanishing symplectic form.
#[derive(Clone, Debug, PartialEq)]
pub struct IsotropicSet {
    spec: HilbertSpec,
    elements: Vec<SymplecticIndex>,
    generators: Vec<SymplecticIndex>,
}

impl IsotropicSet {
    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    /// Elements sorted by linear index; the zero index comes first.
    pub fn elements(&self) -> &[SymplecticIndex] {
        &self.elements
    }

    pub fn generators(&self) -> &[SymplecticIndex] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Codespace dimension `d^n / |S|`.
    pub fn small_dim(&self) -> usize {
        self.spec.dim() / self.elements.len()
    }

    pub fn contains(&self, a: &SymplecticIndex) -> bool {
        self.position(a).is_some()
    }

    fn position(&self, a: &SymplecticIndex) -> Option<usize> {
        let d = self.spec.d();
        let key = a.to_linear(d);
        self.elements.binary_search_by_key(&key, |e| e.to_linear(d)).ok()
    }
}

/// Additive character exponent `f : S -> Z_d`, stored per element of `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct Homomorphism {
    values: Vec<u32>,
}

impl Homomorphism {
    pub fn trivial(set: &IsotropicSet) -> Self {
        Self {
            values: vec![0; set.len()],
        }
    }

    /// Validate an explicit table of values, one per element of `set`.
    pub fn new(set: &IsotropicSet, values: Vec<u32>) -> Result<Self> {
        let d = set.spec.d();
        if values.len() != set.len() {
            return Err(Error::Domain(format!(
                "{} homomorphism values for {} elements",
                values.len(),
                set.len()
            )));
        }
        let values: Vec<u32> = values.into_iter().map(|v| v % d as u32).collect();
        for (i, a) in set.elements.iter().enumerate() {
            for (j, b) in set.elements.iter().enumerate() {
                let k = set
                    .position(&a.add_mod(b, d))
                    .ok_or_else(|| Error::Internal("isotropic set not closed".into()))?;
                if (values[i] + values[j]) % d as u32 != values[k] {
                    return Err(Error::Domain("values are not additive".into()));
                }
            }
        }
        Ok(Self { values })
    }

    /// Extend values given on the generators of `set` additively.
    pub fn from_generator_values(set: &IsotropicSet, gen_values: &[u32]) -> Result<Self> {
        if gen_values.len() != set.generators.len() {
            return Err(Error::Domain(format!(
                "{} generator values for {} generators",
                gen_values.len(),
                set.generators.len()
            )));
        }
        let d = set.spec.d();
        let mut values: Vec<Option<u32>> = vec![None; set.len()];
        values[0] = Some(0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let vi = values[i].expect("queued entries carry a value");
            for (g, &gv) in set.generators.iter().zip(gen_values) {
                let next = set.elements[i].add_mod(g, d);
                let k = set.position(&next).ok_or_else(|| Error::Internal("isotropic set not closed".into()))?;
                let v = (vi + gv) % d as u32;
                match values[k] {
                    None => {
                        values[k] = Some(v);
                        queue.push_back(k);
                    }
                    Some(old) if old != v => {
                        return Err(Error::Domain("generator values are not consistent with the group".into()))
                    }
                    _ => {}
                }
            }
        }
        let values = values
            .into_iter()
            .map(|v| v.ok_or_else(|| Error::Internal("element not reached from generators".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values })
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }
}

fn check_index(spec: &HilbertSpec, a: &SymplecticIndex) -> Result<()> {
    if a.n() != spec.n() || a.components().iter().any(|&c| c as usize >= spec.d()) {
        return Err(Error::Domain(format!("index {:?} does not fit {}^{}", a.components(), spec.d(), spec.n())));
    }
    Ok(())
}

/// Close `gens` under addition mod `d`.
pub fn isotropic_from_generators(spec: &HilbertSpec, gens: &[SymplecticIndex]) -> Result<IsotropicSet> {
    let d = spec.d();
    for g in gens {
        check_index(spec, g)?;
    }
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i..] {
            if symplectic_form(a, b, d)? as usize % d != 0 {
                return Err(Error::Isotropy(format!(
                    "[{:?}, {:?}] is nonzero mod {d}",
                    a.components(),
                    b.components()
                )));
            }
        }
    }
    let limit = spec.dim();
    let zero = SymplecticIndex::zero(spec.n());
    let mut seen: HashSet<usize> = HashSet::from([zero.to_linear(d)]);
    let mut elements = vec![zero];
    let mut cursor = 0;
    while cursor < elements.len() {
        for g in gens {
            let next = elements[cursor].add_mod(g, d);
            if seen.insert(next.to_linear(d)) {
                elements.push(next);
                if elements.len() > limit {
                    return Err(Error::Size(format!("closure exceeds d^n = {limit} elements")));
                }
            }
        }
        cursor += 1;
    }
    if limit % elements.len() != 0 {
        return Err(Error::Internal(format!("|S| = {} does not divide {limit}", elements.len())));
    }
    elements.sort_by_key(|e| e.to_linear(d));
    Ok(IsotropicSet {
        spec: *spec,
        elements,
        generators: gens.to_vec(),
    })
}

/// Phases `kappa(a)` (powers of `tau`) such that `{tau^kappa(a) D_a}` is a
/// group, generated from the generators with trivial phase. Errors if the
/// generated group contains a nontrivial scalar.
pub fn group_phases(set: &IsotropicSet) -> Result<Vec<u32>> {
    let d = set.spec.d();
    // tau has order d for odd d and 2d for even d.
    let order = if d % 2 == 1 { d as u32 } else { 2 * d as u32 };
    let mut kappa: Vec<Option<u32>> = vec![None; set.len()];
    kappa[0] = Some(0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let ki = kappa[i].expect("queued entries carry a phase");
        for g in &set.generators {
            let (e, c) = mul_indices(&set.elements[i], g, d)?;
            let k = set.position(&c).ok_or_else(|| Error::Internal("isotropic set not closed".into()))?;
            let v = (ki + e.value()) % order;
            match kappa[k] {
                None => {
                    kappa[k] = Some(v);
                    queue.push_back(k);
                }
                Some(old) if old != v => {
                    return Err(Error::PhaseConsistency(format!(
                        "generated operator group contains the scalar tau^{}",
                        (v + order - old) % order
                    )))
                }
                _ => {}
            }
        }
    }
    kappa
        .into_iter()
        .map(|v| v.ok_or_else(|| Error::Internal("element not reached from generators".into())))
        .collect()
}

/// `Pi = (1/|S|) sum_a omega^{f(a)} tau^{kappa(a)} D_a` with `kappa` from
/// [`group_phases`]; `kappa` vanishes identically for odd `d`.
pub fn codespace_projector(set: &IsotropicSet, f: &Homomorphism) -> Result<SubspaceProjector> {
    let spec = set.spec;
    let d = spec.d();
    if f.values.len() != set.len() {
        return Err(Error::Domain("homomorphism does not match the set".into()));
    }
    let kappa = group_phases(set)?;
    let dim = spec.dim();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let scale = 1.0 / set.len() as f64;
    for ((a, &k), &fv) in set.elements.iter().zip(&kappa).zip(&f.values) {
        let coeff = tau_pow(k as i64 + 2 * fv as i64, d) * scale;
        let op = displacement(&spec, a)?;
        for col in 0..dim {
            m[(op.perm()[col], col)] += coeff * op.phase(col);
        }
    }
    let proj = SubspaceProjector::new(spec, m).map_err(|e| Error::PhaseConsistency(e.to_string()))?;
    if proj.rank() != set.small_dim() {
        return Err(Error::PhaseConsistency(format!(
            "projector rank {} differs from d^n/|S| = {}",
            proj.rank(),
            set.small_dim()
        )));
    }
    Ok(proj)
}

fn all_indices(spec: &HilbertSpec) -> impl Iterator<Item = SymplecticIndex> + '_ {
    (0..spec.num_indices()).map(move |l| SymplecticIndex::from_linear(l, spec.d(), spec.n()))
}

fn commutes_with(set: &IsotropicSet, a: &SymplecticIndex) -> bool {
    let d = set.spec.d();
    let probe: &[SymplecticIndex] = if set.generators.is_empty() {
        &set.elements
    } else {
        &set.generators
    };
    probe
        .iter()
        .all(|b| symplectic_form(a, b, d).map(|v| v as usize % d == 0).unwrap_or(false))
}

/// Indices whose displacements commute with every element of `S`.
pub fn perp(set: &IsotropicSet) -> Result<Vec<SymplecticIndex>> {
    let spec = set.spec;
    if spec.num_indices() > A_SET_SCAN_LIMIT {
        return Err(Error::Size(format!("{} indices exceed the scan limit", spec.num_indices())));
    }
    let out: Vec<_> = all_indices(&spec).filter(|a| commutes_with(set, a)).collect();
    let expected = spec.dim() * set.small_dim();
    if out.len() != expected {
        return Err(Error::Internal(format!("|S^perp| = {} but d_B d_S = {expected}", out.len())));
    }
    Ok(out)
}

/// `A_S = {a in S^perp : 2a in S}`.
pub fn a_set(set: &IsotropicSet) -> Result<Vec<SymplecticIndex>> {
    let d = set.spec.d();
    Ok(perp(set)?
        .into_iter()
        .filter(|a| set.contains(&a.scale_mod(2, d)))
        .collect())
}

fn alpha_for(small_dim: usize, flavor: Flavor) -> Result<f64> {
    intrinsic_ase_dim(small_dim, flavor)?;
    Ok(match flavor {
        Flavor::OddQudit => 1.0,
        Flavor::EvenQudit => 4.0,
        Flavor::Multiqubit => (small_dim * small_dim) as f64,
    })
}

/// Gap for a codespace with trivial homomorphism, from `|A_S|`.
pub fn code_gap_closed_form(set: &IsotropicSet, f: &Homomorphism, small_flavor: Flavor) -> Result<f64> {
    if !f.is_trivial() {
        return Err(Error::Precondition("closed-form gap requires the trivial homomorphism".into()));
    }
    let ds = set.small_dim();
    let alpha = alpha_for(ds, small_flavor)?;
    let db = set.spec.dim() as f64;
    let a = a_set(set)?.len() as f64;
    let s = ds as f64;
    Ok((alpha * db - a * s) / (db * (s + 1.0) * (s + 2.0) * (s + 3.0)))
}

/// Sign of the codespace gap when it follows from structure alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapClass {
    Zero,
    Negative,
    Positive,
    Unknown,
}

/// Classify the gap sign without enumerating `A_S`.
pub fn classify_gap(set: &IsotropicSet, small_flavor: Flavor) -> (GapClass, String) {
    let d = set.spec.d();
    let ds = set.small_dim();
    if d % 2 == 1 {
        return (GapClass::Zero, "d odd: 2 is invertible, so A_S = S".into());
    }
    if d == 2 {
        return match small_flavor {
            Flavor::Multiqubit => (GapClass::Zero, "qubits: A_S = S^perp and alpha = d_S^2".into()),
            _ if ds <= 2 => (GapClass::Zero, "qubits with d_S <= 2: alpha = d_S^2".into()),
            _ => (GapClass::Negative, "qubits read as a single qudit: alpha = 4 < d_S^2".into()),
        };
    }
    let all_even = set.elements.iter().all(|e| e.components().iter().all(|&c| c % 2 == 0));
    if ds % 2 == 0 && all_even && small_flavor == Flavor::EvenQudit {
        return if set.spec.n() == 1 {
            (GapClass::Zero, "single even qudit with S in 2Z_d^2".into())
        } else {
            (GapClass::Negative, "even qudits with S in 2Z_d^{2n}, n > 1".into())
        };
    }
    (GapClass::Unknown, "no structural criterion applies; enumerate A_S".into())
}

/// The `Z_d` gauge constraint `S = {(x, 0, ..., x, 0)}`.
pub fn zd_gauge_set(d: usize, n: usize) -> Result<IsotropicSet> {
    if n < 2 {
        return Err(Error::Domain("gauge set needs at least two qudits".into()));
    }
    let spec = HilbertSpec::multiqudit(d, n)?;
    let gen: Vec<u32> = (0..n).flat_map(|_| [1, 0]).collect();
    isotropic_from_generators(&spec, &[SymplecticIndex::new(gen, d)?])
}

/// Named qubit codes: `"422"` and its `"412"` subcode.
pub fn builtin_codes() -> BTreeMap<&'static str, IsotropicSet> {
    let spec = HilbertSpec::qubits(4).expect("4 qubits is a valid space");
    let idx = |v: [u32; 8]| SymplecticIndex::new(v.to_vec(), 2).expect("binary index");
    let xxxx = idx([1, 0, 1, 0, 1, 0, 1, 0]);
    let zzzz = idx([0, 1, 0, 1, 0, 1, 0, 1]);
    let zz_first = idx([0, 1, 0, 1, 0, 0, 0, 0]);
    let mut out = BTreeMap::new();
    out.insert(
        "422",
        isotropic_from_generators(&spec, &[xxxx.clone(), zzzz.clone()]).expect("[[4,2,2]] is isotropic"),
    );
    out.insert(
        "412",
        isotropic_from_generators(&spec, &[xxxx, zzzz, zz_first]).expect("[[4,1,2]] is isotropic"),
    );
    out
}

/// Draw a random isotropic set by greedily accepting random generators that
/// keep the closure isotropic and no larger than `d^n`.
pub fn random_isotropic_set<R: Rng + ?Sized>(spec: &HilbertSpec, attempts: usize, rng: &mut R) -> Result<IsotropicSet> {
    let d = spec.d();
    let mut set = isotropic_from_generators(spec, &[])?;
    let mut gens: Vec<SymplecticIndex> = Vec::new();
    for _ in 0..attempts {
        let cand = SymplecticIndex::from_linear(rng.random_range(0..spec.num_indices()), d, spec.n());
        if cand.is_zero() || set.contains(&cand) || !commutes_with(&set, &cand) {
            continue;
        }
        if symplectic_form(&cand, &cand, d)? as usize % d != 0 {
            continue;
        }
        let mut trial = gens.clone();
        trial.push(cand);
        match isotropic_from_generators(spec, &trial) {
            Ok(s) => {
                gens = trial;
                set = s;
            }
            Err(Error::Size(_)) | Err(Error::Internal(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(set)
}

/// Group the elements of `set` by the values of `f`, for inspection.
pub fn homomorphism_table(set: &IsotropicSet, f: &Homomorphism) -> HashMap<Vec<u32>, u32> {
    set.elements
        .iter()
        .zip(&f.values)
        .map(|(e, &v)| (e.components().to_vec(), v))
        .collect()
}
