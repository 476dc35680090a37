//! JSON interchange for projectors, embeddings and isotropic sets.
//!
//! Complex entries are `[re, im]` pairs and matrices are row-major nested
//! arrays. Everything read from a file is re-validated.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::averages::{Embedding, SubspaceProjector};
use crate::codes::{isotropic_from_generators, Homomorphism, IsotropicSet};
use crate::error::{Error, Result};
use crate::wh::{Flavor, HilbertSpec, SymplecticIndex};

type Rows = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectorJson {
    pub d: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flavor: Option<String>,
    pub matrix: Rows,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmbeddingJson {
    pub d: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flavor: Option<String>,
    pub d_small: usize,
    /// `d^n` rows of `d_small` entries.
    pub columns: Rows,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsotropicJson {
    pub d: usize,
    pub n: usize,
    pub generators: Vec<Vec<u32>>,
    /// Values of the character on elements, keyed by comma-separated
    /// components. Every generator must be listed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homomorphism: Option<BTreeMap<String, u32>>,
}

fn spec_of(d: usize, n: usize, flavor: Option<&str>) -> Result<HilbertSpec> {
    match flavor {
        Some(f) => HilbertSpec::new(d, n, Flavor::parse(f)?),
        None => HilbertSpec::multiqudit(d, n),
    }
}

fn to_matrix(rows: &Rows, nrows: usize, ncols: usize, what: &str) -> Result<DMatrix<Complex64>> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Dimension(format!("{what} must be {nrows}x{ncols}")));
    }
    if rows.iter().flatten().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("{what} has non-finite entries")));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |r, c| Complex64::new(rows[r][c][0], rows[r][c][1])))
}

fn from_matrix(m: &DMatrix<Complex64>) -> Rows {
    m.row_iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect()
}

fn parse_key(key: &str, d: usize) -> Result<SymplecticIndex> {
    let comps = key
        .split(',')
        .map(|t| t.trim().parse::<u32>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::Domain(format!("bad homomorphism key {key:?}")))?;
    SymplecticIndex::new(comps, d)
}

fn index_key(a: &SymplecticIndex) -> String {
    a.components().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

impl ProjectorJson {
    pub fn from_projector(p: &SubspaceProjector) -> Self {
        Self {
            d: p.big().d(),
            n: p.big().n(),
            flavor: Some(p.big().flavor().name().to_string()),
            matrix: from_matrix(p.matrix()),
        }
    }

    pub fn validate(&self) -> Result<SubspaceProjector> {
        let spec = spec_of(self.d, self.n, self.flavor.as_deref())?;
        SubspaceProjector::new(spec, to_matrix(&self.matrix, spec.dim(), spec.dim(), "projector matrix")?)
    }
}

impl EmbeddingJson {
    pub fn from_embedding(e: &Embedding) -> Self {
        Self {
            d: e.big().d(),
            n: e.big().n(),
            flavor: Some(e.big().flavor().name().to_string()),
            d_small: e.small_dim(),
            columns: from_matrix(e.columns()),
        }
    }

    pub fn validate(&self) -> Result<Embedding> {
        let spec = spec_of(self.d, self.n, self.flavor.as_deref())?;
        Embedding::new(spec, to_matrix(&self.columns, spec.dim(), self.d_small, "embedding columns")?)
    }
}

impl IsotropicJson {
    pub fn from_set(set: &IsotropicSet, f: Option<&Homomorphism>) -> Self {
        let homomorphism = f.filter(|f| !f.is_trivial()).map(|f| {
            set.elements()
                .iter()
                .zip(f.values())
                .filter(|(a, _)| set.generators().contains(a))
                .map(|(a, &v)| (index_key(a), v))
                .collect()
        });
        Self {
            d: set.spec().d(),
            n: set.spec().n(),
            generators: set.generators().iter().map(|g| g.components().to_vec()).collect(),
            homomorphism,
        }
    }

    pub fn validate(&self) -> Result<(IsotropicSet, Homomorphism)> {
        let spec = HilbertSpec::multiqudit(self.d, self.n)?;
        let gens = self
            .generators
            .iter()
            .map(|g| {
                if g.len() != 2 * self.n {
                    return Err(Error::Dimension(format!("generator {g:?} needs {} components", 2 * self.n)));
                }
                SymplecticIndex::new(g.clone(), self.d)
            })
            .collect::<Result<Vec<_>>>()?;
        let set = isotropic_from_generators(&spec, &gens)?;
        let f = match &self.homomorphism {
            None => Homomorphism::trivial(&set),
            Some(map) => {
                let mut given = BTreeMap::new();
                for (k, &v) in map {
                    let a = parse_key(k, self.d)?;
                    if !set.contains(&a) {
                        return Err(Error::Domain(format!("homomorphism key {k} is not in the set")));
                    }
                    given.insert(a, v);
                }
                let gen_values = set
                    .generators()
                    .iter()
                    .map(|g| {
                        given
                            .get(g)
                            .copied()
                            .ok_or_else(|| Error::Domain(format!("homomorphism misses generator {}", index_key(g))))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let f = Homomorphism::from_generator_values(&set, &gen_values)?;
                for (a, &v) in &given {
                    let pos = set.elements().iter().position(|e| e == a).expect("membership checked");
                    if f.values()[pos] != v % self.d as u32 {
                        return Err(Error::Domain(format!("homomorphism value at {} is not additive", index_key(a))));
                    }
                }
                f
            }
        };
        Ok((set, f))
    }
}

fn read<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_projector(path: &Path) -> Result<SubspaceProjector> {
    read::<ProjectorJson>(path)?.validate()
}

pub fn load_embedding(path: &Path) -> Result<Embedding> {
    read::<EmbeddingJson>(path)?.validate()
}

pub fn load_isotropic(path: &Path) -> Result<(IsotropicSet, Homomorphism)> {
    read::<IsotropicJson>(path)?.validate()
}
