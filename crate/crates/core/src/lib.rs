//! Stabilizer entropies of pure states and average stabilizer-entropy gaps of
//! subspace embeddings over multiqudit Weyl-Heisenberg groups.

pub mod averages;
pub mod codes;
pub mod encodings;
pub mod error;
pub mod estimate;
pub mod io;
pub mod magic;
pub mod optimize;
pub mod wh;

mod par;

pub use averages::{Embedding, SubspaceProjector};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use magic::{CharFunction, PureState};
pub use wh::{Flavor, HilbertSpec, SymplecticIndex};
