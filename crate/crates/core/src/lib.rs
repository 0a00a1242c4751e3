pub mod error;
pub mod fock;
pub mod harness;
pub mod huygens;
pub mod linalg;
pub mod subspace;
pub mod net;
pub mod wigner;

pub use error::{ModlocError, Result};
