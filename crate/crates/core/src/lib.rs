//! Membership intervals, perpendicular supporting hyperplanes and
//! constructive separability certificates for one-parameter families
//! `X_λ = (1 − λ)ϱ* + λϱ` of bipartite Hermitian matrices.

pub mod decomposition;
pub mod error;
pub mod family;
pub mod intervals;
pub mod oracles;
pub mod random;
pub mod seesaw;
pub mod tensor;

pub use error::{Error, Result};
