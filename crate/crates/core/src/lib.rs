//! Certified spectral search for abelian lifts of regular graphs, with the
//! encoding and counting machinery behind the bounds and a small toolkit of
//! quantum code constructions on top of lifted graphs.

pub mod codes;
pub mod error;
pub mod graphs;
pub mod groups;
pub mod hikes;
pub mod pseudorandom;
pub mod search;
pub mod spectral;

pub use error::{Error, Result};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Hex SHA-256 of raw bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hex SHA-256 of the compact JSON serialization of `value`.
pub fn hash_json<T: Serialize>(value: &T) -> String {
    sha256_hex(&serde_json::to_vec(value).expect("serializable value"))
}
