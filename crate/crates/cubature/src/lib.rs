//! Cubature formulas and geometrical designs: construction, verification,
//! reduction and search, together with the lattice, q-series and
//! Markov-operator diagnostics that certify design strength.
//!
//! Module map:
//! - [`polyspaces`]: kernel polynomials Q/C/R, dimension formulas, Legendre
//!   and Newton-Cotes quadrature, sphere and Gaussian moment constants.
//! - [`pointsets`]: weighted point sets on spheres, structural predicates,
//!   inner-product profiles, text file I/O.
//! - [`verify`]: cubature strength (kernel and moment criteria), tightness,
//!   root-set diagnostics, the Banach embedding.
//! - [`constructions`]: the catalog of classical and identity-derived
//!   designs, products, Gaussian lifts, the biquadrate decomposition demo.
//! - [`lattices`]: integral lattices, shells, eutaxy/perfection tests, the
//!   index-2 neighbor construction with its rank-8 experiments.
//! - [`modforms`]: exact q-series (thetas, the discriminant form), the
//!   tau/mu/nu/kappa coefficient scans, harmonic theta series.
//! - [`markov`]: averaged representation operators on degree-k harmonic
//!   spaces of the 2-sphere, trace formulas, walk-moment comparisons.
//! - [`search`]: weight reduction (moment-preserving point dropping) and
//!   kernel-potential descent for finding approximate designs.
//! - [`acceptance`]: the end-to-end claim ledger exercised by both the
//!   integration tests and the `reproduce` CLI verb.

pub mod scalar;
pub mod combin;
pub mod mpoly;
pub mod linalg;
pub mod polyspaces;
pub mod pointsets;
pub mod verify;
pub mod constructions;
pub mod lattices;
pub mod modforms;
pub mod markov;
pub mod search;
pub mod acceptance;

use thiserror::Error;

/// Crate-wide error type. The CLI maps variants onto its exit-code contract
/// (usage errors 2, verification failures 1, budget guards 3).
#[derive(Debug, Error)]
pub enum CubatureError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("did not converge: {0}")]
    NonConvergence(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CubatureError>;

/// Budget cap used by combinatorially guarded routines (moment-criterion
/// coefficient counts, shell enumeration sizes, walk word counts).
/// Overridable through the CUBATURE_BUDGET environment variable.
pub fn budget_cap(default: usize) -> usize {
    std::env::var("CUBATURE_BUDGET")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(default)
}

// Concrete scalar aliases.
pub type Exact = scalar::Quad;
pub type Float = f64;

pub use scalar::Scalar;
