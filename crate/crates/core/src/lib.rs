//! Joint Bernoulli distributions on `2^d` cells.
//!
//! The crate covers three parameterizations of a binary table (log-linear
//! `λ`, moment `ξ` and multivariate logistic `η`) together with the
//! centrally symmetric ("palindromic") subfamily, where `p(a) = p(∼a)` for
//! every cell. On top of that sit closed-form maximum likelihood for the
//! palindromic family, concentration-graph models fitted to symmetrized
//! counts, and the median-dichotomization bridge to Gaussian correlations.
//!
//! Every table is a dense vector in lexicographic order with the **first**
//! variable running fastest: cell `k` decodes to `a_v = (k >> (v-1)) & 1`.
//! Interaction parameters are indexed the same way, cell `k` standing for the
//! subset of variables whose bits are set in `k`.

pub mod error;
pub mod fixtures;
pub mod gaussian;
pub mod generate;
pub mod graphs;
pub mod params;
pub mod symmetry;
pub mod tensor;

pub use error::{Error, Result};
pub use params::{CountTable, ParamKind, ParamVector, ProbabilityTable};
pub use tensor::{CellOrder, CellVector, Subset};
