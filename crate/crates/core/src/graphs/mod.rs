//! Concentration-graph Markov models over palindromic tables.
//!
//! [`graph`] holds the undirected graph with clique enumeration and the
//! chordality test, [`fit`] the closed-form and iterative fits to
//! symmetrized counts, and [`independence`] conditional-independence
//! queries and the Ising predicate.

pub mod fit;
pub mod graph;
pub mod independence;

pub use fit::{
    fit_decomposable, fit_graph, fit_ipf, model_df, studentized_lambda, wilks_model, FitMethod, IpfOptions,
    ModelFit, StudentizedTerm,
};
pub use graph::{cliques, decompose, CliqueDecomposition, Decomposition, Graph, GraphFile};
pub use independence::{
    check_ci, conditional_correlations, conditional_log_odds_ratios, conditional_probability,
    is_palindromic_ising,
};
