//! Reference tables and the grades data set used by the case study.
//!
//! Four-variable palindromic tables are stored as their first eight cells;
//! the rest follows from `p(a) = p(∼a)`.

use crate::params::{CountTable, ProbabilityTable};

/// Summed grades of 78 students (Analysis, Algebra, Geometry, Physics), with header row.
pub const GRADES_CSV: &str = include_str!("../data/grades.csv");

/// SHA-256 of [`GRADES_CSV`].
pub const GRADES_SHA256: &str = "c42e35b4d0a8db0dfdd568e81a1b2323045bdeeb674d0259aaea660eee1a212b";

/// Median-dichotomized grade counts, cell order `0000, 1000, …, 1111`.
pub const CASE_STUDY_COUNTS: [f64; 16] =
    [22.0, 3.0, 3.0, 0.0, 1.0, 0.0, 1.0, 9.0, 6.0, 2.0, 2.0, 1.0, 3.0, 2.0, 1.0, 22.0];

/// Edges of the well-fitting concentration graph for the grades.
pub const CASE_STUDY_EDGES: [(usize, usize); 4] = [(1, 2), (1, 3), (2, 3), (3, 4)];

/// Completes a palindromic table from its first half: cell `k + 2^{d-1}` is the
/// complement of cell `2^{d-1} - 1 - k`.
pub fn mirror(half: &[f64]) -> Vec<f64> {
    let mut out = half.to_vec();
    out.extend(half.iter().rev());
    out
}

fn table(values: Vec<f64>) -> ProbabilityTable {
    ProbabilityTable::from_values(values).expect("fixture tables are strictly positive")
}

pub fn case_study_counts() -> CountTable {
    CountTable::new(4, CASE_STUDY_COUNTS.to_vec()).expect("fixture counts are valid")
}

/// `80 π = (15, 9, 1, 15, 15, 1, 9, 15)`.
pub fn three_way_reference() -> ProbabilityTable {
    table(vec![15.0, 9.0, 1.0, 15.0, 15.0, 1.0, 9.0, 15.0])
}

/// `9200 π`, four-variable table with a four-factor log-linear term.
pub fn four_factor_interaction() -> ProbabilityTable {
    table(mirror(&[4095.0, 91.0, 91.0, 47.0, 91.0, 47.0, 47.0, 91.0]))
}

/// `100 π`: `A ⊥ B | O` but `A ⋔ B`.
pub fn ci_given_third() -> ProbabilityTable {
    table(vec![32.0, 8.0, 8.0, 2.0, 2.0, 8.0, 8.0, 32.0])
}

/// `400 π`: `A ⊥ B` but `A ⋔ B | O`.
pub fn marginal_independence() -> ProbabilityTable {
    table(vec![90.0, 60.0, 40.0, 10.0, 10.0, 40.0, 60.0, 90.0])
}

/// `400 π`: the pairwise dependence of `A, B` changes sign under marginalization.
pub fn sign_reversal() -> ProbabilityTable {
    table(vec![100.0, 50.0, 40.0, 10.0, 10.0, 40.0, 50.0, 100.0])
}

/// `880 π`: identity correlation matrix, yet dependent.
pub fn identity_correlation() -> ProbabilityTable {
    table(mirror(&[100.0, 10.0, 10.0, 100.0, 10.0, 100.0, 100.0, 10.0]))
}

/// `888 π`.
pub fn skewed_margins() -> ProbabilityTable {
    table(mirror(&[87.0, 24.0, 102.0, 9.0, 60.0, 51.0, 87.0, 24.0]))
}

/// The three chordless four-cycle Ising tables (`336 π`).
pub fn four_cycle_ising_counts() -> [CountTable; 3] {
    let rows: [[f64; 8]; 3] = [
        [75.0, 15.0, 15.0, 3.0, 15.0, 15.0, 15.0, 15.0],
        [3.0, 15.0, 15.0, 75.0, 15.0, 15.0, 15.0, 15.0],
        [35.0, 35.0, 7.0, 7.0, 7.0, 35.0, 7.0, 35.0],
    ];
    rows.map(|r| CountTable::new(4, mirror(&r)).expect("fixture counts are valid"))
}

pub fn four_cycle_ising() -> [ProbabilityTable; 3] {
    four_cycle_ising_counts().map(|c| ProbabilityTable::from_counts(&c).expect("positive"))
}
