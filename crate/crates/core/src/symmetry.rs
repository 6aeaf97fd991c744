//! Central symmetry (`p(a) = p(∼a)`): predicates, the closed-form MLE and Wilks' test.

use crate::error::{Error, Result};
use crate::params::{lambda_from_pi, xi_from_pi, CountTable, ParamKind, ParamVector, ProbabilityTable};
use crate::tensor::transform;

/// Default tolerance for exactness predicates on probabilities.
pub const DEFAULT_TOL: f64 = 1e-9;

/// True iff `|p(a) − p(∼a)| ≤ tol` for every cell.
pub fn is_palindromic(t: &ProbabilityTable, tol: f64) -> bool {
    let full = t.len() - 1;
    t.values().iter().enumerate().all(|(k, &p)| (p - t.prob(k ^ full)).abs() <= tol)
}

/// True iff every odd-order moment `ξ_b` is within `tol` of zero.
pub fn odd_moments_vanish(t: &ProbabilityTable, tol: f64) -> bool {
    xi_from_pi(t).max_abs_odd() <= tol
}

/// True iff every odd-order log-linear parameter `λ_b` is within `tol` of zero.
pub fn odd_log_linear_vanish(t: &ProbabilityTable, tol: f64) -> bool {
    lambda_from_pi(t).max_abs_odd() <= tol
}

/// The table with every cell replaced by its complement: `out[k] = t[∼k]`.
pub fn reverse_complement(t: &ProbabilityTable) -> ProbabilityTable {
    let mut v = t.values().to_vec();
    v.reverse();
    ProbabilityTable::from_normalized(t.dim(), v)
}

/// Maximum likelihood fit of the saturated palindromic model.
#[derive(Debug, Clone, PartialEq)]
pub struct PalindromicFit {
    /// Complement-pair averages `n̂(a) = {n(a) + n(∼a)}/2`.
    pub fitted: CountTable,
    /// `p̂(a) = n̂(a)/n`; `None` when a complement pair is empty in both cells.
    pub p_hat: Option<ProbabilityTable>,
    pub wilks: f64,
    pub df: usize,
    /// Odd entries exactly zero, even entries the observed moment statistics.
    pub xi_hat: ParamVector,
}

/// Averages each cell with its complement.
pub fn symmetrize(c: &CountTable) -> Result<PalindromicFit> {
    if c.total() <= 0.0 {
        return Err(Error::EmptyData);
    }
    let n = c.total();
    let counts = c.counts();
    let full = counts.len() - 1;
    let fitted: Vec<f64> = (0..counts.len()).map(|k| 0.5 * (counts[k] + counts[k ^ full])).collect();
    let p_hat = ProbabilityTable::new(c.dim(), fitted.clone()).ok();

    let mut xi = transform(counts);
    for (b, x) in xi.iter_mut().enumerate() {
        *x = if b.count_ones() % 2 == 1 { 0.0 } else { *x / n };
    }
    xi[0] = 1.0;
    let (wilks, df) = wilks_palindromic(c)?;
    Ok(PalindromicFit {
        fitted: CountTable::new(c.dim(), fitted)?,
        p_hat,
        wilks,
        df,
        xi_hat: ParamVector::new(c.dim(), ParamKind::Moment, xi)?,
    })
}

/// `w = 2 Σ n(a) log{2 n(a) / (n(a) + n(∼a))}` on `2^{d-1}` degrees of freedom.
/// Empty cells contribute zero.
pub fn wilks_palindromic(c: &CountTable) -> Result<(f64, usize)> {
    if c.total() <= 0.0 {
        return Err(Error::EmptyData);
    }
    let counts = c.counts();
    let full = counts.len() - 1;
    let w = 2.0
        * counts
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0.0)
            .map(|(k, &x)| x * (2.0 * x / (x + counts[k ^ full])).ln())
            .sum::<f64>();
    Ok((w, counts.len() / 2))
}
