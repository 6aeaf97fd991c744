//! Conditional independence queries and the palindromic Ising predicate.

use crate::error::{Error, Result};
use crate::params::{lambda_from_pi, ProbabilityTable};
use crate::symmetry::is_palindromic;
use crate::tensor::{marginalize, project_index, Subset};

/// Strata of `given`, each as the marginal table of `vars` within it (unnormalized),
/// in the cell order of `given`.
fn strata(t: &ProbabilityTable, vars: Subset, given: Subset) -> Vec<Vec<f64>> {
    let joint = marginalize(t.values(), vars.union(given).mask());
    let both = vars.union(given).mask();
    let pos_vars = project_index(vars.mask(), both);
    let pos_given = project_index(given.mask(), both);
    let mut out = vec![vec![0.0; 1 << vars.len()]; 1 << given.len()];
    for (k, p) in joint.iter().enumerate() {
        out[project_index(k, pos_given)][project_index(k, pos_vars)] += p;
    }
    out
}

fn check_sets(t: &ProbabilityTable, sets: &[Subset]) -> Result<()> {
    let full = Subset::full(t.dim());
    for (i, s) in sets.iter().enumerate() {
        if !s.is_subset_of(full) {
            return Err(Error::InvalidArgument(format!("{s} is not a subset of the {} variables", t.dim())));
        }
        if sets[..i].iter().any(|o| o.intersects(*s)) {
            return Err(Error::InvalidArgument("variable sets must be disjoint".into()));
        }
    }
    Ok(())
}

/// True iff `A ⊥ B | C`: in every stratum of `C`,
/// `|p(a_A a_B | c) − p(a_A | c) p(a_B | c)| ≤ tol`.
pub fn check_ci(t: &ProbabilityTable, a: Subset, b: Subset, c: Subset, tol: f64) -> Result<bool> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("A and B must be nonempty".into()));
    }
    check_sets(t, &[a, b, c])?;
    let ab = a.union(b);
    let pos_a = project_index(a.mask(), ab.mask());
    let pos_b = project_index(b.mask(), ab.mask());
    for stratum in strata(t, ab, c) {
        let total: f64 = stratum.iter().sum();
        if total <= 0.0 {
            continue;
        }
        let cond: Vec<f64> = stratum.iter().map(|p| p / total).collect();
        let pa = marginalize(&cond, pos_a);
        let pb = marginalize(&cond, pos_b);
        for (k, p) in cond.iter().enumerate() {
            if (p - pa[project_index(k, pos_a)] * pb[project_index(k, pos_b)]).abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn pair_strata(t: &ProbabilityTable, i: usize, j: usize, c: Subset) -> Result<Vec<[f64; 4]>> {
    if i == j || i == 0 || j == 0 {
        return Err(Error::InvalidArgument(format!("need two distinct variables, got {i} and {j}")));
    }
    check_sets(t, &[Subset::from_vars(&[i]), Subset::from_vars(&[j]), c])?;
    // order the pair so that cell bit 0 is variable i
    let (lo, hi) = (i.min(j), i.max(j));
    let swap = i > j;
    Ok(strata(t, Subset::from_vars(&[lo, hi]), c)
        .into_iter()
        .map(|s| if swap { [s[0], s[2], s[1], s[3]] } else { [s[0], s[1], s[2], s[3]] })
        .collect())
}

/// `log{p00 p11 / (p01 p10)}` of `(A_i, A_j)` within each stratum of `C`.
pub fn conditional_log_odds_ratios(t: &ProbabilityTable, i: usize, j: usize, c: Subset) -> Result<Vec<f64>> {
    Ok(pair_strata(t, i, j, c)?
        .into_iter()
        .map(|p| (p[0] * p[3] / (p[1] * p[2])).ln())
        .collect())
}

/// Correlation of `A_i` and `A_j` within each stratum of `C`.
pub fn conditional_correlations(t: &ProbabilityTable, i: usize, j: usize, c: Subset) -> Result<Vec<f64>> {
    Ok(pair_strata(t, i, j, c)?
        .into_iter()
        .map(|p| {
            let n: f64 = p.iter().sum();
            let (r0, r1) = (p[0] + p[2], p[1] + p[3]);
            let (c0, c1) = (p[0] + p[1], p[2] + p[3]);
            (p[0] * p[3] - p[1] * p[2]) / (r0 * r1 * c0 * c1).sqrt() * (n / n)
        })
        .collect())
}

/// `P(event | given)`, each given as `(variable, level)` pairs.
pub fn conditional_probability(t: &ProbabilityTable, event: &[(usize, u8)], given: &[(usize, u8)]) -> Result<f64> {
    let d = t.dim();
    let pattern = |spec: &[(usize, u8)]| -> Result<(usize, usize)> {
        let (mut mask, mut bits) = (0usize, 0usize);
        for &(v, level) in spec {
            if v == 0 || v > d || level > 1 {
                return Err(Error::InvalidArgument(format!("bad condition A{v} = {level}")));
            }
            let bit = 1 << (v - 1);
            if mask & bit != 0 && (bits & bit != 0) != (level == 1) {
                return Ok((usize::MAX, 0));
            }
            mask |= bit;
            if level == 1 {
                bits |= bit;
            }
        }
        Ok((mask, bits))
    };
    let (gm, gb) = pattern(given)?;
    let (em, eb) = pattern(event)?;
    let (jm, jb) = if gm == usize::MAX || em == usize::MAX || (gm & em & (gb ^ eb)) != 0 {
        (usize::MAX, 0)
    } else {
        (gm | em, gb | eb)
    };
    let mass = |mask: usize, bits: usize| -> f64 {
        if mask == usize::MAX {
            return 0.0;
        }
        t.values().iter().enumerate().filter(|(k, _)| k & mask == bits).map(|(_, p)| p).sum()
    };
    let den = mass(gm, gb);
    if den <= 0.0 {
        return Err(Error::Domain("conditioning event has probability zero".into()));
    }
    Ok(mass(jm, jb) / den)
}

/// Palindromic with no log-linear interaction of order three or more.
pub fn is_palindromic_ising(t: &ProbabilityTable, tol: f64) -> bool {
    is_palindromic(t, tol) && lambda_from_pi(t).iter().all(|(b, x)| b.len() < 3 || x.abs() <= tol)
}
