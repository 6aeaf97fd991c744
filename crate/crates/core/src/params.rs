//! Probability tables and the log-linear (`λ`), moment (`ξ`) and
//! multivariate logistic (`η`) parameterizations.
//!
//! All three parameter vectors are indexed by subsets of the variables in
//! cell order. Conversions between `π`, `λ` and `ξ` are single Hadamard
//! transforms. `η_b` is the top-order effect-coded log-linear parameter of
//! the margin on `b`; its inverse has no closed form beyond `d = 2` and is
//! solved by damped Newton iteration in `λ`-space.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tensor::{check_dim, inverse_transform, marginalize, project_index, transform, Subset};

/// Smallest admissible cell probability.
pub const DEFAULT_FLOOR: f64 = 1e-12;

/// A strictly positive joint Bernoulli distribution in cell order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    d: usize,
    pi: Vec<f64>,
}

impl ProbabilityTable {
    /// Renormalizes `values` to sum 1 and rejects entries below [`DEFAULT_FLOOR`].
    pub fn new(d: usize, values: Vec<f64>) -> Result<Self> {
        Self::with_floor(d, values, DEFAULT_FLOOR)
    }

    pub fn with_floor(d: usize, mut values: Vec<f64>, floor: f64) -> Result<Self> {
        check_dim(d)?;
        if values.len() != 1 << d {
            return Err(Error::LengthMismatch { expected: 1 << d, found: values.len() });
        }
        if let Some((k, x)) = values.iter().enumerate().find(|(_, x)| !x.is_finite()) {
            return Err(Error::Domain(format!("cell {k} is not finite ({x})")));
        }
        let total: f64 = values.iter().sum();
        if total <= 0.0 {
            return Err(Error::Domain("probabilities sum to a nonpositive total".into()));
        }
        values.iter_mut().for_each(|x| *x /= total);
        if let Some((k, &x)) = values.iter().enumerate().find(|(_, &x)| x < floor) {
            return Err(Error::Domain(format!("cell {k} has probability {x:e} below the floor {floor:e}")));
        }
        Ok(ProbabilityTable { d, pi: values })
    }

    /// Wraps values already known to form a valid table.
    pub(crate) fn from_normalized(d: usize, pi: Vec<f64>) -> Self {
        debug_assert_eq!(pi.len(), 1 << d);
        ProbabilityTable { d, pi }
    }

    /// Infers `d` from the number of cells.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("length {n} is not 2^d with d ≥ 1")));
        }
        Self::new(n.trailing_zeros() as usize, values)
    }

    /// Relative frequencies of a count table. Fails on empty cells.
    pub fn from_counts(c: &CountTable) -> Result<Self> {
        if c.total() <= 0.0 {
            return Err(Error::EmptyData);
        }
        Self::new(c.dim(), c.counts().to_vec())
    }

    /// Uniform distribution on `2^d` cells.
    pub fn uniform(d: usize) -> Result<Self> {
        check_dim(d)?;
        Self::new(d, vec![1.0; 1 << d])
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[f64] {
        &self.pi
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn prob(&self, cell: usize) -> f64 {
        self.pi[cell]
    }
}

/// Observed or fitted cell counts. Zero cells are allowed; fitted counts may be fractional.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    d: usize,
    counts: Vec<f64>,
    n: f64,
}

impl CountTable {
    pub fn new(d: usize, counts: Vec<f64>) -> Result<Self> {
        check_dim(d)?;
        if counts.len() != 1 << d {
            return Err(Error::LengthMismatch { expected: 1 << d, found: counts.len() });
        }
        if let Some((k, x)) = counts.iter().enumerate().find(|(_, x)| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidArgument(format!("cell {k} has invalid count {x}")));
        }
        let n = counts.iter().sum();
        Ok(CountTable { d, counts, n })
    }

    pub fn from_values(counts: Vec<f64>) -> Result<Self> {
        let n = counts.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("length {n} is not 2^d with d ≥ 1")));
        }
        Self::new(n.trailing_zeros() as usize, counts)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn total(&self) -> f64 {
        self.n
    }

    pub fn count(&self, cell: usize) -> f64 {
        self.counts[cell]
    }

    /// Marginal counts over `m`, in first-fastest order over its variables.
    pub fn marginal(&self, m: Subset) -> Vec<f64> {
        marginalize(&self.counts, m.mask())
    }
}

/// Which of the three parameterizations a [`ParamVector`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamKind {
    LogLinear,
    Moment,
    MvLogistic,
}

impl ParamKind {
    pub fn name(self) -> &'static str {
        match self {
            ParamKind::LogLinear => "lambda",
            ParamKind::Moment => "xi",
            ParamKind::MvLogistic => "eta",
        }
    }
}

impl fmt::Display for ParamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParamKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lambda" | "loglinear" | "log-linear" => Ok(ParamKind::LogLinear),
            "xi" | "moment" | "linear" => Ok(ParamKind::Moment),
            "eta" | "mvlogistic" | "logistic" => Ok(ParamKind::MvLogistic),
            _ => Err(Error::InvalidArgument(format!("unknown parameterization {s:?}"))),
        }
    }
}

const MOMENT_SLACK: f64 = 1e-12;

/// Interaction parameters indexed by subsets of `{1..d}` in cell order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    d: usize,
    kind: ParamKind,
    values: Vec<f64>,
}

impl ParamVector {
    /// Moment vectors must have `ξ_∅ = 1` and entries in `[-1, 1]`.
    pub fn new(d: usize, kind: ParamKind, values: Vec<f64>) -> Result<Self> {
        check_dim(d)?;
        if values.len() != 1 << d {
            return Err(Error::LengthMismatch { expected: 1 << d, found: values.len() });
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("parameter vector has non-finite entries".into()));
        }
        if kind == ParamKind::Moment {
            if (values[0] - 1.0).abs() > MOMENT_SLACK {
                return Err(Error::Domain(format!("moment vector needs xi_{{}} = 1, found {}", values[0])));
            }
            if let Some((b, x)) = values.iter().enumerate().find(|(_, x)| x.abs() > 1.0 + MOMENT_SLACK) {
                return Err(Error::Domain(format!("moment xi_{} = {x} lies outside [-1, 1]", Subset(b))));
            }
        }
        Ok(ParamVector { d, kind, values })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> ParamKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, b: Subset) -> f64 {
        self.values[b.mask()]
    }

    /// `(subset, value)` pairs in cell order.
    pub fn iter(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        self.values.iter().enumerate().map(|(b, &x)| (Subset(b), x))
    }

    /// Largest `|θ_b|` over subsets of odd size.
    pub fn max_abs_odd(&self) -> f64 {
        self.iter().filter(|(b, _)| b.is_odd()).map(|(_, x)| x.abs()).fold(0.0, f64::max)
    }
}

/// `λ = H_d^{-1} log π`.
pub fn lambda_from_pi(t: &ProbabilityTable) -> ParamVector {
    let logs: Vec<f64> = t.pi.iter().map(|p| p.ln()).collect();
    ParamVector { d: t.d, kind: ParamKind::LogLinear, values: inverse_transform(&logs) }
}

/// `π = exp(H_d λ)`, renormalized. The supplied `λ_∅` is ignored.
pub fn pi_from_lambda(p: &ParamVector) -> Result<ProbabilityTable> {
    expect_kind(p, ParamKind::LogLinear)?;
    pi_from_log_linear(p.d, &p.values)
}

fn pi_from_log_linear(d: usize, lambda: &[f64]) -> Result<ProbabilityTable> {
    let mut lam = lambda.to_vec();
    lam[0] = 0.0;
    let mut logp = transform(&lam);
    let top = logp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Err(Error::Range("log-linear parameters produce non-finite log probabilities".into()));
    }
    logp.iter_mut().for_each(|x| *x = (*x - top).exp());
    let total: f64 = logp.iter().sum();
    let min = logp.iter().cloned().fold(f64::INFINITY, f64::min) / total;
    if min < DEFAULT_FLOOR {
        return Err(Error::Range(format!("log-linear parameters underflow a cell to {min:e}")));
    }
    ProbabilityTable::new(d, logp)
}

/// `ξ = H_d π`; `ξ_b` is the expectation of `Π_{v∈b} (-1)^{A_v}`.
pub fn xi_from_pi(t: &ProbabilityTable) -> ParamVector {
    let mut values = transform(&t.pi);
    values[0] = 1.0;
    ParamVector { d: t.d, kind: ParamKind::Moment, values }
}

/// `π = 2^{-d} H_d ξ`. Fails when `ξ` lies outside the moment body.
pub fn pi_from_xi(p: &ParamVector) -> Result<ProbabilityTable> {
    expect_kind(p, ParamKind::Moment)?;
    let pi = inverse_transform(&p.values);
    if let Some((cell, &value)) = pi.iter().enumerate().find(|(_, &x)| x < DEFAULT_FLOOR) {
        return Err(Error::InfeasibleMoment { cell, value });
    }
    ProbabilityTable::new(p.d, pi)
}

/// Marginal distribution of the variables in `m`, first-fastest over `m`.
pub fn marginal_table(t: &ProbabilityTable, m: Subset) -> Result<ProbabilityTable> {
    if m.is_empty() {
        return Err(Error::InvalidArgument("marginal over the empty set".into()));
    }
    if !m.is_subset_of(Subset::full(t.d)) {
        return Err(Error::InvalidArgument(format!("subset {m} not contained in 1..={}", t.d)));
    }
    ProbabilityTable::new(m.len(), marginalize(&t.pi, m.mask()))
}

/// Top-order effect-coded log-linear parameter of a `2^m` table.
fn top_interaction(q: &[f64]) -> f64 {
    let s: f64 = q
        .iter()
        .enumerate()
        .map(|(a, &x)| if a.count_ones() % 2 == 0 { x.ln() } else { -x.ln() })
        .sum();
    s / q.len() as f64
}

/// `η_b = λ^b_b` for each nonempty `b`; `η_∅` carries the joint `λ_∅`.
pub fn eta_from_pi(t: &ProbabilityTable) -> ParamVector {
    let n = t.pi.len();
    let mut values = vec![0.0; n];
    values[0] = t.pi.iter().map(|p| p.ln()).sum::<f64>() / n as f64;
    for (b, v) in values.iter_mut().enumerate().skip(1) {
        *v = top_interaction(&marginalize(&t.pi, b));
    }
    ParamVector { d: t.d, kind: ParamKind::MvLogistic, values }
}

/// Order in which the mixed-parameter steps `T_M` are applied: by decreasing
/// size, and within a size by decreasing cell index (`123, 23, 13, 12, 3, 2, 1`
/// for three variables).
pub fn stepwise_schedule(d: usize) -> Vec<Subset> {
    let mut order: Vec<Subset> = (1..1usize << d).map(Subset).collect();
    order.sort_by(|a, b| b.len().cmp(&a.len()).then(b.mask().cmp(&a.mask())));
    order
}

/// Computes `η` from `λ` by composing the mixed-parameter maps `T_M`.
///
/// `T_V` trades every `λ_b`, `b ≠ V`, for the moment `ξ_b` and keeps
/// `λ_V = η_V`. Each later `T_M` rebuilds the margin on `M` from the moments
/// `ξ_b, b ⊆ M` still present and replaces `ξ_M` by the top-order interaction
/// of that margin.
pub fn eta_via_stepwise(p: &ParamVector) -> Result<ParamVector> {
    expect_kind(p, ParamKind::LogLinear)?;
    let d = p.d;
    let full = (1usize << d) - 1;
    let mut kinds = vec![ParamKind::LogLinear; 1 << d];
    let mut state = p.values.clone();

    for m in stepwise_schedule(d) {
        let mask = m.mask();
        if mask == full {
            let joint = pi_from_log_linear(d, &p.values)?;
            let xi = transform(&joint.pi);
            for b in 0..full {
                state[b] = xi[b];
                kinds[b] = ParamKind::Moment;
            }
            state[full] = p.values[full];
            kinds[full] = ParamKind::MvLogistic;
            continue;
        }
        // moments of the margin on M, relabelled to |M| variables
        let mut sub = vec![0.0; 1 << m.len()];
        for b in (0..=mask).filter(|b| b & !mask == 0) {
            debug_assert_eq!(kinds[b], ParamKind::Moment);
            sub[project_index(b, mask)] = state[b];
        }
        sub[0] = 1.0;
        let q = inverse_transform(&sub);
        if q.iter().any(|&x| x <= 0.0) {
            return Err(Error::Range(format!("margin on {m} is not strictly positive")));
        }
        state[mask] = top_interaction(&q);
        kinds[mask] = ParamKind::MvLogistic;
    }
    state[0] = pi_from_log_linear(d, &p.values).map(|t| lambda_from_pi(&t).values[0])?;
    Ok(ParamVector { d, kind: ParamKind::MvLogistic, values: state })
}

/// Settings for [`pi_from_eta`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Convergence threshold on the sup-norm of the `η` residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Finite-difference step for the Jacobian.
    pub fd_step: f64,
    /// Central instead of forward differences.
    pub central: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-9, max_iter: 200, fd_step: 1e-6, central: false }
    }
}

/// Recovers `π` from `η`. Closed forms for `d ≤ 2`; damped Newton in `λ`-space otherwise.
///
/// `η_∅` is ignored. A vector outside the image of the multivariate logistic
/// map shows up as [`Error::Incompatible`] with the best residual reached.
pub fn pi_from_eta(p: &ParamVector, opts: SolverOptions) -> Result<ProbabilityTable> {
    expect_kind(p, ParamKind::MvLogistic)?;
    match p.d {
        1 => {
            let p0 = logistic(2.0 * p.values[1]);
            ProbabilityTable::new(1, vec![p0, 1.0 - p0])
        }
        2 => {
            let r = logistic(2.0 * p.values[1]);
            let c = logistic(2.0 * p.values[2]);
            let x = plackett_cell(r, c, (4.0 * p.values[3]).exp());
            ProbabilityTable::new(2, vec![x, c - x, r - x, 1.0 - r - c + x])
        }
        _ => newton_eta_inverse(p, opts),
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `P(A1=0, A2=0)` of the 2×2 table with `P(A1=0) = r`, `P(A2=0) = c` and odds ratio `psi`.
fn plackett_cell(r: f64, c: f64, psi: f64) -> f64 {
    if (psi - 1.0).abs() < 1e-12 {
        return r * c;
    }
    let s = 1.0 + (psi - 1.0) * (r + c);
    (s - (s * s - 4.0 * psi * (psi - 1.0) * r * c).sqrt()) / (2.0 * (psi - 1.0))
}

/// `η(π(λ)) − target`, both without the constant coordinate.
fn eta_residual(d: usize, lambda_free: &[f64], target: &[f64]) -> Option<Vec<f64>> {
    let mut lam = Vec::with_capacity(1 << d);
    lam.push(0.0);
    lam.extend_from_slice(lambda_free);
    let t = pi_from_log_linear(d, &lam).ok()?;
    let eta = eta_from_pi(&t);
    let r: Vec<f64> = eta.values[1..].iter().zip(target).map(|(e, g)| e - g).collect();
    r.iter().all(|x| x.is_finite()).then_some(r)
}

pub(crate) fn eta_jacobian(d: usize, x: &[f64], opts: &SolverOptions) -> Option<DMatrix<f64>> {
    let k = x.len();
    let zero = vec![0.0; k];
    let base = eta_residual(d, x, &zero)?;
    let mut jac = DMatrix::zeros(k, k);
    let mut probe = x.to_vec();
    for j in 0..k {
        let h = opts.fd_step;
        probe[j] = x[j] + h;
        let up = eta_residual(d, &probe, &zero)?;
        let col: Vec<f64> = if opts.central {
            probe[j] = x[j] - h;
            let down = eta_residual(d, &probe, &zero)?;
            up.iter().zip(&down).map(|(u, w)| (u - w) / (2.0 * h)).collect()
        } else {
            up.iter().zip(&base).map(|(u, b)| (u - b) / h).collect()
        };
        probe[j] = x[j];
        jac.set_column(j, &DVector::from_vec(col));
    }
    Some(jac)
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn newton_eta_inverse(p: &ParamVector, opts: SolverOptions) -> Result<ProbabilityTable> {
    let d = p.d;
    let target = &p.values[1..];
    let mut x = target.to_vec();
    let mut r = match eta_residual(d, &x, target) {
        Some(r) => r,
        None => {
            x = vec![0.0; target.len()];
            eta_residual(d, &x, target).expect("uniform table has finite eta")
        }
    };
    let mut best = sup_norm(&r);
    for iter in 0..opts.max_iter {
        if best <= opts.tol {
            let mut lam = vec![0.0];
            lam.extend_from_slice(&x);
            return pi_from_log_linear(d, &lam);
        }
        let incompatible = || Error::Incompatible { residual: best, iterations: iter };
        let jac = eta_jacobian(d, &x, &opts).ok_or_else(incompatible)?;
        let rhs = DVector::from_iterator(r.len(), r.iter().map(|v| -v));
        let step = jac.lu().solve(&rhs).ok_or_else(incompatible)?;

        let current = l2(&r);
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-10 {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + t * s).collect();
            if let Some(rt) = eta_residual(d, &trial, target) {
                if l2(&rt) < (1.0 - 1e-4 * t) * current || sup_norm(&rt) <= opts.tol {
                    accepted = Some((trial, rt));
                    break;
                }
            }
            t *= 0.5;
        }
        let (nx, nr) = accepted.ok_or_else(incompatible)?;
        x = nx;
        r = nr;
        best = best.min(sup_norm(&r));
    }
    if sup_norm(&r) <= opts.tol {
        let mut lam = vec![0.0];
        lam.extend_from_slice(&x);
        return pi_from_log_linear(d, &lam);
    }
    Err(Error::Incompatible { residual: best, iterations: opts.max_iter })
}

fn expect_kind(p: &ParamVector, kind: ParamKind) -> Result<()> {
    if p.kind != kind {
        return Err(Error::InvalidArgument(format!("expected {kind} parameters, got {}", p.kind)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reference() -> ProbabilityTable {
        fixtures::three_way_reference()
    }

    fn random_table(d: usize, rng: &mut impl Rng) -> ProbabilityTable {
        let v: Vec<f64> = (0..1 << d).map(|_| rng.random_range(0.05..1.0)).collect();
        ProbabilityTable::new(d, v).unwrap()
    }

    fn s(key: &str) -> Subset {
        key.parse().unwrap()
    }

    /// Oracle for λ: the defining sum `2^{-d} Σ_a (-1)^{a·b} log p(a)`.
    fn lambda_by_definition(t: &ProbabilityTable) -> Vec<f64> {
        let n = t.len();
        (0..n)
            .map(|b| {
                (0..n)
                    .map(|a| {
                        let sign = if (a & b).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                        sign * t.prob(a).ln()
                    })
                    .sum::<f64>()
                    / n as f64
            })
            .collect()
    }

    /// Oracle for η on a 2×2 margin: a quarter of the log odds ratio.
    fn quarter_log_odds(t: &ProbabilityTable, i: usize, j: usize) -> f64 {
        let mut q = [0.0; 4];
        for k in 0..t.len() {
            let a = (k >> (i - 1)) & 1;
            let b = (k >> (j - 1)) & 1;
            q[a + 2 * b] += t.prob(k);
        }
        0.25 * (q[0] * q[3] / (q[1] * q[2])).ln()
    }

    #[test]
    fn construction_checks() {
        assert!(ProbabilityTable::new(2, vec![0.5, 0.5, 0.0, 0.0]).is_err());
        assert!(ProbabilityTable::new(2, vec![1.0; 3]).is_err());
        let t = ProbabilityTable::new(2, vec![2.0, 2.0, 2.0, 2.0]).unwrap();
        assert_eq!(t.values(), &[0.25; 4]);
        assert!(CountTable::new(2, vec![1.0, -1.0, 0.0, 0.0]).is_err());
        let c = CountTable::new(2, vec![3.0, 0.0, 1.5, 0.5]).unwrap();
        assert_eq!(c.total(), 5.0);
        assert!(ParamVector::new(1, ParamKind::Moment, vec![0.9, 0.0]).is_err());
        assert!(ParamVector::new(1, ParamKind::Moment, vec![1.0, 1.5]).is_err());
    }

    #[test]
    fn reference_lambda() {
        let lam = lambda_from_pi(&reference());
        assert!((lam.get(s("12")) - 5f64.ln() / 2.0).abs() < 1e-12);
        // The λ_13, λ_23 entries are ∓log(3)/2.
        assert!((lam.get(s("13")) + 3f64.ln() / 2.0).abs() < 1e-12);
        assert!((lam.get(s("23")) - 3f64.ln() / 2.0).abs() < 1e-12);
        assert!(lam.max_abs_odd() < 1e-12);
        let oracle = lambda_by_definition(&reference());
        for (a, b) in lam.values().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_lambda_and_xi() {
        for d in 1..=5 {
            let u = ProbabilityTable::uniform(d).unwrap();
            let lam = lambda_from_pi(&u);
            assert!((lam.values()[0] + d as f64 * 2f64.ln()).abs() < 1e-12);
            assert!(lam.values()[1..].iter().all(|x| x.abs() < 1e-12));
            let xi = xi_from_pi(&u);
            assert_eq!(xi.values()[0], 1.0);
            assert!(xi.values()[1..].iter().all(|x| x.abs() < 1e-15));
            let eta = eta_from_pi(&u);
            assert!(eta.values()[1..].iter().all(|x| x.abs() < 1e-12));
        }
    }

    #[test]
    fn ci_given_third_lambda_and_xi() {
        let t = fixtures::ci_given_third();
        let lam = lambda_from_pi(&t);
        assert!((lam.get(s("13")) - 2f64.ln()).abs() < 1e-12);
        assert!((lam.get(s("23")) - 2f64.ln()).abs() < 1e-12);
        assert!(lam.get(s("12")).abs() < 1e-12);
        // constant term printed for counts: λ'_∅ = λ_∅ + log n
        assert!((lam.values()[0] + 100f64.ln() - 2.08).abs() < 0.005);
        let xi = xi_from_pi(&t);
        assert!((xi.get(s("12")) - 0.36).abs() < 1e-12);
        assert!((xi.get(s("13")) - 0.60).abs() < 1e-12);
        assert!((xi.get(s("23")) - 0.60).abs() < 1e-12);
    }

    #[test]
    fn reference_xi_and_inverse() {
        let xi = xi_from_pi(&reference());
        let expected = [1.0, 0.0, 0.0, 0.5, 0.0, -0.2, 0.2, 0.0];
        for (a, b) in xi.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let back = pi_from_xi(&xi).unwrap();
        for (a, b) in back.values().iter().zip(reference().values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn pi_from_xi_bivariate_form() {
        let x12 = 0.3;
        let xi = ParamVector::new(2, ParamKind::Moment, vec![1.0, 0.0, 0.0, x12]).unwrap();
        let t = pi_from_xi(&xi).unwrap();
        let expected = [(1.0 + x12) / 4.0, (1.0 - x12) / 4.0, (1.0 - x12) / 4.0, (1.0 + x12) / 4.0];
        for (a, b) in t.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let uni = ParamVector::new(3, ParamKind::Moment, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(pi_from_xi(&uni).unwrap(), ProbabilityTable::uniform(3).unwrap());
    }

    #[test]
    fn pi_from_xi_rejects_points_outside_the_body() {
        // ξ_12 = ξ_13 = 1, ξ_23 = -1 is not realizable
        let xi = ParamVector::new(3, ParamKind::Moment, vec![1.0, 0.0, 0.0, 1.0, 0.0, 1.0, -1.0, 0.0]).unwrap();
        assert!(matches!(pi_from_xi(&xi), Err(Error::InfeasibleMoment { .. })));
    }

    #[test]
    fn pi_from_lambda_round_trip_and_range() {
        let lam = lambda_from_pi(&reference());
        let back = pi_from_lambda(&lam).unwrap();
        for (a, b) in back.values().iter().zip(reference().values()) {
            assert!((a - b).abs() < 1e-10);
        }
        let mut only_const = vec![0.0; 8];
        only_const[0] = -3.0 * 2f64.ln();
        let u = pi_from_lambda(&ParamVector::new(3, ParamKind::LogLinear, only_const).unwrap()).unwrap();
        assert_eq!(u, ProbabilityTable::uniform(3).unwrap());
        let extreme = ParamVector::new(2, ParamKind::LogLinear, vec![0.0, 400.0, 0.0, 0.0]).unwrap();
        assert!(matches!(pi_from_lambda(&extreme), Err(Error::Range(_))));
        assert!(pi_from_lambda(&xi_from_pi(&reference())).is_err());
    }

    #[test]
    fn marginal_examples() {
        let m = marginal_table(&reference(), s("12")).unwrap();
        let expected = [30.0 / 80.0, 10.0 / 80.0, 10.0 / 80.0, 30.0 / 80.0];
        for (a, b) in m.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        for v in 1..=3 {
            let mv = marginal_table(&reference(), Subset::from_vars(&[v])).unwrap();
            assert!((mv.prob(0) - 0.5).abs() < 1e-15);
        }
        assert_eq!(marginal_table(&reference(), Subset::full(3)).unwrap(), reference());
        assert!(marginal_table(&reference(), Subset::EMPTY).is_err());
        assert!(marginal_table(&reference(), s("4")).is_err());
    }

    #[test]
    fn reference_eta() {
        let t = reference();
        let eta = eta_from_pi(&t);
        assert!((eta.get(s("12")) - 3f64.ln() / 2.0).abs() < 1e-12);
        // η_13 = ¼ log(16·16 / (24·24)) = -½ log(3/2)
        assert!((eta.get(s("13")) + 1.5f64.ln() / 2.0).abs() < 1e-12);
        assert!((eta.get(s("23")) - 1.5f64.ln() / 2.0).abs() < 1e-12);
        assert!(eta.max_abs_odd() < 1e-12);
        for (i, j, key) in [(1, 2, "12"), (1, 3, "13"), (2, 3, "23")] {
            assert!((eta.get(s(key)) - quarter_log_odds(&t, i, j)).abs() < 1e-12);
        }
    }

    #[test]
    fn univariate_eta() {
        let t = ProbabilityTable::new(1, vec![0.2, 0.8]).unwrap();
        let eta = eta_from_pi(&t);
        assert!((eta.values()[1] - (0.2f64.ln() - 0.8f64.ln()) / 2.0).abs() < 1e-15);
        let back = pi_from_eta(&eta, SolverOptions::default()).unwrap();
        assert!((back.prob(0) - 0.2).abs() < 1e-14);
    }

    #[test]
    fn schedule_matches_three_variable_sequence() {
        let keys: Vec<String> = stepwise_schedule(3).into_iter().map(|m| m.key()).collect();
        assert_eq!(keys, ["123", "23", "13", "12", "3", "2", "1"]);
    }

    #[test]
    fn stepwise_examples() {
        let eta = eta_via_stepwise(&lambda_from_pi(&reference())).unwrap();
        let direct = eta_from_pi(&reference());
        for b in 1..8 {
            assert!((eta.values()[b] - direct.values()[b]).abs() < 1e-12);
        }
        let zero = ParamVector::new(3, ParamKind::LogLinear, vec![0.0; 8]).unwrap();
        let eta0 = eta_via_stepwise(&zero).unwrap();
        assert!(eta0.values()[1..].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn eta_inverse_examples() {
        let opts = SolverOptions::default();
        let back = pi_from_eta(&eta_from_pi(&reference()), opts).unwrap();
        for (a, b) in back.values().iter().zip(reference().values()) {
            assert!((a - b).abs() < 1e-8);
        }
        let zero = ParamVector::new(4, ParamKind::MvLogistic, vec![0.0; 16]).unwrap();
        let u = pi_from_eta(&zero, opts).unwrap();
        assert!(u.values().iter().all(|p| (p - 1.0 / 16.0).abs() < 1e-12));

        // equicorrelated trivariate table: two-factor η = atanh ξ, rest zero
        let x = 0.4;
        let mut eta = vec![0.0; 8];
        for key in ["12", "13", "23"] {
            eta[s(key).mask()] = f64::atanh(x);
        }
        let t = pi_from_eta(&ParamVector::new(3, ParamKind::MvLogistic, eta).unwrap(), opts).unwrap();
        for (k, p) in t.values().iter().enumerate() {
            let expected = if k == 0 || k == 7 { 1.0 + 3.0 * x } else { 1.0 - x } / 8.0;
            assert!((p - expected).abs() < 1e-9, "cell {k}: {p} vs {expected}");
        }
    }

    #[test]
    fn bivariate_closed_form_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let t = random_table(2, &mut rng);
            let back = pi_from_eta(&eta_from_pi(&t), SolverOptions::default()).unwrap();
            for (a, b) in back.values().iter().zip(t.values()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn incompatible_eta_is_reported() {
        // Three strongly positive pairwise log odds ratios with a huge negative
        // three-way margin parameter: outside the image for d = 3.
        let mut eta = vec![0.0; 8];
        for key in ["12", "13", "23"] {
            eta[s(key).mask()] = 40.0;
        }
        eta[7] = -40.0;
        eta[1] = 30.0;
        let p = ParamVector::new(3, ParamKind::MvLogistic, eta).unwrap();
        let opts = SolverOptions { max_iter: 30, ..SolverOptions::default() };
        match pi_from_eta(&p, opts) {
            Err(Error::Incompatible { residual, .. }) => assert!(residual > opts.tol),
            other => panic!("expected incompatibility, got {other:?}"),
        }
    }

    #[test]
    fn eta_jacobian_is_nonsingular_at_interior_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 2..=4 {
            for _ in 0..5 {
                let lam = lambda_from_pi(&random_table(d, &mut rng));
                let opts = SolverOptions { central: true, ..SolverOptions::default() };
                let jac = eta_jacobian(d, &lam.values()[1..], &opts).unwrap();
                let sv = jac.singular_values();
                let cond = sv.max() / sv.min();
                assert!(sv.min() > 1e-6 && cond.is_finite() && cond < 1e6, "cond {cond}");
            }
        }
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let lam = lambda_from_pi(&reference());
        assert!(pi_from_xi(&lam).is_err());
        assert!(pi_from_eta(&lam, SolverOptions::default()).is_err());
        assert!(eta_via_stepwise(&xi_from_pi(&reference())).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn round_trips(d in 1usize..=6, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_table(d, &mut rng);
            let via_lambda = pi_from_lambda(&lambda_from_pi(&t)).unwrap();
            let via_xi = pi_from_xi(&xi_from_pi(&t)).unwrap();
            let via_eta = pi_from_eta(&eta_from_pi(&t), SolverOptions::default()).unwrap();
            for k in 0..t.len() {
                prop_assert!((via_lambda.prob(k) - t.prob(k)).abs() < 1e-9);
                prop_assert!((via_xi.prob(k) - t.prob(k)).abs() < 1e-9);
                prop_assert!((via_eta.prob(k) - t.prob(k)).abs() < 1e-9);
            }
        }

        #[test]
        fn moments_are_bounded_and_marginally_consistent(d in 2usize..=6, seed in any::<u64>(), mask in 1usize..64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_table(d, &mut rng);
            let xi = xi_from_pi(&t);
            prop_assert_eq!(xi.values()[0], 1.0);
            prop_assert!(xi.values().iter().all(|x| x.abs() <= 1.0 + 1e-15));
            let m = Subset(mask & ((1 << d) - 1));
            prop_assume!(!m.is_empty());
            let xm = xi_from_pi(&marginal_table(&t, m).unwrap());
            for b in (0..1usize << d).filter(|b| b & !m.mask() == 0) {
                prop_assert!((xm.values()[project_index(b, m.mask())] - xi.values()[b]).abs() < 1e-12);
            }
        }

        #[test]
        fn stepwise_agrees_with_marginal_route(d in 1usize..=5, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let lam: Vec<f64> = (0..1 << d).map(|b| if b == 0 { 0.0 } else { rng.random_range(-1.0..1.0) }).collect();
            let lam = ParamVector::new(d, ParamKind::LogLinear, lam).unwrap();
            let stepwise = eta_via_stepwise(&lam).unwrap();
            let direct = eta_from_pi(&pi_from_lambda(&lam).unwrap());
            for b in 1..1 << d {
                prop_assert!((stepwise.values()[b] - direct.values()[b]).abs() < 1e-9);
            }
        }

        #[test]
        fn small_lambda_perturbations_move_eta_a_little(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let lam = lambda_from_pi(&random_table(3, &mut rng));
            let mut bumped = lam.values().to_vec();
            for x in bumped.iter_mut().skip(1) {
                *x += rng.random_range(-1e-7..1e-7);
            }
            let bumped = ParamVector::new(3, ParamKind::LogLinear, bumped).unwrap();
            let e0 = eta_via_stepwise(&lam).unwrap();
            let e1 = eta_via_stepwise(&bumped).unwrap();
            for b in 1..8 {
                prop_assert!((e0.values()[b] - e1.values()[b]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn large_dimension_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for d in [7, 8] {
            let t = random_table(d, &mut rng);
            let back = pi_from_eta(&eta_from_pi(&t), SolverOptions::default()).unwrap();
            for k in 0..t.len() {
                assert!((back.prob(k) - t.prob(k)).abs() < 1e-9);
            }
        }
    }
}
