//! Palindromic tables generated by linear triangular systems.
//!
//! Variable 1 is a fair coin and each later variable follows
//! `P(A_s = a_s | a_1 … a_{s-1}) = ½(1 + Σ_{j<s} β_sj (−1)^{a_s + a_j})`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{CountTable, ParamKind, ParamVector, ProbabilityTable};
use crate::tensor::check_dim;

/// Strictly lower-triangular coefficients, stored as ragged rows:
/// row `s` (1-based) holds `β_s1 … β_s,s−1`, so the first row is empty.
///
/// JSON form: `{"d": 3, "beta": [[], [0.5], [0.2, -0.3]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct TriangularSystem {
    d: usize,
    beta: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    d: usize,
    beta: Vec<Vec<f64>>,
}

impl TryFrom<RawSystem> for TriangularSystem {
    type Error = Error;

    fn try_from(raw: RawSystem) -> Result<Self> {
        TriangularSystem::new(raw.d, raw.beta)
    }
}

impl From<TriangularSystem> for RawSystem {
    fn from(s: TriangularSystem) -> Self {
        RawSystem { d: s.d, beta: s.beta }
    }
}

impl TriangularSystem {
    /// Validates the shape and the row condition `Σ_j |β_sj| < 1`.
    pub fn new(d: usize, beta: Vec<Vec<f64>>) -> Result<Self> {
        let sys = TriangularSystem::unchecked(d, beta)?;
        for (s, row) in sys.beta.iter().enumerate() {
            let total: f64 = row.iter().map(|b| b.abs()).sum();
            if total >= 1.0 {
                return Err(Error::Infeasible(format!(
                    "row {} has Σ|β| = {total}, conditional probabilities leave (0, 1)",
                    s + 1
                )));
            }
        }
        Ok(sys)
    }

    /// Accepts any coefficients for which every history gives a conditional
    /// probability inside `(0, 1)`, checked history by history.
    pub fn new_strict(d: usize, beta: Vec<Vec<f64>>) -> Result<Self> {
        let sys = TriangularSystem::unchecked(d, beta)?;
        sys.check_histories()?;
        Ok(sys)
    }

    fn unchecked(d: usize, beta: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(d)?;
        if beta.len() != d {
            return Err(Error::LengthMismatch { expected: d, found: beta.len() });
        }
        for (s, row) in beta.iter().enumerate() {
            if row.len() != s {
                return Err(Error::InvalidArgument(format!(
                    "row {} of beta must have {s} entries, found {}",
                    s + 1,
                    row.len()
                )));
            }
            if row.iter().any(|b| !b.is_finite()) {
                return Err(Error::InvalidArgument(format!("row {} of beta is not finite", s + 1)));
            }
        }
        Ok(TriangularSystem { d, beta })
    }

    /// All coefficients zero: the uniform distribution.
    pub fn independent(d: usize) -> Result<Self> {
        TriangularSystem::new(d, (0..d).map(|s| vec![0.0; s]).collect())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `β_sj` for `j < s`, 1-based.
    pub fn beta(&self, s: usize, j: usize) -> f64 {
        self.beta[s - 1][j - 1]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.beta
    }

    /// Enumerates every history of every row.
    pub fn check_histories(&self) -> Result<()> {
        for s in 1..self.d {
            for history in 0..1usize << s {
                for level in 0..2 {
                    let p = self.conditional(s, history, level);
                    if !(p > 0.0 && p < 1.0) {
                        return Err(Error::Infeasible(format!(
                            "variable {} has conditional probability {p} after history {history:b}",
                            s + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `P(A_{s+1} = level | history)` with `s` 0-based and history bits in cell order.
    fn conditional(&self, s: usize, history: usize, level: usize) -> f64 {
        let sum: f64 = self.beta[s]
            .iter()
            .enumerate()
            .map(|(j, b)| if (history >> j) & 1 == level { *b } else { -*b })
            .sum();
        0.5 * (1.0 + sum)
    }

    /// The generated table `p(a) = ½ Π_{s≥2} p(a_s | a_1 … a_{s−1})`.
    pub fn exact_table(&self) -> Result<ProbabilityTable> {
        let v = (0..1usize << self.d)
            .map(|k| (1..self.d).fold(0.5, |p, s| p * self.conditional(s, k & ((1 << s) - 1), (k >> s) & 1)))
            .collect();
        ProbabilityTable::with_floor(self.d, v, 0.0)
    }

    /// Moments built variable by variable: odd entries vanish, and for even `b ∋ s`
    /// with `s = max b`, `ξ_b = Σ_{j<s} β_sj ξ_{b △ {s, j}}`.
    pub fn xi_recursion(&self) -> ParamVector {
        let mut xi = vec![0.0; 1 << self.d];
        xi[0] = 1.0;
        for s in 1..self.d {
            let top = 1usize << s;
            for rest in 0..top {
                let b = top | rest;
                if b.count_ones() % 2 == 1 {
                    continue;
                }
                xi[b] = self.beta[s].iter().enumerate().map(|(j, beta)| beta * xi[rest ^ (1 << j)]).sum();
            }
        }
        ParamVector::new(self.d, ParamKind::Moment, xi).expect("moments of a feasible system")
    }

    /// `n` forward simulations of the system.
    pub fn sample(&self, n: usize, seed: u64) -> Result<CountTable> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = vec![0.0; 1 << self.d];
        for _ in 0..n {
            let mut k = usize::from(rng.random_bool(0.5));
            for s in 1..self.d {
                let p0 = self.conditional(s, k, 0);
                if rng.random::<f64>() >= p0 {
                    k |= 1 << s;
                }
            }
            counts[k] += 1.0;
        }
        CountTable::new(self.d, counts)
    }
}
