//! Continuous data: correlations, partial correlations, median dichotomization
//! and the Gaussian fits behind the binary models.
//!
//! For a centred bivariate normal pair, median dichotomization gives binary
//! variables with `ξ = (2/π) arcsin ρ`.

use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graphs::{decompose, Decomposition, Graph};
use crate::params::{CountTable, ProbabilityTable};
use crate::tensor::{check_dim, Subset};

/// Smallest eigenvalue accepted for a positive definite correlation matrix.
pub const PD_TOL: f64 = 1e-10;

/// Jitter amplitude relative to the smallest gap between distinct values.
pub const JITTER_SCALE: f64 = 1e-3;

/// `n × d` observations, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 observations, got {n}")));
        }
        if d == 0 {
            return Err(Error::InvalidArgument("need at least one variable".into()));
        }
        if values.len() != n * d {
            return Err(Error::LengthMismatch { expected: n * d, found: values.len() });
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("data contain non-finite values".into()));
        }
        Ok(DataMatrix { n, d, values })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let d = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if let Some(c) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::LengthMismatch { expected: n, found: c.len() });
        }
        let values = (0..n).flat_map(|i| columns.iter().map(move |c| c[i])).collect();
        DataMatrix::new(n, d, values)
    }

    /// Comma-separated rows; a first line that does not parse as numbers is a header.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut width = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
            let row = match parsed {
                Ok(row) => row,
                Err(_) if rows.is_empty() && width.is_none() => {
                    width = Some(fields.len());
                    continue;
                }
                Err(e) => return Err(Error::Parse { line: i + 1, message: e.to_string() }),
            };
            match width {
                Some(w) if w != row.len() => {
                    return Err(Error::Parse {
                        line: i + 1,
                        message: format!("expected {w} fields, found {}", row.len()),
                    })
                }
                _ => width = Some(row.len()),
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::EmptyData);
        }
        let d = rows[0].len();
        DataMatrix::new(rows.len(), d, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.d + j]
    }

    /// Column `j` (0-based).
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }
}

impl FromStr for DataMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DataMatrix::from_csv(s)
    }
}

/// Symmetric matrix with unit diagonal. Variables are 1-based in [`CorrMatrix::get`].
#[derive(Debug, Clone, PartialEq)]
pub struct CorrMatrix(DMatrix<f64>);

impl CorrMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let d = m.nrows();
        if d == 0 || m.ncols() != d {
            return Err(Error::InvalidArgument(format!("correlation matrix must be square, got {}×{}", d, m.ncols())));
        }
        for i in 0..d {
            if (m[(i, i)] - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidArgument(format!("diagonal entry {} is {}", i + 1, m[(i, i)])));
            }
            for j in 0..i {
                let (a, b) = (m[(i, j)], m[(j, i)]);
                if !a.is_finite() || (a - b).abs() > 1e-10 || a.abs() > 1.0 + 1e-12 {
                    return Err(Error::InvalidArgument(format!("entry ({}, {}) is not a correlation", i + 1, j + 1)));
                }
            }
        }
        Ok(CorrMatrix(m))
    }

    /// From the lower triangle listed row by row: `r21, r31, r32, r41, …`.
    pub fn from_lower(d: usize, lower: &[f64]) -> Result<Self> {
        if lower.len() != d * (d - 1) / 2 {
            return Err(Error::LengthMismatch { expected: d * (d - 1) / 2, found: lower.len() });
        }
        let mut m = DMatrix::identity(d, d);
        let mut it = lower.iter();
        for i in 1..d {
            for j in 0..i {
                let r = *it.next().expect("length checked");
                m[(i, j)] = r;
                m[(j, i)] = r;
            }
        }
        CorrMatrix::new(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Entry for variables `s`, `t` (1-based).
    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.0[(s - 1, t - 1)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.0.clone().symmetric_eigenvalues().min() > PD_TOL
    }

    /// Sub-matrix for the variables of `s`.
    pub fn restrict(&self, s: Subset) -> CorrMatrix {
        let idx: Vec<usize> = s.vars().iter().map(|v| v - 1).collect();
        CorrMatrix(DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.0[(idx[i], idx[j])]))
    }
}

fn check_pd(r: &CorrMatrix) -> Result<()> {
    if r.is_positive_definite() {
        Ok(())
    } else {
        Err(Error::Rank("correlation matrix is not positive definite".into()))
    }
}

/// Pearson correlations of the columns.
pub fn corr_from_data(m: &DataMatrix) -> Result<CorrMatrix> {
    let (n, d) = (m.n(), m.dim());
    let centred: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let col = m.column(j);
            let mean = col.iter().sum::<f64>() / n as f64;
            col.into_iter().map(|x| x - mean).collect()
        })
        .collect();
    let ss: Vec<f64> = centred.iter().map(|c| c.iter().map(|x| x * x).sum()).collect();
    if let Some(column) = ss.iter().position(|&s| s <= 0.0) {
        return Err(Error::DegenerateVariance { column: column + 1 });
    }
    let r = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            1.0
        } else {
            let cross: f64 = centred[i].iter().zip(&centred[j]).map(|(a, b)| a * b).sum();
            (cross / (ss[i] * ss[j]).sqrt()).clamp(-1.0, 1.0)
        }
    });
    CorrMatrix::new(r)
}

/// `R⁻¹`; its diagonal holds the concentrations `ρ^{ss}`.
pub fn concentration(r: &CorrMatrix) -> Result<DMatrix<f64>> {
    r.matrix()
        .clone()
        .try_inverse()
        .filter(|k| k.iter().all(|x| x.is_finite()))
        .ok_or_else(|| Error::Rank("correlation matrix is singular".into()))
}

/// Partial correlations given all remaining variables, `−ρ^{st} / √(ρ^{ss} ρ^{tt})`.
pub fn partial_corr(r: &CorrMatrix) -> Result<CorrMatrix> {
    let k = concentration(r)?;
    let d = r.dim();
    if (0..d).any(|i| k[(i, i)] <= 0.0) {
        return Err(Error::Rank("correlation matrix is not positive definite".into()));
    }
    let p = DMatrix::from_fn(d, d, |s, t| {
        if s == t {
            1.0
        } else {
            (-k[(s, t)] / (k[(s, s)] * k[(t, t)]).sqrt()).clamp(-1.0, 1.0)
        }
    });
    CorrMatrix::new(p)
}

/// Smallest positive gap between distinct values; infinite when all values coincide.
fn min_gap(col: &[f64]) -> f64 {
    let mut sorted = col.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).map(|w| w[1] - w[0]).filter(|&g| g > 0.0).fold(f64::INFINITY, f64::min)
}

/// Splits each column at its median after seeded jittering; returns the `2^d` table.
///
/// Each column gets uniform noise in `±½·gap·10⁻³`, `gap` being its smallest
/// distinct-value spacing, so only ties are reordered. Values strictly above
/// the median become level 1. For even `n` every margin is `(n/2, n/2)`.
pub fn median_dichotomize(m: &DataMatrix, seed: u64) -> Result<CountTable> {
    let (n, d) = (m.n(), m.dim());
    check_dim(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = vec![0usize; n];
    for j in 0..d {
        let col = m.column(j);
        let gap = min_gap(&col);
        let amplitude = if gap.is_finite() { gap } else { 1.0 } * JITTER_SCALE;
        let jittered: Vec<f64> = col.iter().map(|x| x + amplitude * (rng.random::<f64>() - 0.5)).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| jittered[a].total_cmp(&jittered[b]).then(a.cmp(&b)));
        for &i in &order[n / 2 + n % 2..] {
            cells[i] |= 1 << j;
        }
    }
    let mut counts = vec![0.0; 1 << d];
    for k in cells {
        counts[k] += 1.0;
    }
    CountTable::new(d, counts)
}

/// `ξ = (2/π) arcsin ρ`.
pub fn xi_from_rho(rho: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!("correlation {rho} is outside [-1, 1]")));
    }
    Ok(rho.asin() / FRAC_PI_2)
}

/// `ρ = sin(π ξ / 2)`.
pub fn rho_from_xi(xi: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&xi) {
        return Err(Error::Domain(format!("moment {xi} is outside [-1, 1]")));
    }
    Ok((FRAC_PI_2 * xi).sin())
}

/// Trivariate palindromic table with every pairwise moment equal to `xi`:
/// `8π = (1+3ξ, 1−ξ, …, 1−ξ, 1+3ξ)`.
pub fn equicorrelation_table(xi: f64) -> Result<ProbabilityTable> {
    if !(xi > -1.0 / 3.0 && xi < 1.0) {
        return Err(Error::Infeasible(format!("equicorrelation {xi} is outside (-1/3, 1)")));
    }
    let (outer, inner) = ((1.0 + 3.0 * xi) / 8.0, (1.0 - xi) / 8.0);
    let v = (0..8).map(|k| if k == 0 || k == 7 { outer } else { inner }).collect();
    ProbabilityTable::new(3, v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianFit {
    pub r_hat: CorrMatrix,
    /// `n log{det R̂ / det R}`.
    pub wilks: f64,
    pub df: usize,
}

/// Maximum likelihood correlation matrix under the concentration graph `g`.
///
/// `R̂⁻¹ = Σ_C [R_C⁻¹]⁰ − Σ_S [R_S⁻¹]⁰` over cliques and separators, with
/// `[·]⁰` padding to `d × d` by zeros.
pub fn fit_gaussian_decomposable(r: &CorrMatrix, g: &Graph, n: usize) -> Result<GaussianFit> {
    let d = r.dim();
    if g.dim() != d {
        return Err(Error::InvalidArgument(format!("graph has {} nodes, matrix has {d} rows", g.dim())));
    }
    check_pd(r)?;
    let dec = match decompose(g) {
        Decomposition::Chordal(dec) => dec,
        Decomposition::NotChordal => return Err(Error::NotChordal),
    };
    let mut k = DMatrix::zeros(d, d);
    let mut add = |s: Subset, sign: f64| -> Result<()> {
        let inv = concentration(&r.restrict(s))?;
        let idx: Vec<usize> = s.vars().iter().map(|v| v - 1).collect();
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                k[(i, j)] += sign * inv[(a, b)];
            }
        }
        Ok(())
    };
    for &c in &dec.cliques {
        add(c, 1.0)?;
    }
    for &s in dec.separators.iter().filter(|s| !s.is_empty()) {
        add(s, -1.0)?;
    }
    let mut r_hat = k.try_inverse().ok_or_else(|| Error::Rank("fitted concentration is singular".into()))?;
    // the clique margins are reproduced exactly; clean rounding off the diagonal
    for i in 0..d {
        r_hat[(i, i)] = 1.0;
        for j in 0..i {
            let x = 0.5 * (r_hat[(i, j)] + r_hat[(j, i)]);
            r_hat[(i, j)] = x;
            r_hat[(j, i)] = x;
        }
    }
    let r_hat = CorrMatrix::new(r_hat)?;
    let wilks = n as f64 * (r_hat.determinant() / r.determinant()).ln();
    Ok(GaussianFit { r_hat, wilks, df: g.missing_edges().len() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquicorrelationFit {
    pub rho_hat: f64,
    pub wilks: f64,
    pub df: usize,
}

/// Replaces the correlations within `block` by their average.
pub fn fit_equicorrelation(r: &CorrMatrix, block: Subset, n: usize) -> Result<EquicorrelationFit> {
    let k = block.len();
    if k < 3 {
        return Err(Error::InvalidArgument(format!("block {block} needs at least 3 variables")));
    }
    if !block.is_subset_of(Subset::full(r.dim())) {
        return Err(Error::InvalidArgument(format!("block {block} exceeds the {} variables", r.dim())));
    }
    let sub = r.restrict(block);
    check_pd(&sub)?;
    let pairs = k * (k - 1) / 2;
    let within: Vec<f64> = (0..k).flat_map(|i| (0..i).map(move |j| (i, j))).map(|(i, j)| sub.matrix()[(i, j)]).collect();
    // mean as offset from the first entry, exact for a constant block
    let rho_hat = within[0] + within.iter().map(|r| r - within[0]).sum::<f64>() / pairs as f64;
    if !(rho_hat > -1.0 / (k as f64 - 1.0) && rho_hat < 1.0) {
        return Err(Error::Infeasible(format!("average correlation {rho_hat} gives no valid equicorrelation")));
    }
    let fitted = DMatrix::from_fn(k, k, |i, j| if i == j { 1.0 } else { rho_hat });
    let wilks = n as f64 * (fitted.determinant() / sub.determinant()).ln();
    Ok(EquicorrelationFit { rho_hat, wilks, df: pairs - 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{GRADES_CSV, CASE_STUDY_EDGES};
    use crate::params::{eta_from_pi, lambda_from_pi, xi_from_pi};
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    fn grades() -> DataMatrix {
        DataMatrix::from_csv(GRADES_CSV).unwrap()
    }

    fn grades_corr() -> CorrMatrix {
        corr_from_data(&grades()).unwrap()
    }

    fn bivariate_normal(n: usize, rho: f64, seed: u64) -> DataMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = (1.0 - rho * rho).sqrt();
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let (u, v): (f64, f64) = (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
            x.push(u);
            y.push(rho * u + c * v);
        }
        DataMatrix::from_columns(&[x, y]).unwrap()
    }

    #[test]
    fn grades_correlations_and_partials() {
        let r = grades_corr();
        let lower = [((1, 2), 0.72), ((1, 3), 0.76), ((2, 3), 0.80), ((1, 4), 0.62), ((2, 4), 0.60), ((3, 4), 0.71)];
        for ((s, t), printed) in lower {
            assert!((r.get(s, t) - printed).abs() < 0.005, "r{s}{t} = {}", r.get(s, t));
        }
        let p = partial_corr(&r).unwrap();
        let upper = [((1, 2), 0.27), ((1, 3), 0.34), ((1, 4), 0.17), ((2, 3), 0.51), ((2, 4), 0.04), ((3, 4), 0.38)];
        for ((s, t), printed) in upper {
            assert!((p.get(s, t) - printed).abs() < 0.005, "r{s}{t}.rest = {}", p.get(s, t));
        }
        let k = concentration(&r).unwrap();
        for (i, printed) in [2.64, 3.03, 4.07, 2.09].iter().enumerate() {
            assert!((k[(i, i)] - printed).abs() < 0.005);
        }
    }

    #[test]
    fn physics_against_sum_score() {
        let data = grades();
        let sum: Vec<f64> = (0..data.n()).map(|i| (0..3).map(|j| data.get(i, j)).sum()).collect();
        let m = DataMatrix::from_columns(&[sum, data.column(3)]).unwrap();
        let r = corr_from_data(&m).unwrap().get(1, 2);
        assert!((r - 0.706).abs() < 0.0005);
        assert!((grades_corr().get(3, 4) - 0.709).abs() < 0.001);
    }

    #[test]
    fn csv_parsing() {
        let with_header = DataMatrix::from_csv("a,b\n1,2\n3,4\n\n5,6\n").unwrap();
        let without = DataMatrix::from_csv("1, 2\n3,4\n5,6").unwrap();
        assert_eq!(with_header, without);
        assert_eq!(with_header.column(1), vec![2.0, 4.0, 6.0]);
        assert_eq!(
            DataMatrix::from_csv("a,b\n1,2\n3,x\n"),
            Err(Error::Parse { line: 3, message: "invalid float literal".into() })
        );
        assert!(matches!(DataMatrix::from_csv("1,2\n3\n"), Err(Error::Parse { line: 2, .. })));
        assert_eq!(DataMatrix::from_csv("a,b\n"), Err(Error::EmptyData));
        assert!(DataMatrix::from_csv("1,2\n").is_err());
        let g = grades();
        assert_eq!((g.n(), g.dim()), (78, 4));
    }

    #[test]
    fn degenerate_and_duplicated_columns() {
        let x = vec![1.0, 4.0, 2.0, 8.0, 5.0];
        let dup = DataMatrix::from_columns(&[x.clone(), x.clone()]).unwrap();
        assert!((corr_from_data(&dup).unwrap().get(1, 2) - 1.0).abs() < 1e-12);
        let flat = DataMatrix::from_columns(&[x, vec![3.0; 5]]).unwrap();
        assert_eq!(corr_from_data(&flat), Err(Error::DegenerateVariance { column: 2 }));
    }

    #[test]
    fn independent_columns_are_nearly_uncorrelated() {
        let data = bivariate_normal(100_000, 0.0, 1);
        assert!(corr_from_data(&data).unwrap().get(1, 2).abs() < 0.02);
    }

    #[test]
    fn partials_of_example_matrices() {
        let r = CorrMatrix::from_lower(3, &[0.36, 0.6, 0.6]).unwrap();
        let p = partial_corr(&r).unwrap();
        assert!(p.get(1, 2).abs() < 1e-12);
        assert!((p.get(1, 3) - 0.51).abs() < 0.005);
        assert!((p.get(2, 3) - 0.51).abs() < 0.005);
        let id = CorrMatrix::new(DMatrix::identity(4, 4)).unwrap();
        assert_eq!(partial_corr(&id).unwrap(), id);
        let singular = CorrMatrix::from_lower(2, &[1.0]).unwrap();
        assert!(matches!(partial_corr(&singular), Err(Error::Rank(_))));
    }

    #[test]
    fn corr_matrix_validation() {
        assert!(CorrMatrix::from_lower(2, &[1.5]).is_err());
        assert!(CorrMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.3, 1.0])).is_err());
        assert!(CorrMatrix::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.2, 0.2, 1.0])).is_err());
        assert!(!CorrMatrix::from_lower(3, &[0.9, 0.9, -0.9]).unwrap().is_positive_definite());
    }

    #[test]
    fn dichotomize_concordant_and_antithetic() {
        let x: Vec<f64> = vec![3.0, 1.0, 4.0, 1.5, 5.0, 9.0, 2.0, 6.0, 5.5, 3.5];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let same = median_dichotomize(&DataMatrix::from_columns(&[x.clone(), x.clone()]).unwrap(), 3).unwrap();
        assert_eq!(same.counts(), [5.0, 0.0, 0.0, 5.0]);
        let anti = median_dichotomize(&DataMatrix::from_columns(&[x, neg]).unwrap(), 3).unwrap();
        assert_eq!(anti.counts(), [0.0, 5.0, 5.0, 0.0]);
    }

    #[test]
    fn dichotomized_grades_have_uniform_margins() {
        for seed in 0..20 {
            let c = median_dichotomize(&grades(), seed).unwrap();
            assert_eq!(c.total(), 78.0);
            for v in 1..=4 {
                assert_eq!(c.marginal(Subset::from_vars(&[v])), vec![39.0, 39.0]);
            }
        }
        assert_eq!(median_dichotomize(&grades(), 7).unwrap(), median_dichotomize(&grades(), 7).unwrap());
    }

    #[test]
    fn odd_sample_size_margins_differ_by_one() {
        let data = DataMatrix::from_columns(&[vec![1.0, 2.0, 2.0, 2.0, 3.0]]).unwrap();
        let c = median_dichotomize(&data, 0).unwrap();
        assert_eq!(c.counts(), [3.0, 2.0]);
    }

    #[test]
    fn dichotomized_gaussian_follows_arcsine_law() {
        let c = median_dichotomize(&bivariate_normal(100_000, 0.5, 11), 11).unwrap();
        let xi = xi_from_pi(&ProbabilityTable::from_counts(&c).unwrap());
        assert!((xi.get(Subset::from_vars(&[1, 2])) - 1.0 / 3.0).abs() < 0.02);
        // cross-sum difference of counts is the ±1 correlation
        let n = c.counts();
        let cross = (n[0] + n[3] - n[1] - n[2]) / c.total();
        assert!((cross - xi.get(Subset::from_vars(&[1, 2]))).abs() < 1e-12);
    }

    #[test]
    fn symmetric_samples_approach_palindromic_tables() {
        // trivariate normal is centrally symmetric; odd moments shrink like n^{-1/2}
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in [1_000usize, 100_000] {
            let cols: Vec<Vec<f64>> = {
                let mut z = vec![Vec::with_capacity(n); 3];
                for _ in 0..n {
                    let (a, b, c): (f64, f64, f64) =
                        (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
                    z[0].push(a);
                    z[1].push(0.6 * a + 0.8 * b);
                    z[2].push(0.3 * a + 0.4 * b + c);
                }
                z
            };
            let c = median_dichotomize(&DataMatrix::from_columns(&cols).unwrap(), 5).unwrap();
            let xi = xi_from_pi(&ProbabilityTable::from_counts(&c).unwrap());
            assert!(xi.max_abs_odd() < 4.0 / (n as f64).sqrt(), "n = {n}: {}", xi.max_abs_odd());
        }
    }

    #[test]
    fn arcsine_examples() {
        assert!((xi_from_rho(0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(xi_from_rho(0.0).unwrap(), 0.0);
        assert_eq!(xi_from_rho(1.0).unwrap(), 1.0);
        assert!((xi_from_rho(0.72).unwrap() - 0.72f64.asin() * 2.0 / std::f64::consts::PI).abs() < 1e-15);
        assert!((xi_from_rho(0.72).unwrap() - 0.5117).abs() < 1e-4);
        assert!((rho_from_xi(1.0 / 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(xi_from_rho(1.01).is_err());
        assert!(rho_from_xi(-1.2).is_err());
        for i in 0..=100 {
            let x = -1.0 + 0.02 * i as f64;
            assert!((rho_from_xi(xi_from_rho(x).unwrap()).unwrap() - x).abs() < 1e-12);
        }
        // composition recovers the grade correlations
        let r = grades_corr();
        for (s, t) in [(1, 2), (3, 4)] {
            let xi = xi_from_rho(r.get(s, t)).unwrap();
            assert!((rho_from_xi(xi).unwrap() - r.get(s, t)).abs() < 1e-12);
        }
    }

    #[test]
    fn equicorrelation_table_parameters() {
        let u = equicorrelation_table(0.0).unwrap();
        assert!(u.values().iter().all(|p| (p - 0.125).abs() < 1e-15));
        let t = equicorrelation_table(1.0 / 3.0).unwrap();
        assert!((t.prob(0) * 8.0 - 2.0).abs() < 1e-12);
        assert!((t.prob(3) * 8.0 - 2.0 / 3.0).abs() < 1e-12);
        let lam = lambda_from_pi(&t);
        let eta = eta_from_pi(&t);
        let xi = xi_from_pi(&t);
        for b in ["12", "13", "23"] {
            let b: Subset = b.parse().unwrap();
            assert!((lam.get(b) - 3f64.ln() / 4.0).abs() < 1e-12);
            assert!((eta.get(b) - (1.0f64 / 3.0).atanh()).abs() < 1e-12);
            assert!((xi.get(b) - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(xi.max_abs_odd() < 1e-15);
        assert!(equicorrelation_table(-1.0 / 3.0).is_err());
        assert!(equicorrelation_table(1.0).is_err());
    }

    #[test]
    fn case_study_gaussian_fit() {
        let r = grades_corr();
        let g = Graph::from_edges(4, &CASE_STUDY_EDGES).unwrap();
        let fit = fit_gaussian_decomposable(&r, &g, 78).unwrap();
        assert_eq!(fit.df, 2);
        assert!((fit.r_hat.get(1, 4) - r.get(1, 3) * r.get(3, 4)).abs() < 1e-12);
        assert!((fit.r_hat.get(2, 4) - r.get(2, 3) * r.get(3, 4)).abs() < 1e-12);
        assert!((fit.r_hat.get(1, 4) - 0.54).abs() < 0.005);
        assert!((fit.r_hat.get(2, 4) - 0.57).abs() < 0.005);
        for (s, t) in [(1, 2), (1, 3), (2, 3), (3, 4)] {
            assert!((fit.r_hat.get(s, t) - r.get(s, t)).abs() < 1e-12);
        }
        assert!((fit.wilks - 2.8).abs() < 0.3);
    }

    #[test]
    fn gaussian_fit_trivial_cases() {
        let r = grades_corr();
        let full = fit_gaussian_decomposable(&r, &Graph::complete(4).unwrap(), 78).unwrap();
        assert!((full.r_hat.matrix() - r.matrix()).amax() < 1e-12);
        assert!(full.wilks.abs() < 1e-9);
        assert_eq!(full.df, 0);

        let (r13, r23, r34) = (0.7, 0.5, 0.6);
        let exact = CorrMatrix::from_lower(4, &[0.4, r13, r23, r13 * r34, r23 * r34, r34]).unwrap();
        let g = Graph::from_edges(4, &CASE_STUDY_EDGES).unwrap();
        assert!(fit_gaussian_decomposable(&exact, &g, 100).unwrap().wilks.abs() < 1e-9);

        let cycle = Graph::from_edges(4, &[(1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
        assert_eq!(fit_gaussian_decomposable(&r, &cycle, 78), Err(Error::NotChordal));
    }

    #[test]
    fn case_study_equicorrelation() {
        let fit = fit_equicorrelation(&grades_corr(), Subset::from_vars(&[1, 2, 3]), 78).unwrap();
        assert!((fit.rho_hat - 0.76).abs() < 0.005);
        assert!((fit.wilks - 3.4).abs() < 0.3);
        assert_eq!(fit.df, 2);
    }

    #[test]
    fn equicorrelation_trivial_cases() {
        let r = CorrMatrix::from_lower(3, &[0.7, 0.7, 0.7]).unwrap();
        let fit = fit_equicorrelation(&r, Subset::full(3), 50).unwrap();
        assert_eq!(fit.rho_hat, 0.7);
        assert!(fit.wilks.abs() < 1e-12);
        assert!(fit_equicorrelation(&r, Subset::from_vars(&[1, 2]), 50).is_err());
    }

    proptest! {
        #[test]
        fn three_variable_partial_formula(r12 in -0.6f64..0.6, r13 in -0.6f64..0.6, r23 in -0.6f64..0.6) {
            let r = CorrMatrix::from_lower(3, &[r12, r13, r23]).unwrap();
            prop_assume!(r.is_positive_definite());
            let p = partial_corr(&r).unwrap();
            let explicit = (r12 - r13 * r23) / ((1.0 - r13 * r13) * (1.0 - r23 * r23)).sqrt();
            prop_assert!((p.get(1, 2) - explicit).abs() < 1e-12);
        }
    }
}
