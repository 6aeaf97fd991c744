//! Palindromic graphical models fitted to symmetrized counts.
//!
//! The palindromic constraint fixes every odd-order `λ_b` at zero. A
//! concentration graph additionally fixes `λ_b = 0` for every even `b` that
//! is not complete in the graph. Both fits here work on the symmetrized
//! counts, which are sufficient under the palindromic constraint.

use nalgebra::{DMatrix, DVector};

use super::graph::{cliques, decompose, Decomposition, Graph};
use crate::error::{Error, Result};
use crate::params::{lambda_from_pi, CountTable, ParamVector, ProbabilityTable};
use crate::symmetry::{symmetrize, wilks_palindromic};
use crate::tensor::{marginalize, project_index, Subset};

/// One free log-linear interaction with its asymptotic standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudentizedTerm {
    pub subset: Subset,
    pub estimate: f64,
    pub se: f64,
    pub z: f64,
}

/// Result of fitting a palindromic concentration-graph model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFit {
    /// Generating sets (the cliques, for a graph).
    pub generators: Vec<Subset>,
    pub fitted: CountTable,
    /// `2 Σ n log(n/m)`: observed against the model.
    pub wilks_total: f64,
    /// Observed against the saturated palindromic fit.
    pub wilks_symmetry: f64,
    /// Saturated palindromic fit against the model.
    pub wilks_independence: f64,
    pub df_total: usize,
    pub df_symmetry: usize,
    pub df_independence: usize,
    /// `None` when a fitted cell is zero.
    pub lambda_hat: Option<ParamVector>,
    /// Free even-order interactions, studentized. Empty if the information is singular
    /// or `lambda_hat` is missing.
    pub studentized: Vec<StudentizedTerm>,
    /// IPF sweeps used; 0 for the closed form.
    pub iterations: usize,
}

impl ModelFit {
    pub fn total(&self) -> f64 {
        self.fitted.total()
    }

    /// Fitted distribution, if every fitted cell is positive.
    pub fn fitted_table(&self) -> Option<ProbabilityTable> {
        ProbabilityTable::new(self.fitted.dim(), self.fitted.counts().to_vec()).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpfOptions {
    /// Sup-norm tolerance on generator margins (counts).
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for IpfOptions {
    fn default() -> Self {
        IpfOptions { tol: 1e-10, max_iter: 5000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    /// Closed form when the graph is chordal, IPF otherwise.
    Auto,
    Decomposable,
    Ipf,
}

/// Even subsets of size ≥ 2 contained in some generator.
fn free_even_subsets(d: usize, generators: &[Subset]) -> Vec<Subset> {
    (1..1usize << d)
        .map(Subset)
        .filter(|b| !b.is_odd() && generators.iter().any(|g| b.is_subset_of(*g)))
        .collect()
}

fn df_for_generators(d: usize, generators: &[Subset]) -> (usize, usize, usize) {
    let df_symmetry = 1usize << (d - 1);
    let even_nonempty = (1usize << (d - 1)) - 1;
    let df_independence = even_nonempty - free_even_subsets(d, generators).len();
    (df_symmetry, df_independence, df_symmetry + df_independence)
}

/// `(df_symmetry, df_independence, df_total)` for the palindromic model of `g`.
pub fn model_df(g: &Graph, d: usize) -> Result<(usize, usize, usize)> {
    if g.dim() != d {
        return Err(Error::InvalidArgument(format!("graph has {} nodes, expected {d}", g.dim())));
    }
    Ok(df_for_generators(d, &cliques(g)))
}

/// Closed-form fit `Π_t n̂_{C_t} / Π_t n̂_{S_t}` on the symmetrized counts.
pub fn fit_decomposable(c: &CountTable, g: &Graph) -> Result<ModelFit> {
    check_graph(c, g)?;
    let dec = match decompose(g) {
        Decomposition::Chordal(dec) => dec,
        Decomposition::NotChordal => return Err(Error::NotChordal),
    };
    let sym = symmetrize(c)?.fitted;
    let margins = |sets: &[Subset]| -> Vec<(usize, Vec<f64>)> {
        sets.iter().map(|s| (s.mask(), marginalize(sym.counts(), s.mask()))).collect()
    };
    let clique_margins = margins(&dec.cliques);
    let separator_margins = margins(&dec.separators);
    let fitted: Vec<f64> = (0..sym.counts().len())
        .map(|k| {
            let num: f64 = clique_margins.iter().map(|(m, v)| v[project_index(k, *m)]).product();
            let den: f64 = separator_margins.iter().map(|(m, v)| v[project_index(k, *m)]).product();
            if num == 0.0 {
                0.0
            } else {
                num / den
            }
        })
        .collect();
    build_fit(c, &sym, CountTable::new(c.dim(), fitted)?, dec.cliques, 0)
}

/// Iterative proportional fitting of the generator margins of the symmetrized counts.
pub fn fit_ipf(c: &CountTable, generators: &[Subset], opts: IpfOptions) -> Result<ModelFit> {
    let d = c.dim();
    let full = Subset::full(d);
    let covered = generators.iter().fold(Subset::EMPTY, |acc, g| acc.union(*g));
    if generators.iter().any(|g| g.is_empty() || !g.is_subset_of(full)) {
        return Err(Error::InvalidArgument("generators must be nonempty subsets of the variables".into()));
    }
    if covered != full {
        return Err(Error::InvalidArgument(format!("generators cover {covered}, not every variable")));
    }
    let sym = symmetrize(c)?.fitted;
    let targets: Vec<(usize, Vec<f64>)> =
        generators.iter().map(|g| (g.mask(), marginalize(sym.counts(), g.mask()))).collect();

    let n = sym.total();
    let mut m = vec![n / sym.counts().len() as f64; sym.counts().len()];
    let mut deviation = f64::INFINITY;
    for sweep in 1..=opts.max_iter {
        for (mask, target) in &targets {
            let current = marginalize(&m, *mask);
            for (k, x) in m.iter_mut().enumerate() {
                let j = project_index(k, *mask);
                *x = if current[j] > 0.0 { *x * target[j] / current[j] } else { 0.0 };
            }
        }
        deviation = targets
            .iter()
            .map(|(mask, target)| {
                marginalize(&m, *mask).iter().zip(target).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()))
            })
            .fold(0.0, f64::max);
        if deviation <= opts.tol {
            let mut gens = generators.to_vec();
            gens.sort_by_key(|s| s.vars());
            return build_fit(c, &sym, CountTable::new(d, m)?, gens, sweep);
        }
    }
    Err(Error::IterationLimit { iterations: opts.max_iter, max_deviation: deviation })
}

/// Fits the palindromic model of `g`, choosing the algorithm per `method`.
pub fn fit_graph(c: &CountTable, g: &Graph, method: FitMethod, opts: IpfOptions) -> Result<ModelFit> {
    check_graph(c, g)?;
    match method {
        FitMethod::Decomposable => fit_decomposable(c, g),
        FitMethod::Ipf => fit_ipf(c, &cliques(g), opts),
        FitMethod::Auto => match fit_decomposable(c, g) {
            Err(Error::NotChordal) => fit_ipf(c, &cliques(g), opts),
            other => other,
        },
    }
}

fn check_graph(c: &CountTable, g: &Graph) -> Result<()> {
    if c.dim() != g.dim() {
        return Err(Error::InvalidArgument(format!(
            "table has {} variables but graph has {} nodes",
            c.dim(),
            g.dim()
        )));
    }
    Ok(())
}

fn deviance(observed: &[f64], fitted: &[f64]) -> Result<f64> {
    let mut w = 0.0;
    for (cell, (&n, &m)) in observed.iter().zip(fitted).enumerate() {
        if n > 0.0 {
            if m <= 0.0 {
                return Err(Error::DegenerateFit { cell, observed: n });
            }
            w += n * (n / m).ln();
        }
    }
    Ok(2.0 * w)
}

fn build_fit(
    c: &CountTable,
    sym: &CountTable,
    fitted: CountTable,
    generators: Vec<Subset>,
    iterations: usize,
) -> Result<ModelFit> {
    let d = c.dim();
    let (df_symmetry, df_independence, df_total) = df_for_generators(d, &generators);
    let wilks_total = deviance(c.counts(), fitted.counts())?;
    let (wilks_symmetry, _) = wilks_palindromic(c)?;
    let wilks_independence = deviance(sym.counts(), fitted.counts())?;
    let lambda_hat = ProbabilityTable::new(d, fitted.counts().to_vec()).ok().map(|t| lambda_from_pi(&t));
    let mut fit = ModelFit {
        generators,
        fitted,
        wilks_total,
        wilks_symmetry,
        wilks_independence,
        df_total,
        df_symmetry,
        df_independence,
        lambda_hat,
        studentized: Vec::new(),
        iterations,
    };
    fit.studentized = studentized_lambda(c, &fit).unwrap_or_default();
    Ok(fit)
}

/// `(w, df)` of the observed counts against the model fit.
pub fn wilks_model(c: &CountTable, fit: &ModelFit) -> Result<(f64, usize)> {
    if c.dim() != fit.fitted.dim() {
        return Err(Error::InvalidArgument("fit and counts differ in dimension".into()));
    }
    Ok((deviance(c.counts(), fit.fitted.counts())?, fit.df_total))
}

/// `λ̂_b / se(λ̂_b)` for each free even-order `b`.
///
/// Standard errors come from the inverse Fisher information of the free
/// coordinates at the fitted counts `m`: `Xᵀ (diag(m) − m mᵀ / n) X`, where
/// the columns of `X` are the effect-coded contrasts `(-1)^{a·b}`.
pub fn studentized_lambda(c: &CountTable, fit: &ModelFit) -> Result<Vec<StudentizedTerm>> {
    let lambda = fit
        .lambda_hat
        .as_ref()
        .ok_or_else(|| Error::Rank("fitted table has empty cells; interactions are not estimable".into()))?;
    let d = c.dim();
    let free = free_even_subsets(d, &fit.generators);
    if free.is_empty() {
        return Ok(Vec::new());
    }
    let m = fit.fitted.counts();
    let n = c.total();
    let cells = m.len();
    let design = DMatrix::from_fn(cells, free.len(), |a, j| {
        if (a & free[j].mask()).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    });
    let mv = DVector::from_column_slice(m);
    let weighted = DMatrix::from_fn(cells, free.len(), |a, j| m[a] * design[(a, j)]);
    let projected = design.transpose() * &mv;
    let info = design.transpose() * weighted - (&projected * projected.transpose()) / n;
    let cov = info
        .cholesky()
        .ok_or_else(|| Error::Rank("Fisher information is not positive definite".into()))?
        .inverse();
    Ok(free
        .iter()
        .enumerate()
        .map(|(j, &b)| {
            let se = cov[(j, j)].sqrt();
            let estimate = lambda.get(b);
            StudentizedTerm { subset: b, estimate, se, z: estimate / se }
        })
        .collect())
}
