//! Grades of 78 students in four subjects, analysed on both the Gaussian and the binary side.

use std::path::Path;

use palindromic::fixtures::{self, CASE_STUDY_EDGES, GRADES_CSV};
use palindromic::gaussian::{
    concentration, corr_from_data, fit_equicorrelation, fit_gaussian_decomposable, partial_corr, CorrMatrix,
    DataMatrix,
};
use palindromic::graphs::{conditional_probability, fit_graph, FitMethod, Graph, IpfOptions};
use palindromic::Subset;
use serde_json::{json, Map, Value};

use crate::io::{read_text, CliError, CliResult, TableFile};
use crate::{fit_report, p_value};

const SUBJECTS: [&str; 4] = ["analysis", "algebra", "geometry", "physics"];

fn pairs(r: &CorrMatrix) -> Value {
    let d = r.dim();
    let mut out = Map::new();
    for s in 1..=d {
        for t in s + 1..=d {
            out.insert(format!("{s}{t}"), Value::from(r.get(s, t)));
        }
    }
    Value::Object(out)
}

pub fn run(counts: Option<&Path>, data: Option<&Path>) -> CliResult<Value> {
    let csv = match data {
        Some(p) => read_text(p)?,
        None => GRADES_CSV.to_string(),
    };
    let data = DataMatrix::from_csv(&csv)?;
    if data.dim() != 4 {
        return Err(CliError::Input(format!("the case study needs 4 columns, found {}", data.dim())));
    }
    let counts = match counts {
        Some(p) => TableFile::read(p)?.counts()?,
        None => fixtures::case_study_counts(),
    };
    if counts.dim() != 4 {
        return Err(CliError::Input(format!("the case study needs a 2^4 table, found d = {}", counts.dim())));
    }
    let g = Graph::from_edges(4, &CASE_STUDY_EDGES)?;

    let r = corr_from_data(&data)?;
    let partials = partial_corr(&r)?;
    let k = concentration(&r)?;
    let n = data.n();
    let gauss = fit_gaussian_decomposable(&r, &g, n)?;
    let equi = fit_equicorrelation(&r, Subset::from_vars(&[1, 2, 3]), n)?;

    let fit = fit_graph(&counts, &g, FitMethod::Auto, IpfOptions::default())?;
    let fitted = fit
        .fitted_table()
        .ok_or_else(|| CliError::Numeric("fitted table has empty cells".into()))?;
    let physics_given_geometry = conditional_probability(&fitted, &[(4, 0)], &[(3, 0)])?;

    Ok(json!({
        "variables": SUBJECTS,
        "gaussian": {
            "n": n,
            "correlations": pairs(&r),
            "partial_correlations": pairs(&partials),
            "concentrations": (0..4).map(|i| k[(i, i)]).collect::<Vec<_>>(),
            "graph_model": {
                "edges": g.edges().iter().map(|&(u, v)| [u, v]).collect::<Vec<_>>(),
                "fitted_correlations": { "14": gauss.r_hat.get(1, 4), "24": gauss.r_hat.get(2, 4) },
                "w": gauss.wilks,
                "df": gauss.df,
                "p_value": p_value(gauss.wilks, gauss.df),
            },
            "equicorrelation": {
                "block": "123",
                "r_hat": equi.rho_hat,
                "w": equi.wilks,
                "df": equi.df,
                "p_value": p_value(equi.wilks, equi.df),
            },
        },
        "binary": fit_report(&counts, &g, &fit),
        "prediction": {
            "event": "physics below median",
            "given": "geometry below median",
            "probability": physics_given_geometry,
        },
    }))
}
