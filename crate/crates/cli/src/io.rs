//! File formats: count/probability tables, parameter listings, graphs, systems.

use std::fmt;
use std::fs;
use std::path::Path;

use palindromic::graphs::{Graph, GraphFile};
use palindromic::generate::TriangularSystem;
use palindromic::tensor::ORDER_TAG;
use palindromic::{CountTable, ParamKind, ParamVector, ProbabilityTable, Subset};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent input; exit code 2.
    Input(String),
    /// Numerical or feasibility failure; exit code 3.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<palindromic::Error> for CliError {
    fn from(e: palindromic::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// On-disk table: exactly one of `counts` or `probabilities`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableFile {
    pub d: usize,
    pub order: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub enum Table {
    Counts(CountTable),
    Probabilities(ProbabilityTable),
}

impl Table {
    pub fn probabilities(&self) -> CliResult<ProbabilityTable> {
        Ok(match self {
            Table::Counts(c) => ProbabilityTable::from_counts(c)?,
            Table::Probabilities(p) => p.clone(),
        })
    }

    pub fn counts(&self) -> CliResult<CountTable> {
        match self {
            Table::Counts(c) => Ok(c.clone()),
            Table::Probabilities(_) => Err(CliError::Input("this command needs a table of counts".into())),
        }
    }
}

impl TableFile {
    pub fn from_counts(c: &CountTable) -> Self {
        TableFile { d: c.dim(), order: ORDER_TAG.into(), counts: Some(c.counts().to_vec()), probabilities: None }
    }

    pub fn from_probabilities(p: &ProbabilityTable) -> Self {
        TableFile { d: p.dim(), order: ORDER_TAG.into(), counts: None, probabilities: Some(p.values().to_vec()) }
    }

    pub fn read(path: &Path) -> CliResult<Table> {
        read_json::<TableFile>(path)?.into_table()
    }

    pub fn into_table(self) -> CliResult<Table> {
        if self.order != ORDER_TAG {
            return Err(CliError::Input(format!("unsupported cell order {:?}, expected {ORDER_TAG:?}", self.order)));
        }
        match (self.counts, self.probabilities) {
            (Some(c), None) => Ok(Table::Counts(CountTable::new(self.d, c)?)),
            (None, Some(p)) => Ok(Table::Probabilities(ProbabilityTable::new(self.d, p)?)),
            _ => Err(CliError::Input("table file needs exactly one of \"counts\" or \"probabilities\"".into())),
        }
    }
}

/// Parameter listing keyed by subset: `{"d": 2, "order": …, "kind": "xi", "values": {"{}": 1, "1": 0, …}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamFile {
    pub d: usize,
    pub order: String,
    pub kind: String,
    pub values: Map<String, Value>,
}

impl ParamFile {
    pub fn from_params(p: &ParamVector) -> Self {
        let values = p.iter().map(|(b, x)| (b.key(), Value::from(x))).collect();
        ParamFile { d: p.dim(), order: ORDER_TAG.into(), kind: p.kind().name().into(), values }
    }

    /// Missing keys default to 0 (1 for the moment `ξ_∅`).
    pub fn into_params(self, expected: ParamKind) -> CliResult<ParamVector> {
        if self.order != ORDER_TAG {
            return Err(CliError::Input(format!("unsupported cell order {:?}, expected {ORDER_TAG:?}", self.order)));
        }
        let kind: ParamKind = self.kind.parse()?;
        if kind != expected {
            return Err(CliError::Input(format!("file holds {kind} parameters, expected {expected}")));
        }
        if self.d == 0 || self.d > palindromic::tensor::MAX_DIM {
            return Err(palindromic::Error::InvalidDimension { d: self.d, max: palindromic::tensor::MAX_DIM }.into());
        }
        let mut values = vec![0.0; 1 << self.d];
        if kind == ParamKind::Moment {
            values[0] = 1.0;
        }
        let full = Subset::full(self.d);
        for (key, v) in &self.values {
            let b: Subset = key.parse()?;
            if !b.is_subset_of(full) {
                return Err(CliError::Input(format!("subset {key} exceeds d = {}", self.d)));
            }
            values[b.mask()] =
                v.as_f64().ok_or_else(|| CliError::Input(format!("value for {key} is not a number")))?;
        }
        Ok(ParamVector::new(self.d, kind, values)?)
    }

    pub fn read(path: &Path, expected: ParamKind) -> CliResult<ParamVector> {
        read_json::<ParamFile>(path)?.into_params(expected)
    }
}

pub fn read_graph(path: &Path) -> CliResult<Graph> {
    Ok(Graph::from_file(&read_json::<GraphFile>(path)?)?)
}

#[derive(Deserialize)]
struct SystemFile {
    d: usize,
    beta: Vec<Vec<f64>>,
}

pub fn read_system(path: &Path, strict: bool) -> CliResult<TriangularSystem> {
    let f: SystemFile = read_json(path)?;
    Ok(if strict { TriangularSystem::new_strict(f.d, f.beta)? } else { TriangularSystem::new(f.d, f.beta)? })
}
