//! Dataset ingestion, standardization and synthetic data.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use log::warn;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gibbs::RegressionData;
use crate::samplers::{standard_normal, RngStream};

/// Raw predictors and response, no missing values.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub response_name: String,
    pub y_raw: DVector<f64>,
    pub x_raw: DMatrix<f64>,
    pub column_names: Vec<String>,
    /// Rows dropped during ingestion because of missing cells.
    pub dropped_rows: usize,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.y_raw.len()
    }

    pub fn p(&self) -> usize {
        self.x_raw.ncols()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResponseColumn {
    Name(String),
    /// Zero-based column position.
    Index(usize),
    Last,
}

impl std::str::FromStr for ResponseColumn {
    type Err = std::convert::Infallible;

    /// A plain non-negative integer is a zero-based index, anything else a
    /// column name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ResponseColumn::Index(i),
            Err(_) => ResponseColumn::Name(s.to_string()),
        })
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "na" | "N/A" | "NaN" | "nan" | ".")
}

pub fn load_csv(path: &Path, response: &ResponseColumn, delimiter: u8) -> Result<Dataset> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "data".into());
    parse_csv(&text, &name, response, delimiter)
}

/// Parses CSV text. The first row is a header when any of its non-missing
/// cells fails to parse as a number.
pub fn parse_csv(text: &str, name: &str, response: &ResponseColumn, delimiter: u8) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push(rec);
    }
    let Some(first) = records.first() else {
        return Err(Error::Config("input has no rows".into()));
    };
    let width = first.len();
    let has_header = first
        .iter()
        .any(|cell| !is_missing(cell) && cell.parse::<f64>().is_err());
    let names: Vec<String> = if has_header {
        first.iter().map(str::to_string).collect()
    } else {
        (1..=width).map(|j| format!("V{j}")).collect()
    };
    let body = if has_header { &records[1..] } else { &records[..] };

    let target = match response {
        ResponseColumn::Last => width - 1,
        ResponseColumn::Index(i) if *i < width => *i,
        ResponseColumn::Index(i) => {
            return Err(Error::Config(format!(
                "response column {i} out of range for {width} columns"
            )))
        }
        ResponseColumn::Name(n) => names.iter().position(|c| c == n).ok_or_else(|| {
            Error::Config(format!("response column '{n}' not found in header"))
        })?,
    };
    if width < 2 {
        return Err(Error::Config("need a response and at least one predictor".into()));
    }

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(body.len());
    let mut dropped = 0;
    for (r, rec) in body.iter().enumerate() {
        let row_no = r + 1 + has_header as usize;
        if rec.len() != width {
            return Err(Error::Parse {
                row: row_no,
                column: rec.len().min(width) + 1,
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        let mut values = Vec::with_capacity(width);
        let mut missing = false;
        for (c, cell) in rec.iter().enumerate() {
            if is_missing(cell) {
                missing = true;
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row: row_no,
                column: c + 1,
                message: format!("'{cell}' is not a number"),
            })?;
            if !v.is_finite() {
                missing = true;
            }
            values.push(v);
        }
        if missing {
            dropped += 1;
        } else {
            rows.push(values);
        }
    }
    if dropped > 0 {
        warn!("{name}: dropped {dropped} row(s) with missing values");
    }
    if rows.is_empty() {
        return Err(Error::Config("no complete rows".into()));
    }

    let n = rows.len();
    let predictors: Vec<usize> = (0..width).filter(|&j| j != target).collect();
    let y_raw = DVector::from_fn(n, |i, _| rows[i][target]);
    let x_raw = DMatrix::from_fn(n, predictors.len(), |i, j| rows[i][predictors[j]]);
    Ok(Dataset {
        name: name.to_string(),
        response_name: names[target].clone(),
        y_raw,
        x_raw,
        column_names: predictors.iter().map(|&j| names[j].clone()).collect(),
        dropped_rows: dropped,
    })
}

/// Writes the response first, then the predictors, with a header row.
/// Values use the shortest representation that parses back exactly.
pub fn write_csv<W: Write>(dataset: &Dataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![dataset.response_name.clone()];
    header.extend(dataset.column_names.iter().cloned());
    w.write_record(&header)?;
    for i in 0..dataset.n() {
        let mut row = vec![dataset.y_raw[i].to_string()];
        row.extend(dataset.x_raw.row(i).iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InteractionRule {
    #[default]
    None,
    /// Products of distinct columns.
    Pairs,
    /// Distinct products plus squares.
    PairsAndSquares,
}

impl InteractionRule {
    /// Columns after expansion of `p0` base columns, before constant-column
    /// drops.
    pub fn expanded_width(self, p0: usize) -> usize {
        match self {
            InteractionRule::None => p0,
            InteractionRule::Pairs => p0 + p0 * p0.saturating_sub(1) / 2,
            InteractionRule::PairsAndSquares => p0 + p0 * (p0 + 1) / 2,
        }
    }
}

impl std::str::FromStr for InteractionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(InteractionRule::None),
            "pairs" => Ok(InteractionRule::Pairs),
            "pairs+squares" => Ok(InteractionRule::PairsAndSquares),
            other => Err(Error::Config(format!(
                "unknown interaction rule '{other}' (expected none, pairs or pairs+squares)"
            ))),
        }
    }
}

/// Regression inputs plus what it takes to map results back.
#[derive(Debug, Clone)]
pub struct Standardized {
    pub data: RegressionData,
    pub column_names: Vec<String>,
    pub dropped_columns: Vec<String>,
    pub y_mean: f64,
    pub x_means: Vec<f64>,
    pub x_sds: Vec<f64>,
}

/// Base columns, then the requested products (`a:b`, squares as `a^2`).
pub fn expand(x: &DMatrix<f64>, names: &[String], rule: InteractionRule) -> (DMatrix<f64>, Vec<String>) {
    let (n, p0) = x.shape();
    let mut cols: Vec<DVector<f64>> = (0..p0).map(|j| x.column(j).into_owned()).collect();
    let mut out_names = names.to_vec();
    if rule != InteractionRule::None {
        for j in 0..p0 {
            if rule == InteractionRule::PairsAndSquares {
                cols.push(x.column(j).component_mul(&x.column(j)));
                out_names.push(format!("{}^2", names[j]));
            }
            for k in j + 1..p0 {
                cols.push(x.column(j).component_mul(&x.column(k)));
                out_names.push(format!("{}:{}", names[j], names[k]));
            }
        }
    }
    let m = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
    (m, out_names)
}

/// Centres the response and scales every (expanded) predictor to mean 0 and
/// unit sample standard deviation (denominator `n - 1`). Constant columns
/// are dropped with a warning.
pub fn standardize(dataset: &Dataset, rule: InteractionRule) -> Result<Standardized> {
    let n = dataset.n();
    if n < 2 {
        return Err(Error::Config(format!("need at least 2 rows, got {n}")));
    }
    let (x, names) = expand(&dataset.x_raw, &dataset.column_names, rule);

    let mut keep = Vec::new();
    let mut dropped = Vec::new();
    let mut means = Vec::new();
    let mut sds = Vec::new();
    for (j, name) in names.iter().enumerate() {
        let col = x.column(j);
        let mean = col.mean();
        let ss: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
        let sd = (ss / (n - 1) as f64).sqrt();
        // relative test so that a rounding-level spread still counts as constant
        if !(sd > 1e-12 * mean.abs().max(f64::MIN_POSITIVE)) {
            warn!("{}: dropping constant column '{name}'", dataset.name);
            dropped.push(name.clone());
            continue;
        }
        keep.push(j);
        means.push(mean);
        sds.push(sd);
    }
    if keep.is_empty() {
        return Err(Error::Config("every predictor is constant".into()));
    }

    let xs = DMatrix::from_fn(n, keep.len(), |i, k| (x[(i, keep[k])] - means[k]) / sds[k]);
    let y_mean = dataset.y_raw.mean();
    let y = dataset.y_raw.map(|v| v - y_mean);
    Ok(Standardized {
        data: RegressionData::new(xs, y)?,
        column_names: keep.iter().map(|&j| names[j].clone()).collect(),
        dropped_columns: dropped,
        y_mean,
        x_means: means,
        x_sds: sds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Design {
    IidNormal,
    /// Gaussian rows with `corr(x_j, x_k) = ρ^|j-k|`.
    Correlated(f64),
}

/// `y = Xβ* + σ* ε` with `ε ~ N(0, I)`, fully determined by `seed`.
pub fn synth_regression(
    n: usize,
    beta_true: &[f64],
    sigma_true: f64,
    design: Design,
    seed: u64,
) -> Result<Dataset> {
    let p = beta_true.len();
    if n == 0 || p == 0 {
        return Err(Error::Config("n and p must be at least 1".into()));
    }
    if !(sigma_true >= 0.0 && sigma_true.is_finite()) {
        return Err(Error::domain("sigma_true", sigma_true, "finite and non-negative"));
    }
    let rho = match design {
        Design::IidNormal => 0.0,
        Design::Correlated(r) if r.abs() < 1.0 => r,
        Design::Correlated(r) => return Err(Error::domain("rho", r, "in (-1, 1)")),
    };
    let mut rng = RngStream::new(seed);
    let innov = (1.0 - rho * rho).sqrt();
    let mut x = DMatrix::zeros(n, p);
    for i in 0..n {
        let mut prev = standard_normal(&mut rng);
        x[(i, 0)] = prev;
        for j in 1..p {
            prev = rho * prev + innov * standard_normal(&mut rng);
            x[(i, j)] = prev;
        }
    }
    let beta = DVector::from_column_slice(beta_true);
    let noise = DVector::from_fn(n, |_, _| standard_normal(&mut rng));
    let y = &x * beta + noise * sigma_true;
    Ok(Dataset {
        name: format!("synth_n{n}_p{p}"),
        response_name: "y".into(),
        y_raw: y,
        x_raw: x,
        column_names: (1..=p).map(|j| format!("x{j}")).collect(),
        dropped_rows: 0,
    })
}
