//! Draw files and run manifests.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use bayes_lasso::gibbs::ChainOutput;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

const BIN_MAGIC: &[u8; 8] = b"BLDRAWS1";

/// Output directory: the flag, else `$BLASSO_OUT_DIR`, else `blasso-out`.
pub fn resolve_out_dir(flag: Option<&Path>) -> PathBuf {
    match flag {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os("BLASSO_OUT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("blasso-out")),
    }
}

pub fn draw_columns(beta_names: &[String]) -> Vec<String> {
    let mut cols = beta_names.to_vec();
    cols.push("sigma2".into());
    cols.push("lambda2".into());
    cols
}

fn draw_value(chain: &ChainOutput, row: usize, col: usize) -> f64 {
    let p = chain.p();
    match col {
        c if c < p => chain.beta_draws[(row, c)],
        c if c == p => chain.sigma2_draws[row],
        _ => chain.lambda2_draws[row],
    }
}

/// One row per draw; values print in their shortest exact form.
pub fn write_draws_csv(path: &Path, chain: &ChainOutput, columns: &[String]) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", columns.join(","))?;
    let mut line = String::new();
    for row in 0..chain.n_samples() {
        line.clear();
        for col in 0..columns.len() {
            if col > 0 {
                line.push(',');
            }
            line.push_str(&draw_value(chain, row, col).to_string());
        }
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

/// Columnar little-endian layout: magic, row and column counts (u64), each
/// column name as a u32 length plus UTF-8 bytes, then every column's f64
/// values in turn.
pub fn write_draws_bin(path: &Path, chain: &ChainOutput, columns: &[String]) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(BIN_MAGIC)?;
    w.write_all(&(chain.n_samples() as u64).to_le_bytes())?;
    w.write_all(&(columns.len() as u64).to_le_bytes())?;
    for name in columns {
        w.write_all(&(name.len() as u32).to_le_bytes())?;
        w.write_all(name.as_bytes())?;
    }
    for col in 0..columns.len() {
        for row in 0..chain.n_samples() {
            w.write_all(&draw_value(chain, row, col).to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_draws_bin`] as `(names, columns)`.
pub fn read_draws_bin(path: &Path) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = BufReader::new(File::open(path)?);
    let bad = |what: &str| CliError::Io(format!("{}: {what}", path.display()));
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != BIN_MAGIC {
        return Err(bad("not a draws file"));
    }
    let mut u64buf = [0u8; 8];
    r.read_exact(&mut u64buf)?;
    let rows = u64::from_le_bytes(u64buf) as usize;
    r.read_exact(&mut u64buf)?;
    let cols = u64::from_le_bytes(u64buf) as usize;
    let mut names = Vec::with_capacity(cols);
    for _ in 0..cols {
        let mut len = [0u8; 4];
        r.read_exact(&mut len)?;
        let mut bytes = vec![0u8; u32::from_le_bytes(len) as usize];
        r.read_exact(&mut bytes)?;
        names.push(String::from_utf8(bytes).map_err(|_| bad("column name is not UTF-8"))?);
    }
    let mut data = Vec::with_capacity(cols);
    for _ in 0..cols {
        let mut col = Vec::with_capacity(rows);
        for _ in 0..rows {
            r.read_exact(&mut u64buf)?;
            col.push(f64::from_le_bytes(u64buf));
        }
        data.push(col);
    }
    Ok((names, data))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn unix_seconds() -> f64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
