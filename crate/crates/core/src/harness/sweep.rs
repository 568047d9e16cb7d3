use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::fmt_float;
use super::run::compute;
use crate::error::{Error, Result};

/// One output row: the swept value, a time, and the run's status. Failed
/// runs contribute a single row with `t` and `values` empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub t: Option<f64>,
    pub status: String,
    pub values: Vec<f64>,
}

/// Parses `0.1,0.5,0.75` or `0..4` (inclusive integer range).
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if let Some((lo, hi)) = text.split_once("..") {
        let parse = |s: &str| s.trim().parse::<i64>().map_err(|e| Error::config("--values", format!("bad range bound `{s}`: {e}")));
        let (lo, hi) = (parse(lo)?, parse(hi)?);
        if hi < lo {
            return Err(Error::config("--values", format!("empty range {lo}..{hi}")));
        }
        return Ok((lo..=hi).map(|v| v as f64).collect());
    }
    let values = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::config("--values", format!("bad number `{}`: {e}", s.trim()))))
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::config("--values", "no values given"));
    }
    Ok(values)
}

/// Sets a dotted path such as `analysis.0.s` to `value`. Integer leaves
/// stay integers; a missing leaf inside an existing table is inserted.
/// Returns the edited config as TOML text.
fn set_path(cfg: &ExperimentConfig, path: &str, value: f64) -> Result<String> {
    let mut root = toml::Value::try_from(cfg).map_err(|e| Error::config(path, e.to_string()))?;
    let segments: Vec<&str> = path.split('.').collect();
    let (leaf, parents) = segments.split_last().ok_or_else(|| Error::config(path, "empty parameter path"))?;
    let mut node = &mut root;
    for seg in parents {
        node = match node {
            toml::Value::Table(t) => t.get_mut(*seg),
            toml::Value::Array(a) => seg.parse::<usize>().ok().and_then(|i| a.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| Error::config(path, format!("segment `{seg}` does not resolve")))?;
    }
    let slot = match node {
        toml::Value::Table(t) => t.entry(leaf.to_string()).or_insert(toml::Value::Float(value)),
        toml::Value::Array(a) => leaf
            .parse::<usize>()
            .ok()
            .and_then(|i| a.get_mut(i))
            .ok_or_else(|| Error::config(path, format!("index `{leaf}` out of range")))?,
        _ => return Err(Error::config(path, format!("segment `{leaf}` does not resolve"))),
    };
    *slot = match slot {
        toml::Value::Integer(_) => {
            if value.fract() != 0.0 {
                return Err(Error::config(path, format!("expects an integer, got {value}")));
            }
            toml::Value::Integer(value as i64)
        }
        toml::Value::Float(_) => toml::Value::Float(value),
        other => return Err(Error::config(path, format!("is not numeric ({})", other.type_str()))),
    };
    toml::to_string(&root).map_err(|e| Error::config(path, e.to_string()))
}

/// Header for the wide table: analysis columns are prefixed `a{k}_`.
fn header(cfg: &ExperimentConfig) -> Vec<String> {
    let mut cols = vec!["value".to_string(), "t".to_string(), "status".to_string()];
    let probe = ExperimentConfig { t_grid: super::config::TimeGrid { points: 2, ..cfg.t_grid }, ..cfg.clone() };
    if let Ok(data) = compute(&probe) {
        for (k, a) in data.analyses.iter().enumerate() {
            cols.extend(a.columns().iter().filter(|c| **c != "t").map(|c| format!("a{k}_{c}")));
        }
    } else {
        for k in 0..cfg.analysis.len() {
            cols.extend(crate::expectations::UncertaintyRecord::COLUMNS[1..].iter().map(|c| format!("a{k}_{c}")));
        }
    }
    cols
}

fn one(text: &str, value: f64) -> Vec<SweepRow> {
    let data = ExperimentConfig::from_toml_str(text).and_then(|c| compute(&c));
    match data {
        Ok(data) => (0..data.times.len())
            .map(|i| {
                let values = data.analyses.iter().flat_map(|a| a.row(i).into_iter().skip(1)).collect();
                SweepRow { value, t: Some(data.times[i]), status: "ok".into(), values }
            })
            .collect(),
        Err(e) => vec![SweepRow { value, t: None, status: e.to_string(), values: Vec::new() }],
    }
}

/// Runs one configuration per value. Failures become rows; the sweep goes on.
pub fn sweep_rows(cfg: &ExperimentConfig, path: &str, values: &[f64], parallel: bool) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::config("--values", "no values given"));
    }
    // a path that cannot take the value is a validation error, not a row failure
    let jobs = values.iter().map(|&v| Ok((set_path(cfg, path, v)?, v))).collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<SweepRow>> = if parallel {
        jobs.par_iter().map(|(text, v)| one(text, *v)).collect()
    } else {
        jobs.iter().map(|(text, v)| one(text, *v)).collect()
    };
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_sweep(cfg: &ExperimentConfig, rows: &[SweepRow], out: &Path) -> Result<()> {
    let header = header(cfg);
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).flexible(true).from_path(out)?;
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![fmt_float(r.value), r.t.map(fmt_float).unwrap_or_default(), r.status.clone()];
        rec.extend(r.values.iter().map(|v| fmt_float(*v)));
        rec.resize(header.len().max(rec.len()), String::new());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Parallel sweep written to `<out_dir>/sweep.csv`. Returns the path and
/// the number of failed runs.
pub fn sweep(cfg: &ExperimentConfig, path: &str, values: &[f64], out_dir: &Path) -> Result<(PathBuf, usize)> {
    let rows = sweep_rows(cfg, path, values, true)?;
    std::fs::create_dir_all(out_dir)?;
    let file = out_dir.join("sweep.csv");
    write_sweep(cfg, &rows, &file)?;
    let failed = rows.iter().filter(|r| r.status != "ok").count();
    Ok((file, failed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_parse() {
        assert_eq!(parse_values("0.1, 0.5,0.75").unwrap(), vec![0.1, 0.5, 0.75]);
        assert_eq!(parse_values("0..4").unwrap(), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert!(parse_values("").is_err());
        assert!(parse_values("a").is_err());
    }
}
