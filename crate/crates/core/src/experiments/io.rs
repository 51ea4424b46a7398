//! Reading and writing experiment artifacts.

use std::fs::File;
use std::path::Path;

use serde::Serialize;

use super::HistogramBin;
use crate::error::{Error, Result};
use crate::sampler::{SolverStats, Trace};

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = File::create(path)?;
    serde_json::to_writer_pretty(f, value)?;
    Ok(())
}

/// One row per kept sample: `iteration`, the parameters, `log_posterior`.
pub fn write_trace_csv(path: &Path, trace: &Trace, names: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["iteration".to_string()];
    header.extend(names.iter().cloned());
    header.push("log_posterior".into());
    w.write_record(&header)?;
    for (i, (s, lp)) in trace.samples.iter().zip(&trace.log_posts).enumerate() {
        let mut row = vec![(trace.burn_in + i).to_string()];
        row.extend(s.iter().map(|v| v.to_string()));
        row.push(lp.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a trace written by [`write_trace_csv`]. Returns the parameter names
/// and a trace whose timing and solver fields are zero.
pub fn read_trace_csv(path: &Path) -> Result<(Vec<String>, Trace)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.len() < 3 || &header[0] != "iteration" || &header[header.len() - 1] != "log_posterior" {
        return Err(Error::Config(format!("{} is not a trace file", path.display())));
    }
    let names: Vec<String> = header.iter().skip(1).take(header.len() - 2).map(String::from).collect();
    let mut samples = Vec::new();
    let mut log_posts = Vec::new();
    let mut burn_in = None;
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec[i].parse::<f64>().map_err(|e| Error::Config(format!("bad number {:?}: {e}", &rec[i])))
        };
        if burn_in.is_none() {
            burn_in = Some(parse(0)? as usize);
        }
        samples.push((1..=names.len()).map(parse).collect::<Result<Vec<_>>>()?);
        log_posts.push(parse(names.len() + 1)?);
    }
    let trace = Trace {
        samples,
        log_posts,
        acceptance_rate: 0.0,
        wall_time: 0.0,
        solver_stats: SolverStats::default(),
        scale_history: Vec::new(),
        burn_in: burn_in.unwrap_or(0),
        seed: 0,
    };
    Ok((names, trace))
}

pub fn write_histogram_csv(path: &Path, rows: &[HistogramBin]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let trace = Trace {
            samples: vec![vec![1.0, 2.5], vec![0.1, 1e-300]],
            log_posts: vec![-3.0, -2.25],
            acceptance_rate: 0.2,
            wall_time: 1.0,
            solver_stats: SolverStats::default(),
            scale_history: vec![],
            burn_in: 10,
            seed: 1,
        };
        let names = vec!["r".to_string(), "K".to_string()];
        write_trace_csv(&path, &trace, &names).unwrap();
        let (n, back) = read_trace_csv(&path).unwrap();
        assert_eq!(n, names);
        assert_eq!(back.samples, trace.samples);
        assert_eq!(back.log_posts, trace.log_posts);
        assert_eq!(back.burn_in, 10);
    }
}
