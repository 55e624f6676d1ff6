//! Batch runs over generated instances, one CSV row per instance.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::generate::{generate_instance, GenParams};
use crate::harness::oracle::brute_force_optimal;
use crate::report::{solve_report, Algorithm, SolveOptions};

fn default_reps() -> u32 {
    SolveOptions::default().reps
}
fn default_max_guesses() -> u64 {
    SolveOptions::default().max_guesses
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub algorithm: Algorithm,
    pub instances: u64,
    /// Instance i uses seed `first_seed + i` for generation and solving.
    #[serde(default)]
    pub first_seed: u64,
    pub params: GenParams,
    #[serde(default = "default_reps")]
    pub reps: u32,
    #[serde(default = "default_max_guesses")]
    pub max_guesses: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub seed: u64,
    pub opt_radius: Option<u64>,
    pub alg_radius: Option<u64>,
    /// alg / opt; 1 when both are 0.
    pub ratio: Option<f64>,
    pub feasible: bool,
    pub wall_ms: u128,
}

pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::with_capacity(config.instances as usize);
    for i in 0..config.instances {
        let seed = config.first_seed.wrapping_add(i);
        let params = GenParams {
            seed,
            ..config.params.clone()
        };
        let instance = generate_instance(&params)?;
        let opt = brute_force_optimal(&instance)?.map(|o| o.radius);
        let opts = SolveOptions {
            seed,
            reps: config.reps,
            max_guesses: config.max_guesses,
            oracle: false,
        };
        let start = Instant::now();
        let report = solve_report(&instance, config.algorithm, &opts)?;
        let wall_ms = start.elapsed().as_millis();
        let ratio = match (report.radius, opt) {
            (Some(0), Some(0)) => Some(1.0),
            (Some(a), Some(o)) if o > 0 => Some(a as f64 / o as f64),
            (Some(_), Some(_)) => Some(f64::INFINITY),
            _ => None,
        };
        rows.push(BenchRow {
            seed,
            opt_radius: opt,
            alg_radius: report.radius,
            ratio,
            feasible: report.feasible,
            wall_ms,
        });
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_have_expected_columns() {
        let config = BenchConfig {
            algorithm: Algorithm::Knapsack7,
            instances: 3,
            first_seed: 5,
            params: GenParams::default(),
            reps: 10,
            max_guesses: 1_000_000,
        };
        let rows = run_bench(&config).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.feasible));
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("seed,opt_radius,alg_radius,ratio,feasible,wall_ms\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
