//! Benchmark harness: generates seeded instances, times the Hamiltonian
//! solver against the grid oracle, and serializes per-instance records plus
//! per-size aggregates as CSV.
//!
//! Timing covers the gain computation only; generation and I/O are outside
//! the timers. Values are deterministic for a fixed base seed, so repeated
//! runs differ only in the timing columns.

use std::path::{Path, PathBuf};
use std::time::Instant;

use oog::{
    GridSpec, SolverConfig, compute_rcoog, grid_rcoog,
    sysgen::{self, NetworkSpec, RandomSystemSpec},
};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Random,
    Network,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Random => "random",
            Family::Network => "network",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Hamiltonian,
    Grid,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Hamiltonian => "hamiltonian",
            Method::Grid => "grid",
        }
    }
}

/// One timed gain computation on one instance.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub instance_id: String,
    pub n_x: usize,
    pub method: Method,
    pub value: f64,
    pub wall_time: f64,
    pub iterations: usize,
    pub correct: bool,
    pub error: Option<String>,
}

/// Per-size aggregate of one method, the quantities the experiment plots.
#[derive(Debug, Clone)]
pub struct SizeSummary {
    pub n_x: usize,
    pub method: Method,
    pub tavg: f64,
    pub tmin: f64,
    pub tmax: f64,
    pub accuracy: f64,
}

pub struct SuiteParams {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub instances: usize,
    pub base_seed: u64,
    pub epsilon: f64,
    pub tol_gamma: f64,
    pub grid_points: usize,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Deterministic per-instance seed stream: one splitmix64 step over the
/// base seed combined with the size and instance indices.
pub fn derive_seed(base: u64, size: u64, index: u64) -> u64 {
    splitmix64(base ^ (size << 32) ^ index)
}

fn run_instance(params: &SuiteParams, size: usize, idx: usize) -> Vec<BenchRecord> {
    let seed = derive_seed(params.base_seed, size as u64, idx as u64);
    let instance_id = format!("{}-n{size:04}-i{idx:04}", params.family.name());
    let plant = match params.family {
        Family::Random => sysgen::random_stable_plant(&RandomSystemSpec::new(size, seed)),
        Family::Network => sysgen::networked_plant(&NetworkSpec::new(size, seed)),
    };
    let plant = match plant {
        Ok(p) => p,
        Err(e) => {
            return vec![BenchRecord {
                instance_id,
                n_x: size,
                method: Method::Hamiltonian,
                value: f64::NAN,
                wall_time: 0.0,
                iterations: 0,
                correct: false,
                error: Some(e.to_string()),
            }];
        }
    };

    let cfg = SolverConfig {
        epsilon: params.epsilon,
        tol_gamma: params.tol_gamma,
        ..SolverConfig::default()
    };
    let grid = GridSpec {
        n_points: params.grid_points,
        ..GridSpec::default()
    };

    let started = Instant::now();
    let solver = compute_rcoog(&plant, &cfg);
    let t_solver = started.elapsed().as_secs_f64();
    let started = Instant::now();
    let oracle = grid_rcoog(&plant, params.epsilon, &grid);
    let t_oracle = started.elapsed().as_secs_f64();

    let grid_value = oracle.as_ref().map(|&(v, _)| v).ok();
    let solver_record = match &solver {
        Ok(r) => BenchRecord {
            instance_id: instance_id.clone(),
            n_x: size,
            method: Method::Hamiltonian,
            value: r.value,
            wall_time: t_solver,
            iterations: r.iterations,
            correct: grid_value.map(|g| r.value >= 0.95 * g).unwrap_or(false),
            error: None,
        },
        Err(e) => BenchRecord {
            instance_id: instance_id.clone(),
            n_x: size,
            method: Method::Hamiltonian,
            value: f64::NAN,
            wall_time: t_solver,
            iterations: 0,
            correct: false,
            error: Some(e.to_string()),
        },
    };
    let oracle_record = match &oracle {
        Ok((v, _)) => BenchRecord {
            instance_id,
            n_x: size,
            method: Method::Grid,
            value: *v,
            wall_time: t_oracle,
            iterations: params.grid_points,
            correct: true,
            error: None,
        },
        Err(e) => BenchRecord {
            instance_id,
            n_x: size,
            method: Method::Grid,
            value: f64::NAN,
            wall_time: t_oracle,
            iterations: 0,
            correct: false,
            error: Some(e.to_string()),
        },
    };
    vec![solver_record, oracle_record]
}

pub fn run_suite(params: &SuiteParams) -> oog::Result<(Vec<BenchRecord>, Vec<SizeSummary>)> {
    if params.sizes.is_empty() || params.instances == 0 {
        return Err(oog::Error::GenerationFailed(
            "bench needs at least one size and one instance".into(),
        ));
    }
    let work: Vec<(usize, usize)> = params
        .sizes
        .iter()
        .flat_map(|&s| (0..params.instances).map(move |i| (s, i)))
        .collect();
    let mut records: Vec<BenchRecord> = work
        .par_iter()
        .flat_map_iter(|&(size, idx)| run_instance(params, size, idx))
        .collect();
    records.sort_by(|x, y| {
        (x.n_x, &x.instance_id, x.method.name()).cmp(&(y.n_x, &y.instance_id, y.method.name()))
    });

    let mut summaries = Vec::new();
    for &size in &params.sizes {
        for method in [Method::Grid, Method::Hamiltonian] {
            let group: Vec<&BenchRecord> = records
                .iter()
                .filter(|r| r.n_x == size && r.method == method && r.error.is_none())
                .collect();
            if group.is_empty() {
                continue;
            }
            let times: Vec<f64> = group.iter().map(|r| r.wall_time).collect();
            let n_ok = group.iter().filter(|r| r.correct).count();
            summaries.push(SizeSummary {
                n_x: size,
                method,
                tavg: times.iter().sum::<f64>() / times.len() as f64,
                tmin: times.iter().copied().fold(f64::INFINITY, f64::min),
                tmax: times.iter().copied().fold(0.0, f64::max),
                accuracy: n_ok as f64 / group.len() as f64,
            });
        }
    }
    Ok((records, summaries))
}

pub fn records_csv(records: &[BenchRecord]) -> String {
    let mut csv = String::from("instance_id,n_x,method,value,wall_time,iterations,correct,error\n");
    for r in records {
        csv.push_str(&format!(
            "{},{},{},{:?},{:.6},{},{},{}\n",
            r.instance_id,
            r.n_x,
            r.method.name(),
            r.value,
            r.wall_time,
            r.iterations,
            r.correct,
            r.error.as_deref().unwrap_or("")
        ));
    }
    csv
}

pub fn summary_csv(summaries: &[SizeSummary]) -> String {
    let mut csv = String::from("n_x,method,tavg,tmin,tmax,accuracy\n");
    for s in summaries {
        csv.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6},{:?}\n",
            s.n_x,
            s.method.name(),
            s.tavg,
            s.tmin,
            s.tmax,
            s.accuracy
        ));
    }
    csv
}

pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "bench".into());
    let ext = out
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    out.with_file_name(format!("{stem}-summary.{ext}"))
}
