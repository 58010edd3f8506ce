//! Mini-batch benchmark: replicate one graph, time the batched recursion.

use std::time::Instant;

use anyhow::{bail, Result};
use serde::Serialize;

use sfb_core::fsm::{random_graph, replicate, GraphKind};
use sfb_core::inference::{forward_backward_batch, LikelihoodTensor};
use sfb_core::semiring::LogWeight;

use crate::commands::gen_likelihood_values;

#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub kind: String,
    #[serde(rename = "K")]
    pub states: usize,
    pub arcs: usize,
    pub batch: usize,
    pub frames: usize,
    pub reps: usize,
    pub median_s: f64,
    pub spread_s: f64,
    pub nnz_per_s: f64,
}

impl BenchRecord {
    pub const CSV_HEADER: &'static str =
        "kind,K,arcs,batch,frames,reps,median_s,spread_s,nnz_per_s";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.kind,
            self.states,
            self.arcs,
            self.batch,
            self.frames,
            self.reps,
            self.median_s,
            self.spread_s,
            self.nnz_per_s
        )
    }
}

/// Stored entries of the composed transition matrix, times frames, times
/// repetitions, per second of total wall time.
pub fn nnz_rate(nnz_composed: usize, frames: usize, reps: usize, total_seconds: f64) -> f64 {
    (nnz_composed as f64) * (frames as f64) * (reps as f64) / total_seconds
}

fn median_and_spread(durations: &mut [f64]) -> (f64, f64) {
    durations.sort_by(|a, b| a.partial_cmp(b).expect("durations are finite"));
    let n = durations.len();
    let median = if n % 2 == 1 {
        durations[n / 2]
    } else {
        0.5 * (durations[n / 2 - 1] + durations[n / 2])
    };
    (median, durations[n - 1] - durations[0])
}

/// Rough peak-memory estimate of the batched recursion, in bytes: α and β
/// lattices plus stacked and per-member likelihoods plus returned posteriors.
pub fn estimate_bytes(states: usize, batch: usize, frames: usize) -> u64 {
    let aug_states = (states + 1) as u64 * batch as u64;
    let steps = frames as u64 + 1;
    let lattices = 2 * aug_states * steps * 8;
    let stacked = aug_states * steps * 8;
    let member_payloads = 2 * (states as u64) * (batch as u64) * (frames as u64) * 8;
    lattices + stacked + member_payloads
}

pub struct BenchConfig {
    pub kind: GraphKind,
    pub states: usize,
    pub arcs: usize,
    pub batch: usize,
    pub frames: usize,
    pub reps: usize,
    pub seed: u64,
    pub mem_limit_bytes: u64,
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchRecord> {
    if config.reps < 3 {
        bail!(
            "need at least 3 repetitions for a meaningful median, got {}",
            config.reps
        );
    }
    if config.batch == 0 {
        bail!("batch size must be positive");
    }
    let estimate = estimate_bytes(config.states, config.batch, config.frames);
    if estimate > config.mem_limit_bytes {
        bail!(
            "estimated memory requirement {:.2} GiB exceeds the limit of {:.2} GiB \
             (use --mem-limit-gb to raise it or --scale/--batch to shrink the run)",
            estimate as f64 / (1u64 << 30) as f64,
            config.mem_limit_bytes as f64 / (1u64 << 30) as f64
        );
    }

    let graph = random_graph(config.states, config.arcs, config.seed, config.kind)?;
    let batch_graph = replicate(&graph, config.batch, config.frames)?;

    // Fresh pseudo-loglikelihoods for this run, drawn outside the timer.
    let tensors: Vec<LikelihoodTensor<LogWeight>> = (0..config.batch)
        .map(|member| {
            let values = gen_likelihood_values(
                config.states,
                config.frames,
                config.seed.wrapping_add(member as u64 + 1),
                -10.0,
                0.0,
            );
            LikelihoodTensor::from_log_probs(config.states, config.frames, &values)
                .expect("generated likelihoods are finite")
        })
        .collect();

    let mut durations = Vec::with_capacity(config.reps);
    for _ in 0..config.reps {
        let started = Instant::now();
        let results = forward_backward_batch(&batch_graph, &tensors)?;
        durations.push(started.elapsed().as_secs_f64());
        drop(results);
    }
    let total: f64 = durations.iter().sum();
    let (median_s, spread_s) = median_and_spread(&mut durations);

    Ok(BenchRecord {
        kind: config.kind.to_string(),
        states: config.states,
        arcs: config.arcs,
        batch: config.batch,
        frames: config.frames,
        reps: config.reps,
        median_s,
        spread_s,
        nnz_per_s: nnz_rate(
            batch_graph.composed().num_arcs(),
            config.frames,
            config.reps,
            total,
        ),
    })
}
