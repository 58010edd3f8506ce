//! The file-driven commands: posteriors, Viterbi decoding, LF-MMI and
//! synthetic data generation.

use std::fs;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sfb_core::fsm::{load_graph, random_graph, save_graph, GraphKind, WeightedGraph};
use sfb_core::inference::{forward_backward, viterbi, LikelihoodTensor};
use sfb_core::lfmmi::lfmmi;
use sfb_core::semiring::{LogWeight, ProbWeight, Semiring};

use crate::container::{read_matrix, write_matrix, MatrixFile, ScalarCode};

/// ≥ 12 significant digits, parseable back into an identical f64 for the
/// magnitudes at hand.
pub fn format_score(value: f64) -> String {
    format!("{value:.14e}")
}

pub fn load_graph_file(path: &Path) -> Result<WeightedGraph<LogWeight>> {
    let file = File::open(path).with_context(|| format!("opening graph {}", path.display()))?;
    load_graph(BufReader::new(file)).with_context(|| format!("parsing graph {}", path.display()))
}

fn tensor_from_matrix(m: &MatrixFile, path: &Path) -> Result<LikelihoodTensor<LogWeight>> {
    LikelihoodTensor::from_log_probs(m.rows, m.cols, &m.values)
        .with_context(|| format!("invalid log-likelihoods in {}", path.display()))
}

pub fn cmd_fb(
    graph_path: &Path,
    lik_path: &Path,
    out_path: &Path,
    use_prob_domain: bool,
) -> Result<()> {
    let graph = load_graph_file(graph_path)?;
    let matrix = read_matrix(lik_path)?;
    let tensor = tensor_from_matrix(&matrix, lik_path)?;

    let (posterior_probs, log_z) = if use_prob_domain {
        let pgraph: WeightedGraph<ProbWeight> = graph
            .convert()
            .context("graph does not fit the probability domain")?;
        let ptensor: LikelihoodTensor<ProbWeight> = tensor
            .convert()
            .context("likelihoods do not fit the probability domain")?;
        let (gammas, z) = forward_backward(&pgraph, &ptensor)?;
        (gammas.probabilities(), z.to_log_prob())
    } else {
        let (gammas, z) = forward_backward(&graph, &tensor)?;
        (gammas.probabilities(), z.value())
    };

    write_matrix(
        out_path,
        matrix.scalar,
        posterior_probs.rows(),
        posterior_probs.cols(),
        posterior_probs.data(),
    )?;
    println!("{}", format_score(log_z));
    Ok(())
}

pub fn cmd_viterbi(graph_path: &Path, lik_path: &Path) -> Result<()> {
    let graph = load_graph_file(graph_path)?;
    let matrix = read_matrix(lik_path)?;
    let tensor = tensor_from_matrix(&matrix, lik_path)?;
    let best = viterbi(&graph, &tensor)?;
    let states: Vec<String> = best.states.iter().map(ToString::to_string).collect();
    println!("{}", states.join(" "));
    println!("{}", format_score(best.score.value()));
    Ok(())
}

pub fn cmd_lfmmi(
    num_path: &Path,
    den_path: &Path,
    lik_path: &Path,
    grad_path: &Path,
) -> Result<()> {
    let num = load_graph_file(num_path)?;
    let den = load_graph_file(den_path)?;
    let matrix = read_matrix(lik_path)?;
    let tensor = tensor_from_matrix(&matrix, lik_path)?;
    let out = lfmmi(&num, &den, &tensor)?;
    write_matrix(
        grad_path,
        matrix.scalar,
        out.grad.rows(),
        out.grad.cols(),
        out.grad.data(),
    )?;
    println!("{}", format_score(out.loss));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_gen(
    kind: GraphKind,
    states: usize,
    arcs: usize,
    frames: usize,
    seed: u64,
    lik_range: (f64, f64),
    scalar: ScalarCode,
    graph_out: &Path,
    lik_out: &Path,
) -> Result<()> {
    let (lo, hi) = lik_range;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        bail!("likelihood range [{lo}, {hi}) is not a valid interval");
    }
    if frames == 0 {
        bail!("frame count must be positive");
    }
    let graph = random_graph(states, arcs, seed, kind)?;
    fs::write(graph_out, save_graph(&graph))
        .with_context(|| format!("writing graph {}", graph_out.display()))?;
    let values = gen_likelihood_values(states, frames, seed, lo, hi);
    write_matrix(lik_out, scalar, states, frames, &values)?;
    Ok(())
}

/// Pseudo-loglikelihoods, uniform in [lo, hi); independent stream from the
/// graph weights so graph and likelihood files can be regenerated separately.
pub fn gen_likelihood_values(
    states: usize,
    frames: usize,
    seed: u64,
    lo: f64,
    hi: f64,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_11c5_0000_0001);
    (0..states * frames)
        .map(|_| rng.random_range(lo..hi))
        .collect()
}
