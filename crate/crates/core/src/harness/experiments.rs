use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentKind};
use super::ks::ks_statistic;
use crate::comparison::{compare_f2, theoretical_power};
use crate::error::{Error, Result};
use crate::inference::{interval_from_ustats, CiVariant, UStats};
use crate::numeric::{binomial_quantile, format_g17, mean, sample_variance};
use crate::sequence::dims_for_index;
use crate::wbedd::{sample_network, theoretical_variances, WbeddParams};

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of replicate `r` at step index `N`.
pub fn replicate_seed(master_seed: u64, n_index: usize, replicate: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ n_index as u64) ^ replicate as u64)
}

fn sub_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ tag.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

fn simulate(params: &WbeddParams, c: f64, n_index: usize, seed: u64) -> Result<crate::BipartiteNetwork> {
    let (m, n) = dims_for_index(c, n_index)?;
    sample_network(params, m, n, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub n_index: usize,
    pub variant: CiVariant,
    pub covered_freq: f64,
    /// Replicates whose interval could not be built; scored as non-covering.
    pub invalid_count: usize,
    pub binom_lo: f64,
    pub binom_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionRow {
    pub n_index: usize,
    pub mean_theta: f64,
    pub var_theta: f64,
    pub ks_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerRow {
    pub n_index: usize,
    pub f2_b: f64,
    pub reject_freq: f64,
    /// `1 − reject_freq`; replicates where the statistic is undefined (an
    /// all-zero network or a nonpositive combined variance) land here.
    pub accept_freq: f64,
    pub psi_theoretical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ExperimentOutput {
    Coverage(Vec<CoverageRow>),
    Distribution(Vec<DistributionRow>),
    Power(Vec<PowerRow>),
}

impl ExperimentOutput {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            ExperimentOutput::Coverage(rows) => {
                out.push_str("N,variant,covered_freq,invalid_count,binom_lo,binom_hi\n");
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        r.n_index,
                        r.variant,
                        format_g17(r.covered_freq),
                        r.invalid_count,
                        format_g17(r.binom_lo),
                        format_g17(r.binom_hi)
                    );
                }
            }
            ExperimentOutput::Distribution(rows) => {
                out.push_str("N,mean_theta,var_theta,ks_D\n");
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        r.n_index,
                        format_g17(r.mean_theta),
                        format_g17(r.var_theta),
                        format_g17(r.ks_d)
                    );
                }
            }
            ExperimentOutput::Power(rows) => {
                out.push_str("N,f2_b,reject_freq,accept_freq,psi_theoretical\n");
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        r.n_index,
                        format_g17(r.f2_b),
                        format_g17(r.reject_freq),
                        format_g17(r.accept_freq),
                        format_g17(r.psi_theoretical)
                    );
                }
            }
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv()).map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    match config.experiment {
        ExperimentKind::Coverage => run_coverage_experiment(config).map(ExperimentOutput::Coverage),
        ExperimentKind::Distribution => {
            run_distribution_experiment(config).map(ExperimentOutput::Distribution)
        }
        ExperimentKind::Power => run_power_experiment(config).map(ExperimentOutput::Power),
    }
}

#[derive(Clone, Copy)]
enum Scored {
    Covered,
    Missed,
    Invalid,
}

/// Frequency with which each interval variant contains the true `F₂`.
pub fn run_coverage_experiment(config: &ExperimentConfig) -> Result<Vec<CoverageRow>> {
    config.validate()?;
    let params = config.params.wbedd()?;
    let truth = config.params.truth()?;
    let c = config.params.c;
    let k = config.replicates;
    let variants = &config.ci_variants;

    let outcomes = config.execution.map_indexed(config.n_index_list.len() * k, |job| {
        let n_index = config.n_index_list[job / k];
        let seed = replicate_seed(config.master_seed, n_index, job % k);
        let y = simulate(&params, c, n_index, seed)?;
        let u = UStats::compute(&y);
        Ok(variants
            .iter()
            .map(|&v| {
                let interval = u.as_ref().map_err(|_| ()).and_then(|u| {
                    interval_from_ustats(u, y.n_index(), y.c_hat(), config.alpha, v, Some(&truth))
                        .map_err(|_| ())
                });
                match interval {
                    Ok(i) if i.contains(truth.moments.f2) => Scored::Covered,
                    Ok(_) => Scored::Missed,
                    Err(()) => Scored::Invalid,
                }
            })
            .collect::<Vec<_>>())
    });
    let outcomes: Vec<Vec<Scored>> = outcomes.into_iter().collect::<Result<_>>()?;

    let level = 1.0 - config.alpha;
    let band_lo = binomial_quantile(k as u64, level, config.alpha / 2.0) as f64 / k as f64;
    let band_hi = binomial_quantile(k as u64, level, 1.0 - config.alpha / 2.0) as f64 / k as f64;

    let mut rows = Vec::new();
    for (ni, &n_index) in config.n_index_list.iter().enumerate() {
        let block = &outcomes[ni * k..(ni + 1) * k];
        for (vi, &variant) in variants.iter().enumerate() {
            let covered = block.iter().filter(|o| matches!(o[vi], Scored::Covered)).count();
            let invalid = block.iter().filter(|o| matches!(o[vi], Scored::Invalid)).count();
            rows.push(CoverageRow {
                n_index,
                variant,
                covered_freq: covered as f64 / k as f64,
                invalid_count: invalid,
                binom_lo: band_lo,
                binom_hi: band_hi,
            });
        }
    }
    Ok(rows)
}

/// `θ̂` replicates for one step index, in replicate order. Replicates where
/// `θ̂` is undefined (`U^{h2} = 0`) are dropped.
pub(crate) fn theta_replicates(config: &ExperimentConfig, n_index: usize) -> Result<Vec<f64>> {
    let params = config.params.wbedd()?;
    let c = config.params.c;
    let draws = config.execution.map_indexed(config.replicates, |r| {
        let seed = replicate_seed(config.master_seed, n_index, r);
        match UStats::compute(&simulate(&params, c, n_index, seed)?)?.theta() {
            Ok(t) => Ok(Some(t)),
            Err(Error::Degenerate(_)) => Ok(None),
            Err(e) => Err(e),
        }
    });
    let mut thetas = Vec::with_capacity(draws.len());
    for d in draws {
        thetas.extend(d?);
    }
    if thetas.is_empty() {
        return Err(Error::Degenerate(format!("θ̂ is undefined in every replicate at N = {n_index}")));
    }
    Ok(thetas)
}

/// Sampling distribution of `θ̂` against `Normal(F₂, V^δ/N)`.
pub fn run_distribution_experiment(config: &ExperimentConfig) -> Result<Vec<DistributionRow>> {
    config.validate()?;
    let truth = config.params.truth()?;
    let v_delta = theoretical_variances(truth.lambda, &truth.moments, truth.c)?.v_delta;
    config
        .n_index_list
        .iter()
        .map(|&n_index| {
            let thetas = theta_replicates(config, n_index)?;
            Ok(DistributionRow {
                n_index,
                mean_theta: mean(&thetas),
                var_theta: sample_variance(&thetas),
                ks_d: ks_statistic(&thetas, truth.moments.f2, v_delta / n_index as f64)?,
            })
        })
        .collect()
}

/// Empirical rejection rate of the two-network test over an `F₂^B` grid,
/// with each network of size `N/2`.
pub fn run_power_experiment(config: &ExperimentConfig) -> Result<Vec<PowerRow>> {
    config.validate()?;
    let params_a = config.params.wbedd()?;
    let truth_a = config.params.truth()?;
    let models_b = config.f2_b_grid.iter().map(|&f2| config.model_b(f2)).collect::<Result<Vec<_>>>()?;
    let params_b = models_b.iter().map(|m| m.wbedd()).collect::<Result<Vec<_>>>()?;

    let k = config.replicates;
    let grid = config.f2_b_grid.len();
    let decisions = config.execution.map_indexed(config.n_index_list.len() * grid * k, |job| {
        let n_index = config.n_index_list[job / (grid * k)];
        let g = (job / k) % grid;
        let seed = replicate_seed(config.master_seed, n_index, job % k);
        let half = n_index / 2;
        let y_a = simulate(&params_a, config.params.c, half, sub_seed(seed, 0xA))?;
        let y_b = simulate(&params_b[g], models_b[g].c, half, sub_seed(seed, 0xB))?;
        match compare_f2(&y_a, &y_b, config.alpha) {
            Ok(r) => Ok(r.reject),
            Err(Error::InvalidVariance { .. } | Error::Degenerate(_)) => Ok(false),
            Err(e) => Err(e),
        }
    });
    let decisions: Vec<bool> = decisions.into_iter().collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(config.n_index_list.len() * grid);
    for (ni, &n_index) in config.n_index_list.iter().enumerate() {
        for (g, &f2_b) in config.f2_b_grid.iter().enumerate() {
            let start = (ni * grid + g) * k;
            let rejects = decisions[start..start + k].iter().filter(|&&r| r).count();
            let truth_b = models_b[g].truth()?;
            rows.push(PowerRow {
                n_index,
                f2_b,
                reject_freq: rejects as f64 / k as f64,
                accept_freq: (k - rejects) as f64 / k as f64,
                psi_theoretical: theoretical_power(&truth_a, &truth_b, n_index, 0.5, config.alpha)?,
            });
        }
    }
    Ok(rows)
}
