//! Two-sample test of equal row heterogeneity for independent networks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{Truth, UStats};
use crate::network::BipartiteNetwork;
use crate::numeric::{normal_cdf, two_sided_critical};
use crate::wbedd::theoretical_variances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub theta_a: f64,
    pub theta_b: f64,
    /// `θ̂_A − θ̂_B`
    pub delta_hat: f64,
    pub v_delta_a: f64,
    pub v_delta_b: f64,
    /// `V̂^δ_A/ρ + V̂^δ_B/(1−ρ)`
    pub v_hat: f64,
    pub z: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    /// `N = N_A + N_B`
    pub n_total: usize,
    /// `N_A / N`
    pub rho: f64,
}

/// Tests `F₂^A = F₂^B` with the statistic `√(N/V̂)·(θ̂_A − θ̂_B)`.
///
/// Each side's delta-method variance uses its own `ĉ`. A side whose
/// estimate is not positive is still combined; only a nonpositive combined
/// variance is an error.
pub fn compare_f2(y_a: &BipartiteNetwork, y_b: &BipartiteNetwork, alpha: f64) -> Result<ComparisonReport> {
    check_alpha(alpha)?;
    let (n_a, n_b) = (y_a.n_index(), y_b.n_index());
    if n_a == 0 || n_b == 0 {
        return Err(Error::Dimension("both networks need N = m + n − 4 ≥ 1".into()));
    }
    let u_a = UStats::compute(y_a)?;
    let u_b = UStats::compute(y_b)?;
    let (theta_a, theta_b) = (u_a.theta()?, u_b.theta()?);
    let v_a = u_a.delta_variance(y_a.c_hat())?.value;
    let v_b = u_b.delta_variance(y_b.c_hat())?.value;

    let n_total = n_a + n_b;
    let (rho, rho_b) = (n_a as f64 / n_total as f64, n_b as f64 / n_total as f64);
    let v_hat = v_a / rho + v_b / rho_b;
    if !(v_hat.is_finite() && v_hat > 0.0) {
        return Err(Error::InvalidVariance { what: "combined V̂(A, B)", value: v_hat });
    }
    let delta_hat = theta_a - theta_b;
    let z = (n_total as f64 / v_hat).sqrt() * delta_hat;
    let p_value = (2.0 * normal_cdf(-z.abs())).min(1.0);
    Ok(ComparisonReport {
        theta_a,
        theta_b,
        delta_hat,
        v_delta_a: v_a,
        v_delta_b: v_b,
        v_hat,
        z,
        p_value,
        reject: z.abs() > two_sided_critical(alpha),
        alpha,
        n_total,
        rho,
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// `μ_N = √(N / V(A,B))·(F₂^A − F₂^B)` with the true delta-method variances.
pub fn noncentrality(a: &Truth, b: &Truth, n_total: usize, rho: f64) -> Result<f64> {
    if n_total == 0 {
        return Err(Error::Domain("N must be ≥ 1".into()));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("rho must lie in (0, 1), got {rho}")));
    }
    let va = theoretical_variances(a.lambda, &a.moments, a.c)?.v_delta;
    let vb = theoretical_variances(b.lambda, &b.moments, b.c)?.v_delta;
    let v = va / rho + vb / (1.0 - rho);
    let diff = a.moments.f2 - b.moments.f2;
    if v <= 0.0 {
        // Both sides homogeneous: the statistic degenerates.
        return Ok(if diff == 0.0 { 0.0 } else { diff.signum() * f64::INFINITY });
    }
    Ok((n_total as f64 / v).sqrt() * diff)
}

/// `ψ_N`: asymptotic probability that the statistic stays inside
/// `[−q, q]`. The power of the test is `1 − ψ_N`.
pub fn theoretical_power(a: &Truth, b: &Truth, n_total: usize, rho: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let mu = noncentrality(a, b, n_total, rho)?;
    let q = two_sided_critical(alpha);
    if mu.is_infinite() {
        return Ok(0.0);
    }
    Ok((normal_cdf(q - mu) - normal_cdf(-q - mu)).max(0.0))
}
