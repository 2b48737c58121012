//! Estimation of the row heterogeneity `F₂ = ∫f²`.
//!
//! `θ̂ = U^{h1}/U^{h2}` is consistent for `F₂`. Two variance estimators are
//! available: the plug-in estimate of `V` (the asymptotic variance of
//! `U^{h1}`), and the delta-method estimate of `V^δ` (the asymptotic
//! variance of `θ̂` itself). Negative estimates are possible at small `N`;
//! they are reported with `valid = false` and never clamped.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fast::gram_summary;
use crate::kernels::{ustat_pair_covariance, Overlap, QuadrupletKernel};
use crate::network::BipartiteNetwork;
use crate::numeric::two_sided_critical;
use crate::wbedd::{theoretical_variances, TrueMoments};

/// The six U-statistics used by the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UStats {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub h4: f64,
    pub h5: f64,
    pub h6: f64,
}

impl UStats {
    pub fn compute(y: &BipartiteNetwork) -> Result<Self> {
        y.require_quadruplet()?;
        let [h1, h2, h3, h4, h5, h6] = gram_summary(y).all()?;
        Ok(Self { h1, h2, h3, h4, h5, h6 })
    }

    /// The expectations of the six kernels under a Poisson WBEDD model.
    pub fn expected(lambda: f64, m: &TrueMoments) -> Self {
        let l2 = lambda * lambda;
        Self {
            h1: l2 * m.f2,
            h2: l2,
            h3: l2 * m.g2,
            h4: l2 * l2 * m.f4 * m.g2 * m.g2,
            h5: lambda,
            h6: l2 * lambda * m.f3 * m.g2,
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.h1, self.h2, self.h3, self.h4, self.h5, self.h6]
    }

    pub fn theta(&self) -> Result<f64> {
        require_positive(self.h2, "U^{h2}")?;
        Ok(self.h1 / self.h2)
    }

    /// `c⁻¹[U4 U2²/U3² − U1²] + 4(1−c)⁻¹ U1² [U3/U2 − 1]`.
    pub fn plugin_variance(&self, c: f64) -> Result<VarianceEstimate> {
        check_c(c)?;
        require_positive(self.h2, "U^{h2}")?;
        require_positive(self.h3, "U^{h3}")?;
        let u1_sq = self.h1 * self.h1;
        let row = self.h4 * self.h2 * self.h2 / (self.h3 * self.h3) - u1_sq;
        let col = 4.0 * u1_sq * (self.h3 / self.h2 - 1.0);
        Ok(VarianceEstimate::new(row / c + col / (1.0 - c)))
    }

    /// `c⁻¹(U4/U3² + θ̂(4θ̂² − θ̂ − 4 U6/(U5 U3)))`.
    pub fn delta_variance(&self, c: f64) -> Result<VarianceEstimate> {
        check_c(c)?;
        require_positive(self.h2, "U^{h2}")?;
        require_positive(self.h3, "U^{h3}")?;
        require_positive(self.h5, "U^{h5}")?;
        let theta = self.h1 / self.h2;
        let value = (self.h4 / (self.h3 * self.h3)
            + theta * (4.0 * theta * theta - theta - 4.0 * self.h6 / (self.h5 * self.h3)))
            / c;
        Ok(VarianceEstimate::new(value))
    }
}

fn require_positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::Degenerate(format!("{what} = {x}, must be positive")))
    }
}

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("c must lie in (0, 1), got {c}")))
    }
}

/// A variance estimate with its validity flag (`value > 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceEstimate {
    pub value: f64,
    pub valid: bool,
}

impl VarianceEstimate {
    pub fn new(value: f64) -> Self {
        Self { value, valid: value.is_finite() && value > 0.0 }
    }
}

/// `U^{h1}/U^{h2}`.
pub fn estimate_f2(y: &BipartiteNetwork) -> Result<f64> {
    UStats::compute(y)?.theta()
}

pub fn estimate_variance_plugin(y: &BipartiteNetwork, c: f64) -> Result<VarianceEstimate> {
    UStats::compute(y)?.plugin_variance(c)
}

pub fn estimate_variance_delta(y: &BipartiteNetwork, c: f64) -> Result<VarianceEstimate> {
    UStats::compute(y)?.delta_variance(c)
}

/// Confidence-interval flavours: plug-in `V̂`, true `V`, delta-method `V̂^δ`,
/// true `V^δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CiVariant {
    V,
    Vt,
    Vd,
    Vdt,
}

impl CiVariant {
    pub const ALL: [CiVariant; 4] = [CiVariant::V, CiVariant::Vt, CiVariant::Vd, CiVariant::Vdt];

    pub fn as_str(self) -> &'static str {
        match self {
            CiVariant::V => "v",
            CiVariant::Vt => "vt",
            CiVariant::Vd => "vd",
            CiVariant::Vdt => "vdt",
        }
    }

    pub fn needs_truth(self) -> bool {
        matches!(self, CiVariant::Vt | CiVariant::Vdt)
    }
}

impl fmt::Display for CiVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CiVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "v" => Ok(CiVariant::V),
            "vt" => Ok(CiVariant::Vt),
            "vd" => Ok(CiVariant::Vd),
            "vdt" => Ok(CiVariant::Vdt),
            other => Err(Error::InvalidInput(format!(
                "unknown interval variant '{other}' (expected v, vt, vd or vdt)"
            ))),
        }
    }
}

/// Known generating parameters, needed by the `vt`/`vdt` intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub lambda: f64,
    pub moments: TrueMoments,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Interval for one variant, from precomputed U-statistics.
///
/// `c` is the row fraction used by the estimated variances; the true
/// variances use `truth.c`.
pub fn interval_from_ustats(
    u: &UStats,
    n_index: usize,
    c: f64,
    alpha: f64,
    variant: CiVariant,
    truth: Option<&Truth>,
) -> Result<Interval> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if n_index == 0 {
        return Err(Error::Dimension("confidence intervals need N ≥ 1".into()));
    }
    let theta = u.theta()?;
    let q = two_sided_critical(alpha);
    let sqrt_n = (n_index as f64).sqrt();
    let truth_variances = || -> Result<_> {
        let t = truth
            .ok_or_else(|| Error::InvalidInput(format!("variant {variant} needs the true parameters")))?;
        theoretical_variances(t.lambda, &t.moments, t.c)
    };
    let half = match variant {
        CiVariant::V => {
            let v = u.plugin_variance(c)?;
            if !v.valid {
                return Err(Error::InvalidVariance { what: "plug-in V̂", value: v.value });
            }
            q * v.value.sqrt() / (u.h2 * sqrt_n)
        }
        CiVariant::Vt => {
            let v = truth_variances()?.v;
            if v < 0.0 {
                return Err(Error::InvalidVariance { what: "true V", value: v });
            }
            q * v.sqrt() / (u.h2 * sqrt_n)
        }
        CiVariant::Vd => {
            let v = u.delta_variance(c)?;
            if !v.valid {
                return Err(Error::InvalidVariance { what: "delta-method V̂^δ", value: v.value });
            }
            q * (v.value / n_index as f64).sqrt()
        }
        CiVariant::Vdt => {
            let v = truth_variances()?.v_delta;
            if v < 0.0 {
                return Err(Error::InvalidVariance { what: "true V^δ", value: v });
            }
            q * (v / n_index as f64).sqrt()
        }
    };
    Ok(Interval { lo: theta - half, hi: theta + half })
}

pub fn confidence_interval(
    y: &BipartiteNetwork,
    alpha: f64,
    variant: CiVariant,
    truth: Option<&Truth>,
) -> Result<Interval> {
    let u = UStats::compute(y)?;
    interval_from_ustats(&u, y.n_index(), y.c_hat(), alpha, variant, truth)
}

/// A computed interval, or why it is unavailable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CiOutcome {
    Interval(Interval),
    Unavailable { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F2Report {
    pub theta_hat: f64,
    pub u_stats: UStats,
    pub v_hat: VarianceEstimate,
    pub v_delta_hat: VarianceEstimate,
    pub alpha: f64,
    pub ci: BTreeMap<CiVariant, CiOutcome>,
    pub n_index: usize,
    pub c_hat: f64,
}

/// Point estimate, both variance estimates and the requested intervals.
///
/// `c` overrides the observed `ĉ = m/(m+n)` when given.
pub fn analyze(
    y: &BipartiteNetwork,
    alpha: f64,
    variants: &[CiVariant],
    c: Option<f64>,
    truth: Option<&Truth>,
) -> Result<F2Report> {
    let u = UStats::compute(y)?;
    let theta_hat = u.theta()?;
    let c_hat = y.c_hat();
    let c = c.unwrap_or(c_hat);
    let v_hat = u.plugin_variance(c)?;
    let v_delta_hat = u.delta_variance(c)?;
    let ci = variants
        .iter()
        .map(|&v| {
            let outcome = match interval_from_ustats(&u, y.n_index(), c, alpha, v, truth) {
                Ok(i) => CiOutcome::Interval(i),
                Err(e) => CiOutcome::Unavailable { error: e.to_string() },
            };
            (v, outcome)
        })
        .collect();
    Ok(F2Report { theta_hat, u_stats: u, v_hat, v_delta_hat, alpha, ci, n_index: y.n_index(), c_hat })
}

/// Kernel-agnostic asymptotic variance
/// `4c⁻¹ Cov₍₁,₀₎ + 4(1−c)⁻¹ Cov₍₀,₁₎` from empirical pair covariances.
pub fn generic_asymptotic_variance<R: Rng + ?Sized>(
    y: &BipartiteNetwork,
    kernel: &QuadrupletKernel,
    c: f64,
    budget: usize,
    rng: &mut R,
) -> Result<f64> {
    check_c(c)?;
    let row = ustat_pair_covariance(y, kernel, Overlap::SharedRow, budget, rng)?;
    let col = ustat_pair_covariance(y, kernel, Overlap::SharedCol, budget, rng)?;
    Ok(4.0 * row / c + 4.0 * col / (1.0 - c))
}
