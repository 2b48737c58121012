//! Weighted bipartite expected-degree (WBEDD) networks with power-law
//! degree functions.
//!
//! Rows and columns carry latent uniforms `ξᵢ`, `ηⱼ`; edges are Poisson with
//! mean `λ f(ξᵢ) g(ηⱼ)` where `f(u) = (α_f + 1) u^{α_f}` and
//! `g(v) = (α_g + 1) v^{α_g}`, both integrating to one. Version 2 draws `λ`
//! once per network.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::BipartiteNetwork;

/// Generator behind every seeded draw in the crate.
pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Version {
    #[default]
    ConstantLambda,
    RandomLambda,
}

/// Law of the network-level intensity under [`Version::RandomLambda`].
/// Both laws have mean `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "law")]
pub enum LambdaLaw {
    /// Gamma with the given shape and scale `λ / shape`.
    Gamma { shape: f64 },
    /// Always `λ`.
    PointMass,
}

impl Default for LambdaLaw {
    fn default() -> Self {
        LambdaLaw::Gamma { shape: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WbeddParams {
    pub lambda: f64,
    pub alpha_f: f64,
    pub alpha_g: f64,
    #[serde(default)]
    pub version: Version,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_lambda_law: Option<LambdaLaw>,
}

impl WbeddParams {
    pub fn new(lambda: f64, alpha_f: f64, alpha_g: f64) -> Result<Self> {
        let p = Self { lambda, alpha_f, alpha_g, version: Version::ConstantLambda, random_lambda_law: None };
        p.validate()?;
        Ok(p)
    }

    /// Parameterised by the target moments `F₂` and `G₂`.
    pub fn from_moments(lambda: f64, f2: f64, g2: f64) -> Result<Self> {
        Self::new(lambda, alpha_for_moment(f2)?, alpha_for_moment(g2)?)
    }

    pub fn with_random_lambda(mut self, law: LambdaLaw) -> Result<Self> {
        self.version = Version::RandomLambda;
        self.random_lambda_law = Some(law);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::Domain(format!("lambda must be positive, got {}", self.lambda)));
        }
        for (name, a) in [("alpha_f", self.alpha_f), ("alpha_g", self.alpha_g)] {
            if !(a.is_finite() && a >= 0.0) {
                return Err(Error::Domain(format!("{name} must be finite and ≥ 0, got {a}")));
            }
        }
        if let (Version::RandomLambda, Some(LambdaLaw::Gamma { shape })) =
            (self.version, self.random_lambda_law)
        {
            if !(shape.is_finite() && shape > 0.0) {
                return Err(Error::Domain(format!("gamma shape must be positive, got {shape}")));
            }
        }
        Ok(())
    }

    pub fn moments(&self) -> TrueMoments {
        TrueMoments::from_alphas(self.alpha_f, self.alpha_g)
    }

    fn draw_lambda(&self, seed: u64) -> Result<f64> {
        match (self.version, self.random_lambda_law.unwrap_or_default()) {
            (Version::ConstantLambda, _) | (Version::RandomLambda, LambdaLaw::PointMass) => Ok(self.lambda),
            (Version::RandomLambda, LambdaLaw::Gamma { shape }) => {
                // λ comes from its own stream so the latent and edge draws
                // match the constant-λ generator for the same seed.
                let mut rng = rng_from_seed(seed);
                rng.set_stream(1);
                let gamma = Gamma::new(shape, self.lambda / shape)
                    .map_err(|e| Error::Domain(format!("gamma law: {e}")))?;
                Ok(gamma.sample(&mut rng))
            }
        }
    }
}

/// `F_k = ∫ f^k` (and `G_k`) for the four orders used by the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrueMoments {
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
    pub g2: f64,
}

impl TrueMoments {
    pub fn from_alphas(alpha_f: f64, alpha_g: f64) -> Self {
        Self {
            f2: power_law_moment(alpha_f, 2),
            f3: power_law_moment(alpha_f, 3),
            f4: power_law_moment(alpha_f, 4),
            g2: power_law_moment(alpha_g, 2),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.f2, self.f3, self.f4, self.g2].iter().all(|x| x.is_finite() && *x >= 1.0 - 1e-12)
            && self.f4 >= self.f2 * self.f2 * (1.0 - 1e-12);
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("inconsistent moments {self:?}")))
        }
    }
}

#[inline]
pub fn power_law_density(alpha: f64, u: f64) -> f64 {
    (alpha + 1.0) * u.powf(alpha)
}

/// `∫₀¹ ((α+1) u^α)^k du = (α+1)^k / (kα + 1)`.
pub fn power_law_moment(alpha: f64, k: u32) -> f64 {
    (alpha + 1.0).powi(k as i32) / (k as f64 * alpha + 1.0)
}

/// Exponent whose power law has second moment `f2`.
pub fn alpha_for_moment(f2: f64) -> Result<f64> {
    if !(f2.is_finite() && f2 >= 1.0) {
        return Err(Error::Domain(format!("second moment must be ≥ 1, got {f2}")));
    }
    Ok((f2 - 1.0) + (f2 * (f2 - 1.0)).sqrt())
}

/// Poisson edge sampler over latent uniforms, shared by the WBEDD generator
/// and general graphons. Draw order: `ξ₁..ξ_m`, `η₁..η_n`, then edges
/// row-major.
fn sample_poisson_latent<R, W>(rng: &mut R, lambda: f64, m: usize, n: usize, w: W) -> BipartiteNetwork
where
    R: Rng + ?Sized,
    W: Fn(f64, f64) -> f64,
{
    let xi: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
    let eta: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let mut weights = Vec::with_capacity(m * n);
    for &u in &xi {
        for &v in &eta {
            let mu = lambda * w(u, v);
            weights.push(poisson(rng, mu));
        }
    }
    BipartiteNetwork::from_raw(m, n, weights)
}

#[inline]
fn poisson<R: Rng + ?Sized>(rng: &mut R, mu: f64) -> f64 {
    if mu > 0.0 {
        Poisson::new(mu).expect("finite positive mean").sample(rng)
    } else {
        0.0
    }
}

/// Draws an `m × n` WBEDD network; deterministic in `seed`.
pub fn sample_network(params: &WbeddParams, m: usize, n: usize, seed: u64) -> Result<BipartiteNetwork> {
    params.validate()?;
    if m == 0 || n == 0 {
        return Err(Error::Dimension(format!("cannot sample a {m}×{n} network")));
    }
    let lambda = params.draw_lambda(seed)?;
    let mut rng = rng_from_seed(seed);
    let (af, ag) = (params.alpha_f, params.alpha_g);
    Ok(sample_poisson_latent(&mut rng, lambda, m, n, |u, v| {
        power_law_density(af, u) * power_law_density(ag, v)
    }))
}

/// Draws `Yᵢⱼ ~ Poisson(λ w(ξᵢ, ηⱼ))` for an arbitrary nonnegative graphon `w`.
pub fn sample_graphon<W>(lambda: f64, m: usize, n: usize, seed: u64, w: W) -> Result<BipartiteNetwork>
where
    W: Fn(f64, f64) -> f64,
{
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    if m == 0 || n == 0 {
        return Err(Error::Dimension(format!("cannot sample a {m}×{n} network")));
    }
    let mut rng = rng_from_seed(seed);
    Ok(sample_poisson_latent(&mut rng, lambda, m, n, w))
}

/// Asymptotic variances of `U^{h1}`, `U^{h2}`, their covariance, and of the
/// ratio estimator by the delta method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoreticalVariances {
    pub v_h1: f64,
    pub v_h2: f64,
    pub c_h1h2: f64,
    /// Same as `v_h1`.
    pub v: f64,
    pub v_delta: f64,
}

/// `c⁻¹(F₄ + F₂(4F₂² − F₂ − 4F₃))`.
pub fn v_delta_closed_form(m: &TrueMoments, c: f64) -> f64 {
    (m.f4 + m.f2 * (4.0 * m.f2 * m.f2 - m.f2 - 4.0 * m.f3)) / c
}

pub fn theoretical_variances(lambda: f64, m: &TrueMoments, c: f64) -> Result<TheoreticalVariances> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("c must lie in (0, 1), got {c}")));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    m.validate()?;
    let l4 = lambda.powi(4);
    let (row, col) = (l4 / c, l4 / (1.0 - c));
    let v_h1 = row * (m.f4 - m.f2 * m.f2) + 4.0 * col * m.f2 * m.f2 * (m.g2 - 1.0);
    let v_h2 = 4.0 * row * (m.f2 - 1.0) + 4.0 * col * (m.g2 - 1.0);
    let c_h1h2 = 2.0 * row * (m.f3 - m.f2) + 4.0 * col * m.f2 * (m.g2 - 1.0);
    let v_delta = (v_h1 - 2.0 * m.f2 * c_h1h2 + m.f2 * m.f2 * v_h2) / l4;

    let closed = v_delta_closed_form(m, c);
    let scale = (v_h1.abs() + 2.0 * m.f2 * c_h1h2.abs() + m.f2 * m.f2 * v_h2.abs()) / l4;
    debug_assert!(
        (v_delta - closed).abs() <= 1e-12 * (1.0 + scale),
        "delta-method variance {v_delta} disagrees with closed form {closed}"
    );
    Ok(TheoreticalVariances { v_h1, v_h2, c_h1h2, v: v_h1, v_delta })
}
