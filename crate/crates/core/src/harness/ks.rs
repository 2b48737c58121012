use crate::error::{Error, Result};
use statrs::distribution::{ContinuousCDF, Normal};

/// Exact `sup_x |F_emp(x) − F(x)|` against `Normal(mean, var)`.
///
/// With `var = 0` the reference law is a point mass at `mean`.
pub fn ks_statistic(samples: &[f64], mean: f64, var: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("KS statistic needs at least one sample".into()));
    }
    if !(var >= 0.0 && var.is_finite() && mean.is_finite()) {
        return Err(Error::Domain(format!("invalid reference law N({mean}, {var})")));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let k = xs.len() as f64;

    let normal = if var > 0.0 {
        Some(Normal::new(mean, var.sqrt()).map_err(|e| Error::Domain(e.to_string()))?)
    } else {
        None
    };
    // CDF at x and its left limit.
    let cdf = |x: f64| -> (f64, f64) {
        match &normal {
            Some(n) => {
                let f = n.cdf(x);
                (f, f)
            }
            None => (if x >= mean { 1.0 } else { 0.0 }, if x > mean { 1.0 } else { 0.0 }),
        }
    };

    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let (f, f_left) = cdf(x);
        d = d.max((i + 1) as f64 / k - f).max(f_left - i as f64 / k);
    }
    Ok(d.clamp(0.0, 1.0))
}
