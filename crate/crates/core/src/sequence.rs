//! Growing-dimension indexing: `m_N = 2 + ⌊c(N+1)⌋`, `n_N = 2 + ⌊(1−c)(N+1)⌋`.
//!
//! For irrational `c` the two floors always add up to `N`, so exactly one
//! row or one column is added at each step. Observed matrices carry the
//! rational `ĉ = m/(m+n)`; these utilities accept any real `c` in `(0, 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The pair `(c, N)` locating a matrix in a growing sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticIndex {
    pub c: f64,
    pub n: usize,
}

impl AsymptoticIndex {
    /// Recovers `(ĉ, N)` from observed dimensions.
    pub fn from_dims(m: usize, n: usize) -> Self {
        Self { c: m as f64 / (m + n) as f64, n: (m + n).saturating_sub(4) }
    }
}

/// Which dimension grew between steps `N − 1` and `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    RowAdded,
    ColAdded,
}

fn check_fraction(c: f64) -> Result<()> {
    if c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("row fraction c must lie in (0, 1), got {c}")))
    }
}

/// `(m_N, n_N)` following the floor definition verbatim.
pub fn dims_sequence(c: f64, n_index: usize) -> Result<(usize, usize)> {
    check_fraction(c)?;
    let k = (n_index + 1) as f64;
    let m = 2 + (c * k).floor() as usize;
    let n = 2 + ((1.0 - c) * k).floor() as usize;
    Ok((m, n))
}

/// Dimensions with `m + n = N + 4` for any `c`, including rational ones.
///
/// Rows follow `2 + ⌊c(N+1)⌋`; columns take the remainder. For irrational
/// `c` this coincides with [`dims_sequence`].
pub fn dims_for_index(c: f64, n_index: usize) -> Result<(usize, usize)> {
    check_fraction(c)?;
    let rows_added = ((c * (n_index + 1) as f64).floor() as usize).min(n_index);
    Ok((2 + rows_added, 2 + n_index - rows_added))
}

pub fn step_kind(c: f64, n_index: usize) -> Result<StepKind> {
    if n_index == 0 {
        return Err(Error::Domain("step_kind needs N ≥ 1".into()));
    }
    let (m_prev, n_prev) = dims_sequence(c, n_index - 1)?;
    let (m, n) = dims_sequence(c, n_index)?;
    match (m - m_prev, n - n_prev) {
        (1, 0) => Ok(StepKind::RowAdded),
        (0, 1) => Ok(StepKind::ColAdded),
        (dm, dn) => Err(Error::Domain(format!(
            "c = {c} is not a valid irrational fraction at N = {n_index} (Δm = {dm}, Δn = {dn})"
        ))),
    }
}

/// `κ_c(m) = ⌊(m − 2)/c⌋`, the step at which the `m`-th row was added.
pub fn kappa(c: f64, m: usize) -> Result<usize> {
    check_fraction(c)?;
    if m < 3 {
        return Err(Error::Domain(format!("kappa needs m ≥ 3, got {m}")));
    }
    Ok(((m - 2) as f64 / c).floor() as usize)
}
