//! Closed-form evaluation of `U^{h1}..U^{h6}` from marginal sums.
//!
//! Every quantity is a grand sum or trace of a Gram-type product. Grand sums
//! of Gram matrices reduce to sums of squared margins, e.g.
//! `|YᵀY|₁ = Σᵢ (Σⱼ Yᵢⱼ)²`, so one pass over the matrix suffices and the
//! Gram matrices are never materialised. `|M|₁` is the plain (signed) grand
//! sum of entries throughout; `Ỹ = Y⊙Y − Y` may have negative entries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelId;
use crate::network::BipartiteNetwork;
use crate::numeric::{compensated_sum, CompensatedSum};
use crate::par::Execution;

/// Grand sums and traces feeding the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GramSummary {
    pub rows: usize,
    pub cols: usize,
    /// `|Y|₁`
    pub grand_sum: f64,
    /// `|YᵀY|₁`
    pub colgram_sum: f64,
    /// `Tr(YᵀY)`
    pub colgram_trace: f64,
    /// `|YYᵀ|₁`
    pub rowgram_sum: f64,
    /// `Tr(YYᵀ)`
    pub rowgram_trace: f64,
    /// `|Y⊙Y|₁`
    pub sq_sum: f64,
    /// `|ỸᵀỸ|₁`
    pub tilde_gram_sum: f64,
    /// `Tr(ỸᵀỸ)`
    pub tilde_gram_trace: f64,
    /// `|ỸᵀY|₁`
    pub tilde_cross_sum: f64,
    /// `Tr(ỸᵀY)`
    pub tilde_cross_trace: f64,
}

#[derive(Default, Clone, Copy)]
struct RowStats {
    sum: f64,
    sq: f64,
    tilde_sum: f64,
    tilde_sq: f64,
    tilde_cross: f64,
}

fn row_stats(row: &[f64]) -> RowStats {
    let mut sum = CompensatedSum::new();
    let mut sq = CompensatedSum::new();
    let mut tilde_sum = CompensatedSum::new();
    let mut tilde_sq = CompensatedSum::new();
    let mut tilde_cross = CompensatedSum::new();
    for &y in row {
        let t = y * y - y;
        sum.add(y);
        sq.add(y * y);
        tilde_sum.add(t);
        tilde_sq.add(t * t);
        tilde_cross.add(t * y);
    }
    RowStats {
        sum: sum.value(),
        sq: sq.value(),
        tilde_sum: tilde_sum.value(),
        tilde_sq: tilde_sq.value(),
        tilde_cross: tilde_cross.value(),
    }
}

pub fn gram_summary(y: &BipartiteNetwork) -> GramSummary {
    gram_summary_with(y, Execution::Sequential)
}

/// Same as [`gram_summary`]; rows may be processed in parallel. Per-row
/// partials are always combined in row order, so the result is identical
/// for every execution mode.
pub fn gram_summary_with(y: &BipartiteNetwork, exec: Execution) -> GramSummary {
    let (m, n) = (y.rows(), y.cols());
    let stats = exec.map_indexed(m, |i| row_stats(y.row(i)));

    let mut col_sums = vec![CompensatedSum::new(); n];
    for row in y.iter_rows() {
        for (acc, &v) in col_sums.iter_mut().zip(row) {
            acc.add(v);
        }
    }

    let sq_sum = compensated_sum(stats.iter().map(|s| s.sq));
    GramSummary {
        rows: m,
        cols: n,
        grand_sum: compensated_sum(stats.iter().map(|s| s.sum)),
        colgram_sum: compensated_sum(stats.iter().map(|s| s.sum * s.sum)),
        colgram_trace: sq_sum,
        rowgram_sum: compensated_sum(col_sums.iter().map(|c| c.value() * c.value())),
        rowgram_trace: sq_sum,
        sq_sum,
        tilde_gram_sum: compensated_sum(stats.iter().map(|s| s.tilde_sum * s.tilde_sum)),
        tilde_gram_trace: compensated_sum(stats.iter().map(|s| s.tilde_sq)),
        tilde_cross_sum: compensated_sum(stats.iter().map(|s| s.tilde_sum * s.sum)),
        tilde_cross_trace: compensated_sum(stats.iter().map(|s| s.tilde_cross)),
    }
}

impl GramSummary {
    /// Evaluates one of the six closed forms. Requires `m, n ≥ 2`.
    pub fn ustat(&self, kernel: KernelId) -> Result<f64> {
        let (m, n) = (self.rows as f64, self.cols as f64);
        if self.rows < 2 || self.cols < 2 {
            return Err(Error::Dimension(format!(
                "U-statistics need m ≥ 2 and n ≥ 2, got {}×{}",
                self.rows, self.cols
            )));
        }
        debug_assert_eq!(self.colgram_trace, self.rowgram_trace);
        let value = match kernel {
            KernelId::H1 => (self.colgram_sum - self.colgram_trace) / (m * n * (n - 1.0)),
            KernelId::H2 => {
                let s = self.grand_sum;
                let num = compensated_sum([s * s, -self.colgram_sum, -self.rowgram_sum, self.sq_sum]);
                num / (m * (m - 1.0) * n * (n - 1.0))
            }
            KernelId::H3 => (self.rowgram_sum - self.rowgram_trace) / (n * m * (m - 1.0)),
            KernelId::H4 => (self.tilde_gram_sum - self.tilde_gram_trace) / (m * n * (n - 1.0)),
            KernelId::H5 => self.grand_sum / (m * n),
            KernelId::H6 => (self.tilde_cross_sum - self.tilde_cross_trace) / (m * n * (n - 1.0)),
            other => {
                return Err(Error::InvalidInput(format!("kernel {other} has no closed-form evaluation")))
            }
        };
        Ok(value)
    }

    /// All six closed forms, in kernel order.
    pub fn all(&self) -> Result<[f64; 6]> {
        let mut out = [0.0; 6];
        for (slot, id) in out.iter_mut().zip(KernelId::FAST) {
            *slot = self.ustat(id)?;
        }
        Ok(out)
    }
}

/// Closed-form U-statistic for `h1..h6`.
pub fn ustat_fast(y: &BipartiteNetwork, kernel: KernelId) -> Result<f64> {
    y.require_quadruplet()?;
    if !kernel.has_fast_form() {
        return Err(Error::InvalidInput(format!("kernel {kernel} has no closed-form evaluation")));
    }
    gram_summary(y).ustat(kernel)
}
