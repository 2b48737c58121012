//! Quadruplet kernels and the brute-force U-statistic.
//!
//! A kernel is a real function of a 2×2 submatrix that is invariant under
//! swapping its two rows, its two columns, or both. Its U-statistic is the
//! average of the kernel over all `C(m,2)·C(n,2)` quadruplets of a network.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fast::ustat_fast;
use crate::network::{BipartiteNetwork, Quadruplet};
use crate::numeric::CompensatedSum;
use crate::par::Execution;

type Evaluator = Arc<dyn Fn(&Quadruplet) -> f64 + Send + Sync>;

/// Named kernel identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KernelId {
    H1,
    H2,
    H3,
    H4,
    H5,
    H6,
    ProductForm,
    Motif5,
    Custom,
}

impl KernelId {
    /// The six kernels with a closed-form matrix evaluation.
    pub const FAST: [KernelId; 6] =
        [KernelId::H1, KernelId::H2, KernelId::H3, KernelId::H4, KernelId::H5, KernelId::H6];

    pub fn as_str(self) -> &'static str {
        match self {
            KernelId::H1 => "h1",
            KernelId::H2 => "h2",
            KernelId::H3 => "h3",
            KernelId::H4 => "h4",
            KernelId::H5 => "h5",
            KernelId::H6 => "h6",
            KernelId::ProductForm => "product-form",
            KernelId::Motif5 => "motif5",
            KernelId::Custom => "custom",
        }
    }

    pub fn has_fast_form(self) -> bool {
        Self::FAST.contains(&self)
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A symmetric quadruplet kernel.
#[derive(Clone)]
pub enum QuadrupletKernel {
    H1,
    H2,
    H3,
    H4,
    H5,
    H6,
    /// Mean-zero under product-form graphons.
    ProductForm,
    /// Three edges present, one absent; binary networks only.
    Motif5,
    Custom(Evaluator),
}

impl fmt::Debug for QuadrupletKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadrupletKernel({})", self.id())
    }
}

impl QuadrupletKernel {
    pub fn id(&self) -> KernelId {
        match self {
            QuadrupletKernel::H1 => KernelId::H1,
            QuadrupletKernel::H2 => KernelId::H2,
            QuadrupletKernel::H3 => KernelId::H3,
            QuadrupletKernel::H4 => KernelId::H4,
            QuadrupletKernel::H5 => KernelId::H5,
            QuadrupletKernel::H6 => KernelId::H6,
            QuadrupletKernel::ProductForm => KernelId::ProductForm,
            QuadrupletKernel::Motif5 => KernelId::Motif5,
            QuadrupletKernel::Custom(_) => KernelId::Custom,
        }
    }

    /// Wraps an arbitrary function that is already symmetric. Use
    /// [`symmetrize`] for functions that are not.
    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(&Quadruplet) -> f64 + Send + Sync + 'static,
    {
        QuadrupletKernel::Custom(Arc::new(f))
    }

    pub fn from_id(id: KernelId) -> Option<Self> {
        Some(match id {
            KernelId::H1 => QuadrupletKernel::H1,
            KernelId::H2 => QuadrupletKernel::H2,
            KernelId::H3 => QuadrupletKernel::H3,
            KernelId::H4 => QuadrupletKernel::H4,
            KernelId::H5 => QuadrupletKernel::H5,
            KernelId::H6 => QuadrupletKernel::H6,
            KernelId::ProductForm => QuadrupletKernel::ProductForm,
            KernelId::Motif5 => QuadrupletKernel::Motif5,
            KernelId::Custom => return None,
        })
    }

    /// Evaluates without input validation.
    #[inline]
    pub fn eval_unchecked(&self, q: &Quadruplet) -> f64 {
        let [[a, b], [c, d]] = q.0;
        match self {
            QuadrupletKernel::H1 => 0.5 * (a * b + c * d),
            QuadrupletKernel::H2 => 0.5 * (a * d + b * c),
            QuadrupletKernel::H3 => 0.5 * (a * c + b * d),
            QuadrupletKernel::H4 => 0.5 * ((a * a - a) * (b * b - b) + (c * c - c) * (d * d - d)),
            QuadrupletKernel::H5 => 0.25 * ((a + b) + (c + d)),
            QuadrupletKernel::H6 => 0.25 * (a * b * (a + b - 2.0) + c * d * (c + d - 2.0)),
            QuadrupletKernel::ProductForm => {
                // Diagonal and anti-diagonal swap roles under any row or
                // column swap; grouping this way keeps the value bit-exact.
                let (diag, anti) = (a * d, b * c);
                let (diag_sum, anti_sum) = (a + d, b + c);
                0.25 * (diag * (diag_sum - anti_sum - 2.0) + anti * (anti_sum - diag_sum - 2.0))
            }
            QuadrupletKernel::Motif5 => {
                a * b * c * (1.0 - d) + a * b * d * (1.0 - c) + a * c * d * (1.0 - b) + b * c * d * (1.0 - a)
            }
            QuadrupletKernel::Custom(f) => f(q),
        }
    }
}

impl FromStr for QuadrupletKernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "h1" => QuadrupletKernel::H1,
            "h2" => QuadrupletKernel::H2,
            "h3" => QuadrupletKernel::H3,
            "h4" => QuadrupletKernel::H4,
            "h5" => QuadrupletKernel::H5,
            "h6" => QuadrupletKernel::H6,
            "product-form" | "productform" => QuadrupletKernel::ProductForm,
            "motif5" | "motif-5" => QuadrupletKernel::Motif5,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown kernel '{other}' (expected h1..h6, product-form or motif5)"
                )))
            }
        })
    }
}

fn is_binary(x: f64) -> bool {
    x == 0.0 || x == 1.0
}

/// Evaluates `kernel` on one quadruplet.
pub fn eval_kernel(kernel: &QuadrupletKernel, q: &Quadruplet) -> Result<f64> {
    if !q.is_finite() {
        return Err(Error::InvalidInput("quadruplet has non-finite entries".into()));
    }
    if matches!(kernel, QuadrupletKernel::Motif5) && !q.entries().into_iter().all(is_binary) {
        return Err(Error::InvalidInput("motif5 kernel requires 0/1 entries".into()));
    }
    Ok(kernel.eval_unchecked(q))
}

/// Averages `raw` over the four row/column orderings of its argument.
pub fn symmetrize<F>(raw: F) -> QuadrupletKernel
where
    F: Fn(&Quadruplet) -> f64 + Send + Sync + 'static,
{
    QuadrupletKernel::custom(move |q| {
        let r = q.swap_rows();
        (raw(q) + raw(&r) + raw(&q.swap_cols()) + raw(&r.swap_cols())) / 4.0
    })
}

fn validate_for(y: &BipartiteNetwork, kernel: &QuadrupletKernel) -> Result<()> {
    y.require_quadruplet()?;
    if matches!(kernel, QuadrupletKernel::Motif5) && !y.is_binary() {
        return Err(Error::InvalidInput("motif5 kernel requires a binary network".into()));
    }
    Ok(())
}

fn pairs(k: usize) -> f64 {
    (k * (k - 1) / 2) as f64
}

/// Explicit `O(m²n²)` enumeration of every quadruplet.
///
/// Row blocks are summed independently (optionally in parallel) and then
/// combined in row order, so the result does not depend on the thread count.
pub fn ustat_bruteforce(y: &BipartiteNetwork, kernel: &QuadrupletKernel) -> Result<f64> {
    ustat_bruteforce_with(y, kernel, Execution::Parallel)
}

pub fn ustat_bruteforce_with(
    y: &BipartiteNetwork,
    kernel: &QuadrupletKernel,
    exec: Execution,
) -> Result<f64> {
    validate_for(y, kernel)?;
    let (m, n) = (y.rows(), y.cols());
    let partials = exec.map_indexed(m - 1, |i1| {
        let mut acc = CompensatedSum::new();
        for i2 in i1 + 1..m {
            for j1 in 0..n - 1 {
                for j2 in j1 + 1..n {
                    acc.add(kernel.eval_unchecked(&y.quadruplet(i1, i2, j1, j2)));
                }
            }
        }
        acc.value()
    });
    let total: CompensatedSum = partials.into_iter().collect();
    Ok(total.value() / (pairs(m) * pairs(n)))
}

/// The U-statistic by the cheapest exact route: closed form for `h1..h6`,
/// enumeration otherwise.
pub fn ustat(y: &BipartiteNetwork, kernel: &QuadrupletKernel) -> Result<f64> {
    if kernel.id().has_fast_form() {
        ustat_fast(y, kernel.id())
    } else {
        ustat_bruteforce(y, kernel)
    }
}

/// Index overlap between two quadruplets in a covariance term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Overlap {
    /// Exactly one shared row, no shared column: `(1, 0)`.
    SharedRow,
    /// No shared row, exactly one shared column: `(0, 1)`.
    SharedCol,
}

impl Overlap {
    /// `(shared rows, shared columns)`.
    pub fn counts(self) -> (usize, usize) {
        match self {
            Overlap::SharedRow => (1, 0),
            Overlap::SharedCol => (0, 1),
        }
    }
}

// Along the "shared" axis a pair is an ordered triple (s, a, b): the first
// quadruplet uses {s, a}, the second {s, b}. Along the other axis it is two
// disjoint pairs (d, e) and (f, g).
struct PairLayout {
    shared_len: usize,
    disjoint_len: usize,
    overlap: Overlap,
}

impl PairLayout {
    fn new(y: &BipartiteNetwork, overlap: Overlap) -> Result<Self> {
        let (shared_len, disjoint_len) = match overlap {
            Overlap::SharedRow => (y.rows(), y.cols()),
            Overlap::SharedCol => (y.cols(), y.rows()),
        };
        if shared_len < 3 || disjoint_len < 4 {
            let (need_m, need_n) = match overlap {
                Overlap::SharedRow => (3, 4),
                Overlap::SharedCol => (4, 3),
            };
            return Err(Error::Dimension(format!(
                "{overlap:?} covariance needs m ≥ {need_m} and n ≥ {need_n}, got {}×{}",
                y.rows(),
                y.cols()
            )));
        }
        Ok(Self { shared_len, disjoint_len, overlap })
    }

    fn count(&self) -> f64 {
        let s = self.shared_len as f64;
        let d = self.disjoint_len as f64;
        s * (s - 1.0) * (s - 2.0) * (d * (d - 1.0) / 2.0) * ((d - 2.0) * (d - 3.0) / 2.0)
    }

    #[inline]
    fn product(
        &self,
        y: &BipartiteNetwork,
        kernel: &QuadrupletKernel,
        shared: [usize; 3],
        disjoint: [usize; 4],
    ) -> f64 {
        let [s, a, b] = shared;
        let [d, e, f, g] = disjoint;
        let (q1, q2) = match self.overlap {
            Overlap::SharedRow => (y.quadruplet(s, a, d, e), y.quadruplet(s, b, f, g)),
            Overlap::SharedCol => (y.quadruplet(d, e, s, a), y.quadruplet(f, g, s, b)),
        };
        kernel.eval_unchecked(&q1) * kernel.eval_unchecked(&q2)
    }

    fn enumerate(&self, y: &BipartiteNetwork, kernel: &QuadrupletKernel) -> f64 {
        let (sl, dl) = (self.shared_len, self.disjoint_len);
        let mut disjoint = Vec::new();
        for d in 0..dl {
            for e in d + 1..dl {
                for f in 0..dl {
                    for g in f + 1..dl {
                        if f != d && f != e && g != d && g != e {
                            disjoint.push([d, e, f, g]);
                        }
                    }
                }
            }
        }
        let mut acc = CompensatedSum::new();
        for s in 0..sl {
            for a in (0..sl).filter(|&a| a != s) {
                for b in (0..sl).filter(|&b| b != s && b != a) {
                    for &dj in &disjoint {
                        acc.add(self.product(y, kernel, [s, a, b], dj));
                    }
                }
            }
        }
        acc.value() / self.count()
    }

    fn sample<R: Rng + ?Sized>(
        &self,
        y: &BipartiteNetwork,
        kernel: &QuadrupletKernel,
        budget: usize,
        rng: &mut R,
    ) -> f64 {
        let mut acc = CompensatedSum::new();
        for _ in 0..budget {
            let shared = distinct::<3, _>(self.shared_len, rng);
            let disjoint = distinct::<4, _>(self.disjoint_len, rng);
            acc.add(self.product(y, kernel, shared, disjoint));
        }
        acc.value() / budget as f64
    }
}

/// `K` distinct indices from `0..len`, uniformly over ordered tuples.
fn distinct<const K: usize, R: Rng + ?Sized>(len: usize, rng: &mut R) -> [usize; K] {
    let mut out = [0usize; K];
    let mut filled = 0;
    while filled < K {
        let x = rng.random_range(0..len);
        if !out[..filled].contains(&x) {
            out[filled] = x;
            filled += 1;
        }
    }
    out
}

/// Mean of the kernel over all quadruplets, or over `budget` uniformly
/// drawn quadruplets when no exact route fits the budget.
fn kernel_mean<R: Rng + ?Sized>(
    y: &BipartiteNetwork,
    kernel: &QuadrupletKernel,
    budget: usize,
    rng: &mut R,
) -> Result<f64> {
    if kernel.id().has_fast_form() || pairs(y.rows()) * pairs(y.cols()) <= budget as f64 {
        return ustat(y, kernel);
    }
    let mut acc = CompensatedSum::new();
    for _ in 0..budget {
        let [i1, i2] = distinct::<2, _>(y.rows(), rng);
        let [j1, j2] = distinct::<2, _>(y.cols(), rng);
        acc.add(kernel.eval_unchecked(&y.quadruplet(i1, i2, j1, j2)));
    }
    Ok(acc.value() / budget as f64)
}

/// Empirical covariance between kernel values on quadruplet pairs with the
/// given overlap: mean of `h(q)·h(q′)` minus the squared U-statistic.
///
/// Pairs are fully enumerated when their count fits in `budget`; otherwise
/// `budget` pairs are drawn uniformly with `rng`.
pub fn ustat_pair_covariance<R: Rng + ?Sized>(
    y: &BipartiteNetwork,
    kernel: &QuadrupletKernel,
    overlap: Overlap,
    budget: usize,
    rng: &mut R,
) -> Result<f64> {
    validate_for(y, kernel)?;
    if budget == 0 {
        return Err(Error::InvalidInput("sample budget must be positive".into()));
    }
    let layout = PairLayout::new(y, overlap)?;
    let cross = if layout.count() <= budget as f64 {
        layout.enumerate(y, kernel)
    } else {
        layout.sample(y, kernel, budget, rng)
    };
    let mean = kernel_mean(y, kernel, budget, rng)?;
    Ok(cross - mean * mean)
}
