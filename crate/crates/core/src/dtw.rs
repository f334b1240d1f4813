//! Dynamic time warping with the symmetric2 and the basic asymmetric step
//! pattern, including open-begin / open-end subsequence matching.
//!
//! All indices are 0-based. Infeasible cells of the warping matrix hold
//! `f64::INFINITY`.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepPattern {
    /// `g(i,j) = min(g(i,j-1)+d, g(i-1,j-1)+2d, g(i-1,j)+d)`, endpoints matched.
    Symmetric2,
    /// `g(i,j) = d + min(g(i-1,j), g(i-1,j-1), g(i-1,j-2))`; every row of the
    /// query is matched exactly once.
    Asymmetric,
}

/// One admissible local move, in query (`di`) and reference (`dj`) direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub di: usize,
    pub dj: usize,
    pub weight: f64,
}

const SYMMETRIC2_STEPS: [Step; 3] = [
    Step { di: 1, dj: 0, weight: 1.0 },
    Step { di: 1, dj: 1, weight: 2.0 },
    Step { di: 0, dj: 1, weight: 1.0 },
];

const ASYMMETRIC_STEPS: [Step; 3] = [
    Step { di: 1, dj: 0, weight: 1.0 },
    Step { di: 1, dj: 1, weight: 1.0 },
    Step { di: 1, dj: 2, weight: 1.0 },
];

impl StepPattern {
    pub fn steps(self) -> &'static [Step] {
        match self {
            StepPattern::Symmetric2 => &SYMMETRIC2_STEPS,
            StepPattern::Asymmetric => &ASYMMETRIC_STEPS,
        }
    }

    /// Weight of the first matched cell.
    pub fn initial_weight(self) -> f64 {
        match self {
            StepPattern::Symmetric2 => 2.0,
            StepPattern::Asymmetric => 1.0,
        }
    }

    /// Normalisation constant: `n + m` for symmetric2, `n` for asymmetric.
    pub fn normalization(self, n: usize, m: usize) -> f64 {
        match self {
            StepPattern::Symmetric2 => (n + m) as f64,
            StepPattern::Asymmetric => n as f64,
        }
    }

    /// Bounds of the local slope `dj/di` (`None` = unbounded).
    pub fn slope_bounds(self) -> (f64, Option<f64>) {
        match self {
            StepPattern::Symmetric2 => (0.0, None),
            StepPattern::Asymmetric => (0.0, Some(2.0)),
        }
    }
}

/// Dense row-major `rows x cols` matrix of local costs `d(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch { left: c, right: bad.len() });
        }
        Ok(Self { rows: r, cols: c, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Adds `c` to every entry.
    pub fn shifted(&self, c: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v + c).collect() }
    }
}

/// Absolute differences `|x_i - y_j|` (the univariate Euclidean distance).
pub fn cross_distance(x: &[f64], y: &[f64]) -> CostMatrix {
    CostMatrix::from_fn(x.len(), y.len(), |i, j| libm::fabs(x[i] - y[j]))
}

/// Euclidean distances between the rows of two multivariate sequences.
pub fn cross_distance_multi(x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<CostMatrix> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Empty("sequence"));
    }
    let dim = x[0].len();
    if dim == 0 {
        return Err(Error::Empty("feature dimension"));
    }
    for row in x.iter().chain(y) {
        if row.len() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: row.len() });
        }
    }
    Ok(CostMatrix::from_fn(x.len(), y.len(), |i, j| {
        let sq: f64 = x[i].iter().zip(&y[j]).map(|(a, b)| (a - b) * (a - b)).sum();
        libm::sqrt(sq)
    }))
}

/// Matched index pairs `(query, reference)` with the weight each cell
/// contributes to the distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarpingPath {
    pub pairs: Vec<(usize, usize)>,
    pub weights: Vec<f64>,
}

impl WarpingPath {
    /// Sum of the step weights, `M_phi`.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Re-accumulates `sum_k w_k d(pairs_k)` in path order.
    pub fn cost(&self, d: &CostMatrix) -> f64 {
        self.pairs
            .iter()
            .zip(&self.weights)
            .fold(0.0, |acc, (&(i, j), w)| acc + w * d.get(i, j))
    }

    /// Reference indices matched to query index `i`.
    pub fn matches_of(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().filter(move |p| p.0 == i).map(|p| p.1)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DtwOptions {
    pub pattern: StepPattern,
    pub open_begin: bool,
    pub open_end: bool,
    /// Keep the accumulated warping matrix in the result.
    pub keep_matrix: bool,
}

impl DtwOptions {
    pub const SYMMETRIC: Self =
        Self { pattern: StepPattern::Symmetric2, open_begin: false, open_end: false, keep_matrix: false };
    pub const ASYMMETRIC: Self =
        Self { pattern: StepPattern::Asymmetric, open_begin: false, open_end: false, keep_matrix: false };
    pub const OBE: Self =
        Self { pattern: StepPattern::Asymmetric, open_begin: true, open_end: true, keep_matrix: false };

    pub fn with_matrix(mut self) -> Self {
        self.keep_matrix = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DtwResult {
    pub distance: f64,
    pub pattern: StepPattern,
    pub path: WarpingPath,
    /// Normalisation constant (`n + m` or `n`).
    pub normalization: f64,
    /// First and last matched reference index `(p, q)`.
    pub matched_range: (usize, usize),
    pub warping_matrix: Option<CostMatrix>,
}

impl DtwResult {
    pub fn normalized(&self) -> f64 {
        self.distance / self.normalization
    }
}

/// Symmetric2 DTW of two univariate sequences.
pub fn dtw_symmetric(x: &[f64], y: &[f64]) -> Result<DtwResult> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Empty("sequence"));
    }
    dtw_on_matrix(&cross_distance(x, y), DtwOptions::SYMMETRIC)
}

/// Asymmetric DTW; `open_begin` frees the first and `open_end` the last
/// matched reference index.
pub fn dtw_asymmetric(x: &[f64], y: &[f64], open_begin: bool, open_end: bool) -> Result<DtwResult> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Empty("sequence"));
    }
    let opts = DtwOptions { open_begin, open_end, ..DtwOptions::ASYMMETRIC };
    dtw_on_matrix(&cross_distance(x, y), opts)
}

/// Runs the dynamic programme on a caller-supplied cost matrix. Used for
/// expected cross-distances of stochastic processes as well as ordinary
/// sequences.
pub fn analytic_dtw_on_matrix(d: &CostMatrix, opts: DtwOptions) -> Result<DtwResult> {
    if d.data.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Config("cost matrix must be finite and non-negative".into()));
    }
    dtw_on_matrix(d, opts)
}

/// The dynamic programme behind every public entry point.
pub fn dtw_on_matrix(d: &CostMatrix, opts: DtwOptions) -> Result<DtwResult> {
    let (n, m) = (d.rows, d.cols);
    if n == 0 || m == 0 {
        return Err(Error::Empty("cost matrix"));
    }
    let g = match opts.pattern {
        StepPattern::Symmetric2 => {
            if opts.open_begin || opts.open_end {
                return Err(Error::Config(
                    "open-begin/open-end matching requires the asymmetric pattern".into(),
                ));
            }
            accumulate_symmetric(d)
        }
        StepPattern::Asymmetric => accumulate_asymmetric(d, opts.open_begin),
    };
    let last = &g[(n - 1) * m..];
    let end_col = if opts.open_end {
        // first column attaining the minimum
        let mut best = 0;
        for j in 1..m {
            if last[j] < last[best] {
                best = j;
            }
        }
        best
    } else {
        m - 1
    };
    let distance = last[end_col];
    if !distance.is_finite() {
        return Err(Error::InfeasibleWarping { n, m });
    }
    let path = match opts.pattern {
        StepPattern::Symmetric2 => backtrack_symmetric(d, &g, n - 1, end_col),
        StepPattern::Asymmetric => backtrack_asymmetric(d, &g, n - 1, end_col),
    };
    let matched_range = (path.pairs[0].1, end_col);
    Ok(DtwResult {
        distance,
        pattern: opts.pattern,
        normalization: opts.pattern.normalization(n, m),
        path,
        matched_range,
        warping_matrix: opts.keep_matrix.then_some(CostMatrix { rows: n, cols: m, data: g }),
    })
}

fn accumulate_symmetric(d: &CostMatrix) -> Vec<f64> {
    let (n, m) = (d.rows, d.cols);
    let mut g = vec![f64::INFINITY; n * m];
    for i in 0..n {
        for j in 0..m {
            let c = d.get(i, j);
            g[i * m + j] = if i == 0 && j == 0 {
                2.0 * c
            } else {
                let mut best = f64::INFINITY;
                if j > 0 {
                    best = best.min(g[i * m + j - 1] + c);
                }
                if i > 0 && j > 0 {
                    best = best.min(g[(i - 1) * m + j - 1] + 2.0 * c);
                }
                if i > 0 {
                    best = best.min(g[(i - 1) * m + j] + c);
                }
                best
            };
        }
    }
    g
}

fn accumulate_asymmetric(d: &CostMatrix, open_begin: bool) -> Vec<f64> {
    let (n, m) = (d.rows, d.cols);
    let mut g = vec![f64::INFINITY; n * m];
    let first = if open_begin { m } else { 1 };
    g[..first].copy_from_slice(&d.row(0)[..first]);
    for i in 1..n {
        let (prev, cur) = g.split_at_mut(i * m);
        let prev = &prev[(i - 1) * m..];
        let cur = &mut cur[..m];
        for j in 0..m {
            let mut best = prev[j];
            if j >= 1 {
                best = best.min(prev[j - 1]);
            }
            if j >= 2 {
                best = best.min(prev[j - 2]);
            }
            if best.is_finite() {
                cur[j] = best + d.get(i, j);
            }
        }
    }
    g
}

// Tie-break on equal predecessors: diagonal, then the move consuming more of
// the reference, then the move consuming the query only.
fn backtrack_symmetric(d: &CostMatrix, g: &[f64], mut i: usize, mut j: usize) -> WarpingPath {
    let m = d.cols;
    let mut pairs = vec![(i, j)];
    let mut weights = Vec::new();
    while i > 0 || j > 0 {
        let c = d.get(i, j);
        let target = g[i * m + j];
        let diag = (i > 0 && j > 0) && g[(i - 1) * m + j - 1] + 2.0 * c == target;
        let left = j > 0 && g[i * m + j - 1] + c == target;
        if diag {
            weights.push(2.0);
            i -= 1;
            j -= 1;
        } else if left {
            weights.push(1.0);
            j -= 1;
        } else {
            weights.push(1.0);
            i -= 1;
        }
        pairs.push((i, j));
    }
    weights.push(2.0);
    pairs.reverse();
    weights.reverse();
    WarpingPath { pairs, weights }
}

fn backtrack_asymmetric(d: &CostMatrix, g: &[f64], mut i: usize, mut j: usize) -> WarpingPath {
    let m = d.cols;
    let mut pairs = vec![(i, j)];
    while i > 0 {
        let prev = &g[(i - 1) * m..i * m];
        let pick = |jj: usize| prev[jj] + d.get(i, j) == g[i * m + j];
        let next = if j >= 1 && pick(j - 1) {
            j - 1
        } else if j >= 2 && pick(j - 2) {
            j - 2
        } else {
            j
        };
        i -= 1;
        j = next;
        pairs.push((i, j));
    }
    pairs.reverse();
    let weights = vec![1.0; pairs.len()];
    WarpingPath { pairs, weights }
}
