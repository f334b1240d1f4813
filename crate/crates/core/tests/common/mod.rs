//! Independent reference implementations shared by the test suites.
#![allow(dead_code)]

/// Minimum cost over every symmetric path from the first to the last cell,
/// enumerated recursively. The first cell counts twice, diagonal moves
/// count twice.
pub fn brute_symmetric(x: &[f64], y: &[f64]) -> f64 {
    fn walk(x: &[f64], y: &[f64], i: usize, j: usize, acc: f64, best: &mut f64) {
        if i == x.len() - 1 && j == y.len() - 1 {
            *best = best.min(acc);
            return;
        }
        let d = |a: usize, b: usize| (x[a] - y[b]).abs();
        if i + 1 < x.len() {
            walk(x, y, i + 1, j, acc + d(i + 1, j), best);
        }
        if j + 1 < y.len() {
            walk(x, y, i, j + 1, acc + d(i, j + 1), best);
        }
        if i + 1 < x.len() && j + 1 < y.len() {
            walk(x, y, i + 1, j + 1, acc + 2.0 * d(i + 1, j + 1), best);
        }
    }
    let mut best = f64::INFINITY;
    walk(x, y, 0, 0, 2.0 * (x[0] - y[0]).abs(), &mut best);
    best
}

/// Minimum over every asymmetric path (each row visited once, column steps
/// of 0, 1 or 2) with free start and/or end column when requested. `None`
/// when no admissible path exists.
pub fn brute_asymmetric(x: &[f64], y: &[f64], open_begin: bool, open_end: bool) -> Option<f64> {
    fn walk(x: &[f64], y: &[f64], i: usize, j: usize, acc: f64, open_end: bool, best: &mut f64) {
        if i == x.len() - 1 {
            if open_end || j == y.len() - 1 {
                *best = best.min(acc);
            }
            return;
        }
        for dj in 0..=2 {
            let nj = j + dj;
            if nj < y.len() {
                walk(x, y, i + 1, nj, acc + (x[i + 1] - y[nj]).abs(), open_end, best);
            }
        }
    }
    let mut best = f64::INFINITY;
    let starts = if open_begin { y.len() } else { 1 };
    for p in 0..starts {
        walk(x, y, 0, p, (x[0] - y[p]).abs(), open_end, &mut best);
    }
    best.is_finite().then_some(best)
}

/// Adjusted Rand index from the four pair counts.
pub fn pair_count_ari(p1: &[usize], p2: &[usize]) -> f64 {
    let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..p1.len() {
        for j in i + 1..p1.len() {
            match (p1[i] == p1[j], p2[i] == p2[j]) {
                (true, true) => a += 1.0,
                (true, false) => b += 1.0,
                (false, true) => c += 1.0,
                (false, false) => d += 1.0,
            }
        }
    }
    2.0 * (a * d - b * c) / ((a + b) * (b + d) + (a + c) * (c + d))
}

/// RMSSE straight from the definition: scaled errors at positions
/// `from..=to` (1-based), each divided by the RMS of all random-walk errors
/// up to its position.
pub fn direct_rmsse(y: &[f64], forecasts: &[f64], from: usize, to: usize) -> f64 {
    if from > to {
        return 0.0;
    }
    let mut total = 0.0;
    for u in from..=to {
        let mut s = 0.0;
        for v in 2..=u {
            s += (y[v - 1] - y[v - 2]).powi(2);
        }
        let scale = (s / (u - 1) as f64).sqrt();
        let q = (y[u - 1] - forecasts[u - 2]) / scale;
        total += q * q;
    }
    (total / (to - from + 1) as f64).sqrt()
}

/// Asymmetric DTW closed form for two centered ANN processes.
pub fn ann_dtw_closed_form(ax: f64, sx: f64, ay: f64, sy: f64, n: usize) -> f64 {
    let n = n as f64;
    sx * sx * (n + n * (n - 1.0) / 2.0 * ax * ax) + sy * sy * (n + (n * n / 4.0).floor() * ay * ay)
}
