//! Small derivative-free minimisers over boxes.

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Minimise `f` on `[lo, hi]`: coarse grid scan, then golden-section search
/// around the best grid point. Returns `(argmin, min)`.
pub(crate) fn minimize_scalar(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, grid: usize) -> (f64, f64) {
    let grid = grid.max(2);
    let step = (hi - lo) / (grid - 1) as f64;
    let mut best = (lo, f(lo));
    for k in 1..grid {
        let x = if k == grid - 1 { hi } else { lo + step * k as f64 };
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if (b - a) < 1e-10 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

/// Nelder-Mead on the unit square, with trial points clamped to the box.
pub(crate) fn nelder_mead_unit2(mut f: impl FnMut([f64; 2]) -> f64, start: [f64; 2], max_eval: usize) -> ([f64; 2], f64) {
    let clamp = |p: [f64; 2]| [p[0].clamp(0.0, 1.0), p[1].clamp(0.0, 1.0)];
    let mut evals = 0usize;
    let mut eval = |p: [f64; 2], evals: &mut usize| {
        *evals += 1;
        let v = f(p);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let s = 0.1;
    let p0 = clamp(start);
    let p1 = clamp([if p0[0] + s <= 1.0 { p0[0] + s } else { p0[0] - s }, p0[1]]);
    let p2 = clamp([p0[0], if p0[1] + s <= 1.0 { p0[1] + s } else { p0[1] - s }]);
    let mut simplex = [(p0, 0.0), (p1, 0.0), (p2, 0.0)];
    for v in simplex.iter_mut() {
        v.1 = eval(v.0, &mut evals);
    }
    while evals < max_eval {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = (simplex[2].1 - simplex[0].1).abs();
        let size = (simplex[2].0[0] - simplex[0].0[0]).abs() + (simplex[2].0[1] - simplex[0].0[1]).abs();
        if spread <= 1e-12 * (1.0 + simplex[0].1.abs()) && size < 1e-8 {
            break;
        }
        let centroid = [(simplex[0].0[0] + simplex[1].0[0]) / 2.0, (simplex[0].0[1] + simplex[1].0[1]) / 2.0];
        let worst = simplex[2];
        let along = |t: f64| clamp([centroid[0] + t * (worst.0[0] - centroid[0]), centroid[1] + t * (worst.0[1] - centroid[1])]);
        let reflected = along(-1.0);
        let fr = eval(reflected, &mut evals);
        if fr < simplex[0].1 {
            let expanded = along(-2.0);
            let fe = eval(expanded, &mut evals);
            simplex[2] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[1].1 {
            simplex[2] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < worst.1 {
                let p = along(-0.5);
                (p, eval(p, &mut evals))
            } else {
                let p = along(0.5);
                (p, eval(p, &mut evals))
            };
            if fc < worst.1.min(fr) {
                simplex[2] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    v.0 = [(v.0[0] + best[0]) / 2.0, (v.0[1] + best[1]) / 2.0];
                    v.1 = eval(v.0, &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0]
}
