//! Small one-dimensional numerical helpers shared by the scanning code.

/// `n` evenly spaced points covering `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                lo + (hi - lo) * t
            })
            .collect(),
    }
}

/// Golden-section search for a local minimum of a unimodal `g` on `[lo, hi]`.
pub fn golden_min(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if g1 <= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = g(x2);
        }
    }
    if g1 <= g2 {
        (x1, g1)
    } else {
        (x2, g2)
    }
}

/// Bisection on a sign change of `g` between `lo` and `hi`, stopping at width `tol`.
/// Returns the midpoint of the final bracket.
pub fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut g_lo = g(lo);
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All local minima of `g` over `[lo, hi]`: sampled on `n` points, then each
/// discrete minimum (including the endpoints) is refined by golden section
/// within its neighbouring cells.
pub fn refined_minima(g: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let xs = linspace(lo, hi, n.max(3));
    let ys: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let last = xs.len() - 1;
    let mut out = Vec::new();
    for i in 0..=last {
        let left = if i == 0 { f64::INFINITY } else { ys[i - 1] };
        let right = if i == last { f64::INFINITY } else { ys[i + 1] };
        if ys[i] <= left && ys[i] <= right {
            let a = xs[i.saturating_sub(1)];
            let b = xs[(i + 1).min(last)];
            let (x, y) = golden_min(&g, a, b, 1e-13 * (1.0 + a.abs().max(b.abs())));
            if y < ys[i] {
                out.push((x, y));
            } else {
                out.push((xs[i], ys[i]));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        let xs = linspace(-1.0, 1.0, 5);
        assert_eq!(xs, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, y) = golden_min(|x| (x - 0.3) * (x - 0.3), -1.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(y < 1e-16);
    }

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-12);
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn refined_minima_of_double_well() {
        let m = refined_minima(|x| (x * x - 1.0).powi(2), -2.0, 2.0, 101);
        let interior: Vec<_> = m.iter().filter(|(_, y)| *y < 0.5).collect();
        assert_eq!(interior.len(), 2);
        assert!(interior.iter().all(|(x, _)| (x.abs() - 1.0).abs() < 1e-6));
    }
}
