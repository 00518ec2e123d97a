//! Composite Gauss-Legendre quadrature on graded, locally refined panels.
//!
//! The integrands in this crate are bounded but nearly singular: the kernel
//! `K(s, t)` peaks at `t = phi_eps(s)` with width `eps * a(s)`, and field
//! evaluations peak where the line comes closest to the evaluation point.
//! Uniform rules under-resolve those peaks, so panels are graded toward the
//! interval ends and bisected toward a designated peak until the local panel
//! width resolves it.

/// Nodes and weights of an `n`-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, then Newton on P_n(x) = 0.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A fixed Gauss-Legendre rule, cached as nodes/weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        GaussRule { nodes, weights }
    }

    /// Map the rule to `[a, b]`, appending `(point, weight)` pairs to `out`.
    pub fn extend_mapped(&self, a: f64, b: f64, out: &mut Vec<(f64, f64)>) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            out.push((c + h * x, w * h));
        }
    }
}

/// Description of a peak to resolve inside a panel set.
#[derive(Debug, Clone, Copy)]
pub struct Peak {
    /// Location of the peak in the integration variable.
    pub center: f64,
    /// Width scale; panels touching the peak are bisected until their length
    /// is at most half this width.
    pub width: f64,
}

/// Build panel breakpoints on `[lo, hi]`: `n_base` panels graded toward `hi`
/// like `1 - (1 - u)^2` (plus a mirror grading toward `lo` when requested),
/// then geometric refinement toward each peak.
pub fn graded_breakpoints(
    lo: f64,
    hi: f64,
    n_base: usize,
    grade_low_end: bool,
    peaks: &[Peak],
) -> Vec<f64> {
    assert!(hi > lo);
    let len = hi - lo;
    let mut pts = Vec::with_capacity(n_base + 1 + 16 * peaks.len());
    for j in 0..=n_base {
        let u = j as f64 / n_base as f64;
        // symmetric quadratic grading toward both ends, or toward `hi` only
        let x = if grade_low_end {
            if u <= 0.5 {
                2.0 * u * u
            } else {
                1.0 - 2.0 * (1.0 - u) * (1.0 - u)
            }
        } else {
            1.0 - (1.0 - u) * (1.0 - u)
        };
        pts.push(lo + len * x);
    }
    for peak in peaks {
        if peak.width <= 0.0 {
            continue;
        }
        // Geometric ladder of breakpoints closing in on the peak from both
        // sides, from the interval scale down to width/4, so panel lengths
        // near the peak shrink in proportion to their distance from it.
        let mut d = 0.5 * len;
        while d >= 0.25 * peak.width {
            for cand in [peak.center - d, peak.center + d] {
                if cand > lo && cand < hi {
                    pts.push(cand);
                }
            }
            d *= 0.5;
        }
        if peak.center > lo && peak.center < hi {
            pts.push(peak.center);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15 * len.max(1.0));
    if *pts.first().unwrap() != lo {
        pts.insert(0, lo);
    }
    if *pts.last().unwrap() != hi {
        pts.push(hi);
    }
    pts
}

/// Quadrature points and weights over graded+refined panels on `[lo, hi]`.
pub fn panel_quadrature(
    rule: &GaussRule,
    lo: f64,
    hi: f64,
    n_base: usize,
    grade_low_end: bool,
    peaks: &[Peak],
) -> Vec<(f64, f64)> {
    let bps = graded_breakpoints(lo, hi, n_base, grade_low_end, peaks);
    let mut out = Vec::with_capacity((bps.len() - 1) * 8);
    for w in bps.windows(2) {
        rule.extend_mapped(w[0], w[1], &mut out);
    }
    out
}

/// Periodic trapezoid rule over [0, 2pi) with automatic doubling.
///
/// Starts at `n0` points and doubles (reusing previous evaluations) until two
/// successive levels agree to `tol` absolutely and relatively, or the cap is
/// reached. For smooth 2pi-periodic integrands this converges spectrally.
pub fn periodic_trapezoid_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    n0: usize,
    tol: f64,
    n_max: usize,
) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut n = n0.max(4);
    let mut sum: f64 = (0..n).map(|k| f(two_pi * k as f64 / n as f64)).sum();
    let mut value = sum * two_pi / n as f64;
    while 2 * n <= n_max {
        // new points interleave the old ones
        let m = 2 * n;
        let add: f64 = (0..n)
            .map(|k| f(two_pi * (2 * k + 1) as f64 / m as f64))
            .sum();
        sum += add;
        let next = sum * two_pi / m as f64;
        let diff = (next - value).abs();
        n = m;
        let converged = diff <= tol * value.abs().max(1.0);
        value = next;
        if converged {
            break;
        }
    }
    value
}

/// Fixed-order periodic trapezoid over [0, 2pi).
pub fn periodic_trapezoid<F: FnMut(f64) -> f64>(mut f: F, n: usize) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let sum: f64 = (0..n).map(|k| f(two_pi * k as f64 / n as f64)).sum();
    sum * two_pi / n as f64
}

/// Cubic Lagrange interpolation weights from a sorted node set to a point
/// `t`; returns the first stencil index and four weights. Used to evaluate
/// nodal densities at quadrature points.
pub fn lagrange_cubic(nodes: &[f64], t: f64) -> (usize, [f64; 4]) {
    let n = nodes.len();
    debug_assert!(n >= 4);
    let mut lo = match nodes.binary_search_by(|v| v.total_cmp(&t)) {
        Ok(i) => i.min(n - 2),
        Err(i) => i.saturating_sub(1).min(n - 2),
    };
    lo = lo.saturating_sub(1).min(n - 4);
    let xs = &nodes[lo..lo + 4];
    let mut w = [0.0; 4];
    for i in 0..4 {
        let mut num = 1.0;
        let mut den = 1.0;
        for j in 0..4 {
            if i != j {
                num *= t - xs[j];
                den *= xs[i] - xs[j];
            }
        }
        w[i] = num / den;
    }
    (lo, w)
}

/// Evaluate a nodal function at `t` by cubic Lagrange interpolation.
pub fn interp_nodal(nodes: &[f64], values: &[f64], t: f64) -> f64 {
    let (base, w) = lagrange_cubic(nodes, t);
    (0..4).map(|i| w[i] * values[base + i]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_nodes_integrate_monomials() {
        let rule = GaussRule::new(8);
        let mut pts = Vec::new();
        rule.extend_mapped(0.0, 1.0, &mut pts);
        // 8-point Gauss is exact through degree 15
        for k in 0..=15u32 {
            let q: f64 = pts.iter().map(|&(x, w)| w * x.powi(k as i32)).sum();
            let exact = 1.0 / (k as f64 + 1.0);
            assert!((q - exact).abs() < 1e-14, "degree {k}: {q} vs {exact}");
        }
    }

    #[test]
    fn graded_panels_resolve_a_sharp_peak() {
        let rule = GaussRule::new(8);
        let eps = 1e-3;
        let peak = Peak { center: 0.37, width: eps };
        let pts = panel_quadrature(&rule, 0.0, 1.0, 24, false, &[peak]);
        let q: f64 = pts
            .iter()
            .map(|&(x, w)| w / ((x - 0.37) * (x - 0.37) + eps * eps).sqrt())
            .sum();
        // closed form: asinh((1-c)/eps) + asinh(c/eps)
        let exact = ((1.0 - 0.37) / eps).asinh() + (0.37f64 / eps).asinh();
        assert!((q - exact).abs() < 1e-10, "{q} vs {exact}");
    }

    #[test]
    fn trapezoid_is_spectral_for_smooth_periodic() {
        let v = periodic_trapezoid_adaptive(|t| 1.0 / (2.0 + t.cos()), 8, 1e-13, 4096);
        let exact = 2.0 * std::f64::consts::PI / 3.0f64.sqrt();
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn breakpoints_cover_interval() {
        let bps = graded_breakpoints(0.0, 1.0, 16, true, &[Peak { center: 0.9, width: 0.01 }]);
        assert_eq!(bps[0], 0.0);
        assert_eq!(*bps.last().unwrap(), 1.0);
        assert!(bps.windows(2).all(|w| w[1] > w[0]));
    }
}
