//! Independent numerical oracles for tests.
//!
//! Nothing in this crate is used by the production code paths; it exists so
//! that quadrature results, convergence orders, and scaling trends can be
//! checked against implementations that share no code with the library under
//! test. The adaptive integrator here uses the classical 15-point Kronrod /
//! 7-point Gauss pair with interval bisection, while the production code uses
//! composite Gauss-Legendre panels with its own node computation.

/// Kronrod-15 abscissae on [0, 1] side of the symmetric rule (QUADPACK values).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Kronrod-15 weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_2,
    0.063_092_092_629_978_6,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss-7 weights for the embedded error estimate.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut res_k = WGK[7] * fc;
    let mut res_g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let fsum = f(c - x) + f(c + x);
        res_k += WGK[j] * fsum;
        if j % 2 == 1 {
            // odd Kronrod indices coincide with the Gauss-7 nodes
            res_g += WG[j / 2] * fsum;
        }
    }
    (res_k * h, ((res_k - res_g) * h).abs())
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]` to absolute
/// tolerance `tol`, by recursive bisection of the worst interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    // (a, b, value, err) worklist; split until the summed error is below tol.
    let mut segs: Vec<(f64, f64, f64, f64)> = Vec::new();
    let (v, e) = gk15(&f, a, b);
    segs.push((a, b, v, e));
    for _ in 0..10_000 {
        let total_err: f64 = segs.iter().map(|s| s.3).sum();
        if total_err <= tol {
            break;
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty worklist");
        let (sa, sb, _, _) = segs.swap_remove(idx);
        let m = 0.5 * (sa + sb);
        let (v1, e1) = gk15(&f, sa, m);
        let (v2, e2) = gk15(&f, m, sb);
        segs.push((sa, m, v1, e1));
        segs.push((m, sb, v2, e2));
    }
    segs.iter().map(|s| s.2).sum()
}

/// Adaptive integration with interior breakpoints inserted up front (useful
/// when the integrand has known kinks or near-singular peaks).
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
) -> f64 {
    let mut pts: Vec<f64> = vec![a];
    for &p in breakpoints {
        if p > a && p < b {
            pts.push(p);
        }
    }
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let n = pts.len() - 1;
    let sub_tol = tol / n as f64;
    pts.windows(2)
        .map(|w| integrate(&f, w[0], w[1], sub_tol))
        .sum()
}

/// Least-squares slope of log(y) against log(x). Panics if fewer than two
/// points or non-positive data.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points for a slope");
    let lx: Vec<f64> = xs.iter().map(|&x| x.abs().ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|&y| y.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..lx.len() {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    num / den
}

/// Observed convergence order from errors at a sequence of resolutions,
/// assuming `n` doubles between entries: order_i = log2(e_i / e_{i+1}).
/// Returns the per-step orders.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| (w[0] / w[1]).log2())
        .collect()
}

/// Central finite difference of a scalar function of a scalar.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// A tiny deterministic xorshift generator so tests do not need a rand
/// dependency; `u64 -> f64` in [0, 1).
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = integrate(|x| x * x, 0.0, 1.0, 1e-14);
        assert!((v - 1.0 / 3.0).abs() < 1e-13);
        let v = integrate(|x| x.powi(7) - 2.0 * x, -1.0, 2.0, 1e-13);
        let exact = (2.0f64.powi(8) - 1.0) / 8.0 - (4.0 - 1.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn integrates_near_singular_peak() {
        // integral of 1/(x^2 + eps^2) over [-1, 1] = 2 atan(1/eps)/eps
        let eps = 1e-3;
        let v = integrate(|x| 1.0 / (x * x + eps * eps), -1.0, 1.0, 1e-10);
        let exact = 2.0 * (1.0 / eps).atan() / eps;
        assert!((v - exact).abs() / exact < 1e-10);
    }

    #[test]
    fn breakpoints_help_kinked_integrands() {
        let v = integrate_with_breakpoints(|x: f64| x.abs(), -1.0, 1.0, &[0.0], 1e-14);
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn slope_fit_recovers_power_law() {
        let xs = [0.08f64, 0.04, 0.02, 0.01];
        let ys: Vec<f64> = xs.iter().map(|&x| 3.0 * x.powf(1.5)).collect();
        let s = log_log_slope(&xs, &ys);
        assert!((s - 1.5).abs() < 1e-12);
    }

    #[test]
    fn orders_from_halved_errors() {
        let orders = observed_orders(&[1.0, 0.25, 0.0625]);
        assert!((orders[0] - 2.0).abs() < 1e-12);
        assert!((orders[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rng_is_deterministic_and_in_range() {
        let mut a = TestRng::new(42);
        let mut b = TestRng::new(42);
        for _ in 0..100 {
            let x = a.next_f64();
            assert_eq!(x, b.next_f64());
            assert!((0.0..1.0).contains(&x));
        }
    }
}
