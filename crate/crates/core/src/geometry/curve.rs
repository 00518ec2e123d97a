//! Centerline construction: curve families, arclength reparameterization,
//! and transport of a rotation-minimizing frame.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Curve family for the vessel centerline. All families start at the origin
/// with tangent `e_z` (perpendicular to the wall) and are rescaled internally
/// to unit arclength.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CurveSpec {
    /// Straight segment along `e_z`.
    Straight,
    /// Circular arc in the x-z plane subtending `arc_angle` radians; the
    /// radius is fixed by the unit-length constraint.
    PlanarArc { arc_angle: f64 },
    /// Clamped cubic spline through 3D control points (first point must be
    /// the origin; the start tangent is clamped to `e_z`).
    Spline { points: Vec<[f64; 3]> },
}

/// Cubic spline for one coordinate over uniform knots on [0, 1], clamped
/// first derivative at the start, natural at the end.
#[derive(Debug, Clone)]
struct SplineCoord {
    y: Vec<f64>,
    m: Vec<f64>, // second derivatives at knots
    h: f64,
}

impl SplineCoord {
    fn build(y: &[f64], d0: f64) -> Self {
        let n = y.len();
        assert!(n >= 3);
        let h = 1.0 / (n - 1) as f64;
        // Tridiagonal system for second derivatives with clamped start,
        // natural end (M_{n-1} = 0).
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut lower = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 2.0 * h;
        upper[0] = h;
        rhs[0] = 6.0 * ((y[1] - y[0]) / h - d0);
        for i in 1..n - 1 {
            lower[i] = h;
            diag[i] = 4.0 * h;
            upper[i] = h;
            rhs[i] = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / h;
        }
        lower[n - 1] = 0.0;
        diag[n - 1] = 1.0;
        rhs[n - 1] = 0.0;
        // Thomas algorithm
        for i in 1..n {
            let w = lower[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
        }
        SplineCoord { y: y.to_vec(), m, h }
    }

    fn segment(&self, u: f64) -> (usize, f64) {
        let n = self.y.len();
        let mut i = ((u / self.h).floor() as usize).min(n - 2);
        if u < 0.0 {
            i = 0;
        }
        (i, u - i as f64 * self.h)
    }

    fn eval(&self, u: f64) -> f64 {
        let (i, d) = self.segment(u);
        let h = self.h;
        let t = d / h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        y0 * (1.0 - t)
            + y1 * t
            + (h * h / 6.0)
                * (((1.0 - t).powi(3) - (1.0 - t)) * m0 + (t.powi(3) - t) * m1)
    }

    fn deriv(&self, u: f64) -> f64 {
        let (i, d) = self.segment(u);
        let h = self.h;
        let t = d / h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        (y1 - y0) / h
            + (h / 6.0) * ((3.0 * t * t - 1.0) * m1 - (3.0 * (1.0 - t) * (1.0 - t) - 1.0) * m0)
    }

    fn deriv2(&self, u: f64) -> f64 {
        let (i, d) = self.segment(u);
        let t = d / self.h;
        self.m[i] * (1.0 - t) + self.m[i + 1] * t
    }
}

/// A parameterized curve `P(u)`, `u in [0, 1]`, with analytic derivatives.
#[derive(Debug, Clone)]
enum ParamCurve {
    Straight,
    Arc { radius: f64, angle: f64 },
    Spline { x: SplineCoord, y: SplineCoord, z: SplineCoord },
}

impl ParamCurve {
    fn from_spec(spec: &CurveSpec) -> Result<Self> {
        match spec {
            CurveSpec::Straight => Ok(ParamCurve::Straight),
            CurveSpec::PlanarArc { arc_angle } => {
                if !(*arc_angle > 0.0 && *arc_angle <= 2.0 * std::f64::consts::PI) {
                    return Err(Error::Geometry(format!(
                        "arc angle {arc_angle} out of (0, 2pi]"
                    )));
                }
                Ok(ParamCurve::Arc { radius: 1.0 / arc_angle, angle: *arc_angle })
            }
            CurveSpec::Spline { points } => {
                if points.len() < 3 {
                    return Err(Error::Geometry(
                        "spline needs at least 3 control points".into(),
                    ));
                }
                let p0 = Vector3::from(points[0]);
                if p0.norm() > 1e-12 {
                    return Err(Error::Geometry(
                        "spline must start at the origin (vessel base)".into(),
                    ));
                }
                // Clamp the start tangent to e_z with the polygon length as
                // the derivative scale so |P'| stays O(polygon length).
                let poly_len: f64 = points
                    .windows(2)
                    .map(|w| (Vector3::from(w[1]) - Vector3::from(w[0])).norm())
                    .sum();
                let xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
                let ys: Vec<f64> = points.iter().map(|p| p[1]).collect();
                let zs: Vec<f64> = points.iter().map(|p| p[2]).collect();
                Ok(ParamCurve::Spline {
                    x: SplineCoord::build(&xs, 0.0),
                    y: SplineCoord::build(&ys, 0.0),
                    z: SplineCoord::build(&zs, poly_len),
                })
            }
        }
    }

    fn eval(&self, u: f64) -> Vector3<f64> {
        match self {
            ParamCurve::Straight => Vector3::new(0.0, 0.0, u),
            ParamCurve::Arc { radius, angle } => {
                let psi = angle * u;
                Vector3::new(radius * (1.0 - psi.cos()), 0.0, radius * psi.sin())
            }
            ParamCurve::Spline { x, y, z } => Vector3::new(x.eval(u), y.eval(u), z.eval(u)),
        }
    }

    /// Interior parameter values where the curve is only C^2 (spline
    /// knots); integration steps are split there.
    fn interior_breakpoints(&self) -> Vec<f64> {
        match self {
            ParamCurve::Straight | ParamCurve::Arc { .. } => Vec::new(),
            ParamCurve::Spline { x, .. } => {
                let n = x.y.len();
                (1..n - 1).map(|k| k as f64 / (n - 1) as f64).collect()
            }
        }
    }

    fn deriv(&self, u: f64) -> Vector3<f64> {
        match self {
            ParamCurve::Straight => Vector3::new(0.0, 0.0, 1.0),
            // radius = 1/angle, so |P'| = 1 and u is already arclength
            ParamCurve::Arc { radius: _, angle } => {
                let psi = angle * u;
                Vector3::new(psi.sin(), 0.0, psi.cos())
            }
            ParamCurve::Spline { x, y, z } => Vector3::new(x.deriv(u), y.deriv(u), z.deriv(u)),
        }
    }

    fn deriv2(&self, u: f64) -> Vector3<f64> {
        match self {
            ParamCurve::Straight => Vector3::zeros(),
            ParamCurve::Arc { radius: _, angle } => {
                let psi = angle * u;
                Vector3::new(psi.cos(), 0.0, -psi.sin()) * *angle
            }
            ParamCurve::Spline { x, y, z } => {
                Vector3::new(x.deriv2(u), y.deriv2(u), z.deriv2(u))
            }
        }
    }
}

/// One row of the centerline sample table.
#[derive(Debug, Clone, Copy)]
pub struct CenterlineSample {
    pub s: f64,
    pub x: Vector3<f64>,
    pub e_t: Vector3<f64>,
    pub e_1: Vector3<f64>,
    pub e_2: Vector3<f64>,
    pub kappa1: f64,
    pub kappa2: f64,
}

/// Arclength-parameterized centerline on [0, 1] with a transported
/// orthonormal frame. Positions are in unit-length coordinates; the original
/// (dimensional) length is kept for output scaling.
#[derive(Debug, Clone)]
pub struct Centerline {
    pub samples: Vec<CenterlineSample>,
    pub total_length: f64,
    pub interpolation_order: usize,
    /// max |kappa| over the sample grid
    pub kappa_star: f64,
    /// non-self-intersection constant estimated on the sample grid
    pub c_gamma: f64,
}

/// Frame and position data at one arclength value.
#[derive(Debug, Clone, Copy)]
pub struct FramePoint {
    pub x: Vector3<f64>,
    pub e_t: Vector3<f64>,
    pub e_1: Vector3<f64>,
    pub e_2: Vector3<f64>,
    pub kappa1: f64,
    pub kappa2: f64,
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 40)
}

/// Arclength table: cumulative sigma(u) at spline-resolution checkpoints,
/// with monotone Newton/bisection inversion.
struct ArcLength<'a> {
    curve: &'a ParamCurve,
    knots: Vec<f64>,
    sigma: Vec<f64>,
}

impl<'a> ArcLength<'a> {
    fn build(curve: &'a ParamCurve, n_checkpoints: usize, tol: f64) -> Self {
        let speed = |u: f64| curve.deriv(u).norm();
        let mut knots = Vec::with_capacity(n_checkpoints + 1);
        let mut sigma = Vec::with_capacity(n_checkpoints + 1);
        let mut acc = 0.0;
        knots.push(0.0);
        sigma.push(0.0);
        for j in 0..n_checkpoints {
            let a = j as f64 / n_checkpoints as f64;
            let b = (j + 1) as f64 / n_checkpoints as f64;
            acc += adaptive_simpson(&speed, a, b, tol / n_checkpoints as f64);
            knots.push(b);
            sigma.push(acc);
        }
        ArcLength { curve, knots, sigma }
    }

    fn total(&self) -> f64 {
        *self.sigma.last().unwrap()
    }

    /// Solve sigma(u) = target on [0, 1].
    fn invert(&self, target: f64, tol: f64) -> f64 {
        if target <= 0.0 {
            return 0.0;
        }
        if target >= self.total() {
            return 1.0;
        }
        let idx = match self
            .sigma
            .binary_search_by(|v| v.total_cmp(&target))
        {
            Ok(i) => return self.knots[i],
            Err(i) => i, // sigma[idx-1] < target < sigma[idx]
        };
        // fixed integration base; bisection bounds move independently
        let base_u = self.knots[idx - 1];
        let base_sigma = self.sigma[idx - 1];
        let (mut lo, mut hi) = (base_u, self.knots[idx]);
        let speed = |u: f64| self.curve.deriv(u).norm();
        // Newton from the midpoint with bisection fallback
        let mut u = 0.5 * (lo + hi);
        for _ in 0..60 {
            let g = base_sigma + adaptive_simpson(&speed, base_u, u, 0.1 * tol) - target;
            if g.abs() < tol {
                return u;
            }
            if g > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let next = u - g / speed(u);
            u = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        }
        u
    }
}

/// Build a unit-arclength centerline with a transported frame.
///
/// `dimensional_length` is kept as metadata; positions are rescaled to unit
/// length. `e1_base` selects the initial normal (projected off the base
/// tangent); sampling uses `n_samples` uniform arclength values with the
/// frame advanced by one RK4 step per interval.
pub fn build_centerline(
    spec: &CurveSpec,
    dimensional_length: f64,
    e1_base: Vector3<f64>,
    n_samples: usize,
) -> Result<Centerline> {
    if n_samples < 64 {
        return Err(Error::Geometry("need at least 64 centerline samples".into()));
    }
    let curve = ParamCurve::from_spec(spec)?;
    let arc = ArcLength::build(&curve, 256, 1e-11);
    let lambda = arc.total();
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Geometry("degenerate curve: zero length".into()));
    }

    // unit-speed consistency check (reparameterization failure guard)
    let m = n_samples;
    let mut us = Vec::with_capacity(m);
    for i in 0..m {
        let s = i as f64 / (m - 1) as f64;
        us.push(arc.invert(s * lambda, 1e-12 * lambda.max(1.0)));
    }
    for (i, &u) in us.iter().enumerate().skip(1) {
        let s = i as f64 / (m - 1) as f64;
        // re-evaluate sigma at the inverted u against the target
        let sigma_err = (arc.sigma_at(u) - s * lambda).abs() / lambda;
        if sigma_err > 1e-8 {
            return Err(Error::Geometry(format!(
                "arclength reparameterization failed at s={s}: residual {sigma_err:.2e}"
            )));
        }
    }

    // tangent at the base must be perpendicular to the wall
    let t0 = curve.deriv(0.0).normalize();
    if (t0 - Vector3::z()).norm() > 1e-10 {
        return Err(Error::Geometry(format!(
            "base tangent {:?} is not e_z",
            t0
        )));
    }

    // curvature vector of the unit-length curve at parameter u
    let curvature = |u: f64| -> Vector3<f64> {
        let d1 = curve.deriv(u);
        let d2 = curve.deriv2(u);
        let n2 = d1.norm_squared();
        (d2 * n2 - d1 * d1.dot(&d2)) / (n2 * n2) * lambda
    };
    let tangent = |u: f64| curve.deriv(u).normalize();

    // initial normal: e1_base projected off e_t(0)
    let mut e1 = e1_base - t0 * e1_base.dot(&t0);
    if e1.norm() < 1e-10 {
        return Err(Error::Geometry(
            "initial normal is parallel to the base tangent".into(),
        ));
    }
    e1 = e1.normalize();

    // arclength images of the spline knots (step-splitting points)
    let knot_s: Vec<f64> = curve
        .interior_breakpoints()
        .iter()
        .map(|&u| arc.sigma_at(u) / lambda)
        .collect();

    let h = 1.0 / (m - 1) as f64;
    let mut samples = Vec::with_capacity(m);
    let mut kappa_star: f64 = 0.0;
    for i in 0..m {
        let s = i as f64 / (m - 1) as f64;
        let u = us[i];
        let x = curve.eval(u) / lambda;
        let et = tangent(u);
        let c = curvature(u);
        let e1_here = (e1 - et * e1.dot(&et)).normalize();
        let e2_here = et.cross(&e1_here);
        let k1 = c.dot(&e1_here);
        let k2 = c.dot(&e2_here);
        kappa_star = kappa_star.max((k1 * k1 + k2 * k2).sqrt());
        samples.push(CenterlineSample {
            s,
            x,
            e_t: et,
            e_1: e1_here,
            e_2: e2_here,
            kappa1: k1,
            kappa2: k2,
        });

        // advance e_1 by RK4 steps of e_1' = -(c . e_1) e_t, splitting at
        // spline-knot images so every step sees a smooth right-hand side
        if i + 1 < m {
            let rhs = |s_eval: f64, e: Vector3<f64>| -> Vector3<f64> {
                let u_eval = arc.invert(s_eval.clamp(0.0, 1.0) * lambda, 1e-12 * lambda.max(1.0));
                let cv = curvature(u_eval);
                let tv = tangent(u_eval);
                -tv * cv.dot(&e)
            };
            let rk4 = |e: Vector3<f64>, s0: f64, s1: f64| -> Vector3<f64> {
                let hh = s1 - s0;
                let k1v = rhs(s0, e);
                let k2v = rhs(s0 + 0.5 * hh, e + k1v * (0.5 * hh));
                let k3v = rhs(s0 + 0.5 * hh, e + k2v * (0.5 * hh));
                let k4v = rhs(s1, e + k3v * hh);
                e + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (hh / 6.0)
            };
            let s_next = s + h;
            let mut e_run = e1_here;
            let mut s_run = s;
            for &sk in &knot_s {
                if sk > s_run + 1e-14 && sk < s_next - 1e-14 {
                    e_run = rk4(e_run, s_run, sk);
                    s_run = sk;
                }
            }
            e1 = rk4(e_run, s_run, s_next);
        }
    }

    // centerline sanity on the grid: wall penetration anywhere, wall
    // contact away from the endpoints, chordal self-intersection. A curve
    // whose far end touches (but does not cross) the wall still builds;
    // full scene validation reports c_gamma and rejects contact.
    let mut c_gamma = f64::INFINITY;
    let mut interior_wall = f64::INFINITY;
    for smp in &samples {
        if smp.x.z < -1e-9 {
            return Err(Error::Geometry(format!(
                "centerline dips below the wall at s={}: z={}",
                smp.s, smp.x.z
            )));
        }
        if smp.s > 0.0 {
            c_gamma = c_gamma.min(smp.x.z.max(0.0) / smp.s);
        }
        if smp.s > 0.05 && smp.s < 0.95 {
            interior_wall = interior_wall.min(smp.x.z.max(0.0) / smp.s);
        }
    }
    if interior_wall <= 1e-9 {
        return Err(Error::Geometry(
            "centerline touches the wall away from its endpoints".into(),
        ));
    }
    let stride = (m / 512).max(1);
    let mut chordal = f64::INFINITY;
    let coarse: Vec<&CenterlineSample> = samples.iter().step_by(stride).collect();
    for (ia, pa) in coarse.iter().enumerate() {
        for pb in coarse.iter().skip(ia + 1) {
            let ds = (pa.s - pb.s).abs();
            if ds < 4.0 * h * stride as f64 {
                continue;
            }
            chordal = chordal.min((pa.x - pb.x).norm() / ds);
        }
    }
    if chordal <= 1e-9 {
        return Err(Error::Geometry(format!(
            "centerline self-intersects (chordal ratio {chordal:.2e})"
        )));
    }
    c_gamma = c_gamma.min(chordal);

    Ok(Centerline {
        samples,
        total_length: dimensional_length,
        interpolation_order: 3,
        kappa_star,
        c_gamma,
    })
}

impl<'a> ArcLength<'a> {
    /// sigma evaluated at arbitrary u (checkpoint + local Simpson).
    fn sigma_at(&self, u: f64) -> f64 {
        let idx = match self.knots.binary_search_by(|v| v.total_cmp(&u)) {
            Ok(i) => return self.sigma[i],
            Err(i) => i,
        };
        let speed = |x: f64| self.curve.deriv(x).norm();
        self.sigma[idx - 1] + adaptive_simpson(&speed, self.knots[idx - 1], u, 1e-13)
    }
}

impl Centerline {
    /// Cubic interpolation of position and frame at arclength `s`, with the
    /// frame re-orthonormalized after interpolation. The stencil is shifted
    /// one-sided at the ends so the order stays O(h^4) there.
    pub fn at(&self, s: f64) -> FramePoint {
        let m = self.samples.len();
        let h = 1.0 / (m - 1) as f64;
        let s = s.clamp(0.0, 1.0);
        let cell = ((s / h).floor() as usize).min(m - 2);
        let base = cell.saturating_sub(1).min(m - 4);
        // Lagrange basis on four uniform nodes, local coordinate tau in node
        // units measured from the stencil start
        let tau = (s - base as f64 * h) / h;
        let w = [
            -(tau - 1.0) * (tau - 2.0) * (tau - 3.0) / 6.0,
            tau * (tau - 2.0) * (tau - 3.0) / 2.0,
            -tau * (tau - 1.0) * (tau - 3.0) / 2.0,
            tau * (tau - 1.0) * (tau - 2.0) / 6.0,
        ];
        let sm = &self.samples[base..base + 4];

        let interp = |g: &dyn Fn(&CenterlineSample) -> f64| -> f64 {
            (0..4).map(|k| w[k] * g(&sm[k])).sum()
        };
        let interp_v = |g: &dyn Fn(&CenterlineSample) -> Vector3<f64>| -> Vector3<f64> {
            let mut acc = Vector3::zeros();
            for k in 0..4 {
                acc += g(&sm[k]) * w[k];
            }
            acc
        };

        let x = interp_v(&|p| p.x);
        let e_t = interp_v(&|p| p.e_t).normalize();
        let mut e_1 = interp_v(&|p| p.e_1);
        e_1 = (e_1 - e_t * e_1.dot(&e_t)).normalize();
        let e_2 = e_t.cross(&e_1);
        let k1 = interp(&|p| p.kappa1);
        let k2 = interp(&|p| p.kappa2);
        FramePoint { x, e_t, e_1, e_2, kappa1: k1, kappa2: k2 }
    }

    /// Position only (cheaper interpolation, used in kernel inner loops).
    pub fn position(&self, s: f64) -> Vector3<f64> {
        self.at(s).x
    }

    /// Base point of the vessel (on the wall).
    pub fn base(&self) -> Vector3<f64> {
        self.samples[0].x
    }
}
