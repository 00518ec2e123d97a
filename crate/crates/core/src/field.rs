//! Exterior pressure field and the 3D-1D coupling residuals.
//!
//! The exterior pressure is `q(x) = eta S_N[(a^4 p_s)_s](x)`. On the vessel
//! surface the residuals measure how well `(q, p)` satisfies the Robin and
//! angle-averaged flux boundary conditions of the coupled 3D-1D model:
//!
//! ```text
//! R(s, theta) = dq/dn - (omega/eps)(p - q|_surface)
//! Rbar(s)     = integral_0^{2pi} (dq/dn) J dtheta - eta (a^4 p_s)_s
//! ```
//!
//! Surface gradients are computed by differentiating under the integral
//! sign (the kernels `R.e_r/|R|^3`, `R.e_t/|R|^3`, `R.e_theta/|R|^3`);
//! finite differences would be unstable at distance `eps a` from the line.

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{angular_unit, jacobian, radial_unit, VesselScene};
use crate::kernel::{line_potential, FieldPoint};
use crate::quadrature::{interp_nodal, panel_quadrature, GaussRule, Peak};
use crate::solver1d::Solution;
use crate::{Error, Result};

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Exterior pressure at a validated field point.
pub fn exterior_pressure(scene: &VesselScene, sol: &Solution, point: &FieldPoint) -> f64 {
    scene.eta * line_potential(scene, &sol.nodes, &sol.flux_div, point)
}

/// Plane specification for a slice of the exterior field.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SlicePlane {
    pub origin: [f64; 3],
    /// spanning directions (normalized on use)
    pub span_u: [f64; 3],
    pub span_v: [f64; 3],
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
    pub nu: usize,
    pub nv: usize,
    /// surface clearance below which points are masked, in units of the
    /// local radius `eps a(s_nearest)`
    #[serde(default = "default_clearance_factor")]
    pub clearance_factor: f64,
}

fn default_clearance_factor() -> f64 {
    2.0
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy)]
pub struct SlicePoint {
    pub x: Vector3<f64>,
    pub q: f64,
    pub masked: bool,
}

/// Evaluated slice grid.
#[derive(Debug, Clone)]
pub struct FieldSlice {
    pub plane: SlicePlane,
    pub points: Vec<SlicePoint>,
    pub n_unmasked: usize,
    pub min_clearance_kept: f64,
}

/// Evaluate the exterior pressure on a plane grid, masking points below the
/// wall, inside the vessel, or within the clearance band.
pub fn slice_grid(scene: &VesselScene, sol: &Solution, plane: &SlicePlane) -> Result<FieldSlice> {
    let eu = Vector3::from(plane.span_u).normalize();
    let ev = Vector3::from(plane.span_v).normalize();
    let origin = Vector3::from(plane.origin);
    if plane.nu < 2 || plane.nv < 2 {
        return Err(Error::Field("slice grid needs at least 2x2 points".into()));
    }
    let coords: Vec<(usize, usize)> = (0..plane.nv)
        .flat_map(|j| (0..plane.nu).map(move |i| (i, j)))
        .collect();
    let points: Vec<SlicePoint> = coords
        .par_iter()
        .map(|&(i, j)| {
            let fu = plane.u_range.0
                + (plane.u_range.1 - plane.u_range.0) * i as f64 / (plane.nu - 1) as f64;
            let fv = plane.v_range.0
                + (plane.v_range.1 - plane.v_range.0) * j as f64 / (plane.nv - 1) as f64;
            let x = origin + eu * fu + ev * fv;
            if x.z < 0.0 {
                return SlicePoint { x, q: f64::NAN, masked: true };
            }
            let (clearance, s_near) = scene.clearance(&x);
            let min_clear = plane.clearance_factor * scene.eps * scene.radius.a(s_near);
            if clearance < min_clear.max(1e-12) {
                return SlicePoint { x, q: f64::NAN, masked: true };
            }
            let fp = FieldPoint { x, clearance, s_nearest: s_near };
            SlicePoint { x, q: exterior_pressure(scene, sol, &fp), masked: false }
        })
        .collect();
    let n_unmasked = points.iter().filter(|p| !p.masked).count();
    if n_unmasked == 0 {
        return Err(Error::Field("degenerate slice: every grid point is masked".into()));
    }
    let min_clearance_kept = points
        .iter()
        .filter(|p| !p.masked)
        .map(|p| scene.clearance(&p.x).0)
        .fold(f64::INFINITY, f64::min);
    Ok(FieldSlice { plane: plane.clone(), points, n_unmasked, min_clearance_kept })
}

/// Surface trace and first derivatives of `q` at `(s, theta)`, computed by
/// one shared quadrature pass over the line parameter.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceEval {
    pub q: f64,
    pub dq_dr: f64,
    pub dq_ds: f64,
    pub dq_dtheta: f64,
    pub dq_dn: f64,
}

/// Evaluate the surface trace and gradient of `q` at `(s, theta)`.
pub fn surface_eval(
    scene: &VesselScene,
    sol: &Solution,
    s: f64,
    theta: f64,
    n_base_panels: usize,
) -> SurfaceEval {
    let frame = scene.centerline.at(s);
    let a = scene.radius.a(s);
    let ea = scene.eps * a;
    let e_r = radial_unit(&frame, theta);
    let e_th = angular_unit(&frame, theta);
    let x_surf = frame.x + e_r * ea;
    let refl = scene.reflected();

    // peaks at the direct and mirrored closest-approach parameters
    let center = scene.stretch.forward(s).clamp(-1.0, 1.0);
    let width = ea.max(scene.stretch.ell);
    let peaks = [
        Peak { center, width },
        Peak { center: -center, width },
    ];
    let rule = GaussRule::new(8);
    let pts = panel_quadrature(&rule, -1.0, 1.0, n_base_panels, true, &peaks);

    let mut q = 0.0;
    let mut dq_dr = 0.0;
    let mut dq_ds = 0.0;
    let mut dq_dth = 0.0;
    let kappa_hat = frame.kappa1 * theta.cos() + frame.kappa2 * theta.sin();
    for &(t, w) in &pts {
        let g = interp_nodal(&sol.nodes, &sol.flux_div, t.abs());
        let rvec = x_surf - refl.y(scene.stretch.inverse(t));
        let rn = rvec.norm();
        let r3 = rn * rn * rn;
        q += w * g / rn;
        dq_dr += w * g * rvec.dot(&e_r) / r3;
        dq_ds += w * g * rvec.dot(&frame.e_t) / r3;
        dq_dth += w * g * rvec.dot(&e_th) / r3;
    }
    let c = scene.eta / FOUR_PI;
    let q = c * q;
    // d(1/|R|) = -(R . dx) / |R|^3 with dx/dr = e_r, dx/ds = (1 - r kappa_hat) e_t,
    // dx/dtheta = r e_theta, evaluated at r = eps a(s)
    let dq_dr = -c * dq_dr;
    let dq_ds = -c * dq_ds * (1.0 - ea * kappa_hat);
    let dq_dtheta = -c * dq_dth * ea;

    let ap = scene.radius.a_prime(s);
    let denom = (1.0 + scene.eps * scene.eps * ap * ap).sqrt();
    let dq_dn = (-dq_dr + scene.eps * ap / (1.0 - ea * kappa_hat) * dq_ds) / denom;
    SurfaceEval { q, dq_dr, dq_ds, dq_dtheta, dq_dn }
}

/// Coupling residuals on the vessel surface.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    /// arclength values of the surface grid (tip band excluded)
    pub s: Vec<f64>,
    pub theta: Vec<f64>,
    /// angle-averaged flux residual per s
    pub rbar: Vec<f64>,
    /// pointwise Robin residual per (s, theta)
    pub r_pointwise: Vec<Vec<f64>>,
    pub sup_rbar: f64,
    pub l2_rbar: f64,
    pub sup_r: f64,
    /// excluded tip band [1 - ell, 1]
    pub tip_band: (f64, f64),
    pub eps: f64,
    /// max |Rbar(route A) - Rbar(route B)| over s, two independent
    /// theta-resolutions (consistency of the derivative integrals)
    pub consistency_error: f64,
    /// discrete norm factor ||a g||_C1 + |log eps| ||a^{-1} g||_inf used to
    /// normalize the pointwise bound (difference quotients for the C1 part)
    pub norm_factor: f64,
}

/// Compute the Robin and angle-averaged flux residuals on an
/// `(s, theta)` surface grid. The grid uses the solver nodes below the tip
/// band `[1 - ell, 1]`, where the surface normal degenerates to the tangent.
pub fn boundary_residuals(scene: &VesselScene, sol: &Solution) -> Result<ResidualReport> {
    let n_theta = scene.mesh.theta_order.max(16);
    let thetas: Vec<f64> = (0..n_theta)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / n_theta as f64)
        .collect();
    let tip_lo = 1.0 - scene.stretch.ell;
    let s_grid: Vec<f64> = sol
        .nodes
        .iter()
        .copied()
        .filter(|&s| s > 0.0 && s < tip_lo)
        .collect();
    if s_grid.is_empty() {
        return Err(Error::Field("empty residual grid".into()));
    }

    struct RowOut {
        rbar: f64,
        rbar_b: f64,
        r_point: Vec<f64>,
    }

    let omega_over_eps = scene.omega / scene.eps;
    let rows: Vec<Result<RowOut>> = s_grid
        .par_iter()
        .map(|&s| {
            let p_here = interp_nodal(&sol.nodes, &sol.p, s);
            let g_here = interp_nodal(&sol.nodes, &sol.flux_div, s);
            // route A: direct theta-trapezoid of dq/dn J and pointwise residuals
            let mut flux_int = 0.0;
            let mut r_point = Vec::with_capacity(thetas.len());
            for &theta in &thetas {
                let ev = surface_eval(scene, sol, s, theta, 24);
                let j = jacobian(&scene.centerline, &scene.radius, scene.eps, s, theta)?;
                flux_int += ev.dq_dn * j;
                r_point.push(ev.dq_dn - omega_over_eps * (p_here - ev.q));
            }
            flux_int *= 2.0 * std::f64::consts::PI / thetas.len() as f64;
            let rbar = flux_int - scene.eta * g_here;

            // route B: theta-integrated Robin form on an independent
            // (finer) theta grid
            let n2 = thetas.len() * 2;
            let mut robin_int = 0.0;
            for k in 0..n2 {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / n2 as f64;
                let ev = surface_eval(scene, sol, s, theta, 24);
                let j = jacobian(&scene.centerline, &scene.radius, scene.eps, s, theta)?;
                let robin = omega_over_eps * (p_here - ev.q);
                let r_local = ev.dq_dn - robin;
                robin_int += (robin + r_local) * j;
            }
            robin_int *= 2.0 * std::f64::consts::PI / n2 as f64;
            let rbar_b = robin_int - scene.eta * g_here;
            Ok(RowOut { rbar, rbar_b, r_point })
        })
        .collect();

    let mut rbar = Vec::with_capacity(s_grid.len());
    let mut r_pointwise = Vec::with_capacity(s_grid.len());
    let mut consistency_error: f64 = 0.0;
    for row in rows {
        let row = row?;
        consistency_error = consistency_error.max((row.rbar - row.rbar_b).abs());
        rbar.push(row.rbar);
        r_pointwise.push(row.r_point);
    }

    let sup_rbar = rbar.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let mut l2 = 0.0;
    for i in 0..s_grid.len() {
        let h = if i + 1 < s_grid.len() {
            s_grid[i + 1] - s_grid[i]
        } else {
            tip_lo - s_grid[i]
        };
        l2 += h * rbar[i] * rbar[i];
    }
    let sup_r = r_pointwise
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |m, &x| m.max(x.abs()));

    // discrete norm factor: ||a g||_C1 + |log eps| ||a^{-1} g||_inf
    let mut ag_c1: f64 = 0.0;
    let mut ainv_g: f64 = 0.0;
    for i in 0..sol.nodes.len() - 1 {
        let m = 0.5 * (sol.nodes[i] + sol.nodes[i + 1]);
        let h = sol.nodes[i + 1] - sol.nodes[i];
        let a_m = scene.radius.a(m);
        let g_m = 0.5 * (sol.flux_div[i] + sol.flux_div[i + 1]);
        let ag_s = (scene.radius.a(sol.nodes[i + 1]) * sol.flux_div[i + 1]
            - scene.radius.a(sol.nodes[i]) * sol.flux_div[i])
            / h;
        ag_c1 = ag_c1.max((a_m * g_m).abs()).max(ag_s.abs());
        ainv_g = ainv_g.max((g_m / a_m).abs());
    }
    let norm_factor = ag_c1 + scene.eps.ln().abs() * ainv_g;

    Ok(ResidualReport {
        s: s_grid,
        theta: thetas,
        rbar,
        r_pointwise,
        sup_rbar,
        l2_rbar: l2.sqrt(),
        sup_r,
        tip_band: (tip_lo, 1.0),
        eps: scene.eps,
        consistency_error,
        norm_factor,
    })
}

/// Angular variation of the surface trace at arclength `s`:
/// `max_theta |q(s, theta) - mean_theta q(s, .)|`; expected
/// `O(eps a |log eps|)`.
pub fn theta_variation(scene: &VesselScene, sol: &Solution, s: f64) -> f64 {
    let n = scene.mesh.theta_order.max(16);
    let traces: Vec<f64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            surface_eval(scene, sol, s, theta, 24).q
        })
        .collect();
    let mean = traces.iter().sum::<f64>() / n as f64;
    traces.iter().fold(0.0f64, |m, &q| m.max((q - mean).abs()))
}
