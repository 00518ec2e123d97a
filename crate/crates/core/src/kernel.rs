//! Half-space Neumann Green's function, the angle-averaged kernel
//! `K(s, t)`, the line potential, and dense kernel-matrix assembly.
//!
//! The exterior pressure is a line distribution of `G_N` sources along the
//! effective centerline; on the vessel surface the theta average of that
//! potential produces the bounded kernel
//! `K(s, t) = eta/(8 pi^2) * integral_0^{2pi} dtheta / |R_eps(s, t, theta)|`.
//! The kernel peaks at `t = phi_eps(s)` with width `eps a(s)`; quadrature
//! panels are graded and locally refined to resolve it.

use nalgebra::{DMatrix, Vector3};
use rayon::prelude::*;

use crate::geometry::VesselScene;
use crate::quadrature::{
    lagrange_cubic, panel_quadrature, periodic_trapezoid_adaptive, GaussRule, Peak,
};
use crate::{Error, Result};

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

fn mirror(p: Vector3<f64>) -> Vector3<f64> {
    Vector3::new(p.x, p.y, -p.z)
}

/// Green's function for the half-space Neumann problem:
/// `G_N(x, y) = (1/4pi) (1/|x-y| + 1/|x-y*|)` with `y*` the reflection of
/// `y` across `z = 0`.
pub fn green_neumann(x: &Vector3<f64>, y: &Vector3<f64>) -> Result<f64> {
    let d = (x - y).norm();
    if d < 1e-14 {
        return Err(Error::Kernel(format!("singular evaluation: x = y = {x:?}")));
    }
    let dm = (x - mirror(*y)).norm();
    Ok((1.0 / d + 1.0 / dm) / FOUR_PI)
}

/// A point in the upper half space, strictly outside the vessel.
#[derive(Debug, Clone, Copy)]
pub struct FieldPoint {
    pub x: Vector3<f64>,
    /// distance from the vessel surface
    pub clearance: f64,
    /// arclength of the nearest centerline sample
    pub s_nearest: f64,
}

impl FieldPoint {
    pub fn new(scene: &VesselScene, x: Vector3<f64>) -> Result<Self> {
        if x.z < 0.0 {
            return Err(Error::Field(format!("point below the wall: z = {}", x.z)));
        }
        let (clearance, s_nearest) = scene.clearance(&x);
        if clearance <= 0.0 {
            return Err(Error::Field(format!(
                "point inside the vessel (clearance {clearance:.3e} at s = {s_nearest:.3})"
            )));
        }
        Ok(FieldPoint { x, clearance, s_nearest })
    }
}

/// Angle-averaged kernel `K(s, t)` for `s in [0, 1]`, `t in [-1, 1]`.
///
/// The periodic trapezoid rule starts at the scene's `theta_order` and
/// doubles until two levels agree to 1e-11; the integrand is smooth and
/// 2pi-periodic so convergence is spectral.
pub fn kernel_value(scene: &VesselScene, s: f64, t: f64) -> f64 {
    let frame = scene.centerline.at(s);
    let ea = scene.eps * scene.radius.a(s);
    let d = frame.x - scene.reflected().y(scene.stretch.inverse(t));
    kernel_theta_average(scene, &d, &frame.e_1, &frame.e_2, ea)
}

/// theta average given the precomputed cross-section data; `d` is
/// `X(s) - Y(phi^{-1}(t))` and `ea = eps a(s)`.
fn kernel_theta_average(
    scene: &VesselScene,
    d: &Vector3<f64>,
    e1: &Vector3<f64>,
    e2: &Vector3<f64>,
    ea: f64,
) -> f64 {
    // |R|^2 = q0 + c1 cos(theta) + c2 sin(theta)
    let q0 = d.norm_squared() + ea * ea;
    let c1 = 2.0 * ea * d.dot(e1);
    let c2 = 2.0 * ea * d.dot(e2);
    let integral = periodic_trapezoid_adaptive(
        |theta| 1.0 / (q0 + c1 * theta.cos() + c2 * theta.sin()).sqrt(),
        scene.mesh.theta_order,
        1e-11,
        2048,
    );
    scene.eta / (8.0 * std::f64::consts::PI * std::f64::consts::PI) * integral
}

/// One assembled row: quadrature nodes on the folded interval, weights, and
/// folded kernel values `K(s_i, t) + K(s_i, -t)`.
#[derive(Debug, Clone)]
pub struct KernelRow {
    pub s: f64,
    pub t: Vec<f64>,
    pub w: Vec<f64>,
    pub k_fold: Vec<f64>,
}

/// Dense discrete form of `f -> integral_{-1}^{1} K(s, t) f*(t) dt`,
/// folded onto [0, 1] by the reflection identity `f*(-t) = f(t)`.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    /// collocation nodes (the solver mesh)
    pub nodes: Vec<f64>,
    pub rows: Vec<KernelRow>,
    /// nodal operator: (nodal f) -> (row integrals), including quadrature
    /// weights and cubic interpolation from the nodes
    pub nodal: DMatrix<f64>,
    pub theta_order: usize,
}

impl KernelMatrix {
    /// Apply the folded operator to nodal values.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.nodes.len());
        let n = self.nodes.len();
        let mut out = vec![0.0; self.rows.len()];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, &fj) in f.iter().enumerate().take(n) {
                acc += self.nodal[(i, j)] * fj;
            }
            *o = acc;
        }
        out
    }
}

/// Assemble kernel rows at collocation points `row_s`, integrating `t` over
/// `[0, t_max]` (folded). The full operator uses `t_max = 1`.
fn assemble_rows(scene: &VesselScene, row_s: &[f64], t_max: f64) -> Result<Vec<KernelRow>> {
    let rule = GaussRule::new(8);
    let eps = scene.eps;
    let ell = scene.stretch.ell;
    let rows: Vec<KernelRow> = row_s
        .par_iter()
        .map(|&s| {
            let frame = scene.centerline.at(s);
            let ea = eps * scene.radius.a(s);
            let refl = scene.reflected();
            // kernel peak at t = phi_eps(s) (clamped), width ~ eps a(s);
            // the mirrored peak sits at t = -phi_eps(s), relevant near t = 0
            let center = scene.stretch.forward(s).min(t_max);
            let width = ea.max(ell);
            let peaks = [
                Peak { center, width },
                Peak { center: 0.0, width: width.max(eps * scene.radius.a(0.0)) },
            ];
            let pts = panel_quadrature(&rule, 0.0, t_max, 32, false, &peaks);
            let mut t = Vec::with_capacity(pts.len());
            let mut w = Vec::with_capacity(pts.len());
            let mut k_fold = Vec::with_capacity(pts.len());
            for &(tq, wq) in &pts {
                let d_pos = frame.x - refl.y(scene.stretch.inverse(tq));
                let d_neg = frame.x - refl.y(scene.stretch.inverse(-tq));
                let k = kernel_theta_average(scene, &d_pos, &frame.e_1, &frame.e_2, ea)
                    + kernel_theta_average(scene, &d_neg, &frame.e_1, &frame.e_2, ea);
                t.push(tq);
                w.push(wq);
                k_fold.push(k);
            }
            KernelRow { s, t, w, k_fold }
        })
        .collect();

    for row in &rows {
        for &k in &row.k_fold {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::Kernel(format!(
                    "non-positive kernel sample {k} in row s = {}",
                    row.s
                )));
            }
        }
    }
    Ok(rows)
}

fn rows_to_nodal(rows: &[KernelRow], nodes: &[f64]) -> DMatrix<f64> {
    let n = nodes.len();
    let mut m = DMatrix::zeros(rows.len(), n);
    for (i, row) in rows.iter().enumerate() {
        for ((&tq, &wq), &kq) in row.t.iter().zip(&row.w).zip(&row.k_fold) {
            let (base, lw) = lagrange_cubic(nodes, tq);
            for (di, &wgt) in lw.iter().enumerate() {
                m[(i, base + di)] += wq * kq * wgt;
            }
        }
    }
    m
}

/// Assemble the dense folded kernel operator on the solver mesh.
///
/// A folded-vs-unfolded self-check runs on a few rows: assembling the
/// unfolded operator on [-1, 1] and applying it to the even extension of a
/// smooth test vector must reproduce the folded result to roundoff.
pub fn assemble_kernel_matrix(scene: &VesselScene, nodes: &[f64]) -> Result<KernelMatrix> {
    let rows = assemble_rows(scene, nodes, 1.0)?;
    let nodal = rows_to_nodal(&rows, nodes);

    // folding identity self-check on a few rows
    let probe = |s: f64| 0.3 + s * s * (1.0 - s);
    for idx in [0, rows.len() / 2, rows.len() - 1] {
        let row = &rows[idx];
        let folded: f64 = row
            .t
            .iter()
            .zip(&row.w)
            .zip(&row.k_fold)
            .map(|((&t, &w), &k)| w * k * probe(t))
            .sum();
        // unfolded: same quadrature points mirrored onto [-1, 0), with the
        // even extension probe(|t|)
        let mut unfolded = 0.0;
        for (&tq, &wq) in row.t.iter().zip(&row.w) {
            let k_pos = kernel_value(scene, row.s, tq);
            let k_neg = kernel_value(scene, row.s, -tq);
            unfolded += wq * k_pos * probe(tq) + wq * k_neg * probe(tq.abs());
        }
        if (folded - unfolded).abs() > 1e-9 * folded.abs().max(1.0) {
            return Err(Error::Kernel(format!(
                "folded/unfolded assembly mismatch {:.3e} at row s = {}",
                (folded - unfolded).abs(),
                row.s
            )));
        }
    }

    Ok(KernelMatrix {
        nodes: nodes.to_vec(),
        rows,
        nodal,
        theta_order: scene.mesh.theta_order,
    })
}

/// Evaluate the line potential `S_N[f](x)` for a density given at mesh
/// nodes: `integral_0^1 G_N(x, X(phi^{-1}(t))) f(t) dt`.
pub fn line_potential(
    scene: &VesselScene,
    nodes: &[f64],
    density: &[f64],
    point: &FieldPoint,
) -> f64 {
    let pts = field_quadrature(scene, point);
    let refl = scene.reflected();
    let mut acc = 0.0;
    for &(tq, wq) in &pts {
        let y = refl.y(scene.stretch.inverse(tq));
        let g = (1.0 / (point.x - y).norm() + 1.0 / (point.x - mirror(y)).norm()) / FOUR_PI;
        let (base, lw) = lagrange_cubic(nodes, tq);
        let mut f = 0.0;
        for (di, &wgt) in lw.iter().enumerate() {
            f += wgt * density[base + di];
        }
        acc += wq * g * f;
    }
    acc
}

/// The same potential written over the reflected interval:
/// `(1/4pi) integral_{-1}^{1} f*(t) / |x - Y(phi^{-1}(t))| dt`.
/// Agrees with [`line_potential`] by the image construction; kept as a
/// verification path.
pub fn line_potential_reflected(
    scene: &VesselScene,
    nodes: &[f64],
    density: &[f64],
    point: &FieldPoint,
) -> f64 {
    let pts = field_quadrature(scene, point);
    let refl = scene.reflected();
    let mut acc = 0.0;
    for &(tq, wq) in &pts {
        let (base, lw) = lagrange_cubic(nodes, tq);
        let mut f = 0.0;
        for (di, &wgt) in lw.iter().enumerate() {
            f += wgt * density[base + di];
        }
        for t_signed in [tq, -tq] {
            let y = refl.y(scene.stretch.inverse(t_signed));
            acc += wq * f / ((point.x - y).norm() * FOUR_PI);
        }
    }
    acc
}

/// Quadrature points for field evaluation: graded panels refined near the
/// parameter of closest approach to `point` (and to its mirror image).
fn field_quadrature(scene: &VesselScene, point: &FieldPoint) -> Vec<(f64, f64)> {
    let rule = GaussRule::new(8);
    let refl = scene.reflected();
    // closest approach of the direct and mirrored line to x
    let mut best = (f64::INFINITY, 0.0);
    let mut best_m = (f64::INFINITY, 0.0);
    let n_scan = 128;
    for k in 0..=n_scan {
        let t = k as f64 / n_scan as f64;
        let y = refl.y(scene.stretch.inverse(t));
        let d = (point.x - y).norm();
        if d < best.0 {
            best = (d, t);
        }
        let dm = (point.x - mirror(y)).norm();
        if dm < best_m.0 {
            best_m = (dm, t);
        }
    }
    let peaks = [
        Peak { center: best.1, width: best.0 },
        Peak { center: best_m.1, width: best_m.0 },
    ];
    panel_quadrature(&rule, 0.0, 1.0, 24, false, &peaks)
}

/// Trapezoid weights for the outer `s` integration on a graded node set.
pub fn outer_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = nodes[i + 1] - nodes[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Symmetrized kernel quadratic form
/// `Q[f] = integral_0^1 integral_{-1}^1 K(s,t) f*(t) f(s) dt ds`
/// evaluated through the folded operator and the outer trapezoid weights.
pub fn symmetrized_quadratic_form(kernel: &KernelMatrix, f: &[f64]) -> f64 {
    let w = outer_weights(&kernel.nodes);
    let kf = kernel.apply(f);
    f.iter().zip(&w).zip(&kf).map(|((&fi, &wi), &ki)| wi * fi * ki).sum()
}

/// Most negative Rayleigh quotient of the symmetrized kernel quadratic
/// form against the weighted norm `||a^{-1/2} f||_{L^2}^2`, over nodal
/// vectors supported on `s <= s_max` (excluding the degenerate `a = 0`
/// node).
///
/// The double integral is discretized with the same trapezoid weights on
/// both arguments, `Q[f] ~ sum_ij w_i w_j Kfold(s_i, s_j) f_i f_j`, so the
/// discrete form inherits the operator's structure rather than the
/// asymmetry of the production interpolation. This is the probe of the
/// operator's near-positivity: the quotient is bounded below by
/// `-C eps^{1/2} |log eps|^{1/2}` and vanishes with `eps`; with the
/// endpoint region removed it is nonnegative.
pub fn most_negative_weighted_rayleigh(scene: &VesselScene, nodes: &[f64], s_max: f64) -> f64 {
    let w = outer_weights(nodes);
    let idx: Vec<usize> = (0..nodes.len())
        .filter(|&i| nodes[i] <= s_max && scene.radius.a(nodes[i]) > 1e-12)
        .collect();
    let n = idx.len();
    // folded kernel sampled at node pairs, rows in parallel
    let rows: Vec<Vec<f64>> = idx
        .par_iter()
        .map(|&i| {
            let frame = scene.centerline.at(nodes[i]);
            let ea = scene.eps * scene.radius.a(nodes[i]);
            let refl = scene.reflected();
            idx.iter()
                .map(|&j| {
                    let d_pos = frame.x - refl.y(scene.stretch.inverse(nodes[j]));
                    let d_neg = frame.x - refl.y(scene.stretch.inverse(-nodes[j]));
                    kernel_theta_average(scene, &d_pos, &frame.e_1, &frame.e_2, ea)
                        + kernel_theta_average(scene, &d_neg, &frame.e_1, &frame.e_2, ea)
                })
                .collect()
        })
        .collect();
    // symmetrize and apply the weight transform in one pass:
    // B = W^{-1/2} (M + M^T)/2 W^{-1/2} with M_ij = w_i w_j Kfold_ij and
    // W_ii = w_i / a_i, so B_ij = sqrt(w_i a_i) Ksym_ij sqrt(w_j a_j)
    let mut b = DMatrix::zeros(n, n);
    for r in 0..n {
        let ci = (w[idx[r]] * scene.radius.a(nodes[idx[r]])).sqrt();
        for c in 0..n {
            let cj = (w[idx[c]] * scene.radius.a(nodes[idx[c]])).sqrt();
            b[(r, c)] = ci * cj * 0.5 * (rows[r][c] + rows[c][r]);
        }
    }
    let eig = b.symmetric_eigen();
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{radial_unit, CurveSpec, MeshControls, RadiusSpec};
    use approx::assert_relative_eq;
    use perfusion1d_testkit as oracle;
    use proptest::prelude::*;

    fn scene(curve: CurveSpec, eps: f64, samples: usize) -> VesselScene {
        VesselScene::new(
            "kernel-test",
            &curve,
            RadiusSpec::Spheroidal,
            1.0,
            eps,
            1.0,
            1.0,
            1.0,
            MeshControls { geom_samples: samples, ..Default::default() },
            [1.0, 0.0, 0.0],
        )
        .unwrap()
    }

    fn const_scene(eps: f64) -> VesselScene {
        VesselScene::new(
            "kernel-const",
            &CurveSpec::Straight,
            RadiusSpec::Constant,
            1.0,
            eps,
            1.0,
            1.0,
            1.0,
            MeshControls { geom_samples: 256, ..Default::default() },
            [1.0, 0.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn green_neumann_closed_form() {
        let g = green_neumann(&Vector3::new(0.0, 0.0, 1.0), &Vector3::new(0.0, 0.0, 2.0)).unwrap();
        assert_relative_eq!(g, 1.0 / (3.0 * std::f64::consts::PI), epsilon = 1e-15);
    }

    #[test]
    fn green_neumann_rejects_coincident_points() {
        let p = Vector3::new(0.3, 0.1, 0.5);
        assert!(green_neumann(&p, &p).is_err());
    }

    proptest! {
        #[test]
        fn green_neumann_is_symmetric(
            ax in -1.0..1.0f64, ay in -1.0..1.0f64, az in 0.01..2.0f64,
            bx in -1.0..1.0f64, by in -1.0..1.0f64, bz in 0.01..2.0f64,
        ) {
            let a = Vector3::new(ax, ay, az);
            let b = Vector3::new(bx, by, bz + 2.1); // keep the points apart
            let gab = green_neumann(&a, &b).unwrap();
            let gba = green_neumann(&b, &a).unwrap();
            prop_assert!((gab - gba).abs() <= 1e-14 * gab.abs().max(1e-30));
        }
    }

    #[test]
    fn wall_normal_derivative_vanishes() {
        let mut rng = oracle::TestRng::new(7);
        for _ in 0..100 {
            let x = Vector3::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0);
            let y = Vector3::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(0.3, 1.5));
            let h = 1e-5;
            let up = green_neumann(&(x + Vector3::new(0.0, 0.0, h)), &y).unwrap();
            let dn = green_neumann(&(x - Vector3::new(0.0, 0.0, h)), &y).unwrap();
            assert!(((up - dn) / (2.0 * h)).abs() < 1e-8, "dG/dz = {}", (up - dn) / (2.0 * h));
        }
    }

    #[test]
    fn straight_constant_radius_on_diagonal() {
        // same cross section: integrand is constant 1/(eps a), so
        // K = eta / (4 pi eps a)
        let sc = const_scene(0.02);
        let s = 0.4;
        let t = sc.stretch.forward(s);
        let k = kernel_value(&sc, s, t);
        assert_relative_eq!(k, sc.eta / (FOUR_PI * 0.02), epsilon = 1e-12);
    }

    #[test]
    fn kernel_matches_adaptive_theta_oracle() {
        let sc = scene(CurveSpec::PlanarArc { arc_angle: 2.0 }, 0.02, 1024);
        let mut rng = oracle::TestRng::new(11);
        for _ in 0..40 {
            let s = rng.uniform(0.0, 1.0);
            let t = rng.uniform(-1.0, 1.0);
            let k = kernel_value(&sc, s, t);
            // independent oracle: adaptive GK over theta on the raw integrand
            let frame = sc.centerline.at(s);
            let ea = sc.eps * sc.radius.a(s);
            let d = frame.x - sc.reflected().y(sc.stretch.inverse(t));
            let integrand = |theta: f64| {
                let r = d + radial_unit(&frame, theta) * ea;
                1.0 / r.norm()
            };
            let int = oracle::integrate(integrand, 0.0, 2.0 * std::f64::consts::PI, 1e-12);
            let expect = sc.eta / (8.0 * std::f64::consts::PI * std::f64::consts::PI) * int;
            assert!(
                (k - expect).abs() <= 1e-9 * expect.abs(),
                "K mismatch at (s,t)=({s},{t}): {k} vs {expect}"
            );
        }
    }

    #[test]
    fn well_separated_kernel_is_green_function_of_centerline() {
        // |s - phi^{-1}(t)| >= 0.5: K = eta/(4pi) / |X(s) - Y(phi^{-1} t)| + O(eps^2)
        let sc = scene(CurveSpec::PlanarArc { arc_angle: 2.0 }, 0.02, 1024);
        for &(s, t) in &[(0.1, 0.9), (0.15, -0.7), (0.9, 0.2), (0.8, -0.4)] {
            let k = kernel_value(&sc, s, t);
            let d = (sc.centerline.position(s) - sc.reflected().y(sc.stretch.inverse(t))).norm();
            let leading = sc.eta / (FOUR_PI * d);
            assert!(
                (k - leading).abs() <= 4.0 * sc.eps * sc.eps * leading,
                "separated value at ({s},{t}): {k} vs {leading}"
            );
        }
    }

    #[test]
    fn doubling_theta_order_is_converged() {
        let sc = scene(CurveSpec::PlanarArc { arc_angle: 2.0 }, 0.02, 1024);
        let mut hi = sc.clone();
        hi.mesh.theta_order = 128;
        for &(s, t) in &[(0.3, 0.35), (0.6, 0.55), (0.2, -0.3)] {
            let k64 = kernel_value(&sc, s, t);
            let k128 = kernel_value(&hi, s, t);
            assert!((k64 - k128).abs() < 1e-12 * k64.abs().max(1.0));
        }
    }

    #[test]
    fn matrix_times_one_matches_adaptive_row_integrals() {
        let sc = scene(CurveSpec::Straight, 0.02, 512);
        let nodes: Vec<f64> = (0..=160)
            .map(|i| {
                let u = i as f64 / 160.0;
                1.0 - (1.0 - u) * (1.0 - u)
            })
            .collect();
        let km = assemble_kernel_matrix(&sc, &nodes).unwrap();
        let ones = vec![1.0; nodes.len()];
        let applied = km.apply(&ones);
        for &i in &[0usize, 40, 80, 120, 160] {
            let s = nodes[i];
            let peak = sc.stretch.forward(s).min(1.0);
            let width = (sc.eps * sc.radius.a(s)).max(sc.stretch.ell);
            let oracle_val = oracle::integrate_with_breakpoints(
                |t| kernel_value(&sc, s, t),
                -1.0,
                1.0,
                &[-peak, -peak - width, -peak + width, 0.0, peak - width, peak, peak + width],
                1e-11,
            );
            assert!(
                (applied[i] - oracle_val).abs() <= 1e-8 * oracle_val.abs().max(1.0),
                "row {i}: {} vs {}",
                applied[i],
                oracle_val
            );
        }
    }

    #[test]
    fn row_sums_grow_logarithmically_in_eps() {
        let nodes: Vec<f64> = (0..=120)
            .map(|i| {
                let u = i as f64 / 120.0;
                1.0 - (1.0 - u) * (1.0 - u)
            })
            .collect();
        let mut max_row = Vec::new();
        for &eps in &[0.04, 0.01] {
            let sc = scene(CurveSpec::Straight, eps, 512);
            let km = assemble_kernel_matrix(&sc, &nodes).unwrap();
            let ones = vec![1.0; nodes.len()];
            let rowsums = km.apply(&ones);
            max_row.push(rowsums.iter().copied().fold(0.0f64, f64::max));
        }
        let ratio = max_row[1] / max_row[0];
        let log_ratio = (0.01f64).ln().abs() / (0.04f64).ln().abs();
        assert!(
            (ratio / log_ratio - 1.0).abs() <= 0.3,
            "row-sum ratio {ratio} vs log ratio {log_ratio}"
        );
    }

    #[test]
    fn line_potential_zero_density_and_reflected_form() {
        let sc = scene(CurveSpec::PlanarArc { arc_angle: 1.5 }, 0.02, 512);
        let nodes: Vec<f64> = (0..=80).map(|i| i as f64 / 80.0).collect();
        let zero = vec![0.0; nodes.len()];
        let p = FieldPoint::new(&sc, Vector3::new(0.4, 0.2, 0.6)).unwrap();
        assert_eq!(line_potential(&sc, &nodes, &zero, &p), 0.0);

        let density: Vec<f64> = nodes.iter().map(|&s| (1.0 - s) * (0.5 + s)).collect();
        let a = line_potential(&sc, &nodes, &density, &p);
        let b = line_potential_reflected(&sc, &nodes, &density, &p);
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-30), "{a} vs {b}");
    }

    #[test]
    fn far_field_limit_recovers_total_mass() {
        let sc = scene(CurveSpec::Straight, 0.02, 512);
        let nodes: Vec<f64> = (0..=120).map(|i| i as f64 / 120.0).collect();
        let density: Vec<f64> = nodes.iter().map(|&s| 1.0 - s * s).collect();
        // integral of the density by an independent rule
        let mass = oracle::integrate(|s| 1.0 - s * s, 0.0, 1.0, 1e-13);
        let r = 1e3;
        let p = FieldPoint::new(&sc, Vector3::new(r, 0.0, r)).unwrap();
        let q = line_potential(&sc, &nodes, &density, &p);
        let expect = mass / (2.0 * std::f64::consts::PI * p.x.norm());
        assert!(
            (q - expect).abs() <= 0.01 * expect.abs(),
            "far field {q} vs {expect}"
        );
    }

    #[test]
    fn quadratic_form_vanishes_for_zero_density() {
        let sc = scene(CurveSpec::Straight, 0.04, 512);
        let nodes: Vec<f64> = (0..=100)
            .map(|i| {
                let u = i as f64 / 100.0;
                1.0 - (1.0 - u) * (1.0 - u)
            })
            .collect();
        let km = assemble_kernel_matrix(&sc, &nodes).unwrap();
        let zero = vec![0.0; nodes.len()];
        assert_eq!(symmetrized_quadratic_form(&km, &zero), 0.0);
    }

    #[test]
    fn truncated_form_is_nonnegative() {
        // without the endpoint the symmetrized operator is positive definite
        let sc = scene(CurveSpec::Straight, 0.04, 512);
        let nodes: Vec<f64> = (0..=100)
            .map(|i| {
                let u = i as f64 / 100.0;
                1.0 - (1.0 - u) * (1.0 - u)
            })
            .collect();
        let lam = most_negative_weighted_rayleigh(&sc, &nodes, 0.9);
        assert!(lam >= -1e-10, "truncated minimum eigenvalue {lam}");
    }

    #[test]
    fn inside_vessel_points_are_rejected() {
        let sc = scene(CurveSpec::Straight, 0.02, 512);
        let err = FieldPoint::new(&sc, Vector3::new(0.0, 0.0, 0.5)).unwrap_err();
        assert!(matches!(err, Error::Field(_)));
    }
}
