//! Discretization and solution of the degenerate integrodifferential
//! equation for the interior pressure.
//!
//! With `v = p - p0` and `alpha(s) = 2 pi a(s) omega / eta`, the interior
//! pressure satisfies
//!
//! ```text
//! (a^4 v_s)_s - alpha v + alpha * integral K(s,t) [(a^4 v_t)_t]*(t) dt = alpha p0,
//! v(0) = 0,
//! ```
//!
//! with no boundary value at `s = 1`: the tip carries the natural degenerate
//! flux condition `a^4 v_s -> 0`, encoded by dropping the right flux in the
//! conservative stencil (`a^4(1) = 0`). The local part is discretized by a
//! second-order finite-volume stencil on a mesh graded toward the tip; the
//! nonlocal part reuses the folded kernel operator; the dense system is
//! solved by LU with partial pivoting and one step of iterative refinement.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::geometry::VesselScene;
use crate::kernel::{outer_weights, KernelMatrix};
use crate::{Error, Result};

/// Graded 1D mesh with per-node radius and Robin coefficient.
#[derive(Debug, Clone)]
pub struct Mesh1D {
    /// nodes s_0 = 0 < ... < s_N = 1
    pub nodes: Vec<f64>,
    pub a: Vec<f64>,
    pub alpha: Vec<f64>,
    pub grading: f64,
}

/// Node positions `s_i = 1 - (1 - i/N)^gamma`.
pub fn mesh_nodes(n: usize, gamma: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| 1.0 - (1.0 - i as f64 / n as f64).powf(gamma))
        .collect()
}

/// Build the solver mesh for a scene; `n >= 16` intervals.
pub fn build_mesh(scene: &VesselScene, n: usize) -> Result<Mesh1D> {
    if n < 16 {
        return Err(Error::Solver(format!("mesh needs at least 16 intervals, got {n}")));
    }
    let nodes = mesh_nodes(n, scene.mesh.grading);
    let a = nodes.iter().map(|&s| scene.radius.a(s)).collect();
    let alpha = nodes.iter().map(|&s| scene.alpha(s)).collect();
    Ok(Mesh1D { nodes, a, alpha, grading: scene.mesh.grading })
}

impl Mesh1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// interval midpoints
    pub fn midpoints(&self) -> Vec<f64> {
        self.nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

/// Banded flux operator for `v -> (a^4 v_s)_s`.
///
/// Rows 1..N hold (sub, diag, super); row N drops the right flux, imposing
/// the natural degenerate condition `a^4 v_s|_{s=1} = 0`. Row 0 is a
/// one-sided second-order stencil over the first four nodes so the flux
/// divergence is defined at the base node too (it feeds the kernel
/// integral as part of the density).
#[derive(Debug, Clone)]
pub struct FluxOperator {
    pub bands: Vec<[f64; 3]>,
    /// one-sided row over columns 0..3
    pub first_row: [f64; 4],
}

/// Conservative second-order stencil with `a^4` at interval midpoints:
/// `(a^4 v_s)_s |_i ~ [F_{i+1/2} - F_{i-1/2}] / h_i` with
/// `F_{i+1/2} = a^4(s_{i+1/2}) (v_{i+1} - v_i)/h_{i+1/2}`.
pub fn discretize_local(scene: &VesselScene, mesh: &Mesh1D) -> FluxOperator {
    let n = mesh.len();
    let s = &mesh.nodes;
    let a4_mid: Vec<f64> = mesh
        .midpoints()
        .iter()
        .map(|&m| scene.radius.a(m).powi(4))
        .collect();
    let mut bands = vec![[0.0; 3]; n];
    for i in 1..n {
        let h_left = s[i] - s[i - 1];
        let (flux_right, h_cell) = if i + 1 < n {
            let h_right = s[i + 1] - s[i];
            (a4_mid[i] / h_right, 0.5 * (s[i + 1] - s[i - 1]))
        } else {
            // tip row: zero right flux over the half control volume
            (0.0, 0.5 * h_left)
        };
        let flux_left = a4_mid[i - 1] / h_left;
        bands[i][0] = flux_left / h_cell;
        bands[i][2] = flux_right / h_cell;
        bands[i][1] = -(bands[i][0] + bands[i][2]);
    }
    // base row: one-sided second-order derivative of the flux F = a^4 v_s
    // at s = 0, from F(0), F(m_{1/2}), F(m_{3/2}); F(0) uses a cubic
    // one-sided v_s(0)
    let h1 = s[1] - s[0];
    let h2 = s[2] - s[1];
    let a4_0 = scene.radius.a(s[0]).powi(4);
    // cubic Lagrange derivative weights at s[0] over s[0..4]
    let mut dv0 = [0.0; 4];
    for k in 0..4 {
        if k == 0 {
            dv0[0] = (1..4).map(|j| 1.0 / (s[0] - s[j])).sum();
        } else {
            let mut num = 1.0;
            let mut den = 1.0;
            for j in 0..4 {
                if j != 0 && j != k {
                    num *= s[0] - s[j];
                }
                if j != k {
                    den *= s[k] - s[j];
                }
            }
            dv0[k] = num / den;
        }
    }
    // one-sided derivative of F at 0 over the points {0, p, q}
    let p = 0.5 * h1;
    let q = s[1] + 0.5 * h2 - s[0];
    let w_f0 = -(p + q) / (p * q);
    let w_fp = q / (p * (q - p));
    let w_fq = -p / (q * (q - p));
    let mut first_row = [0.0; 4];
    for k in 0..4 {
        first_row[k] = w_f0 * a4_0 * dv0[k];
    }
    first_row[0] += w_fp * a4_mid[0] * (-1.0 / h1);
    first_row[1] += w_fp * a4_mid[0] * (1.0 / h1);
    first_row[1] += w_fq * a4_mid[1] * (-1.0 / h2);
    first_row[2] += w_fq * a4_mid[1] * (1.0 / h2);
    FluxOperator { bands, first_row }
}

impl FluxOperator {
    /// Apply to nodal values.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        assert_eq!(n, self.bands.len());
        let mut out = vec![0.0; n];
        out[0] = (0..4).map(|k| self.first_row[k] * v[k]).sum();
        for i in 1..n {
            let b = &self.bands[i];
            let mut acc = b[1] * v[i];
            acc += b[0] * v[i - 1];
            if i + 1 < n {
                acc += b[2] * v[i + 1];
            }
            out[i] = acc;
        }
        out
    }

    /// Dense form of the full flux operator (no boundary condition).
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.bands.len();
        let mut m = DMatrix::zeros(n, n);
        for (j, &c) in self.first_row.iter().enumerate() {
            m[(0, j)] = c;
        }
        for i in 1..n {
            m[(i, i - 1)] = self.bands[i][0];
            m[(i, i)] = self.bands[i][1];
            if i + 1 < n {
                m[(i, i + 1)] = self.bands[i][2];
            }
        }
        m
    }
}

/// Check that `-(D - diag(alpha))` with the Dirichlet row is an M-matrix:
/// positive diagonal, non-positive off-diagonals, weakly diagonally
/// dominant. This is the discrete basis of the maximum principle.
pub fn local_system_is_m_matrix(op: &FluxOperator, alpha: &[f64]) -> bool {
    let n = op.bands.len();
    for (i, &alpha_i) in alpha.iter().enumerate().take(n).skip(1) {
        let sub = -op.bands[i][0];
        let sup = -op.bands[i][2];
        let diag = -op.bands[i][1] + alpha_i;
        if sub > 0.0 || sup > 0.0 || diag <= 0.0 {
            return false;
        }
        if diag + 1e-12 * diag.abs() < sub.abs() + sup.abs() {
            return false;
        }
    }
    true
}

/// Solve the local (kernel-free) problem `(a^4 v_s)_s - alpha v = alpha f`
/// with `v(0) = 0` by the Thomas algorithm.
///
/// The solution obeys the maximum principle `||v||_inf <= 2 ||f||_inf`.
pub fn solve_local(scene: &VesselScene, mesh: &Mesh1D, f: &[f64]) -> Result<Vec<f64>> {
    let n = mesh.len();
    if f.len() != n {
        return Err(Error::Solver("forcing length mismatch".into()));
    }
    if f.iter().any(|x| !x.is_finite()) {
        return Err(Error::Solver("non-finite forcing".into()));
    }
    let op = discretize_local(scene, mesh);
    // rows: v_0 = 0; (D v)_i - alpha_i v_i = alpha_i f_i
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    diag[0] = 1.0;
    for i in 1..n {
        sub[i] = op.bands[i][0];
        diag[i] = op.bands[i][1] - mesh.alpha[i];
        if i + 1 < n {
            sup[i] = op.bands[i][2];
        }
        rhs[i] = mesh.alpha[i] * f[i];
    }
    // Thomas sweep
    for i in 1..n {
        let denom = diag[i - 1];
        if denom == 0.0 {
            return Err(Error::Solver("singular local system".into()));
        }
        let w = sub[i] / denom;
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if diag[n - 1] == 0.0 {
        return Err(Error::Solver("singular local system".into()));
    }
    let mut v = vec![0.0; n];
    v[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        v[i] = (rhs[i] - sup[i] * v[i + 1]) / diag[i];
    }
    Ok(v)
}

/// The assembled dense system and its diagnostics.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub condition_estimate: f64,
}

/// Assemble `A = D - diag(alpha) + diag(alpha) R D` with the Dirichlet row,
/// where `R` is the folded kernel quadrature on the mesh nodes.
pub fn assemble_system(
    scene: &VesselScene,
    mesh: &Mesh1D,
    kernel: &KernelMatrix,
) -> Result<DiscreteSystem> {
    let n = mesh.len();
    if kernel.nodes.len() != n || kernel.rows.len() != n {
        return Err(Error::Solver("kernel matrix does not match the mesh".into()));
    }
    let op = discretize_local(scene, mesh);
    let d_flux = op.to_dense();
    let rd = &kernel.nodal * &d_flux;
    let mut a = d_flux;
    for i in 1..n {
        a[(i, i)] -= mesh.alpha[i];
        for j in 0..n {
            a[(i, j)] += mesh.alpha[i] * rd[(i, j)];
        }
    }
    // Dirichlet row
    for j in 0..n {
        a[(0, j)] = 0.0;
    }
    a[(0, 0)] = 1.0;

    let mut rhs = DVector::zeros(n);
    for i in 1..n {
        rhs[i] = mesh.alpha[i] * scene.p0;
    }

    let condition_estimate = estimate_condition(&a);
    Ok(DiscreteSystem { matrix: a, rhs, condition_estimate })
}

/// Rough 1-norm condition estimate from a handful of solves with random
/// right-hand sides (lower bound on ||A^{-1}||_1, reported only).
fn estimate_condition(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let norm_a = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let lu = a.clone().lu();
    let mut inv_norm: f64 = 0.0;
    let mut state = 0x9e3779b97f4a7c15u64;
    for _ in 0..5 {
        let mut b = DVector::zeros(n);
        for i in 0..n {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            b[i] = if state & 1 == 0 { 1.0 } else { -1.0 };
        }
        if let Some(x) = lu.solve(&b) {
            inv_norm = inv_norm.max(x.abs().sum() / b.abs().sum());
        }
    }
    norm_a * inv_norm
}

/// Weighted norms of the solution (midpoint quadrature, difference
/// quotients for the second derivative of the flux).
#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    /// ||p||_{H^a} = ||p||_{L^2} + ||a^2 p_s||_{L^2}
    pub h_a: f64,
    pub p_l2: f64,
    pub a2ps_l2: f64,
    pub p_inf: f64,
    /// ||a p_s||_inf
    pub a_ps_inf: f64,
    /// ||a^{-1/2} (a^4 p_s)_s||_{L^2}
    pub w_flux_div_l2: f64,
    /// ||a^{-1} (a^4 p_s)_s||_inf
    pub w_flux_div_inf: f64,
    /// ||a^{3/2} (a^4 p_s)_{ss}||_{L^2} via difference quotients
    pub w_flux_div2_l2: f64,
    /// last-midpoint |a^4 p_s| and its ratio to a^3 there
    pub tip_flux: f64,
    pub tip_flux_ratio: f64,
}

/// Solver metadata carried by the solution.
#[derive(Debug, Clone, Serialize)]
pub struct SolveMeta {
    pub n_intervals: usize,
    pub condition_estimate: f64,
    pub refinement_residual: f64,
    pub warnings: Vec<String>,
}

/// Nodal solution and derived quantities.
#[derive(Debug, Clone)]
pub struct Solution {
    pub nodes: Vec<f64>,
    /// p = v + p0 at nodes
    pub p: Vec<f64>,
    /// a^4 p_s at interval midpoints
    pub flux_mid: Vec<f64>,
    /// (a^4 p_s)_s at nodes (the discrete flux divergence)
    pub flux_div: Vec<f64>,
    pub norms: NormReport,
    pub meta: SolveMeta,
}

/// Solve the full integrodifferential system on the given mesh.
pub fn solve_psb(scene: &VesselScene, mesh: &Mesh1D, kernel: &KernelMatrix) -> Result<Solution> {
    let system = assemble_system(scene, mesh, kernel)?;
    let mut warnings = Vec::new();
    if system.condition_estimate > 1e12 {
        warnings.push(format!(
            "condition estimate {:.3e} exceeds 1e12",
            system.condition_estimate
        ));
    }
    let lu = system.matrix.clone().lu();
    let mut v = lu
        .solve(&system.rhs)
        .ok_or_else(|| Error::Solver("singular system matrix".into()))?;
    // one step of iterative refinement
    let r = &system.rhs - &system.matrix * &v;
    if let Some(dv) = lu.solve(&r) {
        v += dv;
    }
    let refinement_residual = (&system.rhs - &system.matrix * &v).abs().max();

    let n = mesh.len();
    let p: Vec<f64> = v.iter().map(|&vi| vi + scene.p0).collect();
    let op = discretize_local(scene, mesh);
    let v_slice: Vec<f64> = v.iter().copied().collect();
    let flux_div = op.apply(&v_slice);
    let mut flux_mid = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let h = mesh.nodes[i + 1] - mesh.nodes[i];
        let a_mid = scene.radius.a(0.5 * (mesh.nodes[i] + mesh.nodes[i + 1]));
        flux_mid.push(a_mid.powi(4) * (p[i + 1] - p[i]) / h);
    }
    let norms = weighted_norms_impl(scene, mesh, &p, &flux_mid, &flux_div);
    Ok(Solution {
        nodes: mesh.nodes.clone(),
        p,
        flux_mid,
        flux_div,
        norms,
        meta: SolveMeta {
            n_intervals: n - 1,
            condition_estimate: system.condition_estimate,
            refinement_residual,
            warnings,
        },
    })
}

/// Recompute the norm report for an existing solution.
pub fn weighted_norms(scene: &VesselScene, mesh: &Mesh1D, sol: &Solution) -> NormReport {
    weighted_norms_impl(scene, mesh, &sol.p, &sol.flux_mid, &sol.flux_div)
}

fn weighted_norms_impl(
    scene: &VesselScene,
    mesh: &Mesh1D,
    p: &[f64],
    flux_mid: &[f64],
    flux_div: &[f64],
) -> NormReport {
    let n = mesh.len();
    let s = &mesh.nodes;
    let mut p_l2 = 0.0;
    let mut a2ps_l2 = 0.0;
    let mut a_ps_inf: f64 = 0.0;
    let mut w_flux_div_l2 = 0.0;
    let mut w_flux_div_inf: f64 = 0.0;
    let mut w_flux_div2_l2 = 0.0;
    for i in 0..n - 1 {
        let h = s[i + 1] - s[i];
        let m = 0.5 * (s[i] + s[i + 1]);
        let a_m = scene.radius.a(m);
        let p_m = 0.5 * (p[i] + p[i + 1]);
        let ps = (p[i + 1] - p[i]) / h;
        let g_m = 0.5 * (flux_div[i] + flux_div[i + 1]);
        let gs = (flux_div[i + 1] - flux_div[i]) / h;
        p_l2 += h * p_m * p_m;
        a2ps_l2 += h * (a_m * a_m * ps).powi(2);
        a_ps_inf = a_ps_inf.max((a_m * ps).abs());
        w_flux_div_l2 += h * g_m * g_m / a_m;
        w_flux_div_inf = w_flux_div_inf.max((g_m / a_m).abs());
        w_flux_div2_l2 += h * (a_m.powf(1.5) * gs).powi(2);
    }
    let p_inf = p.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    let tip_flux = flux_mid.last().copied().unwrap_or(0.0).abs();
    let tip_mid = 0.5 * (s[n - 2] + s[n - 1]);
    let a_tip = scene.radius.a(tip_mid);
    let tip_flux_ratio = if a_tip > 0.0 { tip_flux / a_tip.powi(3) } else { f64::NAN };
    NormReport {
        h_a: p_l2.sqrt() + a2ps_l2.sqrt(),
        p_l2: p_l2.sqrt(),
        a2ps_l2: a2ps_l2.sqrt(),
        p_inf,
        a_ps_inf,
        w_flux_div_l2: w_flux_div_l2.sqrt(),
        w_flux_div_inf,
        w_flux_div2_l2: w_flux_div2_l2.sqrt(),
        tip_flux,
        tip_flux_ratio,
    }
}

/// Discrete probe of the bilinear-form coercivity: the minimum over random
/// trial vectors (v(0) = 0) of `B(v, v) / ||v||_A^2`, where
/// `B(v,v) = int (1/alpha)(Dv)^2 + int a^4 v_s^2 + int int K [(Dv)]* (Dv)`
/// and `||v||_A^2 = ||a^{-1/2} Dv||^2 + ||a^2 v_s||^2`.
pub fn coercivity_probe(
    scene: &VesselScene,
    mesh: &Mesh1D,
    kernel: &KernelMatrix,
    trials: usize,
    seed: u64,
) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let op = discretize_local(scene, mesh);
    let w = outer_weights(&mesh.nodes);
    let n = mesh.len();
    let mut min_ratio = f64::INFINITY;
    for _ in 0..trials {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        v[0] = 0.0;
        let g = op.apply(&v);
        let kg = kernel.apply(&g);
        let mut b = 0.0;
        let mut norm_a = 0.0;
        for i in 0..n - 1 {
            let h = mesh.nodes[i + 1] - mesh.nodes[i];
            let m = 0.5 * (mesh.nodes[i] + mesh.nodes[i + 1]);
            let a_m = scene.radius.a(m);
            let alpha_m = scene.alpha(m);
            let g_m = 0.5 * (g[i] + g[i + 1]);
            let vs = (v[i + 1] - v[i]) / h;
            b += h * (g_m * g_m / alpha_m + a_m.powi(4) * vs * vs);
            norm_a += h * (g_m * g_m / a_m + (a_m * a_m * vs).powi(2));
        }
        for i in 0..n {
            b += w[i] * kg[i] * g[i];
        }
        if norm_a > 0.0 {
            min_ratio = min_ratio.min(b / norm_a);
        }
    }
    min_ratio
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CurveSpec, MeshControls, RadiusSpec, VesselScene};
    use crate::kernel::assemble_kernel_matrix;
    use approx::assert_relative_eq;
    use perfusion1d_testkit as oracle;

    fn scene(eta: f64, omega: f64, geom_samples: usize) -> VesselScene {
        VesselScene::new(
            "solver-test",
            &CurveSpec::Straight,
            RadiusSpec::Spheroidal,
            1.0,
            0.02,
            eta,
            omega,
            1.0,
            MeshControls { geom_samples, ..Default::default() },
            [1.0, 0.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn mesh_formula_examples() {
        let m = mesh_nodes(4, 1.0);
        assert_eq!(m, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let m = mesh_nodes(4, 2.0);
        for (got, want) in m.iter().zip([0.0, 0.4375, 0.75, 0.9375, 1.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-15);
        }
        // last interval ~ N^{-gamma}
        let m = mesh_nodes(100, 2.0);
        let last = m[100] - m[99];
        assert_relative_eq!(last, 1e-4, epsilon = 1e-12);
    }

    #[test]
    fn uniform_unit_radius_gives_standard_second_difference() {
        let sc = VesselScene::new(
            "const",
            &CurveSpec::Straight,
            RadiusSpec::Constant,
            1.0,
            0.02,
            1.0,
            1.0,
            1.0,
            MeshControls { geom_samples: 256, ..Default::default() },
            [1.0, 0.0, 0.0],
        )
        .unwrap();
        let mesh = Mesh1D {
            nodes: mesh_nodes(10, 1.0),
            a: vec![1.0; 11],
            alpha: vec![0.0; 11],
            grading: 1.0,
        };
        let op = discretize_local(&sc, &mesh);
        let h = 0.1;
        for i in 1..10 {
            assert_relative_eq!(op.bands[i][0], 1.0 / (h * h), epsilon = 1e-9);
            assert_relative_eq!(op.bands[i][1], -2.0 / (h * h), epsilon = 1e-9);
            assert_relative_eq!(op.bands[i][2], 1.0 / (h * h), epsilon = 1e-9);
        }
        // linear v is in the kernel of the interior stencil
        let v: Vec<f64> = mesh.nodes.iter().map(|&s| 3.0 * s - 1.0).collect();
        let dv = op.apply(&v);
        for (i, &d) in dv.iter().enumerate().take(10).skip(1) {
            assert!(d.abs() < 1e-9, "Dv = {d} at {i}");
        }
    }

    #[test]
    fn manufactured_flux_divergence_converges() {
        // hemisphere radius, v = s(1 - s^2):
        // (a^4 v_s)_s = -2 s (1 - s^2)(5 - 9 s^2)
        let sc = scene(1.0, 1.0, 256);
        let exact = |s: f64| -2.0 * s * (1.0 - s * s) * (5.0 - 9.0 * s * s);
        let mut errs = Vec::new();
        for n in [100usize, 200, 400, 800] {
            let mesh = build_mesh(&sc, n).unwrap();
            let op = discretize_local(&sc, &mesh);
            let v: Vec<f64> = mesh.nodes.iter().map(|&s| s * (1.0 - s * s)).collect();
            let dv = op.apply(&v);
            // weighted L2 error over interior nodes
            let w = outer_weights(&mesh.nodes);
            let mut e2 = 0.0;
            for i in 1..mesh.len() {
                e2 += w[i] * (dv[i] - exact(mesh.nodes[i])).powi(2);
            }
            errs.push(e2.sqrt());
        }
        let orders = oracle::observed_orders(&errs);
        assert!(
            orders.iter().all(|&o| o >= 1.5),
            "orders {orders:?} from errors {errs:?}"
        );
    }

    #[test]
    fn local_solve_trivial_and_maximum_principle() {
        let sc = scene(0.05, 10.0, 256);
        let mesh = build_mesh(&sc, 200).unwrap();
        let zero = vec![0.0; mesh.len()];
        let v = solve_local(&sc, &mesh, &zero).unwrap();
        assert!(v.iter().all(|&x| x.abs() < 1e-14));

        let op = discretize_local(&sc, &mesh);
        assert!(local_system_is_m_matrix(&op, &mesh.alpha));

        let mut rng = oracle::TestRng::new(3);
        for _ in 0..100 {
            // random piecewise forcing with ||f||_inf = 1
            let breaks: Vec<f64> = (0..4).map(|_| rng.uniform(0.0, 1.0)).collect();
            let vals: Vec<f64> = (0..5).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let f: Vec<f64> = mesh
                .nodes
                .iter()
                .map(|&s| {
                    let k = breaks.iter().filter(|&&b| s > b).count();
                    vals[k]
                })
                .collect();
            let sup_f = f.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
            let v = solve_local(&sc, &mesh, &f).unwrap();
            let sup_v = v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
            assert!(sup_v <= 2.0 * sup_f + 1e-12, "max principle: {sup_v} vs {sup_f}");
        }
    }

    #[test]
    fn no_kernel_limit_is_bounded_between_zero_and_p0() {
        // dropping the integral term leaves (a^4 v_s)_s - alpha v = alpha p0;
        // the resulting p = v + p0 obeys 0 <= p <= p0
        let sc = scene(0.05, 10.0, 256);
        let mesh = build_mesh(&sc, 300).unwrap();
        let f = vec![1.0; mesh.len()];
        let v = solve_local(&sc, &mesh, &f).unwrap();
        for (i, &vi) in v.iter().enumerate() {
            let p = vi + 1.0;
            assert!(
                (-1e-10..=1.0 + 1e-10).contains(&p),
                "p = {p} outside [0, p0] at node {i}"
            );
        }
    }

    #[test]
    fn omega_zero_returns_constant_pressure() {
        let sc = scene(1.0, 0.0, 512);
        let mesh = build_mesh(&sc, 100).unwrap();
        let km = assemble_kernel_matrix(&sc, &mesh.nodes).unwrap();
        let sol = solve_psb(&sc, &mesh, &km).unwrap();
        for &p in &sol.p {
            assert!((p - 1.0).abs() < 1e-10, "p = {p}");
        }
    }

    #[test]
    fn zero_inflow_returns_zero() {
        let mut sc = scene(1.0, 1.0, 512);
        sc.p0 = 0.0;
        let mesh = build_mesh(&sc, 100).unwrap();
        let km = assemble_kernel_matrix(&sc, &mesh.nodes).unwrap();
        let sol = solve_psb(&sc, &mesh, &km).unwrap();
        for &p in &sol.p {
            assert!(p.abs() < 1e-12, "p = {p}");
        }
    }

    #[test]
    fn solution_is_linear_in_p0() {
        let sc1 = scene(1.0, 1.0, 512);
        let mut sc2 = scene(1.0, 1.0, 512);
        sc2.p0 = 2.0;
        let mesh = build_mesh(&sc1, 120).unwrap();
        let km = assemble_kernel_matrix(&sc1, &mesh.nodes).unwrap();
        let s1 = solve_psb(&sc1, &mesh, &km).unwrap();
        let s2 = solve_psb(&sc2, &mesh, &km).unwrap();
        for (a, b) in s1.p.iter().zip(&s2.p) {
            assert!((2.0 * a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn norm_examples() {
        let sc = scene(1.0, 1.0, 256);
        let mesh = build_mesh(&sc, 4000).unwrap();
        // u = 1: H^a norm is 1 (derivative term vanishes)
        let p = vec![1.0; mesh.len()];
        let g = vec![0.0; mesh.len()];
        let fm = vec![0.0; mesh.len() - 1];
        let norms = weighted_norms_impl(&sc, &mesh, &p, &fm, &g);
        assert!((norms.h_a - 1.0).abs() < 1e-6, "H^a = {}", norms.h_a);

        // u = s with a = sqrt(1-s^2): ||a^2 u_s||^2 = 8/15
        let p: Vec<f64> = mesh.nodes.clone();
        let norms = weighted_norms_impl(&sc, &mesh, &p, &fm, &g);
        assert!(
            (norms.a2ps_l2.powi(2) - 8.0 / 15.0).abs() < 1e-4,
            "got {}",
            norms.a2ps_l2.powi(2)
        );
    }

    #[test]
    fn straight_permeable_profile_is_monotone_with_positive_tip() {
        // L = 4.7426, eps = 0.02, eta = 0.05, omega = 10, p0 = 1
        let sc = VesselScene::new(
            "straight-perm",
            &CurveSpec::Straight,
            RadiusSpec::Spheroidal,
            4.7426,
            0.02,
            0.05,
            10.0,
            1.0,
            MeshControls { geom_samples: 1024, ..Default::default() },
            [1.0, 0.0, 0.0],
        )
        .unwrap();
        let mesh = build_mesh(&sc, 300).unwrap();
        let km = assemble_kernel_matrix(&sc, &mesh.nodes).unwrap();
        let sol = solve_psb(&sc, &mesh, &km).unwrap();
        assert_relative_eq!(sol.p[0], 1.0, epsilon = 1e-12);
        for w in sol.p.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "non-monotone: {} -> {}", w[0], w[1]);
        }
        assert!(*sol.p.last().unwrap() > 0.0, "tip pressure {}", sol.p.last().unwrap());
    }

    #[test]
    fn self_convergence_order_on_graded_mesh() {
        let sc = scene(0.05, 10.0, 512);
        let mut sols = Vec::new();
        for n in [100usize, 200, 400] {
            let mesh = build_mesh(&sc, n).unwrap();
            let km = assemble_kernel_matrix(&sc, &mesh.nodes).unwrap();
            sols.push(solve_psb(&sc, &mesh, &km).unwrap());
        }
        // Richardson: order = log2(|p_N - p_2N| / |p_2N - p_4N|), with each
        // difference sampled on the coarser of the two grids
        let diff = |coarse: &Solution, fine: &Solution| -> f64 {
            coarse
                .nodes
                .iter()
                .enumerate()
                .map(|(i, &s)| {
                    (coarse.p[i] - crate::quadrature::interp_nodal(&fine.nodes, &fine.p, s)).abs()
                })
                .fold(0.0f64, f64::max)
        };
        let d1 = diff(&sols[0], &sols[1]);
        let d2 = diff(&sols[1], &sols[2]);
        let order = (d1 / d2).log2();
        assert!(order >= 1.5, "observed order {order} (diffs {d1:.3e}, {d2:.3e})");
    }

    #[test]
    fn coercivity_probe_is_positive() {
        let sc = scene(0.05, 10.0, 512);
        let mesh = build_mesh(&sc, 150).unwrap();
        let km = assemble_kernel_matrix(&sc, &mesh.nodes).unwrap();
        let min_ratio = coercivity_probe(&sc, &mesh, &km, 50, 12345);
        assert!(min_ratio > 0.0, "coercivity ratio {min_ratio}");
    }
}
