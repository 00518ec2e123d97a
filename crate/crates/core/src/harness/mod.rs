//! Run orchestration: scene files, run modes, sweeps, figure-data
//! regeneration, reports, and CSV persistence.

pub mod scenes;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::field::{boundary_residuals, slice_grid, FieldSlice, SlicePlane};
use crate::geometry::{CurveSpec, MeshControls, RadiusSpec, ValidationReport, VesselScene};
use crate::kernel::{assemble_kernel_matrix, KernelMatrix};
use crate::quadrature::interp_nodal;
use crate::solver1d::{build_mesh, solve_psb, Mesh1D, NormReport, Solution};
use crate::{Error, Result};

/// Scene file contents (JSON). Curve control points may be in any scale;
/// the centerline is rescaled to the given `length` and nondimensionalized
/// internally (`eta_unit = eta L^2`, `omega_unit = omega L`).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SceneSpec {
    pub name: String,
    pub curve: CurveSpec,
    pub radius: RadiusSpec,
    pub length: f64,
    pub eps: f64,
    pub eta: f64,
    pub omega: f64,
    pub p0: f64,
    #[serde(default)]
    pub mesh: MeshControls,
    #[serde(default = "default_e1")]
    pub e1_base: [f64; 3],
    #[serde(default)]
    pub slice: Option<SlicePlane>,
}

fn default_e1() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

impl SceneSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("scene file {}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("serialize scene: {e}")))?;
        fs::write(path, text)?;
        Ok(())
    }

    /// Build and validate the vessel scene.
    pub fn build(&self) -> Result<VesselScene> {
        let scene = VesselScene::new(
            &self.name,
            &self.curve,
            self.radius.clone(),
            self.length,
            self.eps,
            self.eta,
            self.omega,
            self.p0,
            self.mesh,
            self.e1_base,
        )?;
        let report = scene.validate();
        if !report.accepted {
            return Err(Error::Validation(report.failure_summary()));
        }
        Ok(scene)
    }

    /// Hash of the physical problem (geometry + parameters, not mesh
    /// controls), used to pair runs for comparison.
    pub fn scene_hash(&self) -> String {
        #[derive(Serialize)]
        struct Key<'a> {
            curve: &'a CurveSpec,
            radius: &'a RadiusSpec,
            length: f64,
            eps: f64,
            eta: f64,
            omega: f64,
            p0: f64,
        }
        let key = Key {
            curve: &self.curve,
            radius: &self.radius,
            length: self.length,
            eps: self.eps,
            eta: self.eta,
            omega: self.omega,
            p0: self.p0,
        };
        let json = serde_json::to_string(&key).expect("serializable key");
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Run mode; exactly one per invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    Solve,
    SweepEps,
    SweepMesh,
    Slice,
    Residuals,
    Figures,
}

impl RunMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunMode::Solve => "solve",
            RunMode::SweepEps => "sweep-eps",
            RunMode::SweepMesh => "sweep-mesh",
            RunMode::Slice => "slice",
            RunMode::Residuals => "residuals",
            RunMode::Figures => "figures",
        }
    }
}

/// A fully resolved run request.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: RunMode,
    /// scene; not needed by `figures`
    pub scene: Option<SceneSpec>,
    pub out_dir: PathBuf,
    pub eps_list: Vec<f64>,
    pub nodes_list: Vec<usize>,
    pub eps_override: Option<f64>,
    pub nodes_override: Option<usize>,
    pub theta_override: Option<usize>,
    pub seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        for &e in self.eps_list.iter().chain(self.eps_override.iter()) {
            if !(e > 0.0 && e <= 0.1) {
                return Err(Error::Config(format!("eps = {e} outside (0, 0.1]")));
            }
        }
        if self.mode != RunMode::Figures && self.scene.is_none() {
            return Err(Error::Config(format!(
                "mode {} needs a scene file",
                self.mode.as_str()
            )));
        }
        if self.mode == RunMode::SweepEps && self.eps_list.len() < 2 {
            return Err(Error::Config("sweep-eps needs at least two eps values".into()));
        }
        if self.mode == RunMode::SweepMesh && self.nodes_list.len() < 2 {
            return Err(Error::Config("sweep-mesh needs at least two node counts".into()));
        }
        fs::create_dir_all(&self.out_dir)?;
        Ok(())
    }

    fn effective_spec(&self) -> Result<SceneSpec> {
        let mut spec = self
            .scene
            .clone()
            .ok_or_else(|| Error::Config("missing scene".into()))?;
        if let Some(e) = self.eps_override {
            spec.eps = e;
        }
        if let Some(n) = self.nodes_override {
            spec.mesh.n_nodes = n;
        }
        if let Some(t) = self.theta_override {
            spec.mesh.theta_order = t;
        }
        Ok(spec)
    }
}

/// The defaults ledger: every choice the model makes that a scene file does
/// not pin down, so a run is auditable and reproducible.
#[derive(Debug, Clone, Serialize)]
pub struct DefaultsLedger {
    pub ell_rule: String,
    pub ell_value: f64,
    pub e1_base: [f64; 3],
    pub grading: f64,
    pub n_intervals: usize,
    pub theta_order: usize,
    pub geom_samples: usize,
    pub scaling: String,
    pub eta_unit: f64,
    pub omega_unit: f64,
}

impl DefaultsLedger {
    fn for_scene(scene: &VesselScene) -> Self {
        DefaultsLedger {
            ell_rule: "ell(eps) = 1 - sqrt(1 - eps^2)".into(),
            ell_value: scene.stretch.ell,
            e1_base: scene.e1_base,
            grading: scene.mesh.grading,
            n_intervals: scene.mesh.n_nodes,
            theta_order: scene.mesh.theta_order,
            geom_samples: scene.mesh.geom_samples,
            scaling: "unit-length model: eta_unit = eta L^2, omega_unit = omega L; s = L s~".into(),
            eta_unit: scene.eta,
            omega_unit: scene.omega,
        }
    }
}

/// Norm table entry for one labeled solve.
#[derive(Debug, Clone, Serialize)]
pub struct NormEntry {
    pub label: String,
    pub eps: f64,
    pub n_intervals: usize,
    pub norms: NormReport,
    pub condition_estimate: f64,
    pub warnings: Vec<String>,
}

/// Residual summary for one labeled solve.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualSummary {
    pub label: String,
    pub eps: f64,
    pub sup_rbar: f64,
    pub l2_rbar: f64,
    pub sup_r: f64,
    pub consistency_error: f64,
    pub norm_factor: f64,
}

/// Trend of a quantity across an eps sweep with its log-log slope.
#[derive(Debug, Clone, Serialize)]
pub struct TrendRow {
    pub quantity: String,
    pub eps: Vec<f64>,
    pub values: Vec<f64>,
    pub log_log_slope: f64,
}

/// Mesh-convergence info (coarse-vs-fine solve).
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceInfo {
    pub coarse_intervals: usize,
    pub fine_intervals: usize,
    pub dp_inf: f64,
    pub rtol: f64,
    pub converged: bool,
}

/// Per-run report; sufficient, with the scene file, to reproduce the run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scene_name: String,
    pub scene_hash: String,
    pub mode: String,
    pub seed: u64,
    pub defaults: DefaultsLedger,
    pub validation: ValidationReport,
    pub norms: Vec<NormEntry>,
    pub residuals: Vec<ResidualSummary>,
    pub trends: Vec<TrendRow>,
    pub convergence: Option<ConvergenceInfo>,
    pub outputs: Vec<String>,
    pub timing_ms: u128,
}

/// Nodal solution table as persisted to CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionTable {
    pub s: Vec<f64>,
    pub a: Vec<f64>,
    pub p: Vec<f64>,
    pub a4ps: Vec<f64>,
    pub a4ps_s: Vec<f64>,
}

impl SolutionTable {
    fn from_solution(scene: &VesselScene, sol: &Solution) -> Self {
        let n = sol.nodes.len();
        let mut a4ps = vec![0.0; n];
        // midpoint fluxes averaged back to nodes; the tip carries the
        // natural zero flux, the base is extrapolated
        for (i, v) in a4ps.iter_mut().enumerate().take(n - 1).skip(1) {
            *v = 0.5 * (sol.flux_mid[i - 1] + sol.flux_mid[i]);
        }
        a4ps[0] = if n > 2 {
            1.5 * sol.flux_mid[0] - 0.5 * sol.flux_mid[1]
        } else {
            sol.flux_mid[0]
        };
        a4ps[n - 1] = 0.0;
        SolutionTable {
            s: sol.nodes.clone(),
            a: sol.nodes.iter().map(|&s| scene.radius.a(s)).collect(),
            p: sol.p.clone(),
            a4ps,
            a4ps_s: sol.flux_div.clone(),
        }
    }
}

/// In-memory result of a run (also persisted under `out_dir`).
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub solutions: Vec<(String, SolutionTable)>,
}

/// Tracks files written by a run so partial outputs can be removed on error.
struct OutputTracker {
    files: Vec<PathBuf>,
}

impl OutputTracker {
    fn new() -> Self {
        OutputTracker { files: Vec::new() }
    }

    fn write(&mut self, path: &Path, contents: &str) -> Result<()> {
        fs::write(path, contents)?;
        self.files.push(path.to_path_buf());
        Ok(())
    }

    fn abort(&self) {
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
    }

    fn names(&self) -> Vec<String> {
        self.files
            .iter()
            .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
            .collect()
    }
}

fn solution_csv(table: &SolutionTable) -> String {
    let mut out = String::from("s,a,p,a4ps,a4ps_s\n");
    for i in 0..table.s.len() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            table.s[i], table.a[i], table.p[i], table.a4ps[i], table.a4ps_s[i]
        ));
    }
    out
}

fn slice_csv(slice: &FieldSlice) -> String {
    let mut out = String::from("x,y,z,q,mask\n");
    for p in &slice.points {
        if p.masked {
            out.push_str(&format!("{},{},{},nan,1\n", p.x.x, p.x.y, p.x.z));
        } else {
            out.push_str(&format!("{},{},{},{},0\n", p.x.x, p.x.y, p.x.z, p.q));
        }
    }
    out
}

fn residual_csv(s: &[f64], rbar: &[f64], sup_theta: &[f64]) -> String {
    let mut out = String::from("s,rbar,sup_theta_r\n");
    for i in 0..s.len() {
        out.push_str(&format!("{},{},{}\n", s[i], rbar[i], sup_theta[i]));
    }
    out
}

fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|&x| x.abs().max(1e-300).ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|&y| y.abs().max(1e-300).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..lx.len() {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Build mesh + kernel and solve one scene at `n` intervals.
pub fn solve_scene(scene: &VesselScene, n: usize) -> Result<(Mesh1D, KernelMatrix, Solution)> {
    let mesh = build_mesh(scene, n)?;
    let kernel = assemble_kernel_matrix(scene, &mesh.nodes)?;
    let sol = solve_psb(scene, &mesh, &kernel)?;
    Ok((mesh, kernel, sol))
}

fn norm_entry(label: &str, scene: &VesselScene, sol: &Solution) -> NormEntry {
    NormEntry {
        label: label.to_string(),
        eps: scene.eps,
        n_intervals: sol.meta.n_intervals,
        norms: sol.norms.clone(),
        condition_estimate: sol.meta.condition_estimate,
        warnings: sol.meta.warnings.clone(),
    }
}

/// Execute a run. Partial outputs are removed if any step fails.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let start = Instant::now();
    let mut tracker = OutputTracker::new();
    let result = run_inner(config, &mut tracker, start);
    if result.is_err() {
        tracker.abort();
    }
    result
}

fn run_inner(config: &RunConfig, tracker: &mut OutputTracker, start: Instant) -> Result<RunOutput> {
    let out = &config.out_dir;
    let mut norms = Vec::new();
    let mut residuals = Vec::new();
    let mut trends = Vec::new();
    let mut convergence = None;
    let mut solutions: Vec<(String, SolutionTable)> = Vec::new();

    let (spec, validation) = if config.mode == RunMode::Figures {
        // figures mode validates each library scene as it goes; report the
        // first one for the header
        let spec = scenes::straight_test_vessel();
        let scene = spec.build()?;
        (spec, scene.validate())
    } else {
        let spec = config.effective_spec()?;
        let scene = spec.build()?;
        (spec.clone(), scene.validate())
    };

    match config.mode {
        RunMode::Solve => {
            let scene = spec.build()?;
            let n = scene.mesh.n_nodes;
            let (_, _, sol) = solve_scene(&scene, n)?;
            // refinement-from-below convergence probe
            let (_, _, coarse) = solve_scene(&scene, (n / 2).max(16))?;
            let dp = coarse
                .nodes
                .iter()
                .enumerate()
                .map(|(i, &s)| (coarse.p[i] - interp_nodal(&sol.nodes, &sol.p, s)).abs())
                .fold(0.0f64, f64::max);
            let rtol = 1e-6;
            let p_scale = sol.norms.p_inf.max(1e-300);
            convergence = Some(ConvergenceInfo {
                coarse_intervals: (n / 2).max(16),
                fine_intervals: n,
                dp_inf: dp,
                rtol,
                converged: dp / p_scale < rtol * 2.0f64.powf(1.5), // order >= 1.5 headroom
            });
            if dp / p_scale > 1e-2 {
                return Err(Error::Solver(format!(
                    "mesh refinement changed p by {dp:.3e}; solution not converged"
                )));
            }
            let table = SolutionTable::from_solution(&scene, &sol);
            tracker.write(&out.join("solution.csv"), &solution_csv(&table))?;
            norms.push(norm_entry("solve", &scene, &sol));
            solutions.push(("solve".into(), table));
        }
        RunMode::SweepEps => {
            let mut sup_rbars = Vec::new();
            let mut h_a = Vec::new();
            let mut a_ps_inf = Vec::new();
            let mut w_flux_div_inf = Vec::new();
            for &eps in &config.eps_list {
                let mut sp = spec.clone();
                sp.eps = eps;
                let scene = sp.build()?;
                let (_, _, sol) = solve_scene(&scene, scene.mesh.n_nodes)?;
                let rep = boundary_residuals(&scene, &sol)?;
                let label = format!("eps={eps}");
                let table = SolutionTable::from_solution(&scene, &sol);
                tracker.write(
                    &out.join(format!("solution_eps{eps}.csv")),
                    &solution_csv(&table),
                )?;
                norms.push(norm_entry(&label, &scene, &sol));
                residuals.push(ResidualSummary {
                    label: label.clone(),
                    eps,
                    sup_rbar: rep.sup_rbar,
                    l2_rbar: rep.l2_rbar,
                    sup_r: rep.sup_r,
                    consistency_error: rep.consistency_error,
                    norm_factor: rep.norm_factor,
                });
                sup_rbars.push(rep.sup_rbar);
                h_a.push(sol.norms.h_a);
                a_ps_inf.push(sol.norms.a_ps_inf);
                w_flux_div_inf.push(sol.norms.w_flux_div_inf);
                solutions.push((label, table));
            }
            let eps = config.eps_list.clone();
            trends.push(TrendRow {
                quantity: "sup_rbar".into(),
                eps: eps.clone(),
                values: sup_rbars.clone(),
                log_log_slope: log_log_slope(&eps, &sup_rbars),
            });
            trends.push(TrendRow {
                quantity: "h_a_norm".into(),
                eps: eps.clone(),
                values: h_a.clone(),
                log_log_slope: log_log_slope(&eps, &h_a),
            });
            trends.push(TrendRow {
                quantity: "a_ps_inf".into(),
                eps: eps.clone(),
                values: a_ps_inf.clone(),
                log_log_slope: log_log_slope(&eps, &a_ps_inf),
            });
            trends.push(TrendRow {
                quantity: "w_flux_div_inf".into(),
                eps: eps.clone(),
                values: w_flux_div_inf.clone(),
                log_log_slope: log_log_slope(&eps, &w_flux_div_inf),
            });
        }
        RunMode::SweepMesh => {
            let scene = spec.build()?;
            let mut prev: Option<Solution> = None;
            let mut rows = String::from("n_intervals,p_inf,dp_inf_vs_prev\n");
            for &n in &config.nodes_list {
                let (_, _, sol) = solve_scene(&scene, n)?;
                let dp = prev
                    .as_ref()
                    .map(|p| {
                        p.nodes
                            .iter()
                            .enumerate()
                            .map(|(i, &s)| (p.p[i] - interp_nodal(&sol.nodes, &sol.p, s)).abs())
                            .fold(0.0f64, f64::max)
                    })
                    .unwrap_or(f64::NAN);
                rows.push_str(&format!("{n},{},{dp}\n", sol.norms.p_inf));
                norms.push(norm_entry(&format!("n={n}"), &scene, &sol));
                solutions.push((format!("n={n}"), SolutionTable::from_solution(&scene, &sol)));
                prev = Some(sol);
            }
            tracker.write(&out.join("mesh_sweep.csv"), &rows)?;
        }
        RunMode::Slice => {
            let scene = spec.build()?;
            let plane = spec
                .slice
                .clone()
                .ok_or_else(|| Error::Config("slice mode needs a slice plane in the scene".into()))?;
            let (_, _, sol) = solve_scene(&scene, scene.mesh.n_nodes)?;
            let slice = slice_grid(&scene, &sol, &plane)?;
            tracker.write(&out.join("slice.csv"), &slice_csv(&slice))?;
            let sidecar = serde_json::json!({
                "plane": plane,
                "n_unmasked": slice.n_unmasked,
                "min_clearance_kept": slice.min_clearance_kept,
                "clearance_rule": "masked below clearance_factor * eps * a(s_nearest)",
            });
            tracker.write(
                &out.join("slice_meta.json"),
                &serde_json::to_string_pretty(&sidecar).expect("json"),
            )?;
            norms.push(norm_entry("slice", &scene, &sol));
            solutions.push(("slice".into(), SolutionTable::from_solution(&scene, &sol)));
        }
        RunMode::Residuals => {
            let scene = spec.build()?;
            let (_, _, sol) = solve_scene(&scene, scene.mesh.n_nodes)?;
            let rep = boundary_residuals(&scene, &sol)?;
            let sup_theta: Vec<f64> = rep
                .r_pointwise
                .iter()
                .map(|row| row.iter().fold(0.0f64, |m, &x| m.max(x.abs())))
                .collect();
            tracker.write(
                &out.join("residuals.csv"),
                &residual_csv(&rep.s, &rep.rbar, &sup_theta),
            )?;
            residuals.push(ResidualSummary {
                label: "residuals".into(),
                eps: scene.eps,
                sup_rbar: rep.sup_rbar,
                l2_rbar: rep.l2_rbar,
                sup_r: rep.sup_r,
                consistency_error: rep.consistency_error,
                norm_factor: rep.norm_factor,
            });
            norms.push(norm_entry("residuals", &scene, &sol));
            solutions.push(("residuals".into(), SolutionTable::from_solution(&scene, &sol)));
        }
        RunMode::Figures => {
            run_figures(config, tracker, &mut norms, &mut solutions)?;
        }
    }

    let report = RunReport {
        scene_name: spec.name.clone(),
        scene_hash: spec.scene_hash(),
        mode: config.mode.as_str().to_string(),
        seed: config.seed,
        defaults: DefaultsLedger::for_scene(&spec.build()?),
        validation,
        norms,
        residuals,
        trends,
        convergence,
        outputs: tracker.names(),
        timing_ms: start.elapsed().as_millis(),
    };
    let report_json =
        serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?;
    tracker.write(&config.out_dir.join("report.json"), &report_json)?;
    let mut report = report;
    report.outputs = tracker.names();
    Ok(RunOutput { report, solutions })
}

/// Regenerate the data behind the shipped figures: the three-vessel
/// pressure-decay comparison, the two exterior-field slices, the two
/// eps-sweep geometries under two parameter sets, and the geometry/radius
/// reference table. Exactly 8 CSV files plus `figures_meta.json`.
fn run_figures(
    config: &RunConfig,
    tracker: &mut OutputTracker,
    norms: &mut Vec<NormEntry>,
    solutions: &mut Vec<(String, SolutionTable)>,
) -> Result<()> {
    let out = &config.out_dir;

    // (1) three 3D vessels: p against normalized arclength
    let mut rows = String::from("vessel,s_over_l,p\n");
    for spec in scenes::display_vessels() {
        let scene = spec.build()?;
        let (_, _, sol) = solve_scene(&scene, scene.mesh.n_nodes)?;
        for (i, &s) in sol.nodes.iter().enumerate() {
            rows.push_str(&format!("{},{},{}\n", spec.name, s, sol.p[i]));
        }
        norms.push(norm_entry(&spec.name, &scene, &sol));
        solutions.push((spec.name.clone(), SolutionTable::from_solution(&scene, &sol)));
    }
    tracker.write(&out.join("funstuff1.csv"), &rows)?;

    // (2, 3) exterior-field slices under the two parameter sets
    for (tag, eta, omega) in [("a", 1.0, 1.0), ("b", 0.05, 10.0)] {
        let mut spec = scenes::slice_vessel();
        spec.eta = eta;
        spec.omega = omega;
        let scene = spec.build()?;
        let plane = spec.slice.clone().expect("library slice plane");
        let (_, _, sol) = solve_scene(&scene, scene.mesh.n_nodes)?;
        let slice = slice_grid(&scene, &sol, &plane)?;
        tracker.write(&out.join(format!("funstuff2_{tag}.csv")), &slice_csv(&slice))?;
        norms.push(norm_entry(&format!("{}_{tag}", spec.name), &scene, &sol));
        solutions.push((
            format!("{}_{tag}", spec.name),
            SolutionTable::from_solution(&scene, &sol),
        ));
    }

    // (4-7) eps sweep: two geometries x two parameter sets
    let combos = [
        ("the_tests_a", scenes::straight_test_vessel(), 0.05, 10.0),
        ("the_tests_b", scenes::near_loop_test_vessel(), 0.05, 10.0),
        ("the_tests_c", scenes::straight_test_vessel(), 1.0, 1.0),
        ("the_tests_d", scenes::near_loop_test_vessel(), 1.0, 1.0),
    ];
    for (file, base, eta, omega) in combos {
        let mut rows = String::from("s");
        for eps in scenes::FIGURE_EPS_SWEEP {
            rows.push_str(&format!(",p_eps{eps}"));
        }
        rows.push('\n');
        let mut columns: Vec<Vec<f64>> = Vec::new();
        let mut s_axis: Vec<f64> = Vec::new();
        for eps in scenes::FIGURE_EPS_SWEEP {
            let mut spec = base.clone();
            spec.eps = eps;
            spec.eta = eta;
            spec.omega = omega;
            let scene = spec.build()?;
            let (_, _, sol) = solve_scene(&scene, scene.mesh.n_nodes)?;
            if s_axis.is_empty() {
                s_axis = sol.nodes.clone();
            }
            columns.push(sol.p.clone());
            norms.push(norm_entry(&format!("{file}_eps{eps}"), &scene, &sol));
            solutions.push((
                format!("{file}_eps{eps}"),
                SolutionTable::from_solution(&scene, &sol),
            ));
        }
        for (i, &s) in s_axis.iter().enumerate() {
            rows.push_str(&format!("{s}"));
            for col in &columns {
                rows.push_str(&format!(",{}", col[i]));
            }
            rows.push('\n');
        }
        tracker.write(&out.join(format!("{file}.csv")), &rows)?;
    }

    // (8) geometry reference: centerline polylines and radius profiles
    let mut rows = String::from("kind,c1,c2,c3\n");
    for spec in [scenes::straight_test_vessel(), scenes::near_loop_test_vessel()] {
        let scene = spec.build()?;
        for smp in scene.centerline.samples.iter().step_by(16) {
            rows.push_str(&format!(
                "centerline_{},{},{},{}\n",
                spec.name, smp.x.x, smp.x.y, smp.x.z
            ));
        }
    }
    {
        let spec = scenes::straight_test_vessel();
        let scene = spec.build()?;
        for eps in scenes::FIGURE_EPS_SWEEP {
            for k in 0..=200 {
                let s = k as f64 / 200.0;
                rows.push_str(&format!(
                    "radius_eps{eps},{s},{},0\n",
                    eps * scene.radius.a(s)
                ));
            }
        }
    }
    tracker.write(&out.join("test_geoms.csv"), &rows)?;

    let meta = serde_json::json!({
        "files": [
            "funstuff1.csv", "funstuff2_a.csv", "funstuff2_b.csv",
            "the_tests_a.csv", "the_tests_b.csv", "the_tests_c.csv",
            "the_tests_d.csv", "test_geoms.csv",
        ],
        "eps_sweep": scenes::FIGURE_EPS_SWEEP,
        "parameter_sets": {
            "permeable": {"eta": 0.05, "omega": 10.0},
            "impermeable": {"eta": 1.0, "omega": 1.0},
        },
        "display_vessels": ["vessel_a_l6.4708", "vessel_b_l7.1502", "vessel_c_l11.6179"],
    });
    tracker.write(
        &out.join("figures_meta.json"),
        &serde_json::to_string_pretty(&meta).expect("json"),
    )?;
    Ok(())
}

/// Relative-difference summary between two runs of the same scene.
///
/// The tip node is reported separately: the continuum pressure has no
/// boundary value at the degenerate end, and the last-node value converges
/// only like O(1/N), so bulk and tip differences carry different meanings.
#[derive(Debug, Clone, Serialize)]
pub struct DiffSummary {
    pub max_abs_dp: f64,
    pub max_rel_dp: f64,
    /// maximum |dp| over nodes with s <= 0.99
    pub max_abs_dp_bulk: f64,
    pub max_rel_dnorm: f64,
    pub max_rel_dresidual: Option<f64>,
}

/// Compare two runs of the same scene hash: tabulates maximum differences
/// of the solution tables (interpolated onto the coarser grid), the norm
/// reports, and the residual summaries.
pub fn compare_runs(a: &RunOutput, b: &RunOutput) -> Result<DiffSummary> {
    if a.report.scene_hash != b.report.scene_hash {
        return Err(Error::Config(format!(
            "scene hashes differ: {} vs {}",
            a.report.scene_hash, b.report.scene_hash
        )));
    }
    let mut max_abs_dp: f64 = 0.0;
    let mut max_abs_dp_bulk: f64 = 0.0;
    let mut p_scale: f64 = 0.0;
    for ((la, ta), (lb, tb)) in a.solutions.iter().zip(&b.solutions) {
        if la != lb {
            return Err(Error::Config(format!("solution labels differ: {la} vs {lb}")));
        }
        let (coarse, fine) = if ta.s.len() <= tb.s.len() { (ta, tb) } else { (tb, ta) };
        for (i, &s) in coarse.s.iter().enumerate() {
            let pf = interp_nodal(&fine.s, &fine.p, s);
            let d = (coarse.p[i] - pf).abs();
            max_abs_dp = max_abs_dp.max(d);
            if s <= 0.99 {
                max_abs_dp_bulk = max_abs_dp_bulk.max(d);
            }
            p_scale = p_scale.max(coarse.p[i].abs());
        }
    }
    let rel = |x: f64, y: f64| -> f64 {
        let scale = x.abs().max(y.abs());
        if scale == 0.0 {
            0.0
        } else {
            (x - y).abs() / scale
        }
    };
    let mut max_rel_dnorm: f64 = 0.0;
    for (na, nb) in a.report.norms.iter().zip(&b.report.norms) {
        max_rel_dnorm = max_rel_dnorm
            .max(rel(na.norms.h_a, nb.norms.h_a))
            .max(rel(na.norms.p_inf, nb.norms.p_inf))
            .max(rel(na.norms.a_ps_inf, nb.norms.a_ps_inf));
    }
    let max_rel_dresidual = if !a.report.residuals.is_empty() && !b.report.residuals.is_empty() {
        let mut m: f64 = 0.0;
        for (ra, rb) in a.report.residuals.iter().zip(&b.report.residuals) {
            m = m.max(rel(ra.sup_rbar, rb.sup_rbar)).max(rel(ra.l2_rbar, rb.l2_rbar));
        }
        Some(m)
    } else {
        None
    };
    Ok(DiffSummary {
        max_abs_dp,
        max_rel_dp: if p_scale > 0.0 { max_abs_dp / p_scale } else { 0.0 },
        max_abs_dp_bulk,
        max_rel_dnorm,
        max_rel_dresidual,
    })
}
