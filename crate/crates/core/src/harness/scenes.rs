//! Built-in scene library.
//!
//! Encodes the vessel geometries used by the shipped experiments: a straight
//! vessel and a planar near-loop of length 4.7426 for the eps-scaling runs,
//! three 3D vessels (lengths 6.4708, 7.1502, 11.6179) for the
//! pressure-decay comparison, and a planar vessel of length 4.5213 for the
//! exterior-field slices. The curved centerline shapes beyond "straight"
//! are shape-similar stand-ins built from spline control points; the
//! lengths, radius profile, and parameter sets are the quantities the
//! experiments depend on.

use crate::field::SlicePlane;
use crate::geometry::{CurveSpec, MeshControls, RadiusSpec};

use super::SceneSpec;

/// eps values used by the shipped eps-sweep figures; the near-loop geometry
/// clears its own base for all of them.
pub const FIGURE_EPS_SWEEP: [f64; 5] = [0.02, 0.01, 0.005, 0.0025, 0.00125];

/// Planar near-loop control points (x-z plane, unit-ish scale): rises from
/// the base, loops around, and returns close to the base without touching
/// the wall.
pub fn near_loop_points() -> Vec<[f64; 3]> {
    vec![
        [0.000, 0.0, 0.000],
        [0.000, 0.0, 0.200],
        [0.040, 0.0, 0.370],
        [0.140, 0.0, 0.470],
        [0.265, 0.0, 0.470],
        [0.365, 0.0, 0.370],
        [0.390, 0.0, 0.220],
        [0.320, 0.0, 0.090],
        [0.200, 0.0, 0.038],
        [0.090, 0.0, 0.032],
    ]
}

fn base_spec(name: &str, curve: CurveSpec, length: f64) -> SceneSpec {
    SceneSpec {
        name: name.to_string(),
        curve,
        radius: RadiusSpec::Spheroidal,
        length,
        eps: 0.02,
        eta: 0.05,
        omega: 10.0,
        p0: 1.0,
        mesh: MeshControls::default(),
        e1_base: [1.0, 0.0, 0.0],
        slice: None,
    }
}

/// Straight vessel, length 4.7426.
pub fn straight_test_vessel() -> SceneSpec {
    base_spec("straight_l4.7426", CurveSpec::Straight, 4.7426)
}

/// Planar near-loop vessel, length 4.7426; the tip returns close to the
/// base, which is what produces the non-monotone interior pressure in the
/// highly permeable regime.
pub fn near_loop_test_vessel() -> SceneSpec {
    base_spec(
        "near_loop_l4.7426",
        CurveSpec::Spline { points: near_loop_points() },
        4.7426,
    )
}

/// Three 3D display vessels of increasing length.
pub fn display_vessels() -> Vec<SceneSpec> {
    let a = CurveSpec::Spline {
        points: vec![
            [0.00, 0.00, 0.00],
            [0.00, 0.02, 0.22],
            [0.09, 0.08, 0.42],
            [0.24, 0.18, 0.56],
            [0.42, 0.26, 0.64],
            [0.60, 0.28, 0.70],
        ],
    };
    let b = CurveSpec::Spline {
        points: vec![
            [0.00, 0.00, 0.00],
            [0.00, 0.03, 0.20],
            [0.12, 0.10, 0.36],
            [0.26, 0.10, 0.52],
            [0.24, -0.04, 0.68],
            [0.10, -0.16, 0.80],
            [-0.06, -0.20, 0.92],
        ],
    };
    let c = CurveSpec::Spline {
        points: vec![
            [0.00, 0.00, 0.00],
            [0.00, 0.02, 0.18],
            [0.14, 0.12, 0.30],
            [0.30, 0.06, 0.44],
            [0.28, -0.12, 0.58],
            [0.10, -0.20, 0.72],
            [-0.08, -0.10, 0.86],
            [-0.06, 0.10, 1.00],
            [0.10, 0.18, 1.14],
        ],
    };
    let mut specs = vec![
        base_spec("vessel_a_l6.4708", a, 6.4708),
        base_spec("vessel_b_l7.1502", b, 7.1502),
        base_spec("vessel_c_l11.6179", c, 11.6179),
    ];
    for spec in &mut specs {
        spec.eps = 0.01;
    }
    specs
}

/// Planar vessel for the exterior-field slices, length 4.5213, with a slice
/// plane offset slightly out of the vessel plane.
pub fn slice_vessel() -> SceneSpec {
    let curve = CurveSpec::Spline {
        points: vec![
            [0.00, 0.0, 0.00],
            [0.00, 0.0, 0.22],
            [0.08, 0.0, 0.44],
            [0.24, 0.0, 0.62],
            [0.46, 0.0, 0.72],
            [0.68, 0.0, 0.70],
        ],
    };
    let mut spec = base_spec("planar_l4.5213", curve, 4.5213);
    spec.eps = 0.01;
    spec.eta = 1.0;
    spec.omega = 1.0;
    spec.slice = Some(SlicePlane {
        origin: [0.0, 0.05, 0.0],
        span_u: [1.0, 0.0, 0.0],
        span_v: [0.0, 0.0, 1.0],
        u_range: (-0.35, 1.1),
        v_range: (0.0, 1.1),
        nu: 41,
        nv: 41,
        clearance_factor: 2.0,
    });
    spec
}

/// Every built-in scene.
pub fn library() -> Vec<SceneSpec> {
    let mut scenes = vec![straight_test_vessel(), near_loop_test_vessel()];
    scenes.extend(display_vessels());
    scenes.push(slice_vessel());
    scenes
}

/// Look up a built-in scene by name.
pub fn by_name(name: &str) -> Option<SceneSpec> {
    library().into_iter().find(|s| s.name == name)
}
