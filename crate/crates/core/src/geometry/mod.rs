//! Vessel geometry: centerline + frame, radius profile, reflection across
//! the wall, stretch map, surface parameterization, and scene validation.

mod curve;
mod radius;

pub use curve::{build_centerline, Centerline, CenterlineSample, CurveSpec, FramePoint};
pub use radius::{extend_even, RadiusProfile, RadiusSpec};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Stretch operator `phi_eps(t) = t / (1 - ell)` mapping the shortened
/// interval [0, 1 - ell] onto [0, 1] (and [-1, 1] onto itself, scaled).
///
/// `ell(eps) = 1 - sqrt(1 - eps^2)` places the effective endpoint at the
/// focus of the prolate spheroid, which keeps `ell` between `eps^2/2` and
/// `eps^2` for all admissible `eps`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StretchMap {
    pub ell: f64,
}

impl StretchMap {
    pub fn for_eps(eps: f64) -> Self {
        StretchMap { ell: 1.0 - (1.0 - eps * eps).sqrt() }
    }

    /// phi_eps(t) = t / (1 - ell)
    pub fn forward(&self, t: f64) -> f64 {
        t / (1.0 - self.ell)
    }

    /// phi_eps^{-1}(t) = t (1 - ell)
    pub fn inverse(&self, t: f64) -> f64 {
        t * (1.0 - self.ell)
    }
}

/// The centerline extended across the wall by reflection: `Y(t) = X(t)` for
/// `t >= 0` and the mirror image of `X(-t)` for `t < 0`.
#[derive(Debug, Clone, Copy)]
pub struct ReflectedCurve<'a> {
    pub centerline: &'a Centerline,
    pub radius: &'a RadiusProfile,
}

impl<'a> ReflectedCurve<'a> {
    pub fn y(&self, t: f64) -> Vector3<f64> {
        let p = self.centerline.position(t.abs());
        if t >= 0.0 {
            p
        } else {
            mirror(p)
        }
    }

    /// Tangent of Y at t (mirrored for t < 0); used for continuity checks.
    pub fn tangent(&self, t: f64) -> Vector3<f64> {
        let e_t = self.centerline.at(t.abs()).e_t;
        if t >= 0.0 {
            e_t
        } else {
            // d/dt [mirror(X(-t))] = -mirror(X'(-t)); mirror flips z
            -mirror(e_t)
        }
    }

    /// Radius extension a*(t) = a(|t|).
    pub fn a_ext(&self, t: f64) -> f64 {
        self.radius.a(t.abs())
    }
}

fn mirror(p: Vector3<f64>) -> Vector3<f64> {
    Vector3::new(p.x, p.y, -p.z)
}

/// Radial unit vector `e_r = cos(theta) e_1 + sin(theta) e_2`.
pub fn radial_unit(frame: &FramePoint, theta: f64) -> Vector3<f64> {
    frame.e_1 * theta.cos() + frame.e_2 * theta.sin()
}

/// Angular unit vector `e_theta = -sin(theta) e_1 + cos(theta) e_2`.
pub fn angular_unit(frame: &FramePoint, theta: f64) -> Vector3<f64> {
    -frame.e_1 * theta.sin() + frame.e_2 * theta.cos()
}

/// Point on the vessel surface: `X(s) + eps a(s) e_r(s, theta)`.
pub fn surface_point(
    centerline: &Centerline,
    radius: &RadiusProfile,
    eps: f64,
    s: f64,
    theta: f64,
) -> Vector3<f64> {
    let frame = centerline.at(s);
    frame.x + radial_unit(&frame, theta) * (eps * radius.a(s))
}

/// Surface Jacobian factor
/// `J = eps a sqrt((1 - eps a kappa_hat)^2 + eps^2 a'^2)`, evaluated in the
/// equivalent form `eps sqrt((a - eps a^2 kappa_hat)^2 + eps^2 (a a')^2)`
/// which stays finite where `a -> 0` and `a' -> -inf` together.
pub fn jacobian(
    centerline: &Centerline,
    radius: &RadiusProfile,
    eps: f64,
    s: f64,
    theta: f64,
) -> Result<f64> {
    let frame = centerline.at(s);
    let a = radius.a(s);
    let kappa_hat = frame.kappa1 * theta.cos() + frame.kappa2 * theta.sin();
    if 1.0 - eps * a * kappa_hat <= 0.0 {
        return Err(Error::Geometry(format!(
            "eps too large for curvature at s={s}: eps*a*kappa_hat = {}",
            eps * a * kappa_hat
        )));
    }
    let radial = a - eps * a * a * kappa_hat;
    let axial = eps * radius.a_aprime(s);
    Ok(eps * (radial * radial + axial * axial).sqrt())
}

/// Displacement `R_eps(s, t, theta) = X(s) - Y(phi^{-1}(t)) + eps a(s) e_r`.
pub fn r_eps(
    centerline: &Centerline,
    radius: &RadiusProfile,
    eps: f64,
    stretch: &StretchMap,
    s: f64,
    t: f64,
    theta: f64,
) -> Vector3<f64> {
    let frame = centerline.at(s);
    let refl = ReflectedCurve { centerline, radius };
    frame.x - refl.y(stretch.inverse(t)) + radial_unit(&frame, theta) * (eps * radius.a(s))
}

/// Mesh and quadrature controls carried by the scene file.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct MeshControls {
    /// number of intervals in the solver mesh (nodes = n_nodes + 1)
    pub n_nodes: usize,
    /// grading exponent toward s = 1
    pub grading: f64,
    /// theta quadrature points for kernel averaging
    pub theta_order: usize,
    /// centerline sample table size
    pub geom_samples: usize,
}

impl Default for MeshControls {
    fn default() -> Self {
        MeshControls { n_nodes: 400, grading: 2.0, theta_order: 64, geom_samples: 2048 }
    }
}

/// The full problem statement: geometry, physical parameters, and
/// discretization controls. Physical parameters are stored both as given
/// (for a vessel of dimensional length L) and in unit-length form.
///
/// Nondimensionalization: with `s = L s~`, `a = L a~`, the 3D-1D boundary
/// conditions map onto the unit-length model with `eta_unit = eta L^2` and
/// `omega_unit = omega L`; `eps` (the length-to-maximum-width ratio) and the
/// pressures are unchanged.
#[derive(Debug, Clone)]
pub struct VesselScene {
    pub name: String,
    pub centerline: Centerline,
    pub radius: RadiusProfile,
    pub eps: f64,
    pub p0: f64,
    /// given parameters, relative to length L
    pub length: f64,
    pub eta_given: f64,
    pub omega_given: f64,
    /// unit-length model parameters
    pub eta: f64,
    pub omega: f64,
    pub stretch: StretchMap,
    pub mesh: MeshControls,
    pub e1_base: [f64; 3],
}

impl VesselScene {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        curve: &CurveSpec,
        radius_spec: RadiusSpec,
        length: f64,
        eps: f64,
        eta: f64,
        omega: f64,
        p0: f64,
        mesh: MeshControls,
        e1_base: [f64; 3],
    ) -> Result<Self> {
        if !(eps > 0.0 && eps <= 0.1) {
            return Err(Error::Config(format!("eps = {eps} outside (0, 0.1]")));
        }
        if length <= 0.0 || !length.is_finite() {
            return Err(Error::Config(format!("length = {length} must be positive")));
        }
        if eta <= 0.0 || omega < 0.0 {
            return Err(Error::Config("need eta > 0 and omega >= 0".into()));
        }
        let centerline =
            build_centerline(curve, length, Vector3::from(e1_base), mesh.geom_samples)?;
        let radius = RadiusProfile::new(radius_spec);
        Ok(VesselScene {
            name: name.into(),
            centerline,
            radius,
            eps,
            p0,
            length,
            eta_given: eta,
            omega_given: omega,
            eta: eta * length * length,
            omega: omega * length,
            stretch: StretchMap::for_eps(eps),
            mesh,
            e1_base,
        })
    }

    pub fn reflected(&self) -> ReflectedCurve<'_> {
        ReflectedCurve { centerline: &self.centerline, radius: &self.radius }
    }

    /// alpha(s) = 2 pi a(s) omega / eta in unit-model parameters.
    pub fn alpha(&self, s: f64) -> f64 {
        2.0 * std::f64::consts::PI * self.radius.a(s) * self.omega / self.eta
    }

    /// Signed clearance from `x` to the vessel surface along with the
    /// nearest arclength: `min_s (|x - X(s)| - eps a(s))`.
    pub fn clearance(&self, x: &Vector3<f64>) -> (f64, f64) {
        let mut best = f64::INFINITY;
        let mut best_s = 0.0;
        for smp in &self.centerline.samples {
            let d = (x - smp.x).norm() - self.eps * self.radius.a(smp.s);
            if d < best {
                best = d;
                best_s = smp.s;
            }
        }
        (best, best_s)
    }

    /// Validate admissibility; every failed condition yields a named check.
    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();
        let n_probe = 800;
        let a = &self.radius;

        // radius bounds: a in [0, 1] with sup = 1
        let mut sup_a: f64 = 0.0;
        let mut min_a: f64 = f64::INFINITY;
        for i in 0..=n_probe {
            let s = i as f64 / n_probe as f64;
            sup_a = sup_a.max(a.a(s));
            min_a = min_a.min(a.a(s));
        }
        checks.push(Check::new(
            "radius-bounds",
            (sup_a - 1.0).abs() < 1e-9 && min_a >= 0.0,
            format!("sup a = {sup_a:.6}, min a = {min_a:.6}"),
        ));

        // spheroidal end: a(1) = 0, monotone decay on (1-delta, 1], and
        // |a - sqrt(1-s^2)| <= C eps^2 sqrt(1-s^2) with C = 10 (reported)
        let tip_zero = a.a(1.0).abs() < 1e-12;
        let mut monotone = true;
        let mut ratio: f64 = 0.0;
        for i in 0..n_probe {
            let s0 = 1.0 - a.delta + a.delta * i as f64 / n_probe as f64;
            let s1 = 1.0 - a.delta + a.delta * (i + 1) as f64 / n_probe as f64;
            if a.a(s1) > a.a(s0) + 1e-12 {
                monotone = false;
            }
            let hemi = (1.0 - s0 * s0).max(0.0).sqrt();
            if hemi > 0.0 {
                ratio = ratio.max((a.a(s0) - hemi).abs() / (self.eps * self.eps * hemi));
            }
        }
        checks.push(Check::new(
            "spheroidal-end",
            tip_zero && monotone && ratio <= 10.0,
            format!(
                "a(1) = {:.2e}, monotone tail = {monotone}, end-shape ratio = {ratio:.3} (limit 10)",
                a.a(1.0)
            ),
        ));

        // regularity suprema (finite by construction; reported)
        checks.push(Check::new(
            "radius-regularity",
            a.a_star.is_finite() && a.a_starstar.is_finite(),
            format!("a_star = {:.3}, a_starstar = {:.3}", a.a_star, a.a_starstar),
        ));

        // eps-vs-curvature margin: eps a kappa must stay below 1
        let mut margin: f64 = 0.0;
        for smp in &self.centerline.samples {
            let kappa = (smp.kappa1 * smp.kappa1 + smp.kappa2 * smp.kappa2).sqrt();
            margin = margin.max(self.eps * a.a(smp.s) * kappa);
        }
        checks.push(Check::new(
            "eps-curvature",
            margin < 1.0,
            format!("max eps*a*kappa = {margin:.4}"),
        ));

        // wall contact: surface must stay in z >= 0, touching only near the base
        let mut wall_violation: Option<(f64, f64)> = None;
        for smp in &self.centerline.samples {
            if smp.s < 4.0 * self.eps {
                continue; // base band: the s=0 cross-section sits on the wall
            }
            // lowest surface point over theta: z - eps a |proj of e_r onto -z|
            let tilt = (smp.e_1.z * smp.e_1.z + smp.e_2.z * smp.e_2.z).sqrt();
            let z_low = smp.x.z - self.eps * a.a(smp.s) * tilt;
            if z_low < -1e-9 {
                wall_violation = Some((smp.s, z_low));
                break;
            }
        }
        checks.push(Check::new(
            "wall-contact",
            wall_violation.is_none(),
            match wall_violation {
                Some((s, z)) => format!("surface dips to z = {z:.3e} at s = {s:.3}"),
                None => "surface stays in the upper half space".into(),
            },
        ));

        // tube overlap: separated cross sections must not intersect
        let samples = &self.centerline.samples;
        let stride = (samples.len() / 512).max(1);
        let sep = (4.0 * self.eps).max(8.0 * stride as f64 / samples.len() as f64);
        let mut tube_clearance = f64::INFINITY;
        let coarse: Vec<&CenterlineSample> = samples.iter().step_by(stride).collect();
        for (i, pa) in coarse.iter().enumerate() {
            for pb in coarse.iter().skip(i + 1) {
                if (pa.s - pb.s).abs() < sep {
                    continue;
                }
                let gap = (pa.x - pb.x).norm() - self.eps * (a.a(pa.s) + a.a(pb.s));
                tube_clearance = tube_clearance.min(gap);
            }
        }
        checks.push(Check::new(
            "self-intersection",
            tube_clearance > 0.0,
            format!("min surface-to-surface clearance = {tube_clearance:.4e}"),
        ));

        // c_gamma: reported; reject only at (numerically) exact contact
        let c_gamma = self.centerline.c_gamma;
        checks.push(Check::new(
            "centerline-separation",
            c_gamma > 1e-9,
            format!("c_gamma estimate = {c_gamma:.4}"),
        ));

        let accepted = checks.iter().all(|c| c.passed);
        ValidationReport {
            c_gamma,
            kappa_star: self.centerline.kappa_star,
            a_star: a.a_star,
            a_starstar: a.a_starstar,
            spheroidal_ratio: ratio,
            eps_curvature_margin: margin,
            tube_clearance,
            checks,
            accepted,
        }
    }
}

/// One named validation condition.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check { name: name.into(), passed, detail }
    }
}

/// Everything the validator measured, plus the pass/fail verdict.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub c_gamma: f64,
    pub kappa_star: f64,
    pub a_star: f64,
    pub a_starstar: f64,
    pub spheroidal_ratio: f64,
    pub eps_curvature_margin: f64,
    pub tube_clearance: f64,
    pub checks: Vec<Check>,
    pub accepted: bool,
}

impl ValidationReport {
    pub fn failure_summary(&self) -> String {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn straight_scene(eps: f64) -> VesselScene {
        VesselScene::new(
            "straight-test",
            &CurveSpec::Straight,
            RadiusSpec::Spheroidal,
            1.0,
            eps,
            1.0,
            1.0,
            1.0,
            MeshControls { geom_samples: 512, ..Default::default() },
            [1.0, 0.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn stretch_map_stays_within_eps_squared_band() {
        for &eps in &[0.1, 0.05, 0.02, 0.01, 0.005] {
            let m = StretchMap::for_eps(eps);
            assert!(m.ell >= 0.5 * eps * eps && m.ell <= eps * eps, "ell = {}", m.ell);
        }
    }

    proptest! {
        #[test]
        fn stretch_roundtrip_is_identity(eps in 1e-3..0.1f64, t in -1.0..1.0f64) {
            let m = StretchMap::for_eps(eps);
            let rt = m.forward(m.inverse(t));
            prop_assert!((rt - t).abs() < 1e-14);
        }
    }

    #[test]
    fn surface_point_examples() {
        let sc = straight_scene(0.01);
        // straight vessel, s = 0.5, theta = 0: X + eps a e_1
        let p = surface_point(&sc.centerline, &sc.radius, 0.01, 0.5, 0.0);
        let a_half = (1.0f64 - 0.25).sqrt();
        assert_relative_eq!(p.x, 0.01 * a_half, epsilon = 1e-12);
        assert_relative_eq!(p.z, 0.5, epsilon = 1e-10);
        // tip: a(1) = 0 so the point is X(1) for any theta
        let tip = surface_point(&sc.centerline, &sc.radius, 0.01, 1.0, 2.1);
        assert_relative_eq!((tip - Vector3::new(0.0, 0.0, 1.0)).norm(), 0.0, epsilon = 1e-10);
        // hemisphere at s = 0.6, theta = pi/2: offset 0.01 * 0.8 along e_2
        let q = surface_point(&sc.centerline, &sc.radius, 0.01, 0.6, std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(q.y, 0.008, epsilon = 1e-12);
    }

    #[test]
    fn jacobian_examples() {
        // straight vessel, constant radius: J = eps a exactly
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
        let j = jacobian(&sc.centerline, &sc.radius, 0.02, 0.3, 1.0).unwrap();
        assert_relative_eq!(j, 0.02, epsilon = 1e-14);

        // hemisphere, straight centerline (kappa = 0) at s = 0.6:
        // J = eps a sqrt(1 + eps^2 a'^2)
        let sc = straight_scene(0.01);
        let a = sc.radius.a(0.6);
        let ap = sc.radius.a_prime(0.6);
        let j = jacobian(&sc.centerline, &sc.radius, 0.01, 0.6, 0.7).unwrap();
        assert_relative_eq!(j, 0.01 * a * (1.0 + 1e-4 * ap * ap).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn jacobian_stays_near_eps_a_for_curved_scenes() {
        // |J - eps a| <= C eps^2 with C from (kappa_star, a_star)
        let sc = VesselScene::new(
            "arc",
            &CurveSpec::PlanarArc { arc_angle: 2.0 },
            RadiusSpec::Spheroidal,
            1.0,
            0.02,
            1.0,
            1.0,
            1.0,
            MeshControls { geom_samples: 512, ..Default::default() },
            [1.0, 0.0, 0.0],
        )
        .unwrap();
        let kappa_star = sc.centerline.kappa_star;
        let a_star = sc.radius.a_star;
        // from the expansion: |J - eps a| <= eps^2 (a^2 kappa + (a a')^2 / a) <= eps^2 (kappa* + a*^2/a);
        // probe away from the tip where the bound constant stays O(1)
        let c_bound = 2.0 * (kappa_star + a_star * a_star / 0.3);
        for i in 0..=200 {
            let s = 0.95 * i as f64 / 200.0;
            for j in 0..8 {
                let theta = j as f64 * std::f64::consts::FRAC_PI_4;
                let jac = jacobian(&sc.centerline, &sc.radius, 0.02, s, theta).unwrap();
                let dev = (jac - 0.02 * sc.radius.a(s)).abs();
                assert!(
                    dev <= c_bound * 0.02 * 0.02,
                    "dev {dev:.3e} at s={s} theta={theta}"
                );
            }
        }
    }

    #[test]
    fn reflection_of_straight_vessel_is_its_continuation() {
        let sc = straight_scene(0.01);
        let refl = sc.reflected();
        for &t in &[-1.0, -0.4, 0.0, 0.3, 1.0] {
            let y = refl.y(t);
            assert_relative_eq!((y - Vector3::new(0.0, 0.0, t)).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn reflected_tangent_is_continuous_at_the_wall() {
        let sc = VesselScene::new(
            "arc",
            &CurveSpec::PlanarArc { arc_angle: 1.5 },
            RadiusSpec::Spheroidal,
            1.0,
            0.01,
            1.0,
            1.0,
            1.0,
            MeshControls { geom_samples: 1024, ..Default::default() },
            [1.0, 0.0, 0.0],
        )
        .unwrap();
        let refl = sc.reflected();
        let mut prev_jump = f64::INFINITY;
        for &h in &[1e-2, 1e-3, 1e-4] {
            let jump = (refl.tangent(h) - refl.tangent(-h)).norm();
            assert!(jump < prev_jump || jump < 1e-8, "jump {jump} at h={h}");
            prev_jump = jump;
        }
        assert!(prev_jump < 1e-3);
    }

    #[test]
    fn r_eps_bounds_hold_on_a_grid() {
        let sc = VesselScene::new(
            "arc",
            &CurveSpec::PlanarArc { arc_angle: 2.0 },
            RadiusSpec::Spheroidal,
            1.0,
            0.02,
            1.0,
            1.0,
            1.0,
            MeshControls { geom_samples: 1024, ..Default::default() },
            [1.0, 0.0, 0.0],
        )
        .unwrap();
        let kappa_star = sc.centerline.kappa_star;
        for i in 0..30 {
            let s = i as f64 / 29.0;
            for j in 0..30 {
                let t = -1.0 + 2.0 * j as f64 / 29.0;
                for k in 0..6 {
                    let theta = k as f64 * std::f64::consts::PI / 3.0;
                    let r = r_eps(&sc.centerline, &sc.radius, 0.02, &sc.stretch, s, t, theta);
                    let sbar = s - sc.stretch.inverse(t);
                    let base = (sbar * sbar + 4e-4 * sc.radius.a(s).powi(2)).sqrt();
                    assert!(r.norm() > 0.0);
                    assert!(
                        (r.norm() - base).abs() <= 0.5 * kappa_star * sbar * sbar + 1e-12,
                        "upper bound failed at s={s} t={t}"
                    );
                    assert!(r.norm() >= 0.35 * base, "lower bound failed at s={s} t={t}");
                }
            }
        }
    }

    #[test]
    fn r_eps_same_cross_section_is_eps_a() {
        let sc = straight_scene(0.01);
        for &s in &[0.0, 0.25, 0.7, 0.97] {
            let t = sc.stretch.forward(s);
            if t > 1.0 {
                continue;
            }
            let r = r_eps(&sc.centerline, &sc.radius, 0.01, &sc.stretch, s, t, 1.3);
            assert_relative_eq!(r.norm(), 0.01 * sc.radius.a(s), epsilon = 1e-10);
        }
    }

    #[test]
    fn validator_accepts_straight_hemisphere() {
        let report = straight_scene(0.01).validate();
        assert!(report.accepted, "{}", report.failure_summary());
        assert!(report.c_gamma > 0.9); // straight vertical line: ~1
    }

    #[test]
    fn jacobian_rejects_eps_beyond_curvature_bound() {
        let sc = VesselScene::new(
            "arc",
            &CurveSpec::PlanarArc { arc_angle: 2.0 },
            RadiusSpec::Spheroidal,
            1.0,
            0.02,
            1.0,
            1.0,
            1.0,
            MeshControls { geom_samples: 256, ..Default::default() },
            [1.0, 0.0, 0.0],
        )
        .unwrap();
        // kappa_1 = 2 along the arc, so eps a kappa_hat > 1 at theta = 0
        // once eps a > 0.5
        let err = jacobian(&sc.centerline, &sc.radius, 0.8, 0.3, 0.0).unwrap_err();
        assert!(matches!(err, Error::Geometry(_)));
    }

    #[test]
    fn validator_flags_surface_wall_contact() {
        // centerline stays above the wall but swings low enough mid-curve
        // that the tube surface would cross it
        let spec = CurveSpec::Spline {
            points: vec![
                [0.0, 0.0, 0.0],
                [0.0, 0.0, 0.25],
                [0.22, 0.0, 0.30],
                [0.42, 0.0, 0.012],
                [0.62, 0.0, 0.30],
                [0.80, 0.0, 0.45],
            ],
        };
        let sc = VesselScene::new(
            "low-swing",
            &spec,
            RadiusSpec::Spheroidal,
            1.0,
            0.05,
            1.0,
            1.0,
            1.0,
            MeshControls { geom_samples: 1024, ..Default::default() },
            [1.0, 0.0, 0.0],
        )
        .unwrap();
        let report = sc.validate();
        assert!(!report.accepted);
        assert!(
            report.checks.iter().any(|c| c.name == "wall-contact" && !c.passed),
            "{}",
            report.failure_summary()
        );
    }

    #[test]
    fn validator_rejects_constant_radius() {
        let sc = VesselScene::new(
            "const",
            &CurveSpec::Straight,
            RadiusSpec::Constant,
            1.0,
            0.01,
            1.0,
            1.0,
            1.0,
            MeshControls { geom_samples: 256, ..Default::default() },
            [1.0, 0.0, 0.0],
        )
        .unwrap();
        let report = sc.validate();
        assert!(!report.accepted);
        assert!(report
            .checks
            .iter()
            .any(|c| c.name == "spheroidal-end" && !c.passed));
    }
}
