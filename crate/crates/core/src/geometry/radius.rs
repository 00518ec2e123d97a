//! Admissible radius profiles `a(s)` with `||a||_inf = 1` and a decaying
//! (spheroidal) free end.

use serde::{Deserialize, Serialize};

/// Radius family in the scene file. Values are relative to the maximum
/// radius: the physical tube radius is `eps * a(s)` in unit-length
/// coordinates.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RadiusSpec {
    /// Prolate-spheroid profile `a(s) = sqrt(1 - s^2)`.
    Spheroidal,
    /// Constant radius `a = 1`. Not admissible (no decaying end); kept for
    /// validator tests and for probing the kernel on simple shapes.
    Constant,
}

/// Radius profile with derivative data and admissibility metadata.
#[derive(Debug, Clone)]
pub struct RadiusProfile {
    pub spec: RadiusSpec,
    /// sup |a a'| on the sample grid
    pub a_star: f64,
    /// sup |a^3 a''| on the sample grid
    pub a_starstar: f64,
    /// interior lower-bound region: a >= a_0 on [0, 1 - delta]
    pub delta: f64,
    pub a_0: f64,
    /// tag describing the free-end shape
    pub end_form: &'static str,
}

impl RadiusProfile {
    pub fn new(spec: RadiusSpec) -> Self {
        let delta = 0.1;
        match spec {
            RadiusSpec::Spheroidal => {
                // closed forms: |a a'| = s, |a^3 a''| = 1
                RadiusProfile {
                    spec,
                    a_star: 1.0,
                    a_starstar: 1.0,
                    delta,
                    a_0: (1.0 - (1.0 - delta) * (1.0 - delta)).sqrt(),
                    end_form: "spheroidal",
                }
            }
            RadiusSpec::Constant => RadiusProfile {
                spec,
                a_star: 0.0,
                a_starstar: 0.0,
                delta,
                a_0: 1.0,
                end_form: "blunt",
            },
        }
    }

    /// a(s)
    pub fn a(&self, s: f64) -> f64 {
        match self.spec {
            RadiusSpec::Spheroidal => (1.0 - s * s).max(0.0).sqrt(),
            RadiusSpec::Constant => 1.0,
        }
    }

    /// a'(s); unbounded at s = 1 for the spheroidal family.
    pub fn a_prime(&self, s: f64) -> f64 {
        match self.spec {
            RadiusSpec::Spheroidal => {
                let a = self.a(s);
                if a == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -s / a
                }
            }
            RadiusSpec::Constant => 0.0,
        }
    }

    /// The bounded combination a(s) a'(s), safe at the decaying end.
    pub fn a_aprime(&self, s: f64) -> f64 {
        match self.spec {
            RadiusSpec::Spheroidal => -s,
            RadiusSpec::Constant => 0.0,
        }
    }

    /// a''(s)
    pub fn a_second(&self, s: f64) -> f64 {
        match self.spec {
            RadiusSpec::Spheroidal => {
                let w = 1.0 - s * s;
                if w <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -w.powf(-1.5)
                }
            }
            RadiusSpec::Constant => 0.0,
        }
    }

    /// Even extension a*(t) to [-1, 1].
    pub fn a_star_ext(&self, t: f64) -> f64 {
        self.a(t.abs())
    }
}

/// Even extension-by-reflection of a scalar function sampled on [0, 1].
pub fn extend_even<F: Fn(f64) -> f64>(f: F) -> impl Fn(f64) -> f64 {
    move |t: f64| f(t.abs())
}
