use std::f64::consts::{FRAC_PI_4, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combination::CombinationSpec;
use crate::disk::DiskPoint;

/// How a path approaches its boundary point `ζ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Approach {
    Radial,
    /// Straight line meeting the radius at `angle` (|angle| < π/2).
    Tangential {
        angle: f64,
    },
    /// Horocycle-like circle through `ζ` with center `ζ/(1+c)` and radius `c/(1+c)`.
    Oricyclic {
        curvature: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPath {
    pub zeta: Complex64,
    pub approach: Approach,
    /// `|z_n| = 1 - ε_n` with `ε_n` geometric down to the last step.
    pub steps: Vec<DiskPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathConfig {
    /// Uniformly spaced boundary points `e^{2πik/points}`.
    pub points: usize,
    pub tangential_angles: Vec<f64>,
    pub oricycle_curvatures: Vec<f64>,
    pub steps: usize,
    /// `1 - |z|` at the final step.
    pub last_step: f64,
    /// Add the approach family at each symbol's maximal-modulus point when
    /// its range is not compactly contained in the disk.
    pub contact_paths: bool,
    /// Extra boundary points at seeded random angles.
    pub random_points: usize,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            points: 16,
            tangential_angles: vec![FRAC_PI_4, -FRAC_PI_4],
            oricycle_curvatures: vec![1.0],
            steps: 48,
            last_step: 1e-10,
            contact_paths: true,
            random_points: 0,
        }
    }
}

fn epsilons(eps0: f64, last: f64, steps: usize) -> Vec<f64> {
    let steps = steps.max(2);
    let ratio = (last / eps0).ln() / (steps - 1) as f64;
    (0..steps).map(|k| if k == steps - 1 { last } else { eps0 * (ratio * k as f64).exp() }).collect()
}

impl BoundaryPath {
    /// Builds the path; `steps` counts points, the last one at `|z| = 1 - last_step`.
    pub fn new(zeta: Complex64, approach: Approach, steps: usize, last_step: f64) -> Self {
        let zeta = zeta / zeta.norm();
        let last_step = last_step.clamp(1e-15, 0.25);
        let points: Vec<Complex64> = match approach {
            Approach::Radial => epsilons(0.5, last_step, steps).into_iter().map(|e| zeta * (1.0 - e)).collect(),
            Approach::Tangential { angle } => {
                let (s_a, c_a) = angle.sin_cos();
                let eps_max = 1.0 - s_a.abs();
                let eps0 = (0.5 * eps_max).max(2.0 * last_step);
                let dir = Complex64::from_polar(1.0, angle);
                epsilons(eps0, last_step, steps)
                    .into_iter()
                    .map(|e| {
                        // |1 - s e^{iα}| = 1 - ε, smaller root in s
                        let disc = (c_a * c_a - 2.0 * e + e * e).max(0.0);
                        let s = (2.0 * e - e * e) / (c_a + disc.sqrt());
                        zeta * (1.0 - dir * s)
                    })
                    .collect()
            }
            Approach::Oricyclic { curvature } => {
                let c = curvature.max(1e-6);
                let w_max = 4.0 * c / ((1.0 + c) * (1.0 + c));
                let eps0 = (0.5 * (1.0 - (1.0 - w_max).max(0.0).sqrt())).max(2.0 * last_step);
                epsilons(eps0, last_step, steps)
                    .into_iter()
                    .map(|e| {
                        let u = ((2.0 * e - e * e) * (1.0 + c) * (1.0 + c) / (2.0 * c)).min(2.0);
                        let theta = 2.0 * (u / 2.0).sqrt().asin();
                        zeta * (1.0 + Complex64::from_polar(c, theta)) / (1.0 + c)
                    })
                    .collect()
            }
        };
        let steps = points.into_iter().filter_map(|z| DiskPoint::new(z).ok()).collect();
        Self { zeta, approach, steps }
    }

    pub fn label(&self) -> String {
        let theta = self.zeta.arg();
        match self.approach {
            Approach::Radial => format!("radial@{theta:.6}"),
            Approach::Tangential { angle } => format!("tangential({angle:.4})@{theta:.6}"),
            Approach::Oricyclic { curvature } => format!("oricyclic({curvature})@{theta:.6}"),
        }
    }
}

fn family(zeta: Complex64, config: &PathConfig, out: &mut Vec<BoundaryPath>) {
    out.push(BoundaryPath::new(zeta, Approach::Radial, config.steps, config.last_step));
    for &angle in &config.tangential_angles {
        out.push(BoundaryPath::new(zeta, Approach::Tangential { angle }, config.steps, config.last_step));
    }
    for &curvature in &config.oricycle_curvatures {
        out.push(BoundaryPath::new(zeta, Approach::Oricyclic { curvature }, config.steps, config.last_step));
    }
}

/// The approach family at each symbol's maximal-modulus point, for symbols
/// whose range is not compactly contained in the disk.
pub fn contact_paths(spec: &CombinationSpec, config: &PathConfig) -> Vec<BoundaryPath> {
    let mut out = Vec::new();
    for t in spec.terms() {
        let v = t.symbol.validation();
        if v.strict || v.witness.norm() == 0.0 {
            continue;
        }
        family(v.witness, config, &mut out);
    }
    out
}

/// The default family: uniform boundary points × approaches, contact paths,
/// and `random_points` seeded random boundary points.
pub fn default_paths(spec: &CombinationSpec, config: &PathConfig, seed: u64) -> Vec<BoundaryPath> {
    let mut out = Vec::new();
    for k in 0..config.points {
        family(Complex64::from_polar(1.0, TAU * k as f64 / config.points as f64), config, &mut out);
    }
    if config.contact_paths {
        out.extend(contact_paths(spec, config));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..config.random_points {
        family(Complex64::from_polar(1.0, rng.gen::<f64>() * TAU), config, &mut out);
    }
    out
}
