//! Gluing of two strictly plurisubharmonic potentials on a punctured ball.
//!
//! Given F smooth strictly psh on B(R) and G strictly psh on B(R), smooth
//! away from 0, builds a potential ϱ on B(R)\{0} equal to F outside
//! B(3R/4) and to delta·G − C near 0:
//!
//!   1. H := G when G(0) = −∞, else log|z|².
//!   2. Pick a > 0, b with a|z|²+b above H on the sphere |z| = R/2 and
//!      below H on |z| = R/4 (sphere extrema by dense sampling, safety
//!      margin on both inequalities).
//!   3. K := a|z|²+b outside B(R/2), reg-max of the two on the annulus,
//!      H inside B(R/4). Smooth because the reg-max agrees with each piece
//!      identically near the matching sphere.
//!   4. ε := half the sampled strictness modulus of F divided by a, so
//!      F − ε(a|z|²+b) stays strictly psh; L := F − ε(a|z|²+b) + εK.
//!      L = F outside B(R/2).
//!   5. ϱ := reg-max of L and delta·G − C, with C calibrated on a small
//!      inner sphere so delta·G − C dominates there and (checked by
//!      sampling) stays strictly below L on |z| ≥ 3R/4.
//!
//! When G(0) = −∞ the construction needs delta strictly below ε; out-of-
//! range requests fail with the largest delta that works.

use crate::error::{Error, Result};
use crate::psh::{
    certify_strict_psh_with, smooth_max, CertifyConfig, ScalarField,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug)]
pub struct GlueConfig {
    /// Sphere-extrema sample count is this times the complex dimension.
    pub sphere_samples_per_dim: usize,
    /// Relative safety margin applied to the sphere inequalities.
    pub safety_margin_fraction: f64,
    /// Hessian samples used to estimate the strictness modulus of F.
    pub hessian_samples: usize,
    pub hessian_step: f64,
    pub seed: u64,
}

impl Default for GlueConfig {
    fn default() -> Self {
        GlueConfig {
            sphere_samples_per_dim: 10_000,
            safety_margin_fraction: 0.05,
            hessian_samples: 400,
            hessian_step: 1e-3,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GlueCase {
    /// G(0) = −∞; H = G and delta must stay below the strictness modulus.
    SingularPotential,
    /// G(0) finite; H = log|z|² and any delta ≤ the reported ceiling works.
    BoundedPotential,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct GlueReport {
    pub case: GlueCase,
    pub delta: f64,
    /// Quadratic barrier coefficients: a|z|² + b.
    pub a: f64,
    pub b: f64,
    /// Strictness modulus ε of F (scaled by the barrier Hessian bound).
    pub epsilon: f64,
    /// Offset C in the inner potential delta·G − C.
    pub offset_c: f64,
    /// Reg-max width of the annulus join (step 3).
    pub annulus_epsilon: f64,
    /// Reg-max width of the final join (step 5).
    pub final_epsilon: f64,
    /// ϱ = delta·G − C at every point with |z| below this radius.
    pub inner_radius: f64,
    /// ϱ = F at every point with |z| above this radius.
    pub outer_radius: f64,
    /// Largest delta the construction accepts (None: no ceiling found).
    pub delta_ceiling: Option<f64>,
    /// Minimal sampled Hessian eigenvalue of F on B(3R/4).
    pub f_min_eigenvalue: f64,
}

#[derive(Clone, Debug)]
pub struct GluedPotential {
    pub field: ScalarField,
    pub report: GlueReport,
}

pub fn glue_potentials(
    f: &ScalarField,
    g: &ScalarField,
    radius: f64,
    delta: f64,
    config: GlueConfig,
) -> Result<GluedPotential> {
    validate_inputs(f, g, radius, delta)?;
    match build(f, g, radius, delta, &config) {
        Ok(p) => Ok(p),
        Err(Error::DeltaTooLarge { max_delta, .. }) => {
            // Confirm the reported ceiling by halving until a delta works.
            let mut d = max_delta.min(delta / 2.0);
            for _ in 0..40 {
                if build(f, g, radius, d, &config).is_ok() {
                    return Err(Error::DeltaTooLarge {
                        delta,
                        max_delta: d,
                    });
                }
                d /= 2.0;
            }
            Err(Error::DeltaTooLarge {
                delta,
                max_delta: 0.0,
            })
        }
        Err(e) => Err(e),
    }
}

fn validate_inputs(f: &ScalarField, g: &ScalarField, radius: f64, delta: f64) -> Result<()> {
    if f.complex_dimension() != g.complex_dimension() {
        return Err(Error::invalid("potentials have different dimensions"));
    }
    if f.complex_dimension() == 0 || f.complex_dimension() > crate::psh::MAX_LAB_DIMENSION {
        return Err(Error::invalid(format!(
            "complex dimension must be in 1..={}",
            crate::psh::MAX_LAB_DIMENSION
        )));
    }
    if !(radius > 0.0) || radius > f.domain_radius() || radius > g.domain_radius() {
        return Err(Error::invalid(
            "radius must be positive and within both domains",
        ));
    }
    if !(delta > 0.0) {
        return Err(Error::invalid("delta must be positive"));
    }
    Ok(())
}

fn build(
    f: &ScalarField,
    g: &ScalarField,
    radius: f64,
    delta: f64,
    config: &GlueConfig,
) -> Result<GluedPotential> {
    let n = f.complex_dimension();
    let r = radius;
    let origin = vec![Complex64::new(0.0, 0.0); n];
    let g_at_origin = g.eval(&origin);
    let case = if g_at_origin == f64::NEG_INFINITY {
        GlueCase::SingularPotential
    } else {
        GlueCase::BoundedPotential
    };
    let h: ScalarField = match case {
        GlueCase::SingularPotential => g.clone(),
        GlueCase::BoundedPotential => ScalarField::log_norm_squared(n, g.domain_radius()),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sphere_count = config.sphere_samples_per_dim * n;

    // Step 2: sphere extrema of H with a safety margin.
    let outer_sphere = sphere_samples(n, r / 2.0, sphere_count, &mut rng);
    let inner_sphere = sphere_samples(n, r / 4.0, sphere_count, &mut rng);
    let h_max_outer = outer_sphere
        .iter()
        .map(|p| h.eval(p))
        .fold(f64::NEG_INFINITY, f64::max);
    let h_min_inner = inner_sphere
        .iter()
        .map(|p| h.eval(p))
        .fold(f64::INFINITY, f64::min);
    if !h_max_outer.is_finite() || !h_min_inner.is_finite() {
        return Err(Error::invalid(
            "singular barrier potential on a sampling sphere",
        ));
    }
    let spread = h_max_outer - h_min_inner;
    let margin = config.safety_margin_fraction * (spread.abs() + 1.0);
    // a(R/2)² + b = h_max + margin and a(R/4)² + b = h_min − margin.
    let a = (spread + 2.0 * margin) / (3.0 * r * r / 16.0);
    if !(a > 0.0) {
        return Err(Error::invalid(
            "barrier potential extrema do not admit a separating quadratic",
        ));
    }
    let b = h_min_inner - margin - a * (r / 4.0) * (r / 4.0);
    let annulus_epsilon = margin / 2.0;

    // Step 4: strictness modulus of F on B(3R/4).
    let fraction = (0.75 * r / f.domain_radius()).min(0.9);
    let (_, f_min_eig) = certify_strict_psh_with(
        f,
        config.hessian_samples.max(100),
        0.0,
        config.seed.wrapping_add(1),
        CertifyConfig {
            step: config.hessian_step,
            max_radius_fraction: fraction,
        },
    )?;
    if !(f_min_eig > 0.0) {
        return Err(Error::invalid(
            "first potential is not strictly plurisubharmonic on the ball",
        ));
    }
    let epsilon = f_min_eig / (2.0 * a);

    // The final join must be far narrower than the slope separating the
    // two branches of ϱ, so the matching regions are exact.
    let slope = match case {
        GlueCase::SingularPotential => epsilon - delta,
        GlueCase::BoundedPotential => epsilon,
    };
    let delta_ceiling = match case {
        GlueCase::SingularPotential => Some(epsilon / 2.0),
        GlueCase::BoundedPotential => None,
    };
    if case == GlueCase::SingularPotential && delta > epsilon / 2.0 {
        return Err(Error::DeltaTooLarge {
            delta,
            max_delta: epsilon / 2.0,
        });
    }
    let final_epsilon = (margin / 2.0).min(slope / 20.0);
    if !(final_epsilon > 0.0) {
        return Err(Error::invalid("degenerate join width"));
    }

    // Step 5: calibrate C on a small inner sphere so delta·G − C clears L
    // there, then verify by sampling that L dominates on |z| ≥ 3R/4.
    let inner_radius = r / 250.0;
    let l = make_l(f, &h, a, b, epsilon, annulus_epsilon, r);
    let calib = sphere_samples(n, inner_radius, sphere_count, &mut rng);
    let c = calib
        .iter()
        .map(|p| delta * g.eval(p) - l(p))
        .fold(f64::INFINITY, f64::min)
        - 4.0 * final_epsilon;
    if !c.is_finite() {
        return Err(Error::invalid(
            "inner potential is singular on the calibration sphere",
        ));
    }

    // Inner dominance must persist toward 0.
    let deeper = sphere_samples(n, inner_radius / 2.0, sphere_count / 4, &mut rng);
    for p in &deeper {
        if delta * g.eval(p) - c < l(p) + 4.0 * final_epsilon {
            return Err(Error::DeltaTooLarge {
                delta,
                max_delta: delta / 2.0,
            });
        }
    }
    // Outer dominance of L (= F there).
    for rho_r in [0.75 * r, 0.875 * r, 0.97 * r] {
        let pts = sphere_samples(n, rho_r, sphere_count / 4, &mut rng);
        for p in &pts {
            if delta * g.eval(p) - c > l(p) - 2.0 * final_epsilon {
                return Err(Error::DeltaTooLarge {
                    delta,
                    max_delta: delta / 2.0,
                });
            }
        }
    }

    let report = GlueReport {
        case,
        delta,
        a,
        b,
        epsilon,
        offset_c: c,
        annulus_epsilon,
        final_epsilon,
        inner_radius,
        outer_radius: 0.75 * r,
        delta_ceiling,
        f_min_eigenvalue: f_min_eig,
    };

    let l_eval = make_l(f, &h, a, b, epsilon, annulus_epsilon, r);
    let gg = g.clone();
    let mut singular = f.singular_points().to_vec();
    if case == GlueCase::SingularPotential {
        singular.extend(g.singular_points().iter().cloned());
    }
    let field = ScalarField::from_fn(n, r, move |z| {
        smooth_max(l_eval(z), delta * gg.eval(z) - c, final_epsilon)
    })
    .with_singular_points(singular);

    Ok(GluedPotential { field, report })
}

/// L = F − ε(a|z|²+b) + εK with K the three-piece barrier join.
fn make_l(
    f: &ScalarField,
    h: &ScalarField,
    a: f64,
    b: f64,
    epsilon: f64,
    annulus_epsilon: f64,
    r: f64,
) -> impl Fn(&[Complex64]) -> f64 {
    let (fc, hc) = (f.clone(), h.clone());
    move |z: &[Complex64]| {
        let norm2: f64 = z.iter().map(|zi| zi.norm_sqr()).sum();
        let q = a * norm2 + b;
        let rad = norm2.sqrt();
        if rad >= r / 2.0 {
            // K ≡ Q here, so L = F identically; evaluate it directly to
            // keep the match exact in floating point.
            return fc.eval(z);
        }
        let k = if rad > r / 4.0 {
            smooth_max(hc.eval(z), q, annulus_epsilon)
        } else {
            hc.eval(z)
        };
        fc.eval(z) - epsilon * q + epsilon * k
    }
}

/// Uniform points on the sphere of the given radius in complex n-space.
fn sphere_samples(
    n: usize,
    radius: f64,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let coords: Vec<f64> = (0..2 * n).map(|_| gaussian(rng)).collect();
        let norm: f64 = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        out.push(
            (0..n)
                .map(|j| {
                    Complex64::new(
                        coords[2 * j] / norm * radius,
                        coords[2 * j + 1] / norm * radius,
                    )
                })
                .collect(),
        );
    }
    out
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
