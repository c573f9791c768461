//! Regularized maximum.
//!
//! `smooth_max(t1, t2, eps)` is the mollified two-variable maximum
//! M(t1,t2) = t_lo + w·ρ((t_hi−t_lo)/w) with kernel half-width w = eps/2.
//! ρ is the closed-form smoothing of relu against the even bump
//! (35/32)(1−u²)³ on [−1,1], so M is a polynomial of the gap inside the
//! switching band and exactly the plain maximum outside it. M is convex
//! and nondecreasing in each argument, hence plurisubharmonicity of both
//! inputs is preserved, and:
//!   (i)  smooth wherever both inputs are;
//!   (ii) max ≤ M ≤ max + eps (in fact max + 0.137·eps/2);
//!   (iii) M = φ_j exactly as soon as φ_i + eps/2 ≤ φ_j, so in particular
//!         whenever φ_i + 2·eps ≤ φ_j.

use crate::error::{Error, Result};
use crate::psh::ScalarField;

/// ρ(x) for x ∈ [−1,1]: ∫ relu(x+u)·(35/32)(1−u²)³ du.
fn rho(x: f64) -> f64 {
    let x2 = x * x;
    // P = ∫(1−u²)³ du, Q = ∫u(1−u²)³ du, both evaluated at x.
    let p = x * (1.0 - x2 + 0.6 * x2 * x2 - x2 * x2 * x2 / 7.0);
    let q = x2 / 2.0 - 0.75 * x2 * x2 + x2 * x2 * x2 / 2.0 - x2 * x2 * x2 * x2 / 8.0;
    (35.0 / 32.0) * (x * (16.0 / 35.0 + p) + 0.125 - q)
}

/// Mollified maximum with the reg-max contract at width parameter `eps`.
pub fn smooth_max(t1: f64, t2: f64, eps: f64) -> f64 {
    // Order so the gap is nonnegative; the true M is symmetric, and
    // ordering makes the implementation symmetric bit-for-bit.
    let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    let w = eps / 2.0;
    let d = hi - lo;
    if d >= w {
        return hi;
    }
    // Clamp against rounding so max ≤ M holds exactly.
    (lo + w * rho(d / w)).max(hi)
}

/// Regularized maximum of two fields on their common domain.
pub fn reg_max(f: &ScalarField, g: &ScalarField, eps: f64) -> Result<ScalarField> {
    if !(eps > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if f.complex_dimension() != g.complex_dimension() {
        return Err(Error::invalid("fields have different dimensions"));
    }
    let (fc, gc) = (f.clone(), g.clone());
    let mut singular = f.singular_points().to_vec();
    singular.extend(g.singular_points().iter().cloned());
    Ok(ScalarField::from_fn(
        f.complex_dimension(),
        f.domain_radius().min(g.domain_radius()),
        move |z| smooth_max(fc.eval(z), gc.eval(z), eps),
    )
    .with_singular_points(singular))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dominant_branch_is_exact() {
        // gap 10 with eps 1: the larger input wins exactly.
        assert_eq!(smooth_max(0.0, -10.0, 1.0), 0.0);
        assert_eq!(smooth_max(-10.0, 0.0, 1.0), 0.0);
    }

    #[test]
    fn equal_inputs_land_in_the_band() {
        let eps = 1.0;
        let v = smooth_max(3.0, 3.0, eps);
        assert!(v >= 3.0 && v <= 3.0 + eps, "{}", v);
    }

    #[test]
    fn bullet_properties_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100_000 {
            let t1: f64 = rng.gen_range(-5.0..5.0);
            let t2: f64 = rng.gen_range(-5.0..5.0);
            let eps: f64 = rng.gen_range(1e-3..2.0);
            let m = smooth_max(t1, t2, eps);
            let plain = t1.max(t2);
            assert!(m >= plain, "(ii) lower: {} < {}", m, plain);
            assert!(m <= plain + eps, "(ii) upper");
            if t1 + 2.0 * eps <= t2 {
                assert_eq!(m, t2, "(iii)");
            }
            if t2 + 2.0 * eps <= t1 {
                assert_eq!(m, t1, "(iii)");
            }
            assert_eq!(
                m.to_bits(),
                smooth_max(t2, t1, eps).to_bits(),
                "symmetry"
            );
        }
    }

    #[test]
    fn negative_infinity_input() {
        assert_eq!(smooth_max(f64::NEG_INFINITY, 2.0, 0.5), 2.0);
    }

    #[test]
    fn monotone_in_each_argument() {
        let eps = 0.8;
        let mut prev = f64::NEG_INFINITY;
        for k in 0..200 {
            let t1 = -1.0 + k as f64 * 0.01;
            let v = smooth_max(t1, 0.0, eps);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn gradient_is_continuous_across_the_switching_band() {
        // Difference-quotient slopes of d ↦ smooth_max(0, d, eps) must not
        // jump at the band edges (smoothness check (i) in 1D).
        let eps = 0.5;
        let h = 1e-6;
        let slope = |d: f64| (smooth_max(0.0, d + h, eps) - smooth_max(0.0, d - h, eps)) / (2.0 * h);
        let mut prev = slope(-0.5);
        let mut d = -0.5;
        while d < 0.5 {
            d += 1e-3;
            let s = slope(d);
            assert!((s - prev).abs() < 2e-2, "slope jump at d={}", d);
            prev = s;
        }
        // And the slopes interpolate 0 to 1.
        assert!(slope(-0.4) < 1e-9);
        assert!((slope(0.4) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reg_max_field_example() {
        // f ≡ 0, g ≡ −10, eps = 1 → field ≡ 0.
        let f = ScalarField::constant(2, 1.0, 0.0);
        let g = ScalarField::constant(2, 1.0, -10.0);
        let m = reg_max(&f, &g, 1.0).unwrap();
        let p = vec![Complex64::new(0.2, 0.1), Complex64::new(0.0, -0.4)];
        assert_eq!(m.eval(&p), 0.0);
    }

    #[test]
    fn reg_max_field_large_gap_quadratics() {
        // f = |z|², g = |z|² − 5, eps = 1 → equals f on the unit ball.
        let f = ScalarField::norm_squared(1, 1.0);
        let g = f.affine(1.0, -5.0);
        let m = reg_max(&f, &g, 1.0).unwrap();
        for t in [0.0, 0.3, 0.9] {
            let p = vec![Complex64::new(t, 0.0)];
            assert_eq!(m.eval(&p), f.eval(&p));
        }
    }

    #[test]
    fn reg_max_rejects_bad_epsilon() {
        let f = ScalarField::constant(1, 1.0, 0.0);
        assert!(reg_max(&f, &f, 0.0).is_err());
    }
}
