use crate::error::{Error, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// Evaluator-based real-valued function on a ball in complex n-space.
/// Values may be −∞ at declared singular points.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    domain_radius: f64,
    singular_points: Vec<Vec<Complex64>>,
    eval: Arc<dyn Fn(&[Complex64]) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("dim", &self.dim)
            .field("domain_radius", &self.domain_radius)
            .field("singular_points", &self.singular_points.len())
            .finish()
    }
}

impl ScalarField {
    pub fn from_fn<F>(dim: usize, domain_radius: f64, eval: F) -> Self
    where
        F: Fn(&[Complex64]) -> f64 + Send + Sync + 'static,
    {
        ScalarField {
            dim,
            domain_radius,
            singular_points: Vec::new(),
            eval: Arc::new(eval),
        }
    }

    pub fn with_singular_points(mut self, points: Vec<Vec<Complex64>>) -> Self {
        self.singular_points = points;
        self
    }

    /// |z|² = Σ|z_i|².
    pub fn norm_squared(dim: usize, domain_radius: f64) -> Self {
        ScalarField::from_fn(dim, domain_radius, |z| {
            z.iter().map(|zi| zi.norm_sqr()).sum()
        })
    }

    /// log|z|², singular (−∞) at the origin.
    pub fn log_norm_squared(dim: usize, domain_radius: f64) -> Self {
        ScalarField::from_fn(dim, domain_radius, |z| {
            let n: f64 = z.iter().map(|zi| zi.norm_sqr()).sum();
            if n == 0.0 {
                f64::NEG_INFINITY
            } else {
                n.ln()
            }
        })
        .with_singular_points(vec![vec![Complex64::new(0.0, 0.0); dim]])
    }

    pub fn constant(dim: usize, domain_radius: f64, value: f64) -> Self {
        ScalarField::from_fn(dim, domain_radius, move |_| value)
    }

    pub fn eval(&self, point: &[Complex64]) -> f64 {
        debug_assert_eq!(point.len(), self.dim);
        (self.eval)(point)
    }

    pub fn complex_dimension(&self) -> usize {
        self.dim
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    pub fn singular_points(&self) -> &[Vec<Complex64>] {
        &self.singular_points
    }

    /// scale·f + offset.
    pub fn affine(&self, scale: f64, offset: f64) -> Self {
        let inner = self.eval.clone();
        ScalarField {
            dim: self.dim,
            domain_radius: self.domain_radius,
            singular_points: self.singular_points.clone(),
            eval: Arc::new(move |z| scale * inner(z) + offset),
        }
    }

    pub fn add(f: &ScalarField, g: &ScalarField) -> Result<Self> {
        if f.dim != g.dim {
            return Err(Error::invalid("fields have different dimensions"));
        }
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        let mut singular = f.singular_points.clone();
        singular.extend(g.singular_points.iter().cloned());
        Ok(ScalarField {
            dim: f.dim,
            domain_radius: f.domain_radius.min(g.domain_radius),
            singular_points: singular,
            eval: Arc::new(move |z| fe(z) + ge(z)),
        })
    }
}
