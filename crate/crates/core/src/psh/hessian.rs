//! Finite-difference complex Hessian ∂²φ/∂z_j∂z̄_k.
//!
//! With z_j = x_j + i·y_j,
//!   4·∂²φ/∂z_j∂z̄_k = (φ_{x_j x_k} + φ_{y_j y_k}) + i·(φ_{x_j y_k} − φ_{y_j x_k}),
//! and each real second derivative is taken by a central difference with
//! step h (second-order accurate). The matrix is hermitized before the
//! eigenvalues are computed, so `min_eigenvalue` is always real.

use crate::error::{Error, Result};
use crate::psh::{distance, ScalarField};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct HessianSample {
    pub point: Vec<Complex64>,
    /// Hermitian n×n estimate of the complex Hessian, row-major.
    pub matrix: DMatrix<Complex64>,
    pub min_eigenvalue: f64,
    pub step: f64,
}

/// Central finite-difference complex Hessian at `point` with step `h`.
pub fn complex_hessian(field: &ScalarField, point: &[Complex64], h: f64) -> Result<HessianSample> {
    let n = field.complex_dimension();
    if point.len() != n {
        return Err(Error::invalid("point dimension mismatch"));
    }
    if !(h > 0.0) {
        return Err(Error::invalid("step must be positive"));
    }
    if field
        .singular_points()
        .iter()
        .any(|s| distance(point, s) < 10.0 * h)
    {
        return Err(Error::invalid(
            "point is within 10h of a singular point of the field",
        ));
    }

    // Real coordinates: index 2j = x_j, 2j+1 = y_j.
    let base: Vec<f64> = point
        .iter()
        .flat_map(|z| [z.re, z.im])
        .collect();
    let eval_at = |coords: &[f64]| -> f64 {
        let z: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(coords[2 * j], coords[2 * j + 1]))
            .collect();
        field.eval(&z)
    };
    let f0 = eval_at(&base);

    // Central second differences over the 2n real coordinates.
    let second = |i: usize, j: usize| -> f64 {
        let mut c = base.clone();
        if i == j {
            c[i] = base[i] + h;
            let fp = eval_at(&c);
            c[i] = base[i] - h;
            let fm = eval_at(&c);
            (fp - 2.0 * f0 + fm) / (h * h)
        } else {
            let mut acc = 0.0;
            for (si, sj, sign) in [
                (1.0, 1.0, 1.0),
                (-1.0, -1.0, 1.0),
                (1.0, -1.0, -1.0),
                (-1.0, 1.0, -1.0),
            ] {
                c[i] = base[i] + si * h;
                c[j] = base[j] + sj * h;
                acc += sign * eval_at(&c);
                c[i] = base[i];
                c[j] = base[j];
            }
            acc / (4.0 * h * h)
        }
    };

    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let re = second(2 * j, 2 * k) + second(2 * j + 1, 2 * k + 1);
            let im = second(2 * j, 2 * k + 1) - second(2 * j + 1, 2 * k);
            m[(j, k)] = Complex64::new(re / 4.0, im / 4.0);
        }
    }
    // Hermitize: (M + M*)/2.
    let herm = {
        let adj = m.adjoint();
        (m + adj).scale(0.5)
    };

    let min_eigenvalue = hermitian_min_eigenvalue(&herm);
    Ok(HessianSample {
        point: point.to_vec(),
        matrix: herm,
        min_eigenvalue,
        step: h,
    })
}

/// Eigenvalues of a Hermitian H = A + iB via the real symmetric embedding
/// [[A, −B], [B, A]], whose spectrum is that of H with doubled multiplicity.
fn hermitian_min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut s = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            let a = m[(j, k)].re;
            let b = m[(j, k)].im;
            s[(j, k)] = a;
            s[(j + n, k + n)] = a;
            s[(j, k + n)] = -b;
            s[(j + n, k)] = b;
        }
    }
    // Symmetrize exactly against rounding before the solver.
    let sym = (s.clone() + s.transpose()).scale(0.5);
    let eigen: DVector<f64> = sym.symmetric_eigenvalues();
    eigen.iter().cloned().fold(f64::INFINITY, f64::min)
}
