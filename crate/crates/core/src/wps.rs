//! Exact rational cohomology ring of the weighted projective space CP^n(a).
//!
//! For a pairwise coprime weight vector a = (a_0,…,a_n), the ring is spanned
//! by generators α_0,…,α_n with α_i of degree 2i and multiplication
//! α_i·α_j = ⟨a⟩·α_{i+j} for i+j ≤ n (zero above the top degree). The
//! pairing is normalized by ⟨α_n, [CP^n(a)]⟩ = 1, so ⟨α_1^n⟩ = ⟨a⟩^{n−1}.

use crate::coprime::CoprimeVector;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// CP^n(a_0,…,a_n); `weights` has length n+1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WpsSpace {
    weights: CoprimeVector,
}

impl WpsSpace {
    pub fn new(weights: CoprimeVector) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::invalid(
                "weighted projective space needs at least two weights",
            ));
        }
        Ok(WpsSpace { weights })
    }

    pub fn complex_dimension(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &CoprimeVector {
        &self.weights
    }

    pub fn weight_product(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.weights.weight_product()))
    }

    /// ⟨a⟩^{n−1}, the top self-pairing of α_1.
    pub fn alpha1_top_pairing(&self) -> BigRational {
        let mut acc = BigRational::one();
        let p = self.weight_product();
        for _ in 0..self.complex_dimension().saturating_sub(1) {
            acc *= &p;
        }
        acc
    }
}

/// Element Σ c_i α_i with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WpsRingElement {
    coefficients: Vec<BigRational>,
}

impl WpsRingElement {
    pub fn zero(space: &WpsSpace) -> Self {
        WpsRingElement {
            coefficients: vec![BigRational::zero(); space.complex_dimension() + 1],
        }
    }

    /// The basis generator α_i.
    pub fn generator(space: &WpsSpace, i: usize) -> Result<Self> {
        if i > space.complex_dimension() {
            return Err(Error::invalid(format!(
                "generator index {} exceeds complex dimension {}",
                i,
                space.complex_dimension()
            )));
        }
        let mut el = Self::zero(space);
        el.coefficients[i] = BigRational::one();
        Ok(el)
    }

    pub fn from_coefficients(space: &WpsSpace, coefficients: Vec<BigRational>) -> Result<Self> {
        if coefficients.len() != space.complex_dimension() + 1 {
            return Err(Error::invalid("coefficient vector has the wrong length"));
        }
        Ok(WpsRingElement { coefficients })
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        WpsRingElement {
            coefficients: self.coefficients.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &WpsRingElement) -> Result<Self> {
        if self.coefficients.len() != other.coefficients.len() {
            return Err(Error::invalid("elements live over different spaces"));
        }
        Ok(WpsRingElement {
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

/// Bilinear extension of α_i·α_j = ⟨a⟩·α_{i+j}, truncated above degree 2n.
pub fn ring_multiply(
    u: &WpsRingElement,
    v: &WpsRingElement,
    space: &WpsSpace,
) -> Result<WpsRingElement> {
    let n = space.complex_dimension();
    if u.coefficients.len() != n + 1 || v.coefficients.len() != n + 1 {
        return Err(Error::invalid("elements do not match the given space"));
    }
    let product = space.weight_product();
    let mut out = WpsRingElement::zero(space);
    for (i, ci) in u.coefficients.iter().enumerate() {
        if ci.is_zero() {
            continue;
        }
        for (j, cj) in v.coefficients.iter().enumerate() {
            if cj.is_zero() || i + j > n {
                continue;
            }
            out.coefficients[i + j] += ci * cj * &product;
        }
    }
    Ok(out)
}

/// Coefficient of α_n, i.e. ⟨u, [CP^n(a)]⟩ with ⟨α_n, [CP^n(a)]⟩ = 1.
pub fn top_pairing(u: &WpsRingElement, space: &WpsSpace) -> BigRational {
    u.coefficients[space.complex_dimension()].clone()
}

/// [Ω_{a,r}] = (r/⟨a⟩)·α_1.
pub fn fubini_study_class(space: &WpsSpace, r: &BigRational) -> WpsRingElement {
    let mut el = WpsRingElement::zero(space);
    el.coefficients[1] = r / space.weight_product();
    el
}

/// ∫ Ω_{a,r}^n in units of Vol_{2n} (the Euclidean unit-ball volume in
/// dimension 2n): r^n/⟨a⟩. This is the convention recorded from the
/// symplectic-reduction picture; the Monte Carlo oracle in `volume` is the
/// arbiter whenever a normalization question arises.
pub fn fubini_study_top_integral(space: &WpsSpace, r: &BigRational) -> BigRational {
    let mut rn = BigRational::one();
    for _ in 0..space.complex_dimension() {
        rn *= r;
    }
    rn / space.weight_product()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularPoint {
    /// Coordinate point [0:…:1:…:0] with the 1 in this slot.
    pub coordinate_index: usize,
    pub stabilizer_order: num_bigint::BigUint,
}

/// The coordinate points with nontrivial cyclic stabilizer; empty iff all
/// weights are 1 (the smooth CP^n).
pub fn singular_locus(space: &WpsSpace) -> Vec<SingularPoint> {
    space
        .weights()
        .entries()
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.is_one())
        .map(|(i, a)| SingularPoint {
            coordinate_index: i,
            stabilizer_order: a.clone(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(weights: &[u64]) -> WpsSpace {
        WpsSpace::new(CoprimeVector::from_u64(weights).unwrap()).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn multiply_unweighted() {
        let s = space(&[1, 1, 1]);
        let a1 = WpsRingElement::generator(&s, 1).unwrap();
        let sq = ring_multiply(&a1, &a1, &s).unwrap();
        assert_eq!(sq, WpsRingElement::generator(&s, 2).unwrap());
    }

    #[test]
    fn multiply_weighted() {
        let s = space(&[1, 2, 3]);
        let a1 = WpsRingElement::generator(&s, 1).unwrap();
        let sq = ring_multiply(&a1, &a1, &s).unwrap();
        let expected = WpsRingElement::generator(&s, 2).unwrap().scale(&rat(6, 1));
        assert_eq!(sq, expected);
    }

    #[test]
    fn degree_overflow_is_zero() {
        let s = space(&[1, 2, 3]);
        let a1 = WpsRingElement::generator(&s, 1).unwrap();
        let an = WpsRingElement::generator(&s, 2).unwrap();
        let product = ring_multiply(&a1, &an, &s).unwrap();
        assert_eq!(product, WpsRingElement::zero(&s));
    }

    #[test]
    fn top_pairing_examples() {
        // weights (1,1,1): α_1² pairs to 1
        let s = space(&[1, 1, 1]);
        let a1 = WpsRingElement::generator(&s, 1).unwrap();
        let sq = ring_multiply(&a1, &a1, &s).unwrap();
        assert_eq!(top_pairing(&sq, &s), rat(1, 1));

        // weights (1,2,3): α_1² pairs to ⟨a⟩ = 6
        let s = space(&[1, 2, 3]);
        let a1 = WpsRingElement::generator(&s, 1).unwrap();
        let sq = ring_multiply(&a1, &a1, &s).unwrap();
        assert_eq!(top_pairing(&sq, &s), rat(6, 1));

        // weights (1,2,3,5): α_1³ pairs to ⟨a⟩² = 900
        let s = space(&[1, 2, 3, 5]);
        let a1 = WpsRingElement::generator(&s, 1).unwrap();
        let cube = ring_multiply(&ring_multiply(&a1, &a1, &s).unwrap(), &a1, &s).unwrap();
        assert_eq!(top_pairing(&cube, &s), rat(900, 1));
        assert_eq!(s.alpha1_top_pairing(), rat(900, 1));
    }

    #[test]
    fn fubini_study_examples() {
        let s = space(&[1, 1]);
        assert_eq!(
            fubini_study_class(&s, &rat(1, 1)).coefficients()[1],
            rat(1, 1)
        );
        let s = space(&[1, 2, 3]);
        assert_eq!(
            fubini_study_class(&s, &rat(1, 1)).coefficients()[1],
            rat(1, 6)
        );
        assert_eq!(
            fubini_study_class(&s, &rat(6, 1)).coefficients()[1],
            rat(1, 1)
        );
    }

    #[test]
    fn fubini_study_scaling_linearity() {
        let s = space(&[2, 3, 5]);
        let r = rat(7, 3);
        let scaled = fubini_study_class(&s, &rat(1, 1)).scale(&r);
        assert_eq!(fubini_study_class(&s, &r), scaled);
    }

    #[test]
    fn singular_locus_examples() {
        assert!(singular_locus(&space(&[1, 1, 1])).is_empty());

        let pts = singular_locus(&space(&[1, 2, 3]));
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].coordinate_index, 1);
        assert_eq!(pts[0].stabilizer_order, 2u32.into());
        assert_eq!(pts[1].stabilizer_order, 3u32.into());

        let pts = singular_locus(&space(&[1, 1, 5]));
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].coordinate_index, 2);
        assert_eq!(pts[0].stabilizer_order, 5u32.into());
    }

    #[test]
    fn associativity_on_basis_triples() {
        let s = space(&[1, 2, 3, 5, 7]);
        let n = s.complex_dimension();
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    let ai = WpsRingElement::generator(&s, i).unwrap();
                    let aj = WpsRingElement::generator(&s, j).unwrap();
                    let ak = WpsRingElement::generator(&s, k).unwrap();
                    let left =
                        ring_multiply(&ring_multiply(&ai, &aj, &s).unwrap(), &ak, &s).unwrap();
                    let right =
                        ring_multiply(&ai, &ring_multiply(&aj, &ak, &s).unwrap(), &s).unwrap();
                    assert_eq!(left, right, "({},{},{})", i, j, k);
                }
            }
        }
    }

    #[test]
    fn commutativity_random_elements() {
        let s = space(&[1, 3, 4, 5]);
        let u = WpsRingElement::from_coefficients(
            &s,
            vec![rat(1, 2), rat(-3, 7), rat(0, 1), rat(5, 1)],
        )
        .unwrap();
        let v = WpsRingElement::from_coefficients(
            &s,
            vec![rat(2, 9), rat(4, 1), rat(-1, 3), rat(0, 1)],
        )
        .unwrap();
        assert_eq!(
            ring_multiply(&u, &v, &s).unwrap(),
            ring_multiply(&v, &u, &s).unwrap()
        );
    }

    #[test]
    fn mismatched_space_is_an_error() {
        let s2 = space(&[1, 1, 1]);
        let s3 = space(&[1, 1, 1, 1]);
        let u = WpsRingElement::generator(&s3, 1).unwrap();
        let v = WpsRingElement::generator(&s2, 1).unwrap();
        assert!(ring_multiply(&u, &v, &s2).is_err());
    }
}
