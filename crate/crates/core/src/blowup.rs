//! Cohomology model of the weighted blow-up at k points and the
//! Kähler-cone criterion.
//!
//! The model keeps only what the criterion consumes: the top power
//! V = ⟨[ω]^n, [M]⟩ of the base class, and for the blow-up class
//! s·Π*[ω] − Σ c_i e_i the relations (Π*[ω])∪e_i = 0, e_i∪e_j = 0 for
//! i ≠ j, and e_i^n = ∓⟨a_i⟩^{n−1} (−1 for even n, +1 for odd n).

use crate::coprime::CoprimeVector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assumption {
    CampanaSimple,
    ApproximableByCampanaSimple,
    Kahler,
}

impl Assumption {
    pub fn as_str(&self) -> &'static str {
        match self {
            Assumption::CampanaSimple => "campana_simple",
            Assumption::ApproximableByCampanaSimple => "approximable_by_campana_simple",
            Assumption::Kahler => "kahler",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "campana_simple" => Ok(Assumption::CampanaSimple),
            "approximable_by_campana_simple" => Ok(Assumption::ApproximableByCampanaSimple),
            "kahler" => Ok(Assumption::Kahler),
            other => Err(Error::invalid(format!("unknown assumption flag: {other}"))),
        }
    }
}

/// The base manifold, reduced to the data the criterion needs.
#[derive(Clone, Debug)]
pub struct ManifoldModel {
    complex_dimension: usize,
    /// V = ⟨[ω]^n, [M]⟩.
    top_power: Scalar,
    assumptions: BTreeSet<Assumption>,
}

impl ManifoldModel {
    pub fn new(
        complex_dimension: usize,
        top_power: Scalar,
        assumptions: BTreeSet<Assumption>,
    ) -> Result<Self> {
        if complex_dimension < 2 {
            return Err(Error::invalid("complex dimension must be at least 2"));
        }
        if !top_power.is_positive() {
            return Err(Error::invalid("top power V must be positive"));
        }
        Ok(ManifoldModel {
            complex_dimension,
            top_power,
            assumptions,
        })
    }

    pub fn complex_dimension(&self) -> usize {
        self.complex_dimension
    }

    pub fn top_power(&self) -> &Scalar {
        &self.top_power
    }

    pub fn assumptions(&self) -> &BTreeSet<Assumption> {
        &self.assumptions
    }

    pub fn has(&self, a: Assumption) -> bool {
        self.assumptions.contains(&a)
    }
}

#[derive(Clone, Debug)]
pub struct ExceptionalTerm {
    pub weights: CoprimeVector,
    pub coefficient: Scalar,
}

/// s·Π*[ω] − Σ c_i e_i.
#[derive(Clone, Debug)]
pub struct BlowupClass {
    base_scale: Scalar,
    exceptional: Vec<ExceptionalTerm>,
}

impl BlowupClass {
    pub fn new(base_scale: Scalar, exceptional: Vec<ExceptionalTerm>) -> Self {
        BlowupClass {
            base_scale,
            exceptional,
        }
    }

    pub fn base_scale(&self) -> &Scalar {
        &self.base_scale
    }

    pub fn exceptional(&self) -> &[ExceptionalTerm] {
        &self.exceptional
    }

    /// Scales s and every c_i by λ.
    pub fn scale(&self, factor: &Scalar) -> BlowupClass {
        BlowupClass {
            base_scale: self.base_scale.mul(factor),
            exceptional: self
                .exceptional
                .iter()
                .map(|t| ExceptionalTerm {
                    weights: t.weights.clone(),
                    coefficient: t.coefficient.mul(factor),
                })
                .collect(),
        }
    }
}

/// The class of the symplectic cut: s = 1 and c_i = r_i/⟨a_i⟩.
pub fn packing_class(
    m: &ManifoldModel,
    ellipsoids: &[(CoprimeVector, Scalar)],
) -> Result<BlowupClass> {
    let n = m.complex_dimension();
    let mut exceptional = Vec::with_capacity(ellipsoids.len());
    for (weights, r) in ellipsoids {
        if weights.len() != n {
            return Err(Error::invalid(format!(
                "weight vector has length {}, expected the complex dimension {}",
                weights.len(),
                n
            )));
        }
        if !r.is_positive() {
            return Err(Error::invalid("capacity r must be positive"));
        }
        let product = Scalar::from_biguint(&weights.weight_product());
        exceptional.push(ExceptionalTerm {
            weights: weights.clone(),
            coefficient: r.div(&product),
        });
    }
    Ok(BlowupClass::new(Scalar::from_int(1), exceptional))
}

/// ⟨(s·Π*[ω] − Σ c_i e_i)^n, [M̃]⟩.
///
/// All mixed terms vanish, so the expansion reduces to
/// s^n·V + Σ (−c_i)^n·(e_i^n value). With e_i^n = −⟨a_i⟩^{n−1} for even n
/// and +⟨a_i⟩^{n−1} for odd n, the net contribution of each term is
/// −c_i^n·⟨a_i⟩^{n−1} for every parity.
pub fn top_intersection(cls: &BlowupClass, m: &ManifoldModel) -> Result<Scalar> {
    let n = m.complex_dimension();
    let n_u32 = n as u32;
    let mut total = cls.base_scale().powu(n_u32).mul(m.top_power());
    for term in cls.exceptional() {
        if term.weights.len() != n {
            return Err(Error::invalid(
                "exceptional weight vector does not match the manifold dimension",
            ));
        }
        let product_pow = Scalar::from_biguint(&term.weights.weight_product()).powu(n_u32 - 1);
        let e_self = if n % 2 == 0 {
            product_pow.neg()
        } else {
            product_pow
        };
        let minus_c_pow = term.coefficient.neg().powu(n_u32);
        total = total.add(&minus_c_pow.mul(&e_self));
    }
    Ok(total)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CriterionReport {
    /// (B1): all c_i > 0.
    pub b1_holds: bool,
    /// (B2): the top intersection of the class.
    #[serde(skip)]
    pub b2_value: Scalar,
    /// Verdict of the criterion; true only when B1 and B2 hold and the
    /// required assumption flags are present.
    pub kahler: bool,
    /// Flags that justified the verdict.
    pub assumption_trace: Vec<Assumption>,
    /// Flags that would be needed but were absent; nonempty forces
    /// kahler = false and an UNKNOWN verdict upstream.
    pub missing_assumptions: Vec<Assumption>,
}

/// Evaluates (B1) and (B2) of the blow-up Kähler-cone criterion.
///
/// The criterion assumes the base class is Kähler and that the blow-up
/// points are Campana-generic; those hypotheses enter as declared flags on
/// the manifold model, not as computations. Missing flags are reported, and
/// `kahler` is never true without them.
pub fn kahler_criterion(cls: &BlowupClass, m: &ManifoldModel) -> Result<CriterionReport> {
    let b1_holds = cls.exceptional().iter().all(|t| t.coefficient.is_positive());
    let b2_value = top_intersection(cls, m)?;

    let mut assumption_trace = Vec::new();
    let mut missing = Vec::new();
    if m.has(Assumption::CampanaSimple) {
        assumption_trace.push(Assumption::CampanaSimple);
    } else if m.has(Assumption::ApproximableByCampanaSimple) {
        assumption_trace.push(Assumption::ApproximableByCampanaSimple);
    } else {
        missing.push(Assumption::CampanaSimple);
    }
    if m.has(Assumption::Kahler) {
        assumption_trace.push(Assumption::Kahler);
    } else {
        missing.push(Assumption::Kahler);
    }

    let kahler = b1_holds && b2_value.is_positive() && missing.is_empty();
    Ok(CriterionReport {
        b1_holds,
        b2_value,
        kahler,
        assumption_trace,
        missing_assumptions: missing,
    })
}
