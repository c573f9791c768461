//! End-to-end packing decision procedure: enclose each ellipsoid in a
//! simple one, compare the volume ledger against the manifold volume,
//! evaluate the blow-up criterion, and emit a certificate.

use crate::blowup::{
    kahler_criterion, packing_class, Assumption, BlowupClass, CriterionReport, ManifoldModel,
};
use crate::coprime::{approximate_by_primes, CoprimeVector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::volume::{ellipsoid_volume_closed_form, Convention, Ellipsoid};
use num_bigint::BigUint;
use num_traits::One;

/// How many times the enclosure tolerance is halved before giving up when
/// enclosure inflation pushes the ledger over the manifold volume.
pub const ENCLOSURE_RETRY_BUDGET: u32 = 20;

#[derive(Clone, Debug)]
pub struct SimpleEnclosure {
    /// The enclosing simple ellipsoid: integer pairwise-coprime weights.
    pub ellipsoid: Ellipsoid,
    pub weights: CoprimeVector,
    /// Denominator N of the prime approximation (1 for already-simple input).
    pub denominator: BigUint,
    /// volume(enclosure)/volume(original), ≥ 1.
    pub inflation: f64,
}

/// Smallest simple ellipsoid containing `e`, with relative volume
/// inflation at most (1+epsilon)^n.
///
/// The weight vector is approximated by p/N with pairwise-distinct primes;
/// the enclosing set E_{p/N}(r·max_i p_i/(N·a_i)) is then presented with
/// integer weights p and capacity r·max_i(p_i/a_i). Containment holds for
/// any approximation quality because the capacity is scaled by the worst
/// weight ratio; the tolerance only controls inflation.
pub fn simple_enclosure(e: &Ellipsoid, epsilon: f64) -> Result<SimpleEnclosure> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if let Some(weights) = e.simple_weights() {
        return Ok(SimpleEnclosure {
            ellipsoid: e.clone(),
            weights,
            denominator: BigUint::one(),
            inflation: 1.0,
        });
    }

    let a: Vec<f64> = e.weights().iter().map(|w| w.to_f64()).collect();
    let a_min = a.iter().cloned().fold(f64::INFINITY, f64::min);
    let n = e.complex_dimension();
    let inflation_bound = (1.0 + epsilon).powi(n as i32);

    // (1+t)/(1−t) ≤ 1+ε for t = ε/(2+ε); start there and halve on demand.
    let mut tol = a_min * epsilon / (2.0 + epsilon);
    for _ in 0..40 {
        let approx = approximate_by_primes(&a, tol)?;
        let weights = CoprimeVector::new(approx.primes.clone())
            .expect("distinct primes are pairwise coprime");

        // capacity' = r · max_i p_i/a_i, exact when the inputs are exact.
        let mut max_ratio: Option<Scalar> = None;
        for (p, w) in approx.primes.iter().zip(e.weights()) {
            let ratio = Scalar::from_biguint(p).div(w);
            max_ratio = Some(match max_ratio {
                Some(m) if m >= ratio => m,
                _ => ratio,
            });
        }
        let capacity = e.capacity().mul(&max_ratio.unwrap());
        let enclosure = Ellipsoid::simple(&weights, capacity)?;

        let vol_enclosure = ellipsoid_volume_closed_form(&enclosure, Convention::TopPower);
        let vol_original = ellipsoid_volume_closed_form(e, Convention::TopPower);
        let inflation = vol_enclosure.to_f64() / vol_original.to_f64();
        if inflation <= inflation_bound {
            return Ok(SimpleEnclosure {
                ellipsoid: enclosure,
                weights,
                denominator: approx.denominator,
                inflation,
            });
        }
        tol /= 2.0;
    }
    Err(Error::ResourceLimit(format!(
        "could not reach inflation bound (1+{})^{} after 40 tolerance halvings",
        epsilon, n
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Verdict {
    #[serde(rename = "FEASIBLE")]
    Feasible,
    #[serde(rename = "INFEASIBLE_VOLUME")]
    InfeasibleVolume,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

#[derive(Clone, Debug)]
pub struct VolumeLedger {
    /// Total TOP_POWER volume of the simple enclosures.
    pub total_packing_volume: Scalar,
    /// Total TOP_POWER volume of the original ellipsoids.
    pub total_original_volume: Scalar,
    /// V = ⟨[ω]^n, [M]⟩.
    pub manifold_volume: Scalar,
    /// V − total enclosure volume.
    pub slack: Scalar,
}

#[derive(Clone, Debug)]
pub struct PackingCertificate {
    pub verdict: Verdict,
    pub manifold: ManifoldModel,
    pub original_ellipsoids: Vec<Ellipsoid>,
    pub simple_approximations: Vec<SimpleEnclosure>,
    pub volume_ledger: VolumeLedger,
    pub blowup_class: BlowupClass,
    pub criterion: CriterionReport,
    pub assumptions_used: Vec<Assumption>,
    pub notes: Vec<String>,
    pub epsilon: f64,
    pub seed: u64,
}

const VOLUME_CONVENTION_NOTE: &str = "volume convention: TOP_POWER (r^n/<a>), fixed by the \
blow-up relation algebra and confirmed by the Monte Carlo oracle; the printed r^n/<a>^n and \
r^2n/<a>^n variants fail the intersection identity";

/// The decision procedure.
///
/// 1. Replace each non-simple ellipsoid by a simple enclosure.
/// 2. Compare the TOP_POWER volume ledger against V; retry with smaller
///    tolerance when only the enclosures overflow.
/// 3. Build the blow-up class with c_i = r'_i/⟨a_i⟩ and evaluate the
///    Kähler criterion.
/// 4. FEASIBLE requires the criterion verdict plus the declared
///    assumption flags; otherwise UNKNOWN, never a silent false.
pub fn check_packing(
    m: &ManifoldModel,
    ellipsoids: &[Ellipsoid],
    epsilon: f64,
    seed: u64,
) -> Result<PackingCertificate> {
    if ellipsoids.is_empty() {
        return Err(Error::invalid("no ellipsoids given"));
    }
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let n = m.complex_dimension();
    for e in ellipsoids {
        if e.complex_dimension() != n {
            return Err(Error::invalid(format!(
                "ellipsoid dimension {} does not match manifold dimension {}",
                e.complex_dimension(),
                n
            )));
        }
    }

    let v = m.top_power().clone();
    let mut total_original = Scalar::zero();
    for e in ellipsoids {
        total_original = total_original.add(&ellipsoid_volume_closed_form(e, Convention::TopPower));
    }
    let original_overflow = !(total_original < v);

    let mut notes = vec![VOLUME_CONVENTION_NOTE.to_string()];

    // Enclosure pass with retry on enclosure-induced overflow.
    let mut eps_k = epsilon;
    let mut chosen: Option<(Vec<SimpleEnclosure>, Scalar)> = None;
    let mut retries_used = 0u32;
    for k in 0..=ENCLOSURE_RETRY_BUDGET {
        let enclosures: Vec<SimpleEnclosure> = ellipsoids
            .iter()
            .map(|e| simple_enclosure(e, eps_k))
            .collect::<Result<_>>()?;
        let mut total = Scalar::zero();
        for enc in &enclosures {
            total =
                total.add(&ellipsoid_volume_closed_form(&enc.ellipsoid, Convention::TopPower));
        }
        if total < v || original_overflow || k == ENCLOSURE_RETRY_BUDGET {
            retries_used = k;
            chosen = Some((enclosures, total));
            break;
        }
        eps_k /= 2.0;
    }
    let (enclosures, total_enclosure) = chosen.expect("loop always selects an enclosure set");
    if retries_used > 0 {
        notes.push(format!(
            "enclosure tolerance halved {} time(s) to fit the volume ledger",
            retries_used
        ));
    }

    let class_input: Vec<(CoprimeVector, Scalar)> = enclosures
        .iter()
        .map(|enc| (enc.weights.clone(), enc.ellipsoid.capacity().clone()))
        .collect();
    let blowup_class = packing_class(m, &class_input)?;
    let criterion = kahler_criterion(&blowup_class, m)?;

    let slack = v.sub(&total_enclosure);
    let enclosure_overflow = !slack.is_positive();

    let verdict = if original_overflow {
        Verdict::InfeasibleVolume
    } else if enclosure_overflow {
        notes.push(format!(
            "enclosure volume still exceeds V after {} retries; refine epsilon below {}",
            ENCLOSURE_RETRY_BUDGET, eps_k
        ));
        Verdict::Unknown
    } else if criterion.kahler {
        Verdict::Feasible
    } else {
        if !criterion.missing_assumptions.is_empty() {
            notes.push(format!(
                "missing assumption flags: {}",
                criterion
                    .missing_assumptions
                    .iter()
                    .map(|a| a.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
        Verdict::Unknown
    };

    Ok(PackingCertificate {
        verdict,
        manifold: m.clone(),
        original_ellipsoids: ellipsoids.to_vec(),
        simple_approximations: enclosures,
        volume_ledger: VolumeLedger {
            total_packing_volume: total_enclosure,
            total_original_volume: total_original,
            manifold_volume: v,
            slack,
        },
        blowup_class,
        criterion: criterion.clone(),
        assumptions_used: criterion.assumption_trace,
        notes,
        epsilon,
        seed,
    })
}

pub const CERTIFICATE_SCHEMA_VERSION: u32 = 1;
pub const DECIMAL_PRECISION: usize = 12;

impl PackingCertificate {
    /// Canonical JSON: sorted keys, fixed decimal precision, exact
    /// numerator/denominator pairs alongside decimals. Byte-identical for
    /// identical inputs.
    pub fn to_canonical_json(&self) -> String {
        let p = DECIMAL_PRECISION;
        let scalar = |s: &Scalar| s.to_json(p);
        let weights_json = |ws: &[Scalar]| {
            serde_json::Value::Array(ws.iter().map(scalar).collect())
        };

        let mut root = serde_json::Map::new();
        root.insert("schema_version".into(), CERTIFICATE_SCHEMA_VERSION.into());
        root.insert(
            "format".into(),
            serde_json::json!({ "decimal_precision": p }),
        );
        root.insert(
            "verdict".into(),
            serde_json::to_value(self.verdict).unwrap(),
        );
        root.insert(
            "manifold".into(),
            serde_json::json!({
                "n": self.manifold.complex_dimension(),
                "V": scalar(self.manifold.top_power()),
                "flags": self
                    .manifold
                    .assumptions()
                    .iter()
                    .map(|a| a.as_str())
                    .collect::<Vec<_>>(),
            }),
        );
        root.insert(
            "original_ellipsoids".into(),
            serde_json::Value::Array(
                self.original_ellipsoids
                    .iter()
                    .map(|e| {
                        serde_json::json!({
                            "weights": weights_json(e.weights()),
                            "r": scalar(e.capacity()),
                        })
                    })
                    .collect(),
            ),
        );
        root.insert(
            "simple_approximations".into(),
            serde_json::Value::Array(
                self.simple_approximations
                    .iter()
                    .map(|enc| {
                        serde_json::json!({
                            "weights": enc
                                .weights
                                .entries()
                                .iter()
                                .map(|w| w.to_string())
                                .collect::<Vec<_>>(),
                            "r": scalar(enc.ellipsoid.capacity()),
                            "denominator": enc.denominator.to_string(),
                            "inflation": crate::scalar::format_decimal(enc.inflation, p),
                        })
                    })
                    .collect(),
            ),
        );
        root.insert(
            "volume_ledger".into(),
            serde_json::json!({
                "total_packing_volume": scalar(&self.volume_ledger.total_packing_volume),
                "total_original_volume": scalar(&self.volume_ledger.total_original_volume),
                "manifold_volume": scalar(&self.volume_ledger.manifold_volume),
                "slack": scalar(&self.volume_ledger.slack),
                "convention": "TOP_POWER",
            }),
        );
        root.insert(
            "blowup_class".into(),
            serde_json::json!({
                "base_scale": scalar(self.blowup_class.base_scale()),
                "exceptional": self
                    .blowup_class
                    .exceptional()
                    .iter()
                    .map(|t| {
                        serde_json::json!({
                            "weights": t
                                .weights
                                .entries()
                                .iter()
                                .map(|w| w.to_string())
                                .collect::<Vec<_>>(),
                            "coefficient": scalar(&t.coefficient),
                        })
                    })
                    .collect::<Vec<_>>(),
            }),
        );
        root.insert(
            "criterion".into(),
            serde_json::json!({
                "b1_holds": self.criterion.b1_holds,
                "b2_value": scalar(&self.criterion.b2_value),
                "kahler": self.criterion.kahler,
                "assumption_trace": self
                    .criterion
                    .assumption_trace
                    .iter()
                    .map(|a| a.as_str())
                    .collect::<Vec<_>>(),
                "missing_assumptions": self
                    .criterion
                    .missing_assumptions
                    .iter()
                    .map(|a| a.as_str())
                    .collect::<Vec<_>>(),
            }),
        );
        root.insert(
            "assumptions_used".into(),
            serde_json::Value::Array(
                self.assumptions_used
                    .iter()
                    .map(|a| serde_json::Value::String(a.as_str().into()))
                    .collect(),
            ),
        );
        root.insert(
            "notes".into(),
            serde_json::Value::Array(
                self.notes
                    .iter()
                    .map(|s| serde_json::Value::String(s.clone()))
                    .collect(),
            ),
        );
        root.insert(
            "epsilon".into(),
            serde_json::Value::String(crate::scalar::format_decimal(self.epsilon, p)),
        );
        root.insert("seed".into(), self.seed.into());

        // Route through Value: serde_json's map is a BTreeMap, so keys come
        // out sorted at every level.
        let value = serde_json::Value::Object(root);
        serde_json::to_string_pretty(&sort_keys(value)).expect("certificate serializes")
    }
}

fn sort_keys(v: serde_json::Value) -> serde_json::Value {
    match v {
        serde_json::Value::Object(map) => {
            let sorted: serde_json::Map<String, serde_json::Value> =
                map.into_iter().map(|(k, val)| (k, sort_keys(val))).collect();
            serde_json::Value::Object(sorted)
        }
        serde_json::Value::Array(items) => {
            serde_json::Value::Array(items.into_iter().map(sort_keys).collect())
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifold(n: usize, v: Scalar, flags: &[Assumption]) -> ManifoldModel {
        ManifoldModel::new(n, v, flags.iter().copied().collect()).unwrap()
    }

    fn full_flags() -> Vec<Assumption> {
        vec![Assumption::CampanaSimple, Assumption::Kahler]
    }

    fn simple(weights: &[u64], num: i64, den: i64) -> Ellipsoid {
        Ellipsoid::simple(
            &CoprimeVector::from_u64(weights).unwrap(),
            Scalar::from_ratio(num, den),
        )
        .unwrap()
    }

    #[test]
    fn enclosure_of_simple_ellipsoid_is_identity() {
        let e = simple(&[2, 3], 1, 1);
        let enc = simple_enclosure(&e, 0.5).unwrap();
        assert_eq!(enc.inflation, 1.0);
        assert_eq!(enc.denominator, BigUint::one());
        assert_eq!(&enc.ellipsoid, &e);
    }

    #[test]
    fn enclosure_of_half_integer_weights_is_exact() {
        // (1, 3/2) ~ (2,3)/2; the enclosing simple ellipsoid is the same
        // set, so inflation is exactly 1.
        let e = Ellipsoid::new(
            vec![Scalar::from_int(1), Scalar::from_ratio(3, 2)],
            Scalar::from_int(1),
        )
        .unwrap();
        let enc = simple_enclosure(&e, 0.01).unwrap();
        assert_eq!(enc.weights, CoprimeVector::from_u64(&[2, 3]).unwrap());
        assert_eq!(enc.denominator, BigUint::from(2u32));
        assert_eq!(enc.ellipsoid.capacity(), &Scalar::from_int(2));
        assert_eq!(enc.inflation, 1.0);
    }

    #[test]
    fn enclosure_of_irrational_weights_meets_inflation_bound() {
        let e = Ellipsoid::new(
            vec![Scalar::from_int(1), Scalar::from_f64(std::f64::consts::SQRT_2)],
            Scalar::from_int(1),
        )
        .unwrap();
        let eps = 1e-3;
        let enc = simple_enclosure(&e, eps).unwrap();
        assert!(enc.inflation <= (1.0 + eps).powi(2), "{}", enc.inflation);
        assert!(enc.inflation >= 1.0);
    }

    #[test]
    fn feasible_example() {
        let m = manifold(2, Scalar::from_int(2), &full_flags());
        let es = vec![simple(&[1, 2], 1, 1); 3];
        let cert = check_packing(&m, &es, 0.01, 0).unwrap();
        assert_eq!(cert.verdict, Verdict::Feasible);
        assert_eq!(
            cert.volume_ledger.total_packing_volume,
            Scalar::from_ratio(3, 2)
        );
        assert_eq!(cert.criterion.b2_value, Scalar::from_ratio(1, 2));
        assert!(cert.volume_ledger.slack.is_positive());
    }

    #[test]
    fn infeasible_volume_example() {
        let m = manifold(2, Scalar::from_int(2), &full_flags());
        let es = vec![simple(&[1, 2], 1, 1); 5];
        let cert = check_packing(&m, &es, 0.01, 0).unwrap();
        assert_eq!(cert.verdict, Verdict::InfeasibleVolume);
    }

    #[test]
    fn missing_flags_gives_unknown() {
        let m = manifold(2, Scalar::from_int(2), &[]);
        let es = vec![simple(&[1, 2], 1, 1); 3];
        let cert = check_packing(&m, &es, 0.01, 0).unwrap();
        assert_eq!(cert.verdict, Verdict::Unknown);
        assert!(!cert.criterion.missing_assumptions.is_empty());
    }

    #[test]
    fn feasible_implies_ledger_soundness() {
        let m = manifold(2, Scalar::from_int(2), &full_flags());
        let es = vec![simple(&[1, 2], 1, 1); 3];
        let cert = check_packing(&m, &es, 0.01, 0).unwrap();
        assert_eq!(cert.verdict, Verdict::Feasible);
        assert!(cert.volume_ledger.total_packing_volume < cert.volume_ledger.manifold_volume);
        assert!(cert
            .blowup_class
            .exceptional()
            .iter()
            .all(|t| t.coefficient.is_positive()));
    }

    #[test]
    fn adding_an_ellipsoid_never_rescues_infeasible_volume() {
        let m = manifold(2, Scalar::from_int(2), &full_flags());
        let mut es = vec![simple(&[1, 2], 1, 1); 5];
        let cert = check_packing(&m, &es, 0.01, 0).unwrap();
        assert_eq!(cert.verdict, Verdict::InfeasibleVolume);
        es.push(simple(&[1, 1], 1, 2));
        let cert = check_packing(&m, &es, 0.01, 0).unwrap();
        assert_eq!(cert.verdict, Verdict::InfeasibleVolume);
    }

    #[test]
    fn criterion_volume_equivalence_exact_on_simple_inputs() {
        // On simple inputs, B2 > 0 iff total TOP_POWER volume < V, exactly.
        let cases: Vec<(i64, i64, Vec<Ellipsoid>)> = vec![
            (2, 1, vec![simple(&[1, 2], 1, 1); 3]),
            (2, 1, vec![simple(&[1, 2], 1, 1); 4]),
            (3, 2, vec![simple(&[2, 3], 1, 1), simple(&[1, 5], 2, 3)]),
            (7, 5, vec![simple(&[1, 1], 1, 1), simple(&[3, 4], 3, 2)]),
        ];
        for (vn, vd, es) in cases {
            let m = manifold(2, Scalar::from_ratio(vn, vd), &full_flags());
            let cert = check_packing(&m, &es, 0.01, 0).unwrap();
            let vol_lt_v =
                cert.volume_ledger.total_packing_volume < cert.volume_ledger.manifold_volume;
            assert_eq!(cert.criterion.b2_value.is_positive(), vol_lt_v);
        }
    }

    #[test]
    fn certificate_is_byte_identical_across_runs() {
        let m = manifold(2, Scalar::from_int(2), &full_flags());
        let es = vec![
            simple(&[1, 2], 1, 1),
            Ellipsoid::new(
                vec![Scalar::from_int(1), Scalar::from_f64(1.7)],
                Scalar::from_ratio(1, 2),
            )
            .unwrap(),
        ];
        let a = check_packing(&m, &es, 0.01, 99).unwrap().to_canonical_json();
        let b = check_packing(&m, &es, 0.01, 99).unwrap().to_canonical_json();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let m = manifold(2, Scalar::from_int(2), &full_flags());
        let es = vec![simple(&[1, 2, 3], 1, 1)];
        assert!(check_packing(&m, &es, 0.01, 0).is_err());
    }

    #[test]
    fn sampled_containment_in_enclosure() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let e = Ellipsoid::new(
            vec![Scalar::from_f64(1.3), Scalar::from_f64(2.9)],
            Scalar::from_f64(0.8),
        )
        .unwrap();
        let enc = simple_enclosure(&e, 1e-2).unwrap();
        let a: Vec<f64> = e.weights().iter().map(|w| w.to_f64()).collect();
        let p: Vec<f64> = enc.ellipsoid.weights().iter().map(|w| w.to_f64()).collect();
        let r = e.capacity().to_f64();
        let rp = enc.ellipsoid.capacity().to_f64();
        let pi = std::f64::consts::PI;
        for _ in 0..10_000 {
            // Rejection-sample a point of the original ellipsoid.
            let s: Vec<f64> = a.iter().map(|ai| (r / (pi * ai)).sqrt()).collect();
            let pt: Vec<f64> = loop {
                let cand: Vec<f64> = s
                    .iter()
                    .flat_map(|si| {
                        let x = rng.gen_range(-si..=*si);
                        let y = rng.gen_range(-si..=*si);
                        [x, y]
                    })
                    .collect();
                let h: f64 = a
                    .iter()
                    .enumerate()
                    .map(|(j, ai)| pi * ai * (cand[2 * j].powi(2) + cand[2 * j + 1].powi(2)))
                    .sum();
                if h <= r {
                    break cand;
                }
            };
            let hp: f64 = p
                .iter()
                .enumerate()
                .map(|(j, pj)| pi * pj * (pt[2 * j].powi(2) + pt[2 * j + 1].powi(2)))
                .sum();
            assert!(hp <= rp * (1.0 + 1e-12), "{} > {}", hp, rp);
        }
    }
}
