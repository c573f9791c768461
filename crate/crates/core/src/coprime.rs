//! Integer arithmetic on weight vectors and the prime-approximation search.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Ordered tuple of positive, pairwise coprime integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoprimeVector {
    entries: Vec<BigUint>,
}

impl CoprimeVector {
    pub fn new(entries: Vec<BigUint>) -> Result<Self> {
        if !is_pairwise_coprime(&entries)? {
            return Err(Error::invalid("entries are not pairwise coprime"));
        }
        Ok(CoprimeVector { entries })
    }

    pub fn from_u64(entries: &[u64]) -> Result<Self> {
        Self::new(entries.iter().map(|&v| BigUint::from(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.entries
    }

    /// The product of the entries, written ⟨a⟩ throughout.
    pub fn weight_product(&self) -> BigUint {
        self.entries.iter().product()
    }
}

/// True iff every pair of entries has gcd 1. Errors on an empty list or a
/// non-positive entry.
pub fn is_pairwise_coprime(entries: &[BigUint]) -> Result<bool> {
    if entries.is_empty() {
        return Err(Error::invalid("empty weight vector"));
    }
    if entries.iter().any(|e| e.is_zero()) {
        return Err(Error::invalid("weights must be positive integers"));
    }
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            if !entries[i].gcd(&entries[j]).is_one() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality test.
///
/// Trial division by small primes, then Miller-Rabin with the 12-base set
/// that is proven deterministic below 3.3·10^24. Inputs above that bound
/// are a resource-limit error rather than a probabilistic answer.
pub fn is_prime(n: &BigUint) -> Result<bool> {
    if n < &BigUint::from(2u32) {
        return Ok(false);
    }
    for &p in SMALL_PRIMES.iter() {
        let bp = BigUint::from(p);
        if n == &bp {
            return Ok(true);
        }
        if (n % bp).is_zero() {
            return Ok(false);
        }
    }
    // 3_317_044_064_679_887_385_961_981 is the first composite that fools
    // the 12-base set; stay strictly below it.
    let bound: BigUint = "3317044064679887385961981".parse().unwrap();
    if n >= &bound {
        return Err(Error::ResourceLimit(format!(
            "deterministic primality check not available for {} (>= 3.3e24)",
            n
        )));
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'bases: for &b in SMALL_PRIMES.iter() {
        let base = BigUint::from(b);
        let mut x = base.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'bases;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// Smallest prime p with lo < p < hi, if any.
pub fn prime_in_interval(lo: &BigUint, hi: &BigUint) -> Result<Option<BigUint>> {
    if lo >= hi {
        return Err(Error::invalid("prime_in_interval requires lo < hi"));
    }
    let mut candidate = lo + BigUint::one();
    while &candidate < hi {
        if is_prime(&candidate)? {
            return Ok(Some(candidate));
        }
        candidate += BigUint::one();
    }
    Ok(None)
}

/// A vector of pairwise-distinct primes and a common denominator N such
/// that p_i/N approximates the input within the requested tolerance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeApproximation {
    pub denominator: BigUint,
    pub primes: Vec<BigUint>,
    /// max_i |primes[i]/N − x_i|, computed in f64.
    pub max_error_bits: u64,
}

impl PrimeApproximation {
    pub fn max_error(&self) -> f64 {
        f64::from_bits(self.max_error_bits)
    }
}

const DEFAULT_DENOMINATOR_CAP: u64 = 50_000_000;

/// Approximates a positive real vector by p/N with p_i pairwise-distinct
/// primes and max_i |p_i/N − x_i| ≤ epsilon.
///
/// Search order is fixed: N increases from 1; for each N the primes are
/// assigned greedily per index, smallest admissible unused prime first.
/// This yields the smallest valid N and, for that N, the lexicographically
/// smallest prime tuple the greedy order can produce, so identical inputs
/// always give identical outputs.
pub fn approximate_by_primes(x: &[f64], epsilon: f64) -> Result<PrimeApproximation> {
    approximate_by_primes_capped(x, epsilon, DEFAULT_DENOMINATOR_CAP)
}

pub fn approximate_by_primes_capped(
    x: &[f64],
    epsilon: f64,
    denominator_cap: u64,
) -> Result<PrimeApproximation> {
    if x.is_empty() {
        return Err(Error::invalid("empty input vector"));
    }
    if x.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid("all coordinates must be positive and finite"));
    }
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }

    let mut sieve = PrimeSieve::new();
    for n_u in 1..=denominator_cap {
        let n = n_u as f64;
        if let Some(primes) = assign_primes(x, epsilon, n, &mut sieve) {
            let max_error = primes
                .iter()
                .zip(x)
                .map(|(&p, &xi)| (p as f64 / n - xi).abs())
                .fold(0.0f64, f64::max);
            return Ok(PrimeApproximation {
                denominator: BigUint::from(n_u),
                primes: primes.into_iter().map(BigUint::from).collect(),
                max_error_bits: max_error.to_bits(),
            });
        }
    }
    Err(Error::ResourceLimit(format!(
        "no valid prime approximation found for denominators N <= {}",
        denominator_cap
    )))
}

fn assign_primes(x: &[f64], epsilon: f64, n: f64, sieve: &mut PrimeSieve) -> Option<Vec<u64>> {
    let mut chosen: Vec<u64> = Vec::with_capacity(x.len());
    for &xi in x {
        let lo = ((xi - epsilon) * n).ceil().max(2.0) as u64;
        let hi = ((xi + epsilon) * n).floor() as u64;
        if hi < lo {
            return None;
        }
        let mut found = None;
        for p in sieve.primes_in(lo, hi) {
            // Re-check the error bound in f64; the integer window above can
            // be off by one ulp at the boundary.
            if (p as f64 / n - xi).abs() > epsilon {
                continue;
            }
            if chosen.contains(&p) {
                continue;
            }
            found = Some(p);
            break;
        }
        chosen.push(found?);
    }
    Some(chosen)
}

/// Growing Eratosthenes sieve with binary-search window queries; beyond the
/// memory cap it degrades to per-candidate deterministic Miller-Rabin.
struct PrimeSieve {
    limit: u64,
    primes: Vec<u64>,
}

/// Largest bound the sieve materializes; windows above it are scanned with
/// `is_prime_u64` instead.
const SIEVE_LIMIT_CAP: u64 = 1 << 24;

impl PrimeSieve {
    fn new() -> Self {
        PrimeSieve {
            limit: 0,
            primes: Vec::new(),
        }
    }

    fn grow_to(&mut self, bound: u64) {
        let mut new_limit = self.limit.max(1 << 16);
        while new_limit < bound {
            new_limit *= 2;
        }
        let mut composite = vec![false; (new_limit + 1) as usize];
        self.primes.clear();
        for p in 2..=new_limit {
            if !composite[p as usize] {
                self.primes.push(p);
                let mut q = p * p;
                while q <= new_limit {
                    composite[q as usize] = true;
                    q += p;
                }
            }
        }
        self.limit = new_limit;
    }

    /// Primes in [lo, hi], ascending.
    fn primes_in(&mut self, lo: u64, hi: u64) -> Vec<u64> {
        if hi <= SIEVE_LIMIT_CAP {
            if hi > self.limit {
                self.grow_to(hi);
            }
            let start = self.primes.partition_point(|&p| p < lo);
            let end = self.primes.partition_point(|&p| p <= hi);
            self.primes[start..end].to_vec()
        } else {
            (lo..=hi).filter(|&p| is_prime_u64(p)).collect()
        }
    }
}

/// Deterministic Miller-Rabin over u128 arithmetic; the 12-base set covers
/// the whole u64 range.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in SMALL_PRIMES.iter() {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'bases: for &b in SMALL_PRIMES.iter() {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}
