//! Supernatural numbers: formal products `∏ p^e` with `e ∈ ℕ ∪ {∞}`.
//!
//! Only finite prime support is representable. Every tower this crate can
//! describe is generated by finitely many descriptors, so only finitely
//! many primes ever occur.
//!
//! Text form: `2^inf*3^2*5`. Primes ascending, `^1` omitted, `1` for the
//! empty product.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::primes::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SupernaturalError {
    #[error("{0} is not prime")]
    NonPrimeBase(u64),
    #[error("malformed supernatural term `{0}`")]
    MalformedToken(String),
    #[error("prime {0} appears more than once")]
    DuplicatePrime(u64),
}

/// Exponent of a prime in a supernatural number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Exponent {
    Finite(u64),
    Infinite,
}

impl Exponent {
    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Exponent::Finite(e) => Some(e),
            Exponent::Infinite => None,
        }
    }
}

impl std::ops::Add for Exponent {
    type Output = Exponent;

    fn add(self, rhs: Exponent) -> Exponent {
        match (self, rhs) {
            (Exponent::Finite(a), Exponent::Finite(b)) => Exponent::Finite(a + b),
            _ => Exponent::Infinite,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SupernaturalNumber {
    support: BTreeMap<u64, Exponent>,
}

impl SupernaturalNumber {
    /// The empty product, 1.
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds from `(prime, exponent)` pairs, dropping zero exponents.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, SupernaturalError>
    where
        I: IntoIterator<Item = (u64, Exponent)>,
    {
        let mut support = BTreeMap::new();
        for (p, e) in pairs {
            if !is_prime(p) {
                return Err(SupernaturalError::NonPrimeBase(p));
            }
            if support.contains_key(&p) {
                return Err(SupernaturalError::DuplicatePrime(p));
            }
            if e != Exponent::Finite(0) {
                support.insert(p, e);
            }
        }
        Ok(Self { support })
    }

    /// The finite supernatural number equal to `n`.
    pub fn from_natural(n: u64) -> Self {
        assert!(n > 0, "supernatural numbers are positive");
        let support = crate::primes::factorize(n)
            .into_iter()
            .map(|(p, e)| (p, Exponent::Finite(u64::from(e))))
            .collect();
        Self { support }
    }

    /// `∏ p^∞` over the given primes.
    pub fn infinite_power_of<I: IntoIterator<Item = u64>>(primes: I) -> Self {
        let support = primes
            .into_iter()
            .inspect(|p| debug_assert!(is_prime(*p)))
            .map(|p| (p, Exponent::Infinite))
            .collect();
        Self { support }
    }

    /// Exponent of `p`; zero when `p` is outside the support.
    pub fn exponent(&self, p: u64) -> Exponent {
        self.support.get(&p).copied().unwrap_or(Exponent::Finite(0))
    }

    pub fn support(&self) -> impl Iterator<Item = (u64, Exponent)> + '_ {
        self.support.iter().map(|(&p, &e)| (p, e))
    }

    pub fn is_one(&self) -> bool {
        self.support.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.support.values().all(|e| !e.is_infinite())
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let mut support = self.support.clone();
        for (&p, &e) in &other.support {
            let entry = support.entry(p).or_insert(Exponent::Finite(0));
            *entry = *entry + e;
        }
        Self { support }
    }

    pub fn infinite_primes(&self) -> BTreeSet<u64> {
        self.support
            .iter()
            .filter(|(_, e)| e.is_infinite())
            .map(|(&p, _)| p)
            .collect()
    }

    /// Whether `n^∞` divides `self`, i.e. every prime of `n` has infinite
    /// exponent.
    pub fn infinitely_divisible_by(&self, n: u64) -> bool {
        crate::primes::prime_divisors(n)
            .into_iter()
            .all(|p| self.exponent(p).is_infinite())
    }
}

impl Mul for &SupernaturalNumber {
    type Output = SupernaturalNumber;

    fn mul(self, rhs: &SupernaturalNumber) -> SupernaturalNumber {
        self.multiply(rhs)
    }
}

impl Mul for SupernaturalNumber {
    type Output = SupernaturalNumber;

    fn mul(self, rhs: SupernaturalNumber) -> SupernaturalNumber {
        self.multiply(&rhs)
    }
}

/// Number of primes dividing both `s` and `t` infinitely often.
pub fn common_infinite_count(s: &SupernaturalNumber, t: &SupernaturalNumber) -> usize {
    common_infinite_primes(s, t).len()
}

pub fn common_infinite_primes(s: &SupernaturalNumber, t: &SupernaturalNumber) -> BTreeSet<u64> {
    s.infinite_primes()
        .intersection(&t.infinite_primes())
        .copied()
        .collect()
}

/// A positive rational in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PositiveRational {
    pub numer: BigUint,
    pub denom: BigUint,
}

impl PositiveRational {
    pub fn one() -> Self {
        Self {
            numer: BigUint::one(),
            denom: BigUint::one(),
        }
    }

    pub fn new(numer: u64, denom: u64) -> Self {
        assert!(numer > 0 && denom > 0);
        let g = num_integer::gcd(numer, denom);
        Self {
            numer: BigUint::from(numer / g),
            denom: BigUint::from(denom / g),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            numer: self.denom.clone(),
            denom: self.numer.clone(),
        }
    }
}

impl fmt::Display for PositiveRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer, self.denom)
    }
}

#[derive(Clone, Copy)]
enum Constraint {
    Free,
    Fixed(i128),
    Impossible,
}

fn exponent_constraint(target: Exponent, base: Exponent) -> Constraint {
    match (target, base) {
        (Exponent::Finite(a), Exponent::Finite(b)) => Constraint::Fixed(a as i128 - b as i128),
        (Exponent::Infinite, Exponent::Infinite) => Constraint::Free,
        _ => Constraint::Impossible,
    }
}

/// Finds the rational `r` with `s_phi = r·s_psi` and `t_phi = r⁻¹·t_psi`.
///
/// Each prime is treated independently: a finite/finite pair pins the
/// exponent of `r`, an infinite/infinite pair leaves it free, and a mixed
/// pair rules out every `r`. Free exponents are set to zero.
pub fn rational_pair_witness(
    s_phi: &SupernaturalNumber,
    t_phi: &SupernaturalNumber,
    s_psi: &SupernaturalNumber,
    t_psi: &SupernaturalNumber,
) -> Option<PositiveRational> {
    let primes: BTreeSet<u64> = [s_phi, t_phi, s_psi, t_psi]
        .iter()
        .flat_map(|x| x.support.keys().copied())
        .collect();

    let mut numer = BigUint::one();
    let mut denom = BigUint::one();
    for p in primes {
        let from_s = exponent_constraint(s_phi.exponent(p), s_psi.exponent(p));
        // t_phi = r⁻¹·t_psi  ⇔  e_r(p) = e_{t_psi}(p) - e_{t_phi}(p)
        let from_t = exponent_constraint(t_psi.exponent(p), t_phi.exponent(p));
        let e = match (from_s, from_t) {
            (Constraint::Impossible, _) | (_, Constraint::Impossible) => return None,
            (Constraint::Fixed(a), Constraint::Fixed(b)) if a != b => return None,
            (Constraint::Fixed(a), _) | (_, Constraint::Fixed(a)) => a,
            (Constraint::Free, Constraint::Free) => 0,
        };
        let power = num_traits::pow(BigUint::from(p), e.unsigned_abs() as usize);
        if e > 0 {
            numer *= power;
        } else if e < 0 {
            denom *= power;
        }
    }
    Some(PositiveRational { numer, denom })
}

impl fmt::Display for SupernaturalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.support.is_empty() {
            return f.write_str("1");
        }
        for (idx, (p, e)) in self.support.iter().enumerate() {
            if idx > 0 {
                f.write_str("*")?;
            }
            match e {
                Exponent::Infinite => write!(f, "{p}^inf")?,
                Exponent::Finite(1) => write!(f, "{p}")?,
                Exponent::Finite(e) => write!(f, "{p}^{e}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for SupernaturalNumber {
    type Err = SupernaturalError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        parse(text)
    }
}

/// Parses `term ("*" term)*` with `term = prime "^" (nat | "inf") | prime`.
/// The literal `1` denotes the empty product.
pub fn parse(text: &str) -> Result<SupernaturalNumber, SupernaturalError> {
    let text = text.trim();
    if text == "1" {
        return Ok(SupernaturalNumber::one());
    }
    let mut pairs = Vec::new();
    for token in text.split('*') {
        let token = token.trim();
        let malformed = || SupernaturalError::MalformedToken(token.to_string());
        let (base, exp) = match token.split_once('^') {
            Some((b, e)) => (b.trim(), Some(e.trim())),
            None => (token, None),
        };
        if base.is_empty() || !base.bytes().all(|c| c.is_ascii_digit()) {
            return Err(malformed());
        }
        let base: u64 = base.parse().map_err(|_| malformed())?;
        let exp = match exp {
            None => Exponent::Finite(1),
            Some("inf") => Exponent::Infinite,
            Some(e) if !e.is_empty() && e.bytes().all(|c| c.is_ascii_digit()) => {
                Exponent::Finite(e.parse().map_err(|_| malformed())?)
            }
            Some(_) => return Err(malformed()),
        };
        pairs.push((base, exp));
    }
    SupernaturalNumber::from_pairs(pairs)
}
