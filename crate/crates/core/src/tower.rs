//! Finitely presented towers `T_{k_1} → T_{k_2} → …`: a level-1 dimension,
//! a finite preamble of embeddings, and a cycle repeated forever.
//!
//! Text form (line oriented, `#` starts a comment):
//!
//! ```text
//! k1 4 2 2          # dimension, optionally followed by the split s_1 t_1
//! preamble alt 3 1  # zero or more
//! cycle alt 2 2     # one or more
//! ```

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::embedding::{self, EmbeddingDescriptor, EmbeddingError, RegularEmbedding};
use crate::primes;
use crate::supernatural::SupernaturalNumber;

/// Largest ground set the finite-level routines will materialize.
pub const MATERIALIZE_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TowerError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    InvalidDescriptor { line: usize, source: EmbeddingError },
    #[error("level {level}: {message}")]
    ChainMismatch { level: usize, message: String },
    #[error("the tower is not of alternating form")]
    NotAlternatingTower,
    #[error("levels are numbered from 1, got {0}")]
    BadLevel(usize),
    #[error("level {level} has dimension {dim}, beyond the materialization limit")]
    TooLarge { level: usize, dim: BigUint },
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TowerSpec {
    k1: usize,
    declared_split: Option<(usize, usize)>,
    preamble: Vec<EmbeddingDescriptor>,
    cycle: Vec<EmbeddingDescriptor>,
}

/// `(k_n, s_n, t_n)`; the split is present only for alternating-form towers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelDims {
    pub k: BigUint,
    pub s: Option<BigUint>,
    pub t: Option<BigUint>,
}

impl TowerSpec {
    /// Builds and validates a tower. `split` declares `(s_1, t_1)`.
    pub fn new(
        k1: usize,
        split: Option<(usize, usize)>,
        preamble: Vec<EmbeddingDescriptor>,
        cycle: Vec<EmbeddingDescriptor>,
    ) -> Result<Self, TowerError> {
        let tower = Self {
            k1,
            declared_split: split,
            preamble,
            cycle,
        };
        tower.validate()?;
        Ok(tower)
    }

    /// A tower whose every step is `A ↦ I_s ⊗ A ⊗ I_t` for the same `(s, t)`.
    pub fn alternating(k1: usize, split: Option<(usize, usize)>, s: usize, t: usize) -> Result<Self, TowerError> {
        Self::new(k1, split, Vec::new(), vec![EmbeddingDescriptor::Alternating { s, t }])
    }

    fn validate(&self) -> Result<(), TowerError> {
        let chain = |level, message: String| TowerError::ChainMismatch { level, message };
        if self.k1 == 0 {
            return Err(chain(1, "k1 must be positive".into()));
        }
        if self.cycle.is_empty() {
            return Err(chain(1, "the cycle must contain at least one descriptor".into()));
        }
        if let Some((s, t)) = self.declared_split {
            if s == 0 || t == 0 || s.checked_mul(t) != Some(self.k1) {
                return Err(chain(1, format!("declared split {s}·{t} does not multiply to k1 = {}", self.k1)));
            }
        }
        // Fixed-source descriptors must meet the running dimension; two
        // passes over the cycle catch every mismatch of a repeating chain.
        let mut k = BigUint::from(self.k1);
        let steps = self.preamble.len() + 2 * self.cycle.len();
        for n in 1..=steps {
            let d = self.descriptor(n);
            if let Some(src) = d.fixed_source() {
                if BigUint::from(src) != k {
                    return Err(chain(n, format!("`{d}` starts at T_{src} but the level has dimension {k}")));
                }
            }
            k *= BigUint::from(d.ratio());
        }
        Ok(())
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn declared_split(&self) -> Option<(usize, usize)> {
        self.declared_split
    }

    pub fn preamble(&self) -> &[EmbeddingDescriptor] {
        &self.preamble
    }

    pub fn cycle(&self) -> &[EmbeddingDescriptor] {
        &self.cycle
    }

    /// Descriptor of the step from level `n` to level `n + 1` (`n ≥ 1`).
    pub fn descriptor(&self, n: usize) -> &EmbeddingDescriptor {
        assert!(n >= 1, "levels are numbered from 1");
        let idx = n - 1;
        if idx < self.preamble.len() {
            &self.preamble[idx]
        } else {
            &self.cycle[(idx - self.preamble.len()) % self.cycle.len()]
        }
    }

    pub fn is_alternating_form(&self) -> bool {
        self.preamble.iter().chain(&self.cycle).all(|d| d.split().is_some())
    }

    /// `(s_1, t_1)`: the declared split, else the first step's own split
    /// when it multiplies to `k1`, else `(k1, 1)` for purely standard
    /// towers and `(1, k1)` otherwise.
    pub fn first_split(&self) -> Option<(usize, usize)> {
        if !self.is_alternating_form() {
            return None;
        }
        if let Some(split) = self.declared_split {
            return Some(split);
        }
        let first = self.descriptor(1).split().expect("alternating form");
        if first.0 * first.1 == self.k1 {
            return Some(first);
        }
        let all_standard = self
            .preamble
            .iter()
            .chain(&self.cycle)
            .all(|d| d.split().is_some_and(|(_, t)| t == 1));
        Some(if all_standard { (self.k1, 1) } else { (1, self.k1) })
    }

    /// Exact dimension `k_n`.
    pub fn dim(&self, n: usize) -> BigUint {
        assert!(n >= 1, "levels are numbered from 1");
        (1..n).fold(BigUint::from(self.k1), |k, m| k * BigUint::from(self.descriptor(m).ratio()))
    }

    /// `k_n` as a machine integer, refusing anything beyond the
    /// materialization limit.
    pub fn dim_small(&self, n: usize) -> Result<usize, TowerError> {
        if n == 0 {
            return Err(TowerError::BadLevel(n));
        }
        let dim = self.dim(n);
        usize::try_from(&dim)
            .ok()
            .filter(|&k| k <= MATERIALIZE_LIMIT)
            .ok_or(TowerError::TooLarge { level: n, dim })
    }

    pub fn level_dims(&self, n: usize) -> Result<LevelDims, TowerError> {
        if n == 0 {
            return Err(TowerError::BadLevel(n));
        }
        let k = self.dim(n);
        let (s, t) = match self.first_split() {
            Some((s1, t1)) => {
                let (s, t) = (1..n).fold((BigUint::from(s1), BigUint::from(t1)), |(s, t), m| {
                    let (a, b) = self.descriptor(m).split().expect("alternating form");
                    (s * BigUint::from(a), t * BigUint::from(b))
                });
                (Some(s), Some(t))
            }
            None => (None, None),
        };
        Ok(LevelDims { k, s, t })
    }

    /// `(s_{m'}/s_m, t_{m'}/t_m)` for an alternating-form tower, `m ≤ m'`.
    pub fn split_ratio(&self, m: usize, m_prime: usize) -> Result<(BigUint, BigUint), TowerError> {
        if m == 0 || m_prime < m {
            return Err(TowerError::BadLevel(m.min(m_prime)));
        }
        if !self.is_alternating_form() {
            return Err(TowerError::NotAlternatingTower);
        }
        Ok((m..m_prime).fold((BigUint::one(), BigUint::one()), |(s, t), n| {
            let (a, b) = self.descriptor(n).split().expect("alternating form");
            (s * BigUint::from(a), t * BigUint::from(b))
        }))
    }

    /// The step `φ_n: T_{k_n} → T_{k_{n+1}}`.
    pub fn embedding(&self, n: usize) -> Result<RegularEmbedding, TowerError> {
        let k = self.dim_small(n)?;
        self.dim_small(n + 1)?;
        Ok(self.descriptor(n).embedding(k)?)
    }

    /// `φ_{m'-1} ∘ ⋯ ∘ φ_m: T_{k_m} → T_{k_{m'}}` (the identity for `m = m'`).
    pub fn composite(&self, m: usize, m_prime: usize) -> Result<RegularEmbedding, TowerError> {
        if m == 0 || m_prime < m {
            return Err(TowerError::BadLevel(m.min(m_prime)));
        }
        let k = self.dim_small(m)?;
        self.dim_small(m_prime)?;
        if self.is_alternating_form() {
            let (s, t) = self.split_ratio(m, m_prime)?;
            let small = |x: BigUint| usize::try_from(x).expect("bounded by k_{m'}");
            return Ok(embedding::alternating(k, small(s), small(t)));
        }
        let mut acc = RegularEmbedding::identity(k);
        for n in m..m_prime {
            acc = embedding::compose(&self.embedding(n)?, &acc)?;
        }
        Ok(acc)
    }

    /// `(s_φ, t_φ)`: level-1 split and preamble ratios contribute finite
    /// exponents, every prime of the cycle's products is infinite.
    pub fn supernatural_pair(&self) -> Result<(SupernaturalNumber, SupernaturalNumber), TowerError> {
        let (s1, t1) = self.first_split().ok_or(TowerError::NotAlternatingTower)?;
        let mut s = SupernaturalNumber::from_natural(s1 as u64);
        let mut t = SupernaturalNumber::from_natural(t1 as u64);
        for d in &self.preamble {
            let (a, b) = d.split().expect("alternating form");
            s = s.multiply(&SupernaturalNumber::from_natural(a as u64));
            t = t.multiply(&SupernaturalNumber::from_natural(b as u64));
        }
        let cycle_primes = |side: fn((usize, usize)) -> usize| {
            self.cycle
                .iter()
                .flat_map(|d| primes::prime_divisors(side(d.split().expect("alternating form")) as u64))
                .collect::<Vec<_>>()
        };
        s = s.multiply(&SupernaturalNumber::infinite_power_of(cycle_primes(|(a, _)| a)));
        t = t.multiply(&SupernaturalNumber::infinite_power_of(cycle_primes(|(_, b)| b)));
        Ok((s, t))
    }

    /// The subsequence of levels `P+1, P+1+c, P+1+2c, …` (`P` the preamble
    /// length, `c` the cycle length) as a tower with one `alt` step.
    pub fn normalized(&self) -> Result<TowerSpec, TowerError> {
        if !self.is_alternating_form() {
            return Err(TowerError::NotAlternatingTower);
        }
        let start = self.preamble.len() + 1;
        let dims = self.level_dims(start)?;
        let small = |x: BigUint| usize::try_from(x).map_err(|_| TowerError::TooLarge { level: start, dim: dims.k.clone() });
        let k1 = small(dims.k.clone())?;
        let split = (small(dims.s.clone().expect("split"))?, small(dims.t.clone().expect("split"))?);
        let (s, t) = self.cycle.iter().fold((1usize, 1usize), |(s, t), d| {
            let (a, b) = d.split().expect("alternating form");
            (s * a, t * b)
        });
        TowerSpec::new(k1, Some(split), Vec::new(), vec![EmbeddingDescriptor::Alternating { s, t }])
    }
}

impl fmt::Display for TowerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.declared_split {
            Some((s, t)) => writeln!(f, "k1 {} {s} {t}", self.k1)?,
            None => writeln!(f, "k1 {}", self.k1)?,
        }
        for d in &self.preamble {
            writeln!(f, "preamble {d}")?;
        }
        for d in &self.cycle {
            writeln!(f, "cycle {d}")?;
        }
        Ok(())
    }
}

impl FromStr for TowerSpec {
    type Err = TowerError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        load_tower(text)
    }
}

pub fn load_tower(text: &str) -> Result<TowerSpec, TowerError> {
    let mut header: Option<(usize, Option<(usize, usize)>)> = None;
    let mut preamble = Vec::new();
    let mut cycle = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let parse_err = |message: String| TowerError::Parse { line, message };
        let (key, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        match key {
            "k1" => {
                if header.is_some() {
                    return Err(parse_err("duplicate k1 line".into()));
                }
                let nums: Vec<usize> = rest
                    .split_whitespace()
                    .map(|w| w.parse().map_err(|_| parse_err(format!("`{w}` is not a natural number"))))
                    .collect::<Result<_, _>>()?;
                header = Some(match nums[..] {
                    [k] => (k, None),
                    [k, s, t] => (k, Some((s, t))),
                    _ => return Err(parse_err("expected `k1 <int>` or `k1 <int> <s1> <t1>`".into())),
                });
            }
            "preamble" | "cycle" => {
                if header.is_none() {
                    return Err(parse_err("the k1 line must come first".into()));
                }
                let d: EmbeddingDescriptor = rest
                    .parse()
                    .map_err(|source| TowerError::InvalidDescriptor { line, source })?;
                if key == "cycle" {
                    cycle.push(d);
                } else if !cycle.is_empty() {
                    return Err(parse_err("preamble lines must precede cycle lines".into()));
                } else {
                    preamble.push(d);
                }
            }
            other => return Err(parse_err(format!("unknown keyword `{other}`"))),
        }
    }
    let (k1, split) = header.ok_or(TowerError::Parse {
        line: text.lines().count().max(1),
        message: "missing k1 line".into(),
    })?;
    if cycle.is_empty() {
        return Err(TowerError::Parse {
            line: text.lines().count().max(1),
            message: "missing cycle line".into(),
        });
    }
    TowerSpec::new(k1, split, preamble, cycle)
}
