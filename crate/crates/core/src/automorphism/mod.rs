//! Outer automorphisms of alternating towers, represented by their action
//! on the diagonal projections.
//!
//! On an alternating tower every prime `p` dividing both `s_φ` and `t_φ`
//! infinitely gives a shift `θ_p: A ↦ I_{p·s'/s} ⊗ A ⊗ I_{t'/(p·t)}`. The
//! shifts commute, and a coprime pair `(u, v)` names the class of
//! `θ_u ∘ θ_v⁻¹`. An automorphism is recorded by the ordered partition its
//! images of the level-`m` diagonal units cut out of `{1..k_{m'}}`.

mod tensor;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::embedding::{self, EmbeddingError, RegularEmbedding};
use crate::partition::{OrderedPartition, PartitionError};
use crate::primes;
use crate::supernatural::{self, PositiveRational};
use crate::tower::{TowerError, TowerSpec, MATERIALIZE_LIMIT};

pub use tensor::{combine_tensor_autos, combine_tensor_autos_to, TensorTower};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AutoError {
    #[error("{0} does not divide both s_φ and t_φ infinitely")]
    PrimeNotCommonInfinite(u64),
    #[error("prime {prime} does not divide both split ratios of step {level}; normalize the tower first")]
    TowerNotNormalizedForPrime { prime: u64, level: usize },
    #[error("the action at level {0} is not of the form I_s ⊗ A ⊗ I_t")]
    NotIntervalForm(usize),
    #[error("level {0} has dimension 1, which does not determine a word")]
    UninformativeLevel(usize),
    #[error("inconsistent levels: expected {expected}, got {got}")]
    InconsistentLevels { expected: String, got: String },
    #[error("invalid shift word: {0}")]
    InvalidShiftWord(String),
    #[error("at least two level pairs are needed, got {0}")]
    InsufficientData(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("no level after {level} carries the word {word}")]
    NoTargetLevel { level: usize, word: ShiftWord },
    #[error("auto data line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Coprime pair `(u, v)` naming the outer class of `θ_u ∘ θ_v⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShiftWord {
    u: u64,
    v: u64,
}

impl ShiftWord {
    pub fn identity() -> Self {
        Self { u: 1, v: 1 }
    }

    /// A word whose primes all divide `s_φ` and `t_φ` of `tower` infinitely.
    pub fn new(tower: &TowerSpec, u: u64, v: u64) -> Result<Self, AutoError> {
        let w = Self::coprime(u, v)?;
        w.check_valid(tower)?;
        Ok(w)
    }

    /// The reduced pair, without reference to a tower.
    pub fn coprime(u: u64, v: u64) -> Result<Self, AutoError> {
        if u == 0 || v == 0 {
            return Err(AutoError::InvalidShiftWord(format!("{u}/{v} has a zero entry")));
        }
        if u.gcd(&v) != 1 {
            return Err(AutoError::InvalidShiftWord(format!("{u} and {v} are not coprime")));
        }
        Ok(Self { u, v })
    }

    pub fn check_valid(&self, tower: &TowerSpec) -> Result<(), AutoError> {
        let allowed = common_infinite_primes(tower)?;
        for p in primes::prime_divisors(self.u).into_iter().chain(primes::prime_divisors(self.v)) {
            if !allowed.contains(&p) {
                return Err(AutoError::InvalidShiftWord(format!(
                    "prime {p} of {self} does not divide both s_φ and t_φ infinitely"
                )));
            }
        }
        Ok(())
    }

    pub fn u(&self) -> u64 {
        self.u
    }

    pub fn v(&self) -> u64 {
        self.v
    }

    pub fn is_identity(&self) -> bool {
        self.u == 1 && self.v == 1
    }

    pub fn inverse(&self) -> Self {
        Self { u: self.v, v: self.u }
    }

    /// The class of the composite; `None` on overflow.
    pub fn then(&self, other: &Self) -> Option<Self> {
        let (u, v) = (self.u.checked_mul(other.u)?, self.v.checked_mul(other.v)?);
        let g = u.gcd(&v);
        Some(Self { u: u / g, v: v / g })
    }

    /// `w^m`; `None` on overflow.
    pub fn pow(&self, m: u32) -> Option<Self> {
        Some(Self {
            u: self.u.checked_pow(m)?,
            v: self.v.checked_pow(m)?,
        })
    }
}

impl fmt::Display for ShiftWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.u, self.v)
    }
}

impl FromStr for ShiftWord {
    type Err = AutoError;

    /// `u/v`, or a bare `u` for `u/1`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = || AutoError::InvalidShiftWord(format!("`{}` is not of the form u/v", text.trim()));
        let (u, v) = match text.trim().split_once('/') {
            Some((u, v)) => (u.trim(), v.trim()),
            None => (text.trim(), "1"),
        };
        Self::coprime(u.parse().map_err(|_| bad())?, v.parse().map_err(|_| bad())?)
    }
}

/// Images of the level-`level_from` diagonal units as a partition of
/// `{1..k_{level_to}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAutoData {
    pub level_from: usize,
    pub level_to: usize,
    pub action: OrderedPartition,
}

impl fmt::Display for FiniteAutoData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "levels {} {}", self.level_from, self.level_to)?;
        writeln!(f, "action {}", self.action)
    }
}

/// Reads `levels <m> <m'>` / `action <partition>` line pairs; `#` starts
/// a comment.
pub fn parse_auto_data(text: &str) -> Result<Vec<FiniteAutoData>, AutoError> {
    let mut data = Vec::new();
    let mut pending: Option<(usize, usize)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| AutoError::Parse { line, message };
        let (key, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        match (key, pending) {
            ("levels", None) => {
                let nums: Vec<usize> = rest
                    .split_whitespace()
                    .map(|w| w.parse().map_err(|_| err(format!("`{w}` is not a level"))))
                    .collect::<Result<_, _>>()?;
                match nums[..] {
                    [m, mp] if m >= 1 && mp > m => pending = Some((m, mp)),
                    _ => return Err(err("expected `levels <m> <m'>` with 1 ≤ m < m'".into())),
                }
            }
            ("action", Some((m, mp))) => {
                let action: OrderedPartition = rest.trim().parse().map_err(|e| err(format!("{e}")))?;
                data.push(FiniteAutoData {
                    level_from: m,
                    level_to: mp,
                    action,
                });
                pending = None;
            }
            ("levels", Some(_)) => return Err(err("`levels` without a following `action`".into())),
            ("action", None) => return Err(err("`action` without a preceding `levels`".into())),
            (other, _) => return Err(err(format!("unknown keyword `{other}`"))),
        }
    }
    if pending.is_some() {
        return Err(AutoError::Parse {
            line: text.lines().count(),
            message: "trailing `levels` without `action`".into(),
        });
    }
    Ok(data)
}

pub fn format_auto_data(data: &[FiniteAutoData]) -> String {
    data.iter().map(|d| d.to_string()).collect()
}

/// `(s, t)` of an action `A ↦ I_s ⊗ A ⊗ I_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntervalForm {
    pub s: usize,
    pub t: usize,
}

/// `(s, t)` when `q` (with `k_m` blocks) is the diagonal pattern of
/// `I_s ⊗ · ⊗ I_t`.
pub fn detect_interval_form(q: &OrderedPartition, k_m: usize) -> Option<IntervalForm> {
    if q.block_count() != k_m {
        return None;
    }
    embedding::interval_form(q).map(|(s, t)| IntervalForm { s, t })
}

fn common_infinite_primes(tower: &TowerSpec) -> Result<std::collections::BTreeSet<u64>, AutoError> {
    let (s, t) = tower.supernatural_pair()?;
    Ok(supernatural::common_infinite_primes(&s, &t))
}

fn to_usize(x: &BigUint, what: &str) -> Result<usize, AutoError> {
    x.to_usize()
        .filter(|&v| v <= MATERIALIZE_LIMIT)
        .ok_or_else(|| AutoError::ShapeMismatch(format!("{what} = {x} is too large to materialize")))
}

/// Level-`n` action of the shift `θ_p`, landing in level `n + 1`.
pub fn shift_auto(tower: &TowerSpec, p: u64, n: usize) -> Result<FiniteAutoData, AutoError> {
    if n == 0 {
        return Err(TowerError::BadLevel(n).into());
    }
    if !common_infinite_primes(tower)?.contains(&p) {
        return Err(AutoError::PrimeNotCommonInfinite(p));
    }
    let (s, t) = tower.descriptor(n).split().expect("alternating form");
    let p_small = p as usize;
    if s % p_small != 0 || t % p_small != 0 {
        return Err(AutoError::TowerNotNormalizedForPrime { prime: p, level: n });
    }
    let k = tower.dim_small(n)?;
    tower.dim_small(n + 1)?;
    Ok(FiniteAutoData {
        level_from: n,
        level_to: n + 1,
        action: embedding::alternating(k, s * p_small, t / p_small).into_partition(),
    })
}

/// `shift_auto` for each level of `levels`.
pub fn shift_auto_levels(
    tower: &TowerSpec,
    p: u64,
    levels: std::ops::RangeInclusive<usize>,
) -> Result<Vec<FiniteAutoData>, AutoError> {
    levels.map(|n| shift_auto(tower, p, n)).collect()
}

/// Whether `θ_p ∘ φ_n = φ_{n+1} ∘ θ_p` holds as partitions of
/// `{1..k_{n+2}}`.
pub fn shift_commutes_with_tower(tower: &TowerSpec, p: u64, n: usize) -> Result<bool, AutoError> {
    let here = RegularEmbedding::from_partition(shift_auto(tower, p, n)?.action);
    let next = RegularEmbedding::from_partition(shift_auto(tower, p, n + 1)?.action);
    let left = embedding::compose(&next, &tower.embedding(n)?)?;
    let right = embedding::compose(&tower.embedding(n + 1)?, &here)?;
    Ok(left == right)
}

/// Whether the level-`m` action of `w` can land in level `m'`:
/// `v | s_{m'}/s_m` and `u | t_{m'}/t_m`.
fn carries(tower: &TowerSpec, w: &ShiftWord, m: usize, m_prime: usize) -> Result<bool, AutoError> {
    let (s, t) = tower.split_ratio(m, m_prime)?;
    Ok((s % BigUint::from(w.v)).is_zero() && (t % BigUint::from(w.u)).is_zero())
}

/// Smallest `m' > m` at which the level-`m` action of `w` is defined.
pub fn target_level(tower: &TowerSpec, w: &ShiftWord, m: usize) -> Result<usize, AutoError> {
    w.check_valid(tower)?;
    // each cycle pass multiplies both ratios by the cycle products, which
    // every admissible prime divides, so the exponents of u and v bound
    // the number of passes needed
    let passes = 1 + (64 - w.u.max(w.v).leading_zeros()) as usize;
    let horizon = m + tower.preamble().len() + tower.cycle().len() * passes;
    for m_prime in m + 1..=horizon {
        if carries(tower, w, m, m_prime)? {
            return Ok(m_prime);
        }
    }
    Err(AutoError::NoTargetLevel { level: m, word: *w })
}

/// `(s, t)` of the level-`m` action of `θ_u ∘ θ_v⁻¹` into level `m'`:
/// `(s_{m'}/s_m · u/v, t_{m'}/t_m · v/u)`.
pub fn word_split(tower: &TowerSpec, w: &ShiftWord, m: usize, m_prime: usize) -> Result<(BigUint, BigUint), AutoError> {
    w.check_valid(tower)?;
    if !carries(tower, w, m, m_prime)? {
        return Err(AutoError::ShapeMismatch(format!(
            "the word {w} at level {m} does not land in level {m_prime}"
        )));
    }
    let (s, t) = tower.split_ratio(m, m_prime)?;
    Ok((s / BigUint::from(w.v) * BigUint::from(w.u), t / BigUint::from(w.u) * BigUint::from(w.v)))
}

/// The level-`m` action of `θ_u ∘ θ_v⁻¹`, into `m_prime` or the first
/// level that carries it.
pub fn materialize(
    tower: &TowerSpec,
    w: &ShiftWord,
    m: usize,
    m_prime: Option<usize>,
) -> Result<FiniteAutoData, AutoError> {
    let m_prime = match m_prime {
        Some(mp) => mp,
        None => target_level(tower, w, m)?,
    };
    let (s, t) = word_split(tower, w, m, m_prime)?;
    let k = tower.dim_small(m)?;
    tower.dim_small(m_prime)?;
    Ok(FiniteAutoData {
        level_from: m,
        level_to: m_prime,
        action: embedding::alternating(k, to_usize(&s, "s")?, to_usize(&t, "t")?).into_partition(),
    })
}

/// Per-datum detections and the word they determine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorReport {
    /// `(m, m', s, t)` per datum.
    pub levels: Vec<(usize, usize, usize, usize)>,
    pub word: ShiftWord,
}

impl fmt::Display for FactorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (m, mp, s, t) in &self.levels {
            writeln!(f, "levels {m} {mp}: s = {s}, t = {t}")?;
        }
        writeln!(f, "consistent: yes")?;
        writeln!(f, "word {}", self.word)
    }
}

/// Recovers the word of an automorphism from its actions at several level
/// pairs: each action must be `I_s ⊗ · ⊗ I_t`, and `s / (s_{m'}/s_m)`
/// reduces to `u/v`. Every datum must give the same word, and pairs of
/// data must intertwine with the tower's own embeddings.
pub fn factor_automorphism(tower: &TowerSpec, data: &[FiniteAutoData]) -> Result<FactorReport, AutoError> {
    if data.len() < 2 {
        return Err(AutoError::InsufficientData(data.len()));
    }
    if !tower.is_alternating_form() {
        return Err(TowerError::NotAlternatingTower.into());
    }
    let mut levels = Vec::with_capacity(data.len());
    let mut word: Option<(BigUint, BigUint)> = None;
    for d in data {
        let (m, mp) = (d.level_from, d.level_to);
        if m == 0 || mp <= m {
            return Err(AutoError::ShapeMismatch(format!("levels {m} {mp} are not increasing")));
        }
        let (k_m, k_mp) = (tower.dim(m), tower.dim(mp));
        if BigUint::from(d.action.block_count()) != k_m || BigUint::from(d.action.ground_size()) != k_mp {
            return Err(AutoError::ShapeMismatch(format!(
                "action at levels {m} {mp} partitions {} into {} blocks, the tower needs {k_mp} into {k_m}",
                d.action.ground_size(),
                d.action.block_count()
            )));
        }
        if k_m.is_one() {
            return Err(AutoError::UninformativeLevel(m));
        }
        let form = detect_interval_form(&d.action, d.action.block_count()).ok_or(AutoError::NotIntervalForm(m))?;
        let (ratio_s, _) = tower.split_ratio(m, mp)?;
        let (numer, denom) = (BigUint::from(form.s), ratio_s);
        let g = numer.gcd(&denom);
        let reduced = (numer / &g, denom / &g);
        match &word {
            None => word = Some(reduced),
            Some(expected) if *expected != reduced => {
                return Err(AutoError::InconsistentLevels {
                    expected: format!("{}/{}", expected.0, expected.1),
                    got: format!("{}/{} at levels {m} {mp}", reduced.0, reduced.1),
                })
            }
            Some(_) => {}
        }
        levels.push((m, mp, form.s, form.t));
    }
    check_intertwining(tower, data)?;
    let (u, v) = word.expect("at least two data");
    let too_big = || AutoError::InvalidShiftWord(format!("{u}/{v} does not fit in 64 bits"));
    let word = ShiftWord::new(tower, u.to_u64().ok_or_else(too_big)?, v.to_u64().ok_or_else(too_big)?)?;
    Ok(FactorReport { levels, word })
}

/// For data `a`, `b` with `a.m ≤ b.m` and `a.m' ≤ b.m'`: the action at
/// `b` after the tower's embedding equals the tower's embedding after the
/// action at `a`. Pairs too large to materialize are skipped.
fn check_intertwining(tower: &TowerSpec, data: &[FiniteAutoData]) -> Result<(), AutoError> {
    for a in data {
        for b in data {
            if a == b || a.level_from > b.level_from || a.level_to > b.level_to {
                continue;
            }
            if tower.dim_small(b.level_to).is_err() {
                continue;
            }
            let theta_a = RegularEmbedding::from_partition(a.action.clone());
            let theta_b = RegularEmbedding::from_partition(b.action.clone());
            let left = embedding::compose(&theta_b, &tower.composite(a.level_from, b.level_from)?)?;
            let right = embedding::compose(&tower.composite(a.level_to, b.level_to)?, &theta_a)?;
            if left != right {
                return Err(AutoError::InconsistentLevels {
                    expected: format!("actions at levels {} {} and {} {} to intertwine", a.level_from, a.level_to, b.level_from, b.level_to),
                    got: "actions that do not commute with the tower".into(),
                });
            }
        }
    }
    Ok(())
}

/// Rank of `Out ≅ ℤ^d`: the number of primes dividing both `s_φ` and
/// `t_φ` infinitely.
pub fn out_rank(tower: &TowerSpec) -> Result<usize, AutoError> {
    let (s, t) = tower.supernatural_pair()?;
    Ok(supernatural::common_infinite_count(&s, &t))
}

/// The rational `r` with `s_a = r·s_b` and `t_a = r⁻¹·t_b`, if any.
pub fn alternating_iso(a: &TowerSpec, b: &TowerSpec) -> Result<Option<PositiveRational>, AutoError> {
    let (sa, ta) = a.supernatural_pair()?;
    let (sb, tb) = b.supernatural_pair()?;
    Ok(supernatural::rational_pair_witness(&sa, &ta, &sb, &tb))
}

/// Largest level the torsion cross-check composes explicitly; beyond it
/// the composed actions are compared through their `(s, t)` splits.
pub const TORSION_MATERIALIZE_LIMIT: usize = 1 << 18;

/// Outcome of composing `w` with itself `m` times, both as words and as
/// finite-level partitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionReport {
    pub power_is_identity: bool,
    /// Levels `L_0 < L_1 < … < L_m` the composed actions pass through.
    pub levels: Vec<usize>,
    /// The composed action agrees with the tower's own `L_0 → L_m` map.
    pub matches_tower: bool,
    /// Whether the comparison ran on explicit partitions rather than on
    /// their `(s, t)` descriptions.
    pub materialized: bool,
}

pub fn torsion_report(tower: &TowerSpec, w: &ShiftWord, m: u32) -> Result<TorsionReport, AutoError> {
    if m == 0 {
        return Err(AutoError::InvalidShiftWord("the power must be at least 1".into()));
    }
    w.check_valid(tower)?;
    let power_is_identity = w.is_identity();
    // start where the diagonal has at least two units, so partitions
    // distinguish different words
    let base = (1..=tower.preamble().len() + tower.cycle().len() + 2)
        .find(|&n| tower.dim(n) > BigUint::one())
        .ok_or_else(|| AutoError::ShapeMismatch("every level has dimension 1".into()))?;
    let mut levels = vec![base];
    for _ in 0..m {
        let last = *levels.last().expect("nonempty");
        levels.push(target_level(tower, w, last)?);
    }
    let end = *levels.last().expect("nonempty");
    let materialized = tower.dim_small(end).is_ok_and(|k| k <= TORSION_MATERIALIZE_LIMIT);
    let matches_tower = if materialized {
        let mut acc = RegularEmbedding::identity(tower.dim_small(base)?);
        for pair in levels.windows(2) {
            let step = materialize(tower, w, pair[0], Some(pair[1]))?;
            acc = embedding::compose(&RegularEmbedding::from_partition(step.action), &acc)?;
        }
        acc == tower.composite(base, end)?
    } else {
        // interval forms compose by multiplying their splits
        let mut split = (BigUint::one(), BigUint::one());
        for pair in levels.windows(2) {
            let (s, t) = word_split(tower, w, pair[0], pair[1])?;
            split = (split.0 * s, split.1 * t);
        }
        split == tower.split_ratio(base, end)?
    };
    if matches_tower != power_is_identity {
        return Err(AutoError::InconsistentLevels {
            expected: format!("finite levels to agree with w^{m} = {}", if power_is_identity { "id" } else { "non-identity" }),
            got: format!("matches_tower = {matches_tower}"),
        });
    }
    Ok(TorsionReport {
        power_is_identity,
        levels,
        matches_tower,
        materialized,
    })
}

/// Whether `w^m` is the identity class; cross-checked against the
/// composed finite-level partitions.
pub fn torsion_check(tower: &TowerSpec, w: &ShiftWord, m: u32) -> Result<bool, AutoError> {
    Ok(torsion_report(tower, w, m)?.power_is_identity)
}

/// Counts the matrix units of `T_k` and `T_k*` and checks that together
/// they span `M_k`: `dim T_k + dim T_k* − k = k²`.
pub fn dirichlet_dimension_check(k: usize) -> bool {
    let upper = (1..=k).flat_map(|i| (i..=k).map(move |j| (i, j))).count();
    let lower = (1..=k).flat_map(|i| (1..=i).map(move |j| (i, j))).count();
    let spanned: std::collections::BTreeSet<(usize, usize)> = (1..=k)
        .flat_map(|i| (i..=k).flat_map(move |j| [(i, j), (j, i)]))
        .collect();
    upper + lower - k == k * k && spanned.len() == k * k
}
