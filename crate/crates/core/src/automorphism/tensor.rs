//! The tensor tower `T_{k_n} ⊗ T_{j_n}` with steps `φ_n ⊗ ψ_n`, and the
//! automorphisms assembled from one word on the first factor and a family
//! of words on the second, one per diagonal unit of the first.

use std::collections::HashMap;

use num_bigint::BigUint;

use super::{materialize, target_level, AutoError, FiniteAutoData, ShiftWord};
use crate::embedding::{self, RegularEmbedding};
use crate::partition::OrderedPartition;
use crate::tower::{TowerError, TowerSpec, MATERIALIZE_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorTower {
    phi: TowerSpec,
    psi: TowerSpec,
}

impl TensorTower {
    pub fn new(phi: TowerSpec, psi: TowerSpec) -> Self {
        Self { phi, psi }
    }

    pub fn phi(&self) -> &TowerSpec {
        &self.phi
    }

    pub fn psi(&self) -> &TowerSpec {
        &self.psi
    }

    /// `k_n · j_n`.
    pub fn dim(&self, n: usize) -> BigUint {
        self.phi.dim(n) * self.psi.dim(n)
    }

    pub fn dim_small(&self, n: usize) -> Result<usize, TowerError> {
        let dim = self.dim(n);
        usize::try_from(&dim)
            .ok()
            .filter(|&k| k <= MATERIALIZE_LIMIT)
            .ok_or(TowerError::TooLarge { level: n, dim })
    }

    /// `φ_n ⊗ ψ_n`.
    pub fn embedding(&self, n: usize) -> Result<RegularEmbedding, TowerError> {
        self.dim_small(n + 1)?;
        Ok(embedding::tensor_embed(&self.phi.embedding(n)?, &self.psi.embedding(n)?))
    }

    /// The composite from level `m` to level `m'`.
    pub fn composite(&self, m: usize, m_prime: usize) -> Result<RegularEmbedding, TowerError> {
        self.dim_small(m_prime)?;
        Ok(embedding::tensor_embed(
            &self.phi.composite(m, m_prime)?,
            &self.psi.composite(m, m_prime)?,
        ))
    }
}

/// Level-`n` action, into level `target`, of `(γ × id) ∘ (Σ_i id_{X_i} × θ_i)`:
/// `θ_i = block_words[i-1]` acts on the second factor over the clopen set
/// of the first factor's unit `i`, and `γ = global_word` acts on the first
/// factor. The unit `(i, a)` goes to
/// `{(i''-1)·j_target + b : i'' ∈ γ(i), b ∈ θ_i(a)}`.
pub fn combine_tensor_autos_to(
    tower: &TensorTower,
    n: usize,
    target: usize,
    block_words: &[ShiftWord],
    global_word: &ShiftWord,
) -> Result<FiniteAutoData, AutoError> {
    let k_n = tower.phi.dim_small(n)?;
    if block_words.len() != k_n {
        return Err(AutoError::ShapeMismatch(format!(
            "{} block words for {k_n} diagonal units",
            block_words.len()
        )));
    }
    tower.dim_small(target)?;
    let j_n = tower.psi.dim_small(n)?;
    let j_target = tower.psi.dim_small(target)?;
    let gamma = materialize(&tower.phi, global_word, n, Some(target))?.action;
    let mut actions: HashMap<ShiftWord, OrderedPartition> = HashMap::new();
    for w in block_words {
        if !actions.contains_key(w) {
            actions.insert(*w, materialize(&tower.psi, w, n, Some(target))?.action);
        }
    }
    let per_unit: Vec<&[usize]> = block_words.iter().map(|w| actions[w].owners()).collect();
    let gamma_owner = gamma.owners();
    let owner = (0..gamma.ground_size() * j_target)
        .map(|x| {
            let i = gamma_owner[x / j_target];
            i * j_n + per_unit[i][x % j_target]
        })
        .collect();
    Ok(FiniteAutoData {
        level_from: n,
        level_to: target,
        action: OrderedPartition::from_owner_unchecked(k_n * j_n, owner),
    })
}

/// [`combine_tensor_autos_to`] into the first level that carries every
/// word involved.
pub fn combine_tensor_autos(
    tower: &TensorTower,
    n: usize,
    block_words: &[ShiftWord],
    global_word: &ShiftWord,
) -> Result<FiniteAutoData, AutoError> {
    let mut target = target_level(&tower.phi, global_word, n)?;
    for w in block_words {
        target = target.max(target_level(&tower.psi, w, n)?);
    }
    combine_tensor_autos_to(tower, n, target, block_words, global_word)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower(text: &str) -> TowerSpec {
        text.parse().unwrap()
    }

    fn two_inf_pair() -> TensorTower {
        TensorTower::new(tower("k1 4\ncycle alt 2 2"), tower("k1 4\ncycle alt 2 2"))
    }

    fn word(u: u64, v: u64) -> ShiftWord {
        ShiftWord::coprime(u, v).unwrap()
    }

    #[test]
    fn standard_times_nest_is_alternating() {
        let tt = TensorTower::new(tower("k1 2\ncycle std 2"), tower("k1 2\ncycle nest 2"));
        let alt = tower("k1 4\ncycle alt 2 2");
        for n in 1..=4 {
            assert_eq!(tt.dim(n), alt.dim(n));
            assert_eq!(tt.embedding(n).unwrap(), alt.embedding(n).unwrap());
        }
    }

    #[test]
    fn composite_matches_stepwise() {
        let tt = TensorTower::new(tower("k1 2\ncycle std 2"), tower("k1 1\ncycle alt 2 3"));
        let mut acc = RegularEmbedding::identity(tt.dim_small(1).unwrap());
        for n in 1..3 {
            acc = embedding::compose(&tt.embedding(n).unwrap(), &acc).unwrap();
            assert_eq!(tt.composite(1, n + 1).unwrap(), acc);
        }
    }

    #[test]
    fn identity_words_reproduce_the_tower() {
        let tt = two_inf_pair();
        let ids = vec![ShiftWord::identity(); 4];
        let d = combine_tensor_autos(&tt, 1, &ids, &ShiftWord::identity()).unwrap();
        assert_eq!((d.level_from, d.level_to), (1, 2));
        assert_eq!(d.action, tt.composite(1, 2).unwrap().into_partition());
        let d = combine_tensor_autos_to(&tt, 1, 3, &ids, &ShiftWord::identity()).unwrap();
        assert_eq!(d.action, tt.composite(1, 3).unwrap().into_partition());
    }

    #[test]
    fn a_single_block_word_changes_only_its_clopen_set() {
        let tt = two_inf_pair();
        let mut words = vec![ShiftWord::identity(); 4];
        words[2] = word(2, 1);
        let d = combine_tensor_autos(&tt, 1, &words, &ShiftWord::identity()).unwrap();
        let own = tt.composite(1, d.level_to).unwrap().into_partition();
        let j = 4;
        for i in 1..=4 {
            for a in 1..=j {
                let unit = (i - 1) * j + a;
                let same = d.action.block(unit) == own.block(unit);
                assert_eq!(same, i != 3, "unit ({i},{a})");
                // the images stay inside the clopen set of φ-unit i
                let clopen: Vec<usize> = own.block(unit).iter().map(|x| (x - 1) / 16).collect();
                let moved: Vec<usize> = d.action.block(unit).iter().map(|x| (x - 1) / 16).collect();
                assert_eq!(clopen, moved);
            }
        }
    }

    #[test]
    fn global_word_conjugates_the_block_family() {
        // (γ × id) ∘ (Σ id_{X_i} × θ_i) = (Σ id_{γ(X_i)} × θ_i) ∘ (γ × id)
        let tt = two_inf_pair();
        let gamma = word(2, 1);
        let family = vec![word(2, 1), ShiftWord::identity(), word(1, 2), word(2, 1)];
        let left = combine_tensor_autos_to(&tt, 1, 3, &family, &gamma).unwrap();
        let ids = vec![ShiftWord::identity(); 4];
        let step1 = combine_tensor_autos_to(&tt, 1, 2, &ids, &gamma).unwrap();
        let g = materialize(tt.phi(), &gamma, 1, Some(2)).unwrap().action;
        let moved: Vec<ShiftWord> = (1..=16).map(|x| family[g.block_of(x) - 1]).collect();
        let step2 = combine_tensor_autos_to(&tt, 2, 3, &moved, &ShiftWord::identity()).unwrap();
        let right = embedding::compose(
            &RegularEmbedding::from_partition(step2.action),
            &RegularEmbedding::from_partition(step1.action),
        )
        .unwrap();
        assert_eq!(left.action, right.into_partition());
    }

    #[test]
    fn combined_actions_commute_with_the_tower() {
        let tt = two_inf_pair();
        let gamma = word(1, 2);
        let family = vec![word(2, 1), ShiftWord::identity(), word(1, 2), ShiftWord::identity()];
        let here = combine_tensor_autos_to(&tt, 1, 3, &family, &gamma).unwrap();
        let phi_1 = tt.phi().embedding(1).unwrap();
        let inherited: Vec<ShiftWord> = (1..=16).map(|x| family[phi_1.diag().block_of(x) - 1]).collect();
        let next = combine_tensor_autos_to(&tt, 2, 4, &inherited, &gamma).unwrap();
        let left = embedding::compose(&RegularEmbedding::from_partition(next.action), &tt.embedding(1).unwrap()).unwrap();
        let right = embedding::compose(&tt.composite(3, 4).unwrap(), &RegularEmbedding::from_partition(here.action)).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn errors() {
        let tt = two_inf_pair();
        assert!(matches!(
            combine_tensor_autos(&tt, 1, &[ShiftWord::identity()], &ShiftWord::identity()),
            Err(AutoError::ShapeMismatch(_))
        ));
        assert!(matches!(
            combine_tensor_autos(&tt, 1, &[word(3, 1); 4], &ShiftWord::identity()),
            Err(AutoError::InvalidShiftWord(_))
        ));
    }
}
