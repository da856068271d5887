//! Regular embeddings `T_k → T_k'` and their canonical constructors.
//!
//! A regular embedding is determined by the ordered partition of
//! `{1..k'}` that the diagonal units `e_1, …, e_k` map onto. Off-diagonal
//! units follow by rank pairing: `e_{i,j}` goes to `Σ_l e_{i_l, j_l}`
//! where `i_l` and `j_l` are the `l`-th smallest elements of blocks `i`
//! and `j`.

mod descriptor;
mod matrix;

use std::cmp::Ordering;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::partition::{self, OrderedPartition, PartitionError};

pub use descriptor::EmbeddingDescriptor;
pub use matrix::{
    apply_to_matrix, conjugate_by_diagonal, normalizer_split, straighten_level,
    ComplexUpperTriangular, DiagonalUnitary, PartialPermutationMatrix, EXACT_TOLERANCE,
    PHASE_TOLERANCE,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmbeddingError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("invalid partition: {0}")]
    InvalidPartition(PartitionError),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unit ({i},{j}) outside 1..={k}")]
    IndexOutOfRange { i: usize, j: usize, k: usize },
    #[error("unit ({i},{j}) is strictly lower triangular")]
    LowerTriangularRequest { i: usize, j: usize },
    #[error("multiplicities must be positive")]
    ZeroMultiplicity,
    #[error("invalid descriptor `{0}`")]
    InvalidDescriptor(String),
    #[error("matrix has a nonzero entry below the diagonal at ({row},{col})")]
    NotUpperTriangular { row: usize, col: usize },
    #[error("not a normalizing partial isometry: {0}")]
    NotNormalizingPartialIsometry(String),
    #[error("phase at index {index} has modulus {modulus}")]
    NonUnimodularPhase { index: usize, modulus: f64 },
    #[error("support mismatch: {0}")]
    SupportMismatch(String),
}

/// Order verdict between two embeddings with the same source and target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EmbeddingOrder {
    Less,
    EqualOnProjections,
    Greater,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegularEmbedding {
    diag: OrderedPartition,
}

impl RegularEmbedding {
    /// Wraps an ordered partition of `{1..k_to}` into `k_from` blocks.
    pub fn from_partition(diag: OrderedPartition) -> Self {
        Self { diag }
    }

    pub fn identity(k: usize) -> Self {
        Self::from_partition(OrderedPartition::identity(k))
    }

    pub fn k_from(&self) -> usize {
        self.diag.block_count()
    }

    pub fn k_to(&self) -> usize {
        self.diag.ground_size()
    }

    pub fn multiplicity(&self) -> usize {
        self.diag.block_size()
    }

    pub fn diag(&self) -> &OrderedPartition {
        &self.diag
    }

    pub fn into_partition(self) -> OrderedPartition {
        self.diag
    }

    /// Rank-paired image of the matrix unit `e_{i,j}`, `1 ≤ i ≤ j ≤ k_from`.
    pub fn image_of_unit(&self, i: usize, j: usize) -> Result<Vec<(usize, usize)>, EmbeddingError> {
        let k = self.k_from();
        if i == 0 || j == 0 || i > k || j > k {
            return Err(EmbeddingError::IndexOutOfRange { i, j, k });
        }
        if i > j {
            return Err(EmbeddingError::LowerTriangularRequest { i, j });
        }
        Ok(self
            .diag
            .block(i)
            .iter()
            .copied()
            .zip(self.diag.block(j).iter().copied())
            .collect())
    }

    /// `Some((s, t))` when this is `A ↦ I_s ⊗ A ⊗ I_t`.
    pub fn interval_form(&self) -> Option<(usize, usize)> {
        interval_form(&self.diag)
    }
}

/// Detects the diagonal pattern of `A ↦ I_s ⊗ A ⊗ I_t`: `t` is read off
/// the first run of block 1, then every element is checked against
/// `block(x) = ⌊(x-1)/t⌋ mod k`.
pub(crate) fn interval_form(q: &OrderedPartition) -> Option<(usize, usize)> {
    let k = q.block_count();
    let total = q.ground_size();
    let owners = q.owners();
    let t = owners.iter().take_while(|&&b| b == 0).count();
    if t == 0 || !total.is_multiple_of(k * t) {
        return None;
    }
    let s = total / (k * t);
    owners
        .iter()
        .enumerate()
        .all(|(x, &b)| b == (x / t) % k)
        .then_some((s, t))
}

/// `A ↦ I_mult ⊗ A`: block `i` is `{i, i+k, …, i+(mult-1)k}`.
pub fn standard(k: usize, mult: usize) -> RegularEmbedding {
    alternating(k, mult, 1)
}

/// `A ↦ A ⊗ I_mult`: block `i` is `{(i-1)·mult+1, …, i·mult}`.
pub fn nest(k: usize, mult: usize) -> RegularEmbedding {
    alternating(k, 1, mult)
}

/// `A ↦ I_s ⊗ A ⊗ I_t`: block `i` is
/// `{a·k·t + (i-1)·t + b : 0 ≤ a < s, 1 ≤ b ≤ t}`.
pub fn alternating(k: usize, s_mult: usize, t_mult: usize) -> RegularEmbedding {
    assert!(k > 0 && s_mult > 0 && t_mult > 0, "dimensions must be positive");
    let owner = (0..k * s_mult * t_mult).map(|x| (x / t_mult) % k).collect();
    RegularEmbedding::from_partition(OrderedPartition::from_owner_unchecked(k, owner))
}

/// `outer ∘ inner`, with `inner.k_to == outer.k_from`.
pub fn compose(
    outer: &RegularEmbedding,
    inner: &RegularEmbedding,
) -> Result<RegularEmbedding, EmbeddingError> {
    if inner.k_to() != outer.k_from() {
        return Err(EmbeddingError::ShapeMismatch(format!(
            "inner lands in T_{} but outer starts at T_{}",
            inner.k_to(),
            outer.k_from()
        )));
    }
    Ok(RegularEmbedding::from_partition(partition::compose(
        &outer.diag,
        &inner.diag,
    )?))
}

pub fn compare_embeddings(
    a: &RegularEmbedding,
    b: &RegularEmbedding,
) -> Result<EmbeddingOrder, EmbeddingError> {
    if a.k_from() != b.k_from() || a.k_to() != b.k_to() {
        return Err(EmbeddingError::ShapeMismatch(format!(
            "T_{} → T_{} vs T_{} → T_{}",
            a.k_from(),
            a.k_to(),
            b.k_from(),
            b.k_to()
        )));
    }
    Ok(match a.diag.compare(&b.diag)? {
        Ordering::Less => EmbeddingOrder::Less,
        Ordering::Equal => EmbeddingOrder::EqualOnProjections,
        Ordering::Greater => EmbeddingOrder::Greater,
    })
}

/// Canonical regular embedding with the given projection images:
/// `raw[i-1]` is the set of diagonal indices under the image of `e_i`.
pub fn regularize(raw: &[BTreeSet<usize>]) -> Result<RegularEmbedding, EmbeddingError> {
    let blocks = raw.iter().map(|b| b.iter().copied().collect()).collect();
    OrderedPartition::from_blocks(blocks)
        .map(RegularEmbedding::from_partition)
        .map_err(EmbeddingError::InvalidPartition)
}

/// `φ ⊗ ψ: T_{kj} → T_{k'j'}`. The unit `(i, a)` of `T_k ⊗ T_j` sits at
/// index `(i-1)·j + a` and maps to `{(i''-1)·j' + b : i'' ∈ φ(i), b ∈ ψ(a)}`.
pub fn tensor_embed(phi: &RegularEmbedding, psi: &RegularEmbedding) -> RegularEmbedding {
    let j = psi.k_from();
    let j_to = psi.k_to();
    let phi_owner = phi.diag.owners();
    let psi_owner = psi.diag.owners();
    let owner = (0..phi.k_to() * j_to)
        .map(|x| phi_owner[x / j_to] * j + psi_owner[x % j_to])
        .collect();
    RegularEmbedding::from_partition(OrderedPartition::from_owner_unchecked(
        phi.k_from() * j,
        owner,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::tests::blocks;
    use proptest::prelude::*;

    #[test]
    fn constructor_examples() {
        assert_eq!(standard(2, 2).diag(), &blocks(&[&[1, 3], &[2, 4]]));
        assert!(standard(5, 1).diag().is_identity());
        assert_eq!(standard(3, 2).diag(), &blocks(&[&[1, 4], &[2, 5], &[3, 6]]));
        assert_eq!(nest(2, 2).diag(), &blocks(&[&[1, 2], &[3, 4]]));
        assert!(nest(4, 1).diag().is_identity());
        assert_eq!(nest(2, 3).diag(), &blocks(&[&[1, 2, 3], &[4, 5, 6]]));
        assert_eq!(alternating(2, 2, 2).diag(), &blocks(&[&[1, 2, 5, 6], &[3, 4, 7, 8]]));
        assert!(alternating(3, 1, 1).diag().is_identity());
        assert_eq!(alternating(2, 2, 1), standard(2, 2));
        assert_eq!(alternating(2, 1, 2), nest(2, 2));
    }

    #[test]
    fn image_of_unit_examples() {
        assert_eq!(standard(2, 2).image_of_unit(1, 2).unwrap(), vec![(1, 2), (3, 4)]);
        assert_eq!(alternating(2, 2, 2).image_of_unit(2, 2).unwrap(), vec![(3, 3), (4, 4), (7, 7), (8, 8)]);
        assert_eq!(
            standard(2, 2).image_of_unit(2, 1),
            Err(EmbeddingError::LowerTriangularRequest { i: 2, j: 1 })
        );
        assert!(matches!(
            standard(2, 2).image_of_unit(1, 3),
            Err(EmbeddingError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn compose_examples() {
        let lhs = compose(&alternating(8, 2, 2), &alternating(2, 2, 2)).unwrap();
        assert_eq!(lhs, alternating(2, 4, 4));
        let e = alternating(3, 2, 5);
        assert_eq!(compose(&e, &RegularEmbedding::identity(3)).unwrap(), e);
        assert_eq!(compose(&RegularEmbedding::identity(30), &e).unwrap(), e);
        assert_eq!(compose(&nest(4, 2), &standard(2, 2)).unwrap(), alternating(2, 2, 2));
        assert!(compose(&standard(2, 2), &standard(2, 2)).is_err());
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare_embeddings(&nest(2, 2), &standard(2, 2)), Ok(EmbeddingOrder::Less));
        assert_eq!(
            compare_embeddings(&nest(2, 2), &nest(2, 2)),
            Ok(EmbeddingOrder::EqualOnProjections)
        );
        assert_eq!(compare_embeddings(&standard(2, 2), &nest(2, 2)), Ok(EmbeddingOrder::Greater));
        assert!(compare_embeddings(&standard(2, 2), &standard(2, 3)).is_err());
    }

    #[test]
    fn regularize_examples() {
        let set = |xs: &[usize]| xs.iter().copied().collect::<BTreeSet<usize>>();
        assert_eq!(regularize(&[set(&[1, 3]), set(&[2, 4])]).unwrap(), standard(2, 2));
        assert!(matches!(
            regularize(&[set(&[1, 4]), set(&[2, 3])]),
            Err(EmbeddingError::InvalidPartition(PartitionError::RankOrderViolation { .. }))
        ));
        let e = regularize(&[set(&[1, 2, 5, 6]), set(&[3, 4, 7, 8])]).unwrap();
        assert_eq!(e, alternating(2, 2, 2));
        assert_eq!(e.interval_form(), Some((2, 2)));
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(tensor_embed(&standard(2, 2), &nest(2, 2)), alternating(4, 2, 2));
        assert!(tensor_embed(&RegularEmbedding::identity(3), &RegularEmbedding::identity(2))
            .diag()
            .is_identity());
        let e = tensor_embed(&standard(2, 2), &standard(2, 2));
        assert_eq!(e.diag().block(1), &[1, 3, 9, 11]);
        assert_eq!(e.k_from(), 4);
        assert_eq!(e.k_to(), 16);
    }

    #[test]
    fn interval_form_detection() {
        assert_eq!(alternating(2, 2, 2).interval_form(), Some((2, 2)));
        assert_eq!(standard(2, 2).interval_form(), Some((2, 1)));
        let odd = RegularEmbedding::from_partition(blocks(&[&[1, 2, 3, 5], &[4, 6, 7, 8]]));
        assert_eq!(odd.interval_form(), None);
        assert_eq!(RegularEmbedding::identity(4).interval_form(), Some((1, 1)));
    }

    fn arb_alt() -> impl Strategy<Value = (usize, usize, usize)> {
        (1usize..5, 1usize..4, 1usize..4)
    }

    proptest! {
        #[test]
        fn constructors_are_valid((k, s, t) in arb_alt()) {
            for e in [standard(k, s), nest(k, t), alternating(k, s, t)] {
                let again = OrderedPartition::validate(e.k_from(), &e.diag().assignment());
                prop_assert!(again.is_ok());
                for i in 1..=k {
                    for j in i..=k {
                        prop_assert!(e.image_of_unit(i, j).unwrap().iter().all(|(a, b)| a <= b));
                    }
                }
            }
            prop_assert_eq!(alternating(k, s, 1), standard(k, s));
            prop_assert_eq!(alternating(k, 1, t), nest(k, t));
            if k > 1 {
                prop_assert_eq!(alternating(k, s, t).interval_form(), Some((s, t)));
            } else {
                let (s2, t2) = alternating(k, s, t).interval_form().unwrap();
                prop_assert_eq!(s2 * t2, s * t);
            }
        }

        #[test]
        fn alternating_closure((k, s1, t1) in arb_alt(), s2 in 1usize..4, t2 in 1usize..4) {
            let inner = alternating(k, s1, t1);
            let outer = alternating(k * s1 * t1, s2, t2);
            prop_assert_eq!(compose(&outer, &inner).unwrap(), alternating(k, s1 * s2, t1 * t2));
        }

        #[test]
        fn functoriality(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let k = rng.gen_range(1..5);
            let g = crate::sample::random_embedding(&mut rng, k, 3);
            let f = crate::sample::random_embedding(&mut rng, g.k_to(), 2);
            let fg = compose(&f, &g).unwrap();
            for i in 1..=k {
                for j in i..=k {
                    let chained: Vec<(usize, usize)> = g.image_of_unit(i, j).unwrap()
                        .into_iter()
                        .flat_map(|(a, b)| f.image_of_unit(a, b).unwrap())
                        .collect();
                    let direct = fg.image_of_unit(i, j).unwrap();
                    let rows = |v: &[(usize, usize)]| v.iter().map(|p| p.0).collect::<BTreeSet<_>>();
                    let cols = |v: &[(usize, usize)]| v.iter().map(|p| p.1).collect::<BTreeSet<_>>();
                    prop_assert_eq!(chained.len(), direct.len());
                    prop_assert_eq!(rows(&chained), rows(&direct));
                    prop_assert_eq!(cols(&chained), cols(&direct));
                    prop_assert!(chained.iter().all(|(a, b)| a <= b));
                }
            }
        }

        #[test]
        fn functoriality_is_exact_for_interval_forms((k, s1, t1) in arb_alt(), s2 in 1usize..4, t2 in 1usize..4) {
            let g = alternating(k, s1, t1);
            let f = alternating(g.k_to(), s2, t2);
            let fg = compose(&f, &g).unwrap();
            for i in 1..=k {
                for j in i..=k {
                    let mut chained: Vec<(usize, usize)> = g.image_of_unit(i, j).unwrap()
                        .into_iter()
                        .flat_map(|(a, b)| f.image_of_unit(a, b).unwrap())
                        .collect();
                    chained.sort();
                    prop_assert_eq!(chained, fg.image_of_unit(i, j).unwrap());
                }
            }
        }

        #[test]
        fn order_preserved_by_postcomposition(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let k = rng.gen_range(1..5);
            let mult = rng.gen_range(1..4);
            let a = RegularEmbedding::from_partition(crate::sample::random_partition_with_blocks(&mut rng, k, mult));
            let b = RegularEmbedding::from_partition(crate::sample::random_partition_with_blocks(&mut rng, k, mult));
            let c = crate::sample::random_embedding(&mut rng, k * mult, 3);
            if compare_embeddings(&a, &b).unwrap() == EmbeddingOrder::Less {
                let ca = compose(&c, &a).unwrap();
                let cb = compose(&c, &b).unwrap();
                prop_assert_eq!(compare_embeddings(&ca, &cb).unwrap(), EmbeddingOrder::Less);
            }
        }

        #[test]
        fn tensor_is_valid(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (k, j) = (rng.gen_range(1..4), rng.gen_range(1..4));
            let phi = crate::sample::random_embedding(&mut rng, k, 3);
            let psi = crate::sample::random_embedding(&mut rng, j, 3);
            let e = tensor_embed(&phi, &psi);
            prop_assert!(OrderedPartition::validate(e.k_from(), &e.diag().assignment()).is_ok());
        }
    }
}
