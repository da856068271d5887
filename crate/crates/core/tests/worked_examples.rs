//! Small hand-checked instances, exercised through the public API.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_complex::Complex64;
use tuhf::automorphism::{
    alternating_iso, detect_interval_form, factor_automorphism, materialize, out_rank, shift_auto,
    AutoError, IntervalForm, ShiftWord,
};
use tuhf::embedding::{
    self, alternating, apply_to_matrix, compare_embeddings, nest, normalizer_split, regularize, standard,
    tensor_embed, ComplexUpperTriangular, EmbeddingError, EmbeddingOrder, RegularEmbedding,
};
use tuhf::gelfand::{gelfand_compare, gelfand_compare_via_projections, relation_member, GelfandPoint, PointOrder};
use tuhf::partition::{runs_of, OrderedPartition, PartitionError, Run};
use tuhf::supernatural::{self, Exponent, PositiveRational, SupernaturalError, SupernaturalNumber};
use tuhf::tower::{load_tower, TowerError, TowerSpec};

fn sn(text: &str) -> SupernaturalNumber {
    text.parse().unwrap()
}

fn part(blocks: &[&[usize]]) -> OrderedPartition {
    OrderedPartition::from_blocks(blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
}

fn tower(text: &str) -> TowerSpec {
    load_tower(text).unwrap()
}

#[test]
fn supernatural_arithmetic() {
    let x = sn("2^inf*3^2");
    assert_eq!(x.exponent(2), Exponent::Infinite);
    assert_eq!(x.exponent(3), Exponent::Finite(2));
    assert_eq!("4^2".parse::<SupernaturalNumber>(), Err(SupernaturalError::NonPrimeBase(4)));
    assert_eq!(sn("2").multiply(&sn("2^inf")), sn("2^inf"));
    assert_eq!(sn("2*3^2").multiply(&sn("3*5")), sn("2*3^3*5"));
    assert_eq!(sn("2^inf*3^2*5^inf").infinite_primes().into_iter().collect::<Vec<_>>(), vec![2, 5]);
    assert!(sn("7^3").infinite_primes().is_empty());
}

#[test]
fn rational_witnesses() {
    let w = supernatural::rational_pair_witness(&sn("2^inf*3"), &sn("5^inf"), &sn("2^inf"), &sn("3*5^inf"));
    assert_eq!(w, Some(PositiveRational::new(3, 1)));
    let w = supernatural::rational_pair_witness(&sn("2^inf"), &sn("3^inf"), &sn("2^inf"), &sn("3^inf"));
    assert_eq!(w, Some(PositiveRational::one()));
    let w = supernatural::rational_pair_witness(&sn("2^inf"), &sn("3^inf"), &sn("3^inf"), &sn("2^inf"));
    assert_eq!(w, None);
}

#[test]
fn ordered_partitions() {
    assert!(OrderedPartition::from_blocks(vec![vec![1, 3], vec![2, 4]]).is_ok());
    assert!(matches!(
        OrderedPartition::from_blocks(vec![vec![1, 4], vec![2, 3]]),
        Err(PartitionError::RankOrderViolation { .. })
    ));
    assert!(matches!(
        OrderedPartition::from_blocks(vec![vec![1], vec![2, 3, 4]]),
        Err(PartitionError::UnequalBlockSizes { .. })
    ));
    let nest_p = part(&[&[1, 2], &[3, 4]]);
    let std_p = part(&[&[1, 3], &[2, 4]]);
    assert_eq!(nest_p.compare(&std_p), Ok(Ordering::Less));
    assert_eq!(std_p.compare(&nest_p), Ok(Ordering::Greater));
    assert_eq!(std_p.compare(&std_p), Ok(Ordering::Equal));

    let r = part(&[&[1, 2, 5, 6], &[3, 4, 7, 8]]).restrict_prefix(5).unwrap();
    assert_eq!(r.blocks(), &[vec![1, 2, 5], vec![3, 4]]);
    assert_eq!(runs_of(&[1, 3, 4, 7]), vec![Run::new(1, 1), Run::new(3, 4), Run::new(7, 7)]);
    assert!(runs_of(&[]).is_empty());

    let grid = part(&[&[1, 2, 5, 6], &[3, 4, 7, 8]]).interleaved_runs();
    assert_eq!(
        grid.rows(),
        &[
            vec![Some(Run::new(1, 2)), Some(Run::new(3, 4))],
            vec![Some(Run::new(5, 6)), Some(Run::new(7, 8))]
        ]
    );
}

#[test]
fn embedding_patterns() {
    assert_eq!(standard(3, 2).diag(), &part(&[&[1, 4], &[2, 5], &[3, 6]]));
    assert_eq!(nest(2, 3).diag(), &part(&[&[1, 2, 3], &[4, 5, 6]]));
    assert_eq!(alternating(2, 2, 2).diag(), &part(&[&[1, 2, 5, 6], &[3, 4, 7, 8]]));
    assert_eq!(standard(2, 2).image_of_unit(1, 2), Ok(vec![(1, 2), (3, 4)]));
    assert_eq!(nest(2, 2).image_of_unit(1, 2), Ok(vec![(1, 3), (2, 4)]));

    let c = embedding::compose(&standard(4, 2), &standard(2, 2)).unwrap();
    assert_eq!(c, standard(2, 4));
    let c = embedding::compose(&alternating(8, 2, 2), &alternating(2, 2, 2)).unwrap();
    assert_eq!(c, alternating(2, 4, 4));
    let c = embedding::compose(&nest(4, 2), &standard(2, 2)).unwrap();
    assert_eq!(c, alternating(2, 2, 2));

    assert_eq!(compare_embeddings(&nest(2, 2), &standard(2, 2)), Ok(EmbeddingOrder::Less));
    assert_eq!(
        compare_embeddings(&nest(2, 2), &nest(2, 2)),
        Ok(EmbeddingOrder::EqualOnProjections)
    );

    let raw = vec![[1, 4].into(), [2, 3].into()];
    assert!(matches!(regularize(&raw), Err(EmbeddingError::InvalidPartition(_))));
    let raw = vec![[1, 2, 5, 6].into(), [3, 4, 7, 8].into()];
    assert_eq!(regularize(&raw), Ok(alternating(2, 2, 2)));

    let t = tensor_embed(&standard(2, 2), &standard(2, 2));
    assert_eq!(t.diag().block(1), &[1, 3, 9, 11]);
    assert_eq!(tensor_embed(&RegularEmbedding::identity(2), &RegularEmbedding::identity(3)), RegularEmbedding::identity(6));
}

#[test]
fn matrices() {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let image = apply_to_matrix(&standard(2, 2), &ComplexUpperTriangular::unit(2, 1, 2)).unwrap();
    let mut expected = ComplexUpperTriangular::zeros(4);
    expected.set(0, 1, one);
    expected.set(2, 3, one);
    assert_eq!(image, expected);
    let id = apply_to_matrix(&alternating(2, 2, 3), &ComplexUpperTriangular::identity(2)).unwrap();
    assert_eq!(id, ComplexUpperTriangular::identity(12));

    let mut v = ComplexUpperTriangular::zeros(3);
    v.set(0, 1, i);
    v.set(1, 2, one);
    let (d, w) = normalizer_split(&v).unwrap();
    assert_eq!(d.phases(), &[i, one, one]);
    assert_eq!(w.pairs().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    v.set(0, 2, one);
    assert!(normalizer_split(&v).is_err());
}

#[test]
fn tower_dimensions_and_pairs() {
    let t = tower("k1 4\ncycle alt 2 2");
    let d = t.level_dims(3).unwrap();
    assert_eq!((d.k, d.s, d.t), (BigUint::from(64u32), Some(8u32.into()), Some(8u32.into())));
    let t = tower("k1 2\ncycle alt 3 2");
    assert_eq!(t.dim(3), BigUint::from(72u32));
    assert!(matches!(load_tower("k1 2 1 1\ncycle alt 3 2"), Err(TowerError::ChainMismatch { .. })));
    let (s, t) = tower("k1 1\npreamble alt 3 1\ncycle alt 2 5").supernatural_pair().unwrap();
    assert_eq!((s, t), (sn("2^inf*3"), sn("5^inf")));
    assert_eq!(tower("k1 2\ncycle std 2").level_dims(1).unwrap().s, Some(2u32.into()));
    assert_eq!(tower("k1 3\ncycle nest 2").level_dims(1).unwrap().s, Some(1u32.into()));
    let general = tower("k1 2\npreamble part 6 m=6 n=2 blocks=1,2,4;3,5,6\ncycle std 2");
    assert_eq!(general.supernatural_pair(), Err(TowerError::NotAlternatingTower));
}

#[test]
fn outer_ranks_and_isomorphisms() {
    assert_eq!(out_rank(&tower("k1 4\ncycle alt 2 2")), Ok(1));
    assert_eq!(out_rank(&tower("k1 36\ncycle alt 6 6")), Ok(2));
    assert_eq!(out_rank(&tower("k1 1\ncycle std 2")), Ok(0));
    let a = tower("k1 1\npreamble alt 3 1\ncycle alt 2 5");
    let b = tower("k1 1\npreamble alt 1 3\ncycle alt 2 5");
    assert_eq!(alternating_iso(&a, &b), Ok(Some(PositiveRational::new(3, 1))));
    assert_eq!(alternating_iso(&b, &a), Ok(Some(PositiveRational::new(1, 3))));
}

#[test]
fn shifts_and_factorization() {
    let t = tower("k1 4\ncycle alt 2 2");
    let d = shift_auto(&t, 2, 1).unwrap();
    let blocks: Vec<Vec<usize>> = (1..=4).map(|i| vec![i, i + 4, i + 8, i + 12]).collect();
    assert_eq!(d.action, OrderedPartition::from_blocks(blocks).unwrap());
    assert_eq!(shift_auto(&t, 3, 1), Err(AutoError::PrimeNotCommonInfinite(3)));

    assert_eq!(detect_interval_form(&alternating(2, 2, 2).into_partition(), 2), Some(IntervalForm { s: 2, t: 2 }));
    assert_eq!(detect_interval_form(&part(&[&[1, 3], &[2, 4]]), 2), Some(IntervalForm { s: 2, t: 1 }));
    assert_eq!(detect_interval_form(&part(&[&[1, 2, 3, 5], &[4, 6, 7, 8]]), 2), None);

    let data = vec![shift_auto(&t, 2, 1).unwrap(), shift_auto(&t, 2, 2).unwrap()];
    assert_eq!(factor_automorphism(&t, &data).unwrap().word, ShiftWord::coprime(2, 1).unwrap());
    let inverse = ShiftWord::coprime(1, 2).unwrap();
    let data: Vec<_> = (1..=2).map(|m| materialize(&t, &inverse, m, None).unwrap()).collect();
    assert_eq!(factor_automorphism(&t, &data).unwrap().word, inverse);
    let own: Vec<_> = (1..=2).map(|m| materialize(&t, &ShiftWord::identity(), m, None).unwrap()).collect();
    assert!(factor_automorphism(&t, &own).unwrap().word.is_identity());
}

#[test]
fn gelfand_order() {
    let t = tower("k1 4\ncycle alt 2 2");
    let point = |c: &[usize], tail: &str| GelfandPoint::new(&t, c.to_vec(), tail).unwrap();
    let (x, y) = (point(&[0, 1], "0"), point(&[1, 0], "0"));
    assert_eq!(gelfand_compare(&t, &x, &y), Ok(PointOrder::Less));
    assert_eq!(gelfand_compare_via_projections(&t, &x, &y), Ok(PointOrder::Less));
    assert!(relation_member(&t, &x, &y, 2).unwrap().is_some());
    assert_eq!(relation_member(&t, &y, &x, 2), Ok(None));
    let same = relation_member(&t, &x, &x, 2).unwrap().unwrap();
    assert_eq!((same.depth, same.i == same.j), (1, true));
    let other = point(&[1, 0], "1");
    assert_eq!(gelfand_compare(&t, &x, &other), Ok(PointOrder::Incomparable));

    // on a nest tower the order is the plain lexicographic order of coordinates
    let ratios = tower("k1 4\ncycle nest 4");
    let p = |c: &[usize]| GelfandPoint::new(&ratios, c.to_vec(), "0").unwrap();
    assert_eq!(gelfand_compare(&ratios, &p(&[1, 2]), &p(&[2, 1])), Ok(PointOrder::Less));
}
