//! Random instance generators for property sweeps.
//!
//! Everything takes an explicit `Rng`, so sweeps driven by a seeded
//! generator are reproducible.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::embedding::{ComplexUpperTriangular, DiagonalUnitary, PartialPermutationMatrix};
use crate::partition::OrderedPartition;

/// Deals `1..=n*size` to `n` blocks of `size` in increasing order, letting
/// `choices[e]` pick among the blocks that keep the rank condition.
pub fn partition_from_choices(n: usize, size: usize, choices: &[u32]) -> OrderedPartition {
    assert!(n > 0 && size > 0 && choices.len() >= n * size);
    let mut counts = vec![0usize; n];
    let mut owner = Vec::with_capacity(n * size);
    let mut allowed = Vec::with_capacity(n);
    for &choice in &choices[..n * size] {
        allowed.clear();
        allowed.extend((0..n).filter(|&b| counts[b] < size && (b == 0 || counts[b] < counts[b - 1])));
        let b = allowed[choice as usize % allowed.len()];
        counts[b] += 1;
        owner.push(b);
    }
    OrderedPartition::from_owner_unchecked(n, owner)
}

/// A random ordered partition with `blocks` blocks of `size` elements.
pub fn random_partition_with_blocks<R: Rng + ?Sized>(
    rng: &mut R,
    blocks: usize,
    size: usize,
) -> OrderedPartition {
    let choices: Vec<u32> = (0..blocks * size).map(|_| rng.gen()).collect();
    partition_from_choices(blocks, size, &choices)
}

pub fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> num_complex::Complex64 {
    num_complex::Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn random_diagonal_unitary<R: Rng + ?Sized>(rng: &mut R, k: usize) -> DiagonalUnitary {
    DiagonalUnitary::new((0..k).map(|_| random_phase(rng)).collect())
        .expect("unit-modulus phases")
}

/// A random 0/1 partial permutation in `T_k` (every entry on or above the
/// diagonal).
pub fn random_partial_permutation<R: Rng + ?Sized>(rng: &mut R, k: usize) -> PartialPermutationMatrix {
    let mut cols: Vec<usize> = (0..k).collect();
    cols.shuffle(rng);
    let mut used_rows = vec![false; k];
    let mut pairs = Vec::new();
    for c in cols {
        if rng.gen_bool(0.3) {
            continue;
        }
        let free: Vec<usize> = (0..=c).filter(|&r| !used_rows[r]).collect();
        if let Some(&r) = free.get(rng.gen_range(0..free.len().max(1))) {
            used_rows[r] = true;
            pairs.push((r, c));
        }
    }
    PartialPermutationMatrix::from_pairs(k, &pairs).expect("injective upper-triangular pairs")
}

pub fn random_upper_triangular<R: Rng + ?Sized>(rng: &mut R, k: usize) -> ComplexUpperTriangular {
    let mut m = ComplexUpperTriangular::zeros(k);
    for r in 0..k {
        for c in r..k {
            m.set(
                r,
                c,
                num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
        }
    }
    m
}

/// A random regular embedding out of `T_k` with multiplicity in `1..=max_mult`.
pub fn random_embedding<R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    max_mult: usize,
) -> crate::embedding::RegularEmbedding {
    let mult = rng.gen_range(1..=max_mult);
    crate::embedding::RegularEmbedding::from_partition(random_partition_with_blocks(rng, k, mult))
}

const SMALL_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// First level whose diagonal has at least two units.
pub fn informative_level(tower: &crate::tower::TowerSpec) -> usize {
    (1..)
        .find(|&n| tower.dim(n) > num_bigint::BigUint::from(1u32))
        .expect("alternating towers with a common prime grow")
}

/// `(s, t)` splits of a cycle together with the primes common to both sides.
type RandomCycle = (Vec<(usize, usize)>, Vec<u64>);

fn random_cycle<R: Rng + ?Sized>(rng: &mut R, max_ratio: usize) -> Option<RandomCycle> {
    let len = rng.gen_range(1..=3);
    let mut cycle = vec![(1usize, 1usize); len];
    let count = rng.gen_range(1..=2);
    let mut chosen: Vec<u64> = SMALL_PRIMES.choose_multiple(rng, count).copied().collect();
    chosen.sort_unstable();
    for &p in &chosen {
        cycle[rng.gen_range(0..len)].0 *= p as usize;
        cycle[rng.gen_range(0..len)].1 *= p as usize;
    }
    // sprinkle extra factors that need not be common
    for _ in 0..rng.gen_range(0..3) {
        let p = *SMALL_PRIMES.choose(rng).expect("nonempty") as usize;
        let slot = rng.gen_range(0..len);
        if rng.gen_bool(0.5) {
            cycle[slot].0 *= p;
        } else {
            cycle[slot].1 *= p;
        }
    }
    cycle
        .iter()
        .all(|(s, t)| s * t <= max_ratio)
        .then_some((cycle, chosen))
}

/// A random alternating tower with at least one prime dividing both
/// `s_φ` and `t_φ` infinitely, every step ratio at most `max_ratio`, and a
/// random valid word over those primes. The word's actions from the
/// first informative level, and from where that action lands, stay within
/// `max_dim` and land no later than level 5.
pub fn random_tower_and_word<R: Rng + ?Sized>(
    rng: &mut R,
    max_ratio: usize,
    max_dim: usize,
) -> (crate::tower::TowerSpec, crate::automorphism::ShiftWord) {
    use crate::automorphism::{materialize, ShiftWord};
    use crate::embedding::EmbeddingDescriptor;
    use crate::tower::TowerSpec;

    loop {
        let Some((cycle, common)) = random_cycle(rng, max_ratio) else {
            continue;
        };
        let k1 = rng.gen_range(1..=4usize);
        let split = match rng.gen_range(0..3) {
            0 => None,
            1 => Some((1, k1)),
            _ => Some((k1, 1)),
        };
        let preamble = (0..rng.gen_range(0..=1))
            .map(|_| EmbeddingDescriptor::Alternating {
                s: rng.gen_range(1..=3),
                t: rng.gen_range(1..=3),
            })
            .collect();
        let cycle = cycle.into_iter().map(|(s, t)| EmbeddingDescriptor::Alternating { s, t }).collect();
        let tower = TowerSpec::new(k1, split, preamble, cycle).expect("tensor descriptors always chain");
        let (mut u, mut v) = (1u64, 1u64);
        for &p in &common {
            let e = rng.gen_range(0..=2u32);
            match rng.gen_range(0..3) {
                0 => u *= p.pow(e),
                1 => v *= p.pow(e),
                _ => {}
            }
        }
        let Ok(w) = ShiftWord::new(&tower, u, v) else {
            continue;
        };
        let m = informative_level(&tower);
        let fits = |level: usize| level <= 5 && tower.dim_small(level).is_ok_and(|k| k <= max_dim);
        let ok = materialize(&tower, &w, m, None)
            .ok()
            .filter(|d| fits(d.level_to))
            .and_then(|d| materialize(&tower, &w, d.level_to, None).ok())
            .is_some_and(|d| fits(d.level_to));
        if ok {
            return (tower, w);
        }
    }
}

/// A random word over the primes dividing both `s_φ` and `t_φ` of `tower`
/// infinitely, whose actions from the first informative level and from
/// where that lands stay within `max_dim`. `None` when even the identity
/// does not fit.
pub fn random_word<R: Rng + ?Sized>(
    rng: &mut R,
    tower: &crate::tower::TowerSpec,
    max_dim: usize,
) -> Option<crate::automorphism::ShiftWord> {
    use crate::automorphism::{materialize, ShiftWord};

    let (s, t) = tower.supernatural_pair().ok()?;
    let common: Vec<u64> = crate::supernatural::common_infinite_primes(&s, &t).into_iter().collect();
    let m = informative_level(tower);
    let fits = |w: &ShiftWord| {
        let small = |level: usize| tower.dim_small(level).is_ok_and(|k| k <= max_dim);
        materialize(tower, w, m, None)
            .ok()
            .filter(|d| small(d.level_to))
            .and_then(|d| materialize(tower, w, d.level_to, None).ok())
            .is_some_and(|d| small(d.level_to))
    };
    for _ in 0..50 {
        let (mut u, mut v) = (1u64, 1u64);
        for &p in &common {
            let e = rng.gen_range(0..=2u32);
            match rng.gen_range(0..3) {
                0 => u *= p.pow(e),
                1 => v *= p.pow(e),
                _ => {}
            }
        }
        let w = ShiftWord::new(tower, u, v).expect("primes are common");
        if fits(&w) {
            return Some(w);
        }
    }
    Some(ShiftWord::identity()).filter(|w| fits(w))
}
