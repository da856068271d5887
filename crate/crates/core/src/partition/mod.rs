//! Ordered partitions of `{1..m}` into equal, rank-ordered blocks.
//!
//! An ordered partition is the image of the minimal diagonal projections
//! `e_1 ≼ … ≼ e_n` of `T_n` under a unital embedding into `T_m`. Block
//! `i` collects the indices of the diagonal units under the image of
//! `e_i`. Elements and block indices are 1-based throughout the public
//! API, matching matrix-unit indices.
//!
//! Text form: `m=4 n=2 blocks=1,3;2,4`.

mod psize;
mod runs;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use psize::{psize_oracle, HypothesisViolated, RunSizeHypothesis};
pub use runs::{runs_of, OrderedSubpartition, Run, RunGrid};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("ground set is empty")]
    EmptyGround,
    #[error("block count {n} does not divide ground size {m}")]
    BlockCountDoesNotDivide { m: usize, n: usize },
    #[error("element {element} assigned to block {block}, outside 1..={n}")]
    BlockIndexOutOfRange { element: usize, block: usize, n: usize },
    #[error("block {block} has {size} elements, expected {expected}")]
    UnequalBlockSizes {
        block: usize,
        size: usize,
        expected: usize,
    },
    #[error("rank order violated: rank {l} of block {i} is not below rank {l} of block {j}")]
    RankOrderViolation { i: usize, j: usize, l: usize },
    #[error("blocks do not partition 1..={m}: {reason}")]
    NotAPartition { m: usize, reason: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("value {value} outside 1..={max}")]
    OutOfRange { value: usize, max: usize },
    #[error("cannot parse partition: {0}")]
    Parse(String),
}

/// Equal-size blocks `A_1 ≤ … ≤ A_n` partitioning `{1..m}`, where the
/// `l`-th smallest element of `A_i` is below the `l`-th smallest of
/// `A_{i+1}` for every `l`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedPartition {
    /// `owner[e - 1]` is the 0-based block holding element `e`.
    owner: Vec<usize>,
    /// Ascending 1-based elements of each block.
    blocks: Vec<Vec<usize>>,
}

impl OrderedPartition {
    /// Checks a raw assignment: `assign[e - 1]` is the 1-based block of
    /// element `e`, with `n` blocks in total.
    pub fn validate(n: usize, assign: &[usize]) -> Result<Self, PartitionError> {
        let m = assign.len();
        if m == 0 || n == 0 {
            return Err(PartitionError::EmptyGround);
        }
        if !m.is_multiple_of(n) {
            return Err(PartitionError::BlockCountDoesNotDivide { m, n });
        }
        let mut owner = Vec::with_capacity(m);
        for (idx, &b) in assign.iter().enumerate() {
            if b == 0 || b > n {
                return Err(PartitionError::BlockIndexOutOfRange {
                    element: idx + 1,
                    block: b,
                    n,
                });
            }
            owner.push(b - 1);
        }
        let p = Self::from_owner_unchecked(n, owner);
        p.check_shape()?;
        Ok(p)
    }

    /// Checks explicit blocks (1-based elements, any order within a block).
    pub fn from_blocks(blocks: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        let n = blocks.len();
        let m: usize = blocks.iter().map(Vec::len).sum();
        if m == 0 {
            return Err(PartitionError::EmptyGround);
        }
        let mut owner = vec![usize::MAX; m];
        for (b, block) in blocks.iter().enumerate() {
            for &e in block {
                if e == 0 || e > m {
                    return Err(PartitionError::NotAPartition {
                        m,
                        reason: format!("element {e} out of range"),
                    });
                }
                if owner[e - 1] != usize::MAX {
                    return Err(PartitionError::NotAPartition {
                        m,
                        reason: format!("element {e} repeated"),
                    });
                }
                owner[e - 1] = b;
            }
        }
        if !m.is_multiple_of(n) {
            return Err(PartitionError::BlockCountDoesNotDivide { m, n });
        }
        let p = Self::from_owner_unchecked(n, owner);
        p.check_shape()?;
        Ok(p)
    }

    /// Builds from 0-based owners without checking the ordered-partition
    /// conditions. Callers guarantee validity.
    pub(crate) fn from_owner_unchecked(n: usize, owner: Vec<usize>) -> Self {
        let per_block = owner.len() / n.max(1);
        let mut blocks = vec![Vec::with_capacity(per_block); n];
        for (idx, &b) in owner.iter().enumerate() {
            blocks[b].push(idx + 1);
        }
        Self { owner, blocks }
    }

    fn check_shape(&self) -> Result<(), PartitionError> {
        let expected = self.owner.len() / self.blocks.len();
        for (b, block) in self.blocks.iter().enumerate() {
            if block.len() != expected {
                return Err(PartitionError::UnequalBlockSizes {
                    block: b + 1,
                    size: block.len(),
                    expected,
                });
            }
        }
        // Rank order is transitive, so adjacent blocks suffice.
        for (b, pair) in self.blocks.windows(2).enumerate() {
            if let Some(l) = pair[0].iter().zip(&pair[1]).position(|(x, y)| x >= y) {
                return Err(PartitionError::RankOrderViolation {
                    i: b + 1,
                    j: b + 2,
                    l: l + 1,
                });
            }
        }
        Ok(())
    }

    /// Every ordered partition of `{1..n·size}` into `n` blocks of `size`,
    /// in lexicographic order of owner sequences.
    pub fn enumerate(n: usize, size: usize) -> Vec<Self> {
        fn go(n: usize, size: usize, counts: &mut [usize], owner: &mut Vec<usize>, out: &mut Vec<OrderedPartition>) {
            if owner.len() == n * size {
                out.push(OrderedPartition::from_owner_unchecked(n, owner.clone()));
                return;
            }
            for b in 0..n {
                if counts[b] < size && (b == 0 || counts[b] < counts[b - 1]) {
                    counts[b] += 1;
                    owner.push(b);
                    go(n, size, counts, owner, out);
                    owner.pop();
                    counts[b] -= 1;
                }
            }
        }
        assert!(n > 0 && size > 0);
        let mut out = Vec::new();
        go(n, size, &mut vec![0; n], &mut Vec::with_capacity(n * size), &mut out);
        out
    }

    /// The partition of `{1..m}` into singletons.
    pub fn identity(m: usize) -> Self {
        assert!(m > 0);
        Self::from_owner_unchecked(m, (0..m).collect())
    }

    pub fn ground_size(&self) -> usize {
        self.owner.len()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self) -> usize {
        self.owner.len() / self.blocks.len()
    }

    /// Block `i` (1-based), ascending.
    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i - 1]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// 1-based block containing element `e`.
    pub fn block_of(&self, e: usize) -> usize {
        self.owner[e - 1] + 1
    }

    /// The 1-based assignment `element -> block`.
    pub fn assignment(&self) -> Vec<usize> {
        self.owner.iter().map(|b| b + 1).collect()
    }

    pub(crate) fn owners(&self) -> &[usize] {
        &self.owner
    }

    pub fn is_identity(&self) -> bool {
        self.owner.iter().enumerate().all(|(i, &b)| i == b)
    }

    fn ensure_same_shape(&self, other: &Self) -> Result<(), PartitionError> {
        if self.ground_size() != other.ground_size() || self.block_count() != other.block_count() {
            return Err(PartitionError::ShapeMismatch(format!(
                "(m={}, n={}) vs (m={}, n={})",
                self.ground_size(),
                self.block_count(),
                other.ground_size(),
                other.block_count()
            )));
        }
        Ok(())
    }

    /// The total order `≼`: at the first element placed differently, the
    /// partition putting it in the earlier block is smaller.
    pub fn compare(&self, other: &Self) -> Result<Ordering, PartitionError> {
        self.ensure_same_shape(other)?;
        Ok(self
            .owner
            .iter()
            .zip(&other.owner)
            .find(|(a, b)| a != b)
            .map_or(Ordering::Equal, |(a, b)| a.cmp(b)))
    }

    /// `self ∘ inner`: block `i` of the result is the union of the blocks
    /// of `self` indexed by block `i` of `inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self, PartitionError> {
        compose(self, inner)
    }

    /// Intersects every block with `{1..prefix}`.
    pub fn restrict_prefix(&self, prefix: usize) -> Result<OrderedSubpartition, PartitionError> {
        let m = self.ground_size();
        if prefix == 0 || prefix > m {
            return Err(PartitionError::OutOfRange {
                value: prefix,
                max: m,
            });
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().copied().take_while(|&e| e <= prefix).collect())
            .collect();
        Ok(OrderedSubpartition::from_blocks_unchecked(prefix, blocks))
    }

    /// Splits every block into maximal runs and lays them out in the
    /// shortest grid `Q_{1,1} < Q_{1,2} < … < Q_{s,n}` whose column `i`
    /// holds runs of block `i`.
    pub fn interleaved_runs(&self) -> RunGrid {
        RunGrid::from_partition(self)
    }
}

/// `outer ∘ inner` for `outer` on `{1..m'}` with `m` blocks and `inner` on
/// `{1..m}`.
pub fn compose(
    outer: &OrderedPartition,
    inner: &OrderedPartition,
) -> Result<OrderedPartition, PartitionError> {
    if outer.block_count() != inner.ground_size() {
        return Err(PartitionError::ShapeMismatch(format!(
            "outer has {} blocks but inner acts on 1..={}",
            outer.block_count(),
            inner.ground_size()
        )));
    }
    let owner = outer.owner.iter().map(|&e| inner.owner[e]).collect();
    Ok(OrderedPartition::from_owner_unchecked(inner.block_count(), owner))
}

impl fmt::Display for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={} n={} blocks=", self.ground_size(), self.block_count())?;
        for (b, block) in self.blocks.iter().enumerate() {
            if b > 0 {
                f.write_str(";")?;
            }
            for (idx, e) in block.iter().enumerate() {
                if idx > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for OrderedPartition {
    type Err = PartitionError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut m = None;
        let mut n = None;
        let mut blocks = None;
        for field in text.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| PartitionError::Parse(format!("expected key=value, got `{field}`")))?;
            let number = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| PartitionError::Parse(format!("bad integer `{v}`")))
            };
            match key {
                "m" => m = Some(number(value)?),
                "n" => n = Some(number(value)?),
                "blocks" => {
                    let parsed = value
                        .split(';')
                        .map(|b| {
                            b.split(',')
                                .filter(|s| !s.is_empty())
                                .map(number)
                                .collect::<Result<Vec<_>, _>>()
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    blocks = Some(parsed);
                }
                other => return Err(PartitionError::Parse(format!("unknown field `{other}`"))),
            }
        }
        let (m, n, blocks) = match (m, n, blocks) {
            (Some(m), Some(n), Some(b)) => (m, n, b),
            _ => return Err(PartitionError::Parse("need m=, n= and blocks=".into())),
        };
        if blocks.len() != n {
            return Err(PartitionError::Parse(format!(
                "declared n={n} but found {} blocks",
                blocks.len()
            )));
        }
        for block in &blocks {
            if block.windows(2).any(|w| w[0] >= w[1]) {
                return Err(PartitionError::Parse("block elements must ascend".into()));
            }
        }
        let p = OrderedPartition::from_blocks(blocks)?;
        if p.ground_size() != m {
            return Err(PartitionError::Parse(format!(
                "declared m={m} but blocks cover {} elements",
                p.ground_size()
            )));
        }
        Ok(p)
    }
}
