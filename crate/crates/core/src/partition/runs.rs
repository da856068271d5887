use std::fmt;

use super::{OrderedPartition, PartitionError};

/// A nonempty contiguous interval `{lo..=hi}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Run {
    pub lo: usize,
    pub hi: usize,
}

impl Run {
    pub fn new(lo: usize, hi: usize) -> Self {
        assert!(lo <= hi, "empty run {lo}..{hi}");
        Self { lo, hi }
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: usize) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Run {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{{{}}}", self.lo)
        } else {
            write!(f, "{{{}..{}}}", self.lo, self.hi)
        }
    }
}

/// Maximal runs of a strictly increasing sequence, in order.
pub fn runs_of(sorted: &[usize]) -> Vec<Run> {
    debug_assert!(sorted.windows(2).all(|w| w[0] < w[1]));
    let mut out: Vec<Run> = Vec::new();
    for &x in sorted {
        match out.last_mut() {
            Some(run) if run.hi + 1 == x => run.hi = x,
            _ => out.push(Run::new(x, x)),
        }
    }
    out
}

/// Blocks `P_1, …, P_n` with `|P_1| ≥ … ≥ |P_n|` and the rank condition
/// holding up to the size of the later block. Trailing empty blocks are
/// dropped, so every stored block is nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedSubpartition {
    ground: usize,
    blocks: Vec<Vec<usize>>,
}

impl OrderedSubpartition {
    pub fn new(ground: usize, blocks: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        let mut seen = vec![false; ground];
        for block in &blocks {
            if block.windows(2).any(|w| w[0] >= w[1]) {
                return Err(PartitionError::NotAPartition {
                    m: ground,
                    reason: "block elements must ascend".into(),
                });
            }
            for &e in block {
                if e == 0 || e > ground || std::mem::replace(&mut seen[e - 1], true) {
                    return Err(PartitionError::NotAPartition {
                        m: ground,
                        reason: format!("element {e} out of range or repeated"),
                    });
                }
            }
        }
        let sub = Self::from_blocks_unchecked(ground, blocks);
        sub.check()?;
        Ok(sub)
    }

    pub(crate) fn from_blocks_unchecked(ground: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        while blocks.last().is_some_and(Vec::is_empty) {
            blocks.pop();
        }
        Self { ground, blocks }
    }

    /// Verifies the weakly-decreasing sizes and the rank condition.
    pub fn check(&self) -> Result<(), PartitionError> {
        for (b, pair) in self.blocks.windows(2).enumerate() {
            if pair[0].len() < pair[1].len() {
                return Err(PartitionError::UnequalBlockSizes {
                    block: b + 2,
                    size: pair[1].len(),
                    expected: pair[0].len(),
                });
            }
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

    pub fn ground_size(&self) -> usize {
        self.ground
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
}

/// Runs of an ordered partition laid out as `rows × columns`, column `i`
/// holding runs of block `i`. Empty cells are `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunGrid {
    columns: usize,
    rows: Vec<Vec<Option<Run>>>,
}

impl RunGrid {
    pub(super) fn from_partition(p: &OrderedPartition) -> Self {
        let columns = p.block_count();
        let mut rows: Vec<Vec<Option<Run>>> = Vec::new();
        let owners = p.owners();
        let mut prev_col: Option<usize> = None;
        let mut start = 0;
        // Each maximal same-block interval of 1..m is one run; it goes in the
        // first cell of its column after the previous run.
        while start < owners.len() {
            let b = owners[start];
            let mut end = start + 1;
            while end < owners.len() && owners[end] == b {
                end += 1;
            }
            if prev_col.is_none_or(|c| b <= c) {
                rows.push(vec![None; columns]);
            }
            rows.last_mut().expect("row pushed above")[b] = Some(Run::new(start + 1, end));
            prev_col = Some(b);
            start = end;
        }
        Self { columns, rows }
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Cell `(j, i)`: row `j`, column (block) `i`, both 1-based.
    pub fn cell(&self, j: usize, i: usize) -> Option<Run> {
        self.rows[j - 1][i - 1]
    }

    pub fn rows(&self) -> &[Vec<Option<Run>>] {
        &self.rows
    }

    /// Cells in the global order `Q_{1,1}, Q_{1,2}, …, Q_{s,n}`.
    pub fn flattened(&self) -> impl Iterator<Item = Option<Run>> + '_ {
        self.rows.iter().flatten().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::tests::{arb_partition, blocks};
    use proptest::prelude::*;

    #[test]
    fn runs_examples() {
        assert_eq!(
            runs_of(&[1, 3, 4, 7]),
            vec![Run::new(1, 1), Run::new(3, 4), Run::new(7, 7)]
        );
        assert!(runs_of(&[]).is_empty());
        assert_eq!(runs_of(&[1, 2, 5, 6]), vec![Run::new(1, 2), Run::new(5, 6)]);
    }

    fn grid(p: &OrderedPartition) -> Vec<Vec<Option<(usize, usize)>>> {
        p.interleaved_runs()
            .rows()
            .iter()
            .map(|r| r.iter().map(|c| c.map(|run| (run.lo, run.hi))).collect())
            .collect()
    }

    #[test]
    fn interleaved_examples() {
        assert_eq!(
            grid(&blocks(&[&[1, 3], &[2, 4]])),
            vec![vec![Some((1, 1)), Some((2, 2))], vec![Some((3, 3)), Some((4, 4))]]
        );
        assert_eq!(
            grid(&blocks(&[&[1, 2], &[3, 4]])),
            vec![vec![Some((1, 2)), Some((3, 4))]]
        );
        assert_eq!(
            grid(&blocks(&[&[1, 2, 5, 6], &[3, 4, 7, 8]])),
            vec![vec![Some((1, 2)), Some((3, 4))], vec![Some((5, 6)), Some((7, 8))]]
        );
    }

    #[test]
    fn interleaved_with_gaps() {
        // Blocks {1,2,3,5},{4,6,7,8}: runs 1..3 | 4 | 5 | 6..8.
        let g = grid(&blocks(&[&[1, 2, 3, 5], &[4, 6, 7, 8]]));
        assert_eq!(
            g,
            vec![vec![Some((1, 3)), Some((4, 4))], vec![Some((5, 5)), Some((6, 8))]]
        );
        // Three blocks, block 2 skipped between two runs of block 1 and 3.
        let p = blocks(&[&[1, 2, 4], &[3, 6, 7], &[5, 8, 9]]);
        let g = p.interleaved_runs();
        let flat: Vec<_> = g.flattened().collect();
        assert_eq!(flat[0], Some(Run::new(1, 2)));
        assert_eq!(flat[1], Some(Run::new(3, 3)));
        assert_eq!(flat[2], None);
        assert_eq!(flat[3], Some(Run::new(4, 4)));
    }

    #[test]
    fn subpartition_checks() {
        assert!(OrderedSubpartition::new(5, vec![vec![1, 2, 5], vec![3, 4]]).is_ok());
        assert!(OrderedSubpartition::new(5, vec![vec![1], vec![2, 3]]).is_err());
        assert!(OrderedSubpartition::new(5, vec![vec![2, 3], vec![1, 4]]).is_err());
        assert!(OrderedSubpartition::new(5, vec![vec![1, 2], vec![2, 3]]).is_err());
        let trimmed = OrderedSubpartition::new(4, vec![vec![1, 2], vec![], vec![]]).unwrap();
        assert_eq!(trimmed.blocks().len(), 1);
    }

    proptest! {
        #[test]
        fn runs_cover_and_are_maximal(set in proptest::collection::btree_set(1usize..60, 0..30)) {
            let sorted: Vec<usize> = set.into_iter().collect();
            let runs = runs_of(&sorted);
            let flat: Vec<usize> = runs.iter().flat_map(|r| r.iter()).collect();
            prop_assert_eq!(&flat, &sorted);
            for pair in runs.windows(2) {
                prop_assert!(pair[0].hi + 1 < pair[1].lo);
            }
        }

        #[test]
        fn grid_is_normalized(p in arb_partition(5, 5)) {
            let g = p.interleaved_runs();
            let flat: Vec<Option<Run>> = g.flattened().collect();
            prop_assert!(flat[0].is_some());
            let last = flat.iter().rposition(Option::is_some).unwrap();
            let mut gap = 0;
            for cell in &flat[..=last] {
                if cell.is_some() { gap = 0 } else { gap += 1 }
                prop_assert!(p.block_count() < 2 || gap < p.block_count() - 1);
            }
            let covered: Vec<usize> = flat.iter().flatten().flat_map(|r| r.iter()).collect();
            prop_assert_eq!(covered, (1..=p.ground_size()).collect::<Vec<_>>());
            for (j, row) in g.rows().iter().enumerate() {
                for (i, cell) in row.iter().enumerate() {
                    if let Some(run) = cell {
                        prop_assert!(run.iter().all(|e| p.block_of(e) == i + 1), "row {}", j);
                    }
                }
            }
        }
    }
}
