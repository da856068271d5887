//! Run-size monotonicity under a unital embedding.
//!
//! Given runs `R_1 < … < R_n` in `{1..r}`, runs `S_1 < … < S_n (< S_{n+1})`
//! in `{1..s}` with `|S_1| = … = |S_n| ≥ 1`, and a unital embedding
//! `θ: T_r → T_s` with `θ(∪R) = ∪S` and `θ(R_i) ⊇ S_i`, the source runs
//! must satisfy `|R_1| ≤ … ≤ |R_n|`. [`psize_oracle`] checks the
//! hypotheses and then reports whether the conclusion holds, so it can be
//! swept over many configurations as a test oracle.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{OrderedPartition, Run};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunSizeHypothesis {
    /// No source runs were given.
    NoRuns,
    /// A run leaves `{1..r}` or `{1..s}`.
    RunOutOfRange,
    /// Runs are not strictly ordered `R_1 < R_2 < …`.
    RunsNotOrdered,
    /// Target runs must number `n` or `n + 1`.
    TargetRunCount,
    /// `|S_1| = … = |S_n|` fails.
    UnequalTargetRuns,
    /// `θ(∪R) ≠ ∪S`.
    ImageMismatch,
    /// `θ(R_i) ⊉ S_i` for the given 1-based `i`.
    MissingContainment(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("hypothesis violated: {0:?}")]
pub struct HypothesisViolated(pub RunSizeHypothesis);

fn check_runs(runs: &[Run], bound: usize) -> Result<(), HypothesisViolated> {
    if runs.iter().any(|r| r.lo == 0 || r.hi > bound) {
        return Err(HypothesisViolated(RunSizeHypothesis::RunOutOfRange));
    }
    if runs.windows(2).any(|w| w[0].hi >= w[1].lo) {
        return Err(HypothesisViolated(RunSizeHypothesis::RunsNotOrdered));
    }
    Ok(())
}

/// `source` are the runs `R_i` in `{1..r}`, `target` the runs `S_i` in
/// `{1..s}` (with `S_{n+1}` optional), and `embedding` the ordered
/// partition of `{1..s}` into `r` blocks describing `θ` on the diagonal.
pub fn psize_oracle(
    source: &[Run],
    target: &[Run],
    embedding: &OrderedPartition,
) -> Result<bool, HypothesisViolated> {
    use RunSizeHypothesis::*;
    let n = source.len();
    if n == 0 {
        return Err(HypothesisViolated(NoRuns));
    }
    check_runs(source, embedding.block_count())?;
    check_runs(target, embedding.ground_size())?;
    if target.len() != n && target.len() != n + 1 {
        return Err(HypothesisViolated(TargetRunCount));
    }
    let width = target[0].len();
    if target[..n].iter().any(|s| s.len() != width) {
        return Err(HypothesisViolated(UnequalTargetRuns));
    }

    let image_of = |run: &Run| -> BTreeSet<usize> {
        run.iter()
            .flat_map(|x| embedding.block(x).iter().copied())
            .collect()
    };
    let image: BTreeSet<usize> = source.iter().flat_map(image_of).collect();
    let covered: BTreeSet<usize> = target.iter().flat_map(Run::iter).collect();
    if image != covered {
        return Err(HypothesisViolated(ImageMismatch));
    }
    for (i, (r, s)) in source.iter().zip(target).enumerate() {
        let img = image_of(r);
        if !s.iter().all(|x| img.contains(&x)) {
            return Err(HypothesisViolated(MissingContainment(i + 1)));
        }
    }

    Ok(source.windows(2).all(|w| w[0].len() <= w[1].len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::tests::blocks;

    #[test]
    fn single_run() {
        let theta = blocks(&[&[1, 3], &[2, 4]]);
        assert_eq!(
            psize_oracle(&[Run::new(1, 2)], &[Run::new(1, 4)], &theta),
            Ok(true)
        );
    }

    #[test]
    fn nest_doubling() {
        let theta = blocks(&[&[1, 2], &[3, 4], &[5, 6]]);
        let source = [Run::new(1, 1), Run::new(2, 3)];
        let target = [Run::new(1, 2), Run::new(3, 4), Run::new(5, 6)];
        assert_eq!(psize_oracle(&source, &target, &theta), Ok(true));
    }

    #[test]
    fn hypothesis_failures() {
        let theta = blocks(&[&[1, 2], &[3, 4], &[5, 6]]);
        let err = |source: &[Run], target: &[Run]| psize_oracle(source, target, &theta).unwrap_err().0;
        assert_eq!(err(&[], &[]), RunSizeHypothesis::NoRuns);
        assert_eq!(err(&[Run::new(1, 4)], &[Run::new(1, 6)]), RunSizeHypothesis::RunOutOfRange);
        assert_eq!(
            err(&[Run::new(2, 2), Run::new(1, 1)], &[Run::new(1, 2), Run::new(3, 4)]),
            RunSizeHypothesis::RunsNotOrdered
        );
        assert_eq!(
            err(&[Run::new(1, 1)], &[Run::new(1, 1), Run::new(2, 2), Run::new(3, 3)]),
            RunSizeHypothesis::TargetRunCount
        );
        assert_eq!(
            err(&[Run::new(1, 1), Run::new(2, 3)], &[Run::new(1, 2), Run::new(3, 3), Run::new(4, 6)]),
            RunSizeHypothesis::UnequalTargetRuns
        );
        assert_eq!(err(&[Run::new(1, 1)], &[Run::new(1, 1)]), RunSizeHypothesis::ImageMismatch);
        // θ(R_2) = {3,4} does not contain S_2 = {2}.
        assert_eq!(
            err(&[Run::new(1, 1), Run::new(2, 2)], &[Run::new(1, 1), Run::new(2, 2), Run::new(3, 4)]),
            RunSizeHypothesis::MissingContainment(2)
        );
    }
}
