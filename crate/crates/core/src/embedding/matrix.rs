//! Complex matrices at a single finite level.
//!
//! Dense storage is row-major and indexed from 0 by `get`/`set`; matrix
//! units `e_{i,j}` use the 1-based indices of the embedding calculus.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{EmbeddingError, RegularEmbedding};

/// Unimodularity and reconstruction tolerance.
pub const PHASE_TOLERANCE: f64 = 1e-9;
/// Tolerance for entries that are exact small integers up to rounding.
pub const EXACT_TOLERANCE: f64 = 1e-12;

/// A `k × k` complex matrix that is zero strictly below the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexUpperTriangular {
    k: usize,
    entries: Vec<Complex64>,
}

impl ComplexUpperTriangular {
    pub fn zeros(k: usize) -> Self {
        Self {
            k,
            entries: vec![Complex64::new(0.0, 0.0); k * k],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k);
        for i in 0..k {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// The matrix unit `e_{i,j}` (1-based, `i ≤ j`).
    pub fn unit(k: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(k);
        m.set(i - 1, j - 1, Complex64::new(1.0, 0.0));
        m
    }

    /// Row-major entries; any nonzero entry below the diagonal is rejected.
    pub fn new(k: usize, entries: Vec<Complex64>) -> Result<Self, EmbeddingError> {
        if entries.len() != k * k {
            return Err(EmbeddingError::ShapeMismatch(format!(
                "{} entries for dimension {k}",
                entries.len()
            )));
        }
        for row in 0..k {
            for col in 0..row {
                if entries[row * k + col] != Complex64::new(0.0, 0.0) {
                    return Err(EmbeddingError::NotUpperTriangular { row, col });
                }
            }
        }
        Ok(Self { k, entries })
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.k + col]
    }

    /// # Panics
    /// Panics when writing a nonzero value below the diagonal.
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        assert!(
            row <= col || value == Complex64::new(0.0, 0.0),
            "entry ({row},{col}) is below the diagonal"
        );
        self.entries[row * self.k + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.k, rhs.k);
        let k = self.k;
        let mut out = Self::zeros(k);
        for r in 0..k {
            for c in r..k {
                let mut acc = Complex64::new(0.0, 0.0);
                for m in r..=c {
                    acc += self.get(r, m) * rhs.get(m, c);
                }
                out.entries[r * k + c] = acc;
            }
        }
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.k, other.k);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for ComplexUpperTriangular {
    /// `dim <k>` then `k` lines of `k` whitespace-separated `re,im` pairs.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {}", self.k)?;
        for r in 0..self.k {
            let row: Vec<String> = (0..self.k)
                .map(|c| {
                    let z = self.get(r, c);
                    format!("{},{}", z.re, z.im)
                })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for ComplexUpperTriangular {
    type Err = EmbeddingError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = |msg: String| EmbeddingError::InvalidDescriptor(msg);
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| bad("empty matrix file".into()))?;
        let k: usize = header
            .strip_prefix("dim")
            .and_then(|rest| rest.trim().parse().ok())
            .ok_or_else(|| bad(format!("expected `dim <k>`, got `{header}`")))?;
        let mut entries = Vec::with_capacity(k * k);
        for row in 0..k {
            let line = lines.next().ok_or_else(|| bad(format!("missing row {}", row + 1)))?;
            let cells: Vec<&str> = line.split_whitespace().collect();
            if cells.len() != k {
                return Err(bad(format!("row {} has {} entries, expected {k}", row + 1, cells.len())));
            }
            for cell in cells {
                let (re, im) = cell
                    .split_once(',')
                    .ok_or_else(|| bad(format!("expected re,im, got `{cell}`")))?;
                let re: f64 = re.parse().map_err(|_| bad(format!("bad number `{re}`")))?;
                let im: f64 = im.parse().map_err(|_| bad(format!("bad number `{im}`")))?;
                entries.push(Complex64::new(re, im));
            }
        }
        if lines.next().is_some() {
            return Err(bad("trailing rows after the matrix".into()));
        }
        Self::new(k, entries)
    }
}

/// A 0/1 matrix with at most one 1 per row and per column, all on or above
/// the diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialPermutationMatrix {
    /// `row_of_col[c]` is the row of the 1 in column `c`.
    row_of_col: Vec<Option<usize>>,
}

impl PartialPermutationMatrix {
    pub fn zeros(k: usize) -> Self {
        Self {
            row_of_col: vec![None; k],
        }
    }

    /// From 0-based `(row, col)` pairs.
    pub fn from_pairs(k: usize, pairs: &[(usize, usize)]) -> Result<Self, EmbeddingError> {
        let mut row_of_col = vec![None; k];
        let mut row_used = vec![false; k];
        for &(r, c) in pairs {
            if r >= k || c >= k {
                return Err(EmbeddingError::IndexOutOfRange { i: r + 1, j: c + 1, k });
            }
            if r > c {
                return Err(EmbeddingError::NotUpperTriangular { row: r, col: c });
            }
            if row_of_col[c].is_some() || std::mem::replace(&mut row_used[r], true) {
                return Err(EmbeddingError::NotNormalizingPartialIsometry(format!(
                    "two entries share row {r} or column {c}"
                )));
            }
            row_of_col[c] = Some(r);
        }
        Ok(Self { row_of_col })
    }

    pub fn dim(&self) -> usize {
        self.row_of_col.len()
    }

    /// 0-based `(row, col)` pairs, ordered by column.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.row_of_col
            .iter()
            .enumerate()
            .filter_map(|(c, r)| r.map(|r| (r, c)))
    }

    pub fn to_matrix(&self) -> ComplexUpperTriangular {
        let mut m = ComplexUpperTriangular::zeros(self.dim());
        for (r, c) in self.pairs() {
            m.set(r, c, Complex64::new(1.0, 0.0));
        }
        m
    }
}

/// A diagonal matrix of unit-modulus phases.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalUnitary {
    phases: Vec<Complex64>,
}

impl DiagonalUnitary {
    pub fn identity(k: usize) -> Self {
        Self {
            phases: vec![Complex64::new(1.0, 0.0); k],
        }
    }

    pub fn new(phases: Vec<Complex64>) -> Result<Self, EmbeddingError> {
        if let Some((index, z)) = phases
            .iter()
            .enumerate()
            .find(|(_, z)| (z.norm() - 1.0).abs() > PHASE_TOLERANCE)
        {
            return Err(EmbeddingError::NonUnimodularPhase {
                index,
                modulus: z.norm(),
            });
        }
        Ok(Self { phases })
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }

    pub fn phase(&self, i: usize) -> Complex64 {
        self.phases[i]
    }

    pub fn to_matrix(&self) -> ComplexUpperTriangular {
        let mut m = ComplexUpperTriangular::zeros(self.dim());
        for (i, z) in self.phases.iter().enumerate() {
            m.set(i, i, *z);
        }
        m
    }

    /// `D·W` as a dense matrix.
    pub fn times(&self, w: &PartialPermutationMatrix) -> ComplexUpperTriangular {
        assert_eq!(self.dim(), w.dim());
        let mut m = ComplexUpperTriangular::zeros(self.dim());
        for (r, c) in w.pairs() {
            m.set(r, c, self.phases[r]);
        }
        m
    }
}

/// Linear extension of the rank-paired unit images.
pub fn apply_to_matrix(
    e: &RegularEmbedding,
    m: &ComplexUpperTriangular,
) -> Result<ComplexUpperTriangular, EmbeddingError> {
    if m.dim() != e.k_from() {
        return Err(EmbeddingError::ShapeMismatch(format!(
            "matrix of dimension {} for an embedding out of T_{}",
            m.dim(),
            e.k_from()
        )));
    }
    let mut out = ComplexUpperTriangular::zeros(e.k_to());
    let diag = e.diag();
    for i in 0..m.dim() {
        for j in i..m.dim() {
            let z = m.get(i, j);
            if z == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (&a, &b) in diag.block(i + 1).iter().zip(diag.block(j + 1)) {
                out.set(a - 1, b - 1, z);
            }
        }
    }
    Ok(out)
}

/// Splits a normalizing partial isometry as `V = D·W` with `W` its 0/1
/// support and `D` the phases of `V` on the rows of that support (1 on
/// rows outside it).
pub fn normalizer_split(
    v: &ComplexUpperTriangular,
) -> Result<(DiagonalUnitary, PartialPermutationMatrix), EmbeddingError> {
    let k = v.dim();
    let mut phases = vec![Complex64::new(1.0, 0.0); k];
    let mut pairs = Vec::new();
    let mut col_used = vec![false; k];
    for (r, phase) in phases.iter_mut().enumerate() {
        let mut found = None;
        for (c, used) in col_used.iter_mut().enumerate().skip(r) {
            let z = v.get(r, c);
            let modulus = z.norm();
            if modulus <= PHASE_TOLERANCE {
                continue;
            }
            if (modulus - 1.0).abs() > PHASE_TOLERANCE {
                return Err(EmbeddingError::NotNormalizingPartialIsometry(format!(
                    "entry ({r},{c}) has modulus {modulus}"
                )));
            }
            if found.is_some() {
                return Err(EmbeddingError::NotNormalizingPartialIsometry(format!(
                    "row {r} has more than one nonzero entry"
                )));
            }
            if std::mem::replace(used, true) {
                return Err(EmbeddingError::NotNormalizingPartialIsometry(format!(
                    "column {c} has more than one nonzero entry"
                )));
            }
            found = Some((c, z));
        }
        if let Some((c, z)) = found {
            *phase = z;
            pairs.push((r, c));
        }
    }
    Ok((
        DiagonalUnitary { phases },
        PartialPermutationMatrix::from_pairs(k, &pairs)?,
    ))
}

/// Diagonal unitary `U = Σ_i θ(e_i)·u_i` removing the phases from the
/// images `θ(e_{i,i+1}) = d_i·w_i`.
///
/// `supports[i]` lists the (0-based) diagonal indices of `θ(e_{i+1})`, and
/// `images[i]` is the split of `θ(e_{i+1,i+2})`. The phases follow
/// `u_1 = 1`, `u_{i+1} = w_i^*·d_i^*·u_i·w_i`; then `U^*·d_i·w_i·U = w_i`.
/// Indices outside every support get phase 1.
pub fn straighten_level(
    images: &[(DiagonalUnitary, PartialPermutationMatrix)],
    supports: &[Vec<usize>],
) -> Result<DiagonalUnitary, EmbeddingError> {
    if supports.is_empty() || images.len() + 1 != supports.len() {
        return Err(EmbeddingError::ShapeMismatch(format!(
            "{} images for {} supports",
            images.len(),
            supports.len()
        )));
    }
    let dim = images.first().map_or_else(
        || supports[0].iter().max().map_or(0, |m| m + 1),
        |(d, _)| d.dim(),
    );
    let mut owner = vec![None; dim];
    for (i, support) in supports.iter().enumerate() {
        for &x in support {
            if x >= dim || owner[x].replace(i).is_some() {
                return Err(EmbeddingError::SupportMismatch(format!(
                    "index {x} is out of range or in two supports"
                )));
            }
        }
    }

    let mut u = vec![Complex64::new(1.0, 0.0); dim];
    for (i, (d, w)) in images.iter().enumerate() {
        if d.dim() != dim || w.dim() != dim {
            return Err(EmbeddingError::ShapeMismatch(format!(
                "image {} has dimension {}, expected {dim}",
                i + 1,
                w.dim()
            )));
        }
        let mut reached = 0;
        for (r, c) in w.pairs() {
            if owner[r] != Some(i) || owner[c] != Some(i + 1) {
                return Err(EmbeddingError::SupportMismatch(format!(
                    "image {} maps column {c} to row {r} outside supports {} → {}",
                    i + 1,
                    i + 2,
                    i + 1
                )));
            }
            let phase = d.phase(r);
            if (phase.norm() - 1.0).abs() > PHASE_TOLERANCE {
                return Err(EmbeddingError::NonUnimodularPhase {
                    index: r,
                    modulus: phase.norm(),
                });
            }
            u[c] = phase.conj() * u[r];
            reached += 1;
        }
        if reached != supports[i + 1].len() {
            return Err(EmbeddingError::SupportMismatch(format!(
                "image {} does not have support {} as its initial projection",
                i + 1,
                i + 2
            )));
        }
    }
    Ok(DiagonalUnitary { phases: u })
}

/// `U^*·V·U` for a diagonal unitary `U`.
pub fn conjugate_by_diagonal(
    v: &ComplexUpperTriangular,
    u: &DiagonalUnitary,
) -> ComplexUpperTriangular {
    assert_eq!(v.dim(), u.dim());
    let mut out = v.clone();
    for r in 0..v.dim() {
        for c in r..v.dim() {
            out.set(r, c, u.phase(r).conj() * v.get(r, c) * u.phase(c));
        }
    }
    out
}
