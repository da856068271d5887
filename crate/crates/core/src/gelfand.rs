//! Finite-depth points of the diagonal's Gelfand space `∏ [k_n/k_{n-1}]`
//! and the order the matrix units induce on tail-equivalent points.
//!
//! A point is approximated by its first `N` coordinates together with a
//! label naming its tail beyond depth `N`; two points are comparable only
//! when they carry the same label and depth. Coordinate `x_1` picks the
//! diagonal unit `i_1 = x_1 + 1` of `T_{k_1}`, and `x_{n+1}` picks the
//! `(x_{n+1}+1)`-th smallest element of the image block of `i_n`.

use std::cmp::Ordering;

use thiserror::Error;

use crate::tower::{TowerError, TowerSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GelfandError {
    #[error("points have depths {left} and {right}")]
    DepthMismatch { left: usize, right: usize },
    #[error("coordinate x_{index} = {value} is outside 0..{bound}")]
    CoordinateOutOfRange { index: usize, value: usize, bound: usize },
    #[error("a point needs at least one coordinate")]
    EmptyPoint,
    #[error(transparent)]
    Tower(#[from] TowerError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GelfandPoint {
    coords: Vec<usize>,
    tail: String,
}

impl GelfandPoint {
    /// Checks every coordinate against its range `0..k_n/k_{n-1}`.
    pub fn new(tower: &TowerSpec, coords: Vec<usize>, tail: impl Into<String>) -> Result<Self, GelfandError> {
        if coords.is_empty() {
            return Err(GelfandError::EmptyPoint);
        }
        for (idx, &value) in coords.iter().enumerate() {
            let bound = coordinate_range(tower, idx + 1);
            if value >= bound {
                return Err(GelfandError::CoordinateOutOfRange {
                    index: idx + 1,
                    value,
                    bound,
                });
            }
        }
        Ok(Self {
            coords,
            tail: tail.into(),
        })
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn depth(&self) -> usize {
        self.coords.len()
    }

    pub fn tail(&self) -> &str {
        &self.tail
    }
}

/// `k_1` for `n = 1`, otherwise the ratio `k_n / k_{n-1}`.
pub fn coordinate_range(tower: &TowerSpec, n: usize) -> usize {
    if n == 1 {
        tower.k1()
    } else {
        tower.descriptor(n - 1).ratio()
    }
}

/// Every point of depth `depth` with the given tail label, in
/// lexicographic order of coordinates.
pub fn all_points(tower: &TowerSpec, depth: usize, tail: &str) -> Vec<GelfandPoint> {
    let mut points = vec![Vec::new()];
    for n in 1..=depth {
        let r = coordinate_range(tower, n);
        points = points
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..r).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    points
        .into_iter()
        .map(|coords| GelfandPoint {
            coords,
            tail: tail.to_string(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointOrder {
    Less,
    Equal,
    Greater,
    Incomparable,
}

impl From<Ordering> for PointOrder {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => PointOrder::Less,
            Ordering::Equal => PointOrder::Equal,
            Ordering::Greater => PointOrder::Greater,
        }
    }
}

/// A witness `e_{i,j}` at level `depth` that `x ≤ y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationPair {
    pub x: GelfandPoint,
    pub y: GelfandPoint,
    pub depth: usize,
    pub i: usize,
    pub j: usize,
}

fn check_pair(x: &GelfandPoint, y: &GelfandPoint) -> Result<bool, GelfandError> {
    if x.depth() != y.depth() {
        return Err(GelfandError::DepthMismatch {
            left: x.depth(),
            right: y.depth(),
        });
    }
    Ok(x.tail == y.tail)
}

/// Diagonal indices `i_1, …, i_N` selected by the coordinates.
pub fn projection_chain(tower: &TowerSpec, x: &GelfandPoint) -> Result<Vec<usize>, GelfandError> {
    let mut chain = Vec::with_capacity(x.depth());
    chain.push(x.coords[0] + 1);
    for n in 1..x.depth() {
        let phi = tower.embedding(n)?;
        let parent = chain[n - 1];
        chain.push(phi.diag().block(parent)[x.coords[n]]);
    }
    Ok(chain)
}

/// Positional digits of the point, most significant first. For an
/// alternating step `A ↦ I_s ⊗ A ⊗ I_t` the coordinate `x = a·t + b`
/// contributes an outer digit `a` and an inner digit `b`; the unit index
/// `i_N - 1` is the mixed-radix number `a_N … a_2 x_1 b_2 … b_N`.
pub fn digit_word(tower: &TowerSpec, x: &GelfandPoint) -> Result<Vec<usize>, GelfandError> {
    if !tower.is_alternating_form() {
        return Err(TowerError::NotAlternatingTower.into());
    }
    let mut outer = Vec::with_capacity(x.depth());
    let mut inner = Vec::with_capacity(x.depth());
    for n in 2..=x.depth() {
        let (_, t) = tower.descriptor(n - 1).split().expect("alternating form");
        outer.push(x.coords[n - 1] / t);
        inner.push(x.coords[n - 1] % t);
    }
    outer.reverse();
    outer.push(x.coords[0]);
    outer.extend(inner);
    Ok(outer)
}

/// Lexicographic order of the digit words of tail-equivalent points.
pub fn gelfand_compare(tower: &TowerSpec, x: &GelfandPoint, y: &GelfandPoint) -> Result<PointOrder, GelfandError> {
    if !check_pair(x, y)? {
        return Ok(PointOrder::Incomparable);
    }
    Ok(digit_word(tower, x)?.cmp(&digit_word(tower, y)?).into())
}

/// Whether `e_{i_n, j_n}` carries the tail of `x` onto the tail of `y`:
/// `i_n ≤ j_n`, and for every deeper level `e_{i_{m}, j_{m}}` is one of
/// the summands of the chained image of `e_{i_n, j_n}`.
fn witnesses_at(tower: &TowerSpec, ix: &[usize], jy: &[usize], n: usize) -> Result<bool, GelfandError> {
    if ix[n - 1] > jy[n - 1] {
        return Ok(false);
    }
    for m in n..ix.len() {
        let phi = tower.embedding(m)?;
        let image = phi
            .image_of_unit(ix[m - 1], jy[m - 1])
            .map_err(TowerError::from)?;
        if !image.contains(&(ix[m], jy[m])) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn first_witness(tower: &TowerSpec, ix: &[usize], jy: &[usize]) -> Result<Option<usize>, GelfandError> {
    for n in 1..=ix.len() {
        if witnesses_at(tower, ix, jy, n)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Order read off the projection chains: `x ≤ y` when some level `n`
/// has a matrix unit `e_{i_n, j_n}` whose chained images link the two
/// chains from `n` on.
pub fn gelfand_compare_via_projections(
    tower: &TowerSpec,
    x: &GelfandPoint,
    y: &GelfandPoint,
) -> Result<PointOrder, GelfandError> {
    if !check_pair(x, y)? {
        return Ok(PointOrder::Incomparable);
    }
    let ix = projection_chain(tower, x)?;
    let jy = projection_chain(tower, y)?;
    if ix == jy {
        return Ok(PointOrder::Equal);
    }
    let x_le_y = first_witness(tower, &ix, &jy)?.is_some();
    let y_le_x = first_witness(tower, &jy, &ix)?.is_some();
    Ok(match (x_le_y, y_le_x) {
        (true, false) => PointOrder::Less,
        (false, true) => PointOrder::Greater,
        (true, true) => PointOrder::Equal,
        (false, false) => PointOrder::Incomparable,
    })
}

/// The minimal-depth witness that `x ≤ y`, if any. `depth` must equal the
/// depth of both points.
pub fn relation_member(
    tower: &TowerSpec,
    x: &GelfandPoint,
    y: &GelfandPoint,
    depth: usize,
) -> Result<Option<RelationPair>, GelfandError> {
    if !check_pair(x, y)? {
        return Ok(None);
    }
    if depth != x.depth() {
        return Err(GelfandError::DepthMismatch {
            left: depth,
            right: x.depth(),
        });
    }
    let ix = projection_chain(tower, x)?;
    let jy = projection_chain(tower, y)?;
    Ok(first_witness(tower, &ix, &jy)?.map(|n| RelationPair {
        x: x.clone(),
        y: y.clone(),
        depth: n,
        i: ix[n - 1],
        j: jy[n - 1],
    }))
}
