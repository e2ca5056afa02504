//! Euclidean primitives: points, windows, minimal enclosing balls and
//! point-set distances.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance shared by every geometric comparison in the crate.
pub const REL_TOL: f64 = 1e-9;
/// Absolute floor for [`REL_TOL`].
pub const ABS_TOL: f64 = 1e-12;

/// Tolerance for comparing `a` against `b`.
#[inline]
pub fn tolerance(a: f64, b: f64) -> f64 {
    (REL_TOL * a.abs().max(b.abs())).max(ABS_TOL)
}

/// `a <= b` up to the shared tolerance.
#[inline]
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b + tolerance(a, b)
}

/// `|a - b|` within the shared tolerance.
#[inline]
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= tolerance(a, b)
}

#[inline]
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

/// A point of `R^d` with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if let Some(c) = coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { point: 0, coord: c });
        }
        Ok(Point(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A finite list of points of a common dimension, stored contiguously.
///
/// Point `i` is the vertex labelled `i` in every complex built on the set.
/// Coincident points are rejected unless the set was created with
/// [`PointSet::with_duplicates`].
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    allow_duplicates: bool,
}

impl PointSet {
    /// An empty set in dimension `dim`.
    pub fn empty(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(PointSet {
            dim,
            coords: Vec::new(),
            allow_duplicates: false,
        })
    }

    /// Builds a set from rows, rejecting coincident points.
    pub fn new<R: AsRef<[f64]>>(dim: usize, rows: &[R]) -> Result<Self> {
        let set = Self::build(dim, rows, false)?;
        set.check_duplicates()?;
        Ok(set)
    }

    /// Builds a set from rows, keeping coincident points.
    pub fn with_duplicates<R: AsRef<[f64]>>(dim: usize, rows: &[R]) -> Result<Self> {
        Self::build(dim, rows, true)
    }

    /// Convenience constructor inferring the dimension from the first row.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows
            .first()
            .map(|r| r.as_ref().len())
            .ok_or(Error::Empty("PointSet::from_rows"))?;
        Self::new(dim, rows)
    }

    fn build<R: AsRef<[f64]>>(dim: usize, rows: &[R], allow_duplicates: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            if let Some(c) = row.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite { point: i, coord: c });
            }
            coords.extend_from_slice(row);
        }
        Ok(PointSet {
            dim,
            coords,
            allow_duplicates,
        })
    }

    /// Flat constructor for points produced internally (samplers, scalings).
    pub(crate) fn from_flat(dim: usize, coords: Vec<f64>, allow_duplicates: bool) -> Self {
        debug_assert!(dim > 0 && coords.len().is_multiple_of(dim));
        PointSet {
            dim,
            coords,
            allow_duplicates,
        }
    }

    fn check_duplicates(&self) -> Result<()> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| lex_cmp(self.get(a), self.get(b)).then(a.cmp(&b)));
        for w in order.windows(2) {
            if self.get(w[0]) == self.get(w[1]) {
                return Err(Error::DuplicatePoint {
                    first: w[0].min(w[1]),
                    second: w[0].max(w[1]),
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn allows_duplicates(&self) -> bool {
        self.allow_duplicates
    }

    /// Coordinates of point `i`.
    pub fn get(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    /// Appends a point.
    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.len(),
            });
        }
        if let Some(c) = p.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                point: self.len(),
                coord: c,
            });
        }
        if !self.allow_duplicates {
            if let Some(j) = self.iter().position(|q| q == p) {
                return Err(Error::DuplicatePoint {
                    first: j,
                    second: self.len(),
                });
            }
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    /// The subset of points selected by `keep`, order preserved.
    pub fn filter(&self, mut keep: impl FnMut(&[f64]) -> bool) -> PointSet {
        let mut coords = Vec::new();
        for p in self.iter() {
            if keep(p) {
                coords.extend_from_slice(p);
            }
        }
        PointSet::from_flat(self.dim, coords, self.allow_duplicates)
    }

    /// The points at the given indices, in that order.
    pub fn select(&self, indices: &[usize]) -> PointSet {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.get(i));
        }
        PointSet::from_flat(self.dim, coords, self.allow_duplicates)
    }

    /// Every coordinate multiplied by `factor` (scaling about the origin).
    pub fn scaled(&self, factor: f64) -> PointSet {
        PointSet::from_flat(
            self.dim,
            self.coords.iter().map(|x| x * factor).collect(),
            self.allow_duplicates,
        )
    }

    pub fn translated(&self, by: &[f64]) -> Result<PointSet> {
        if by.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: by.len(),
            });
        }
        let coords = self
            .coords
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().zip(by).map(|(x, v)| x + v))
            .collect();
        Ok(PointSet::from_flat(self.dim, coords, self.allow_duplicates))
    }

    /// Smallest axis-aligned box containing all points; `None` when empty.
    ///
    /// Degenerate extents are allowed here (a single point gives a zero-volume
    /// box), unlike [`Cuboid::new`].
    pub fn bounding_box(&self) -> Option<Cuboid> {
        if self.is_empty() {
            return None;
        }
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.iter() {
            for (i, &x) in p.iter().enumerate() {
                lo[i] = lo[i].min(x);
                hi[i] = hi[i].max(x);
            }
        }
        Some(Cuboid { lo, hi })
    }

    /// Smallest pairwise distance, `None` for fewer than two points.
    pub fn min_pairwise_distance(&self) -> Option<f64> {
        let n = self.len();
        let mut best: Option<f64> = None;
        for i in 0..n {
            for j in i + 1..n {
                let d = dist(self.get(i), self.get(j));
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
        best
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// An axis-aligned box `[lo_1, hi_1] x ... x [lo_d, hi_d]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Cuboid {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Cuboid {
    /// A box with strictly positive extent on every axis.
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        for (i, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::InvalidWindow(format!(
                    "axis {i}: need a < b, got [{a}, {b}]"
                )));
            }
        }
        Ok(Cuboid { lo, hi })
    }

    /// `[0, side]^d`.
    pub fn cube(dim: usize, side: f64) -> Result<Self> {
        Cuboid::new(vec![0.0; dim], vec![side; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn sides(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.side(i)).collect()
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.side(i)).product()
    }

    /// Closed containment.
    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (a, b))| *a <= *x && *x <= *b)
    }

    /// Euclidean distance from `p` to the box (zero inside).
    pub fn distance_to(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(x, (a, b))| {
                let e = (a - x).max(0.0).max(x - b);
                e * e
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Distance from an interior point to the box boundary.
    pub fn depth(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(x, (a, b))| (x - a).min(b - x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Every face pushed outwards by `r` (negative `r` shrinks).
    pub fn expanded(&self, r: f64) -> Result<Cuboid> {
        Cuboid::new(
            self.lo.iter().map(|a| a - r).collect(),
            self.hi.iter().map(|b| b + r).collect(),
        )
    }

    /// Like [`Cuboid::expanded`] but accepts a degenerate source box.
    pub(crate) fn expanded_unchecked(&self, r: f64) -> Cuboid {
        Cuboid {
            lo: self.lo.iter().map(|a| a - r).collect(),
            hi: self.hi.iter().map(|b| b + r).collect(),
        }
    }

    /// Volume of the Minkowski sum of the box with a closed ball of radius `r`.
    ///
    /// Exact: the sum decomposes into products of the box's faces with
    /// orthogonal ball pieces, giving
    /// `sum_k e_k(sides) * kappa_{d-k} * r^{d-k}` with `e_k` the elementary
    /// symmetric polynomials of the side lengths.
    pub fn dilated_volume(&self, r: f64) -> f64 {
        let d = self.dim();
        // e[k] = k-th elementary symmetric polynomial of the sides.
        let mut e = vec![0.0; d + 1];
        e[0] = 1.0;
        for i in 0..d {
            let s = self.side(i);
            for k in (1..=i + 1).rev() {
                e[k] += e[k - 1] * s;
            }
        }
        (0..=d)
            .map(|k| e[k] * ball_volume(d - k) * r.powi((d - k) as i32))
            .sum()
    }
}

impl TryFrom<Vec<[f64; 2]>> for Cuboid {
    type Error = Error;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        Cuboid::new(
            v.iter().map(|p| p[0]).collect(),
            v.iter().map(|p| p[1]).collect(),
        )
    }
}

impl From<Cuboid> for Vec<[f64; 2]> {
    fn from(c: Cuboid) -> Self {
        c.lo.into_iter().zip(c.hi).map(|(a, b)| [a, b]).collect()
    }
}

/// A closed ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    /// Containment with the shared tolerance.
    pub fn contains(&self, p: &[f64]) -> bool {
        self.radius >= 0.0 && approx_le(dist(&self.center, p), self.radius)
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        })
    } else {
        Ok(())
    }
}

/// `||a - b||_2`.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dims(a.len(), b.len())?;
    Ok(dist(a, b))
}

/// The smallest closed ball containing every point of `set`.
///
/// Randomized incremental construction with move-to-front; the shuffle is
/// seeded from the input size, so the result is a pure function of the input.
pub fn minimal_enclosing_ball(set: &PointSet) -> Result<Ball> {
    if set.is_empty() {
        return Err(Error::Empty("minimal_enclosing_ball"));
    }
    let pts: Vec<&[f64]> = set.iter().collect();
    Ok(enclosing_ball(&pts))
}

const SHUFFLE_SEED: u64 = 0x6d65_625f_7368_7566;

/// Minimal enclosing ball of a nonempty slice of points.
pub(crate) fn enclosing_ball(points: &[&[f64]]) -> Ball {
    debug_assert!(!points.is_empty());
    let dim = points[0].len();
    let mut order: Vec<usize> = (0..points.len()).collect();
    if points.len() > dim + 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(SHUFFLE_SEED ^ points.len() as u64);
        order.shuffle(&mut rng);
    }
    let mut support = Vec::with_capacity(dim + 1);
    let end = order.len();
    let mut ball = move_to_front(points, &mut order, end, &mut support, dim);
    // Tighten the radius so every point is contained exactly.
    ball.radius = points
        .iter()
        .map(|p| dist(&ball.center, p))
        .fold(0.0, f64::max);
    ball
}

fn move_to_front(
    points: &[&[f64]],
    order: &mut [usize],
    end: usize,
    support: &mut Vec<usize>,
    dim: usize,
) -> Ball {
    let mut ball = ball_through(points, support, dim);
    if support.len() == dim + 1 {
        return ball;
    }
    for i in 0..end {
        let p = order[i];
        if !ball.contains(points[p]) {
            support.push(p);
            ball = move_to_front(points, order, i, support, dim);
            support.pop();
            order[..=i].rotate_right(1);
        }
    }
    ball
}

/// Smallest ball with every support point on its boundary.
fn ball_through(points: &[&[f64]], support: &[usize], dim: usize) -> Ball {
    match support.len() {
        0 => Ball {
            center: vec![0.0; dim],
            radius: -1.0,
        },
        1 => Ball {
            center: points[support[0]].to_vec(),
            radius: 0.0,
        },
        _ => circumball(points, support).unwrap_or_else(|| degenerate_ball(points, support)),
    }
}

/// Circumscribed ball of the support points inside their affine hull, or
/// `None` when they are affinely dependent.
fn circumball(points: &[&[f64]], support: &[usize]) -> Option<Ball> {
    let origin = points[support[0]];
    let vs: Vec<Vec<f64>> = support[1..]
        .iter()
        .map(|&j| points[j].iter().zip(origin).map(|(a, b)| a - b).collect())
        .collect();
    let k = vs.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    // Augmented Gram system  sum_l 2 (v_j . v_l) lambda_l = |v_j|^2.
    let mut m: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let mut row: Vec<f64> = (0..k).map(|l| 2.0 * dot(&vs[j], &vs[l])).collect();
            row.push(dot(&vs[j], &vs[j]));
            row
        })
        .collect();
    let scale = (0..k).map(|j| m[j][j]).fold(0.0, f64::max);
    let lambda = solve_in_place(&mut m, scale * 1e-12)?;
    let mut center = origin.to_vec();
    for (l, v) in lambda.iter().zip(&vs) {
        for (c, x) in center.iter_mut().zip(v) {
            *c += l * x;
        }
    }
    let radius = dist(&center, origin);
    Some(Ball { center, radius })
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_in_place(m: &mut [Vec<f64>], eps: f64) -> Option<Vec<f64>> {
    let k = m.len();
    for col in 0..k {
        let pivot = (col..k).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() <= eps {
            return None;
        }
        m.swap(col, pivot);
        for row in col + 1..k {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for c in col..=k {
                    m[row][c] -= f * m[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|c| m[row][c] * x[c]).sum();
        x[row] = (m[row][k] - s) / m[row][row];
    }
    Some(x)
}

/// Fallback for affinely dependent support sets: the smallest circumball of
/// a subset that still covers the whole support.
fn degenerate_ball(points: &[&[f64]], support: &[usize]) -> Ball {
    let k = support.len();
    let mut best: Option<Ball> = None;
    for mask in 1u32..(1 << k) - 1 {
        let sub: Vec<usize> = (0..k)
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| support[b])
            .collect();
        let ball = match sub.len() {
            1 => Ball {
                center: points[sub[0]].to_vec(),
                radius: 0.0,
            },
            _ => match circumball(points, &sub) {
                Some(b) => b,
                None => continue,
            },
        };
        if support.iter().all(|&j| ball.contains(points[j]))
            && best.as_ref().is_none_or(|b| ball.radius < b.radius)
        {
            best = Some(ball);
        }
    }
    best.expect("a pair of support points always yields a covering ball")
}

/// Classical Hausdorff distance between two nonempty point sets.
pub fn hausdorff_distance(x: &PointSet, y: &PointSet) -> Result<f64> {
    check_dims(x.dim(), y.dim())?;
    if x.is_empty() || y.is_empty() {
        return Err(Error::Empty("hausdorff_distance"));
    }
    let directed = |a: &PointSet, b: &PointSet| {
        a.iter()
            .map(|p| b.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(x, y).max(directed(y, x)))
}

/// Bottleneck distance between point sets: the minimum over bijections of the
/// largest matched displacement, or infinity when the sizes differ.
///
/// Exact: binary search over the sorted pairwise distances, testing each
/// threshold for a perfect matching with augmenting paths.
pub fn bottleneck_set_distance(x: &PointSet, y: &PointSet) -> Result<f64> {
    check_dims(x.dim(), y.dim())?;
    if x.len() != y.len() {
        return Ok(f64::INFINITY);
    }
    let n = x.len();
    if n == 0 {
        return Ok(0.0);
    }
    let d: Vec<Vec<f64>> = x
        .iter()
        .map(|p| y.iter().map(|q| dist(p, q)).collect())
        .collect();
    let mut candidates: Vec<f64> = d.iter().flatten().copied().collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_perfect_matching(&d, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo])
}

/// The bijection (as `x index -> y index`) realizing the bottleneck distance.
pub fn bottleneck_matching(x: &PointSet, y: &PointSet) -> Result<Option<Vec<usize>>> {
    let value = bottleneck_set_distance(x, y)?;
    if !value.is_finite() {
        return Ok(None);
    }
    let d: Vec<Vec<f64>> = x
        .iter()
        .map(|p| y.iter().map(|q| dist(p, q)).collect())
        .collect();
    Ok(max_matching(&d, value).map(|m| {
        let mut of_x = vec![0; x.len()];
        for (j, i) in m.into_iter().enumerate() {
            of_x[i] = j;
        }
        of_x
    }))
}

fn has_perfect_matching(d: &[Vec<f64>], threshold: f64) -> bool {
    max_matching(d, threshold).is_some()
}

/// Perfect matching on the threshold graph, returned as `y index -> x index`.
fn max_matching(d: &[Vec<f64>], threshold: f64) -> Option<Vec<usize>> {
    let n = d.len();
    let mut match_y: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, d, threshold, &mut seen, &mut match_y) {
            return None;
        }
    }
    Some(match_y.into_iter().map(|m| m.expect("perfect")).collect())
}

fn augment(
    i: usize,
    d: &[Vec<f64>],
    threshold: f64,
    seen: &mut [bool],
    match_y: &mut [Option<usize>],
) -> bool {
    for j in 0..d.len() {
        if d[i][j] <= threshold && !seen[j] {
            seen[j] = true;
            if match_y[j].is_none_or(|k| augment(k, d, threshold, seen, match_y)) {
                match_y[j] = Some(i);
                return true;
            }
        }
    }
    false
}

/// Volume of the unit ball in `R^d`, `pi^{d/2} / Gamma(d/2 + 1)`.
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    Ok(ball_volume(d))
}

/// `kappa_d` with `kappa_0 = 1`, via `kappa_d = kappa_{d-2} * 2 pi / d`.
pub(crate) fn ball_volume(d: usize) -> f64 {
    let even = d.is_multiple_of(2);
    let mut k = if even { 1.0 } else { 2.0 };
    let mut j = if even { 2 } else { 3 };
    while j <= d {
        k *= 2.0 * std::f64::consts::PI / j as f64;
        j += 2;
    }
    k
}
