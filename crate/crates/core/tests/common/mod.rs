//! Shared by the integration tests.
#![allow(dead_code)]

mod oracle;

pub use oracle::*;

use proptest::prelude::*;
use randtopo::geometry::PointSet;

pub fn points(
    dim: usize,
    n: std::ops::RangeInclusive<usize>,
    span: f64,
) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(prop::collection::vec(-span..span, dim), n)
        .prop_map(move |rows| PointSet::with_duplicates(dim, &rows).unwrap())
}

/// Point sets in dimension 1..=3.
pub fn any_points(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = PointSet> {
    (1usize..=3).prop_flat_map(move |d| points(d, n.clone(), 2.0))
}
