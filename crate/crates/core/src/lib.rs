//! Random Vietoris-Rips and Čech complexes on Poisson point processes.
//!
//! Build a complex, read off its homology, and look for copies of a small
//! complex inside a large random one:
//!
//! ```
//! use randtopo::complex::{cech_complex, rips_complex};
//! use randtopo::fixtures::seven_points;
//! use randtopo::homology::{betti_numbers, Field};
//!
//! let x = seven_points();
//! let rips = rips_complex(&x, 2.4, 3)?.complex;
//! let cech = cech_complex(&x, 2.4, 3)?.complex;
//! assert!(rips.contains(&[0, 1, 2]) && !cech.contains(&[0, 1, 2]));
//! assert_eq!(betti_numbers(&cech, Field::Gf2)?.betti[..2], [1, 2]);
//! # Ok::<(), randtopo::Error>(())
//! ```
//!
//! Modules, bottom up: [`geometry`] (points, boxes, enclosing balls,
//! point-set distances), [`complex`], [`homology`], [`poisson`],
//! [`genericity`], [`detection`] and [`experiment`]. [`io`] holds the file
//! formats used by the `randtopo` command-line tool.

pub mod complex;
pub mod detection;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod genericity;
pub mod geometry;
pub mod homology;
pub mod io;
pub mod poisson;
pub mod seeds;

pub use complex::{Flavor, GeometricComplex, SimplicialComplex};
pub use error::{Error, Result};
pub use geometry::{Cuboid, PointSet};

// Book chapters are compiled here so `cargo test --doc` runs their snippets.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/complexes.md")]
    mod complexes {}
    #[doc = include_str!("../../../book/src/homology.md")]
    mod homology {}
    #[doc = include_str!("../../../book/src/poisson.md")]
    mod poisson {}
    #[doc = include_str!("../../../book/src/genericity.md")]
    mod genericity {}
    #[doc = include_str!("../../../book/src/detection.md")]
    mod detection {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
