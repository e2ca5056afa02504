//! Čech and Rips representations: checking them, measuring how far a point
//! set sits from every face threshold, and rescaling degenerate sets so that
//! small perturbations no longer change the complex.
//!
//! Both face tests are phrased against a threshold: pairwise distance against
//! `rho` for Rips, enclosing-ball radius against `tau = rho / 2` for Čech.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::complex::{
    build_complex, combinatorially_equivalent, default_cech_dim_cap, default_rips_dim_cap, Flavor,
    SimplicialComplex, Vertex, VertexMap, MAX_RIPS_DIM_CAP,
};
use crate::error::{Error, Result};
use crate::geometry::{self, approx_eq, Ball, PointSet};
use crate::seeds;

/// Which subsets the Čech margin ranges over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MarginScope {
    /// Subsets with `2 ..= d + 2` points. Every enclosing ball is determined
    /// by at most `d + 1` of its points, so no radius is missed.
    #[default]
    SupportBounded,
    /// Every subset with at least two points; exponential, for audits.
    AllSubsets,
}

/// Visits every subset of `2 ..= max_size` points with its enclosing-ball
/// radius. Balls are reused when an added point is already inside.
fn for_each_subset_radius(
    points: &PointSet,
    max_size: usize,
    mut visit: impl FnMut(&[usize], f64),
) {
    fn rec(
        points: &PointSet,
        max_size: usize,
        subset: &mut Vec<usize>,
        ball: &Ball,
        visit: &mut dyn FnMut(&[usize], f64),
    ) {
        let start = subset.last().map_or(0, |&i| i + 1);
        for j in start..points.len() {
            let p = points.get(j);
            let next = if geometry::dist(&ball.center, p) <= ball.radius {
                ball.clone()
            } else {
                let mut pts: Vec<&[f64]> = subset.iter().map(|&i| points.get(i)).collect();
                pts.push(p);
                geometry::enclosing_ball(&pts)
            };
            subset.push(j);
            if subset.len() >= 2 {
                visit(subset, next.radius);
            }
            if subset.len() < max_size {
                rec(points, max_size, subset, &next, visit);
            }
            subset.pop();
        }
    }
    let mut subset = Vec::with_capacity(max_size);
    let empty = Ball {
        center: vec![0.0; points.dim()],
        radius: -1.0,
    };
    rec(points, max_size, &mut subset, &empty, &mut visit);
}

fn pair_distances(points: &PointSet) -> impl Iterator<Item = f64> + '_ {
    let n = points.len();
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| geometry::dist(points.get(i), points.get(j))))
}

fn subset_cap(points: &PointSet, scope: MarginScope) -> usize {
    match scope {
        MarginScope::SupportBounded => points.dim() + 2,
        MarginScope::AllSubsets => points.len(),
    }
}

/// Distance of the set from the nearest face threshold: the minimum of
/// `|r_A - rho/2|` over subsets `A` for Čech, of `| ||x - y|| - rho |` over
/// pairs for Rips. Zero when some subset sits on the threshold (within the
/// shared tolerance); infinite for fewer than two points.
pub fn genericity_margin(points: &PointSet, rho: f64, flavor: Flavor) -> f64 {
    genericity_margin_with(points, rho, flavor, MarginScope::default())
}

/// [`genericity_margin`] with an explicit subset scope.
pub fn genericity_margin_with(
    points: &PointSet,
    rho: f64,
    flavor: Flavor,
    scope: MarginScope,
) -> f64 {
    let mut margin = f64::INFINITY;
    let mut fold = |value: f64, threshold: f64| {
        let gap = if approx_eq(value, threshold) {
            0.0
        } else {
            (value - threshold).abs()
        };
        margin = margin.min(gap);
    };
    match flavor {
        Flavor::Rips => pair_distances(points).for_each(|d| fold(d, rho)),
        Flavor::Cech => {
            let tau = rho / 2.0;
            for_each_subset_radius(points, subset_cap(points, scope), |_, r| fold(r, tau));
        }
    }
    margin
}

/// Largest bottleneck perturbation that provably keeps the complex: the
/// margin itself for Čech, half of it for Rips (distances move by up to
/// twice the point displacement).
pub fn stability_radius(points: &PointSet, rho: f64, flavor: Flavor) -> f64 {
    let m = genericity_margin(points, rho, flavor);
    match flavor {
        Flavor::Cech => m,
        Flavor::Rips => m / 2.0,
    }
}

/// Output of [`make_generic`].
#[derive(Clone, Debug, PartialEq)]
pub struct Rescaled {
    pub points: PointSet,
    /// Factor applied about the origin (1 when unchanged).
    pub scale: f64,
    /// Distance of the nearest non-face above the threshold, when rescaled.
    pub gap: Option<f64>,
}

/// Makes a representation generic.
///
/// With a positive margin the set is already generic and returned as is
/// (unless `force`). Otherwise, with `gap` the smallest amount by which a
/// non-face exceeds the threshold `s`, every point is scaled about the
/// origin by `s / (s + 0.9 gap)`: faces on the threshold move strictly
/// inside it while non-faces stay strictly outside. A complete complex has no
/// non-face; `gap = s` is used then.
pub fn make_generic(points: &PointSet, rho: f64, flavor: Flavor, force: bool) -> Result<Rescaled> {
    check_rho(rho)?;
    let unchanged = || Rescaled {
        points: points.clone(),
        scale: 1.0,
        gap: None,
    };
    if points.len() < 2 {
        return Ok(unchanged());
    }
    if !force && genericity_margin(points, rho, flavor) > 0.0 {
        return Ok(unchanged());
    }
    let threshold = match flavor {
        Flavor::Rips => rho,
        Flavor::Cech => rho / 2.0,
    };
    let mut gap = f64::INFINITY;
    let mut fold = |value: f64| {
        if value > threshold && !approx_eq(value, threshold) {
            gap = gap.min(value - threshold);
        }
    };
    match flavor {
        Flavor::Rips => pair_distances(points).for_each(&mut fold),
        Flavor::Cech => {
            for_each_subset_radius(points, points.dim() + 2, |_, r| fold(r));
        }
    }
    if !gap.is_finite() {
        gap = threshold;
    }
    let scale = threshold / (threshold + 0.9 * gap);
    Ok(Rescaled {
        points: points.scaled(scale),
        scale,
        gap: Some(gap),
    })
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "rho must be positive, got {rho}"
        )))
    }
}

/// Dimension cap used when comparing a built complex with `target`: one
/// above the target's cap so extra faces are seen, unless the target itself
/// is truncated.
pub fn representation_dim_cap(points: &PointSet, target: &SimplicialComplex) -> usize {
    if target.is_truncated() {
        target.dim_cap()
    } else {
        (target.dim_cap() + 1)
            .min(points.len().saturating_sub(1))
            .max(1)
    }
}

/// Dimension cap for rebuilding a set on its own (genericity checks).
pub fn default_dim_cap(points: &PointSet, flavor: Flavor) -> usize {
    match flavor {
        Flavor::Cech => default_cech_dim_cap(points),
        Flavor::Rips => default_rips_dim_cap(points, MAX_RIPS_DIM_CAP),
    }
}

/// Whether the flavor's complex on `points` at `rho` is combinatorially
/// equivalent to `target`. The witness maps point indices to target vertices.
pub fn is_representation(
    points: &PointSet,
    rho: f64,
    target: &SimplicialComplex,
    flavor: Flavor,
) -> Result<Option<VertexMap>> {
    check_rho(rho)?;
    let g = build_complex(points, rho, representation_dim_cap(points, target), flavor)?;
    combinatorially_equivalent(&g.complex, target)
}

/// A checked representation of `target` with its stability radius.
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentationCertificate {
    pub target: SimplicialComplex,
    pub representation: PointSet,
    pub rho: f64,
    pub flavor: Flavor,
    /// Bottleneck radius below which every perturbation keeps the complex.
    pub margin: f64,
    /// Point index to target vertex.
    pub witness: VertexMap,
}

impl RepresentationCertificate {
    /// Certifies `points` as a representation of `target`, or `None` if it
    /// is not one.
    pub fn issue(
        points: &PointSet,
        rho: f64,
        target: &SimplicialComplex,
        flavor: Flavor,
    ) -> Result<Option<Self>> {
        Ok(
            is_representation(points, rho, target, flavor)?.map(|witness| {
                RepresentationCertificate {
                    target: target.clone(),
                    representation: points.clone(),
                    rho,
                    flavor,
                    margin: stability_radius(points, rho, flavor),
                    witness,
                }
            }),
        )
    }
}

/// JSON form: `{flavor, rho, margin, points, witness}` with the witness as
/// `[point, vertex]` pairs. An infinite margin is written as `null`.
impl Serialize for RepresentationCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            flavor: Flavor,
            rho: f64,
            margin: Option<f64>,
            points: Vec<Vec<f64>>,
            witness: Vec<[Vertex; 2]>,
            target: &'a SimplicialComplex,
        }
        Repr {
            flavor: self.flavor,
            rho: self.rho,
            margin: self.margin.is_finite().then_some(self.margin),
            points: self.representation.to_rows(),
            witness: self.witness.iter().map(|(&a, &b)| [a, b]).collect(),
            target: &self.target,
        }
        .serialize(s)
    }
}

/// Outcome of [`verify_generic`].
#[derive(Clone, Debug, PartialEq)]
pub enum GenericityCheck {
    /// Every perturbed copy rebuilt to an equivalent complex.
    Stable { trials: u64 },
    /// A perturbed copy whose complex differs.
    Counterexample { trial: u64, perturbed: PointSet },
}

impl GenericityCheck {
    pub fn is_stable(&self) -> bool {
        matches!(self, GenericityCheck::Stable { .. })
    }
}

/// Moves every point uniformly inside the open ball of radius `delta`, so
/// the bottleneck distance to the original is strictly below `delta`.
pub fn perturb<R: Rng>(points: &PointSet, delta: f64, rng: &mut R) -> PointSet {
    let d = points.dim();
    let mut coords = Vec::with_capacity(points.len() * d);
    let mut dir = vec![0.0; d];
    for p in points.iter() {
        let norm = loop {
            for x in dir.iter_mut() {
                *x = rng.sample(StandardNormal);
            }
            let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 0.0 {
                break n;
            }
        };
        let r = delta * rng.random::<f64>().powf(1.0 / d as f64);
        coords.extend(p.iter().zip(&dir).map(|(x, u)| x + r * u / norm));
    }
    PointSet::from_flat(d, coords, true)
}

/// Randomized falsification of genericity: rebuilds the complex on `trials`
/// perturbed copies (each point displaced by less than `delta`) and reports
/// the first copy whose complex is not equivalent to the original.
pub fn verify_generic(
    points: &PointSet,
    rho: f64,
    delta: f64,
    flavor: Flavor,
    trials: u64,
    seed: u64,
) -> Result<GenericityCheck> {
    check_rho(rho)?;
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let cap = default_dim_cap(points, flavor);
    let original = build_complex(points, rho, cap, flavor)?.complex;
    let outcomes: Vec<Result<Option<PointSet>>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = seeds::stream(seed, &[trial]);
            let y = perturb(points, delta, &mut rng);
            let rebuilt = build_complex(&y, rho, cap, flavor)?.complex;
            if rebuilt == original || combinatorially_equivalent(&rebuilt, &original)?.is_some() {
                Ok(None)
            } else {
                Ok(Some(y))
            }
        })
        .collect();
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        if let Some(perturbed) = outcome? {
            return Ok(GenericityCheck::Counterexample {
                trial: trial as u64,
                perturbed,
            });
        }
    }
    Ok(GenericityCheck::Stable { trials })
}
