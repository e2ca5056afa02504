//! Small hand-built point sets used in tests, examples and experiments.

use rand::Rng;

use crate::complex::{SimplicialComplex, Vertex};
use crate::error::{Error, Result};
use crate::geometry::{dist, Cuboid, PointSet};

/// Seven points in the plane whose Rips and Čech complexes at `rho = 2.4`
/// differ in a single triangle.
pub fn seven_points() -> PointSet {
    PointSet::new(
        2,
        &[
            [-1.0, 2.0],
            [-2.0, 0.0],
            [0.0, 0.0],
            [2.0, 3.0],
            [0.0, 3.0],
            [1.2, 2.2],
            [1.5, 1.5],
        ],
    )
    .expect("fixture is valid")
}

/// `n` points evenly spaced on the unit circle.
pub fn circle(n: usize) -> PointSet {
    let rows: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            [a.cos(), a.sin()]
        })
        .collect();
    PointSet::new(2, &rows).expect("fixture is valid")
}

/// Equilateral triangle with the given side, one edge on the x-axis.
pub fn equilateral_triangle(side: f64) -> PointSet {
    PointSet::new(
        2,
        &[
            [0.0, 0.0],
            [side, 0.0],
            [side / 2.0, side * 3f64.sqrt() / 2.0],
        ],
    )
    .expect("fixture is valid")
}

/// Axis-aligned square with lower corner at the origin.
pub fn square(side: f64) -> PointSet {
    PointSet::new(2, &[[0.0, 0.0], [side, 0.0], [side, side], [0.0, side]])
        .expect("fixture is valid")
}

/// A background sample with a copy of a representation planted so that it
/// hangs off a window-spanning host by exactly one edge.
#[derive(Clone, Debug)]
pub struct Planted {
    pub points: PointSet,
    /// Labels of the planted copy, in representation order.
    pub copy: Vec<Vertex>,
    /// The copy vertex and the linker point it attaches to.
    pub bridge: [Vertex; 2],
}

const DIRECTIONS: [[f64; 2]; 7] = [
    [0.0, 1.0],
    [1.0, 2.0],
    [-1.0, 2.0],
    [1.0, 1.0],
    [-1.0, 1.0],
    [2.0, 1.0],
    [-2.0, 1.0],
];

/// Plants `representation` (planar only) in the middle of `window`.
///
/// The copy's extreme vertex in some upward direction `u` is linked to a
/// point `0.9 rho` further along `u`, which starts a vertical stalk of
/// `rho / 2` steps up to a horizontal backbone spanning the window. A
/// second, vertical backbone near the left face meets every path that
/// crosses the window, so the backbone is the only crossing component.
/// Background points within `rho` of the copy are removed.
pub fn plant_pendant(
    background: &PointSet,
    representation: &PointSet,
    rho: f64,
    window: &Cuboid,
) -> Result<Planted> {
    if representation.dim() != 2 || background.dim() != 2 || window.dim() != 2 {
        return Err(Error::InvalidParameter(
            "pendant planting is implemented in the plane only".into(),
        ));
    }
    if representation.is_empty() {
        return Err(Error::Empty("pendant planting"));
    }
    let step = rho / 2.0;
    let (lo, hi) = (window.lo(), window.hi());
    let center = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let c1 = [center[0], center[1] - 2.0 * rho];
    for raw in DIRECTIONS {
        let norm = raw[0].hypot(raw[1]);
        let u = [raw[0] / norm, raw[1] / norm];
        let proj: Vec<f64> = representation
            .iter()
            .map(|p| p[0] * u[0] + p[1] * u[1])
            .collect();
        let top = (0..proj.len())
            .max_by(|&a, &b| proj[a].total_cmp(&proj[b]))
            .expect("nonempty");
        let runner_up = (0..proj.len())
            .filter(|&i| i != top)
            .map(|i| proj[i])
            .fold(f64::NEG_INFINITY, f64::max);
        if proj[top] - runner_up <= 0.1 * rho {
            continue;
        }
        let anchor = representation.get(top);
        let shift = [
            c1[0] - anchor[0] - 0.9 * rho * u[0],
            c1[1] - anchor[1] - 0.9 * rho * u[1],
        ];
        let copy: Vec<[f64; 2]> = representation
            .iter()
            .map(|p| [p[0] + shift[0], p[1] + shift[1]])
            .collect();

        let mut scaffold: Vec<[f64; 2]> =
            (1..=3).map(|k| [c1[0], c1[1] + k as f64 * step]).collect();
        let reach = ((center[0] - lo[0]).max(hi[0] - center[0]) / step).floor() as i64;
        let backbone_y = center[1];
        for j in -reach..=reach {
            let x = center[0] + j as f64 * step;
            if x >= lo[0] && x <= hi[0] {
                scaffold.push([x, backbone_y]);
            }
        }
        let horizontal = scaffold.len();
        let xv = lo[0] + 1.5 * rho;
        let rows = ((hi[1] - lo[1]) / step).floor() as usize;
        for i in 0..=rows {
            let p = [xv, lo[1] + i as f64 * step];
            if scaffold[3..horizontal]
                .iter()
                .all(|q| dist(q, &p) >= 0.1 * rho)
            {
                scaffold.push(p);
            }
        }

        let clear = 1.01 * rho;
        let inside = copy.iter().chain(&scaffold).all(|p| window.contains(p));
        let separated = scaffold
            .iter()
            .all(|s| copy.iter().all(|v| dist(s, v) > clear))
            && copy
                .iter()
                .enumerate()
                .all(|(i, v)| i == top || dist(&c1, v) > clear);
        if !inside || !separated {
            continue;
        }

        let mut rows_out: Vec<Vec<f64>> = background
            .iter()
            .filter(|p| copy.iter().all(|v| dist(p, v) > clear))
            .map(|p| p.to_vec())
            .collect();
        let base = rows_out.len() as Vertex;
        rows_out.extend(copy.iter().map(|p| p.to_vec()));
        let linker = rows_out.len() as Vertex;
        rows_out.push(c1.to_vec());
        rows_out.extend(scaffold.iter().map(|p| p.to_vec()));
        let points = PointSet::with_duplicates(2, &rows_out)?;
        return Ok(Planted {
            points,
            copy: (0..representation.len() as Vertex)
                .map(|i| base + i)
                .collect(),
            bridge: [base + top as Vertex, linker],
        });
    }
    Err(Error::InvalidWindow(format!(
        "no room to plant a pendant copy with rho = {rho} in this window"
    )))
}

/// A triangulated grid of 36 points at spacing `0.6 rho` with a hollow
/// square of side `0.8 rho` joined to it by edges from two different square
/// vertices. Every coordinate is jittered by up to `0.02 rho`. No edge of the
/// Rips 1-skeleton at `rho` is a bridge. The square is labelled `36..40`.
pub fn doubly_attached_square<R: Rng>(rho: f64, rng: &mut R) -> PointSet {
    let mut rows = Vec::new();
    for i in 0..6 {
        for j in 0..6 {
            rows.push([0.6 * rho * i as f64, 0.6 * rho * j as f64]);
        }
    }
    let bx = 3.0 * rho + 0.8 * rho;
    let (y0, y1) = (0.6 * rho, 1.4 * rho);
    rows.extend([
        [bx, y0],
        [bx + 0.8 * rho, y0],
        [bx + 0.8 * rho, y1],
        [bx, y1],
    ]);
    for p in rows.iter_mut() {
        for x in p.iter_mut() {
            *x += rng.random_range(-0.02 * rho..=0.02 * rho);
        }
    }
    PointSet::with_duplicates(2, &rows).expect("fixture is valid")
}

/// The hollow square `0-1-2-3`.
pub fn square_boundary() -> SimplicialComplex {
    SimplicialComplex::from_faces(1, [[0, 1], [1, 2], [2, 3], [0, 3]]).expect("fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::rips_complex;
    use crate::detection::{connected_components, connected_components_in, verify_pendant};
    use crate::seeds;

    #[test]
    fn planted_square_is_found() {
        let w = Cuboid::cube(2, 20.0).unwrap();
        let bg = PointSet::empty(2).unwrap();
        let p = plant_pendant(&bg, &square(0.8), 1.0, &w).unwrap();
        let g = rips_complex(&p.points, 1.0, 2).unwrap();
        let d = connected_components_in(&g, &w);
        let host = d.crossing(&g, 0).unwrap();
        let reports = d.pendant_occurrences(&g, &square_boundary(), host).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].vertices, p.copy);
        assert_eq!(reports[0].bridge, Some(p.bridge));
        assert!(verify_pendant(&g, &d, &square_boundary(), &reports[0]));
    }

    #[test]
    fn planting_needs_the_plane() {
        let w = Cuboid::cube(3, 20.0).unwrap();
        let one = PointSet::new(3, &[[0.0, 0.0, 0.0]]).unwrap();
        assert!(plant_pendant(&PointSet::empty(3).unwrap(), &one, 1.0, &w).is_err());
    }

    #[test]
    fn doubly_attached_has_no_bridges() {
        let mut rng = seeds::stream(4, &[]);
        for _ in 0..20 {
            let x = doubly_attached_square(1.0, &mut rng);
            let g = rips_complex(&x, 1.0, 1).unwrap();
            let d = connected_components(&g);
            assert_eq!(d.len(), 1);
            assert!(d
                .pendant_occurrences(&g, &square_boundary(), 0)
                .unwrap()
                .is_empty());
        }
    }
}
