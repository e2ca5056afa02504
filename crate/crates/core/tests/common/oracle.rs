//! Brute-force oracles. None of them call into the code they check.
#![allow(dead_code)]

use randtopo::complex::{Flavor, SimplicialComplex};
use randtopo::geometry::PointSet;

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn le(a: f64, b: f64) -> bool {
    a <= b + 1e-9 * a.abs().max(b.abs()) + 1e-12
}

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting.
fn solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[p][c].abs() < 1e-12 {
            return None;
        }
        m.swap(c, p);
        rhs.swap(c, p);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
            rhs[r] -= f * rhs[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| m[r][k] * x[k]).sum();
        x[r] = (rhs[r] - s) / m[r][r];
    }
    Some(x)
}

/// Centre of the smallest ball with every point of `s` on its boundary,
/// inside their affine hull.
pub fn circumcenter(s: &[&[f64]]) -> Option<Vec<f64>> {
    let p0 = s[0];
    if s.len() == 1 {
        return Some(p0.to_vec());
    }
    let v: Vec<Vec<f64>> = s[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let g: Vec<Vec<f64>> = v
        .iter()
        .map(|a| v.iter().map(|b| dot(a, b)).collect())
        .collect();
    let rhs: Vec<f64> = v.iter().map(|a| dot(a, a) / 2.0).collect();
    let lam = solve(g, rhs)?;
    let mut c = p0.to_vec();
    for (l, vi) in lam.iter().zip(&v) {
        for (ck, vk) in c.iter_mut().zip(vi) {
            *ck += l * vk;
        }
    }
    Some(c)
}

/// Minimal enclosing radius as the smallest circumball of at most `d + 1`
/// points that holds everything.
pub fn naive_meb_radius(pts: &[&[f64]]) -> f64 {
    let d = pts[0].len();
    let n = pts.len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        if mask.count_ones() as usize > d + 1 {
            continue;
        }
        let s: Vec<&[f64]> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| pts[i])
            .collect();
        let Some(c) = circumcenter(&s) else { continue };
        let r = dist(&c, s[0]);
        if pts.iter().all(|p| le(dist(&c, p), r)) {
            best = best.min(r);
        }
    }
    best
}

pub fn subsets(n: usize, max_size: usize) -> Vec<Vec<u32>> {
    (1u32..(1 << n))
        .filter(|m| m.count_ones() as usize <= max_size)
        .map(|m| (0..n as u32).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// Every subset of at most `cap + 1` points passing the face test.
pub fn oracle_complex(x: &PointSet, rho: f64, cap: usize, flavor: Flavor) -> SimplicialComplex {
    let faces = subsets(x.len(), cap + 1).into_iter().filter(|f| {
        let pts: Vec<&[f64]> = f.iter().map(|&i| x.get(i as usize)).collect();
        match flavor {
            Flavor::Rips => pts.iter().all(|a| pts.iter().all(|b| le(dist(a, b), rho))),
            Flavor::Cech => le(naive_meb_radius(&pts), rho / 2.0),
        }
    });
    SimplicialComplex::from_faces(cap, faces.collect::<Vec<_>>()).unwrap()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Bottleneck distance by trying every bijection.
pub fn brute_bottleneck(x: &PointSet, y: &PointSet) -> f64 {
    permutations(x.len())
        .iter()
        .map(|p| {
            (0..x.len())
                .map(|i| dist(x.get(i), y.get(p[i])))
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Point sets with some face exactly on the threshold at `rho = 1`.
pub fn threshold_fixtures() -> Vec<(PointSet, Flavor)> {
    let s3 = 3f64.sqrt();
    let mut out = vec![
        (PointSet::new(1, &[[0.0], [1.0]]).unwrap(), Flavor::Rips),
        (
            PointSet::new(1, &[[0.0], [1.0], [2.0]]).unwrap(),
            Flavor::Rips,
        ),
        (
            PointSet::new(1, &[[0.0], [1.0], [1.5], [3.0]]).unwrap(),
            Flavor::Rips,
        ),
        (
            PointSet::new(2, &[[0.0, 0.0], [1.0, 0.0], [0.5, s3 / 2.0]]).unwrap(),
            Flavor::Rips,
        ),
        (
            PointSet::new(2, &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap(),
            Flavor::Rips,
        ),
        (
            PointSet::new(2, &[[3.0, 4.0], [4.0, 4.0], [3.0, 5.0]]).unwrap(),
            Flavor::Rips,
        ),
        (
            PointSet::new(
                3,
                &[
                    [0.0, 0.0, 0.0],
                    [1.0, 0.0, 0.0],
                    [0.0, 1.0, 0.0],
                    [0.0, 0.0, 1.0],
                ],
            )
            .unwrap(),
            Flavor::Rips,
        ),
        (PointSet::new(1, &[[0.0], [1.0]]).unwrap(), Flavor::Cech),
        (
            PointSet::new(2, &[[0.0, 0.0], [0.0, 1.0], [5.0, 5.0]]).unwrap(),
            Flavor::Cech,
        ),
        (
            PointSet::new(3, &[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 0.5, 0.0]]).unwrap(),
            Flavor::Cech,
        ),
        (
            PointSet::new(2, &[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]]).unwrap(),
            Flavor::Cech,
        ),
    ];
    // Regular polygons inscribed in a circle of radius 1/2: the Čech
    // threshold exactly, with and without the centre.
    for n in [3usize, 4, 5, 6, 8] {
        let rows: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                [0.5 * a.cos(), 0.5 * a.sin()]
            })
            .collect();
        out.push((PointSet::new(2, &rows).unwrap(), Flavor::Cech));
        if n >= 4 {
            let mut with_centre = rows.clone();
            with_centre.push([0.0, 0.0]);
            out.push((PointSet::new(2, &with_centre).unwrap(), Flavor::Cech));
        }
    }
    // Regular polygons with unit side for Rips.
    for n in [5usize, 6] {
        let r = 0.5 / (std::f64::consts::PI / n as f64).sin();
        let rows: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        out.push((PointSet::new(2, &rows).unwrap(), Flavor::Rips));
    }
    out
}
