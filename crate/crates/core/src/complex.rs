//! Abstract simplicial complexes, the Vietoris-Rips and Čech builders, and
//! combinatorial equivalence.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::Bound;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, approx_le, Ball, PointSet};

/// Vertex label.
pub type Vertex = u32;

/// A vertex bijection, keyed by the source complex's labels.
pub type VertexMap = BTreeMap<Vertex, Vertex>;

/// Vertex count above which [`combinatorially_equivalent`] refuses to search.
pub const DEFAULT_SEARCH_CAP: usize = 32;

/// Hard ceiling on the Rips dimension cap.
pub const MAX_RIPS_DIM_CAP: usize = 8;

/// A finite abstract simplicial complex whose faces are stored explicitly up
/// to dimension `dim_cap`.
///
/// Faces are sorted vertex lists. The set is closed under taking nonempty
/// subsets. When `truncated` is set, the complex that was built had faces
/// above `dim_cap` that were not stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ComplexRepr", into = "ComplexRepr")]
pub struct SimplicialComplex {
    dim_cap: usize,
    /// `faces[k]` holds the `k`-dimensional faces.
    faces: Vec<BTreeSet<Vec<Vertex>>>,
    truncated: bool,
}

impl SimplicialComplex {
    /// The empty complex.
    pub fn new(dim_cap: usize) -> Self {
        SimplicialComplex {
            dim_cap,
            faces: vec![BTreeSet::new(); dim_cap + 1],
            truncated: false,
        }
    }

    /// The downward closure of `faces`.
    pub fn from_faces<I, F>(dim_cap: usize, faces: I) -> Result<Self>
    where
        I: IntoIterator<Item = F>,
        F: AsRef<[Vertex]>,
    {
        let mut k = SimplicialComplex::new(dim_cap);
        for f in faces {
            let mut f = f.as_ref().to_vec();
            f.sort_unstable();
            f.dedup();
            if f.is_empty() {
                return Err(Error::InvalidComplex("empty face".into()));
            }
            if f.len() > dim_cap + 1 {
                return Err(Error::InvalidComplex(format!(
                    "face {f:?} exceeds dimension cap {dim_cap}"
                )));
            }
            k.insert_closed(&f);
        }
        Ok(k)
    }

    /// Rebuilds a complex from its vertex list and maximal faces, checking
    /// that every face vertex is declared.
    pub fn from_maximal_faces(
        dim_cap: usize,
        vertices: &[Vertex],
        maximal_faces: &[Vec<Vertex>],
    ) -> Result<Self> {
        let declared: BTreeSet<Vertex> = vertices.iter().copied().collect();
        for f in maximal_faces {
            if let Some(v) = f.iter().find(|v| !declared.contains(v)) {
                return Err(Error::InvalidComplex(format!(
                    "face {f:?} uses undeclared vertex {v}"
                )));
            }
        }
        let singletons = vertices.iter().map(|&v| vec![v]);
        Self::from_faces(dim_cap, singletons.chain(maximal_faces.iter().cloned()))
    }

    /// Inserts `face` (sorted, deduplicated) together with all its subsets.
    fn insert_closed(&mut self, face: &[Vertex]) {
        let k = face.len() - 1;
        if self.faces[k].contains(face) {
            return;
        }
        self.faces[k].insert(face.to_vec());
        if face.len() > 1 {
            let mut sub = Vec::with_capacity(k);
            for skip in 0..face.len() {
                sub.clear();
                sub.extend(
                    face.iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v),
                );
                self.insert_closed(&sub);
            }
        }
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub(crate) fn set_truncated(&mut self, t: bool) {
        self.truncated = t;
    }

    /// Highest dimension with a stored face; `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.faces.iter().rposition(|f| !f.is_empty())
    }

    pub fn is_empty(&self) -> bool {
        self.faces[0].is_empty()
    }

    pub fn num_vertices(&self) -> usize {
        self.faces[0].len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.faces[0].iter().map(|f| f[0])
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.faces[0].contains(&vec![v])
    }

    /// The `k`-dimensional faces in lexicographic order.
    pub fn faces(&self, k: usize) -> impl Iterator<Item = &[Vertex]> + '_ {
        self.faces.get(k).into_iter().flatten().map(Vec::as_slice)
    }

    /// Every stored face, by dimension then lexicographically.
    pub fn all_faces(&self) -> impl Iterator<Item = &[Vertex]> + '_ {
        self.faces.iter().flatten().map(Vec::as_slice)
    }

    pub fn num_faces(&self, k: usize) -> usize {
        self.faces.get(k).map_or(0, BTreeSet::len)
    }

    pub fn contains(&self, face: &[Vertex]) -> bool {
        let mut f = face.to_vec();
        f.sort_unstable();
        f.dedup();
        !f.is_empty() && self.faces.get(f.len() - 1).is_some_and(|s| s.contains(&f))
    }

    /// Face counts `(f_0, f_1, ..., f_dim)`.
    pub fn f_vector(&self) -> Vec<usize> {
        match self.dim() {
            None => Vec::new(),
            Some(d) => (0..=d).map(|k| self.num_faces(k)).collect(),
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.faces(1).map(|e| (e[0], e[1]))
    }

    /// Faces that are not proper subsets of another stored face.
    pub fn maximal_faces(&self) -> Vec<Vec<Vertex>> {
        let mut covered: HashSet<Vec<Vertex>> = HashSet::new();
        for k in 1..self.faces.len() {
            for f in &self.faces[k] {
                for skip in 0..f.len() {
                    let sub: Vec<Vertex> = f
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    covered.insert(sub);
                }
            }
        }
        self.all_faces()
            .filter(|f| !covered.contains(*f))
            .map(<[Vertex]>::to_vec)
            .collect()
    }

    /// `k`-faces whose smallest vertex is `v`.
    fn faces_from(&self, v: Vertex, k: usize) -> impl Iterator<Item = &Vec<Vertex>> + '_ {
        let upper = match v.checked_add(1) {
            Some(w) => Bound::Excluded(vec![w]),
            None => Bound::Unbounded,
        };
        self.faces[k].range((Bound::Included(vec![v]), upper))
    }

    /// Inserts a sorted face without closing it; the caller supplies its
    /// subsets separately.
    pub(crate) fn insert_raw(&mut self, face: Vec<Vertex>) {
        let k = face.len() - 1;
        self.faces[k].insert(face);
    }

    /// The subcomplex of all faces whose vertices lie in `subset`.
    pub fn induced(&self, subset: &[Vertex]) -> SimplicialComplex {
        let members: HashSet<Vertex> = subset.iter().copied().collect();
        let mut out = SimplicialComplex::new(self.dim_cap);
        out.truncated = self.truncated;
        for &v in subset {
            for k in 0..self.faces.len() {
                for f in self.faces_from(v, k) {
                    if f.iter().all(|u| members.contains(u)) {
                        out.faces[k].insert(f.clone());
                    }
                }
            }
        }
        out
    }

    /// Applies a vertex relabeling; `map` must be injective on the vertices.
    pub fn relabeled(&self, map: &VertexMap) -> Result<SimplicialComplex> {
        let mut out = SimplicialComplex::new(self.dim_cap);
        out.truncated = self.truncated;
        let mut images = HashSet::new();
        for v in self.vertices() {
            let w = *map
                .get(&v)
                .ok_or_else(|| Error::InvalidComplex(format!("relabeling misses vertex {v}")))?;
            if !images.insert(w) {
                return Err(Error::InvalidComplex(format!(
                    "relabeling is not injective at {w}"
                )));
            }
        }
        for (k, layer) in self.faces.iter().enumerate() {
            for f in layer {
                let mut g: Vec<Vertex> = f.iter().map(|v| map[v]).collect();
                g.sort_unstable();
                out.faces[k].insert(g);
            }
        }
        Ok(out)
    }

    /// Checks downward closure and that faces are sorted and distinct.
    pub fn is_valid(&self) -> bool {
        self.faces.iter().enumerate().all(|(k, layer)| {
            layer.iter().all(|f| {
                f.len() == k + 1
                    && f.windows(2).all(|w| w[0] < w[1])
                    && (k == 0
                        || (0..f.len()).all(|skip| {
                            let sub: Vec<Vertex> = f
                                .iter()
                                .enumerate()
                                .filter(|&(i, _)| i != skip)
                                .map(|(_, &v)| v)
                                .collect();
                            self.faces[k - 1].contains(&sub)
                        }))
            })
        })
    }

    /// Adjacency lists of the 1-skeleton.
    pub fn adjacency(&self) -> BTreeMap<Vertex, Vec<Vertex>> {
        let mut adj: BTreeMap<Vertex, Vec<Vertex>> =
            self.vertices().map(|v| (v, Vec::new())).collect();
        for (a, b) in self.edges() {
            adj.get_mut(&a).expect("closed").push(b);
            adj.get_mut(&b).expect("closed").push(a);
        }
        for l in adj.values_mut() {
            l.sort_unstable();
        }
        adj
    }
}

/// Serialized form: `{"dim_cap", "vertices", "maximal_faces"}`.
#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    dim_cap: usize,
    vertices: Vec<Vertex>,
    maximal_faces: Vec<Vec<Vertex>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    truncated: bool,
}

impl TryFrom<ComplexRepr> for SimplicialComplex {
    type Error = Error;
    fn try_from(r: ComplexRepr) -> Result<Self> {
        let mut k =
            SimplicialComplex::from_maximal_faces(r.dim_cap, &r.vertices, &r.maximal_faces)?;
        k.truncated = r.truncated;
        Ok(k)
    }
}

impl From<SimplicialComplex> for ComplexRepr {
    fn from(k: SimplicialComplex) -> Self {
        ComplexRepr {
            dim_cap: k.dim_cap,
            vertices: k.vertices().collect(),
            maximal_faces: k.maximal_faces(),
            truncated: k.truncated,
        }
    }
}

/// The `k`-skeleton: faces with at most `k + 1` vertices.
pub fn skeleton(complex: &SimplicialComplex, k: usize) -> SimplicialComplex {
    let cap = complex.dim_cap.min(k);
    SimplicialComplex {
        dim_cap: cap,
        faces: complex.faces[..=cap].to_vec(),
        truncated: complex.truncated && k >= complex.dim_cap,
    }
}

/// Disjoint union; the vertices of `l` are shifted past the largest label of `k`.
pub fn disjoint_union(k: &SimplicialComplex, l: &SimplicialComplex) -> SimplicialComplex {
    let offset = k.vertices().last().map_or(0, |v| v + 1);
    let map: VertexMap = l
        .vertices()
        .enumerate()
        .map(|(i, v)| (v, offset + i as Vertex))
        .collect();
    merge(k, &l.relabeled(&map).expect("injective"))
}

/// One-point union identifying `k_base` with `l_base`. The remaining
/// vertices of `l` get fresh labels above the largest label of `k`, in
/// ascending order.
pub fn wedge_sum(
    k: &SimplicialComplex,
    k_base: Vertex,
    l: &SimplicialComplex,
    l_base: Vertex,
) -> Result<SimplicialComplex> {
    if !k.contains_vertex(k_base) {
        return Err(Error::InvalidComplex(format!(
            "basepoint {k_base} not in K"
        )));
    }
    if !l.contains_vertex(l_base) {
        return Err(Error::InvalidComplex(format!(
            "basepoint {l_base} not in L"
        )));
    }
    let offset = k.vertices().last().map_or(0, |v| v + 1);
    let mut map = VertexMap::new();
    let mut next = offset;
    for v in l.vertices() {
        if v == l_base {
            map.insert(v, k_base);
        } else {
            map.insert(v, next);
            next += 1;
        }
    }
    Ok(merge(k, &l.relabeled(&map)?))
}

fn merge(k: &SimplicialComplex, l: &SimplicialComplex) -> SimplicialComplex {
    let cap = k.dim_cap.max(l.dim_cap);
    let mut out = SimplicialComplex::new(cap);
    out.truncated = k.truncated || l.truncated;
    for src in [k, l] {
        for (d, layer) in src.faces.iter().enumerate() {
            out.faces[d].extend(layer.iter().cloned());
        }
    }
    out
}

/// Which face test a geometric complex uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    #[default]
    #[serde(rename = "RIPS")]
    Rips,
    #[serde(rename = "CECH")]
    Cech,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Rips => "RIPS",
            Flavor::Cech => "CECH",
        })
    }
}

impl FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RIPS" | "VR" => Ok(Flavor::Rips),
            "CECH" => Ok(Flavor::Cech),
            other => Err(Error::Parse(format!("unknown flavor {other:?}"))),
        }
    }
}

/// A complex built on a point set: vertex `i` is point `i`.
#[derive(Clone, Debug)]
pub struct GeometricComplex {
    pub complex: SimplicialComplex,
    pub points: PointSet,
    pub rho: f64,
    pub flavor: Flavor,
}

impl GeometricComplex {
    /// Does `face` pass this complex's face test at its `rho`?
    pub fn passes_face_test(&self, face: &[Vertex]) -> bool {
        face_test(&self.points, face, self.rho, self.flavor)
    }
}

/// The face test of a flavor on an arbitrary vertex subset.
pub fn face_test(points: &PointSet, face: &[Vertex], rho: f64, flavor: Flavor) -> bool {
    match flavor {
        Flavor::Rips => face.iter().enumerate().all(|(i, &a)| {
            face[i + 1..].iter().all(|&b| {
                approx_le(
                    geometry::dist(points.get(a as usize), points.get(b as usize)),
                    rho,
                )
            })
        }),
        Flavor::Cech => {
            if face.len() <= 2 {
                return face_test(points, face, rho, Flavor::Rips);
            }
            let pts: Vec<&[f64]> = face.iter().map(|&v| points.get(v as usize)).collect();
            approx_le(geometry::enclosing_ball(&pts).radius, rho / 2.0)
        }
    }
}

/// Default Čech cap: `min(n - 1, d + 1)`, at least 1.
pub fn default_cech_dim_cap(points: &PointSet) -> usize {
    (points.len().saturating_sub(1))
        .min(points.dim() + 1)
        .max(1)
}

/// Default Rips cap: `min(n - 1, requested, 8)`, at least 1.
pub fn default_rips_dim_cap(points: &PointSet, requested: usize) -> usize {
    (points.len().saturating_sub(1))
        .min(requested)
        .min(MAX_RIPS_DIM_CAP)
        .max(1)
}

fn check_build_args(rho: f64, dim_cap: usize) -> Result<()> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rho must be positive, got {rho}"
        )));
    }
    if dim_cap == 0 {
        return Err(Error::InvalidParameter("dim_cap must be at least 1".into()));
    }
    Ok(())
}

/// Vietoris-Rips complex: cliques of the graph `||x - y|| <= rho` with at
/// most `dim_cap + 1` vertices.
pub fn rips_complex(points: &PointSet, rho: f64, dim_cap: usize) -> Result<GeometricComplex> {
    check_build_args(rho, dim_cap)?;
    build(points, rho, dim_cap, Flavor::Rips)
}

/// Čech complex: subsets whose minimal enclosing ball has radius `<= rho / 2`.
///
/// Candidates are the Rips cliques at the same `rho`; each extension is
/// tested against the enclosing ball of the growing face.
pub fn cech_complex(points: &PointSet, rho: f64, dim_cap: usize) -> Result<GeometricComplex> {
    check_build_args(rho, dim_cap)?;
    build(points, rho, dim_cap, Flavor::Cech)
}

/// Builds with the flavor's dispatch.
pub fn build_complex(
    points: &PointSet,
    rho: f64,
    dim_cap: usize,
    flavor: Flavor,
) -> Result<GeometricComplex> {
    match flavor {
        Flavor::Rips => rips_complex(points, rho, dim_cap),
        Flavor::Cech => cech_complex(points, rho, dim_cap),
    }
}

const PARALLEL_THRESHOLD: usize = 512;

fn build(points: &PointSet, rho: f64, dim_cap: usize, flavor: Flavor) -> Result<GeometricComplex> {
    let n = points.len();
    let up = proximity_graph(points, rho);
    let tau = rho / 2.0;
    let grow = |v: usize| {
        let mut faces = Vec::new();
        let mut truncated = false;
        let mut clique = vec![v as Vertex];
        let ball = Ball {
            center: points.get(v).to_vec(),
            radius: 0.0,
        };
        let mut ctx = Expansion {
            points,
            up: &up,
            cap: dim_cap,
            tau,
            flavor,
            faces: &mut faces,
            truncated: &mut truncated,
        };
        ctx.expand(&mut clique, &up[v], &ball);
        (faces, truncated)
    };
    let parts: Vec<(Vec<Vec<Vertex>>, bool)> = if n >= PARALLEL_THRESHOLD {
        (0..n).into_par_iter().map(grow).collect()
    } else {
        (0..n).map(grow).collect()
    };
    let mut complex = SimplicialComplex::new(dim_cap);
    let mut truncated = false;
    for (faces, t) in parts {
        truncated |= t;
        for f in faces {
            complex.insert_closed(&f);
        }
    }
    complex.truncated = truncated;
    Ok(GeometricComplex {
        complex,
        points: points.clone(),
        rho,
        flavor,
    })
}

struct Expansion<'a> {
    points: &'a PointSet,
    up: &'a [Vec<Vertex>],
    cap: usize,
    tau: f64,
    flavor: Flavor,
    faces: &'a mut Vec<Vec<Vertex>>,
    truncated: &'a mut bool,
}

impl Expansion<'_> {
    /// `clique` is an accepted face, `cands` the common higher Rips
    /// neighbours of its vertices, `ball` its enclosing ball (Čech only).
    fn expand(&mut self, clique: &mut Vec<Vertex>, cands: &[Vertex], ball: &Ball) {
        self.faces.push(clique.clone());
        let full = clique.len() == self.cap + 1;
        for (i, &w) in cands.iter().enumerate() {
            let Some(next_ball) = self.accept(clique, w, ball) else {
                continue;
            };
            if full {
                *self.truncated = true;
                return;
            }
            let next: Vec<Vertex> = intersect_sorted(&cands[i + 1..], &self.up[w as usize]);
            clique.push(w);
            self.expand(clique, &next, &next_ball);
            clique.pop();
        }
    }

    fn accept(&self, clique: &[Vertex], w: Vertex, ball: &Ball) -> Option<Ball> {
        let pw = self.points.get(w as usize);
        match self.flavor {
            Flavor::Rips => Some(Ball {
                center: Vec::new(),
                radius: 0.0,
            }),
            Flavor::Cech if clique.len() == 1 => {
                // Edges follow the Rips graph exactly; the ball is the midpoint one.
                let p = self.points.get(clique[0] as usize);
                Some(Ball {
                    center: p.iter().zip(pw).map(|(a, b)| 0.5 * (a + b)).collect(),
                    radius: 0.5 * geometry::dist(p, pw),
                })
            }
            Flavor::Cech => {
                if ball.contains(pw) {
                    return Some(ball.clone());
                }
                let mut pts: Vec<&[f64]> = clique
                    .iter()
                    .map(|&v| self.points.get(v as usize))
                    .collect();
                pts.push(pw);
                let b = geometry::enclosing_ball(&pts);
                approx_le(b.radius, self.tau).then_some(b)
            }
        }
    }
}

fn intersect_sorted(a: &[Vertex], b: &[Vertex]) -> Vec<Vertex> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// For each point, the sorted higher-indexed points within `rho`.
pub(crate) fn proximity_graph(points: &PointSet, rho: f64) -> Vec<Vec<Vertex>> {
    let n = points.len();
    let d = points.dim();
    let close = |i: usize, j: usize| approx_le(geometry::dist(points.get(i), points.get(j)), rho);
    if n < 64 || d > 6 {
        return (0..n)
            .map(|i| {
                (i + 1..n)
                    .filter(|&j| close(i, j))
                    .map(|j| j as Vertex)
                    .collect()
            })
            .collect();
    }
    // Uniform grid with cell side rho; neighbours live in adjacent cells.
    let cell_of = |p: &[f64]| -> Vec<i64> { p.iter().map(|x| (x / rho).floor() as i64).collect() };
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        grid.entry(cell_of(p)).or_default().push(i);
    }
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(d as u32))
        .map(|mut code| {
            (0..d)
                .map(|_| {
                    let o = (code % 3) as i64 - 1;
                    code /= 3;
                    o
                })
                .collect()
        })
        .collect();
    let row = |i: usize| {
        let c = cell_of(points.get(i));
        let mut out: Vec<Vertex> = Vec::new();
        let mut key = vec![0i64; d];
        for off in &offsets {
            for a in 0..d {
                key[a] = c[a] + off[a];
            }
            if let Some(members) = grid.get(&key) {
                out.extend(
                    members
                        .iter()
                        .filter(|&&j| j > i && close(i, j))
                        .map(|&j| j as Vertex),
                );
            }
        }
        out.sort_unstable();
        out
    };
    if n >= PARALLEL_THRESHOLD {
        (0..n).into_par_iter().map(row).collect()
    } else {
        (0..n).map(row).collect()
    }
}

/// Tests whether some vertex bijection carries the faces of `k` exactly onto
/// the faces of `l`, returning a verified witness when it does.
pub fn combinatorially_equivalent(
    k: &SimplicialComplex,
    l: &SimplicialComplex,
) -> Result<Option<VertexMap>> {
    combinatorially_equivalent_with_cap(k, l, DEFAULT_SEARCH_CAP)
}

/// [`combinatorially_equivalent`] with an explicit vertex-count cap.
pub fn combinatorially_equivalent_with_cap(
    k: &SimplicialComplex,
    l: &SimplicialComplex,
    cap: usize,
) -> Result<Option<VertexMap>> {
    if k.num_vertices() != l.num_vertices() || k.f_vector() != l.f_vector() {
        return Ok(None);
    }
    let n = k.num_vertices();
    if n > cap {
        return Err(Error::SearchCapExceeded { vertices: n, cap });
    }
    let a = Indexed::new(k);
    let b = Indexed::new(l);
    let mut sa = a.refined_signatures();
    let mut sb = b.refined_signatures();
    {
        let (mut x, mut y) = (sa.clone(), sb.clone());
        x.sort();
        y.sort();
        if x != y {
            return Ok(None);
        }
    }
    // Compress signatures into class ids shared by both sides.
    let mut classes: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut class_of = |s: &mut Vec<usize>| {
        let next = classes.len();
        *classes.entry(std::mem::take(s)).or_insert(next)
    };
    let ca: Vec<usize> = sa.iter_mut().map(&mut class_of).collect();
    let cb: Vec<usize> = sb.iter_mut().map(&mut class_of).collect();

    let order = search_order(&a, &ca);
    let mut search = Search {
        a: &a,
        b: &b,
        ca: &ca,
        cb: &cb,
        order: &order,
        fwd: vec![usize::MAX; n],
        bwd: vec![usize::MAX; n],
    };
    if !search.assign(0) {
        return Ok(None);
    }
    let witness: VertexMap = (0..n)
        .map(|i| (a.labels[i], b.labels[search.fwd[i]]))
        .collect();
    if !verify_isomorphism(k, l, &witness) {
        return Err(Error::InvalidComplex(
            "equivalence witness failed verification".into(),
        ));
    }
    Ok(Some(witness))
}

/// Independently checks that `map` is a bijection of vertices sending every
/// face of `k` to a face of `l` and every face of `l` back to a face of `k`.
pub fn verify_isomorphism(k: &SimplicialComplex, l: &SimplicialComplex, map: &VertexMap) -> bool {
    if map.len() != k.num_vertices() || k.num_vertices() != l.num_vertices() {
        return false;
    }
    if !k
        .vertices()
        .all(|v| map.get(&v).is_some_and(|w| l.contains_vertex(*w)))
    {
        return false;
    }
    let inverse: VertexMap = map.iter().map(|(&a, &b)| (b, a)).collect();
    if inverse.len() != map.len() {
        return false;
    }
    let image = |f: &[Vertex], m: &VertexMap| -> Option<Vec<Vertex>> {
        f.iter().map(|v| m.get(v).copied()).collect()
    };
    k.all_faces()
        .all(|f| image(f, map).is_some_and(|g| l.contains(&g)))
        && l.all_faces()
            .all(|f| image(f, &inverse).is_some_and(|g| k.contains(&g)))
}

/// A complex re-indexed to `0..n` for the search.
struct Indexed {
    labels: Vec<Vertex>,
    /// Faces of dimension >= 1 through each vertex, as local indices.
    through: Vec<Vec<Vec<usize>>>,
    faces: HashSet<Vec<usize>>,
    adj: Vec<Vec<usize>>,
    /// Number of nonempty dimensions; the cap itself may differ per side.
    levels: usize,
}

impl Indexed {
    fn new(k: &SimplicialComplex) -> Self {
        let labels: Vec<Vertex> = k.vertices().collect();
        let index: HashMap<Vertex, usize> =
            labels.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = labels.len();
        let mut through = vec![Vec::new(); n];
        let mut faces = HashSet::new();
        let mut adj = vec![Vec::new(); n];
        for f in k.all_faces().filter(|f| f.len() > 1) {
            let g: Vec<usize> = f.iter().map(|v| index[v]).collect();
            if g.len() == 2 {
                adj[g[0]].push(g[1]);
                adj[g[1]].push(g[0]);
            }
            for &v in &g {
                through[v].push(g.clone());
            }
            faces.insert(g);
        }
        Indexed {
            labels,
            through,
            faces,
            adj,
            levels: k.f_vector().len(),
        }
    }

    /// Per-vertex face-size histogram, refined by the sorted histograms of
    /// its neighbours.
    fn refined_signatures(&self) -> Vec<Vec<usize>> {
        let base: Vec<Vec<usize>> = self
            .through
            .iter()
            .map(|fs| {
                let mut h = vec![0; self.levels];
                for f in fs {
                    h[f.len() - 1] += 1;
                }
                h
            })
            .collect();
        (0..self.labels.len())
            .map(|v| {
                let mut nb: Vec<&Vec<usize>> = self.adj[v].iter().map(|&u| &base[u]).collect();
                nb.sort();
                let mut sig = base[v].clone();
                sig.push(usize::MAX);
                for h in nb {
                    sig.extend_from_slice(h);
                }
                sig
            })
            .collect()
    }
}

/// Vertices ordered so each one has as many already-placed neighbours as
/// possible, ties broken by rarer signature class.
fn search_order(a: &Indexed, classes: &[usize]) -> Vec<usize> {
    let n = a.labels.len();
    let mut class_size: HashMap<usize, usize> = HashMap::new();
    for &c in classes {
        *class_size.entry(c).or_default() += 1;
    }
    let mut placed = vec![false; n];
    let mut links = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !placed[v])
            .min_by_key(|&v| (std::cmp::Reverse(links[v]), class_size[&classes[v]], v))
            .expect("unplaced vertex");
        placed[v] = true;
        order.push(v);
        for &u in &a.adj[v] {
            links[u] += 1;
        }
    }
    order
}

struct Search<'a> {
    a: &'a Indexed,
    b: &'a Indexed,
    ca: &'a [usize],
    cb: &'a [usize],
    order: &'a [usize],
    fwd: Vec<usize>,
    bwd: Vec<usize>,
}

impl Search<'_> {
    fn assign(&mut self, pos: usize) -> bool {
        if pos == self.order.len() {
            return true;
        }
        let v = self.order[pos];
        for w in 0..self.b.labels.len() {
            if self.bwd[w] != usize::MAX || self.cb[w] != self.ca[v] {
                continue;
            }
            self.fwd[v] = w;
            self.bwd[w] = v;
            if self.consistent(v, w) && self.assign(pos + 1) {
                return true;
            }
            self.fwd[v] = usize::MAX;
            self.bwd[w] = usize::MAX;
        }
        false
    }

    /// Faces completed by placing `v -> w` must match in both directions.
    fn consistent(&self, v: usize, w: usize) -> bool {
        let mapped = |f: &[usize], m: &[usize]| -> Option<Vec<usize>> {
            let mut g = Vec::with_capacity(f.len());
            for &x in f {
                if m[x] == usize::MAX {
                    return None;
                }
                g.push(m[x]);
            }
            g.sort_unstable();
            Some(g)
        };
        let forward_ok = self.a.through[v]
            .iter()
            .all(|f| match mapped(f, &self.fwd) {
                Some(g) => self.b.faces.contains(&g),
                None => true,
            });
        forward_ok
            && self.b.through[w]
                .iter()
                .all(|f| match mapped(f, &self.bwd) {
                    Some(g) => self.a.faces.contains(&g),
                    None => true,
                })
    }
}
