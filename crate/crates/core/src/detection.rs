//! Connected components of a built complex, and searches for copies of a
//! target complex that are isolated or hang off a host by a single edge.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::{
    combinatorially_equivalent, GeometricComplex, SimplicialComplex, Vertex, VertexMap,
};
use crate::error::{Error, Result};
use crate::geometry::{approx_le, dist, Cuboid};

/// One connected component of the 1-skeleton.
#[derive(Clone, Debug)]
pub struct Component {
    /// Sorted vertex labels.
    pub vertices: Vec<Vertex>,
    /// All faces of the complex whose vertices lie in the component.
    pub complex: SimplicialComplex,
    /// May be degenerate (a single vertex gives a point box).
    pub bounding_box: Cuboid,
    /// Smallest distance from a vertex to the window boundary, when the
    /// decomposition was taken inside a window.
    pub boundary_distance: Option<f64>,
}

impl Component {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Every vertex is at least `rho` inside the window, so no point outside
    /// the window can be adjacent to the component.
    pub fn is_interior(&self, rho: f64) -> bool {
        self.boundary_distance.is_some_and(|d| d >= rho)
    }
}

/// Components ordered by smallest vertex label.
#[derive(Clone, Debug)]
pub struct ComponentDecomposition {
    pub components: Vec<Component>,
    /// Component index of each vertex (point index).
    pub component_of: Vec<usize>,
    pub window: Option<Cuboid>,
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
    }
}

/// Union-find over the edges of `g`.
pub fn connected_components(g: &GeometricComplex) -> ComponentDecomposition {
    decompose(g, None)
}

/// [`connected_components`] with distances to the boundary of `window`.
pub fn connected_components_in(g: &GeometricComplex, window: &Cuboid) -> ComponentDecomposition {
    decompose(g, Some(window))
}

fn decompose(g: &GeometricComplex, window: Option<&Cuboid>) -> ComponentDecomposition {
    let n = g.points.len();
    let mut uf = UnionFind::new(n);
    for (a, b) in g.complex.edges() {
        uf.union(a as usize, b as usize);
    }
    let mut index_of_root = BTreeMap::new();
    let mut component_of = vec![0; n];
    let mut members: Vec<Vec<Vertex>> = Vec::new();
    for v in 0..n {
        let root = uf.find(v);
        let c = *index_of_root.entry(root).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        component_of[v] = c;
        members[c].push(v as Vertex);
    }
    let mut complexes = vec![SimplicialComplex::new(g.complex.dim_cap()); members.len()];
    for f in g.complex.all_faces() {
        complexes[component_of[f[0] as usize]].insert_raw(f.to_vec());
    }
    let components = members
        .into_iter()
        .zip(complexes)
        .map(|(vertices, mut complex)| {
            complex.set_truncated(g.complex.is_truncated());
            let idx: Vec<usize> = vertices.iter().map(|&v| v as usize).collect();
            let pts = g.points.select(&idx);
            let boundary_distance = window.map(|w| {
                pts.iter()
                    .map(|p| if w.contains(p) { w.depth(p) } else { 0.0 })
                    .fold(f64::INFINITY, f64::min)
            });
            Component {
                bounding_box: pts.bounding_box().expect("components are nonempty"),
                vertices,
                complex,
                boundary_distance,
            }
        })
        .collect();
    ComponentDecomposition {
        components,
        component_of,
        window: window.cloned(),
    }
}

/// How a copy of the target was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OccurrenceKind {
    Isolated,
    Pendant,
}

/// A copy of the target inside a built complex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccurrenceReport {
    pub kind: OccurrenceKind,
    pub component: usize,
    /// Sorted vertex labels of the copy.
    pub vertices: Vec<Vertex>,
    /// Copy vertex to target vertex; `None` when undecided.
    pub witness: Option<VertexMap>,
    /// The single edge joining a pendant copy to the rest of its host.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bridge: Option<[Vertex; 2]>,
    pub interior_certified: bool,
    /// The equivalence search hit its vertex cap; the copy may or may not
    /// match.
    pub undecided: bool,
}

enum Match {
    Yes(VertexMap),
    No,
    Undecided,
}

fn match_target(sub: &SimplicialComplex, target: &SimplicialComplex) -> Result<Match> {
    match combinatorially_equivalent(sub, target) {
        Ok(Some(w)) => Ok(Match::Yes(w)),
        Ok(None) => Ok(Match::No),
        Err(Error::SearchCapExceeded { .. }) => Ok(Match::Undecided),
        Err(e) => Err(e),
    }
}

impl ComponentDecomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Interior-certified components equivalent to `target`.
    pub fn isolated_occurrences(
        &self,
        g: &GeometricComplex,
        target: &SimplicialComplex,
    ) -> Result<Vec<OccurrenceReport>> {
        let mut out = Vec::new();
        for (id, c) in self.components.iter().enumerate() {
            if c.len() != target.num_vertices() || !c.is_interior(g.rho) {
                continue;
            }
            let (witness, undecided) = match match_target(&c.complex, target)? {
                Match::Yes(w) => (Some(w), false),
                Match::No => continue,
                Match::Undecided => (None, true),
            };
            out.push(OccurrenceReport {
                kind: OccurrenceKind::Isolated,
                component: id,
                vertices: c.vertices.clone(),
                witness,
                bridge: None,
                interior_certified: true,
                undecided,
            });
        }
        Ok(out)
    }

    /// Copies of `target` cut off from component `host` by removing one
    /// bridge edge. For each bridge the smaller side is tested (both sides
    /// when they have equal size).
    pub fn pendant_occurrences(
        &self,
        g: &GeometricComplex,
        target: &SimplicialComplex,
        host: usize,
    ) -> Result<Vec<OccurrenceReport>> {
        let c = self.components.get(host).ok_or_else(|| {
            Error::InvalidParameter(format!("no component {host} (have {})", self.len()))
        })?;
        let m = c.len();
        let want = target.num_vertices();
        let local: BTreeMap<Vertex, usize> = c
            .vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let mut adj = vec![Vec::new(); m];
        for (a, b) in c.complex.edges() {
            adj[local[&a]].push(local[&b]);
            adj[local[&b]].push(local[&a]);
        }
        let mut out = Vec::new();
        for br in bridges(&adj) {
            let s = br.subtree.len();
            let mut sides = Vec::new();
            if 2 * s <= m {
                sides.push(br.subtree.clone());
            }
            if 2 * s >= m {
                let mut inside = vec![false; m];
                br.subtree.iter().for_each(|&v| inside[v] = true);
                sides.push((0..m).filter(|&v| !inside[v]).collect());
            }
            for side in sides {
                if side.len() != want {
                    continue;
                }
                let mut labels: Vec<Vertex> = side.iter().map(|&i| c.vertices[i]).collect();
                labels.sort_unstable();
                let sub = c.complex.induced(&labels);
                let (witness, undecided) = match match_target(&sub, target)? {
                    Match::Yes(w) => (Some(w), false),
                    Match::No => continue,
                    Match::Undecided => (None, true),
                };
                let (a, b) = (c.vertices[br.edge.0], c.vertices[br.edge.1]);
                let interior_certified = self.window.as_ref().is_some_and(|w| {
                    labels.iter().all(|&v| {
                        let p = g.points.get(v as usize);
                        w.contains(p) && w.depth(p) >= g.rho
                    })
                });
                out.push(OccurrenceReport {
                    kind: OccurrenceKind::Pendant,
                    component: host,
                    vertices: labels,
                    witness,
                    bridge: Some([a.min(b), a.max(b)]),
                    interior_certified,
                    undecided,
                });
            }
        }
        Ok(out)
    }

    /// A component with vertices within `rho` of both faces of the window
    /// orthogonal to `axis` (the largest such, if several).
    pub fn crossing(&self, g: &GeometricComplex, axis: usize) -> Option<usize> {
        let w = self.window.as_ref()?;
        if axis >= w.dim() {
            return None;
        }
        let (lo, hi) = (w.lo()[axis], w.hi()[axis]);
        let mut best: Option<usize> = None;
        for (id, c) in self.components.iter().enumerate() {
            let near = |f: &dyn Fn(f64) -> bool| {
                c.vertices
                    .iter()
                    .any(|&v| f(g.points.get(v as usize)[axis]))
            };
            if near(&|x| x - lo <= g.rho)
                && near(&|x| hi - x <= g.rho)
                && best.is_none_or(|b| self.components[b].len() < c.len())
            {
                best = Some(id);
            }
        }
        best
    }

    /// The crossing component, or the largest component with `false` when
    /// nothing crosses.
    pub fn giant(&self, g: &GeometricComplex, axis: usize) -> Option<(usize, bool)> {
        if let Some(id) = self.crossing(g, axis) {
            return Some((id, true));
        }
        let mut best: Option<usize> = None;
        for (id, c) in self.components.iter().enumerate() {
            if best.is_none_or(|b| self.components[b].len() < c.len()) {
                best = Some(id);
            }
        }
        best.map(|id| (id, false))
    }
}

struct Bridge {
    /// (parent, child) in the DFS tree, local indices.
    edge: (usize, usize),
    /// Local vertices on the child's side.
    subtree: Vec<usize>,
}

/// Bridges of a connected graph by iterative low-link DFS from vertex 0,
/// sorted by their endpoints.
fn bridges(adj: &[Vec<usize>]) -> Vec<Bridge> {
    let m = adj.len();
    if m == 0 {
        return Vec::new();
    }
    const NONE: usize = usize::MAX;
    let mut tin = vec![NONE; m];
    let mut low = vec![0; m];
    let mut size = vec![1usize; m];
    let mut order = Vec::with_capacity(m);
    let mut found = Vec::new();
    let mut stack = vec![(0usize, NONE, 0usize)];
    tin[0] = 0;
    order.push(0);
    while let Some(top) = stack.last_mut() {
        let (v, parent) = (top.0, top.1);
        if top.2 < adj[v].len() {
            let u = adj[v][top.2];
            top.2 += 1;
            if u == parent {
                continue;
            }
            if tin[u] == NONE {
                tin[u] = order.len();
                low[u] = tin[u];
                order.push(u);
                stack.push((u, v, 0));
            } else {
                low[v] = low[v].min(tin[u]);
            }
        } else {
            stack.pop();
            if parent != NONE {
                low[parent] = low[parent].min(low[v]);
                size[parent] += size[v];
                if low[v] > tin[parent] {
                    found.push((parent, v));
                }
            }
        }
    }
    found.sort_by_key(|&(p, c)| (p.min(c), p.max(c)));
    found
        .into_iter()
        .map(|(p, c)| Bridge {
            edge: (p, c),
            subtree: order[tin[c]..tin[c] + size[c]].to_vec(),
        })
        .collect()
}

/// Brute-force check of an isolated report: no point outside the copy is
/// within `rho` of it, and the witness maps the copy onto `target`.
pub fn verify_isolated(
    g: &GeometricComplex,
    target: &SimplicialComplex,
    r: &OccurrenceReport,
) -> bool {
    let inside: std::collections::HashSet<Vertex> = r.vertices.iter().copied().collect();
    let apart = (0..g.points.len() as Vertex)
        .filter(|v| !inside.contains(v))
        .all(|v| {
            r.vertices.iter().all(|&u| {
                !approx_le(
                    dist(g.points.get(u as usize), g.points.get(v as usize)),
                    g.rho,
                )
            })
        });
    apart && witness_holds(g, target, r)
}

/// Brute-force check of a pendant report: deleting the bridge splits the
/// host into the copy and a nonempty rest, and the witness maps the copy
/// onto `target`.
pub fn verify_pendant(
    g: &GeometricComplex,
    d: &ComponentDecomposition,
    target: &SimplicialComplex,
    r: &OccurrenceReport,
) -> bool {
    let Some([a, b]) = r.bridge else {
        return false;
    };
    let host = &d.components[r.component];
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for (u, v) in host.complex.edges() {
        if (u, v) != (a, b) {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
    }
    let start = if r.vertices.contains(&a) { a } else { b };
    let mut seen = std::collections::BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &v in adj.get(&u).map_or(&[][..], |x| x) {
            if seen.insert(v) {
                stack.push(v);
            }
        }
    }
    seen.into_iter().eq(r.vertices.iter().copied())
        && r.vertices.len() < host.len()
        && witness_holds(g, target, r)
}

fn witness_holds(g: &GeometricComplex, target: &SimplicialComplex, r: &OccurrenceReport) -> bool {
    match &r.witness {
        Some(w) => crate::complex::verify_isomorphism(&g.complex.induced(&r.vertices), target, w),
        None => r.undecided,
    }
}

/// Isolated copies of `target` among the components of `g` inside `window`.
pub fn find_isolated_occurrences(
    g: &GeometricComplex,
    target: &SimplicialComplex,
    window: &Cuboid,
) -> Result<Vec<OccurrenceReport>> {
    connected_components_in(g, window).isolated_occurrences(g, target)
}

/// Pendant copies of `target` on component `host` of `g`.
pub fn find_pendant_occurrences(
    g: &GeometricComplex,
    target: &SimplicialComplex,
    host: usize,
) -> Result<Vec<OccurrenceReport>> {
    connected_components(g).pendant_occurrences(g, target, host)
}

/// The component crossing `window` along `axis`, if any.
pub fn crossing_component(g: &GeometricComplex, window: &Cuboid, axis: usize) -> Option<usize> {
    connected_components_in(g, window).crossing(g, axis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{cech_complex, rips_complex};
    use crate::geometry::PointSet;

    fn square(at: [f64; 2], side: f64) -> Vec<[f64; 2]> {
        let [x, y] = at;
        vec![[x, y], [x + side, y], [x + side, y + side], [x, y + side]]
    }

    fn hollow_square() -> SimplicialComplex {
        SimplicialComplex::from_faces(1, [[0, 1], [1, 2], [2, 3], [0, 3]]).unwrap()
    }

    #[test]
    fn two_clusters() {
        let mut pts = square([0.0, 0.0], 1.0);
        pts.extend(square([10.0, 0.0], 1.0));
        let x = PointSet::new(2, &pts).unwrap();
        let g = rips_complex(&x, 1.0, 2).unwrap();
        let d = connected_components(&g);
        assert_eq!(d.len(), 2);
        assert_eq!(d.components[1].vertices, vec![4, 5, 6, 7]);
        assert_eq!(d.components[0].complex.f_vector(), vec![4, 4]);
    }

    #[test]
    fn empty_and_seven_points() {
        let g = rips_complex(&PointSet::empty(2).unwrap(), 1.0, 1).unwrap();
        assert!(connected_components(&g).is_empty());
        let x = crate::fixtures::seven_points();
        let g = cech_complex(&x, 2.4, 2).unwrap();
        assert_eq!(connected_components(&g).len(), 1);
    }

    #[test]
    fn isolated_square_deep_inside() {
        let w = Cuboid::cube(2, 10.0).unwrap();
        let x = PointSet::new(2, &square([4.5, 4.5], 1.0)).unwrap();
        let g = rips_complex(&x, 1.0, 2).unwrap();
        let reports = find_isolated_occurrences(&g, &hollow_square(), &w).unwrap();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].interior_certified && !reports[0].undecided);
        assert!(verify_isolated(&g, &hollow_square(), &reports[0]));
    }

    #[test]
    fn square_near_boundary_is_not_certified() {
        let w = Cuboid::cube(2, 10.0).unwrap();
        let x = PointSet::new(2, &square([0.5, 4.5], 1.0)).unwrap();
        let g = rips_complex(&x, 1.0, 2).unwrap();
        assert!(find_isolated_occurrences(&g, &hollow_square(), &w)
            .unwrap()
            .is_empty());
    }

    /// Triangulated grid, 2-connected at rho = 1.
    fn blob(cols: usize, rows: usize, at: [f64; 2]) -> Vec<[f64; 2]> {
        let mut v = Vec::new();
        for i in 0..cols {
            for j in 0..rows {
                v.push([at[0] + 0.6 * i as f64, at[1] + 0.6 * j as f64]);
            }
        }
        v
    }

    fn triangle_boundary() -> SimplicialComplex {
        SimplicialComplex::from_faces(1, [[0, 1], [1, 2], [0, 2]]).unwrap()
    }

    #[test]
    fn pendant_triangle_on_blob() {
        // Equilateral triangle of side 0.9 with its apex 0.8 from the blob.
        let mut pts = blob(5, 4, [0.0, 0.0]);
        let h = 0.9 * 3f64.sqrt() / 2.0;
        let apex = [3.25, 0.6];
        pts.push(apex);
        pts.push([apex[0] + h, apex[1] - 0.45]);
        pts.push([apex[0] + h, apex[1] + 0.45]);
        let x = PointSet::new(2, &pts).unwrap();
        let g = rips_complex(&x, 1.0, 1).unwrap();
        let d = connected_components(&g);
        assert_eq!(d.len(), 1);
        let reports = d.pendant_occurrences(&g, &triangle_boundary(), 0).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].vertices, vec![20, 21, 22]);
        assert_eq!(reports[0].bridge, Some([17, 20]));
        assert!(verify_pendant(&g, &d, &triangle_boundary(), &reports[0]));
    }

    #[test]
    fn doubly_attached_triangle_is_not_pendant() {
        let mut pts = blob(5, 4, [0.0, 0.0]);
        // Two triangle vertices each within reach of a different blob vertex.
        pts.push([3.2, 0.3]);
        pts.push([3.2, 1.2]);
        pts.push([3.2 + 0.78, 0.75]);
        let x = PointSet::new(2, &pts).unwrap();
        let g = rips_complex(&x, 1.0, 1).unwrap();
        assert!(g.complex.contains(&[20, 21]) && g.complex.contains(&[20, 22]));
        assert!(g.complex.contains(&[18, 21]));
        let reports = find_pendant_occurrences(&g, &triangle_boundary(), 0).unwrap();
        assert!(reports.is_empty());
    }

    #[test]
    fn bridges_of_a_path() {
        let adj = vec![vec![1], vec![0, 2], vec![1]];
        let b = bridges(&adj);
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].edge, (0, 1));
        assert_eq!(b[0].subtree, vec![1, 2]);
        let cyc = vec![vec![1, 2], vec![0, 2], vec![0, 1]];
        assert!(bridges(&cyc).is_empty());
    }

    #[test]
    fn crossing_cases() {
        let w = Cuboid::cube(2, 10.0).unwrap();
        let g = rips_complex(&PointSet::empty(2).unwrap(), 1.0, 1).unwrap();
        assert_eq!(crossing_component(&g, &w, 0), None);
        let one = PointSet::new(2, &[[5.0, 5.0]]).unwrap();
        let g = rips_complex(&one, 1.0, 1).unwrap();
        assert_eq!(crossing_component(&g, &w, 0), None);
        let line: Vec<[f64; 2]> = (0..=20).map(|i| [0.5 * i as f64, 5.0]).collect();
        let g = rips_complex(&PointSet::new(2, &line).unwrap(), 1.0, 1).unwrap();
        assert_eq!(crossing_component(&g, &w, 0), Some(0));
        assert_eq!(crossing_component(&g, &w, 1), None);
        let d = connected_components_in(&g, &w);
        assert_eq!(d.giant(&g, 1), Some((0, false)));
    }

    #[test]
    fn flavors_agree_on_partition() {
        let x = crate::fixtures::seven_points();
        for rho in [1.0, 1.5, 2.2, 3.0] {
            let r = connected_components(&rips_complex(&x, rho, 2).unwrap());
            let c = connected_components(&cech_complex(&x, rho, 2).unwrap());
            assert_eq!(r.component_of, c.component_of);
        }
    }
}
