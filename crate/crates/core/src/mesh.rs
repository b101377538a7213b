//! Conforming triangulations with newest vertex bisection.
//!
//! Every triangle stores its vertices counterclockwise together with the
//! local index of its reference edge; local edge `i` joins vertex `i` and
//! vertex `(i + 1) % 3`. Refinement bisects reference edges only, so a
//! triangle with marked edges is split into 2, 3 or 4 sons and the sons'
//! reference edges lie opposite the newest vertex.
//!
//! Meshes are immutable: [`Mesh::refine`] returns a new mesh whose node list
//! extends the node list of its father, so nodal vectors can be prolongated
//! by index.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{self, Point};
use crate::{Error, Result};

/// A triangle as three node ids (counterclockwise) plus its reference edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub ref_edge: u8,
}

impl Triangle {
    pub fn new(vertices: [usize; 3], ref_edge: u8) -> Self {
        debug_assert!(ref_edge < 3);
        Self { vertices, ref_edge }
    }

    /// Endpoints of local edge `i`.
    pub fn local_edge(&self, i: usize) -> [usize; 2] {
        [self.vertices[i % 3], self.vertices[(i + 1) % 3]]
    }

    /// Vertices `[a, b, c]` rotated so that `(a, b)` is the reference edge.
    pub fn reference_order(&self) -> [usize; 3] {
        let r = self.ref_edge as usize;
        [self.vertices[r], self.vertices[(r + 1) % 3], self.vertices[(r + 2) % 3]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// `plus` is the adjacent triangle with the smaller id. Edge endpoints
    /// follow the orientation of `plus`.
    Interior { plus: usize, minus: usize },
    /// Endpoints follow the counterclockwise orientation of the boundary.
    Boundary { triangle: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub endpoints: [usize; 2],
    pub kind: EdgeKind,
    pub length: f64,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        matches!(self.kind, EdgeKind::Boundary { .. })
    }
}

/// Parent information of a mesh produced by [`Mesh::refine`].
#[derive(Debug, Clone, PartialEq)]
pub struct Lineage {
    /// Number of nodes of the father mesh; fine node ids below it coincide.
    pub coarse_nodes: usize,
    /// Endpoints (father node ids) of the edge bisected by each new node.
    pub midpoint_parents: Vec<[usize; 2]>,
    /// Father edge id bisected by each new node.
    pub bisected_edges: Vec<usize>,
    /// Father triangle of every triangle of the fine mesh.
    pub father: Vec<usize>,
}

/// Polygonal domains with a canonical initial triangulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainSpec {
    /// `(cx - w, cx + w) x (cy - w, cy + w)`.
    Square { center: Point, half_width: f64 },
    /// The square above with the closed lower-left quadrant
    /// `[cx - w, cx] x [cy - w, cy]` removed; the reentrant corner is `center`.
    LShape { center: Point, half_width: f64 },
}

impl DomainSpec {
    pub fn unit_square() -> Self {
        DomainSpec::Square { center: Point::new(0.5, 0.5), half_width: 0.5 }
    }

    fn parts(&self) -> (Point, f64) {
        match *self {
            DomainSpec::Square { center, half_width } | DomainSpec::LShape { center, half_width } => {
                (center, half_width)
            }
        }
    }

    pub fn area(&self) -> f64 {
        let (_, w) = self.parts();
        match self {
            DomainSpec::Square { .. } => 4.0 * w * w,
            DomainSpec::LShape { .. } => 3.0 * w * w,
        }
    }

    /// Whether `p` lies in the closure of the domain.
    pub fn contains(&self, p: Point) -> bool {
        let (c, w) = self.parts();
        let eps = 1e-12 * w.max(1.0);
        let in_square = (p.x - c.x).abs() <= w + eps && (p.y - c.y).abs() <= w + eps;
        match self {
            DomainSpec::Square { .. } => in_square,
            DomainSpec::LShape { .. } => in_square && !(p.x < c.x - eps && p.y < c.y - eps),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nodes: Vec<Point>,
    triangles: Vec<Triangle>,
    edges: Vec<Edge>,
    triangle_edges: Vec<[usize; 3]>,
    areas: Vec<f64>,
    boundary_nodes: Vec<bool>,
    level: usize,
    lineage: Option<Lineage>,
}

impl Mesh {
    /// Builds a mesh with explicit reference edges. Clockwise triangles are
    /// reoriented; the reference edge keeps its endpoints.
    pub fn new(nodes: Vec<Point>, triangles: Vec<Triangle>) -> Result<Self> {
        if nodes.iter().any(|p| !p.is_finite()) {
            return Err(Error::Domain("non-finite node coordinates"));
        }
        let mut tris = triangles;
        for (t, tri) in tris.iter_mut().enumerate() {
            if tri.vertices.iter().any(|&v| v >= nodes.len()) || tri.ref_edge > 2 {
                return Err(Error::DegenerateTriangle(t));
            }
            let [a, b, c] = tri.vertices.map(|v| nodes[v]);
            let area = geometry::signed_area(a, b, c);
            if area == 0.0 || !area.is_finite() {
                return Err(Error::DegenerateTriangle(t));
            }
            if area < 0.0 {
                let [i, j, k] = tri.vertices;
                *tri = Triangle::new([i, k, j], 2 - tri.ref_edge);
            }
        }
        Self::assemble(nodes, tris, 0, None)
    }

    /// Builds a mesh choosing the longest edge of each triangle as its
    /// reference edge; ties go to the edge whose opposite vertex has the
    /// smallest id.
    pub fn from_triangles(nodes: Vec<Point>, triangles: &[[usize; 3]]) -> Result<Self> {
        let mut tris = Vec::with_capacity(triangles.len());
        for (t, v) in triangles.iter().enumerate() {
            if v.iter().any(|&i| i >= nodes.len()) {
                return Err(Error::DegenerateTriangle(t));
            }
            let len = |i: usize| nodes[v[i]].dist(nodes[v[(i + 1) % 3]]);
            let longest = (0..3).map(len).fold(0.0, f64::max);
            let tol = 1e-12 * longest;
            let ref_edge = (0..3).filter(|&i| len(i) >= longest - tol).min_by_key(|&i| v[(i + 2) % 3]).unwrap_or(0);
            tris.push(Triangle::new(*v, ref_edge as u8));
        }
        Self::new(nodes, tris)
    }

    fn assemble(nodes: Vec<Point>, triangles: Vec<Triangle>, level: usize, lineage: Option<Lineage>) -> Result<Self> {
        let areas: Vec<f64> = triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.vertices.map(|v| nodes[v]);
                geometry::signed_area(a, b, c)
            })
            .collect();

        // (min node, max node, triangle, local edge), sorted to pair up neighbours
        let mut half_edges: Vec<(usize, usize, usize, usize)> = Vec::with_capacity(3 * triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            for i in 0..3 {
                let [p, q] = tri.local_edge(i);
                half_edges.push((p.min(q), p.max(q), t, i));
            }
        }
        half_edges.sort_unstable();

        let mut edges = Vec::with_capacity(half_edges.len() / 2 + 8);
        let mut triangle_edges = vec![[usize::MAX; 3]; triangles.len()];
        let mut boundary_nodes = vec![false; nodes.len()];
        let mut k = 0;
        while k < half_edges.len() {
            let (p, q, t, i) = half_edges[k];
            let mut group = 1;
            while k + group < half_edges.len() && half_edges[k + group].0 == p && half_edges[k + group].1 == q {
                group += 1;
            }
            let id = edges.len();
            let endpoints = triangles[t].local_edge(i);
            let kind = match group {
                1 => {
                    boundary_nodes[p] = true;
                    boundary_nodes[q] = true;
                    EdgeKind::Boundary { triangle: t }
                }
                2 => {
                    let (_, _, s, j) = half_edges[k + 1];
                    if triangles[s].local_edge(j) != [endpoints[1], endpoints[0]] {
                        return Err(Error::Domain("inconsistent orientation across an edge"));
                    }
                    triangle_edges[s][j] = id;
                    EdgeKind::Interior { plus: t, minus: s }
                }
                _ => return Err(Error::Domain("edge shared by more than two triangles")),
            };
            triangle_edges[t][i] = id;
            edges.push(Edge { endpoints, kind, length: nodes[p].dist(nodes[q]) });
            k += group;
        }

        Ok(Self { nodes, triangles, edges, triangle_edges, areas, boundary_nodes, level, lineage })
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> Point {
        self.nodes[id]
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Result<&Edge> {
        self.edges.get(id).ok_or(Error::UnknownEdge(id))
    }

    /// Global edge ids of the local edges of triangle `t`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    pub fn area(&self, t: usize) -> f64 {
        self.areas[t]
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn vertices(&self, t: usize) -> [Point; 3] {
        self.triangles[t].vertices.map(|v| self.nodes[v])
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_boundary_node(&self, v: usize) -> bool {
        self.boundary_nodes[v]
    }

    pub fn boundary_nodes(&self) -> &[bool] {
        &self.boundary_nodes
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.boundary_nodes.iter().enumerate().filter(|(_, b)| !**b).map(|(i, _)| i)
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = (usize, &Edge)> + '_ {
        self.edges.iter().enumerate().filter(|(_, e)| e.is_boundary())
    }

    pub fn interior_edges(&self) -> impl Iterator<Item = (usize, &Edge)> + '_ {
        self.edges.iter().enumerate().filter(|(_, e)| !e.is_boundary())
    }

    /// Number of refinements since the initial mesh.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn lineage(&self) -> Option<&Lineage> {
        self.lineage.as_ref()
    }

    /// The two triangles adjacent to an interior edge and the area of their union.
    pub fn edge_patch(&self, edge: usize) -> Result<(usize, usize, f64)> {
        match self.edge(edge)?.kind {
            EdgeKind::Interior { plus, minus } => Ok((plus, minus, self.areas[plus] + self.areas[minus])),
            EdgeKind::Boundary { .. } => Err(Error::BoundaryEdge(edge)),
        }
    }

    /// `max_T diam(T)^2 / |T|`.
    pub fn shape_regularity(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| {
                let d = geometry::diameter(self.vertices(t));
                d * d / self.areas[t]
            })
            .fold(0.0, f64::max)
    }

    /// Smallest interior angle over all triangles, in radians.
    pub fn min_angle(&self) -> f64 {
        (0..self.num_triangles()).flat_map(|t| geometry::angles(self.vertices(t))).fold(f64::INFINITY, f64::min)
    }

    /// Newest vertex bisection of all `marked` edges plus the closure needed
    /// to keep the mesh conforming.
    pub fn refine(&self, marked: &[usize]) -> Result<Mesh> {
        let mut flags = vec![false; self.edges.len()];
        let mut queue = Vec::with_capacity(marked.len());
        for &e in marked {
            if e >= self.edges.len() {
                return Err(Error::UnknownEdge(e));
            }
            if !flags[e] {
                flags[e] = true;
                queue.push(e);
            }
        }
        // closure: a triangle with a marked edge needs its reference edge bisected
        while let Some(e) = queue.pop() {
            let (t1, t2) = match self.edges[e].kind {
                EdgeKind::Interior { plus, minus } => (plus, Some(minus)),
                EdgeKind::Boundary { triangle } => (triangle, None),
            };
            for t in core::iter::once(t1).chain(t2) {
                let r = self.triangle_edges[t][self.triangles[t].ref_edge as usize];
                if !flags[r] {
                    flags[r] = true;
                    queue.push(r);
                }
            }
        }

        let mut nodes = self.nodes.clone();
        let mut midpoint = vec![usize::MAX; self.edges.len()];
        let mut midpoint_parents = Vec::new();
        let mut bisected_edges = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if flags[e] {
                let [p, q] = edge.endpoints;
                midpoint[e] = nodes.len();
                nodes.push(self.nodes[p].midpoint(self.nodes[q]));
                midpoint_parents.push([p.min(q), p.max(q)]);
                bisected_edges.push(e);
            }
        }

        let mut triangles = Vec::with_capacity(self.triangles.len() * 2);
        let mut father = Vec::with_capacity(self.triangles.len() * 2);
        for (t, tri) in self.triangles.iter().enumerate() {
            let r = tri.ref_edge as usize;
            let ids = self.triangle_edges[t];
            let (ab, bc, ca) = (ids[r], ids[(r + 1) % 3], ids[(r + 2) % 3]);
            if !flags[ab] {
                triangles.push(*tri);
                father.push(t);
                continue;
            }
            let [a, b, c] = tri.reference_order();
            let m = midpoint[ab];
            // left son (c, a, m) with reference edge (c, a)
            if flags[ca] {
                let n = midpoint[ca];
                triangles.push(Triangle::new([m, c, n], 0));
                triangles.push(Triangle::new([a, m, n], 0));
                father.extend([t, t]);
            } else {
                triangles.push(Triangle::new([c, a, m], 0));
                father.push(t);
            }
            // right son (b, c, m) with reference edge (b, c)
            if flags[bc] {
                let p = midpoint[bc];
                triangles.push(Triangle::new([m, b, p], 0));
                triangles.push(Triangle::new([c, m, p], 0));
                father.extend([t, t]);
            } else {
                triangles.push(Triangle::new([b, c, m], 0));
                father.push(t);
            }
        }

        let lineage = Lineage { coarse_nodes: self.nodes.len(), midpoint_parents, bisected_edges, father };
        Self::assemble(nodes, triangles, self.level + 1, Some(lineage))
    }

    /// Refinement with every edge marked: each triangle splits into four.
    pub fn refine_uniform(&self) -> Result<Mesh> {
        let all: Vec<usize> = (0..self.edges.len()).collect();
        self.refine(&all)
    }

    /// Audits the edge incidence: interior edges have two neighbours which
    /// traverse the edge in opposite directions, boundary edges have one.
    pub fn is_conforming(&self) -> bool {
        let mut incidence = vec![0u8; self.edges.len()];
        for (t, ids) in self.triangle_edges.iter().enumerate() {
            for (i, &e) in ids.iter().enumerate() {
                let Some(edge) = self.edges.get(e) else { return false };
                let [p, q] = self.triangles[t].local_edge(i);
                if !(edge.endpoints == [p, q] || edge.endpoints == [q, p]) {
                    return false;
                }
                incidence[e] += 1;
            }
        }
        self.edges.iter().zip(&incidence).all(|(e, &n)| match e.kind {
            EdgeKind::Interior { .. } => n == 2,
            EdgeKind::Boundary { .. } => n == 1,
        }) && self.areas.iter().all(|&a| a > 0.0)
    }
}

/// Canonical coarse triangulation: every square block split along its
/// lower-left to upper-right diagonal.
pub fn build_initial_mesh(domain: &DomainSpec) -> Result<Mesh> {
    let (c, w) = domain.parts();
    if !(w > 0.0) || !w.is_finite() || !c.is_finite() {
        return Err(Error::Domain("half width must be positive and finite"));
    }
    let (nodes, blocks): (Vec<Point>, Vec<[usize; 4]>) = match domain {
        DomainSpec::Square { .. } => (
            vec![
                Point::new(c.x - w, c.y - w),
                Point::new(c.x + w, c.y - w),
                Point::new(c.x + w, c.y + w),
                Point::new(c.x - w, c.y + w),
            ],
            vec![[0, 1, 2, 3]],
        ),
        DomainSpec::LShape { .. } => (
            vec![
                Point::new(c.x, c.y - w),
                Point::new(c.x + w, c.y - w),
                Point::new(c.x - w, c.y),
                Point::new(c.x, c.y),
                Point::new(c.x + w, c.y),
                Point::new(c.x - w, c.y + w),
                Point::new(c.x, c.y + w),
                Point::new(c.x + w, c.y + w),
            ],
            // lower-left, lower-right, upper-right, upper-left corners
            vec![[0, 1, 4, 3], [2, 3, 6, 5], [3, 4, 7, 6]],
        ),
    };
    let triangles: Vec<[usize; 3]> = blocks.iter().flat_map(|&[ll, lr, ur, ul]| [[ll, lr, ur], [ll, ur, ul]]).collect();
    Mesh::from_triangles(nodes, &triangles)
}
