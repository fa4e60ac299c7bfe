//! Closed polyhedral surfaces, per-face boundary conditions and OFF input.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCondition, VertexCorner};

/// Relative tolerance for planarity and convexity tests.
const SHAPE_TOL: f64 = 1e-9;

/// Closed polyhedron with faces wound anticlockwise seen from outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyhedron {
    vertices: Vec<Vector3<f64>>,
    faces: Vec<Vec<usize>>,
}

/// Boundary point with its outward normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub x: Vector3<f64>,
    pub normal: Vector3<f64>,
    pub face: usize,
}

impl Polyhedron {
    /// Checks that the surface is closed, consistently wound outward and has
    /// planar faces.
    pub fn new(vertices: Vec<Vector3<f64>>, faces: Vec<Vec<usize>>) -> Result<Self> {
        if vertices.len() < 4 || faces.len() < 4 {
            return Err(Error::Invalid("a polyhedron needs at least 4 vertices and 4 faces".into()));
        }
        if vertices.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::Invalid("non-finite vertex coordinate".into()));
        }
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            if f.len() < 3 {
                return Err(Error::Invalid(format!("face {fi} has fewer than 3 vertices")));
            }
            if f.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::Invalid(format!("face {fi} references a missing vertex")));
            }
            for k in 0..f.len() {
                let e = (f[k], f[(k + 1) % f.len()]);
                if e.0 == e.1 {
                    return Err(Error::Invalid(format!("face {fi} repeats a vertex")));
                }
                if directed.insert(e, fi).is_some() {
                    return Err(Error::Invalid(format!("edge {e:?} is used twice with the same orientation")));
                }
            }
        }
        if let Some(e) = directed.keys().find(|&&(a, b)| !directed.contains_key(&(b, a))) {
            return Err(Error::Invalid(format!("surface is not closed: edge {e:?} has no partner")));
        }
        let p = Self { vertices, faces };
        let scale = p.diameter();
        for fi in 0..p.faces.len() {
            if p.face_area(fi) <= 0.0 {
                return Err(Error::Degenerate(format!("face {fi} has zero area")));
            }
            let n = p.face_normal(fi);
            let c = p.face_centroid(fi);
            if p.faces[fi].iter().any(|&i| (p.vertices[i] - c).dot(&n).abs() > SHAPE_TOL * scale) {
                return Err(Error::Degenerate(format!("face {fi} is not planar")));
            }
        }
        if p.volume() <= 0.0 {
            return Err(Error::Invalid("faces are wound inward (negative volume)".into()));
        }
        Ok(p)
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// Regular tetrahedron with the given circumradius.
    pub fn tetrahedron(center: Vector3<f64>, circumradius: f64) -> Result<Self> {
        let s = circumradius / 3f64.sqrt();
        let v = [
            Vector3::new(1.0, 1.0, 1.0),
            Vector3::new(1.0, -1.0, -1.0),
            Vector3::new(-1.0, 1.0, -1.0),
            Vector3::new(-1.0, -1.0, 1.0),
        ];
        let vertices = v.iter().map(|p| center + p * s).collect();
        Self::new(vertices, vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]])
    }

    /// Axis-aligned cube.
    pub fn cube(center: Vector3<f64>, side: f64) -> Result<Self> {
        let h = 0.5 * side;
        let vertices = (0..8)
            .map(|i| {
                let sx = if i & 1 == 0 { -h } else { h };
                let sy = if i & 2 == 0 { -h } else { h };
                let sz = if i & 4 == 0 { -h } else { h };
                center + Vector3::new(sx, sy, sz)
            })
            .collect();
        let faces = vec![
            vec![0, 2, 3, 1],
            vec![4, 5, 7, 6],
            vec![0, 1, 5, 4],
            vec![2, 6, 7, 3],
            vec![0, 4, 6, 2],
            vec![1, 3, 7, 5],
        ];
        Self::new(vertices, faces)
    }

    /// Subdivided icosahedron with vertices on the sphere.
    pub fn icosphere(center: Vector3<f64>, radius: f64, subdivisions: u32) -> Result<Self> {
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let mut verts: Vec<Vector3<f64>> = [
            (-1.0, t, 0.0),
            (1.0, t, 0.0),
            (-1.0, -t, 0.0),
            (1.0, -t, 0.0),
            (0.0, -1.0, t),
            (0.0, 1.0, t),
            (0.0, -1.0, -t),
            (0.0, 1.0, -t),
            (t, 0.0, -1.0),
            (t, 0.0, 1.0),
            (-t, 0.0, -1.0),
            (-t, 0.0, 1.0),
        ]
        .iter()
        .map(|&(x, y, z)| Vector3::new(x, y, z).normalize())
        .collect();
        let mut tris: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..subdivisions {
            let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
            let mut next = Vec::with_capacity(tris.len() * 4);
            let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Vector3<f64>>| {
                *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    verts.push(((verts[a] + verts[b]) * 0.5).normalize());
                    verts.len() - 1
                })
            };
            for [a, b, c] in tris {
                let ab = midpoint(a, b, &mut verts);
                let bc = midpoint(b, c, &mut verts);
                let ca = midpoint(c, a, &mut verts);
                next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            tris = next;
        }
        let vertices = verts.iter().map(|v| center + v * radius).collect();
        Self::new(vertices, tris.iter().map(|t| t.to_vec()).collect())
    }

    /// Reads the OFF format (`OFF`, counts line, vertices, faces).
    pub fn from_off(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace);
        let bad = |what: &str| Error::Invalid(format!("malformed OFF: {what}"));
        match tokens.next() {
            Some("OFF") => {}
            _ => return Err(bad("missing OFF header")),
        }
        let mut next_usize = |what: &str| -> Result<usize> {
            tokens.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad(what))
        };
        let nv = next_usize("vertex count")?;
        let nf = next_usize("face count")?;
        let _ne = next_usize("edge count")?;
        let mut floats = Vec::with_capacity(3 * nv);
        let mut faces = Vec::with_capacity(nf);
        let rest: Vec<&str> = tokens.collect();
        let mut it = rest.into_iter();
        for _ in 0..3 * nv {
            floats.push(it.next().and_then(|t| t.parse::<f64>().ok()).ok_or_else(|| bad("vertex coordinate"))?);
        }
        for _ in 0..nf {
            let k: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("face size"))?;
            let f = (0..k)
                .map(|_| it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("face index")))
                .collect::<Result<Vec<usize>>>()?;
            faces.push(f);
        }
        let vertices = floats.chunks(3).map(|c| Vector3::new(c[0], c[1], c[2])).collect();
        Self::new(vertices, faces)
    }

    pub fn to_off(&self) -> String {
        let mut s = format!("OFF\n{} {} 0\n", self.vertices.len(), self.faces.len());
        for v in &self.vertices {
            s.push_str(&format!("{} {} {}\n", v.x, v.y, v.z));
        }
        for f in &self.faces {
            s.push_str(&f.len().to_string());
            for i in f {
                s.push_str(&format!(" {i}"));
            }
            s.push('\n');
        }
        s
    }

    /// Newell normal, unit length, outward.
    pub fn face_normal(&self, i: usize) -> Vector3<f64> {
        self.newell(i).normalize()
    }

    fn newell(&self, i: usize) -> Vector3<f64> {
        let f = &self.faces[i];
        let c = self.face_centroid(i);
        (0..f.len())
            .map(|k| (self.vertices[f[k]] - c).cross(&(self.vertices[f[(k + 1) % f.len()]] - c)))
            .sum::<Vector3<f64>>()
            * 0.5
    }

    pub fn face_area(&self, i: usize) -> f64 {
        self.newell(i).norm()
    }

    /// Mean of the face's vertices.
    pub fn face_centroid(&self, i: usize) -> Vector3<f64> {
        let f = &self.faces[i];
        f.iter().map(|&k| self.vertices[k]).sum::<Vector3<f64>>() / f.len() as f64
    }

    /// Mean of all vertices.
    pub fn centroid(&self) -> Vector3<f64> {
        self.vertices.iter().sum::<Vector3<f64>>() / self.vertices.len() as f64
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    pub fn volume(&self) -> f64 {
        (0..self.faces.len()).map(|i| self.face_centroid(i).dot(&self.newell(i)) / 3.0).sum()
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.faces.len()).map(|i| self.face_area(i)).sum()
    }

    /// Every vertex lies on the inner side of every face plane.
    pub fn is_convex(&self) -> bool {
        let tol = SHAPE_TOL * self.diameter();
        (0..self.faces.len()).all(|i| {
            let n = self.face_normal(i);
            let c = self.face_centroid(i);
            self.vertices.iter().all(|v| (v - c).dot(&n) <= tol)
        })
    }

    /// Signed distance to the nearest face plane from inside; positive when
    /// `x` is outside some face plane (exact for convex bodies only).
    pub fn plane_distance(&self, x: &Vector3<f64>) -> f64 {
        (0..self.faces.len())
            .map(|i| (x - self.face_centroid(i)).dot(&self.face_normal(i)))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Point-in-polyhedron test for convex bodies.
    pub fn contains(&self, x: &Vector3<f64>) -> bool {
        self.plane_distance(x) < 0.0
    }

    pub fn translated(&self, t: &Vector3<f64>) -> Self {
        Self { vertices: self.vertices.iter().map(|v| v + t).collect(), faces: self.faces.clone() }
    }

    /// Copy scaled by `s` about `center`.
    pub fn scaled(&self, center: &Vector3<f64>, s: f64) -> Self {
        Self { vertices: self.vertices.iter().map(|v| center + (v - center) * s).collect(), faces: self.faces.clone() }
    }

    /// Quasi-uniform points on the surface: each face is fanned into
    /// triangles, each triangle cut into `N²` similar pieces with `N` set by
    /// its share of the area, and the piece centroids kept. A nonzero
    /// `refine` raises every `N` by that much and moves the points off-centre,
    /// giving a disjoint out-of-sample set.
    pub fn surface_points(&self, target: usize, refine: usize) -> Vec<SurfacePoint> {
        let total = self.surface_area();
        let mut out = Vec::new();
        for fi in 0..self.faces.len() {
            let f = &self.faces[fi];
            let normal = self.face_normal(fi);
            for k in 1..f.len() - 1 {
                let (a, b, c) = (self.vertices[f[0]], self.vertices[f[k]], self.vertices[f[k + 1]]);
                let area = 0.5 * (b - a).cross(&(c - a)).norm();
                let n = ((target as f64 * area / total).sqrt().round() as usize).max(1) + refine;
                let (u, v) = ((b - a) / n as f64, (c - a) / n as f64);
                // Centroids, or off-centre points for the check set so that
                // it never meets a coarser lattice.
                let (up, down) = if refine == 0 { ((1.0 / 3.0, 1.0 / 3.0), (2.0 / 3.0, 2.0 / 3.0)) } else { ((0.29, 0.37), (0.71, 0.63)) };
                for i in 0..n {
                    for j in 0..n - i {
                        let base = a + u * i as f64 + v * j as f64;
                        out.push(SurfacePoint { x: base + u * up.0 + v * up.1, normal, face: fi });
                        if i + j + 1 < n {
                            out.push(SurfacePoint { x: base + u * down.0 + v * down.1, normal, face: fi });
                        }
                    }
                }
            }
        }
        if out.len() > target + target / 2 {
            // Thin evenly to about the target.
            let len = out.len();
            let keep: Vec<SurfacePoint> = (0..target).map(|i| out[i * len / target]).collect();
            return keep;
        }
        out
    }

    /// The cone of the polyhedron at vertex `vi`: edge directions in cyclic
    /// order, each face carrying `face_bcs[face]`.
    pub fn vertex_corner(&self, vi: usize, face_bcs: &[BoundaryCondition]) -> Result<VertexCorner> {
        if vi >= self.vertices.len() || face_bcs.len() != self.faces.len() {
            return Err(Error::Invalid("vertex index or face condition count out of range".into()));
        }
        // For each face at the vertex: (previous vertex, next vertex) in its winding.
        let around: Vec<(usize, usize, usize)> = self
            .faces
            .iter()
            .enumerate()
            .filter_map(|(fi, f)| {
                let k = f.iter().position(|&i| i == vi)?;
                Some((fi, f[(k + f.len() - 1) % f.len()], f[(k + 1) % f.len()]))
            })
            .collect();
        if around.len() < 3 {
            return Err(Error::Degenerate(format!("vertex {vi} touches fewer than 3 faces")));
        }
        let mut order = vec![around[0]];
        while order.len() < around.len() {
            let last = order.last().expect("non-empty").2;
            let next = around
                .iter()
                .find(|t| t.1 == last)
                .ok_or_else(|| Error::Degenerate(format!("faces around vertex {vi} do not close up")))?;
            order.push(*next);
        }
        let p = self.vertices[vi];
        let dirs: Vec<Vector3<f64>> = order.iter().map(|t| self.vertices[t.1] - p).collect();
        let bcs: Vec<BoundaryCondition> = order.iter().map(|t| face_bcs[t.0]).collect();
        VertexCorner::from_directions(&dirs, &bcs, false)
    }
}

/// Polyhedral scatterer with one boundary condition per face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub mesh: Polyhedron,
    pub bcs: Vec<BoundaryCondition>,
}

/// Per-face conditions as read from a JSON sidecar: a default plus
/// overrides keyed by face index.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceConditions {
    #[serde(default)]
    pub default: Option<BoundaryCondition>,
    #[serde(default)]
    pub faces: BTreeMap<usize, BoundaryCondition>,
}

impl Obstacle {
    pub fn new(mesh: Polyhedron, bcs: Vec<BoundaryCondition>) -> Result<Self> {
        if bcs.len() != mesh.faces().len() {
            return Err(Error::Invalid(format!("{} conditions for {} faces", bcs.len(), mesh.faces().len())));
        }
        for bc in &bcs {
            bc.validate()?;
        }
        if !mesh.is_convex() {
            return Err(Error::Invalid("obstacle must be convex".into()));
        }
        Ok(Self { mesh, bcs })
    }

    pub fn uniform(mesh: Polyhedron, bc: BoundaryCondition) -> Result<Self> {
        let n = mesh.faces().len();
        Self::new(mesh, vec![bc; n])
    }

    pub fn with_conditions(mesh: Polyhedron, spec: &FaceConditions) -> Result<Self> {
        let n = mesh.faces().len();
        if let Some(&bad) = spec.faces.keys().find(|&&i| i >= n) {
            return Err(Error::Invalid(format!("condition given for face {bad}, but there are {n} faces")));
        }
        let bcs = (0..n)
            .map(|i| {
                spec.faces
                    .get(&i)
                    .copied()
                    .or(spec.default)
                    .ok_or_else(|| Error::Invalid(format!("no condition for face {i} and no default")))
            })
            .collect::<Result<_>>()?;
        Self::new(mesh, bcs)
    }

    /// Loads an OFF file and its JSON sidecar of face conditions.
    pub fn load(off: &Path, sidecar: &Path) -> Result<Self> {
        let mesh = Polyhedron::from_off(&std::fs::read_to_string(off)?)?;
        let spec: FaceConditions = serde_json::from_str(&std::fs::read_to_string(sidecar)?)?;
        Self::with_conditions(mesh, &spec)
    }

    pub fn translated(&self, t: &Vector3<f64>) -> Self {
        Self { mesh: self.mesh.translated(t), bcs: self.bcs.clone() }
    }

    pub fn vertex_corner(&self, vi: usize) -> Result<VertexCorner> {
        self.mesh.vertex_corner(vi, &self.bcs)
    }
}
