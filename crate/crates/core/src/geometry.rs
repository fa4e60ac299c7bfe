//! Corner geometry: boundary-condition types, edge corners in the canonical
//! wedge frame, polyhedral vertex cones, and angle rationality.

use std::f64::consts::PI;

use nalgebra::{Rotation3, Unit, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::wrap_azimuth;

/// Tolerance for deciding that a dihedral fraction is an exact rational.
pub const EPS_RATIONAL: f64 = 1e-12;

/// Default denominator bound for rationality searches.
pub const DEFAULT_DENOMINATOR_BOUND: u64 = 100;

/// Condition satisfied by the field on a plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BoundaryCondition {
    /// `u = 0`.
    Nodal,
    /// `∂_ν u = 0`.
    Singular,
    /// `∂_ν u + η u = 0` with constant nonzero `η`.
    GeneralizedSingular { eta: Complex64 },
}

impl BoundaryCondition {
    pub fn generalized(eta: Complex64) -> Result<Self> {
        if !eta.re.is_finite() || !eta.im.is_finite() {
            return Err(domain("impedance η must be finite"));
        }
        if eta == Complex64::new(0.0, 0.0) {
            return Err(domain("impedance η must be nonzero; use Singular for η = 0"));
        }
        Ok(Self::GeneralizedSingular { eta })
    }

    pub fn is_nodal(&self) -> bool {
        matches!(self, Self::Nodal)
    }

    /// Impedance constant, `0` for singular planes, `None` for nodal planes.
    pub fn eta(&self) -> Option<Complex64> {
        match *self {
            Self::Nodal => None,
            Self::Singular => Some(Complex64::new(0.0, 0.0)),
            Self::GeneralizedSingular { eta } => Some(eta),
        }
    }

    /// Same condition with `η` replaced by `0` (nodal stays nodal).
    pub fn with_zero_eta(&self) -> Self {
        match self {
            Self::Nodal => Self::Nodal,
            _ => Self::Singular,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Nodal => "nodal",
            Self::Singular => "singular",
            Self::GeneralizedSingular { .. } => "impedance",
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if let Self::GeneralizedSingular { eta } = *self {
            Self::generalized(eta)?;
        }
        Ok(())
    }
}

/// Two half-planes meeting along the `x₃`-axis: `Π₁` at `φ = 0`, `Π₂` at
/// `φ = απ`, the wedge being `0 < φ < απ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeCorner {
    pub alpha: f64,
    pub bc1: BoundaryCondition,
    pub bc2: BoundaryCondition,
    /// `u ≡ 0` on the edge line near the corner point.
    #[serde(default)]
    pub aux_line_zero: bool,
}

impl EdgeCorner {
    pub fn new(alpha: f64, bc1: BoundaryCondition, bc2: BoundaryCondition, aux_line_zero: bool) -> Result<Self> {
        let c = Self { alpha, bc1, bc2, aux_line_zero };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        check_fraction(self.alpha)?;
        self.bc1.validate()?;
        self.bc2.validate()
    }

    pub fn opening(&self) -> f64 {
        self.alpha * PI
    }
}

fn check_fraction(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("dihedral fraction α = {alpha} must lie strictly inside (0, 1)")));
    }
    Ok(())
}

/// Direction off the poles, `θ ∈ (0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub theta: f64,
    pub phi: f64,
}

impl Ray {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < PI) || !phi.is_finite() {
            return Err(domain(format!("ray polar angle {theta} must lie in (0, π)")));
        }
        Ok(Self { theta, phi: wrap_azimuth(phi) })
    }

    pub fn from_vector(v: &Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(domain("zero or non-finite ray direction"));
        }
        let theta = (v.z / n).clamp(-1.0, 1.0).acos();
        Self::new(theta, v.y.atan2(v.x))
    }

    pub fn unit(&self) -> Vector3<f64> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vector3::new(st * cp, st * sp, ct)
    }

    /// Local frame `(r̂, θ̂, φ̂)` at this direction.
    pub fn frame(&self) -> [Vector3<f64>; 3] {
        spherical_frame(self.theta, self.phi)
    }
}

pub(crate) fn spherical_frame(theta: f64, phi: f64) -> [Vector3<f64>; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [
        Vector3::new(st * cp, st * sp, ct),
        Vector3::new(ct * cp, ct * sp, -st),
        Vector3::new(-sp, cp, 0.0),
    ]
}

/// Unit normal of the plane spanned by two rays: `normalize(b × a)`.
pub fn plane_normal_from_rays(a: &Ray, b: &Ray) -> Result<Vector3<f64>> {
    normal_of(&a.unit(), &b.unit())
}

fn normal_of(a: &Vector3<f64>, b: &Vector3<f64>) -> Result<Vector3<f64>> {
    let c = b.cross(a);
    let n = c.norm();
    if n < 1e-12 {
        return Err(Error::Degenerate("rays are parallel and span no plane".into()));
    }
    Ok(c / n)
}

/// Polyhedral cone: face `i` is spanned by `rays[i]` and `rays[i+1]` (cyclic)
/// and carries `bcs[i]`. Rays wind anticlockwise around the `x₃`-axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexCorner {
    pub rays: Vec<Ray>,
    pub bcs: Vec<BoundaryCondition>,
    /// `u(0) = 0`.
    #[serde(default)]
    pub aux_vertex_zero: bool,
}

impl VertexCorner {
    pub fn new(rays: Vec<Ray>, bcs: Vec<BoundaryCondition>, aux_vertex_zero: bool) -> Result<Self> {
        let v = Self { rays, bcs, aux_vertex_zero };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.rays.len();
        if n < 3 {
            return Err(domain(format!("a vertex corner needs at least 3 planes, got {n}")));
        }
        if self.bcs.len() != n {
            return Err(domain(format!("{} rays but {} boundary conditions", n, self.bcs.len())));
        }
        for bc in &self.bcs {
            bc.validate()?;
        }
        let mut total = 0.0;
        for i in 0..n {
            let a = &self.rays[i];
            let b = &self.rays[(i + 1) % n];
            if !(a.theta > 0.0 && a.theta < PI) {
                return Err(domain("ray polar angle must lie in (0, π)"));
            }
            let gap = (b.phi - a.phi).rem_euclid(2.0 * PI);
            if !(gap > 0.0 && gap < PI) {
                return Err(domain(format!(
                    "azimuthal gap between rays {i} and {} is {gap}, must lie in (0, π)",
                    (i + 1) % n
                )));
            }
            total += gap;
        }
        if (total - 2.0 * PI).abs() > 1e-9 {
            return Err(domain("rays must wind exactly once around the axis"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    /// Builds a cone from edge directions in any frame; face `i` is spanned by
    /// `dirs[i]` and `dirs[i+1]`. The frame is rotated so that the mean edge
    /// direction becomes `x₃`, and the order reversed if it winds clockwise.
    pub fn from_directions(
        dirs: &[Vector3<f64>],
        bcs: &[BoundaryCondition],
        aux_vertex_zero: bool,
    ) -> Result<Self> {
        let n = dirs.len();
        if n < 3 || bcs.len() != n {
            return Err(domain("need at least 3 directions and one boundary condition per face"));
        }
        let units: Vec<Vector3<f64>> = dirs
            .iter()
            .map(|d| {
                let l = d.norm();
                if l > 0.0 && l.is_finite() {
                    Ok(d / l)
                } else {
                    Err(domain("zero or non-finite edge direction"))
                }
            })
            .collect::<Result<_>>()?;
        let mean: Vector3<f64> = units.iter().sum();
        if mean.norm() < 1e-12 {
            return Err(Error::Degenerate("edge directions do not bound a pointed cone".into()));
        }
        let rot = rotation_onto_z(&mean);
        let local: Vec<Vector3<f64>> = units.iter().map(|u| rot * u).collect();
        let mut rays: Vec<Ray> = local.iter().map(Ray::from_vector).collect::<Result<_>>()?;
        let mut faces = bcs.to_vec();
        let winding: f64 = (0..n)
            .map(|i| {
                let g = (rays[(i + 1) % n].phi - rays[i].phi).rem_euclid(2.0 * PI);
                if g < PI {
                    1.0
                } else {
                    -1.0
                }
            })
            .sum();
        if winding < 0.0 {
            // Reversed order: face spanned by old rays (i+1, i) keeps its condition.
            rays.reverse();
            faces = (0..n).map(|i| bcs[(2 * n - 2 - i) % n]).collect();
        }
        Self::new(rays, faces, aux_vertex_zero)
    }

    /// Builds a cone from outward face normals listed cyclically; face `i`
    /// gets `bcs[i]`.
    pub fn from_normals(
        normals: &[Vector3<f64>],
        bcs: &[BoundaryCondition],
        aux_vertex_zero: bool,
    ) -> Result<Self> {
        let n = normals.len();
        if n < 3 || bcs.len() != n {
            return Err(domain("need at least 3 normals and one boundary condition per face"));
        }
        // Edge shared by faces i-1 and i; it is edge i of face i.
        let mut dirs = Vec::with_capacity(n);
        for i in 0..n {
            let prev = &normals[(i + n - 1) % n];
            let cur = &normals[i];
            let mut e = prev.cross(cur);
            if e.norm() < 1e-12 {
                return Err(Error::Degenerate(format!("faces {} and {i} are parallel", (i + n - 1) % n)));
            }
            e.normalize_mut();
            let other = &normals[(i + 1) % n];
            if e.dot(other) > 0.0 {
                e = -e;
            }
            dirs.push(e);
        }
        Self::from_directions(&dirs, bcs, aux_vertex_zero)
    }

    /// Three-plane cone in the working-pair frame: `Π₁` and `Π₂` meet along
    /// `x₃` with opening `απ`, the third plane passes through the rays
    /// `(θ₁, 0)` and `(θ₂, απ)`.
    pub fn three_plane(
        alpha: f64,
        theta1: f64,
        theta2: f64,
        bcs: [BoundaryCondition; 3],
        aux_vertex_zero: bool,
    ) -> Result<Self> {
        check_fraction(alpha)?;
        let a = Ray::new(theta1, 0.0)?.unit();
        let b = Ray::new(theta2, alpha * PI)?.unit();
        let s = Vector3::z();
        Self::from_directions(&[a, s, b], &bcs, aux_vertex_zero)
    }

    /// Outward unit normal of face `i`.
    pub fn face_normal(&self, i: usize) -> Vector3<f64> {
        let n = self.len();
        plane_normal_from_rays(&self.rays[i], &self.rays[(i + 1) % n])
            .expect("validated cone has non-degenerate faces")
    }

    /// Interior dihedral angle (radians) between faces `i` and `i+1`.
    pub fn dihedral_angle(&self, i: usize) -> f64 {
        let n = self.len();
        let c = self.face_normal(i).dot(&self.face_normal((i + 1) % n)).clamp(-1.0, 1.0);
        PI - c.acos()
    }

    /// Frame with `x₃` along the edge shared by faces `i` and `i+1`, the first
    /// face of the pair at azimuth 0 and the second at `απ`.
    pub fn pair_frame(&self, i: usize) -> PairFrame {
        let n = self.len();
        let shared = self.rays[(i + 1) % n].unit();
        let before = self.rays[i].unit();
        let after = self.rays[(i + 2) % n].unit();
        let perp = |v: &Vector3<f64>| {
            let p = v - shared * shared.dot(v);
            p / p.norm()
        };
        let (mut x, mut other) = (perp(&before), perp(&after));
        let mut faces = (i, (i + 1) % n);
        if shared.cross(&x).dot(&other) < 0.0 {
            std::mem::swap(&mut x, &mut other);
            faces = (faces.1, faces.0);
        }
        let y = shared.cross(&x);
        // Rows are the new basis vectors, so this maps vertex-frame coordinates
        // to pair-frame coordinates.
        let m = nalgebra::Matrix3::from_rows(&[x.transpose(), y.transpose(), shared.transpose()]);
        let rotation = Rotation3::from_matrix_unchecked(m);
        let alpha = (self.dihedral_angle(i) / PI).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
        PairFrame { first_face: faces.0, second_face: faces.1, rotation, alpha }
    }
}

/// Canonical frame of one adjacent face pair of a vertex cone.
#[derive(Debug, Clone, Copy)]
pub struct PairFrame {
    /// Face placed at azimuth 0.
    pub first_face: usize,
    /// Face placed at azimuth `απ`.
    pub second_face: usize,
    /// Vertex frame to pair frame.
    pub rotation: Rotation3<f64>,
    pub alpha: f64,
}

impl PairFrame {
    pub fn to_local(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }
}

/// Rotation taking `axis` onto `+x₃`.
pub(crate) fn rotation_onto_z(axis: &Vector3<f64>) -> Rotation3<f64> {
    let z = Vector3::z();
    match Rotation3::rotation_between(axis, &z) {
        Some(r) => r,
        None => Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::x()), PI),
    }
}

/// Adjacent face pair `(i, i+1)` of a vertex seen as an edge corner.
pub fn vertex_edge_corners(v: &VertexCorner) -> Vec<EdgeCorner> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let alpha = v.dihedral_angle(i) / PI;
            EdgeCorner {
                alpha: alpha.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON),
                bc1: v.bcs[i],
                bc2: v.bcs[(i + 1) % n],
                aux_line_zero: false,
            }
        })
        .collect()
}

/// Rationality verdict for a dihedral fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum RationalityClass {
    Rational { p: u64, q: u64 },
    Irrational { denominator_bound: u64 },
}

impl RationalityClass {
    pub fn denominator(&self) -> Option<u64> {
        match *self {
            Self::Rational { p, .. } => Some(p),
            Self::Irrational { .. } => None,
        }
    }
}

/// Finds the irreducible `q/p` with `p <= bound` and `|α - q/p| <= EPS_RATIONAL`.
///
/// Walks the continued-fraction convergents of `α`. Any fraction that close
/// with `p <= 10⁵` is necessarily a convergent, since then `ε < 1/(2p²)`.
pub fn classify_angle(alpha: f64, bound: u64) -> Result<RationalityClass> {
    check_fraction(alpha)?;
    if bound < 2 {
        return Err(domain("denominator bound must be at least 2"));
    }
    let (mut p_prev, mut p_cur) = (1u64, 0u64);
    let (mut q_prev, mut q_cur) = (0u64, 1u64);
    let mut x = alpha;
    for _ in 0..64 {
        let a = x.floor();
        let ai = a as u64;
        let p_next = match ai.checked_mul(p_cur).and_then(|v| v.checked_add(p_prev)) {
            Some(v) => v,
            None => break,
        };
        let q_next = ai * q_cur + q_prev;
        if p_next > bound {
            break;
        }
        (p_prev, p_cur) = (p_cur, p_next);
        (q_prev, q_cur) = (q_cur, q_next);
        if (alpha - q_cur as f64 / p_cur as f64).abs() <= EPS_RATIONAL && q_cur > 0 {
            return Ok(RationalityClass::Rational { p: p_cur, q: q_cur });
        }
        let frac = x - a;
        if frac <= 0.0 {
            break;
        }
        x = 1.0 / frac;
        if !x.is_finite() || x > 1e18 {
            break;
        }
    }
    Ok(RationalityClass::Irrational { denominator_bound: bound })
}

/// Vertex rationality: irrational as soon as one edge corner is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum VertexClass {
    IrrationalVertex,
    /// Largest edge-corner denominator.
    RationalVertex { degree: u64 },
}

pub fn classify_vertex(v: &VertexCorner, bound: u64) -> Result<VertexClass> {
    let mut degree = 0;
    for e in vertex_edge_corners(v) {
        match classify_angle(e.alpha, bound)? {
            RationalityClass::Irrational { .. } => return Ok(VertexClass::IrrationalVertex),
            RationalityClass::Rational { p, .. } => degree = degree.max(p),
        }
    }
    Ok(VertexClass::RationalVertex { degree })
}

/// Obstacle-level degree: the smallest degree among its rational vertices.
/// `None` when every vertex is irrational.
pub fn obstacle_rational_degree(vertices: &[VertexClass]) -> Option<u64> {
    vertices
        .iter()
        .filter_map(|c| match c {
            VertexClass::RationalVertex { degree } => Some(*degree),
            VertexClass::IrrationalVertex => None,
        })
        .min()
}
