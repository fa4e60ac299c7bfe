//! Scenario files: one TOML document per corner or scattering setup.
//!
//! Angles are fractions of π. A fraction is written as `{ rational = [q, p] }`,
//! `{ real = x }` or `{ sqrt_frac = [a, b] }` (meaning `√(a/b)`), so that an
//! intended rational angle never passes through decimal rounding.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use cornerwave::geometry::{BoundaryCondition, EdgeCorner, Ray, VertexCorner};
use cornerwave::oracle::{OracleSettings, Tolerances};
use cornerwave::scatter::{DemoConfig, Obstacle, Polyhedron};
use nalgebra::Vector3;
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum Fraction {
    #[serde(rename = "rational")]
    Rational([u64; 2]),
    #[serde(rename = "real")]
    Real(f64),
    #[serde(rename = "sqrt_frac")]
    SqrtFrac([f64; 2]),
}

impl Fraction {
    pub fn value(&self) -> Result<f64, String> {
        match *self {
            Fraction::Rational([q, p]) => {
                if p == 0 {
                    return Err("rational fraction has zero denominator".into());
                }
                Ok(q as f64 / p as f64)
            }
            Fraction::Real(x) if x.is_finite() => Ok(x),
            Fraction::Real(x) => Err(format!("fraction {x} is not finite")),
            Fraction::SqrtFrac([a, b]) => {
                if !(a >= 0.0 && b > 0.0) {
                    return Err(format!("sqrt_frac [{a}, {b}] needs a ≥ 0 and b > 0"));
                }
                Ok((a / b).sqrt())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Eta {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Bc {
    Nodal,
    Singular,
    Impedance { eta: Eta },
}

impl Bc {
    pub fn build(&self) -> Result<BoundaryCondition, String> {
        match *self {
            Bc::Nodal => Ok(BoundaryCondition::Nodal),
            Bc::Singular => Ok(BoundaryCondition::Singular),
            Bc::Impedance { eta } => {
                let eta = match eta {
                    Eta::Real(re) => Complex64::new(re, 0.0),
                    Eta::Complex([re, im]) => Complex64::new(re, im),
                };
                BoundaryCondition::generalized(eta).map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Edge,
    Vertex,
    Scatter,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: Kind,
    /// Helmholtz eigenvalue `λ = k²` used by the oracle.
    #[serde(default = "one")]
    pub lambda: f64,
    /// Highest degree the predictor examines.
    #[serde(default = "ten")]
    pub n_request: u32,
    /// Output directory, overridden by `--out`.
    pub out: Option<PathBuf>,
    pub edge: Option<EdgeSpec>,
    pub vertex: Option<VertexSpec>,
    #[serde(default)]
    pub oracle: OracleSpec,
    pub scatter: Option<ScatterSpec>,
}

fn one() -> f64 {
    1.0
}

fn ten() -> u32 {
    10
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub alpha: Fraction,
    pub bc1: Bc,
    pub bc2: Bc,
    /// The field is known to vanish on the edge line.
    #[serde(default)]
    pub aux_line_zero: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreePlane {
    pub alpha: Fraction,
    pub theta1: Fraction,
    pub theta2: Fraction,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySpec {
    pub theta: Fraction,
    pub phi: Fraction,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub bcs: Vec<Bc>,
    /// The field is known to vanish at the vertex.
    #[serde(default)]
    pub aux_vertex_zero: bool,
    pub three_plane: Option<ThreePlane>,
    pub rays: Option<Vec<RaySpec>>,
    /// Outward face normals, listed cyclically.
    pub normals: Option<Vec<[f64; 3]>>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSpec {
    pub n_max: u32,
    pub n_radii: usize,
    pub n_angles: usize,
    pub vertex_pair: usize,
    pub sigma_cut: f64,
    pub gap: f64,
    pub tau_mass: f64,
}

impl Default for OracleSpec {
    fn default() -> Self {
        let s = OracleSettings::default();
        Self {
            n_max: s.n_max,
            n_radii: s.n_radii,
            n_angles: s.n_angles,
            vertex_pair: s.vertex_pair,
            sigma_cut: s.tolerances.sigma_cut,
            gap: s.tolerances.gap,
            tau_mass: s.tolerances.tau_mass,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Shape {
    Tetrahedron { center: [f64; 3], circumradius: f64 },
    Cube { center: [f64; 3], side: f64 },
    Icosphere { center: [f64; 3], radius: f64, subdivisions: u32 },
    /// OFF mesh; face conditions come from `bc`/`faces` or a JSON sidecar.
    Off { path: PathBuf, sidecar: Option<PathBuf> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleSpec {
    pub shape: Shape,
    /// Condition on every face without an override.
    pub bc: Option<Bc>,
    /// Per-face overrides keyed by face index.
    #[serde(default)]
    pub faces: BTreeMap<String, Bc>,
    #[serde(default)]
    pub translate: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterSpec {
    pub k: f64,
    pub d1: [f64; 3],
    pub d2: [f64; 3],
    pub a: ObstacleSpec,
    /// Second obstacle; without it only `a` is solved.
    pub b: Option<ObstacleSpec>,
    #[serde(default)]
    pub demo: DemoConfig,
}

/// A validated scenario ready to run.
pub enum Problem {
    Edge(EdgeCorner),
    Vertex(VertexCorner),
    Scatter(Box<ScatterProblem>),
}

/// Centre and radius.
pub type Ball = (Vector3<f64>, f64);

pub struct ScatterProblem {
    pub k: f64,
    pub d1: Vector3<f64>,
    pub d2: Vector3<f64>,
    pub a: Obstacle,
    pub b: Option<Obstacle>,
    /// Centre and radius of `a` when it is a sound-soft icosphere, for the
    /// series comparison.
    pub ball: Option<Ball>,
    pub demo: DemoConfig,
}

pub struct Loaded {
    pub scenario: Scenario,
    pub problem: Problem,
    pub oracle: OracleSettings,
}

pub fn load(path: &Path) -> Result<Loaded, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let scenario: Scenario = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let problem = build(&scenario, base)?;
    let o = &scenario.oracle;
    if !(scenario.lambda > 0.0) {
        return Err("lambda must be positive".into());
    }
    let oracle = OracleSettings {
        lambda: scenario.lambda,
        n_max: o.n_max,
        n_radii: o.n_radii,
        n_angles: o.n_angles,
        vertex_pair: o.vertex_pair,
        tolerances: Tolerances { sigma_cut: o.sigma_cut, gap: o.gap, tau_mass: o.tau_mass },
    };
    Ok(Loaded { scenario, problem, oracle })
}

fn build(s: &Scenario, base: &Path) -> Result<Problem, String> {
    let err = |e: cornerwave::Error| e.to_string();
    match s.kind {
        Kind::Edge => {
            let e = s.edge.as_ref().ok_or("kind = \"edge\" needs an [edge] table")?;
            let c = EdgeCorner::new(e.alpha.value()?, e.bc1.build()?, e.bc2.build()?, e.aux_line_zero).map_err(err)?;
            Ok(Problem::Edge(c))
        }
        Kind::Vertex => {
            let v = s.vertex.as_ref().ok_or("kind = \"vertex\" needs a [vertex] table")?;
            let bcs: Vec<BoundaryCondition> = v.bcs.iter().map(Bc::build).collect::<Result<_, _>>()?;
            let given = [v.three_plane.is_some(), v.rays.is_some(), v.normals.is_some()];
            if given.iter().filter(|&&g| g).count() != 1 {
                return Err("[vertex] needs exactly one of three_plane, rays, normals".into());
            }
            let corner = if let Some(t) = &v.three_plane {
                let bcs: [BoundaryCondition; 3] =
                    bcs.try_into().map_err(|_| "three_plane needs exactly three conditions".to_string())?;
                VertexCorner::three_plane(t.alpha.value()?, t.theta1.value()? * PI, t.theta2.value()? * PI, bcs, v.aux_vertex_zero)
            } else if let Some(rays) = &v.rays {
                let rays = rays
                    .iter()
                    .map(|r| Ray::new(r.theta.value()? * PI, r.phi.value()? * PI).map_err(err))
                    .collect::<Result<Vec<_>, _>>()?;
                VertexCorner::new(rays, bcs, v.aux_vertex_zero)
            } else {
                let normals: Vec<Vector3<f64>> = v.normals.as_ref().unwrap().iter().map(|&n| Vector3::from(n)).collect();
                VertexCorner::from_normals(&normals, &bcs, v.aux_vertex_zero)
            };
            let corner = corner.map_err(err)?;
            if s.oracle.vertex_pair >= corner.len() {
                return Err(format!("vertex_pair {} out of range for {} faces", s.oracle.vertex_pair, corner.len()));
            }
            Ok(Problem::Vertex(corner))
        }
        Kind::Scatter => {
            let sc = s.scatter.as_ref().ok_or("kind = \"scatter\" needs a [scatter] table")?;
            if !(sc.k > 0.0 && sc.k.is_finite()) {
                return Err("scatter.k must be positive".into());
            }
            let dir = |d: [f64; 3], name: &str| {
                let v = Vector3::from(d);
                if v.norm() > 0.0 && v.iter().all(|c| c.is_finite()) {
                    Ok(v.normalize())
                } else {
                    Err(format!("{name} must be a nonzero direction"))
                }
            };
            let (a, ball) = obstacle(&sc.a, base)?;
            let b = sc.b.as_ref().map(|b| obstacle(b, base).map(|o| o.0)).transpose()?;
            let c = &sc.demo;
            if c.mfs.sources < 8 || c.grid_theta < 2 || c.grid_phi < 3 || c.fit_n_max == 0 || c.ball_samples == 0 {
                return Err("[scatter.demo] sizes are too small".into());
            }
            Ok(Problem::Scatter(Box::new(ScatterProblem {
                k: sc.k,
                d1: dir(sc.d1, "d1")?,
                d2: dir(sc.d2, "d2")?,
                a,
                b,
                ball,
                demo: sc.demo,
            })))
        }
    }
}

fn obstacle(spec: &ObstacleSpec, base: &Path) -> Result<(Obstacle, Option<Ball>), String> {
    let err = |e: cornerwave::Error| e.to_string();
    let mut ball = None;
    let mesh = match &spec.shape {
        Shape::Tetrahedron { center, circumradius } => Polyhedron::tetrahedron(Vector3::from(*center), *circumradius),
        Shape::Cube { center, side } => Polyhedron::cube(Vector3::from(*center), *side),
        Shape::Icosphere { center, radius, subdivisions } => {
            ball = Some((Vector3::from(*center), *radius));
            Polyhedron::icosphere(Vector3::from(*center), *radius, *subdivisions)
        }
        Shape::Off { path, sidecar } => {
            let text = std::fs::read_to_string(base.join(path)).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let mesh = Polyhedron::from_off(&text).map_err(err)?;
            if let Some(sidecar) = sidecar {
                if spec.bc.is_some() || !spec.faces.is_empty() {
                    return Err("give face conditions either inline or in a sidecar, not both".into());
                }
                let t = Vector3::from(spec.translate);
                let obs = Obstacle::load(&base.join(path), &base.join(sidecar)).map_err(err)?;
                return Ok((obs.translated(&t), None));
            }
            Ok(mesh)
        }
    }
    .map_err(err)?;
    let n = mesh.faces().len();
    let mut bcs = vec![None; n];
    if let Some(bc) = &spec.bc {
        bcs.fill(Some(bc.build()?));
    }
    for (key, bc) in &spec.faces {
        let i: usize = key.parse().map_err(|_| format!("face key {key:?} is not an index"))?;
        if i >= n {
            return Err(format!("condition given for face {i}, but there are {n} faces"));
        }
        bcs[i] = Some(bc.build()?);
    }
    let bcs: Vec<BoundaryCondition> = bcs
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| format!("no condition for face {i} and no default bc")))
        .collect::<Result<_, _>>()?;
    if !bcs.iter().all(BoundaryCondition::is_nodal) {
        ball = None;
    }
    let t = Vector3::from(spec.translate);
    let obs = Obstacle::new(mesh, bcs).map_err(err)?.translated(&t);
    Ok((obs, ball.map(|(c, r)| (c + t, r))))
}
