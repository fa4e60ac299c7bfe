//! Guaranteed vanishing orders at edge and vertex corners.
//!
//! Edge corners reduce, degree by degree, to 2×2 systems in `(a_n^m, a_n^{-m})`
//! whose determinants are `-2i sin(mαπ)` (two nodal planes), `-2cos(mαπ)`
//! (nodal then impedance) and `2i sin(mαπ)` (two impedance planes). The
//! `m = 0` coefficients are removed by a nodal plane, by vanishing on the edge
//! line, or at a vertex by a third plane whose rays avoid the roots of
//! `P_n^0` (nodal) or `P_n^1` (impedance).

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{
    classify_angle, spherical_frame, BoundaryCondition, EdgeCorner, RationalityClass, Ray, VertexCorner,
    DEFAULT_DENOMINATOR_BOUND,
};
use crate::specfun::assoc_legendre;

/// Threshold on max-normalised Legendre values and trigonometric factors.
pub const ROOT_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "order")]
pub enum Order {
    Finite { n: u32 },
    Infinite,
}

impl Order {
    pub fn finite(&self) -> Option<u32> {
        match *self {
            Order::Finite { n } => Some(n),
            Order::Infinite => None,
        }
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Order::Finite { n } => write!(f, "{n}"),
            Order::Infinite => write!(f, "infinite"),
        }
    }
}

/// Which argument produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    /// Two nodal planes: `sin(mαπ) ≠ 0` removes order `m`.
    NodalPair,
    /// Nodal plane against a singular or impedance plane: `cos(mαπ) ≠ 0`.
    NodalImpedancePair,
    /// Two singular/impedance planes with `u = 0` on the edge line.
    ImpedancePairEdgeLine,
    /// Two singular planes without edge-line data: only axisymmetric modes survive.
    SingularPairAxisymmetric,
    /// Vertex pair of non-nodal planes closed off by a third plane's rays.
    VertexLegendreWitness,
    /// Hypotheses missing; only the trivial bound is reported.
    Inapplicable,
}

impl Rule {
    fn describe(&self) -> &'static str {
        match self {
            Rule::NodalPair => "two nodal planes",
            Rule::NodalImpedancePair => "nodal plane against a singular or impedance plane",
            Rule::ImpedancePairEdgeLine => "two singular/impedance planes, field vanishing on the edge line",
            Rule::SingularPairAxisymmetric => "two singular planes, axisymmetric expansion",
            Rule::VertexLegendreWitness => "non-nodal pair with a third-plane Legendre witness",
            Rule::Inapplicable => "hypotheses not satisfied",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Holds,
    Fails,
    Assumed,
    NotSatisfied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub description: String,
    pub status: Status,
}

impl Condition {
    fn new(description: impl Into<String>, status: Status) -> Self {
        Self { description: description.into(), status }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingVerdict {
    pub order: Order,
    pub rule: Rule,
    pub conditions: Vec<Condition>,
    /// Only `m = 0` modes can survive.
    #[serde(default)]
    pub axisymmetric: bool,
    pub applicable: bool,
}

impl VanishingVerdict {
    /// Guaranteed finite order, `None` for infinite.
    pub fn guaranteed(&self) -> Option<u32> {
        self.order.finite()
    }

    fn inapplicable(reason: impl Into<String>) -> Self {
        Self {
            order: Order::Finite { n: 0 },
            rule: Rule::Inapplicable,
            conditions: vec![Condition::new(reason, Status::NotSatisfied)],
            axisymmetric: false,
            applicable: false,
        }
    }
}

/// The 2×2 system on `(a_n^m, a_n^{-m})` for one `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeBlock {
    pub m: u32,
    pub matrix: [[Complex64; 2]; 2],
    pub determinant: Complex64,
}

/// Where the constraint on `a_n^0` comes from, if anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxialConstraint {
    NodalPlane,
    EdgeLine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeSystem {
    pub n: u32,
    pub per_m: Vec<ModeBlock>,
    pub m0_constraint: Option<AxialConstraint>,
}

/// Row of a plane condition at its lowest power of `r`: a nodal plane at
/// azimuth `φ` gives `[e^{imφ}, e^{-imφ}]`; an impedance plane, after
/// dividing by `i m`, gives `[e^{imφ}, -e^{-imφ}]`.
fn plane_row(bc: &BoundaryCondition, m: u32, phi: f64) -> [Complex64; 2] {
    let e = Complex64::from_polar(1.0, m as f64 * phi);
    if bc.is_nodal() {
        [e, e.conj()]
    } else {
        [e, -e.conj()]
    }
}

pub fn degree_system(corner: &EdgeCorner, n: u32) -> Result<DegreeSystem> {
    corner.validate()?;
    if n == 0 {
        return Err(domain("degree 0 carries no 2×2 system; a_0^0 is fixed by auxiliary conditions"));
    }
    let per_m = (1..=n)
        .map(|m| {
            let r1 = plane_row(&corner.bc1, m, 0.0);
            let r2 = plane_row(&corner.bc2, m, corner.opening());
            let mat = Matrix2::new(r1[0], r1[1], r2[0], r2[1]);
            ModeBlock { m, matrix: [r1, r2], determinant: mat.determinant() }
        })
        .collect();
    let m0_constraint = if corner.bc1.is_nodal() || corner.bc2.is_nodal() {
        Some(AxialConstraint::NodalPlane)
    } else if corner.aux_line_zero {
        Some(AxialConstraint::EdgeLine)
    } else {
        None
    };
    Ok(DegreeSystem { n, per_m, m0_constraint })
}

/// Closed-form determinant of the order-`m` block.
pub fn closed_form_determinant(bc1: &BoundaryCondition, bc2: &BoundaryCondition, m: u32, alpha: f64) -> Complex64 {
    let x = m as f64 * (alpha * PI);
    match (bc1.is_nodal(), bc2.is_nodal()) {
        (true, true) => Complex64::new(0.0, -2.0 * x.sin()),
        (true, false) => Complex64::new(-2.0 * x.cos(), 0.0),
        (false, true) => Complex64::new(2.0 * x.cos(), 0.0),
        (false, false) => Complex64::new(0.0, 2.0 * x.sin()),
    }
}

fn bound_for(n_request: u32) -> u64 {
    DEFAULT_DENOMINATOR_BOUND.max(n_request as u64)
}

/// Guaranteed vanishing order at an edge corner. `n_request` is the depth
/// to which conditions are checked for irrational angles.
pub fn predict_edge(corner: &EdgeCorner, n_request: u32) -> Result<VanishingVerdict> {
    corner.validate()?;
    let class = classify_angle(corner.alpha, bound_for(n_request))?;
    let mut conditions = vec![Condition::new(format!("dihedral fraction α = {} is {}", corner.alpha, describe_class(&class)), Status::Holds)];
    let nodal = (corner.bc1.is_nodal(), corner.bc2.is_nodal());
    let verdict = match nodal {
        (true, true) => {
            let order = sine_scan(corner.alpha, &class, n_request, &mut conditions);
            conditions.push(Condition::new("a_n^0 = 0 from the nodal planes", Status::Holds));
            VanishingVerdict { order, rule: Rule::NodalPair, conditions, axisymmetric: false, applicable: true }
        }
        (true, false) | (false, true) => {
            let order = cosine_scan(corner.alpha, &class, n_request, &mut conditions);
            conditions.push(Condition::new("a_n^0 = 0 from the nodal plane", Status::Holds));
            VanishingVerdict { order, rule: Rule::NodalImpedancePair, conditions, axisymmetric: false, applicable: true }
        }
        (false, false) if corner.aux_line_zero => {
            conditions.push(Condition::new("u = 0 on the edge line near the corner", Status::Assumed));
            let order = sine_scan(corner.alpha, &class, n_request, &mut conditions);
            VanishingVerdict { order, rule: Rule::ImpedancePairEdgeLine, conditions, axisymmetric: false, applicable: true }
        }
        (false, false) => {
            let both_singular =
                matches!(corner.bc1, BoundaryCondition::Singular) && matches!(corner.bc2, BoundaryCondition::Singular);
            let irrational = matches!(class, RationalityClass::Irrational { .. });
            if both_singular && irrational {
                conditions.push(Condition::new("u = 0 on the edge line near the corner", Status::NotSatisfied));
                let _ = sine_scan(corner.alpha, &class, n_request, &mut conditions);
                conditions.push(Condition::new(
                    "a_n^m = 0 for m ≠ 0; a_n^0 unconstrained (axisymmetric expansion)",
                    Status::Holds,
                ));
                VanishingVerdict {
                    order: Order::Finite { n: 0 },
                    rule: Rule::SingularPairAxisymmetric,
                    conditions,
                    axisymmetric: true,
                    applicable: true,
                }
            } else {
                let mut v = VanishingVerdict::inapplicable(
                    "u = 0 on the edge line is required for two singular/impedance planes; theorem inapplicable",
                );
                conditions.append(&mut v.conditions);
                v.conditions = conditions;
                v
            }
        }
    };
    Ok(verdict)
}

fn describe_class(c: &RationalityClass) -> String {
    match c {
        RationalityClass::Rational { p, q } => format!("rational {q}/{p}"),
        RationalityClass::Irrational { denominator_bound } => {
            format!("irrational (no fraction with denominator ≤ {denominator_bound})")
        }
    }
}

/// `sin(mαπ) ≠ 0` for `m = 1, 2, …`; the first failure is the order.
fn sine_scan(alpha: f64, class: &RationalityClass, n_request: u32, out: &mut Vec<Condition>) -> Order {
    match *class {
        RationalityClass::Rational { p, .. } => {
            let p = p as u32;
            if p > 1 {
                out.push(Condition::new(format!("sin(mαπ) ≠ 0 for 1 ≤ m ≤ {}", p - 1), Status::Holds));
            }
            out.push(Condition::new(format!("sin({p}απ) = 0"), Status::Fails));
            Order::Finite { n: p }
        }
        RationalityClass::Irrational { .. } => {
            let min = (1..=n_request).map(|m| (m as f64 * alpha * PI).sin().abs()).fold(f64::INFINITY, f64::min);
            out.push(Condition::new(
                format!("sin(mαπ) ≠ 0 for 1 ≤ m ≤ {n_request} (smallest |sin| = {min:.3e}) and for every m since α is irrational"),
                Status::Holds,
            ));
            Order::Infinite
        }
    }
}

/// `cos(mαπ) ≠ 0` for `m = 1, 2, …`; fails exactly when `α = (2q+1)/(2m)`.
fn cosine_scan(alpha: f64, class: &RationalityClass, n_request: u32, out: &mut Vec<Condition>) -> Order {
    match *class {
        RationalityClass::Rational { p, .. } if p % 2 == 0 => {
            let half = (p / 2) as u32;
            if half > 1 {
                out.push(Condition::new(format!("cos(mαπ) ≠ 0 for 1 ≤ m ≤ {}", half - 1), Status::Holds));
            }
            out.push(Condition::new(format!("cos({half}απ) = 0, α = (2q+1)/{p}"), Status::Fails));
            Order::Finite { n: half }
        }
        RationalityClass::Rational { p, .. } => {
            out.push(Condition::new(
                format!("cos(mαπ) ≠ 0 for every m: the denominator {p} is odd, so α ≠ (2q+1)/(2m)"),
                Status::Holds,
            ));
            Order::Infinite
        }
        RationalityClass::Irrational { .. } => {
            let min = (1..=n_request).map(|m| (m as f64 * alpha * PI).cos().abs()).fold(f64::INFINITY, f64::min);
            out.push(Condition::new(
                format!("cos(mαπ) ≠ 0 for 1 ≤ m ≤ {n_request} (smallest |cos| = {min:.3e}) and for every m since α is irrational"),
                Status::Holds,
            ));
            Order::Infinite
        }
    }
}

/// `max_{x ∈ [-1,1]} |P_n^m(x)|`, sampled finely enough for the threshold test.
fn legendre_max(n: u32, m: u32) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let samples = 64 * (n as usize + 1);
    (0..=samples)
        .map(|i| {
            let x = -1.0 + 2.0 * i as f64 / samples as f64;
            assoc_legendre(n, m, x).map(f64::abs).unwrap_or(0.0)
        })
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE)
}

/// Witness ray of a third plane, in the working pair's frame.
#[derive(Debug, Clone, Copy)]
struct Witness {
    face: usize,
    ray: usize,
    local: Ray,
    normal: Vector3<f64>,
    bc: BoundaryCondition,
}

impl Witness {
    /// Whether the degree-`n` axial coefficient is forced to zero along this ray.
    fn clears(&self, n: u32) -> (bool, String) {
        let x = self.local.theta.cos();
        if self.bc.is_nodal() {
            let v = assoc_legendre(n, 0, x).unwrap_or(0.0);
            (v.abs() > ROOT_THRESHOLD, format!("P_{n}^0(cos θ) = {v:.6e}"))
        } else {
            if n == 0 {
                return (false, "P_0^1 ≡ 0".into());
            }
            let v = assoc_legendre(n, 1, x).unwrap_or(0.0) / legendre_max(n, 1);
            let [_, t_hat, _] = spherical_frame(self.local.theta, self.local.phi);
            let tilt = self.normal.dot(&t_hat);
            let ok = v.abs() > ROOT_THRESHOLD && tilt.abs() > ROOT_THRESHOLD;
            (ok, format!("P_{n}^1(cos θ)/max|P_{n}^1| = {v:.6e}, ν·θ̂ = {tilt:.3e}"))
        }
    }
}

/// Guaranteed vanishing order at a vertex: the best bound over adjacent face
/// pairs. Conditions from every pair are kept, prefixed by the pair.
pub fn predict_vertex(v: &VertexCorner, n_request: u32) -> Result<VanishingVerdict> {
    v.validate()?;
    let mut best: Option<VanishingVerdict> = None;
    let mut all_conditions = Vec::new();
    for i in 0..v.len() {
        let frame = v.pair_frame(i);
        let label = format!("faces ({}, {}), α = {:.12}", frame.first_face, frame.second_face, frame.alpha);
        let verdict = predict_vertex_pair(v, i, n_request)?;
        for c in &verdict.conditions {
            all_conditions.push(Condition::new(format!("[{label}] {}", c.description), c.status));
        }
        let better = match &best {
            None => true,
            Some(b) => verdict.order > b.order || (verdict.order == b.order && verdict.applicable && !b.applicable),
        };
        if better {
            best = Some(verdict);
        }
    }
    let mut out = best.expect("a validated vertex has at least three pairs");
    out.conditions = all_conditions;
    Ok(out)
}

/// Bound contributed by the pair of faces `i` and `i+1`, worked in the frame
/// where their shared edge is the `x₃`-axis.
pub fn predict_vertex_pair(v: &VertexCorner, i: usize, n_request: u32) -> Result<VanishingVerdict> {
    v.validate()?;
    let nf = v.len();
    let frame = v.pair_frame(i % nf);
    let (f1, f2) = (frame.first_face, frame.second_face);
    let (bc1, bc2) = (v.bcs[f1], v.bcs[f2]);
    if bc1.is_nodal() || bc2.is_nodal() {
        return predict_edge(&EdgeCorner { alpha: frame.alpha, bc1, bc2, aux_line_zero: false }, n_request);
    }
    let witnesses: Vec<Witness> = (0..nf)
        .filter(|&j| j != f1 && j != f2)
        .flat_map(|j| {
            let normal = frame.to_local(&v.face_normal(j));
            [j, (j + 1) % nf].into_iter().map(move |r| (j, r, normal))
        })
        .map(|(j, r, normal)| {
            let local = Ray::from_vector(&frame.to_local(&v.rays[r].unit()))
                .expect("only the shared edge lies on the pair axis");
            Witness { face: j, ray: r, local, normal, bc: v.bcs[j] }
        })
        .collect();
    witness_verdict(frame.alpha, &witnesses, v.aux_vertex_zero, n_request)
}

fn witness_verdict(alpha: f64, witnesses: &[Witness], aux_vertex_zero: bool, n_request: u32) -> Result<VanishingVerdict> {
    let class = classify_angle(alpha, bound_for(n_request))?;
    let mut conditions = vec![Condition::new(format!("dihedral fraction is {}", describe_class(&class)), Status::Holds)];
    let p = class.denominator().map(|p| p as u32);
    let has_nodal = witnesses.iter().any(|w| w.bc.is_nodal());
    let limit = p.unwrap_or(n_request);
    let mut order = None;
    for n in 0..=limit {
        if n == 0 {
            if has_nodal {
                conditions.push(Condition::new("a_0^0 = 0 from a nodal third plane", Status::Holds));
            } else if aux_vertex_zero {
                conditions.push(Condition::new("u(0) = 0", Status::Assumed));
            } else {
                conditions.push(Condition::new("u(0) = 0 is required without a nodal third plane", Status::NotSatisfied));
                order = Some(0);
                break;
            }
            continue;
        }
        if p == Some(n) {
            conditions.push(Condition::new(format!("sin({n}απ) = 0: order-{n} modes are not removed"), Status::Fails));
            order = Some(n);
            break;
        }
        let mut cleared = false;
        let mut notes = Vec::new();
        for w in witnesses {
            let (ok, note) = w.clears(n);
            notes.push(format!("face {} ray {}: {note}", w.face, w.ray));
            if ok {
                cleared = true;
                break;
            }
        }
        conditions.push(Condition::new(
            format!("degree {n}: sin(mαπ) ≠ 0 for m ≤ {n}; a_{n}^0 removed by a witness ray ({})", notes.join("; ")),
            if cleared { Status::Holds } else { Status::Fails },
        ));
        if !cleared {
            order = Some(n);
            break;
        }
    }
    let (order, applicable) = match order {
        Some(0) if !has_nodal && !aux_vertex_zero => (Order::Finite { n: 0 }, false),
        Some(n) => (Order::Finite { n }, true),
        None => (Order::Infinite, true),
    };
    let rule = if applicable { Rule::VertexLegendreWitness } else { Rule::Inapplicable };
    Ok(VanishingVerdict { order, rule, conditions, axisymmetric: false, applicable })
}

/// Human-readable derivation of a verdict.
pub fn theorem_trace(v: &VanishingVerdict) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "guaranteed vanishing order: {}", v.order);
    let _ = writeln!(s, "argument: {}", v.rule.describe());
    if !v.applicable {
        let _ = writeln!(s, "note: hypotheses incomplete, only the trivial bound holds");
    }
    if v.axisymmetric {
        let _ = writeln!(s, "note: surviving modes are axisymmetric (m = 0 only)");
    }
    for c in &v.conditions {
        let tag = match c.status {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::Assumed => "assumed",
            Status::NotSatisfied => "not satisfied",
        };
        let _ = writeln!(s, "  [{tag}] {}", c.description);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn imp() -> BoundaryCondition {
        BoundaryCondition::generalized(Complex64::new(1.0, 0.5)).unwrap()
    }

    fn edge(alpha: f64, a: BoundaryCondition, b: BoundaryCondition, aux: bool) -> EdgeCorner {
        EdgeCorner::new(alpha, a, b, aux).unwrap()
    }

    #[test]
    fn determinant_examples() {
        use BoundaryCondition::*;
        let s = degree_system(&edge(0.5, Nodal, Nodal, false), 1).unwrap();
        assert!((s.per_m[0].determinant - Complex64::new(0.0, -2.0)).norm() < 1e-15);
        let s = degree_system(&edge(0.5, Nodal, imp(), false), 1).unwrap();
        assert!(s.per_m[0].determinant.norm() < 1e-15);
        let s = degree_system(&edge(0.5, imp(), imp(), true), 2).unwrap();
        assert!(s.per_m[1].determinant.norm() < 1e-15);
        assert_eq!(s.m0_constraint, Some(AxialConstraint::EdgeLine));
        assert!(degree_system(&edge(0.5, Nodal, Nodal, false), 0).is_err());
    }

    #[test]
    fn determinants_match_closed_forms() {
        use BoundaryCondition::*;
        let kinds = [Nodal, Singular, imp()];
        for a in kinds {
            for b in kinds {
                for i in 1..1000 {
                    let alpha = i as f64 / 1000.0;
                    let s = degree_system(&edge(alpha, a, b, true), 30).unwrap();
                    for blk in &s.per_m {
                        let cf = closed_form_determinant(&a, &b, blk.m, alpha);
                        assert!((blk.determinant - cf).norm() <= 1e-14, "{a:?}/{b:?} m={} α={alpha}", blk.m);
                    }
                }
            }
        }
    }

    #[test]
    fn edge_verdicts() {
        use BoundaryCondition::*;
        assert_eq!(predict_edge(&edge(1.0 / 3.0, Nodal, Nodal, false), 10).unwrap().order, Order::Finite { n: 3 });
        assert_eq!(predict_edge(&edge(FRAC_1_SQRT_2, Nodal, Nodal, false), 10).unwrap().order, Order::Infinite);
        assert_eq!(predict_edge(&edge(FRAC_1_SQRT_2, imp(), imp(), true), 10).unwrap().order, Order::Infinite);
        assert_eq!(predict_edge(&edge(0.5, Nodal, imp(), false), 10).unwrap().order, Order::Finite { n: 1 });
        assert_eq!(predict_edge(&edge(0.25, Nodal, Singular, false), 10).unwrap().order, Order::Finite { n: 2 });
        assert_eq!(predict_edge(&edge(1.0 / 3.0, Nodal, Singular, false), 10).unwrap().order, Order::Infinite);
        let ax = predict_edge(&edge(FRAC_1_SQRT_2, Singular, Singular, false), 10).unwrap();
        assert!(ax.axisymmetric && ax.applicable);
        assert_eq!(ax.rule, Rule::SingularPairAxisymmetric);
        let na = predict_edge(&edge(FRAC_1_SQRT_2, imp(), imp(), false), 10).unwrap();
        assert!(!na.applicable);
        assert_eq!(na.rule, Rule::Inapplicable);
        assert!(na.conditions.iter().any(|c| c.status == Status::NotSatisfied));
    }

    #[test]
    fn rational_verdict_does_not_depend_on_request_depth() {
        use BoundaryCondition::*;
        for n_req in [1, 3, 10, 40] {
            assert_eq!(predict_edge(&edge(0.4, Nodal, Nodal, false), n_req).unwrap().order, Order::Finite { n: 5 });
        }
    }

    #[test]
    fn zero_eta_does_not_change_edge_orders() {
        use BoundaryCondition::*;
        for alpha in [0.5, 1.0 / 3.0, 0.4, FRAC_1_SQRT_2] {
            for aux in [false, true] {
                for (a, b) in [(Nodal, imp()), (imp(), imp()), (imp(), Nodal)] {
                    let v1 = predict_edge(&edge(alpha, a, b, aux), 10).unwrap();
                    let v0 = predict_edge(&edge(alpha, a.with_zero_eta(), b.with_zero_eta(), aux), 10).unwrap();
                    assert_eq!(v1.order, v0.order, "α={alpha} {a:?}/{b:?} aux={aux}");
                }
            }
        }
    }

    #[test]
    fn vertex_with_nodal_witness_irrational_is_infinite() {
        use BoundaryCondition::*;
        let v = VertexCorner::three_plane(FRAC_1_SQRT_2, 0.2 * PI, 0.35 * PI, [Singular, imp(), Nodal], false).unwrap();
        let verdict = predict_vertex(&v, 10).unwrap();
        assert_eq!(verdict.order, Order::Infinite);
    }

    #[test]
    fn vertex_equator_witness_caps_at_two() {
        let v = VertexCorner::three_plane(1.0 / 3.0, PI / 2.0, PI / 2.0, [imp(), imp(), imp()], true).unwrap();
        let verdict = predict_vertex(&v, 10).unwrap();
        assert_eq!(verdict.order, Order::Finite { n: 2 });
        assert!(verdict.conditions.iter().any(|c| c.status == Status::Fails && c.description.contains("degree 2")));
    }

    #[test]
    fn vertex_generic_witness_reaches_pair_order() {
        let v = VertexCorner::three_plane(1.0 / 3.0, 0.2 * PI, 0.3 * PI, [imp(), imp(), imp()], true).unwrap();
        let pair = (0..3).find(|&i| (v.pair_frame(i).alpha - 1.0 / 3.0).abs() < 1e-12).unwrap();
        assert_eq!(predict_vertex_pair(&v, pair, 10).unwrap().order, Order::Finite { n: 3 });
        // The other two dihedral angles are irrational, so the vertex as a whole does better.
        assert_eq!(predict_vertex(&v, 10).unwrap().order, Order::Infinite);
        let no_aux = VertexCorner::three_plane(1.0 / 3.0, 0.2 * PI, 0.3 * PI, [imp(), imp(), imp()], false).unwrap();
        let verdict = predict_vertex(&no_aux, 10).unwrap();
        assert_eq!(verdict.order, Order::Finite { n: 0 });
        assert!(!verdict.applicable);
    }

    #[test]
    fn all_nodal_vertex_uses_best_pair() {
        use BoundaryCondition::*;
        let dirs = [Vector3::x(), Vector3::y(), Vector3::z()];
        let v = VertexCorner::from_directions(&dirs, &[Nodal; 3], false).unwrap();
        assert_eq!(predict_vertex(&v, 10).unwrap().order, Order::Finite { n: 2 });
    }

    #[test]
    fn trace_renders_conditions() {
        use BoundaryCondition::*;
        let v = predict_edge(&edge(1.0 / 3.0, Nodal, Nodal, false), 10).unwrap();
        let t = theorem_trace(&v);
        assert!(t.contains("guaranteed vanishing order: 3"));
        assert!(t.contains("[fails] sin(3απ) = 0"));
        let t = theorem_trace(&predict_edge(&edge(FRAC_1_SQRT_2, imp(), imp(), false), 10).unwrap());
        assert!(t.contains("not satisfied"));
        let t = theorem_trace(&predict_edge(&edge(FRAC_1_SQRT_2, Singular, Singular, false), 10).unwrap());
        assert!(t.contains("axisymmetric"));
    }
}
