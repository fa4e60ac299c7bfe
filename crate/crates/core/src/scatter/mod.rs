//! Forward scattering off convex polyhedra and the two-wave corner test.
//!
//! The scattered field solves the Helmholtz equation outside the obstacle
//! with a boundary condition per face and the Sommerfeld radiation
//! condition. It is represented as a sum of point sources placed on a shrunken
//! copy of the surface.

mod corner;
mod mesh;
mod mfs;
mod series;

pub use corner::{
    ball_average, cc1_condition, cc1_plane_waves, corner_combination, uniqueness_demo, Cc1, Combination,
    CornerOutcome, DemoConfig, DemoReport, Field, WitnessReport, CORNER_ZERO,
};
pub use mesh::{FaceConditions, Obstacle, Polyhedron, SurfacePoint};
pub use mfs::{fundamental_solution, solve_forward, CVector3, FarField, IncidentWave, MfsConfig, MfsSolution, SphereGrid};
pub use series::{series_terms, sound_soft_ball_far_field, sph_bessel_y, sph_hankel1};
