//! Exact-arithmetic engine for variation of GIT under torus actions over an
//! affine base.
//!
//! The crate is organised bottom-up:
//!
//! * [`rat`] and [`polyhedra`]: exact rationals, LP feasibility, cone
//!   conversion (double description) and integer lattice kernels.
//! * [`scene`] and [`git`]: the scene model and the Hilbert–Mumford
//!   machinery (μ, the limit cone `C_x`, the M-function and statuses).
//! * [`strata`]: closed-orbit strata, subtori, fingerprints and the
//!   finiteness audit.
//! * [`vgit`]: walls and chambers along a segment of linearizations.
//! * [`hilb`]: weight model of points of relative Hilbert schemes on
//!   expanded degenerations.
//! * [`io`]: scene files and deterministic reports.
//!
//! Per-point loops run on rayon when the `parallel` feature is enabled (the
//! default); [`exec::Execution::Sequential`] forces the plain loop.

pub mod exec;
pub mod git;
pub mod hilb;
pub mod io;
pub mod polyhedra;
pub mod rat;
pub mod scene;
pub mod strata;
pub mod vgit;

pub use exec::{EvalOptions, Execution, HmPolicy};
pub use git::{MValue, MuValue, Status};
pub use polyhedra::{Constraint, Feasibility, PolyError, RationalCone, Relation};
pub use rat::{Rat, RatVec};
pub use scene::{Character, LinCombo, Linearization, Scene, SceneError, WeightedPoint};
