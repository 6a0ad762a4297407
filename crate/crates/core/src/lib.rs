//! Euler–Arnold equations on the generalized Bott–Virasoro group.
//!
//! The crate is organized bottom-up:
//!
//! * [`spectral`]: periodic fields on the circle, spectral derivatives,
//!   Fourier multipliers and dealiased products.
//! * [`algebra`]: the centrally extended vector-field algebra, its regular
//!   dual, the coadjoint action with cocycle parameters `(α, β)` and the
//!   three inertia operators.
//! * [`euler`]: the generic right-hand side `ad*_{A⁻¹m} m` and the catalogue
//!   of named equations (Burgers, KdV, Camassa–Holm, Hunter–Saxton and
//!   their generalizations) with constant-shift reductions.
//! * [`hamiltonian`]: the frozen Poisson structure at `(-½ dx⊗dx, 0)`,
//!   functional gradients and conserved quantities.
//! * [`integrate`]: RK4 and integrating-factor RK4 time stepping plus the
//!   simulation driver.
//! * [`group`]: lifted circle diffeomorphisms, the Bott cocycle, the
//!   connection cochain `τ^α`, the Euler cocycle `χ^α`, flows and the
//!   geodesic residual.
//! * [`verify`]: randomized invariant suites used by the command line tool.

pub mod algebra;
pub mod error;
pub mod euler;
pub mod group;
pub mod hamiltonian;
pub mod integrate;
pub mod sampling;
pub mod spectral;
pub mod verify;

pub use algebra::{AlgebraElement, CocycleParams, InertiaKind, Momentum};
pub use error::{Error, Result};
pub use euler::{EquationSpec, NamedEquation};
pub use group::{FlowResult, LiftedDiffeo};
pub use integrate::{SimConfig, Trajectory};
pub use spectral::{Field, GridSpec, MultiplierSymbol, NullspacePolicy};
