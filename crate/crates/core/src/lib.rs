//! Coorbit embeddings for finite orthogonal group actions.
//!
//! A finite group `G` acting orthogonally on `ℝ^d`, a family of windows
//! `w_1, …, w_p` and a selection of ranks define the map
//! `Φ(x)_{i,j} = j-th largest of {⟨U_g w_i, x⟩ : g ∈ G}`. It is constant on
//! orbits, positively homogeneous and Lipschitz in the quotient metric.
//!
//! ```
//! use std::sync::Arc;
//! use coorbit::{CoorbitConfig, FiniteGroupAction, GroupSpec};
//!
//! let g = Arc::new(FiniteGroupAction::build(&GroupSpec::Cyclic { n: 3 }).unwrap());
//! let cfg = CoorbitConfig::max_filter(g, vec![vec![1.0, 0.0, 0.0]]).unwrap();
//! assert_eq!(cfg.embed(&[0.5, 2.0, -1.0]).unwrap(), vec![2.0]);
//! ```

mod coorbit;
mod error;
mod group;
pub mod linalg;
pub mod lipschitz;
pub mod projection;
mod quotient;
pub mod sampling;
pub mod selfcheck;
mod tolerance;

pub use coorbit::{sort_desc, CoorbitConfig, CoorbitValue, Selector, WindowCoorbit};
pub use error::{Error, Result};
pub use group::{FiniteGroupAction, GroupOptions, GroupSpec, OrbitSet, DEFAULT_MAX_ORDER};
pub use lipschitz::{
    estimate_lower_bound, upper_bound_exact, upper_bound_exact_with_cap, upper_bound_relaxed,
    LipschitzReport, SamplingPlan,
};
pub use projection::{
    check_injectivity, project_embed, random_projection, ProjectionMap, SeparationReport,
};
pub use quotient::{distance, is_equivalent, quotient_distance, AlignmentResult};
pub use selfcheck::{run_invariant_suite, InvariantCheck};
pub use tolerance::Tolerances;
