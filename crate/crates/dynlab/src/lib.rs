//! dynlab: a finite-horizon, finite-resolution laboratory for non-chaotic
//! dynamical systems.
//!
//! The crate turns qualitative dynamical properties into checkable
//! procedures over sampled systems: orbit-sup pseudometrics, equicontinuity
//! sets at a scale, a fragmentation kernel with an exhaustively tested
//! subset semantics, subshift classification, chain-recurrence machinery and
//! finite approximations of the iterate closure in X^X. Every verdict is
//! indexed by its scale tuple (epsilon grid, ball radius, horizon); nothing
//! is asserted beyond what the finite check established.

pub mod envelope;
pub mod error;
pub mod fragment;
pub mod pseudometric;
pub mod recurrence;
pub mod sampling;
pub mod sensitivity;
pub mod space;
pub mod symbolic;
pub mod system;

pub use error::{DynError, Result};
pub use sampling::{orbit_closure_sample, sample_space, Provenance, SampleCloud};
pub use space::{AmbientSpace, Point, SpaceKind};
pub use system::{
    cat_map, circle_homeo, disk_twist, interval_homeo, make_gallery_system, orbit_segment,
    rotation, shift_system, takens_suspension, Horizon, IntervalMap, SuspensionSpec, SystemSpec,
    TimeProfile,
};
