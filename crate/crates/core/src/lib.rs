//! Ideals of imaginary quadratic orders embedded in the Hurwitz quaternions.
//!
//! An order `O(μ)` is generated by a pure quaternion `μ` with `μ² = −m`; each of
//! its ideals is carried by a single quaternion, its right pseudo generator `ρ`.
//! Binary quadratic forms ([`forms`]) serve as an independent cross-check.

pub mod arith;
pub mod error;
pub mod experiments;
pub mod factor;
pub mod forms;
pub mod hurwitz;
pub mod ideals;
pub mod orders;
pub mod serde_int;
pub mod solutions;

pub use error::{Error, Result};
pub use hurwitz::{units, HurwitzQuaternion, RationalQuaternion};
pub use ideals::{Ideal, ZBasis};
pub use orders::{QuadraticOrder, Sign};
pub use solutions::SolutionModule;
