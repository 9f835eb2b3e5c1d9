//! Capacity bounds for convex bodies in the standard symplectic vector space.
//!
//! The crate computes, for a centrally symmetric convex body K ⊂ R^{2n}, the
//! operator norm ‖J‖ of the complex structure seen as a map from the polar
//! body K° to K, and uses it to sandwich symplectic capacities:
//!
//! ```text
//!   1/‖J‖  ≤  c_EHZ(K)  ≤  c̄(K)  ≤  4/‖J‖,
//! ```
//!
//! where c_EHZ is the Ekeland–Hofer–Zehnder capacity and c̄ is the linearized
//! cylindrical capacity (the smallest shadow of any affine symplectic image).
//! All three middle quantities are estimated constructively: c_EHZ by shooting
//! for closed characteristics of the gauge flow ẋ = J∇g_K(x), c̄ by direct
//! shadow minimization over a Cayley chart of Sp(2n), and the outer bounds
//! from ‖J‖ itself.
//!
//! Modules:
//! - [`symplectic`]: J, ω, Sp(2n) membership, Cayley charts, basis completion.
//! - [`bodies`]: convex bodies (H/V-polytopes, ellipsoids, products, linear
//!   images) with gauge, support, polar, sections, shadows.
//! - [`jnorm`]: ‖J‖_{K°→K} with certified witnesses and capacity bounds.
//! - [`ehz`]: action functional, Hamiltonian shooting, closed-form capacities.
//! - [`lincap`]: linearized capacities, cylinder witnesses, rotated cubes.
//! - [`lp`], [`hull`], [`optim`]: the deterministic numerical substrate.
//!
//! Everything is seeded and deterministic: identical seeds give identical
//! results, bit for bit, whether or not the `parallel` feature is active.

pub mod bodies;
pub mod ehz;
pub mod error;
pub mod hull;
pub mod jnorm;
pub mod lincap;
pub mod lowdisc;
pub mod lp;
pub mod optim;
pub mod par;
pub mod symplectic;

pub use error::{Error, Result};
