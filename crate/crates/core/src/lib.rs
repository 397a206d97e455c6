//! Finite volume schemes for scalar conservation laws `u_t + ∇·f(u) = 0` on
//! 1-D and 2-D unstructured meshes, together with numerical audits of the
//! properties that drive their convergence theory: discrete maximum principle,
//! conservation, total variation, L1-contraction, discrete entropy
//! inequalities, kinetic defect measures and Young-measure oscillations.

pub mod geom;
pub mod mesh;
pub mod physics;
pub mod scheme;
pub mod entropy_audit;
pub mod kinetic;
pub mod young;
pub mod harness;
