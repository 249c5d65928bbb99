#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Riemann's minimal examples built two ways: from the classical radius ODE
//! and from Weierstrass data on the elliptic curve `w² = z(z-1)(z+σ)`.

pub mod classical;
pub mod curve;
pub mod fd;
pub mod mesh;
pub mod quad;
pub mod registration;
pub mod shiffkdv;
