//! Numerical real and complex Finsler geometry.
//!
//! Metrics are evaluated on truncated Taylor jets ([`jet`]), from which the
//! Chern-Finsler connection ([`connection_complex`]), the Cartan connection and
//! flag curvature of the underlying real metric ([`connection_real`]),
//! geodesics, Jacobi fields and distance Hessians ([`geodesic`]), Levi forms of
//! the squared distance ([`distance`]) and Schwarz-lemma certificates
//! ([`schwarz`]) are assembled.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod connection_complex;
pub mod connection_real;
pub mod distance;
pub mod error;
pub mod exec;
pub mod geodesic;
pub mod geometry;
pub mod jet;
pub mod kahler;
pub mod linalg;
pub mod metrics;
pub mod ode;
pub mod report;
pub mod schwarz;
#[cfg(test)]
mod testutil;

pub use error::{FinslerError, Result};
