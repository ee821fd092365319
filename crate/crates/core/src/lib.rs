//! Quasi-static electromagnetic co-simulation of spin-qubit ESR control
//! lines: scene description, magneto- and electro-quasistatic field solvers,
//! transmission-line network analysis and figures of merit.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod electroqs;
pub mod field;
pub mod fom;
pub mod geom;
pub mod magnetoqs;
pub mod netline;
pub mod presets;
pub mod quad;
pub mod scene;
