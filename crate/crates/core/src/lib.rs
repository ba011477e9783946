//! Alpha-stationary surfaces in Euclidean 3-space.
//!
//! A surface is alpha-stationary when `H = alpha <nu, p> / |p|^2` at every
//! point. These are the critical points of the weighted area
//! `E_alpha = \int |p|^alpha dA`. Inversion in the unit sphere maps
//! alpha-stationary surfaces to `-(alpha + 4)`-stationary ones.
//!
//! The crate provides
//!
//! - parametric surfaces with exact or finite-difference jets and the
//!   residual `H - alpha h / |p|^2` ([`geometry`]);
//! - the weighted area and its first variation ([`energy`]);
//! - inversion of points, jets and surfaces ([`inversion`]);
//! - a small catalog of closed-form surfaces ([`catalog`]) and Weierstrass
//!   surfaces ([`weierstrass`]);
//! - Björling solvers for minimal and -4-stationary surfaces ([`bjorling`]);
//! - meshes, OBJ, residual reports and cross-sections ([`mesh`]);
//! - JSON surface descriptions ([`config`]).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bjorling;
pub mod catalog;
pub mod config;
pub mod energy;
pub mod error;
pub mod fourier;
pub mod geometry;
pub mod inversion;
pub mod mesh;
pub mod weierstrass;

pub type Vec3 = nalgebra::Vector3<f64>;

pub use error::{GeomError, Result};
pub use geometry::{
    evaluate_jet, pointwise_geometry, residual_at, stationarity_residual, Domain, Interval, ParametricSurface,
    PointGeometry, SurfaceJet,
};
pub use inversion::{dual_alpha, invert_point, invert_surface};
