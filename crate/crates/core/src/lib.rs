//! Stochastic proximal-gradient optimization with SARAH recursive gradient
//! estimators, for composite problems `min F(w) = f(w) + psi(w)` where `f`
//! is a smooth (possibly nonconvex) finite sum or expectation and `psi` is
//! convex and possibly nonsmooth.
//!
//! The crate provides:
//! - vector/oracle primitives and the gradient mapping ([`oracle`], [`mapping`]),
//! - proximal operators for the supported regularizers ([`prox`]),
//! - SVRG/SARAH mini-batch estimators and exact enumeration oracles ([`estimators`]),
//! - constant and adaptive step-size schedules ([`stepsize`]),
//! - the ProxSARAH solver family plus ProxSVRG, ProxSpiderBoost, ProxSGD and
//!   ProxGD baselines ([`solvers`]),
//! - benchmark problems: nonnegative PCA and sparse binary classification
//!   with three nonconvex losses ([`problems`]),
//! - LIBSVM-format dataset loading and synthetic generators ([`data`]),
//! - trace metrics ([`metrics`]) and a runtime identity-verification suite
//!   ([`verify`]).

pub mod counters;
pub mod data;
pub mod error;
pub mod estimators;
pub mod mapping;
pub mod metrics;
pub mod oracle;
pub mod problems;
pub mod prox;
pub mod rng;
pub mod solvers;
pub mod stepsize;
pub mod vector;
pub mod verify;

pub use counters::Counters;
pub use error::{Error, Result};
pub use oracle::{OracleMode, ProblemOracle};
pub use prox::Regularizer;
pub use rng::RngStream;
pub use vector::WeightVector;
