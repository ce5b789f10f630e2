//! Exact computation of quantum D-modules of toric superspaces: the Floer
//! model, Birkhoff factorization, gauge fixing, mirror maps and quantum
//! products, all over truncated power series with rational coefficients.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arith;
pub mod dmodule;
pub mod error;
pub mod floer;
pub mod grading;
pub mod mirror;
pub mod pipeline;
pub mod poly;
pub mod render;
pub mod ring;
pub mod series;
pub mod toric;

pub use error::{Error, ErrorKind, Result};
