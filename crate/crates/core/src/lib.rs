#![no_std]
#![doc = include_str!("../README.md")]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod algebra;
pub mod check;
pub mod config;
pub mod diagram;
pub mod error;
pub mod exact;
pub mod fock;
pub mod jones_wenzl;
pub mod linalg;
pub mod presentation;
pub mod qpoly;
pub mod representation;
pub mod scalar;

pub use algebra::{AlgebraElement, Generator};
pub use config::Limits;
pub use diagram::{enumerate_basis, motzkin_number, MotzkinDiagram, Point};
pub use error::{Error, Result};
pub use scalar::{Lambda, Scalar};
