//! Exact computations with pencils of quadrics and the hyperelliptic curves
//! attached to them.

pub mod arith;
pub mod arulwang;
pub mod error;
pub mod factor;
pub mod field;
pub mod galoistwist;
pub mod hyperell;
pub mod io;
pub mod isotropic;
pub mod linalg;
pub mod localglobal;
pub mod pencil;
pub mod poly;
pub mod quadform;
pub mod rootsets;

pub use error::{Error, Result};
