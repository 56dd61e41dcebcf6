//! Defect decomposition of degree-p extensions of valued fields through
//! plateaus of key polynomials.

pub mod cache;
pub mod classify;
pub mod cli;
pub mod coeffs;
pub mod config;
pub mod error;
pub mod exact;
pub mod figure;
pub mod fixtures;
pub mod plateau;
pub mod poly;
pub mod run;
pub mod series;
pub mod valuation;

pub use coeffs::{Coeff, CycElem, FpElem, PrimeChar};
pub use error::{Error, Result};
pub use exact::{Cut, CutSide, Rat, Val};
pub use poly::Poly;
pub use series::{FiniteSum, Series};
