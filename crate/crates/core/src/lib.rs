//! Optimal scaling of rating data.
//!
//! Four analyses share one weighted SVD engine and differ only in how the
//! ratings are re-coded before the decomposition:
//!
//! | variant | re-coding                         | doubling    | optimal scaling for |
//! |---------|-----------------------------------|-------------|---------------------|
//! | DS1     | within-respondent ranks           | row-wise    | objects             |
//! | DS2     | ranks among rating boundaries     | row-wise    | objects, boundaries |
//! | DS3     | counts `rating - 1`               | row-wise    | objects             |
//! | CAr     | counts `rating - 1`               | column-wise | individuals         |
//!
//! ```
//! use dsrating::{data, variants::{self, Variant, VariantConfig}};
//!
//! let ratings = data::builtin("crimes_no_homicide").unwrap();
//! let res = variants::run(&ratings, &VariantConfig::new(Variant::Ds3)).unwrap();
//! let cum = res.solution.cumulative_explained[1];
//! assert!((cum - 0.89).abs() < 0.01);
//! ```

pub mod cli;
pub mod data;
pub mod engine;
mod error;
pub mod matrix;
pub mod plot;
pub mod recode;
pub mod variants;

pub use error::{Error, Result};
pub use matrix::{Matrix, SvdResult};
