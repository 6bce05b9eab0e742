//! Extended p-tempered α-stable distributions: measure transforms,
//! characteristic exponents, limit diagnostics, approximation by elementary
//! tempered-stable vectors, and sampling.

pub mod approx;
pub mod charfn;
pub mod error;
pub mod limits;
pub mod measures;
pub mod simulate;
pub mod special;

pub use approx::ElementaryComponent;
pub use charfn::CfGrid;
pub use error::{EtsError, Result};
pub use measures::{AtomicMeasure, DirPoint, EtsSpec, TemperingSpec};
pub use special::{ExtReal, QuadratureConfig};
