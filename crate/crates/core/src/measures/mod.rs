//! Measures on the punctured, compactified space and the transforms among
//! their tempering, Rosiński and extended representations.

mod integrals;
mod transforms;
mod types;

pub use integrals::{levy_integral, levy_tail_mass};
pub(crate) use integrals::radial_tail;
pub use transforms::{
    extended_to_rosinski, rosinski_to_extended, tempering_to_rosinski, validate_rosinski, wedge, Regime,
    ValidationReport,
};
pub use types::{
    check_psd, matrix_from_rows, matrix_to_rows, Atom, AtomicMeasure, DirPoint, EtsSpec, QAtom, TemperingEntry,
    TemperingSpec, MERGE_TOL, PSD_TOL, UNIT_TOL,
};
pub(crate) use types::{dot, norm};
