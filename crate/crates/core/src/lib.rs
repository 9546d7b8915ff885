//! Exact q-series arithmetic over `Q` and cyclotomic fields, the modular
//! units `[r]_l`, and the search for finite sets of products of units whose
//! span is invariant under the modular group.

pub mod algebra;
pub mod coolcheck;
pub mod error;
pub mod identities;
pub mod qseries;
pub mod search;
pub mod units;

pub use algebra::{CyclotomicField, CyclotomicNumber, Field, Rational};
pub use coolcheck::{CoolSetReport, EnumerateOptions, Status, TableRow};
pub use error::{Error, Result};
pub use identities::{IdentityCheck, NahmData};
pub use qseries::PuiseuxSeries;
pub use search::{CandidateSet, ProjPoint};
pub use units::{Cusp, ExpansionCache, SiegelIndex, UnitFactorization, UnitProduct};
