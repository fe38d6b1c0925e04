//! Exact higher-order Changhee numbers and polynomials of both kinds, higher-order
//! Euler numbers and polynomials, and Stirling numbers, together with a
//! truncated power series engine and a harness that certifies the identities
//! linking them on finite grids.

pub mod cli;
pub mod combinatorics;
pub mod gfparse;
pub mod identities;
pub mod powerseries;
pub mod ring;
pub mod sequences;

pub use combinatorics::{StirlingKind, StirlingTables, StirlingTriangle};
pub use identities::{Grid, Harness, IdentityId, IdentityReport, Verdict};
pub use powerseries::{Coeff, SeriesError, TruncatedSeries};
pub use ring::{Polynomial, Rational};
pub use sequences::{Family, SequenceTable, Value};
