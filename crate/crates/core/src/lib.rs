//! Residue fields of Euclidean imaginary quadratic rings, the simplicial
//! complexes built from partial bases over them, and exact homology.

pub mod builders;
pub mod complex;
pub mod conditions;
pub mod error;
pub mod field;
pub mod homology;
pub mod linalg;
pub mod ranks;
pub mod ring;
pub mod tits;

pub use error::{Error, Result};
pub use field::{Fe, PrimeContext};
pub use ring::{RingElement, RingId};
pub use builders::{build, BuildOptions, UVectorClass};
pub use complex::{ComplexKind, Header, SimplexLabel, SimplicialComplex};
pub use conditions::{classify_pair, Classification, ConditionReport, Verdict};
pub use homology::{GroupPresentation, GroupVerdict, Provenance, RankReport};
pub use ranks::{DualityParams, RankTable, RankVariant};
