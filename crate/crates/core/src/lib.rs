//! Even unimodular lattices, Siegel theta coefficients and standard-parameter
//! bookkeeping.
//!
//! The lattice side builds the built-in catalog (E8, D16+, the Niemeier
//! lattices, Leech), enumerates short vectors and counts representations
//! `r_L(S)` exactly. The parameter side validates formal parameters
//! `⊕ πᵢ[dᵢ]`, evaluates the multiplicity condition and turns the integer
//! zero/pole profile of the standard L-function into a degree `g(π)`.

pub mod arthur;
pub mod catalog;
pub mod enumerate;
pub mod param_syntax;
pub mod quadform;
mod reduce;
pub mod theta;

pub use catalog::{builtin, Catalog, CatalogError, Lattice, LatticeSpec, RootComponent, RootFamily};
pub use enumerate::{short_vectors, EnumConfig, EnumError, ShortVectorIndex};
pub use quadform::{exact_rank, is_even_unimodular, GramMatrix, QuadformError};
pub use theta::{enumerate_index_matrices, first_difference, theta_rank, theta_table, ThetaTable};
