//! A table-driven engine for small finite p-groups.
//!
//! Groups are given by presentations, materialized by coset enumeration and
//! then analysed through their multiplication tables: subgroups, Frattini and
//! commutator calculus, abelian invariants, isomorphism search, subgroup
//! lattices, the Goursat correspondence for direct products, and a set of
//! witness scenarios for Frattini-resistance of direct products.

pub mod corpus;
pub mod enumerator;
pub mod error;
pub mod goursat;
pub mod group;
pub mod presentation;
pub mod resistance;
pub mod structure;
mod util;

pub use enumerator::{enumerate, enumerate_with, EnumerationOptions};
pub use error::{Error, ParseError, Result};
pub use group::{validate_group, ConcreteGroup, GroupId, ValidationFailure, ValidationReport};
pub use presentation::{expand_word, parse_presentation, Presentation, Word};
pub use structure::{AbelianInvariants, Homomorphism, Subgroup, SubgroupLattice};
pub use util::{is_prime, log_p};
