//! Structural calculus on materialized groups.

mod hom;
mod invariants;
mod iso;
mod lattice;
mod quotient;
mod subgroup;

pub use hom::{hom_from_assignment, hom_from_images, Homomorphism};
pub use invariants::{abelian_invariants, generator_rank, minimal_generators, AbelianInvariants};
pub use iso::{all_isomorphisms, are_isomorphic, find_isomorphism, fingerprint, Fingerprint};
pub use lattice::{all_subgroups, all_subgroups_capped, SubgroupLattice, DEFAULT_LATTICE_CAP};
pub use quotient::{quotient, subgroup_as_group, Quotient};
pub use subgroup::{
    center, centralizer, closure, commutator_subgroup, frattini, lower_central_series, normal_closure,
    normal_closure_in, power_subgroup, product, set_product_is_subgroup, Subgroup,
};
