//! Exact computations for add-triangulated equivalence coverings of the
//! Moebius band category: the finite category `C_n`, its automorphisms and
//! skew-continuous natural isomorphisms, normal forms, classification up to
//! strong isomorphism, and a Frobenius model of matrix factorizations that
//! realizes the triangulations.

pub mod classify;
pub mod cli;
pub mod cn;
pub mod frobenius;
pub mod normal_forms;
pub mod par;
pub mod scalars;
