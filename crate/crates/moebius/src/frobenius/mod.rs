//! Frobenius model: covers of the circle, matrix factorizations of `t`,
//! universal sequences and pushout triangles.

pub mod cover;
pub mod mf;
pub mod triangles;

pub use cover::{
    coord, Coord, Cover, CoverMorphism, CoverPoint, FrobeniusError, Series, Sign, TRUNC,
};
pub use mf::*;
pub use triangles::*;
