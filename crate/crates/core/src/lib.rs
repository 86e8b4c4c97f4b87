//! Quasi-F-split heights over `F_p`.
//!
//! [`qfs_cy`] handles Calabi-Yau hypersurfaces through the orbit of
//! `f^{p-1}`, [`qfs_ci`] handles complete intersections and local rings
//! through a chain of ideals. [`certificate`] turns results into JSON
//! reports that can be replayed independently, and [`run`] dispatches a
//! textual problem to the right engine.

pub mod certificate;
pub mod corpus;
pub mod delta;
pub mod frobenius;
pub mod ideal;
pub mod linalg;
pub mod polyring;
pub mod qfs_ci;
pub mod qfs_cy;
pub mod run;
pub mod wittlab;

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/witt.md")]
    mod witt {}
    #[doc = include_str!("../../../book/src/calabi-yau.md")]
    mod calabi_yau {}
    #[doc = include_str!("../../../book/src/complete-intersections.md")]
    mod complete_intersections {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/corpus.md")]
    mod corpus {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
