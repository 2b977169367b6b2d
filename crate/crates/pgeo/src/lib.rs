//! Penrose limits, homogeneous structures and plane waves.
//!
//! The crate is organised bottom up:
//!
//! * [`expr`]: exact symbolic scalars (parse, differentiate, simplify,
//!   evaluate, compare);
//! * [`linalg`]: symbolic and exact rational matrices;
//! * [`tensor`]: metrics, curvature, Lie derivatives and Killing transport;
//! * [`penrose`]: adapted coordinates, limits and scaling diagnostics;
//! * [`homspace`]: Lie-algebraic models of reductive homogeneous spaces;
//! * [`planewave`]: homogeneous plane waves and their normal forms.

#![allow(clippy::needless_range_loop)]

pub mod expr;
pub mod homspace;
pub mod linalg;
pub mod penrose;
pub mod planewave;
pub mod tensor;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/expressions.md")]
    mod expressions {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/penrose-limits.md")]
    mod penrose_limits {}
    #[doc = include_str!("../../../book/src/homogeneous-spaces.md")]
    mod homogeneous_spaces {}
    #[doc = include_str!("../../../book/src/plane-waves.md")]
    mod plane_waves {}
    #[doc = include_str!("../../../book/src/transport.md")]
    mod transport {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
