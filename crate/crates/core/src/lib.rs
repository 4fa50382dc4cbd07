//! Bias-tailored quantum LDPC codes.
//!
//! The crate covers the whole pipeline from algebra to error rates:
//!
//! - [`gf2`]: bit-packed binary matrices with rank, kernels and row spaces.
//! - [`circulant`]: the ring of circulants and protograph matrices over it.
//! - [`codes`]: hypergraph, lifted and bias-tailored lifted products, the
//!   XZZX twisted toric family, logical bases and distance searches.
//! - [`noise`]: biased Pauli channels and the hashing bound.
//! - [`decoder`]: belief propagation with ordered-statistics post-processing.
//! - [`sim`]: seeded, thread-count independent Monte Carlo trials.
//! - [`experiment`]: JSON sweep configurations and the CSV result format.
//!
//! ```
//! use biased_qldpc::codes::{quantum_distance, xzzx_twisted_toric, SearchBudget};
//!
//! let code = xzzx_twisted_toric(3, 2).unwrap();
//! let d = quantum_distance(&code, &SearchBudget::default());
//! assert_eq!((code.n(), code.k(), d.d.unwrap().value()), (12, 2, Some(3)));
//! ```

pub mod circulant;
pub mod codes;
pub mod decoder;
pub mod error;
pub mod experiment;
pub mod gf2;
pub mod io;
pub mod noise;
pub mod sim;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/gf2.md")]
mod book_gf2 {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/circulants.md")]
mod book_circulants {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/products.md")]
mod book_products {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/noise.md")]
mod book_noise {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/decoding.md")]
mod book_decoding {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/simulation.md")]
mod book_simulation {}
