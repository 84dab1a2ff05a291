//! ZH-calculus and its scalable extension as an executable rewrite and
//! verification system.
//!
//! The crate is organised around a small intermediate representation for
//! ZH-diagrams ([`diagram`]) together with an exact tensor-contraction
//! evaluator ([`semantics`]) that serves as the ground-truth oracle for
//! everything else:
//!
//! * [`scalable`] — sized wires, dividers/gatherers, scaled spiders and
//!   matrix arrows, and the wire-stripping functor back to plain diagrams.
//! * [`bang`] — !-box templates, instantiation into concrete diagrams, and
//!   the dictionary between !-boxes and matrix arrows.
//! * [`rules`] — the core rule catalog as verified rewrites, plus derived
//!   identities: local complementation, hyper local complementation and the
//!   regular hyper pivot.
//! * [`transforms`] — Fourier/Möbius transforms of boolean phase functions
//!   with exact rational-phase arithmetic, and their Kravchuk/binomial
//!   specialisations for symmetric functions.
//! * [`nests`] — phase gadgets, generalized hyper-edges, diagrammatic
//!   transforms, spider-nest identity verification and mining, and the
//!   Fourier hyper pivot.

pub mod bang;
pub mod bitmatrix;
pub mod diagram;
pub mod error;
pub mod nests;
pub mod phase;
pub mod pivots;
pub mod rules;
pub mod scalable;
pub mod semantics;
pub mod tensor;
pub mod transforms;

pub use bitmatrix::BitMatrix;
pub use diagram::{Diagram, Endpoint, Generator, NodeId};
pub use error::{Error, Result};
pub use phase::PhaseElement;
pub use semantics::{equal_semantics, semantics, semantics_with_limit, DEFAULT_CONTRACTION_LIMIT};
pub use tensor::Tensor;
