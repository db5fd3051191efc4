//! Finite geometry of multi-qubit Pauli contextuality.
//!
//! Observables of the n-qubit Pauli group are points of the symplectic
//! polar space W(2n-1, 2); commuting triples whose product is ±I are its
//! lines. On top of that model the crate builds quadrics, doilies and both
//! embeddings of the split Cayley hexagon of order two, computes certified
//! degrees of contextuality, classifies how hexagons meet other
//! subgeometries, and produces Cabello-inequality circuits.

pub mod atlas;
pub mod cabello;
pub mod contextuality;
pub mod export;
pub mod gf2;
pub mod hexagon;
pub mod pauli;
pub mod polar;
pub mod sets;
pub mod targets;

pub use contextuality::{Configuration, DegreeCertificate};
pub use gf2::BitVector;
pub use hexagon::{EmbeddingKind, HexagonCopy};
pub use pauli::{Observable, Phase, Sign};
pub use polar::{Doily, IsotropicPlane, LineContext, LineId, PointId, PolarSpace, Quadric, QuadricKind};
pub use sets::{LineSet, PointSet};
