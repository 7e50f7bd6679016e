//! Explicit finite witnesses of the Kochen-Specker no-go theorem.
//!
//! The library builds a concrete set of rank-1 directions in real 3-space
//! together with the coloring constraints they impose (exactly one red
//! direction per orthogonal triple, spans of green directions stay green),
//! decides whether any red/green coloring can satisfy them, and produces a
//! human-auditable refutation certificate when none can.
//!
//! The construction rests on great-circle descent: from any point strictly
//! between the north pole and the equator there is a great circle having that
//! point as its most northerly point, and a finite chain of such descents
//! reaches any strictly more southerly target. Chaining descent gadgets
//! around a closed 30-degree circuit forces a contradiction with the
//! triple rule, which is the whole theorem.
//!
//! Modules:
//! - [`geom`]: unit directions, frames, latitude/longitude charts, the
//!   equator/perpendicular completion of a point, gnomonic projection.
//! - [`descent`]: planning and checking finite descent chains.
//! - [`construct`]: the circuit, the descent gadgets, and the assembled
//!   constraint system.
//! - [`csp`]: constraint semantics, propagation, backtracking search,
//!   brute-force counting, certificates, CNF encoding.
//! - [`formats`]: system documents, certificate text, DIMACS, SVG figures,
//!   and constraint auto-derivation from raw vector lists.

pub mod config;
pub mod construct;
pub mod csp;
pub mod descent;
pub mod formats;
pub mod geom;

pub use config::Tolerances;
