//! Reference implementations used to cross-check the main crates in tests.
//!
//! Everything here favours the most literal reading of a definition over
//! speed: d-separation by enumerating paths, equivalence classes by
//! enumerating DAGs, intervention distances by inspecting adjustment sets
//! path by path, and gamma tails by quadrature. None of it shares code with
//! the implementations under test.

pub mod dsep;
pub mod gamma;
pub mod gen;
pub mod mec;
pub mod sid;
