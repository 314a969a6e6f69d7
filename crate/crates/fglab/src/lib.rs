//! Exact-arithmetic library for one-dimensional commutative formal group
//! laws and their chromatic invariants.
//!
//! The crate computes with truncated formal group laws over an exact
//! coefficient-ring tower: universal and p-typical laws, heights and v_n,
//! isomorphism and automorphism groups over finite fields, Hopf-algebroid
//! Ext via the cobar complex, and Koszul local cohomology with chromatic
//! filtrations. See the `examples/` directory for one runnable example per
//! major capability, and the `fglab` binary for the command-line interface.

pub mod ring;
pub mod linalg;
pub mod cli;
pub mod series;
pub mod fgl;
pub mod ptypical;
pub mod height;
pub mod stabilizer;
pub mod hopf;
pub mod cobar;
pub mod localcoh;
