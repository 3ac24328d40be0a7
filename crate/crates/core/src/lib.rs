//! Maximal line spreads of PG(4,2) and optimal binary (5,3) doubling codes.

pub mod cli;
pub mod constructions;
pub mod doubling;
pub mod gf2geom;
pub mod io;
pub mod reference;
pub mod spread;
