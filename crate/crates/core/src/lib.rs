//! Planar 3-SAT to embedded caterpillar reduction, with exact weak unit disk
//! contact verification on the hexagonal lattice and an exhaustive search
//! oracle for gadget realizations.

pub mod caterpillar;
pub mod cli;
pub mod formula;
pub mod gadgets;
pub mod hexlattice;
pub mod oracle;
pub mod reduction;
pub mod verifier;
