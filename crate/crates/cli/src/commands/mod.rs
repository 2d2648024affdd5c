pub mod converge;
pub mod field;
pub mod hilbert;
pub mod identities;
pub mod simulate;
