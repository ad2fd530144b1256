pub mod clifford;
pub mod report;
pub mod expr;
pub mod hamjac;
pub mod wavekin;
pub mod zitter;
pub mod suite;
pub mod cli;
