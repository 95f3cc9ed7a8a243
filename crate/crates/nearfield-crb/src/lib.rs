pub mod cli;
pub mod config;
pub mod cpl;
pub mod crb;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod quadrature;
pub mod repro;
pub mod simo;
pub mod validate;
