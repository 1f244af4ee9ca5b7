pub mod bratteli;
pub mod cli;
pub mod corpus;
pub mod kgroup;
pub mod lattice;
pub mod matrix;
pub mod substitution;
pub mod verify;
