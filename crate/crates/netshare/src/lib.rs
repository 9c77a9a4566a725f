pub mod cost;
pub mod engine;
pub mod fileio;
pub mod gen;
pub mod graph;
pub mod protocol;
pub mod rat;
pub mod sp;
pub mod verify;
