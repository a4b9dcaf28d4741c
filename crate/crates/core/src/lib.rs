pub mod engine;
pub mod experiment;
pub mod nn;
pub mod par;
pub mod signal;
pub mod stl;
pub mod survival;
pub mod sut;
