pub mod error;
pub mod field;
pub mod grid;
pub mod stencil;
pub mod harmonics;
pub mod interp;
pub mod ambient;
pub mod geometry;
pub mod timeseries;
pub mod flow;
pub mod diagnostics;
pub mod chain;
pub mod experiment;
