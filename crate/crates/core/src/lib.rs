pub mod lin;
pub mod linalg;
pub mod scalar;
pub mod quiver;
pub mod tensor;
pub mod report;
pub mod category;
pub mod dg;
pub mod fixtures;
pub mod dcoder;
pub mod correspondence;
pub mod constructions;
pub mod io;
pub mod cli;
