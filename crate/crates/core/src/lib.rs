pub mod curve;
pub mod dilation;
pub mod eval;
pub mod geometry;
pub mod oracle;
pub mod search;
