pub mod convexity;
pub mod liminf;
pub mod pretangent;
pub mod render;
pub mod scan;
pub mod theorem;
pub mod validate;
