pub mod codes;
pub mod constructions;
pub mod criteria;
pub mod gf;
pub mod isometry;
pub mod linalg;
pub mod search;
