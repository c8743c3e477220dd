pub mod constraints;
pub mod models;
pub mod solver;
pub mod stats;
