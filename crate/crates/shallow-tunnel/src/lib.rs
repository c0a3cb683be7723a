pub mod error;
pub mod fields;
pub mod geometry;
pub mod loading;
pub mod numerics;
pub mod series;
pub mod solver;
pub mod verification;
