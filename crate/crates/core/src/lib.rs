pub mod detgen;
pub mod expr;
pub mod parser;
pub mod prolong;
pub mod linalg;
pub mod solver;
pub mod liealg;
pub mod closure;
pub mod cli;
