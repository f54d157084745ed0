pub mod boost;
pub mod brute;
pub mod cascade;
pub mod claims;
pub mod error;
pub mod generate;
pub mod instance;
pub mod io;
pub mod matching;
pub mod matroid;
pub mod solver;
pub mod swap;
pub mod table;
