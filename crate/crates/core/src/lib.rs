pub mod fuzzy;
pub mod instance;
pub mod nexus;
pub mod scenario;
pub mod solver;
