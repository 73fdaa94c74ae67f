pub mod clifford;
pub mod duality;
pub mod entropy;
pub mod fermion;
pub mod geometry;
pub mod gf2;
pub mod models;
pub mod pauli;
pub mod report;
pub mod spectrum;
pub mod stabilizer;
