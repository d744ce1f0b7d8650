pub mod ansatz;
pub mod chem;
pub mod cli;
pub mod engine;
pub mod oracle;
pub mod qubit;
pub mod sim;
pub mod stats;
