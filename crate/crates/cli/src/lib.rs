pub mod report;
pub mod suite;
