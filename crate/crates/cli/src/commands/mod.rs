//! One module per subcommand. Stages communicate through files so external
//! checkers and CI systems can interpose at any boundary.

pub mod audit;
pub mod compare;
pub mod demo;
pub mod generate;
pub mod ingest;
pub mod regress;
pub mod report;
pub mod simulate;
