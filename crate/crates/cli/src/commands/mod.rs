pub mod derive;
pub mod fit;
pub mod merge;
pub mod stats;
pub mod validate;
