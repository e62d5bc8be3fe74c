pub mod compare;
pub mod eval;
pub mod featurize;
pub mod pipeline;
pub mod predict;
pub mod preprocess;
pub mod train;
