pub mod analysis;
pub mod assembly;
pub mod cli;
pub mod linalg;
pub mod mesh;
pub mod model;
pub mod stepper;
