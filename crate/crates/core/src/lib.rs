pub mod cloud;
pub mod ekf;
pub mod error;
pub mod geometry;
pub mod io;
pub mod pipeline;
pub mod registration;
pub mod scan;
pub mod sensor_sim;
pub mod terrain_model;
