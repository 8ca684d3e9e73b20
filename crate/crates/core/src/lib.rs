//! HyperPINN: hypernetworks that emit the weights of small physics-informed
//! networks, with the Burgers and Lorenz experiments built on them.

pub mod autodiff;
pub mod burgers;
pub mod error;
pub mod experiment;
pub mod lorenz;
pub mod models;
pub mod nets;
pub mod optim;

pub use error::{Error, Result};
