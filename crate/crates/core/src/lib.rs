pub mod bilag;
pub mod calculus;
pub mod connection;
pub mod eguchi;
pub mod error;
pub mod flows;
pub mod models;
pub mod quaternion;
pub mod report;
pub mod sampling;
pub mod suite;

pub use error::{GeomError, Result};
