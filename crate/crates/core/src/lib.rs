pub mod audit;
pub mod belief;
pub mod engine;
pub mod error;
pub mod models;
pub mod nct;
pub mod par;
pub mod paramset;
pub mod rng;
pub mod roots;
pub mod special;

pub use error::{ImError, Result};
