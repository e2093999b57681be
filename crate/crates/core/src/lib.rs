pub mod analytics;
pub mod classical;
pub mod error;
pub mod ghost;
pub mod harness;
pub mod interval;
pub mod packing2d;
pub mod quadrature;
pub mod recurrence;
pub mod rng;
pub mod stats;
