//! Microscopic pedestrian flow laboratory: trajectory database, force-based
//! simulator, flow analytics and a descriptor-table tracker.

pub mod atxy;
pub mod config;
pub mod metrics;
pub mod sim;
pub mod tracker;
