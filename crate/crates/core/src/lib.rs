//! Design-smell detection, role-stereotype classification and
//! co-occurrence mining over Java code bases.

pub mod analytics;
pub mod dataset;
pub mod mining;
pub mod model;
pub mod roles;
pub mod smells;
