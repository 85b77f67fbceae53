//! Exact and numeric machinery for hypertoric varieties over elliptic curves.

pub mod arrangement;
pub mod elliptic;
pub mod family;
pub mod geometry;
pub mod hikita;
pub mod ideal;
pub mod lattice;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod rings;
