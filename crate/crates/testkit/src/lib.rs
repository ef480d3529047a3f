//! Reference implementations written directly from the textbook formulas,
//! with plain `f64` arithmetic and no shared code with the library under test.

pub mod classifier;
pub mod gen;
pub mod scalar_mm;
