//! Charts of surface braids as labeled oriented maps on the sphere, with
//! structural detectors, C-move rewriting, Γ_m component enumeration and a
//! rule-driven case-analysis verifier.

pub mod catalog;
pub mod chart;
pub mod error;
pub mod features;
pub mod moves;
pub mod regions;
pub mod template;
pub mod verify;

pub use chart::{build_chart, Chart, Dir, ValidationReport, VertexKind};
pub use error::{Error, Result};
