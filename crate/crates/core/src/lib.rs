//! Lattice-valued F-transforms built from overlap and grouping maps.

pub mod connectives;
pub mod exec;
pub mod io;
pub mod lattice;
pub mod lawcheck;
pub mod partitions;
pub mod systems;
pub mod transforms;

pub use connectives::{ClosedForm, Connective, ConnectiveKind, Coverage, Negator, ValidationReport, Violation};
pub use exec::Exec;
pub use lattice::{Elem, Lattice, TableLattice, UnitInterval};
pub use lawcheck::{LawContext, LawOptions, LawReport, LawStatus};
pub use partitions::{LFuzzyPartition, Universe};
pub use systems::{SystemKind, TransformationSystem};
pub use transforms::{DirectKind, DirectTransform};
