//! Qualitative evidential reasoning with relative argument strengths.
//!
//! An [`EvidenceStructure`] holds arguments `<e, p>` ("evidence `e` supports
//! conclusion `p`") and declared comparisons of their strength. The
//! [`OrderClosure`] completes those declarations into a preorder;
//! [`condition`] selects the arguments triggered by observed evidence, and the
//! [`decision`] module compares conclusions under that evidence.

pub mod conditioning;
pub mod decision;
pub mod error;
pub mod frontend;
pub mod order;
pub mod semantics;
pub mod structure;

pub use conditioning::{condition, ConditionedStructure};
pub use error::{Error, Result};
pub use order::OrderClosure;

pub use semantics::{ConclusionFrame, ConclusionSentence, EvidenceFrame, EvidenceSentence, Formula};
pub use structure::{ArgumentId, EvidenceStructure, StructureBuilder, StructureOptions};
