//! Exact tools for deciding when two finite kernels share all principal minors,
//! and for recovering the conjugation (and possible transposition) relating them.

pub mod classd;
pub mod classify;
pub mod cocycle;
pub mod det;
pub mod doc;
pub mod equiv;
pub mod kernel;
pub mod lab;
pub mod recovery;
pub mod scalar;

pub use classd::{check_class_d, ClassDReport, ClassDWitness, EdgeTag};
pub use classify::{global_case, CaseLabel, CaseTable, GlobalCase};
pub use cocycle::{extract_gauge, verify_cocycle, CocycleFn, CocycleViolation};
pub use equiv::{check_equivalence, EquivalenceReport, Verdict};
pub use kernel::{enumerate_3cycles, Cycle, Gauge, Kernel, KernelError};
pub use lab::{gen_instance, Instance, InstanceSpec};
pub use recovery::{recover, RecoverOptions, RecoveryError, RecoveryResult};
pub use scalar::{FieldError, FieldSpec, Scalar};
