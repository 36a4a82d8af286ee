//! A desk-scale algorithmic-statistics laboratory.
//!
//! The crate enumerates the halting domain of RM1, a concrete prefix-free
//! two-counter machine, under explicit length, time and output bounds —
//! the *restricted system* — and computes over it, exactly in dyadic
//! arithmetic: time-bounded complexity K_t(x|y), the program-mass and
//! complexity-mass semimeasures, the halting probability with its
//! critical times t_n, Busy Beaver arrays, prefix-driven halting
//! decisions, the sophistication family (k_c, k', coarse, the induced
//! sumtest), the per-level statistics P_k with Shannon-Fano companion
//! codes, and a verification suite that replays the theory's inequalities
//! against the enumerated ground truth.
//!
//! The enumeration runs data parallel under the default `parallel`
//! feature (rayon); disabling it leaves a sequential tree walk with
//! byte-identical results.

pub mod bits;
pub mod config;
pub mod dyadic;
pub mod enumerate;
pub mod error;
pub mod export;
pub mod lab;
pub mod machine;
pub mod soph;
pub mod tables;
pub mod verify;

pub use bits::{index_of, string_of, BitString};
pub use config::{ModeSelection, RunConfig};
pub use dyadic::Dyadic;
pub use enumerate::{enumerate_domain, load_table, naive_oracle, save_table, DomainTable, EnumConfig, HaltRecord};
pub use error::{QueryError, SophError, TableError};
pub use lab::{Lab, LabError};
pub use machine::{run, RunOutcome, MACHINE_ID};
pub use soph::{
    ceil_log2, function_to_prob, m_soph, mm_soph, shannon_fano, statistic_pk, sufficiency_gap,
    PrefixCode, SophParams, SophRecord, SophTable, Statistic,
};
pub use tables::{Decision, KTable, MTrace, Mode, OmegaCutoff, OmegaTrace, Tables, TimeBound};
pub use verify::{check, run_suite, LemmaId, LemmaReport, LemmaStatus, SuiteReport};
