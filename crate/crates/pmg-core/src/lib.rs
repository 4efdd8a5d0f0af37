//! Phase-based minimalist grammar engine.
//!
//! Derivations are built top-down, left to right: an expectation for a
//! category is either satisfied by merging a lexical item whose feature
//! edge unifies with it, or by remerging an item previously moved into
//! derivational memory. Items whose trailing category features were not
//! expected at their merge site move into memory and must be discharged
//! before the derivation can succeed.
//!
//! Two movement memory backends are provided: a last-in-first-out buffer
//! and a feature-path trie addressed by cue. A separate referent trie
//! tracks discourse referents per scope for binding resolution.

pub mod binding;
pub mod engine;
pub mod feature;
pub mod lexicon;
pub mod memory;

pub use binding::{
    classify, process_discourse, render_binding, render_coindex_table, AnaphorRow, BindingConfig,
    BindingEvent, BindingOutcome, CoindexTable, ReferentKind, SentenceReport,
};
pub use engine::{
    enumerate, generate, parse, render_trace, render_trace_structured, render_tree,
    resolve_step_budget, Derivation, DerivationConfig, EngineError, Enumerated, FailReason, Op,
    RootAttempt, RunOutcome, TraceStep, Verdict, DEFAULT_STEP_BUDGET,
};
pub use feature::{
    attribute_class, edge_of_entry, path_of, split_consumed_unexpected, AttrSet, Categories,
    Category, CategoryClass, FeatureOrder, FeaturePath, FeatureTerm, LabelClass, LexicalEntry,
    PathLabel, PathSource, SplitOutcome, TermKind, UnifyError,
};
pub use lexicon::{GrammarError, Lexicon};
pub use memory::{
    confusability, cue_matches, insertion_cost, MemoryBackend, MemoryError, MoveStore, MovedItem,
    PathTrie, ReferentRecord, ReferentStore, Retrieval, StoreReceipt, GLOBAL_SCOPE,
};
