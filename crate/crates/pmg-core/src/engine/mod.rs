//! Top-down derivation engine.
//!
//! A derivation starts from a root phase edge and keeps a stack of pending
//! expectations. Popping an expectation creates a tree node; the node is
//! then lexicalized by remerging a stored item (which takes priority the
//! moment a compatible expectation appears), merging fresh material, or
//! postulating a covert item. Items carrying category features that were
//! not expected at their merge site go to movement memory and must be
//! discharged before the derivation counts as complete.

mod driver;

pub use driver::{enumerate, generate, parse, Enumerated, RootAttempt, RunOutcome};

use crate::feature::{AttrSet, FeaturePath};
use crate::memory::MemoryBackend;

/// Derivation operations, in trace order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Init,
    Merge,
    Move,
    Expect,
    MergeFromMemory,
    PostulateCovert,
    ShiftClitic,
}

impl std::fmt::Display for Op {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let text = match self {
            Op::Init => "init",
            Op::Merge => "merge",
            Op::Move => "move",
            Op::Expect => "expect",
            Op::MergeFromMemory => "merge-from-memory",
            Op::PostulateCovert => "postulate-covert",
            Op::ShiftClitic => "shift-clitic",
        };
        write!(f, "{text}")
    }
}

/// Why a derivation attempt failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailReason {
    /// A retrieval cue fit more than one stored item.
    AmbiguousRemerge,
    /// Some expectation could never be lexicalized.
    PendingExpectations,
    /// Expectations ran out while items sat in movement memory.
    UndischargedMemory,
    /// Structure completed but the input (or choice script) was not
    /// consumed, or the linearized yield disagreed with the input.
    NoParse,
    /// The step budget ran out mid-search.
    StepBudgetExceeded,
}

impl FailReason {
    /// Report precedence: smaller ranks win when branches fail for
    /// different reasons.
    fn rank(self) -> u8 {
        match self {
            FailReason::StepBudgetExceeded => 0,
            FailReason::AmbiguousRemerge => 1,
            FailReason::PendingExpectations => 2,
            FailReason::UndischargedMemory => 3,
            FailReason::NoParse => 4,
        }
    }

    pub fn strongest(a: FailReason, b: FailReason) -> FailReason {
        if a.rank() <= b.rank() {
            a
        } else {
            b
        }
    }
}

impl std::fmt::Display for FailReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let text = match self {
            FailReason::AmbiguousRemerge => "ambiguous-remerge",
            FailReason::PendingExpectations => "pending-expectations",
            FailReason::UndischargedMemory => "undischarged-memory",
            FailReason::NoParse => "no-parse",
            FailReason::StepBudgetExceeded => "step-budget-exceeded",
        };
        write!(f, "{text}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Grammatical,
    Ungrammatical(FailReason),
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Grammatical => write!(f, "grammatical"),
            Verdict::Ungrammatical(reason) => write!(f, "ungrammatical ({reason})"),
        }
    }
}

/// How a node got its lexical material.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadKind {
    Merged,
    Remerged,
    Postulated,
}

#[derive(Debug, Clone)]
pub struct HeadInfo {
    pub entry_index: usize,
    pub phon: String,
    pub sem: String,
    pub kind: HeadKind,
    pub covert: bool,
}

/// One derivation tree node. Children appear in creation order.
#[derive(Debug, Clone)]
pub struct Node {
    pub label: String,
    pub attrs: AttrSet,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub head: Option<HeadInfo>,
    /// Trace step that lexicalized this node.
    pub head_step: Option<usize>,
    pub scope: usize,
    /// Node whose select created this one (none for the root).
    pub source: Option<usize>,
}

/// One trace entry. Memory and pending snapshots are taken after the step
/// applied, oldest first.
#[derive(Debug, Clone)]
pub struct TraceStep {
    pub index: usize,
    pub op: Op,
    pub payload: String,
    pub node: Option<usize>,
    pub scope: usize,
    pub entry_index: Option<usize>,
    pub attrs: AttrSet,
    /// Attribute bundle of the referent-bearing feature, for binding.
    pub referent_attrs: Option<AttrSet>,
    /// Position label consumed at the merge site, if any.
    pub position: Option<String>,
    pub path: Option<FeaturePath>,
    /// For remerges: the step that first introduced the item.
    pub origin_step: Option<usize>,
    pub memory_after: Vec<String>,
    pub pending_after: Vec<String>,
}

/// A completed derivation.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub root: String,
    pub trace: Vec<TraceStep>,
    pub nodes: Vec<Node>,
    /// Scope parent links; scope 0 is the root phase.
    pub scopes: Vec<Option<usize>>,
    pub surface: Vec<String>,
    pub backtracks: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct DerivationConfig {
    pub backend: MemoryBackend,
    pub step_budget: usize,
}

impl Default for DerivationConfig {
    fn default() -> Self {
        DerivationConfig {
            backend: MemoryBackend::Trie,
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }
}

pub const DEFAULT_STEP_BUDGET: usize = 1000;

/// Budget precedence: explicit flag, then the PMG_STEP_BUDGET environment
/// variable, then the default.
pub fn resolve_step_budget(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("PMG_STEP_BUDGET")
            .ok()
            .and_then(|raw| raw.parse().ok())
    })
    .unwrap_or(DEFAULT_STEP_BUDGET)
}

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("unknown root category {0}")]
    UnknownRoot(String),
    #[error("no lexical entry named {0}")]
    UnknownChoice(String),
    #[error("generation needs at least one choice")]
    EmptyChoices,
}

/// Render a trace, one line per step.
pub fn render_trace(steps: &[TraceStep]) -> String {
    let mut out = String::new();
    for step in steps {
        out.push_str(&format!("{:>3}. {} {}", step.index, step.op, step.payload));
        if let Some(path) = &step.path {
            out.push_str(&format!(" path={path}"));
        }
        if !step.attrs.is_empty() {
            out.push_str(&format!(" attrs={}", step.attrs));
        }
        if let Some(origin) = step.origin_step {
            out.push_str(&format!(" origin={origin}"));
        }
        out.push_str(&format!(
            " memory=[{}] pending=[{}]",
            step.memory_after.join(","),
            step.pending_after.join(",")
        ));
        out.push('\n');
    }
    out
}

/// Machine-oriented trace: one record per step with fixed key=value
/// fields {index, op, payload, pending, memory}.
pub fn render_trace_structured(steps: &[TraceStep]) -> String {
    let mut out = String::new();
    for step in steps {
        let payload = if step.payload.is_empty() {
            "-"
        } else {
            step.payload.as_str()
        };
        out.push_str(&format!(
            "index={} op={} payload={} pending=[{}] memory=[{}]\n",
            step.index,
            step.op,
            payload,
            step.pending_after.join(","),
            step.memory_after.join(",")
        ));
    }
    out
}

/// Bracket rendering of the derivation tree. Overt merged heads print
/// bare, covert ones in parentheses, remerged ones in angle brackets.
pub fn render_tree(nodes: &[Node]) -> String {
    if nodes.is_empty() {
        return String::new();
    }
    let mut out = String::new();
    render_node(nodes, 0, &mut out);
    out
}

fn render_node(nodes: &[Node], index: usize, out: &mut String) {
    let node = &nodes[index];
    out.push('[');
    out.push_str(&node.label);
    if let Some(head) = &node.head {
        out.push(' ');
        match head.kind {
            HeadKind::Remerged => out.push_str(&format!("<{}>", head.phon)),
            HeadKind::Postulated => out.push_str(&format!("({})", head.phon)),
            HeadKind::Merged => {
                if head.covert {
                    out.push_str(&format!("({})", head.phon));
                } else {
                    out.push_str(&head.phon);
                }
            }
        }
    }
    for child in &node.children {
        out.push(' ');
        render_node(nodes, *child, out);
    }
    out.push(']');
}
