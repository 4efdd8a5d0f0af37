//! Search driver: parse, scripted generation, and bounded enumeration.
//!
//! All three share one depth-first loop over a cloneable state. Remerge
//! from movement memory is not a choice point: when a unique compatible
//! stored item exists it must be taken, and an ambiguous retrieval kills
//! the branch outright. Fresh merges, covert postulation, clitic shifts,
//! and the empty root head are the backtrackable alternatives.

use std::collections::BTreeSet;

use crate::feature::{
    path_of, split_consumed_unexpected, AttrSet, CategoryClass, FeaturePath, FeatureTerm,
    PathSource, SplitOutcome, TermKind,
};
use crate::lexicon::Lexicon;
use crate::memory::{MoveStore, MovedItem, Retrieval};

use super::{
    Derivation, DerivationConfig, EngineError, FailReason, HeadInfo, HeadKind, Node, Op,
    TraceStep, Verdict,
};

/// Outcome of one root category attempt.
#[derive(Debug, Clone)]
pub struct RootAttempt {
    pub root: String,
    pub verdict: Verdict,
    pub steps_used: usize,
    pub backtracks: usize,
    pub derivation: Option<Derivation>,
}

/// All root attempts of a parse or generation run, in trial order.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub attempts: Vec<RootAttempt>,
    pub winner: Option<usize>,
}

impl RunOutcome {
    pub fn verdict(&self) -> Verdict {
        if self.winner.is_some() {
            return Verdict::Grammatical;
        }
        let mut reason = FailReason::NoParse;
        let mut first = true;
        for attempt in &self.attempts {
            if let Verdict::Ungrammatical(r) = attempt.verdict {
                reason = if first { r } else { FailReason::strongest(reason, r) };
                first = false;
            }
        }
        Verdict::Ungrammatical(reason)
    }

    pub fn derivation(&self) -> Option<&Derivation> {
        self.winner
            .and_then(|index| self.attempts[index].derivation.as_ref())
    }

    pub fn surface(&self) -> Option<String> {
        self.derivation().map(|d| d.surface.join(" "))
    }
}

/// One sentence found by enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumerated {
    pub surface: String,
    pub root: String,
    pub steps: usize,
}

#[derive(Clone, Copy)]
enum Mode<'a> {
    Parse { input: &'a [String] },
    Generate { choices: &'a [String] },
    Enumerate { max_steps: usize },
}

struct Ctx<'a> {
    lexicon: &'a Lexicon,
    mode: Mode<'a>,
    backend: crate::memory::MemoryBackend,
    budget: usize,
    backtracks: usize,
    root: String,
    found: Vec<Enumerated>,
}

/// Budget ran out; abort the whole attempt.
struct Halt;

type Step<T> = Result<T, Halt>;

enum Flow {
    Done(State),
    Fail(FailReason),
}

#[derive(Debug, Clone)]
struct PendingSelect {
    term: FeatureTerm,
    source_node: usize,
    scope: usize,
    from_item_select: bool,
    /// Phi agreement of the selecting head, inherited by nominative cues.
    source_phi: AttrSet,
}

#[derive(Debug, Clone)]
struct BufferedToken {
    entries: Vec<usize>,
}

#[derive(Debug, Clone)]
struct YieldTok {
    phon: String,
    anchor: usize,
}

#[derive(Debug, Clone)]
struct State {
    nodes: Vec<Node>,
    pending: Vec<PendingSelect>,
    memory: MoveStore,
    trace: Vec<TraceStep>,
    scopes: Vec<Option<usize>>,
    cursor: usize,
    choice_cursor: usize,
    buffer: Vec<BufferedToken>,
    yields: Vec<YieldTok>,
}

struct Emit {
    op: Op,
    payload: String,
    node: Option<usize>,
    scope: usize,
    entry_index: Option<usize>,
    attrs: AttrSet,
    referent_attrs: Option<AttrSet>,
    position: Option<String>,
    path: Option<FeaturePath>,
    origin_step: Option<usize>,
}

impl Emit {
    fn new(op: Op, payload: impl Into<String>, scope: usize) -> Self {
        Emit {
            op,
            payload: payload.into(),
            node: None,
            scope,
            entry_index: None,
            attrs: AttrSet::new(),
            referent_attrs: None,
            position: None,
            path: None,
            origin_step: None,
        }
    }
}

fn emit(ctx: &mut Ctx, state: &mut State, e: Emit) -> Step<usize> {
    if ctx.budget == 0 {
        return Err(Halt);
    }
    ctx.budget -= 1;
    let index = state.trace.len() + 1;
    let memory_after = state
        .memory
        .pending()
        .iter()
        .map(|item| item.phon.clone())
        .collect();
    let pending_after = state
        .pending
        .iter()
        .map(|select| select.term.category.clone())
        .collect();
    state.trace.push(TraceStep {
        index,
        op: e.op,
        payload: e.payload,
        node: e.node,
        scope: e.scope,
        entry_index: e.entry_index,
        attrs: e.attrs,
        referent_attrs: e.referent_attrs,
        position: e.position,
        path: e.path,
        origin_step: e.origin_step,
        memory_after,
        pending_after,
    });
    Ok(index)
}

/// Parse an input sentence. Every declared root is attempted in order and
/// recorded; the winner is the first grammatical one.
pub fn parse(lexicon: &Lexicon, input: &[String], config: DerivationConfig) -> RunOutcome {
    if input.is_empty() {
        return RunOutcome {
            attempts: Vec::new(),
            winner: None,
        };
    }
    let mut attempts = Vec::new();
    let mut winner = None;
    for root in &lexicon.roots {
        let attempt = attempt_root(lexicon, root, Mode::Parse { input }, config);
        if winner.is_none() && attempt.verdict == Verdict::Grammatical {
            winner = Some(attempts.len());
        }
        attempts.push(attempt);
    }
    RunOutcome { attempts, winner }
}

/// Derive a sentence from a scripted sequence of entry names (covert
/// entries included). Roots that can be lexicalized by the first choice
/// are tried before the rest; the run stops at the first success.
pub fn generate(
    lexicon: &Lexicon,
    choices: &[String],
    root: Option<&str>,
    config: DerivationConfig,
) -> Result<RunOutcome, EngineError> {
    if choices.is_empty() {
        return Err(EngineError::EmptyChoices);
    }
    for choice in choices {
        if lexicon.entries_named(choice).is_empty() {
            return Err(EngineError::UnknownChoice(choice.clone()));
        }
    }
    let roots: Vec<String> = match root {
        Some(name) => {
            if !lexicon.roots.iter().any(|r| r == name) {
                return Err(EngineError::UnknownRoot(name.to_string()));
            }
            vec![name.to_string()]
        }
        None => {
            let first_entries: Vec<usize> = choices
                .first()
                .map(|c| lexicon.entries_named(c))
                .unwrap_or_default();
            let mut preferred = Vec::new();
            let mut rest = Vec::new();
            for root in &lexicon.roots {
                let edge = FeatureTerm::category(root.clone());
                let reachable = lexicon
                    .candidates_for(&edge)
                    .iter()
                    .any(|i| first_entries.contains(i));
                if reachable {
                    preferred.push(root.clone());
                } else {
                    rest.push(root.clone());
                }
            }
            preferred.extend(rest);
            preferred
        }
    };
    let mut attempts = Vec::new();
    let mut winner = None;
    for root in &roots {
        let attempt = attempt_root(lexicon, root, Mode::Generate { choices }, config);
        let won = attempt.verdict == Verdict::Grammatical;
        attempts.push(attempt);
        if won {
            winner = Some(attempts.len() - 1);
            break;
        }
    }
    Ok(RunOutcome { attempts, winner })
}

/// Every distinct surface derivable within `max_steps` trace steps, in
/// discovery order (roots in declared order, then depth first).
pub fn enumerate(lexicon: &Lexicon, max_steps: usize, config: DerivationConfig) -> Vec<Enumerated> {
    let mut results = Vec::new();
    let mut seen = BTreeSet::new();
    for root in &lexicon.roots {
        let mut ctx = Ctx {
            lexicon,
            mode: Mode::Enumerate { max_steps },
            backend: config.backend,
            budget: config.step_budget,
            backtracks: 0,
            root: root.clone(),
            found: Vec::new(),
        };
        let _ = run_root(&mut ctx, root);
        for item in ctx.found {
            if seen.insert(item.surface.clone()) {
                results.push(item);
            }
        }
    }
    results
}

fn attempt_root(
    lexicon: &Lexicon,
    root: &str,
    mode: Mode,
    config: DerivationConfig,
) -> RootAttempt {
    let mut ctx = Ctx {
        lexicon,
        mode,
        backend: config.backend,
        budget: config.step_budget,
        backtracks: 0,
        root: root.to_string(),
        found: Vec::new(),
    };
    let outcome = run_root(&mut ctx, root);
    let steps_used = config.step_budget - ctx.budget;
    match outcome {
        Err(Halt) => RootAttempt {
            root: root.to_string(),
            verdict: Verdict::Ungrammatical(FailReason::StepBudgetExceeded),
            steps_used,
            backtracks: ctx.backtracks,
            derivation: None,
        },
        Ok(Flow::Fail(reason)) => RootAttempt {
            root: root.to_string(),
            verdict: Verdict::Ungrammatical(reason),
            steps_used,
            backtracks: ctx.backtracks,
            derivation: None,
        },
        Ok(Flow::Done(state)) => RootAttempt {
            root: root.to_string(),
            verdict: Verdict::Grammatical,
            steps_used,
            backtracks: ctx.backtracks,
            derivation: Some(Derivation {
                root: root.to_string(),
                surface: state.yields.iter().map(|y| y.phon.clone()).collect(),
                trace: state.trace,
                nodes: state.nodes,
                scopes: state.scopes,
                backtracks: ctx.backtracks,
            }),
        },
    }
}

fn run_root(ctx: &mut Ctx, root: &str) -> Step<Flow> {
    let mut state = State {
        nodes: Vec::new(),
        pending: Vec::new(),
        memory: MoveStore::new(ctx.backend),
        trace: Vec::new(),
        scopes: vec![None],
        cursor: 0,
        choice_cursor: 0,
        buffer: Vec::new(),
        yields: Vec::new(),
    };
    state.nodes.push(Node {
        label: root.to_string(),
        attrs: AttrSet::new(),
        parent: None,
        children: Vec::new(),
        head: None,
        head_step: None,
        scope: 0,
        source: None,
    });
    let mut init = Emit::new(Op::Init, "-", 0);
    init.node = Some(0);
    emit(ctx, &mut state, init)?;
    let select = PendingSelect {
        term: FeatureTerm::category(root.to_string()),
        source_node: 0,
        scope: 0,
        from_item_select: false,
        source_phi: AttrSet::new(),
    };
    lexicalize(ctx, state, 0, select)
}

fn run(ctx: &mut Ctx, mut state: State) -> Step<Flow> {
    if let Mode::Enumerate { max_steps } = ctx.mode {
        // every outstanding expectation still costs its expect and merge
        if state.trace.len() + 2 * state.pending.len() > max_steps {
            return Ok(Flow::Fail(FailReason::NoParse));
        }
    }
    if let Some(select) = state.pending.pop() {
        let node_idx = state.nodes.len();
        state.nodes.push(Node {
            label: select.term.category.clone(),
            attrs: select.term.constraints.clone(),
            parent: Some(select.source_node),
            children: Vec::new(),
            head: None,
            head_step: None,
            scope: select.scope,
            source: Some(select.source_node),
        });
        state.nodes[select.source_node].children.push(node_idx);
        let mut e = Emit::new(Op::Expect, select.term.category.clone(), select.scope);
        e.node = Some(node_idx);
        e.attrs = select.term.constraints.clone();
        emit(ctx, &mut state, e)?;
        return lexicalize(ctx, state, node_idx, select);
    }
    finish(ctx, state)
}

fn finish(ctx: &mut Ctx, state: State) -> Step<Flow> {
    if !state.memory.is_discharged() {
        return Ok(Flow::Fail(FailReason::UndischargedMemory));
    }
    if !state.buffer.is_empty() {
        return Ok(Flow::Fail(FailReason::NoParse));
    }
    match ctx.mode {
        Mode::Parse { input } => {
            if state.cursor != input.len() {
                return Ok(Flow::Fail(FailReason::NoParse));
            }
            let yielded: Vec<String> = state
                .yields
                .iter()
                .map(|y| y.phon.to_lowercase())
                .collect();
            let wanted: Vec<String> = input.iter().map(|t| t.to_lowercase()).collect();
            if yielded != wanted {
                return Ok(Flow::Fail(FailReason::NoParse));
            }
        }
        Mode::Generate { choices } => {
            if state.choice_cursor != choices.len() {
                return Ok(Flow::Fail(FailReason::NoParse));
            }
        }
        Mode::Enumerate { max_steps } => {
            if state.trace.len() > max_steps || state.yields.is_empty() {
                return Ok(Flow::Fail(FailReason::NoParse));
            }
            let surface = state
                .yields
                .iter()
                .map(|y| y.phon.clone())
                .collect::<Vec<_>>()
                .join(" ");
            ctx.found.push(Enumerated {
                surface,
                root: ctx.root.clone(),
                steps: state.trace.len(),
            });
            // keep exploring other branches
            return Ok(Flow::Fail(FailReason::NoParse));
        }
    }
    Ok(Flow::Done(state))
}

enum Action {
    MergeEntry {
        entry: usize,
        postulate: bool,
        from_buffer: Option<usize>,
    },
    Shift,
    EmptyHead,
}

fn lexicalize(
    ctx: &mut Ctx,
    state: State,
    node_idx: usize,
    select: PendingSelect,
) -> Step<Flow> {
    let node_label = state.nodes[node_idx].label.clone();
    let node_attrs = state.nodes[node_idx].attrs.clone();

    // nominative selects inherit the selecting head's agreement
    let enrichment = if select.from_item_select
        && node_attrs.get("case").map(|v| v.as_deref()) == Some(Some("nom"))
    {
        select.source_phi.clone()
    } else {
        AttrSet::new()
    };

    let cue_attrs = node_attrs
        .phi_only()
        .unify(&enrichment.phi_only())
        .unwrap_or_else(|_| node_attrs.phi_only());
    let cue = path_of(
        &PathSource {
            position: None,
            category: Some(node_label.clone()),
            attrs: cue_attrs,
        },
        &ctx.lexicon.order,
    );
    let compat = {
        let node_label = node_label.clone();
        let node_attrs = node_attrs.clone();
        let enrichment = enrichment.clone();
        move |item: &MovedItem| -> bool {
            let Some(first) = item.remaining.first() else {
                return false;
            };
            if first.category != node_label {
                return false;
            }
            match node_attrs.unify(&item.attrs) {
                Ok(merged) => merged.unify(&enrichment).is_ok(),
                Err(_) => false,
            }
        }
    };
    match state.memory.retrieve(&cue, compat) {
        Retrieval::Ambiguous(_) => return Ok(Flow::Fail(FailReason::AmbiguousRemerge)),
        Retrieval::Unique(id) => {
            let mut branch = state;
            return match apply_remerge(ctx, &mut branch, node_idx, &select, id, &enrichment)? {
                true => run(ctx, branch),
                false => Ok(Flow::Fail(FailReason::PendingExpectations)),
            };
        }
        Retrieval::None => {}
    }

    let actions = collect_actions(ctx, &state, node_idx, &select);
    if actions.is_empty() {
        return Ok(Flow::Fail(FailReason::PendingExpectations));
    }
    let mut best: Option<FailReason> = None;
    for action in actions {
        let mut branch = state.clone();
        let flow = match action {
            Action::MergeEntry {
                entry,
                postulate,
                from_buffer,
            } => {
                apply_merge(ctx, &mut branch, node_idx, &select, entry, postulate, from_buffer)?;
                run(ctx, branch)?
            }
            Action::Shift => {
                apply_shift(ctx, &mut branch, node_idx)?;
                lexicalize(ctx, branch, node_idx, select.clone())?
            }
            Action::EmptyHead => {
                apply_empty_head(ctx, &mut branch, node_idx);
                run(ctx, branch)?
            }
        };
        match flow {
            Flow::Done(done) => return Ok(Flow::Done(done)),
            Flow::Fail(reason) => {
                ctx.backtracks += 1;
                best = Some(match best {
                    Some(b) => FailReason::strongest(b, reason),
                    None => reason,
                });
            }
        }
    }
    Ok(Flow::Fail(best.expect("nonempty actions")))
}

fn collect_actions(
    ctx: &Ctx,
    state: &State,
    node_idx: usize,
    select: &PendingSelect,
) -> Vec<Action> {
    let term = FeatureTerm {
        kind: TermKind::CategoryFeature,
        category: state.nodes[node_idx].label.clone(),
        constraints: state.nodes[node_idx].attrs.clone(),
        optional: false,
    };
    let splits = |entry: usize| {
        split_consumed_unexpected(
            &ctx.lexicon.entries[entry],
            &term,
            &ctx.lexicon.categories,
        )
        .is_ok()
    };
    let mut actions = Vec::new();
    if select.from_item_select {
        for (buffer_index, buffered) in state.buffer.iter().enumerate() {
            for &entry in &buffered.entries {
                if splits(entry) {
                    actions.push(Action::MergeEntry {
                        entry,
                        postulate: false,
                        from_buffer: Some(buffer_index),
                    });
                }
            }
        }
    }
    match ctx.mode {
        Mode::Parse { input } => {
            let mut overt = Vec::new();
            if state.cursor < input.len() {
                for entry in ctx.lexicon.lookup_by_phon(&input[state.cursor]) {
                    if !ctx.lexicon.entries[entry].proclitic && splits(entry) {
                        overt.push(entry);
                    }
                }
            }
            let had_overt = !actions.is_empty() || !overt.is_empty();
            for entry in overt {
                actions.push(Action::MergeEntry {
                    entry,
                    postulate: false,
                    from_buffer: None,
                });
            }
            // covert items are postulated only where nothing overt fits;
            // the selecting head already analyzed (or still upcoming)
            // licenses the silent pronoun
            if !had_overt {
                let mut coverts: Vec<usize> = ctx
                    .lexicon
                    .entries
                    .iter()
                    .enumerate()
                    .filter(|(i, e)| e.covert && splits(*i))
                    .map(|(i, _)| i)
                    .collect();
                coverts.sort_by_key(|&i| specificity(ctx.lexicon, i));
                for entry in coverts {
                    actions.push(Action::MergeEntry {
                        entry,
                        postulate: true,
                        from_buffer: None,
                    });
                }
            }
            if state.cursor < input.len() {
                let entries = ctx.lexicon.lookup_by_phon(&input[state.cursor]);
                if !entries.is_empty()
                    && entries.iter().all(|&e| ctx.lexicon.entries[e].proclitic)
                {
                    actions.push(Action::Shift);
                }
            }
        }
        Mode::Generate { choices } => {
            if state.choice_cursor < choices.len() {
                for entry in ctx.lexicon.entries_named(&choices[state.choice_cursor]) {
                    if splits(entry) {
                        actions.push(Action::MergeEntry {
                            entry,
                            postulate: false,
                            from_buffer: None,
                        });
                    }
                }
            }
        }
        Mode::Enumerate { .. } => {
            for (entry, info) in ctx.lexicon.entries.iter().enumerate() {
                if info.proclitic && !select.from_item_select {
                    continue;
                }
                if splits(entry) {
                    actions.push(Action::MergeEntry {
                        entry,
                        postulate: false,
                        from_buffer: None,
                    });
                }
            }
        }
    }
    let node = &state.nodes[node_idx];
    if node_idx == 0
        && node.head.is_none()
        && ctx.lexicon.categories[&node.label].class == CategoryClass::PhaseEdge
    {
        actions.push(Action::EmptyHead);
    }
    actions
}

/// Total number of constrained attributes across category features; used
/// to try less specified covert items first.
fn specificity(lexicon: &Lexicon, entry: usize) -> usize {
    lexicon.entries[entry]
        .category_features()
        .map(|t| t.constraints.len())
        .sum()
}

fn apply_merge(
    ctx: &mut Ctx,
    state: &mut State,
    node_idx: usize,
    select: &PendingSelect,
    entry_idx: usize,
    postulate: bool,
    from_buffer: Option<usize>,
) -> Step<()> {
    let entry = ctx.lexicon.entries[entry_idx].clone();
    let term = FeatureTerm {
        kind: TermKind::CategoryFeature,
        category: state.nodes[node_idx].label.clone(),
        constraints: state.nodes[node_idx].attrs.clone(),
        optional: false,
    };
    let split = split_consumed_unexpected(&entry, &term, &ctx.lexicon.categories)
        .expect("candidate was pre-checked");
    let position = split.position(&ctx.lexicon.order);
    let node_scope = state.nodes[node_idx].scope;

    // a phase edge head opens a new scope, except at the already open root
    let consumed_phase_edge = split.consumed.iter().any(|t| {
        ctx.lexicon.categories[&t.category].class == CategoryClass::PhaseEdge
    });
    let child_scope = if consumed_phase_edge && node_idx != 0 {
        state.scopes.push(Some(node_scope));
        state.scopes.len() - 1
    } else {
        node_scope
    };

    state.nodes[node_idx].attrs = split.node_attrs.clone();
    state.nodes[node_idx].head = Some(HeadInfo {
        entry_index: entry_idx,
        phon: entry.phon.clone(),
        sem: entry.sem.clone(),
        kind: if postulate {
            HeadKind::Postulated
        } else {
            HeadKind::Merged
        },
        covert: entry.covert,
    });

    match from_buffer {
        Some(buffer_index) => {
            state.buffer.remove(buffer_index);
        }
        None => match ctx.mode {
            Mode::Parse { .. } => {
                if !entry.covert {
                    state.cursor += 1;
                }
            }
            Mode::Generate { .. } => state.choice_cursor += 1,
            Mode::Enumerate { .. } => {}
        },
    }

    // pending pushes: the spine select of the last consumed feature goes
    // under the item's own selects, so item selects pop first in order
    if let Some(last) = split.consumed.last() {
        if let Some(target) = ctx.lexicon.categories[&last.category].selects.clone() {
            state.pending.push(PendingSelect {
                term: FeatureTerm::category(target),
                source_node: node_idx,
                scope: child_scope,
                from_item_select: false,
                source_phi: AttrSet::new(),
            });
        }
    }
    let item_selects: Vec<FeatureTerm> = entry.select_features().cloned().collect();
    for term in item_selects.iter().rev() {
        state.pending.push(PendingSelect {
            term: term.clone(),
            source_node: node_idx,
            scope: child_scope,
            from_item_select: true,
            source_phi: split.node_attrs.phi_only(),
        });
    }

    let mut e = Emit::new(
        if postulate {
            Op::PostulateCovert
        } else {
            Op::Merge
        },
        entry.phon.clone(),
        node_scope,
    );
    e.node = Some(node_idx);
    e.entry_index = Some(entry_idx);
    e.attrs = split.node_attrs.clone();
    e.referent_attrs = referent_bundle(ctx.lexicon, &entry, &split);
    e.position = position.clone();
    let merge_step = emit(ctx, state, e)?;
    state.nodes[node_idx].head_step = Some(merge_step);

    if !entry.covert {
        if entry.proclitic {
            let host_anchor = state.nodes[select.source_node]
                .head_step
                .expect("proclitic host is lexicalized");
            let at = state
                .yields
                .iter()
                .position(|y| y.anchor == host_anchor)
                .unwrap_or(state.yields.len());
            state.yields.insert(
                at,
                YieldTok {
                    phon: entry.phon.clone(),
                    anchor: merge_step,
                },
            );
        } else {
            state.yields.push(YieldTok {
                phon: entry.phon.clone(),
                anchor: merge_step,
            });
        }
    }

    if !split.unexpected.is_empty() {
        let attrs = split.unexpected_attrs();
        let source = PathSource {
            position: position.clone(),
            category: Some(split.unexpected[0].category.clone()),
            attrs: attrs.phi_only(),
        };
        // covert pronouns stay underspecified until remerge fixes their
        // agreement; overt nominals take the default third singular
        let source = if entry.covert {
            source
        } else {
            source.with_phi_defaults()
        };
        let path = path_of(&source, &ctx.lexicon.order);
        state.memory.store(
            entry_idx,
            &entry.phon,
            &split.unexpected[0].category,
            attrs.clone(),
            split.unexpected.clone(),
            path.clone(),
            merge_step,
        );
        let mut m = Emit::new(Op::Move, entry.phon.clone(), node_scope);
        m.node = Some(node_idx);
        m.entry_index = Some(entry_idx);
        m.attrs = attrs;
        m.position = position;
        m.path = Some(path);
        emit(ctx, state, m)?;
    }
    Ok(())
}

fn apply_remerge(
    ctx: &mut Ctx,
    state: &mut State,
    node_idx: usize,
    _select: &PendingSelect,
    id: u64,
    enrichment: &AttrSet,
) -> Step<bool> {
    let item = state.memory.discharge(id).expect("retrieved id exists");
    let node_attrs = state.nodes[node_idx].attrs.clone();
    let mut merged = match node_attrs.unify(&item.attrs) {
        Ok(m) => m,
        Err(_) => return Ok(false),
    };
    merged = match merged.unify(enrichment) {
        Ok(m) => m,
        Err(_) => return Ok(false),
    };

    let mut consumed = vec![item.remaining[0].clone()];
    let mut next = 1;
    while next < item.remaining.len() {
        let tail = &item.remaining[next];
        let wanted = ctx.lexicon.categories[&consumed.last().expect("nonempty").category]
            .selects
            .as_deref();
        if wanted == Some(tail.category.as_str()) {
            merged = match merged.unify(&tail.constraints) {
                Ok(m) => m,
                Err(_) => return Ok(false),
            };
            consumed.push(tail.clone());
            next += 1;
        } else {
            break;
        }
    }
    let leftover: Vec<FeatureTerm> = item.remaining[next..].to_vec();

    let entry = &ctx.lexicon.entries[item.entry_index];
    let node_scope = state.nodes[node_idx].scope;
    state.nodes[node_idx].attrs = merged.clone();
    state.nodes[node_idx].head = Some(HeadInfo {
        entry_index: item.entry_index,
        phon: item.phon.clone(),
        sem: entry.sem.clone(),
        kind: HeadKind::Remerged,
        covert: entry.covert,
    });

    if let Some(last) = consumed.last() {
        if let Some(target) = ctx.lexicon.categories[&last.category].selects.clone() {
            state.pending.push(PendingSelect {
                term: FeatureTerm::category(target),
                source_node: node_idx,
                scope: node_scope,
                from_item_select: false,
                source_phi: AttrSet::new(),
            });
        }
    }

    let mut e = Emit::new(Op::MergeFromMemory, item.phon.clone(), node_scope);
    e.node = Some(node_idx);
    e.entry_index = Some(item.entry_index);
    e.attrs = merged.clone();
    e.referent_attrs = Some(merged.clone());
    e.path = Some(item.path.clone());
    e.origin_step = Some(item.origin_step);
    let step = emit(ctx, state, e)?;
    state.nodes[node_idx].head_step = Some(step);

    if !leftover.is_empty() {
        let order = &ctx.lexicon.order;
        let position = consumed
            .iter()
            .map(|t| t.category.clone())
            .find(|c| order.position_categories.contains(c));
        let attrs: AttrSet = {
            let mut pooled = AttrSet::new();
            for term in &leftover {
                pooled = pooled
                    .unify(&term.constraints)
                    .expect("entry bundle is consistent");
            }
            pooled
        };
        let source = PathSource {
            position: position.clone(),
            category: Some(leftover[0].category.clone()),
            attrs: attrs.phi_only(),
        }
        .with_phi_defaults();
        let path = path_of(&source, order);
        state.memory.store(
            item.entry_index,
            &item.phon,
            &leftover[0].category,
            attrs.clone(),
            leftover.clone(),
            path.clone(),
            item.origin_step,
        );
        let mut m = Emit::new(Op::Move, item.phon.clone(), node_scope);
        m.node = Some(node_idx);
        m.entry_index = Some(item.entry_index);
        m.attrs = attrs;
        m.position = position;
        m.path = Some(path);
        m.origin_step = Some(item.origin_step);
        emit(ctx, state, m)?;
    }
    Ok(true)
}

fn apply_shift(ctx: &mut Ctx, state: &mut State, node_idx: usize) -> Step<()> {
    let token = match ctx.mode {
        Mode::Parse { input } => input[state.cursor].clone(),
        _ => unreachable!("shift only exists while parsing"),
    };
    let entries = ctx.lexicon.lookup_by_phon(&token);
    let scope = state.nodes[node_idx].scope;
    state.cursor += 1;
    state.buffer.push(BufferedToken { entries });
    let mut e = Emit::new(Op::ShiftClitic, token.to_lowercase(), scope);
    e.node = Some(node_idx);
    emit(ctx, state, e)?;
    Ok(())
}

fn apply_empty_head(ctx: &Ctx, state: &mut State, node_idx: usize) {
    let label = state.nodes[node_idx].label.clone();
    if let Some(target) = ctx.lexicon.categories[&label].selects.clone() {
        let scope = state.nodes[node_idx].scope;
        state.pending.push(PendingSelect {
            term: FeatureTerm::category(target),
            source_node: node_idx,
            scope,
            from_item_select: false,
            source_phi: AttrSet::new(),
        });
    }
}

/// Attribute bundle of the entry's referent-bearing feature, if it has
/// one. An entry bears a referent when it carries a phase-edge category
/// whose declared select is lexical and carries that lexical category too.
fn referent_bundle(
    lexicon: &Lexicon,
    entry: &crate::feature::LexicalEntry,
    split: &SplitOutcome,
) -> Option<AttrSet> {
    let referent_category = lexicon.referent_category(entry)?;
    if split.consumed.iter().any(|t| t.category == referent_category) {
        Some(split.node_attrs.clone())
    } else if split
        .unexpected
        .iter()
        .any(|t| t.category == referent_category)
    {
        Some(split.unexpected_attrs())
    } else {
        None
    }
}
