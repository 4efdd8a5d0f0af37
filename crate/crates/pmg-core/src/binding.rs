//! Discourse binding: referents register in a scoped store as sentences
//! are derived, and dependent items (null subjects, clitic pronouns,
//! reflexives) retrieve their antecedents from it.
//!
//! Binding replays completed derivation traces. Overt referential items
//! register at their merge step. Covert subjects register at the step
//! where they remerge, because only there do they pick up agreement from
//! their selecting head. Reflexives and pronouns never register; they
//! resolve at their merge step and coindex with what they find.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::engine::{parse, Derivation, DerivationConfig, Op, Verdict, DEFAULT_STEP_BUDGET};
use crate::feature::{path_of, AttrSet, FeaturePath, LexicalEntry, PathSource};
use crate::lexicon::Lexicon;
use crate::memory::{MemoryBackend, ReferentStore, GLOBAL_SCOPE};

/// How a referent-bearing item behaves in discourse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferentKind {
    /// Introduces a referent and never looks for an antecedent.
    Referential,
    /// Covert, unvalued for person: both retrieves a topic and registers.
    NullSubject,
    /// Covert but valued for person; anchored to the speech act, so it
    /// registers without resolving.
    Deictic,
    Reflexive,
    Pronoun,
}

impl fmt::Display for ReferentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            ReferentKind::Referential => "referential",
            ReferentKind::NullSubject => "null-subject",
            ReferentKind::Deictic => "deictic",
            ReferentKind::Reflexive => "reflexive",
            ReferentKind::Pronoun => "pronoun",
        };
        write!(f, "{text}")
    }
}

/// Classify an entry by its own shape; the merge site plays no role.
pub fn classify(entry: &LexicalEntry) -> ReferentKind {
    let has = |attribute: &str| {
        entry
            .category_features()
            .any(|term| term.constraints.contains(attribute))
    };
    if has("reflex") {
        return ReferentKind::Reflexive;
    }
    if entry.proclitic {
        return ReferentKind::Pronoun;
    }
    if entry.covert {
        return if has("pers") {
            ReferentKind::Deictic
        } else {
            ReferentKind::NullSubject
        };
    }
    ReferentKind::Referential
}

#[derive(Debug, Clone, Copy)]
pub struct BindingConfig {
    pub backend: MemoryBackend,
    pub step_budget: usize,
    /// Ignore topicality and take the most recent compatible referent.
    pub referential_lifo: bool,
}

impl Default for BindingConfig {
    fn default() -> Self {
        BindingConfig {
            backend: MemoryBackend::Trie,
            step_budget: DEFAULT_STEP_BUDGET,
            referential_lifo: false,
        }
    }
}

/// One binding-relevant event, in trace order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BindingEvent {
    Registered {
        label: String,
        path: String,
        topic: bool,
    },
    Resolved {
        label: String,
        kind: ReferentKind,
        antecedent: String,
    },
    Unresolved {
        label: String,
        kind: ReferentKind,
    },
    Redundant {
        label: String,
        earlier: String,
    },
}

impl fmt::Display for BindingEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BindingEvent::Registered { label, path, topic } => {
                write!(f, "referent {label} path={path}")?;
                if *topic {
                    write!(f, " topic")?;
                }
                Ok(())
            }
            BindingEvent::Resolved {
                label,
                kind,
                antecedent,
            } => write!(f, "resolve {label} -> {antecedent} ({kind})"),
            BindingEvent::Unresolved { label, kind } => {
                write!(f, "unresolved {label} ({kind})")
            }
            BindingEvent::Redundant { label, earlier } => {
                write!(f, "warning {label} duplicates accessible referent {earlier}")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SentenceReport {
    pub text: String,
    pub verdict: Verdict,
    pub events: Vec<BindingEvent>,
}

/// One anaphoric occurrence as a table row: where it sat, what it was,
/// and what it ended up bound to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnaphorRow {
    pub sentence: usize,
    pub label: String,
    /// The occurrence's feature path: the resolution cue for overt
    /// anaphors, the registered path for null subjects.
    pub position: String,
    pub kind: ReferentKind,
    pub antecedent: Option<String>,
}

/// Coindexation result over a whole discourse. Chains list mention labels
/// in order of first appearance; only chains with two or more members are
/// kept.
#[derive(Debug, Clone, Default)]
pub struct CoindexTable {
    pub rows: Vec<AnaphorRow>,
    pub chains: Vec<Vec<String>>,
    pub links: Vec<(String, String)>,
    pub warnings: Vec<String>,
    pub unresolved: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct BindingOutcome {
    pub sentences: Vec<SentenceReport>,
    pub table: CoindexTable,
    /// Snapshot of the referent trie after the whole discourse.
    pub referent_trie: String,
}

/// Union-find over mention nodes, without path compression so lookups
/// stay shared-reference only.
#[derive(Debug, Default)]
struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn add(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    fn find(&self, mut node: usize) -> usize {
        while self.parent[node] != node {
            node = self.parent[node];
        }
        node
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

struct Binder<'a> {
    lexicon: &'a Lexicon,
    config: BindingConfig,
    store: ReferentStore,
    dsu: Dsu,
    node_of_record: BTreeMap<u64, usize>,
    record_labels: BTreeMap<u64, String>,
    mentions: Vec<(usize, String)>,
    links: Vec<(String, String)>,
    rows: Vec<AnaphorRow>,
    warnings: Vec<String>,
    unresolved: Vec<String>,
}

impl<'a> Binder<'a> {
    fn new(lexicon: &'a Lexicon, config: BindingConfig) -> Self {
        Binder {
            lexicon,
            config,
            store: ReferentStore::new(),
            dsu: Dsu::default(),
            node_of_record: BTreeMap::new(),
            record_labels: BTreeMap::new(),
            mentions: Vec::new(),
            links: Vec::new(),
            rows: Vec::new(),
            warnings: Vec::new(),
            unresolved: Vec::new(),
        }
    }

    fn mention(&mut self, label: &str) -> usize {
        let node = self.dsu.add();
        self.mentions.push((node, label.to_string()));
        node
    }

    #[allow(clippy::too_many_arguments)]
    fn register(
        &mut self,
        label: String,
        entry: &LexicalEntry,
        path: FeaturePath,
        attrs: AttrSet,
        scope: usize,
        step: usize,
        mention_node: usize,
        events: &mut Vec<BindingEvent>,
    ) {
        if let Some(earlier) = self.store.redundant_with(scope, &path, &entry.phon) {
            let earlier_label = self.record_labels[&earlier].clone();
            self.warnings
                .push(format!("{label} duplicates accessible referent {earlier_label}"));
            events.push(BindingEvent::Redundant {
                label: label.clone(),
                earlier: earlier_label,
            });
        }
        let id = self
            .store
            .register(&entry.phon, &entry.sem, path.clone(), attrs, scope, step);
        let topic = self.store.record(id).expect("just registered").topic;
        self.node_of_record.insert(id, mention_node);
        self.record_labels.insert(id, label.clone());
        events.push(BindingEvent::Registered {
            label,
            path: path.to_string(),
            topic,
        });
    }

    fn local_topic_closure(&self, from_scope: usize) -> BTreeSet<u64> {
        let roots: BTreeSet<usize> = self
            .store
            .records()
            .iter()
            .filter(|record| record.scope == from_scope && record.topic)
            .filter_map(|record| self.node_of_record.get(&record.id))
            .map(|node| self.dsu.find(*node))
            .collect();
        self.node_of_record
            .iter()
            .filter(|(_, node)| roots.contains(&self.dsu.find(**node)))
            .map(|(id, _)| *id)
            .collect()
    }

    fn resolve(
        &mut self,
        kind: ReferentKind,
        label: String,
        cue: &FeaturePath,
        from_scope: usize,
        mention_node: usize,
        events: &mut Vec<BindingEvent>,
    ) -> Option<String> {
        let (require_topic, local_only, excluded) = if self.config.referential_lifo {
            (false, false, BTreeSet::new())
        } else {
            match kind {
                ReferentKind::Reflexive => (true, true, BTreeSet::new()),
                ReferentKind::NullSubject => (true, false, BTreeSet::new()),
                ReferentKind::Pronoun => (false, false, self.local_topic_closure(from_scope)),
                _ => (false, false, BTreeSet::new()),
            }
        };
        let candidates = self
            .store
            .matching(from_scope, cue, require_topic, local_only, &excluded);
        // a unique candidate wins outright; otherwise take the most recent
        match candidates.last().copied() {
            Some(id) => {
                self.store.note_retrieval(id).expect("record is live");
                let antecedent = self.record_labels[&id].clone();
                self.links.push((label.clone(), antecedent.clone()));
                self.dsu.union(mention_node, self.node_of_record[&id]);
                events.push(BindingEvent::Resolved {
                    label,
                    kind,
                    antecedent: antecedent.clone(),
                });
                Some(antecedent)
            }
            None => {
                self.unresolved.push(label.clone());
                events.push(BindingEvent::Unresolved { label, kind });
                None
            }
        }
    }

    fn replay(
        &mut self,
        derivation: &Derivation,
        sentence_scope: usize,
        sentence_number: usize,
        events: &mut Vec<BindingEvent>,
    ) {
        let mut scope_map: Vec<usize> = Vec::with_capacity(derivation.scopes.len());
        for (index, parent) in derivation.scopes.iter().enumerate() {
            match parent {
                None => scope_map.push(sentence_scope),
                Some(p) => {
                    let label = format!("s{sentence_number}.{index}");
                    let opened = self.store.open_scope(scope_map[*p], label);
                    scope_map.push(opened);
                }
            }
        }
        for step in &derivation.trace {
            match step.op {
                Op::Merge | Op::PostulateCovert => {
                    let Some(bundle) = &step.referent_attrs else {
                        continue;
                    };
                    let entry_index = step.entry_index.expect("merge steps carry their entry");
                    let entry = self.lexicon.entry(entry_index).clone();
                    let kind = classify(&entry);
                    let label = format!("{}@s{}", entry.phon, sentence_number);
                    let scope = scope_map[step.scope];
                    let referent_category = self
                        .lexicon
                        .referent_category(&entry)
                        .expect("a referent bundle implies a referent category");
                    match kind {
                        ReferentKind::Referential => {
                            let source = PathSource {
                                position: step.position.clone(),
                                category: Some(referent_category),
                                attrs: bundle.phi_only(),
                            }
                            .with_phi_defaults();
                            let path = path_of(&source, &self.lexicon.order);
                            let node = self.mention(&label);
                            self.register(
                                label,
                                &entry,
                                path,
                                bundle.clone(),
                                scope,
                                step.index,
                                node,
                                events,
                            );
                        }
                        ReferentKind::Reflexive | ReferentKind::Pronoun => {
                            let cue = path_of(
                                &PathSource {
                                    position: None,
                                    category: Some(referent_category),
                                    attrs: bundle.phi_only(),
                                },
                                &self.lexicon.order,
                            );
                            let node = self.mention(&label);
                            let antecedent = self.resolve(
                                kind,
                                label.clone(),
                                &cue,
                                scope,
                                node,
                                events,
                            );
                            self.rows.push(AnaphorRow {
                                sentence: sentence_number,
                                label,
                                position: cue.to_string(),
                                kind,
                                antecedent,
                            });
                        }
                        // covert subjects wait for agreement at remerge
                        ReferentKind::NullSubject | ReferentKind::Deictic => {}
                    }
                }
                Op::MergeFromMemory => {
                    let entry_index = step.entry_index.expect("remerges carry their entry");
                    let entry = self.lexicon.entry(entry_index).clone();
                    if !entry.covert {
                        continue;
                    }
                    let kind = classify(&entry);
                    if kind != ReferentKind::NullSubject && kind != ReferentKind::Deictic {
                        continue;
                    }
                    let label = format!("{}@s{}", entry.phon, sentence_number);
                    let scope = scope_map[step.scope];
                    let origin = step.origin_step.expect("remerges record their origin");
                    let position = derivation.trace[origin - 1].position.clone();
                    let referent_category = self
                        .lexicon
                        .referent_category(&entry)
                        .expect("covert subjects bear referents");
                    let phi = step.attrs.phi_only();
                    let node = self.mention(&label);
                    let mut antecedent = None;
                    if kind == ReferentKind::NullSubject {
                        let cue = path_of(
                            &PathSource {
                                position: None,
                                category: Some(referent_category.clone()),
                                attrs: phi.clone(),
                            },
                            &self.lexicon.order,
                        );
                        antecedent =
                            self.resolve(kind, label.clone(), &cue, scope, node, events);
                    }
                    let source = PathSource {
                        position,
                        category: Some(referent_category),
                        attrs: phi,
                    }
                    .with_phi_defaults();
                    let path = path_of(&source, &self.lexicon.order);
                    if kind == ReferentKind::NullSubject {
                        self.rows.push(AnaphorRow {
                            sentence: sentence_number,
                            label: label.clone(),
                            position: path.to_string(),
                            kind,
                            antecedent,
                        });
                    }
                    self.register(
                        label,
                        &entry,
                        path,
                        step.attrs.clone(),
                        scope,
                        step.index,
                        node,
                        events,
                    );
                }
                _ => {}
            }
        }
    }

    fn into_table(self) -> CoindexTable {
        let mut groups: Vec<(usize, Vec<String>)> = Vec::new();
        for (node, label) in &self.mentions {
            let root = self.dsu.find(*node);
            match groups.iter_mut().find(|(r, _)| *r == root) {
                Some((_, members)) => members.push(label.clone()),
                None => groups.push((root, vec![label.clone()])),
            }
        }
        CoindexTable {
            rows: self.rows,
            chains: groups
                .into_iter()
                .filter(|(_, members)| members.len() > 1)
                .map(|(_, members)| members)
                .collect(),
            links: self.links,
            warnings: self.warnings,
            unresolved: self.unresolved,
        }
    }
}

/// Parse each sentence in turn, replay its winning derivation against the
/// referent store, and promote the sentence's referents to the global
/// scope afterwards. Ungrammatical sentences contribute nothing.
pub fn process_discourse(
    lexicon: &Lexicon,
    sentences: &[String],
    config: BindingConfig,
) -> BindingOutcome {
    let mut binder = Binder::new(lexicon, config);
    let mut reports = Vec::new();
    for (index, sentence) in sentences.iter().enumerate() {
        let number = index + 1;
        let tokens: Vec<String> = sentence.split_whitespace().map(str::to_string).collect();
        let outcome = parse(
            lexicon,
            &tokens,
            DerivationConfig {
                backend: config.backend,
                step_budget: config.step_budget,
            },
        );
        let verdict = outcome.verdict();
        let mut events = Vec::new();
        if let Some(derivation) = outcome.derivation() {
            let scope = binder.store.open_scope(GLOBAL_SCOPE, format!("s{number}"));
            binder.replay(derivation, scope, number, &mut events);
            binder.store.promote_scope(scope);
        }
        reports.push(SentenceReport {
            text: sentence.clone(),
            verdict,
            events,
        });
    }
    let referent_trie = binder.store.trie_dump();
    BindingOutcome {
        sentences: reports,
        table: binder.into_table(),
        referent_trie,
    }
}

/// Plain-text report: one block per sentence, then chains, warnings, and
/// unresolved mentions.
pub fn render_binding(outcome: &BindingOutcome) -> String {
    let mut out = String::new();
    for (index, sentence) in outcome.sentences.iter().enumerate() {
        out.push_str(&format!(
            "s{}: {} [{}]\n",
            index + 1,
            sentence.text,
            sentence.verdict
        ));
        for event in &sentence.events {
            out.push_str(&format!("  {event}\n"));
        }
    }
    out.push_str("chains:\n");
    if outcome.table.chains.is_empty() {
        out.push_str("  none\n");
    }
    for chain in &outcome.table.chains {
        out.push_str(&format!("  {{{}}}\n", chain.join(", ")));
    }
    let warnings = if outcome.table.warnings.is_empty() {
        "none".to_string()
    } else {
        outcome.table.warnings.join("; ")
    };
    out.push_str(&format!("warnings: {warnings}\n"));
    let unresolved = if outcome.table.unresolved.is_empty() {
        "none".to_string()
    } else {
        outcome.table.unresolved.join(", ")
    };
    out.push_str(&format!("unresolved: {unresolved}\n"));
    out
}

/// One line per anaphor occurrence, in discourse order.
pub fn render_coindex_table(table: &CoindexTable) -> String {
    let mut out = String::new();
    for row in &table.rows {
        let antecedent = row.antecedent.as_deref().unwrap_or("-");
        let chain = table
            .chains
            .iter()
            .find(|members| members.iter().any(|m| m == &row.label))
            .map(|members| format!("{{{}}}", members.join(", ")))
            .unwrap_or_else(|| "-".to_string());
        let status = if row.antecedent.is_some() {
            "resolved"
        } else {
            "unresolved"
        };
        out.push_str(&format!(
            "{}: sentence={} position={} kind={} antecedent={} chain={} status={}\n",
            row.label, row.sentence, row.position, row.kind, antecedent, chain, status
        ));
    }
    if table.rows.is_empty() {
        out.push_str("no anaphors\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::generate;

    fn sentences(texts: &[&str]) -> Vec<String> {
        texts.iter().map(|t| t.to_string()).collect()
    }

    fn entry_named(lexicon: &Lexicon, phon: &str) -> LexicalEntry {
        let index = lexicon.entries_named(phon)[0];
        lexicon.entry(index).clone()
    }

    #[test]
    fn classification_covers_the_inventory() {
        let lexicon = Lexicon::fixture();
        let kind = |phon: &str| classify(&entry_named(&lexicon, phon));
        assert_eq!(kind("gianni"), ReferentKind::Referential);
        assert_eq!(kind("cosa"), ReferentKind::Referential);
        assert_eq!(kind("si"), ReferentKind::Reflexive);
        assert_eq!(kind("lo"), ReferentKind::Pronoun);
        assert_eq!(kind("pro"), ReferentKind::NullSubject);
        assert_eq!(kind("io"), ReferentKind::Deictic);
        assert_eq!(kind("tu"), ReferentKind::Deictic);
    }

    #[test]
    fn null_subject_and_reflexive_bind_to_the_topic() {
        let lexicon = Lexicon::fixture();
        let outcome = process_discourse(
            &lexicon,
            &sentences(&["gianni saluta mario", "poi si lava"]),
            BindingConfig::default(),
        );
        assert_eq!(
            outcome.table.links,
            vec![
                ("pro@s2".to_string(), "gianni@s1".to_string()),
                ("si@s2".to_string(), "pro@s2".to_string()),
            ]
        );
        assert_eq!(
            outcome.table.chains,
            vec![vec![
                "gianni@s1".to_string(),
                "pro@s2".to_string(),
                "si@s2".to_string()
            ]]
        );
        assert!(outcome.table.warnings.is_empty());
        assert!(outcome.table.unresolved.is_empty());
        assert_eq!(
            render_binding(&outcome),
            "s1: gianni saluta mario [grammatical]\n\
             \x20 referent gianni@s1 path=S-D-3p-sg-anim topic\n\
             \x20 referent mario@s1 path=D-3p-sg-anim\n\
             s2: poi si lava [grammatical]\n\
             \x20 resolve pro@s2 -> gianni@s1 (null-subject)\n\
             \x20 referent pro@s2 path=S-D-3p-sg topic\n\
             \x20 resolve si@s2 -> pro@s2 (reflexive)\n\
             chains:\n\
             \x20 {gianni@s1, pro@s2, si@s2}\n\
             warnings: none\n\
             unresolved: none\n"
        );
    }

    #[test]
    fn recency_only_retrieval_misbinds_the_null_subject() {
        let lexicon = Lexicon::fixture();
        let config = BindingConfig {
            referential_lifo: true,
            ..BindingConfig::default()
        };
        let outcome = process_discourse(
            &lexicon,
            &sentences(&["gianni saluta mario", "poi si lava"]),
            config,
        );
        // most-recent-first retrieval skips the topic and lands on the object
        assert_eq!(
            outcome.table.links[0],
            ("pro@s2".to_string(), "mario@s1".to_string())
        );
    }

    #[test]
    fn object_pronoun_avoids_the_local_subject_chain() {
        let lexicon = Lexicon::fixture();
        let outcome = process_discourse(
            &lexicon,
            &sentences(&["gianni saluta mario", "poi lo lava"]),
            BindingConfig::default(),
        );
        assert_eq!(
            outcome.table.links,
            vec![
                ("pro@s2".to_string(), "gianni@s1".to_string()),
                ("lo@s2".to_string(), "mario@s1".to_string()),
            ]
        );
        assert_eq!(
            outcome.table.chains,
            vec![
                vec!["gianni@s1".to_string(), "pro@s2".to_string()],
                vec!["mario@s1".to_string(), "lo@s2".to_string()],
            ]
        );
    }

    #[test]
    fn table_rows_record_each_anaphor_occurrence() {
        let lexicon = Lexicon::fixture();
        let outcome = process_discourse(
            &lexicon,
            &sentences(&["gianni saluta mario", "poi si lava"]),
            BindingConfig::default(),
        );
        assert_eq!(
            outcome.table.rows,
            vec![
                AnaphorRow {
                    sentence: 2,
                    label: "pro@s2".to_string(),
                    position: "S-D-3p-sg".to_string(),
                    kind: ReferentKind::NullSubject,
                    antecedent: Some("gianni@s1".to_string()),
                },
                AnaphorRow {
                    sentence: 2,
                    label: "si@s2".to_string(),
                    position: "D-anim".to_string(),
                    kind: ReferentKind::Reflexive,
                    antecedent: Some("pro@s2".to_string()),
                },
            ]
        );
        assert_eq!(
            render_coindex_table(&outcome.table),
            "pro@s2: sentence=2 position=S-D-3p-sg kind=null-subject \
             antecedent=gianni@s1 chain={gianni@s1, pro@s2, si@s2} status=resolved\n\
             si@s2: sentence=2 position=D-anim kind=reflexive \
             antecedent=pro@s2 chain={gianni@s1, pro@s2, si@s2} status=resolved\n"
        );
        // the dump reflects the discourse's registered referent paths
        assert!(outcome.referent_trie.contains("anim"));
    }

    #[test]
    fn discourse_initial_dependents_stay_unresolved() {
        let lexicon = Lexicon::fixture();
        let outcome = process_discourse(
            &lexicon,
            &sentences(&["poi si lava"]),
            BindingConfig::default(),
        );
        assert_eq!(outcome.table.unresolved, vec!["pro@s1".to_string()]);
        // the reflexive still finds the freshly registered null subject
        assert_eq!(
            outcome.table.links,
            vec![("si@s1".to_string(), "pro@s1".to_string())]
        );
    }

    #[test]
    fn reintroducing_a_referent_warns() {
        let lexicon = Lexicon::fixture();
        let outcome = process_discourse(
            &lexicon,
            &sentences(&["gianni saluta mario", "gianni saluta mario"]),
            BindingConfig::default(),
        );
        assert_eq!(outcome.table.warnings.len(), 2);
        assert!(outcome.table.warnings[0].contains("gianni@s2"));
        assert!(outcome.table.warnings[1].contains("mario@s2"));
        assert!(outcome.table.chains.is_empty());
    }

    #[test]
    fn deictic_subjects_register_without_resolving() {
        let lexicon = Lexicon::fixture();
        let choices: Vec<String> = "cosa tu pensi che io mangi"
            .split_whitespace()
            .map(str::to_string)
            .collect();
        let generated = generate(&lexicon, &choices, None, Default::default()).unwrap();
        let derivation = generated.derivation().expect("derivable");
        let mut binder = Binder::new(&lexicon, BindingConfig::default());
        let scope = binder.store.open_scope(GLOBAL_SCOPE, "s1");
        let mut events = Vec::new();
        binder.replay(derivation, scope, 1, &mut events);
        let registered: Vec<String> = events
            .iter()
            .filter_map(|event| match event {
                BindingEvent::Registered { label, path, .. } => {
                    Some(format!("{label} {path}"))
                }
                _ => None,
            })
            .collect();
        assert_eq!(
            registered,
            vec![
                "cosa@s1 F-D-3p-sg-fem",
                "tu@s1 S-D-2p-sg",
                "io@s1 S-D-1p-sg",
            ]
        );
        assert!(binder.links.is_empty());
        assert!(binder.unresolved.is_empty());
    }

    #[test]
    fn ungrammatical_sentences_contribute_nothing() {
        let lexicon = Lexicon::fixture();
        let outcome = process_discourse(
            &lexicon,
            &sentences(&["poi lava si", "gianni saluta mario"]),
            BindingConfig::default(),
        );
        assert_ne!(outcome.sentences[0].verdict, Verdict::Grammatical);
        assert!(outcome.sentences[0].events.is_empty());
        assert_eq!(outcome.sentences[1].events.len(), 2);
    }

    #[test]
    fn chains_partition_mentions() {
        let lexicon = Lexicon::fixture();
        let outcome = process_discourse(
            &lexicon,
            &sentences(&["gianni saluta mario", "poi lo lava", "poi si lava"]),
            BindingConfig::default(),
        );
        let mut seen = BTreeSet::new();
        for chain in &outcome.table.chains {
            assert!(chain.len() > 1);
            for member in chain {
                assert!(seen.insert(member.clone()), "{member} in two chains");
            }
        }
        for (dependent, antecedent) in &outcome.table.links {
            let together = outcome
                .table
                .chains
                .iter()
                .any(|chain| chain.contains(dependent) && chain.contains(antecedent));
            assert!(together, "{dependent} and {antecedent} not coindexed");
        }
    }
}
