//! Derivational memory: moved items awaiting remerge, and discourse
//! referents awaiting binding.
//!
//! Both stores are built on a trie over feature paths. Movement memory
//! comes in two backends: a last-in-first-out buffer that ignores paths
//! and retrieves the most recent compatible item, and a trie addressed by
//! cue, which reports ambiguity when several stored paths fit the cue.

use std::collections::{BTreeMap, BTreeSet};

use crate::feature::{AttrSet, FeaturePath, FeatureTerm, LabelClass};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MemoryError {
    #[error("no stored item with id {id}")]
    UnknownItem { id: u64 },
}

/// Movement memory backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MemoryBackend {
    Lifo,
    #[default]
    Trie,
}

impl std::fmt::Display for MemoryBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MemoryBackend::Lifo => write!(f, "lifo"),
            MemoryBackend::Trie => write!(f, "trie"),
        }
    }
}

#[derive(Debug, Clone, Default)]
struct TrieNode {
    children: BTreeMap<crate::feature::PathLabel, usize>,
    items: Vec<u64>,
}

/// Trie over feature paths. Items live at the node their full path ends
/// on; interior nodes may hold items too (a path can be a prefix of
/// another).
#[derive(Debug, Clone)]
pub struct PathTrie {
    nodes: Vec<TrieNode>,
}

impl Default for PathTrie {
    fn default() -> Self {
        PathTrie {
            nodes: vec![TrieNode::default()],
        }
    }
}

impl PathTrie {
    pub fn new() -> Self {
        Self::default()
    }

    /// Length of the longest prefix of `path` already present.
    pub fn shared_prefix_len(&self, path: &FeaturePath) -> usize {
        let mut node = 0;
        let mut depth = 0;
        for label in path.labels() {
            match self.nodes[node].children.get(label) {
                Some(child) => {
                    node = *child;
                    depth += 1;
                }
                None => break,
            }
        }
        depth
    }

    /// Insert an item id at the end of `path`, creating nodes as needed.
    /// Returns the number of nodes created.
    pub fn insert(&mut self, path: &FeaturePath, id: u64) -> usize {
        let mut node = 0;
        let mut created = 0;
        for label in path.labels() {
            node = match self.nodes[node].children.get(label) {
                Some(child) => *child,
                None => {
                    let child = self.nodes.len();
                    self.nodes.push(TrieNode::default());
                    self.nodes[node].children.insert(label.clone(), child);
                    created += 1;
                    child
                }
            };
        }
        self.nodes[node].items.push(id);
        created
    }

    /// Remove an item id stored at `path`. Nodes are kept; only the id
    /// goes away.
    pub fn remove(&mut self, path: &FeaturePath, id: u64) -> bool {
        let mut node = 0;
        for label in path.labels() {
            match self.nodes[node].children.get(label) {
                Some(child) => node = *child,
                None => return false,
            }
        }
        let items = &mut self.nodes[node].items;
        match items.iter().position(|stored| *stored == id) {
            Some(at) => {
                items.remove(at);
                true
            }
            None => false,
        }
    }

    /// Ids reachable by consuming the cue labels in order from the root.
    ///
    /// At every node, when an edge of the next cue label's class exists the
    /// walk must take it (a text mismatch dead-ends); the walk never skips
    /// past a class the trie realizes at that point. When the class is
    /// absent the walk may skip any edge, and may give the cue label up as
    /// unconstrained once no remaining edge could still realize it. A path
    /// that ends early accepts the rest of the cue, except that a position
    /// demand is never satisfied by a path without one.
    pub fn retrieve(&self, cue: &FeaturePath) -> Vec<u64> {
        let mut found = BTreeSet::new();
        self.descend(0, cue.labels(), 0, &mut found);
        found.into_iter().collect()
    }

    fn descend(
        &self,
        node: usize,
        cue: &[crate::feature::PathLabel],
        at: usize,
        found: &mut BTreeSet<u64>,
    ) {
        let here = &self.nodes[node];
        if at == cue.len() {
            self.collect_subtree(node, found);
            return;
        }
        let next = &cue[at];
        let mut class_present = false;
        for (label, child) in &here.children {
            if label.class == next.class {
                class_present = true;
                if label.text == next.text {
                    self.descend(*child, cue, at + 1, found);
                }
            }
        }
        if class_present {
            return;
        }
        if here.children.is_empty() {
            if cue[at..]
                .iter()
                .all(|label| label.class != LabelClass::Position)
            {
                found.extend(here.items.iter().copied());
            }
            return;
        }
        for child in here.children.values() {
            self.descend(*child, cue, at, found);
        }
        let realizable_deeper = here
            .children
            .keys()
            .any(|label| label.class < next.class);
        if next.class != LabelClass::Position && !realizable_deeper {
            self.descend(node, cue, at + 1, found);
        }
    }

    fn collect_subtree(&self, node: usize, found: &mut BTreeSet<u64>) {
        found.extend(self.nodes[node].items.iter().copied());
        for child in self.nodes[node].children.values() {
            self.collect_subtree(*child, found);
        }
    }

    pub fn stored_ids(&self) -> Vec<u64> {
        let mut ids = Vec::new();
        for node in &self.nodes {
            ids.extend(node.items.iter().copied());
        }
        ids.sort_unstable();
        ids
    }

    /// Indented text rendering. Children appear in label order; `*k`
    /// marks nodes holding k items.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        self.dump_node(0, 0, "(root)", &mut out);
        out
    }

    fn dump_node(&self, node: usize, depth: usize, label: &str, out: &mut String) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        out.push_str(label);
        let items = &self.nodes[node].items;
        if !items.is_empty() {
            // the star marks nodes holding items; ids in insertion order
            let ids: Vec<String> = items.iter().map(|id| id.to_string()).collect();
            out.push_str(&format!(" *{} [{}]", items.len(), ids.join(", ")));
        }
        out.push('\n');
        for (child_label, child) in &self.nodes[node].children {
            self.dump_node(*child, depth + 1, &child_label.text, out);
        }
    }
}

/// Query cost of inserting `path`: labels not already covered by the trie.
pub fn insertion_cost(trie: &PathTrie, path: &FeaturePath) -> usize {
    path.len() - trie.shared_prefix_len(path)
}

/// Shared prefix length over the longer path length.
pub fn confusability(a: &FeaturePath, b: &FeaturePath) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    a.shared_prefix_len(b) as f64 / longest as f64
}

/// Does a stored path satisfy a retrieval cue? Each cue label must agree
/// with the path label of the same class; a class the path does not
/// mention is unconstrained and accepts any cue value. Position labels in
/// the path are never cued and are skipped.
pub fn cue_matches(path: &FeaturePath, cue: &FeaturePath) -> bool {
    cue.labels().iter().all(|cue_label| {
        match path
            .labels()
            .iter()
            .find(|path_label| path_label.class == cue_label.class)
        {
            Some(path_label) => path_label.text == cue_label.text,
            None => true,
        }
    })
}

/// An item parked in movement memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MovedItem {
    pub id: u64,
    pub entry_index: usize,
    pub phon: String,
    /// First unexpected category feature (the remerge category).
    pub category: String,
    /// Pooled constraints of the unexpected remainder.
    pub attrs: AttrSet,
    /// Unexpected category features still to be consumed at remerge.
    pub remaining: Vec<FeatureTerm>,
    pub path: FeaturePath,
    pub origin_step: usize,
}

/// Result of a retrieval attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Retrieval {
    None,
    Unique(u64),
    Ambiguous(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoreReceipt {
    pub id: u64,
    pub path: FeaturePath,
    /// Trie nodes created by this insertion (always the full path length
    /// for the first item, shorter when prefixes are shared).
    pub cost: usize,
}

/// Movement memory with a swappable retrieval policy.
#[derive(Debug, Clone)]
pub struct MoveStore {
    backend: MemoryBackend,
    items: BTreeMap<u64, MovedItem>,
    stack: Vec<u64>,
    trie: PathTrie,
    next_id: u64,
}

impl MoveStore {
    pub fn new(backend: MemoryBackend) -> Self {
        MoveStore {
            backend,
            items: BTreeMap::new(),
            stack: Vec::new(),
            trie: PathTrie::new(),
            next_id: 0,
        }
    }

    pub fn backend(&self) -> MemoryBackend {
        self.backend
    }

    pub fn store(
        &mut self,
        entry_index: usize,
        phon: &str,
        category: &str,
        attrs: AttrSet,
        remaining: Vec<FeatureTerm>,
        path: FeaturePath,
        origin_step: usize,
    ) -> StoreReceipt {
        let id = self.next_id;
        self.next_id += 1;
        let cost = self.trie.insert(&path, id);
        let receipt = StoreReceipt {
            id,
            path: path.clone(),
            cost,
        };
        self.items.insert(
            id,
            MovedItem {
                id,
                entry_index,
                phon: phon.to_string(),
                category: category.to_string(),
                attrs,
                remaining,
                path,
                origin_step,
            },
        );
        self.stack.push(id);
        receipt
    }

    /// Retrieve a stored item for remerge. `compat` is the full
    /// compatibility test (category and constraint unification, case
    /// included); the cue narrows candidates only under the trie backend.
    pub fn retrieve(
        &self,
        cue: &FeaturePath,
        compat: impl Fn(&MovedItem) -> bool,
    ) -> Retrieval {
        match self.backend {
            MemoryBackend::Lifo => {
                for id in self.stack.iter().rev() {
                    let item = &self.items[id];
                    if compat(item) {
                        return Retrieval::Unique(*id);
                    }
                }
                Retrieval::None
            }
            MemoryBackend::Trie => {
                let reachable = self.trie.retrieve(cue);
                let matching: Vec<u64> = self
                    .stack
                    .iter()
                    .copied()
                    .filter(|id| reachable.contains(id) && compat(&self.items[id]))
                    .collect();
                match matching.as_slice() {
                    [] => Retrieval::None,
                    [only] => Retrieval::Unique(*only),
                    _ => Retrieval::Ambiguous(matching),
                }
            }
        }
    }

    pub fn get(&self, id: u64) -> Result<&MovedItem, MemoryError> {
        self.items.get(&id).ok_or(MemoryError::UnknownItem { id })
    }

    pub fn discharge(&mut self, id: u64) -> Result<MovedItem, MemoryError> {
        let item = self
            .items
            .remove(&id)
            .ok_or(MemoryError::UnknownItem { id })?;
        self.stack.retain(|stored| *stored != id);
        self.trie.remove(&item.path, id);
        Ok(item)
    }

    pub fn is_discharged(&self) -> bool {
        self.items.is_empty()
    }

    /// Pending items, oldest first.
    pub fn pending(&self) -> Vec<&MovedItem> {
        self.stack.iter().map(|id| &self.items[id]).collect()
    }

    pub fn insertion_cost_query(&self, path: &FeaturePath) -> usize {
        insertion_cost(&self.trie, path)
    }

    pub fn trie_dump(&self) -> String {
        self.trie.dump()
    }
}

/// A discourse referent.
#[derive(Debug, Clone)]
pub struct ReferentRecord {
    pub id: u64,
    pub phon: String,
    pub sem: String,
    pub path: FeaturePath,
    pub attrs: AttrSet,
    pub scope: usize,
    /// True when the referent surfaced in a position slot (path starts
    /// with a position label).
    pub topic: bool,
    pub retrievals: u32,
    pub step: usize,
}

#[derive(Debug, Clone)]
struct ScopeInfo {
    parent: Option<usize>,
    label: String,
}

/// Referent memory: one trie across nested scopes. Scope 0 is the global
/// discourse scope; every other scope has a parent. A record is
/// accessible from a scope if it lives in that scope, an ancestor, or
/// global memory.
#[derive(Debug, Clone)]
pub struct ReferentStore {
    scopes: Vec<ScopeInfo>,
    records: Vec<ReferentRecord>,
    trie: PathTrie,
}

pub const GLOBAL_SCOPE: usize = 0;

impl Default for ReferentStore {
    fn default() -> Self {
        ReferentStore {
            scopes: vec![ScopeInfo {
                parent: None,
                label: "global".to_string(),
            }],
            records: Vec::new(),
            trie: PathTrie::new(),
        }
    }
}

impl ReferentStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn open_scope(&mut self, parent: usize, label: impl Into<String>) -> usize {
        let id = self.scopes.len();
        self.scopes.push(ScopeInfo {
            parent: Some(parent),
            label: label.into(),
        });
        id
    }

    pub fn scope_label(&self, scope: usize) -> &str {
        &self.scopes[scope].label
    }

    pub fn register(
        &mut self,
        phon: &str,
        sem: &str,
        path: FeaturePath,
        attrs: AttrSet,
        scope: usize,
        step: usize,
    ) -> u64 {
        let id = self.records.len() as u64;
        let topic = path
            .labels()
            .first()
            .map(|label| label.class == LabelClass::Position)
            .unwrap_or(false);
        self.trie.insert(&path, id);
        self.records.push(ReferentRecord {
            id,
            phon: phon.to_string(),
            sem: sem.to_string(),
            path,
            attrs,
            scope,
            topic,
            retrievals: 0,
            step,
        });
        id
    }

    pub fn record(&self, id: u64) -> Result<&ReferentRecord, MemoryError> {
        self.records
            .get(id as usize)
            .ok_or(MemoryError::UnknownItem { id })
    }

    pub fn note_retrieval(&mut self, id: u64) -> Result<(), MemoryError> {
        let record = self
            .records
            .get_mut(id as usize)
            .ok_or(MemoryError::UnknownItem { id })?;
        record.retrievals += 1;
        Ok(())
    }

    pub fn records(&self) -> &[ReferentRecord] {
        &self.records
    }

    fn is_ancestor_or_same(&self, candidate: usize, scope: usize) -> bool {
        let mut current = Some(scope);
        while let Some(at) = current {
            if at == candidate {
                return true;
            }
            current = self.scopes[at].parent;
        }
        false
    }

    /// Records visible from `from_scope`: its own, its ancestors', and
    /// global ones. Registration order.
    pub fn accessible(&self, from_scope: usize) -> Vec<&ReferentRecord> {
        self.records
            .iter()
            .filter(|record| self.is_ancestor_or_same(record.scope, from_scope))
            .collect()
    }

    /// Candidate antecedents for a cue, in registration order. The caller
    /// applies the retrieval policy (topic preference, recency).
    pub fn matching(
        &self,
        from_scope: usize,
        cue: &FeaturePath,
        require_topic: bool,
        local_only: bool,
        excluded: &BTreeSet<u64>,
    ) -> Vec<u64> {
        self.records
            .iter()
            .filter(|record| !excluded.contains(&record.id))
            .filter(|record| {
                if local_only {
                    record.scope == from_scope
                } else {
                    self.is_ancestor_or_same(record.scope, from_scope)
                }
            })
            .filter(|record| !require_topic || record.topic)
            .filter(|record| cue_matches(&record.path, cue))
            .map(|record| record.id)
            .collect()
    }

    /// Move every record of `scope` (and of scopes nested inside it) into
    /// the global scope, making them visible to later discourse.
    pub fn promote_scope(&mut self, scope: usize) {
        let doomed: Vec<usize> = (0..self.scopes.len())
            .filter(|candidate| self.is_ancestor_or_same(scope, *candidate))
            .collect();
        for record in &mut self.records {
            if doomed.contains(&record.scope) {
                record.scope = GLOBAL_SCOPE;
            }
        }
    }

    /// An accessible record with the same path and surface form, if any.
    /// Registering another copy would be redundant.
    pub fn redundant_with(
        &self,
        from_scope: usize,
        path: &FeaturePath,
        phon: &str,
    ) -> Option<u64> {
        self.records
            .iter()
            .filter(|record| self.is_ancestor_or_same(record.scope, from_scope))
            .find(|record| record.path == *path && record.phon == phon)
            .map(|record| record.id)
    }

    pub fn trie_dump(&self) -> String {
        self.trie.dump()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::{path_of, AttrSet, FeatureOrder, PathLabel, PathSource};

    fn attrs(pairs: &[(&str, Option<&str>)]) -> AttrSet {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.map(|s| s.to_string())))
            .collect()
    }

    fn subject_path(pairs: &[(&str, Option<&str>)]) -> FeaturePath {
        let source = PathSource {
            position: Some("S".to_string()),
            category: Some("D".to_string()),
            attrs: attrs(pairs),
        }
        .with_phi_defaults();
        path_of(&source, &FeatureOrder::default())
    }

    fn label(class: LabelClass, text: &str) -> PathLabel {
        PathLabel {
            class,
            text: text.to_string(),
        }
    }

    #[test]
    fn insertion_cost_counts_unshared_labels() {
        let mut trie = PathTrie::new();
        let second_plural = subject_path(&[("pers", Some("2")), ("num", Some("pl"))]);
        let second_singular = subject_path(&[("pers", Some("2"))]);
        let first_singular = subject_path(&[("pers", Some("1"))]);
        assert_eq!(insertion_cost(&trie, &second_plural), 4);
        trie.insert(&second_plural, 0);
        assert_eq!(insertion_cost(&trie, &second_singular), 1);
        trie.insert(&second_singular, 1);
        assert_eq!(insertion_cost(&trie, &first_singular), 2);
    }

    #[test]
    fn confusability_is_shared_prefix_over_longest() {
        let second_plural = subject_path(&[("pers", Some("2")), ("num", Some("pl"))]);
        let second_singular = subject_path(&[("pers", Some("2"))]);
        let first_singular = subject_path(&[("pers", Some("1"))]);
        assert_eq!(confusability(&second_singular, &second_plural), 3.0 / 4.0);
        assert_eq!(confusability(&second_singular, &first_singular), 2.0 / 4.0);
        assert_eq!(confusability(&second_singular, &second_singular), 1.0);
    }

    #[test]
    fn trie_dump_is_stable_for_a_path_fragment() {
        let mut trie = PathTrie::new();
        let paths = [
            FeaturePath(vec![label(LabelClass::Position, "S")]),
            FeaturePath(vec![
                label(LabelClass::Position, "F"),
                label(LabelClass::Category, "D"),
            ]),
            FeaturePath(vec![
                label(LabelClass::Position, "S"),
                label(LabelClass::Category, "D"),
                label(LabelClass::Person, "1p"),
            ]),
            FeaturePath(vec![
                label(LabelClass::Position, "S"),
                label(LabelClass::Category, "D"),
                label(LabelClass::Person, "2p"),
            ]),
            FeaturePath(vec![
                label(LabelClass::Position, "S"),
                label(LabelClass::Category, "D"),
            ]),
            FeaturePath(vec![label(LabelClass::Category, "D")]),
        ];
        for (id, path) in paths.iter().enumerate() {
            trie.insert(path, id as u64);
        }
        let expected = "\
(root)
  F
    D *1 [1]
  S *1 [0]
    D *1 [4]
      1p *1 [2]
      2p *1 [3]
  D *1 [5]
";
        assert_eq!(trie.dump(), expected);
        let starred = trie.dump().matches('*').count();
        assert_eq!(starred, 6);
    }

    #[test]
    fn cues_wildcard_absent_classes_and_reject_mismatches() {
        let tu = subject_path(&[("pers", Some("2"))]);
        let pro = FeaturePath(vec![
            label(LabelClass::Position, "S"),
            label(LabelClass::Category, "D"),
        ]);
        let cosa_source = PathSource {
            position: Some("F".to_string()),
            category: Some("D".to_string()),
            attrs: attrs(&[("gen", Some("fem"))]),
        }
        .with_phi_defaults();
        let cosa = path_of(&cosa_source, &FeatureOrder::default());

        let second_person_cue = FeaturePath(vec![
            label(LabelClass::Category, "D"),
            label(LabelClass::Person, "2p"),
        ]);
        let first_person_cue = FeaturePath(vec![
            label(LabelClass::Category, "D"),
            label(LabelClass::Person, "1p"),
        ]);
        let bare_cue = FeaturePath(vec![label(LabelClass::Category, "D")]);

        assert!(cue_matches(&tu, &second_person_cue));
        assert!(!cue_matches(&tu, &first_person_cue));
        assert!(cue_matches(&pro, &second_person_cue));
        assert!(cue_matches(&pro, &first_person_cue));
        assert!(!cue_matches(&cosa, &second_person_cue));
        assert!(cue_matches(&cosa, &bare_cue));
    }

    #[test]
    fn lifo_takes_most_recent_trie_reports_ambiguity() {
        let path = subject_path(&[("anim", None)]);
        let cue = FeaturePath(vec![label(LabelClass::Category, "D")]);
        for backend in [MemoryBackend::Lifo, MemoryBackend::Trie] {
            let mut store = MoveStore::new(backend);
            store.store(0, "gianni", "D", AttrSet::new(), vec![], path.clone(), 1);
            let receipt = store.store(1, "mario", "D", AttrSet::new(), vec![], path.clone(), 2);
            assert_eq!(receipt.cost, 0);
            let retrieved = store.retrieve(&cue, |_| true);
            match backend {
                MemoryBackend::Lifo => {
                    assert_eq!(retrieved, Retrieval::Unique(1));
                }
                MemoryBackend::Trie => {
                    assert_eq!(retrieved, Retrieval::Ambiguous(vec![0, 1]));
                }
            }
        }
    }

    #[test]
    fn trie_backend_disambiguates_by_cue() {
        let mut store = MoveStore::new(MemoryBackend::Trie);
        let cosa_source = PathSource {
            position: Some("F".to_string()),
            category: Some("D".to_string()),
            attrs: attrs(&[("gen", Some("fem"))]),
        }
        .with_phi_defaults();
        let cosa = path_of(&cosa_source, &FeatureOrder::default());
        let tu = subject_path(&[("pers", Some("2"))]);
        store.store(2, "cosa", "D", AttrSet::new(), vec![], cosa, 2);
        store.store(5, "tu", "D", AttrSet::new(), vec![], tu, 5);
        let cue = FeaturePath(vec![
            label(LabelClass::Category, "D"),
            label(LabelClass::Person, "2p"),
        ]);
        assert_eq!(store.retrieve(&cue, |_| true), Retrieval::Unique(1));
        let bare = FeaturePath(vec![label(LabelClass::Category, "D")]);
        assert_eq!(
            store.retrieve(&bare, |_| true),
            Retrieval::Ambiguous(vec![0, 1])
        );
        assert_eq!(
            store.retrieve(&bare, |item| item.phon == "cosa"),
            Retrieval::Unique(0)
        );
    }

    #[test]
    fn identical_paths_collide_until_a_position_label_separates_them() {
        let feminine = |position: Option<&str>| {
            let source = PathSource {
                position: position.map(str::to_string),
                category: Some("D".to_string()),
                attrs: attrs(&[("gen", Some("fem")), ("num", Some("sg"))]),
            };
            path_of(&source, &FeatureOrder::default())
        };
        let cue = FeaturePath(vec![
            label(LabelClass::Category, "D"),
            label(LabelClass::Number, "sg"),
            label(LabelClass::Gender, "fem"),
        ]);

        let mut store = MoveStore::new(MemoryBackend::Trie);
        store.store(0, "cosa", "D", AttrSet::new(), vec![], feminine(None), 1);
        store.store(1, "casa", "D", AttrSet::new(), vec![], feminine(None), 2);
        assert_eq!(store.retrieve(&cue, |_| true), Retrieval::Ambiguous(vec![0, 1]));

        // The fronted reading gives cosa a position label; the walk now
        // commits to the edge that realizes each cue and neither item
        // shadows the other.
        let mut store = MoveStore::new(MemoryBackend::Trie);
        store.store(0, "cosa", "D", AttrSet::new(), vec![], feminine(Some("F")), 1);
        store.store(1, "casa", "D", AttrSet::new(), vec![], feminine(None), 2);
        let fronted_cue = FeaturePath(vec![
            label(LabelClass::Position, "F"),
            label(LabelClass::Category, "D"),
            label(LabelClass::Number, "sg"),
            label(LabelClass::Gender, "fem"),
        ]);
        assert_eq!(store.retrieve(&fronted_cue, |_| true), Retrieval::Unique(0));
        assert_eq!(store.retrieve(&cue, |_| true), Retrieval::Unique(1));
    }

    #[test]
    fn discharge_removes_items_and_rejects_unknown_ids() {
        let mut store = MoveStore::new(MemoryBackend::Trie);
        let path = subject_path(&[]);
        let receipt = store.store(0, "gianni", "D", AttrSet::new(), vec![], path, 1);
        assert!(!store.is_discharged());
        let item = store.discharge(receipt.id).unwrap();
        assert_eq!(item.phon, "gianni");
        assert!(store.is_discharged());
        assert_eq!(
            store.discharge(receipt.id),
            Err(MemoryError::UnknownItem { id: receipt.id })
        );
    }

    #[test]
    fn scope_accessibility_follows_ancestry() {
        let mut store = ReferentStore::new();
        let outer = store.open_scope(GLOBAL_SCOPE, "outer");
        let inner = store.open_scope(outer, "inner");
        let sibling = store.open_scope(GLOBAL_SCOPE, "sibling");
        let path = subject_path(&[("anim", None)]);
        let global_id = store.register("g", "g", path.clone(), AttrSet::new(), GLOBAL_SCOPE, 0);
        let outer_id = store.register("o", "o", path.clone(), AttrSet::new(), outer, 1);
        let inner_id = store.register("i", "i", path.clone(), AttrSet::new(), inner, 2);

        let seen_from_inner: Vec<u64> =
            store.accessible(inner).iter().map(|r| r.id).collect();
        assert_eq!(seen_from_inner, vec![global_id, outer_id, inner_id]);
        let seen_from_outer: Vec<u64> =
            store.accessible(outer).iter().map(|r| r.id).collect();
        assert_eq!(seen_from_outer, vec![global_id, outer_id]);
        let seen_from_sibling: Vec<u64> =
            store.accessible(sibling).iter().map(|r| r.id).collect();
        assert_eq!(seen_from_sibling, vec![global_id]);

        store.promote_scope(outer);
        let seen_after: Vec<u64> = store.accessible(sibling).iter().map(|r| r.id).collect();
        assert_eq!(seen_after, vec![global_id, outer_id, inner_id]);
    }

    #[test]
    fn matching_honours_topic_and_scope_filters() {
        let mut store = ReferentStore::new();
        let clause = store.open_scope(GLOBAL_SCOPE, "clause");
        let topic_path = subject_path(&[("anim", None)]);
        let plain_source = PathSource {
            position: None,
            category: Some("D".to_string()),
            attrs: attrs(&[("anim", None)]),
        }
        .with_phi_defaults();
        let plain_path = path_of(&plain_source, &FeatureOrder::default());
        let topic_id = store.register("gianni", "gianni", topic_path, AttrSet::new(), clause, 1);
        let plain_id = store.register("mario", "mario", plain_path, AttrSet::new(), clause, 2);
        assert!(store.record(topic_id).unwrap().topic);
        assert!(!store.record(plain_id).unwrap().topic);

        let cue = FeaturePath(vec![
            label(LabelClass::Category, "D"),
            label(LabelClass::Person, "3p"),
        ]);
        let none = BTreeSet::new();
        assert_eq!(
            store.matching(clause, &cue, false, false, &none),
            vec![topic_id, plain_id]
        );
        assert_eq!(
            store.matching(clause, &cue, true, false, &none),
            vec![topic_id]
        );
        let excluded: BTreeSet<u64> = [topic_id].into_iter().collect();
        assert_eq!(
            store.matching(clause, &cue, false, false, &excluded),
            vec![plain_id]
        );
        let other = store.open_scope(GLOBAL_SCOPE, "other");
        assert!(store.matching(other, &cue, false, true, &none).is_empty());
    }

    #[test]
    fn redundancy_needs_same_path_and_surface() {
        let mut store = ReferentStore::new();
        let clause = store.open_scope(GLOBAL_SCOPE, "clause");
        let path = subject_path(&[("anim", None)]);
        store.register("gianni", "gianni", path.clone(), AttrSet::new(), clause, 1);
        assert!(store.redundant_with(clause, &path, "gianni").is_some());
        assert!(store.redundant_with(clause, &path, "mario").is_none());
        let other = store.open_scope(GLOBAL_SCOPE, "other");
        assert!(store.redundant_with(other, &path, "gianni").is_none());
    }

    #[test]
    fn retrieval_counts_accumulate() {
        let mut store = ReferentStore::new();
        let path = subject_path(&[]);
        let id = store.register("pro", "pro", path, AttrSet::new(), GLOBAL_SCOPE, 1);
        store.note_retrieval(id).unwrap();
        store.note_retrieval(id).unwrap();
        assert_eq!(store.record(id).unwrap().retrievals, 2);
        assert!(matches!(
            store.note_retrieval(99),
            Err(MemoryError::UnknownItem { id: 99 })
        ));
    }
}
