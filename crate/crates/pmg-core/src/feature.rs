//! Feature bundles, unification, and feature paths.
//!
//! A lexical item is an ordered list of feature terms: category features
//! first (each optionally constrained by attribute:value pairs, and
//! optionally marked skippable with parentheses), then select features.
//! Unification over attribute sets is union-with-agreement: an attribute
//! absent from one side is unconstrained, a shared attribute must agree on
//! its value.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Broad behavioural class of a grammar category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CategoryClass {
    /// Opens a phase (derivational memory domain) and licenses a root.
    PhaseEdge,
    /// Functional spine category.
    Functional,
    /// Terminal category with no category-level select.
    Lexical,
}

/// A declared category: name, class, and the category it selects (if any).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    pub name: String,
    pub class: CategoryClass,
    pub selects: Option<String>,
}

/// Table of declared categories, keyed by name.
pub type Categories = BTreeMap<String, Category>;

/// Attribute set: attribute name to optional value. A `None` value is a
/// bare presence flag (e.g. `anim`), which unifies with any value.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct AttrSet(BTreeMap<String, Option<String>>);

/// Unification failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UnifyError {
    #[error("attribute {attribute} has conflicting values {left} and {right}")]
    ValueClash {
        attribute: String,
        left: String,
        right: String,
    },
    #[error("category {found} does not match expected {expected}")]
    CategoryMismatch { expected: String, found: String },
    #[error("no category feature of {phon} matches the expectation")]
    NoPrefix { phon: String },
}

impl AttrSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, attribute: impl Into<String>, value: Option<String>) {
        self.0.insert(attribute.into(), value);
    }

    pub fn get(&self, attribute: &str) -> Option<&Option<String>> {
        self.0.get(attribute)
    }

    pub fn contains(&self, attribute: &str) -> bool {
        self.0.contains_key(attribute)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Option<String>)> {
        self.0.iter()
    }

    /// Union-with-agreement. Shared attributes must agree on value; a bare
    /// flag agrees with anything and the valued side wins; an attribute on
    /// only one side passes through unconstrained.
    pub fn unify(&self, other: &AttrSet) -> Result<AttrSet, UnifyError> {
        let mut merged = self.0.clone();
        for (attribute, value) in &other.0 {
            match merged.get_mut(attribute) {
                None => {
                    merged.insert(attribute.clone(), value.clone());
                }
                Some(existing) => match (existing.as_ref(), value.as_ref()) {
                    (Some(left), Some(right)) if left != right => {
                        return Err(UnifyError::ValueClash {
                            attribute: attribute.clone(),
                            left: left.clone(),
                            right: right.clone(),
                        });
                    }
                    (None, Some(_)) => *existing = value.clone(),
                    _ => {}
                },
            }
        }
        Ok(AttrSet(merged))
    }

    /// The subset of attributes that belong to a phi path class
    /// (person, number, gender, animacy). Case and unclassified
    /// attributes such as `reflex` are dropped.
    pub fn phi_only(&self) -> AttrSet {
        let phi = self
            .0
            .iter()
            .filter(|(name, _)| {
                matches!(
                    attribute_class(name),
                    Some(
                        LabelClass::Person
                            | LabelClass::Number
                            | LabelClass::Gender
                            | LabelClass::Animacy
                    )
                )
            })
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        AttrSet(phi)
    }
}

impl fmt::Display for AttrSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (attribute, value) in &self.0 {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            match value {
                Some(v) => write!(f, "{attribute}:{v}")?,
                None => write!(f, "{attribute}")?,
            }
        }
        Ok(())
    }
}

impl FromIterator<(String, Option<String>)> for AttrSet {
    fn from_iter<T: IntoIterator<Item = (String, Option<String>)>>(iter: T) -> Self {
        AttrSet(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    CategoryFeature,
    SelectFeature,
}

/// One feature term of a lexical entry: a category feature (possibly
/// optional) or a select feature, with attribute constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureTerm {
    pub kind: TermKind,
    pub category: String,
    pub constraints: AttrSet,
    pub optional: bool,
}

impl FeatureTerm {
    pub fn category(name: impl Into<String>) -> Self {
        FeatureTerm {
            kind: TermKind::CategoryFeature,
            category: name.into(),
            constraints: AttrSet::new(),
            optional: false,
        }
    }

    pub fn select(name: impl Into<String>) -> Self {
        FeatureTerm {
            kind: TermKind::SelectFeature,
            category: name.into(),
            constraints: AttrSet::new(),
            optional: false,
        }
    }

    pub fn with_attr(mut self, attribute: &str, value: Option<&str>) -> Self {
        self.constraints
            .insert(attribute, value.map(|v| v.to_string()));
        self
    }

    pub fn optional(mut self) -> Self {
        self.optional = true;
        self
    }
}

impl fmt::Display for FeatureTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut body = self.category.clone();
        if !self.constraints.is_empty() {
            body.push(':');
            body.push_str(&self.constraints.to_string());
        }
        match (self.kind, self.optional) {
            (TermKind::SelectFeature, _) => write!(f, "={body}"),
            (TermKind::CategoryFeature, true) => write!(f, "({body})"),
            (TermKind::CategoryFeature, false) => write!(f, "{body}"),
        }
    }
}

/// Unify an expectation term with an entry edge term: category names must
/// match, constraints unify.
pub fn unify_terms(expected: &FeatureTerm, edge: &FeatureTerm) -> Result<AttrSet, UnifyError> {
    if expected.category != edge.category {
        return Err(UnifyError::CategoryMismatch {
            expected: expected.category.clone(),
            found: edge.category.clone(),
        });
    }
    expected.constraints.unify(&edge.constraints)
}

/// A lexical entry. `phon` is the pronounced form (also the name of covert
/// entries, which are never pronounced); `sem` is an opaque identifier
/// unique within a lexicon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexicalEntry {
    pub phon: String,
    pub sem: String,
    pub features: Vec<FeatureTerm>,
    pub covert: bool,
    pub proclitic: bool,
}

impl LexicalEntry {
    pub fn category_features(&self) -> impl Iterator<Item = &FeatureTerm> {
        self.features
            .iter()
            .filter(|t| t.kind == TermKind::CategoryFeature)
    }

    pub fn select_features(&self) -> impl Iterator<Item = &FeatureTerm> {
        self.features
            .iter()
            .filter(|t| t.kind == TermKind::SelectFeature)
    }

    /// Whether the entry carries a category feature with the given name.
    pub fn has_category(&self, name: &str) -> bool {
        self.category_features().any(|t| t.category == name)
    }
}

/// The edge of an entry: its left-most feature. An optional first feature
/// is still the edge; skipping happens during merge, not here.
pub fn edge_of_entry(entry: &LexicalEntry) -> Option<&FeatureTerm> {
    entry.features.first()
}

/// Result of matching an entry against an expectation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitOutcome {
    /// Matched prefix: the expected category plus any category features
    /// consumed along the category select chain.
    pub consumed: Vec<FeatureTerm>,
    /// Remaining category features. These are unexpected at the merge site
    /// and must be moved into memory.
    pub unexpected: Vec<FeatureTerm>,
    /// Optional features skipped before the edge was found (inactive).
    pub skipped: Vec<FeatureTerm>,
    /// Unified constraints of the expectation and every consumed feature.
    pub node_attrs: AttrSet,
}

impl SplitOutcome {
    /// First consumed category that belongs to the order's position class.
    pub fn position(&self, order: &FeatureOrder) -> Option<String> {
        self.consumed
            .iter()
            .map(|t| t.category.clone())
            .find(|c| order.position_categories.contains(c))
    }

    /// Pooled constraints of the unexpected remainder.
    pub fn unexpected_attrs(&self) -> AttrSet {
        let mut attrs = AttrSet::new();
        for term in &self.unexpected {
            // validated bundles never clash with themselves
            attrs = attrs.unify(&term.constraints).expect("entry bundle is consistent");
        }
        attrs
    }
}

/// Split an entry against an expectation: find the edge (skipping optional
/// features that fail to unify), then consume the longest prefix that
/// follows the category select chain. Whatever category features remain are
/// unexpected.
pub fn split_consumed_unexpected(
    entry: &LexicalEntry,
    expected: &FeatureTerm,
    categories: &Categories,
) -> Result<SplitOutcome, UnifyError> {
    let features: Vec<&FeatureTerm> = entry.category_features().collect();
    let mut skipped = Vec::new();
    let mut edge_index = None;
    let mut node_attrs = AttrSet::new();
    for (i, term) in features.iter().enumerate() {
        match unify_terms(expected, term) {
            Ok(attrs) => {
                edge_index = Some(i);
                node_attrs = attrs;
                break;
            }
            Err(err) => {
                if term.optional {
                    skipped.push((*term).clone());
                } else {
                    return Err(match err {
                        UnifyError::CategoryMismatch { .. } => UnifyError::NoPrefix {
                            phon: entry.phon.clone(),
                        },
                        other => other,
                    });
                }
            }
        }
    }
    let Some(edge_index) = edge_index else {
        return Err(UnifyError::NoPrefix {
            phon: entry.phon.clone(),
        });
    };

    let mut consumed = vec![features[edge_index].clone()];
    let mut next = edge_index + 1;
    while next < features.len() {
        let tail = features[next];
        let selected = categories
            .get(&consumed.last().expect("nonempty").category)
            .and_then(|c| c.selects.as_deref());
        if selected == Some(tail.category.as_str()) {
            node_attrs = node_attrs.unify(&tail.constraints)?;
            consumed.push(tail.clone());
            next += 1;
        } else {
            break;
        }
    }
    let unexpected = features[next..].iter().map(|t| (*t).clone()).collect();
    Ok(SplitOutcome {
        consumed,
        unexpected,
        skipped,
        node_attrs,
    })
}

/// Label classes, in the order they may appear along a feature path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LabelClass {
    Position,
    Category,
    Person,
    Number,
    Gender,
    Animacy,
    Case,
}

/// Map an attribute name onto its path label class.
pub fn attribute_class(attribute: &str) -> Option<LabelClass> {
    match attribute {
        "pers" => Some(LabelClass::Person),
        "num" => Some(LabelClass::Number),
        "gen" => Some(LabelClass::Gender),
        "anim" => Some(LabelClass::Animacy),
        "case" => Some(LabelClass::Case),
        _ => None,
    }
}

/// Path label ordering plus the set of categories that act as position
/// labels when consumed at merge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureOrder {
    pub classes: Vec<LabelClass>,
    pub position_categories: BTreeSet<String>,
}

impl Default for FeatureOrder {
    fn default() -> Self {
        FeatureOrder {
            classes: vec![
                LabelClass::Position,
                LabelClass::Category,
                LabelClass::Person,
                LabelClass::Number,
                LabelClass::Gender,
                LabelClass::Animacy,
                LabelClass::Case,
            ],
            position_categories: ["S", "F"].iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl FeatureOrder {
    pub fn rank(&self, class: LabelClass) -> Option<usize> {
        self.classes.iter().position(|c| *c == class)
    }
}

/// One node label along a feature path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PathLabel {
    pub class: LabelClass,
    pub text: String,
}

impl fmt::Display for PathLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.text)
    }
}

/// A root-to-leaf path of labels, ordered by label class.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct FeaturePath(pub Vec<PathLabel>);

impl FeaturePath {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[PathLabel] {
        &self.0
    }

    pub fn shared_prefix_len(&self, other: &FeaturePath) -> usize {
        self.0
            .iter()
            .zip(other.0.iter())
            .take_while(|(a, b)| a == b)
            .count()
    }
}

impl fmt::Display for FeaturePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "(root)");
        }
        let parts: Vec<&str> = self.0.iter().map(|l| l.text.as_str()).collect();
        write!(f, "{}", parts.join("-"))
    }
}

/// Ingredients of a feature path: position flag, category label, and
/// attribute values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathSource {
    pub position: Option<String>,
    pub category: Option<String>,
    pub attrs: AttrSet,
}

impl PathSource {
    /// Fill unvalued person/number with their defaults (3rd person,
    /// singular). Used when storing fully specified referential items;
    /// underspecified postulated items are stored raw.
    pub fn with_phi_defaults(mut self) -> Self {
        if !self.attrs.contains("pers") {
            self.attrs.insert("pers", Some("3".to_string()));
        }
        if !self.attrs.contains("num") {
            self.attrs.insert("num", Some("sg".to_string()));
        }
        self
    }
}

fn attribute_label(attribute: &str, value: &Option<String>, class: LabelClass) -> PathLabel {
    let text = match (class, value) {
        (LabelClass::Person, Some(v)) => format!("{v}p"),
        (_, Some(v)) => v.clone(),
        (_, None) => attribute.to_string(),
    };
    PathLabel { class, text }
}

/// Build a feature path: emit the position label (if any), the category
/// label (if any), then one label per classed attribute, all in the
/// configured class order. Unclassified attributes are not path material.
pub fn path_of(source: &PathSource, order: &FeatureOrder) -> FeaturePath {
    let mut labels: Vec<PathLabel> = Vec::new();
    if let Some(position) = &source.position {
        labels.push(PathLabel {
            class: LabelClass::Position,
            text: position.clone(),
        });
    }
    if let Some(category) = &source.category {
        labels.push(PathLabel {
            class: LabelClass::Category,
            text: category.clone(),
        });
    }
    for (attribute, value) in source.attrs.iter() {
        if let Some(class) = attribute_class(attribute) {
            labels.push(attribute_label(attribute, value, class));
        }
    }
    labels.sort_by_key(|label| order.rank(label.class).unwrap_or(usize::MAX));
    labels.retain(|label| order.rank(label.class).is_some());
    FeaturePath(labels)
}
