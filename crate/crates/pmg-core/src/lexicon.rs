//! Grammar file format: category declarations, lexical items, roots.
//!
//! The format is line oriented. `#` starts a comment. Directives:
//!
//! ```text
//! category <phase-edge|functional|lexical> <Name> [selects <Name>]
//! item "<phon>" : <feature tokens> [covert] [proclitic]
//! roots <Name> ...
//! order <class> ...
//! positions <Name> ...
//! ```
//!
//! Feature tokens, left to right: `(Name)` is an optional category feature,
//! a declared category name is a category feature, `=Name[:attr[:v][,..]]`
//! is a select feature, and anything else is an attribute (`attr` or
//! `attr:value`) attaching to the nearest category feature on its left.
//! Attributes written before the first category feature attach to it.

use std::collections::BTreeMap;
use std::path::Path;

use crate::feature::{
    split_consumed_unexpected, AttrSet, Categories, Category, CategoryClass, FeatureOrder,
    FeatureTerm, LabelClass, LexicalEntry, TermKind,
};

/// Grammar file problems, with 1-based line numbers.
#[derive(Debug, thiserror::Error)]
pub enum GrammarError {
    #[error("cannot read grammar: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: unknown directive {word}")]
    UnknownDirective { line: usize, word: String },
    #[error("line {line}: unknown category class {word}")]
    UnknownCategoryClass { line: usize, word: String },
    #[error("line {line}: category {name} is already declared")]
    DuplicateCategory { line: usize, name: String },
    #[error("line {line}: category {name} is not declared")]
    UndeclaredCategory { line: usize, name: String },
    #[error("line {line}: category {name} must select a category")]
    MissingSelect { line: usize, name: String },
    #[error("line {line}: lexical category {name} cannot select")]
    UnexpectedSelect { line: usize, name: String },
    #[error("line {line}: root {name} is not a phase edge")]
    RootNotPhaseEdge { line: usize, name: String },
    #[error("line {line}: item phon must not be empty")]
    EmptyPhon { line: usize },
    #[error("line {line}: malformed item: {reason}")]
    MalformedItem { line: usize, reason: String },
    #[error("line {line}: bad order line: {reason}")]
    BadOrder { line: usize, reason: String },
}

/// A parsed grammar: categories, items in declaration order, root
/// categories, and the path label order.
#[derive(Debug, Clone)]
pub struct Lexicon {
    pub categories: Categories,
    pub category_order: Vec<String>,
    pub entries: Vec<LexicalEntry>,
    pub roots: Vec<String>,
    pub order: FeatureOrder,
    pub warnings: Vec<String>,
}

const FIXTURE: &str = include_str!("../grammars/fixture.pmg");
const BASE: &str = include_str!("../grammars/base.pmg");

struct LineCtx<'a> {
    number: usize,
    rest: &'a str,
}

impl Lexicon {
    /// The extended toy grammar the test suite and CLI default to.
    pub fn fixture() -> Lexicon {
        Lexicon::parse(FIXTURE).expect("embedded fixture grammar parses")
    }

    /// The minimal toy grammar (no clitic object, single transitive frame).
    pub fn base_grammar() -> Lexicon {
        Lexicon::parse(BASE).expect("embedded base grammar parses")
    }

    pub fn from_file(path: &Path) -> Result<Lexicon, GrammarError> {
        let text = std::fs::read_to_string(path)?;
        Lexicon::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Lexicon, GrammarError> {
        let mut parser = Parser::default();
        for (index, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let number = index + 1;
            let (word, rest) = split_word(line);
            let ctx = LineCtx { number, rest };
            match word {
                "category" => parser.category_line(ctx)?,
                "item" => parser.item_line(ctx)?,
                "roots" => parser.roots_line(ctx)?,
                "order" => parser.order_line(ctx)?,
                "positions" => parser.positions_line(ctx)?,
                other => {
                    return Err(GrammarError::UnknownDirective {
                        line: number,
                        word: other.to_string(),
                    })
                }
            }
        }
        parser.finish()
    }

    pub fn entry(&self, index: usize) -> &LexicalEntry {
        &self.entries[index]
    }

    /// Indices of entries whose feature edge can satisfy the expectation,
    /// in declaration order. Optional leading features may be skipped.
    pub fn candidates_for(&self, expected: &FeatureTerm) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, entry)| {
                split_consumed_unexpected(entry, expected, &self.categories).is_ok()
            })
            .map(|(index, _)| index)
            .collect()
    }

    /// Overt entries pronounced as `phon` (case folded). Covert entries
    /// never appear in an input token stream.
    pub fn lookup_by_phon(&self, phon: &str) -> Vec<usize> {
        let folded = phon.to_lowercase();
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, entry)| !entry.covert && entry.phon.to_lowercase() == folded)
            .map(|(index, _)| index)
            .collect()
    }

    /// All entries named `phon` (case folded), covert included. Used to
    /// resolve scripted generation choices.
    pub fn entries_named(&self, phon: &str) -> Vec<usize> {
        let folded = phon.to_lowercase();
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, entry)| entry.phon.to_lowercase() == folded)
            .map(|(index, _)| index)
            .collect()
    }

    /// Category under which `entry` introduces a discourse referent: a
    /// phase-edge category feature whose declared select is a lexical
    /// category the entry also carries. Non-nominal items have none.
    pub fn referent_category(&self, entry: &LexicalEntry) -> Option<String> {
        entry.category_features().find_map(|term| {
            let category = self.categories.get(&term.category)?;
            if category.class != CategoryClass::PhaseEdge {
                return None;
            }
            let target = category.selects.as_ref()?;
            let target_is_lexical = self
                .categories
                .get(target)
                .map(|c| c.class == CategoryClass::Lexical)
                .unwrap_or(false);
            if target_is_lexical && entry.has_category(target) {
                Some(term.category.clone())
            } else {
                None
            }
        })
    }

    /// Canonical text form. Parsing the output reproduces the lexicon.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for name in &self.category_order {
            let category = &self.categories[name];
            let class = match category.class {
                CategoryClass::PhaseEdge => "phase-edge",
                CategoryClass::Functional => "functional",
                CategoryClass::Lexical => "lexical",
            };
            out.push_str(&format!("category {class} {name}"));
            if let Some(selected) = &category.selects {
                out.push_str(&format!(" selects {selected}"));
            }
            out.push('\n');
        }
        out.push('\n');
        for entry in &self.entries {
            out.push_str(&format!("item \"{}\" :", entry.phon));
            for term in &entry.features {
                match term.kind {
                    TermKind::CategoryFeature => {
                        if term.optional {
                            out.push_str(&format!(" ({})", term.category));
                        } else {
                            out.push_str(&format!(" {}", term.category));
                        }
                        for (attribute, value) in term.constraints.iter() {
                            match value {
                                Some(v) => out.push_str(&format!(" {attribute}:{v}")),
                                None => out.push_str(&format!(" {attribute}")),
                            }
                        }
                    }
                    TermKind::SelectFeature => {
                        out.push_str(&format!(" ={}", term.category));
                        if !term.constraints.is_empty() {
                            out.push_str(&format!(":{}", term.constraints));
                        }
                    }
                }
            }
            if entry.covert {
                out.push_str(" covert");
            }
            if entry.proclitic {
                out.push_str(" proclitic");
            }
            out.push('\n');
        }
        out.push('\n');
        out.push_str(&format!("roots {}\n", self.roots.join(" ")));
        let default_order = FeatureOrder::default();
        if self.order.classes != default_order.classes {
            let words: Vec<&str> = self.order.classes.iter().map(|c| class_word(*c)).collect();
            out.push_str(&format!("order {}\n", words.join(" ")));
        }
        let default_positions = default_position_set(&self.categories);
        if self.order.position_categories != default_positions {
            let names: Vec<String> = self.order.position_categories.iter().cloned().collect();
            out.push_str(&format!("positions {}\n", names.join(" ")));
        }
        out
    }
}

fn split_word(line: &str) -> (&str, &str) {
    match line.split_once(char::is_whitespace) {
        Some((word, rest)) => (word, rest.trim()),
        None => (line, ""),
    }
}

fn class_word(class: LabelClass) -> &'static str {
    match class {
        LabelClass::Position => "position",
        LabelClass::Category => "category",
        LabelClass::Person => "person",
        LabelClass::Number => "number",
        LabelClass::Gender => "gender",
        LabelClass::Animacy => "animacy",
        LabelClass::Case => "case",
    }
}

fn word_class(word: &str) -> Option<LabelClass> {
    Some(match word {
        "position" => LabelClass::Position,
        "category" => LabelClass::Category,
        "person" => LabelClass::Person,
        "number" => LabelClass::Number,
        "gender" => LabelClass::Gender,
        "animacy" => LabelClass::Animacy,
        "case" => LabelClass::Case,
        _ => return None,
    })
}

/// Positions default to the declared categories named S or F.
fn default_position_set(categories: &Categories) -> std::collections::BTreeSet<String> {
    ["S", "F"]
        .iter()
        .filter(|name| categories.contains_key(**name))
        .map(|name| name.to_string())
        .collect()
}

#[derive(Default)]
struct Parser {
    categories: Categories,
    category_order: Vec<String>,
    category_lines: BTreeMap<String, usize>,
    entries: Vec<LexicalEntry>,
    roots: Option<(usize, Vec<String>)>,
    order_classes: Option<Vec<LabelClass>>,
    positions: Option<(usize, Vec<String>)>,
    warnings: Vec<String>,
}

impl Parser {
    fn category_line(&mut self, ctx: LineCtx) -> Result<(), GrammarError> {
        let words: Vec<&str> = ctx.rest.split_whitespace().collect();
        let (class_word, name, selects) = match words.as_slice() {
            [class, name] => (*class, *name, None),
            [class, name, "selects", target] => (*class, *name, Some(target.to_string())),
            _ => {
                return Err(GrammarError::UnknownDirective {
                    line: ctx.number,
                    word: format!("category {}", ctx.rest),
                })
            }
        };
        let class = match class_word {
            "phase-edge" => CategoryClass::PhaseEdge,
            "functional" => CategoryClass::Functional,
            "lexical" => CategoryClass::Lexical,
            other => {
                return Err(GrammarError::UnknownCategoryClass {
                    line: ctx.number,
                    word: other.to_string(),
                })
            }
        };
        if self.categories.contains_key(name) {
            return Err(GrammarError::DuplicateCategory {
                line: ctx.number,
                name: name.to_string(),
            });
        }
        match (class, &selects) {
            (CategoryClass::Lexical, Some(_)) => {
                return Err(GrammarError::UnexpectedSelect {
                    line: ctx.number,
                    name: name.to_string(),
                })
            }
            (CategoryClass::PhaseEdge | CategoryClass::Functional, None) => {
                return Err(GrammarError::MissingSelect {
                    line: ctx.number,
                    name: name.to_string(),
                })
            }
            _ => {}
        }
        self.categories.insert(
            name.to_string(),
            Category {
                name: name.to_string(),
                class,
                selects,
            },
        );
        self.category_order.push(name.to_string());
        self.category_lines.insert(name.to_string(), ctx.number);
        Ok(())
    }

    fn item_line(&mut self, ctx: LineCtx) -> Result<(), GrammarError> {
        let malformed = |reason: &str| GrammarError::MalformedItem {
            line: ctx.number,
            reason: reason.to_string(),
        };
        let rest = ctx.rest.trim();
        let Some(rest) = rest.strip_prefix('"') else {
            return Err(malformed("expected quoted phon"));
        };
        let Some((phon, after)) = rest.split_once('"') else {
            return Err(malformed("unterminated phon quote"));
        };
        if phon.trim().is_empty() {
            return Err(GrammarError::EmptyPhon { line: ctx.number });
        }
        let after = after.trim();
        let Some(body) = after.strip_prefix(':') else {
            return Err(malformed("expected : after phon"));
        };
        let mut tokens: Vec<&str> = body.split_whitespace().collect();
        let mut covert = false;
        let mut proclitic = false;
        loop {
            match tokens.last() {
                Some(&"covert") if !covert => {
                    covert = true;
                    tokens.pop();
                }
                Some(&"proclitic") if !proclitic => {
                    proclitic = true;
                    tokens.pop();
                }
                _ => break,
            }
        }
        if tokens.is_empty() {
            return Err(malformed("item has no features"));
        }

        let mut features: Vec<FeatureTerm> = Vec::new();
        let mut leading_attrs: Vec<(String, Option<String>)> = Vec::new();
        let mut seen_select = false;
        let mut seen_category = false;
        for token in tokens {
            if let Some(select_body) = token.strip_prefix('=') {
                let (category, constraint_text) = match select_body.split_once(':') {
                    Some((category, rest)) => (category, Some(rest)),
                    None => (select_body, None),
                };
                if !self.categories.contains_key(category) {
                    return Err(GrammarError::UndeclaredCategory {
                        line: ctx.number,
                        name: category.to_string(),
                    });
                }
                let mut constraints = AttrSet::new();
                if let Some(text) = constraint_text {
                    for piece in text.split(',') {
                        let (attribute, value) = match piece.split_once(':') {
                            Some((attribute, value)) => (attribute, Some(value.to_string())),
                            None => (piece, None),
                        };
                        if attribute.is_empty() {
                            return Err(malformed("empty attribute in select constraint"));
                        }
                        if constraints.contains(attribute) {
                            return Err(malformed("duplicate attribute in select constraint"));
                        }
                        constraints.insert(attribute, value);
                    }
                }
                features.push(FeatureTerm {
                    kind: TermKind::SelectFeature,
                    category: category.to_string(),
                    constraints,
                    optional: false,
                });
                seen_select = true;
                continue;
            }
            let (name, optional) = match token.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
                Some(inner) => (inner, true),
                None => (token, false),
            };
            if self.categories.contains_key(name) {
                if seen_select {
                    return Err(malformed("category feature after select feature"));
                }
                let mut constraints = AttrSet::new();
                if !seen_category {
                    for (attribute, value) in leading_attrs.drain(..) {
                        constraints.insert(attribute, value);
                    }
                }
                features.push(FeatureTerm {
                    kind: TermKind::CategoryFeature,
                    category: name.to_string(),
                    constraints,
                    optional,
                });
                seen_category = true;
                continue;
            }
            if optional {
                return Err(GrammarError::UndeclaredCategory {
                    line: ctx.number,
                    name: name.to_string(),
                });
            }
            // attribute token
            let (attribute, value) = match token.split_once(':') {
                Some((attribute, value)) => (attribute, Some(value.to_string())),
                None => (token, None),
            };
            if attribute.is_empty() {
                return Err(malformed("empty attribute name"));
            }
            if seen_select {
                return Err(malformed("attribute after select feature"));
            }
            match features.last_mut() {
                Some(term) if term.kind == TermKind::CategoryFeature => {
                    if term.constraints.contains(attribute) {
                        return Err(malformed("duplicate attribute on category feature"));
                    }
                    term.constraints.insert(attribute, value);
                }
                _ => leading_attrs.push((attribute.to_string(), value)),
            }
        }
        if !seen_category {
            return Err(malformed("item has no category feature"));
        }

        let same_phon = self
            .entries
            .iter()
            .filter(|e| e.phon == phon)
            .count();
        let sem = if same_phon == 0 {
            phon.to_string()
        } else {
            format!("{phon}#{same_phon}")
        };
        let entry = LexicalEntry {
            phon: phon.to_string(),
            sem,
            features,
            covert,
            proclitic,
        };
        if self
            .entries
            .iter()
            .any(|e| e.phon == entry.phon && e.features == entry.features
                && e.covert == entry.covert && e.proclitic == entry.proclitic)
        {
            self.warnings.push(format!(
                "line {}: item \"{}\" duplicates an earlier identical item",
                ctx.number, phon
            ));
        }
        self.entries.push(entry);
        Ok(())
    }

    fn roots_line(&mut self, ctx: LineCtx) -> Result<(), GrammarError> {
        let names: Vec<String> = ctx.rest.split_whitespace().map(str::to_string).collect();
        if names.is_empty() {
            return Err(GrammarError::UnknownDirective {
                line: ctx.number,
                word: "roots".to_string(),
            });
        }
        self.roots = Some((ctx.number, names));
        Ok(())
    }

    fn order_line(&mut self, ctx: LineCtx) -> Result<(), GrammarError> {
        let mut classes = Vec::new();
        for word in ctx.rest.split_whitespace() {
            let Some(class) = word_class(word) else {
                return Err(GrammarError::BadOrder {
                    line: ctx.number,
                    reason: format!("unknown label class {word}"),
                });
            };
            if classes.contains(&class) {
                return Err(GrammarError::BadOrder {
                    line: ctx.number,
                    reason: format!("label class {word} listed twice"),
                });
            }
            classes.push(class);
        }
        if classes.len() != 7 {
            return Err(GrammarError::BadOrder {
                line: ctx.number,
                reason: "order must list all seven label classes".to_string(),
            });
        }
        self.order_classes = Some(classes);
        Ok(())
    }

    fn positions_line(&mut self, ctx: LineCtx) -> Result<(), GrammarError> {
        let names: Vec<String> = ctx.rest.split_whitespace().map(str::to_string).collect();
        self.positions = Some((ctx.number, names));
        Ok(())
    }

    fn finish(self) -> Result<Lexicon, GrammarError> {
        for name in &self.category_order {
            let category = &self.categories[name];
            if let Some(target) = &category.selects {
                if !self.categories.contains_key(target) {
                    return Err(GrammarError::UndeclaredCategory {
                        line: self.category_lines[name],
                        name: target.clone(),
                    });
                }
            }
        }

        let roots = match self.roots {
            Some((line, names)) => {
                for name in &names {
                    match self.categories.get(name) {
                        None => {
                            return Err(GrammarError::UndeclaredCategory {
                                line,
                                name: name.clone(),
                            })
                        }
                        Some(category) if category.class != CategoryClass::PhaseEdge => {
                            return Err(GrammarError::RootNotPhaseEdge {
                                line,
                                name: name.clone(),
                            })
                        }
                        Some(_) => {}
                    }
                }
                names
            }
            None => self
                .category_order
                .iter()
                .filter(|name| self.categories[*name].class == CategoryClass::PhaseEdge)
                .cloned()
                .collect(),
        };

        let position_categories = match self.positions {
            Some((line, names)) => {
                for name in &names {
                    if !self.categories.contains_key(name) {
                        return Err(GrammarError::UndeclaredCategory {
                            line,
                            name: name.clone(),
                        });
                    }
                }
                names.into_iter().collect()
            }
            None => default_position_set(&self.categories),
        };
        let order = FeatureOrder {
            classes: self
                .order_classes
                .unwrap_or_else(|| FeatureOrder::default().classes),
            position_categories,
        };

        Ok(Lexicon {
            categories: self.categories,
            category_order: self.category_order,
            entries: self.entries,
            roots,
            order,
            warnings: self.warnings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::FeatureTerm;

    fn phons(lexicon: &Lexicon, indices: &[usize]) -> Vec<String> {
        indices.iter().map(|i| lexicon.entries[*i].phon.clone()).collect()
    }

    #[test]
    fn fixture_grammar_shape() {
        let lexicon = Lexicon::fixture();
        assert_eq!(lexicon.categories.len(), 7);
        assert_eq!(lexicon.entries.len(), 15);
        assert_eq!(lexicon.roots, vec!["C", "F", "D"]);
        assert!(lexicon.warnings.is_empty());
        let lava: Vec<usize> = lexicon.entries_named("lava");
        assert_eq!(lava.len(), 2);
        assert_eq!(lexicon.entries[lava[0]].sem, "lava");
        assert_eq!(lexicon.entries[lava[1]].sem, "lava#1");
    }

    #[test]
    fn base_grammar_shape() {
        let lexicon = Lexicon::base_grammar();
        assert_eq!(lexicon.entries.len(), 11);
        // no roots line: defaults to phase edges in declaration order
        assert_eq!(lexicon.roots, vec!["C", "F", "D"]);
    }

    #[test]
    fn candidate_sets_match_edges() {
        let lexicon = Lexicon::fixture();
        let for_c = lexicon.candidates_for(&FeatureTerm::category("C"));
        assert_eq!(phons(&lexicon, &for_c), vec!["che", "poi"]);
        let for_f = lexicon.candidates_for(&FeatureTerm::category("F"));
        assert_eq!(phons(&lexicon, &for_f), vec!["cosa"]);
        let strict_v = FeatureTerm::category("V").with_attr("pers", Some("9"));
        assert!(lexicon.candidates_for(&strict_v).is_empty());
    }

    #[test]
    fn accusative_expectation_excludes_nominative_items() {
        let lexicon = Lexicon::fixture();
        let expected = FeatureTerm::category("D").with_attr("case", Some("acc"));
        let found = lexicon.candidates_for(&expected);
        assert_eq!(phons(&lexicon, &found), vec!["gianni", "mario", "si", "lo"]);
    }

    #[test]
    fn subject_expectation_reaches_optional_edges() {
        let lexicon = Lexicon::fixture();
        let found = lexicon.candidates_for(&FeatureTerm::category("S"));
        assert_eq!(
            phons(&lexicon, &found),
            vec!["gianni", "mario", "io", "tu", "pro"]
        );
    }

    #[test]
    fn phon_lookup_folds_case_and_hides_covert_items() {
        let lexicon = Lexicon::fixture();
        assert_eq!(phons(&lexicon, &lexicon.lookup_by_phon("Gianni")), vec!["gianni"]);
        assert!(lexicon.lookup_by_phon("io").is_empty());
        assert_eq!(phons(&lexicon, &lexicon.entries_named("IO")), vec!["io"]);
    }

    #[test]
    fn serialize_round_trips() {
        for lexicon in [Lexicon::fixture(), Lexicon::base_grammar()] {
            let text = lexicon.serialize();
            let reparsed = Lexicon::parse(&text).unwrap();
            assert_eq!(reparsed.categories, lexicon.categories);
            assert_eq!(reparsed.entries, lexicon.entries);
            assert_eq!(reparsed.roots, lexicon.roots);
            assert_eq!(reparsed.order, lexicon.order);
            assert_eq!(reparsed.serialize(), text);
        }
    }

    #[test]
    fn rejects_malformed_grammars() {
        let dup = "category lexical N\ncategory lexical N\n";
        assert!(matches!(
            Lexicon::parse(dup),
            Err(GrammarError::DuplicateCategory { line: 2, .. })
        ));

        let undeclared = "category lexical N\nitem \"x\" : N =Q\n";
        assert!(matches!(
            Lexicon::parse(undeclared),
            Err(GrammarError::UndeclaredCategory { line: 2, .. })
        ));

        let dangling = "category phase-edge D selects N\n";
        assert!(matches!(
            Lexicon::parse(dangling),
            Err(GrammarError::UndeclaredCategory { line: 1, .. })
        ));

        let no_select = "category functional S\n";
        assert!(matches!(
            Lexicon::parse(no_select),
            Err(GrammarError::MissingSelect { line: 1, .. })
        ));

        let lexical_select = "category lexical N selects N\n";
        assert!(matches!(
            Lexicon::parse(lexical_select),
            Err(GrammarError::UnexpectedSelect { line: 1, .. })
        ));

        let bad_root = "category lexical N\nroots N\n";
        assert!(matches!(
            Lexicon::parse(bad_root),
            Err(GrammarError::RootNotPhaseEdge { line: 2, .. })
        ));

        let empty_phon = "category lexical N\nitem \"\" : N\n";
        assert!(matches!(
            Lexicon::parse(empty_phon),
            Err(GrammarError::EmptyPhon { line: 2 })
        ));

        let attrs_only = "category lexical N\nitem \"x\" : pers:2\n";
        assert!(matches!(
            Lexicon::parse(attrs_only),
            Err(GrammarError::MalformedItem { line: 2, .. })
        ));

        let cat_after_select = "category lexical N\nitem \"x\" : N =N N\n";
        assert!(matches!(
            Lexicon::parse(cat_after_select),
            Err(GrammarError::MalformedItem { line: 2, .. })
        ));

        let dup_attr = "category lexical N\nitem \"x\" : N pers:1 pers:2\n";
        assert!(matches!(
            Lexicon::parse(dup_attr),
            Err(GrammarError::MalformedItem { line: 2, .. })
        ));

        let bad_directive = "lexicon lexical N\n";
        assert!(matches!(
            Lexicon::parse(bad_directive),
            Err(GrammarError::UnknownDirective { line: 1, .. })
        ));

        let short_order = "category lexical N\norder position category\n";
        assert!(matches!(
            Lexicon::parse(short_order),
            Err(GrammarError::BadOrder { line: 2, .. })
        ));
    }

    #[test]
    fn identical_duplicate_items_warn() {
        let text = "category lexical N\nitem \"x\" : N\nitem \"x\" : N\n";
        let lexicon = Lexicon::parse(text).unwrap();
        assert_eq!(lexicon.warnings.len(), 1);
        assert!(lexicon.warnings[0].contains("line 3"));
    }

    #[test]
    fn order_line_permutes_label_classes() {
        let text = "category lexical N\n\
                    order category position person number gender animacy case\n";
        let lexicon = Lexicon::parse(text).unwrap();
        assert_eq!(lexicon.order.classes[0], LabelClass::Category);
        assert_eq!(lexicon.order.classes[1], LabelClass::Position);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# toy\ncategory lexical N\n\n  # indented comment\nitem \"x\" : N # trailing\n";
        let lexicon = Lexicon::parse(text).unwrap();
        assert_eq!(lexicon.entries.len(), 1);
        assert_eq!(lexicon.entries[0].phon, "x");
    }
}
