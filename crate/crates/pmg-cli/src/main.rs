//! Command-line front end: parse and generate against a grammar,
//! enumerate the derivable fragment, resolve anaphora over discourses,
//! and inspect the memory tries.
//!
//! Exit codes: 0 grammatical/success, 1 ungrammatical or unresolved,
//! 2 usage error, 3 grammar or input-file error.

use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pmg_core::{
    confusability, enumerate, generate, parse, process_discourse, render_binding,
    render_coindex_table, render_trace, render_trace_structured, render_tree,
    resolve_step_budget, BindingConfig, DerivationConfig, EngineError, FeaturePath, GrammarError,
    LabelClass, Lexicon, MemoryBackend, PathLabel, PathTrie, RunOutcome, Verdict,
};

const EXIT_REJECTED: u8 = 1;
const EXIT_GRAMMAR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "pmg",
    version,
    about = "Top-down minimalist grammar derivations over pluggable movement memory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a sentence against every declared root
    Parse(ParseArgs),
    /// Derive from an explicit sequence of lexical choices
    Generate(GenerateArgs),
    /// List every derivable surface within a step bound
    Enumerate(EnumerateArgs),
    /// Resolve anaphora over a discourse and print the coindex table
    Bind(BindArgs),
    /// Print the referent trie a discourse leaves behind
    TrieDump(TrieDumpArgs),
    /// Diff trie-cued binding against recency-only retrieval
    Compare(CompareArgs),
    /// Insertion costs and confusability for feature path literals
    Metrics(MetricsArgs),
}

#[derive(Args)]
struct GrammarOpt {
    /// Built-in grammar (fixture, base) or a grammar file path
    #[arg(long, default_value = "fixture")]
    grammar: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendOpt {
    Lifo,
    Trie,
}

impl From<BackendOpt> for MemoryBackend {
    fn from(opt: BackendOpt) -> MemoryBackend {
        match opt {
            BackendOpt::Lifo => MemoryBackend::Lifo,
            BackendOpt::Trie => MemoryBackend::Trie,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceFormat {
    Text,
    Structured,
}

#[derive(Args)]
struct ParseArgs {
    #[command(flatten)]
    grammar: GrammarOpt,
    #[arg(long, value_enum, default_value_t = BackendOpt::Trie)]
    backend: BackendOpt,
    #[arg(long, value_enum, default_value_t = TraceFormat::Text)]
    trace_format: TraceFormat,
    /// Step budget per root; overrides PMG_STEP_BUDGET
    #[arg(long)]
    max_steps: Option<usize>,
    /// Sentence tokens; quoted strings are split on whitespace
    #[arg(required = true)]
    tokens: Vec<String>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    grammar: GrammarOpt,
    #[arg(long, value_enum, default_value_t = BackendOpt::Trie)]
    backend: BackendOpt,
    #[arg(long, value_enum, default_value_t = TraceFormat::Text)]
    trace_format: TraceFormat,
    /// Step budget per root; overrides PMG_STEP_BUDGET
    #[arg(long)]
    max_steps: Option<usize>,
    /// Root category; all declared roots are tried when absent
    #[arg(long)]
    root: Option<String>,
    /// Lexical choices by name, in merge order
    #[arg(required = true)]
    choices: Vec<String>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    grammar: GrammarOpt,
    #[arg(long, value_enum, default_value_t = BackendOpt::Trie)]
    backend: BackendOpt,
    /// Largest derivation length to explore
    #[arg(long, default_value_t = 12)]
    max_steps: usize,
}

#[derive(Args)]
struct BindArgs {
    #[command(flatten)]
    grammar: GrammarOpt,
    #[arg(long, value_enum, default_value_t = BackendOpt::Trie)]
    backend: BackendOpt,
    /// Built-in discourse (b-bprime, b-bsecond) or a file path
    #[arg(long)]
    discourse: String,
    /// Resolve referential cues by recency instead of topicality
    #[arg(long)]
    referential_lifo: bool,
    /// Step budget per root; overrides PMG_STEP_BUDGET
    #[arg(long)]
    max_steps: Option<usize>,
}

#[derive(Args)]
struct TrieDumpArgs {
    #[command(flatten)]
    grammar: GrammarOpt,
    /// Built-in discourse (b-bprime, b-bsecond) or a file path
    #[arg(long)]
    discourse: String,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    grammar: GrammarOpt,
    /// Built-in discourse (b-bprime, b-bsecond) or a file path
    #[arg(long)]
    discourse: String,
    /// Step budget per root; overrides PMG_STEP_BUDGET
    #[arg(long)]
    max_steps: Option<usize>,
}

#[derive(Args)]
struct MetricsArgs {
    #[command(flatten)]
    grammar: GrammarOpt,
    /// Dash-joined label paths, e.g. S-D-2p-sg
    #[arg(required = true)]
    paths: Vec<String>,
}

#[derive(Debug)]
enum CliError {
    Grammar(GrammarError),
    Engine(EngineError),
    Discourse { path: String, source: std::io::Error },
    PathLiteral { literal: String, reason: String },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Grammar(err) => write!(f, "{err}"),
            CliError::Engine(err) => write!(f, "{err}"),
            CliError::Discourse { path, source } => {
                write!(f, "cannot read discourse {path}: {source}")
            }
            CliError::PathLiteral { literal, reason } => {
                write!(f, "bad path literal {literal}: {reason}")
            }
        }
    }
}

fn main() -> ExitCode {
    // Rust ignores SIGPIPE by default, turning writes to a closed pipe
    // into println panics; die of the signal like any other filter.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(EXIT_GRAMMAR)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Parse(args) => run_parse(args),
        Command::Generate(args) => run_generate(args),
        Command::Enumerate(args) => run_enumerate(args),
        Command::Bind(args) => run_bind(args),
        Command::TrieDump(args) => run_trie_dump(args),
        Command::Compare(args) => run_compare(args),
        Command::Metrics(args) => run_metrics(args),
    }
}

fn load_grammar(name: &str) -> Result<Lexicon, CliError> {
    match name {
        "fixture" => Ok(Lexicon::fixture()),
        "base" => Ok(Lexicon::base_grammar()),
        path => Lexicon::from_file(Path::new(path)).map_err(CliError::Grammar),
    }
}

/// Built-in two-sentence discourses from the binding fixtures, or a file
/// with one sentence per line and `#` comments.
fn load_discourse(name: &str) -> Result<Vec<String>, CliError> {
    let built_in = |texts: &[&str]| texts.iter().map(|t| t.to_string()).collect();
    match name {
        "b-bprime" => Ok(built_in(&["gianni saluta mario", "poi si lava"])),
        "b-bsecond" => Ok(built_in(&["gianni saluta mario", "poi lo lava"])),
        path => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Discourse {
                path: path.to_string(),
                source,
            })?;
            Ok(text
                .lines()
                .filter_map(|raw| {
                    let line = raw.split('#').next().unwrap_or("").trim();
                    (!line.is_empty()).then(|| line.to_string())
                })
                .collect())
        }
    }
}

fn flatten(words: &[String]) -> Vec<String> {
    words
        .iter()
        .flat_map(|word| word.split_whitespace())
        .map(str::to_string)
        .collect()
}

fn report_run(outcome: &RunOutcome, format: TraceFormat) -> ExitCode {
    for attempt in &outcome.attempts {
        println!("root {}: {}", attempt.root, attempt.verdict);
    }
    if let Some(derivation) = outcome.derivation() {
        let trace = match format {
            TraceFormat::Text => render_trace(&derivation.trace),
            TraceFormat::Structured => render_trace_structured(&derivation.trace),
        };
        print!("{trace}");
        println!("tree: {}", render_tree(&derivation.nodes));
        println!("surface: {}", derivation.surface.join(" "));
    }
    println!("verdict: {}", outcome.verdict());
    if outcome.winner.is_some() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_REJECTED)
    }
}

fn run_parse(args: ParseArgs) -> Result<ExitCode, CliError> {
    let lexicon = load_grammar(&args.grammar.grammar)?;
    let config = DerivationConfig {
        backend: args.backend.into(),
        step_budget: resolve_step_budget(args.max_steps),
    };
    let tokens = flatten(&args.tokens);
    let outcome = parse(&lexicon, &tokens, config);
    Ok(report_run(&outcome, args.trace_format))
}

fn run_generate(args: GenerateArgs) -> Result<ExitCode, CliError> {
    let lexicon = load_grammar(&args.grammar.grammar)?;
    let config = DerivationConfig {
        backend: args.backend.into(),
        step_budget: resolve_step_budget(args.max_steps),
    };
    let choices = flatten(&args.choices);
    let outcome = generate(&lexicon, &choices, args.root.as_deref(), config)
        .map_err(CliError::Engine)?;
    Ok(report_run(&outcome, args.trace_format))
}

fn run_enumerate(args: EnumerateArgs) -> Result<ExitCode, CliError> {
    let lexicon = load_grammar(&args.grammar.grammar)?;
    let config = DerivationConfig {
        backend: args.backend.into(),
        // the depth bound does the limiting; branches die on their own
        step_budget: usize::MAX,
    };
    let found = enumerate(&lexicon, args.max_steps, config);
    for item in &found {
        println!("[{}] {} ({} steps)", item.root, item.surface, item.steps);
    }
    println!("total: {}", found.len());
    Ok(ExitCode::SUCCESS)
}

fn run_bind(args: BindArgs) -> Result<ExitCode, CliError> {
    let lexicon = load_grammar(&args.grammar.grammar)?;
    let sentences = load_discourse(&args.discourse)?;
    let outcome = process_discourse(
        &lexicon,
        &sentences,
        BindingConfig {
            backend: args.backend.into(),
            step_budget: resolve_step_budget(args.max_steps),
            referential_lifo: args.referential_lifo,
        },
    );
    print!("{}", render_binding(&outcome));
    println!("table:");
    print!("{}", render_coindex_table(&outcome.table));
    let clean = outcome.table.unresolved.is_empty()
        && outcome
            .sentences
            .iter()
            .all(|s| s.verdict == Verdict::Grammatical);
    Ok(if clean {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_REJECTED)
    })
}

fn run_trie_dump(args: TrieDumpArgs) -> Result<ExitCode, CliError> {
    let lexicon = load_grammar(&args.grammar.grammar)?;
    let sentences = load_discourse(&args.discourse)?;
    let outcome = process_discourse(&lexicon, &sentences, BindingConfig::default());
    print!("{}", outcome.referent_trie);
    Ok(ExitCode::SUCCESS)
}

fn run_compare(args: CompareArgs) -> Result<ExitCode, CliError> {
    let lexicon = load_grammar(&args.grammar.grammar)?;
    let sentences = load_discourse(&args.discourse)?;
    let step_budget = resolve_step_budget(args.max_steps);
    let trie = process_discourse(
        &lexicon,
        &sentences,
        BindingConfig {
            backend: MemoryBackend::Trie,
            step_budget,
            referential_lifo: false,
        },
    );
    let lifo = process_discourse(
        &lexicon,
        &sentences,
        BindingConfig {
            backend: MemoryBackend::Lifo,
            step_budget,
            referential_lifo: true,
        },
    );
    for (index, (a, b)) in trie.sentences.iter().zip(&lifo.sentences).enumerate() {
        println!(
            "s{}: {} [trie: {} | lifo: {}]",
            index + 1,
            a.text,
            a.verdict,
            b.verdict
        );
    }
    let lookup = |links: &[(String, String)], key: &str| -> Option<String> {
        links
            .iter()
            .find(|(from, _)| from == key)
            .map(|(_, to)| to.clone())
    };
    let mut keys: Vec<String> = trie.table.links.iter().map(|(from, _)| from.clone()).collect();
    for (from, _) in &lifo.table.links {
        if !keys.contains(from) {
            keys.push(from.clone());
        }
    }
    println!("links:");
    let mut divergences = 0;
    for key in &keys {
        let a = lookup(&trie.table.links, key);
        let b = lookup(&lifo.table.links, key);
        if a != b {
            divergences += 1;
        }
        println!(
            "  {}: trie -> {}, lifo -> {}",
            key,
            a.as_deref().unwrap_or("-"),
            b.as_deref().unwrap_or("-")
        );
    }
    println!("divergences: {divergences}");
    Ok(ExitCode::SUCCESS)
}

fn run_metrics(args: MetricsArgs) -> Result<ExitCode, CliError> {
    let lexicon = load_grammar(&args.grammar.grammar)?;
    let mut parsed: Vec<(String, FeaturePath)> = Vec::new();
    for literal in &args.paths {
        parsed.push((literal.clone(), parse_path_literal(literal, &lexicon)?));
    }
    let mut trie = PathTrie::new();
    for (id, (literal, path)) in parsed.iter().enumerate() {
        let cost = trie.insert(path, id as u64);
        println!("insert {literal}: cost {cost}");
    }
    for i in 0..parsed.len() {
        for j in (i + 1)..parsed.len() {
            println!(
                "confusability {} / {}: {}",
                parsed[i].0,
                parsed[j].0,
                confusability(&parsed[i].1, &parsed[j].1)
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_path_literal(literal: &str, lexicon: &Lexicon) -> Result<FeaturePath, CliError> {
    let mut labels = Vec::new();
    for part in literal.split('-') {
        if part.is_empty() {
            return Err(CliError::PathLiteral {
                literal: literal.to_string(),
                reason: "empty label".to_string(),
            });
        }
        labels.push(PathLabel {
            class: classify_label(part, lexicon),
            text: part.to_string(),
        });
    }
    Ok(FeaturePath(labels))
}

/// Label class inference for command-line literals: declared position
/// categories first, then the value shapes paths are rendered with.
fn classify_label(text: &str, lexicon: &Lexicon) -> LabelClass {
    if lexicon.order.position_categories.contains(text) {
        return LabelClass::Position;
    }
    let person = text
        .strip_suffix('p')
        .is_some_and(|v| !v.is_empty() && v.chars().all(|c| c.is_ascii_digit()));
    if person {
        return LabelClass::Person;
    }
    match text {
        "sg" | "pl" => LabelClass::Number,
        "f" | "fem" | "m" | "masc" => LabelClass::Gender,
        "anim" | "inanim" => LabelClass::Animacy,
        _ => LabelClass::Category,
    }
}
