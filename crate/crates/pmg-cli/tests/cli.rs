//! End-to-end runs of every subcommand against the shipped fixture.

use std::process::{Command, Output};

fn pmg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmg"))
        .args(args)
        .env_remove("PMG_STEP_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

#[test]
fn parse_reports_roots_trace_tree_and_verdict() {
    let output = pmg(&[
        "parse",
        "--grammar",
        "fixture",
        "--backend",
        "trie",
        "--",
        "cosa pensi che mangi",
    ]);
    assert_eq!(code(&output), 0);
    let expected = "\
root C: ungrammatical (pending-expectations)
root F: grammatical
root D: ungrammatical (pending-expectations)
  1. init - memory=[] pending=[]
  2. merge cosa memory=[] pending=[S]
  3. move cosa path=F-D-3p-sg-fem attrs=gen:fem memory=[cosa] pending=[S]
  4. expect S memory=[cosa] pending=[]
  5. postulate-covert pro memory=[cosa] pending=[T]
  6. move pro path=S-D attrs=case:nom memory=[cosa,pro] pending=[T]
  7. expect T memory=[cosa,pro] pending=[]
  8. merge pensi attrs=pers:2 memory=[cosa,pro] pending=[C,D]
  9. expect D attrs=case:nom memory=[cosa,pro] pending=[C]
 10. merge-from-memory pro path=S-D attrs=case:nom,pers:2 origin=5 memory=[cosa] pending=[C]
 11. expect C memory=[cosa] pending=[]
 12. merge che memory=[cosa] pending=[S]
 13. expect S memory=[cosa] pending=[]
 14. postulate-covert pro memory=[cosa] pending=[T]
 15. move pro path=S-D attrs=case:nom memory=[cosa,pro] pending=[T]
 16. expect T memory=[cosa,pro] pending=[]
 17. merge mangi attrs=pers:1 memory=[cosa,pro] pending=[D,D]
 18. expect D attrs=case:nom memory=[cosa,pro] pending=[D]
 19. merge-from-memory pro path=S-D attrs=case:nom,pers:1 origin=14 memory=[cosa] pending=[D]
 20. expect D attrs=case:acc memory=[cosa] pending=[]
 21. merge-from-memory cosa path=F-D-3p-sg-fem attrs=case:acc,gen:fem origin=2 memory=[] pending=[]
tree: [F cosa [S (pro) [T pensi [D <pro>] [C che [S (pro) [T mangi [D <pro>] [D <cosa>]]]]]]]
surface: cosa pensi che mangi
verdict: grammatical
";
    assert_eq!(stdout(&output), expected);
}

#[test]
fn parse_rejects_scrambled_input_with_exit_1() {
    let output = pmg(&["parse", "--", "poi si lava gianni"]);
    assert_eq!(code(&output), 1);
    assert!(stdout(&output).ends_with("verdict: ungrammatical (pending-expectations)\n"));
}

#[test]
fn parse_missing_grammar_file_exits_3() {
    let output = pmg(&["parse", "--grammar", "missing.file", "--", "gianni"]);
    assert_eq!(code(&output), 3);
    assert!(String::from_utf8_lossy(&output.stderr).starts_with("error:"));
}

#[test]
fn missing_arguments_exit_2() {
    let output = pmg(&["parse"]);
    assert_eq!(code(&output), 2);
}

#[test]
fn generate_runs_the_scripted_wh_question() {
    let output = pmg(&[
        "generate",
        "--backend",
        "lifo",
        "--",
        "cosa",
        "tu",
        "pensi",
        "che",
        "io",
        "mangi",
    ]);
    assert_eq!(code(&output), 0);
    let text = stdout(&output);
    assert!(text.contains(" 21. merge-from-memory cosa"));
    assert!(text.contains(
        "tree: [F cosa [S (tu) [T pensi [D <tu>] [C che [S (io) [T mangi [D <io>] [D <cosa>]]]]]]]"
    ));
    assert!(text.contains("surface: cosa pensi che mangi"));
    assert!(text.ends_with("verdict: grammatical\n"));
}

#[test]
fn structured_trace_format_emits_key_value_records() {
    let output = pmg(&[
        "generate",
        "--trace-format",
        "structured",
        "--",
        "cosa tu pensi che io mangi",
    ]);
    assert_eq!(code(&output), 0);
    let text = stdout(&output);
    assert!(text.contains("index=1 op=init payload=- pending=[] memory=[]\n"));
    assert!(text.contains(
        "index=21 op=merge-from-memory payload=cosa pending=[] memory=[]\n"
    ));
}

#[test]
fn generate_unknown_choice_exits_3() {
    let output = pmg(&["generate", "--", "gianni", "sings"]);
    assert_eq!(code(&output), 3);
}

#[test]
fn enumerate_lists_the_bounded_fragment() {
    let output = pmg(&["enumerate", "--max-steps", "10"]);
    assert_eq!(code(&output), 0);
    let text = stdout(&output);
    assert!(text.starts_with("[C] gianni mangi gianni (10 steps)\n"));
    assert!(text.contains("[C] gianni si lava (10 steps)\n"));
    assert!(text.contains("[D] gianni (2 steps)\n"));
    assert!(text.ends_with("total: 41\n"));
}

#[test]
fn bind_resolves_the_builtin_reflexive_discourse() {
    let output = pmg(&["bind", "--discourse", "b-bprime"]);
    assert_eq!(code(&output), 0);
    let expected = "\
s1: gianni saluta mario [grammatical]
  referent gianni@s1 path=S-D-3p-sg-anim topic
  referent mario@s1 path=D-3p-sg-anim
s2: poi si lava [grammatical]
  resolve pro@s2 -> gianni@s1 (null-subject)
  referent pro@s2 path=S-D-3p-sg topic
  resolve si@s2 -> pro@s2 (reflexive)
chains:
  {gianni@s1, pro@s2, si@s2}
warnings: none
unresolved: none
table:
pro@s2: sentence=2 position=S-D-3p-sg kind=null-subject antecedent=gianni@s1 chain={gianni@s1, pro@s2, si@s2} status=resolved
si@s2: sentence=2 position=D-anim kind=reflexive antecedent=pro@s2 chain={gianni@s1, pro@s2, si@s2} status=resolved
";
    assert_eq!(stdout(&output), expected);
}

#[test]
fn bind_reads_discourse_files_with_comments() {
    let path = std::env::temp_dir().join("pmg-discourse-bprime.txt");
    std::fs::write(
        &path,
        "# binding fixture\ngianni saluta mario\npoi si lava   # reflexive follow-up\n",
    )
    .expect("temp file writes");
    let from_file = pmg(&["bind", "--discourse", path.to_str().unwrap()]);
    let builtin = pmg(&["bind", "--discourse", "b-bprime"]);
    assert_eq!(stdout(&from_file), stdout(&builtin));
    assert_eq!(code(&from_file), 0);
    std::fs::remove_file(&path).ok();
}

#[test]
fn bind_flags_unresolved_dependents_with_exit_1() {
    let path = std::env::temp_dir().join("pmg-discourse-bare.txt");
    std::fs::write(&path, "poi si lava\n").expect("temp file writes");
    let output = pmg(&["bind", "--discourse", path.to_str().unwrap()]);
    assert_eq!(code(&output), 1);
    assert!(stdout(&output).contains("unresolved: pro@s1"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn trie_dump_prints_the_referent_trie() {
    let output = pmg(&["trie-dump", "--discourse", "b-bprime"]);
    assert_eq!(code(&output), 0);
    let expected = "\
(root)
  S
    D
      3p
        sg *1 [2]
          anim *1 [0]
  D
    3p
      sg
        anim *1 [1]
";
    assert_eq!(stdout(&output), expected);
}

#[test]
fn compare_diffs_trie_against_recency_retrieval() {
    let output = pmg(&["compare", "--grammar", "fixture", "--discourse", "b-bprime"]);
    assert_eq!(code(&output), 0);
    let expected = "\
s1: gianni saluta mario [trie: grammatical | lifo: grammatical]
s2: poi si lava [trie: grammatical | lifo: grammatical]
links:
  pro@s2: trie -> gianni@s1, lifo -> mario@s1
  si@s2: trie -> pro@s2, lifo -> pro@s2
divergences: 1
";
    assert_eq!(stdout(&output), expected);
}

#[test]
fn metrics_reports_costs_and_confusability() {
    let output = pmg(&["metrics", "S-D-2p-pl", "S-D-2p-sg", "S-D-1p-sg"]);
    assert_eq!(code(&output), 0);
    let expected = "\
insert S-D-2p-pl: cost 4
insert S-D-2p-sg: cost 1
insert S-D-1p-sg: cost 2
confusability S-D-2p-pl / S-D-2p-sg: 0.75
confusability S-D-2p-pl / S-D-1p-sg: 0.5
confusability S-D-2p-sg / S-D-1p-sg: 0.5
";
    assert_eq!(stdout(&output), expected);
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        vec!["parse", "--", "cosa pensi che mangi"],
        vec!["enumerate", "--max-steps", "10"],
        vec!["compare", "--discourse", "b-bprime"],
    ] {
        let first = pmg(&args);
        let second = pmg(&args);
        assert_eq!(first.stdout, second.stdout, "{args:?}");
        assert_eq!(code(&first), code(&second));
    }
}

#[test]
fn env_step_budget_applies_and_the_flag_overrides_it() {
    let starved = Command::new(env!("CARGO_BIN_EXE_pmg"))
        .args(["parse", "--", "cosa pensi che mangi"])
        .env("PMG_STEP_BUDGET", "1")
        .output()
        .expect("binary runs");
    assert_eq!(code(&starved), 1);
    assert!(stdout(&starved).ends_with("verdict: ungrammatical (step-budget-exceeded)\n"));

    let overridden = Command::new(env!("CARGO_BIN_EXE_pmg"))
        .args(["parse", "--max-steps", "2000", "--", "cosa pensi che mangi"])
        .env("PMG_STEP_BUDGET", "1")
        .output()
        .expect("binary runs");
    assert_eq!(code(&overridden), 0);
}

#[cfg(unix)]
#[test]
fn closing_stdout_early_kills_the_process_quietly() {
    use std::io::Read;
    use std::os::unix::process::ExitStatusExt;
    use std::process::Stdio;

    // Enough sentences that the output cannot fit in a pipe buffer, so
    // the child must still be writing when the read end goes away.
    let path = std::env::temp_dir().join("pmg-discourse-long.txt");
    let discourse = "gianni saluta mario\n".repeat(3000);
    std::fs::write(&path, discourse).expect("temp file writes");

    let mut child = Command::new(env!("CARGO_BIN_EXE_pmg"))
        .args(["bind", "--discourse", path.to_str().unwrap()])
        .env_remove("PMG_STEP_BUDGET")
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    drop(child.stdout.take());
    let status = child.wait().expect("child reaped");
    let mut stderr = String::new();
    child
        .stderr
        .take()
        .expect("stderr piped")
        .read_to_string(&mut stderr)
        .expect("stderr reads");
    std::fs::remove_file(&path).ok();

    assert_eq!(status.signal(), Some(libc::SIGPIPE));
    assert!(!stderr.contains("panicked"), "stderr: {stderr}");
}
