mod common;

use std::collections::BTreeSet;
use std::fs;

use common::{bundled_expanded, bundled_matcher, fixture};
use integra_core::ingest::{group_timelines, read_posts, Post};
use integra_core::lexicon::{discover_candidates, load_wordlist, WordClass};
use integra_core::matcher::{scan_jsonl, tokenize, CorpusSummary, MatchRecord, TokenKind, Variant, VariantCounts};
use integra_core::synth::{compare_fixture, fixture_corpus, to_jsonl, FixtureManifest};

/// Set `INTEGRA_REGEN_FIXTURES=1` to rewrite the shipped files.
#[test]
fn shipped_fixtures_match_generator() {
    let lex = bundled_expanded();
    let (posts, manifest) = fixture_corpus(&lex);
    let (a, b) = compare_fixture(&lex);
    let files = [
        ("corpus.jsonl", to_jsonl(&posts)),
        ("manifest.json", serde_json::to_string_pretty(&manifest).unwrap() + "\n"),
        ("compare_a.tsv", a.to_tsv()),
        ("compare_b.tsv", b.to_tsv()),
    ];
    let regen = std::env::var_os("INTEGRA_REGEN_FIXTURES").is_some();
    for (name, content) in files {
        if regen {
            fs::write(fixture(name), &content).unwrap();
        }
        assert_eq!(fs::read_to_string(fixture(name)).unwrap(), content, "{name} is stale");
    }
}

fn manifest() -> FixtureManifest {
    serde_json::from_str(&fs::read_to_string(fixture("manifest.json")).unwrap()).unwrap()
}

fn shipped_posts() -> Vec<Post> {
    let mut reader = read_posts(fixture("corpus.jsonl"));
    let posts: Vec<Post> = reader.by_ref().collect::<Result<_, _>>().unwrap();
    assert_eq!(reader.skipped(), 0);
    posts
}

#[test]
fn corpus_reads_cleanly() {
    let m = manifest();
    let posts = shipped_posts();
    assert_eq!(posts.len(), m.posts);
    assert_eq!(posts.iter().filter(|p| p.is_retweet).count(), m.retweets);
    let timelines = group_timelines(posts);
    let counts: Vec<(String, usize)> = timelines.iter().map(|(k, t)| (k.clone(), t.posts.len())).collect();
    assert_eq!(counts, m.authors.into_iter().collect::<Vec<_>>());
}

fn scan(threads: usize) -> (CorpusSummary, Vec<MatchRecord>) {
    let mut records = Vec::new();
    let (summary, stats) =
        scan_jsonl(&[fixture("corpus.jsonl")], &bundled_matcher(), threads, |r: &MatchRecord| records.push(r.clone())).unwrap();
    assert_eq!(stats.records as usize, records.len());
    (summary, records)
}

#[test]
fn planted_counts_are_recovered() {
    let m = manifest();
    let (summary, records) = scan(2);
    let total = |class| {
        summary.counts.iter().filter(|((_, c), _)| *c == class).fold(VariantCounts::default(), |acc, (_, v)| VariantCounts {
            integrated: acc.integrated + v.integrated,
            light: acc.light + v.light,
        })
    };
    assert_eq!(total(WordClass::Loanword), VariantCounts { integrated: 7, light: 3 });
    assert_eq!(total(WordClass::Native), VariantCounts { integrated: 4, light: 1 });
    assert!(records.iter().filter(|r| r.word_class == WordClass::Native).all(|r| r.author_id == m.native_author));

    let found: BTreeSet<(String, String, Variant)> = records.iter().map(|r| (r.post_id.clone(), r.base.clone(), r.variant)).collect();
    let planted: BTreeSet<(String, String, Variant)> = m.planted.iter().map(|u| (u.post_id.clone(), u.base.clone(), u.variant)).collect();
    assert_eq!(found, planted);
}

#[test]
fn scan_is_thread_count_invariant() {
    let one = scan(1);
    assert_eq!(one, scan(2));
    assert_eq!(one, scan(4));
}

#[test]
fn discovery_finds_the_unlisted_verb() {
    let m = manifest();
    let english = load_wordlist(fixture("english.txt")).unwrap();
    let spanish = load_wordlist(fixture("spanish.txt")).unwrap();
    let posts = shipped_posts();
    let tokens = posts.iter().flat_map(|p| tokenize(&p.text)).filter(|t| t.kind == TokenKind::Word).map(|t| t.surface);
    let reports = discover_candidates(tokens, &english, &spanish);
    let accepted: Vec<&str> = reports.iter().filter(|r| r.accepted()).map(|r| r.surface.as_str()).collect();
    assert_eq!(accepted, [m.discovery_token.as_str()]);
    assert_eq!(reports[0].english_stem, "hype");
}

#[test]
fn compare_files_round_trip() {
    let a = CorpusSummary::from_tsv(&fs::read_to_string(fixture("compare_a.tsv")).unwrap()).unwrap();
    let b = CorpusSummary::from_tsv(&fs::read_to_string(fixture("compare_b.tsv")).unwrap()).unwrap();
    assert_eq!(a.counts.len(), 50);
    assert_eq!(a.counts.keys().collect::<Vec<_>>(), b.counts.keys().collect::<Vec<_>>());
    assert!(a.counts.values().chain(b.counts.values()).all(|v| v.integrated + v.light == 200));
}
