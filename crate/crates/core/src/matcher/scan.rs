use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crossbeam_channel::bounded;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{MatchRecord, Matcher, Variant};
use crate::ingest::{open_with_sample, parse_post_line, IngestError, Post};
use crate::lexicon::WordClass;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantCounts {
    pub integrated: u64,
    pub light: u64,
}

/// Per-entry match counts, zero-initialized for every lexicon entry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusSummary {
    pub counts: BTreeMap<(String, WordClass), VariantCounts>,
}

#[derive(Debug, Error)]
pub enum SummaryError {
    #[error("summary line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

impl CorpusSummary {
    pub fn for_matcher(matcher: &Matcher) -> Self {
        let counts = matcher.entries().iter().map(|e| ((e.base.clone(), e.word_class), VariantCounts::default())).collect();
        CorpusSummary { counts }
    }

    pub fn record(&mut self, r: &MatchRecord) {
        let c = self.counts.entry((r.base.clone(), r.word_class)).or_default();
        match r.variant {
            Variant::Integrated => c.integrated += 1,
            Variant::Light => c.light += 1,
        }
    }

    pub fn merge(&mut self, other: &CorpusSummary) {
        for (k, v) in &other.counts {
            let c = self.counts.entry(k.clone()).or_default();
            c.integrated += v.integrated;
            c.light += v.light;
        }
    }

    pub fn get(&self, base: &str, class: WordClass) -> Option<VariantCounts> {
        self.counts.get(&(base.to_string(), class)).copied()
    }

    pub fn total(&self) -> VariantCounts {
        self.counts.values().fold(VariantCounts::default(), |a, c| VariantCounts {
            integrated: a.integrated + c.integrated,
            light: a.light + c.light,
        })
    }

    /// `base TAB class TAB integrated_count TAB light_count`, with a header.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("base\tclass\tintegrated_count\tlight_count\n");
        for ((base, class), c) in &self.counts {
            out.push_str(&format!("{base}\t{class}\t{}\t{}\n", c.integrated, c.light));
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, SummaryError> {
        let mut counts = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || (i == 0 && line.starts_with("base\t")) {
                continue;
            }
            let bad = |reason: String| SummaryError::Malformed { line: i + 1, reason };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(bad(format!("expected 4 columns, found {}", cols.len())));
            }
            let class: WordClass = cols[1].parse().map_err(bad)?;
            let num = |s: &str| s.trim().parse::<u64>().map_err(|e| bad(format!("`{s}`: {e}")));
            counts.insert((cols[0].to_string(), class), VariantCounts { integrated: num(cols[2])?, light: num(cols[3])? });
        }
        Ok(CorpusSummary { counts })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanStats {
    pub posts: u64,
    pub retweets: u64,
    pub skipped_lines: u64,
    pub records: u64,
}

impl ScanStats {
    fn add(&mut self, o: &ScanStats) {
        self.posts += o.posts;
        self.retweets += o.retweets;
        self.skipped_lines += o.skipped_lines;
        self.records += o.records;
    }
}

/// Matches every non-retweet post in order, handing each record to `sink`.
pub fn scan_corpus<I, F>(posts: I, matcher: &Matcher, mut sink: F) -> (CorpusSummary, ScanStats)
where
    I: IntoIterator<Item = Post>,
    F: FnMut(&MatchRecord),
{
    let mut summary = CorpusSummary::for_matcher(matcher);
    let mut stats = ScanStats::default();
    for post in posts {
        stats.posts += 1;
        if post.is_retweet {
            stats.retweets += 1;
            continue;
        }
        for r in matcher.match_text(&post.id, &post.author_id, &post.text) {
            summary.record(&r);
            stats.records += 1;
            sink(&r);
        }
    }
    (summary, stats)
}

const BATCH: usize = 512;

fn match_lines(lines: &[String], matcher: &Matcher, summary: &mut CorpusSummary, stats: &mut ScanStats) -> Vec<MatchRecord> {
    let mut out = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let Ok(post) = parse_post_line(line) else {
            stats.skipped_lines += 1;
            continue;
        };
        stats.posts += 1;
        if post.is_retweet {
            stats.retweets += 1;
            continue;
        }
        for r in matcher.match_text(&post.id, &post.author_id, &post.text) {
            summary.record(&r);
            out.push(r);
        }
    }
    stats.records += out.len() as u64;
    out
}

/// Streams JSONL posts from `inputs` through `threads` matching workers.
/// Records reach `sink` in input order regardless of the thread count.
pub fn scan_jsonl<F>(inputs: &[PathBuf], matcher: &Matcher, threads: usize, mut sink: F) -> Result<(CorpusSummary, ScanStats), IngestError>
where
    F: FnMut(&MatchRecord) + Send,
{
    let threads = threads.max(1);
    let mut summary = CorpusSummary::for_matcher(matcher);
    let mut stats = ScanStats::default();

    if threads == 1 {
        let mut batch = Vec::with_capacity(BATCH);
        for_each_batch(inputs, &mut batch, |lines| {
            for r in match_lines(lines, matcher, &mut summary, &mut stats) {
                sink(&r);
            }
        })?;
        return Ok((summary, stats));
    }

    let (line_tx, line_rx) = bounded::<(u64, Vec<String>)>(threads * 4);
    let (rec_tx, rec_rx) = bounded::<(u64, Vec<MatchRecord>)>(threads * 4);
    std::thread::scope(|scope| {
        let workers: Vec<_> = (0..threads)
            .map(|_| {
                let line_rx = line_rx.clone();
                let rec_tx = rec_tx.clone();
                scope.spawn(move || {
                    let mut local = CorpusSummary::default();
                    let mut local_stats = ScanStats::default();
                    for (seq, lines) in line_rx {
                        let recs = match_lines(&lines, matcher, &mut local, &mut local_stats);
                        if rec_tx.send((seq, recs)).is_err() {
                            break;
                        }
                    }
                    (local, local_stats)
                })
            })
            .collect();
        drop(rec_tx);
        drop(line_rx);

        let sink = &mut sink;
        let writer = scope.spawn(move || {
            let mut next = 0u64;
            let mut pending: BTreeMap<u64, Vec<MatchRecord>> = BTreeMap::new();
            for (seq, recs) in rec_rx {
                pending.insert(seq, recs);
                while let Some(recs) = pending.remove(&next) {
                    recs.iter().for_each(&mut *sink);
                    next += 1;
                }
            }
        });

        let mut seq = 0u64;
        let mut batch = Vec::with_capacity(BATCH);
        let read = for_each_batch(inputs, &mut batch, |lines| {
            let _ = line_tx.send((seq, std::mem::take(lines)));
            seq += 1;
        });
        drop(line_tx);
        for w in workers {
            let (s, st) = w.join().expect("matcher worker panicked");
            summary.merge(&s);
            stats.add(&st);
        }
        writer.join().expect("record writer panicked");
        read
    })?;
    Ok((summary, stats))
}

fn for_each_batch(inputs: &[PathBuf], batch: &mut Vec<String>, mut emit: impl FnMut(&mut Vec<String>)) -> Result<(), IngestError> {
    for path in inputs {
        let (lines, head) = open_with_sample(path)?;
        for line in head.into_iter().map(Ok).chain(lines) {
            batch.push(line.map_err(|source| unreadable(path, source))?);
            if batch.len() == BATCH {
                emit(batch);
                batch.clear();
            }
        }
    }
    if !batch.is_empty() {
        emit(batch);
        batch.clear();
    }
    Ok(())
}

fn unreadable(path: &Path, source: std::io::Error) -> IngestError {
    IngestError::Unreadable { path: path.into(), source }
}
