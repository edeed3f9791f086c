use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use integra_core::features::{Gazetteer, ProfileContext};
use integra_core::ingest::{read_posts_many, Post};
use integra_core::langid::{parse_training, LanguageModel};
use integra_core::lexicon::{load_exclusions, load_wordlist, CandidateCounter, Lexicon, WordClass};
use integra_core::matcher::{scan_jsonl, tokenize, CorpusSummary, MatchOptions, MatchRecord, Matcher, TokenKind};
use integra_core::morphology::{expand_lexicon, VerbTable};
use integra_core::pipeline::{build_features, FeatureTables};
use integra_core::stats::{compare_domains, top_k_rate_table, DesignRecord, RegressionSpec};

use crate::config::{config_error, RunConfig};
use crate::svg;

fn load_lexicon(cfg: &RunConfig) -> Result<Lexicon> {
    let mut lexicon = if cfg.lexicons.is_empty() {
        Lexicon::bundled()?
    } else {
        let mut lex = Lexicon::default();
        for path in &cfg.lexicons {
            lex.extend(Lexicon::load(path, None)?.entries().to_vec())
                .with_context(|| format!("merging {}", path.display()))?;
        }
        lex
    };
    if let Some(path) = &cfg.exclusions {
        lexicon.apply_exclusions(&load_exclusions(path)?, VerbTable::bundled())?;
    }
    Ok(lexicon)
}

fn build_matcher(cfg: &RunConfig) -> Result<Matcher> {
    let expanded = expand_lexicon(&load_lexicon(cfg)?)?;
    Ok(Matcher::with_options(&expanded, MatchOptions { fold_diacritics: cfg.fold_diacritics, window: cfg.window }))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_all_posts(cfg: &RunConfig) -> Result<Vec<Post>> {
    let mut reader = read_posts_many(cfg.require_inputs()?.to_vec());
    let posts = reader.by_ref().collect::<Result<Vec<_>, _>>()?;
    if reader.skipped() > 0 {
        eprintln!("skipped {} malformed lines", reader.skipped());
    }
    Ok(posts)
}

pub fn discover(cfg: &RunConfig, english: &Path, spanish: &Path) -> Result<()> {
    for (path, what) in [(english, "English wordlist"), (spanish, "Spanish wordlist")] {
        if !path.exists() {
            return Err(config_error(format!("{what} {} does not exist", path.display())));
        }
    }
    let english = load_wordlist(english)?;
    let spanish = load_wordlist(spanish)?;
    let mut counter = CandidateCounter::default();
    let mut reader = read_posts_many(cfg.require_inputs()?.to_vec());
    for post in reader.by_ref() {
        let post = post?;
        if post.is_retweet {
            continue;
        }
        for t in tokenize(&post.text).iter().filter(|t| t.kind == TokenKind::Word) {
            counter.add(&t.surface);
        }
    }
    let path = cfg.output("candidates.tsv")?;
    let mut out = create(&path)?;
    writeln!(out, "surface\tenglish_stem\tfrequency\trejected_reason")?;
    let reports = counter.finish(&english, &spanish);
    for r in &reports {
        let reason = r.rejected_reason.map_or_else(|| "none".to_string(), |x| x.to_string());
        writeln!(out, "{}\t{}\t{}\t{reason}", r.surface, r.english_stem, r.frequency)?;
    }
    out.flush()?;
    eprintln!("{} candidates ({} accepted) -> {}", reports.len(), reports.iter().filter(|r| r.accepted()).count(), path.display());
    Ok(())
}

pub fn expand(cfg: &RunConfig) -> Result<()> {
    let expanded = expand_lexicon(&load_lexicon(cfg)?)?;
    let path = cfg.output("surfaces.tsv")?;
    let mut out = create(&path)?;
    writeln!(out, "base\tclass\tvariant\tsurface")?;
    let mut n = 0;
    for e in expanded.iter() {
        for (tokens, integrated) in e.surfaces.phrases() {
            let variant = if integrated { "integrated" } else { "light" };
            writeln!(out, "{}\t{}\t{variant}\t{}", e.entry.base, e.entry.word_class, tokens.join(" "))?;
            n += 1;
        }
    }
    out.flush()?;
    eprintln!("{} entries, {n} surfaces -> {}", expanded.len(), path.display());
    Ok(())
}

pub fn match_posts(cfg: &RunConfig) -> Result<()> {
    let matcher = build_matcher(cfg)?;
    let inputs = cfg.require_inputs()?;
    let records_path = cfg.output("records.jsonl")?;
    let mut out = create(&records_path)?;
    let mut write_err: Option<std::io::Error> = None;
    let (summary, stats) = scan_jsonl(inputs, &matcher, cfg.threads, |r: &MatchRecord| {
        if write_err.is_none() {
            let line = serde_json::to_string(r).expect("records serialize");
            if let Err(e) = writeln!(out, "{line}") {
                write_err = Some(e);
            }
        }
    })?;
    if let Some(e) = write_err {
        return Err(e).with_context(|| format!("writing {}", records_path.display()));
    }
    out.flush()?;
    let summary_path = cfg.output("summary.tsv")?;
    write_text(&summary_path, &summary.to_tsv())?;
    eprintln!(
        "{} posts ({} retweets, {} malformed lines skipped), {} records -> {}, {}",
        stats.posts,
        stats.retweets,
        stats.skipped_lines,
        stats.records,
        records_path.display(),
        summary_path.display()
    );
    Ok(())
}

pub fn features(cfg: &RunConfig) -> Result<()> {
    let matcher = build_matcher(cfg)?;
    let gazetteer = match &cfg.gazetteer {
        Some(p) => Gazetteer::load(p)?,
        None => Gazetteer::bundled(),
    };
    let owned;
    let model: &LanguageModel = match &cfg.langid_model {
        Some(p) => {
            owned = LanguageModel::load(p)?;
            &owned
        }
        None => LanguageModel::bundled(),
    };
    let ctx = ProfileContext { identifier: model, native_matcher: &matcher, gazetteer: &gazetteer };
    let tables = build_features(read_all_posts(cfg)?, &matcher, &ctx)?;
    let design_path = cfg.output("design.jsonl")?;
    let mut out = create(&design_path)?;
    for r in &tables.records {
        writeln!(out, "{}", serde_json::to_string(r)?)?;
    }
    out.flush()?;
    let profiles_path = cfg.output("profiles.jsonl")?;
    let mut out = create(&profiles_path)?;
    for p in &tables.profiles {
        writeln!(out, "{}", serde_json::to_string(p)?)?;
    }
    out.flush()?;
    eprintln!(
        "{} records, {} authors -> {}, {}",
        tables.records.len(),
        tables.profiles.len(),
        design_path.display(),
        profiles_path.display()
    );
    Ok(())
}

fn read_summary(path: &Path) -> Result<CorpusSummary> {
    if !path.exists() {
        return Err(config_error(format!("summary {} does not exist", path.display())));
    }
    CorpusSummary::from_tsv(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn rate(cfg: &RunConfig, summary: Option<&Path>, k: usize, class: WordClass) -> Result<()> {
    let default = cfg.output_dir.join("summary.tsv");
    let summary = read_summary(summary.unwrap_or(&default))?;
    let table = top_k_rate_table(&summary, k, class);
    let path = cfg.output(&format!("rates_{class}.tsv"))?;
    write_text(&path, &table.to_tsv())?;
    eprintln!("{} words -> {}", table.rows.len(), path.display());
    Ok(())
}

pub fn compare(cfg: &RunConfig, a: &Path, b: &Path, class: WordClass, k: usize, family: usize, svg: bool) -> Result<()> {
    let report = compare_domains(&read_summary(a)?, &read_summary(b)?, class, k, family)?;
    let path = cfg.output(&format!("comparison_{class}.tsv"))?;
    write_text(&path, &report.to_tsv())?;
    write_text(&cfg.output(&format!("comparison_{class}.json"))?, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    if svg {
        let name = |p: &Path| p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned());
        write_text(&cfg.output(&format!("comparison_{class}.svg"))?, &svg::rate_scatter(&report, &name(a), &name(b)))?;
    }
    eprintln!(
        "{} words, mean rate {:.4} vs {:.4} -> {}",
        report.rows.len(),
        report.mean_rate_a,
        report.mean_rate_b,
        path.display()
    );
    Ok(())
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    if !path.exists() {
        return Err(config_error(format!("{} does not exist", path.display())));
    }
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).with_context(|| format!("{} line {}", path.display(), i + 1))?);
    }
    Ok(out)
}

pub fn regress(cfg: &RunConfig, design: Option<&Path>, profiles: Option<&Path>, class: WordClass, test_fraction: f64) -> Result<()> {
    let Some(seed) = cfg.seed else {
        return Err(config_error("regress needs --seed"));
    };
    let mut spec = RegressionSpec::new(class, seed);
    spec.test_fraction = test_fraction;
    if let Some(t) = cfg.rare_threshold {
        spec.rare_threshold = t;
    }
    if let Some(grid) = &cfg.l2_grid {
        spec.l2_grid = grid.clone();
    }
    spec.validate().map_err(|e| config_error(e.to_string()))?;
    let design_default = cfg.output_dir.join("design.jsonl");
    let profiles_default = cfg.output_dir.join("profiles.jsonl");
    let tables = FeatureTables {
        records: read_jsonl::<DesignRecord>(design.unwrap_or(&design_default))?,
        profiles: read_jsonl(profiles.unwrap_or(&profiles_default))?,
    };
    let result = integra_core::pipeline::regress(&tables, &spec)?;
    let tsv = cfg.output(&format!("regression_{class}.tsv"))?;
    write_text(&tsv, &result.to_tsv())?;
    write_text(&cfg.output(&format!("regression_{class}.json"))?, &(serde_json::to_string_pretty(&result)? + "\n"))?;
    eprintln!(
        "{} observations ({} dropped), L2 weight {}, LR statistic {:.3} -> {}",
        result.n_observations,
        result.n_dropped,
        result.chosen_l2,
        result.lr_statistic,
        tsv.display()
    );
    Ok(())
}

pub fn train_langid(cfg: &RunConfig, training: &Path, order: usize, alpha: f64) -> Result<()> {
    if !training.exists() {
        return Err(config_error(format!("training file {} does not exist", training.display())));
    }
    let docs = parse_training(&read_text(training)?)?;
    if docs.is_empty() {
        bail!("{} has no training rows", training.display());
    }
    let model = LanguageModel::train(&docs, order, alpha)?;
    let path = cfg.output("langid.tsv")?;
    model.save(&path)?;
    eprintln!("{} documents, classes {:?} -> {}", docs.len(), model.classes, path.display());
    Ok(())
}
