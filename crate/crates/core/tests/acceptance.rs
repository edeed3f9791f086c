//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Run with `cargo test -p integra-core --test acceptance`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{bundled_expanded, bundled_matcher};
use integra_core::features::{Gazetteer, ProfileContext};
use integra_core::langid::LanguageModel;
use integra_core::lexicon::{Lexicon, WordClass, EXPECTED_LOANWORDS, EXPECTED_NATIVE};
use integra_core::matcher::{match_post, scan_jsonl, tokenize, MatchRecord, Matcher, Token, TokenKind, Variant};
use integra_core::morphology::{Cell, ExpandedLexicon, VerbTable};
use integra_core::pipeline::{build_features, regress};
use integra_core::stats::wilcoxon::{exact_p_value, normal_p_value};
use integra_core::stats::{
    compare_domains, fit_ridge_logistic, grid_search_l2, penalized_gradient, penalized_log_likelihood, top_k_rate_table,
    wilcoxon_signed_rank, Design, FitOptions, RegressionSpec, DEFAULT_L2_GRID,
};
use integra_core::synth::{
    compare_counts_a, compare_counts_b, compare_fixture, planted_regression_corpus, random_match_posts, write_throughput_corpus,
    PlantedModel, COMPARE_USES_PER_WORD,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

// Present, preterite, imperfect; 1sg 2sg 3sg 1pl 2pl 3pl within each.
const REFERENCE: &[(&str, [&str; 18])] = &[
    ("tuitear", [
        "tuiteo", "tuiteas", "tuitea", "tuiteamos", "tuiteáis", "tuitean",
        "tuiteé", "tuiteaste", "tuiteó", "tuiteamos", "tuiteasteis", "tuitearon",
        "tuiteaba", "tuiteabas", "tuiteaba", "tuiteábamos", "tuiteabais", "tuiteaban",
    ]),
    ("likear", [
        "likeo", "likeas", "likea", "likeamos", "likeáis", "likean",
        "likeé", "likeaste", "likeó", "likeamos", "likeasteis", "likearon",
        "likeaba", "likeabas", "likeaba", "likeábamos", "likeabais", "likeaban",
    ]),
    ("chatear", [
        "chateo", "chateas", "chatea", "chateamos", "chateáis", "chatean",
        "chateé", "chateaste", "chateó", "chateamos", "chateasteis", "chatearon",
        "chateaba", "chateabas", "chateaba", "chateábamos", "chateabais", "chateaban",
    ]),
    ("googlear", [
        "googleo", "googleas", "googlea", "googleamos", "googleáis", "googlean",
        "googleé", "googleaste", "googleó", "googleamos", "googleasteis", "googlearon",
        "googleaba", "googleabas", "googleaba", "googleábamos", "googleabais", "googleaban",
    ]),
    ("focalizar", [
        "focalizo", "focalizas", "focaliza", "focalizamos", "focalizáis", "focalizan",
        "focalicé", "focalizaste", "focalizó", "focalizamos", "focalizasteis", "focalizaron",
        "focalizaba", "focalizabas", "focalizaba", "focalizábamos", "focalizabais", "focalizaban",
    ]),
    ("linkear", [
        "linkeo", "linkeas", "linkea", "linkeamos", "linkeáis", "linkean",
        "linkeé", "linkeaste", "linkeó", "linkeamos", "linkeasteis", "linkearon",
        "linkeaba", "linkeabas", "linkeaba", "linkeábamos", "linkeabais", "linkeaban",
    ]),
    ("usar", [
        "uso", "usas", "usa", "usamos", "usáis", "usan",
        "usé", "usaste", "usó", "usamos", "usasteis", "usaron",
        "usaba", "usabas", "usaba", "usábamos", "usabais", "usaban",
    ]),
    ("comprar", [
        "compro", "compras", "compra", "compramos", "compráis", "compran",
        "compré", "compraste", "compró", "compramos", "comprasteis", "compraron",
        "compraba", "comprabas", "compraba", "comprábamos", "comprabais", "compraban",
    ]),
    ("dudar", [
        "dudo", "dudas", "duda", "dudamos", "dudáis", "dudan",
        "dudé", "dudaste", "dudó", "dudamos", "dudasteis", "dudaron",
        "dudaba", "dudabas", "dudaba", "dudábamos", "dudabais", "dudaban",
    ]),
    ("saltar", [
        "salto", "saltas", "salta", "saltamos", "saltáis", "saltan",
        "salté", "saltaste", "saltó", "saltamos", "saltasteis", "saltaron",
        "saltaba", "saltabas", "saltaba", "saltábamos", "saltabais", "saltaban",
    ]),
    ("echar", [
        "echo", "echas", "echa", "echamos", "echáis", "echan",
        "eché", "echaste", "echó", "echamos", "echasteis", "echaron",
        "echaba", "echabas", "echaba", "echábamos", "echabais", "echaban",
    ]),
    ("tomar", [
        "tomo", "tomas", "toma", "tomamos", "tomáis", "toman",
        "tomé", "tomaste", "tomó", "tomamos", "tomasteis", "tomaron",
        "tomaba", "tomabas", "tomaba", "tomábamos", "tomabais", "tomaban",
    ]),
];

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let table = VerbTable::bundled();
    let mut cells = 0;
    let mut wrong = Vec::new();
    for (lemma, expected) in REFERENCE {
        let forms = table.paradigm(lemma).map_err(|e| format!("{lemma}: {e}"))?.cells();
        let by_cell: BTreeMap<Cell, String> = forms.into_iter().map(|f| (f.cell(), f.surface)).collect();
        for (cell, want) in Cell::all().zip(expected) {
            cells += 1;
            let got = by_cell.get(&cell).map(String::as_str).unwrap_or("<missing>");
            if got != *want {
                wrong.push(format!("{lemma} {:?} {}{:?}: {got} != {want}", cell.tense, cell.person, cell.number));
            }
        }
    }
    let elapsed = start.elapsed();
    check(wrong.is_empty(), format!("{} of {cells} cells differ: {}", wrong.len(), wrong.join("; ")))?;
    check(cells == 216, format!("{cells} cells checked"))?;
    check(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("216/216 cells exact, {elapsed:.2?}"))
}

/// Every occurrence of every phrase, by direct comparison of token windows.
fn oracle_candidates(tokens: &[Token], lexicon: &ExpandedLexicon) -> Vec<(usize, usize, usize, Variant)> {
    let mut out = Vec::new();
    for (idx, e) in lexicon.iter().enumerate() {
        for (pattern, integrated) in e.surfaces.phrases() {
            let variant = if integrated { Variant::Integrated } else { Variant::Light };
            for s in 0..tokens.len() {
                let window = &tokens[s..(s + pattern.len()).min(tokens.len())];
                if window.len() == pattern.len()
                    && window.iter().zip(&pattern).all(|(t, p)| t.kind == TokenKind::Word && &t.surface == p)
                {
                    out.push((s, s + pattern.len(), idx, variant));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Chooses spans (longest, then leftmost) that overlap no chosen span, and
/// keeps every candidate on a chosen span.
fn oracle_resolve(candidates: Vec<(usize, usize, usize, Variant)>) -> Vec<(usize, usize, usize, Variant)> {
    let mut spans: Vec<(usize, usize)> = candidates.iter().map(|c| (c.0, c.1)).collect::<BTreeSet<_>>().into_iter().collect();
    spans.sort_by_key(|&(s, e)| (usize::MAX - (e - s), s));
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    for (s, e) in spans {
        if chosen.iter().all(|&(cs, ce)| e <= cs || ce <= s) {
            chosen.push((s, e));
        }
    }
    candidates.into_iter().filter(|c| chosen.contains(&(c.0, c.1))).collect()
}

type Key = (String, WordClass, Variant, (usize, usize));

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let lexicon = bundled_expanded();
    let matcher = Matcher::new(&lexicon);
    let posts = random_match_posts(&lexicon, 1000, 20_240_601);
    let (mut discrepancies, mut total) = (0, 0);
    let mut first = None;
    for post in &posts {
        let tokens = tokenize(&post.text);
        let want: BTreeSet<Key> = oracle_resolve(oracle_candidates(&tokens, &lexicon))
            .into_iter()
            .map(|(s, e, idx, v)| {
                let entry = &lexicon.entries[idx].entry;
                (entry.base.clone(), entry.word_class, v, (tokens[s].char_span.0, tokens[e - 1].char_span.1))
            })
            .collect();
        let got: BTreeSet<Key> = match_post(post, &matcher)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|r: MatchRecord| (r.base, r.word_class, r.variant, r.char_span))
            .collect();
        total += want.len();
        if want != got {
            discrepancies += 1;
            first.get_or_insert_with(|| format!("{}: oracle {want:?} vs matcher {got:?}", post.text));
        }
    }
    let elapsed = start.elapsed();
    check(discrepancies == 0, format!("{discrepancies} posts differ; first: {}", first.unwrap_or_default()))?;
    check(total > 1000, format!("only {total} planted matches"))?;
    check(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!("1000 posts, {total} matches, 0 discrepancies, {elapsed:.2?}"))
}

fn criterion_3() -> Outcome {
    let lexicon = bundled_expanded();
    let (a, b) = compare_fixture(&lexicon);
    for (summary, counts) in [(&a, compare_counts_a()), (&b, compare_counts_b())] {
        let table = top_k_rate_table(summary, 50, WordClass::Loanword);
        check(table.rows.len() == 50, "expected 50 rows")?;
        let by_base: BTreeMap<&str, Option<f64>> = table.rows.iter().map(|r| (r.base.as_str(), r.rate)).collect();
        for ((base, _), k) in summary.counts.keys().zip(counts) {
            let _ = k;
            let v = summary.counts[&(base.clone(), WordClass::Loanword)];
            let want = v.integrated as f64 / COMPARE_USES_PER_WORD as f64;
            check(by_base[base.as_str()] == Some(want), format!("{base}: {:?} != {want}", by_base[base.as_str()]))?;
        }
    }
    let report = compare_domains(&a, &b, WordClass::Loanword, 50, 1).map_err(|e| e.to_string())?;
    check(report.rows.len() == 50, format!("{} paired words", report.rows.len()))?;
    check((report.mean_rate_a - 0.91).abs() <= 0.001, format!("mean A {}", report.mean_rate_a))?;
    check((report.mean_rate_b - 0.82).abs() <= 0.001, format!("mean B {}", report.mean_rate_b))?;
    let w = report.wilcoxon.as_ref().ok_or("no test")?;
    check(w.p_value < 0.01, format!("p = {}", w.p_value))?;
    Ok(format!("means {:.4} vs {:.4}, Wilcoxon p = {:.2e}", report.mean_rate_a, report.mean_rate_b, w.p_value))
}

/// Two-sided p by listing all sign assignments.
fn enumerate_p(diffs: &[f64]) -> f64 {
    let d: Vec<f64> = diffs.iter().copied().filter(|x| *x != 0.0).collect();
    let mut abs: Vec<(f64, usize)> = d.iter().enumerate().map(|(i, x)| (x.abs(), i)).collect();
    abs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut rank = vec![0.0; d.len()];
    let mut i = 0;
    while i < abs.len() {
        let j = (i..abs.len()).take_while(|&j| abs[j].0 == abs[i].0).count() + i;
        for item in &abs[i..j] {
            rank[item.1] = (i + 1 + j) as f64 / 2.0;
        }
        i = j;
    }
    let observed: f64 = d.iter().zip(&rank).filter(|(x, _)| **x > 0.0).map(|(_, r)| r).sum();
    let n = d.len();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        let w: f64 = (0..n).filter(|k| mask >> k & 1 == 1).map(|k| rank[k]).sum();
        le += u64::from(w <= observed + 1e-9);
        ge += u64::from(w >= observed - 1e-9);
    }
    let total = (1u64 << n) as f64;
    (2.0 * (le as f64 / total).min(ge as f64 / total)).min(1.0)
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 1..=12 {
        for trial in 0..20 {
            let diffs: Vec<f64> = (0..n)
                .map(|_| {
                    let magnitude = if trial % 2 == 0 { rng.gen_range(1..6) as f64 } else { rng.gen_range(0.01..5.0) };
                    if rng.gen_bool(0.5) { magnitude } else { -magnitude }
                })
                .collect();
            let want = enumerate_p(&diffs);
            let pairs: Vec<(f64, f64)> = diffs.iter().map(|d| (0.0, *d)).collect();
            let got = wilcoxon_signed_rank(&pairs).map_err(|e| e.to_string())?;
            check(got.exact, format!("n = {n} not exact"))?;
            worst = worst.max((got.p_value - want).abs());
            cases += 1;
        }
    }
    check(worst <= 1e-9, format!("max |exact - enumerated| = {worst:e}"))?;
    let mut worst_normal: f64 = 0.0;
    for _ in 0..200 {
        let diffs: Vec<f64> = (1..=25).map(|k| if rng.gen_bool(0.35) { -(k as f64) } else { k as f64 }).collect();
        let (exact, _) = exact_p_value(&diffs).map_err(|e| e.to_string())?;
        let (normal, _) = normal_p_value(&diffs).map_err(|e| e.to_string())?;
        worst_normal = worst_normal.max((exact - normal).abs());
    }
    check(worst_normal <= 0.02, format!("normal vs exact at n = 25 differs by {worst_normal}"))?;
    Ok(format!("{cases} cases n <= 12 within {worst:.1e}; n = 25 normal within {worst_normal:.4}"))
}

fn synthetic_design(n: usize, beta: [f64; 3], seed: u64) -> Design {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = rand_distr_normal;
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let x = [normal(&mut rng), normal(&mut rng)];
        let eta = beta[0] + beta[1] * x[0] + beta[2] * x[1];
        let p = 1.0 / (1.0 + (-eta).exp());
        rows.push(x.to_vec());
        y.push(if rng.gen::<f64>() < p { 1.0 } else { 0.0 });
    }
    Design::with_intercept(&["x1", "x2"], &rows, y)
}

/// Box-Muller standard normal.
fn rand_distr_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Plain gradient ascent on the penalized log-likelihood, coded from scratch.
fn gradient_descent_oracle(design: &Design, lambda: f64) -> Vec<f64> {
    let p = design.n_cols();
    let rows: Vec<Vec<f64>> = (0..design.n_rows()).map(|i| design.dense_row(i)).collect();
    let n = rows.len() as f64;
    let mut beta = vec![0.0; p];
    for _ in 0..20_000 {
        let mut grad = vec![0.0; p];
        for (x, y) in rows.iter().zip(&design.y) {
            let eta: f64 = x.iter().zip(&beta).map(|(a, b)| a * b).sum();
            let r = y - 1.0 / (1.0 + (-eta).exp());
            for j in 0..p {
                grad[j] += r * x[j];
            }
        }
        for j in 0..p {
            if design.columns[j].penalized {
                grad[j] -= 2.0 * lambda * beta[j];
            }
        }
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm < 1e-7 * n {
            break;
        }
        for j in 0..p {
            beta[j] += 4.0 * grad[j] / n;
        }
    }
    beta
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn criterion_5() -> Outcome {
    let start = Instant::now();

    let small = synthetic_design(300, [0.2, 0.7, -1.1], 51);
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let mut worst_fd: f64 = 0.0;
    for lambda in [0.0, 0.3, 5.0] {
        let beta: Vec<f64> = (0..small.n_cols()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = penalized_gradient(&small, &beta, lambda);
        let fd: Vec<f64> = (0..beta.len())
            .map(|j| {
                let h = 1e-5;
                let mut up = beta.clone();
                let mut down = beta.clone();
                up[j] += h;
                down[j] -= h;
                (penalized_log_likelihood(&small, &up, lambda) - penalized_log_likelihood(&small, &down, lambda)) / (2.0 * h)
            })
            .collect();
        let diff: Vec<f64> = g.iter().zip(&fd).map(|(a, b)| a - b).collect();
        worst_fd = worst_fd.max(norm(&diff) / norm(&g));
    }
    check(worst_fd < 1e-6, format!("gradient relative error {worst_fd:e}"))?;

    let truth = [0.5, -1.0, 2.0];
    let design = synthetic_design(10_000, truth, 0);
    let fit = fit_ridge_logistic(&design, 1e-6, &FitOptions::default()).map_err(|e| e.to_string())?;
    for (b, t) in fit.beta.iter().zip(truth) {
        check((b - t).abs() <= 0.1, format!("recovered {:?} vs {truth:?}", fit.beta))?;
    }
    let oracle = gradient_descent_oracle(&design, 1e-6);
    let gap = fit.beta.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    check(gap < 1e-4, format!("solver {:?} vs gradient-descent oracle {oracle:?}", fit.beta))?;

    let quick = FitOptions { standard_errors: false, ..FitOptions::default() };
    let mut norms = Vec::new();
    for lambda in DEFAULT_L2_GRID {
        norms.push(norm(&fit_ridge_logistic(&design, lambda, &quick).map_err(|e| e.to_string())?.beta));
    }
    check(norms.windows(2).all(|w| w[1] <= w[0] + 1e-12), format!("norms not monotone: {norms:?}"))?;

    let spec = RegressionSpec::new(WordClass::Loanword, 99);
    let runs: Vec<String> = (0..2)
        .map(|_| grid_search_l2(&design, &spec).map(|r| serde_json::to_string(&r).expect("serializes")))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    check(runs[0] == runs[1], "grid search output differs between runs")?;

    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"))?;
    Ok(format!(
        "FD rel err {worst_fd:.1e}; beta = ({:.3}, {:.3}, {:.3}), oracle gap {gap:.1e}; norms monotone; deterministic; {elapsed:.1?}",
        fit.beta[0], fit.beta[1], fit.beta[2]
    ))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let lexicon = bundled_expanded();
    let matcher = Matcher::new(&lexicon);
    let model = PlantedModel::default();
    let posts = planted_regression_corpus(&lexicon, 5000, 10, 606, &model);
    let gazetteer = Gazetteer::bundled();
    let ctx = ProfileContext { identifier: LanguageModel::bundled(), native_matcher: &matcher, gazetteer: &gazetteer };
    let tables = build_features(posts, &matcher, &ctx).map_err(|e| e.to_string())?;
    let spec = RegressionSpec::new(WordClass::Loanword, 7);
    let result = regress(&tables, &spec).map_err(|e| e.to_string())?;
    check(result.n_observations == 50_000, format!("{} loanword observations", result.n_observations))?;
    let expected = [
        ("Has hashtag", model.hashtag),
        ("Has mention", model.mention),
        ("Latin America", model.latin_america),
        ("Europe", model.europe),
        ("US", model.us),
        ("Other", model.other),
        ("High Spanish", model.high_spanish),
        ("Medium Spanish", model.medium_spanish),
    ];
    let mut summary = Vec::new();
    for (name, truth) in expected {
        let beta = result.coefficient(name).ok_or(format!("no column {name}"))?.beta;
        check(beta.signum() == truth.signum(), format!("{name}: fitted {beta:.3}, planted {truth}"))?;
        summary.push(format!("{name} {beta:+.2}"));
    }
    Ok(format!("n = {}, l2 = {}, {}; {:.1?}", result.n_observations, result.chosen_l2, summary.join(", "), start.elapsed()))
}

fn rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmRSS:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

/// Scans `path` and returns (seconds, peak RSS growth in KiB, records, posts).
fn timed_scan(path: &PathBuf, matcher: &Matcher, threads: usize) -> Result<(f64, u64, u64, u64), String> {
    let baseline = rss_kib().unwrap_or(0);
    let done = Arc::new(AtomicBool::new(false));
    let sampler = {
        let done = Arc::clone(&done);
        std::thread::spawn(move || {
            let mut peak = 0;
            while !done.load(Ordering::Relaxed) {
                peak = peak.max(rss_kib().unwrap_or(0));
                std::thread::sleep(Duration::from_millis(5));
            }
            peak
        })
    };
    let start = Instant::now();
    let mut records = 0u64;
    let scanned = scan_jsonl(std::slice::from_ref(path), matcher, threads, |_: &MatchRecord| records += 1);
    let secs = start.elapsed().as_secs_f64();
    done.store(true, Ordering::Relaxed);
    let peak = sampler.join().expect("sampler thread");
    let (_, stats) = scanned.map_err(|e| e.to_string())?;
    Ok((secs, peak.saturating_sub(baseline), records, stats.posts))
}

fn criterion_7() -> Outcome {
    let lexicon = bundled_expanded();
    let matcher = bundled_matcher();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let write = |name: &str, n: u64| -> Result<PathBuf, String> {
        let path = dir.path().join(name);
        let file = File::create(&path).map_err(|e| e.to_string())?;
        write_throughput_corpus(BufWriter::new(file), &lexicon, n, 7).map_err(|e| e.to_string())?;
        Ok(path)
    };
    let small = write("small.jsonl", 100_000)?;
    let large = write("large.jsonl", 1_000_000)?;

    let (_, small_mem, _, _) = timed_scan(&small, &matcher, 4)?;
    let (t1, mem1, records1, posts1) = timed_scan(&large, &matcher, 1)?;
    let (t4, mem4, records4, posts4) = timed_scan(&large, &matcher, 4)?;
    check(posts1 == 1_000_000 && posts4 == 1_000_000, format!("read {posts1} and {posts4} posts"))?;
    check(records1 == records4, format!("record counts differ: {records1} vs {records4}"))?;
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let speedup = t1 / t4;
    let detail = format!(
        "1M posts: {t1:.1}s at 1 thread, {t4:.1}s at 4 threads (speedup {speedup:.2}x on {cores} core(s)); \
         peak RSS growth {} MiB (100k posts: {} MiB)",
        mem1.max(mem4) / 1024,
        small_mem / 1024
    );
    check(t1 < 600.0 && t4 < 600.0, format!("too slow; {detail}"))?;
    // Memory must not grow with corpus size: 10x the posts, same footprint.
    check(mem4 <= small_mem + 32 * 1024 && mem1.max(mem4) <= 256 * 1024, format!("memory grows with input; {detail}"))?;
    check(speedup >= 2.5, format!("speedup below 2.5x; {detail}"))?;
    Ok(detail)
}

fn criterion_8() -> Outcome {
    let lexicon = Lexicon::bundled().map_err(|e| e.to_string())?;
    let found = (lexicon.count(WordClass::Loanword), lexicon.count(WordClass::Native));
    lexicon
        .check_inventory(EXPECTED_LOANWORDS, EXPECTED_NATIVE)
        .map_err(|e| format!("{e} (shipped: {} loanword, {} native)", found.0, found.1))?;
    Ok(format!("{} loanword and {} native pairs", found.0, found.1))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("morphology oracle", criterion_1),
        ("matcher brute-force equivalence", criterion_2),
        ("integration rates and domain contrast", criterion_3),
        ("Wilcoxon exactness", criterion_4),
        ("regression correctness", criterion_5),
        ("end-to-end planted model", criterion_6),
        ("scale and throughput", criterion_7),
        ("lexicon fidelity", criterion_8),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        match run() {
            Ok(detail) => println!("criterion {n} ({name}): PASS: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
