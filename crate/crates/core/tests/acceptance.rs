//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one result line; exits non-zero if any criterion fails.

mod support;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use support::rng;
use thaiprep::corpus_io::{PipelineConfig, RawThread};
use thaiprep::filters::{detect_language, train_profiles};
use thaiprep::metrics::{accuracy, boundary_prf, perplexity, BoundaryLabels};
use thaiprep::normalizer::{normalize_document, Normalizer, SpecialTokens};
use thaiprep::pipeline::{cmd_pipeline, RunPaths};
use thaiprep::postproc::{build_vocab, oov_count, oov_rate};
use thaiprep::tokenizer::{cluster_tcc, LexiconTrie, Token, TokenKind, TokenStream, Tokenizer};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn laugh_and_repetition() -> Outcome {
    let started = Instant::now();
    let input = "ฉันชอบมันมากกกก555555+";
    let expected_text = "ฉันชอบมันมาก [CREP] 4 [LAUGH]";
    let text = Normalizer::default().normalize_text(input);
    ensure(text == expected_text, || format!("normalized to {text:?}"))?;

    let config = PipelineConfig::default();
    let raw = RawThread::new("t1", "", input);
    let doc = normalize_document(&raw, &config).map_err(|e| e.to_string())?;
    ensure(doc.text == expected_text, || format!("document normalized to {:?}", doc.text))?;

    let trie = LexiconTrie::from_words(["ฉัน", "ชอบ", "มัน", "มาก"]);
    let stream = Tokenizer::new(trie, SpecialTokens::default()).tokenize(&text);
    let surfaces: Vec<&str> = stream.surfaces().collect();
    let expected = ["ฉัน", "ชอบ", "มัน", "มาก", "[CREP]", "4", "[LAUGH]"];
    ensure(surfaces == expected, || format!("tokens {surfaces:?}"))?;
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("7 tokens, {elapsed:?}"))
}

fn perplexity_fixtures() -> Outcome {
    let fixtures = [(3.528132, 34.06028), (3.173512419, 23.89125), (2.7334368, 15.38567)];
    let mut worst: f64 = 0.0;
    for (nll, expected) in fixtures {
        let got = perplexity(nll).map_err(|e| e.to_string())?;
        let rel = ((got - expected) / expected).abs();
        ensure(rel <= 1e-4, || format!("perplexity({nll}) = {got}, expected {expected}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("max relative error {worst:.2e}"))
}

fn boundary_counts() -> Outcome {
    let mut rng = rng(3);
    for case in 0..1000 {
        let len = rng.gen_range(0..=200);
        let density: f64 = rng.gen();
        let predicted: Vec<bool> = (0..len).map(|_| rng.gen_bool(density)).collect();
        let gold: Vec<bool> = (0..len).map(|_| rng.gen_bool(density)).collect();
        let report = boundary_prf(
            &BoundaryLabels::new(predicted.clone()),
            &BoundaryLabels::new(gold.clone()),
        )
        .map_err(|e| e.to_string())?;
        let (tp, fp, fn_) = support::naive_boundary_counts(&predicted, &gold);
        ensure((report.tp, report.fp, report.fn_) == (tp, fp, fn_), || {
            format!("case {case}: got {:?}, oracle {:?}", (report.tp, report.fp, report.fn_), (tp, fp, fn_))
        })?;
    }
    Ok("1000/1000 label pairs agree on tp/fp/fn".into())
}

/// Cluster pool for random segmentation instances.
const POOL: &[&str] = &[
    "ก", "ข", "ค", "ม", "ล", "ส", "ตา", "มา", "กิ", "น้ำ", "เกา", "ไป", "ดี", "รัก", "ห", "ab", "x", "9",
];

fn segmentation_oracle() -> Outcome {
    let started = Instant::now();
    let mut rng = rng(4);
    let mut agree = 0;
    for case in 0..500 {
        let n_words = rng.gen_range(1..=50);
        let dict: HashSet<String> = (0..n_words)
            .map(|_| (0..rng.gen_range(1..=4)).map(|_| *POOL.choose(&mut rng).unwrap()).collect())
            .collect();
        let dict_words: Vec<&String> = dict.iter().collect();
        let mut text = String::new();
        let mut clusters = Vec::new();
        loop {
            let piece: String = if rng.gen_bool(0.6) {
                dict_words.choose(&mut rng).unwrap().to_string()
            } else {
                POOL.choose(&mut rng).unwrap().to_string()
            };
            let candidate = format!("{text}{piece}");
            let c = cluster_tcc(&candidate);
            if c.len() > 20 {
                break;
            }
            text = candidate;
            clusters = c;
            if rng.gen_bool(0.1) {
                break;
            }
        }
        if text.is_empty() {
            agree += 1;
            continue;
        }
        let cluster_surfaces: Vec<String> = clusters.iter().map(|c| c.surface.clone()).collect();
        let expected = support::oracle_segmentation(&cluster_surfaces, &dict);
        let trie = LexiconTrie::from_words(dict.iter());
        let got: Vec<String> = Tokenizer::new(trie, SpecialTokens::default())
            .tokenize(&text)
            .surfaces()
            .map(str::to_string)
            .collect();
        ensure(got == expected, || {
            format!("case {case}: text {text:?} dict {dict:?}: got {got:?}, oracle {expected:?}")
        })?;
        agree += 1;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{agree}/500 instances agree, {elapsed:.2?}"))
}

/// Random text over an alphabet that exercises every normalization rule.
fn fuzz_text(rng: &mut rand_chacha::ChaCha8Rng) -> String {
    const PIECES: &[&str] = &[
        "5", "5", "5", "+", " ", " ", "\n", "\t", "\u{a0}", "<", ">", "br", "p", "&", "amp;", "#", ";", "/", "(", ")",
        "[", "]", "{", "}", "x", "X", "a", "B", "0", "1", "7", ",", ".", ":", "-", "๒", "๕", "บาท", "$", "ก",
        "ข", "า", "ำ", "ั", "ิ", "ี", "ุ", "ู", "่", "้", "๊", "๋", "์", "ํ", "เ", "แ", "ไ", "ะ", "ๆ", "😂",
        "👍", "🏽", "\u{200d}", "[CREP]", "[WREP]", "[NUM]", "[LAUGH]", "CREP", "ดี", "มาก", "ab", "ab ",
    ];
    let len = rng.gen_range(0..60);
    let mut s = String::new();
    for _ in 0..len {
        if rng.gen_bool(0.08) {
            // any scalar value, biased toward the BMP
            let c = if rng.gen_bool(0.8) {
                char::from_u32(rng.gen_range(0x20..0xD800)).unwrap()
            } else {
                char::from_u32(rng.gen_range(0x10000..0x110000)).unwrap_or('?')
            };
            s.push(c);
        } else {
            s.push_str(PIECES.choose(rng).unwrap());
        }
    }
    s
}

fn normalization_idempotence() -> Outcome {
    let config = PipelineConfig::default();
    let mut rng = rng(5);
    for case in 0..10_000 {
        let text = fuzz_text(&mut rng);
        let once = normalize_document(&RawThread::new("f", "", text.clone()), &config)
            .map_err(|e| e.to_string())?
            .text;
        let twice = normalize_document(&RawThread::new("f", "", once.clone()), &config)
            .map_err(|e| e.to_string())?
            .text;
        ensure(once == twice, || format!("case {case}: {text:?} -> {once:?} -> {twice:?}"))?;
    }
    Ok("0 violations in 10000 inputs".into())
}

fn tcc_integrity() -> Outcome {
    let trie = thaiprep::tokenizer::load_lexicon(&[support::lexicon_path()], &SpecialTokens::default())
        .map_err(|e| e.to_string())?;
    let tokenizer = Tokenizer::new(trie, SpecialTokens::default());
    let mut rng = rng(6);
    for case in 0..10_000 {
        let len = rng.gen_range(0..40);
        let text: String = (0..len)
            .map(|_| {
                if rng.gen_bool(0.05) {
                    ' '
                } else {
                    char::from_u32(rng.gen_range(0x0E01..=0x0E5B)).unwrap_or('ก')
                }
            })
            .collect();
        let clusters = cluster_tcc(&text);
        let rebuilt: String = clusters.iter().map(|c| c.surface.as_str()).collect();
        ensure(rebuilt == text, || format!("case {case}: clusters of {text:?} rebuild {rebuilt:?}"))?;
        let mut bounds: HashSet<usize> = clusters.iter().map(|c| c.start).collect();
        bounds.insert(text.chars().count());
        for t in tokenizer.tokenize(&text).iter() {
            ensure(bounds.contains(&t.start) && bounds.contains(&t.end), || {
                format!("case {case}: token {:?} at {}..{} splits a cluster of {text:?}", t.surface, t.start, t.end)
            })?;
        }
    }
    Ok("0 violations in 10000 strings".into())
}

fn stream_of(tokens: &[String]) -> TokenStream {
    let mut at = 0;
    TokenStream::from_tokens(
        tokens
            .iter()
            .map(|s| {
                let n = s.chars().count();
                at += n;
                Token::new(s.as_str(), TokenKind::Word, at - n, at)
            })
            .collect(),
    )
}

fn vocab_oracle() -> Outcome {
    let mut rng = rng(7);
    for case in 0..100 {
        let n_docs = rng.gen_range(0..50);
        let alphabet = rng.gen_range(1..400);
        let budget = rng.gen_range(0..=10_000);
        let docs: Vec<Vec<String>> = (0..n_docs)
            .map(|_| {
                let n = rng.gen_range(0..=(budget / n_docs.max(1)));
                // skewed draw so counts tie and differ
                (0..n).map(|_| format!("w{}", rng.gen_range(0..alphabet) % rng.gen_range(1..=alphabet))).collect()
            })
            .collect();
        let k = rng.gen_range(1..300);
        let streams: Vec<TokenStream> = docs.iter().map(|d| stream_of(d)).collect();
        let table = build_vocab(&streams, k).map_err(|e| e.to_string())?;
        let expected = support::naive_vocab(&docs, k);
        ensure(table.entries() == expected.as_slice(), || format!("case {case}: vocab differs from naive count"))?;
        let (oov, total) = support::naive_oov(&docs, &expected);
        let counted = oov_count(&streams, &table);
        ensure((counted.oov, counted.total) == (oov, total), || {
            format!("case {case}: oov {:?} vs naive {:?}", (counted.oov, counted.total), (oov, total))
        })?;
        if total > 0 && !table.is_empty() {
            let rate = oov_rate(&streams, &table).map_err(|e| e.to_string())?;
            ensure(rate == oov as f64 / total as f64, || format!("case {case}: rate {rate}"))?;
        }
    }
    let tokens = ["a", "b", "c", "a"].map(String::from);
    let vocab = build_vocab([&stream_of(&["a".into(), "b".into()])], 2).map_err(|e| e.to_string())?;
    let rate = oov_rate([&stream_of(&tokens)], &vocab).map_err(|e| e.to_string())?;
    ensure(rate == 0.25, || format!("[a,b,c,a] vs {{a,b}} gave {rate}"))?;
    Ok("100/100 corpora match, [a,b,c,a] vs {a,b} = 0.25".into())
}

fn language_filter() -> Outcome {
    let words = support::thai_words();
    let mut train_rng = rng(8);
    let mut train: Vec<(String, &str)> = Vec::new();
    for _ in 0..50 {
        let n = train_rng.gen_range(20..80);
        train.push((support::thai_text(&mut train_rng, &words, n), "th"));
        let sentences = train_rng.gen_range(2..8);
        let doc = (0..sentences).map(|_| support::english_text(&mut train_rng, 10)).collect::<Vec<_>>().join(" ");
        train.push((doc, "en"));
    }
    let profiles = train_profiles(train.iter().map(|(t, l)| (t.as_str(), *l))).map_err(|e| e.to_string())?;

    let mut test_rng = rng(9);
    let mut gold = Vec::new();
    let mut predicted = Vec::new();
    for i in 0..100 {
        let (doc, lang) = if i % 2 == 0 {
            let n = test_rng.gen_range(10..100);
            (support::noisy_thai_text(&mut test_rng, &words, n), "th")
        } else {
            let sentences = test_rng.gen_range(1..6);
            let doc = (0..sentences).map(|_| support::english_text(&mut test_rng, 8)).collect::<Vec<_>>().join(" ");
            (doc, "en")
        };
        let (detected, _) = detect_language(&doc, &profiles).map_err(|e| e.to_string())?;
        predicted.push(detected);
        gold.push(lang.to_string());
    }
    let acc = accuracy(&predicted, &gold).map_err(|e| e.to_string())?;
    ensure(acc >= 0.95, || format!("accuracy {acc:.3}"))?;
    Ok(format!("held-out accuracy {:.1}% (50+50 training docs)", acc * 100.0))
}

fn pipeline_config(jobs: usize) -> PipelineConfig {
    PipelineConfig { lexicon_paths: vec![support::lexicon_path()], jobs, ..Default::default() }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("threads.jsonl");
    support::write_threads(&input, &support::forum_threads(10, 1000, 20..160));
    let mut runs = Vec::new();
    for (i, jobs) in [1, 3].into_iter().enumerate() {
        let mut paths = RunPaths::new(&input, dir.path().join(format!("out{i}.tsv")));
        paths.manifest = Some(dir.path().join(format!("manifest{i}.json")));
        paths.vocab = Some(dir.path().join(format!("vocab{i}.tsv")));
        let manifest = cmd_pipeline(&paths, &pipeline_config(jobs)).map_err(|e| e.to_string())?;
        ensure(manifest.counts.reconciles(), || format!("counts do not reconcile: {:?}", manifest.counts))?;
        ensure(manifest.counts.read == 1000, || format!("read {}", manifest.counts.read))?;
        let read = |p: &std::path::Path| std::fs::read(p).map_err(|e| e.to_string());
        runs.push((
            read(&paths.output)?,
            read(paths.manifest.as_ref().unwrap())?,
            read(paths.vocab.as_ref().unwrap())?,
            manifest,
        ));
    }
    ensure(runs[0].0 == runs[1].0, || "token outputs differ".into())?;
    ensure(runs[0].1 == runs[1].1, || "manifests differ".into())?;
    ensure(runs[0].2 == runs[1].2, || "vocabularies differ".into())?;
    let counts = &runs[0].3.counts;
    Ok(format!(
        "identical outputs across 2 runs (jobs 1 and 3); read {} = emitted {} + filtered {:?}",
        counts.read, counts.emitted, counts.filtered
    ))
}

fn throughput() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("threads.jsonl");
    let threads: Vec<RawThread> = support::forum_threads(11, 5000, 95..130);
    support::write_threads(&input, &threads);
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let paths = RunPaths::new(&input, dir.path().join("out.tsv"));
    let config = pipeline_config(cores);
    // warm-up builds the lexicon and profiles once outside the timing
    thaiprep::pipeline::Pipeline::new(&config).map_err(|e| e.to_string())?;
    let started = Instant::now();
    let manifest = cmd_pipeline(&paths, &config).map_err(|e| e.to_string())?;
    let secs = started.elapsed().as_secs_f64();
    let rate = threads.len() as f64 / secs;
    let mean_tokens = manifest.tokens as f64 / manifest.counts.emitted.max(1) as f64;
    let detail = format!(
        "{rate:.0} threads/s on {cores} core(s), {} emitted, mean {mean_tokens:.0} tokens/doc",
        manifest.counts.emitted
    );
    ensure(rate >= 1000.0, || detail.clone())?;
    Ok(detail)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("laugh and repetition example", laugh_and_repetition),
        ("perplexity fixtures", perplexity_fixtures),
        ("boundary P/R/F1 vs brute force", boundary_counts),
        ("segmentation vs exhaustive oracle", segmentation_oracle),
        ("normalization idempotence", normalization_idempotence),
        ("TCC integrity", tcc_integrity),
        ("vocabulary and OOV oracle", vocab_oracle),
        ("language filter accuracy", language_filter),
        ("pipeline determinism", determinism),
        ("pipeline throughput", throughput),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
