//! End-to-end acceptance checks. Runs as a plain binary and prints one line
//! per criterion; exits non-zero if any fails.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dld_core::bench::{
    compute_hits, compute_mrr, dataset_hash, generate_choice_problems, rank_instance, render_csv, run_config,
    run_matrix, write_manifest, RunManifest,
};
use dld_core::domain::{Dataset, MatchConfig, SemanticGroup, StsBackendKind};
use dld_core::ingest::extract_ontology;
use dld_core::lse::{enrich, EnrichmentResult, KnowledgeSource, RecordCache, WikidataClient, WikidataConfig};
use dld_core::prompt::PromptLimits;
use dld_core::scc::ContextScorer;
use dld_core::scoring::{CandidateRef, LabelSide, Matcher};
use dld_core::sts::embedding::EmbeddingSts;
use dld_core::sts::llm::{score_from_token_distribution, AnswerTokens, LlmSts, TokenDistribution};
use dld_core::sts::tfidf::{tfidf_similarity, tokenize, CorpusStats, TfidfSts};
use dld_core::sts::{SentenceScorer, StsContext, StsScore};
use dld_core::testkit::{
    fixtures_dir, mock_knowledge, mock_matcher, perfect_oracle_script, synthetic_dataset, wikidata_fixture, yes_no,
    FixtureIndex, HashingEmbedder, ScriptedLlm, WikidataStubTransport,
};
use dld_core::transport::{CountingTransport, FailingTransport};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// 1. TFIDF against a dense brute-force computation.

const WORDS: &[&str] = &[
    "loan", "amount", "rate", "term", "engine", "speed", "county", "route", "book", "title", "score", "age",
];

fn random_doc(rng: &mut ChaCha8Rng) -> String {
    let len = rng.random_range(0..8);
    (0..len)
        .map(|_| WORDS[rng.random_range(0..WORDS.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

fn oracle_tfidf(a: &str, b: &str, corpus: &[String]) -> f64 {
    let vocab: Vec<&str> = WORDS.to_vec();
    let n = corpus.len() as f64;
    let idf: Vec<f64> = vocab
        .iter()
        .map(|w| {
            let df = corpus.iter().filter(|d| d.split_whitespace().any(|t| t == *w)).count() as f64;
            ((1.0 + n) / (1.0 + df)).ln() + 1.0
        })
        .collect();
    let vec = |s: &str| -> Vec<f64> {
        vocab
            .iter()
            .zip(&idf)
            .map(|(w, i)| s.split_whitespace().filter(|t| t == w).count() as f64 * i)
            .collect()
    };
    let (va, vb) = (vec(a), vec(b));
    let dot: f64 = va.iter().zip(&vb).map(|(x, y)| x * y).sum();
    let na: f64 = va.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = vb.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

fn criterion_tfidf() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut comparisons = 0;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let docs: Vec<String> = (0..rng.random_range(1..7)).map(|_| random_doc(&mut rng)).collect();
        let stats = ok(CorpusStats::from_texts(docs.iter().map(String::as_str)))?;
        let mut texts = docs.clone();
        texts.push(random_doc(&mut rng));
        for a in &texts {
            for b in &texts {
                let got = tfidf_similarity(&tokenize(a), &tokenize(b), &stats);
                let want = oracle_tfidf(a, b, &docs);
                let diff = (got - want).abs();
                worst = worst.max(diff);
                ensure!(diff <= 1e-9, "{a:?} vs {b:?}: got {got}, oracle {want}");
                comparisons += 1;
            }
        }
    }
    Ok(format!("{comparisons} pairs, max |diff| {worst:.1e}"))
}

// ---------------------------------------------------------------------------
// 2. Yes/no ratio of the first-token distribution.

const TOKEN_POOL: &[&str] = &[
    "Yes", " yes", "YES", "y", "True", "No", "no ", "N", "false", "maybe", "the", "▁",
];

fn criterion_token_ratio() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tokens = AnswerTokens::default();
    let swapped = tokens.swapped();
    let is_yes = |t: &str| matches!(t.trim().to_lowercase().as_str(), "yes" | "y" | "true");
    let is_no = |t: &str| matches!(t.trim().to_lowercase().as_str(), "no" | "n" | "false");
    let mut fallbacks = 0;
    for i in 0..200 {
        let mut pool: Vec<&str> = TOKEN_POOL.to_vec();
        pool.shuffle(&mut rng);
        let k = rng.random_range(1..=pool.len());
        let mut weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
        let scale = rng.random_range(0.1..1.0) / weights.iter().sum::<f64>().max(1e-9);
        weights.iter_mut().for_each(|w| *w *= scale);
        // Every tenth case has no answer tokens at all.
        let chosen: Vec<&str> = if i % 10 == 0 {
            vec!["maybe", "the"]
        } else {
            pool[..k].to_vec()
        };
        let pairs: Vec<(String, f64)> = chosen
            .iter()
            .zip(weights.iter().chain(std::iter::repeat(&0.3)))
            .map(|(t, w)| (t.to_string(), *w))
            .collect();
        let dist = ok(TokenDistribution::new(pairs.clone()))?;

        let p_y: f64 = pairs.iter().filter(|(t, _)| is_yes(t)).map(|(_, p)| p).sum();
        let p_n: f64 = pairs.iter().filter(|(t, _)| is_no(t)).map(|(_, p)| p).sum();
        let s = score_from_token_distribution(&dist, &tokens);
        let c = score_from_token_distribution(&dist, &swapped);
        if p_y + p_n < 1e-12 {
            fallbacks += 1;
            ensure!(
                s.undetermined && s.value == 0.5,
                "case {i}: expected fallback, got {s:?}"
            );
            ensure!(
                c.undetermined && c.value == 0.5,
                "case {i}: swapped fallback, got {c:?}"
            );
        } else {
            let want = p_y / (p_y + p_n);
            ensure!(!s.undetermined, "case {i}: unexpected fallback");
            ensure!(
                (s.value - want).abs() <= 1e-12,
                "case {i}: got {}, want {want}",
                s.value
            );
            ensure!(
                (c.value - (1.0 - want)).abs() <= 1e-12,
                "case {i}: complement {} vs {}",
                c.value,
                1.0 - want
            );
        }
    }
    ensure!(fallbacks > 0, "no fallback case generated");
    Ok(format!("200 distributions, {fallbacks} fallbacks"))
}

// ---------------------------------------------------------------------------
// 3. MRR and Hits@k against a histogram computation.

fn criterion_metrics() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..1000 {
        let n = rng.random_range(2..60usize);
        let len = rng.random_range(1..40usize);
        let ranks: Vec<usize> = (0..len).map(|_| rng.random_range(1..=n)).collect();
        let mut histogram = BTreeMap::new();
        for &r in &ranks {
            *histogram.entry(r).or_insert(0usize) += 1;
        }
        let mrr_want: f64 = histogram.iter().map(|(&r, &c)| c as f64 / r as f64).sum::<f64>() / len as f64;
        let mrr = ok(compute_mrr(&ranks))?;
        ensure!((mrr - mrr_want).abs() <= 1e-12, "case {case}: MRR {mrr} vs {mrr_want}");
        let mut prev = 0.0;
        for k in 1..=n {
            let want = histogram.range(..=k).map(|(_, &c)| c).sum::<usize>() as f64 / len as f64;
            let got = ok(compute_hits(&ranks, k))?;
            ensure!((got - want).abs() <= 1e-12, "case {case}: Hits@{k} {got} vs {want}");
            ensure!(got >= prev, "case {case}: Hits@{k} decreased");
            prev = got;
        }
        ensure!(ok(compute_hits(&ranks, n))? == 1.0, "case {case}: Hits@N != 1");
    }
    Ok("1000 rank lists".into())
}

// ---------------------------------------------------------------------------
// 4. Identities between configurations.

fn criterion_identities() -> Check {
    let dataset = synthetic_dataset();
    let script = Arc::new(perfect_oracle_script(&dataset, &PromptLimits::default()));
    let scorers: Vec<(StsBackendKind, Arc<dyn SentenceScorer>)> = vec![
        (StsBackendKind::Tfidf, Arc::new(TfidfSts)),
        (
            StsBackendKind::Embedding,
            Arc::new(EmbeddingSts::new(Arc::new(HashingEmbedder::default()))),
        ),
        (StsBackendKind::Llm, Arc::new(LlmSts::new(script.clone()))),
    ];
    let mut matcher = Matcher::new().with_knowledge(Arc::new(mock_knowledge()));
    for (kind, s) in &scorers {
        matcher = matcher.with_sts(*kind, s.clone());
    }
    let instances = ok(generate_choice_problems(&dataset, 10, 7))?;
    let groups: HashMap<&str, &SemanticGroup> = dataset.groups.iter().map(|g| (g.group_id.as_str(), g)).collect();
    let mut pairs = 0;
    let mut raised = 0;

    for inst in &instances {
        let side = LabelSide {
            label: &inst.target_label,
            group: groups[inst.target_group_id.as_str()],
        };
        let cands: Vec<CandidateRef> = inst
            .candidates
            .iter()
            .map(|c| CandidateRef {
                description: &c.entry,
                glossary: groups[c.group_id.as_str()],
            })
            .collect();
        let corpus = ok(CorpusStats::from_texts(
            cands.iter().map(|c| c.description.text.as_str()),
        ))?;
        let ctx = StsContext {
            label: side.label,
            label_set: &side.group.labels,
            corpus: &corpus,
        };

        for (kind, scorer) in &scorers {
            for lse in [false, true] {
                let config = MatchConfig::new(*kind, lse, false);
                let ordered = ok(matcher.score_candidates(side, &cands, &config))?;
                let mut sts_only = Vec::new();
                for (i, c) in cands.iter().enumerate() {
                    sts_only.push((
                        i,
                        ok(matcher.text_similarity_score(side, c.description, &corpus, &config))?.score,
                    ));
                }
                sts_only.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                let got: Vec<usize> = ordered.iter().map(|(i, _)| *i).collect();
                let want: Vec<usize> = sts_only.iter().map(|(i, _)| *i).collect();
                ensure!(
                    got == want,
                    "{config} on {}: order {got:?} vs STS-only {want:?}",
                    side.label.text
                );
            }

            let off = MatchConfig::new(*kind, false, false);
            let on = MatchConfig::new(*kind, true, false);
            for c in &cands {
                let direct: StsScore = ok(scorer.score(&ctx, &side.label.text, c.description))?;
                let t_off = ok(matcher.text_similarity_score(side, c.description, &corpus, &off))?.score;
                let t_on = ok(matcher.text_similarity_score(side, c.description, &corpus, &on))?.score;
                ensure!(
                    t_off == direct.value,
                    "{off} {}: {t_off} != direct {}",
                    side.label.text,
                    direct.value
                );
                ensure!(t_on >= t_off, "{on} {}: {t_on} < {t_off}", side.label.text);
                if t_on > t_off {
                    raised += 1;
                }
                pairs += 1;
            }
        }
    }
    Ok(format!(
        "{} instances, {pairs} pairs, {raised} raised by enrichment",
        instances.len()
    ))
}

// ---------------------------------------------------------------------------
// 5. A model that answers "Yes" exactly on true pairs ranks perfectly.

fn criterion_perfect_oracle() -> Check {
    let dataset = synthetic_dataset();
    let script = Arc::new(perfect_oracle_script(&dataset, &PromptLimits::default()));
    let matcher = mock_matcher(script, Arc::new(mock_knowledge()));
    let mut summary = Vec::new();
    for n in [10, 40] {
        let instances = ok(generate_choice_problems(&dataset, n, 11))?;
        for name in ["L", "L-SCC"] {
            let config: MatchConfig = ok(name.parse())?;
            let report = ok(run_config(&dataset, &instances, n, &config, &matcher, None))?;
            ensure!(report.mrr == 1.0, "{name} N={n}: MRR {}", report.mrr);
            ensure!(report.hits[&1] == 1.0, "{name} N={n}: Hits@1 {}", report.hits[&1]);
            summary.push(format!("{name}@{n}"));
        }
    }
    Ok(format!("MRR 1.0 and Hits@1 1.0 for {}", summary.join(", ")))
}

// ---------------------------------------------------------------------------
// 6. Context scoring breaks a tie between homonymous labels.

fn criterion_scc_disambiguation() -> Check {
    let cars = SemanticGroup::from_pairs(
        "cars",
        [
            ("make", "manufacturer of the vehicle"),
            ("price", "listed sale price in dollars"),
            ("type", "body style of the vehicle such as sedan or coupe"),
        ],
    );
    let loans = SemanticGroup::from_pairs(
        "loans",
        [
            ("principal", "amount borrowed by the applicant"),
            ("apr", "annual percentage rate charged"),
            ("type", "loan product category such as mortgage or personal"),
        ],
    );
    let home_rule = |g: &SemanticGroup| {
        // Both label sets end in "type", so key on the whole set.
        let columns: Vec<String> = g.labels.iter().map(|l| format!("  - {}", l.text)).collect();
        format!(
            "[Column names]\n{}\nThe given glossary has these glossary terms.\n[Glossary terms]\n  - {}\n",
            columns.join("\n"),
            g.glossary[0].text
        )
    };
    let script = ScriptedLlm::new(yes_no(0.2))
        .rule(home_rule(&cars), yes_no(0.9))
        .rule(home_rule(&loans), yes_no(0.9));
    let tie = |_: &StsContext<'_>, _: &str, _: &dld_core::GlossaryEntry| Ok(StsScore::new(0.8));
    let matcher = Matcher::new()
        .with_sts(StsBackendKind::Llm, Arc::new(tie))
        .with_context(Arc::new(ContextScorer::new(Arc::new(script))));

    let mut results = Vec::new();
    for scc in [false, true] {
        let config = MatchConfig::new(StsBackendKind::Llm, false, scc);
        let mut ranks = Vec::new();
        // The truth sits first for one instance and second for the other.
        for (home, other, truth_index) in [(&cars, &loans, 0usize), (&loans, &cars, 1usize)] {
            let side = LabelSide {
                label: &home.labels[2],
                group: home,
            };
            let own = CandidateRef {
                description: &home.glossary[2],
                glossary: home,
            };
            let foreign = CandidateRef {
                description: &other.glossary[2],
                glossary: other,
            };
            let cands = if truth_index == 0 {
                [own, foreign]
            } else {
                [foreign, own]
            };
            ranks.push(ok(matcher.rank_candidates(side, &cands, truth_index, &config))?.rank_of_truth);
        }
        results.push(ok(compute_hits(&ranks, 1))?);
    }
    ensure!(results[0] == 0.0, "Hits@1 without context {}", results[0]);
    ensure!(results[1] == 1.0, "Hits@1 with context {}", results[1]);
    Ok("Hits@1 0.0 without context, 1.0 with".into())
}

// ---------------------------------------------------------------------------
// 7. Enrichment rescues a cryptic abbreviation.

fn criterion_lse_oov() -> Check {
    let dataset = synthetic_dataset();
    let matcher = Matcher::new().with_knowledge(Arc::new(mock_knowledge()));
    let instances = ok(generate_choice_problems(&dataset, 10, 5))?;
    let inst = instances
        .iter()
        .find(|i| i.target_label.text == "lvdd")
        .ok_or("no lvdd instance")?;
    let plain = ok(rank_instance(&dataset, inst, &ok("T".parse())?, &matcher))?.rank_of_truth;
    let enriched = ok(rank_instance(&dataset, inst, &ok("T-LSE".parse())?, &matcher))?.rank_of_truth;
    let sentences = ok(matcher.enrich(&inst.target_label, &ok("T-LSE".parse())?))?;
    ensure!(
        sentences
            .sentences
            .iter()
            .any(|s| s.starts_with("left ventricular end-diastolic dimension: ")),
        "enrichment sentences {:?}",
        sentences.sentences
    );
    ensure!(plain > 1, "T already ranks lvdd first");
    ensure!(enriched == 1, "T-LSE ranks lvdd at {enriched}");
    Ok(format!("rank {plain} under T, {enriched} under T-LSE"))
}

// ---------------------------------------------------------------------------
// 8. Ontology extraction on the bundled fixtures.

fn compare_extraction(
    files: Vec<std::path::PathBuf>,
    expected_path: &std::path::Path,
) -> std::result::Result<(usize, usize), String> {
    let dataset = ok(extract_ontology(&files))?;
    let expected: serde_json::Value = ok(serde_json::from_str(&ok(std::fs::read_to_string(expected_path))?))?;
    let want_entries = expected["entry_count"].as_u64().unwrap() as usize;
    let want_groups = expected["group_count"].as_u64().unwrap() as usize;
    ensure!(
        dataset.entry_count() == want_entries,
        "{} entries, expected {want_entries}",
        dataset.entry_count()
    );
    ensure!(
        dataset.groups.len() == want_groups,
        "{} groups, expected {want_groups}",
        dataset.groups.len()
    );
    let groups = expected["groups"].as_array().unwrap();
    for (got, want) in dataset.groups.iter().zip(groups) {
        ensure!(
            got.group_id == want["group_id"].as_str().unwrap(),
            "group {} vs {}",
            got.group_id,
            want["group_id"]
        );
        let entries = want["entries"].as_array().unwrap();
        ensure!(got.len() == entries.len(), "group {} size {}", got.group_id, got.len());
        for ((label, entry), w) in got.labels.iter().zip(&got.glossary).zip(entries) {
            ensure!(
                label.text == w["label"].as_str().unwrap(),
                "label {} vs {}",
                label.text,
                w["label"]
            );
            ensure!(
                entry.text == w["description"].as_str().unwrap(),
                "description of {}",
                label.text
            );
            ensure!(
                entry.entry_id == w["iri"].as_str().unwrap(),
                "iri {} vs {}",
                entry.entry_id,
                w["iri"]
            );
        }
    }
    Ok((want_entries, want_groups))
}

fn criterion_ontology() -> Check {
    let dir = fixtures_dir();
    let mut fibo: Vec<_> = ok(std::fs::read_dir(dir.join("fibo")))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "rdf"))
        .collect();
    fibo.sort();
    let (e, g) = compare_extraction(fibo, &dir.join("fibo_expected.json"))?;
    let (me, mg) = compare_extraction(
        vec![dir.join("ontology/minimal.rdf")],
        &dir.join("ontology/minimal_expected.json"),
    )?;
    ensure!(me == 2, "minimal ontology has {me} entries");
    Ok(format!("fixture {e} entries / {g} groups, minimal {me} / {mg}"))
}

// ---------------------------------------------------------------------------
// 9. Full matrix twice, offline.

fn offline_run(dataset: &Dataset, out: &std::path::Path) -> std::result::Result<(String, String, usize), String> {
    let failing = Arc::new(FailingTransport::new());
    let cache = Arc::new(ok(RecordCache::parse_str(wikidata_fixture()))?);
    let client = WikidataClient::new(failing.clone(), cache.clone(), WikidataConfig::default());
    let script = Arc::new(perfect_oracle_script(dataset, &PromptLimits::default()));
    let matcher = mock_matcher(script, Arc::new(client));
    let configs = MatchConfig::all();
    let outcome = ok(run_matrix(dataset, 10, 42, &configs, &matcher, None))?;
    ensure!(outcome.failures.is_empty(), "failures: {:?}", outcome.failures);
    ensure!(outcome.reports.len() == 12, "{} reports", outcome.reports.len());
    let manifest = RunManifest {
        seed: 42,
        n_choices: 10,
        configs: configs.iter().map(MatchConfig::name).collect(),
        dataset_hash: dataset_hash(dataset),
        cache_hash: Some(cache.content_hash()),
        instance_count: outcome.instance_count,
        failures: outcome.failures,
    };
    let path = ok(write_manifest(&manifest, out))?;
    Ok((
        render_csv(&outcome.reports),
        ok(std::fs::read_to_string(path))?,
        failing.attempts(),
    ))
}

fn criterion_determinism() -> Check {
    let dataset = synthetic_dataset();
    let a = ok(tempfile::tempdir())?;
    let b = ok(tempfile::tempdir())?;
    let (csv1, man1, calls1) = offline_run(&dataset, a.path())?;
    let (csv2, man2, calls2) = offline_run(&dataset, b.path())?;
    ensure!(csv1 == csv2, "CSV reports differ");
    ensure!(man1 == man2, "manifests differ");
    ensure!(calls1 + calls2 == 0, "{} network attempts", calls1 + calls2);
    Ok(format!(
        "12 configs, {} CSV bytes identical, 0 network calls",
        csv1.len()
    ))
}

// ---------------------------------------------------------------------------
// 10. A warm cache replays a cold run exactly.

fn enrich_all(dataset: &Dataset, source: &dyn KnowledgeSource) -> std::result::Result<Vec<EnrichmentResult>, String> {
    let config: MatchConfig = ok("T-LSE".parse())?;
    dataset
        .groups
        .iter()
        .flat_map(|g| &g.labels)
        .map(|l| ok(enrich(l, &config, source)))
        .collect()
}

fn without_hit_flag(results: &[EnrichmentResult]) -> std::result::Result<String, String> {
    let stripped: Vec<_> = results
        .iter()
        .map(|r| (&r.label_text, &r.sentences, &r.provenance))
        .collect();
    ok(serde_json::to_string(&stripped))
}

fn criterion_cache_replay() -> Check {
    let dataset = synthetic_dataset();
    let dir = ok(tempfile::tempdir())?;
    let path = dir.path().join("cache.jsonl");

    let stub = Arc::new(CountingTransport::new(WikidataStubTransport::new(ok(
        FixtureIndex::parse(wikidata_fixture()),
    )?)));
    let live = WikidataConfig {
        live: true,
        min_interval: Duration::ZERO,
        ..WikidataConfig::default()
    };
    let cold_client = WikidataClient::new(stub.clone(), Arc::new(ok(RecordCache::open(&path))?), live);
    let cold = enrich_all(&dataset, &cold_client)?;
    drop(cold_client);

    let failing = Arc::new(FailingTransport::new());
    let warm_client = WikidataClient::new(
        failing.clone(),
        Arc::new(ok(RecordCache::load(&path))?),
        WikidataConfig::default(),
    );
    let warm = enrich_all(&dataset, &warm_client)?;

    ensure!(stub.calls() > 0, "cold run made no requests");
    ensure!(cold.iter().any(|r| !r.cache_hit), "cold run reported only cache hits");
    ensure!(warm.iter().all(|r| r.cache_hit), "warm run missed the cache");
    ensure!(failing.attempts() == 0, "warm run made {} requests", failing.attempts());
    let (c, w) = (without_hit_flag(&cold)?, without_hit_flag(&warm)?);
    ensure!(c == w, "enrichment results differ between cold and warm runs");
    Ok(format!(
        "{} labels, {} cold requests, 0 warm requests",
        cold.len(),
        stub.calls()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("tfidf oracle equivalence", criterion_tfidf),
        ("token-ratio formula", criterion_token_ratio),
        ("metric oracles", criterion_metrics),
        ("framework identities", criterion_identities),
        ("perfect-oracle benchmark", criterion_perfect_oracle),
        ("context disambiguation", criterion_scc_disambiguation),
        ("enrichment out-of-vocabulary", criterion_lse_oov),
        ("ontology extraction", criterion_ontology),
        ("determinism and offline", criterion_determinism),
        ("cache replay", criterion_cache_replay),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
