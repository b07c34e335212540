//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use aver_core::evaluation::{distinct_thresholds, sweep, ScoredPair, TruthIndex};
use aver_core::synthetic::{clique_with_background, planted_communities, random_graph, PlantedConfig};
use aver_core::tfidf::inverse_document_frequency;
use aver_core::{
    aver, aver_direct, batch_expand, common_count, frequency_sensitivity, generate_pairs, AverScorer, CandidatePair,
    Corpus, DocId, SetScorer, TfIdf,
};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn close(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    check((got - want).abs() <= tol, format!("{what}: got {got:.4}, want {want} ± {tol}"))
}

fn star_corpus() -> Corpus {
    Corpus::from_documents([
        "a star is born".split_whitespace(),
        "the star is bright".split_whitespace(),
        "born is a verb".split_whitespace(),
    ])
}

fn ids(v: &[u32]) -> Vec<DocId> {
    v.iter().map(|&i| DocId(i)).collect()
}

/// Corpus from a dense count matrix, one row per document.
fn from_matrix(rows: &[Vec<u64>]) -> Corpus {
    Corpus::from_documents(rows.iter().map(|row| {
        row.iter()
            .enumerate()
            .flat_map(|(t, &c)| std::iter::repeat_n(format!("t{t}"), c as usize))
            .collect::<Vec<_>>()
    }))
}

fn random_matrix(rng: &mut ChaCha8Rng, max_docs: usize, max_terms: usize, max_count: u64) -> Vec<Vec<u64>> {
    let docs = rng.gen_range(1..=max_docs);
    let terms = rng.gen_range(1..=max_terms);
    let density = rng.gen_range(0.2..0.9);
    (0..docs)
        .map(|_| {
            (0..terms)
                .map(|_| if rng.gen_bool(density) { rng.gen_range(1..=max_count) } else { 0 })
                .collect()
        })
        .collect()
}

/// A random corpus with at least one term occurrence; entropy is undefined
/// for an empty one.
fn random_corpus(rng: &mut ChaCha8Rng) -> (Vec<Vec<u64>>, Corpus) {
    loop {
        let m = random_matrix(rng, 8, 12, 5);
        let c = from_matrix(&m);
        if c.total() > 0 {
            return (m, c);
        }
    }
}

fn random_set(rng: &mut ChaCha8Rng, num_docs: usize, max_size: usize) -> Vec<DocId> {
    let size = rng.gen_range(1..=max_size.min(num_docs));
    sample(rng, num_docs, size)
        .into_iter()
        .map(|i| DocId(i as u32))
        .collect()
}

fn criterion_1() -> Outcome {
    let c = star_corpus();
    let model = TfIdf::new(&c);
    for (a, b, want) in [(0, 1, 0.34), (0, 2, 0.63), (1, 2, 0.10)] {
        let got = model.association(DocId(a), DocId(b)).map_err(|e| e.to_string())?;
        close(got, want, 0.01, &format!("tf-idf(d{a}, d{b})"))?;
    }
    for (term, want) in [("bright", 1.41), ("star", 1.00), ("is", 0.71)] {
        let t = c.term_id(term).ok_or("missing term")?;
        close(inverse_document_frequency(t, &c).unwrap(), want, 0.01, &format!("idf({term})"))?;
    }
    Ok("associations 0.34/0.63/0.10, idf 1.41/1.00/0.71".into())
}

fn criterion_2() -> Outcome {
    let c = star_corpus();
    let e = c.entropy().unwrap();
    let pair = aver_core::aver::aver_direct_detail(&ids(&[0, 1]), &c).unwrap();
    close(e, 2.96, 0.01, "E")?;
    close(pair.modified_entropy, 3.22, 0.01, "E'")?;
    let mut got = Vec::new();
    let mut failures = Vec::new();
    for (set, want) in [(&[0, 1][..], -0.26), (&[0, 2], -0.14), (&[1, 2], -0.23), (&[0, 1, 2], -0.29)] {
        let s = aver(&ids(set), &c).unwrap();
        got.push(format!("{s:.4}"));
        if let Err(m) = close(s, want, 0.005, &format!("aver{set:?}")) {
            failures.push(m);
        }
    }
    let summary = format!("E = {e:.4}, E' = {:.4}, aver = [{}]", pair.modified_entropy, got.join(", "));
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", failures.join("; ")))
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let corpora = 300;
    let mut sets = 0;
    for _ in 0..corpora {
        let (_, c) = random_corpus(&mut rng);
        for _ in 0..8 {
            let set = random_set(&mut rng, c.num_docs(), 4);
            let fast = aver(&set, &c).map_err(|e| e.to_string())?;
            let direct = aver_direct(&set, &c).map_err(|e| e.to_string())?;
            let tol = (1e-9 * direct.abs()).max(1e-12);
            let err = (fast - direct).abs();
            check(err <= tol, format!("set {set:?}: fast {fast} vs direct {direct}"))?;
            worst = worst.max(err / tol);
            sets += 1;
        }
    }
    Ok(format!("{corpora} corpora, {sets} sets, worst error {worst:.3} of tolerance"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut disjoint, mut singletons, mut identical) = (0, 0, 0);
    for _ in 0..300 {
        let (mut m, _) = random_corpus(&mut rng);
        // Duplicate a non-empty row so an identical profile exists.
        if let Some(row) = m.iter().find(|r| r.iter().any(|&c| c > 0)).cloned() {
            m.push(row);
        }
        let c = from_matrix(&m);
        for d in c.doc_ids() {
            let s = aver(&[d], &c).unwrap();
            check(s == 0.0, format!("singleton {d:?}: {s}"))?;
            singletons += 1;
        }
        for _ in 0..10 {
            let set = random_set(&mut rng, c.num_docs(), 4);
            if set.len() > 1 && common_count(&set, &c).unwrap() == 0 {
                let s = aver(&set, &c).unwrap();
                check(s == 0.0, format!("disjoint {set:?}: {s}"))?;
                disjoint += 1;
            }
        }
        let model = TfIdf::new(&c);
        for a in c.doc_ids() {
            for b in c.doc_ids().filter(|&b| b > a) {
                if !c.doc(a).is_empty() && c.doc(a).iter().eq(c.doc(b).iter()) {
                    let s = model.association(a, b).unwrap();
                    check((s - 1.0).abs() <= 1e-9, format!("identical {a:?},{b:?}: {s}"))?;
                    identical += 1;
                }
            }
        }
    }
    check(disjoint > 0 && identical > 0, "no disjoint or identical cases generated")?;
    Ok(format!("{singletons} singletons, {disjoint} disjoint sets, {identical} identical pairs"))
}

fn brute_force_pairs(c: &Corpus, min_common: u64) -> Vec<CandidatePair> {
    let mut out = Vec::new();
    for a in c.doc_ids() {
        for b in c.doc_ids().filter(|&b| b > a) {
            let common: u64 = c.doc(a).iter().map(|(t, ca)| ca.min(c.count(t, b))).sum();
            if common >= min_common {
                out.push(CandidatePair { a, b, common });
            }
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let graphs = 60;
    let mut pairs = 0;
    for i in 0..graphs {
        let nodes = rng.gen_range(2..=60);
        let p = rng.gen_range(0.02..0.4);
        let c = random_graph(nodes, p, i).corpus();
        for min_common in [1, 2, 3, 5] {
            let fast = generate_pairs(&c, min_common).unwrap();
            check(
                fast == brute_force_pairs(&c, min_common),
                format!("graph {i} ({nodes} nodes), minCommon {min_common}"),
            )?;
            pairs += fast.len();
        }
    }
    Ok(format!("{graphs} graphs x 4 thresholds, {pairs} pairs"))
}

/// `(x+h) ln(x+h) - (x-h) ln(x-h)` without cancellation.
fn xlnx_diff(x: f64, h: f64) -> f64 {
    x * ((h / x).ln_1p() - (-h / x).ln_1p()) + h * ((x + h).ln() + (x - h).ln())
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut tuples = 0;
    while tuples < 2000 {
        let t = rng.gen_range(2..=10_000u64);
        let m = rng.gen_range(1..t);
        let n = rng.gen_range(t..=1_000_000u64);
        let (tf, mf, nf) = (t as f64, m as f64, n as f64);
        let bound = nf * (tf.ln() - (tf - mf).ln()) / (tf.ln() + 1.0);
        if bound < 1.0 {
            continue;
        }
        // Keep N - N' at least one below the bound.
        let shrink = rng.gen_range(0..=(bound - 1.0).floor() as u64);
        let n_prime = n - shrink;
        let s = frequency_sensitivity(t, m, n, n_prime).map_err(|e| e.to_string())?;
        check(s.bound_holds, format!("bound should hold for T={t} m={m} N={n} N'={n_prime}"))?;
        check(s.derivative < 0.0, format!("derivative {} >= 0 for T={t} m={m} N={n} N'={n_prime}", s.derivative))?;
        let np = n_prime as f64;
        let h = 1e-6 * (tf - mf);
        let fd = (-xlnx_diff(tf, h) / nf + xlnx_diff(tf - mf, h) / np) / (2.0 * h);
        let rel = (fd - s.derivative).abs() / s.derivative.abs();
        check(rel <= 1e-6, format!("T={t} m={m} N={n} N'={n_prime}: closed {} vs fd {fd}", s.derivative))?;
        worst = worst.max(rel);
        tuples += 1;
    }
    Ok(format!("{tuples} tuples, worst relative deviation {worst:.2e}"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for i in 0..20u64 {
        let nodes = rng.gen_range(20..=200);
        let g = random_graph(nodes, rng.gen_range(0.05..0.3), 100 + i);
        let c = g.corpus();
        let groups: Vec<Vec<String>> = (0..rng.gen_range(1..8))
            .map(|_| {
                (0..rng.gen_range(2..20))
                    .map(|_| rng.gen_range(0..nodes).to_string())
                    .collect()
            })
            .collect();
        let truth = TruthIndex::from_groups(&c, &groups);
        let mut scored: Vec<ScoredPair> = generate_pairs(&c, 1)
            .unwrap()
            .into_iter()
            .map(|p| ScoredPair { a: p.a, b: p.b, score: rng.gen_range(0..40) as f64 / 8.0 - 2.0 })
            .collect();
        scored.truncate(10_000);
        let positives = scored.iter().filter(|p| truth.pair_positive(p.a, p.b).0).count() as u64;
        let negatives = scored.len() as u64 - positives;
        if positives == 0 || negatives == 0 {
            continue;
        }
        let thresholds = distinct_thresholds(&scored);
        let points = sweep(&scored, &truth, &thresholds).map_err(|e| e.to_string())?;
        for (p, &t) in points.iter().zip(&thresholds) {
            let (mut tp, mut fp) = (0u64, 0u64);
            for s in scored.iter().filter(|s| s.score > t) {
                if truth.pair_positive(s.a, s.b).0 {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
            check(
                (p.tp, p.fp) == (tp, fp)
                    && p.tpr == tp as f64 / positives as f64
                    && p.fpr == fp as f64 / negatives as f64,
                format!("instance {i}, threshold {t}: {p:?} vs tp={tp} fp={fp}"),
            )?;
        }
        check(
            points.windows(2).all(|w| w[0].tp >= w[1].tp && w[0].fp >= w[1].fp),
            format!("instance {i}: counts not monotone"),
        )?;
        checked += 1;
    }
    check(checked >= 10, "too few usable instances")?;
    Ok(format!("{checked} instances, brute force agrees, counts monotone"))
}

fn criterion_8() -> Outcome {
    let g = planted_communities(&PlantedConfig::default());
    let c = g.corpus();
    let truth = TruthIndex::from_groups(&c, g.groups.iter().map(|grp| grp.iter().map(u32::to_string)));
    let pairs = generate_pairs(&c, 3).unwrap();
    let aver_scorer = AverScorer(&c);
    let model = TfIdf::new(&c);
    let mut aver_list = Vec::with_capacity(pairs.len());
    let mut tfidf_list = Vec::with_capacity(pairs.len());
    for p in &pairs {
        aver_list.push(ScoredPair { a: p.a, b: p.b, score: aver_scorer.score(&[p.a, p.b]).unwrap() });
        tfidf_list.push(ScoredPair { a: p.a, b: p.b, score: model.association(p.a, p.b).unwrap() });
    }
    let positives = pairs.iter().filter(|p| truth.pair_positive(p.a, p.b).0).count();
    let base = positives as f64 / pairs.len() as f64;

    let at_zero = sweep(&aver_list, &truth, &[0.0]).unwrap()[0];
    check(at_zero.tp + at_zero.fp > 0, "no pair has aver > 0")?;
    let fraction = at_zero.tp as f64 / (at_zero.tp + at_zero.fp) as f64;
    check(
        fraction > base,
        format!("aver > 0 positive fraction {fraction:.4} not above base rate {base:.4}"),
    )?;

    // In the aver > 0 region, every aver point must reach at least the best
    // tf-idf true-positive count achievable at no more false positives.
    let aver_curve = sweep(&aver_list, &truth, &distinct_thresholds(&aver_list)).unwrap();
    let tfidf_curve = sweep(&tfidf_list, &truth, &distinct_thresholds(&tfidf_list)).unwrap();
    let tfidf_tp_at = |fp: u64| tfidf_curve.iter().filter(|p| p.fp <= fp).map(|p| p.tp).max().unwrap_or(0);
    let region: Vec<_> = aver_curve.iter().filter(|p| p.threshold >= 0.0).collect();
    for p in &region {
        check(
            p.tp >= tfidf_tp_at(p.fp),
            format!(
                "at fp={} aver keeps tp={} but tf-idf reaches tp={}",
                p.fp,
                p.tp,
                tfidf_tp_at(p.fp)
            ),
        )?;
    }
    Ok(format!(
        "{} pairs, base rate {base:.4}; aver > 0 keeps {} (tp {}, fp {}), fraction {fraction:.4}; {} region points dominate tf-idf",
        pairs.len(),
        at_zero.tp + at_zero.fp,
        at_zero.tp,
        at_zero.fp,
        region.len()
    ))
}

fn criterion_9() -> Outcome {
    let inst = clique_with_background(6, 60, 3, 11);
    let c = inst.graph.corpus();
    let clique = inst.clique_ids(&c);
    let scorer = AverScorer(&c);

    let one = batch_expand(&[vec![clique[0], clique[1]]], &c, 3, &scorer, 10).unwrap();
    check(one[0].set.members == clique, format!("single seed ended at {:?}", one[0].set.members))?;

    let seeds: Vec<Vec<DocId>> = generate_pairs(&c, 3).unwrap().iter().map(|p| vec![p.a, p.b]).collect();
    let all = batch_expand(&seeds, &c, 3, &scorer, 10).unwrap();
    check(all[0].set.members == clique, format!("top set is {:?}", all[0].set.members))?;

    // The clique beats every other superset of the seed inside the clique.
    let clique_score = scorer.score(&clique).unwrap();
    for mask in 0u32..1 << clique.len() {
        let subset: Vec<DocId> = (0..clique.len()).filter(|&i| mask >> i & 1 == 1).map(|i| clique[i]).collect();
        if subset.len() >= 2 && subset.len() < clique.len() && subset.contains(&clique[0]) && subset.contains(&clique[1]) {
            check(scorer.score(&subset).unwrap() < clique_score, format!("{subset:?} scores at least the clique"))?;
        }
    }
    Ok(format!(
        "{} seeds, {} distinct sets; top is the 6-clique (score {:.4}, multiplicity {})",
        seeds.len(),
        all.len(),
        all[0].set.score,
        all[0].multiplicity
    ))
}

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let g = planted_communities(&PlantedConfig::default());
    let edges = tmp.path().join("graph.txt");
    let truth = tmp.path().join("groups.txt");
    fs::write(&edges, g.edge_list_text()).unwrap();
    fs::write(&truth, g.truth_text()).unwrap();

    let run = |workers: usize, name: &str| -> Result<BTreeMap<String, Vec<u8>>, String> {
        let out = tmp.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_aver"))
            .arg("--workers")
            .arg(workers.to_string())
            .arg("pipeline")
            .arg(&edges)
            .arg("--truth")
            .arg(&truth)
            .args(["--min-common", "3", "--top-k", "20", "--seeds", "50"])
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        check(status.status.success(), String::from_utf8_lossy(&status.stderr).into_owned())?;
        Ok(read_tree(&out))
    };
    let reference = run(1, "w1")?;
    for (workers, name) in [(1, "w1-again"), (2, "w2"), (4, "w4"), (8, "w8")] {
        let other = run(workers, name)?;
        check(
            other.keys().eq(reference.keys()),
            format!("{name}: different file set"),
        )?;
        for (file, bytes) in &reference {
            check(&other[file] == bytes, format!("{name}: {file} differs"))?;
        }
    }
    Ok(format!("{} files identical across reruns and 1/2/4/8 workers", reference.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("three-document tf-idf values", criterion_1, Duration::from_secs(1)),
        ("three-document aver values", criterion_2, Duration::from_secs(1)),
        ("fast/direct oracle equivalence", criterion_3, Duration::from_secs(10)),
        ("structural zeros", criterion_4, Duration::from_secs(10)),
        ("pair generation oracle", criterion_5, Duration::from_secs(10)),
        ("frequency sensitivity check", criterion_6, Duration::from_secs(5)),
        ("sweep oracle and monotonicity", criterion_7, Duration::from_secs(60)),
        ("planted-community enrichment", criterion_8, Duration::from_secs(60)),
        ("expansion endpoint", criterion_9, Duration::from_secs(30)),
        ("pipeline determinism", criterion_10, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > *limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {:>2}. {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {why} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
