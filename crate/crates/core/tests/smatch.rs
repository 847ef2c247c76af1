mod common;

use std::collections::BTreeSet;

use common::fixture;
use docamr::builder::{build, BuildConfig, DocGraph, Mode};
use docamr::penman::parse_penman;
use docamr::smatch::{
    candidate_pool, coref_subscore, exact_match, extract_triples, hill_climb, match_count, score_corpus, score_pair,
    NodeMapping, SearchConfig, TripleSet,
};
use docamr::synth::{perturb_document, random_document, DocSpec, Noise};
use docamr::Rational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn set(text: &str) -> TripleSet {
    TripleSet::from_amr(&parse_penman(text).unwrap()[0])
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Triples as strings under a mapping of source variable names.
fn mapped_triples(s: &TripleSet, map: &[Option<usize>], t: &TripleSet) -> Vec<(String, String, String)> {
    let name = |v: usize| map[v].map(|c| t.variables[c].clone()).unwrap_or_else(|| format!("unmapped:{v}"));
    let mut out = Vec::new();
    for (v, c) in s.concepts.iter().enumerate() {
        out.push((name(v), ":instance".into(), c.clone()));
    }
    for (v, role, x) in &s.attributes {
        out.push((name(*v), role.clone(), format!("const:{x}")));
    }
    for (a, role, b) in &s.relations {
        out.push((name(*a), role.clone(), name(*b)));
    }
    out
}

fn own_triples(t: &TripleSet) -> BTreeSet<(String, String, String)> {
    let ident: Vec<Option<usize>> = (0..t.variables.len()).map(Some).collect();
    mapped_triples(t, &ident, t).into_iter().collect()
}

/// Best matched-triple count over every partial injective mapping.
fn brute_force(s: &TripleSet, t: &TripleSet) -> usize {
    fn go(
        v: usize,
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        s: &TripleSet,
        t: &TripleSet,
        target: &BTreeSet<(String, String, String)>,
        best: &mut usize,
    ) {
        if v == s.variables.len() {
            let n = mapped_triples(s, map, t).iter().filter(|x| target.contains(*x)).count();
            *best = (*best).max(n);
            return;
        }
        go(v + 1, map, used, s, t, target, best);
        for c in 0..t.variables.len() {
            if !used[c] {
                used[c] = true;
                map[v] = Some(c);
                go(v + 1, map, used, s, t, target, best);
                map[v] = None;
                used[c] = false;
            }
        }
    }
    let target = own_triples(t);
    let mut best = 0;
    go(
        0,
        &mut vec![None; s.variables.len()],
        &mut vec![false; t.variables.len()],
        s,
        t,
        &target,
        &mut best,
    );
    best
}

fn exact(s: &TripleSet, t: &TripleSet) -> usize {
    exact_match::<Rational>(s, t, &SearchConfig::default()).unwrap().1.counts.matched
}

#[test]
fn triple_extraction() {
    let t = set("(a / and)");
    assert_eq!((t.variables.len(), t.attributes.len(), t.relations.len()), (1, 0, 0));

    let g = build(&fixture("favor-lift"), Mode::DocAmr, &BuildConfig::default());
    let t = extract_triples(&g);
    let mut concepts: Vec<&str> = t.concepts.iter().map(String::as_str).collect();
    concepts.sort_unstable();
    assert_eq!(
        concepts,
        ["coref-entity", "document", "favor", "fellow", "give-01", "help-01", "lift", "out", "you"]
    );
    assert_eq!(t.relations.iter().filter(|(_, r, _)| r == ":coref").count(), 3);
    assert_eq!(t.len(), g.graph.triple_set().len());
}

#[test]
fn quotes_do_not_matter() {
    let a = set("(n / name :op1 \"Bill\")");
    let b = set("(n / name :op1 Bill)");
    assert_eq!(exact(&a, &b), 2);
}

#[test]
fn exact_examples() {
    let a = set("(w / want-01 :ARG0 (b / boy) :ARG1 (g / girl))");
    let b = set("(w / want-01 :ARG0 (g / girl) :ARG1 (b / boy))");
    assert_eq!(exact(&a, &b), brute_force(&a, &b));
    assert_eq!(exact(&a, &b), 3);
    assert_eq!(exact(&a, &set("(x / dog :mod (y / cat))")), 0);
    let (_, res) = exact_match::<Rational>(&a, &a, &SearchConfig::default()).unwrap();
    assert_eq!(res.f1, r(1, 1));
}

#[test]
fn exact_size_limit() {
    let big = set("(a / and :op1 (b / x) :op2 (c / x) :op3 (d / x))");
    let cfg = SearchConfig {
        max_exact_nodes: 3,
        ..SearchConfig::default()
    };
    assert_eq!(exact_match::<f64>(&big, &big, &cfg).unwrap_err().kind(), "usage");
}

#[test]
fn self_match_is_perfect_for_any_seed() {
    let g = extract_triples(&build(&fixture("favor-lift"), Mode::DocAmr, &BuildConfig::default()));
    for seed in [0, 1, 42, u64::MAX] {
        let cfg = SearchConfig {
            seed,
            ..SearchConfig::default()
        };
        let (m, res) = hill_climb::<Rational>(&g, &g, &cfg).unwrap();
        assert_eq!((res.f1, res.coref.f1), (r(1, 1), r(1, 1)));
        assert!(m.is_injective());
    }
}

#[test]
fn constrained_pool_stays_in_sentence() {
    let g = extract_triples(&build(&fixture("favor-lift"), Mode::NoCoref, &BuildConfig::default()));
    let pool = candidate_pool(&g, &g, true).unwrap();
    for (v, cands) in pool.iter().enumerate() {
        if g.provenance[v].len() == 1 {
            for &c in cands {
                assert!(g.provenance[c].is_superset(&g.provenance[v]), "{} -> {}", g.variables[v], g.variables[c]);
            }
        }
    }
    let t = extract_triples(&build(&fixture("cola-pronouns"), Mode::DocAmr, &BuildConfig::default()));
    let pool = candidate_pool(&t, &t, true).unwrap();
    let idx = |name: &str| t.variables.iter().position(|v| v == name).unwrap();
    assert!(pool[idx("s3.n2")].iter().all(|&c| t.provenance[c].contains(&3)));
    assert_eq!(t.provenance[idx("s3.p")], BTreeSet::from([1, 2, 3]));
    assert_eq!(
        candidate_pool(&t, &t, false).unwrap()[idx("s3.p")],
        pool[idx("s3.p")]
    );
}

#[test]
fn constrained_requires_equal_sentence_counts() {
    let a = extract_triples(&build(&fixture("favor-lift"), Mode::DocAmr, &BuildConfig::default()));
    let b = extract_triples(&build(&fixture("bill-paris"), Mode::DocAmr, &BuildConfig::default()));
    let cfg = SearchConfig {
        constrained: true,
        ..SearchConfig::default()
    };
    assert_eq!(hill_climb::<f64>(&a, &b, &cfg).unwrap_err().kind(), "usage");
}

#[test]
fn coref_subscore_with_a_missing_coref_edge() {
    let gold = build(&fixture("favor-lift"), Mode::DocAmr, &BuildConfig::default());
    let mut pred = gold.clone();
    pred.graph.relations.retain(|r| !(r.source == "s1.f" && r.role == ":coref"));
    let (g, p) = (extract_triples(&gold), extract_triples(&pred));
    // Gold items: the coref-entity instance, its three :coref edges, and the
    // two :ARG2 edges into `fellow` (which spans sentences 2 and 3) = 6.
    // The prediction lacks one :coref edge = 5, all of them correct.
    let (m, res) = exact_match::<Rational>(&p, &g, &SearchConfig::default()).unwrap();
    assert_eq!((res.counts.coref_source, res.counts.coref_target), (5, 6));
    assert_eq!(res.coref.precision, r(1, 1));
    assert_eq!(res.coref.recall, r(5, 6));
    assert_eq!(coref_subscore::<Rational>(&p, &g, &m), res.coref);
}

#[test]
fn missing_coreference_scores_zero() {
    let doc = fixture("bill-paris");
    let config = BuildConfig::default();
    let gold = extract_triples(&build(&doc, Mode::DocAmr, &config));
    let none = extract_triples(&build(&doc, Mode::NoCoref, &config));
    let (_, res) = hill_climb::<Rational>(&none, &gold, &SearchConfig::default()).unwrap();
    assert_eq!(res.coref.f1, r(0, 1));
    assert!(res.f1 > r(0, 1) && res.f1 < r(1, 1));
}

#[test]
fn corpus_micro_average() {
    let config = BuildConfig::default();
    let names = ["bill-paris", "favor-lift"];
    let gold: Vec<DocGraph> = names.iter().map(|n| build(&fixture(n), Mode::DocAmr, &config)).collect();
    let pred: Vec<DocGraph> = names.iter().map(|n| build(&fixture(n), Mode::NoCoref, &config)).collect();
    let cfg = SearchConfig::default();
    let corpus = score_corpus::<Rational>(&gold, &pred, &cfg).unwrap();
    let mut matched = 0;
    let mut source = 0;
    let mut target = 0;
    for (g, p) in gold.iter().zip(&pred) {
        let (_, one) = score_pair::<Rational>(&extract_triples(p), &extract_triples(g), &cfg).unwrap();
        matched += one.counts.matched;
        source += one.counts.source_triples;
        target += one.counts.target_triples;
    }
    assert_eq!(corpus.total.precision, r(matched as i64, source as i64));
    assert_eq!(corpus.total.recall, r(matched as i64, target as i64));
    assert_eq!(corpus.per_doc.len(), 2);
    assert_eq!(corpus.per_doc[1].0, "favor-lift");

    let single = score_corpus::<Rational>(&gold[..1], &gold[..1], &cfg).unwrap();
    assert_eq!(single.total.f1, r(1, 1));
    assert_eq!(score_corpus::<f64>(&gold, &pred[..1], &cfg).unwrap_err().kind(), "usage");
    let swapped = [pred[1].clone(), pred[0].clone()];
    assert_eq!(score_corpus::<f64>(&gold, &swapped, &cfg).unwrap_err().kind(), "usage");
}

#[test]
fn zero_restarts_rejected() {
    let a = set("(a / and)");
    let cfg = SearchConfig {
        restarts: 0,
        ..SearchConfig::default()
    };
    assert_eq!(hill_climb::<f64>(&a, &a, &cfg).unwrap_err().kind(), "usage");
}

fn small_pair(seed: u64, limit: usize) -> Option<(TripleSet, TripleSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = DocSpec {
        sentences: 1..=2,
        ..DocSpec::tiny()
    };
    let doc = random_document(&mut rng, "d", &spec);
    let pred = perturb_document(&mut rng, &doc, &Noise::uniform(0.4));
    let config = BuildConfig::default();
    let g = extract_triples(&build(&doc, Mode::DocAmr, &config));
    let p = extract_triples(&build(&pred, Mode::NoMerge, &config));
    (g.variables.len() <= limit && p.variables.len() <= limit).then_some((p, g))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_agrees_with_brute_force(seed in any::<u64>()) {
        let Some((p, g)) = small_pair(seed, 6) else { return Ok(()) };
        prop_assert_eq!(exact(&p, &g), brute_force(&p, &g));
    }

    #[test]
    fn swap_symmetry(seed in any::<u64>()) {
        let Some((p, g)) = small_pair(seed, 8) else { return Ok(()) };
        let cfg = SearchConfig::default();
        let (_, a) = exact_match::<Rational>(&p, &g, &cfg).unwrap();
        let (_, b) = exact_match::<Rational>(&g, &p, &cfg).unwrap();
        prop_assert_eq!(a.precision, b.recall);
        prop_assert_eq!(a.recall, b.precision);
        prop_assert_eq!(a.f1, b.f1);
    }

    #[test]
    fn hill_climb_bounds_and_monotonicity(seed in any::<u64>(), search_seed in any::<u64>()) {
        let Some((p, g)) = small_pair(seed, 10) else { return Ok(()) };
        let mut previous = 0;
        for restarts in 1..=5 {
            let cfg = SearchConfig { restarts, seed: search_seed, ..SearchConfig::default() };
            let (m, res) = hill_climb::<Rational>(&p, &g, &cfg).unwrap();
            prop_assert!(m.is_injective());
            prop_assert_eq!(match_count(&p, &g, &m), res.counts.matched);
            prop_assert!(res.counts.matched <= p.len().min(g.len()));
            prop_assert!(res.counts.matched >= previous);
            prop_assert!(res.counts.matched <= exact(&p, &g));
            previous = res.counts.matched;
            let again = hill_climb::<Rational>(&p, &g, &cfg).unwrap();
            prop_assert_eq!(again.0, m);
        }
    }

    #[test]
    fn perfect_score_only_for_isomorphic_graphs(seed in any::<u64>()) {
        let Some((p, g)) = small_pair(seed, 8) else { return Ok(()) };
        let (_, res) = exact_match::<Rational>(&p, &g, &SearchConfig::default()).unwrap();
        let same_size = p.len() == g.len() && p.variables.len() == g.variables.len();
        prop_assert_eq!(res.f1 == Rational::from_integer(1), same_size && res.counts.matched == p.len());
    }
}

#[test]
fn generated_pairs_are_mostly_small_enough() {
    let hits = (0..200).filter(|&s| small_pair(s, 6).is_some()).count();
    assert!(hits > 100, "{hits}");
}

#[test]
fn unmapped_mapping_scores_nothing() {
    let a = set("(w / want-01 :ARG0 (b / boy))");
    let m = NodeMapping {
        targets: vec![None, None],
    };
    assert_eq!(match_count(&a, &a, &m), 0);
}
