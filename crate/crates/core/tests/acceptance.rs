//! End-to-end acceptance suite. Each test prints one pass/fail line; run
//! with `cargo test -p oovfst --test acceptance -- --nocapture` to see
//! them all.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::*;
use oovfst::bpe;
use oovfst::fst::{compose, shortest_path, extract_unk_spans};
use oovfst::hclg::{build_hclg, mod_hclg};
use oovfst::lexicon::{build_l, UNK_WORD};
use oovfst::metrics::{align, score, PairKind};
use oovfst::ngram::{arpa_to_g, BiasConfig};
use oovfst::split::{make_split, Utterance};
use oovfst::{Arc, ArpaModel, Fst, Lexicon, TransitionModel, Weight};

fn criterion(number: u8, name: &str, check: impl FnOnce() -> Result<(), String>) {
    match check() {
        Ok(()) => println!("acceptance {number:02} {name}: PASS"),
        Err(msg) => {
            println!("acceptance {number:02} {name}: FAIL ({msg})");
            panic!("acceptance criterion {number} ({name}) failed: {msg}");
        }
    }
}

fn ensure(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

fn tid_acceptor(tids: &[u32]) -> Fst {
    let mut fst = Fst::new();
    let mut cur = fst.add_state();
    fst.set_start(cur);
    for &t in tids {
        let next = fst.add_state();
        fst.add_arc(cur, Arc::new(t, t, Weight::one(), next));
        cur = next;
    }
    fst.set_final(cur, Weight::one());
    fst
}

#[test]
fn acceptance_01_penalty_constant() {
    criterion(1, "penalty-constant", || {
        let start = Instant::now();
        let lex = Lexicon::parse(base_lexicon_text()).map_err(|e| e.to_string())?;
        let oov_lex = Lexicon::parse(oov_lexicon_text()).map_err(|e| e.to_string())?;
        let oov_words: Vec<String> = oov_lex.words();
        let l = build_l(&lex, true).map_err(|e| e.to_string())?;
        let model = ArpaModel::parse(unk_arpa_text()).map_err(|e| e.to_string())?;
        let g0 = arpa_to_g(&model, &l.word_syms).map_err(|e| e.to_string())?;
        let cfg = BiasConfig::default();
        ensure(cfg.penalty == 2.3, "default penalty is 2.3")?;

        // Word-level replacement: every replacement arc exceeds the former
        // [unk] arc weight by exactly the penalty.
        let unk = g0.word_syms.label(UNK_WORD).expect("[unk] interned");
        let mut former = Vec::new();
        for s in 0..g0.fst.num_states() {
            for arc in g0.fst.arcs(s) {
                if arc.ilabel == unk {
                    former.push((s, arc.weight.value(), arc.nextstate));
                }
            }
        }
        ensure(!former.is_empty(), "fixture G has [unk] arcs")?;
        let mut g1 = g0.clone();
        g1.replace_unk(&oov_words, &cfg).map_err(|e| e.to_string())?;
        for (s, w, dst) in &former {
            for word in &oov_words {
                let label = g1.word_syms.label(word).unwrap();
                let arc = g1
                    .fst
                    .arcs(*s)
                    .iter()
                    .find(|a| a.ilabel == label && a.nextstate == *dst)
                    .ok_or("replacement arc missing")?;
                let delta = arc.weight.value() - w;
                ensure(
                    (delta - 2.3).abs() <= 1e-9,
                    &format!("replacement delta {delta} != 2.3"),
                )?;
            }
        }

        // Graph-level replacement: the entry connector carries the former
        // weight plus the penalty.
        let tm = TransitionModel::parse(&transition_model_text(), 1.0).map_err(|e| e.to_string())?;
        let mut dg = build_hclg(&l, &g0, &tm).map_err(|e| e.to_string())?;
        let unk_out = dg.word_syms.label(UNK_WORD).unwrap();
        let mut unk_positions = Vec::new();
        for s in dg.fst.state_ids() {
            for (i, arc) in dg.fst.arcs(s).iter().enumerate() {
                if arc.olabel == unk_out {
                    unk_positions.push((s, i, arc.weight.value()));
                }
            }
        }
        ensure(!unk_positions.is_empty(), "fixture graph has [unk] arcs")?;
        mod_hclg(&mut dg, &oov_lex, &cfg).map_err(|e| e.to_string())?;
        for (s, i, w) in unk_positions {
            let arc = dg.fst.arcs(s)[i];
            ensure(arc.ilabel == 0 && arc.olabel == 0, "entry connector is epsilon")?;
            let delta = arc.weight.value() - w;
            ensure(
                (delta - 2.3).abs() <= 1e-9,
                &format!("entry delta {delta} != 2.3"),
            )?;
        }

        let factor = (-2.3f64).exp();
        ensure(
            (0.1002..=0.1003).contains(&factor),
            "exp(-2.3) is about a tenth",
        )?;
        ensure(start.elapsed().as_secs_f64() < 1.0, "runtime under 1 s")?;
        Ok(())
    });
}

#[test]
fn acceptance_02_lm_oracle_equivalence() {
    criterion(2, "lm-oracle-equivalence", || {
        let start = Instant::now();
        let model = ArpaModel::parse(trigram_arpa_text()).map_err(|e| e.to_string())?;
        let vocab = ["a", "b", "c", "d", "e"];
        let g = arpa_to_g(&model, &word_table(&vocab)).map_err(|e| e.to_string())?;
        let mut checked = 0usize;
        for len in 1..=4usize {
            let mut counters = vec![0usize; len];
            loop {
                let sentence: Vec<&str> = counters.iter().map(|&i| vocab[i]).collect();
                let via_fst = g_sentence_cost(&g, &sentence)
                    .ok_or_else(|| format!("G rejected {sentence:?}"))?;
                let via_recursion = arpa_sentence_cost(&model, &sentence);
                if (via_fst - via_recursion).abs() > 1e-6 {
                    return Err(format!(
                        "{sentence:?}: fst {via_fst} vs recursion {via_recursion}"
                    ));
                }
                checked += 1;
                let mut pos = 0;
                loop {
                    if pos == len {
                        break;
                    }
                    counters[pos] += 1;
                    if counters[pos] < vocab.len() {
                        break;
                    }
                    counters[pos] = 0;
                    pos += 1;
                }
                if pos == len {
                    break;
                }
            }
        }
        ensure(checked == 5 + 25 + 125 + 625, "all sentences enumerated")?;
        ensure(start.elapsed().as_secs_f64() < 10.0, "runtime under 10 s")?;
        Ok(())
    });
}

#[test]
fn acceptance_03_mod_lg_end_to_end() {
    criterion(3, "mod-lg-end-to-end", || {
        let lex = Lexicon::parse(base_lexicon_text()).unwrap();
        let oov_lex = Lexicon::parse(oov_lexicon_text()).unwrap();
        let model = ArpaModel::parse(unk_arpa_text()).unwrap();

        let l0 = build_l(&lex, true).map_err(|e| e.to_string())?;
        let g0 = arpa_to_g(&model, &l0.word_syms).map_err(|e| e.to_string())?;
        let lg0 = compose(&l0.fst, &g0.fst);
        let former = lg_phone_path(&l0, &lg0, &["jnk"]).ok_or("jnk path missing")?;
        ensure(
            path_words(&former, &g0.word_syms) == vec![UNK_WORD],
            "jnk decodes to [unk]",
        )?;

        let mut l1 = l0.clone();
        l1.add_words(&oov_lex).map_err(|e| e.to_string())?;
        let mut g1 = g0.clone();
        g1.replace_unk(&oov_lex.words(), &BiasConfig::default())
            .map_err(|e| e.to_string())?;
        let lg1 = compose(&l1.fst, &g1.fst);

        let firefox = lg_phone_path(&l1, &lg1, &["f", "ay", "r", "aa", "k", "s"])
            .ok_or("firefox phones rejected")?;
        ensure(
            path_words(&firefox, &g1.word_syms) == vec!["firefox"],
            "phones decode to firefox",
        )?;
        let delta = firefox.total_weight.value() - former.total_weight.value();
        ensure(
            (delta - 2.3).abs() <= 1e-6,
            &format!("firefox costs former [unk] + 2.3 (delta {delta})"),
        )?;

        // Every in-vocabulary sentence keeps its exact cost.
        let sentences: [&[&str]; 5] = [
            &["the"],
            &["cat"],
            &["the", "cat"],
            &["the", "cat", "sat"],
            &["fire", "fox"],
        ];
        for sentence in sentences {
            let mut phones: Vec<&str> = Vec::new();
            for word in sentence {
                let entry = lex.entries().iter().find(|e| e.word == *word).unwrap();
                phones.extend(entry.pron.iter().map(String::as_str));
            }
            let before = lg_phone_path(&l0, &lg0, &phones)
                .ok_or_else(|| format!("{sentence:?} rejected before surgery"))?;
            let after = lg_phone_path(&l1, &lg1, &phones)
                .ok_or_else(|| format!("{sentence:?} rejected after surgery"))?;
            ensure(
                path_words(&before, &g0.word_syms) == path_words(&after, &g1.word_syms),
                "same decoding",
            )?;
            ensure(
                before.total_weight.value().to_bits() == after.total_weight.value().to_bits(),
                &format!("{sentence:?} cost not bit-stable"),
            )?;
        }
        Ok(())
    });
}

#[test]
fn acceptance_04_mod_hclg_equivalent_to_mod_lg() {
    criterion(4, "mod-hclg-equivalence", || {
        let lex = Lexicon::parse(base_lexicon_text()).unwrap();
        let oov_lex = Lexicon::parse(oov_lexicon_text()).unwrap();
        let model = ArpaModel::parse(unk_arpa_text()).unwrap();
        let tm = TransitionModel::parse(&transition_model_text(), 1.0).unwrap();
        let cfg = BiasConfig::default();

        // Pipeline A: modify L and G, then compose.
        let mut l1 = build_l(&lex, true).unwrap();
        let g_base = arpa_to_g(&model, &l1.word_syms).unwrap();
        l1.add_words(&oov_lex).map_err(|e| e.to_string())?;
        let mut g1 = arpa_to_g(&model, &l1.word_syms).map_err(|e| e.to_string())?;
        g1.replace_unk(&oov_lex.words(), &cfg).map_err(|e| e.to_string())?;
        let dg_a = build_hclg(&l1, &g1, &tm).map_err(|e| e.to_string())?;

        // Pipeline B: compose first, then patch the graph.
        let l0 = build_l(&lex, true).unwrap();
        let mut dg_b = build_hclg(&l0, &g_base, &tm).map_err(|e| e.to_string())?;
        mod_hclg(&mut dg_b, &oov_lex, &cfg).map_err(|e| e.to_string())?;

        let mut pronunciations: Vec<(String, Vec<String>)> = Vec::new();
        for entry in lex.entries().iter().chain(oov_lex.entries()) {
            pronunciations.push((entry.word.clone(), entry.pron.clone()));
        }
        let decode = |fst: &Fst, syms: &oovfst::SymbolTable, tids: &[u32]| {
            let composed = compose(&tid_acceptor(tids), fst);
            shortest_path(&composed).ok().map(|p| {
                let words = path_words(&p, syms);
                (words, p.total_weight.value())
            })
        };
        let mut compared = 0usize;
        for first in &pronunciations {
            for rest in std::iter::once(None).chain(pronunciations.iter().map(Some)) {
                let mut words = vec![first.0.clone()];
                let mut phones = first.1.clone();
                if let Some(second) = rest {
                    words.push(second.0.clone());
                    phones.extend(second.1.iter().cloned());
                }
                let tids: Vec<u32> = phones.iter().map(|p| tm.tid(p).unwrap()).collect();
                let a = decode(&dg_a.fst, &dg_a.word_syms, &tids);
                let b = decode(&dg_b.fst, &dg_b.word_syms, &tids);
                match (a, b) {
                    (None, None) => {}
                    (Some((wa, ca)), Some((wb, cb))) => {
                        if (ca - cb).abs() > 1e-6 {
                            return Err(format!("{words:?}: cost {ca} vs {cb}"));
                        }
                        if wa != wb {
                            return Err(format!("{words:?}: decoded {wa:?} vs {wb:?}"));
                        }
                        compared += 1;
                    }
                    (a, b) => {
                        return Err(format!(
                            "{words:?}: acceptance differs ({} vs {})",
                            a.is_some(),
                            b.is_some()
                        ))
                    }
                }
            }
        }
        ensure(compared >= 49, "all sentence pairs accepted by both")?;
        Ok(())
    });
}

#[test]
fn acceptance_05_mod_g_subword_biasing() {
    criterion(5, "mod-g-subword-biasing", || {
        let mut corpus = std::collections::BTreeMap::new();
        for (w, c) in [
            ("fired", 6u64),
            ("fires", 6),
            ("fireman", 6),
            ("firefly", 6),
            ("fox", 20),
            ("runs", 5),
        ] {
            corpus.insert(w.to_string(), c);
        }
        let bpe_model = bpe::train(&corpus, 6).map_err(|e| e.to_string())?;
        ensure(
            bpe_model.tokenize("firefox") == vec!["fire", "fox</w>"],
            "firefox tokenizes to fire + fox</w>",
        )?;

        let arpa = "\\data\\\nngram 1=6\nngram 2=3\n\n\\1-grams:\n-99\t<s>\t-0.4\n-0.8\t</s>\n-0.9\tfire\t-0.3\n-1.0\tfox\t-0.3\n-1.1\tfox</w>\t-0.3\n-1.2\truns</w>\t-0.3\n\n\\2-grams:\n-0.4\t<s> fire\n-0.5\tfox</w> runs</w>\n-0.6\truns</w> </s>\n\n\\end\\\n";
        let model = ArpaModel::parse(arpa).unwrap();
        let syms = word_table(&["fire", "fox", "fox</w>", "runs</w>"]);
        let mut g = arpa_to_g(&model, &syms).map_err(|e| e.to_string())?;
        let cfg = BiasConfig {
            penalty: 2.3,
            boost_cost: 0.1,
            discount: 0.5,
        };

        let snapshot: Vec<Vec<Arc>> = (0..g.fst.num_states())
            .map(|s| g.fst.arcs(s).to_vec())
            .collect();
        let before = g_sentence_cost(&g, &["fire", "fox</w>"]).ok_or("sequence rejected")?;
        let report = g
            .mod_subwords(&["firefox".to_string()], &bpe_model, &cfg)
            .map_err(|e| e.to_string())?;
        ensure(report.skipped.is_empty(), "nothing skipped")?;

        // (a) New arc from the fire unigram state to the fox</w> unigram
        // state.
        let fire_state = g.unigram_state("fire").ok_or("fire state")?;
        let fox_label = g.word_syms.label("fox</w>").unwrap();
        let new_arc = g
            .fst
            .arcs(fire_state)
            .iter()
            .find(|a| a.ilabel == fox_label)
            .ok_or("fire -> fox</w> arc missing")?;
        ensure(
            new_arc.nextstate == g.unigram_state("fox</w>").unwrap(),
            "new arc targets the fox</w> unigram state",
        )?;
        ensure((new_arc.weight.value() - 0.1).abs() < 1e-12, "boost cost")?;

        // (b) Backoff arcs of new states target the unigram of the leading
        // subword; this call creates none.
        ensure(report.states_added == 0, "two-subword word adds no state")?;

        // (c) The subword sequence got strictly cheaper.
        let after = g_sentence_cost(&g, &["fire", "fox</w>"]).ok_or("sequence rejected")?;
        ensure(after < before, "cost strictly decreases")?;

        // (d) No arc off the modified path changed. Expected deltas: the
        // backoff->fire unigram arc is discounted, and the fire state has
        // one appended arc.
        for (s, then) in snapshot.iter().enumerate() {
            let now = g.fst.arcs(s);
            if s == g.backoff_state {
                for (i, arc) in then.iter().enumerate() {
                    let fire = g.word_syms.label("fire").unwrap();
                    if arc.ilabel == fire {
                        let w = now[i].weight.value();
                        let want = arc.weight.value() - 0.5;
                        ensure((w - want).abs() < 1e-12, "fire unigram discounted")?;
                    } else {
                        ensure(now[i] == *arc, "off-path arc changed at backoff state")?;
                    }
                }
                ensure(now.len() == then.len(), "no arcs added at backoff state")?;
            } else if s == fire_state {
                for (i, arc) in then.iter().enumerate() {
                    ensure(now[i] == *arc, "existing fire-state arc changed")?;
                }
                ensure(now.len() == then.len() + 1, "one arc appended at fire state")?;
            } else {
                ensure(now == then.as_slice(), &format!("arcs changed at state {s}"))?;
            }
        }

        // (b) non-vacuously: a three-subword word creates one fresh state
        // whose backoff arc goes to the unigram of the subword leading in.
        ensure(
            bpe_model.tokenize("firefoxfox") == vec!["fire", "fox", "fox</w>"],
            "firefoxfox tokenizes to three subwords",
        )?;
        let states_before = g.fst.num_states();
        let report = g
            .mod_subwords(&["firefoxfox".to_string()], &bpe_model, &cfg)
            .map_err(|e| e.to_string())?;
        ensure(report.states_added == 1, "intermediate state created")?;
        let fresh = states_before;
        let backoff = g.word_syms.label("#0").unwrap();
        let bo_arc = g
            .fst
            .arcs(fresh)
            .iter()
            .find(|a| a.ilabel == backoff)
            .ok_or("new state lacks a backoff arc")?;
        ensure(
            bo_arc.nextstate == g.unigram_state("fox").unwrap(),
            "new-state backoff targets the fox unigram state",
        )?;
        Ok(())
    });
}

#[test]
fn acceptance_06_scoring_worked_example() {
    criterion(6, "scoring-worked-example", || {
        let reference: Vec<String> = ["words", "in", "sentence"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let hypothesis: Vec<String> = ["words", "in", "sent", "tense"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let pairs = align(&reference, &hypothesis);
        ensure(pairs.len() == 4, "four aligned pairs")?;
        ensure(
            pairs[2].kind == PairKind::Substitution
                && pairs[2].ref_word.as_deref() == Some("sentence")
                && pairs[2].hyp_word.as_deref() == Some("sent"),
            "sentence aligns with sent",
        )?;
        ensure(
            pairs[3].kind == PairKind::Insertion && pairs[3].hyp_word.as_deref() == Some("tense"),
            "tense is the adjacent insertion",
        )?;
        let oov: BTreeSet<String> = std::iter::once("sentence".to_string()).collect();
        let report = score(&reference, &hypothesis, &oov);
        ensure(report.per_oov.len() == 1, "one OOV occurrence")?;
        ensure(
            report.per_oov[0].candidate == "senttense",
            "insertion merges into the candidate",
        )?;
        ensure(report.per_oov[0].char_edits == 2, "edit distance 2")?;
        ensure(report.oov_cer() == Some(0.25), "OOV-CER exactly 0.25")?;
        Ok(())
    });
}

#[test]
fn acceptance_07_alignment_optimality() {
    criterion(7, "alignment-optimality", || {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};

        fn word_lev(a: &[String], b: &[String]) -> usize {
            let mut row: Vec<usize> = (0..=b.len()).collect();
            for (i, ca) in a.iter().enumerate() {
                let mut diag = row[0];
                row[0] = i + 1;
                for (j, cb) in b.iter().enumerate() {
                    let sub = diag + usize::from(ca != cb);
                    diag = row[j + 1];
                    row[j + 1] = sub.min(diag + 1).min(row[j] + 1);
                }
            }
            row[b.len()]
        }

        let start = Instant::now();
        let vocab = ["alpha", "beta", "gamma", "delta", "epsilon"];
        let mut rng = StdRng::seed_from_u64(20210419);
        for round in 0..1000 {
            let draw = |rng: &mut StdRng| {
                let len = rng.gen_range(0..=8);
                (0..len)
                    .map(|_| vocab[rng.gen_range(0..vocab.len())].to_string())
                    .collect::<Vec<String>>()
            };
            let reference = draw(&mut rng);
            let hypothesis = draw(&mut rng);
            let pairs = align(&reference, &hypothesis);
            let errors = pairs.iter().filter(|p| p.kind != PairKind::Match).count();
            let oracle = word_lev(&reference, &hypothesis);
            if errors != oracle {
                return Err(format!(
                    "round {round}: {errors} errors vs oracle {oracle} for {reference:?} / {hypothesis:?}"
                ));
            }
            let report = score(&reference, &hypothesis, &BTreeSet::new());
            let s = report.counts.substitutions;
            let i = report.counts.insertions;
            let d = report.counts.deletions;
            ensure(s + i + d == errors, "score counts match the alignment")?;
            match report.wer() {
                Some(wer) => {
                    let want = (s + i + d) as f64 / reference.len() as f64;
                    ensure(wer == want, "wer is (S+I+D)/N")?;
                }
                None => ensure(reference.is_empty(), "wer absent only for empty refs")?,
            }
        }
        ensure(start.elapsed().as_secs_f64() < 30.0, "runtime under 30 s")?;
        Ok(())
    });
}

#[test]
fn acceptance_08_bpe_determinism_and_losslessness() {
    criterion(8, "bpe-determinism-losslessness", || {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};

        let mut corpus = std::collections::BTreeMap::new();
        corpus.insert("low".to_string(), 5u64);
        corpus.insert("lower".to_string(), 2);
        let model = bpe::train(&corpus, 2).map_err(|e| e.to_string())?;
        ensure(
            model.merges()
                == [
                    ("l".to_string(), "o".to_string()),
                    ("lo".to_string(), "w".to_string()),
                ],
            "merge list is [(l,o),(lo,w)]",
        )?;
        ensure(bpe::DEFAULT_NUM_MERGES == 5000, "default merge budget is 5000")?;

        let mut rng = StdRng::seed_from_u64(5000);
        let mut train_corpus = std::collections::BTreeMap::new();
        for _ in 0..40 {
            let len = rng.gen_range(1..=8);
            let word: String = (0..len)
                .map(|_| (b'a' + rng.gen_range(0..5u8)) as char)
                .collect();
            *train_corpus.entry(word).or_insert(0u64) += rng.gen_range(1..5u64);
        }
        let model = bpe::train(&train_corpus, 25).map_err(|e| e.to_string())?;
        let again = bpe::train(&train_corpus, 25).map_err(|e| e.to_string())?;
        ensure(model == again, "training is deterministic")?;
        for round in 0..1000 {
            let len = rng.gen_range(1..=12);
            let word: String = (0..len)
                .map(|_| (b'a' + rng.gen_range(0..6u8)) as char)
                .collect();
            let tokens = model.tokenize(&word);
            if model.detokenize(&tokens) != word {
                return Err(format!("round {round}: {word:?} -> {tokens:?} not lossless"));
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_09_split_invariants() {
    criterion(9, "split-invariants", || {
        let vocab: BTreeSet<String> = ["alpha", "beta", "gamma", "delta"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        // Fifty utterances, speakers in blocks of ten; blocks 0-1 carry
        // OOV words, block 2 has a single OOV utterance, blocks 3-4 are
        // clean.
        let mut manifest = Vec::new();
        for i in 0..50usize {
            let block = i / 10;
            let text = match (block, i % 10) {
                (0, k) if k % 2 == 0 => "alpha firefox beta",
                (0, _) => "website gamma",
                (1, k) if k % 3 == 0 => "delta nudism",
                (1, _) => "alpha firefox website",
                (2, 7) => "beta nudism",
                _ => "alpha beta gamma delta",
            };
            manifest.push(Utterance {
                id: format!("u{i:02}"),
                speaker: format!("s{block}"),
                duration: Some(3.0),
                words: text.split_whitespace().map(str::to_string).collect(),
            });
        }
        let split = make_split(&manifest, &vocab).map_err(|e| e.to_string())?;

        for utt in &split.test {
            ensure(
                utt.words.iter().any(|w| !vocab.contains(w)),
                "every test utterance has an OOV word",
            )?;
        }
        let test_speakers: BTreeSet<&str> = split.test.iter().map(|u| u.speaker.as_str()).collect();
        for utt in &split.train {
            ensure(
                !test_speakers.contains(utt.speaker.as_str()),
                "train and test speakers are disjoint",
            )?;
        }
        let mut ids: Vec<&str> = split
            .train
            .iter()
            .chain(&split.test)
            .chain(&split.excluded)
            .map(|u| u.id.as_str())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ensure(
            ids.len() == manifest.len(),
            "train, test and excluded partition the manifest",
        )?;

        // Independent recount of the token OOV ratio over the test half.
        let mut oov_tokens = 0usize;
        let mut total_tokens = 0usize;
        for utt in &manifest {
            if utt.words.iter().any(|w| !vocab.contains(w)) {
                total_tokens += utt.words.len();
                oov_tokens += utt.words.iter().filter(|w| !vocab.contains(*w)).count();
            }
        }
        let expected = oov_tokens as f64 / total_tokens as f64;
        ensure(
            split.oov_token_ratio() == Some(expected),
            "token OOV ratio matches the hand recount",
        )?;
        ensure(split.excluded.len() == 9, "block-2 speaker excluded from train")?;
        ensure(split.train.len() == 20, "blocks 3-4 train")?;
        ensure(split.test.len() == 21, "blocks 0-1 plus one block-2 utterance test")?;
        Ok(())
    });
}

#[test]
fn acceptance_10_unk_lm_splice() {
    criterion(10, "unk-lm-splice", || {
        let lex = Lexicon::parse(base_lexicon_text()).unwrap();
        let mut l = build_l(&lex, true).map_err(|e| e.to_string())?;
        let model = ArpaModel::parse(unk_arpa_text()).unwrap();
        let g = arpa_to_g(&model, &l.word_syms).map_err(|e| e.to_string())?;

        // Two-phone cyclic acceptor: f costs 0.1, ay costs 0.2, leaving at
        // the loop state costs 0.05.
        let f = l.phone_syms.label("f").unwrap();
        let ay = l.phone_syms.label("ay").unwrap();
        let mut p = Fst::new();
        let q0 = p.add_state();
        let q1 = p.add_state();
        p.set_start(q0);
        p.set_final(q0, Weight::new(0.05));
        p.add_arc(q0, Arc::new(f, f, Weight::new(0.1), q1));
        p.add_arc(q1, Arc::new(ay, ay, Weight::new(0.2), q0));
        l.splice_unk_lm(&p).map_err(|e| e.to_string())?;

        let lg = compose(&l.fst, &g.fst);
        let unk_cost = arpa_sentence_cost(&model, &[UNK_WORD]);
        let unk_label = g.word_syms.label(UNK_WORD).unwrap();
        for reps in 1..=3usize {
            let phones: Vec<&str> = ["f", "ay"].iter().cycle().take(2 * reps).copied().collect();
            let path = lg_phone_path(&l, &lg, &phones)
                .ok_or_else(|| format!("{} phones rejected", phones.len()))?;
            ensure(
                path_words(&path, &g.word_syms) == vec![UNK_WORD],
                "phone run decodes to [unk]",
            )?;
            let p_cost = reps as f64 * 0.3 + 0.05;
            let want = unk_cost + p_cost;
            let got = path.total_weight.value();
            if (got - want).abs() > 1e-6 {
                return Err(format!("reps {reps}: cost {got} vs {want}"));
            }
            // Recovery front-end: the span is exactly the consumed phones.
            let spans = extract_unk_spans(&path, &l.phone_syms, unk_label);
            ensure(spans.len() == 1, "one [unk] span")?;
            let names: Vec<&str> = spans[0]
                .iter()
                .map(|&l_| l.phone_syms.symbol(l_).unwrap())
                .collect();
            ensure(names == phones, "span returns the consumed phones")?;
            let joined: String = names.concat();
            ensure(
                joined == "fay".repeat(reps),
                "character-mode join reproduces the recovered string",
            )?;
        }
        Ok(())
    });
}
