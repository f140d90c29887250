mod common;

use std::collections::BTreeSet;

use common::{all_labelings, integers, prefix_energy, random_bank, uniform, Family};
use pattern_crf::io::{parse_model, run_command, serialize_model, Algorithm, Command, ModelFile, RunOptions};
use pattern_crf::map::MapModel;
use pattern_crf::oracle::{brute_force_map, brute_force_z, placed_cost};
use pattern_crf::pattern::{compute_f, compute_i_limit, compute_phi, Symbol};
use pattern_crf::sampling::build_delta_index;
use pattern_crf::{
    build_pattern_system, infer_basic, infer_fast, partition_function, BoolOrAnd, Count, MapOptions, MinPlus,
    PatternBank, Sampler, SamplerMode, Semiring, SemiringKind, SumProduct, Variant, Word,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bank_from(seed: u64, fam: Family, integer: bool) -> PatternBank {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if integer {
        random_bank(&mut rng, fam, integers(-2, 2))
    } else {
        random_bank(&mut rng, fam, uniform(-2.0, 2.0))
    }
}

fn small() -> Family {
    Family { max_n: 6, ..Family::default() }
}

fn empty_folds<S: Semiring>() {
    assert_eq!(S::sum(std::iter::empty()), S::zero());
    assert_eq!(S::product(std::iter::empty()), S::one());
}

#[test]
fn empty_folds_are_identities() {
    empty_folds::<SumProduct<f64>>();
    empty_folds::<SumProduct<f32>>();
    empty_folds::<MinPlus<f64>>();
    empty_folds::<Count<i64>>();
    empty_folds::<BoolOrAnd>();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn folds_match_pairwise(xs in prop::collection::vec(-5.0f64..5.0, 0..12)) {
        let s: Vec<MinPlus<f64>> = xs.iter().map(|&x| MinPlus(x)).collect();
        let want = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(MinPlus::sum(s.iter()).0, want);
        let c: Vec<Count<i64>> = xs.iter().map(|&x| Count(x.round() as i64)).collect();
        prop_assert_eq!(Count::product(c.iter()).0, xs.iter().map(|x| x.round() as i64).product::<i64>());
    }

    #[test]
    fn sum_product_messages_stay_non_negative(seed in any::<u64>()) {
        let bank = bank_from(seed, Family::default(), false);
        let sys = build_pattern_system(&bank, Variant::Prefixes).unwrap();
        let (_, t) = partition_function(&sys, &sys.costs::<SumProduct<f64>>(&bank)).unwrap();
        for s in 0..=bank.n() {
            let scale = t.w[s][0].0;
            for (m, w) in t.m[s].iter().zip(&t.w[s]) {
                // exact values are non-negative; allow rounding of the subtraction
                prop_assert!(m.0 >= -1e-12 * scale, "M = {} at {}", m.0, s);
                prop_assert!(w.0 >= 0.0);
            }
        }
    }

    #[test]
    fn layers_are_suffix_forests(seed in any::<u64>(), variant in 0usize..4) {
        let bank = bank_from(seed, Family::default(), false);
        let variant = [Variant::Prefixes, Variant::ProperPrefixes, Variant::PrefixSuffix, Variant::MapTilde { exact: false }][variant];
        let sys = build_pattern_system(&bank, variant).unwrap();
        for s in 0..=bank.n() {
            let layer = sys.layer(s);
            prop_assert_eq!(layer.edge_count(), layer.len() - layer.roots().count());
            let words: Vec<Word> = (0..layer.len()).map(|i| sys.word(s, i).clone()).collect();
            for b in 0..layer.len() {
                let Some(a) = layer.parent(b) else { continue };
                prop_assert!(a < b);
                prop_assert!(words[a].len() < words[b].len() && words[a].is_suffix_of(&words[b]));
                // no node strictly between parent and child
                for g in 0..layer.len() {
                    let between = words[g].len() > words[a].len() && words[g].len() < words[b].len();
                    prop_assert!(!(between && words[a].is_suffix_of(&words[g]) && words[g].is_suffix_of(&words[b])));
                }
            }
        }
    }

    #[test]
    fn labelings_split_by_deepest_suffix(seed in any::<u64>()) {
        let bank = bank_from(seed, small(), false);
        let sys = build_pattern_system(&bank, Variant::Prefixes).unwrap();
        for s in 0..=bank.n() {
            let layer = sys.layer(s);
            let words: Vec<Word> = (0..layer.len()).map(|i| sys.word(s, i).clone()).collect();
            for x in all_labelings(bank.alphabet().len(), s) {
                let hits: Vec<usize> = (0..words.len()).filter(|&i| x.ends_with(&words[i].0)).collect();
                prop_assert!(!hits.is_empty());
                let deepest = *hits.iter().max_by_key(|&&i| words[i].len()).unwrap();
                // every other suffix node is an ancestor of the deepest one
                let mut chain = BTreeSet::new();
                let mut cur = Some(deepest);
                while let Some(c) = cur {
                    chain.insert(c);
                    cur = layer.parent(c);
                }
                prop_assert_eq!(chain, hits.into_iter().collect::<BTreeSet<_>>());
            }
        }
    }

    #[test]
    fn cost_tables_match_definitions(seed in any::<u64>()) {
        let bank = bank_from(seed, Family::default(), true);
        let sys = build_pattern_system(&bank, Variant::Prefixes).unwrap();
        let costs = sys.costs::<MinPlus<f64>>(&bank);
        let phi = compute_phi(&sys, &costs).unwrap();
        let f = compute_f(&sys, &phi).unwrap();
        for s in 0..=bank.n() {
            for i in 0..sys.layer(s).len() {
                let w = sys.word(s, i);
                let start = s - w.len();
                // every placement inside the word, and the ones ending at its end
                let mut inside = 0.0;
                let mut ending = 0.0;
                for p in bank.patterns() {
                    let pw = &p.word.0;
                    for a in 0..(w.len() + 1).saturating_sub(pw.len()) {
                        if w.0[a..a + pw.len()] == pw[..] {
                            inside += p.energy;
                            if a + pw.len() == w.len() { ending += p.energy; }
                        }
                    }
                }
                for o in bank.overrides() {
                    let a = o.start as isize - 1 - start as isize;
                    if a >= 0 && (a as usize) + o.word.len() <= w.len() && w.0[a as usize..a as usize + o.word.len()] == o.word.0[..] {
                        inside += o.energy;
                        if a as usize + o.word.len() == w.len() { ending += o.energy; }
                    }
                }
                prop_assert_eq!(phi[s][i].0, ending);
                prop_assert_eq!(f[s][i].0, inside);
            }
        }
    }

    #[test]
    fn ring_messages_are_consistent(seed in any::<u64>()) {
        let bank = bank_from(seed, small(), true);
        let sys = build_pattern_system(&bank, Variant::Prefixes).unwrap();
        let (_, t) = partition_function(&sys, &sys.costs::<Count<i128>>(&bank)).unwrap();
        let costs = bank.costs::<Count<i128>>();
        let gamma = bank.gamma();
        for s in 0..=bank.n() {
            let layer = sys.layer(s);
            for i in 0..layer.len() {
                // W is the total over labelings ending in the node, M what its children leave
                let w = sys.word(s, i);
                let want = all_labelings(bank.alphabet().len(), s)
                    .into_iter()
                    .filter(|x| x.ends_with(&w.0))
                    .fold(Count(0i128), |acc, x| acc.plus(&placed_cost(&costs, &gamma, &x, 0)));
                prop_assert_eq!(&t.w[s][i], &want);
                let kids = layer.children(i).iter().map(|&b| t.w[s][b].0).sum::<i128>();
                prop_assert_eq!(t.m[s][i].0, t.w[s][i].0 - kids);
            }
        }
    }

    #[test]
    fn semiring_engines_agree(seed in any::<u64>()) {
        let bank = bank_from(seed, Family::default(), true);
        let sys = build_pattern_system(&bank, Variant::ProperPrefixes).unwrap();
        let c = sys.costs::<Count<i128>>(&bank);
        let want = brute_force_z::<Count<i128>>(&bank).unwrap();
        prop_assert_eq!(&infer_basic(&sys, &c).unwrap().value, &want);
        prop_assert_eq!(&infer_fast(&sys, &c).unwrap().value, &want);
        let c = sys.costs::<BoolOrAnd>(&bank);
        let want = brute_force_z::<BoolOrAnd>(&bank).unwrap();
        prop_assert_eq!(&infer_basic(&sys, &c).unwrap().value, &want);
        prop_assert_eq!(&infer_fast(&sys, &c).unwrap().value, &want);
        let c = sys.costs::<MinPlus<f64>>(&bank);
        let want = brute_force_z::<MinPlus<f64>>(&bank).unwrap();
        prop_assert_eq!(&infer_basic(&sys, &c).unwrap().value, &want);
        prop_assert_eq!(&infer_fast(&sys, &c).unwrap().value, &want);
    }

    #[test]
    fn delta_sets_count_every_extension(seed in any::<u64>()) {
        let fam = Family { max_n: 14, ..Family::default() };
        let bank = bank_from(seed, fam, false);
        let sys = build_pattern_system(&bank, Variant::Prefixes).unwrap();
        for (s, d) in build_delta_index(&sys).unwrap().iter().enumerate() {
            prop_assert_eq!(d.total(), sys.layer(s).len() * bank.alphabet().len());
        }
    }

    #[test]
    fn map_messages_bounds(seed in any::<u64>(), exact in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bank = random_bank(&mut rng, small(), uniform(-2.0, 0.0));
        let plain = MapModel::<f64>::new(&bank, MapOptions { exact, fft: false, delta: 1 }).unwrap();
        let fft = MapModel::<f64>::new(&bank, MapOptions { exact, fft: true, delta: 3 }).unwrap();
        let msg = plain.messages();
        let sys = plain.system();
        for s in 0..=bank.n() {
            let layer = sys.layer(s);
            prop_assert!(msg.comparisons[s] <= layer.len());
            for i in 0..layer.len() {
                prop_assert!((plain.f(s, i) - fft.f(s, i)).abs() <= 1e-9);
                let w = sys.word(s, i);
                let lower = all_labelings(bank.alphabet().len(), s)
                    .iter()
                    .filter(|x| x.ends_with(&w.0))
                    .map(|x| prefix_energy(&bank, x))
                    .fold(f64::INFINITY, f64::min);
                prop_assert!(msg.m[s][i] >= lower - 1e-9);
            }
        }
        let sol = plain.solve().unwrap();
        let (best, _) = brute_force_map(&bank).unwrap();
        prop_assert!((sol.energy - best).abs() <= 1e-9);
        prop_assert!(sol.energy <= prefix_energy(&bank, &sol.labeling) + 1e-9);
    }

    #[test]
    fn interior_tilde_layers_are_the_limit_set(seed in any::<u64>()) {
        let fam = Family { max_n: 14, ..Family::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bank = random_bank(&mut rng, fam, uniform(-2.0, 0.0));
        let (_, limit) = compute_i_limit(&bank);
        let sys = build_pattern_system(&bank, Variant::MapTilde { exact: true }).unwrap();
        let l = bank.ell_max();
        for s in l..=(bank.n() + 1).saturating_sub(l) {
            let mut words: BTreeSet<Word> = (0..sys.layer(s).len()).map(|i| sys.word(s, i).clone()).collect();
            let mut limit = limit.clone();
            // the empty word needs a Γ word starting right after s
            if s + l > bank.n() {
                words.remove(&Word::empty());
                limit.remove(&Word::empty());
            }
            prop_assert_eq!(&words, &limit, "layer {}", s);
        }
    }

    #[test]
    fn oracle_min_plus_matches_map(seed in any::<u64>()) {
        let bank = bank_from(seed, Family::default(), false);
        let z = brute_force_z::<MinPlus<f64>>(&bank).unwrap();
        let (best, x) = brute_force_map(&bank).unwrap();
        prop_assert_eq!(z.0, best);
        prop_assert!((prefix_energy(&bank, &x) - best).abs() <= 1e-12);
    }

    #[test]
    fn samplers_are_deterministic(seed in any::<u64>(), draw in any::<u64>()) {
        let bank = bank_from(seed, Family::default(), false);
        for mode in [SamplerMode::Direct, SamplerMode::Alias] {
            let s = Sampler::new(&bank, mode).unwrap();
            let a = s.sample_many(20, draw).unwrap();
            prop_assert_eq!(&a, &s.sample_many(20, draw).unwrap());
            prop_assert!(a.iter().all(|x: &Vec<Symbol>| x.len() == bank.n()));
        }
    }

    #[test]
    fn alg4_and_alg5_agree_through_the_dispatcher(seed in any::<u64>(), kind in 0usize..4) {
        let kind = [SemiringKind::SumProduct, SemiringKind::MinPlus, SemiringKind::Count, SemiringKind::Bool][kind];
        let bank = bank_from(seed, Family::default(), true);
        let model = ModelFile { version: 1, semiring: kind, bank };
        let z = |algorithm| {
            let out = run_command(Command::Partition, &model, &RunOptions { algorithm, ..RunOptions::default() }).unwrap();
            out.find("result").unwrap().get("z").unwrap().to_string()
        };
        let (a, b) = (z(Algorithm::Alg4), z(Algorithm::Alg5));
        if kind == SemiringKind::SumProduct {
            let (x, y): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(y.abs()));
        } else {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn models_round_trip(seed in any::<u64>()) {
        let bank = bank_from(seed, Family::default(), false);
        let model = ModelFile { version: 1, semiring: SemiringKind::MinPlus, bank };
        let text = serialize_model(&model);
        let back = parse_model(&text).unwrap();
        prop_assert_eq!(&back.model, &model);
        prop_assert_eq!(serialize_model(&back.model), text);
    }
}
