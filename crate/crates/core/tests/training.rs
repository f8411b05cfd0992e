use nettagger::evaluation::{evaluate, learning_curve};
use nettagger::lexicon::Lexicon;
use nettagger::network::Network;
use nettagger::synthetic::SyntheticGrammar;
use nettagger::tagger::{
    blended_feedback, tag_corpus, tag_sentence, train, ModelRecipe, TrainingSchedule,
};
use nettagger::{ContextConfig, TaggedCorpus, TaggerModel, TrainingHyperparams};

fn small_corpus(tokens: usize) -> (SyntheticGrammar, TaggedCorpus) {
    let grammar = SyntheticGrammar::new(1);
    let corpus = grammar.generate(tokens, 4);
    (grammar, corpus)
}

fn hp(seed: u64) -> TrainingHyperparams {
    TrainingHyperparams {
        seed,
        ..Default::default()
    }
}

/// Independent replay of the training loop: slot layout, cycling over the
/// corpus and the teacher-forced feedback blend are spelled out by hand.
fn manual_training(
    lexicon: &Lexicon,
    corpus: &TaggedCorpus,
    ctx: ContextConfig,
    schedule: &TrainingSchedule,
    seed: u64,
) -> Network {
    let n = lexicon.tagset.len();
    let slots = ctx.preceding + 1 + ctx.following;
    let shape = nettagger::NetworkShape::new(slots * n, 0, n).unwrap();
    let mut net = Network::init(shape, seed, 0.1).unwrap();
    let mut cycle = 0u64;
    while cycle < schedule.total_cycles {
        for sentence in &corpus.sentences {
            let mut fed_back: Vec<Vec<f64>> = Vec::new();
            for pos in 0..sentence.len() {
                if cycle == schedule.total_cycles {
                    return net;
                }
                let mut input = Vec::with_capacity(slots * n);
                for back in (1..=ctx.preceding).rev() {
                    if back <= pos {
                        input.extend(&fed_back[pos - back]);
                    } else {
                        input.extend(std::iter::repeat_n(0.0, n));
                    }
                }
                for ahead in 0..=ctx.following {
                    match sentence.get(pos + ahead) {
                        Some(t) => input.extend(lexicon.lookup(&t.word)),
                        None => input.extend(std::iter::repeat_n(0.0, n)),
                    }
                }
                let mut target = vec![0.0; n];
                target[sentence[pos].tag] = 1.0;
                let out = net
                    .train_pattern(&input, &target, &schedule.hyperparams)
                    .unwrap();
                let lambda = if schedule.forcing_cycles == 0 {
                    0.0
                } else {
                    (1.0 - cycle as f64 / schedule.forcing_cycles as f64).max(0.0)
                };
                fed_back.push(
                    target
                        .iter()
                        .zip(&out)
                        .map(|(t, a)| lambda * t + (1.0 - lambda) * a)
                        .collect(),
                );
                cycle += 1;
            }
        }
    }
    net
}

#[test]
fn lexical_only_training_matches_plain_backprop_loop() {
    let (_, corpus) = small_corpus(600);
    let lexicon = Lexicon::build(&corpus, &Default::default()).unwrap();
    let ctx = ContextConfig::new(0, 2);
    let mut schedule = TrainingSchedule::new(1500, hp(3));
    schedule.forcing_cycles = 1500;
    let mut model = TaggerModel::new(lexicon.clone(), ctx, 0, 3, 0.1).unwrap();
    train(&mut model, &corpus, &schedule).unwrap();
    let want = manual_training(&lexicon, &corpus, ctx, &schedule, 3);
    assert_eq!(model.network.layers, want.layers);
}

#[test]
fn feedback_training_matches_manual_replay() {
    let (_, corpus) = small_corpus(500);
    let lexicon = Lexicon::build(&corpus, &Default::default()).unwrap();
    for ctx in [ContextConfig::new(3, 2), ContextConfig::new(1, 0)] {
        let schedule = TrainingSchedule::new(1200, hp(8));
        let mut model = TaggerModel::new(lexicon.clone(), ctx, 0, 8, 0.1).unwrap();
        train(&mut model, &corpus, &schedule).unwrap();
        let want = manual_training(&lexicon, &corpus, ctx, &schedule, 8);
        assert_eq!(model.network.layers, want.layers, "context {ctx:?}");
    }
}

#[test]
fn blend_endpoints() {
    let t = [1.0, 0.0];
    let a = [0.3, 0.6];
    assert_eq!(blended_feedback(&t, &a, 1.0).unwrap(), t);
    assert_eq!(blended_feedback(&t, &a, 0.0).unwrap(), a);
    assert!(blended_feedback(&t, &a, 1.5).is_err());
}

#[test]
fn context_resolves_ambiguous_words_like_the_exact_decoder() {
    let grammar = SyntheticGrammar::new(1);
    let train_set = grammar.generate(20_000, 21);
    let test_set = grammar.generate(3_000, 22);
    let recipe = ModelRecipe::new(TrainingSchedule::new(60_000, hp(1)));
    let (model, _) = recipe.fit(&train_set).unwrap();

    let mut ambiguous = 0;
    let mut agree = 0;
    for sentence in &test_set.sentences {
        let words: Vec<&str> = sentence.iter().map(|t| t.word.as_str()).collect();
        let net = tag_sentence(&model, &words, 0.0).unwrap();
        let exact = grammar.decode(&words);
        for (i, w) in words.iter().enumerate() {
            if grammar.is_ambiguous(w) {
                ambiguous += 1;
                agree += usize::from(net[i].primary == exact[i]);
            }
        }
    }
    let rate = agree as f64 / ambiguous as f64;
    assert!(ambiguous > 500);
    assert!(rate > 0.85, "agreement on ambiguous tokens {rate}");
}

#[test]
fn training_error_stays_finite_and_falls() {
    let (_, corpus) = small_corpus(5_000);
    let mut schedule = TrainingSchedule::new(20_000, hp(2));
    schedule.log_interval = 2_000;
    let recipe = ModelRecipe::new(schedule);
    let (_, log) = recipe.fit(&corpus).unwrap();
    assert_eq!(log.entries.len(), 10);
    assert!(log.entries.iter().all(|e| e.mse.is_finite()));
    assert!(log.entries.last().unwrap().mse < log.entries[0].mse);
    assert_eq!(log.entries.last().unwrap().lambda, 0.0);
}

#[test]
fn hidden_layer_model_trains() {
    let (_, corpus) = small_corpus(3_000);
    let mut recipe = ModelRecipe::new(TrainingSchedule::new(10_000, hp(4)));
    recipe.hidden = 12;
    let (model, log) = recipe.fit(&corpus).unwrap();
    assert!(log.entries.iter().all(|e| e.mse.is_finite()));
    let report = evaluate(&corpus, &tag_corpus(&model, &corpus, 0.1).unwrap()).unwrap();
    assert!(report.accuracy > 0.5, "{}", report.accuracy);
}

#[test]
fn zero_cycles_leaves_the_seeded_network() {
    let (_, corpus) = small_corpus(300);
    let recipe = ModelRecipe::new(TrainingSchedule::new(0, hp(9)));
    let (model, log) = recipe.fit(&corpus).unwrap();
    assert!(log.entries.is_empty());
    let fresh = TaggerModel::new(model.lexicon.clone(), model.context, 0, 9, 0.1).unwrap();
    assert_eq!(model.network, fresh.network);
}

#[test]
fn repeated_curve_sizes_give_identical_points() {
    let (_, corpus) = small_corpus(4_000);
    let eval = SyntheticGrammar::new(1).generate(500, 5);
    let recipe = ModelRecipe::new(TrainingSchedule::new(3_000, hp(6)));
    let curve = learning_curve(&corpus, &[1_000, 1_000, 4_000], &recipe, &eval, 0.1).unwrap();
    assert_eq!(curve.len(), 3);
    assert_eq!(curve[0], curve[1]);
    assert!(curve[0].train_tokens >= 1_000);
    assert_eq!(curve[2].train_tokens, 4_000);
    assert!(learning_curve(&corpus, &[2_000, 1_000], &recipe, &eval, 0.1).is_err());
    assert!(learning_curve(&corpus, &[5_000], &recipe, &eval, 0.1).is_err());
}

#[test]
fn saved_network_tags_identically() {
    let (_, corpus) = small_corpus(2_000);
    let (model, _) = ModelRecipe::new(TrainingSchedule::new(4_000, hp(1)))
        .fit(&corpus)
        .unwrap();
    let mut buf = Vec::new();
    model.write_network(&mut buf).unwrap();
    let back = TaggerModel::read_network(
        buf.as_slice(),
        model.lexicon.clone(),
        ContextConfig::new(1, 1),
    )
    .unwrap();
    assert_eq!(back.context, model.context);
    assert_eq!(
        tag_corpus(&back, &corpus, 0.1).unwrap(),
        tag_corpus(&model, &corpus, 0.1).unwrap()
    );
}
