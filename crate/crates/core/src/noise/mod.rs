//! Seeded synthetic-error injection.
//!
//! Each sentence gets its own generator derived from the corpus seed and the
//! record index (see [`record_rng`]), so the output for a line never depends
//! on how the corpus is split across threads.
//!
//! Per sentence, a word error probability is drawn from a clipped normal
//! distribution and `round(p * len)` distinct word positions are corrupted
//! with one token operation each, visited right to left. A character pass
//! then does the same over character positions with the character operations.

mod lexicon;
mod synth;

pub use lexicon::{osa_distance, ConfusionLexicon, LexiconError, VocabEntry, DEFAULT_MAX_EDIT_DISTANCE};
pub use synth::{synthesize_corpus, PairSink, SplitSink, SynthesisSummary, TsvSink};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{CharOp, LanguageProfile, Sentence, Token, TokenOp, TokenizeMode};

pub const DEFAULT_MAX_SENTENCES: u64 = 10_000_000;

/// Attempts at drawing a feasible operation before a position is left alone.
pub const MAX_ATTEMPTS: usize = 10;

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("invalid noise configuration: {0}")]
    Config(String),
    #[error("skipped {skipped} of {lines} input lines as malformed UTF-8 (more than 1%)")]
    TooManyMalformed { skipped: u64, lines: u64 },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Generator for one record: ChaCha20 keyed by `seed` (expanded with
/// `SeedableRng::seed_from_u64`), on stream number `record_index`.
pub fn record_rng(seed: u64, record_index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(record_index);
    rng
}

/// One draw from `Normal(mean, std)` clipped to `[0, 1]`. Returns `mean` when `std` is 0.
pub fn sample_error_prob<R: Rng + ?Sized>(rng: &mut R, mean: f64, std: f64) -> f64 {
    if std <= 0.0 {
        return mean.clamp(0.0, 1.0);
    }
    let normal = Normal::new(mean, std).expect("finite positive std");
    normal.sample(rng).clamp(0.0, 1.0)
}

/// Whether the character pass runs on every sentence or only on sentences
/// that also received word-level errors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CharNoiseScope {
    #[default]
    All,
    CorruptedOnly,
}

/// How the inserted word is drawn from the vocabulary.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InsertSampling {
    #[default]
    Uniform,
    FrequencyWeighted,
}

#[derive(Debug, Clone)]
pub struct NoiseConfig {
    pub profile: LanguageProfile,
    pub seed: u64,
    pub max_sentences: u64,
    pub char_noise: CharNoiseScope,
    pub insert_sampling: InsertSampling,
    pub tokenize: TokenizeMode,
}

impl NoiseConfig {
    pub fn new(profile: LanguageProfile, seed: u64) -> Self {
        NoiseConfig {
            profile,
            seed,
            max_sentences: DEFAULT_MAX_SENTENCES,
            char_noise: CharNoiseScope::default(),
            insert_sampling: InsertSampling::default(),
            tokenize: TokenizeMode::default(),
        }
    }
}

/// Counts of what the noiser did; mergeable across sentences.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseStats {
    pub tokens_seen: u64,
    pub words_selected: u64,
    /// Applied token operations, indexed like [`TokenOp::ALL`].
    pub token_ops: [u64; 5],
    pub token_redraws: u64,
    pub token_abandoned: u64,
    pub chars_seen: u64,
    pub chars_selected: u64,
    /// Applied character operations, indexed like [`CharOp::ALL`].
    pub char_ops: [u64; 5],
    pub char_redraws: u64,
    pub char_abandoned: u64,
}

impl NoiseStats {
    pub fn token_op_count(&self, op: TokenOp) -> u64 {
        self.token_ops[op as usize]
    }

    pub fn char_op_count(&self, op: CharOp) -> u64 {
        self.char_ops[op as usize]
    }

    pub fn merge(&mut self, other: &NoiseStats) {
        self.tokens_seen += other.tokens_seen;
        self.words_selected += other.words_selected;
        self.token_redraws += other.token_redraws;
        self.token_abandoned += other.token_abandoned;
        self.chars_seen += other.chars_seen;
        self.chars_selected += other.chars_selected;
        self.char_redraws += other.char_redraws;
        self.char_abandoned += other.char_abandoned;
        for i in 0..5 {
            self.token_ops[i] += other.token_ops[i];
            self.char_ops[i] += other.char_ops[i];
        }
    }
}

/// Applies the corruption procedure of a [`NoiseConfig`] with a lexicon.
#[derive(Debug)]
pub struct Noiser {
    config: NoiseConfig,
    lexicon: ConfusionLexicon,
    token_dist: WeightedIndex<f64>,
    char_dist: WeightedIndex<f64>,
    insert_dist: Option<WeightedIndex<u64>>,
}

impl Noiser {
    pub fn new(config: NoiseConfig, lexicon: ConfusionLexicon) -> Result<Self, NoiseError> {
        if config.max_sentences == 0 {
            return Err(NoiseError::Config("max_sentences must be positive".into()));
        }
        let profile = &config.profile;
        if profile.token_ops.insert > 0.0 && lexicon.vocabulary().is_empty() {
            return Err(NoiseError::Config(
                "the profile inserts words but the vocabulary is empty".into(),
            ));
        }
        let token_dist = WeightedIndex::new(profile.token_ops.as_array())
            .map_err(|e| NoiseError::Config(format!("token weights: {e}")))?;
        let char_dist = WeightedIndex::new(profile.char_ops.as_array())
            .map_err(|e| NoiseError::Config(format!("char weights: {e}")))?;
        let insert_dist = match config.insert_sampling {
            InsertSampling::FrequencyWeighted if !lexicon.vocabulary().is_empty() => Some(
                WeightedIndex::new(lexicon.vocabulary().iter().map(|e| e.freq))
                    .map_err(|e| NoiseError::Config(format!("vocabulary frequencies: {e}")))?,
            ),
            _ => None,
        };
        Ok(Noiser {
            config,
            lexicon,
            token_dist,
            char_dist,
            insert_dist,
        })
    }

    pub fn config(&self) -> &NoiseConfig {
        &self.config
    }

    pub fn lexicon(&self) -> &ConfusionLexicon {
        &self.lexicon
    }

    pub fn profile(&self) -> &LanguageProfile {
        &self.config.profile
    }

    /// Produces the noisy version of `sentence`. The result depends only on
    /// the seed, `record_index`, the sentence, the profile and the lexicon.
    pub fn corrupt_sentence(&self, sentence: &Sentence, record_index: u64) -> Sentence {
        self.corrupt_sentence_with_stats(sentence, record_index).0
    }

    pub fn corrupt_sentence_with_stats(&self, sentence: &Sentence, record_index: u64) -> (Sentence, NoiseStats) {
        let mut stats = NoiseStats::default();
        let mut rng = record_rng(self.config.seed, record_index);
        let mut tokens = sentence.tokens().to_vec();
        let words = self.corrupt_words(&mut rng, &mut tokens, &mut stats);
        if self.config.char_noise == CharNoiseScope::All || words > 0 {
            self.corrupt_chars(&mut rng, &mut tokens, &mut stats);
        }
        (Sentence::new(tokens), stats)
    }

    /// Word-level pass. Returns the number of selected positions.
    pub fn corrupt_words<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        tokens: &mut Vec<Token>,
        stats: &mut NoiseStats,
    ) -> usize {
        let n = tokens.len();
        stats.tokens_seen += n as u64;
        if n == 0 {
            return 0;
        }
        let dist = self.config.profile.word_err;
        let p = sample_error_prob(rng, dist.mean, dist.std);
        let k = selection_count(p, n);
        stats.words_selected += k as u64;
        let mut positions = index::sample(rng, n, k).into_vec();
        positions.sort_unstable_by(|a, b| b.cmp(a));
        for i in positions {
            self.corrupt_word(rng, i, tokens, stats);
        }
        k
    }

    /// Applies one token operation at `index`, redrawing infeasible ones.
    pub fn corrupt_word<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        index: usize,
        tokens: &mut Vec<Token>,
        stats: &mut NoiseStats,
    ) -> Option<TokenOp> {
        for _ in 0..MAX_ATTEMPTS {
            let op = TokenOp::ALL[self.token_dist.sample(rng)];
            if self.apply_token_op(rng, op, index, tokens) {
                stats.token_ops[op as usize] += 1;
                return Some(op);
            }
            stats.token_redraws += 1;
        }
        stats.token_abandoned += 1;
        None
    }

    fn apply_token_op<R: Rng + ?Sized>(&self, rng: &mut R, op: TokenOp, i: usize, tokens: &mut Vec<Token>) -> bool {
        match op {
            TokenOp::Substitute => {
                let candidates = self.lexicon.propose(&tokens[i]);
                if candidates.is_empty() {
                    return false;
                }
                let choice = &candidates[rng.random_range(0..candidates.len())];
                let replacement = Sentence::from_tokenized(choice).into_tokens();
                if replacement.is_empty() {
                    return false;
                }
                tokens.splice(i..=i, replacement);
                true
            }
            TokenOp::Insert => {
                let vocab = self.lexicon.vocabulary();
                if vocab.is_empty() {
                    return false;
                }
                let pick = match &self.insert_dist {
                    Some(dist) => dist.sample(rng),
                    None => rng.random_range(0..vocab.len()),
                };
                tokens.insert(
                    i + 1,
                    Token::new(vocab[pick].word.clone()).expect("vocabulary words are tokens"),
                );
                true
            }
            TokenOp::Delete => {
                tokens.remove(i);
                true
            }
            TokenOp::Swap => {
                if i + 1 >= tokens.len() {
                    return false;
                }
                tokens.swap(i, i + 1);
                true
            }
            TokenOp::Recase => match recase_word(rng, &tokens[i]) {
                Some(word) => {
                    tokens[i] = Token::new(word).expect("recasing keeps a token non-empty");
                    true
                }
                None => false,
            },
        }
    }

    /// Character-level pass over the whole sentence.
    pub fn corrupt_chars<R: Rng + ?Sized>(&self, rng: &mut R, tokens: &mut [Token], stats: &mut NoiseStats) {
        let mut words: Vec<Vec<char>> = tokens.iter().map(|t| t.chars().collect()).collect();
        let total: usize = words.iter().map(Vec::len).sum();
        stats.chars_seen += total as u64;
        if total == 0 {
            return;
        }
        let dist = self.config.profile.char_err;
        let p = sample_error_prob(rng, dist.mean, dist.std);
        let k = selection_count(p, total);
        stats.chars_selected += k as u64;
        if k == 0 {
            return;
        }
        let mut positions = index::sample(rng, total, k).into_vec();
        positions.sort_unstable_by(|a, b| b.cmp(a));

        let mut offsets = Vec::with_capacity(words.len());
        let mut acc = 0;
        for w in &words {
            offsets.push(acc);
            acc += w.len();
        }
        for pos in positions {
            let w = offsets.partition_point(|&o| o <= pos) - 1;
            self.corrupt_char(rng, &mut words[w], pos - offsets[w], stats);
        }
        for (token, chars) in tokens.iter_mut().zip(words) {
            *token = Token::new(chars.into_iter().collect::<String>()).expect("char noise keeps tokens non-empty");
        }
    }

    /// Applies one character operation at `index` of `word`, redrawing infeasible ones.
    pub fn corrupt_char<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        word: &mut Vec<char>,
        index: usize,
        stats: &mut NoiseStats,
    ) -> Option<CharOp> {
        for _ in 0..MAX_ATTEMPTS {
            let op = CharOp::ALL[self.char_dist.sample(rng)];
            if self.apply_char_op(rng, op, word, index) {
                stats.char_ops[op as usize] += 1;
                return Some(op);
            }
            stats.char_redraws += 1;
        }
        stats.char_abandoned += 1;
        None
    }

    fn apply_char_op<R: Rng + ?Sized>(&self, rng: &mut R, op: CharOp, word: &mut Vec<char>, i: usize) -> bool {
        let profile = &self.config.profile;
        let alphabet = profile.alphabet();
        let c = word[i];
        match op {
            CharOp::Substitute => {
                let options: Vec<char> = alphabet.iter().copied().filter(|&x| x != c).collect();
                if options.is_empty() {
                    return false;
                }
                word[i] = options[rng.random_range(0..options.len())];
                true
            }
            CharOp::Insert => {
                if alphabet.is_empty() {
                    return false;
                }
                word.insert(i + 1, alphabet[rng.random_range(0..alphabet.len())]);
                true
            }
            CharOp::Delete => {
                if word.len() < 2 {
                    return false;
                }
                word.remove(i);
                true
            }
            CharOp::Recase => match invert_case(c) {
                Some(x) => {
                    word[i] = x;
                    true
                }
                None => false,
            },
            CharOp::ToggleDiacritics => {
                let options = profile.diacritic_alternatives(c);
                if options.is_empty() {
                    return false;
                }
                word[i] = options[rng.random_range(0..options.len())];
                true
            }
        }
    }
}

/// `round(p * n)` with halves rounded up, capped at `n`.
pub fn selection_count(p: f64, n: usize) -> usize {
    ((p * n as f64).round() as usize).min(n)
}

/// The single-character case counterpart of `c`, if it has one.
pub fn invert_case(c: char) -> Option<char> {
    fn single(mut it: impl Iterator<Item = char>, c: char) -> Option<char> {
        match (it.next(), it.next()) {
            (Some(x), None) if x != c => Some(x),
            _ => None,
        }
    }
    if c.is_lowercase() {
        single(c.to_uppercase(), c)
    } else if c.is_uppercase() {
        single(c.to_lowercase(), c)
    } else {
        None
    }
}

/// Word-level recasing: with probability 0.5 the word is lower-cased;
/// otherwise (or when lower-casing changes nothing) each cased character is
/// inverted with probability 0.5, redrawn until at least one changes.
/// `None` when the word has no cased characters.
pub fn recase_word<R: Rng + ?Sized>(rng: &mut R, word: &str) -> Option<String> {
    if rng.random_bool(0.5) {
        let lower = word.to_lowercase();
        if lower != word {
            return Some(lower);
        }
    }
    let chars: Vec<char> = word.chars().collect();
    let cased: Vec<(usize, char)> = chars
        .iter()
        .enumerate()
        .filter_map(|(i, &c)| invert_case(c).map(|x| (i, x)))
        .collect();
    if cased.is_empty() {
        return None;
    }
    let mut out = chars.clone();
    loop {
        let mut changed = false;
        for &(i, inverted) in &cased {
            if rng.random_bool(0.5) {
                out[i] = inverted;
                changed = true;
            } else {
                out[i] = chars[i];
            }
        }
        if changed {
            return Some(out.into_iter().collect());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::builtin_profile;

    fn lexicon() -> ConfusionLexicon {
        let mut lex = ConfusionLexicon::from_vocabulary([("pes", 3), ("kočka", 1), ("dům", 2)]);
        lex.add_proposals("a", ["b"]);
        lex
    }

    fn profile_with(json: &str) -> LanguageProfile {
        builtin_profile("cs").unwrap().overlay_json(json).unwrap()
    }

    #[test]
    fn std_zero_returns_mean() {
        let mut rng = record_rng(1, 0);
        assert_eq!(sample_error_prob(&mut rng, 0.15, 0.0), 0.15);
        assert_eq!(sample_error_prob(&mut rng, 0.0, 0.0), 0.0);
        for _ in 0..1000 {
            let p = sample_error_prob(&mut rng, 0.15, 0.2);
            assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn record_streams_are_independent_and_stable() {
        let a: u64 = record_rng(7, 3).random();
        let b: u64 = record_rng(7, 3).random();
        let c: u64 = record_rng(7, 4).random();
        let d: u64 = record_rng(8, 3).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn zero_error_profile_is_identity() {
        let profile = profile_with(r#"{"word_err": {"mean": 0, "std": 0}, "char_err": {"mean": 0, "std": 0}}"#);
        let noiser = Noiser::new(NoiseConfig::new(profile, 1), lexicon()).unwrap();
        let s = Sentence::from_tokenized("Praha je hlavní město .");
        for i in 0..50 {
            assert_eq!(noiser.corrupt_sentence(&s, i), s);
        }
        assert!(noiser.corrupt_sentence(&Sentence::default(), 0).is_empty());
    }

    #[test]
    fn recase_lowercase_branch() {
        let mut seen_lower = false;
        for seed in 0..64 {
            let mut rng = record_rng(seed, 0);
            let out = recase_word(&mut rng, "Praha").unwrap();
            assert_ne!(out, "Praha");
            seen_lower |= out == "praha";
        }
        assert!(seen_lower);
        let mut rng = record_rng(0, 0);
        assert_eq!(recase_word(&mut rng, "123,"), None);
        for seed in 0..32 {
            let mut rng = record_rng(seed, 1);
            let out = recase_word(&mut rng, "praha").unwrap();
            assert_ne!(out, "praha");
            assert_eq!(out.to_lowercase(), "praha");
        }
    }

    #[test]
    fn invert_case_cases() {
        assert_eq!(invert_case('a'), Some('A'));
        assert_eq!(invert_case('Ž'), Some('ž'));
        assert_eq!(invert_case('ß'), None);
        assert_eq!(invert_case('1'), None);
    }

    fn only_token_op(op: &str) -> Noiser {
        let mut weights = serde_json::json!({"substitute": 0, "insert": 0, "delete": 0, "swap": 0, "recase": 0});
        weights[op] = serde_json::json!(1.0);
        let profile = profile_with(&format!(r#"{{"token_ops": {weights}}}"#));
        Noiser::new(NoiseConfig::new(profile, 5), lexicon()).unwrap()
    }

    #[test]
    fn single_token_operations() {
        let mut stats = NoiseStats::default();
        let mut rng = record_rng(0, 0);

        let mut toks = Sentence::from_tokenized("a b").into_tokens();
        assert_eq!(
            only_token_op("swap").corrupt_word(&mut rng, 0, &mut toks, &mut stats),
            Some(TokenOp::Swap)
        );
        assert_eq!(Sentence::new(toks).to_string(), "b a");

        let mut toks = Sentence::from_tokenized("a b").into_tokens();
        assert_eq!(
            only_token_op("swap").corrupt_word(&mut rng, 1, &mut toks, &mut stats),
            None
        );
        assert_eq!(stats.token_abandoned, 1);
        assert_eq!(stats.token_redraws, MAX_ATTEMPTS as u64);

        let mut toks = Sentence::from_tokenized("a b").into_tokens();
        only_token_op("substitute").corrupt_word(&mut rng, 0, &mut toks, &mut stats);
        assert_eq!(Sentence::new(toks).to_string(), "b b");

        let mut toks = Sentence::from_tokenized("a b").into_tokens();
        only_token_op("delete").corrupt_word(&mut rng, 1, &mut toks, &mut stats);
        assert_eq!(Sentence::new(toks).to_string(), "a");

        let mut toks = Sentence::from_tokenized("a b").into_tokens();
        only_token_op("insert").corrupt_word(&mut rng, 0, &mut toks, &mut stats);
        assert_eq!(toks.len(), 3);
        assert!(["pes", "kočka", "dům"].contains(&toks[1].as_str()));
    }

    #[test]
    fn toggle_diacritics_strips_variant() {
        let profile = profile_with(
            r#"{"char_ops": {"substitute": 0, "insert": 0, "delete": 0, "recase": 0, "toggle_diacritics": 1}}"#,
        );
        let noiser = Noiser::new(NoiseConfig::new(profile, 1), lexicon()).unwrap();
        let mut word: Vec<char> = "škola".chars().collect();
        let mut stats = NoiseStats::default();
        let op = noiser.corrupt_char(&mut record_rng(1, 1), &mut word, 0, &mut stats);
        assert_eq!(op, Some(CharOp::ToggleDiacritics));
        assert_eq!(word.iter().collect::<String>(), "skola");
        let mut word: Vec<char> = "k".chars().collect();
        assert_eq!(
            noiser.corrupt_char(&mut record_rng(1, 1), &mut word, 0, &mut stats),
            None
        );
    }

    #[test]
    fn insert_requires_vocabulary() {
        let cfg = NoiseConfig::new(builtin_profile("en").unwrap(), 0);
        assert!(matches!(
            Noiser::new(cfg, ConfusionLexicon::new()),
            Err(NoiseError::Config(_))
        ));
        let mut cfg = NoiseConfig::new(builtin_profile("en").unwrap(), 0);
        cfg.max_sentences = 0;
        assert!(Noiser::new(cfg, lexicon()).is_err());
    }

    #[test]
    fn selection_rounds_half_up() {
        assert_eq!(selection_count(0.15, 10), 2);
        assert_eq!(selection_count(0.25, 2), 1);
        assert_eq!(selection_count(0.24, 2), 0);
        assert_eq!(selection_count(1.0, 3), 3);
    }

    #[test]
    fn deterministic_per_record() {
        let noiser = Noiser::new(NoiseConfig::new(builtin_profile("cs").unwrap(), 42), lexicon()).unwrap();
        let s = Sentence::from_tokenized("Včera jsme byli v Praze na výletě a pes šel s námi .");
        let first: Vec<_> = (0..20).map(|i| noiser.corrupt_sentence(&s, i)).collect();
        let again: Vec<_> = (0..20).rev().map(|i| noiser.corrupt_sentence(&s, i)).collect();
        assert_eq!(first, again.into_iter().rev().collect::<Vec<_>>());
        assert!(first.iter().any(|n| n != &s));
    }
}
