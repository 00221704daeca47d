use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Languages with embedded noising constants.
pub const BUILTIN_LANGUAGES: [&str; 4] = ["en", "cs", "de", "ru"];

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("no built-in profile for language {0:?} (available: en, cs, de, ru)")]
    UnknownLanguage(String),
    #[error("{table} weights sum to {sum}, expected 1.0")]
    WeightSum { table: &'static str, sum: f64 },
    #[error("{field} = {value} is outside [0, 1]")]
    OutOfRange { field: String, value: f64 },
    #[error("{field} must be a finite non-negative number, got {value}")]
    NegativeStd { field: &'static str, value: f64 },
    #[error("toggle_diacritics weight is positive but the diacritics map is empty")]
    MissingDiacritics,
    #[error("character substitution/insertion weight is positive but the alphabet is empty")]
    EmptyAlphabet,
    #[error("diacritics map: {0}")]
    Diacritics(String),
    #[error("profile file is missing field {0:?} and has no built-in profile to fall back on")]
    MissingField(&'static str),
    #[error("invalid profile JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Word-level noising operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenOp {
    Substitute,
    Insert,
    Delete,
    Swap,
    Recase,
}

impl TokenOp {
    pub const ALL: [TokenOp; 5] = [
        TokenOp::Substitute,
        TokenOp::Insert,
        TokenOp::Delete,
        TokenOp::Swap,
        TokenOp::Recase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TokenOp::Substitute => "substitute",
            TokenOp::Insert => "insert",
            TokenOp::Delete => "delete",
            TokenOp::Swap => "swap",
            TokenOp::Recase => "recase",
        }
    }
}

impl fmt::Display for TokenOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Character-level noising operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharOp {
    Substitute,
    Insert,
    Delete,
    Recase,
    ToggleDiacritics,
}

impl CharOp {
    pub const ALL: [CharOp; 5] = [
        CharOp::Substitute,
        CharOp::Insert,
        CharOp::Delete,
        CharOp::Recase,
        CharOp::ToggleDiacritics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CharOp::Substitute => "substitute",
            CharOp::Insert => "insert",
            CharOp::Delete => "delete",
            CharOp::Recase => "recase",
            CharOp::ToggleDiacritics => "toggle_diacritics",
        }
    }
}

impl fmt::Display for CharOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenOpWeights {
    pub substitute: f64,
    pub insert: f64,
    pub delete: f64,
    pub swap: f64,
    pub recase: f64,
}

impl TokenOpWeights {
    pub fn weight(&self, op: TokenOp) -> f64 {
        match op {
            TokenOp::Substitute => self.substitute,
            TokenOp::Insert => self.insert,
            TokenOp::Delete => self.delete,
            TokenOp::Swap => self.swap,
            TokenOp::Recase => self.recase,
        }
    }

    pub fn as_array(&self) -> [f64; 5] {
        TokenOp::ALL.map(|op| self.weight(op))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharOpWeights {
    pub substitute: f64,
    pub insert: f64,
    pub delete: f64,
    pub recase: f64,
    pub toggle_diacritics: f64,
}

impl CharOpWeights {
    pub fn weight(&self, op: CharOp) -> f64 {
        match op {
            CharOp::Substitute => self.substitute,
            CharOp::Insert => self.insert,
            CharOp::Delete => self.delete,
            CharOp::Recase => self.recase,
            CharOp::ToggleDiacritics => self.toggle_diacritics,
        }
    }

    pub fn as_array(&self) -> [f64; 5] {
        CharOp::ALL.map(|op| self.weight(op))
    }
}

/// Mean and standard deviation of a per-sentence error probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorDistribution {
    pub mean: f64,
    pub std: f64,
}

/// Per-language noising constants.
///
/// The diacritics map relates a base character to its diacritized variants.
/// Every variant belongs to exactly one base, so the relation can be walked
/// in both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageProfile {
    pub lang: String,
    pub token_ops: TokenOpWeights,
    pub char_ops: CharOpWeights,
    pub word_err: ErrorDistribution,
    pub char_err: ErrorDistribution,
    alphabet: Vec<char>,
    diacritics: BTreeMap<char, BTreeSet<char>>,
    bases: BTreeMap<char, char>,
}

impl LanguageProfile {
    pub fn new(
        lang: impl Into<String>,
        token_ops: TokenOpWeights,
        char_ops: CharOpWeights,
        word_err: ErrorDistribution,
        char_err: ErrorDistribution,
        alphabet: impl IntoIterator<Item = char>,
        diacritics: BTreeMap<char, BTreeSet<char>>,
    ) -> Result<Self, ProfileError> {
        let alphabet: BTreeSet<char> = alphabet.into_iter().collect();
        let mut bases = BTreeMap::new();
        for (&base, variants) in &diacritics {
            for &variant in variants {
                if variant == base {
                    return Err(ProfileError::Diacritics(format!(
                        "{base:?} is listed as its own variant"
                    )));
                }
                if diacritics.contains_key(&variant) {
                    return Err(ProfileError::Diacritics(format!(
                        "variant {variant:?} is also used as a base"
                    )));
                }
                if let Some(prev) = bases.insert(variant, base) {
                    return Err(ProfileError::Diacritics(format!(
                        "variant {variant:?} belongs to both {prev:?} and {base:?}"
                    )));
                }
            }
        }
        let profile = LanguageProfile {
            lang: lang.into(),
            token_ops,
            char_ops,
            word_err,
            char_err,
            alphabet: alphabet.into_iter().collect(),
            diacritics,
            bases,
        };
        profile.validate()?;
        Ok(profile)
    }

    fn validate(&self) -> Result<(), ProfileError> {
        check_table(
            "token_ops",
            &self.token_ops.as_array(),
            &TokenOp::ALL.map(TokenOp::name),
        )?;
        check_table("char_ops", &self.char_ops.as_array(), &CharOp::ALL.map(CharOp::name))?;
        for (field, dist) in [("word_err", &self.word_err), ("char_err", &self.char_err)] {
            if !(0.0..=1.0).contains(&dist.mean) {
                return Err(ProfileError::OutOfRange {
                    field: format!("{field}.mean"),
                    value: dist.mean,
                });
            }
            if !(dist.std >= 0.0 && dist.std.is_finite()) {
                return Err(ProfileError::NegativeStd { field, value: dist.std });
            }
        }
        if self.char_ops.toggle_diacritics > 0.0 && self.diacritics.is_empty() {
            return Err(ProfileError::MissingDiacritics);
        }
        if (self.char_ops.substitute > 0.0 || self.char_ops.insert > 0.0) && self.alphabet.is_empty() {
            return Err(ProfileError::EmptyAlphabet);
        }
        Ok(())
    }

    /// Characters used for substitution and insertion, sorted.
    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn diacritics_map(&self) -> &BTreeMap<char, BTreeSet<char>> {
        &self.diacritics
    }

    /// The undiacritized base of `c`, or `c` itself if it is not a known variant.
    pub fn strip_diacritics(&self, c: char) -> char {
        self.bases.get(&c).copied().unwrap_or(c)
    }

    /// Characters `c` can become by adding or removing diacritics, sorted.
    ///
    /// For a base character these are its variants; for a variant they are
    /// the base plus the sibling variants. Empty when `c` is unrelated to the map.
    pub fn diacritic_alternatives(&self, c: char) -> Vec<char> {
        let base = self.strip_diacritics(c);
        let Some(variants) = self.diacritics.get(&base) else {
            return Vec::new();
        };
        std::iter::once(base)
            .chain(variants.iter().copied())
            .filter(|&x| x != c)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Parses a profile file. Fields missing from the file are taken from the
    /// built-in profile of the same language, if there is one.
    pub fn from_json(json: &str) -> Result<Self, ProfileError> {
        let file: ProfileFile = serde_json::from_str(json)?;
        let base = file.lang.as_deref().and_then(|lang| builtin_profile(lang).ok());
        file.resolve(base)
    }

    /// Applies the fields present in `json` on top of `self`.
    pub fn overlay_json(&self, json: &str) -> Result<Self, ProfileError> {
        let file: ProfileFile = serde_json::from_str(json)?;
        file.resolve(Some(self.clone()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("profile serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_file()).expect("profile serializes")
    }

    fn to_file(&self) -> ProfileFile {
        ProfileFile {
            lang: Some(self.lang.clone()),
            token_ops: Some(self.token_ops),
            char_ops: Some(self.char_ops),
            word_err: Some(self.word_err),
            char_err: Some(self.char_err),
            alphabet: Some(self.alphabet.iter().collect()),
            diacritics_map: Some(
                self.diacritics
                    .iter()
                    .map(|(base, vs)| (base.to_string(), vs.iter().collect()))
                    .collect(),
            ),
        }
    }
}

fn check_table(table: &'static str, weights: &[f64], names: &[&str]) -> Result<(), ProfileError> {
    for (w, name) in weights.iter().zip(names) {
        if !(0.0..=1.0).contains(w) {
            return Err(ProfileError::OutOfRange {
                field: format!("{table}.{name}"),
                value: *w,
            });
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(ProfileError::WeightSum { table, sum });
    }
    Ok(())
}

/// On-disk JSON shape of a profile. Every field is optional so a file can
/// override a built-in profile one field at a time.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    lang: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    token_ops: Option<TokenOpWeights>,
    #[serde(skip_serializing_if = "Option::is_none")]
    char_ops: Option<CharOpWeights>,
    #[serde(skip_serializing_if = "Option::is_none")]
    word_err: Option<ErrorDistribution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    char_err: Option<ErrorDistribution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alphabet: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diacritics_map: Option<BTreeMap<String, String>>,
}

impl ProfileFile {
    fn resolve(self, base: Option<LanguageProfile>) -> Result<LanguageProfile, ProfileError> {
        macro_rules! field {
            ($name:ident) => {
                match (self.$name, &base) {
                    (Some(v), _) => v,
                    (None, Some(b)) => b.$name.clone(),
                    (None, None) => return Err(ProfileError::MissingField(stringify!($name))),
                }
            };
        }
        let lang = field!(lang);
        let token_ops = field!(token_ops);
        let char_ops = field!(char_ops);
        let word_err = field!(word_err);
        let char_err = field!(char_err);
        let alphabet: Vec<char> = match (self.alphabet, &base) {
            (Some(a), _) => a.chars().collect(),
            (None, Some(b)) => b.alphabet.clone(),
            (None, None) => return Err(ProfileError::MissingField("alphabet")),
        };
        let diacritics = match (self.diacritics_map, &base) {
            (Some(map), _) => {
                let mut out: BTreeMap<char, BTreeSet<char>> = BTreeMap::new();
                for (key, variants) in map {
                    let mut chars = key.chars();
                    let (Some(base_char), None) = (chars.next(), chars.next()) else {
                        return Err(ProfileError::Diacritics(format!(
                            "key {key:?} must be a single character"
                        )));
                    };
                    out.entry(base_char).or_default().extend(variants.chars());
                }
                out
            }
            (None, Some(b)) => b.diacritics.clone(),
            (None, None) => BTreeMap::new(),
        };
        LanguageProfile::new(lang, token_ops, char_ops, word_err, char_err, alphabet, diacritics)
    }
}

const WORD_ERR: ErrorDistribution = ErrorDistribution { mean: 0.15, std: 0.2 };
const CHAR_ERR: ErrorDistribution = ErrorDistribution { mean: 0.02, std: 0.01 };
const EVEN_CHAR_OPS: CharOpWeights = CharOpWeights {
    substitute: 0.25,
    insert: 0.25,
    delete: 0.25,
    recase: 0.25,
    toggle_diacritics: 0.0,
};

const CZECH_DIACRITICS: [(char, &str); 13] = [
    ('a', "á"),
    ('c', "č"),
    ('d', "ď"),
    ('e', "éě"),
    ('i', "í"),
    ('n', "ň"),
    ('o', "ó"),
    ('r', "ř"),
    ('s', "š"),
    ('t', "ť"),
    ('u', "úů"),
    ('y', "ý"),
    ('z', "ž"),
];

fn latin() -> impl Iterator<Item = char> {
    ('a'..='z').chain('A'..='Z')
}

fn czech_diacritics() -> BTreeMap<char, BTreeSet<char>> {
    let mut map = BTreeMap::new();
    for (base, variants) in CZECH_DIACRITICS {
        map.insert(base, variants.chars().collect::<BTreeSet<_>>());
        map.insert(
            base.to_ascii_uppercase(),
            variants.chars().flat_map(char::to_uppercase).collect(),
        );
    }
    map
}

/// Returns the embedded noising constants for `lang`.
pub fn builtin_profile(lang: &str) -> Result<LanguageProfile, ProfileError> {
    let (token_ops, char_ops, alphabet, diacritics): (_, _, Vec<char>, _) = match lang {
        "en" => (
            TokenOpWeights {
                substitute: 0.6,
                insert: 0.2,
                delete: 0.1,
                swap: 0.05,
                recase: 0.05,
            },
            EVEN_CHAR_OPS,
            latin().collect(),
            BTreeMap::new(),
        ),
        "cs" => {
            let diacritics = czech_diacritics();
            let alphabet = latin()
                .chain(diacritics.values().flat_map(|vs| vs.iter().copied()))
                .collect();
            (
                TokenOpWeights {
                    substitute: 0.7,
                    insert: 0.1,
                    delete: 0.05,
                    swap: 0.1,
                    recase: 0.05,
                },
                CharOpWeights {
                    substitute: 0.2,
                    insert: 0.2,
                    delete: 0.2,
                    recase: 0.2,
                    toggle_diacritics: 0.2,
                },
                alphabet,
                diacritics,
            )
        }
        "de" => (
            TokenOpWeights {
                substitute: 0.64,
                insert: 0.2,
                delete: 0.1,
                swap: 0.01,
                recase: 0.05,
            },
            EVEN_CHAR_OPS,
            latin().chain("äöüßÄÖÜ".chars()).collect(),
            BTreeMap::new(),
        ),
        "ru" => (
            TokenOpWeights {
                substitute: 0.65,
                insert: 0.1,
                delete: 0.1,
                swap: 0.1,
                recase: 0.05,
            },
            EVEN_CHAR_OPS,
            ('а'..='я').chain('А'..='Я').chain("ёЁ".chars()).collect(),
            BTreeMap::new(),
        ),
        other => return Err(ProfileError::UnknownLanguage(other.to_string())),
    };
    LanguageProfile::new(lang, token_ops, char_ops, WORD_ERR, CHAR_ERR, alphabet, diacritics)
}
