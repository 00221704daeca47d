//! Tokens, sentences, the rule tokenizer and language profiles.

mod profile;
mod tokenize;

pub use profile::{
    builtin_profile, CharOp, CharOpWeights, ErrorDistribution, LanguageProfile, ProfileError, TokenOp, TokenOpWeights,
    BUILTIN_LANGUAGES,
};
pub use tokenize::{detokenize, tokenize, tokenize_with, TokenizeMode};

use std::fmt;
use std::ops::Deref;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenError {
    #[error("empty token")]
    Empty,
    #[error("token {0:?} contains whitespace")]
    Whitespace(String),
}

/// A single non-empty token without whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(String);

impl Token {
    pub fn new(text: impl Into<String>) -> Result<Self, TokenError> {
        let text = text.into();
        if text.is_empty() {
            return Err(TokenError::Empty);
        }
        if text.chars().any(char::is_whitespace) {
            return Err(TokenError::Whitespace(text));
        }
        Ok(Token(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl Deref for Token {
    type Target = str;

    fn deref(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<&str> for Token {
    type Error = TokenError;

    fn try_from(value: &str) -> Result<Self, Self::Error> {
        Token::new(value)
    }
}

/// An ordered sequence of tokens. Displays as the single-space join of its tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Sentence {
    tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Sentence { tokens }
    }

    /// Splits already-tokenized text on whitespace.
    pub fn from_tokenized(text: &str) -> Self {
        Sentence {
            tokens: text.split_whitespace().map(|t| Token(t.to_string())).collect(),
        }
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn char_count(&self) -> usize {
        self.tokens.iter().map(|t| t.chars().count()).sum()
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, token) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(token)?;
        }
        Ok(())
    }
}

impl From<Vec<Token>> for Sentence {
    fn from(tokens: Vec<Token>) -> Self {
        Sentence { tokens }
    }
}

impl FromIterator<Token> for Sentence {
    fn from_iter<I: IntoIterator<Item = Token>>(iter: I) -> Self {
        Sentence {
            tokens: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_rejects_empty_and_whitespace() {
        assert_eq!(Token::new(""), Err(TokenError::Empty));
        assert!(matches!(Token::new("a b"), Err(TokenError::Whitespace(_))));
        assert!(matches!(Token::new("a\u{00a0}b"), Err(TokenError::Whitespace(_))));
        assert_eq!(Token::new("váza").unwrap().as_str(), "váza");
    }

    #[test]
    fn sentence_display_joins_with_single_space() {
        assert_eq!(Sentence::default().to_string(), "");
        let s = Sentence::from_tokenized("a   b\tc");
        assert_eq!(s.to_string(), "a b c");
        assert_eq!(Sentence::from_tokenized(&s.to_string()), s);
        assert_eq!(s.char_count(), 3);
    }
}
