use serde::{Deserialize, Serialize};

use super::{Sentence, Token};

/// How raw text is turned into tokens.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenizeMode {
    /// Whitespace split, then punctuation detached from words.
    #[default]
    Rules,
    /// Input is already tokenized; split on whitespace only.
    Pretokenized,
}

/// Tokenizes raw text with the rule tokenizer.
///
/// Whitespace separates chunks. Inside a chunk every punctuation or symbol
/// character becomes its own token, except for joiners that sit between two
/// word characters: hyphens and apostrophes (`well-known`, `don't`) and
/// `.`/`,`/`:` between two digits (`3.14`, `1,000`).
pub fn tokenize(text: &str) -> Sentence {
    tokenize_with(text, TokenizeMode::Rules)
}

pub fn tokenize_with(text: &str, mode: TokenizeMode) -> Sentence {
    match mode {
        TokenizeMode::Pretokenized => Sentence::from_tokenized(text),
        TokenizeMode::Rules => {
            let mut tokens = Vec::new();
            for chunk in text.split_whitespace() {
                split_chunk(chunk, &mut tokens);
            }
            Sentence::new(tokens)
        }
    }
}

pub fn detokenize(sentence: &Sentence) -> String {
    sentence.to_string()
}

fn split_chunk(chunk: &str, out: &mut Vec<Token>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let glued = is_word_char(c) || is_glued_joiner(&chars, i);
        if glued {
            current.push(c);
        } else {
            if !current.is_empty() {
                out.push(Token(std::mem::take(&mut current)));
            }
            out.push(Token(c.to_string()));
        }
    }
    if !current.is_empty() {
        out.push(Token(current));
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_combining_mark(c)
}

fn is_combining_mark(c: char) -> bool {
    matches!(c,
        '\u{0300}'..='\u{036F}'
        | '\u{1AB0}'..='\u{1AFF}'
        | '\u{1DC0}'..='\u{1DFF}'
        | '\u{20D0}'..='\u{20FF}'
        | '\u{FE20}'..='\u{FE2F}')
}

fn is_glued_joiner(chars: &[char], i: usize) -> bool {
    if i == 0 || i + 1 >= chars.len() {
        return false;
    }
    let (prev, c, next) = (chars[i - 1], chars[i], chars[i + 1]);
    match c {
        '-' | '\u{2010}' | '\'' | '\u{2019}' => is_word_char(prev) && is_word_char(next),
        '.' | ',' | ':' => prev.is_numeric() && next.is_numeric(),
        _ => false,
    }
}
