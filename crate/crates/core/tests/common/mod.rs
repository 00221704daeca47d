#![allow(dead_code)]

use gectool::align::Edit;
use gectool::text::{Sentence, Token};
use rand::Rng;

pub fn sent(s: &str) -> Sentence {
    Sentence::from_tokenized(s)
}

pub fn toks(s: &str) -> Vec<Token> {
    sent(s).into_tokens()
}

pub fn edit(start: usize, end: usize, replacement: &str) -> Edit {
    Edit::new(start, end, toks(replacement))
}

/// Plain full-table Levenshtein distance over token sequences.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

/// Every sequence over `alphabet` with length at most `max_len`.
pub fn all_sequences(alphabet: &[&str], max_len: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for seq in &frontier {
            for sym in alphabet {
                let mut s = seq.clone();
                s.push(sym.to_string());
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn sentence_of(words: &[String]) -> Sentence {
    Sentence::new(words.iter().map(|w| Token::new(w.clone()).unwrap()).collect())
}

/// A random sentence of 0..=max_len tokens drawn from `alphabet`.
pub fn random_sentence<R: Rng>(rng: &mut R, alphabet: &[&str], max_len: usize) -> Sentence {
    let n = rng.random_range(0..=max_len);
    Sentence::new(
        (0..n)
            .map(|_| Token::new(alphabet[rng.random_range(0..alphabet.len())]).unwrap())
            .collect(),
    )
}

/// Target derived from `src` by a handful of random word edits, so pairs
/// look like real corrections rather than unrelated strings.
pub fn perturbed<R: Rng>(rng: &mut R, src: &Sentence, alphabet: &[&str]) -> Sentence {
    let mut words: Vec<String> = src.tokens().iter().map(|t| t.to_string()).collect();
    for _ in 0..rng.random_range(0..4) {
        let pick = alphabet[rng.random_range(0..alphabet.len())].to_string();
        match rng.random_range(0..4) {
            0 if !words.is_empty() => {
                let i = rng.random_range(0..words.len());
                words[i] = pick;
            }
            1 => {
                let i = rng.random_range(0..=words.len());
                words.insert(i, pick);
            }
            2 if !words.is_empty() => {
                let i = rng.random_range(0..words.len());
                words.remove(i);
            }
            3 if words.len() >= 2 => {
                let i = rng.random_range(0..words.len() - 1);
                let j = rng.random_range(i + 1..words.len());
                let w = words.remove(i);
                words.insert(j, w);
            }
            _ => {}
        }
    }
    sentence_of(&words)
}

fn normal_pdf(x: f64, mean: f64, std: f64) -> f64 {
    let z = (x - mean) / std;
    (-0.5 * z * z).exp() / (std * (2.0 * std::f64::consts::PI).sqrt())
}

/// Composite Simpson integral of `f` over [a, b].
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let steps = steps + steps % 2;
    let h = (b - a) / steps as f64;
    let mut sum = f(a) + f(b);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// P(a <= X <= b) for X ~ N(mean, std).
pub fn normal_mass(a: f64, b: f64, mean: f64, std: f64) -> f64 {
    let lo = a.max(mean - 12.0 * std);
    let hi = b.min(mean + 12.0 * std);
    simpson(|x| normal_pdf(x, mean, std), lo, hi, 4000)
}

/// E[clamp(X, 0, 1)] for X ~ N(mean, std), by quadrature.
pub fn clipped_normal_mean(mean: f64, std: f64) -> f64 {
    if std == 0.0 {
        return mean.clamp(0.0, 1.0);
    }
    let upper = normal_mass(1.0, f64::INFINITY, mean, std);
    let body = simpson(|x| x * normal_pdf(x, mean, std), 0.0, 1.0, 4000);
    body + upper
}

/// E[round(clamp(X, 0, 1) * n)] for X ~ N(mean, std), by quadrature over
/// the intervals on which the rounded count is constant.
pub fn expected_selection(mean: f64, std: f64, n: usize) -> f64 {
    let nf = n as f64;
    let mut total = 0.0;
    for j in 1..=n {
        let lo = (j as f64 - 0.5) / nf;
        let hi = if j == n { f64::INFINITY } else { (j as f64 + 0.5) / nf };
        total += j as f64 * normal_mass(lo, hi, mean, std);
    }
    total
}
