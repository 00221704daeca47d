//! C ABI for gectool.
//!
//! Every fallible call returns a [`GtStatus`]; on failure a description is
//! available from [`gt_last_error`] on the same thread. Strings returned
//! through `char **out` parameters are owned by the caller and must be
//! released with [`gt_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gectool::align::{align, error_rate};
use gectool::m2::{emit_m2, from_parallel, parse_m2, ExtractOptions};
use gectool::noise::{ConfusionLexicon, NoiseConfig, Noiser};
use gectool::score::{f_beta, Scorer};
use gectool::text::{builtin_profile, tokenize_with, LanguageProfile, Sentence, TokenizeMode};
use libc::c_char;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Parse = 4,
    Undefined = 5,
    Panic = 6,
}

/// Noiser handle from [`gt_noiser_new`].
pub struct GtNoiser {
    inner: Noiser,
}

/// Incremental scorer handle from [`gt_scorer_new`].
pub struct GtScorer {
    inner: Scorer,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(message).unwrap_or_default());
}

type FfiResult<T> = Result<T, (GtStatus, String)>;

fn fail<T>(status: GtStatus, message: impl ToString) -> FfiResult<T> {
    Err((status, message.to_string()))
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> GtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GtStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GtStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return fail(GtStatus::NullPointer, format!("{name} is NULL"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(GtStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, name).map(Some)
    }
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> FfiResult<&'a mut T> {
    p.as_mut()
        .map_or_else(|| fail(GtStatus::NullPointer, format!("{name} is NULL")), Ok)
}

fn to_c_string(s: String) -> FfiResult<*mut c_char> {
    CString::new(s)
        .map(CString::into_raw)
        .or_else(|_| fail(GtStatus::InvalidArgument, "result contains a NUL byte"))
}

/// Message describing the last failed call on this thread, or "" after a
/// successful one. Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn gt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn gt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// F-beta of a precision and recall, both in [0, 1].
///
/// # Safety
/// `out` must point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn gt_f_beta(precision: f64, recall: f64, beta: f64, out: *mut f64) -> GtStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = f_beta(precision, recall, beta).or_else(|e| fail(GtStatus::InvalidArgument, e))?;
        Ok(())
    })
}

/// Share of non-match edges in the alignment of two whitespace-tokenized
/// sentences. Returns `GT_STATUS_UNDEFINED` when both are empty.
///
/// # Safety
/// `source` and `target` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_error_rate(source: *const c_char, target: *const c_char, out: *mut f64) -> GtStatus {
    guard(|| {
        let src = Sentence::from_tokenized(str_arg(source, "source")?);
        let tgt = Sentence::from_tokenized(str_arg(target, "target")?);
        let out = out_arg(out, "out")?;
        *out = error_rate(&src, &tgt).or_else(|e| fail(GtStatus::Undefined, e))?;
        Ok(())
    })
}

/// Token-level edit distance between two whitespace-tokenized sentences.
///
/// # Safety
/// `source` and `target` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_align_cost(source: *const c_char, target: *const c_char, out: *mut usize) -> GtStatus {
    guard(|| {
        let src = Sentence::from_tokenized(str_arg(source, "source")?);
        let tgt = Sentence::from_tokenized(str_arg(target, "target")?);
        *out_arg(out, "out")? = align(&src, &tgt).cost();
        Ok(())
    })
}

/// Tokenizes `text` with the rule tokenizer; the tokens are joined by single spaces.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_tokenize(text: *const c_char, out: *mut *mut c_char) -> GtStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let out = out_arg(out, "out")?;
        *out = to_c_string(tokenize_with(text, TokenizeMode::Rules).to_string())?;
        Ok(())
    })
}

/// M2 record for one whitespace-tokenized parallel pair, annotator 0.
///
/// # Safety
/// `source` and `target` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_extract_m2(
    source: *const c_char,
    target: *const c_char,
    merge_swaps: bool,
    out: *mut *mut c_char,
) -> GtStatus {
    guard(|| {
        let src = Sentence::from_tokenized(str_arg(source, "source")?);
        let tgt = Sentence::from_tokenized(str_arg(target, "target")?);
        let out = out_arg(out, "out")?;
        let options = ExtractOptions {
            merge_swaps,
            ..ExtractOptions::default()
        };
        let record = from_parallel(&src, &tgt, 0, &options);
        let text = emit_m2(&[record]).or_else(|e| fail(GtStatus::InvalidArgument, e))?;
        *out = to_c_string(text)?;
        Ok(())
    })
}

/// Creates a noiser.
///
/// `lang` names a built-in profile; `profile_json` overrides its fields, or
/// defines the whole profile when `lang` is NULL. `vocabulary` holds one
/// `word[<TAB>freq]` per line and may be NULL when the profile never inserts.
///
/// # Safety
/// String arguments must be NULL or NUL-terminated; `out` must be writable.
/// The handle must be released with [`gt_noiser_free`].
#[no_mangle]
pub unsafe extern "C" fn gt_noiser_new(
    lang: *const c_char,
    profile_json: *const c_char,
    seed: u64,
    vocabulary: *const c_char,
    out: *mut *mut GtNoiser,
) -> GtStatus {
    guard(|| {
        let lang = opt_str_arg(lang, "lang")?;
        let json = opt_str_arg(profile_json, "profile_json")?;
        let vocabulary = opt_str_arg(vocabulary, "vocabulary")?;
        let out = out_arg(out, "out")?;
        let invalid = |e: gectool::text::ProfileError| (GtStatus::InvalidArgument, e.to_string());
        let profile = match (lang, json) {
            (Some(lang), None) => builtin_profile(lang).map_err(invalid)?,
            (Some(lang), Some(json)) => builtin_profile(lang)
                .and_then(|p| p.overlay_json(json))
                .map_err(invalid)?,
            (None, Some(json)) => LanguageProfile::from_json(json).map_err(invalid)?,
            (None, None) => return fail(GtStatus::NullPointer, "lang and profile_json are both NULL"),
        };
        let lexicon = match vocabulary {
            Some(text) => ConfusionLexicon::read_vocabulary(text.as_bytes()).or_else(|e| fail(GtStatus::Parse, e))?,
            None => ConfusionLexicon::new(),
        };
        let noiser =
            Noiser::new(NoiseConfig::new(profile, seed), lexicon).or_else(|e| fail(GtStatus::InvalidArgument, e))?;
        *out = Box::into_raw(Box::new(GtNoiser { inner: noiser }));
        Ok(())
    })
}

/// Corrupts one sentence as record `record_index`. With `pretokenized` the
/// input is split on whitespace, otherwise it goes through the rule tokenizer.
/// The result is space-joined tokens.
///
/// # Safety
/// `noiser` must come from [`gt_noiser_new`]; `sentence` must be NUL-terminated;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_noiser_corrupt(
    noiser: *const GtNoiser,
    sentence: *const c_char,
    record_index: u64,
    pretokenized: bool,
    out: *mut *mut c_char,
) -> GtStatus {
    guard(|| {
        let Some(noiser) = noiser.as_ref() else {
            return fail(GtStatus::NullPointer, "noiser is NULL");
        };
        let text = str_arg(sentence, "sentence")?;
        let out = out_arg(out, "out")?;
        let mode = if pretokenized {
            TokenizeMode::Pretokenized
        } else {
            TokenizeMode::Rules
        };
        let noisy = noiser.inner.corrupt_sentence(&tokenize_with(text, mode), record_index);
        *out = to_c_string(noisy.to_string())?;
        Ok(())
    })
}

/// # Safety
/// `noiser` must be NULL or a handle from [`gt_noiser_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gt_noiser_free(noiser: *mut GtNoiser) {
    if !noiser.is_null() {
        drop(Box::from_raw(noiser));
    }
}

/// # Safety
/// `out` must be writable. The handle must be released with [`gt_scorer_free`].
#[no_mangle]
pub unsafe extern "C" fn gt_scorer_new(beta: f64, out: *mut *mut GtScorer) -> GtStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let inner = Scorer::new(beta).or_else(|e| fail(GtStatus::InvalidArgument, e))?;
        *out = Box::into_raw(Box::new(GtScorer { inner }));
        Ok(())
    })
}

/// Adds one sentence: `gold_m2` is a single M2 record, `hypothesis` the
/// whitespace-tokenized corrected sentence. Sentences must be added in corpus order.
///
/// # Safety
/// `scorer` must come from [`gt_scorer_new`]; strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn gt_scorer_add(
    scorer: *mut GtScorer,
    gold_m2: *const c_char,
    hypothesis: *const c_char,
) -> GtStatus {
    guard(|| {
        let Some(scorer) = scorer.as_mut() else {
            return fail(GtStatus::NullPointer, "scorer is NULL");
        };
        let records = parse_m2(str_arg(gold_m2, "gold_m2")?).or_else(|e| fail(GtStatus::Parse, e))?;
        let [record] = records.as_slice() else {
            return fail(
                GtStatus::Parse,
                format!("gold_m2 holds {} records, expected 1", records.len()),
            );
        };
        let hyp = Sentence::from_tokenized(str_arg(hypothesis, "hypothesis")?);
        scorer
            .inner
            .add(record, &hyp)
            .or_else(|e| fail(GtStatus::InvalidArgument, e))?;
        Ok(())
    })
}

/// Report over the sentences added so far, as JSON.
///
/// # Safety
/// `scorer` must come from [`gt_scorer_new`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_scorer_report_json(scorer: *const GtScorer, out: *mut *mut c_char) -> GtStatus {
    guard(|| {
        let Some(scorer) = scorer.as_ref() else {
            return fail(GtStatus::NullPointer, "scorer is NULL");
        };
        let out = out_arg(out, "out")?;
        *out = to_c_string(scorer.inner.clone().finish().to_json())?;
        Ok(())
    })
}

/// # Safety
/// `scorer` must be NULL or a handle from [`gt_scorer_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gt_scorer_free(scorer: *mut GtScorer) {
    if !scorer.is_null() {
        drop(Box::from_raw(scorer));
    }
}
