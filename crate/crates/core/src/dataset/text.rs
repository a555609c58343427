//! Small text utilities shared by the generator, annotator and the scripted
//! provider.

/// Titles whose trailing period does not end a sentence.
const TITLES: [&str; 3] = ["Mr", "Mrs", "Dr"];

/// Byte ranges of sentences, trailing punctuation included and separating
/// whitespace excluded.
pub fn sentence_spans(text: &str) -> Vec<(usize, usize)> {
    let bytes = text.as_bytes();
    let mut spans = Vec::new();
    let mut start = skip_ws(text, 0);
    let mut i = start;
    while i < bytes.len() {
        let c = bytes[i];
        if matches!(c, b'.' | b'!' | b'?') {
            let mut end = i + 1;
            while end < bytes.len() && matches!(bytes[end], b'.' | b'!' | b'?' | b'"' | b'\'') {
                end += 1;
            }
            let next = skip_ws(text, end);
            let boundary = end == bytes.len()
                || (next > end && next < bytes.len() && !bytes[next].is_ascii_lowercase());
            if boundary && !(c == b'.' && ends_with_title(&text[start..i])) {
                spans.push((start, end));
                start = next;
                i = next;
                continue;
            }
            i = end;
            continue;
        }
        i += 1;
    }
    if start < bytes.len() {
        let end = text.trim_end().len();
        if end > start {
            spans.push((start, end));
        }
    }
    spans
}

fn skip_ws(text: &str, mut i: usize) -> usize {
    let b = text.as_bytes();
    while i < b.len() && b[i].is_ascii_whitespace() {
        i += 1;
    }
    i
}

fn ends_with_title(before: &str) -> bool {
    let last = before.rsplit(|c: char| !c.is_ascii_alphabetic()).next().unwrap_or("");
    TITLES.contains(&last)
}

/// Whether byte offset `at` begins a sentence.
pub fn is_sentence_start(text: &str, at: usize) -> bool {
    sentence_spans(text).iter().any(|&(s, _)| s == at)
}

pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

pub fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

pub fn decapitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_lowercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Finds `needle` in `hay` case-insensitively at word boundaries, returning
/// byte offsets. Both are expected to be ASCII.
pub fn find_words(hay: &str, needle: &str) -> Vec<usize> {
    let h = hay.to_ascii_lowercase();
    let n = needle.to_ascii_lowercase();
    let hb = h.as_bytes();
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(pos) = h[from..].find(&n) {
        let at = from + pos;
        let end = at + n.len();
        let left_ok = at == 0 || !hb[at - 1].is_ascii_alphanumeric();
        let right_ok = end == hb.len() || !hb[end].is_ascii_alphanumeric();
        if left_ok && right_ok {
            out.push(at);
        }
        from = at + 1;
    }
    out
}

const MASS_NOUNS: [&str; 2] = ["bread", "lettuce"];

pub fn indefinite_article(word: &str) -> &'static str {
    if MASS_NOUNS.contains(&word) {
        return "some";
    }
    match word.as_bytes().first() {
        Some(b'a' | b'e' | b'i' | b'o' | b'u' | b'A' | b'E' | b'I' | b'O' | b'U') => "an",
        _ => "a",
    }
}
