//! Enumerated-label option choice with strict reply parsing.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::types::{ChatMessage, GatewayError, Limits, Provider, Usage};

pub const DEFAULT_CHOICE_RETRIES: u32 = 2;

pub const CORRECTION: &str =
    "Your reply did not name exactly one of the listed options. Answer with one option label only.";

/// Bijective base-26 label: 0 → `a`, 25 → `z`, 26 → `aa`.
pub fn option_label(mut index: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'a' + (index % 26) as u8);
        if index < 26 {
            break;
        }
        index = index / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).unwrap()
}

pub fn label_index(label: &str) -> Option<usize> {
    if label.is_empty() || !label.bytes().all(|b| b.is_ascii_lowercase()) {
        return None;
    }
    let mut n = 0usize;
    for b in label.bytes() {
        n = n.checked_mul(26)?.checked_add((b - b'a') as usize + 1)?;
    }
    Some(n - 1)
}

/// `(a) first option` lines, one per option.
pub fn render_options<T: AsRef<str>>(options: &[T]) -> String {
    options
        .iter()
        .enumerate()
        .map(|(i, o)| format!("({}) {}", option_label(i), o.as_ref()))
        .collect::<Vec<_>>()
        .join("\n")
}

fn mention_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\(([a-z]{1,2})\)|\boption\s+\(?([a-z]{1,2})\)?(?:\W|$)").unwrap())
}

/// Reads a label out of a reply. Accepts a bare label (`c`, `(c)`, `c.`) or
/// text naming exactly one distinct label as `(c)` or `option c`.
pub fn parse_choice(reply: &str, n_options: usize) -> Option<usize> {
    let bare = reply
        .trim()
        .trim_end_matches(['.', '!'])
        .trim_matches(|c| c == '"' || c == '\'' || c == '`')
        .trim();
    let bare = bare
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .unwrap_or(bare);
    if let Some(i) = label_index(&bare.to_ascii_lowercase()).filter(|_| bare.len() <= 2) {
        return (i < n_options).then_some(i);
    }
    let labels: BTreeSet<usize> = mention_re()
        .captures_iter(reply)
        .filter_map(|c| c.get(1).or(c.get(2)))
        .filter_map(|m| label_index(&m.as_str().to_ascii_lowercase()))
        .filter(|&i| i < n_options)
        .collect();
    match labels.len() {
        1 => labels.into_iter().next(),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Choice {
    pub index: usize,
    /// No reply parsed; index 0 was taken by contract.
    pub fallback: bool,
    pub attempts: u32,
    pub usage: Usage,
    /// Provider error that ended the attempts, if any.
    pub error: Option<String>,
}

/// Asks the provider to pick one of `n_options` already listed in
/// `messages`. Always returns an index in range.
pub fn choose(
    provider: &dyn Provider,
    messages: &[ChatMessage],
    n_options: usize,
    retries: u32,
    limits: &Limits,
) -> Choice {
    assert!(n_options > 0, "choose needs at least one option");
    let mut usage = Usage::default();
    if n_options == 1 {
        return Choice {
            index: 0,
            fallback: false,
            attempts: 0,
            usage,
            error: None,
        };
    }
    let mut convo = messages.to_vec();
    let mut error = None;
    let mut attempts = 0;
    for _ in 0..=retries {
        attempts += 1;
        match provider.complete(&convo, limits) {
            Ok(r) => {
                usage.record(&r);
                if let Some(index) = parse_choice(&r.text, n_options) {
                    return Choice {
                        index,
                        fallback: false,
                        attempts,
                        usage,
                        error: None,
                    };
                }
                let reply = if r.text.trim().is_empty() { "(no answer)".to_string() } else { r.text };
                convo.push(ChatMessage::assistant(reply));
                convo.push(ChatMessage::user(CORRECTION));
            }
            Err(e) => {
                error = Some(e.to_string());
                if !retryable(&e) {
                    break;
                }
            }
        }
    }
    Choice {
        index: 0,
        fallback: true,
        attempts,
        usage,
        error,
    }
}

fn retryable(e: &GatewayError) -> bool {
    matches!(e, GatewayError::Malformed(_))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::ReplayProvider;
    use proptest::prelude::*;

    #[test]
    fn labels_are_bijective() {
        for i in 0..2000 {
            assert_eq!(label_index(&option_label(i)), Some(i));
        }
        assert_eq!(option_label(26), "aa");
        assert_eq!(option_label(27), "ab");
    }

    #[test]
    fn conformance_fixtures() {
        let cases = [
            ("c", 5, Some(2)),
            ("(c)", 5, Some(2)),
            (" C. ", 5, Some(2)),
            ("I think option (c)", 5, Some(2)),
            ("Option b is best.", 5, Some(1)),
            ("(b) Pick up the apple.", 5, Some(1)),
            ("(a) or (b)", 5, None),
            ("(z)", 5, None),
            ("option zz", 5, None),
            ("Go to the fridge", 5, None),
            ("", 5, None),
            ("option label", 5, None),
            ("(b) then again (b)", 5, Some(1)),
        ];
        for (reply, n, want) in cases {
            assert_eq!(parse_choice(reply, n), want, "{reply:?}");
        }
    }

    #[test]
    fn single_option_needs_no_call() {
        let p = ReplayProvider::new(Vec::<String>::new());
        let c = choose(&p, &[ChatMessage::user("x")], 1, 2, &Limits::default());
        assert_eq!((c.index, c.fallback, c.usage.calls), (0, false, 0));
    }

    #[test]
    fn retries_then_falls_back() {
        let p = ReplayProvider::new(vec!["no idea", "still none", "nope"]);
        let c = choose(&p, &[ChatMessage::user("pick")], 4, 2, &Limits::default());
        assert_eq!((c.index, c.fallback, c.attempts, c.usage.calls), (0, true, 3, 3));
        let p = ReplayProvider::new(vec!["hmm", "(d)"]);
        let c = choose(&p, &[ChatMessage::user("pick")], 4, 2, &Limits::default());
        assert_eq!((c.index, c.fallback, c.attempts), (3, false, 2));
    }

    proptest! {
        #[test]
        fn never_out_of_range(replies in proptest::collection::vec(".{0,40}", 1..4), n in 1usize..40) {
            let p = ReplayProvider::new(replies);
            let c = choose(&p, &[ChatMessage::user("pick")], n, 2, &Limits::default());
            prop_assert!(c.index < n);
        }
    }
}
