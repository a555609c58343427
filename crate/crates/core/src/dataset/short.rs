//! Short context: whole sentences holding rng-chosen referring expressions
//! are deleted.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::text::sentence_spans;
use super::types::{ContextMemory, DialogueTurn};
use super::DatasetError;

pub const DEFAULT_REMOVAL_FRACTION: f64 = 0.3;
/// Explicit target mentions a shortened context must keep.
pub const MIN_TARGET_MENTIONS: usize = 3;

fn remove_sentence(turn: &DialogueTurn, span: (usize, usize)) -> DialogueTurn {
    let (s, mut e) = span;
    let bytes = turn.text.as_bytes();
    let mut s2 = s;
    if e < bytes.len() {
        while e < bytes.len() && bytes[e] == b' ' {
            e += 1;
        }
    } else {
        while s2 > 0 && bytes[s2 - 1] == b' ' {
            s2 -= 1;
        }
    }
    let removed = e - s2;
    let text = format!("{}{}", &turn.text[..s2], &turn.text[e..]);
    let re_annotations = turn
        .re_annotations
        .iter()
        .filter(|a| a.end <= s2 || a.start >= e)
        .map(|a| {
            let mut a = a.clone();
            if a.start >= e {
                a.start -= removed;
                a.end -= removed;
            }
            a
        })
        .collect();
    DialogueTurn {
        speaker: turn.speaker,
        text,
        re_annotations,
    }
}

fn mention_counts(ctx: &ContextMemory) -> BTreeMap<&str, usize> {
    let mut m = BTreeMap::new();
    for t in &ctx.turns {
        for a in &t.re_annotations {
            if a.form.is_explicit() {
                *m.entry(a.referent.as_str()).or_default() += 1;
            }
        }
    }
    m
}

/// Removes the sentences containing about `fraction` of the annotated spans,
/// at least one. A removal is skipped when it would empty a turn, drop the
/// target below [`MIN_TARGET_MENTIONS`] explicit mentions, or drop any
/// other referent to zero.
pub fn make_short<R: Rng>(
    ctx: &ContextMemory,
    target: &str,
    fraction: f64,
    rng: &mut R,
) -> Result<ContextMemory, DatasetError> {
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for (ti, t) in ctx.turns.iter().enumerate() {
        for (ai, a) in t.re_annotations.iter().enumerate() {
            if a.form.is_explicit() {
                candidates.push((ti, ai));
            }
        }
    }
    if candidates.is_empty() {
        return Err(DatasetError::NoRemovable);
    }
    let wanted = ((candidates.len() as f64 * fraction).round() as usize).max(1);
    candidates.shuffle(rng);
    // candidates name annotations of the original context; `orig` maps each
    // surviving annotation back to its original index
    let mut orig: Vec<Vec<usize>> = ctx.turns.iter().map(|t| (0..t.re_annotations.len()).collect()).collect();
    let mut out = ctx.clone();
    let mut removed = 0;
    for (ti, ai) in candidates {
        if removed == wanted {
            break;
        }
        let Some(k) = orig[ti].iter().position(|&o| o == ai) else { continue };
        let turn = &out.turns[ti];
        let start = turn.re_annotations[k].start;
        let spans = sentence_spans(&turn.text);
        if spans.len() < 2 {
            continue;
        }
        let Some(&span) = spans.iter().find(|(s, e)| *s <= start && start < *e) else { continue };
        let next = remove_sentence(turn, span);
        let kept: Vec<usize> = turn
            .re_annotations
            .iter()
            .zip(&orig[ti])
            .filter(|(a, _)| a.end <= span.0 || a.start >= span.1)
            .map(|(_, &o)| o)
            .collect();
        let mut trial = out.clone();
        trial.turns[ti] = next;
        let counts = mention_counts(&trial);
        let ok = mention_counts(&out).keys().all(|r| {
            let n = counts.get(r).copied().unwrap_or(0);
            if *r == target { n >= MIN_TARGET_MENTIONS } else { n >= 1 }
        });
        if ok {
            orig[ti] = kept;
            out = trial;
            removed += 1;
        }
    }
    if removed == 0 {
        return Err(DatasetError::NoRemovable);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::types::{Annotation, REForm, Speaker};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn turn(text: &str, mentions: &[&str]) -> DialogueTurn {
        let mut re_annotations = Vec::new();
        for m in mentions {
            let start = text.find(m).unwrap();
            re_annotations.push(Annotation {
                start,
                end: start + m.len(),
                surface: m.to_string(),
                form: REForm::Definite,
                referent: "tomato".into(),
            });
        }
        re_annotations.sort_by_key(|a| a.start);
        DialogueTurn {
            speaker: Speaker::Human,
            text: text.into(),
            re_annotations,
        }
    }

    #[test]
    fn zero_annotations_is_an_error() {
        let ctx = ContextMemory {
            turns: vec![turn("Nothing here. Really nothing.", &[])],
        };
        assert!(matches!(
            make_short(&ctx, "tomato", 0.3, &mut ChaCha8Rng::seed_from_u64(1)),
            Err(DatasetError::NoRemovable)
        ));
    }

    #[test]
    fn removes_whole_sentences_and_reindexes() {
        let ctx = ContextMemory {
            turns: vec![turn(
                "I like the tomato. Please wash the tomato. Then slice the tomato. The tomato is red.",
                &["I like the tomato", "wash the tomato", "slice the tomato", "The tomato is"],
            )],
        };
        // annotations cover "the tomato" only
        let mut ctx = ctx;
        let text = ctx.turns[0].text.clone();
        for a in &mut ctx.turns[0].re_annotations {
            let s = &text[a.start..a.end];
            let off = s.find("the tomato").or(s.find("The tomato")).unwrap();
            a.start += off;
            a.end = a.start + "the tomato".len();
            a.surface = text[a.start..a.end].to_string();
        }
        let short = make_short(&ctx, "tomato", 0.3, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let t = &short.turns[0];
        t.validate().unwrap();
        assert_eq!(t.re_annotations.len(), 3);
        assert_eq!(sentence_spans(&t.text).len(), 3);
    }
}
