//! Noised context: an ambiguous person or brand name built from a scene
//! object is woven into three human turns.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::gateway::{ChatMessage, Limits, Provider};
use crate::world::kinds::kind_by_name;
use crate::world::SceneSpec;

use super::annotate::{annotate, Referent};
use super::expand::{parse_dialogue, validate_dialogue, Generator};
use super::templates::{NOISE_BRAND, NOISE_PERSON};
use super::types::{AmbiguousName, ContextMemory, DialogueTurn, NameCategory, Speaker};
use super::DatasetError;

/// Human turns that receive a noise sentence.
pub const NOISE_MENTIONS: usize = 3;

pub const NOISE_PROMPT: &str = include_str!("../../assets/prompts/noise.txt");

fn decorate(category: NameCategory, base: &str, pick: usize) -> String {
    fn nth<'a>(v: &[&'a str], i: usize) -> &'a str {
        v[i % v.len()]
    }
    match category {
        NameCategory::Family => format!("{} {base}", nth(&["Uncle", "Aunt", "Grandpa", "Grandma", "Mrs."], pick)),
        NameCategory::Friend => format!("{base} {}", nth(&["Jones", "Baker"], pick)),
        NameCategory::Neighbor => format!("Mr. {base}"),
        NameCategory::Colleague => format!("Dr. {base}"),
        NameCategory::Stranger => format!("{base} {}", nth(&["Star", "King", "Champ"], pick)),
        NameCategory::ElectronicsBrand => format!("{base} {}", nth(&["Tech", "Electronics"], pick)),
        NameCategory::RestaurantBrand => format!("{base} {}", nth(&["Grill", "Bistro", "Kitchen"], pick)),
    }
}

/// Builds a name around a scene object whose noun is a single word.
pub fn make_ambiguous_name<R: Rng>(scene: &SceneSpec, rng: &mut R) -> Result<AmbiguousName, DatasetError> {
    let mut bases: Vec<&str> = scene
        .objects
        .iter()
        .filter_map(|o| kind_by_name(&o.kind))
        .filter(|k| !k.noun.contains(' '))
        .map(|k| k.name)
        .collect();
    bases.sort();
    bases.dedup();
    let base = *bases
        .choose(rng)
        .ok_or_else(|| DatasetError::Structure(format!("scene {} has no nameable object", scene.scene_id)))?;
    let category = *NameCategory::ALL.choose(rng).expect("non-empty");
    let pick = rng.gen_range(0..6);
    Ok(AmbiguousName {
        surface: decorate(category, base, pick),
        base_object: base.to_string(),
        category,
    })
}

fn is_person(c: NameCategory) -> bool {
    !matches!(c, NameCategory::ElectronicsBrand | NameCategory::RestaurantBrand)
}

/// Appends one noise sentence to each of three rng-chosen human turns.
/// Existing text and annotation offsets are untouched.
pub fn noise_deterministic<R: Rng>(ctx: &ContextMemory, name: &AmbiguousName, rng: &mut R) -> ContextMemory {
    let humans: Vec<usize> = (0..ctx.turns.len()).filter(|&i| ctx.turns[i].speaker == Speaker::Human).collect();
    let mut chosen: Vec<usize> = humans.choose_multiple(rng, NOISE_MENTIONS).copied().collect();
    chosen.sort();
    let pool = if is_person(name.category) { NOISE_PERSON } else { NOISE_BRAND };
    let mut sentences: Vec<&str> = pool.to_vec();
    sentences.shuffle(rng);
    let mut out = ctx.clone();
    for (i, turn) in chosen.into_iter().enumerate() {
        let s = sentences[i % sentences.len()].replace("{n}", &name.surface);
        let t = &mut out.turns[turn].text;
        t.push(' ');
        t.push_str(&s);
    }
    out
}

pub fn noise_llm(
    ctx: &ContextMemory,
    name: &AmbiguousName,
    reference: &str,
    referents: &[Referent<'_>],
    provider: &dyn Provider,
) -> Result<ContextMemory, DatasetError> {
    let prompt = NOISE_PROMPT
        .replace("{dialogue}", &ctx.render())
        .replace("{name}", &name.surface)
        .replace("{reference}", reference);
    let reply = provider.complete(&[ChatMessage::user(prompt)], &Limits::generation())?;
    let lines = parse_dialogue(&reply.text)?;
    validate_dialogue(&lines, ctx.turns.len())?;
    if !reply.text.contains(&name.surface) {
        return Err(DatasetError::Structure(format!("ambiguous name `{}` missing from output", name.surface)));
    }
    Ok(ContextMemory {
        turns: lines
            .into_iter()
            .map(|(speaker, text)| DialogueTurn {
                re_annotations: annotate(&text, referents),
                speaker,
                text,
            })
            .collect(),
    })
}

pub fn make_noised<R: Rng>(
    ctx: &ContextMemory,
    name: &AmbiguousName,
    referents: &[Referent<'_>],
    generator: Generator<'_>,
    rng: &mut R,
) -> Result<ContextMemory, DatasetError> {
    match generator {
        Generator::Deterministic => Ok(noise_deterministic(ctx, name, rng)),
        Generator::Llm(p) => {
            let reference = referents.first().map(|r| r.kind.noun).unwrap_or("the task");
            noise_llm(ctx, name, reference, referents, p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn decorators_follow_categories() {
        assert_eq!(decorate(NameCategory::Family, "Rose", 4), "Mrs. Rose");
        assert_eq!(decorate(NameCategory::Stranger, "Mug", 0), "Mug Star");
        assert_eq!(decorate(NameCategory::Neighbor, "Mug", 3), "Mr. Mug");
    }

    #[test]
    fn names_contain_their_base_and_are_reproducible() {
        let scene = crate::assets::scene("kitchen_1").unwrap();
        for s in 0..50 {
            let a = make_ambiguous_name(&scene, &mut ChaCha8Rng::seed_from_u64(s)).unwrap();
            let b = make_ambiguous_name(&scene, &mut ChaCha8Rng::seed_from_u64(s)).unwrap();
            assert_eq!(a, b);
            assert!(a.surface.contains(&a.base_object), "{a:?}");
        }
    }
}
