//! Seed instruction to nine-cell episode grid.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::gateway::{ChatMessage, Limits};
use crate::planners::{lower::lower_task, solve, DomainModel, DEFAULT_SEARCH_BUDGET};
use crate::world::load_scene;

use super::annotate::identify_res;
use super::expand::{cast_for, expand_context, Generator};
use super::filter::{count_res, filter_episode, FilterRules};
use super::noise::{make_ambiguous_name, make_noised};
use super::replace::replace_res;
use super::seeds::SeedInstruction;
use super::short::{make_short, DEFAULT_REMOVAL_FRACTION};
use super::types::{ContextType, Engine, Episode, Lineage, RELevel, VaguenessCell, EPISODE_SCHEMA};
use super::DatasetError;

pub const IDENTIFY_PROMPT: &str = include_str!("../../assets/prompts/identify.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub run_seed: u64,
    pub replicates: u32,
    pub short_removal_fraction: f64,
    pub rules: FilterRules,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            run_seed: 0,
            replicates: 1,
            short_removal_fraction: DEFAULT_REMOVAL_FRACTION,
            rules: FilterRules::swapped(),
        }
    }
}

/// Independent stream per (run seed, seed id, replicate, stage), so units
/// can be generated in any order.
pub fn stage_rng(run_seed: u64, seed_id: &str, replicate: u32, stage: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(run_seed.to_le_bytes());
    h.update(seed_id.as_bytes());
    h.update([0]);
    h.update(replicate.to_le_bytes());
    h.update(stage.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

/// Parses the comma-separated answer of the identification prompt.
pub fn parse_res_reply(reply: &str) -> Vec<String> {
    let body = reply
        .rsplit_once("Referring Expressions:")
        .map(|(_, b)| b)
        .unwrap_or(reply);
    body.lines()
        .find(|l| !l.trim().is_empty())
        .unwrap_or("")
        .split(',')
        .map(|s| s.trim().trim_end_matches('.').to_ascii_lowercase())
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn identify(seed: &SeedInstruction, generator: Generator<'_>) -> Result<Vec<String>, DatasetError> {
    match generator {
        Generator::Deterministic => identify_res(&seed.text),
        Generator::Llm(p) => {
            if seed.text.trim().is_empty() {
                return Err(DatasetError::EmptyInstruction);
            }
            let prompt = IDENTIFY_PROMPT.replace("{seed}", &seed.text);
            let reply = p.complete(&[ChatMessage::user(prompt)], &Limits::default())?;
            let res = parse_res_reply(&reply.text);
            if res.is_empty() {
                return Err(DatasetError::NoMentions(seed.text.clone()));
            }
            Ok(res)
        }
    }
}

/// Checks that the seed's goal is reachable in its scene.
pub fn check_solvable(seed: &SeedInstruction) -> Result<(), DatasetError> {
    let scene = crate::assets::scene(&seed.scene).ok_or_else(|| DatasetError::UnknownScene(seed.scene.clone()))?;
    let state = load_scene(&scene).map_err(|e| DatasetError::Structure(e.to_string()))?;
    let problem = lower_task(&state, &seed.goal);
    solve(DomainModel::household(), &problem, DEFAULT_SEARCH_BUDGET)
        .map(|_| ())
        .ok_or_else(|| DatasetError::Unsolvable(seed.id.clone()))
}

/// All nine cells of one seed replicate, level-major.
pub fn generate_unit(
    seed: &SeedInstruction,
    cfg: &GenConfig,
    replicate: u32,
    generator: Generator<'_>,
) -> Result<Vec<Episode>, DatasetError> {
    check_solvable(seed)?;
    let scene = crate::assets::scene(&seed.scene).ok_or_else(|| DatasetError::UnknownScene(seed.scene.clone()))?;
    let rng = |stage: &str| stage_rng(cfg.run_seed, &seed.id, replicate, stage);
    let res = identify(seed, generator)?;
    let (standard, instruction) = expand_context(seed, &scene, &res, generator, &mut rng("expand"))?;
    let cast = cast_for(seed, &scene)?;
    let mut noise_rng = rng("noise");
    let name = make_ambiguous_name(&scene, &mut noise_rng)?;
    let noised = make_noised(&standard, &name, &cast.referents(), generator, &mut noise_rng)?;
    let short = make_short(&noised, seed.goal.target(), cfg.short_removal_fraction, &mut rng("short"))?;
    let engine = match generator {
        Generator::Deterministic => Engine::Deterministic,
        Generator::Llm(_) => Engine::Llm,
    };
    let mut out = Vec::with_capacity(9);
    for level in RELevel::ALL {
        for (context_type, context) in [
            (ContextType::Standard, &standard),
            (ContextType::Noised, &noised),
            (ContextType::Short, &short),
        ] {
            let cell = VaguenessCell::new(RELevel::Explicit, context_type);
            let base = Episode {
                schema: EPISODE_SCHEMA,
                id: String::new(),
                scene: scene.clone(),
                context: context.clone(),
                instruction: instruction.clone(),
                goal: seed.goal.clone(),
                targets: seed.goal.object_ids().into_iter().map(String::from).collect(),
                cell,
                lineage: Lineage {
                    seed_id: seed.id.clone(),
                    rng_seed: cfg.run_seed,
                    engine,
                    replicate,
                    short_removal_fraction: cfg.short_removal_fraction,
                },
            };
            // one stream per level, restarted for each context type so the
            // instruction rewrite is shared across contexts
            let mut ep = replace_res(&base, level, generator, &seed.text, &mut rng(&format!("replace-{}", level.as_str())))?;
            ep.id = Episode::episode_id(&seed.id, replicate, ep.cell);
            ep.context.validate().map_err(DatasetError::Structure)?;
            ep.instruction.validate().map_err(DatasetError::Structure)?;
            let quad = count_res(&ep);
            if !filter_episode(quad, level, &cfg.rules) {
                return Err(DatasetError::Filtered { id: ep.id, quad });
            }
            out.push(ep);
        }
    }
    Ok(out)
}

/// Every seed × replicate × cell, in seed order.
pub fn generate(
    seeds: &[SeedInstruction],
    cfg: &GenConfig,
    generator: Generator<'_>,
) -> Result<Vec<Episode>, DatasetError> {
    let mut out = Vec::new();
    for seed in seeds {
        for r in 0..cfg.replicates {
            out.extend(generate_unit(seed, cfg, r, generator)?);
        }
    }
    Ok(out)
}

/// Rebuilds one episode from its lineage (deterministic engine).
pub fn regenerate(
    lineage: &Lineage,
    cell: VaguenessCell,
    seeds: &[SeedInstruction],
    rules: &FilterRules,
) -> Result<Episode, DatasetError> {
    let seed = seeds
        .iter()
        .find(|s| s.id == lineage.seed_id)
        .ok_or_else(|| DatasetError::Structure(format!("unknown seed `{}`", lineage.seed_id)))?;
    let cfg = GenConfig {
        run_seed: lineage.rng_seed,
        replicates: 1,
        short_removal_fraction: lineage.short_removal_fraction,
        rules: *rules,
    };
    generate_unit(seed, &cfg, lineage.replicate, Generator::Deterministic)?
        .into_iter()
        .find(|e| e.cell == cell)
        .ok_or_else(|| DatasetError::Structure(format!("cell {cell} not generated")))
}
