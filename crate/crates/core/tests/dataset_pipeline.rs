use std::collections::BTreeSet;

use reibench::dataset::sample::unit_counts;
use reibench::dataset::{
    bundled_seeds, count_res, filter_episode, from_jsonl, generate, read_episodes, regenerate, stratified_sample, table3,
    to_jsonl, write_episodes, ContextType, Engine, GenConfig, Generator, RELevel, VaguenessCell,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reibench::world::load_scene;

fn config(run_seed: u64, replicates: u32) -> GenConfig {
    GenConfig {
        run_seed,
        replicates,
        ..GenConfig::default()
    }
}

#[test]
fn every_bundled_seed_yields_nine_filtered_cells() {
    let seeds = bundled_seeds();
    let cfg = config(3, 2);
    let eps = generate(&seeds, &cfg, Generator::Deterministic).unwrap();
    assert_eq!(eps.len(), seeds.len() * 2 * 9);
    let ids: BTreeSet<&str> = eps.iter().map(|e| e.id.as_str()).collect();
    assert_eq!(ids.len(), eps.len());
    for unit in eps.chunks(9) {
        let cells: Vec<VaguenessCell> = unit.iter().map(|e| e.cell).collect();
        assert_eq!(cells, VaguenessCell::all());
        assert!(unit.iter().all(|e| e.lineage == unit[0].lineage && e.goal == unit[0].goal));
        // the three contexts of one level share the instruction
        for level in unit.chunks(3) {
            assert!(level.iter().all(|e| e.instruction == level[0].instruction));
        }
    }
    for e in &eps {
        assert!(filter_episode(count_res(e), e.cell.level, &cfg.rules), "{}", e.id);
        assert_eq!(e.lineage.engine, Engine::Deterministic);
        assert!(load_scene(&e.scene).is_ok());
        assert!(!e.targets.is_empty());
        e.context.validate().unwrap();
    }
}

#[test]
fn short_contexts_are_shorter_than_noised() {
    let eps = generate(&bundled_seeds(), &config(0, 1), Generator::Deterministic).unwrap();
    for unit in eps.chunks(9) {
        let by = |c| unit.iter().find(|e| e.cell == VaguenessCell::new(RELevel::Explicit, c)).unwrap();
        let spans = |c| {
            let ctx = &by(c).context;
            (ctx.render().len(), ctx.turns.iter().map(|t| t.re_annotations.len()).sum::<usize>())
        };
        let (noised, short) = (spans(ContextType::Noised), spans(ContextType::Short));
        assert!(short.0 < noised.0 && short.1 < noised.1, "{}: {short:?} vs {noised:?}", unit[0].lineage.seed_id);
    }
}

#[test]
fn generation_is_a_function_of_the_run_seed() {
    let seeds = bundled_seeds();
    let a = generate(&seeds, &config(11, 1), Generator::Deterministic).unwrap();
    let b = generate(&seeds, &config(11, 1), Generator::Deterministic).unwrap();
    let c = generate(&seeds, &config(12, 1), Generator::Deterministic).unwrap();
    assert_eq!(to_jsonl(&a), to_jsonl(&b));
    assert_ne!(to_jsonl(&a), to_jsonl(&c));
}

#[test]
fn jsonl_roundtrip_through_a_file() {
    let eps = generate(&bundled_seeds()[..4], &config(5, 1), Generator::Deterministic).unwrap();
    let text = to_jsonl(&eps);
    assert_eq!(text.lines().count(), eps.len());
    assert_eq!(from_jsonl(&text).unwrap(), eps);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.jsonl");
    write_episodes(&path, &eps).unwrap();
    assert_eq!(read_episodes(&path).unwrap(), eps);
}

#[test]
fn malformed_jsonl_is_rejected() {
    assert!(from_jsonl("{not json}\n").is_err());
    assert!(from_jsonl("{\"schema\": 1}\n").is_err());
}

#[test]
fn lineage_regenerates_the_same_episode() {
    let seeds = bundled_seeds();
    let cfg = config(21, 2);
    let eps = generate(&seeds[..6], &cfg, Generator::Deterministic).unwrap();
    for e in eps.iter().step_by(5) {
        let again = regenerate(&e.lineage, e.cell, &seeds, &cfg.rules).unwrap();
        assert_eq!(&again, e);
    }
}

#[test]
fn sampled_subsets_keep_whole_units() {
    let eps = generate(&bundled_seeds(), &config(1, 3), Generator::Deterministic).unwrap();
    let sub = stratified_sample(&eps, 12, &table3(), &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    assert_eq!(sub.len(), 12 * 9);
    assert_eq!(unit_counts(&sub).values().sum::<u64>(), 12);
    for unit in sub.chunks(9) {
        assert!(unit.iter().all(|e| e.lineage == unit[0].lineage));
    }
    let again = stratified_sample(&eps, 12, &table3(), &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    assert_eq!(sub, again);
}
