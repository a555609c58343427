//! Stratified sampling by task type with largest-remainder quotas.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::world::TaskKind;

use super::types::Episode;
use super::DatasetError;

/// Task proportions in a fixed order; the order breaks remainder ties.
pub type Proportions = Vec<(TaskKind, Ratio<u64>)>;

/// Parses a non-negative decimal such as `16.8` exactly.
pub fn parse_decimal(s: &str) -> Option<Ratio<u64>> {
    let s = s.trim();
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 12 {
        return None;
    }
    let den = 10u64.checked_pow(frac.len() as u32)?;
    let digits = format!("{int}{frac}");
    let num: u64 = digits.trim_start_matches('0').parse().unwrap_or(0);
    Some(Ratio::new(num, den))
}

/// Task-type distribution of the 1,000-task evaluation subset.
pub fn table3() -> Proportions {
    [
        (TaskKind::CoolPlace, "16.8"),
        (TaskKind::HeatPlace, "16.8"),
        (TaskKind::CleanPlace, "16.2"),
        (TaskKind::ExamineInLight, "13.3"),
        (TaskKind::StackPlace, "18.4"),
        (TaskKind::PickPlace, "18.5"),
    ]
    .into_iter()
    .map(|(k, p)| (k, parse_decimal(p).expect("valid literal")))
    .collect()
}

pub fn uniform() -> Proportions {
    TaskKind::ALL.into_iter().map(|k| (k, Ratio::from_integer(1))).collect()
}

/// Largest-remainder apportionment of `n` by `proportions`. Ties go to the
/// earlier entry.
pub fn apportion(n: u64, proportions: &[(TaskKind, Ratio<u64>)]) -> Vec<(TaskKind, u64)> {
    let total: Ratio<u64> = proportions.iter().map(|(_, p)| *p).sum();
    if total == Ratio::from_integer(0) {
        return proportions.iter().map(|(k, _)| (*k, 0)).collect();
    }
    let exact: Vec<Ratio<u64>> = proportions.iter().map(|(_, p)| *p * n / total).collect();
    let mut quotas: Vec<u64> = exact.iter().map(|q| q.to_integer()).collect();
    let left = n - quotas.iter().sum::<u64>();
    let mut order: Vec<usize> = (0..proportions.len()).collect();
    order.sort_by(|&a, &b| exact[b].fract().cmp(&exact[a].fract()).then(a.cmp(&b)));
    for &i in order.iter().take(left as usize) {
        quotas[i] += 1;
    }
    proportions.iter().map(|(k, _)| *k).zip(quotas).collect()
}

/// Draws `quota` items per task type uniformly, returning indices into
/// `kinds` in pool order.
pub fn stratified_indices<R: Rng>(
    kinds: &[TaskKind],
    n: u64,
    proportions: &[(TaskKind, Ratio<u64>)],
    rng: &mut R,
) -> Result<Vec<usize>, DatasetError> {
    let mut picked = Vec::new();
    for (kind, quota) in apportion(n, proportions) {
        let pool: Vec<usize> = (0..kinds.len()).filter(|&i| kinds[i] == kind).collect();
        if (pool.len() as u64) < quota {
            return Err(DatasetError::InsufficientPool {
                kind,
                needed: quota,
                available: pool.len() as u64,
            });
        }
        picked.extend(pool.choose_multiple(rng, quota as usize).copied());
    }
    picked.sort();
    Ok(picked)
}

/// Samples task units (all cells of one seed replicate travel together) and
/// returns their episodes in pool order. `n` counts units.
pub fn stratified_sample<R: Rng>(
    pool: &[Episode],
    n: u64,
    proportions: &[(TaskKind, Ratio<u64>)],
    rng: &mut R,
) -> Result<Vec<Episode>, DatasetError> {
    let mut units: BTreeMap<(&str, u32), TaskKind> = BTreeMap::new();
    for e in pool {
        units.insert((&e.lineage.seed_id, e.lineage.replicate), e.goal.kind());
    }
    let keys: Vec<(&str, u32)> = units.keys().copied().collect();
    let kinds: Vec<TaskKind> = units.values().copied().collect();
    let chosen: Vec<(&str, u32)> = stratified_indices(&kinds, n, proportions, rng)?
        .into_iter()
        .map(|i| keys[i])
        .collect();
    Ok(pool
        .iter()
        .filter(|e| chosen.binary_search(&(e.lineage.seed_id.as_str(), e.lineage.replicate)).is_ok())
        .cloned()
        .collect())
}

/// Units per task type in an episode list.
pub fn unit_counts(episodes: &[Episode]) -> BTreeMap<TaskKind, u64> {
    let mut units: BTreeMap<(&str, u32), TaskKind> = BTreeMap::new();
    for e in episodes {
        units.insert((&e.lineage.seed_id, e.lineage.replicate), e.goal.kind());
    }
    let mut out = BTreeMap::new();
    for k in units.values() {
        *out.entry(*k).or_default() += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_decimal("16.8"), Some(Ratio::new(168, 10)));
        assert_eq!(parse_decimal("7"), Some(Ratio::from_integer(7)));
        assert_eq!(parse_decimal("0.05"), Some(Ratio::new(1, 20)));
        assert_eq!(parse_decimal("-1"), None);
        assert_eq!(parse_decimal("x"), None);
    }

    #[test]
    fn zero_and_small_n() {
        assert!(apportion(0, &table3()).iter().all(|(_, q)| *q == 0));
        assert!(apportion(6, &uniform()).iter().all(|(_, q)| *q == 1));
        let kinds: Vec<TaskKind> = TaskKind::ALL.iter().flat_map(|k| [*k; 3]).collect();
        let idx = stratified_indices(&kinds, 0, &table3(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(idx.is_empty());
    }

    #[test]
    fn insufficient_pool() {
        let kinds = vec![TaskKind::PickPlace; 3];
        let e = stratified_indices(&kinds, 6, &uniform(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(e, DatasetError::InsufficientPool { needed: 1, available: 0, .. }));
    }
}
