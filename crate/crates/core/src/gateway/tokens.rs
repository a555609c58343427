/// Heuristic token count: one token per four characters, rounded up.
/// Only used when a provider reports no usage; records flag the estimate.
pub fn estimate_tokens(text: &str) -> u64 {
    (text.chars().count() as u64).div_ceil(4)
}
