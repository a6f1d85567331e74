use crate::error::{Error, Result};

fn check(ranks: &[usize]) -> Result<()> {
    if ranks.is_empty() {
        return Err(Error::InvalidArgument("no ranks to evaluate".into()));
    }
    if ranks.contains(&0) {
        return Err(Error::InvalidArgument("ranks are 1-based; got 0".into()));
    }
    Ok(())
}

/// Mean of `1 / rank`.
pub fn compute_mrr(ranks: &[usize]) -> Result<f64> {
    check(ranks)?;
    Ok(ranks.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / ranks.len() as f64)
}

/// Fraction of ranks within the top `k`.
pub fn compute_hits(ranks: &[usize], k: usize) -> Result<f64> {
    check(ranks)?;
    if k == 0 {
        return Err(Error::InvalidArgument("Hits@k needs k >= 1".into()));
    }
    Ok(ranks.iter().filter(|&&r| r <= k).count() as f64 / ranks.len() as f64)
}

/// Hits@k cut-offs reported for an N-choice problem: `{1, 3, 5}` for small N
/// (the 10-choice columns), `{1, 5, 10}` from N = 50 on.
pub fn hits_columns(n_choices: usize) -> Vec<usize> {
    let ks: &[usize] = if n_choices >= 50 { &[1, 5, 10] } else { &[1, 3, 5] };
    ks.iter().copied().filter(|&k| k <= n_choices).collect()
}
