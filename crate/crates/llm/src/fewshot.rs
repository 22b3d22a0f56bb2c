use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::datasets::{CorpusFile, ProposalExample};
use crate::SentimentCategory;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("corpus has {found} entries for {category}, {needed} needed")]
pub struct InsufficientCorpus {
    pub category: SentimentCategory,
    pub found: usize,
    pub needed: usize,
}

/// `k` distinct examples from `category`, spread over as many domains as
/// the corpus allows.
pub fn sample_few_shot<R: Rng + ?Sized>(
    corpus: &CorpusFile,
    category: SentimentCategory,
    k: usize,
    rng: &mut R,
) -> Result<Vec<ProposalExample>, InsufficientCorpus> {
    sample_from(corpus.entries(), category, k, rng)
}

pub(crate) fn sample_from<R: Rng + ?Sized>(
    entries: &[ProposalExample],
    category: SentimentCategory,
    k: usize,
    rng: &mut R,
) -> Result<Vec<ProposalExample>, InsufficientCorpus> {
    let mut pool: Vec<&ProposalExample> = entries
        .iter()
        .filter(|e| category.contains(e.sentiment_score))
        .collect();
    if pool.len() < k {
        return Err(InsufficientCorpus {
            category,
            found: pool.len(),
            needed: k,
        });
    }
    pool.shuffle(rng);
    // first pass: one per domain; second pass: fill up
    let mut domains = HashSet::new();
    let mut picked: Vec<usize> = Vec::with_capacity(k);
    for (i, e) in pool.iter().enumerate() {
        if picked.len() == k {
            break;
        }
        if domains.insert(e.domain) {
            picked.push(i);
        }
    }
    for i in 0..pool.len() {
        if picked.len() == k {
            break;
        }
        if !picked.contains(&i) {
            picked.push(i);
        }
    }
    Ok(picked.into_iter().map(|i| pool[i].clone()).collect())
}
