use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Target sizes for a train/valid/test partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSplit {
    /// `None` gives train every id not drawn for valid/test.
    pub train: Option<usize>,
    pub valid: usize,
    pub test: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSets {
    pub train: Vec<String>,
    pub valid: Vec<String>,
    pub test: Vec<String>,
    /// Ids left over when an explicit train size is smaller than the remainder.
    pub unused: Vec<String>,
}

fn rank_key(seed: u64, id: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(id.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Deterministically partitions `ids`. Ids are ranked by a hash of
/// `(seed, id)`; valid takes the first `valid` ranks, test the next `test`,
/// train the rest. Each output set keeps input order.
pub fn split_corpus<S: AsRef<str>>(ids: &[S], split: CorpusSplit) -> Result<SplitSets> {
    let held_out = split.valid + split.test;
    let wanted = held_out + split.train.unwrap_or(0);
    if wanted > ids.len() {
        return Err(Error::Split(format!(
            "targets sum to {wanted} but only {} ids are available",
            ids.len()
        )));
    }
    let mut order: Vec<(u64, &str, usize)> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (rank_key(split.seed, id.as_ref()), id.as_ref(), i))
        .collect();
    order.sort_unstable();

    let train_end = match split.train {
        Some(n) => held_out + n,
        None => ids.len(),
    };
    // 0 = valid, 1 = test, 2 = train, 3 = unused
    let mut bucket = vec![3u8; ids.len()];
    for (rank, &(_, _, index)) in order.iter().enumerate() {
        bucket[index] = if rank < split.valid {
            0
        } else if rank < held_out {
            1
        } else if rank < train_end {
            2
        } else {
            3
        };
    }
    let mut sets = SplitSets::default();
    for (id, b) in ids.iter().zip(bucket) {
        let id = id.as_ref().to_string();
        match b {
            0 => sets.valid.push(id),
            1 => sets.test.push(id),
            2 => sets.train.push(id),
            _ => sets.unused.push(id),
        }
    }
    Ok(sets)
}
