use std::collections::HashMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{OpKind, OpRecord};
use crate::error::{Error, Result};

/// Generator identity written into trace headers. Changing the generator or
/// the way it is sampled changes every recorded workload.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Inclusive key interval `[min, max]`; empty when `min > max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyUniverse {
    pub min: i64,
    pub max: i64,
}

impl KeyUniverse {
    pub const FULL: KeyUniverse = KeyUniverse {
        min: i64::MIN,
        max: i64::MAX,
    };

    pub fn new(min: i64, max: i64) -> Self {
        Self { min, max }
    }

    /// `size` consecutive keys centred on zero.
    pub fn centered(size: u64) -> Self {
        if size == 0 {
            return Self::empty();
        }
        let half = (size / 2) as i64;
        Self::new(-half, -half + (size - 1) as i64)
    }

    pub fn empty() -> Self {
        Self { min: 0, max: -1 }
    }

    pub fn size(&self) -> u128 {
        if self.min > self.max {
            0
        } else {
            (self.max as i128 - self.min as i128 + 1) as u128
        }
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> i64 {
        rng.gen_range(self.min..=self.max)
    }
}

/// Relative weights of add / contains / remove.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpMix {
    pub add: u32,
    pub contains: u32,
    pub remove: u32,
}

impl OpMix {
    pub fn new(add: u32, contains: u32, remove: u32) -> Self {
        Self {
            add,
            contains,
            remove,
        }
    }
}

impl Default for OpMix {
    fn default() -> Self {
        Self::new(45, 35, 20)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub seed: u64,
    pub op_count: usize,
    pub key_universe: KeyUniverse,
    pub mix: OpMix,
    /// Rounds of `churn_batch` removals of live keys followed by
    /// `churn_batch` additions of keys not currently live, appended after the
    /// mixed phase.
    pub churn_rounds: usize,
    pub churn_batch: usize,
}

impl WorkloadSpec {
    pub fn mixed(seed: u64, op_count: usize, key_universe: KeyUniverse) -> Self {
        Self {
            seed,
            op_count,
            key_universe,
            mix: OpMix::default(),
            churn_rounds: 0,
            churn_batch: 0,
        }
    }
}

/// Keys the generator believes are live, with O(1) uniform selection.
#[derive(Default)]
struct LiveKeys {
    keys: Vec<i64>,
    index: HashMap<i64, usize>,
}

impl LiveKeys {
    fn len(&self) -> usize {
        self.keys.len()
    }

    fn contains(&self, key: i64) -> bool {
        self.index.contains_key(&key)
    }

    fn insert(&mut self, key: i64) {
        if !self.index.contains_key(&key) {
            self.index.insert(key, self.keys.len());
            self.keys.push(key);
        }
    }

    fn remove(&mut self, key: i64) {
        if let Some(i) = self.index.remove(&key) {
            self.keys.swap_remove(i);
            if let Some(&moved) = self.keys.get(i) {
                self.index.insert(moved, i);
            }
        }
    }

    fn take_at(&mut self, i: usize) -> i64 {
        let key = self.keys[i];
        self.remove(key);
        key
    }
}

/// Expands `spec` into its operation sequence. Identical specs always yield
/// identical sequences.
pub fn generate_workload(spec: &WorkloadSpec) -> Result<Vec<OpRecord>> {
    let universe = spec.key_universe;
    if universe.is_empty() {
        return Err(Error::EmptyKeyUniverse);
    }
    let OpMix {
        add,
        contains,
        remove,
    } = spec.mix;
    let kinds = WeightedIndex::new([add, contains, remove]).map_err(|_| Error::InvalidMix)?;
    const KINDS: [OpKind; 3] = [OpKind::Add, OpKind::Contains, OpKind::Remove];

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut live = LiveKeys::default();
    let mut ops = Vec::with_capacity(spec.op_count + 2 * spec.churn_rounds * spec.churn_batch);

    for _ in 0..spec.op_count {
        let kind = KINDS[kinds.sample(&mut rng)];
        let key = universe.sample(&mut rng);
        match kind {
            OpKind::Add => live.insert(key),
            OpKind::Remove => live.remove(key),
            OpKind::Contains => {}
        }
        ops.push(OpRecord { kind, key });
    }

    for _ in 0..spec.churn_rounds {
        for _ in 0..spec.churn_batch.min(live.len()) {
            let i = rng.gen_range(0..live.len());
            ops.push(OpRecord::remove(live.take_at(i)));
        }
        for _ in 0..spec.churn_batch {
            if universe.size() <= live.len() as u128 {
                return Err(Error::UniverseExhausted { live: live.len() });
            }
            let key = loop {
                let k = universe.sample(&mut rng);
                if !live.contains(k) {
                    break k;
                }
            };
            live.insert(key);
            ops.push(OpRecord::add(key));
        }
    }
    Ok(ops)
}
