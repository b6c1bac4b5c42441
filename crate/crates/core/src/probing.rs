//! Hashing and linear probe-sequence arithmetic shared by both table kinds.
//!
//! A key's home slot is its Euclidean remainder modulo the capacity, and the
//! `j`-th probe lands `j * step` slots further along (cyclically). Because
//! `gcd(step, capacity) = 1` is enforced, every probe sequence is a
//! permutation of all slots, and all sequences share the same cyclic order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default slot count when nothing else is requested.
pub const DEFAULT_CAPACITY: usize = 1_000_000;
/// Default probe increment.
pub const DEFAULT_STEP: usize = 1;
/// Load factor above which a growth-enabled table rehashes.
pub const DEFAULT_GROWTH_LOAD_FACTOR: f64 = 0.7;
/// Capacity multiplier applied on growth.
pub const DEFAULT_GROWTH_MULTIPLIER: usize = 2;

/// Capacity, probe step and growth policy of a table.
///
/// Construct through [`TableParams::new`] or the builder methods and then
/// [`TableParams::validate`]; the tables refuse unvalidated parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableParams {
    pub capacity: usize,
    pub step: usize,
    pub growth_enabled: bool,
    pub growth_load_factor: f64,
    pub growth_multiplier: usize,
}

impl Default for TableParams {
    fn default() -> Self {
        Self::new(DEFAULT_CAPACITY, DEFAULT_STEP)
    }
}

impl TableParams {
    /// Fixed-size parameters; growth disabled.
    pub fn new(capacity: usize, step: usize) -> Self {
        Self {
            capacity,
            step,
            growth_enabled: false,
            growth_load_factor: DEFAULT_GROWTH_LOAD_FACTOR,
            growth_multiplier: DEFAULT_GROWTH_MULTIPLIER,
        }
    }

    pub fn with_growth(mut self, load_factor: f64, multiplier: usize) -> Self {
        self.growth_enabled = true;
        self.growth_load_factor = load_factor;
        self.growth_multiplier = multiplier;
        self
    }

    /// Checks every parameter invariant.
    pub fn validate(self) -> Result<Self> {
        validate_params(self)
    }

    /// Smallest capacity `>= self.capacity * multiplier` that still admits
    /// this step (coprime with it and larger than it).
    pub fn grown(&self) -> Self {
        let mut capacity = self.capacity.saturating_mul(self.growth_multiplier).max(2);
        while capacity <= self.step || gcd(self.step, capacity) != 1 {
            capacity += 1;
        }
        Self { capacity, ..*self }
    }
}

/// Accepts `params` iff capacity is positive, the step lies in
/// `[1, capacity)` (any positive step for a single slot), the step is coprime
/// with the capacity, and the growth policy is well formed.
pub fn validate_params(params: TableParams) -> Result<TableParams> {
    let TableParams { capacity, step, .. } = params;
    if capacity == 0 {
        return Err(Error::ZeroCapacity);
    }
    if step == 0 || (capacity > 1 && step >= capacity) {
        return Err(Error::StepOutOfRange { step, capacity });
    }
    if gcd(step, capacity) != 1 {
        return Err(Error::StepNotCoprime { step, capacity });
    }
    if params.growth_enabled {
        let lf = params.growth_load_factor;
        if !(lf > 0.0 && lf < 1.0) {
            return Err(Error::InvalidLoadFactor(lf));
        }
        if params.growth_multiplier < 2 {
            return Err(Error::InvalidGrowthMultiplier(params.growth_multiplier));
        }
    }
    Ok(params)
}

/// Home slot of `key`: the non-negative remainder of `key` modulo `capacity`.
///
/// Total over all of `i64`, including `i64::MIN`.
#[inline]
pub fn hash_index(key: i64, capacity: usize) -> usize {
    debug_assert!(capacity >= 1);
    (key as i128).rem_euclid(capacity as i128) as usize
}

/// Slot visited by the `j`-th probe (0-based) for `key`.
#[inline]
pub fn probe_slot(key: i64, j: usize, params: &TableParams) -> usize {
    let m = params.capacity as u128;
    let home = hash_index(key, params.capacity) as u128;
    ((home + (params.step as u128 % m) * (j as u128 % m)) % m) as usize
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Precomputed stepping over a validated parameter set.
///
/// `offset_of` inverts the probe sequence: it returns the `j` for which
/// `probe_slot(key, j) == slot`, using the inverse of the step modulo the
/// capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Prober {
    capacity: usize,
    step: usize,
    step_inverse: usize,
}

impl Prober {
    pub(crate) fn new(params: &TableParams) -> Self {
        let capacity = params.capacity;
        let step = params.step % capacity;
        Self {
            capacity,
            step,
            step_inverse: mod_inverse(step, capacity),
        }
    }

    #[inline]
    pub(crate) fn home(&self, key: i64) -> usize {
        hash_index(key, self.capacity)
    }

    #[inline]
    pub(crate) fn next(&self, slot: usize) -> usize {
        let next = slot + self.step;
        if next >= self.capacity {
            next - self.capacity
        } else {
            next
        }
    }

    #[inline]
    pub(crate) fn prev(&self, slot: usize) -> usize {
        if slot >= self.step {
            slot - self.step
        } else {
            slot + self.capacity - self.step
        }
    }

    /// Number of steps from `from` to `to` along the probe order.
    #[inline]
    pub(crate) fn offset_of(&self, from: usize, to: usize) -> usize {
        let m = self.capacity as u128;
        let delta = (to as u128 + m - from as u128) % m;
        ((delta * self.step_inverse as u128) % m) as usize
    }
}

/// Inverse of `a` modulo `m` for `gcd(a, m) = 1`; 0 when `m == 1`.
fn mod_inverse(a: usize, m: usize) -> usize {
    if m == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as usize
}
