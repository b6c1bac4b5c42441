use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("capacity must be at least 1")]
    ZeroCapacity,
    #[error("step {step} out of range for capacity {capacity} (need 1 <= step < capacity)")]
    StepOutOfRange { step: usize, capacity: usize },
    #[error("StepNotCoprime: step {step} shares a factor with capacity {capacity}, so some slots are unreachable")]
    StepNotCoprime { step: usize, capacity: usize },
    #[error("growth load factor {0} must lie strictly between 0 and 1")]
    InvalidLoadFactor(f64),
    #[error("growth multiplier {0} must be at least 2")]
    InvalidGrowthMultiplier(usize),
    #[error("table full: {live} live entries in {capacity} slots (one slot must stay empty)")]
    TableFull { live: usize, capacity: usize },
    #[error("capacity {capacity} too small for {live} live keys (need at least {needed})")]
    CapacityTooSmall {
        live: usize,
        capacity: usize,
        needed: usize,
    },
    #[error("key universe is empty")]
    EmptyKeyUniverse,
    #[error("key universe exhausted: no key outside the {live} live keys remains")]
    UniverseExhausted { live: usize },
    #[error("operation mix weights must not all be zero")]
    InvalidMix,
}
