//! Test-only reference: the add / contains / remove / compress routines
//! written directly over two parallel arrays (keys and probe counts), with
//! a configurable stride. Deliberately shares no code with the library.

#![allow(dead_code)]

pub struct ReferenceTable {
    pub size: usize,
    pub stride: usize,
    pub keys: Vec<i64>,
    pub counts: Vec<usize>,
}

impl ReferenceTable {
    pub fn new(size: usize, stride: usize) -> Self {
        Self {
            size,
            stride,
            keys: vec![0; size],
            counts: vec![0; size],
        }
    }

    fn home(&self, key: i64) -> usize {
        let m = self.size as i64;
        (((key % m) + m) % m) as usize
    }

    fn step(&self, i: usize) -> usize {
        (i + self.stride) % self.size
    }

    pub fn add(&mut self, key: i64) -> bool {
        let mut i = self.home(key);
        let mut j = 1;
        while self.counts[i] != 0 {
            if self.keys[i] == key {
                return false;
            }
            i = self.step(i);
            j += 1;
        }
        self.counts[i] = j;
        self.keys[i] = key;
        true
    }

    pub fn contains(&self, key: i64) -> bool {
        let mut i = self.home(key);
        while self.counts[i] != 0 {
            if self.keys[i] == key {
                return true;
            }
            i = self.step(i);
        }
        false
    }

    pub fn remove(&mut self, key: i64) -> bool {
        let mut i = self.home(key);
        while self.counts[i] != 0 {
            if self.keys[i] == key {
                self.counts[i] = 0;
                self.compress(i);
                return true;
            }
            i = self.step(i);
        }
        false
    }

    pub fn compress(&mut self, mut free: usize) {
        let mut i = self.step(free);
        let mut off = 1;
        while self.counts[i] != 0 {
            if self.counts[i] > off {
                self.keys[free] = self.keys[i];
                self.counts[free] = self.counts[i] - off;
                self.counts[i] = 0;
                off = 0;
                free = i;
            }
            i = self.step(i);
            off += 1;
        }
    }

    /// Occupied slots as `(key, count)`, `None` when empty.
    pub fn layout(&self) -> Vec<Option<(i64, usize)>> {
        (0..self.size)
            .map(|i| (self.counts[i] != 0).then(|| (self.keys[i], self.counts[i])))
            .collect()
    }
}

pub fn layout(table: &probe_compact::CompactTable) -> Vec<Option<(i64, usize)>> {
    table
        .slots()
        .iter()
        .map(|s| s.key().map(|k| (k, s.probe_count())))
        .collect()
}
