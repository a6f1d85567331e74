//! Small concurrency helpers shared by the caching layers.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Condvar, Mutex, OnceLock};

/// Memo table with single-flight semantics: concurrent callers asking for the
/// same key run the computation once and share the result. Failed
/// computations are not memoized.
pub struct SingleFlight<K, V> {
    slots: Mutex<HashMap<K, Arc<OnceLock<Option<V>>>>>,
}

impl<K, V> Default for SingleFlight<K, V> {
    fn default() -> Self {
        Self {
            slots: Mutex::new(HashMap::new()),
        }
    }
}

impl<K: Eq + Hash + Clone, V: Clone> SingleFlight<K, V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &K) -> Option<V> {
        let slot = self.slots.lock().unwrap().get(key).cloned()?;
        slot.get().and_then(|v| v.clone())
    }

    /// Returns the memoized value for `key`, computing it with `compute` if
    /// absent. The flag is true when the value came from the memo table.
    pub fn get_or_try_insert<E>(&self, key: K, compute: impl FnOnce() -> Result<V, E>) -> Result<(V, bool), E> {
        let mut compute = Some(compute);
        loop {
            let slot = {
                let mut slots = self.slots.lock().unwrap();
                slots.entry(key.clone()).or_default().clone()
            };
            let mut error = None;
            let mut ran = false;
            let value = slot.get_or_init(|| {
                ran = true;
                let f = compute.take().expect("computation runs at most once");
                match f() {
                    Ok(v) => Some(v),
                    Err(e) => {
                        error = Some(e);
                        None
                    }
                }
            });
            match value {
                Some(v) => return Ok((v.clone(), !ran)),
                None => {
                    self.evict_failed(&key, &slot);
                    if let Some(e) = error {
                        return Err(e);
                    }
                    // A concurrent caller failed; try again with our own closure.
                }
            }
        }
    }

    fn evict_failed(&self, key: &K, slot: &Arc<OnceLock<Option<V>>>) {
        let mut slots = self.slots.lock().unwrap();
        if let Some(current) = slots.get(key) {
            if Arc::ptr_eq(current, slot) {
                slots.remove(key);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.slots
            .lock()
            .unwrap()
            .values()
            .filter(|s| matches!(s.get(), Some(Some(_))))
            .count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Counting semaphore bounding in-flight backend requests.
pub struct Semaphore {
    permits: Mutex<usize>,
    available: Condvar,
}

impl Semaphore {
    pub fn new(permits: usize) -> Self {
        Self {
            permits: Mutex::new(permits.max(1)),
            available: Condvar::new(),
        }
    }

    pub fn acquire(&self) -> SemaphoreGuard<'_> {
        let mut permits = self.permits.lock().unwrap();
        while *permits == 0 {
            permits = self.available.wait(permits).unwrap();
        }
        *permits -= 1;
        SemaphoreGuard { sem: self }
    }
}

pub struct SemaphoreGuard<'a> {
    sem: &'a Semaphore,
}

impl Drop for SemaphoreGuard<'_> {
    fn drop(&mut self) {
        *self.sem.permits.lock().unwrap() += 1;
        self.sem.available.notify_one();
    }
}
