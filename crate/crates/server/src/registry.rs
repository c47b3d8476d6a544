//! In-memory session store with least-recently-used eviction.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use mtensor::sim::Simulation;
use tokio::sync::Mutex;

pub const DEFAULT_MAX_SESSIONS: usize = 256;

/// The session this one was forked from, and the step it was forked at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parent {
    pub id: String,
    pub step: usize,
}

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub parent: Option<Parent>,
    pub sim: Simulation,
}

#[derive(Debug)]
pub struct Entry {
    /// Serializes every operation on one session.
    pub session: Mutex<Session>,
    last_used: AtomicU64,
}

/// Lookups share a read lock; inserts and evictions take the write lock.
/// Recency is a logical clock bumped on every lookup.
#[derive(Debug)]
pub struct Registry {
    sessions: RwLock<HashMap<String, Arc<Entry>>>,
    clock: AtomicU64,
    capacity: usize,
}

impl Registry {
    /// `capacity` is clamped to at least 1.
    pub fn new(capacity: usize) -> Self {
        Self { sessions: RwLock::new(HashMap::new()), clock: AtomicU64::new(0), capacity: capacity.max(1) }
    }

    fn tick(&self) -> u64 {
        self.clock.fetch_add(1, Ordering::Relaxed)
    }

    pub fn get(&self, id: &str) -> Option<Arc<Entry>> {
        let entry = self.sessions.read().expect("registry lock").get(id).cloned()?;
        entry.last_used.store(self.tick(), Ordering::Relaxed);
        Some(entry)
    }

    /// Stores a new session under a fresh id, evicting the least recently
    /// used session when full. Returns the id.
    pub fn insert(&self, parent: Option<Parent>, sim: Simulation) -> String {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let entry = Arc::new(Entry {
            session: Mutex::new(Session { id: id.clone(), parent, sim }),
            last_used: AtomicU64::new(self.tick()),
        });
        let mut map = self.sessions.write().expect("registry lock");
        while map.len() >= self.capacity {
            let oldest = map
                .iter()
                .min_by_key(|(_, e)| e.last_used.load(Ordering::Relaxed))
                .map(|(k, _)| k.clone())
                .expect("non-empty at capacity");
            map.remove(&oldest);
        }
        map.insert(id.clone(), entry);
        id
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("registry lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for Registry {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_SESSIONS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sim() -> Simulation {
        Simulation::new(mtensor::scenarios::load("balanced_demo").unwrap())
    }

    #[test]
    fn evicts_least_recently_used() {
        let r = Registry::new(2);
        let a = r.insert(None, sim());
        let b = r.insert(None, sim());
        assert!(r.get(&a).is_some());
        let c = r.insert(None, sim());
        assert_eq!(r.len(), 2);
        assert!(r.get(&b).is_none());
        assert!(r.get(&a).is_some() && r.get(&c).is_some());
    }

    #[test]
    fn ids_are_distinct() {
        let r = Registry::default();
        assert_ne!(r.insert(None, sim()), r.insert(None, sim()));
    }
}
