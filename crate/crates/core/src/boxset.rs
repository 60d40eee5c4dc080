//! The residual box collection with cached aggregates and the
//! "narrowest box that still fits" query.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::geometry::OrientedBox;

#[derive(Debug, Clone, Copy)]
struct Key {
    width: f64,
    height: f64,
    id: u64,
}

impl Key {
    fn of(b: &OrientedBox) -> Self {
        Key {
            width: b.width(),
            height: b.height(),
            id: b.id,
        }
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width
            .total_cmp(&other.width)
            .then(self.height.total_cmp(&other.height))
            .then(self.id.cmp(&other.id))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

/// Multiset of boxes ordered by `(width, height, id)`.
///
/// Keeps the total area `a`, total height `h` and maximum width `w` of its
/// members; all three are zero for the empty set.
#[derive(Debug, Clone, Default)]
pub struct BoxSet {
    index: BTreeMap<Key, OrientedBox>,
    keys: HashMap<u64, Key>,
    area: f64,
    height: f64,
}

impl BoxSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Sum of member areas.
    pub fn area(&self) -> f64 {
        self.area
    }

    /// Sum of member heights.
    pub fn height(&self) -> f64 {
        self.height
    }

    /// Widest member's width.
    pub fn width(&self) -> f64 {
        self.index.last_key_value().map_or(0.0, |(k, _)| k.width)
    }

    pub fn contains(&self, id: u64) -> bool {
        self.keys.contains_key(&id)
    }

    pub fn get(&self, id: u64) -> Option<&OrientedBox> {
        self.keys.get(&id).and_then(|k| self.index.get(k))
    }

    /// Members in `(width, height, id)` order.
    pub fn iter(&self) -> impl Iterator<Item = &OrientedBox> {
        self.index.values()
    }

    /// Panics if a box with the same id is already present.
    pub fn insert(&mut self, b: OrientedBox) {
        let key = Key::of(&b);
        let dup = self.keys.insert(b.id, key);
        assert!(dup.is_none(), "box id {} inserted twice", b.id);
        self.index.insert(key, b);
        self.area += b.area();
        self.height += b.height();
    }

    pub fn remove(&mut self, id: u64) -> Result<OrientedBox> {
        let key = self.keys.remove(&id).ok_or(Error::NotFound(id))?;
        let b = self
            .index
            .remove(&key)
            .expect("index out of sync with keys");
        if self.index.is_empty() {
            self.area = 0.0;
            self.height = 0.0;
        } else {
            self.area -= b.area();
            self.height -= b.height();
        }
        Ok(b)
    }

    /// Among members of width at least `threshold`, the one with the smallest
    /// `(width, height, id)`. `None` when every member is narrower.
    pub fn select_candidate(&self, threshold: f64) -> Option<&OrientedBox> {
        let from = Key {
            width: threshold,
            height: f64::NEG_INFINITY,
            id: 0,
        };
        self.index.range(from..).next().map(|(_, b)| b)
    }

    /// `a <= w * h + tol`.
    pub fn area_bound_holds(&self, tol: f64) -> bool {
        self.area <= self.width() * self.height + tol
    }
}

impl FromIterator<OrientedBox> for BoxSet {
    fn from_iter<I: IntoIterator<Item = OrientedBox>>(iter: I) -> Self {
        let mut set = BoxSet::new();
        for b in iter {
            set.insert(b);
        }
        set
    }
}
