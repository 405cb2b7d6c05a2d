//! Active element sets with hierarchical completeness bookkeeping.
//!
//! An [`AdaptiveSpace`] is an immutable snapshot of the set of active detail
//! elements. Every operation that mutates the set (refinement, coarsening)
//! produces a new snapshot, so coefficient fields can index elements by a
//! stable sorted slot during a time step. The invariant maintained throughout
//! is hierarchical completeness: all parents of an active element are active,
//! and the root element is always present.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use crate::element::{ElementKey, Node1d, MAX_DIM};
use crate::error::{Result, SolverError};

/// Multiply-xor hasher for packed element keys; deterministic across runs.
#[derive(Default)]
pub struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ b as u64).wrapping_mul(0x100_0000_01b3);
        }
    }

    fn write_u128(&mut self, n: u128) {
        const K: u64 = 0x9e37_79b9_7f4a_7c15;
        let lo = n as u64;
        let hi = (n >> 64) as u64;
        let mut h = lo.wrapping_mul(K) ^ hi.wrapping_mul(K.rotate_left(32));
        h ^= h >> 29;
        h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h ^= h >> 32;
        self.0 = h;
    }
}

type KeyMap<V> = HashMap<ElementKey, V, BuildHasherDefault<KeyHasher>>;

#[derive(Debug, Clone)]
pub struct AdaptiveSpace {
    d: usize,
    n_max: u8,
    keys: Vec<ElementKey>,
    index: KeyMap<u32>,
}

impl AdaptiveSpace {
    /// The space holding only the root element.
    pub fn root(d: usize, n_max: u8) -> Self {
        Self::from_keys_unchecked(d, n_max, vec![ElementKey::root(d)])
    }

    /// Full-grid space: all elements with `|l|_inf <= n`.
    pub fn full_grid(d: usize, n: u8, n_max: u8) -> Self {
        assert!(n <= n_max);
        let keys = Self::enumerate(d, |levels| levels.iter().copied().max().unwrap_or(0) <= n, n);
        Self::from_keys_unchecked(d, n_max, keys)
    }

    /// Standard sparse-grid space: all elements with `|l|_1 <= n`.
    pub fn sparse_grid(d: usize, n: u8, n_max: u8) -> Self {
        assert!(n <= n_max);
        let keys = Self::enumerate(
            d,
            |levels| levels.iter().map(|&l| l as u32).sum::<u32>() <= n as u32,
            n,
        );
        Self::from_keys_unchecked(d, n_max, keys)
    }

    /// Builds a space from an arbitrary key set, validating the invariants.
    pub fn from_keys(d: usize, n_max: u8, mut keys: Vec<ElementKey>) -> Result<Self> {
        keys.sort_unstable();
        keys.dedup();
        let space = Self::from_keys_unchecked(d, n_max, keys);
        space.validate()?;
        Ok(space)
    }

    fn from_keys_unchecked(d: usize, n_max: u8, mut keys: Vec<ElementKey>) -> Self {
        assert!(d >= 1 && d <= MAX_DIM);
        keys.sort_unstable();
        keys.dedup();
        let index = keys
            .iter()
            .enumerate()
            .map(|(s, &k)| (k, s as u32))
            .collect();
        AdaptiveSpace { d, n_max, keys, index }
    }

    fn enumerate<F: Fn(&[u8]) -> bool>(d: usize, admit: F, n_cap: u8) -> Vec<ElementKey> {
        let mut keys = Vec::new();
        let mut levels = vec![0u8; d];
        let mut nodes = vec![Node1d::ROOT; d];
        fn recurse<F: Fn(&[u8]) -> bool>(
            dim: usize,
            d: usize,
            n_cap: u8,
            levels: &mut Vec<u8>,
            nodes: &mut Vec<Node1d>,
            admit: &F,
            keys: &mut Vec<ElementKey>,
        ) {
            if dim == d {
                keys.push(ElementKey::from_nodes(nodes));
                return;
            }
            for l in 0..=n_cap {
                levels[dim] = l;
                if !admissible_prefix(levels, dim, admit) {
                    continue;
                }
                for j in 0..Node1d::count_at_level(l) {
                    nodes[dim] = Node1d::from_level_translation(l, j);
                    recurse(dim + 1, d, n_cap, levels, nodes, admit, keys);
                }
            }
            levels[dim] = 0;
            nodes[dim] = Node1d::ROOT;
        }
        // A prefix is viable if completing the remaining dims with level 0
        // can still be admitted (admit is monotone for the spaces built here).
        fn admissible_prefix<F: Fn(&[u8]) -> bool>(levels: &[u8], dim: usize, admit: &F) -> bool {
            let mut probe = levels.to_vec();
            for l in probe.iter_mut().skip(dim + 1) {
                *l = 0;
            }
            admit(&probe)
        }
        recurse(0, d, n_cap, &mut levels, &mut nodes, &admit, &mut keys);
        keys
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n_max(&self) -> u8 {
        self.n_max
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Active keys in sorted order; the slot of a key is its index here.
    pub fn keys(&self) -> &[ElementKey] {
        &self.keys
    }

    pub fn slot(&self, key: ElementKey) -> Option<usize> {
        self.index.get(&key).map(|&s| s as usize)
    }

    pub fn contains(&self, key: ElementKey) -> bool {
        self.index.contains_key(&key)
    }

    /// Total stored coefficients for blocks of `(deg + 1)^d` entries.
    pub fn dof(&self, deg: usize) -> usize {
        self.len() * (deg + 1).pow(self.d as u32)
    }

    pub fn max_active_level(&self) -> u8 {
        self.keys
            .iter()
            .map(|k| k.level_max(self.d))
            .max()
            .unwrap_or(0)
    }

    /// True when no child of `key` (along any dimension) is active.
    pub fn is_leaf(&self, key: ElementKey) -> bool {
        for m in 0..self.d {
            for c in key.node(m).children() {
                if c.level() <= self.n_max && self.contains(key.with_node(m, c)) {
                    return false;
                }
            }
        }
        true
    }

    /// Checks hierarchical completeness, the root's presence and level caps.
    pub fn validate(&self) -> Result<()> {
        if !self.contains(ElementKey::root(self.d)) {
            return Err(SolverError::InvalidConfig("root element missing".into()));
        }
        for &key in &self.keys {
            if key.level_max(self.d) > self.n_max {
                return Err(SolverError::InvalidConfig(format!(
                    "element exceeds level cap {}: l = {:?}",
                    self.n_max,
                    key.levels(self.d).0
                )));
            }
            for parent in key.parents(self.d) {
                if !self.contains(parent) {
                    return Err(SolverError::InvalidConfig(format!(
                        "incomplete hierarchy: parent of l = {:?}, j = {:?} missing",
                        key.levels(self.d).0,
                        key.translations(self.d)
                    )));
                }
            }
        }
        Ok(())
    }

    /// New snapshot with `extra` keys (and all their ancestors) activated.
    pub fn with_activated(&self, extra: &[ElementKey]) -> Self {
        let mut keys: Vec<ElementKey> = self.keys.clone();
        let mut seen: KeyMap<()> = self.keys.iter().map(|&k| (k, ())).collect();
        let mut stack: Vec<ElementKey> = extra.to_vec();
        while let Some(k) = stack.pop() {
            if seen.contains_key(&k) {
                continue;
            }
            seen.insert(k, ());
            keys.push(k);
            stack.extend(k.parents(self.d));
        }
        Self::from_keys_unchecked(self.d, self.n_max, keys)
    }

    /// New snapshot without the given keys. The caller must only remove
    /// leaves; the root is never removed.
    pub fn with_removed(&self, removed: &[ElementKey]) -> Self {
        let drop: KeyMap<()> = removed
            .iter()
            .filter(|&&k| k != ElementKey::root(self.d))
            .map(|&k| (k, ()))
            .collect();
        let keys = self
            .keys
            .iter()
            .copied()
            .filter(|k| !drop.contains_key(k))
            .collect();
        Self::from_keys_unchecked(self.d, self.n_max, keys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_grid_element_count_d2() {
        // per-level translation counts c(0)=1, c(l)=2^{l-1}; the number of
        // elements with l1 + l2 = s is 2^{s-2}(s+3) for s >= 2.
        let space = AdaptiveSpace::sparse_grid(2, 3, 3);
        assert_eq!(space.len(), 1 + 2 + 5 + 12);
        space.validate().unwrap();
    }

    #[test]
    fn full_grid_element_count_d2() {
        let space = AdaptiveSpace::full_grid(2, 2, 2);
        // 1d nodes with level <= 2: 4 -> 16 tensor elements
        assert_eq!(space.len(), 16);
        space.validate().unwrap();
    }

    #[test]
    fn incomplete_set_rejected() {
        let d = 1;
        let orphan = ElementKey::from_levels_translations(&[2], &[1]);
        let err = AdaptiveSpace::from_keys(d, 4, vec![ElementKey::root(d), orphan]);
        assert!(err.is_err());
    }

    #[test]
    fn activation_pulls_in_ancestors() {
        let space = AdaptiveSpace::root(2, 4);
        let deep = ElementKey::from_levels_translations(&[3, 2], &[2, 1]);
        let bigger = space.with_activated(&[deep]);
        bigger.validate().unwrap();
        assert!(bigger.contains(deep));
        // ancestors along both dims must have been added
        assert!(bigger.contains(ElementKey::from_levels_translations(&[2, 2], &[1, 1])));
        assert!(bigger.contains(ElementKey::from_levels_translations(&[3, 1], &[2, 0])));
    }

    #[test]
    fn leaf_detection() {
        let space = AdaptiveSpace::sparse_grid(2, 2, 4);
        let root = ElementKey::root(2);
        assert!(!space.is_leaf(root));
        let top = ElementKey::from_levels_translations(&[2, 0], &[1, 0]);
        assert!(space.is_leaf(top));
    }

    #[test]
    fn removed_root_is_kept() {
        let space = AdaptiveSpace::root(1, 3);
        let smaller = space.with_removed(&[ElementKey::root(1)]);
        assert_eq!(smaller.len(), 1);
    }
}
