//! Multi-index bookkeeping for the dyadic element tree.
//!
//! In one dimension the detail elements form a binary tree: the root element
//! `(l = 0, j = 0)` carries the global scaling functions, `(l = 1, j = 0)` the
//! first detail level, and an element `(l, j)` with `l >= 1` has the two
//! children `(l + 1, 2j)` and `(l + 1, 2j + 1)`. Encoding `(l, j)` as the
//! heap-style id `2^{l-1} + j` (root = 0) makes parent/child arithmetic a
//! shift and keeps the whole multi-index of an element in a single packed
//! integer for hash-map storage.

use crate::error::{Result, SolverError};

/// One dimension's `(level, translation)` pair encoded as a dyadic heap id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node1d(pub u16);

impl Node1d {
    pub const ROOT: Node1d = Node1d(0);

    pub fn from_level_translation(level: u8, translation: u32) -> Self {
        if level == 0 {
            assert_eq!(translation, 0, "level 0 has a single translation");
            Node1d(0)
        } else {
            debug_assert!(translation < (1u32 << (level - 1)));
            Node1d(((1u32 << (level - 1)) + translation) as u16)
        }
    }

    pub fn level(self) -> u8 {
        if self.0 == 0 {
            0
        } else {
            (16 - self.0.leading_zeros()) as u8
        }
    }

    pub fn translation(self) -> u32 {
        if self.0 == 0 {
            0
        } else {
            (self.0 - (1u16 << (self.level() - 1))) as u32
        }
    }

    pub fn parent(self) -> Option<Node1d> {
        match self.0 {
            0 => None,
            1 => Some(Node1d(0)),
            id => Some(Node1d(id >> 1)),
        }
    }

    /// Children at the next level: one child for the root, two otherwise.
    pub fn children(self) -> Vec<Node1d> {
        if self.0 == 0 {
            vec![Node1d(1)]
        } else {
            vec![Node1d(self.0 << 1), Node1d((self.0 << 1) | 1)]
        }
    }

    /// True when `self` lies on the path from the root to `other` (inclusive).
    pub fn is_ancestor_or_self_of(self, mut other: Node1d) -> bool {
        loop {
            if other == self {
                return true;
            }
            match other.parent() {
                Some(p) => other = p,
                None => return false,
            }
        }
    }

    /// Support of the associated basis functions as a dyadic interval.
    /// Levels 0 and 1 cover `[0, 1]`; level `l >= 1`, translation `j` covers
    /// `[j 2^{1-l}, (j+1) 2^{1-l}]`.
    pub fn support(self) -> (f64, f64) {
        let l = self.level();
        if l <= 1 {
            (0.0, 1.0)
        } else {
            let w = (2.0f64).powi(1 - l as i32);
            let j = self.translation() as f64;
            (j * w, (j + 1.0) * w)
        }
    }

    /// Number of translations at `level`.
    pub fn count_at_level(level: u8) -> u32 {
        if level == 0 {
            1
        } else {
            1u32 << (level - 1)
        }
    }
}

/// Per-dimension mesh levels of an element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelVec(pub Vec<u8>);

impl LevelVec {
    pub fn sum(&self) -> u32 {
        self.0.iter().map(|&l| l as u32).sum()
    }

    pub fn max(&self) -> u8 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

/// A multi-dimensional detail element: one `Node1d` per dimension, packed
/// into 16 bits each (low dimension in the low bits). Supports `d <= 8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementKey(pub u128);

pub const MAX_DIM: usize = 8;

impl ElementKey {
    pub fn root(d: usize) -> Self {
        assert!(d >= 1 && d <= MAX_DIM);
        ElementKey(0)
    }

    pub fn from_nodes(nodes: &[Node1d]) -> Self {
        assert!(!nodes.is_empty() && nodes.len() <= MAX_DIM);
        let mut bits = 0u128;
        for (m, n) in nodes.iter().enumerate() {
            bits |= (n.0 as u128) << (16 * m);
        }
        ElementKey(bits)
    }

    pub fn from_levels_translations(levels: &[u8], translations: &[u32]) -> Self {
        assert_eq!(levels.len(), translations.len());
        let nodes: Vec<Node1d> = levels
            .iter()
            .zip(translations)
            .map(|(&l, &j)| Node1d::from_level_translation(l, j))
            .collect();
        Self::from_nodes(&nodes)
    }

    pub fn node(self, dim: usize) -> Node1d {
        Node1d(((self.0 >> (16 * dim)) & 0xffff) as u16)
    }

    pub fn with_node(self, dim: usize, node: Node1d) -> Self {
        let mask = !(0xffffu128 << (16 * dim));
        ElementKey((self.0 & mask) | ((node.0 as u128) << (16 * dim)))
    }

    pub fn levels(self, d: usize) -> LevelVec {
        LevelVec((0..d).map(|m| self.node(m).level()).collect())
    }

    pub fn translations(self, d: usize) -> Vec<u32> {
        (0..d).map(|m| self.node(m).translation()).collect()
    }

    pub fn level_sum(self, d: usize) -> u32 {
        (0..d).map(|m| self.node(m).level() as u32).sum()
    }

    pub fn level_max(self, d: usize) -> u8 {
        (0..d).map(|m| self.node(m).level()).max().unwrap_or(0)
    }

    /// Children along a single dimension; empty if the level cap is reached.
    pub fn children_along(self, dim: usize, d: usize, n_max: u8) -> Result<Vec<ElementKey>> {
        if dim >= d {
            return Err(SolverError::DimensionOutOfRange { dim, d });
        }
        let node = self.node(dim);
        if node.level() + 1 > n_max {
            return Ok(Vec::new());
        }
        Ok(node
            .children()
            .into_iter()
            .map(|c| self.with_node(dim, c))
            .collect())
    }

    /// Parents along every dimension whose level is positive.
    pub fn parents(self, d: usize) -> Vec<ElementKey> {
        (0..d)
            .filter_map(|m| self.node(m).parent().map(|p| self.with_node(m, p)))
            .collect()
    }

    /// Component-wise tree order: true when every node of `self` is an
    /// ancestor-or-self of the corresponding node of `other`.
    pub fn dominates(self, other: ElementKey, d: usize) -> bool {
        (0..d).all(|m| self.node(m).is_ancestor_or_self_of(other.node(m)))
    }

    /// Support box of the element's tensor basis functions.
    pub fn support(self, d: usize) -> Vec<(f64, f64)> {
        (0..d).map(|m| self.node(m).support()).collect()
    }
}

/// A degree multi-index `i` with `0 <= i_m <= deg` per dimension, identified
/// with its row-major offset into a coefficient block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeIndex(pub Vec<usize>);

impl DegreeIndex {
    pub fn from_flat(mut flat: usize, deg: usize, d: usize) -> Self {
        let base = deg + 1;
        let mut idx = vec![0usize; d];
        for m in (0..d).rev() {
            idx[m] = flat % base;
            flat /= base;
        }
        DegreeIndex(idx)
    }

    pub fn to_flat(&self, deg: usize) -> usize {
        let base = deg + 1;
        self.0.iter().fold(0, |acc, &i| acc * base + i)
    }
}
