use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::graph::Vertex;

/// Fixed-universe vertex set backed by 64-bit words.
///
/// Serializes as a sorted array of vertex ids; the universe size is not part
/// of the serialized form and is restored from the owning graph.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSet {
    words: Vec<u64>,
}

impl VertexSet {
    pub fn new(universe: usize) -> Self {
        VertexSet {
            words: vec![0; universe.div_ceil(64)],
        }
    }

    pub fn from_vertices(universe: usize, vs: impl IntoIterator<Item = Vertex>) -> Self {
        let mut set = Self::new(universe);
        for v in vs {
            set.insert(v);
        }
        set
    }

    fn ensure(&mut self, v: Vertex) {
        let w = v / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
    }

    /// Returns true if `v` was not already present.
    pub fn insert(&mut self, v: Vertex) -> bool {
        self.ensure(v);
        let (w, b) = (v / 64, v % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn remove(&mut self, v: Vertex) {
        if let Some(word) = self.words.get_mut(v / 64) {
            *word &= !(1u64 << (v % 64));
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.words
            .get(v / 64)
            .is_some_and(|w| w & (1 << (v % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, &w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Elements of `self` not in `other`, ascending.
    pub fn difference<'a>(&'a self, other: &'a VertexSet) -> impl Iterator<Item = Vertex> + 'a {
        self.iter().filter(move |&v| !other.contains(v))
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }

    /// The low 64 bits; exact when every member is below 64.
    pub fn low_word(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    /// Normalizes trailing zero words so equal sets compare and hash equal
    /// regardless of how they were grown.
    pub fn normalized(mut self, universe: usize) -> Self {
        self.words.resize(universe.div_ceil(64), 0);
        self
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let vs = Vec::<Vertex>::deserialize(d)?;
        let universe = vs.iter().max().map_or(0, |m| m + 1);
        Ok(VertexSet::from_vertices(universe, vs))
    }
}
