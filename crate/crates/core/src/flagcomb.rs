//! Combinatorics of the distinguished atlas.
//!
//! A flag type `Fl(d_1, ..., d_r; n)` is covered by charts labelled by
//! admissible sequences `I_1 ⊂ ... ⊂ I_r ⊆ {1..n}` with `|I_j| = d_j`.
//! Intersections of charts are labelled by admissible chains (sets of
//! sequences). All indices are 1-based.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Dimensions `0 < d_1 < ... < d_r < n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlagType {
    dims: Vec<usize>,
    n: usize,
}

impl FlagType {
    pub fn new(dims: Vec<usize>, n: usize) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidFlagType("no dimensions given".into()));
        }
        if dims[0] == 0 {
            return Err(Error::InvalidFlagType("d_1 must be positive".into()));
        }
        if dims.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFlagType(format!("dimensions {dims:?} are not strictly increasing")));
        }
        if *dims.last().unwrap() >= n {
            return Err(Error::InvalidFlagType(format!("d_r = {} must be smaller than n = {n}", dims.last().unwrap())));
        }
        Ok(FlagType { dims, n })
    }

    pub fn grassmannian(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![d], n)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of subspaces `r`.
    pub fn depth(&self) -> usize {
        self.dims.len()
    }

    /// `d_r`, the number of rows of every chart matrix.
    pub fn top(&self) -> usize {
        *self.dims.last().unwrap()
    }

    /// `d_j` for `j` in `0..=r+1`, with `d_0 = 0` and `d_{r+1} = n`.
    pub fn boundary(&self, j: usize) -> usize {
        match j {
            0 => 0,
            j if j <= self.dims.len() => self.dims[j - 1],
            j if j == self.dims.len() + 1 => self.n,
            _ => panic!("band boundary {j} out of range for {self}"),
        }
    }

    pub fn is_grassmannian(&self) -> bool {
        self.dims.len() == 1
    }

    /// Band (1-based) containing the 1-based row or column index `i`;
    /// band `r+1` holds the columns past `d_r`.
    pub fn band_of(&self, i: usize) -> usize {
        (1..=self.depth() + 1).find(|&j| i <= self.boundary(j)).expect("index beyond n")
    }

    /// `d_r(n-d_r) + d_{r-1}(d_r-d_{r-1}) + ... + d_1(d_2-d_1)`.
    pub fn dimension(&self) -> usize {
        let r = self.depth();
        (1..=r).map(|j| self.boundary(j) * (self.boundary(j + 1) - self.boundary(j))).sum()
    }

    /// All flag types with ambient dimension `n`.
    pub fn all_with_n(n: usize) -> Vec<FlagType> {
        let inner = n.saturating_sub(1);
        let mut out = Vec::new();
        for mask in 1u64..(1u64 << inner) {
            let dims: Vec<usize> = (0..inner).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
            out.push(FlagType { dims, n });
        }
        out.sort();
        out
    }
}

impl fmt::Display for FlagType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        if self.is_grassmannian() {
            write!(f, "Gr({};{})", dims[0], self.n)
        } else {
            write!(f, "Fl({};{})", dims.join(","), self.n)
        }
    }
}

/// Nested index sets `I_1 ⊂ ... ⊂ I_r`, each stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleSequence {
    flag_type: FlagType,
    subsets: Vec<Vec<usize>>,
}

impl AdmissibleSequence {
    pub fn new(flag_type: FlagType, subsets: Vec<Vec<usize>>) -> Result<Self> {
        if subsets.len() != flag_type.depth() {
            return Err(Error::InvalidSequence(format!(
                "expected {} subsets for {flag_type}, got {}",
                flag_type.depth(),
                subsets.len()
            )));
        }
        let mut sorted = Vec::with_capacity(subsets.len());
        for (j, mut s) in subsets.into_iter().enumerate() {
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidSequence(format!("I_{} has repeated indices", j + 1)));
            }
            if s.iter().any(|&i| i == 0 || i > flag_type.n) {
                return Err(Error::InvalidSequence(format!("I_{} = {s:?} leaves {{1..{}}}", j + 1, flag_type.n)));
            }
            if s.len() != flag_type.dims[j] {
                return Err(Error::InvalidSequence(format!(
                    "|I_{}| = {} but d_{} = {}",
                    j + 1,
                    s.len(),
                    j + 1,
                    flag_type.dims[j]
                )));
            }
            sorted.push(s);
        }
        for j in 1..sorted.len() {
            if !sorted[j - 1].iter().all(|i| sorted[j].binary_search(i).is_ok()) {
                return Err(Error::InvalidSequence(format!("I_{j} is not contained in I_{}", j + 1)));
            }
        }
        Ok(AdmissibleSequence { flag_type, subsets: sorted })
    }

    /// The reference sequence `I_0`: `{1..d_1} ⊂ ... ⊂ {1..d_r}`.
    pub fn reference(flag_type: &FlagType) -> Self {
        let subsets = flag_type.dims.iter().map(|&d| (1..=d).collect()).collect();
        AdmissibleSequence { flag_type: flag_type.clone(), subsets }
    }

    /// Parses `"1;1,3"` style notation: comma lists per subset, `;` between subsets.
    pub fn parse(flag_type: &FlagType, text: &str) -> Result<Self> {
        let subsets = text
            .split(';')
            .map(|part| {
                part.split(',')
                    .map(|t| {
                        t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad index `{t}` in `{text}`")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(flag_type.clone(), subsets)
    }

    pub fn flag_type(&self) -> &FlagType {
        &self.flag_type
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    /// `I_j` for `j` in `1..=r+1`, with `I_{r+1} = {1..n}`.
    pub fn subset(&self, j: usize) -> Vec<usize> {
        if j == self.flag_type.depth() + 1 {
            (1..=self.flag_type.n).collect()
        } else {
            self.subsets[j - 1].clone()
        }
    }

    /// `I_j − I_{j−1}` in increasing order, `j` in `1..=r+1`.
    pub fn band_set(&self, j: usize) -> Vec<usize> {
        let cur = self.subset(j);
        if j == 1 {
            return cur;
        }
        let prev = self.subset(j - 1);
        cur.into_iter().filter(|i| prev.binary_search(i).is_err()).collect()
    }

    pub fn is_reference(&self) -> bool {
        *self == Self::reference(&self.flag_type)
    }

    /// Compact label, e.g. `1;1,3`.
    pub fn label(&self) -> String {
        self.subsets
            .iter()
            .map(|s| s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Display for AdmissibleSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .subsets
            .iter()
            .map(|s| format!("{{{}}}", s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        f.write_str(&parts.join("⊂"))
    }
}

/// The 1-based `k`-subsets of `{1..n}` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for i in start..=n {
            if n - i + 1 < need {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All admissible sequences of `flag_type` in canonical order.
pub fn enumerate_sequences(flag_type: &FlagType) -> Vec<AdmissibleSequence> {
    let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for j in 0..flag_type.depth() {
        let grow = flag_type.dims[j] - if j == 0 { 0 } else { flag_type.dims[j - 1] };
        let mut next = Vec::new();
        for prefix in &partial {
            let prev: Vec<usize> = prefix.last().cloned().unwrap_or_default();
            let rest: Vec<usize> = (1..=flag_type.n).filter(|i| !prev.contains(i)).collect();
            for pick in combinations(rest.len(), grow) {
                let mut set = prev.clone();
                set.extend(pick.iter().map(|&p| rest[p - 1]));
                set.sort_unstable();
                let mut seq = prefix.clone();
                seq.push(set);
                next.push(seq);
            }
        }
        partial = next;
    }
    let mut out: Vec<AdmissibleSequence> =
        partial.into_iter().map(|subsets| AdmissibleSequence { flag_type: flag_type.clone(), subsets }).collect();
    out.sort();
    out
}

/// `n! / ((n−d_r)! (d_r−d_{r−1})! ··· d_1!)`.
pub fn sequence_count(flag_type: &FlagType) -> u128 {
    (1..=flag_type.depth()).map(|j| binomial(flag_type.boundary(j + 1), flag_type.boundary(j))).product()
}

/// The band-wise order-preserving permutation `χ_I`, stored 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacteristicPermutation {
    sequence: AdmissibleSequence,
    map: Vec<usize>,
}

impl CharacteristicPermutation {
    pub fn sequence(&self) -> &AdmissibleSequence {
        &self.sequence
    }

    /// `χ(k)` for 1-based `k`.
    pub fn apply(&self, k: usize) -> usize {
        self.map[k - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.map.len()];
        for (k, &v) in self.map.iter().enumerate() {
            inv[v - 1] = k + 1;
        }
        inv
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(k, &v)| v == k + 1)
    }

    pub fn is_involution(&self) -> bool {
        self.map.iter().enumerate().all(|(k, &v)| self.map[v - 1] == k + 1)
    }

    /// `M·C_χ`: column `k` of the result is column `χ(k)` of `m`.
    pub fn gather_columns<T: Clone>(&self, row: &[T]) -> Vec<T> {
        self.map.iter().map(|&c| row[c - 1].clone()).collect()
    }

    /// `M·C_χ⁻¹`: column `χ(k)` of the result is column `k` of `m`.
    pub fn scatter_columns<T: Clone>(&self, row: &[T]) -> Vec<T> {
        let inv = self.inverse();
        inv.iter().map(|&k| row[k - 1].clone()).collect()
    }
}

pub fn characteristic_map(seq: &AdmissibleSequence) -> CharacteristicPermutation {
    let ft = seq.flag_type();
    let mut map = Vec::with_capacity(ft.n());
    for j in 1..=ft.depth() + 1 {
        map.extend(seq.band_set(j));
    }
    debug_assert_eq!(map.len(), ft.n());
    CharacteristicPermutation { sequence: seq.clone(), map }
}

/// A nonempty set of admissible sequences of one flag type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleChain {
    flag_type: FlagType,
    sequences: BTreeSet<AdmissibleSequence>,
}

impl AdmissibleChain {
    pub fn new(sequences: impl IntoIterator<Item = AdmissibleSequence>) -> Result<Self> {
        let sequences: BTreeSet<_> = sequences.into_iter().collect();
        let first =
            sequences.iter().next().ok_or_else(|| Error::InvalidChain("a chain needs at least one sequence".into()))?;
        let flag_type = first.flag_type().clone();
        if let Some(bad) = sequences.iter().find(|s| *s.flag_type() != flag_type) {
            return Err(Error::IncompatibleFlagTypes(flag_type.to_string(), bad.flag_type().to_string()));
        }
        Ok(AdmissibleChain { flag_type, sequences })
    }

    pub fn singleton(seq: AdmissibleSequence) -> Self {
        AdmissibleChain { flag_type: seq.flag_type().clone(), sequences: [seq].into() }
    }

    /// The maximal chain of all admissible sequences.
    pub fn maximal(flag_type: &FlagType) -> Self {
        AdmissibleChain {
            flag_type: flag_type.clone(),
            sequences: enumerate_sequences(flag_type).into_iter().collect(),
        }
    }

    pub fn flag_type(&self) -> &FlagType {
        &self.flag_type
    }

    pub fn sequences(&self) -> impl Iterator<Item = &AdmissibleSequence> {
        self.sequences.iter()
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn contains(&self, seq: &AdmissibleSequence) -> bool {
        self.sequences.contains(seq)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.flag_type != other.flag_type {
            return Err(Error::IncompatibleFlagTypes(self.flag_type.to_string(), other.flag_type.to_string()));
        }
        Ok(())
    }

    /// Chain of the intersection `U_a ∩ U_b`.
    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(AdmissibleChain {
            flag_type: self.flag_type.clone(),
            sequences: self.sequences.union(&other.sequences).cloned().collect(),
        })
    }

    /// Sequence-set inclusion `self ⊆ other`.
    pub fn is_subchain_of(&self, other: &Self) -> bool {
        self.flag_type == other.flag_type && self.sequences.is_subset(&other.sequences)
    }

    /// `U_self ⊆ U_other`, decided as `other ⊆ self` on sequence sets.
    pub fn is_subordinate(&self, other: &Self) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(other.sequences.is_subset(&self.sequences))
    }
}

impl fmt::Display for AdmissibleChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sequences.iter().map(|s| s.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn chain_union(a: &AdmissibleChain, b: &AdmissibleChain) -> Result<AdmissibleChain> {
    a.union(b)
}

pub fn is_subordinate(a: &AdmissibleChain, b: &AdmissibleChain) -> Result<bool> {
    a.is_subordinate(b)
}

/// Row band `[d_{i−1}+1, d_i]` and the size `d_i − d_{i−1}` of its square selections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Band {
    pub index: usize,
    pub first_row: usize,
    pub last_row: usize,
    pub size: usize,
}

impl Band {
    pub fn rows(&self) -> std::ops::RangeInclusive<usize> {
        self.first_row..=self.last_row
    }
}

pub fn distinguished_bands(flag_type: &FlagType) -> Vec<Band> {
    (1..=flag_type.depth())
        .map(|i| {
            let lo = flag_type.boundary(i - 1);
            let hi = flag_type.boundary(i);
            Band { index: i, first_row: lo + 1, last_row: hi, size: hi - lo }
        })
        .collect()
}

/// Chains of size at most `k`, plus the maximal chain, in canonical order.
pub fn small_chains(flag_type: &FlagType, k: usize) -> Vec<AdmissibleChain> {
    let seqs = enumerate_sequences(flag_type);
    let mut out = Vec::new();
    for size in 1..=k.min(seqs.len()) {
        for pick in combinations(seqs.len(), size) {
            out.push(AdmissibleChain::new(pick.iter().map(|&i| seqs[i - 1].clone())).unwrap());
        }
    }
    let max = AdmissibleChain::maximal(flag_type);
    if !out.contains(&max) {
        out.push(max);
    }
    out
}
