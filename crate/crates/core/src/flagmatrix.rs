//! Matrices over the master ring: the blocked reference matrix, chart
//! matrices, block-LU transitions between charts, cocycle checks and
//! numeric chart coordinates of concrete flags.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactring::{det_localized, LocalizedElement, MasterRing, MinorId, MinorRef, Rational};
use crate::flagcomb::{characteristic_map, enumerate_sequences, AdmissibleChain, AdmissibleSequence, FlagType};
use crate::par;

/// A dense matrix of master-ring elements.
#[derive(Clone)]
pub struct RingMatrix {
    ring: Arc<MasterRing>,
    entries: Vec<Vec<LocalizedElement>>,
}

impl PartialEq for RingMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl RingMatrix {
    pub fn from_rows(ring: &Arc<MasterRing>, entries: Vec<Vec<LocalizedElement>>) -> Result<Self> {
        let cols = entries.first().map_or(0, |r| r.len());
        if entries.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(RingMatrix { ring: ring.clone(), entries })
    }

    pub fn identity(ring: &Arc<MasterRing>, n: usize) -> Self {
        let entries = (0..n).map(|i| (0..n).map(|j| if i == j { ring.one() } else { ring.zero() }).collect()).collect();
        RingMatrix { ring: ring.clone(), entries }
    }

    /// The blocked reference matrix `M_{I₀}(z)`.
    pub fn reference(ring: &Arc<MasterRing>) -> Self {
        let ft = ring.flag_type();
        let entries = (1..=ft.top())
            .map(|i| {
                (1..=ft.n())
                    .map(|j| match ring.var_at(i, j) {
                        Some(v) => ring.var(v),
                        None if i == j => ring.one(),
                        None => ring.zero(),
                    })
                    .collect()
            })
            .collect();
        RingMatrix { ring: ring.clone(), entries }
    }

    pub fn ring(&self) -> &Arc<MasterRing> {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, |r| r.len())
    }

    /// Entry at 1-based `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &LocalizedElement {
        &self.entries[i - 1][j - 1]
    }

    pub fn entries(&self) -> &[Vec<LocalizedElement>] {
        &self.entries
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        let entries = self
            .entries
            .iter()
            .map(|row| {
                (0..other.cols())
                    .map(|j| self.ring.sum(row.iter().enumerate().map(|(k, a)| a * &other.entries[k][j])))
                    .collect()
            })
            .collect();
        Ok(RingMatrix { ring: self.ring.clone(), entries })
    }

    /// Square submatrix on 1-based rows and columns.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<LocalizedElement>> {
        rows.iter().map(|&i| cols.iter().map(|&j| self.entries[i - 1][j - 1].clone()).collect()).collect()
    }

    pub fn det(&self) -> Result<LocalizedElement> {
        if self.rows() != self.cols() {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        Ok(det_localized(&self.ring, &self.entries))
    }

    fn map_rows(&self, f: impl Fn(&[LocalizedElement]) -> Vec<LocalizedElement>) -> Self {
        RingMatrix { ring: self.ring.clone(), entries: self.entries.iter().map(|r| f(r)).collect() }
    }

    /// `M·C_χ` for the characteristic permutation of `seq`.
    pub fn gather(&self, seq: &AdmissibleSequence) -> Self {
        let chi = characteristic_map(seq);
        self.map_rows(|r| chi.gather_columns(r))
    }

    /// `M·C_χ⁻¹` for the characteristic permutation of `seq`.
    pub fn scatter(&self, seq: &AdmissibleSequence) -> Self {
        let chi = characteristic_map(seq);
        self.map_rows(|r| chi.scatter_columns(r))
    }

    /// Identity diagonal blocks and zero blocks below them, for the row and
    /// column bands of the ring's flag type.
    pub fn is_blocked_standard(&self) -> bool {
        let ft = self.ring.flag_type();
        if self.rows() != ft.top() || self.cols() != ft.n() {
            return false;
        }
        for i in 1..=ft.top() {
            let band = ft.band_of(i);
            for j in 1..=ft.boundary(band) {
                let want_one = i == j;
                let x = self.get(i, j);
                if (want_one && !x.is_one()) || (!want_one && !x.is_zero()) {
                    return false;
                }
            }
        }
        true
    }

    /// Entries at the free positions of a blocked matrix, in registry order.
    pub fn free_entries(&self) -> Vec<LocalizedElement> {
        (0..self.ring.var_count())
            .map(|v| {
                let (i, j) = self.ring.position(v);
                self.get(i, j).clone()
            })
            .collect()
    }

    /// Entrywise substitution of the chart variables.
    pub fn substitute(&self, assignment: &[LocalizedElement]) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|r| r.iter().map(|x| x.substitute(assignment)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(RingMatrix { ring: self.ring.clone(), entries })
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<NumericFlagMatrix> {
        let rows = self
            .entries
            .iter()
            .map(|r| r.iter().map(|x| x.evaluate(point)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(NumericFlagMatrix { rows })
    }
}

impl fmt::Display for RingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for RingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub fn reference_matrix(flag_type: &FlagType) -> RingMatrix {
    RingMatrix::reference(&MasterRing::new(flag_type))
}

/// Determinant of the rows of `band` (1-based) and the given columns.
pub fn distinguished_minor(m: &RingMatrix, band: usize, cols: &[usize]) -> Result<LocalizedElement> {
    let ft = m.ring().flag_type();
    if band == 0 || band > ft.depth() {
        return Err(Error::Shape(format!("band {band} out of range")));
    }
    let rows: Vec<usize> = (ft.boundary(band - 1) + 1..=ft.boundary(band)).collect();
    square_minor(m, &rows, cols)
}

/// Determinant of rows `1..d_level` and the given columns.
pub fn leading_minor(m: &RingMatrix, level: usize, cols: &[usize]) -> Result<LocalizedElement> {
    let ft = m.ring().flag_type();
    if level == 0 || level > ft.depth() {
        return Err(Error::Shape(format!("level {level} out of range")));
    }
    let rows: Vec<usize> = (1..=ft.boundary(level)).collect();
    square_minor(m, &rows, cols)
}

fn square_minor(m: &RingMatrix, rows: &[usize], cols: &[usize]) -> Result<LocalizedElement> {
    if rows.len() != cols.len() {
        return Err(Error::Shape(format!("{} rows but {} columns selected", rows.len(), cols.len())));
    }
    if cols.iter().any(|&c| c == 0 || c > m.cols()) {
        return Err(Error::Shape(format!("column out of range in {cols:?}")));
    }
    Ok(det_localized(m.ring(), &m.submatrix(rows, cols)))
}

/// Minor ids that must be inverted to reach every chart of `chain` from the
/// reference chart, deduplicated and without units.
pub fn localization_set(ring: &MasterRing, chain: &AdmissibleChain) -> Vec<MinorId> {
    let mut out = BTreeSet::new();
    for seq in chain.sequences() {
        for level in 1..=ring.flag_type().depth() {
            if let Some(MinorRef::Minor { id, .. }) = ring.leading_minor(level, &seq.subset(level)) {
                out.insert(*id);
            }
        }
    }
    out.into_iter().collect()
}

/// The change of charts `I → J`.
#[derive(Debug, Clone)]
pub struct Transition {
    pub from: AdmissibleSequence,
    pub to: AdmissibleSequence,
    /// Block-lower-triangular `d_r×d_r` factor.
    pub c: RingMatrix,
    /// `C·M_I` before the column exchange by `χ_J`.
    pub result: RingMatrix,
    /// Chart-`J` coordinates as elements over the chart-`I` variables, in
    /// registry order. This is the substitution `R_J → R_I[S⁻¹]`.
    pub coordinates: Vec<LocalizedElement>,
}

fn invert_block(ring: &Arc<MasterRing>, b: &[Vec<LocalizedElement>]) -> Result<Vec<Vec<LocalizedElement>>> {
    let n = b.len();
    let det_inv = det_localized(ring, b).try_inverse()?;
    if n == 1 {
        return Ok(vec![vec![det_inv]]);
    }
    let mut inv = vec![vec![ring.zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let sub: Vec<Vec<LocalizedElement>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| b[r][c].clone()).collect())
                .collect();
            let cof = det_localized(ring, &sub);
            let cof = if (i + j) % 2 == 1 { -cof } else { cof };
            inv[i][j] = &cof * &det_inv;
        }
    }
    Ok(inv)
}

/// Block elimination bringing `m·C_χJ` to blocked standard form. Returns
/// the factor `C` and `C·m`.
pub fn block_lu(m: &RingMatrix, to: &AdmissibleSequence) -> Result<(RingMatrix, RingMatrix)> {
    let ring = m.ring().clone();
    let ft = ring.flag_type().clone();
    let n = ft.n();
    let top = ft.top();
    if m.rows() != top || m.cols() != n {
        return Err(Error::Shape(format!("expected a {top}x{n} chart matrix")));
    }
    let chi = characteristic_map(to);
    // Work on the augmented rows [m·C_χ | C].
    let mut rows: Vec<Vec<LocalizedElement>> = m
        .entries()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = chi.gather_columns(r);
            row.extend((0..top).map(|j| if i == j { ring.one() } else { ring.zero() }));
            row
        })
        .collect();
    for k in 1..=ft.depth() {
        let lo = ft.boundary(k - 1);
        let hi = ft.boundary(k);
        let pivot: Vec<Vec<LocalizedElement>> = (lo..hi).map(|i| rows[i][lo..hi].to_vec()).collect();
        let inv = invert_block(&ring, &pivot)?;
        let band: Vec<Vec<LocalizedElement>> = (0..hi - lo)
            .map(|a| (0..n + top).map(|c| ring.sum((0..hi - lo).map(|b| &inv[a][b] * &rows[lo + b][c]))).collect())
            .collect();
        for (a, row) in band.into_iter().enumerate() {
            rows[lo + a] = row;
        }
        for i in hi..top {
            let factors: Vec<LocalizedElement> = rows[i][lo..hi].to_vec();
            if factors.iter().all(|f| f.is_zero()) {
                continue;
            }
            let new_row: Vec<LocalizedElement> = (0..n + top)
                .map(|c| {
                    let sub = ring.sum(factors.iter().enumerate().map(|(b, f)| f * &rows[lo + b][c]));
                    &rows[i][c] - &sub
                })
                .collect();
            rows[i] = new_row;
        }
    }
    let c = RingMatrix { ring: ring.clone(), entries: rows.iter().map(|r| r[n..].to_vec()).collect() };
    let blocked = RingMatrix { ring: ring.clone(), entries: rows.iter().map(|r| r[..n].to_vec()).collect() };
    let result = blocked.scatter(to);
    Ok((c, result))
}

/// The atlas of one flag type: its master ring and a cache of transitions.
pub struct Atlas {
    ring: Arc<MasterRing>,
    reference: RingMatrix,
    transitions: RwLock<HashMap<(AdmissibleSequence, AdmissibleSequence), Arc<Transition>>>,
}

impl fmt::Debug for Atlas {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Atlas({})", self.ring.flag_type())
    }
}

impl Atlas {
    pub fn new(flag_type: &FlagType) -> Arc<Self> {
        Self::with_ring(MasterRing::new(flag_type))
    }

    pub fn with_ring(ring: Arc<MasterRing>) -> Arc<Self> {
        let reference = RingMatrix::reference(&ring);
        Arc::new(Atlas { ring, reference, transitions: RwLock::new(HashMap::new()) })
    }

    pub fn ring(&self) -> &Arc<MasterRing> {
        &self.ring
    }

    pub fn flag_type(&self) -> &FlagType {
        self.ring.flag_type()
    }

    pub fn sequences(&self) -> Vec<AdmissibleSequence> {
        enumerate_sequences(self.flag_type())
    }

    pub fn reference_matrix(&self) -> &RingMatrix {
        &self.reference
    }

    fn check(&self, seq: &AdmissibleSequence) -> Result<()> {
        if seq.flag_type() != self.flag_type() {
            return Err(Error::IncompatibleFlagTypes(seq.flag_type().to_string(), self.flag_type().to_string()));
        }
        Ok(())
    }

    /// `M_I(x)`: the reference matrix with its columns moved by `χ_I⁻¹`, the
    /// registry variables read as chart-`I` coordinates.
    pub fn chart_matrix(&self, seq: &AdmissibleSequence) -> Result<RingMatrix> {
        self.check(seq)?;
        Ok(self.reference.scatter(seq))
    }

    pub fn transition(&self, from: &AdmissibleSequence, to: &AdmissibleSequence) -> Result<Arc<Transition>> {
        self.check(from)?;
        self.check(to)?;
        let key = (from.clone(), to.clone());
        if let Some(t) = self.transitions.read().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let m = self.chart_matrix(from)?;
        let (c, result) = block_lu(&m, to)?;
        let coordinates = result.gather(to).free_entries();
        let t = Arc::new(Transition { from: from.clone(), to: to.clone(), c, result, coordinates });
        self.transitions.write().unwrap().entry(key).or_insert(t.clone());
        Ok(t)
    }

    /// `C_{I₀;I}·M_{I₀}(z)` and its entries other than the constants 0 and 1.
    pub fn master_realization(&self, seq: &AdmissibleSequence) -> Result<(RingMatrix, Vec<LocalizedElement>)> {
        let t = self.transition(&AdmissibleSequence::reference(self.flag_type()), seq)?;
        let gens = t.result.entries().iter().flatten().filter(|x| !(x.is_zero() || x.is_one())).cloned().collect();
        Ok((t.result.clone(), gens))
    }

    /// Whether `φ_IJ ∘ φ_JK = φ_IK` on every chart-`K` coordinate.
    pub fn verify_cocycle(
        &self,
        i: &AdmissibleSequence,
        j: &AdmissibleSequence,
        k: &AdmissibleSequence,
    ) -> Result<bool> {
        let ij = self.transition(i, j)?;
        let jk = self.transition(j, k)?;
        let ik = self.transition(i, k)?;
        for (u, direct) in jk.coordinates.iter().zip(&ik.coordinates) {
            if &u.substitute(&ij.coordinates)? != direct {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Cocycle check over many triples; returns the failing ones.
    pub fn verify_cocycles(
        &self,
        triples: &[(AdmissibleSequence, AdmissibleSequence, AdmissibleSequence)],
    ) -> Result<Vec<(AdmissibleSequence, AdmissibleSequence, AdmissibleSequence)>> {
        // Warm the transition cache so workers only read.
        let pairs: BTreeSet<(AdmissibleSequence, AdmissibleSequence)> = triples
            .iter()
            .flat_map(|(i, j, k)| [(i.clone(), j.clone()), (j.clone(), k.clone()), (i.clone(), k.clone())])
            .collect();
        let pairs: Vec<_> = pairs.into_iter().collect();
        for r in par::map(&pairs, |(a, b)| self.transition(a, b).map(|_| ())) {
            r?;
        }
        let results = par::map(triples, |(i, j, k)| self.verify_cocycle(i, j, k));
        let mut failing = Vec::new();
        for (t, r) in triples.iter().zip(results) {
            if !r? {
                failing.push(t.clone());
            }
        }
        Ok(failing)
    }
}

/// A `d_r×n` matrix of rationals whose leading row blocks span a flag.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericFlagMatrix {
    pub rows: Vec<Vec<Rational>>,
}

impl NumericFlagMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(NumericFlagMatrix { rows })
    }

    pub fn from_integers(rows: &[&[i64]]) -> Self {
        NumericFlagMatrix {
            rows: rows.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.rows.clone();
        let cols = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
            m.swap(rank, p);
            for i in rank + 1..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let f = &m[i][c] / &m[rank][c];
                for k in c..cols {
                    let d = &f * &m[rank][k];
                    m[i][k] -= d;
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Determinant of a square rational matrix by Gaussian elimination.
pub fn rational_det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Rational::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c].clone();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[c][c];
            for k in c..n {
                let d = &f * &a[c][k];
                a[i][k] -= d;
            }
        }
    }
    det
}

/// Solves `x·a = b` for a row vector `x`, `a` square and invertible.
fn solve_left(a: &[Vec<Rational>], b: &[Rational]) -> Vec<Rational> {
    let n = a.len();
    // Transpose to a·x = b form: aᵀ xᵀ = bᵀ, augmented.
    let mut m: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = (0..n).map(|j| a[j][i].clone()).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero()).expect("invertible system");
        m.swap(p, c);
        let piv = m[c][c].clone();
        for k in c..=n {
            m[c][k] /= piv.clone();
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..=n {
                    let d = &f * &m[c][k];
                    m[i][k] -= d;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n].clone()).collect()
}

/// Chart-`seq` coordinates (registry order) of the flag spanned by the
/// leading row blocks of `m`.
pub fn evaluate_chart_coordinates(m: &NumericFlagMatrix, seq: &AdmissibleSequence) -> Result<Vec<Rational>> {
    let ft = seq.flag_type();
    let (top, n) = (ft.top(), ft.n());
    if m.rows.len() != top || m.rows.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("expected a {top}x{n} matrix")));
    }
    if m.rank() != top {
        return Err(Error::InvalidFlag(format!("rank {} < {top}", m.rank())));
    }
    let chi = characteristic_map(seq);
    let order: Vec<usize> = chi.as_slice().to_vec();
    for level in 1..=ft.depth() {
        let d = ft.boundary(level);
        let cols = seq.subset(level);
        let sub: Vec<Vec<Rational>> =
            (0..d).map(|i| cols.iter().map(|&c| m.rows[i][c - 1].clone()).collect()).collect();
        if rational_det(&sub).is_zero() {
            return Err(Error::OutOfChart(seq.label()));
        }
    }
    // Band-k rows of the normalized matrix are combinations of the first d_k
    // rows of m whose entries at columns χ(1..d_k) are a unit pattern.
    let mut blocked = vec![vec![Rational::zero(); n]; top];
    for k in 1..=ft.depth() {
        let d = ft.boundary(k);
        let a: Vec<Vec<Rational>> =
            (0..d).map(|i| order[..d].iter().map(|&c| m.rows[i][c - 1].clone()).collect()).collect();
        for i in ft.boundary(k - 1)..d {
            let target: Vec<Rational> =
                (0..d).map(|t| if t == i { Rational::one() } else { Rational::zero() }).collect();
            let coef = solve_left(&a, &target);
            for (pos, &c) in order.iter().enumerate() {
                blocked[i][pos] = (0..d).map(|r| &coef[r] * &m.rows[r][c - 1]).sum();
            }
        }
    }
    let layout = MasterRing::new(ft);
    Ok((0..layout.var_count())
        .map(|v| {
            let (i, j) = layout.position(v);
            blocked[i - 1][j - 1].clone()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactring::rational;

    fn gr24() -> Arc<Atlas> {
        Atlas::new(&FlagType::grassmannian(2, 4).unwrap())
    }

    fn seq(a: &Atlas, s: &str) -> AdmissibleSequence {
        AdmissibleSequence::parse(a.flag_type(), s).unwrap()
    }

    fn parse_row(a: &Atlas, cells: &[&str]) -> Vec<LocalizedElement> {
        cells.iter().map(|c| a.ring().parse(c).unwrap()).collect()
    }

    #[test]
    fn reference_matrices() {
        let m = reference_matrix(&FlagType::grassmannian(2, 4).unwrap());
        assert_eq!(m.to_string(), "[1, 0, z13, z14]\n[0, 1, z23, z24]\n");
        let m = reference_matrix(&FlagType::grassmannian(1, 2).unwrap());
        assert_eq!(m.to_string(), "[1, z12]\n");
        let m = reference_matrix(&FlagType::new(vec![1, 2], 3).unwrap());
        assert_eq!(m.to_string(), "[1, z12, z13]\n[0, 1, z23]\n");
    }

    #[test]
    fn band_minors() {
        let a = gr24();
        let m = a.reference_matrix();
        assert_eq!(distinguished_minor(m, 1, &[3, 4]).unwrap(), a.ring().parse("z13*z24 - z14*z23").unwrap());
        assert!(distinguished_minor(m, 1, &[1, 2]).unwrap().is_one());
        assert_eq!(distinguished_minor(m, 1, &[1, 3]).unwrap(), a.ring().parse("z23").unwrap());
        assert!(matches!(distinguished_minor(m, 1, &[1]), Err(Error::Shape(_))));
    }

    #[test]
    fn localization_sets() {
        let a = gr24();
        let max = localization_set(a.ring(), &AdmissibleChain::maximal(a.flag_type()));
        assert_eq!(max.len(), 5);
        let reference = AdmissibleChain::singleton(AdmissibleSequence::reference(a.flag_type()));
        assert!(localization_set(a.ring(), &reference).is_empty());
        let fl = Atlas::new(&FlagType::new(vec![1, 2], 3).unwrap());
        assert_eq!(localization_set(fl.ring(), &AdmissibleChain::maximal(fl.flag_type())).len(), 4);
    }

    #[test]
    fn transition_to_13() {
        let a = gr24();
        let t = a.transition(&seq(&a, "1,2"), &seq(&a, "1,3")).unwrap();
        let want = RingMatrix::from_rows(
            a.ring(),
            vec![parse_row(&a, &["1", "-w1*z13", "0", "z14 - w1*z13*z24"]), parse_row(&a, &["0", "w1", "1", "w1*z24"])],
        )
        .unwrap();
        assert_eq!(t.result, want);
        assert!(t.result.gather(&seq(&a, "1,3")).is_blocked_standard());
    }

    #[test]
    fn transition_to_23_factor() {
        let a = gr24();
        let t = a.transition(&seq(&a, "1,2"), &seq(&a, "2,3")).unwrap();
        let want =
            RingMatrix::from_rows(a.ring(), vec![parse_row(&a, &["-z23/z13", "1"]), parse_row(&a, &["1/z13", "0"])])
                .unwrap();
        assert_eq!(t.c, want);
        let identity = a.transition(&seq(&a, "1,2"), &seq(&a, "1,2")).unwrap();
        assert_eq!(identity.c, RingMatrix::identity(a.ring(), 2));
        assert_eq!(&identity.result, a.reference_matrix());
    }

    #[test]
    fn realization_generators() {
        let a = gr24();
        let (_, g) = a.master_realization(&seq(&a, "3,4")).unwrap();
        let want: Vec<LocalizedElement> = parse_row(&a, &["w5*z24", "-w5*z14", "-w5*z23", "w5*z13"]);
        assert_eq!(g, want);
    }

    #[test]
    fn cocycles_small() {
        let a = gr24();
        let s = a.sequences();
        assert!(a.verify_cocycle(&s[0], &s[1], &s[5]).unwrap());
        assert!(a.verify_cocycle(&s[3], &s[3], &s[3]).unwrap());
        let fl = Atlas::new(&FlagType::new(vec![1, 2], 3).unwrap());
        let t = fl.sequences();
        assert!(fl.verify_cocycle(&t[2], &t[4], &t[1]).unwrap());
    }

    #[test]
    fn numeric_chart_coordinates() {
        let a = gr24();
        let m = NumericFlagMatrix::from_integers(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        assert_eq!(evaluate_chart_coordinates(&m, &seq(&a, "3,4")), Err(Error::OutOfChart("3,4".into())));
        let bad = NumericFlagMatrix::from_integers(&[&[1, 2, 3, 4], &[2, 4, 6, 8]]);
        assert!(matches!(evaluate_chart_coordinates(&bad, &seq(&a, "1,2")), Err(Error::InvalidFlag(_))));
        let m = NumericFlagMatrix::from_integers(&[&[1, 0, 1, 2], &[0, 1, 3, 5]]);
        let point: Vec<Rational> = [1, 2, 3, 5].iter().map(|&x| rational(x)).collect();
        assert_eq!(evaluate_chart_coordinates(&m, &seq(&a, "1,2")).unwrap(), point);
        let t = a.transition(&seq(&a, "1,2"), &seq(&a, "1,3")).unwrap();
        let symbolic: Vec<Rational> = t.coordinates.iter().map(|x| x.evaluate(&point).unwrap()).collect();
        assert_eq!(evaluate_chart_coordinates(&m, &seq(&a, "1,3")).unwrap(), symbolic);
        assert_eq!(symbolic[2], crate::exactring::ratio(1, 3));
    }

    #[test]
    fn blocked_form_for_small_flag_types() {
        for n in 1..=4 {
            for ft in FlagType::all_with_n(n) {
                let a = Atlas::new(&ft);
                for s in a.sequences() {
                    let (m, _) = a.master_realization(&s).unwrap();
                    assert!(m.gather(&s).is_blocked_standard(), "{ft} {s}");
                }
            }
        }
    }
}
