use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, Zero};

use super::poly::{det_poly, Polynomial, VariableRegistry};
use super::{fmt_rational, Rational};
use crate::error::{Error, Result};
use crate::flagcomb::{combinations, FlagType};
use crate::par;

/// Index into the minor table (0-based; printed as `w1`, `w2`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MinorId(pub usize);

impl MinorId {
    pub fn name(self) -> String {
        format!("w{}", self.0 + 1)
    }
}

/// One entry of the minor table: a monic non-constant minor polynomial and
/// the first `(level, columns)` selection that produced it.
#[derive(Debug, Clone)]
pub struct MinorEntry {
    pub id: MinorId,
    pub level: usize,
    pub columns: Vec<usize>,
    pub poly: Polynomial,
}

/// How a leading minor of the reference matrix sits in the table.
#[derive(Debug, Clone, PartialEq)]
pub enum MinorRef {
    /// The minor is a nonzero constant.
    Unit(Rational),
    /// `det = scale · table[id]`.
    Minor { id: MinorId, scale: Rational },
}

#[derive(Debug)]
struct MinorTable {
    entries: Vec<MinorEntry>,
    lookup: HashMap<(usize, Vec<usize>), MinorRef>,
}

/// The master ring of a flag type: `ℚ[z_ij]` localized at the leading
/// minors of the reference matrix.
///
/// The chart variables `z_ij` are the entries of the blocked reference matrix
/// to the right of its diagonal blocks, registered row-major. The minor
/// table holds, for every level `j` and every `d_j`-subset `S` of columns,
/// the determinant of rows `1..d_j` and columns `S`; constants are dropped,
/// the rest are made monic and deduplicated. It is computed on first use.
pub struct MasterRing {
    flag_type: FlagType,
    registry: Arc<VariableRegistry>,
    positions: Vec<(usize, usize)>,
    position_index: HashMap<(usize, usize), usize>,
    minors: OnceLock<MinorTable>,
}

impl fmt::Debug for MasterRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MasterRing({})", self.flag_type)
    }
}

fn var_name(i: usize, j: usize) -> String {
    if i < 10 && j < 10 {
        format!("z{i}{j}")
    } else {
        format!("z{i}_{j}")
    }
}

impl MasterRing {
    pub fn new(flag_type: &FlagType) -> Arc<Self> {
        let mut positions = Vec::new();
        for i in 1..=flag_type.top() {
            let band = flag_type.band_of(i);
            for j in flag_type.boundary(band) + 1..=flag_type.n() {
                positions.push((i, j));
            }
        }
        let names = positions.iter().map(|&(i, j)| var_name(i, j)).collect();
        let registry = VariableRegistry::new(names).expect("generated names are unique");
        let position_index = positions.iter().enumerate().map(|(v, &p)| (p, v)).collect();
        Arc::new(MasterRing {
            flag_type: flag_type.clone(),
            registry,
            positions,
            position_index,
            minors: OnceLock::new(),
        })
    }

    pub fn flag_type(&self) -> &FlagType {
        &self.flag_type
    }

    pub fn registry(&self) -> &Arc<VariableRegistry> {
        &self.registry
    }

    pub fn var_count(&self) -> usize {
        self.positions.len()
    }

    /// 1-based `(row, column)` of chart variable `v` in the reference matrix.
    pub fn position(&self, v: usize) -> (usize, usize) {
        self.positions[v]
    }

    pub fn var_at(&self, row: usize, col: usize) -> Option<usize> {
        self.position_index.get(&(row, col)).copied()
    }

    /// Entry `(row, col)` (1-based) of the blocked reference matrix.
    pub fn reference_entry(&self, row: usize, col: usize) -> Polynomial {
        if let Some(v) = self.var_at(row, col) {
            return Polynomial::var(&self.registry, v);
        }
        if row == col {
            Polynomial::one(&self.registry)
        } else {
            Polynomial::zero(&self.registry)
        }
    }

    fn table(&self) -> &MinorTable {
        self.minors.get_or_init(|| self.build_minor_table())
    }

    fn build_minor_table(&self) -> MinorTable {
        let ft = &self.flag_type;
        let mut keys = Vec::new();
        for level in 1..=ft.depth() {
            for cols in combinations(ft.n(), ft.boundary(level)) {
                keys.push((level, cols));
            }
        }
        let dets = par::map(&keys, |(level, cols)| {
            let rows = self.flag_type.boundary(*level);
            let m: Vec<Vec<Polynomial>> =
                (1..=rows).map(|i| cols.iter().map(|&c| self.reference_entry(i, c)).collect()).collect();
            det_poly(&m, &self.registry)
        });
        let mut entries: Vec<MinorEntry> = Vec::new();
        let mut lookup = HashMap::new();
        for ((level, cols), det) in keys.into_iter().zip(dets) {
            assert!(!det.is_zero(), "leading minor {level}:{cols:?} vanishes identically");
            let r = if let Some(c) = det.as_constant() {
                MinorRef::Unit(c)
            } else {
                let (lc, monic) = det.monic();
                let id = match entries.iter().find(|e| e.poly == monic) {
                    Some(e) => e.id,
                    None => {
                        let id = MinorId(entries.len());
                        entries.push(MinorEntry { id, level, columns: cols.clone(), poly: monic });
                        id
                    }
                };
                MinorRef::Minor { id, scale: lc }
            };
            lookup.insert((level, cols), r);
        }
        MinorTable { entries, lookup }
    }

    pub fn minors(&self) -> &[MinorEntry] {
        &self.table().entries
    }

    pub fn minor_count(&self) -> usize {
        self.table().entries.len()
    }

    pub fn minor_poly(&self, id: MinorId) -> &Polynomial {
        &self.table().entries[id.0].poly
    }

    /// The determinant of rows `1..d_level`, columns `cols` (sorted, 1-based).
    pub fn leading_minor(&self, level: usize, cols: &[usize]) -> Option<&MinorRef> {
        self.table().lookup.get(&(level, cols.to_vec()))
    }

    pub fn minor_id_by_name(&self, name: &str) -> Option<MinorId> {
        let k: usize = name.strip_prefix('w')?.parse().ok()?;
        (k >= 1 && k <= self.minor_count()).then(|| MinorId(k - 1))
    }

    pub fn zero(self: &Arc<Self>) -> LocalizedElement {
        LocalizedElement { ring: self.clone(), num: Polynomial::zero(&self.registry), den: BTreeMap::new() }
    }

    pub fn one(self: &Arc<Self>) -> LocalizedElement {
        self.constant(Rational::one())
    }

    pub fn constant(self: &Arc<Self>, c: Rational) -> LocalizedElement {
        LocalizedElement { ring: self.clone(), num: Polynomial::constant(&self.registry, c), den: BTreeMap::new() }
    }

    pub fn var(self: &Arc<Self>, v: usize) -> LocalizedElement {
        LocalizedElement { ring: self.clone(), num: Polynomial::var(&self.registry, v), den: BTreeMap::new() }
    }

    pub fn var_named(self: &Arc<Self>, name: &str) -> Option<LocalizedElement> {
        self.registry.index_of(name).map(|v| self.var(v))
    }

    /// The formal inverse `w_k` of minor `k`.
    pub fn minor_inverse(self: &Arc<Self>, id: MinorId) -> LocalizedElement {
        assert!(id.0 < self.minor_count(), "unknown minor {id:?}");
        LocalizedElement { ring: self.clone(), num: Polynomial::one(&self.registry), den: [(id.0, 1)].into() }
    }

    /// The minor polynomial itself as an element of the ring.
    pub fn minor_element(self: &Arc<Self>, id: MinorId) -> LocalizedElement {
        self.from_poly(self.minor_poly(id).clone()).expect("minor lives over the ring registry")
    }

    pub fn from_poly(self: &Arc<Self>, p: Polynomial) -> Result<LocalizedElement> {
        if !VariableRegistry::same(p.registry(), &self.registry) {
            return Err(Error::RegistryMismatch);
        }
        Ok(LocalizedElement { ring: self.clone(), num: p, den: BTreeMap::new() })
    }

    /// `num / Π w_k^{e_k}`, normalized.
    pub fn element(
        self: &Arc<Self>,
        num: Polynomial,
        den: impl IntoIterator<Item = (MinorId, u32)>,
    ) -> Result<LocalizedElement> {
        if !VariableRegistry::same(num.registry(), &self.registry) {
            return Err(Error::RegistryMismatch);
        }
        let mut d = BTreeMap::new();
        for (id, e) in den {
            if id.0 >= self.minor_count() {
                return Err(Error::InvalidInput(format!("unknown minor id {}", id.0 + 1)));
            }
            if e > 0 {
                *d.entry(id.0).or_insert(0) += e;
            }
        }
        let mut x = LocalizedElement { ring: self.clone(), num, den: d };
        x.normalize();
        Ok(x)
    }

    /// Parses an arithmetic expression over the chart variables and `w_k`.
    pub fn parse(self: &Arc<Self>, text: &str) -> Result<LocalizedElement> {
        super::expr::parse_expr(text)?.eval_in(self)
    }

    fn minor_power(&self, id: usize, e: u32) -> Polynomial {
        self.table().entries[id].poly.pow(e)
    }

    fn same(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b) || (a.flag_type == b.flag_type)
    }

    /// Sum of many elements over one common denominator.
    pub fn sum(self: &Arc<Self>, items: impl IntoIterator<Item = LocalizedElement>) -> LocalizedElement {
        let items: Vec<LocalizedElement> = items.into_iter().filter(|x| !x.is_zero()).collect();
        let mut common: BTreeMap<usize, u32> = BTreeMap::new();
        for x in &items {
            for (&k, &e) in &x.den {
                let slot = common.entry(k).or_insert(0);
                *slot = (*slot).max(e);
            }
        }
        let mut num = Polynomial::zero(&self.registry);
        for x in &items {
            let mut t = x.num.clone();
            for (&k, &e) in &common {
                let have = x.den.get(&k).copied().unwrap_or(0);
                if e > have {
                    t = &t * &self.minor_power(k, e - have);
                }
            }
            num = &num + &t;
        }
        let mut out = LocalizedElement { ring: self.clone(), num, den: common };
        out.normalize();
        out
    }
}

/// An element `p / Π m_k^{e_k}` of the master ring.
///
/// Normalized: a minor is cancelled whenever it divides the numerator
/// exactly, and a zero numerator carries no denominator. Equality is decided
/// by cross-multiplication.
#[derive(Clone)]
pub struct LocalizedElement {
    ring: Arc<MasterRing>,
    num: Polynomial,
    den: BTreeMap<usize, u32>,
}

impl LocalizedElement {
    pub fn ring(&self) -> &Arc<MasterRing> {
        &self.ring
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> impl Iterator<Item = (MinorId, u32)> + '_ {
        self.den.iter().map(|(&k, &e)| (MinorId(k), e))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// A polynomial in the chart variables (no denominator after normalization).
    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let ring = self.ring.clone();
        for (&k, e) in self.den.iter_mut() {
            let m = &ring.table().entries[k].poly;
            while *e > 0 {
                match self.num.div_exact(m).expect("same registry") {
                    Some(q) => {
                        self.num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|_, e| *e > 0);
    }

    /// Re-runs normalization; a no-op on values built through the public API.
    pub fn normalized(&self) -> Self {
        let mut x = self.clone();
        x.normalize();
        x
    }

    fn check(&self, other: &Self) -> Result<()> {
        if MasterRing::same(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RegistryMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.den == other.den {
            let mut out =
                LocalizedElement { ring: self.ring.clone(), num: &self.num + &other.num, den: self.den.clone() };
            out.normalize();
            return Ok(out);
        }
        Ok(self.ring.sum([self.clone(), other.clone()]))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut den = self.den.clone();
        for (&k, &e) in &other.den {
            *den.entry(k).or_insert(0) += e;
        }
        let mut out = LocalizedElement { ring: self.ring.clone(), num: &self.num * &other.num, den };
        out.normalize();
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = LocalizedElement { ring: self.ring.clone(), num: self.num.scale(c), den: self.den.clone() };
        if out.num.is_zero() {
            out.den.clear();
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self^e` for a possibly negative exponent.
    pub fn powi(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.try_inverse()?.pow((-e) as u32))
        }
    }

    fn cross_terms(&self, other: &Self) -> (Polynomial, Polynomial) {
        let mut a = self.num.clone();
        let mut b = other.num.clone();
        let keys: std::collections::BTreeSet<usize> = self.den.keys().chain(other.den.keys()).copied().collect();
        for k in keys {
            let ea = self.den.get(&k).copied().unwrap_or(0);
            let eb = other.den.get(&k).copied().unwrap_or(0);
            if eb > ea {
                a = &a * &self.ring.minor_power(k, eb - ea);
            } else if ea > eb {
                b = &b * &self.ring.minor_power(k, ea - eb);
            }
        }
        (a, b)
    }

    /// Inverse in the master ring. The numerator must be a constant times a
    /// product of table minors.
    pub fn try_inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let ring = &self.ring;
        let mut back = Polynomial::one(ring.registry());
        for (&k, &e) in &self.den {
            back = &back * &ring.minor_power(k, e);
        }
        // Greedy trial division by table minors.
        let mut rem = self.num.clone();
        let mut factors: BTreeMap<usize, u32> = BTreeMap::new();
        'outer: while rem.as_constant().is_none() {
            for (k, entry) in ring.minors().iter().enumerate() {
                if let Some(q) = rem.div_exact(&entry.poly)? {
                    rem = q;
                    *factors.entry(k).or_insert(0) += 1;
                    continue 'outer;
                }
            }
            break;
        }
        if let Some(c) = rem.as_constant() {
            let mut out =
                LocalizedElement { ring: ring.clone(), num: back.scale(&(Rational::one() / c)), den: factors };
            out.normalize();
            return Ok(out);
        }
        // The numerator may be a proper factor of a minor: look for a power of
        // the full minor product that it divides.
        let deg = self.num.degree().unwrap_or(0);
        let all: Polynomial = ring.minors().iter().fold(Polynomial::one(ring.registry()), |acc, m| &acc * &m.poly);
        let mut power = Polynomial::one(ring.registry());
        for k in 1..=deg.max(1) {
            power = &power * &all;
            if let Some(q) = power.div_exact(&self.num)? {
                let den = (0..ring.minor_count()).map(|i| (i, k)).collect();
                let mut out = LocalizedElement { ring: ring.clone(), num: &q * &back, den };
                out.normalize();
                return Ok(out);
            }
        }
        Err(Error::NotAUnit(self.to_string()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.try_inverse()?)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        let mut den = Rational::one();
        for (&k, &e) in &self.den {
            let v = self.ring.minor_poly(MinorId(k)).evaluate(point)?;
            if v.is_zero() {
                return Err(Error::DenominatorVanishes(k + 1));
            }
            den *= num_traits::pow(v, e as usize);
        }
        Ok(self.num.evaluate(point)? / den)
    }

    /// Ring homomorphism image under `z_v ↦ assignment[v]`.
    pub fn substitute(&self, assignment: &[LocalizedElement]) -> Result<Self> {
        let target = assignment.first().map(|x| x.ring.clone()).unwrap_or_else(|| self.ring.clone());
        let lookup = |v: usize| assignment.get(v).cloned();
        let mut out = substitute_poly(&self.num, &target, &lookup)?;
        for (&k, &e) in &self.den {
            let m = substitute_poly(self.ring.minor_poly(MinorId(k)), &target, &lookup)?;
            out = out.checked_mul(&m.try_inverse()?.pow(e))?;
        }
        Ok(out)
    }
}

/// Evaluates `p` at master-ring values: `x_v ↦ assignment(v)`.
pub(crate) fn substitute_poly(
    p: &Polynomial,
    target: &Arc<MasterRing>,
    assignment: &dyn Fn(usize) -> Option<LocalizedElement>,
) -> Result<LocalizedElement> {
    let reg = p.registry();
    let mut powers: HashMap<(usize, u32), LocalizedElement> = HashMap::new();
    let mut values: HashMap<usize, LocalizedElement> = HashMap::new();
    for v in p.occurring_vars() {
        let x = assignment(v).ok_or_else(|| Error::MissingAssignment(reg.name(v).to_string()))?;
        if !MasterRing::same(&x.ring, target) {
            return Err(Error::RegistryMismatch);
        }
        values.insert(v, x);
    }
    let mut terms = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        let mut t = target.constant(c.clone());
        for (v, &e) in m.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let pw = powers.entry((v, e)).or_insert_with(|| values[&v].pow(e)).clone();
            t = &t * &pw;
        }
        terms.push(t);
    }
    Ok(target.sum(terms))
}

impl MasterRing {
    /// Image of a polynomial (over any registry) under `var ↦ assignment[var]`.
    pub fn substitute(
        self: &Arc<Self>,
        p: &Polynomial,
        assignment: &[Option<LocalizedElement>],
    ) -> Result<LocalizedElement> {
        substitute_poly(p, self, &|v| assignment.get(v).cloned().flatten())
    }
}

impl PartialEq for LocalizedElement {
    fn eq(&self, other: &Self) -> bool {
        if !MasterRing::same(&self.ring, &other.ring) {
            return false;
        }
        if self.den == other.den {
            return self.num == other.num;
        }
        let (a, b) = self.cross_terms(other);
        a == b
    }
}

macro_rules! loc_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&LocalizedElement> for &LocalizedElement {
            type Output = LocalizedElement;
            fn $method(self, rhs: &LocalizedElement) -> LocalizedElement {
                self.$checked(rhs).expect("elements of different master rings")
            }
        }
        impl $tr<LocalizedElement> for LocalizedElement {
            type Output = LocalizedElement;
            fn $method(self, rhs: LocalizedElement) -> LocalizedElement {
                (&self).$method(&rhs)
            }
        }
    };
}

loc_binop!(Add, add, checked_add);
loc_binop!(Sub, sub, checked_sub);
loc_binop!(Mul, mul, checked_mul);

impl Neg for &LocalizedElement {
    type Output = LocalizedElement;
    fn neg(self) -> LocalizedElement {
        self.scale(&-Rational::one())
    }
}

impl Neg for LocalizedElement {
    type Output = LocalizedElement;
    fn neg(self) -> LocalizedElement {
        -&self
    }
}

impl fmt::Display for LocalizedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let ws: Vec<String> = self
            .den
            .iter()
            .map(|(&k, &e)| if e == 1 { MinorId(k).name() } else { format!("{}^{e}", MinorId(k).name()) })
            .collect();
        if self.num.len() == 1 {
            // Single term: sign and coefficient in front, then inverses, then the monomial.
            let (m, c) = self.num.leading_term().expect("one term");
            let sign = if c.is_negative() { "-" } else { "" };
            let abs = c.abs();
            let mut parts = Vec::new();
            if !abs.is_one() {
                parts.push(fmt_rational(&abs));
            }
            parts.extend(ws);
            if !m.is_one() {
                parts.push(Polynomial::from_terms(self.num.registry(), [(m.clone(), Rational::one())]).to_string());
            }
            write!(f, "{sign}{}", parts.join("*"))
        } else {
            write!(f, "{}*({})", ws.join("*"), self.num)
        }
    }
}

impl fmt::Debug for LocalizedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Determinant over the master ring: cofactor expansion up to 3×3; larger
/// matrices are cleared of denominators row by row and passed to Bareiss.
pub fn det_localized(ring: &Arc<MasterRing>, m: &[Vec<LocalizedElement>]) -> LocalizedElement {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "determinant of a non-square matrix");
    match n {
        0 => ring.one(),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        3 => {
            let minor = |a: usize, b: usize, c: usize, d: usize| &(&m[1][a] * &m[2][b]) - &(&m[1][c] * &m[2][d]);
            ring.sum([&m[0][0] * &minor(1, 2, 2, 1), -(&m[0][1] * &minor(0, 2, 2, 0)), &m[0][2] * &minor(0, 1, 1, 0)])
        }
        _ => {
            let mut total_den: BTreeMap<usize, u32> = BTreeMap::new();
            let mut rows = Vec::with_capacity(n);
            for row in m {
                let mut common: BTreeMap<usize, u32> = BTreeMap::new();
                for x in row {
                    for (&k, &e) in &x.den {
                        let s = common.entry(k).or_insert(0);
                        *s = (*s).max(e);
                    }
                }
                let prow: Vec<Polynomial> = row
                    .iter()
                    .map(|x| {
                        let mut t = x.num.clone();
                        for (&k, &e) in &common {
                            let have = x.den.get(&k).copied().unwrap_or(0);
                            if e > have {
                                t = &t * &ring.minor_power(k, e - have);
                            }
                        }
                        t
                    })
                    .collect();
                for (k, e) in common {
                    *total_den.entry(k).or_insert(0) += e;
                }
                rows.push(prow);
            }
            let d = det_poly(&rows, ring.registry());
            let mut out = LocalizedElement { ring: ring.clone(), num: d, den: total_den };
            out.normalize();
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactring::{ratio, rational};
    use proptest::prelude::*;

    fn gr24() -> Arc<MasterRing> {
        MasterRing::new(&FlagType::grassmannian(2, 4).unwrap())
    }

    #[test]
    fn gr24_registry_and_minors() {
        let r = gr24();
        assert_eq!(r.registry().names(), ["z13", "z14", "z23", "z24"]);
        let polys: Vec<String> = r.minors().iter().map(|m| m.poly.to_string()).collect();
        assert_eq!(polys, ["z23", "z24", "z13", "z14", "z13*z24 - z14*z23"]);
        assert_eq!(r.leading_minor(1, &[1, 2]), Some(&MinorRef::Unit(rational(1))));
        assert_eq!(r.leading_minor(1, &[2, 3]), Some(&MinorRef::Minor { id: MinorId(2), scale: rational(-1) }));
    }

    #[test]
    fn fl123_minors() {
        let r = MasterRing::new(&FlagType::new(vec![1, 2], 3).unwrap());
        assert_eq!(r.registry().names(), ["z12", "z13", "z23"]);
        let polys: Vec<String> = r.minors().iter().map(|m| m.poly.to_string()).collect();
        assert_eq!(polys, ["z12", "z13", "z23", "z12*z23 - z13"]);
    }

    #[test]
    fn unit_cancellation() {
        let r = gr24();
        let x = &r.parse("z23^-1").unwrap() * &r.parse("z23").unwrap();
        assert!(x.is_one());
    }

    #[test]
    fn cross_multiplied_sum() {
        let r = gr24();
        let a = &r.parse("z23^-1*z13").unwrap() * &r.parse("z24").unwrap();
        let b = r.parse("z14 - z23^-1*z13*z24").unwrap();
        assert_eq!(&a + &b, r.parse("z14").unwrap());
        assert!((&a + &b).is_polynomial());
    }

    #[test]
    fn full_minor_cancels() {
        let r = gr24();
        let inv = r.parse("(z13*z24 - z14*z23)^-1").unwrap();
        let x = &(&(&inv * &r.parse("z24").unwrap()) * &r.parse("z13").unwrap())
            - &(&(&inv * &r.parse("z14").unwrap()) * &r.parse("z23").unwrap());
        assert!(x.is_one());
    }

    #[test]
    fn substitution_examples() {
        let r = gr24();
        let z13 = r.registry().index_of("z13").unwrap();
        let target = r.parse("-z23^-1*z13").unwrap();
        let mut asg: Vec<Option<LocalizedElement>> = vec![None; 4];
        asg[z13] = Some(target.clone());
        let p = r.registry();
        assert_eq!(r.substitute(&Polynomial::var(p, z13), &asg).unwrap(), target);
        let minor = r.parse("z13*z24 - z14*z23").unwrap();
        let ident: Vec<LocalizedElement> = (0..4).map(|v| r.var(v)).collect();
        assert_eq!(minor.substitute(&ident).unwrap(), minor);
        let missing = r.substitute(minor.numerator(), &asg).unwrap_err();
        assert!(matches!(missing, Error::MissingAssignment(_)));
    }

    #[test]
    fn evaluation_examples() {
        let r = gr24();
        let point = [rational(1), rational(2), rational(3), rational(5)];
        assert_eq!(
            r.parse("z23^-1").unwrap().evaluate(&[rational(0), rational(0), rational(2), rational(0)]).unwrap(),
            ratio(1, 2)
        );
        let ones = [rational(1), rational(1), rational(1), rational(1)];
        assert_eq!(r.parse("(z13*z24 - z14*z23)^-1").unwrap().evaluate(&ones), Err(Error::DenominatorVanishes(5)));
        assert_eq!(r.parse("z14 - z23^-1*z13*z24").unwrap().evaluate(&point).unwrap(), ratio(1, 3));
    }

    #[test]
    fn inverse_of_non_unit_fails() {
        let r = gr24();
        assert!(matches!(r.parse("z13 + 1").unwrap().try_inverse(), Err(Error::NotAUnit(_))));
        assert_eq!(r.zero().try_inverse().unwrap_err(), Error::DivisionByZero);
        let u = r.parse("-3*z13^2*(z13*z24 - z14*z23)*z23^-4").unwrap();
        assert!((&u * &u.try_inverse().unwrap()).is_one());
    }

    #[test]
    fn det_routes_agree() {
        let r = gr24();
        let m: Vec<Vec<LocalizedElement>> = [
            ["z13", "w1", "1", "z14"],
            ["z23^-1*z24", "z13", "0", "2"],
            ["1", "z24", "w5*z13", "z23"],
            ["z14", "0", "1", "w2"],
        ]
        .iter()
        .map(|row| row.iter().map(|s| r.parse(s).unwrap()).collect())
        .collect();
        let mut lap = Vec::new();
        for c in 0..4 {
            let sub: Vec<Vec<LocalizedElement>> =
                (1..4).map(|i| (0..4).filter(|&j| j != c).map(|j| m[i][j].clone()).collect()).collect();
            let t = &m[0][c] * &det_localized(&r, &sub);
            lap.push(if c % 2 == 0 { t } else { -t });
        }
        assert_eq!(det_localized(&r, &m), r.sum(lap));
    }

    fn arb_element() -> impl Strategy<Value = (Vec<(Vec<u32>, i64)>, Vec<u32>)> {
        (prop::collection::vec((prop::collection::vec(0u32..3, 4), -4i64..5), 0..4), prop::collection::vec(0u32..2, 5))
    }

    fn build(r: &Arc<MasterRing>, (t, d): &(Vec<(Vec<u32>, i64)>, Vec<u32>)) -> LocalizedElement {
        let num = Polynomial::from_terms(
            r.registry(),
            t.iter().map(|(e, c)| (crate::exactring::Monomial::from_exponents(e), rational(*c))),
        );
        r.element(num, d.iter().enumerate().map(|(k, &e)| (MinorId(k), e))).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn localized_ring_axioms(a in arb_element(), b in arb_element(), c in arb_element()) {
            let r = gr24();
            let (a, b, c) = (build(&r, &a), build(&r, &b), build(&r, &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
        }

        #[test]
        fn normalization_is_idempotent(a in arb_element()) {
            let r = gr24();
            let a = build(&r, &a);
            let once = a.normalized();
            let twice = once.normalized();
            prop_assert_eq!(once.numerator(), twice.numerator());
            prop_assert_eq!(once.denominator().collect::<Vec<_>>(), twice.denominator().collect::<Vec<_>>());
        }

        #[test]
        fn equality_matches_cross_multiplication(a in arb_element(), k in 0usize..5) {
            let r = gr24();
            let a = build(&r, &a);
            // a·m/m written with an explicit extra denominator factor.
            let m = r.minor_element(MinorId(k));
            let b = &(&a * &m) * &r.minor_inverse(MinorId(k));
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(&b, &a);
            let shifted = &a + &r.one();
            prop_assert!(a != shifted);
        }

        #[test]
        fn evaluation_is_a_homomorphism(a in arb_element(), b in arb_element(), p in prop::collection::vec(1i64..7, 4)) {
            let r = gr24();
            let (a, b) = (build(&r, &a), build(&r, &b));
            let point: Vec<Rational> = p.iter().map(|&x| rational(x)).collect();
            if let (Ok(va), Ok(vb)) = (a.evaluate(&point), b.evaluate(&point)) {
                prop_assert_eq!((&a * &b).evaluate(&point).unwrap(), &va * &vb);
                prop_assert_eq!((&a + &b).evaluate(&point).unwrap(), va + vb);
            }
        }
    }
}
