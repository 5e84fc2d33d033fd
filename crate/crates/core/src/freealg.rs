//! The free algebra on the chart variables `ž_v` and the minor inverses `w̌_k`,
//! its localization rewrite rules, commutatization and lifting.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::exactring::{fmt_rational, Expr, LocalizedElement, MasterRing, MinorId, Monomial, Polynomial, Rational};

/// Generator id: chart variables first (registry order), then one `w̌_k` per
/// minor of the table.
pub type GenId = u32;

/// A word in the generators, ordered by length and then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub SmallVec<[GenId; 8]>);

impl Word {
    pub fn empty() -> Self {
        Word(SmallVec::new())
    }

    pub fn from_slice(ids: &[GenId]) -> Self {
        Word(SmallVec::from_slice(ids))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[GenId] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        out.extend_from_slice(&other.0);
        Word(out)
    }

    /// Leftmost position where `pat` occurs as a subword.
    pub fn find(&self, pat: &Word) -> Option<usize> {
        if pat.len() > self.len() {
            return None;
        }
        (0..=self.len() - pat.len()).find(|&i| self.0[i..i + pat.len()] == pat.0[..])
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Where the `w̌` factors go when a commutative term is written as a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LiftConvention {
    /// `w̌` factors first (ascending minor id), then `ž` factors (ascending).
    #[default]
    InverseFirst,
    /// `ž` factors first, then `w̌` factors.
    InverseLast,
}

impl LiftConvention {
    pub fn name(self) -> &'static str {
        match self {
            LiftConvention::InverseFirst => "inverse-first",
            LiftConvention::InverseLast => "inverse-last",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "inverse-first" => Ok(LiftConvention::InverseFirst),
            "inverse-last" => Ok(LiftConvention::InverseLast),
            _ => Err(Error::Parse(format!("unknown lift convention `{s}`"))),
        }
    }
}

/// An element of the free algebra over ℚ.
#[derive(Clone)]
pub struct NCPolynomial {
    ring: Arc<MasterRing>,
    terms: BTreeMap<Word, Rational>,
}

fn gen_name(ring: &MasterRing, g: GenId) -> String {
    let v = g as usize;
    let nz = ring.var_count();
    if v < nz {
        ring.registry().name(v).to_string()
    } else {
        MinorId(v - nz).name()
    }
}

/// Parses a generator name (`z13`, `w2`) into its id.
pub fn gen_id(ring: &MasterRing, name: &str) -> Option<GenId> {
    if let Some(v) = ring.registry().index_of(name) {
        return Some(v as GenId);
    }
    ring.minor_id_by_name(name).map(|k| (ring.var_count() + k.0) as GenId)
}

impl NCPolynomial {
    pub fn zero(ring: &Arc<MasterRing>) -> Self {
        NCPolynomial { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Arc<MasterRing>) -> Self {
        Self::constant(ring, Rational::one())
    }

    pub fn constant(ring: &Arc<MasterRing>, c: Rational) -> Self {
        Self::monomial(ring, Word::empty(), c)
    }

    pub fn monomial(ring: &Arc<MasterRing>, w: Word, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        NCPolynomial { ring: ring.clone(), terms }
    }

    /// `ž_v`.
    pub fn z(ring: &Arc<MasterRing>, v: usize) -> Self {
        assert!(v < ring.var_count());
        Self::monomial(ring, Word::from_slice(&[v as GenId]), Rational::one())
    }

    /// `w̌_k`.
    pub fn w(ring: &Arc<MasterRing>, k: MinorId) -> Self {
        assert!(k.0 < ring.minor_count());
        Self::monomial(ring, Word::from_slice(&[(ring.var_count() + k.0) as GenId]), Rational::one())
    }

    /// Parses a noncommutative expression: products keep their written order.
    pub fn parse(ring: &Arc<MasterRing>, text: &str) -> Result<Self> {
        eval_nc(&crate::exactring::parse_expr(text)?, ring)
    }

    pub fn ring(&self) -> &Arc<MasterRing> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in decreasing word order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn leading_term(&self) -> Option<(&Word, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn gen_name(&self, g: GenId) -> String {
        gen_name(&self.ring, g)
    }

    pub fn word_names(&self, w: &Word) -> Vec<String> {
        w.letters().iter().map(|&g| gen_name(&self.ring, g)).collect()
    }

    fn add_term(&mut self, w: Word, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring.flag_type() == other.ring.flag_type() {
            Ok(())
        } else {
            Err(Error::RegistryMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = NCPolynomial::zero(&self.ring);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.concat(b), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return NCPolynomial::zero(&self.ring);
        }
        NCPolynomial { ring: self.ring.clone(), terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(NCPolynomial::one(&self.ring), |acc, _| &acc * self)
    }

    /// The commutatization `π₀`: words become commutative monomials and each
    /// `w̌_k` the inverse of minor `k`.
    pub fn commutatize(&self) -> LocalizedElement {
        let ring = &self.ring;
        let nz = ring.var_count();
        let reg = ring.registry();
        let parts = self.terms.iter().map(|(w, c)| {
            let mut exps = vec![0u32; nz];
            let mut den: BTreeMap<usize, u32> = BTreeMap::new();
            for &g in w.letters() {
                let g = g as usize;
                if g < nz {
                    exps[g] += 1;
                } else {
                    *den.entry(g - nz).or_insert(0) += 1;
                }
            }
            let num = Polynomial::from_terms(reg, [(Monomial::from_exponents(&exps), c.clone())]);
            ring.element(num, den.into_iter().map(|(k, e)| (MinorId(k), e))).expect("table minors")
        });
        ring.sum(parts.collect::<Vec<_>>())
    }

    /// Applies a substitution `ž_v ↦ images[v]` (`w̌` letters are kept).
    pub fn substitute_z(&self, images: &[NCPolynomial]) -> Result<Self> {
        let nz = self.ring.var_count();
        let mut out = NCPolynomial::zero(&self.ring);
        for (w, c) in &self.terms {
            let mut t = NCPolynomial::constant(&self.ring, c.clone());
            for &g in w.letters() {
                let f = if (g as usize) < nz {
                    images
                        .get(g as usize)
                        .cloned()
                        .ok_or_else(|| Error::MissingAssignment(self.ring.registry().name(g as usize).to_string()))?
                } else {
                    NCPolynomial::monomial(&self.ring, Word::from_slice(&[g]), Rational::one())
                };
                t = t.checked_mul(&f)?;
            }
            out = out.checked_add(&t)?;
        }
        Ok(out)
    }
}

impl PartialEq for NCPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.ring.flag_type() == other.ring.flag_type() && self.terms == other.terms
    }
}

impl Eq for NCPolynomial {}

impl Hash for NCPolynomial {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl PartialOrd for NCPolynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NCPolynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.terms.iter().rev().cmp(other.terms.iter().rev())
    }
}

macro_rules! nc_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&NCPolynomial> for &NCPolynomial {
            type Output = NCPolynomial;
            fn $method(self, rhs: &NCPolynomial) -> NCPolynomial {
                self.$checked(rhs).expect("noncommutative polynomials over different rings")
            }
        }
        impl $tr<NCPolynomial> for NCPolynomial {
            type Output = NCPolynomial;
            fn $method(self, rhs: NCPolynomial) -> NCPolynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

nc_binop!(Add, add, checked_add);
nc_binop!(Sub, sub, checked_sub);
nc_binop!(Mul, mul, checked_mul);

impl Neg for &NCPolynomial {
    type Output = NCPolynomial;
    fn neg(self) -> NCPolynomial {
        self.scale(&-Rational::one())
    }
}

impl Neg for NCPolynomial {
    type Output = NCPolynomial;
    fn neg(self) -> NCPolynomial {
        -&self
    }
}

impl fmt::Display for NCPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms().enumerate() {
            let neg = c < &Rational::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let names = self.word_names(w).join("*");
            if w.is_empty() {
                write!(f, "{}", fmt_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{names}")?;
            } else {
                write!(f, "{}*{names}", fmt_rational(&a))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for NCPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn eval_nc(e: &Expr, ring: &Arc<MasterRing>) -> Result<NCPolynomial> {
    Ok(match e {
        Expr::Num(c) => NCPolynomial::constant(ring, c.clone()),
        Expr::Var(name) => {
            let g = gen_id(ring, name).ok_or_else(|| Error::Parse(format!("unknown generator `{name}`")))?;
            NCPolynomial::monomial(ring, Word::from_slice(&[g]), Rational::one())
        }
        Expr::Neg(a) => -eval_nc(a, ring)?,
        Expr::Add(a, b) => eval_nc(a, ring)?.checked_add(&eval_nc(b, ring)?)?,
        Expr::Sub(a, b) => eval_nc(a, ring)?.checked_sub(&eval_nc(b, ring)?)?,
        Expr::Mul(a, b) => eval_nc(a, ring)?.checked_mul(&eval_nc(b, ring)?)?,
        Expr::Div(a, b) => {
            let d = eval_nc(b, ring)?;
            match d.leading_term() {
                Some((w, c)) if w.is_empty() && d.len() == 1 => eval_nc(a, ring)?.scale(&(Rational::one() / c)),
                None => return Err(Error::DivisionByZero),
                _ => return Err(Error::InvalidInput("noncommutative division by a non-constant".into())),
            }
        }
        Expr::Pow(a, k) => {
            if *k < 0 {
                return Err(Error::InvalidInput("negative exponent in a noncommutative expression".into()));
            }
            eval_nc(a, ring)?.pow(*k as u32)
        }
    })
}

/// Writes a master-ring element as a noncommutative polynomial with
/// `π₀(lift(e)) = e`.
///
/// Minors that are monomials are cancelled against each numerator term
/// separately, so `z14 - z23⁻¹·z13·z24` lifts to `ž14 - w̌·ž13·ž24`; the
/// remaining inverses multiply every term.
pub fn lift(e: &LocalizedElement, convention: LiftConvention) -> NCPolynomial {
    let ring = e.ring();
    let nz = ring.var_count();
    let den: Vec<(MinorId, u32)> = e.denominator().collect();
    let mut out = NCPolynomial::zero(ring);
    for (m, c) in e.numerator().terms() {
        let mut exps: Vec<u32> = m.exponents().to_vec();
        exps.resize(nz, 0);
        let mut ws: Vec<GenId> = Vec::new();
        for &(k, mut times) in &den {
            let minor = ring.minor_poly(k);
            if minor.len() == 1 {
                let (mono, _) = minor.leading_term().expect("nonzero minor");
                let me = mono.exponents();
                while times > 0 && me.iter().enumerate().all(|(v, &x)| exps.get(v).copied().unwrap_or(0) >= x) {
                    for (v, &x) in me.iter().enumerate() {
                        exps[v] -= x;
                    }
                    times -= 1;
                }
            }
            ws.extend(std::iter::repeat_n((nz + k.0) as GenId, times as usize));
        }
        let zs: Vec<GenId> =
            exps.iter().enumerate().flat_map(|(v, &x)| std::iter::repeat_n(v as GenId, x as usize)).collect();
        let letters: Vec<GenId> = match convention {
            LiftConvention::InverseFirst => ws.iter().chain(&zs).copied().collect(),
            LiftConvention::InverseLast => zs.iter().chain(&ws).copied().collect(),
        };
        out.add_term(Word::from_slice(&letters), c.clone());
    }
    out
}

/// A one-way rule `lhs → rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub minor: MinorId,
    pub lhs: Word,
    pub rhs: NCPolynomial,
}

/// Orientations of `w̌_k·m̌_k − 1` and `m̌_k·w̌_k − 1` at their leading words.
/// Overlaps are not resolved, so normal forms need not be unique.
#[derive(Debug, Clone)]
pub struct RewriteSystem {
    ring: Arc<MasterRing>,
    rules: Vec<Rule>,
}

/// Outcome of [`nc_equal`]. `Equal` and `Distinct` are always correct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EqualityVerdict {
    Equal,
    Distinct,
    Unknown,
}

impl EqualityVerdict {
    pub fn name(self) -> &'static str {
        match self {
            EqualityVerdict::Equal => "equal",
            EqualityVerdict::Distinct => "distinct",
            EqualityVerdict::Unknown => "unknown",
        }
    }
}

/// The lift of minor `k` under the default convention.
pub fn lifted_minor(ring: &Arc<MasterRing>, k: MinorId) -> NCPolynomial {
    lift(&ring.minor_element(k), LiftConvention::InverseFirst)
}

pub fn localization_rules(ring: &Arc<MasterRing>, minors: &[MinorId]) -> RewriteSystem {
    let mut rules = Vec::with_capacity(2 * minors.len());
    for &k in minors {
        let m = lifted_minor(ring, k);
        let (lm, c) = m.leading_term().map(|(w, c)| (w.clone(), c.clone())).expect("nonzero minor");
        let rest = &m - &NCPolynomial::monomial(ring, lm.clone(), c.clone());
        let w = NCPolynomial::w(ring, k);
        let inv_c = Rational::one() / &c;
        let wg = (ring.var_count() + k.0) as GenId;
        let one = NCPolynomial::one(ring);
        // w·lm → (1 − w·rest)/c and lm·w → (1 − rest·w)/c
        rules.push(Rule {
            minor: k,
            lhs: Word::from_slice(&[wg]).concat(&lm),
            rhs: (&one - &(&w * &rest)).scale(&inv_c),
        });
        rules.push(Rule {
            minor: k,
            lhs: lm.concat(&Word::from_slice(&[wg])),
            rhs: (&one - &(&rest * &w)).scale(&inv_c),
        });
    }
    RewriteSystem { ring: ring.clone(), rules }
}

impl RewriteSystem {
    /// Rules for every minor of the table.
    pub fn for_ring(ring: &Arc<MasterRing>) -> Self {
        let ids: Vec<MinorId> = (0..ring.minor_count()).map(MinorId).collect();
        localization_rules(ring, &ids)
    }

    pub fn ring(&self) -> &Arc<MasterRing> {
        &self.ring
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    fn find_redex(&self, w: &Word) -> Option<(usize, &Rule)> {
        for i in 0..w.len() {
            for r in &self.rules {
                let l = r.lhs.len();
                if i + l <= w.len() && w.0[i..i + l] == r.lhs.0[..] {
                    return Some((i, r));
                }
            }
        }
        None
    }

    /// Normal form together with the number of rule applications.
    pub fn reduce_counted(&self, a: &NCPolynomial) -> (NCPolynomial, usize) {
        let ring = a.ring().clone();
        let mut todo = a.terms.clone();
        let mut done = NCPolynomial::zero(&ring);
        let mut steps = 0;
        // The largest pending word is always processed first; every rule
        // replaces it by strictly smaller words, so this terminates.
        while let Some((w, c)) = todo.pop_last() {
            match self.find_redex(&w) {
                None => done.add_term(w, c),
                Some((i, rule)) => {
                    steps += 1;
                    let prefix = Word::from_slice(&w.0[..i]);
                    let suffix = Word::from_slice(&w.0[i + rule.lhs.len()..]);
                    for (rw, rc) in &rule.rhs.terms {
                        let nw = prefix.concat(rw).concat(&suffix);
                        let nc = &c * rc;
                        match todo.entry(nw) {
                            std::collections::btree_map::Entry::Vacant(e) => {
                                e.insert(nc);
                            }
                            std::collections::btree_map::Entry::Occupied(mut e) => {
                                *e.get_mut() += nc;
                                if e.get().is_zero() {
                                    e.remove();
                                }
                            }
                        }
                    }
                }
            }
        }
        (done, steps)
    }

    pub fn reduce(&self, a: &NCPolynomial) -> NCPolynomial {
        self.reduce_counted(a).0
    }

    /// Whether no rule applies to any term.
    pub fn is_normal(&self, a: &NCPolynomial) -> bool {
        a.terms.keys().all(|w| self.find_redex(w).is_none())
    }
}

pub fn reduce(a: &NCPolynomial, sys: &RewriteSystem) -> NCPolynomial {
    sys.reduce(a)
}

pub fn commutatize(a: &NCPolynomial) -> LocalizedElement {
    a.commutatize()
}

/// Three-valued equality: rewriting to zero proves equality, different
/// commutatizations prove distinctness; anything else is `Unknown`.
pub fn nc_equal(a: &NCPolynomial, b: &NCPolynomial, sys: &RewriteSystem) -> Result<EqualityVerdict> {
    let diff = a.checked_sub(b)?;
    if sys.reduce(&diff).is_zero() {
        return Ok(EqualityVerdict::Equal);
    }
    if !diff.commutatize().is_zero() {
        return Ok(EqualityVerdict::Distinct);
    }
    Ok(EqualityVerdict::Unknown)
}
