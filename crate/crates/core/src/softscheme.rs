//! Chain-indexed generator systems: the commutative system of chart
//! subrings of the master ring, soft noncommutative flag schemes lifted from
//! it, softenings, closed subschemes and Plücker pullbacks.
//!
//! Subrings and ideals are presented by generator lists only. Chain-level
//! lists are unions over the member charts, computed on demand and memoized.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::exactring::{det_localized, LocalizedElement, MinorId, Polynomial, VariableRegistry};
use crate::flagcomb::{combinations, small_chains, AdmissibleChain, AdmissibleSequence, FlagType};
use crate::flagmatrix::Atlas;
use crate::freealg::{lift, LiftConvention, NCPolynomial};
use crate::par;

type ElementKey = (Polynomial, Vec<(MinorId, u32)>);

fn key(e: &LocalizedElement) -> ElementKey {
    (e.numerator().clone(), e.denominator().collect())
}

fn union_elements<'a>(lists: impl IntoIterator<Item = &'a [LocalizedElement]>) -> Vec<LocalizedElement> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for list in lists {
        for e in list {
            if seen.insert(key(e)) {
                out.push(e.clone());
            }
        }
    }
    out
}

fn union_nc<'a>(lists: impl IntoIterator<Item = &'a [NCPolynomial]>) -> Vec<NCPolynomial> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for list in lists {
        for e in list {
            if seen.insert(e.clone()) {
                out.push(e.clone());
            }
        }
    }
    out
}

fn contains_all<T: PartialEq>(big: &[T], small: &[T]) -> Option<usize> {
    small.iter().position(|x| !big.contains(x))
}

/// `chain ↦ R_chain`, presented by the union of the chart generator sets
/// `G_I` of its members.
pub struct CommutativeSystem {
    atlas: Arc<Atlas>,
    charts: BTreeMap<AdmissibleSequence, Vec<LocalizedElement>>,
    memo: RwLock<HashMap<AdmissibleChain, Arc<Vec<LocalizedElement>>>>,
}

impl fmt::Debug for CommutativeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CommutativeSystem({})", self.atlas.flag_type())
    }
}

impl CommutativeSystem {
    pub fn new(atlas: &Arc<Atlas>) -> Result<Self> {
        let seqs = atlas.sequences();
        let gens = par::map(&seqs, |s| atlas.master_realization(s).map(|(_, g)| g));
        let mut charts = BTreeMap::new();
        for (s, g) in seqs.into_iter().zip(gens) {
            charts.insert(s, g?);
        }
        Ok(CommutativeSystem { atlas: atlas.clone(), charts, memo: RwLock::new(HashMap::new()) })
    }

    pub fn atlas(&self) -> &Arc<Atlas> {
        &self.atlas
    }

    pub fn flag_type(&self) -> &FlagType {
        self.atlas.flag_type()
    }

    /// `G_I` for a maximal chart.
    pub fn chart_generators(&self, seq: &AdmissibleSequence) -> &[LocalizedElement] {
        &self.charts[seq]
    }

    pub fn generators(&self, chain: &AdmissibleChain) -> Arc<Vec<LocalizedElement>> {
        if let Some(g) = self.memo.read().unwrap().get(chain) {
            return g.clone();
        }
        let g = Arc::new(union_elements(chain.sequences().map(|s| self.charts[s].as_slice())));
        self.memo.write().unwrap().entry(chain.clone()).or_insert(g).clone()
    }
}

pub fn build_commutative_system(flag_type: &FlagType) -> Result<CommutativeSystem> {
    CommutativeSystem::new(&Atlas::new(flag_type))
}

/// How the noncommutative generators of a scheme were obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeOrigin {
    /// Each `Ǧ_I` is the lift of `G_I` under one convention.
    Lifted(LiftConvention),
    /// Chartwise union of other schemes.
    Softened(Vec<LiftConvention>),
}

/// `chain ↦ Ř_chain` presented by noncommutative generators, together with
/// the commutative system it lies over.
pub struct SoftScheme {
    system: Arc<CommutativeSystem>,
    origin: SchemeOrigin,
    charts: BTreeMap<AdmissibleSequence, Vec<NCPolynomial>>,
    memo: RwLock<HashMap<AdmissibleChain, Arc<Vec<NCPolynomial>>>>,
}

impl fmt::Debug for SoftScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SoftScheme({}, {:?})", self.flag_type(), self.origin)
    }
}

impl Clone for SoftScheme {
    fn clone(&self) -> Self {
        SoftScheme {
            system: self.system.clone(),
            origin: self.origin.clone(),
            charts: self.charts.clone(),
            memo: RwLock::new(HashMap::new()),
        }
    }
}

impl SoftScheme {
    pub fn lifted(system: &Arc<CommutativeSystem>, convention: LiftConvention) -> Self {
        let seqs: Vec<AdmissibleSequence> = system.charts.keys().cloned().collect();
        let lifted = par::map(&seqs, |s| system.charts[s].iter().map(|g| lift(g, convention)).collect::<Vec<_>>());
        SoftScheme {
            system: system.clone(),
            origin: SchemeOrigin::Lifted(convention),
            charts: seqs.into_iter().zip(lifted).collect(),
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn system(&self) -> &Arc<CommutativeSystem> {
        &self.system
    }

    pub fn atlas(&self) -> &Arc<Atlas> {
        &self.system.atlas
    }

    pub fn flag_type(&self) -> &FlagType {
        self.system.flag_type()
    }

    pub fn origin(&self) -> &SchemeOrigin {
        &self.origin
    }

    /// The convention used for new lifts (subscheme ideals): the first one.
    pub fn convention(&self) -> LiftConvention {
        match &self.origin {
            SchemeOrigin::Lifted(c) => *c,
            SchemeOrigin::Softened(cs) => cs.first().copied().unwrap_or_default(),
        }
    }

    /// `Ǧ_I` for a maximal chart.
    pub fn chart_generators(&self, seq: &AdmissibleSequence) -> &[NCPolynomial] {
        &self.charts[seq]
    }

    pub fn generators(&self, chain: &AdmissibleChain) -> Arc<Vec<NCPolynomial>> {
        if let Some(g) = self.memo.read().unwrap().get(chain) {
            return g.clone();
        }
        let g = Arc::new(union_nc(chain.sequences().map(|s| self.charts[s].as_slice())));
        self.memo.write().unwrap().entry(chain.clone()).or_insert(g).clone()
    }

    /// Replaces one chart generator; the result is no longer a lift. Used to
    /// exercise the verifier.
    pub fn with_replaced_generator(&self, seq: &AdmissibleSequence, index: usize, g: NCPolynomial) -> Self {
        let mut out = self.clone();
        out.charts.get_mut(seq).expect("maximal chart")[index] = g;
        out
    }

    /// Whether every chain's generator list of `other` is contained in ours.
    pub fn softens(&self, other: &SoftScheme) -> bool {
        self.flag_type() == other.flag_type()
            && self.charts.iter().all(|(s, gens)| contains_all(gens, &other.charts[s]).is_none())
    }
}

pub fn build_soft_scheme(flag_type: &FlagType, convention: LiftConvention) -> Result<SoftScheme> {
    Ok(SoftScheme::lifted(&Arc::new(build_commutative_system(flag_type)?), convention))
}

/// Chainwise union of two schemes over the same flag type.
pub fn soften_union(a: &SoftScheme, b: &SoftScheme) -> Result<SoftScheme> {
    if a.flag_type() != b.flag_type() {
        return Err(Error::IncompatibleFlagTypes(a.flag_type().to_string(), b.flag_type().to_string()));
    }
    let conventions = |s: &SoftScheme| match &s.origin {
        SchemeOrigin::Lifted(c) => vec![*c],
        SchemeOrigin::Softened(cs) => cs.clone(),
    };
    let mut cs = conventions(a);
    for c in conventions(b) {
        if !cs.contains(&c) {
            cs.push(c);
        }
    }
    let charts = a.charts.iter().map(|(s, g)| (s.clone(), union_nc([g.as_slice(), b.charts[s].as_slice()]))).collect();
    Ok(SoftScheme {
        system: a.system.clone(),
        origin: SchemeOrigin::Softened(cs),
        charts,
        memo: RwLock::new(HashMap::new()),
    })
}

/// A single failed condition in a verification report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: &'static str,
    pub chain: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct SoftSchemeReport {
    pub chains_checked: usize,
    pub inclusions_checked: usize,
    pub violations: Vec<Violation>,
}

impl SoftSchemeReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const MONOTONICITY: &str = "monotonicity";
pub const COMMUTATIZATION: &str = "commutatization";
pub const COMMUTING_SQUARE: &str = "commuting-square";

/// Checks, over all chains of at most two charts plus the maximal chain:
/// generator monotonicity under inclusion, `π₀(Ǧ_chain) = G_chain`, and
/// `π₀ ∘ ι = ι ∘ π₀` on generators for every inclusion.
///
/// For a directly lifted scheme `π₀` must also be injective on each chain's
/// generators and match chart generators position by position. A softened
/// scheme may carry several lifts of one element, so only set equality of
/// the images is required there.
pub fn verify_soft_scheme(s: &SoftScheme) -> SoftSchemeReport {
    let chains = small_chains(s.flag_type(), 2);
    let mut report = SoftSchemeReport { chains_checked: chains.len(), ..Default::default() };
    let lifted = matches!(s.origin, SchemeOrigin::Lifted(_));

    // (ii) chartwise, then per chain.
    if lifted {
        for (seq, nc) in &s.charts {
            for (i, (g, c)) in nc.iter().zip(s.system.chart_generators(seq)).enumerate() {
                if &g.commutatize() != c {
                    report.violations.push(Violation {
                        condition: COMMUTATIZATION,
                        chain: seq.to_string(),
                        detail: format!("generator {i}: π₀({g}) ≠ {c}"),
                    });
                }
            }
        }
    }
    let images: Vec<Vec<LocalizedElement>> =
        par::map(&chains, |c| s.generators(c).iter().map(|g| g.commutatize()).collect());
    for (chain, img) in chains.iter().zip(&images) {
        let comm = s.system.generators(chain);
        let img_set = union_elements([img.as_slice()]);
        if lifted && img_set.len() != img.len() {
            report.violations.push(Violation {
                condition: COMMUTATIZATION,
                chain: chain.to_string(),
                detail: "π₀ is not injective on the generators".into(),
            });
        }
        let comm_keys: HashSet<ElementKey> = comm.iter().map(key).collect();
        let img_keys: HashSet<ElementKey> = img_set.iter().map(key).collect();
        if comm_keys != img_keys {
            let stray = img_set.iter().find(|e| !comm_keys.contains(&key(e)));
            let missed = comm.iter().find(|e| !img_keys.contains(&key(e)));
            report.violations.push(Violation {
                condition: COMMUTATIZATION,
                chain: chain.to_string(),
                detail: match (stray, missed) {
                    (Some(e), _) => format!("π₀ image {e} is not a generator"),
                    (None, Some(e)) => format!("generator {e} is not hit by π₀"),
                    _ => "image mismatch".into(),
                },
            });
        }
    }

    // (i) and (iii) over inclusions.
    for (a, chain_a) in chains.iter().enumerate() {
        for (b, chain_b) in chains.iter().enumerate() {
            if a == b || !chain_a.is_subchain_of(chain_b) {
                continue;
            }
            report.inclusions_checked += 1;
            let nc_a = s.generators(chain_a);
            let nc_b = s.generators(chain_b);
            let label = format!("{chain_a} ⊆ {chain_b}");
            if let Some(i) = contains_all(&nc_b, &nc_a) {
                report.violations.push(Violation {
                    condition: MONOTONICITY,
                    chain: label.clone(),
                    detail: format!("noncommutative generator {} missing", nc_a[i]),
                });
            }
            let comm_a = s.system.generators(chain_a);
            let comm_b = s.system.generators(chain_b);
            if let Some(i) = contains_all(&comm_b, &comm_a) {
                report.violations.push(Violation {
                    condition: MONOTONICITY,
                    chain: label.clone(),
                    detail: format!("commutative generator {} missing", comm_a[i]),
                });
            }
            // π₀(ι(g)) computed in the larger chain against ι(π₀(g)).
            let img_b_keys: HashSet<ElementKey> = images[b].iter().map(key).collect();
            for (g, pi) in nc_a.iter().zip(&images[a]) {
                let pos = nc_b.iter().position(|h| h == g);
                let ok = match pos {
                    Some(p) => &images[b][p] == pi && img_b_keys.contains(&key(pi)),
                    None => false,
                };
                if !ok {
                    report.violations.push(Violation {
                        condition: COMMUTING_SQUARE,
                        chain: label.clone(),
                        detail: format!("generator {g}"),
                    });
                    break;
                }
            }
        }
    }
    report
}

/// `y0, y1, …` indexed by the `d`-subsets of `{1..n}` in lexicographic order.
pub fn plucker_registry(flag_type: &FlagType) -> Result<Arc<VariableRegistry>> {
    if !flag_type.is_grassmannian() {
        return Err(Error::Unsupported(format!("Plücker coordinates for {flag_type}")));
    }
    let count = combinations(flag_type.n(), flag_type.top()).len();
    VariableRegistry::new((0..count).map(|t| format!("y{t}")).collect())
}

/// The Plücker coordinates of the chart's realization matrix, one per
/// `d`-subset in lexicographic order.
pub fn plucker_slots(atlas: &Atlas, seq: &AdmissibleSequence) -> Result<Vec<LocalizedElement>> {
    let ft = atlas.flag_type();
    if !ft.is_grassmannian() {
        return Err(Error::Unsupported(format!("Plücker coordinates for {ft}")));
    }
    let (m, _) = atlas.master_realization(seq)?;
    let rows: Vec<usize> = (1..=ft.top()).collect();
    Ok(combinations(ft.n(), ft.top())
        .iter()
        .map(|cols| det_localized(atlas.ring(), &m.submatrix(&rows, cols)))
        .collect())
}

/// `f(p_J(C_{I₀;I}·M_{I₀}))` for a form `f` in the Plücker variables.
pub fn plucker_pullback(atlas: &Atlas, f: &Polynomial, seq: &AdmissibleSequence) -> Result<LocalizedElement> {
    let slots = plucker_slots(atlas, seq)?;
    if f.registry().len() != slots.len() {
        return Err(Error::InvalidInput(format!(
            "expected a polynomial in {} Plücker variables, got {}",
            slots.len(),
            f.registry().len()
        )));
    }
    if !f.is_homogeneous() {
        return Err(Error::InvalidInput("Plücker pullback needs a homogeneous polynomial".into()));
    }
    let assignment: Vec<Option<LocalizedElement>> = slots.into_iter().map(Some).collect();
    atlas.ring().substitute(f, &assignment)
}

/// `y0^4 + … + y_{N−1}^4` in the Plücker variables.
pub fn fermat_quartic(flag_type: &FlagType) -> Result<Polynomial> {
    let reg = plucker_registry(flag_type)?;
    Ok((0..reg.len()).fold(Polynomial::zero(&reg), |acc, v| &acc + &Polynomial::var(&reg, v).pow(4)))
}

/// The Plücker quadric `y0*y5 - y1*y4 + y2*y3` of `Gr(2;4)`.
pub fn plucker_quadric() -> Polynomial {
    let reg = plucker_registry(&FlagType::grassmannian(2, 4).expect("valid")).expect("grassmannian");
    crate::exactring::parse_expr("y0*y5 - y1*y4 + y2*y3").expect("literal").eval_poly(&reg).expect("literal")
}

/// Ideal generators of one maximal chart: commutative and lifted.
#[derive(Debug, Clone)]
pub struct ChartIdeal {
    pub commutative: Vec<LocalizedElement>,
    pub lifted: Vec<NCPolynomial>,
}

/// A closed subscheme presented chartwise by ideal generators. Zero
/// generators are dropped.
pub struct SubschemeData {
    charts: BTreeMap<AdmissibleSequence, ChartIdeal>,
    memo: RwLock<HashMap<AdmissibleChain, Arc<(Vec<LocalizedElement>, Vec<NCPolynomial>)>>>,
    flag_type: FlagType,
}

impl fmt::Debug for SubschemeData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubschemeData({}, {} charts)", self.flag_type, self.charts.len())
    }
}

/// Rewrites `e` as a polynomial in the chart-`seq` coordinates and lifts it
/// by sending each coordinate to its noncommutative generator.
fn lift_into_chart(s: &SoftScheme, seq: &AdmissibleSequence, e: &LocalizedElement) -> Result<NCPolynomial> {
    let atlas = s.atlas();
    let ring = atlas.ring();
    let reference = AdmissibleSequence::reference(atlas.flag_type());
    let back = atlas.transition(seq, &reference)?;
    let in_chart = e.substitute(&back.coordinates)?;
    if !in_chart.is_polynomial() {
        return Err(Error::InvalidInput(format!(
            "{e} is not a polynomial in the coordinates of chart {}",
            seq.label()
        )));
    }
    let coords = &atlas.transition(&reference, seq)?.coordinates;
    let nc_gens = s.chart_generators(seq);
    let images: Vec<NCPolynomial> = coords
        .iter()
        .map(|c| nc_gens.iter().find(|g| &g.commutatize() == c).cloned().unwrap_or_else(|| lift(c, s.convention())))
        .collect();
    let mut out = NCPolynomial::zero(ring);
    for (m, coef) in in_chart.numerator().terms() {
        let mut t = NCPolynomial::constant(ring, coef.clone());
        for (v, &x) in m.exponents().iter().enumerate() {
            for _ in 0..x {
                t = &t * &images[v];
            }
        }
        out = &out + &t;
    }
    Ok(out)
}

pub fn build_closed_subscheme(
    s: &SoftScheme,
    ideals: &BTreeMap<AdmissibleSequence, Vec<LocalizedElement>>,
) -> Result<SubschemeData> {
    let seqs: Vec<AdmissibleSequence> = s.atlas().sequences();
    let built = par::map(&seqs, |seq| -> Result<ChartIdeal> {
        let commutative: Vec<LocalizedElement> =
            ideals.get(seq).map(|g| g.iter().filter(|e| !e.is_zero()).cloned().collect()).unwrap_or_default();
        let lifted = commutative.iter().map(|e| lift_into_chart(s, seq, e)).collect::<Result<Vec<_>>>()?;
        Ok(ChartIdeal { commutative, lifted })
    });
    let mut charts = BTreeMap::new();
    for (seq, c) in seqs.into_iter().zip(built) {
        charts.insert(seq, c?);
    }
    Ok(SubschemeData { charts, memo: RwLock::new(HashMap::new()), flag_type: s.flag_type().clone() })
}

/// The subscheme cut out by a Plücker form, pulled back chart by chart.
pub fn hypersurface_subscheme(s: &SoftScheme, f: &Polynomial) -> Result<SubschemeData> {
    let seqs = s.atlas().sequences();
    let pulled = par::map(&seqs, |seq| plucker_pullback(s.atlas(), f, seq));
    let mut ideals = BTreeMap::new();
    for (seq, p) in seqs.into_iter().zip(pulled) {
        ideals.insert(seq, vec![p?]);
    }
    build_closed_subscheme(s, &ideals)
}

#[derive(Debug, Clone, Default)]
pub struct SubschemeReport {
    pub chains_checked: usize,
    pub violations: Vec<Violation>,
}

impl SubschemeReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl SubschemeData {
    pub fn flag_type(&self) -> &FlagType {
        &self.flag_type
    }

    pub fn chart(&self, seq: &AdmissibleSequence) -> &ChartIdeal {
        &self.charts[seq]
    }

    pub fn charts(&self) -> impl Iterator<Item = (&AdmissibleSequence, &ChartIdeal)> {
        self.charts.iter()
    }

    /// Unions over the chain's members: commutative and lifted generators.
    pub fn generators(&self, chain: &AdmissibleChain) -> Arc<(Vec<LocalizedElement>, Vec<NCPolynomial>)> {
        if let Some(g) = self.memo.read().unwrap().get(chain) {
            return g.clone();
        }
        let comm = union_elements(chain.sequences().map(|s| self.charts[s].commutative.as_slice()));
        let nc = union_nc(chain.sequences().map(|s| self.charts[s].lifted.as_slice()));
        let g = Arc::new((comm, nc));
        self.memo.write().unwrap().entry(chain.clone()).or_insert(g).clone()
    }

    /// `π₀` of every lifted generator returns its source, and chain
    /// generator sets grow with the chain.
    pub fn verify(&self) -> SubschemeReport {
        let chains = small_chains(&self.flag_type, 2);
        let mut report = SubschemeReport { chains_checked: chains.len(), ..Default::default() };
        for (seq, c) in &self.charts {
            for (g, src) in c.lifted.iter().zip(&c.commutative) {
                if &g.commutatize() != src {
                    report.violations.push(Violation {
                        condition: COMMUTATIZATION,
                        chain: seq.to_string(),
                        detail: format!("π₀({g}) ≠ {src}"),
                    });
                }
            }
        }
        for a in &chains {
            for b in &chains {
                if a == b || !a.is_subchain_of(b) {
                    continue;
                }
                let (ga, gb) = (self.generators(a), self.generators(b));
                if contains_all(&gb.0, &ga.0).is_some() || contains_all(&gb.1, &ga.1).is_some() {
                    report.violations.push(Violation {
                        condition: MONOTONICITY,
                        chain: format!("{a} ⊆ {b}"),
                        detail: "ideal generators not contained".into(),
                    });
                }
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactring::parse_expr;

    fn gr24() -> FlagType {
        FlagType::grassmannian(2, 4).unwrap()
    }

    fn seq(ft: &FlagType, s: &str) -> AdmissibleSequence {
        AdmissibleSequence::parse(ft, s).unwrap()
    }

    #[test]
    fn commutative_chains() {
        let sys = build_commutative_system(&gr24()).unwrap();
        let ft = gr24();
        let r = sys.generators(&AdmissibleChain::singleton(seq(&ft, "1,2")));
        assert_eq!(r.len(), 4);
        let pair = AdmissibleChain::new([seq(&ft, "1,2"), seq(&ft, "3,4")]).unwrap();
        assert_eq!(sys.generators(&pair).len(), 8);
    }

    #[test]
    fn projective_line() {
        let s = build_soft_scheme(&FlagType::grassmannian(1, 2).unwrap(), LiftConvention::InverseFirst).unwrap();
        let ft = s.flag_type().clone();
        assert_eq!(s.chart_generators(&seq(&ft, "1"))[0].to_string(), "z12");
        assert_eq!(s.chart_generators(&seq(&ft, "2"))[0].to_string(), "w1");
        assert!(verify_soft_scheme(&s).passed());
    }

    #[test]
    fn chart_13_lifts() {
        let s = build_soft_scheme(&gr24(), LiftConvention::InverseFirst).unwrap();
        let got: Vec<String> = s.chart_generators(&seq(&gr24(), "1,3")).iter().map(|g| g.to_string()).collect();
        assert_eq!(got, ["-w1*z13", "-w1*z13*z24 + z14", "w1", "w1*z24"]);
    }

    #[test]
    fn injected_fault_is_reported() {
        let s = build_soft_scheme(&gr24(), LiftConvention::InverseFirst).unwrap();
        let ring = s.atlas().ring().clone();
        let wrong = lift(&ring.parse("z13 + z14").unwrap(), LiftConvention::InverseFirst);
        let bad = s.with_replaced_generator(&seq(&gr24(), "1,3"), 1, wrong);
        let report = verify_soft_scheme(&bad);
        assert!(!report.passed());
        assert!(report.violations.iter().any(|v| v.condition == COMMUTATIZATION && v.chain.contains("{1,3}")));
    }

    #[test]
    fn softening_two_conventions() {
        let sys = Arc::new(build_commutative_system(&gr24()).unwrap());
        let a = SoftScheme::lifted(&sys, LiftConvention::InverseFirst);
        let b = SoftScheme::lifted(&sys, LiftConvention::InverseLast);
        let u = soften_union(&a, &b).unwrap();
        assert!(u.softens(&a) && u.softens(&b));
        assert!(verify_soft_scheme(&u).passed());
        let aa = soften_union(&a, &a).unwrap();
        assert!(aa.softens(&a) && a.softens(&aa));
        let ba = soften_union(&b, &a).unwrap();
        assert!(ba.softens(&u) && u.softens(&ba));
        let other = build_soft_scheme(&FlagType::grassmannian(1, 3).unwrap(), LiftConvention::InverseFirst).unwrap();
        assert!(matches!(soften_union(&a, &other), Err(Error::IncompatibleFlagTypes(..))));
    }

    #[test]
    fn plucker_tuples() {
        let atlas = Atlas::new(&gr24());
        let slots: Vec<String> =
            plucker_slots(&atlas, &seq(&gr24(), "1,3")).unwrap().iter().map(|x| x.to_string()).collect();
        let ring = atlas.ring();
        let want: Vec<String> = ["1/z23", "1", "z24/z23", "-z13/z23", "-z14/z23", "-z14 + z13*z24/z23"]
            .iter()
            .map(|s| ring.parse(s).unwrap().to_string())
            .collect();
        assert_eq!(slots, want);
        for s in atlas.sequences() {
            assert!(plucker_pullback(&atlas, &plucker_quadric(), &s).unwrap().is_zero());
        }
    }

    #[test]
    fn plucker_errors() {
        let fl = Atlas::new(&FlagType::new(vec![1, 2], 3).unwrap());
        let reg = VariableRegistry::new(vec!["y0".into()]).unwrap();
        let s = fl.sequences()[0].clone();
        assert!(matches!(plucker_pullback(&fl, &Polynomial::var(&reg, 0), &s), Err(Error::Unsupported(_))));
        let atlas = Atlas::new(&gr24());
        let reg = plucker_registry(&gr24()).unwrap();
        let f = parse_expr("y0^2 + y1").unwrap().eval_poly(&reg).unwrap();
        assert!(matches!(plucker_pullback(&atlas, &f, &atlas.sequences()[0]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn subscheme_rejects_foreign_generators() {
        let s = build_soft_scheme(&gr24(), LiftConvention::InverseFirst).unwrap();
        let ring = s.atlas().ring().clone();
        let mut ideals = BTreeMap::new();
        ideals.insert(seq(&gr24(), "1,2"), vec![ring.parse("1/z13").unwrap()]);
        assert!(matches!(build_closed_subscheme(&s, &ideals), Err(Error::InvalidInput(_))));
        let empty = build_closed_subscheme(&s, &BTreeMap::new()).unwrap();
        assert!(empty.charts().all(|(_, c)| c.commutative.is_empty() && c.lifted.is_empty()));
    }

    #[test]
    fn quadric_subscheme_is_everything() {
        let s = build_soft_scheme(&gr24(), LiftConvention::InverseFirst).unwrap();
        let z = hypersurface_subscheme(&s, &plucker_quadric()).unwrap();
        assert!(z.charts().all(|(_, c)| c.commutative.is_empty()));
    }
}
