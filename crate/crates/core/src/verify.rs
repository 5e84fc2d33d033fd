//! Invariant sweeps over one flag type, aggregated into a report.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::exactring::{LocalizedElement, MinorId, Polynomial, Rational};
use crate::flagcomb::{enumerate_sequences, sequence_count, AdmissibleSequence, FlagType};
use crate::flagmatrix::{evaluate_chart_coordinates, Atlas, RingMatrix};
use crate::freealg::{lift, lifted_minor, LiftConvention, NCPolynomial, RewriteSystem};
use crate::par;
use crate::softscheme::{
    fermat_quartic, hypersurface_subscheme, plucker_pullback, plucker_registry, plucker_slots, soften_union,
    verify_soft_scheme, CommutativeSystem, SoftScheme,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub flag_type: FlagType,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Check every ordered triple of charts rather than triples starting at
    /// the reference chart.
    pub exhaustive_cocycle: bool,
    /// Random flags for the numeric round trip.
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { exhaustive_cocycle: false, samples: 20, seed: 7 }
    }
}

fn check(name: &'static str, cases: usize, failure: Option<String>) -> CheckResult {
    CheckResult { name, passed: failure.is_none(), cases, detail: failure.unwrap_or_default() }
}

/// Whether entries above the diagonal row blocks vanish.
pub fn is_block_lower_triangular(c: &RingMatrix, ft: &FlagType) -> bool {
    (1..=c.rows()).all(|i| (1..=c.cols()).all(|j| ft.band_of(j) <= ft.band_of(i) || c.get(i, j).is_zero()))
}

pub fn counting(ft: &FlagType) -> CheckResult {
    let listed = enumerate_sequences(ft).len() as u128;
    let counted = sequence_count(ft);
    let vars = crate::exactring::MasterRing::new(ft).var_count();
    let failure = if listed != counted {
        Some(format!("enumerated {listed} sequences, product formula gives {counted}"))
    } else if vars != ft.dimension() {
        Some(format!("{vars} chart variables, dimension formula gives {}", ft.dimension()))
    } else {
        None
    };
    check("counting", 1, failure)
}

pub fn blocked_form(atlas: &Atlas) -> Result<CheckResult> {
    let ft = atlas.flag_type().clone();
    let reference = AdmissibleSequence::reference(&ft);
    let seqs = atlas.sequences();
    let outcomes = par::map(&seqs, |s| -> Result<Option<String>> {
        let t = atlas.transition(&reference, s)?;
        if !t.result.gather(s).is_blocked_standard() {
            return Ok(Some(format!("chart {} is not in blocked form", s.label())));
        }
        if !is_block_lower_triangular(&t.c, &ft) {
            return Ok(Some(format!("factor for chart {} is not block lower triangular", s.label())));
        }
        if t.c.det()?.try_inverse().is_err() {
            return Ok(Some(format!("factor for chart {} is not invertible", s.label())));
        }
        Ok(None)
    });
    let mut failure = None;
    for o in outcomes {
        if let Some(f) = o? {
            failure.get_or_insert(f);
        }
    }
    Ok(check("blocked-form", seqs.len(), failure))
}

pub fn cocycle_triples(
    ft: &FlagType,
    exhaustive: bool,
) -> Vec<(AdmissibleSequence, AdmissibleSequence, AdmissibleSequence)> {
    let seqs = enumerate_sequences(ft);
    let firsts = if exhaustive { seqs.clone() } else { vec![AdmissibleSequence::reference(ft)] };
    let mut out = Vec::new();
    for i in &firsts {
        for j in &seqs {
            for k in &seqs {
                out.push((i.clone(), j.clone(), k.clone()));
            }
        }
    }
    out
}

pub fn cocycle(atlas: &Atlas, exhaustive: bool) -> Result<CheckResult> {
    let triples = cocycle_triples(atlas.flag_type(), exhaustive);
    let failing = atlas.verify_cocycles(&triples)?;
    let failure = failing.first().map(|(i, j, k)| {
        format!("{} failing triples, first ({}, {}, {})", failing.len(), i.label(), j.label(), k.label())
    });
    Ok(check("cocycle", triples.len(), failure))
}

/// A random point of the reference chart at which no table minor vanishes.
pub fn random_generic_point(atlas: &Atlas, rng: &mut impl Rng) -> Vec<Rational> {
    let ring = atlas.ring();
    loop {
        let point: Vec<Rational> = (0..ring.var_count())
            .map(|_| Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=4).into()))
            .collect();
        let generic = ring.minors().iter().all(|m| !m.poly.evaluate(&point).expect("sized").is_zero());
        if generic {
            return point;
        }
    }
}

pub fn numeric_round_trip(atlas: &Atlas, samples: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reference = AdmissibleSequence::reference(atlas.flag_type());
    let seqs = atlas.sequences();
    let points: Vec<Vec<Rational>> = (0..samples).map(|_| random_generic_point(atlas, &mut rng)).collect();
    for s in &seqs {
        atlas.transition(&reference, s)?;
    }
    let outcomes = par::map(&points, |p| -> Result<Option<String>> {
        let m = atlas.reference_matrix().evaluate(p)?;
        let mut coords = BTreeMap::new();
        for s in &seqs {
            let numeric = evaluate_chart_coordinates(&m, s)?;
            let symbolic = atlas
                .transition(&reference, s)?
                .coordinates
                .iter()
                .map(|x| x.evaluate(p))
                .collect::<Result<Vec<_>>>()?;
            if numeric != symbolic {
                return Ok(Some(format!("chart {} disagrees at {p:?}", s.label())));
            }
            coords.insert(s.clone(), numeric);
        }
        // Transport between a pair of charts through the symbolic transition.
        let (a, b) = (&seqs[seqs.len() / 2], &seqs[seqs.len() - 1]);
        let t = atlas.transition(a, b)?;
        let moved = t.coordinates.iter().map(|x| x.evaluate(&coords[a])).collect::<Result<Vec<_>>>()?;
        if moved != coords[b] {
            return Ok(Some(format!("transport {} → {} disagrees", a.label(), b.label())));
        }
        Ok(None)
    });
    let mut failure = None;
    for o in outcomes {
        if let Some(f) = o? {
            failure.get_or_insert(f);
        }
    }
    Ok(check("numeric-round-trip", samples * seqs.len(), failure))
}

pub fn lift_round_trip(system: &CommutativeSystem) -> CheckResult {
    let ring = system.atlas().ring();
    let mut cases = 0;
    let mut failure = None;
    for s in system.atlas().sequences() {
        for g in system.chart_generators(&s) {
            for conv in [LiftConvention::InverseFirst, LiftConvention::InverseLast] {
                cases += 1;
                if &lift(g, conv).commutatize() != g {
                    failure.get_or_insert(format!("π₀(lift({g})) differs in chart {}", s.label()));
                }
            }
        }
    }
    let sys = RewriteSystem::for_ring(ring);
    let one = NCPolynomial::one(ring);
    for k in 0..ring.minor_count() {
        let m = lifted_minor(ring, MinorId(k));
        let w = NCPolynomial::w(ring, MinorId(k));
        cases += 2;
        if sys.reduce(&(&w * &m)) != one || sys.reduce(&(&m * &w)) != one {
            failure.get_or_insert(format!("defining relation of minor {} does not reduce to 1", MinorId(k).name()));
        }
    }
    check("lift-round-trip", cases, failure)
}

pub fn soft_scheme(system: &Arc<CommutativeSystem>) -> CheckResult {
    let a = SoftScheme::lifted(system, LiftConvention::InverseFirst);
    let b = SoftScheme::lifted(system, LiftConvention::InverseLast);
    let mut reports = vec![verify_soft_scheme(&a), verify_soft_scheme(&b)];
    let mut failure = None;
    match soften_union(&a, &b) {
        Ok(u) => {
            if !(u.softens(&a) && u.softens(&b)) {
                failure = Some("union does not soften its inputs".to_string());
            }
            reports.push(verify_soft_scheme(&u));
        }
        Err(e) => failure = Some(e.to_string()),
    }
    let cases = reports.iter().map(|r| r.chains_checked).sum();
    if let Some(v) = reports.iter().flat_map(|r| r.violations.iter()).next() {
        failure.get_or_insert(format!("{} at {}: {}", v.condition, v.chain, v.detail));
    }
    check("soft-scheme", cases, failure)
}

/// Pullbacks of monomials of degree ≤ 2 agree across charts up to the
/// power of the relating Plücker slot, and the Fermat quartic subscheme
/// lifts consistently.
pub fn plucker(system: &Arc<CommutativeSystem>) -> Result<CheckResult> {
    let atlas = system.atlas();
    let ft = atlas.flag_type();
    let reg = plucker_registry(ft)?;
    let seqs = atlas.sequences();
    let mut forms: Vec<Polynomial> = Vec::new();
    for a in 0..reg.len() {
        forms.push(Polynomial::var(&reg, a));
        for b in a..reg.len() {
            forms.push(&Polynomial::var(&reg, a) * &Polynomial::var(&reg, b));
        }
    }
    let slots: Vec<Vec<LocalizedElement>> = seqs.iter().map(|s| plucker_slots(atlas, s)).collect::<Result<Vec<_>>>()?;
    let lex = crate::flagcomb::combinations(ft.n(), ft.top());
    let mut failure = None;
    let mut cases = 0;
    for f in &forms {
        let deg = f.degree().unwrap_or(0);
        let pulled: Vec<LocalizedElement> =
            seqs.iter().map(|s| plucker_pullback(atlas, f, s)).collect::<Result<Vec<_>>>()?;
        for (i, _) in seqs.iter().enumerate() {
            for (j, sj) in seqs.iter().enumerate() {
                cases += 1;
                let slot = lex.iter().position(|c| c == sj.subsets().last().expect("depth one")).expect("subset");
                if &slots[i][slot].pow(deg) * &pulled[j] != pulled[i] {
                    failure.get_or_insert(format!("pullback of {f} in charts {} and {}", seqs[i].label(), sj.label()));
                }
            }
        }
    }
    let scheme = SoftScheme::lifted(system, LiftConvention::InverseFirst);
    let z = hypersurface_subscheme(&scheme, &fermat_quartic(ft)?)?;
    let zr = z.verify();
    if let Some(v) = zr.violations.first() {
        failure.get_or_insert(format!("quartic subscheme {} at {}: {}", v.condition, v.chain, v.detail));
    }
    if z.charts().any(|(_, c)| c.commutative.is_empty()) {
        failure.get_or_insert("quartic pulls back to zero in some chart".into());
    }
    Ok(check("plucker", cases + zr.chains_checked, failure))
}

/// Runs every sweep for `ft`.
pub fn run_all(ft: &FlagType, opts: VerifyOptions) -> Result<VerifyReport> {
    let atlas = Atlas::new(ft);
    let mut checks = vec![counting(ft), blocked_form(&atlas)?, cocycle(&atlas, opts.exhaustive_cocycle)?];
    checks.push(numeric_round_trip(&atlas, opts.samples, opts.seed)?);
    let system = Arc::new(CommutativeSystem::new(&atlas)?);
    checks.push(lift_round_trip(&system));
    checks.push(soft_scheme(&system));
    if ft.is_grassmannian() {
        checks.push(plucker(&system)?);
    }
    Ok(VerifyReport { flag_type: ft.clone(), checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps_pass() {
        for ft in [FlagType::grassmannian(1, 2).unwrap(), FlagType::new(vec![1, 2], 3).unwrap()] {
            let report = run_all(&ft, VerifyOptions { samples: 3, ..Default::default() }).unwrap();
            for c in &report.checks {
                assert!(c.passed, "{ft}: {} failed: {}", c.name, c.detail);
            }
        }
    }
}
