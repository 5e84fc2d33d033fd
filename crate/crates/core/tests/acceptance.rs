//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails or overruns its time limit.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use flagforge::exactring::{LocalizedElement, MasterRing, MinorId, Monomial, Polynomial, Rational};
use flagforge::flagcomb::{enumerate_sequences, sequence_count, AdmissibleSequence, FlagType};
use flagforge::flagmatrix::{evaluate_chart_coordinates, Atlas, NumericFlagMatrix, RingMatrix};
use flagforge::freealg::{lift, lifted_minor, nc_equal, EqualityVerdict, LiftConvention, NCPolynomial, RewriteSystem};
use flagforge::softscheme::{
    fermat_quartic, hypersurface_subscheme, plucker_quadric, plucker_slots, soften_union, verify_soft_scheme,
    CommutativeSystem, SoftScheme,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

fn gr24() -> FlagType {
    FlagType::grassmannian(2, 4).unwrap()
}

fn fl123() -> FlagType {
    FlagType::new(vec![1, 2], 3).unwrap()
}

const D: &str = "(z13*z24 - z14*z23)";

/// Realization matrices of the six Gr(2;4) charts as printed.
fn printed_charts() -> Vec<(&'static str, [[String; 4]; 2])> {
    let s = |x: &str| x.replace('D', D);
    vec![
        ("1,2", [["1", "0", "z13", "z14"].map(s), ["0", "1", "z23", "z24"].map(s)]),
        ("1,3", [["1", "-z23^-1*z13", "0", "z14 - z23^-1*z13*z24"].map(s), ["0", "z23^-1", "1", "z23^-1*z24"].map(s)]),
        ("1,4", [["1", "-z24^-1*z14", "z13 - z24^-1*z14*z23", "0"].map(s), ["0", "z24^-1", "z24^-1*z23", "1"].map(s)]),
        ("2,3", [["-z13^-1*z23", "1", "0", "z24 - z13^-1*z14*z23"].map(s), ["z13^-1", "0", "1", "z13^-1*z14"].map(s)]),
        ("2,4", [["-z14^-1*z24", "1", "z23 - z14^-1*z13*z24", "0"].map(s), ["z14^-1", "0", "z14^-1*z13", "1"].map(s)]),
        ("3,4", [["D^-1*z24", "-D^-1*z14", "1", "0"].map(s), ["-D^-1*z23", "D^-1*z13", "0", "1"].map(s)]),
    ]
}

/// Plücker substitution tuples `(p12, p13, p14, p23, p24, p34)` as printed.
fn printed_plucker() -> Vec<(&'static str, [String; 6])> {
    let s = |x: &str| x.replace('D', D);
    vec![
        ("1,2", ["1", "z23", "z24", "-z13", "-z14", "z13*z24 - z14*z23"].map(s)),
        ("1,3", ["z23^-1", "1", "z23^-1*z24", "-z23^-1*z13", "-z23^-1*z14", "-z14 + z23^-1*z13*z24"].map(s)),
        ("1,4", ["z24^-1", "z24^-1*z23", "1", "-z24^-1*z13", "-z24^-1*z14", "z13 - z24^-1*z14*z23"].map(s)),
        ("2,3", ["-z13^-1", "-z13^-1*z23", "-z13^-1*z24", "1", "z13^-1*z14", "-z24 + z13^-1*z14*z23"].map(s)),
        ("2,4", ["-z14^-1", "-z14^-1*z23", "-z14^-1*z24", "z14^-1*z13", "1", "z23 - z14^-1*z13*z24"].map(s)),
        ("3,4", ["D^-1", "D^-1*z23", "D^-1*z24", "-D^-1*z13", "-D^-1*z14", "1"].map(s)),
    ]
}

fn parse(ring: &Arc<MasterRing>, s: &str) -> Result<LocalizedElement, String> {
    ring.parse(s).map_err(|e| format!("fixture `{s}`: {e}"))
}

fn seq(ft: &FlagType, s: &str) -> AdmissibleSequence {
    AdmissibleSequence::parse(ft, s).unwrap()
}

fn chart_fixtures() -> Outcome {
    let atlas = Atlas::new(&gr24());
    let ring = atlas.ring();
    for (label, rows) in printed_charts() {
        let want = RingMatrix::from_rows(
            ring,
            rows.iter()
                .map(|r| r.iter().map(|c| parse(ring, c)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<_, _>>()?,
        )
        .map_err(|e| e.to_string())?;
        let (got, _) = atlas.master_realization(&seq(&gr24(), label)).map_err(|e| e.to_string())?;
        for i in 1..=2 {
            for j in 1..=4 {
                if got.get(i, j) != want.get(i, j) {
                    return Err(format!(
                        "chart {label} entry ({i},{j}): got {}, printed {}",
                        got.get(i, j),
                        want.get(i, j)
                    ));
                }
            }
        }
    }
    Ok(())
}

fn plucker_fixtures() -> Outcome {
    let atlas = Atlas::new(&gr24());
    let ring = atlas.ring();
    for (label, tuple) in printed_plucker() {
        let s = seq(&gr24(), label);
        let got = plucker_slots(&atlas, &s).map_err(|e| e.to_string())?;
        for (t, (g, w)) in got.iter().zip(&tuple).enumerate() {
            if g != &parse(ring, w)? {
                return Err(format!("chart {label} slot y{t}: got {g}, printed {w}"));
            }
        }
        let q = flagforge::softscheme::plucker_pullback(&atlas, &plucker_quadric(), &s).map_err(|e| e.to_string())?;
        if !q.is_zero() {
            return Err(format!("quadric pulls back to {q} in chart {label}"));
        }
    }
    Ok(())
}

fn cocycles() -> Outcome {
    for ft in [gr24(), fl123()] {
        let atlas = Atlas::new(&ft);
        let seqs = atlas.sequences();
        let mut triples = Vec::new();
        for i in &seqs {
            for j in &seqs {
                for k in &seqs {
                    triples.push((i.clone(), j.clone(), k.clone()));
                }
            }
        }
        if triples.len() != 216 {
            return Err(format!("{ft}: {} triples", triples.len()));
        }
        let failing = atlas.verify_cocycles(&triples).map_err(|e| e.to_string())?;
        if let Some((i, j, k)) = failing.first() {
            return Err(format!("{ft}: {} failures, first ({i}, {j}, {k})", failing.len()));
        }
    }
    Ok(())
}

/// `d_r(n − d_r) + Σ_j d_j(d_{j+1} − d_j)`, written out independently of the library.
fn variable_formula(dims: &[usize], n: usize) -> usize {
    let r = dims.len();
    let mut total = dims[r - 1] * (n - dims[r - 1]);
    for j in 0..r - 1 {
        total += dims[j] * (dims[j + 1] - dims[j]);
    }
    total
}

fn flag_types_up_to(max_n: usize) -> Vec<FlagType> {
    (1..=max_n).flat_map(FlagType::all_with_n).collect()
}

fn counting() -> Outcome {
    let mut checked = 0;
    for ft in flag_types_up_to(6) {
        let listed = enumerate_sequences(&ft).len() as u128;
        if listed != sequence_count(&ft) {
            return Err(format!("{ft}: enumerated {listed}, counted {}", sequence_count(&ft)));
        }
        checked += 1;
    }
    for ft in flag_types_up_to(8) {
        let vars = flagforge::flagmatrix::reference_matrix(&ft).ring().var_count();
        if vars != variable_formula(ft.dims(), ft.n()) {
            return Err(format!("{ft}: {vars} variables, formula {}", variable_formula(ft.dims(), ft.n())));
        }
    }
    // Types with top n are the nonempty subsets of {1..n-1}.
    let expected: usize = (1..=6u32).map(|n| (1usize << (n - 1)) - 1).sum();
    if checked != expected {
        return Err(format!("{checked} flag types with n ≤ 6, expected {expected}"));
    }
    Ok(())
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-12i64..=12).into(), rng.gen_range(1i64..=5).into())
}

fn numeric_round_trip() -> Outcome {
    let ft = gr24();
    let atlas = Atlas::new(&ft);
    let seqs = atlas.sequences();
    let reference = AdmissibleSequence::reference(&ft);
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let mut accepted = 0;
    while accepted < 100 {
        let rows: Vec<Vec<Rational>> = (0..2).map(|_| (0..4).map(|_| random_rational(&mut rng)).collect()).collect();
        let m = NumericFlagMatrix::new(rows).unwrap();
        // All 2x2 minors nonzero: the flag lies in every chart.
        let generic = flagforge::flagcomb::combinations(4, 2).iter().all(|c| {
            let sub: Vec<Vec<Rational>> =
                m.rows.iter().map(|r| c.iter().map(|&j| r[j - 1].clone()).collect()).collect();
            !flagforge::flagmatrix::rational_det(&sub).is_zero()
        });
        if !generic {
            continue;
        }
        accepted += 1;
        let z = evaluate_chart_coordinates(&m, &reference).map_err(|e| e.to_string())?;
        if ring_minors_vanish(&atlas, &z) {
            return Err("generic flag hits a vanishing table minor".into());
        }
        let mut coords = BTreeMap::new();
        for s in &seqs {
            let numeric = evaluate_chart_coordinates(&m, s).map_err(|e| e.to_string())?;
            let symbolic: Vec<Rational> = atlas
                .transition(&reference, s)
                .map_err(|e| e.to_string())?
                .coordinates
                .iter()
                .map(|x| x.evaluate(&z))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            if numeric != symbolic {
                return Err(format!("chart {}: numeric {numeric:?} vs symbolic {symbolic:?}", s.label()));
            }
            coords.insert(s.clone(), numeric);
        }
        for a in &seqs {
            for b in &seqs {
                let t = atlas.transition(a, b).map_err(|e| e.to_string())?;
                let moved: Vec<Rational> = t
                    .coordinates
                    .iter()
                    .map(|x| x.evaluate(&coords[a]))
                    .collect::<Result<_, _>>()
                    .map_err(|e| e.to_string())?;
                if moved != coords[b] {
                    return Err(format!("transport {} → {} disagrees", a.label(), b.label()));
                }
            }
        }
    }
    Ok(())
}

fn ring_minors_vanish(atlas: &Atlas, z: &[Rational]) -> bool {
    atlas.ring().minors().iter().any(|m| m.poly.evaluate(z).unwrap().is_zero())
}

fn random_element(ring: &Arc<MasterRing>, rng: &mut ChaCha8Rng) -> LocalizedElement {
    let nz = ring.var_count();
    let terms = (0..rng.gen_range(0..5)).map(|_| {
        let exps: Vec<u32> = (0..nz).map(|_| rng.gen_range(0..3)).collect();
        (Monomial::from_exponents(&exps), random_rational(rng))
    });
    let num = Polynomial::from_terms(ring.registry(), terms.collect::<Vec<_>>());
    let den: Vec<(MinorId, u32)> = (0..ring.minor_count()).map(|k| (MinorId(k), rng.gen_range(0..3))).collect();
    ring.element(num, den).unwrap()
}

fn noncommutative_layer() -> Outcome {
    let ring = MasterRing::new(&gr24());
    for (_, rows) in printed_charts() {
        for cell in rows.iter().flatten() {
            let e = parse(&ring, cell)?;
            for conv in [LiftConvention::InverseFirst, LiftConvention::InverseLast] {
                if lift(&e, conv).commutatize() != e {
                    return Err(format!("π₀ ∘ lift differs on printed entry {cell}"));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..1000 {
        let e = random_element(&ring, &mut rng);
        if lift(&e, LiftConvention::InverseFirst).commutatize() != e {
            return Err(format!("π₀ ∘ lift differs on {e}"));
        }
    }
    let sys = RewriteSystem::for_ring(&ring);
    let one = NCPolynomial::one(&ring);
    if ring.minor_count() != 5 {
        return Err(format!("{} minors", ring.minor_count()));
    }
    for k in 0..5 {
        let m = lifted_minor(&ring, MinorId(k));
        let w = NCPolynomial::w(&ring, MinorId(k));
        if sys.reduce(&(&w * &m)) != one || sys.reduce(&(&m * &w)) != one {
            return Err(format!("relations of minor w{} do not reduce to 1", k + 1));
        }
    }
    // Adversarial pairs: commutators and commutator-perturbed elements.
    let gens: Vec<NCPolynomial> =
        (0..4).map(|v| NCPolynomial::z(&ring, v)).chain((0..5).map(|k| NCPolynomial::w(&ring, MinorId(k)))).collect();
    // A variable that is itself a minor commutes with its inverse; every
    // other pair of distinct generators does not commute.
    let inverse_pair = |i: usize, j: usize| {
        let (v, k) = if i < 4 { (i, j.checked_sub(4)) } else { (j, i.checked_sub(4)) };
        v < 4 && k.is_some_and(|k| ring.minor_poly(MinorId(k)) == &Polynomial::var(ring.registry(), v))
    };
    for (i, a) in gens.iter().enumerate() {
        for (j, b) in gens.iter().enumerate() {
            if i == j {
                continue;
            }
            if inverse_pair(i, j) {
                if nc_equal(&(a * b), &(b * a), &sys).map_err(|e| e.to_string())? != EqualityVerdict::Equal {
                    return Err(format!("{a} and its inverse {b} were not judged to commute"));
                }
                continue;
            }
            if nc_equal(&(a * b), &(b * a), &sys).map_err(|e| e.to_string())? == EqualityVerdict::Equal {
                return Err(format!("commutator [{a}, {b}] judged equal"));
            }
            let base = lift(&random_element(&ring, &mut rng), LiftConvention::InverseFirst);
            let perturbed = &base + &(&(&(a * b) - &(b * a)) * &gens[rng.gen_range(0..gens.len())]);
            if nc_equal(&base, &perturbed, &sys).map_err(|e| e.to_string())? == EqualityVerdict::Equal {
                return Err(format!("perturbation by [{a}, {b}] judged equal"));
            }
        }
    }
    for (x, y) in [("z13*z23", "z23*z13"), ("z13*z24*z14", "z14*z24*z13"), ("w5*z13", "z13*w5")] {
        let v = nc_equal(&NCPolynomial::parse(&ring, x).unwrap(), &NCPolynomial::parse(&ring, y).unwrap(), &sys)
            .map_err(|e| e.to_string())?;
        if v == EqualityVerdict::Equal {
            return Err(format!("{x} vs {y} judged equal"));
        }
    }
    Ok(())
}

fn soft_schemes() -> Outcome {
    for ft in [gr24(), fl123()] {
        let system = Arc::new(CommutativeSystem::new(&Atlas::new(&ft)).map_err(|e| e.to_string())?);
        let a = SoftScheme::lifted(&system, LiftConvention::InverseFirst);
        let b = SoftScheme::lifted(&system, LiftConvention::InverseLast);
        for s in [&a, &b] {
            let r = verify_soft_scheme(s);
            if let Some(v) = r.violations.first() {
                return Err(format!("{ft}: {} at {}: {}", v.condition, v.chain, v.detail));
            }
        }
        let u = soften_union(&a, &b).map_err(|e| e.to_string())?;
        if !(u.softens(&a) && u.softens(&b)) {
            return Err(format!("{ft}: union does not soften both inputs"));
        }
        if let Some(v) = verify_soft_scheme(&u).violations.first() {
            return Err(format!("{ft} union: {} at {}: {}", v.condition, v.chain, v.detail));
        }
    }
    Ok(())
}

fn quartic_subscheme() -> Outcome {
    let s =
        flagforge::softscheme::build_soft_scheme(&gr24(), LiftConvention::InverseFirst).map_err(|e| e.to_string())?;
    let z = hypersurface_subscheme(&s, &fermat_quartic(&gr24()).unwrap()).map_err(|e| e.to_string())?;
    let mut charts = 0;
    for (seq, c) in z.charts() {
        charts += 1;
        if c.commutative.len() != 1 || c.commutative[0].is_zero() {
            return Err(format!("chart {}: expected one nonzero generator", seq.label()));
        }
        if c.lifted[0].commutatize() != c.commutative[0] {
            return Err(format!("chart {}: lift does not commutatize back", seq.label()));
        }
    }
    if charts != 6 {
        return Err(format!("{charts} charts"));
    }
    let report = z.verify();
    if let Some(v) = report.violations.first() {
        return Err(format!("{} at {}: {}", v.condition, v.chain, v.detail));
    }
    Ok(())
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "gr24-chart-fixtures", limit: Duration::from_secs(1), run: chart_fixtures },
        Criterion { id: 2, name: "plucker-fixtures", limit: Duration::from_secs(1), run: plucker_fixtures },
        Criterion { id: 3, name: "cocycle-suite", limit: Duration::from_secs(60), run: cocycles },
        Criterion { id: 4, name: "counting-and-dimension", limit: Duration::from_secs(10), run: counting },
        Criterion { id: 5, name: "numeric-round-trip", limit: Duration::from_secs(10), run: numeric_round_trip },
        Criterion { id: 6, name: "noncommutative-layer", limit: Duration::from_secs(30), run: noncommutative_layer },
        Criterion { id: 7, name: "soft-scheme-verification", limit: Duration::from_secs(30), run: soft_schemes },
        Criterion { id: 8, name: "quartic-subscheme-lifting", limit: Duration::from_secs(10), run: quartic_subscheme },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let verdict = match (&outcome, elapsed <= c.limit) {
            (Ok(()), true) => "PASS".to_string(),
            (Ok(()), false) => "FAIL (over time limit)".to_string(),
            (Err(e), _) => format!("FAIL ({e})"),
        };
        if !verdict.starts_with("PASS") {
            failed += 1;
        }
        println!(
            "criterion {} {:<28} {verdict}  [{} ms / limit {} ms]",
            c.id,
            c.name,
            elapsed.as_millis(),
            c.limit.as_millis()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
