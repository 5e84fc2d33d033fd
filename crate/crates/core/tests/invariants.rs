use std::collections::BTreeSet;

use flagforge::exactring::{Monomial, Polynomial, Rational};
use flagforge::flagcomb::{enumerate_sequences, sequence_count, AdmissibleChain, AdmissibleSequence, FlagType};
use flagforge::flagmatrix::{evaluate_chart_coordinates, Atlas, NumericFlagMatrix};
use flagforge::freealg::LiftConvention;
use flagforge::softscheme::{build_soft_scheme, plucker_pullback, plucker_registry, plucker_slots};
use proptest::prelude::*;

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Charts are indexed by set compositions of `{1..n}` with block sizes
/// `d₁, d₂ − d₁, …, n − d_r`, so their number is a multinomial coefficient.
fn multinomial(ft: &FlagType) -> u128 {
    let mut prev = 0;
    let mut denom = 1;
    for &d in ft.dims().iter().chain([ft.n()].iter()) {
        denom *= factorial(d - prev);
        prev = d;
    }
    factorial(ft.n()) / denom
}

#[test]
fn chart_count_is_multinomial() {
    for n in 2..=8 {
        for ft in FlagType::all_with_n(n) {
            assert_eq!(sequence_count(&ft), multinomial(&ft), "{ft}");
            if n <= 6 {
                assert_eq!(enumerate_sequences(&ft).len() as u128, multinomial(&ft), "{ft}");
            }
        }
    }
}

#[test]
fn enumeration_is_sorted_and_distinct() {
    for ft in FlagType::all_with_n(5) {
        let seqs = enumerate_sequences(&ft);
        assert!(seqs.windows(2).all(|w| w[0] < w[1]), "{ft}");
    }
}

fn gr24() -> FlagType {
    FlagType::grassmannian(2, 4).unwrap()
}

fn form(exps: &[Vec<u32>], coeffs: &[i64]) -> Polynomial {
    let reg = plucker_registry(&gr24()).unwrap();
    Polynomial::from_terms(
        &reg,
        exps.iter().zip(coeffs).map(|(e, &c)| (Monomial::from_exponents(e), Rational::from_integer(c.into()))),
    )
}

/// Homogeneous forms of the given degree in the six Plücker variables.
fn arb_form(degree: u32) -> impl Strategy<Value = Polynomial> {
    let mono = prop::collection::vec(0usize..6, degree as usize).prop_map(|vars| {
        let mut e = vec![0u32; 6];
        for v in vars {
            e[v] += 1;
        }
        e
    });
    (prop::collection::vec(mono, 1..4), prop::collection::vec(-3i64..=3, 3)).prop_map(|(ms, cs)| form(&ms, &cs))
}

fn charts() -> Vec<AdmissibleSequence> {
    enumerate_sequences(&gr24())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pullback_is_multiplicative_and_additive(f in arb_form(1), g in arb_form(1), h in arb_form(1), chart in 0usize..6) {
        let atlas = Atlas::new(&gr24());
        let seq = &charts()[chart];
        let pb = |p: &Polynomial| plucker_pullback(&atlas, p, seq).unwrap();
        prop_assert_eq!(pb(&(&f * &g)), &pb(&f) * &pb(&g));
        let sum = &f + &h;
        if !sum.is_zero() {
            prop_assert_eq!(pb(&sum), &pb(&f) + &pb(&h));
        }
    }

    #[test]
    fn pullbacks_differ_by_slot_powers(f in arb_form(2), i in 0usize..6, j in 0usize..6) {
        // In chart J the J-th Plücker slot is 1, so the J-th slot of chart I
        // is the determinant relating the two realizations.
        let atlas = Atlas::new(&gr24());
        let (si, sj) = (&charts()[i], &charts()[j]);
        let slots_i = plucker_slots(&atlas, si).unwrap();
        let unit = &slots_i[j];
        prop_assert!(plucker_slots(&atlas, sj).unwrap()[j].is_one());
        let lhs = &unit.pow(2) * &plucker_pullback(&atlas, &f, sj).unwrap();
        prop_assert_eq!(lhs, plucker_pullback(&atlas, &f, si).unwrap());
    }

    #[test]
    fn numeric_coordinates_match_symbolic(seed in any::<u64>(), which in 0usize..3) {
        let ft = [FlagType::new(vec![1, 2], 3), FlagType::new(vec![1, 3], 4), FlagType::new(vec![2], 5)][which].clone().unwrap();
        let atlas = Atlas::new(&ft);
        let reference = AdmissibleSequence::reference(&ft);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let z = flagforge::verify::random_generic_point(&atlas, &mut rng);
        let m = atlas.reference_matrix().evaluate(&z).unwrap();
        prop_assert_eq!(evaluate_chart_coordinates(&m, &reference).unwrap(), z.clone());
        for s in atlas.sequences() {
            let t = atlas.transition(&reference, &s).unwrap();
            let symbolic: Vec<Rational> = t.coordinates.iter().map(|x| x.evaluate(&z).unwrap()).collect();
            prop_assert_eq!(evaluate_chart_coordinates(&m, &s).unwrap(), symbolic, "chart {}", s.label());
        }
    }

    #[test]
    fn generators_grow_along_chains(a in prop::collection::btree_set(0usize..6, 1..4), b in prop::collection::btree_set(0usize..6, 0..3)) {
        let s = build_soft_scheme(&gr24(), LiftConvention::InverseFirst).unwrap();
        let all = charts();
        let small = AdmissibleChain::new(a.iter().map(|&k| all[k].clone())).unwrap();
        let big = AdmissibleChain::new(a.union(&b).map(|&k| all[k].clone())).unwrap();
        let gs: BTreeSet<_> = s.generators(&small).iter().cloned().collect();
        let gb: BTreeSet<_> = s.generators(&big).iter().cloned().collect();
        prop_assert!(gs.is_subset(&gb));
        let commutative = s.system().generators(&small);
        let projected: Vec<_> = gs.iter().map(|g| g.commutatize()).collect();
        for g in commutative.iter() {
            prop_assert!(projected.contains(g));
        }
        prop_assert!(projected.iter().all(|g| commutative.contains(g)));
    }
}

#[test]
fn out_of_chart_flags_are_rejected() {
    let ft = gr24();
    let m = NumericFlagMatrix::from_integers(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
    assert!(evaluate_chart_coordinates(&m, &AdmissibleSequence::reference(&ft)).is_ok());
    let err = evaluate_chart_coordinates(&m, &AdmissibleSequence::parse(&ft, "3,4").unwrap()).unwrap_err();
    assert!(err.to_string().contains("3,4"), "{err}");
    let rank_one = NumericFlagMatrix::from_integers(&[&[1, 2, 3, 4], &[2, 4, 6, 8]]);
    assert!(evaluate_chart_coordinates(&rank_one, &AdmissibleSequence::reference(&ft)).is_err());
}
