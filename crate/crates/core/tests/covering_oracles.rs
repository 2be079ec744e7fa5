mod common;

use covercert::covering::{Congruence, CoveringSystem};
use covercert::polyring::crt_pair;
use covercert::rational::{int, Rational};
use covercert::{FieldCtx, Poly};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Density of the union by inclusion-exclusion over subsets, intersecting
/// classes pairwise with the CRT.
fn inclusion_exclusion(sys: &CoveringSystem) -> Rational {
    let ctx = sys.ctx();
    let congs = sys.congruences();
    let q = BigInt::from(ctx.q());
    let mut union = Rational::zero();
    for mask in 1u32..(1 << congs.len()) {
        let mut class: Option<(Poly, Poly)> = None;
        let mut empty = false;
        for (i, c) in congs.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            class = match class.take() {
                None => Some((c.residue().clone(), c.modulus().clone())),
                Some((r, m)) => match crt_pair(ctx, &r, &m, c.residue(), c.modulus()).unwrap() {
                    Some(rm) => Some(rm),
                    None => {
                        empty = true;
                        break;
                    }
                },
            };
        }
        if empty {
            continue;
        }
        let (_, m) = class.unwrap();
        let density = Rational::new(BigInt::one(), q.pow(m.degree().unwrap() as u32));
        if mask.count_ones() % 2 == 1 {
            union += density;
        } else {
            union -= density;
        }
    }
    Rational::one() - union
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn density_matches_inclusion_exclusion(seed in any::<u64>()) {
        let sys = common::random_system(seed);
        prop_assume!(sys.congruences().len() <= 12);
        prop_assert_eq!(sys.uncovered_density().unwrap(), inclusion_exclusion(&sys));
    }

    #[test]
    fn covering_ignores_order_and_representatives(seed in any::<u64>(), rot in 0usize..16) {
        let sys = common::random_system(seed);
        let ctx = sys.ctx().clone();
        let mut shifted: Vec<Congruence> = sys
            .congruences()
            .iter()
            .map(|c| {
                let t = Poly::x().add(&Poly::one(), &ctx);
                let a = c.residue().add(&t.mul(c.modulus(), &ctx), &ctx);
                Congruence::new(&ctx, &a, c.modulus()).unwrap()
            })
            .collect();
        let n = shifted.len();
        shifted.rotate_left(rot % n);
        let other = CoveringSystem::new(ctx, shifted).unwrap();
        prop_assert_eq!(sys.covers().unwrap(), other.covers().unwrap());
        prop_assert_eq!(sys.uncovered_density().unwrap(), other.uncovered_density().unwrap());
    }

    #[test]
    fn parallel_witness_is_the_first(seed in any::<u64>()) {
        let sys = common::random_system(seed);
        prop_assert_eq!(sys.covers().unwrap(), sys.covers_with_threads(4).unwrap());
    }
}

#[test]
fn disjoint_families() {
    // 0 mod x, 1 mod x^2, x+1 mod x^3, ... over GF(q): pairwise disjoint.
    for (p, k) in common::FIELDS {
        let ctx = FieldCtx::new(p, k).unwrap();
        let q = ctx.q() as u64;
        let mut congs = Vec::new();
        let mut expected = Rational::one();
        for d in 1..=3usize {
            let m = Poly::monomial(ctx.elem(1).unwrap(), d);
            let a = Poly::parse(["0", "1", "x+1"][d - 1], &ctx).unwrap();
            congs.push(Congruence::new(&ctx, &a, &m).unwrap());
            expected -= Rational::new(BigInt::one(), BigInt::from(q.pow(d as u32)));
        }
        let sys = CoveringSystem::new(ctx, congs).unwrap();
        assert_eq!(sys.uncovered_density().unwrap(), expected, "q = {q}");
        assert_eq!(inclusion_exclusion(&sys), expected);
    }
}

#[test]
fn complete_residue_sets_cover() {
    for (p, k) in common::FIELDS {
        let ctx = FieldCtx::new(p, k).unwrap();
        let m = Poly::parse("x^2+1", &ctx).unwrap();
        let congs = (0..(ctx.q() as u64).pow(2))
            .map(|i| Congruence::new(&ctx, &common::index_poly(&ctx, i), &m).unwrap())
            .collect();
        let sys = CoveringSystem::new(ctx, congs).unwrap();
        assert!(sys.covers().unwrap().covers);
        assert_eq!(sys.uncovered_density().unwrap(), int(0));
    }
}
