#![allow(dead_code)]

use covercert::covering::{Congruence, CoveringSystem};
use covercert::{FieldCtx, Poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(p, k)` for q = 2, 3, 4, 5.
pub const FIELDS: [(u64, u32); 4] = [(2, 1), (3, 1), (2, 2), (5, 1)];

/// Residue spaces stay at or below this many elements.
pub const MAX_RESIDUES: u64 = 4096;

pub fn random_poly(ctx: &FieldCtx, rng: &mut ChaCha8Rng, degree_below: usize) -> Poly {
    let coeffs = (0..degree_below)
        .map(|_| ctx.elem(rng.gen_range(0..ctx.q() as u64)).unwrap())
        .collect();
    Poly::from_coeffs(coeffs)
}

pub fn random_monic(ctx: &FieldCtx, rng: &mut ChaCha8Rng, degree: usize) -> Poly {
    let mut coeffs: Vec<_> = (0..degree)
        .map(|_| ctx.elem(rng.gen_range(0..ctx.q() as u64)).unwrap())
        .collect();
    coeffs.push(ctx.elem(1).unwrap());
    Poly::from_coeffs(coeffs)
}

/// A small random system whose lcm has at most [`MAX_RESIDUES`] residues.
pub fn random_system(seed: u64) -> CoveringSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (p, k) = FIELDS[rng.gen_range(0..FIELDS.len())];
    let ctx = FieldCtx::new(p, k).unwrap();
    let q = ctx.q() as u64;
    let max_deg = (1..).take_while(|d| q.pow(*d) <= MAX_RESIDUES).last().unwrap() as usize;
    let wanted = rng.gen_range(1..=8);
    let mut lcm = Poly::one();
    let mut congruences = Vec::new();
    for _ in 0..wanted * 4 {
        if congruences.len() == wanted {
            break;
        }
        let d = rng.gen_range(1..=max_deg.min(4));
        let m = random_monic(&ctx, &mut rng, d);
        let next = lcm.lcm(&m, &ctx).unwrap();
        if next.degree().unwrap() > max_deg {
            continue;
        }
        lcm = next;
        let a = random_poly(&ctx, &mut rng, d);
        congruences.push(Congruence::new(&ctx, &a, &m).unwrap());
    }
    // Occasionally close the system off with every class of one modulus so
    // that covering systems show up too.
    if rng.gen_bool(0.1) {
        let m = congruences[0].modulus().clone();
        let size = q.pow(m.degree().unwrap() as u32);
        for i in 0..size {
            let a = index_poly(&ctx, i);
            congruences.push(Congruence::new(&ctx, &a, &m).unwrap());
        }
    }
    CoveringSystem::new(ctx, congruences).unwrap()
}

/// The residue with enumeration index `i`.
pub fn index_poly(ctx: &FieldCtx, mut i: u64) -> Poly {
    let q = ctx.q() as u64;
    let mut coeffs = Vec::new();
    while i > 0 {
        coeffs.push(ctx.elem(i % q).unwrap());
        i /= q;
    }
    Poly::from_coeffs(coeffs)
}
