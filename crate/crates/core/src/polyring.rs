//! Polynomials over GF(q): arithmetic, gcd/lcm, CRT, residue enumeration,
//! irreducible enumeration and counting, and factorization of moduli.
//!
//! Polynomials are ordered by degree and then by coefficients from the
//! leading term down. For polynomials of one degree this is the residue
//! enumeration order (constant coefficient fastest), so "index order" and
//! the [`Ord`] impl on [`Poly`] agree everywhere.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ff::{FieldCtx, FieldElem};
use crate::text;

/// Default limit on the number of residues any enumeration may touch.
pub const DEFAULT_CAP: u64 = 1 << 24;

/// A polynomial over GF(q), constant term first, without trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<FieldElem>,
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(FieldElem::ONE)
    }

    pub fn x() -> Self {
        Poly {
            coeffs: vec![FieldElem::ZERO, FieldElem::ONE],
        }
    }

    pub fn constant(c: FieldElem) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `c * x^e`.
    pub fn monomial(c: FieldElem, e: usize) -> Self {
        let mut coeffs = vec![FieldElem::ZERO; e + 1];
        coeffs[e] = c;
        Poly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial (degree minus infinity).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0; for sizing only.
    fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> FieldElem {
        self.coeffs.last().copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == FieldElem::ONE
    }

    /// `|f| = q^deg f`, or `None` for zero.
    pub fn norm(&self, ctx: &FieldCtx) -> Option<BigUint> {
        self.degree().map(|d| BigUint::from(ctx.q()).pow(d as u32))
    }

    pub fn add(&self, other: &Poly, ctx: &FieldCtx) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| ctx.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Poly, ctx: &FieldCtx) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| ctx.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn neg(&self, ctx: &FieldCtx) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&c| ctx.neg(c)).collect())
    }

    pub fn scale(&self, c: FieldElem, ctx: &FieldCtx) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, ctx: &FieldCtx) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![FieldElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn pow(&self, mut e: u64, ctx: &FieldCtx) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, ctx);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, ctx);
            }
        }
        acc
    }

    /// Quotient and remainder with `deg r < deg b`.
    pub fn divrem(&self, b: &Poly, ctx: &FieldCtx) -> Result<(Poly, Poly)> {
        let db = b.degree().ok_or(Error::DivisionByZero)?;
        let inv_lead = ctx.inv(b.leading())?;
        let mut r = self.coeffs.clone();
        if r.len() <= db {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![FieldElem::ZERO; r.len() - db];
        for d in (db..r.len()).rev() {
            let c = r[d];
            if c.is_zero() {
                continue;
            }
            let f = ctx.mul(c, inv_lead);
            quot[d - db] = f;
            for (i, &bc) in b.coeffs.iter().enumerate() {
                let idx = d - db + i;
                r[idx] = ctx.sub(r[idx], ctx.mul(f, bc));
            }
        }
        r.truncate(db);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(r)))
    }

    pub fn rem(&self, b: &Poly, ctx: &FieldCtx) -> Result<Poly> {
        Ok(self.divrem(b, ctx)?.1)
    }

    /// The monic associate; zero stays zero.
    pub fn monic(&self, ctx: &FieldCtx) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = ctx.inv(self.leading()).expect("nonzero leading coefficient");
        self.scale(inv, ctx)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly, ctx: &FieldCtx) -> Result<Poly> {
        if self.is_zero() && other.is_zero() {
            return Err(Error::BothZero);
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, ctx)?;
            a = b;
            b = r;
        }
        Ok(a.monic(ctx))
    }

    /// Monic lcm; the lcm with zero is zero.
    pub fn lcm(&self, other: &Poly, ctx: &FieldCtx) -> Result<Poly> {
        let g = self.gcd(other, ctx)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero());
        }
        let (q, _) = self.monic(ctx).divrem(&g, ctx)?;
        Ok(q.mul(&other.monic(ctx), ctx))
    }

    /// `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Poly, ctx: &FieldCtx) -> Result<(Poly, Poly, Poly)> {
        if self.is_zero() && other.is_zero() {
            return Err(Error::BothZero);
        }
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (qt, r) = r0.divrem(&r1, ctx)?;
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&qt.mul(&s1, ctx), ctx);
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&qt.mul(&t1, ctx), ctx);
            t0 = std::mem::replace(&mut t1, t);
        }
        let inv = ctx.inv(r0.leading())?;
        Ok((r0.scale(inv, ctx), s0.scale(inv, ctx), t0.scale(inv, ctx)))
    }

    pub fn divides(&self, other: &Poly, ctx: &FieldCtx) -> bool {
        !self.is_zero() && other.rem(self, ctx).map(|r| r.is_zero()).unwrap_or(false)
    }

    pub fn eval(&self, a: FieldElem, ctx: &FieldCtx) -> FieldElem {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElem::ZERO, |acc, &c| ctx.add(ctx.mul(acc, a), c))
    }

    /// `f(u*x + v)`.
    pub fn compose_affine(&self, u: FieldElem, v: FieldElem, ctx: &FieldCtx) -> Poly {
        let lin = Poly::from_coeffs(vec![v, u]);
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, &c| {
            acc.mul(&lin, ctx).add(&Poly::constant(c), ctx)
        })
    }

    /// Applies a field map to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(FieldElem) -> FieldElem) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&c| f(c)).collect())
    }

    /// Text form in the shared polynomial grammar, highest degree first.
    pub fn format(&self, ctx: &FieldCtx) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut terms = Vec::new();
        for (e, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mut cs = ctx.format(c);
            if cs.contains('+') {
                cs = format!("({cs})");
            }
            let xpart = match e {
                0 => String::new(),
                1 => "x".to_string(),
                e => format!("x^{e}"),
            };
            let term = if e == 0 {
                cs
            } else if c == FieldElem::ONE {
                xpart
            } else {
                format!("{cs}*{xpart}")
            };
            terms.push(term);
        }
        terms.join("+")
    }

    pub fn parse(s: &str, ctx: &FieldCtx) -> Result<Poly> {
        let biv = text::parse_bivariate(s, ctx.p() as u64, true, ctx.k() > 1)?;
        let max_x = biv.keys().map(|&(xe, _)| xe).max().unwrap_or(0) as usize;
        let mut coeffs = vec![FieldElem::ZERO; max_x + 1];
        for ((xe, te), c) in biv {
            let term = ctx.mul(ctx.from_int(c), ctx.t_power(te));
            coeffs[xe as usize] = ctx.add(coeffs[xe as usize], term);
        }
        Ok(Poly::from_coeffs(coeffs))
    }
}

/// Checks `q^deg <= cap` and returns `q^deg`.
pub(crate) fn checked_size(q: u32, deg: usize, cap: u64) -> Result<u64> {
    let required = (q as u128).checked_pow(deg as u32).unwrap_or(u128::MAX);
    if required > cap as u128 || required > u32::MAX as u128 {
        return Err(Error::CapExceeded { required, cap });
    }
    Ok(required as u64)
}

/// The residue ring F_q[x]/(m), addressed by enumeration index.
///
/// Index `i` is the polynomial whose coefficients are the base-q digits of
/// `i`, constant coefficient least significant.
#[derive(Clone, Debug)]
pub struct ResidueSpace {
    modulus: Poly,
    degree: usize,
    size: u64,
}

impl ResidueSpace {
    pub fn new(ctx: &FieldCtx, modulus: &Poly, cap: u64) -> Result<Self> {
        let modulus = modulus.monic(ctx);
        let degree = match modulus.degree() {
            Some(d) if d >= 1 => d,
            _ => {
                return Err(Error::InvalidModulus(format!(
                    "modulus {} must have degree at least 1",
                    modulus.format(ctx)
                )))
            }
        };
        let size = checked_size(ctx.q(), degree, cap)?;
        Ok(ResidueSpace {
            modulus,
            degree,
            size,
        })
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    /// Index of a polynomial of degree below `deg m` (reduced first otherwise).
    pub fn index_of(&self, f: &Poly, ctx: &FieldCtx) -> u64 {
        let reduced;
        let f = if f.coeffs.len() > self.degree {
            reduced = f.rem(&self.modulus, ctx).expect("nonzero modulus");
            &reduced
        } else {
            f
        };
        poly_index(f, ctx.q())
    }

    pub fn poly_at(&self, idx: u64, ctx: &FieldCtx) -> Poly {
        debug_assert!(idx < self.size);
        poly_from_index(idx, ctx.q())
    }

    pub fn iter<'a>(&'a self, ctx: &'a FieldCtx) -> impl Iterator<Item = Poly> + 'a {
        (0..self.size).map(move |i| self.poly_at(i, ctx))
    }

    /// For every residue index mod `m`, the index of its reduction mod
    /// `target`. `target` need not divide `m`.
    pub fn reduction_table(&self, target: &Poly, ctx: &FieldCtx) -> Vec<u32> {
        let target = target.monic(ctx);
        let q = ctx.q() as u64;
        let n = self.size as usize;
        let tdeg = target.deg0();
        if tdeg == 0 {
            return vec![0; n];
        }
        let tsize = q.pow(tdeg as u32);
        if tdeg >= self.degree {
            // Residues are already reduced.
            return (0..n as u32).collect();
        }
        let mulx = mul_x_table(&target, tdeg, ctx);
        let mut red = vec![0u32; n];
        for (r, slot) in red.iter_mut().enumerate().take(q as usize) {
            *slot = r as u32;
        }
        debug_assert!(q <= tsize);
        for r in q as usize..n {
            let d0 = FieldElem((r as u64 % q) as u32);
            let shifted = mulx[red[r / q as usize] as usize] as u64;
            let low = FieldElem((shifted % q) as u32);
            let new_low = ctx.add(low, d0).index() as u64;
            red[r] = (shifted - low.index() as u64 + new_low) as u32;
        }
        red
    }
}

/// `idx -> index of x * poly(idx) mod target` over all residues of `target`.
fn mul_x_table(target: &Poly, tdeg: usize, ctx: &FieldCtx) -> Vec<u32> {
    let q = ctx.q() as u64;
    let tsize = q.pow(tdeg as u32);
    let top = q.pow(tdeg as u32 - 1);
    // x^tdeg = -(lower part of target)
    let lower: Vec<FieldElem> = (0..tdeg).map(|i| ctx.neg(target.coeff(i))).collect();
    let mut out = Vec::with_capacity(tsize as usize);
    for s in 0..tsize {
        let c = FieldElem((s / top) as u32);
        let shifted = (s % top) * q;
        if c.is_zero() {
            out.push(shifted as u32);
            continue;
        }
        let mut digits = shifted;
        let mut idx = 0u64;
        let mut place = 1u64;
        for &l in &lower {
            let d = FieldElem((digits % q) as u32);
            digits /= q;
            let v = ctx.add(d, ctx.mul(c, l));
            idx += v.index() as u64 * place;
            place *= q;
        }
        out.push(idx as u32);
    }
    out
}

pub(crate) fn poly_index(f: &Poly, q: u32) -> u64 {
    f.coeffs
        .iter()
        .rev()
        .fold(0u64, |acc, c| acc * q as u64 + c.index() as u64)
}

pub(crate) fn poly_from_index(mut idx: u64, q: u32) -> Poly {
    let mut coeffs = Vec::new();
    while idx > 0 {
        coeffs.push(FieldElem((idx % q as u64) as u32));
        idx /= q as u64;
    }
    Poly::from_coeffs(coeffs)
}

/// All residues of F_q[x]/(m) in enumeration order.
pub fn residues_mod(ctx: &FieldCtx, m: &Poly, cap: u64) -> Result<Vec<Poly>> {
    let space = ResidueSpace::new(ctx, m, cap)?;
    Ok(space.iter(ctx).collect())
}

/// Intersection of `r1 + (m1)` and `r2 + (m2)`: the class `r mod lcm`, or
/// `None` when the classes are disjoint.
pub fn crt_pair(
    ctx: &FieldCtx,
    r1: &Poly,
    m1: &Poly,
    r2: &Poly,
    m2: &Poly,
) -> Result<Option<(Poly, Poly)>> {
    if m1.is_zero() || m2.is_zero() {
        return Err(Error::InvalidModulus("zero modulus".into()));
    }
    let m1 = m1.monic(ctx);
    let m2 = m2.monic(ctx);
    let (g, s, _) = m1.ext_gcd(&m2, ctx)?;
    let diff = r2.sub(r1, ctx);
    let (k, rem) = diff.divrem(&g, ctx)?;
    if !rem.is_zero() {
        return Ok(None);
    }
    // s*m1 = g mod m2, so r1 + m1*s*k hits r2 mod m2.
    let (m2g, _) = m2.divrem(&g, ctx)?;
    let t = s.mul(&k, ctx).rem(&m2g, ctx)?;
    let modulus = m1.mul(&m2g, ctx);
    let r = r1.add(&m1.mul(&t, ctx), ctx).rem(&modulus, ctx)?;
    Ok(Some((r, modulus)))
}

/// Ben-Or irreducibility test: no `gcd(x^{q^i} - x, f)` for `i <= n/2` is
/// nontrivial.
pub fn is_irreducible(ctx: &FieldCtx, f: &Poly) -> bool {
    let f = f.monic(ctx);
    let n = match f.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let x = Poly::x();
    let mut h = x.clone();
    for _ in 1..=n / 2 {
        h = pow_mod(&h, ctx.q() as u64, &f, ctx);
        let g = h.sub(&x, ctx).gcd(&f, ctx).expect("f nonzero");
        if g != Poly::one() {
            return false;
        }
    }
    true
}

fn pow_mod(base: &Poly, mut e: u64, m: &Poly, ctx: &FieldCtx) -> Poly {
    let mut acc = Poly::one();
    let mut b = base.rem(m, ctx).expect("nonzero modulus");
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b, ctx).rem(m, ctx).expect("nonzero modulus");
        }
        e >>= 1;
        if e > 0 {
            b = b.mul(&b, ctx).rem(m, ctx).expect("nonzero modulus");
        }
    }
    acc
}

/// All monic polynomials of degree `n`, in index order.
pub fn monic_of_degree(ctx: &FieldCtx, n: usize, cap: u64) -> Result<impl Iterator<Item = Poly> + '_> {
    let count = checked_size(ctx.q(), n, cap)?;
    Ok((0..count).map(move |lower| {
        let mut p = poly_from_index(lower, ctx.q());
        let mut coeffs = std::mem::take(&mut p.coeffs);
        coeffs.resize(n, FieldElem::ZERO);
        coeffs.push(FieldElem::ONE);
        Poly::from_coeffs(coeffs)
    }))
}

/// Monic irreducibles of degree `n` in index order.
pub fn irreducibles_of_degree(ctx: &FieldCtx, n: usize, cap: u64) -> Result<Vec<Poly>> {
    if n == 0 {
        return Err(Error::InvalidInput("degree must be positive".into()));
    }
    Ok(monic_of_degree(ctx, n, cap)?
        .filter(|f| is_irreducible(ctx, f))
        .collect())
}

fn mobius(mut n: u64) -> i32 {
    let mut result = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of monic irreducibles of degree `n` over GF(q):
/// `(1/n) * sum_{d | n} mu(d) q^{n/d}`.
pub fn count_irreducibles(q: u64, n: u32) -> BigUint {
    assert!(n >= 1, "degree must be positive");
    let mut acc = BigInt::zero();
    let qb = BigInt::from(q);
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        let mu = mobius(d as u64);
        if mu != 0 {
            acc += qb.pow(n / d) * mu;
        }
    }
    let (quot, rem) = (acc.clone() / n, acc % n);
    debug_assert!(rem.is_zero());
    quot.to_biguint().expect("count is nonnegative")
}

/// A prime-power factorization, primes sorted by (degree, index order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn product(&self, ctx: &FieldCtx) -> Poly {
        self.factors
            .iter()
            .fold(Poly::one(), |acc, (p, e)| acc.mul(&p.pow(*e as u64, ctx), ctx))
    }

    pub fn primes(&self) -> impl Iterator<Item = &Poly> {
        self.factors.iter().map(|(p, _)| p)
    }
}

/// Trial division of `monic(m)` by irreducibles of increasing degree; what
/// remains after degree `deg/2` is prime.
pub fn factor(ctx: &FieldCtx, m: &Poly, cap: u64) -> Result<Factorization> {
    let mut rest = m.monic(ctx);
    match rest.degree() {
        Some(d) if d >= 1 => {}
        _ => {
            return Err(Error::InvalidModulus(format!(
                "cannot factor {}",
                rest.format(ctx)
            )))
        }
    }
    let mut factors = Vec::new();
    let mut d = 1usize;
    while rest.deg0() >= 2 * d {
        for p in irreducibles_of_degree(ctx, d, cap)? {
            let mut e = 0u32;
            loop {
                let (quot, r) = rest.divrem(&p, ctx)?;
                if !r.is_zero() {
                    break;
                }
                rest = quot;
                e += 1;
            }
            if e > 0 {
                factors.push((p, e));
            }
            if rest.deg0() < 2 * d {
                break;
            }
        }
        d += 1;
    }
    if rest.deg0() >= 1 {
        match factors.iter_mut().find(|(p, _)| *p == rest) {
            Some((_, e)) => *e += 1,
            None => factors.push((rest, 1)),
        }
    }
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Factorization { factors })
}

/// Lcm of a list of moduli.
pub fn lcm_all<'a>(ctx: &FieldCtx, polys: impl IntoIterator<Item = &'a Poly>) -> Result<Poly> {
    polys
        .into_iter()
        .try_fold(Poly::one(), |acc, p| acc.lcm(p, ctx))
}
