//! Exact arithmetic in GF(q), q = p^k.
//!
//! Elements are stored packed: the element `c_0 + c_1 t + ... + c_{k-1} t^{k-1}`
//! has index `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`. The constant coefficient is
//! the fastest digit, which is also the order used when residues are
//! enumerated. An element carries no reference to its field; every operation
//! takes the [`FieldCtx`] explicitly.

use std::fmt;

use crate::error::{Error, Result};
use crate::polyring::{self, Poly};
use crate::text;

/// An element of GF(q) in packed power-basis form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem(pub(crate) u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    /// Packed index in `[0, q)`.
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Precomputed multiplication data for small extension fields.
#[derive(Clone, Debug)]
struct LogTables {
    log: Vec<u32>,
    exp: Vec<u32>,
}

/// An immutable description of GF(p^k).
#[derive(Clone)]
pub struct FieldCtx {
    p: u32,
    k: u32,
    q: u32,
    /// Monic irreducible of degree `k` over GF(p), constant term first.
    modulus: Option<Vec<u32>>,
    tables: Option<LogTables>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

const TABLE_LIMIT: u32 = 1 << 16;

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldCtx {
    /// Builds GF(p^k). For `k > 1` the modulus is the smallest monic
    /// irreducible of degree `k` over GF(p), comparing coefficient vectors
    /// lexicographically starting from the constant term.
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidInput("extension degree must be at least 1".into()));
        }
        let q = (p as u128)
            .checked_pow(k)
            .filter(|&q| q <= u32::MAX as u128)
            .ok_or(Error::Overflow { p, k })? as u32;
        let p32 = p as u32;
        if k == 1 {
            return Ok(FieldCtx {
                p: p32,
                k,
                q,
                modulus: None,
                tables: None,
            });
        }
        let modulus = smallest_irreducible(p, k);
        let mut ctx = FieldCtx {
            p: p32,
            k,
            q,
            modulus: Some(modulus),
            tables: None,
        };
        if q <= TABLE_LIMIT {
            ctx.tables = Some(ctx.build_tables());
        }
        Ok(ctx)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// The defining polynomial in `t`, constant term first, or `None` for a
    /// prime field.
    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    pub fn contains(&self, a: FieldElem) -> bool {
        a.0 < self.q
    }

    /// The element with packed index `n`.
    pub fn elem(&self, n: u64) -> Result<FieldElem> {
        if n < self.q as u64 {
            Ok(FieldElem(n as u32))
        } else {
            Err(Error::ContextMismatch(n))
        }
    }

    /// The element `coeffs[0] + coeffs[1] t + ...`.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElem> {
        if coeffs.len() != self.k as usize {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients, got {}",
                self.k,
                coeffs.len()
            )));
        }
        let mut n = 0u64;
        for &c in coeffs.iter().rev() {
            if c >= self.p {
                return Err(Error::ContextMismatch(c as u64));
            }
            n = n * self.p as u64 + c as u64;
        }
        Ok(FieldElem(n as u32))
    }

    /// Power-basis coefficients, length `k`.
    pub fn coeffs(&self, a: FieldElem) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k as usize);
        let mut n = a.0;
        for _ in 0..self.k {
            out.push(n % self.p);
            n /= self.p;
        }
        out
    }

    /// Iterates every element in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    /// The image of a prime-field integer.
    pub fn from_int(&self, n: u64) -> FieldElem {
        FieldElem((n % self.p as u64) as u32)
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        debug_assert!(self.contains(a) && self.contains(b));
        if self.k == 1 {
            let s = a.0 as u64 + b.0 as u64;
            return FieldElem((s % self.p as u64) as u32);
        }
        self.digitwise(a, b, |x, y, p| (x + y) % p)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        debug_assert!(self.contains(a));
        if self.k == 1 {
            return FieldElem(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        self.digitwise(FieldElem::ZERO, a, |_, y, p| (p - y) % p)
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        debug_assert!(self.contains(a) && self.contains(b));
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        if self.k == 1 {
            return FieldElem((a.0 as u64 * b.0 as u64 % self.p as u64) as u32);
        }
        if let Some(t) = &self.tables {
            let order = self.q as usize - 1;
            let l = (t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize) % order;
            return FieldElem(t.exp[l]);
        }
        self.mul_slow(a, b)
    }

    pub fn pow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let mut base = a;
        let mut acc = FieldElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if !self.contains(a) {
            return Err(Error::ContextMismatch(a.0 as u64));
        }
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            let order = self.q - 1;
            let l = (order - t.log[a.0 as usize]) % order;
            return Ok(FieldElem(t.exp[l as usize]));
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        self.pow(a, self.p as u64)
    }

    /// Text form: a decimal for prime fields, a polynomial in `t` otherwise.
    pub fn format(&self, a: FieldElem) -> String {
        if self.k == 1 {
            return a.0.to_string();
        }
        let coeffs = self.coeffs(a);
        let mut terms = Vec::new();
        for (e, &c) in coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let term = match (e, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".to_string(),
                (1, c) => format!("{c}*t"),
                (e, 1) => format!("t^{e}"),
                (e, c) => format!("{c}*t^{e}"),
            };
            terms.push(term);
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }

    /// Parses the text form produced by [`FieldCtx::format`].
    pub fn parse(&self, s: &str) -> Result<FieldElem> {
        let biv = text::parse_bivariate(s, self.p as u64, false, self.k > 1)?;
        let mut acc = FieldElem::ZERO;
        for ((_, te), c) in biv {
            acc = self.add(acc, self.mul(self.from_int(c), self.t_power(te)));
        }
        Ok(acc)
    }

    /// `t^e` reduced in the field (for prime fields `t` is not defined and
    /// only `e = 0` is meaningful).
    pub(crate) fn t_power(&self, e: u32) -> FieldElem {
        if self.k == 1 {
            return FieldElem::ONE;
        }
        self.pow(self.generator_t(), e as u64)
    }

    fn generator_t(&self) -> FieldElem {
        FieldElem(self.p)
    }

    fn digitwise(&self, a: FieldElem, b: FieldElem, f: impl Fn(u32, u32, u32) -> u32) -> FieldElem {
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.k {
            let d = f(x % self.p, y % self.p, self.p);
            out += d as u64 * place;
            place *= self.p as u64;
            x /= self.p;
            y /= self.p;
        }
        FieldElem(out as u32)
    }

    fn mul_slow(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.p as u64;
        let k = self.k as usize;
        let ac = self.coeffs(a);
        let bc = self.coeffs(b);
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in ac.iter().enumerate() {
            for (j, &y) in bc.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        let modulus = self.modulus.as_ref().expect("extension field has a modulus");
        for d in (k..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (i, &m) in modulus.iter().enumerate().take(k) {
                let idx = d - k + i;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
        }
        let mut n = 0u64;
        for &c in prod[..k].iter().rev() {
            n = n * p + c;
        }
        FieldElem(n as u32)
    }

    fn build_tables(&self) -> LogTables {
        let q = self.q as usize;
        let order = q - 1;
        let mut exp = vec![0u32; order];
        let mut log = vec![0u32; q];
        for g in 2..self.q {
            let g = FieldElem(g);
            let mut x = FieldElem::ONE;
            let mut ok = true;
            for (i, slot) in exp.iter_mut().enumerate() {
                if i > 0 && x == FieldElem::ONE {
                    ok = false;
                    break;
                }
                *slot = x.0;
                x = self.mul_slow(x, g);
            }
            if ok {
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                return LogTables { log, exp };
            }
        }
        unreachable!("the multiplicative group of a finite field is cyclic")
    }
}

/// Smallest monic irreducible of degree `k` over GF(p) under the
/// constant-term-first lexicographic order.
fn smallest_irreducible(p: u64, k: u32) -> Vec<u32> {
    let prime_field = FieldCtx::new(p, 1).expect("p is prime");
    let k = k as usize;
    // Enumerate the k lower coefficients as an odometer whose most
    // significant digit is the constant term.
    let mut lower = vec![0u64; k];
    // A zero constant term means t divides the candidate.
    lower[0] = 1;
    loop {
        let mut coeffs: Vec<FieldElem> = lower.iter().map(|&c| FieldElem(c as u32)).collect();
        coeffs.push(FieldElem::ONE);
        let poly = Poly::from_coeffs(coeffs);
        if polyring::is_irreducible(&prime_field, &poly) {
            return poly.coeffs().iter().map(|c| c.index()).collect();
        }
        let mut i = k;
        loop {
            if i == 0 {
                unreachable!("irreducibles of every degree exist");
            }
            i -= 1;
            lower[i] += 1;
            if lower[i] < p {
                break;
            }
            lower[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prime_field_has_no_modulus() {
        let f = FieldCtx::new(2, 1).unwrap();
        assert_eq!(f.q(), 2);
        assert!(f.modulus().is_none());
    }

    #[test]
    fn smallest_moduli() {
        assert_eq!(FieldCtx::new(2, 2).unwrap().modulus(), Some(&[1, 1, 1][..]));
        assert_eq!(FieldCtx::new(3, 2).unwrap().modulus(), Some(&[1, 0, 1][..]));
        // Constant term compared first: t^3+t^2+1 = (1,0,1,1) precedes t^3+t+1 = (1,1,0,1).
        assert_eq!(FieldCtx::new(2, 3).unwrap().modulus(), Some(&[1, 0, 1, 1][..]));
    }

    #[test]
    fn modulus_matches_brute_force_scan() {
        // Independent oracle: a monic polynomial of degree <= 3 is reducible
        // iff it has a root.
        for &(p, k) in &[(2u64, 2u32), (3, 2), (5, 2), (7, 2), (2, 3), (3, 3)] {
            let mut found = None;
            let mut candidates: Vec<Vec<u64>> = Vec::new();
            for idx in 0..p.pow(k) {
                let mut v = Vec::new();
                let mut m = idx;
                for _ in 0..k {
                    v.push(m % p);
                    m /= p;
                }
                v.push(1);
                candidates.push(v);
            }
            candidates.sort();
            for c in candidates {
                let has_root = (0..p).any(|x| {
                    c.iter().rev().fold(0, |acc, &co| (acc * x + co) % p) == 0
                });
                if !has_root {
                    found = Some(c);
                    break;
                }
            }
            let expect: Vec<u32> = found.unwrap().into_iter().map(|c| c as u32).collect();
            assert_eq!(FieldCtx::new(p, k).unwrap().modulus().unwrap(), &expect[..]);
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FieldCtx::new(4, 1), Err(Error::NotPrime(4)));
        assert_eq!(FieldCtx::new(1, 1), Err(Error::NotPrime(1)));
        assert_eq!(FieldCtx::new(2, 32), Err(Error::Overflow { p: 2, k: 32 }));
        assert!(FieldCtx::new(2, 31).is_ok());
        assert!(FieldCtx::new(2, 0).is_err());
    }

    #[test]
    fn reproducible() {
        assert_eq!(FieldCtx::new(3, 4).unwrap(), FieldCtx::new(3, 4).unwrap());
    }

    #[test]
    fn small_examples() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        assert_eq!(f2.add(FieldElem::ONE, FieldElem::ONE), FieldElem::ZERO);

        let f4 = FieldCtx::new(2, 2).unwrap();
        let t = f4.parse("t").unwrap();
        assert_eq!(f4.format(f4.mul(t, t)), "t+1");

        let f5 = FieldCtx::new(5, 1).unwrap();
        assert_eq!(f5.inv(f5.elem(2).unwrap()), Ok(f5.elem(3).unwrap()));
        assert_eq!(f5.inv(FieldElem::ZERO), Err(Error::DivisionByZero));
        assert_eq!(f5.inv(FieldElem(7)), Err(Error::ContextMismatch(7)));
        assert_eq!(f5.elem(5), Err(Error::ContextMismatch(5)));
    }

    #[test]
    fn fermat_exhaustive_small_fields() {
        for &(p, k) in &[(2u64, 1u32), (2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 2), (61, 1)] {
            let f = FieldCtx::new(p, k).unwrap();
            assert!(f.q() <= 64);
            for a in f.elements().skip(1) {
                assert_eq!(f.pow(a, f.q() as u64 - 1), FieldElem::ONE, "GF({}) a={:?}", f.q(), a);
                let inv = f.inv(a).unwrap();
                assert_eq!(f.mul(a, inv), FieldElem::ONE);
                assert_eq!(f.mul(inv, a), FieldElem::ONE);
            }
        }
    }

    #[test]
    fn table_and_direct_multiplication_agree() {
        let f = FieldCtx::new(3, 3).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.mul(a, b), if a.is_zero() || b.is_zero() { FieldElem::ZERO } else { f.mul_slow(a, b) });
            }
        }
    }

    #[test]
    fn large_field_without_tables() {
        let f = FieldCtx::new(257, 2).unwrap();
        assert!(f.tables.is_none());
        let a = f.elem(12345).unwrap();
        assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElem::ONE);
    }

    #[test]
    fn text_round_trip() {
        let f = FieldCtx::new(3, 3).unwrap();
        for a in f.elements() {
            assert_eq!(f.parse(&f.format(a)).unwrap(), a);
        }
        let f7 = FieldCtx::new(7, 1).unwrap();
        assert_eq!(f7.format(f7.elem(6).unwrap()), "6");
        assert_eq!(f7.parse("13").unwrap(), f7.elem(6).unwrap());
        assert!(f7.parse("t").is_err());
    }

    fn field_strategy() -> impl Strategy<Value = FieldCtx> {
        prop_oneof![
            Just((2u64, 3u32)),
            Just((3, 2)),
            Just((5, 1)),
            Just((13, 1)),
            Just((2, 8)),
            Just((7, 3)),
            Just((65521, 1)),
            Just((251, 3)),
        ]
        .prop_map(|(p, k)| FieldCtx::new(p, k).unwrap())
    }

    proptest! {
        #[test]
        fn ring_axioms(f in field_strategy(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
            let (a, b, c) = (FieldElem(a % f.q()), FieldElem(b % f.q()), FieldElem(c % f.q()));
            prop_assert_eq!(f.add(a, b), f.add(b, a));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(a, f.neg(a)), FieldElem::ZERO);
            if !a.is_zero() {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElem::ONE);
            }
        }
    }
}
