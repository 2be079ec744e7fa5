//! Covering systems of F_q[x]: loading, multiplicity, and exhaustive
//! verification modulo the lcm of the moduli.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::FieldCtx;
use crate::polyring::{self, Factorization, Poly, ResidueSpace, DEFAULT_CAP};
use crate::rational::Rational;

/// The class `residue + (modulus)`, modulus monic of degree >= 1 and
/// residue reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    modulus: Poly,
    residue: Poly,
}

impl Congruence {
    pub fn new(ctx: &FieldCtx, residue: &Poly, modulus: &Poly) -> Result<Self> {
        let modulus = modulus.monic(ctx);
        match modulus.degree() {
            Some(d) if d >= 1 => {}
            _ => {
                return Err(Error::InvalidModulus(format!(
                    "{} generates the unit or zero ideal",
                    modulus.format(ctx)
                )))
            }
        }
        let residue = residue.rem(&modulus, ctx)?;
        Ok(Congruence { modulus, residue })
    }

    pub fn residue(&self) -> &Poly {
        &self.residue
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn contains(&self, f: &Poly, ctx: &FieldCtx) -> bool {
        f.sub(&self.residue, ctx)
            .rem(&self.modulus, ctx)
            .map(|r| r.is_zero())
            .unwrap_or(false)
    }

    pub fn format(&self, ctx: &FieldCtx) -> String {
        format!("{} mod {}", self.residue.format(ctx), self.modulus.format(ctx))
    }
}

/// On-disk form: `{"p": 2, "k": 1, "congruences": [{"residue": "1", "modulus": "x^2+x"}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemFile {
    pub p: u64,
    pub k: u32,
    pub congruences: Vec<CongruenceText>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceText {
    pub residue: String,
    pub modulus: String,
}

/// A finite list of congruences with its lcm, the factorization of the lcm
/// and the multiplicity.
#[derive(Clone, Debug)]
pub struct CoveringSystem {
    ctx: FieldCtx,
    congruences: Vec<Congruence>,
    lcm: Poly,
    factorization: Factorization,
    multiplicity: usize,
    cap: u64,
}

/// Outcome of the exhaustive check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coverage {
    pub covers: bool,
    /// First uncovered residue in enumeration order.
    pub witness: Option<Poly>,
}

impl CoveringSystem {
    pub fn new(ctx: FieldCtx, congruences: Vec<Congruence>) -> Result<Self> {
        Self::with_cap(ctx, congruences, DEFAULT_CAP)
    }

    pub fn with_cap(ctx: FieldCtx, congruences: Vec<Congruence>, cap: u64) -> Result<Self> {
        if congruences.is_empty() {
            return Err(Error::InvalidInput("a covering system needs at least one congruence".into()));
        }
        let mut counts: HashMap<&Poly, usize> = HashMap::new();
        for c in &congruences {
            *counts.entry(&c.modulus).or_default() += 1;
        }
        let multiplicity = counts.values().copied().max().unwrap_or(0);
        let lcm = polyring::lcm_all(&ctx, congruences.iter().map(|c| &c.modulus))?;

        // Factor each distinct modulus and keep the largest exponents.
        let mut exps: HashMap<Poly, u32> = HashMap::new();
        for m in counts.keys() {
            for (p, e) in polyring::factor(&ctx, m, cap)?.factors {
                let slot = exps.entry(p).or_default();
                *slot = (*slot).max(e);
            }
        }
        let mut factors: Vec<(Poly, u32)> = exps.into_iter().collect();
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        let factorization = Factorization { factors };
        debug_assert_eq!(factorization.product(&ctx), lcm);

        Ok(CoveringSystem {
            ctx,
            congruences,
            lcm,
            factorization,
            multiplicity,
            cap,
        })
    }

    /// Parses the JSON system format.
    pub fn load(text: &[u8]) -> Result<Self> {
        Self::load_with_cap(text, DEFAULT_CAP)
    }

    pub fn load_with_cap(text: &[u8], cap: u64) -> Result<Self> {
        let file: SystemFile = serde_json::from_slice(text).map_err(|e| {
            Error::parse(byte_offset(text, e.line(), e.column()), e.to_string())
        })?;
        Self::from_file(&file, cap)
    }

    pub fn from_file(file: &SystemFile, cap: u64) -> Result<Self> {
        let ctx = FieldCtx::new(file.p, file.k)?;
        let mut congruences = Vec::with_capacity(file.congruences.len());
        for (i, c) in file.congruences.iter().enumerate() {
            let within = |field: &str, e: Error| match e {
                Error::Parse { pos, msg } => Error::parse(pos, format!("congruence {i} {field}: {msg}")),
                other => other,
            };
            let residue = Poly::parse(&c.residue, &ctx).map_err(|e| within("residue", e))?;
            let modulus = Poly::parse(&c.modulus, &ctx).map_err(|e| within("modulus", e))?;
            congruences.push(Congruence::new(&ctx, &residue, &modulus)?);
        }
        Self::with_cap(ctx, congruences, cap)
    }

    pub fn to_file(&self) -> SystemFile {
        SystemFile {
            p: self.ctx.p() as u64,
            k: self.ctx.k(),
            congruences: self
                .congruences
                .iter()
                .map(|c| CongruenceText {
                    residue: c.residue.format(&self.ctx),
                    modulus: c.modulus.format(&self.ctx),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("plain data serializes")
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn congruences(&self) -> &[Congruence] {
        &self.congruences
    }

    /// `Q`, the lcm of all moduli.
    pub fn lcm(&self) -> &Poly {
        &self.lcm
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    /// Largest number of congruences sharing one modulus.
    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn residue_space(&self) -> Result<ResidueSpace> {
        ResidueSpace::new(&self.ctx, &self.lcm, self.cap)
    }

    /// Bitset over residues mod `Q` marking those in some congruence.
    pub fn covered_set(&self, threads: usize) -> Result<(ResidueSpace, FixedBitSet)> {
        let space = self.residue_space()?;
        let n = space.size() as usize;
        let mut by_modulus: HashMap<&Poly, Vec<u32>> = HashMap::new();
        for c in &self.congruences {
            by_modulus
                .entry(&c.modulus)
                .or_default()
                .push(space.index_of(&c.residue, &self.ctx) as u32);
        }
        let tables: Vec<(Vec<u32>, FixedBitSet)> = by_modulus
            .into_iter()
            .map(|(m, residues)| {
                let table = space.reduction_table(m, &self.ctx);
                let msize = polyring::checked_size(self.ctx.q(), m.degree().unwrap_or(0), u64::MAX)
                    .expect("divisor of Q fits") as usize;
                let mut hit = FixedBitSet::with_capacity(msize);
                for r in residues {
                    hit.insert(r as usize);
                }
                (table, hit)
            })
            .collect();
        let mark = |range: std::ops::Range<usize>| -> FixedBitSet {
            let mut local = FixedBitSet::with_capacity(range.len());
            for (off, r) in range.enumerate() {
                if tables.iter().any(|(t, hit)| hit.contains(t[r] as usize)) {
                    local.insert(off);
                }
            }
            local
        };
        let covered = if threads <= 1 {
            mark(0..n)
        } else {
            let chunk = n.div_ceil(threads).max(1);
            let parts: Vec<(usize, FixedBitSet)> = with_pool(threads, || {
                (0..n)
                    .step_by(chunk)
                    .collect::<Vec<_>>()
                    .into_par_iter()
                    .map(|start| (start, mark(start..(start + chunk).min(n))))
                    .collect()
            });
            let mut all = FixedBitSet::with_capacity(n);
            for (start, part) in parts {
                for off in part.ones() {
                    all.insert(start + off);
                }
            }
            all
        };
        Ok((space, covered))
    }

    /// Residues mod `Q` outside every congruence, in enumeration order.
    pub fn uncovered(&self) -> Result<Vec<Poly>> {
        let (space, covered) = self.covered_set(1)?;
        Ok(covered
            .zeroes()
            .map(|i| space.poly_at(i as u64, &self.ctx))
            .collect())
    }

    pub fn covers(&self) -> Result<Coverage> {
        self.covers_with_threads(1)
    }

    /// Parallel check; the witness is still the globally first uncovered
    /// residue.
    pub fn covers_with_threads(&self, threads: usize) -> Result<Coverage> {
        let (space, covered) = self.covered_set(threads)?;
        let witness = covered.zeroes().next().map(|i| space.poly_at(i as u64, &self.ctx));
        Ok(Coverage {
            covers: witness.is_none(),
            witness,
        })
    }

    /// `|uncovered| / q^deg Q`.
    pub fn uncovered_density(&self) -> Result<Rational> {
        let (space, covered) = self.covered_set(1)?;
        let missing = space.size() as usize - covered.count_ones(..);
        Ok(Rational::new(BigInt::from(missing), BigInt::from(space.size())))
    }
}

pub(crate) fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

fn byte_offset(text: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for (i, l) in text.split(|&b| b == b'\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)).min(text.len());
        }
        offset += l.len() + 1;
    }
    text.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn system(p: u64, congs: &[(&str, &str)]) -> CoveringSystem {
        let ctx = FieldCtx::new(p, 1).unwrap();
        let congruences = congs
            .iter()
            .map(|(r, m)| {
                Congruence::new(&ctx, &Poly::parse(r, &ctx).unwrap(), &Poly::parse(m, &ctx).unwrap()).unwrap()
            })
            .collect();
        CoveringSystem::new(ctx, congruences).unwrap()
    }

    const THREE_CLASS: &str = r#"{"p": 2, "k": 1, "congruences": [
        {"residue": "0", "modulus": "x"},
        {"residue": "0", "modulus": "x+1"},
        {"residue": "1", "modulus": "x^2+x"}]}"#;

    #[test]
    fn load_and_multiplicity() {
        let sys = CoveringSystem::load(THREE_CLASS.as_bytes()).unwrap();
        assert_eq!(sys.congruences().len(), 3);
        assert_eq!(sys.lcm().format(sys.ctx()), "x^2+x");
        assert_eq!(sys.multiplicity(), 1);

        let sys = system(2, &[("0", "x"), ("1", "x")]);
        assert_eq!(sys.multiplicity(), 2);
        assert_eq!(sys.lcm().format(sys.ctx()), "x");
        assert_eq!(system(2, &[("0", "x"), ("1", "x"), ("0", "x+1")]).multiplicity(), 2);
        assert_eq!(system(2, &[("0", "x")]).multiplicity(), 1);
    }

    #[test]
    fn load_errors() {
        let unit = r#"{"p": 2, "k": 1, "congruences": [{"residue": "0", "modulus": "1"}]}"#;
        assert!(matches!(CoveringSystem::load(unit.as_bytes()), Err(Error::InvalidModulus(_))));
        let zero = r#"{"p": 2, "k": 1, "congruences": [{"residue": "0", "modulus": "0"}]}"#;
        assert!(matches!(CoveringSystem::load(zero.as_bytes()), Err(Error::InvalidModulus(_))));
        let empty = r#"{"p": 2, "k": 1, "congruences": []}"#;
        assert!(matches!(CoveringSystem::load(empty.as_bytes()), Err(Error::InvalidInput(_))));
        let broken = "{\"p\": 2,\n \"k\": }";
        assert!(matches!(CoveringSystem::load(broken.as_bytes()), Err(Error::Parse { pos, .. }) if pos > 8));
        let bad_poly = r#"{"p": 2, "k": 1, "congruences": [{"residue": "0", "modulus": "x^^2"}]}"#;
        assert!(matches!(CoveringSystem::load(bad_poly.as_bytes()), Err(Error::Parse { .. })));
    }

    #[test]
    fn normalizes_moduli_and_residues() {
        let sys = system(3, &[("x^2+2", "2*x+2")]);
        let c = &sys.congruences()[0];
        assert_eq!(c.modulus().format(sys.ctx()), "x+1");
        // x^2 + 2 at x = -1 is 1 + 2 = 0.
        assert_eq!(c.residue().format(sys.ctx()), "0");
    }

    #[test]
    fn coverage_examples() {
        let sys = CoveringSystem::load(THREE_CLASS.as_bytes()).unwrap();
        assert!(sys.uncovered().unwrap().is_empty());
        assert_eq!(sys.uncovered_density().unwrap(), rat(0, 1));

        let half = system(2, &[("0", "x")]);
        let fmt: Vec<String> = half.uncovered().unwrap().iter().map(|p| p.format(half.ctx())).collect();
        assert_eq!(fmt, ["1"]);
        assert_eq!(half.uncovered_density().unwrap(), rat(1, 2));

        assert!(system(2, &[("0", "x"), ("1", "x")]).covers().unwrap().covers);

        // Residues mod x^2+x in order 0, 1, x, x+1; 0 mod x takes 0 and x,
        // 1 mod x+1 takes residues with f(1) = 1, i.e. 1 and x.
        let sys = system(2, &[("0", "x"), ("1", "x+1")]);
        let cov = sys.covers().unwrap();
        assert!(!cov.covers);
        assert_eq!(cov.witness.unwrap().format(sys.ctx()), "x+1");
    }

    #[test]
    fn parallel_witness_is_global_minimum() {
        let sys = system(2, &[("0", "x"), ("0", "x^3+x+1"), ("1", "x^4+x+1"), ("x", "x^2+x+1")]);
        let serial = sys.covers().unwrap();
        for threads in [2, 3, 8] {
            assert_eq!(sys.covers_with_threads(threads).unwrap(), serial);
        }
    }

    #[test]
    fn json_round_trip() {
        let sys = CoveringSystem::load(THREE_CLASS.as_bytes()).unwrap();
        let again = CoveringSystem::load(sys.to_json().as_bytes()).unwrap();
        assert_eq!(again.congruences(), sys.congruences());
    }
}
