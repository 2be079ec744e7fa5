//! The distortion method, computed exactly.
//!
//! The lcm `Q = P_1^{v_1} ... P_J^{v_J}` is split into stages by prime, in
//! nondecreasing norm order with ties broken by index order. Stage `j`
//! collects the congruences whose modulus divides `Q_j = P_1^{v_1} ...
//! P_j^{v_j}` but not `Q_{j-1}`; their union, lifted to residues mod `Q`,
//! is the set `B_j`. The fiber of a residue at stage `j` is its class mod
//! `Q_{j-1}`, and `alpha_j` is the fraction of that fiber lying in `B_j`.
//!
//! Starting from the uniform measure `P_0`, each stage reweights residues
//! with a threshold `delta_j`:
//!
//! - `alpha < delta`: residues in `B_j` get weight 0, the rest of the fiber
//!   is scaled by `1 / (1 - alpha)`;
//! - `alpha >= delta`: residues in `B_j` are scaled by
//!   `(alpha - delta) / (alpha (1 - delta))`, the rest by `1 / (1 - delta)`.
//!
//! If the moments `M_j^(2) = sum alpha_j^2 P_{j-1}` sum to less than 1 (with
//! every `delta_j = 1/2`), the system does not cover. The mixed criterion
//! `sum min(M_j^(1), M_j^(2) / (4 delta_j (1 - delta_j))) < 1` is also
//! available; its hypotheses at `delta_j -> 0` come from the literature the
//! method is built on and are not re-derived here.
//!
//! Everything is exact. Measures intern their values: a measure is a table
//! of distinct rationals plus one small id per residue, so a stage costs
//! one hash lookup per residue rather than one big-rational product.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::covering::CoveringSystem;
use crate::error::{Error, Result};
use crate::polyring::{Poly, ResidueSpace};
use crate::rational::{self, int, rat, Rational};

/// One prime of `Q` and the congruences that enter with it.
#[derive(Clone, Debug)]
pub struct Stage {
    /// 1-based stage number `j`.
    pub index: usize,
    pub prime: Poly,
    pub exponent: u32,
    /// `Q_j`.
    pub partial_modulus: Poly,
    /// `Q_{j-1}`.
    pub previous_modulus: Poly,
    /// Indices into the system's congruence list.
    pub congruences: Vec<usize>,
    /// `B_j` over residue indices mod `Q`.
    pub covered: FixedBitSet,
    fiber_key: Vec<u32>,
    hits: Vec<u32>,
    fiber_size: u64,
}

impl Stage {
    /// Number of residues mod `Q` in each fiber, `|Q| / |Q_{j-1}|`.
    pub fn fiber_size(&self) -> u64 {
        self.fiber_size
    }

    /// Index of `r`'s reduction mod `Q_{j-1}`.
    pub fn fiber_of(&self, r: usize) -> u32 {
        self.fiber_key[r]
    }

    pub fn fiber_count(&self) -> usize {
        self.hits.len()
    }

    /// `#(F_{j-1}(r) ∩ B_j)`.
    pub fn hits_in_fiber(&self, r: usize) -> u32 {
        self.hits[self.fiber_key[r] as usize]
    }

    /// `alpha_j(r)`.
    pub fn alpha(&self, r: usize) -> Rational {
        Rational::new(BigInt::from(self.hits_in_fiber(r)), BigInt::from(self.fiber_size))
    }
}

/// The staged decomposition of a covering system.
#[derive(Clone, Debug)]
pub struct Stages {
    space: ResidueSpace,
    stages: Vec<Stage>,
}

impl Stages {
    pub fn space(&self) -> &ResidueSpace {
        &self.space
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Stage `j`, 1-based.
    pub fn stage(&self, j: usize) -> &Stage {
        &self.stages[j - 1]
    }

    pub fn alpha(&self, j: usize, r: usize) -> Rational {
        self.stage(j).alpha(r)
    }

    /// `M_j^(k) = sum_r alpha_j(r)^k P(r)`.
    pub fn moment(&self, k: u32, j: usize, measure: &Measure) -> Rational {
        let stage = self.stage(j);
        let mut tally: HashMap<(u32, u32), u64> = HashMap::new();
        for (r, &id) in measure.ids.iter().enumerate() {
            let c = stage.hits_in_fiber(r);
            if c > 0 {
                *tally.entry((c, id)).or_default() += 1;
            }
        }
        let f = BigInt::from(stage.fiber_size);
        let mut acc = Rational::zero();
        for ((c, id), count) in tally {
            let alpha = Rational::new(BigInt::from(c), f.clone());
            acc += num_traits::pow(alpha, k as usize) * &measure.levels[id as usize] * int(count);
        }
        acc
    }

    /// `P_j` from `P_{j-1}`.
    pub fn step(&self, prev: &Measure, j: usize, delta: &Rational) -> Measure {
        let stage = self.stage(j);
        let f = stage.fiber_size;
        let mut out = Measure::builder(prev.ids.len());
        let mut memo: HashMap<(u32, u32, bool), u32> = HashMap::new();
        for (r, &id) in prev.ids.iter().enumerate() {
            let c = stage.hits_in_fiber(r);
            let in_b = stage.covered.contains(r);
            let new_id = *memo.entry((id, c, in_b)).or_insert_with(|| {
                let factor = weight(c, f, in_b, delta);
                out.intern(&prev.levels[id as usize] * factor)
            });
            out.ids.push(new_id);
        }
        out
    }
}

/// The stage-`j` reweighting factor for a residue whose fiber has `c` of
/// `f` residues in `B_j`.
fn weight(c: u32, f: u64, in_b: bool, delta: &Rational) -> Rational {
    let alpha = Rational::new(BigInt::from(c), BigInt::from(f));
    let one = Rational::one();
    if &alpha < delta {
        if in_b {
            Rational::zero()
        } else {
            &one / (&one - &alpha)
        }
    } else if c == 0 {
        // alpha = delta = 0: both branch-2 factors are 1.
        one
    } else if in_b {
        (&alpha - delta) / (&alpha * (&one - delta))
    } else {
        &one / (&one - delta)
    }
}

/// Splits `Q` into stages and materializes every `B_j`.
pub fn build_stages(sys: &CoveringSystem) -> Result<Stages> {
    let ctx = sys.ctx();
    let space = sys.residue_space()?;
    let n = space.size() as usize;
    let primes = &sys.factorization().factors;

    let mut partial = Vec::with_capacity(primes.len() + 1);
    partial.push(Poly::one());
    for (p, e) in primes {
        let last = partial.last().expect("nonempty");
        partial.push(last.mul(&p.pow(*e as u64, ctx), ctx));
    }

    let mut tables: HashMap<Poly, Vec<u32>> = HashMap::new();
    let mut table_for = |m: &Poly| -> Vec<u32> {
        tables
            .entry(m.clone())
            .or_insert_with(|| space.reduction_table(m, ctx))
            .clone()
    };

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); primes.len()];
    for (i, c) in sys.congruences().iter().enumerate() {
        let j = (1..partial.len())
            .find(|&j| c.modulus().divides(&partial[j], ctx))
            .ok_or_else(|| Error::InvalidInput("modulus does not divide Q".into()))?;
        members[j - 1].push(i);
    }

    let mut stages = Vec::with_capacity(primes.len());
    for (j0, (prime, exponent)) in primes.iter().enumerate() {
        let mut covered = FixedBitSet::with_capacity(n);
        for &i in &members[j0] {
            let c = &sys.congruences()[i];
            let table = table_for(c.modulus());
            let target = space.index_of(c.residue(), ctx) as u32;
            for (r, &red) in table.iter().enumerate() {
                if red == target {
                    covered.insert(r);
                }
            }
        }
        let prev = &partial[j0];
        let fiber_key = if prev.degree() == Some(0) {
            vec![0; n]
        } else {
            table_for(prev)
        };
        let fiber_count = (ctx.q() as u64).pow(prev.degree().unwrap_or(0) as u32) as usize;
        let mut hits = vec![0u32; fiber_count];
        for r in covered.ones() {
            hits[fiber_key[r] as usize] += 1;
        }
        stages.push(Stage {
            index: j0 + 1,
            prime: prime.clone(),
            exponent: *exponent,
            partial_modulus: partial[j0 + 1].clone(),
            previous_modulus: prev.clone(),
            congruences: members[j0].clone(),
            covered,
            fiber_key,
            hits,
            fiber_size: space.size() / fiber_count as u64,
        });
    }
    Ok(Stages { space, stages })
}

/// An exact probability measure on the residues mod `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    levels: Vec<Rational>,
    ids: Vec<u32>,
    index: HashMap<Rational, u32>,
}

impl Measure {
    pub fn uniform(n: u64) -> Measure {
        let mut m = Measure::builder(n as usize);
        let id = m.intern(Rational::new(BigInt::one(), BigInt::from(n)));
        m.ids.resize(n as usize, id);
        m
    }

    fn builder(n: usize) -> Measure {
        Measure {
            levels: Vec::new(),
            ids: Vec::with_capacity(n),
            index: HashMap::new(),
        }
    }

    fn intern(&mut self, v: Rational) -> u32 {
        if let Some(&id) = self.index.get(&v) {
            return id;
        }
        let id = self.levels.len() as u32;
        self.levels.push(v.clone());
        self.index.insert(v, id);
        id
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn value(&self, r: usize) -> &Rational {
        &self.levels[self.ids[r] as usize]
    }

    /// Equal ids mean equal values.
    pub fn value_id(&self, r: usize) -> u32 {
        self.ids[r]
    }

    pub fn distinct_values(&self) -> &[Rational] {
        &self.levels
    }

    /// Total mass of the residues selected by `pred`.
    pub fn mass_where(&self, pred: impl Fn(usize) -> bool) -> Rational {
        let mut counts = vec![0u64; self.levels.len()];
        for (r, &id) in self.ids.iter().enumerate() {
            if pred(r) {
                counts[id as usize] += 1;
            }
        }
        self.weighted(&counts)
    }

    pub fn total(&self) -> Rational {
        self.mass_where(|_| true)
    }

    /// Mass of every class, where `class_of[r]` labels residue `r` and
    /// labels are below `classes`.
    pub fn class_masses(&self, class_of: &[u32], classes: usize) -> Vec<Rational> {
        let mut tally: HashMap<(u32, u32), u64> = HashMap::new();
        for (r, &id) in self.ids.iter().enumerate() {
            *tally.entry((class_of[r], id)).or_default() += 1;
        }
        let mut out = vec![Rational::zero(); classes];
        for ((class, id), count) in tally {
            out[class as usize] += &self.levels[id as usize] * int(count);
        }
        out
    }

    fn weighted(&self, counts: &[u64]) -> Rational {
        counts
            .iter()
            .zip(&self.levels)
            .filter(|(c, _)| **c > 0)
            .map(|(&c, v)| v * int(c))
            .fold(Rational::zero(), |a, b| a + b)
    }
}

/// Which sum decides the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `sum M_j^(2) < 1`, all `delta_j = 1/2`.
    Second,
    /// `sum min(M_j^(1), M_j^(2) / (4 delta_j (1 - delta_j))) < 1`.
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    CertifiedNotCovering,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::CertifiedNotCovering => "CERTIFIED_NOT_COVERING",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Threshold schedule.
#[derive(Clone, Debug, PartialEq)]
pub enum Deltas {
    Uniform(Rational),
    PerStage(Vec<Rational>),
}

impl Default for Deltas {
    fn default() -> Self {
        Deltas::Uniform(rat(1, 2))
    }
}

impl Deltas {
    /// One delta per stage, validated for `mode`.
    pub fn resolve(&self, stages: usize, mode: Mode) -> Result<Vec<Rational>> {
        let list = match self {
            Deltas::Uniform(d) => vec![d.clone(); stages],
            Deltas::PerStage(v) if v.len() == stages => v.clone(),
            Deltas::PerStage(v) => {
                return Err(Error::InvalidDelta(format!(
                    "{} deltas given for {} stages",
                    v.len(),
                    stages
                )))
            }
        };
        let half = rat(1, 2);
        for d in &list {
            let ok = match mode {
                Mode::Second => *d == half,
                Mode::Mixed => *d > Rational::zero() && *d <= half,
            };
            if !ok {
                let need = match mode {
                    Mode::Second => "exactly 1/2 in second-moment mode",
                    Mode::Mixed => "in (0, 1/2] in mixed mode",
                };
                return Err(Error::InvalidDelta(format!("{} must be {need}", rational::to_text(d))));
            }
        }
        Ok(list)
    }
}

/// `P_0, ..., P_J` for one schedule.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub stages: Stages,
    pub deltas: Vec<Rational>,
    /// `measures[j]` is `P_j`.
    pub measures: Vec<Measure>,
}

impl Pipeline {
    /// Runs every stage; each delta must lie in `[0, 1/2]`.
    pub fn run(sys: &CoveringSystem, deltas: &Deltas) -> Result<Pipeline> {
        let stages = build_stages(sys)?;
        let deltas = match deltas {
            Deltas::Uniform(d) => vec![d.clone(); stages.len()],
            Deltas::PerStage(v) => v.clone(),
        };
        if deltas.len() != stages.len() {
            return Err(Error::InvalidDelta(format!(
                "{} deltas given for {} stages",
                deltas.len(),
                stages.len()
            )));
        }
        for d in &deltas {
            if *d < Rational::zero() || *d > rat(1, 2) {
                return Err(Error::InvalidDelta(format!("{} is outside [0, 1/2]", rational::to_text(d))));
            }
        }
        Ok(Self::run_stages(stages, deltas))
    }

    fn run_stages(stages: Stages, deltas: Vec<Rational>) -> Pipeline {
        let mut measures = vec![Measure::uniform(stages.space().size())];
        for j in 1..=stages.len() {
            let next = stages.step(&measures[j - 1], j, &deltas[j - 1]);
            measures.push(next);
        }
        Pipeline {
            stages,
            deltas,
            measures,
        }
    }
}

/// Per-stage line of a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageMoments {
    pub j: usize,
    pub prime: String,
    pub nu: u32,
    #[serde(with = "rational::serde_text")]
    pub delta: Rational,
    #[serde(rename = "M1", with = "rational::serde_text")]
    pub m1: Rational,
    #[serde(rename = "M2", with = "rational::serde_text")]
    pub m2: Rational,
    /// This stage's contribution to the criterion sum.
    #[serde(with = "rational::serde_text")]
    pub term: Rational,
}

/// A checkable record of one distortion run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub mode: Mode,
    pub stages: Vec<StageMoments>,
    #[serde(with = "rational::serde_text")]
    pub criterion_sum: Rational,
    /// `P_J` of the covered set.
    #[serde(with = "rational::serde_text")]
    pub covered_mass: Rational,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn deltas(&self) -> Vec<Rational> {
        self.stages.iter().map(|s| s.delta.clone()).collect()
    }
}

/// Runs the pipeline and decides the criterion. A certified verdict is
/// cross-checked against `P_J(B_1 ∪ ... ∪ B_J) < 1` and against the
/// exhaustive uncovered set; either failing is a [`Error::SoundnessViolation`].
pub fn certify(sys: &CoveringSystem, deltas: &Deltas, mode: Mode) -> Result<Certificate> {
    let stages = build_stages(sys)?;
    let deltas = deltas.resolve(stages.len(), mode)?;
    let pipeline = Pipeline::run_stages(stages, deltas);
    let stages = &pipeline.stages;
    let ctx = sys.ctx();

    let one = Rational::one();
    let mut rows = Vec::with_capacity(stages.len());
    let mut sum = Rational::zero();
    for j in 1..=stages.len() {
        let prev = &pipeline.measures[j - 1];
        let m1 = stages.moment(1, j, prev);
        let m2 = stages.moment(2, j, prev);
        let delta = pipeline.deltas[j - 1].clone();
        let term = match mode {
            Mode::Second => m2.clone(),
            Mode::Mixed => {
                let scaled = &m2 / (int(4) * &delta * (&one - &delta));
                if m1 < scaled {
                    m1.clone()
                } else {
                    scaled
                }
            }
        };
        sum += &term;
        let stage = stages.stage(j);
        rows.push(StageMoments {
            j,
            prime: stage.prime.format(ctx),
            nu: stage.exponent,
            delta,
            m1,
            m2,
            term,
        });
    }

    let mut union = FixedBitSet::with_capacity(stages.space().size() as usize);
    for s in stages.stages() {
        union.union_with(&s.covered);
    }
    let last = pipeline.measures.last().expect("P_0 exists");
    let covered_mass = last.mass_where(|r| union.contains(r));

    let verdict = if sum < one {
        Verdict::CertifiedNotCovering
    } else {
        Verdict::Inconclusive
    };
    if verdict == Verdict::CertifiedNotCovering {
        if covered_mass >= one {
            return Err(Error::SoundnessViolation(format!(
                "criterion {} < 1 but P_J(covered) = {}",
                rational::to_text(&sum),
                rational::to_text(&covered_mass)
            )));
        }
        if sys.covers()?.covers {
            return Err(Error::SoundnessViolation(
                "criterion certified a system that covers".into(),
            ));
        }
    }
    Ok(Certificate {
        mode,
        stages: rows,
        criterion_sum: sum,
        covered_mass,
        verdict,
    })
}

/// Right-hand side of the per-residue alpha bound,
/// `sum over stage-j congruences i with I_i = H P_j^r and r ≡ a_i (mod H)` of
/// `|P_j|^{-r}`, for every residue mod `Q`.
///
/// Returned as numerators over the common denominator `|P_j|^{v_j}`.
pub fn alpha_bound_numerators(sys: &CoveringSystem, stages: &Stages, j: usize) -> (Vec<u64>, u64) {
    let ctx = sys.ctx();
    let stage = stages.stage(j);
    let space = stages.space();
    let pnorm = (ctx.q() as u64).pow(stage.prime.degree().unwrap_or(0) as u32);
    let denom = pnorm.pow(stage.exponent);
    let mut out = vec![0u64; space.size() as usize];
    for &i in &stage.congruences {
        let c = &sys.congruences()[i];
        // Split I_i = H * P_j^r.
        let mut h = c.modulus().clone();
        let mut r = 0u32;
        loop {
            let (quot, rem) = h.divrem(&stage.prime, ctx).expect("prime is nonzero");
            if !rem.is_zero() {
                break;
            }
            h = quot;
            r += 1;
        }
        debug_assert!(r >= 1);
        let weight = pnorm.pow(stage.exponent - r);
        if h.degree() == Some(0) {
            out.iter_mut().for_each(|v| *v += weight);
            continue;
        }
        let table = space.reduction_table(&h, ctx);
        let target = c.residue().rem(&h, ctx).expect("H is nonzero");
        let target = crate::polyring::poly_index(&target, ctx.q()) as u32;
        for (v, &red) in out.iter_mut().zip(&table) {
            if red == target {
                *v += weight;
            }
        }
    }
    (out, denom)
}

/// All monic divisors of `Q` as `(divisor, exponent per prime)`.
pub fn divisors(sys: &CoveringSystem) -> Vec<(Poly, Vec<u32>)> {
    let ctx = sys.ctx();
    let mut out = vec![(Poly::one(), Vec::new())];
    for (p, e) in &sys.factorization().factors {
        let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
        for (d, exps) in &out {
            let mut power = Poly::one();
            for k in 0..=*e {
                let mut ex = exps.clone();
                ex.push(k);
                next.push((d.mul(&power, ctx), ex));
                power = power.mul(p, ctx);
            }
        }
        out = next;
    }
    out
}

/// `1/|I| * prod_{i <= j, P_i | I} 1/(1 - delta_i)`.
pub fn class_mass_bound(
    sys: &CoveringSystem,
    exponents: &[u32],
    deltas: &[Rational],
    j: usize,
) -> Rational {
    let q = BigInt::from(sys.ctx().q());
    let mut deg = 0u32;
    let mut bound = Rational::one();
    for (i, ((p, _), &e)) in sys.factorization().factors.iter().zip(exponents).enumerate() {
        deg += e * p.degree().unwrap_or(0) as u32;
        if e > 0 && i < j {
            bound /= Rational::one() - &deltas[i];
        }
    }
    bound / Rational::from_integer(q.pow(deg))
}

/// `s^2/(|P_j|-1)^2 * prod_{i<j} (1 + 6/|P_i| + (10|P_i| - 6)/(|P_i| (|P_i|-1)^2))`.
pub fn second_moment_closed_form(sys: &CoveringSystem, stages: &Stages, j: usize) -> Rational {
    let q = BigInt::from(sys.ctx().q());
    let norm = |p: &Poly| Rational::from_integer(q.pow(p.degree().unwrap_or(0) as u32));
    let one = Rational::one();
    let s = int(sys.multiplicity() as u64);
    let pj = norm(&stages.stage(j).prime);
    let mut acc = &s * &s / ((&pj - &one) * (&pj - &one));
    for i in 1..j {
        let pi = norm(&stages.stage(i).prime);
        let sq = (&pi - &one) * (&pi - &one);
        acc *= &one + int(6) / &pi + (int(10) * &pi - int(6)) / (&pi * sq);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::Congruence;
    use crate::ff::FieldCtx;

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

    fn three_class_cover() -> CoveringSystem {
        system(2, &[("0", "x"), ("0", "x+1"), ("1", "x^2+x")])
    }

    fn six_class_cover() -> CoveringSystem {
        system(
            2,
            &[
                ("0", "x^2"),
                ("x", "x^2+1"),
                ("x+1", "x^2+x"),
                ("1", "x^3+x"),
                ("x^2+x", "x^3+x^2"),
                ("x^3+x^2+x", "x^4+x^2"),
            ],
        )
    }

    #[test]
    fn single_congruence_stages() {
        let sys = system(2, &[("0", "x")]);
        let st = build_stages(&sys).unwrap();
        assert_eq!(st.len(), 1);
        let s = st.stage(1);
        assert_eq!(s.partial_modulus.format(sys.ctx()), "x");
        assert_eq!(s.covered.ones().collect::<Vec<_>>(), [0]);
        assert_eq!(st.alpha(1, 0), rat(1, 2));
        assert_eq!(st.alpha(1, 1), rat(1, 2));
    }

    #[test]
    fn three_class_cover_stages() {
        let sys = three_class_cover();
        let st = build_stages(&sys).unwrap();
        let ctx = sys.ctx();
        assert_eq!(st.len(), 2);
        assert_eq!(st.stage(1).prime.format(ctx), "x");
        assert_eq!(st.stage(2).prime.format(ctx), "x+1");
        // B_1 = {0, x}; B_2 = {0, x+1} ∪ {1}.
        assert_eq!(st.stage(1).covered.ones().collect::<Vec<_>>(), [0, 2]);
        assert_eq!(st.stage(2).covered.ones().collect::<Vec<_>>(), [0, 1, 3]);
        assert_eq!(st.stage(1).congruences, [0]);
        assert_eq!(st.stage(2).congruences, [1, 2]);
    }

    #[test]
    fn six_class_cover_stages() {
        let sys = six_class_cover();
        let st = build_stages(&sys).unwrap();
        let ctx = sys.ctx();
        assert_eq!(sys.lcm().format(ctx), "x^4+x^2");
        let shape: Vec<(String, u32)> = st.stages().iter().map(|s| (s.prime.format(ctx), s.exponent)).collect();
        assert_eq!(shape, [("x".to_string(), 2), ("x+1".to_string(), 2)]);
        let total: usize = st.stages().iter().map(|s| s.congruences.len()).sum();
        assert_eq!(total, 6);
    }

    #[test]
    fn step_examples() {
        let sys = system(2, &[("0", "x")]);
        let st = build_stages(&sys).unwrap();
        let p0 = Measure::uniform(2);
        let p1 = st.step(&p0, 1, &rat(1, 2));
        assert_eq!(p1.value(0), &rat(0, 1));
        assert_eq!(p1.value(1), &rat(1, 1));
        let same = st.step(&p0, 1, &rat(0, 1));
        assert_eq!(same.value(0), p0.value(0));
        assert_eq!(same.value(1), p0.value(1));
    }

    #[test]
    fn branch_one_rescales_survivors() {
        // Over GF(3), 0 mod x has alpha = 1/3 < 1/2: B_1 is zeroed and the
        // other two residues get 1/3 * 3/2 = 1/2.
        let sys = system(3, &[("0", "x")]);
        let st = build_stages(&sys).unwrap();
        let p1 = st.step(&Measure::uniform(3), 1, &rat(1, 2));
        assert_eq!(p1.value(0), &rat(0, 1));
        assert_eq!(p1.value(1), &rat(1, 2));
        assert_eq!(p1.value(2), &rat(1, 2));
    }

    #[test]
    fn moment_examples() {
        let sys = system(2, &[("0", "x")]);
        let st = build_stages(&sys).unwrap();
        let p0 = Measure::uniform(2);
        assert_eq!(st.moment(2, 1, &p0), rat(1, 4));
        assert_eq!(st.moment(1, 1, &p0), rat(1, 2));

        let full = system(2, &[("0", "x"), ("1", "x")]);
        let st = build_stages(&full).unwrap();
        assert_eq!(st.moment(2, 1, &p0), rat(1, 1));
    }

    #[test]
    fn certify_examples() {
        let cert = certify(&system(2, &[("0", "x")]), &Deltas::default(), Mode::Second).unwrap();
        assert_eq!(cert.criterion_sum, rat(1, 4));
        assert_eq!(cert.verdict, Verdict::CertifiedNotCovering);

        let cert = certify(&three_class_cover(), &Deltas::default(), Mode::Second).unwrap();
        assert!(cert.criterion_sum >= rat(1, 1));
        assert_eq!(cert.verdict, Verdict::Inconclusive);

        let sys = system(2, &[("0", "x"), ("0", "x+1")]);
        let cert = certify(&sys, &Deltas::default(), Mode::Second).unwrap();
        assert!(!sys.covers().unwrap().covers);
        // Hand computation: M_1^(2) = 1/4; P_1 sits on {1, x+1} with mass
        // 1/2 each; stage 2 fibers mod x are {0, x} and {1, x+1}; only
        // x+1 lies in B_2 = {0, x+1}, so alpha = 1/2 on the second fiber
        // and M_2^(2) = 1/4.
        assert_eq!(cert.stages[0].m2, rat(1, 4));
        assert_eq!(cert.stages[1].m2, rat(1, 4));
        assert_eq!(cert.criterion_sum, rat(1, 2));
        assert_eq!(cert.verdict, Verdict::CertifiedNotCovering);
    }

    #[test]
    fn delta_validation() {
        let sys = system(2, &[("0", "x")]);
        assert!(matches!(certify(&sys, &Deltas::Uniform(rat(3, 5)), Mode::Mixed), Err(Error::InvalidDelta(_))));
        assert!(matches!(certify(&sys, &Deltas::Uniform(rat(0, 1)), Mode::Mixed), Err(Error::InvalidDelta(_))));
        assert!(matches!(certify(&sys, &Deltas::Uniform(rat(1, 3)), Mode::Second), Err(Error::InvalidDelta(_))));
        assert!(matches!(
            certify(&sys, &Deltas::PerStage(vec![rat(1, 2), rat(1, 2)]), Mode::Second),
            Err(Error::InvalidDelta(_))
        ));
        assert!(certify(&sys, &Deltas::Uniform(rat(1, 3)), Mode::Mixed).is_ok());
        assert!(Pipeline::run(&sys, &Deltas::Uniform(rat(0, 1))).is_ok());
        assert!(Pipeline::run(&sys, &Deltas::Uniform(rat(-1, 3))).is_err());
    }

    #[test]
    fn mixed_mode_takes_the_smaller_term() {
        let sys = system(3, &[("0", "x"), ("1", "x^2+1")]);
        let cert = certify(&sys, &Deltas::Uniform(rat(1, 4)), Mode::Mixed).unwrap();
        for row in &cert.stages {
            let scaled = &row.m2 / (int(4) * &row.delta * (Rational::one() - &row.delta));
            assert_eq!(row.term, if row.m1 < scaled { row.m1.clone() } else { scaled });
        }
    }

    #[test]
    fn certificate_json_round_trip() {
        let cert = certify(&six_class_cover(), &Deltas::default(), Mode::Second).unwrap();
        let text = serde_json::to_string(&cert).unwrap();
        assert!(text.contains("\"M2\""));
        let back: Certificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn second_moment_closed_form_at_norm_two() {
        let sys = three_class_cover();
        let st = build_stages(&sys).unwrap();
        assert_eq!(second_moment_closed_form(&sys, &st, 1), rat(1, 1));
        // 1 + 6/2 + 14/2 = 11
        assert_eq!(second_moment_closed_form(&sys, &st, 2), rat(11, 1));
    }

    #[test]
    fn divisor_enumeration() {
        let sys = six_class_cover();
        let divs = divisors(&sys);
        assert_eq!(divs.len(), 9);
        for (d, _) in &divs {
            assert!(d.divides(sys.lcm(), sys.ctx()));
        }
    }
}
