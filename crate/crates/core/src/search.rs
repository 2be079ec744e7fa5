//! Backtracking search for covering systems with bounded multiplicity.
//!
//! Candidates are all monic polynomials of degree `1..=max_degree`, tried in
//! enumeration order (degree first). The state is the set of uncovered
//! residues modulo the lcm of the moduli chosen so far; a new modulus that
//! enlarges the lcm lifts the set through a reduction table.
//!
//! Rules that shape the tree:
//!
//! - every chosen class must remove at least one uncovered residue;
//! - residues chosen for one modulus increase strictly;
//! - a branch is cut when the classes still available could not remove the
//!   uncovered density even if they were disjoint;
//! - with symmetry on, the first chosen class has residue 0. Translating a
//!   whole system by a fixed polynomial preserves covering, so this loses
//!   nothing.
//!
//! `First` mode deepens on the number of congruences, so the system it
//! returns has as few congruences as possible. `Exhaustive` mode runs one
//! unbounded pass. Both split the tree at the first chosen class; subtrees
//! are merged in branch order, so outcomes and node counts do not depend on
//! the thread count.

use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::{with_pool, Congruence, CoveringSystem};
use crate::error::{Error, Result};
use crate::ff::{FieldCtx, FieldElem};
use crate::polyring::{self, checked_size, lcm_all, poly_from_index, poly_index, Poly, ResidueSpace};
use crate::DEFAULT_CAP;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    First,
    Exhaustive,
}

#[derive(Clone, Debug)]
pub struct SearchSpec {
    pub ctx: FieldCtx,
    pub max_degree: usize,
    /// Congruences allowed per modulus; 1 means distinct moduli.
    pub multiplicity_cap: usize,
    /// Node limit.
    pub budget: u64,
    pub mode: SearchMode,
    pub symmetry: bool,
    pub threads: usize,
    /// Enumeration cap on residue spaces.
    pub cap: u64,
    /// Cut branches whose remaining classes cannot cover the uncovered density.
    pub density_prune: bool,
}

impl SearchSpec {
    pub fn new(ctx: FieldCtx, max_degree: usize) -> Self {
        SearchSpec {
            ctx,
            max_degree,
            multiplicity_cap: 1,
            budget: 10_000_000,
            mode: SearchMode::First,
            symmetry: true,
            threads: 1,
            cap: DEFAULT_CAP,
            density_prune: true,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Found(CoveringSystem),
    Exhausted,
    Budget,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Found(_) => "FOUND",
            Outcome::Exhausted => "EXHAUSTED",
            Outcome::Budget => "BUDGET",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub outcome: Outcome,
    /// Nodes visited, counted as the serial search would count them.
    pub nodes: u64,
    /// For `Exhausted`, the space that was ruled out.
    pub proof: Option<String>,
}

/// All monic polynomials of degree `1..=max_degree` in enumeration order.
pub fn enumerate_moduli(spec: &SearchSpec) -> Result<Vec<Poly>> {
    let mut out = Vec::new();
    for d in 1..=spec.max_degree {
        out.extend(polyring::monic_of_degree(&spec.ctx, d, spec.cap)?);
    }
    Ok(out)
}

/// A chosen class: candidate index and residue index.
type Choice = (usize, u64);

enum Flow {
    Found(Vec<Choice>),
    Continue,
    Budget,
}

#[derive(Clone)]
struct State {
    lcm: Poly,
    uncovered: FixedBitSet,
    chosen: Vec<Choice>,
}

/// Shared, read-only search data.
struct Plan<'a> {
    spec: &'a SearchSpec,
    moduli: Vec<Poly>,
    /// `q^(max_degree - deg m)`: class density in units of `q^-max_degree`.
    units: Vec<u128>,
    unit_scale: u128,
}

/// Per-branch mutable data.
struct Worker<'p, 'a> {
    plan: &'p Plan<'a>,
    tables: HashMap<(Poly, Poly), Arc<Vec<u32>>>,
    nodes: u64,
    limit: u64,
    /// A node was cut by the depth limit.
    truncated: bool,
}

impl<'p, 'a> Worker<'p, 'a> {
    fn new(plan: &'p Plan<'a>, limit: u64) -> Self {
        Worker {
            plan,
            tables: HashMap::new(),
            nodes: 0,
            limit,
            truncated: false,
        }
    }

    fn table(&mut self, from: &Poly, to: &Poly) -> Arc<Vec<u32>> {
        let ctx = &self.plan.spec.ctx;
        let cap = self.plan.spec.cap;
        self.tables
            .entry((from.clone(), to.clone()))
            .or_insert_with(|| {
                let space = ResidueSpace::new(ctx, from, cap).expect("lcm of all candidates fits the cap");
                Arc::new(space.reduction_table(to, ctx))
            })
            .clone()
    }

    /// `state` plus the class `residue mod moduli[i]`, or `None` if the class
    /// removes nothing.
    fn apply(&mut self, state: &State, i: usize, residue: u64) -> Option<State> {
        let ctx = &self.plan.spec.ctx;
        let m = &self.plan.moduli[i];
        let lcm = state.lcm.lcm(m, ctx).expect("moduli are nonzero");
        let mut uncovered = if lcm == state.lcm {
            state.uncovered.clone()
        } else {
            let lift = self.table(&lcm, &state.lcm);
            let mut next = FixedBitSet::with_capacity(lift.len());
            for (s, &r) in lift.iter().enumerate() {
                if state.uncovered.contains(r as usize) {
                    next.insert(s);
                }
            }
            next
        };
        let class = self.table(&lcm, m);
        let before = uncovered.count_ones(..);
        for s in uncovered.clone().ones() {
            if class[s] as u64 == residue {
                uncovered.set(s, false);
            }
        }
        if uncovered.count_ones(..) == before {
            return None;
        }
        let mut chosen = state.chosen.clone();
        chosen.push((i, residue));
        Some(State { lcm, uncovered, chosen })
    }

    /// Whether classes from position `i` on (with `used` already spent at
    /// `i`) and at most `slots` more congruences could cover `state`. A cut
    /// that only the slot limit causes marks the pass as truncated.
    fn can_finish(&mut self, state: &State, i: usize, used: usize, slots: usize) -> bool {
        let cap = self.plan.spec.multiplicity_cap;
        let mut left = slots;
        let mut limited: u128 = 0;
        let mut unlimited: u128 = 0;
        for (j, &u) in self.plan.units.iter().enumerate().skip(i) {
            let avail = if j == i { cap - used } else { cap };
            let take = avail.min(left);
            limited += take as u128 * u;
            unlimited += avail as u128 * u;
            left -= take;
        }
        let q = self.plan.spec.ctx.q() as u128;
        let size = q.pow(state.lcm.degree().unwrap_or(0) as u32);
        let need = state.uncovered.count_ones(..) as u128 * self.plan.unit_scale;
        if limited * size >= need {
            return true;
        }
        if unlimited * size >= need {
            self.truncated = true;
        }
        false
    }

    fn dfs(&mut self, state: &State, i: usize, used: usize, next_residue: u64, slots: usize) -> Flow {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Flow::Budget;
        }
        if state.uncovered.is_clear() {
            return Flow::Found(state.chosen.clone());
        }
        if i == self.plan.moduli.len() {
            return Flow::Continue;
        }
        if slots == 0 {
            self.truncated = true;
            return Flow::Continue;
        }
        if self.plan.spec.density_prune && !self.can_finish(state, i, used, slots) {
            return Flow::Continue;
        }
        let ctx = &self.plan.spec.ctx;
        if used < self.plan.spec.multiplicity_cap {
            let size = (ctx.q() as u64).pow(self.plan.moduli[i].degree().unwrap_or(0) as u32);
            for r in next_residue..size {
                if let Some(child) = self.apply(state, i, r) {
                    match self.dfs(&child, i, used + 1, r + 1, slots - 1) {
                        Flow::Continue => {}
                        done => return done,
                    }
                }
            }
        }
        self.dfs(state, i + 1, 0, 0, slots)
    }
}

struct BranchResult {
    flow: Flow,
    nodes: u64,
    truncated: bool,
}

fn run_branch(plan: &Plan<'_>, root: &State, choice: Choice, slots: usize, limit: u64) -> BranchResult {
    let mut worker = Worker::new(plan, limit);
    let flow = match worker.apply(root, choice.0, choice.1) {
        Some(state) => worker.dfs(&state, choice.0, 1, choice.1 + 1, slots - 1),
        None => Flow::Continue,
    };
    BranchResult {
        flow,
        nodes: worker.nodes,
        truncated: worker.truncated,
    }
}

/// Result of one pass at a fixed slot limit.
enum Pass {
    Found(Vec<Choice>),
    Budget,
    Done { truncated: bool },
}

fn run_pass(plan: &Plan<'_>, slots: usize, nodes: &mut u64) -> Pass {
    let spec = plan.spec;
    let q = spec.ctx.q() as u64;
    let root = State {
        lcm: Poly::one(),
        uncovered: {
            let mut b = FixedBitSet::with_capacity(1);
            b.insert(0);
            b
        },
        chosen: Vec::new(),
    };
    // The root node.
    *nodes += 1;
    if *nodes > spec.budget {
        return Pass::Budget;
    }
    let mut branches = Vec::new();
    for (i, m) in plan.moduli.iter().enumerate() {
        let size = q.pow(m.degree().unwrap_or(0) as u32);
        let residues = if spec.symmetry { 1 } else { size };
        branches.extend((0..residues).map(|r| (i, r)));
    }

    let mut truncated = false;
    let mut settle = |result: BranchResult, nodes: &mut u64| -> Option<Pass> {
        *nodes += result.nodes;
        truncated |= result.truncated;
        if *nodes > spec.budget {
            return Some(Pass::Budget);
        }
        match result.flow {
            Flow::Found(chosen) => Some(Pass::Found(chosen)),
            Flow::Budget => Some(Pass::Budget),
            Flow::Continue => None,
        }
    };

    if spec.threads <= 1 {
        for &b in &branches {
            let result = run_branch(plan, &root, b, slots, spec.budget - *nodes);
            if let Some(pass) = settle(result, nodes) {
                return pass;
            }
        }
    } else {
        let results: Vec<BranchResult> = with_pool(spec.threads, || {
            branches
                .par_iter()
                .map(|&b| run_branch(plan, &root, b, slots, spec.budget))
                .collect()
        });
        for result in results {
            if let Some(pass) = settle(result, nodes) {
                return pass;
            }
        }
    }
    Pass::Done { truncated }
}

/// Runs the search described by `spec`.
///
/// Fails only on malformed specs or when the lcm of all candidates exceeds
/// the enumeration cap.
pub fn search(spec: &SearchSpec) -> Result<SearchResult> {
    if spec.max_degree == 0 {
        return Err(Error::InvalidInput("max degree must be at least 1".into()));
    }
    if spec.multiplicity_cap == 0 {
        return Err(Error::InvalidInput("multiplicity cap must be at least 1".into()));
    }
    let ctx = &spec.ctx;
    let moduli = enumerate_moduli(spec)?;
    let full = lcm_all(ctx, &moduli)?;
    checked_size(ctx.q(), full.degree().unwrap_or(0), spec.cap)?;
    let q = ctx.q() as u128;
    let plan = Plan {
        spec,
        units: moduli
            .iter()
            .map(|m| q.pow((spec.max_degree - m.degree().unwrap_or(0)) as u32))
            .collect(),
        unit_scale: q.pow(spec.max_degree as u32),
        moduli,
    };
    let most = plan.moduli.len() * spec.multiplicity_cap;
    let schedule: Vec<usize> = match spec.mode {
        SearchMode::First => (1..=most).collect(),
        SearchMode::Exhaustive => vec![most],
    };

    let mut nodes = 0u64;
    for slots in schedule {
        match run_pass(&plan, slots, &mut nodes) {
            Pass::Found(chosen) => {
                let system = build_found(&plan, &chosen)?;
                return Ok(SearchResult {
                    outcome: Outcome::Found(system),
                    nodes,
                    proof: None,
                });
            }
            Pass::Budget => {
                return Ok(SearchResult {
                    outcome: Outcome::Budget,
                    nodes: nodes.min(spec.budget),
                    proof: None,
                })
            }
            Pass::Done { truncated: false } => break,
            Pass::Done { truncated: true } => {}
        }
    }
    Ok(SearchResult {
        outcome: Outcome::Exhausted,
        nodes,
        proof: Some(exhausted_statement(&plan)),
    })
}

fn exhausted_statement(plan: &Plan<'_>) -> String {
    let spec = plan.spec;
    let multiplicity = if spec.multiplicity_cap == 1 {
        "distinct moduli".to_string()
    } else {
        format!("at most {} congruences per modulus", spec.multiplicity_cap)
    };
    let quotient = if spec.symmetry {
        "; systems are taken up to translation by a fixed polynomial (first class has residue 0)"
    } else {
        "; no symmetry reduction"
    };
    format!(
        "no covering system over GF({}) with {multiplicity} drawn from the {} monic polynomials of degree 1..={}{quotient}",
        spec.ctx.q(),
        plan.moduli.len(),
        spec.max_degree
    )
}

/// Rebuilds a found system through the covering module and re-verifies it.
fn build_found(plan: &Plan<'_>, chosen: &[Choice]) -> Result<CoveringSystem> {
    let ctx = &plan.spec.ctx;
    let congruences = chosen
        .iter()
        .map(|&(i, r)| Congruence::new(ctx, &poly_from_index(r, ctx.q()), &plan.moduli[i]))
        .collect::<Result<Vec<_>>>()?;
    let system = CoveringSystem::with_cap(ctx.clone(), congruences, plan.spec.cap)?;
    if !system.covers()?.covers {
        return Err(Error::SoundnessViolation("search produced a system that does not cover".into()));
    }
    if system.multiplicity() > plan.spec.multiplicity_cap {
        return Err(Error::SoundnessViolation("search exceeded the multiplicity cap".into()));
    }
    Ok(system)
}

/// Sort key of a system: `(modulus index, residue index)` per congruence.
type Key = Vec<(u64, u64)>;

/// The least representative of `sys` under global translation
/// `a_i -> a_i + c`, the substitutions `x -> u x + v` (`u != 0`) and the
/// field automorphisms, compared by sorted `(modulus, residue)` index pairs.
pub fn canonical_reduce(sys: &CoveringSystem) -> Result<CoveringSystem> {
    let ctx = sys.ctx();
    let q = ctx.q();
    let mut best: Option<Vec<(Poly, Poly)>> = None;
    let mut best_key: Option<Key> = None;
    for frob in 0..ctx.k() {
        for u in ctx.elements().filter(|u| !u.is_zero()) {
            for v in ctx.elements() {
                let moved: Vec<(Poly, Poly)> = sys
                    .congruences()
                    .iter()
                    .map(|c| {
                        let m = substitute(c.modulus(), frob, u, v, ctx).monic(ctx);
                        let a = substitute(c.residue(), frob, u, v, ctx).rem(&m, ctx).expect("nonzero");
                        (m, a)
                    })
                    .collect();
                let reduced = canonical_translate(ctx, &moved, sys.cap())?;
                let key = key_of(&reduced, q);
                if best_key.as_ref().is_none_or(|b| key < *b) {
                    best_key = Some(key);
                    best = Some(reduced);
                }
            }
        }
    }
    let congruences = best
        .expect("at least the identity")
        .iter()
        .map(|(m, a)| Congruence::new(ctx, a, m))
        .collect::<Result<Vec<_>>>()?;
    CoveringSystem::with_cap(ctx.clone(), congruences, sys.cap())
}

fn key_of(congruences: &[(Poly, Poly)], q: u32) -> Key {
    let mut key: Key = congruences
        .iter()
        .map(|(m, a)| (poly_index(m, q), poly_index(a, q)))
        .collect();
    key.sort_unstable();
    key
}

/// `f^(phi^frob)(u x + v)`.
fn substitute(f: &Poly, frob: u32, u: FieldElem, v: FieldElem, ctx: &FieldCtx) -> Poly {
    let mut g = f.clone();
    for _ in 0..frob {
        g = g.map_coeffs(|c| ctx.frobenius(c));
    }
    g.compose_affine(u, v, ctx)
}

/// Least translate of a system, sorted by key.
///
/// Moduli are processed in key order; at each one the candidate shifts `c`
/// (kept modulo the lcm of the moduli processed so far) are extended and
/// only those minimizing the residues at that modulus survive.
fn canonical_translate(ctx: &FieldCtx, congruences: &[(Poly, Poly)], cap: u64) -> Result<Vec<(Poly, Poly)>> {
    let q = ctx.q();
    let mut groups: Vec<(Poly, Vec<Poly>)> = Vec::new();
    let mut sorted = congruences.to_vec();
    sorted.sort_by_key(|(m, a)| (poly_index(m, q), poly_index(a, q)));
    for (m, a) in sorted {
        match groups.last_mut() {
            Some((last, residues)) if *last == m => residues.push(a),
            _ => groups.push((m, vec![a])),
        }
    }

    let mut lcm = Poly::one();
    let mut candidates = vec![Poly::zero()];
    for (m, residues) in &groups {
        let next = lcm.lcm(m, ctx)?;
        let extra = next.degree().unwrap_or(0) - lcm.degree().unwrap_or(0);
        let count = checked_size(q, extra, cap)?;
        let mut best: Option<Vec<u64>> = None;
        let mut survivors = Vec::new();
        for c in &candidates {
            for t in 0..count {
                let shift = c.add(&lcm.mul(&poly_from_index(t, q), ctx), ctx);
                let mut moved: Vec<u64> = residues
                    .iter()
                    .map(|a| poly_index(&a.add(&shift, ctx).rem(m, ctx).expect("nonzero"), q))
                    .collect();
                moved.sort_unstable();
                match best.as_ref().map(|b| moved.cmp(b)) {
                    Some(std::cmp::Ordering::Greater) => {}
                    Some(std::cmp::Ordering::Equal) => survivors.push(shift),
                    _ => {
                        best = Some(moved);
                        survivors = vec![shift];
                    }
                }
            }
        }
        candidates = survivors;
        lcm = next;
    }
    let shift = &candidates[0];
    let mut out: Vec<(Poly, Poly)> = congruences
        .iter()
        .map(|(m, a)| (m.clone(), a.add(shift, ctx).rem(m, ctx).expect("nonzero")))
        .collect();
    out.sort_by_key(|(m, a)| (poly_index(m, q), poly_index(a, q)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: u64, d: usize, mode: SearchMode) -> SearchSpec {
        let mut s = SearchSpec::new(FieldCtx::new(p, 1).unwrap(), d);
        s.mode = mode;
        s
    }

    fn formatted(sys: &CoveringSystem) -> Vec<String> {
        sys.congruences().iter().map(|c| c.format(sys.ctx())).collect()
    }

    fn system(p: u64, congs: &[(&str, &str)]) -> CoveringSystem {
        let ctx = FieldCtx::new(p, 1).unwrap();
        let congruences = congs
            .iter()
            .map(|(r, m)| Congruence::new(&ctx, &Poly::parse(r, &ctx).unwrap(), &Poly::parse(m, &ctx).unwrap()).unwrap())
            .collect();
        CoveringSystem::new(ctx, congruences).unwrap()
    }

    #[test]
    fn moduli_enumeration() {
        let fmt = |s: &SearchSpec| -> Vec<String> {
            enumerate_moduli(s).unwrap().iter().map(|m| m.format(&s.ctx)).collect()
        };
        assert_eq!(fmt(&spec(2, 1, SearchMode::First)), ["x", "x+1"]);
        assert_eq!(
            fmt(&spec(2, 2, SearchMode::First)),
            ["x", "x+1", "x^2", "x^2+1", "x^2+x", "x^2+x+1"]
        );
        assert_eq!(fmt(&spec(3, 1, SearchMode::First)), ["x", "x+1", "x+2"]);
    }

    #[test]
    fn finds_the_three_congruence_system() {
        let result = search(&spec(2, 2, SearchMode::First)).unwrap();
        let Outcome::Found(sys) = result.outcome else { panic!("expected FOUND") };
        assert_eq!(sys.congruences().len(), 3);
        assert!(sys.covers().unwrap().covers);
        let mut moduli: Vec<String> = sys.congruences().iter().map(|c| c.modulus().format(sys.ctx())).collect();
        moduli.sort();
        assert_eq!(moduli, ["x", "x+1", "x^2+x"]);
        assert_eq!(
            canonical_reduce(&sys).unwrap().congruences(),
            canonical_reduce(&system(2, &[("0", "x"), ("0", "x+1"), ("1", "x^2+x")])).unwrap().congruences()
        );
    }

    #[test]
    fn exhaustive_negatives() {
        for (p, d) in [(3, 1), (2, 1)] {
            for symmetry in [true, false] {
                let mut s = spec(p, d, SearchMode::Exhaustive);
                s.symmetry = symmetry;
                let result = search(&s).unwrap();
                assert!(matches!(result.outcome, Outcome::Exhausted), "GF({p}) degree {d}");
                assert!(result.proof.unwrap().contains("distinct moduli"));
            }
        }
    }

    #[test]
    fn exhaustive_finds_when_possible() {
        let result = search(&spec(2, 2, SearchMode::Exhaustive)).unwrap();
        let Outcome::Found(sys) = result.outcome else { panic!("expected FOUND") };
        assert!(sys.covers().unwrap().covers);
    }

    #[test]
    fn pruning_never_cuts_a_cover() {
        for d in 1..=2 {
            for mode in [SearchMode::First, SearchMode::Exhaustive] {
                for symmetry in [true, false] {
                    let mut s = spec(2, d, mode);
                    s.symmetry = symmetry;
                    let pruned = search(&s).unwrap();
                    s.density_prune = false;
                    let full = search(&s).unwrap();
                    assert_eq!(pruned.outcome.label(), full.outcome.label());
                    assert!(pruned.nodes <= full.nodes);
                    if let (Outcome::Found(a), Outcome::Found(b)) = (&pruned.outcome, &full.outcome) {
                        assert_eq!(formatted(a), formatted(b));
                    }
                }
            }
        }
    }

    #[test]
    fn budget_outcome() {
        let mut s = spec(2, 2, SearchMode::First);
        s.budget = 3;
        let result = search(&s).unwrap();
        assert!(matches!(result.outcome, Outcome::Budget));
        assert!(result.nodes <= 3);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        for (p, d, mode) in [(2, 2, SearchMode::First), (3, 1, SearchMode::Exhaustive), (2, 2, SearchMode::Exhaustive)] {
            let serial = search(&spec(p, d, mode)).unwrap();
            let mut s = spec(p, d, mode);
            s.threads = 4;
            let parallel = search(&s).unwrap();
            assert_eq!(serial.nodes, parallel.nodes);
            assert_eq!(serial.outcome.label(), parallel.outcome.label());
            if let (Outcome::Found(a), Outcome::Found(b)) = (&serial.outcome, &parallel.outcome) {
                assert_eq!(formatted(a), formatted(b));
            }
        }
    }

    #[test]
    fn multiplicity_two_allows_repeated_moduli() {
        // {0 mod x, 1 mod x} covers GF(2)[x].
        let mut s = spec(2, 1, SearchMode::First);
        s.multiplicity_cap = 2;
        let Outcome::Found(sys) = search(&s).unwrap().outcome else { panic!("expected FOUND") };
        assert_eq!(formatted(&sys), ["0 mod x", "1 mod x"]);
    }

    #[test]
    fn canonical_examples() {
        let a1 = system(2, &[("0", "x"), ("0", "x+1"), ("1", "x^2+x")]);
        let shifted = system(2, &[("1", "x"), ("1", "x+1"), ("0", "x^2+x")]);
        // x -> x+1 applied to the first system.
        let swapped = system(2, &[("0", "x+1"), ("0", "x"), ("1", "x^2+x")]);
        let c = canonical_reduce(&a1).unwrap();
        assert_eq!(canonical_reduce(&shifted).unwrap().congruences(), c.congruences());
        assert_eq!(canonical_reduce(&swapped).unwrap().congruences(), c.congruences());
        assert_eq!(canonical_reduce(&c).unwrap().congruences(), c.congruences());
    }

    #[test]
    fn canonical_over_extension_field() {
        let ctx = FieldCtx::new(2, 2).unwrap();
        let t = Poly::parse("t", &ctx).unwrap();
        let x = Poly::x();
        let sys = |shift: &Poly| {
            let congruences = ctx
                .elements()
                .map(|a| {
                    let m = x.sub(&Poly::constant(a), &ctx);
                    Congruence::new(&ctx, &shift.clone(), &m).unwrap()
                })
                .collect();
            CoveringSystem::new(ctx.clone(), congruences).unwrap()
        };
        let a = canonical_reduce(&sys(&Poly::zero())).unwrap();
        let b = canonical_reduce(&sys(&t)).unwrap();
        assert_eq!(a.congruences(), b.congruences());
    }
}
