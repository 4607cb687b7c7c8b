//! Monodromy group analysis: a deterministic Schreier–Sims stabilizer chain
//! for exact orders, minimal block systems, Jordan's prime-cycle criterion
//! and identification of the cyclic, dihedral, alternating and symmetric
//! families.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::{check_degrees, Permutation};

pub const DEFAULT_SEED: u64 = 0x5EED_2024;

/// Random words tried by the Jordan search after the structured candidates.
const JORDAN_RANDOM_WORDS: usize = 2000;
const JORDAN_MAX_WORD: usize = 24;

struct Level {
    base: usize,
    gens: Vec<Permutation>,
    /// `transversal[x] = Some(u)` with `u(base) = x`, for `x` in the orbit.
    transversal: Vec<Option<Permutation>>,
    inverse: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
}

impl Level {
    fn new(base: usize, degree: usize) -> Self {
        let mut level = Level {
            base,
            gens: Vec::new(),
            transversal: Vec::new(),
            inverse: Vec::new(),
            orbit: Vec::new(),
        };
        level.rebuild(degree);
        level
    }

    fn rebuild(&mut self, degree: usize) {
        self.transversal = vec![None; degree];
        self.inverse = vec![None; degree];
        let e = Permutation::identity(degree);
        self.transversal[self.base] = Some(e.clone());
        self.inverse[self.base] = Some(e);
        self.orbit = vec![self.base];
        let mut head = 0;
        while head < self.orbit.len() {
            let x = self.orbit[head];
            head += 1;
            for s in &self.gens {
                let y = s.apply(x);
                if self.transversal[y].is_none() {
                    let u = s * self.transversal[x].as_ref().unwrap();
                    self.inverse[y] = Some(u.inverse());
                    self.transversal[y] = Some(u);
                    self.orbit.push(y);
                }
            }
        }
    }
}

/// Base and strong generating set with base points chosen as least moved
/// points, so the chain is a function of the generator list alone.
pub struct StabilizerChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabilizerChain {
    pub fn new(gens: &[Permutation]) -> Result<Self> {
        let Some(first) = gens.first() else {
            return Err(Error::NoGenerators);
        };
        let degree = first.degree();
        for g in gens {
            check_degrees(first, g)?;
        }
        let gens: Vec<Permutation> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut chain = StabilizerChain {
            degree,
            levels: Vec::new(),
        };
        for g in &gens {
            if chain.levels.iter().all(|l| g.apply(l.base) == l.base) {
                let base = g.support()[0];
                chain.levels.push(Level::new(base, degree));
            }
        }
        for i in 0..chain.levels.len() {
            let fixed: Vec<usize> = chain.levels[..i].iter().map(|l| l.base).collect();
            chain.levels[i].gens = gens
                .iter()
                .filter(|g| fixed.iter().all(|&b| g.apply(b) == b))
                .cloned()
                .collect();
            chain.levels[i].rebuild(degree);
        }
        chain.complete();
        Ok(chain)
    }

    /// Closes every level under its Schreier generators, working upward from
    /// the deepest level and dropping back whenever a new strong generator
    /// is found.
    fn complete(&mut self) {
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let level = i as usize;
            match self.find_schreier_residue(level) {
                None => i -= 1,
                Some((h, j)) => {
                    if j == self.levels.len() {
                        let base = h.support()[0];
                        self.levels.push(Level::new(base, self.degree));
                    }
                    for l in level + 1..=j {
                        self.levels[l].gens.push(h.clone());
                        self.levels[l].rebuild(self.degree);
                    }
                    i = j as isize;
                }
            }
        }
    }

    fn find_schreier_residue(&self, i: usize) -> Option<(Permutation, usize)> {
        let level = &self.levels[i];
        for &beta in &level.orbit {
            let u_beta = level.transversal[beta].as_ref().unwrap();
            for s in &level.gens {
                let image = s.apply(beta);
                let h = &(level.inverse[image].as_ref().unwrap() * s) * u_beta;
                let (residue, j) = self.strip(h, i + 1);
                if !residue.is_identity() {
                    return Some((residue, j));
                }
            }
        }
        None
    }

    /// Sifts `g` through levels `from..`; returns the residue and the level
    /// where sifting stopped (`levels.len()` if it passed all of them).
    fn strip(&self, mut g: Permutation, from: usize) -> (Permutation, usize) {
        for (l, level) in self.levels.iter().enumerate().skip(from) {
            let beta = g.apply(level.base);
            match &level.inverse[beta] {
                None => return (g, l),
                Some(u_inv) => g = u_inv * &g,
            }
        }
        (g, self.levels.len())
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.strip(g.clone(), 0).0.is_identity()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// 0-based base points.
    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }
}

pub fn group_order(gens: &[Permutation]) -> Result<BigUint> {
    Ok(StabilizerChain::new(gens)?.order())
}

fn check_gens(gens: &[Permutation]) -> Result<usize> {
    let Some(first) = gens.first() else {
        return Err(Error::NoGenerators);
    };
    for g in gens {
        check_degrees(first, g)?;
    }
    Ok(first.degree())
}

pub fn is_transitive(gens: &[Permutation]) -> Result<bool> {
    let n = check_gens(gens)?;
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0];
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = g.apply(x);
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    Ok(count == n)
}

/// A partition of the points into blocks; stored 0-based, printed 1-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockSystem {
    blocks: Vec<Vec<usize>>,
}

impl BlockSystem {
    /// Each block sorted, blocks ordered by least element.
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort();
        Self { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_size(&self) -> usize {
        self.blocks[0].len()
    }

    /// Every generator maps each block onto a block.
    pub fn is_invariant_under(&self, gens: &[Permutation]) -> bool {
        let n: usize = self.blocks.iter().map(Vec::len).sum();
        let mut block_of = vec![usize::MAX; n];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                block_of[x] = i;
            }
        }
        gens.iter().all(|g| {
            self.blocks.iter().all(|b| {
                let target = block_of[g.apply(b[0])];
                b.iter().all(|&x| block_of[g.apply(x)] == target)
            })
        })
    }

    fn one_based(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|x| x + 1).collect())
            .collect()
    }
}

impl fmt::Display for BlockSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.one_based() {
            let parts: Vec<String> = b.iter().map(usize::to_string).collect();
            write!(f, "{{{}}}", parts.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BlockSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for BlockSystem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(serializer)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Finest invariant partition in which `0` and `p` share a block.
fn minimal_block_containing(gens: &[Permutation], n: usize, p: usize) -> BlockSystem {
    let mut parent: Vec<usize> = (0..n).collect();
    parent[p] = 0;
    let mut pending = vec![(0usize, p)];
    while let Some((x, y)) = pending.pop() {
        for g in gens {
            let (gx, gy) = (g.apply(x), g.apply(y));
            let (rx, ry) = (find(&mut parent, gx), find(&mut parent, gy));
            if rx != ry {
                parent[rx.max(ry)] = rx.min(ry);
                pending.push((gx, gy));
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for x in 0..n {
        let r = find(&mut parent, x);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(x);
    }
    BlockSystem::new(blocks)
}

/// The distinct nontrivial systems among the minimal blocks containing
/// `{1, p}` for each `p ≠ 1`. Empty iff the group is primitive.
pub fn block_systems(gens: &[Permutation]) -> Result<Vec<BlockSystem>> {
    let n = check_gens(gens)?;
    if !is_transitive(gens)? {
        return Err(Error::NotTransitive(n));
    }
    let systems: BTreeSet<BlockSystem> = (1..n)
        .map(|p| minimal_block_containing(gens, n, p))
        .filter(|s| s.blocks.len() > 1)
        .collect();
    Ok(systems.into_iter().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JordanVerdict {
    ContainsAlternating,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct JordanReport {
    pub verdict: JordanVerdict,
    /// A single prime-length cycle fixing at least three points.
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_cycles"
    )]
    pub witness: Option<Permutation>,
    pub seed: u64,
    pub candidates_tried: usize,
}

fn ser_opt_cycles<S: Serializer>(
    p: &Option<Permutation>,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    match p {
        Some(p) => serializer.serialize_str(&p.format_cycles()),
        None => serializer.serialize_none(),
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

/// Some power of `x` that is one prime-length cycle with at least three
/// fixed points, if any, optionally of one given length.
fn jordan_power(x: &Permutation, only: Option<usize>) -> Option<Permutation> {
    let n = x.degree();
    let order = x.order();
    let lengths = x.cycle_type();
    let mut primes: Vec<usize> = lengths
        .lengths()
        .iter()
        .flat_map(|&l| (2..=l).filter(move |&p| l % p == 0 && is_prime(p)))
        .collect();
    primes.sort_unstable();
    primes.dedup();
    for p in primes {
        if p + 3 > n || only.is_some_and(|q| q != p) {
            continue;
        }
        let y = x.pow((order / p as u128) as i128);
        let ty = y.cycle_type();
        if ty.lengths()[0] == p && ty.lengths().get(1).is_none_or(|&l| l == 1) {
            return Some(y);
        }
    }
    None
}

/// Sound one-sided test for `A_n ≤ <gens>`: a primitive group containing a
/// prime cycle that fixes at least three points contains `A_n`.
///
/// Candidates are the generators and their powers, commutators and products
/// of short powers, then random words drawn with `seed`.
pub fn jordan_alternating_test(gens: &[Permutation], seed: u64) -> Result<JordanReport> {
    let n = check_gens(gens)?;
    if !is_transitive(gens)? {
        return Err(Error::NotTransitive(n));
    }
    let mut report = JordanReport {
        verdict: JordanVerdict::Inconclusive,
        witness: None,
        seed,
        candidates_tried: 0,
    };
    if !block_systems(gens)?.is_empty() {
        return Ok(report);
    }
    let gens: Vec<Permutation> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
    if gens.is_empty() {
        return Ok(report);
    }
    let mut basics: Vec<Permutation> = Vec::new();
    for g in &gens {
        for k in 1..=3 {
            let h = g.pow(k);
            if !h.is_identity() {
                basics.push(h.clone());
                basics.push(h.inverse());
            }
        }
    }
    let mut structured: Vec<Permutation> = Vec::new();
    let mut tried: HashSet<Permutation> = HashSet::new();
    let mut push = |x: Permutation| {
        if tried.insert(x.clone()) {
            structured.push(x);
        }
    };
    for x in &basics {
        push(x.clone());
    }
    for x in &basics {
        for y in &basics {
            push(x.commutator(y)?);
            push(x * y);
        }
    }
    // 3-cycles first, then any admissible prime
    for only in [Some(3), None] {
        for (i, x) in structured.iter().enumerate() {
            if let Some(w) = jordan_power(x, only) {
                report.candidates_tried = if only.is_some() {
                    i + 1
                } else {
                    structured.len()
                };
                report.verdict = JordanVerdict::ContainsAlternating;
                report.witness = Some(w);
                return Ok(report);
            }
        }
    }
    report.candidates_tried = structured.len();
    let letters: Vec<Permutation> = gens.iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..JORDAN_RANDOM_WORDS {
        let len = rng.gen_range(1..=JORDAN_MAX_WORD);
        let mut x = Permutation::identity(n);
        for _ in 0..len {
            x = &x * &letters[rng.gen_range(0..letters.len())];
        }
        if !tried.insert(x.clone()) {
            continue;
        }
        report.candidates_tried += 1;
        if let Some(w) = jordan_power(&x, None) {
            report.verdict = JordanVerdict::ContainsAlternating;
            report.witness = Some(w);
            return Ok(report);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupName {
    Cyclic(usize),
    Dihedral(usize),
    Alternating(usize),
    Symmetric(usize),
    Other { order: BigUint, primitive: bool },
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupName::Cyclic(n) => write!(f, "Cyclic({n})"),
            GroupName::Dihedral(n) => write!(f, "Dihedral({n})"),
            GroupName::Alternating(n) => write!(f, "Alternating({n})"),
            GroupName::Symmetric(n) => write!(f, "Symmetric({n})"),
            GroupName::Other { order, primitive } => {
                let kind = if *primitive {
                    "primitive"
                } else {
                    "imprimitive"
                };
                write!(f, "Other({order},{kind})")
            }
        }
    }
}

impl Serialize for GroupName {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn ser_biguint<S: Serializer>(x: &BigUint, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_str(x)
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupReport {
    pub degree: usize,
    pub transitive: bool,
    pub primitive: bool,
    pub minimal_block_systems: Vec<BlockSystem>,
    #[serde(serialize_with = "ser_biguint")]
    pub order: BigUint,
    pub name: GroupName,
    /// Present for transitive groups.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jordan: Option<JordanReport>,
}

pub fn big_factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// All elements, by closure. Only for small groups.
fn elements(gens: &[Permutation]) -> Vec<Permutation> {
    let e = Permutation::identity(gens[0].degree());
    let mut seen: HashSet<Permutation> = HashSet::from([e.clone()]);
    let mut queue = VecDeque::from([e]);
    let mut out = Vec::new();
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g * &x;
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
        out.push(x);
    }
    out
}

fn is_dihedral(elements: &[Permutation], n: usize) -> bool {
    let Some(r) = elements.iter().find(|x| x.order() == n as u128) else {
        return false;
    };
    let rotations: HashSet<Permutation> = (0..n as i128).map(|k| r.pow(k)).collect();
    let r_inv = r.inverse();
    elements
        .iter()
        .any(|s| !rotations.contains(s) && (s * s).is_identity() && (&(s * r) * s) == r_inv)
}

pub fn identify(gens: &[Permutation]) -> Result<GroupReport> {
    identify_with_seed(gens, DEFAULT_SEED)
}

pub fn identify_with_seed(gens: &[Permutation], seed: u64) -> Result<GroupReport> {
    let n = check_gens(gens)?;
    let transitive = is_transitive(gens)?;
    let (systems, jordan) = if transitive {
        (
            block_systems(gens)?,
            Some(jordan_alternating_test(gens, seed)?),
        )
    } else {
        (Vec::new(), None)
    };
    let primitive = transitive && systems.is_empty();
    let order = group_order(gens)?;
    let n_big = BigUint::from(n);
    let n_fact = big_factorial(n);

    let small: Option<Vec<Permutation>> =
        (order == n_big || order == &n_big * 2u32).then(|| elements(gens));
    let name = if order == n_big
        && small
            .as_ref()
            .unwrap()
            .iter()
            .any(|x| x.order() == n as u128)
    {
        GroupName::Cyclic(n)
    } else if order == &n_big * 2u32 && is_dihedral(small.as_ref().unwrap(), n) {
        GroupName::Dihedral(n)
    } else if n >= 2 && order == &n_fact / 2u32 && gens.iter().all(Permutation::is_even) {
        GroupName::Alternating(n)
    } else if order == n_fact {
        GroupName::Symmetric(n)
    } else {
        GroupName::Other {
            order: order.clone(),
            primitive,
        }
    };
    if let Some(j) = &jordan {
        if j.verdict == JordanVerdict::ContainsAlternating {
            assert!(
                order == n_fact || order == &n_fact / 2u32,
                "Jordan witness contradicts the stabilizer-chain order {order}"
            );
        }
    }
    Ok(GroupReport {
        degree: n,
        transitive,
        primitive,
        minimal_block_systems: systems,
        order,
        name,
        jordan,
    })
}
