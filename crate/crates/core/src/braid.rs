//! The braid group `B₃` acting on triples, orbit enumeration over canonical
//! keys, and certification of the 1-cylinder property.
//!
//! A triple is 1-cylinder iff `a'b'` is an `n`-cycle for every `(a', b', c')`
//! in its `B₃` orbit. The orbit of a conjugation class is finite and closed
//! under all four generator moves, so every braid maps the class to one of
//! the enumerated keys; checking each visited key therefore covers all of
//! `B₃`, not just the words on the search tree.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::{product_is_full_cycle, Permutation};
use crate::triple::{CanonicalKey, PtsTriple};

pub const CERT_SCHEMA: &str = "pillowtile.cert.v1";

/// Default cap on the number of canonical keys one orbit search may visit.
pub const DEFAULT_MAX_ORBIT: usize = 100_000_000;

/// Frontiers at least this long are expanded in parallel.
const PARALLEL_FRONTIER: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    S1,
    S1Inv,
    S2,
    S2Inv,
}

impl Letter {
    /// In tie-breaking order.
    pub const ALL: [Letter; 4] = [Letter::S1, Letter::S1Inv, Letter::S2, Letter::S2Inv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::S1 => Letter::S1Inv,
            Letter::S1Inv => Letter::S1,
            Letter::S2 => Letter::S2Inv,
            Letter::S2Inv => Letter::S2,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Letter::S1 => "s1",
            Letter::S1Inv => "S1",
            Letter::S2 => "s2",
            Letter::S2Inv => "S2",
        }
    }

    pub fn apply(self, t: &PtsTriple) -> PtsTriple {
        match self {
            Letter::S1 => apply_sigma1(t),
            Letter::S1Inv => apply_sigma1_inv(t),
            Letter::S2 => apply_sigma2(t),
            Letter::S2Inv => apply_sigma2_inv(t),
        }
    }
}

/// `(a, b, c) -> (b, b⁻¹ab, c)`
pub fn apply_sigma1(t: &PtsTriple) -> PtsTriple {
    let (a, b, c) = (t.a(), t.b(), t.c());
    let mid = &(&b.inverse() * a) * b;
    PtsTriple::new_unchecked(b.clone(), mid, c.clone())
}

/// `(a, b, c) -> (aba⁻¹, a, c)`
pub fn apply_sigma1_inv(t: &PtsTriple) -> PtsTriple {
    let (a, b, c) = (t.a(), t.b(), t.c());
    let first = &(a * b) * &a.inverse();
    PtsTriple::new_unchecked(first, a.clone(), c.clone())
}

/// `(a, b, c) -> (a, c, c⁻¹bc)`
pub fn apply_sigma2(t: &PtsTriple) -> PtsTriple {
    let (a, b, c) = (t.a(), t.b(), t.c());
    let last = &(&c.inverse() * b) * c;
    PtsTriple::new_unchecked(a.clone(), c.clone(), last)
}

/// `(a, b, c) -> (a, bcb⁻¹, b)`
pub fn apply_sigma2_inv(t: &PtsTriple) -> PtsTriple {
    let (a, b, c) = (t.a(), t.b(), t.c());
    let mid = &(b * c) * &b.inverse();
    PtsTriple::new_unchecked(a.clone(), mid, b.clone())
}

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BraidWord(Vec<Letter>);

impl BraidWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Reversed with each letter inverted.
    pub fn inverse(&self) -> BraidWord {
        BraidWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Applies letters left to right.
    pub fn apply(&self, t: &PtsTriple) -> PtsTriple {
        self.0.iter().fold(t.clone(), |acc, l| l.apply(&acc))
    }
}

pub fn apply_word(t: &PtsTriple, w: &BraidWord) -> PtsTriple {
    w.apply(t)
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            f.write_str(l.token())?;
        }
        Ok(())
    }
}

impl fmt::Debug for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BraidWord({self})")
    }
}

/// Parses concatenated tokens `s1`, `S1`, `s2`, `S2`; whitespace is ignored.
impl FromStr for BraidWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if !compact.len().is_multiple_of(2) {
            return Err(Error::Parse(format!("bad braid word {s:?}")));
        }
        compact
            .chunks(2)
            .map(|pair| match pair {
                ['s', '1'] => Ok(Letter::S1),
                ['S', '1'] => Ok(Letter::S1Inv),
                ['s', '2'] => Ok(Letter::S2),
                ['S', '2'] => Ok(Letter::S2Inv),
                _ => Err(Error::Parse(format!("bad braid letter in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BraidWord)
    }
}

impl Serialize for BraidWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Whether `a * b` of a keyed triple is a full cycle.
pub(crate) fn key_ab_full_cycle(key: &CanonicalKey) -> bool {
    let n = key.degree();
    let (a, b) = (&key.images()[..n], &key.images()[n..2 * n]);
    let mut len = 1;
    let mut x = a[b[0] as usize] as usize;
    while x != 0 && len <= n {
        len += 1;
        x = a[b[x] as usize] as usize;
    }
    len == n
}

struct Node {
    key: CanonicalKey,
    parent: u32,
    letter: Option<Letter>,
}

/// Result of a breadth-first orbit search, possibly cut short.
pub(crate) struct Exploration {
    nodes: Vec<Node>,
    /// First visited key satisfying the stop predicate.
    pub stopped_at: Option<usize>,
}

impl Exploration {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn keys(&self) -> impl Iterator<Item = &CanonicalKey> {
        self.nodes.iter().map(|n| &n.key)
    }

    pub fn key(&self, idx: usize) -> &CanonicalKey {
        &self.nodes[idx].key
    }

    pub fn word(&self, mut idx: usize) -> BraidWord {
        let mut letters = Vec::new();
        while let Some(l) = self.nodes[idx].letter {
            letters.push(l);
            idx = self.nodes[idx].parent as usize;
        }
        letters.reverse();
        BraidWord(letters)
    }
}

fn children(key: &CanonicalKey) -> [CanonicalKey; 4] {
    let t = key.to_triple();
    // every generator preserves <a, b, c>, hence transitivity
    Letter::ALL.map(|l| {
        l.apply(&t)
            .canonicalize()
            .expect("braid moves preserve transitivity")
    })
}

/// Breadth-first search over canonical keys.
///
/// Levels are expanded in the order of their discovery words, and a key is
/// credited to the first (parent, letter) pair reaching it, so each key's
/// word is the shortest and then lexicographically least over
/// `s1 < S1 < s2 < S2`. The result does not depend on thread count.
pub(crate) fn explore(
    start: &CanonicalKey,
    max_keys: usize,
    stop: impl Fn(&CanonicalKey) -> bool,
) -> Result<Exploration> {
    let mut nodes = vec![Node {
        key: start.clone(),
        parent: 0,
        letter: None,
    }];
    if stop(start) {
        return Ok(Exploration {
            nodes,
            stopped_at: Some(0),
        });
    }
    let mut index: HashMap<CanonicalKey, u32> = HashMap::new();
    index.insert(start.clone(), 0);
    let mut frontier: Vec<u32> = vec![0];
    while !frontier.is_empty() {
        let expanded: Vec<[CanonicalKey; 4]> = if frontier.len() >= PARALLEL_FRONTIER {
            frontier
                .par_iter()
                .map(|&i| children(&nodes[i as usize].key))
                .collect()
        } else {
            frontier
                .iter()
                .map(|&i| children(&nodes[i as usize].key))
                .collect()
        };
        let mut next = Vec::new();
        for (&parent, kids) in frontier.iter().zip(expanded) {
            for (letter, key) in Letter::ALL.into_iter().zip(kids) {
                if index.contains_key(&key) {
                    continue;
                }
                if nodes.len() >= max_keys {
                    return Err(Error::OrbitTooLarge(max_keys));
                }
                let idx = nodes.len() as u32;
                let hit = stop(&key);
                index.insert(key.clone(), idx);
                nodes.push(Node {
                    key,
                    parent,
                    letter: Some(letter),
                });
                if hit {
                    return Ok(Exploration {
                        nodes,
                        stopped_at: Some(idx as usize),
                    });
                }
                next.push(idx);
            }
        }
        frontier = next;
    }
    Ok(Exploration {
        nodes,
        stopped_at: None,
    })
}

/// An orbit: sorted canonical keys, each with a shortest discovery word from
/// the starting class.
#[derive(Clone, Debug)]
pub struct BraidOrbit {
    start: CanonicalKey,
    members: Vec<(CanonicalKey, BraidWord)>,
}

impl BraidOrbit {
    pub fn start(&self) -> &CanonicalKey {
        &self.start
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[(CanonicalKey, BraidWord)] {
        &self.members
    }

    pub fn contains(&self, key: &CanonicalKey) -> bool {
        self.word(key).is_some()
    }

    pub fn word(&self, key: &CanonicalKey) -> Option<&BraidWord> {
        self.members
            .binary_search_by(|(k, _)| k.cmp(key))
            .ok()
            .map(|i| &self.members[i].1)
    }

    /// Least key; identifies the orbit.
    pub fn least_key(&self) -> &CanonicalKey {
        &self.members[0].0
    }
}

pub fn braid_orbit(t: &PtsTriple) -> Result<BraidOrbit> {
    braid_orbit_capped(t, DEFAULT_MAX_ORBIT)
}

pub fn braid_orbit_capped(t: &PtsTriple, max_keys: usize) -> Result<BraidOrbit> {
    let start = t.canonicalize()?;
    let found = explore(&start, max_keys, |_| false)?;
    let mut members: Vec<(CanonicalKey, BraidWord)> = (0..found.len())
        .map(|i| (found.key(i).clone(), found.word(i)))
        .collect();
    members.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(BraidOrbit { start, members })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Structural,
    Exhaustive,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    OneCylinder,
    NotOneCylinder,
    /// Only from structural mode, when neither structural case applies.
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    Structural,
    Exhaustive,
}

/// Which closure argument certified a triple structurally.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructuralCase {
    /// `a, b, c` are `n`-cycles with `abc = 1`.
    ThreeNCycles,
    /// One coordinate is the identity; the other two and their product, in
    /// the surviving order, are `n`-cycles.
    IdentityCoordinate,
}

#[derive(Clone, Debug, Serialize)]
pub struct CylinderCertificate {
    pub schema: &'static str,
    pub degree: usize,
    pub triple: PtsTriple,
    pub verdict: Verdict,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<Reason>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structural_case: Option<StructuralCase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_word: Option<BraidWord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_triple: Option<PtsTriple>,
}

impl CylinderCertificate {
    fn new(t: &PtsTriple, mode: Mode, verdict: Verdict) -> Self {
        Self {
            schema: CERT_SCHEMA,
            degree: t.degree(),
            triple: t.clone(),
            verdict,
            mode,
            reason: None,
            structural_case: None,
            orbit_size: None,
            witness_word: None,
            witness_triple: None,
        }
    }

    pub fn is_one_cylinder(&self) -> bool {
        self.verdict == Verdict::OneCylinder
    }
}

pub fn structural_case(t: &PtsTriple) -> Option<StructuralCase> {
    let [a, b, c] = t.coords();
    if a.is_full_cycle() && b.is_full_cycle() && c.is_full_cycle() && t.product().is_identity() {
        return Some(StructuralCase::ThreeNCycles);
    }
    let surviving: Option<(&Permutation, &Permutation)> =
        match (a.is_identity(), b.is_identity(), c.is_identity()) {
            (true, false, false) => Some((b, c)),
            (false, true, false) => Some((a, c)),
            (false, false, true) => Some((a, b)),
            _ => None,
        };
    let (u, v) = surviving?;
    (u.is_full_cycle() && v.is_full_cycle() && product_is_full_cycle(u, v))
        .then_some(StructuralCase::IdentityCoordinate)
}

pub fn certify_one_cylinder(t: &PtsTriple, mode: Mode) -> Result<CylinderCertificate> {
    certify_capped(t, mode, DEFAULT_MAX_ORBIT)
}

pub fn certify_capped(t: &PtsTriple, mode: Mode, max_keys: usize) -> Result<CylinderCertificate> {
    if !t.is_connected() {
        return Err(Error::NotTransitive(t.degree()));
    }
    if mode != Mode::Exhaustive {
        if let Some(case) = structural_case(t) {
            let mut cert = CylinderCertificate::new(t, mode, Verdict::OneCylinder);
            cert.reason = Some(Reason::Structural);
            cert.structural_case = Some(case);
            return Ok(cert);
        }
        if mode == Mode::Structural {
            return Ok(CylinderCertificate::new(t, mode, Verdict::Undecided));
        }
    }
    let start = t.canonicalize()?;
    let found = explore(&start, max_keys, |k| !key_ab_full_cycle(k))?;
    Ok(match found.stopped_at {
        None => {
            let mut cert = CylinderCertificate::new(t, mode, Verdict::OneCylinder);
            cert.reason = Some(Reason::Exhaustive);
            cert.orbit_size = Some(found.len());
            cert
        }
        Some(idx) => {
            let word = found.word(idx);
            let witness = word.apply(t);
            debug_assert!(!product_is_full_cycle(witness.a(), witness.b()));
            let mut cert = CylinderCertificate::new(t, mode, Verdict::NotOneCylinder);
            cert.witness_word = Some(word);
            cert.witness_triple = Some(witness);
            cert
        }
    })
}

/// `ab`, `bc` and `ac` are all `n`-cycles. Necessary for 1-cylinder.
pub fn pairwise_products_full_cycles(t: &PtsTriple) -> bool {
    let [a, b, c] = t.coords();
    product_is_full_cycle(a, b) && product_is_full_cycle(b, c) && product_is_full_cycle(a, c)
}
