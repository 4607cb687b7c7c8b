//! Permutation triples `(a, b, c)` encoding pillowcase covers, taken up to
//! simultaneous conjugation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::{check_degrees, split_degree, CycleType, Permutation};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PtsTriple {
    a: Permutation,
    b: Permutation,
    c: Permutation,
}

impl PtsTriple {
    pub fn new(a: Permutation, b: Permutation, c: Permutation) -> Result<Self> {
        check_degrees(&a, &b)?;
        check_degrees(&a, &c)?;
        Ok(Self { a, b, c })
    }

    pub(crate) fn new_unchecked(a: Permutation, b: Permutation, c: Permutation) -> Self {
        debug_assert!(a.degree() == b.degree() && a.degree() == c.degree());
        Self { a, b, c }
    }

    pub fn identity(degree: usize) -> Self {
        let e = Permutation::identity(degree);
        Self::new_unchecked(e.clone(), e.clone(), e)
    }

    pub fn degree(&self) -> usize {
        self.a.degree()
    }

    pub fn a(&self) -> &Permutation {
        &self.a
    }

    pub fn b(&self) -> &Permutation {
        &self.b
    }

    pub fn c(&self) -> &Permutation {
        &self.c
    }

    pub fn coords(&self) -> [&Permutation; 3] {
        [&self.a, &self.b, &self.c]
    }

    pub fn into_coords(self) -> (Permutation, Permutation, Permutation) {
        (self.a, self.b, self.c)
    }

    /// `abc`.
    pub fn product(&self) -> Permutation {
        &(&self.a * &self.b) * &self.c
    }

    /// `d = (abc)⁻¹`, the monodromy around the fourth pole.
    pub fn fourth_element(&self) -> Permutation {
        self.product().inverse()
    }

    /// Whether `<a, b, c>` is transitive, i.e. the cover is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for g in self.coords() {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == n
    }

    /// `(g⁻¹ag, g⁻¹bg, g⁻¹cg)`.
    pub fn conjugate_all(&self, g: &Permutation) -> Result<Self> {
        check_degrees(&self.a, g)?;
        let gi = g.inverse();
        let conj = |x: &Permutation| &(&gi * x) * g;
        Ok(Self::new_unchecked(
            conj(&self.a),
            conj(&self.b),
            conj(&self.c),
        ))
    }

    pub fn canonicalize(&self) -> Result<CanonicalKey> {
        canonicalize_counted(self).map(|(key, _)| key)
    }

    pub fn cycle_types(&self) -> [CycleType; 4] {
        [
            self.a.cycle_type(),
            self.b.cycle_type(),
            self.c.cycle_type(),
            self.fourth_element().cycle_type(),
        ]
    }

    /// Genus and singularity orders of the cover via Riemann–Hurwitz over
    /// the four poles.
    pub fn topology(&self) -> Result<CoverTopology> {
        if !self.is_connected() {
            return Err(Error::NotTransitive(self.degree()));
        }
        let n = self.degree() as i64;
        let d = self.fourth_element();
        let mut t_sum = 0i64;
        let mut orders = Vec::new();
        for g in [&self.a, &self.b, &self.c, &d] {
            let ty = g.cycle_type();
            t_sum += ty.len() as i64;
            orders.extend(ty.lengths().iter().map(|&l| l as i64 - 2));
        }
        // 2 - 2g = t(a) + t(b) + t(c) + t(d) - 2n
        let euler = t_sum - 2 * n;
        debug_assert!(euler % 2 == 0 && euler <= 2);
        let genus = ((2 - euler) / 2) as u64;
        orders.sort_unstable_by(|x, y| y.cmp(x));
        Ok(CoverTopology { genus, orders })
    }
}

impl fmt::Display for PtsTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}; {}; {}",
            self.degree(),
            self.a.format_cycles(),
            self.b.format_cycles(),
            self.c.format_cycles()
        )
    }
}

impl fmt::Debug for PtsTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `"n: <a>; <b>; <c>"` where each coordinate is cycle notation or a 1-based
/// image list.
impl FromStr for PtsTriple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (degree, body) = split_degree(s)?;
        let parts: Vec<&str> = body.split(';').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "expected three ';'-separated permutations, found {}",
                parts.len()
            )));
        }
        let a = Permutation::parse_body(parts[0], degree)?;
        let b = Permutation::parse_body(parts[1], degree)?;
        let c = Permutation::parse_body(parts[2], degree)?;
        Ok(Self::new_unchecked(a, b, c))
    }
}

impl Serialize for PtsTriple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PtsTriple {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Relabeled image tables of `a`, `b`, `c` (0-based, concatenated), least
/// over all base points. Equal keys mean simultaneously conjugate triples.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    degree: u32,
    images: Box<[u16]>,
}

impl CanonicalKey {
    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn images(&self) -> &[u16] {
        &self.images
    }

    pub fn to_triple(&self) -> PtsTriple {
        let n = self.degree();
        let part = |k: usize| Permutation::from_raw(self.images[k * n..(k + 1) * n].into());
        PtsTriple::new_unchecked(part(0), part(1), part(2))
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.degree)?;
        for &x in self.images.iter() {
            write!(f, " {}", x + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `"n: x1 ... x3n"`. The result must already be canonical.
impl FromStr for CanonicalKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (degree, body) = split_degree(s)?;
        let values = body
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad key entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.len() != 3 * degree {
            return Err(Error::Parse(format!(
                "expected {} key entries, found {}",
                3 * degree,
                values.len()
            )));
        }
        let part = |k: usize| {
            Permutation::from_one_based(&values[k * degree..(k + 1) * degree])
                .map_err(|e| Error::Parse(e.to_string()))
        };
        let triple = PtsTriple::new_unchecked(part(0)?, part(1)?, part(2)?);
        let key = triple.canonicalize()?;
        if key
            .to_string()
            .split_whitespace()
            .skip(1)
            .ne(body.split_whitespace())
        {
            return Err(Error::Parse(format!("{s:?} is not a canonical key")));
        }
        Ok(key)
    }
}

impl Serialize for CanonicalKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CanonicalKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Canonical key plus the number of table lookups spent computing it.
///
/// Each base point costs one breadth-first relabeling (`6n` lookups over the
/// generators `a, b, c, a⁻¹, b⁻¹, c⁻¹`, in that order) and one rewrite of the
/// three image tables (`3n` lookups), so a call costs exactly `9n²`.
pub fn canonicalize_counted(t: &PtsTriple) -> Result<(CanonicalKey, u64)> {
    let n = t.degree();
    let inverses = [t.a.inverse(), t.b.inverse(), t.c.inverse()];
    // exploration order is part of the key format
    let gens: [&[u16]; 6] = [
        t.a.images(),
        t.b.images(),
        t.c.images(),
        inverses[0].images(),
        inverses[1].images(),
        inverses[2].images(),
    ];
    const UNSEEN: u16 = u16::MAX;
    let mut label = vec![UNSEEN; n];
    let mut queue: Vec<u16> = Vec::with_capacity(n);
    let mut best: Vec<u16> = Vec::new();
    let mut candidate: Vec<u16> = vec![0; 3 * n];
    let mut ops = 0u64;

    for base in 0..n {
        label.fill(UNSEEN);
        queue.clear();
        label[base] = 0;
        queue.push(base as u16);
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head] as usize;
            head += 1;
            for g in gens {
                let w = g[v] as usize;
                ops += 1;
                if label[w] == UNSEEN {
                    label[w] = queue.len() as u16;
                    queue.push(w as u16);
                }
            }
        }
        if queue.len() < n {
            return Err(Error::NotTransitive(n));
        }
        for (k, g) in gens[..3].iter().enumerate() {
            for (i, &old) in queue.iter().enumerate() {
                candidate[k * n + i] = label[g[old as usize] as usize];
                ops += 1;
            }
        }
        if best.is_empty() || candidate < best {
            best.clone_from(&candidate);
        }
    }
    Ok((
        CanonicalKey {
            degree: n as u32,
            images: best.into_boxed_slice(),
        },
        ops,
    ))
}

/// Genus and the multiset of quadratic-differential singularity orders of a
/// connected cover. Order `-1` is a pole; order `0` comes from a 2-cycle and
/// is a removable marked point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverTopology {
    pub genus: u64,
    /// Non-increasing.
    pub orders: Vec<i64>,
}

impl CoverTopology {
    pub fn order_sum(&self) -> i64 {
        self.orders.iter().sum()
    }

    pub fn removable_points(&self) -> usize {
        self.orders.iter().filter(|&&k| k == 0).count()
    }

    /// Stratum-style label such as `Q(3^3, -1^5)`; order-0 points are kept
    /// and marked with `*`.
    pub fn stratum_label(&self) -> String {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.orders.len() {
            let k = self.orders[i];
            let run = self.orders[i..].iter().take_while(|&&x| x == k).count();
            let mark = if k == 0 { "*" } else { "" };
            if run == 1 {
                parts.push(format!("{k}{mark}"));
            } else {
                parts.push(format!("{k}{mark}^{run}"));
            }
            i += run;
        }
        format!("Q({})", parts.join(", "))
    }
}
