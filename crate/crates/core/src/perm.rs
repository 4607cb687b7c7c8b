//! Permutations of `{1..n}` stored as image tables.
//!
//! Points are 0-based inside the crate and 1-based in every text format.
//! Products compose right-to-left: `(p * q)(x) = p(q(x))`.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported degree; points are stored as `u16`.
pub const MAX_DEGREE: usize = u16::MAX as usize + 1;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Box<[u16]>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        assert!(
            (1..=MAX_DEGREE).contains(&degree),
            "degree {degree} out of range"
        );
        Self::from_raw((0..degree).map(|x| x as u16).collect())
    }

    /// Builds from a 0-based image table, checking bijectivity.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::InvalidPermutation(
                "degree must be at least 1".into(),
            ));
        }
        if n > MAX_DEGREE {
            return Err(Error::InvalidPermutation(format!(
                "degree {n} exceeds {MAX_DEGREE}"
            )));
        }
        let mut seen = vec![false; n];
        for &x in images {
            if x >= n {
                return Err(Error::InvalidPermutation(format!(
                    "image {} out of range 1..{n}",
                    x + 1
                )));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidPermutation(format!(
                    "image {} repeated",
                    x + 1
                )));
            }
        }
        Ok(Self::from_raw(images.iter().map(|&x| x as u16).collect()))
    }

    /// Builds from a 1-based image table `[p(1), p(2), ...]`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidPermutation("points are 1-based".into()));
        }
        let zero: Vec<usize> = images.iter().map(|&x| x - 1).collect();
        Self::from_images(&zero)
    }

    /// Builds from disjoint cycles over 1-based points.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::InvalidPermutation(format!(
                "degree {degree} out of range"
            )));
        }
        let mut image: Vec<usize> = (0..degree).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for &x in cycle {
                if x == 0 || x > degree {
                    return Err(Error::Parse(format!("point {x} out of range 1..{degree}")));
                }
                if std::mem::replace(&mut used[x - 1], true) {
                    return Err(Error::Parse(format!("point {x} repeated")));
                }
            }
            for (i, &x) in cycle.iter().enumerate() {
                image[x - 1] = cycle[(i + 1) % cycle.len()] - 1;
            }
        }
        Self::from_images(&image)
    }

    /// A single cycle over 1-based points.
    pub fn cycle(degree: usize, points: &[usize]) -> Result<Self> {
        Self::from_cycles(degree, &[points.to_vec()])
    }

    /// The cycle `(1 2 ... n)`.
    pub fn standard_cycle(degree: usize) -> Self {
        let mut image: Vec<u16> = (1..=degree).map(|x| x as u16).collect();
        image[degree - 1] = 0;
        Self::from_raw(image.into_boxed_slice())
    }

    pub(crate) fn from_raw(image: Box<[u16]>) -> Self {
        debug_assert!(is_bijection(&image), "not a bijection: {image:?}");
        Self { image }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.image.len()
    }

    /// Image of the 0-based point `x`.
    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x] as usize
    }

    #[inline]
    pub fn images(&self) -> &[u16] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self * other`, i.e. `x -> self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        check_degrees(self, other)?;
        Ok(self.compose_unchecked(other))
    }

    fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        Self::from_raw(
            other
                .image
                .iter()
                .map(|&x| self.image[x as usize])
                .collect(),
        )
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u16; self.degree()];
        for (i, &x) in self.image.iter().enumerate() {
            inv[x as usize] = i as u16;
        }
        Self::from_raw(inv.into_boxed_slice())
    }

    /// `g⁻¹ self g`.
    pub fn conjugate(&self, g: &Permutation) -> Result<Permutation> {
        check_degrees(self, g)?;
        Ok(&(&g.inverse() * self) * g)
    }

    /// `[self, q] = self · q · self⁻¹ · q⁻¹`.
    ///
    /// This bracket order is the one under which the commutator `[a, b²]` of
    /// the odd-degree counterexample family is a 3-cycle through `2` and `n`.
    pub fn commutator(&self, q: &Permutation) -> Result<Permutation> {
        check_degrees(self, q)?;
        Ok(&(&(self * q) * &self.inverse()) * &q.inverse())
    }

    pub fn pow(&self, exp: i128) -> Permutation {
        let n = self.degree();
        let mut image = vec![0u16; n];
        for cycle in self.cycles() {
            let len = cycle.len() as i128;
            let shift = exp.rem_euclid(len) as usize;
            for (i, &x) in cycle.iter().enumerate() {
                image[x] = cycle[(i + shift) % cycle.len()] as u16;
            }
        }
        Self::from_raw(image.into_boxed_slice())
    }

    /// Disjoint cycles over 0-based points, fixed points included, each
    /// starting at its least element, ordered by least element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::new(self.cycles().iter().map(Vec::len).collect())
    }

    /// Number of disjoint cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
            }
        }
        count
    }

    /// `(-1)^(n - t)`.
    pub fn sign(&self) -> i8 {
        if (self.degree() - self.cycle_count()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn is_even(&self) -> bool {
        self.sign() == 1
    }

    pub fn is_full_cycle(&self) -> bool {
        cycle_length_from_zero(self.degree(), |x| self.apply(x)) == self.degree()
    }

    /// Element order, the lcm of the cycle lengths.
    pub fn order(&self) -> u128 {
        self.cycles()
            .iter()
            .fold(1u128, |acc, c| acc.lcm(&(c.len() as u128)))
    }

    /// Moved points, 0-based and ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.degree()).filter(|&x| self.apply(x) != x).collect()
    }

    /// Canonical disjoint-cycle text: cycles start at their least point,
    /// ordered by least point, fixed points omitted, identity is `()`.
    pub fn format_cycles(&self) -> String {
        let mut out = String::new();
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            out.push('(');
            for (i, x) in cycle.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(&(x + 1).to_string());
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }

    /// Parses disjoint-cycle notation such as `(1 2 3)(4 5)`; omitted points
    /// are fixed. Commas are accepted as separators inside a cycle.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation> {
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = text.trim();
        if rest.is_empty() {
            return Err(Error::Parse("empty cycle text".into()));
        }
        while !rest.is_empty() {
            let Some(body) = rest.strip_prefix('(') else {
                return Err(Error::Parse(format!("expected '(' at {rest:?}")));
            };
            let Some(close) = body.find(')') else {
                return Err(Error::Parse(format!("unclosed cycle in {text:?}")));
            };
            let inner = &body[..close];
            if inner.contains('(') {
                return Err(Error::Parse(format!("nested '(' in {text:?}")));
            }
            let points = inner
                .split(|ch: char| ch.is_whitespace() || ch == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad point {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if !points.is_empty() {
                cycles.push(points);
            }
            rest = body[close + 1..].trim_start();
        }
        Self::from_cycles(degree, &cycles).map_err(|e| match e {
            Error::InvalidPermutation(m) => Error::Parse(m),
            other => other,
        })
    }

    /// Parses a body that is either cycle notation or a 1-based image list.
    pub fn parse_body(body: &str, degree: usize) -> Result<Permutation> {
        let body = body.trim();
        if body.starts_with('(') {
            return Self::parse_cycles(body, degree);
        }
        let images = body
            .split_whitespace()
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad image {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if images.len() != degree {
            return Err(Error::Parse(format!(
                "expected {degree} images, found {}",
                images.len()
            )));
        }
        Self::from_one_based(&images).map_err(|e| Error::Parse(e.to_string()))
    }

    /// The `k`-th permutation of degree `n` in lexicographic order of image
    /// tables, `0 <= k < n!`.
    pub fn nth_lex(degree: usize, mut k: u64) -> Permutation {
        let mut pool: Vec<u16> = (0..degree as u16).collect();
        let mut fact: Vec<u64> = vec![1; degree];
        for i in 1..degree {
            fact[i] = fact[i - 1] * i as u64;
        }
        let mut image = Vec::with_capacity(degree);
        for i in (0..degree).rev() {
            let idx = (k / fact[i]) as usize;
            k %= fact[i];
            image.push(pool.remove(idx));
        }
        Self::from_raw(image.into_boxed_slice())
    }

    /// Lexicographic rank, inverse of [`Permutation::nth_lex`].
    pub fn lex_rank(&self) -> u64 {
        let n = self.degree();
        let mut rank = 0u64;
        for i in 0..n {
            let smaller_later = self.image[i + 1..]
                .iter()
                .filter(|&&y| y < self.image[i])
                .count() as u64;
            rank = rank * (n - i) as u64 + smaller_later;
        }
        rank
    }
}

/// Whether `p * q` is an `n`-cycle, without allocating the product.
pub fn product_is_full_cycle(p: &Permutation, q: &Permutation) -> bool {
    debug_assert_eq!(p.degree(), q.degree());
    cycle_length_from_zero(p.degree(), |x| p.apply(q.apply(x))) == p.degree()
}

#[inline]
fn cycle_length_from_zero(n: usize, f: impl Fn(usize) -> usize) -> usize {
    let mut len = 1;
    let mut x = f(0);
    while x != 0 {
        len += 1;
        if len > n {
            break;
        }
        x = f(x);
    }
    len
}

/// Number of permutations of degree `n`, when it fits in `u64`.
pub fn factorial(n: usize) -> Option<u64> {
    (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

fn is_bijection(image: &[u16]) -> bool {
    let mut seen = vec![false; image.len()];
    image
        .iter()
        .all(|&x| (x as usize) < image.len() && !std::mem::replace(&mut seen[x as usize], true))
}

pub(crate) fn check_degrees(p: &Permutation, q: &Permutation) -> Result<()> {
    if p.degree() == q.degree() {
        Ok(())
    } else {
        Err(Error::DegreeMismatch(p.degree(), q.degree()))
    }
}

/// Right-to-left product. Panics on mismatched degrees; use
/// [`Permutation::compose`] for the checked form.
impl Mul for &Permutation {
    type Output = Permutation;

    fn mul(self, rhs: &Permutation) -> Permutation {
        assert_eq!(self.degree(), rhs.degree(), "degree mismatch");
        self.compose_unchecked(rhs)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_cycles())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.degree(), self.format_cycles())
    }
}

/// `"n: (1 2 3)(4 5)"` or the one-line image form `"n: i1 i2 ... in"`.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (degree, body) = split_degree(s)?;
        Self::parse_body(body, degree)
    }
}

pub(crate) fn split_degree(s: &str) -> Result<(usize, &str)> {
    let Some((head, body)) = s.split_once(':') else {
        return Err(Error::Parse(format!("missing degree prefix in {s:?}")));
    };
    let degree = head
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Parse(format!("bad degree {:?}", head.trim())))?;
    if degree == 0 || degree > MAX_DEGREE {
        return Err(Error::Parse(format!("degree {degree} out of range")));
    }
    Ok((degree, body))
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&format!("{}: {}", self.degree(), self.format_cycles()))
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Multiset of cycle lengths, stored in non-increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn new(mut lengths: Vec<usize>) -> Self {
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        Self(lengths)
    }

    pub fn lengths(&self) -> &[usize] {
        &self.0
    }

    /// The cycle count `t`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for CycleType {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::perm_strategy;
    use proptest::prelude::*;

    fn p(n: usize, s: &str) -> Permutation {
        Permutation::parse_cycles(s, n).unwrap()
    }

    #[test]
    fn composition_convention_matches_family_product() {
        let a = p(5, "(1 2 3 4 5)");
        let b = p(5, "(1 4 2 3 5)");
        assert_eq!(a.compose(&b).unwrap(), p(5, "(1 5 2 4 3)"));
        // The left-to-right reading gives a different product.
        assert_ne!(b.compose(&a).unwrap(), p(5, "(1 5 2 4 3)"));
    }

    #[test]
    fn compose_identity_and_inverse() {
        let x = p(6, "(1 4)(2 6 3)");
        let e = Permutation::identity(6);
        assert_eq!(x.compose(&e).unwrap(), x);
        assert_eq!(e.compose(&x).unwrap(), x);
        assert!(x.compose(&x.inverse()).unwrap().is_identity());
    }

    #[test]
    fn compose_rejects_degree_mismatch() {
        let err = p(3, "(1 2)").compose(&p(5, "(1 2)")).unwrap_err();
        assert!(matches!(err, Error::DegreeMismatch(3, 5)));
        assert!(p(3, "(1 2)").conjugate(&Permutation::identity(4)).is_err());
        assert!(p(3, "(1 2)").commutator(&Permutation::identity(4)).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert!(Permutation::identity(4).inverse().is_identity());
        assert_eq!(p(3, "(1 2 3)").inverse(), p(3, "(1 3 2)"));
        // point-by-point inversion of 1->5->2->4->3->1
        assert_eq!(p(5, "(1 5 2 4 3)").inverse(), p(5, "(1 3 4 2 5)"));
    }

    #[test]
    fn conjugate_examples() {
        let x = p(3, "(1 2)");
        assert_eq!(x.conjugate(&Permutation::identity(3)).unwrap(), x);
        // g = (1 2 3): g⁻¹ (1 2) g sends 1 -> g⁻¹((1 2)(g(1))) = g⁻¹(1) = 3.
        assert_eq!(x.conjugate(&p(3, "(1 2 3)")).unwrap(), p(3, "(1 3)"));
    }

    #[test]
    fn commutator_trivial_cases() {
        let x = p(5, "(1 3 5)(2 4)");
        assert!(x.commutator(&x).unwrap().is_identity());
        assert!(x
            .commutator(&Permutation::identity(5))
            .unwrap()
            .is_identity());
    }

    #[test]
    fn cycle_type_examples() {
        let t = Permutation::identity(4).cycle_type();
        assert_eq!(t.lengths(), &[1, 1, 1, 1]);
        assert_eq!(t.len(), 4);
        let t = p(5, "(1 2)(3 4)").cycle_type();
        assert_eq!(t.lengths(), &[2, 2, 1]);
        assert_eq!(t.len(), 3);
        let t = p(5, "(1 5 2 4 3)").cycle_type();
        assert_eq!(t.lengths(), &[5]);
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn sign_examples() {
        assert_eq!(Permutation::identity(7).sign(), 1);
        assert_eq!(p(7, "(3 6)").sign(), -1);
        for n in [3usize, 5, 7, 9] {
            assert_eq!(Permutation::standard_cycle(n).sign(), 1);
        }
        assert_eq!(Permutation::standard_cycle(4).sign(), -1);
    }

    #[test]
    fn full_cycle_examples() {
        assert!(p(5, "(1 2 3 4 5)").is_full_cycle());
        assert!(!Permutation::identity(2).is_full_cycle());
        assert!(!p(5, "(1 2)(3 4 5)").is_full_cycle());
        assert!(Permutation::identity(1).is_full_cycle());
    }

    #[test]
    fn parse_and_format() {
        assert!(p(5, "()").is_identity());
        let b = p(5, "(1 4 2 3 5)");
        assert_eq!(b.images(), &[3, 2, 4, 1, 0]);
        assert_eq!(p(4, "(2 1)").format_cycles(), "(1 2)");
        assert_eq!(p(6, "(4 6)(3 1 2)").format_cycles(), "(1 2 3)(4 6)");
        assert_eq!(p(6, "(1,2, 3)  (5)").format_cycles(), "(1 2 3)");
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "",
            "1 2",
            "(1 2",
            "(1 2)(2 3)",
            "(1 9)",
            "(0 1)",
            "(1 x)",
            "((1 2))",
        ] {
            assert!(
                matches!(Permutation::parse_cycles(bad, 5), Err(Error::Parse(_))),
                "{bad:?} should fail"
            );
        }
    }

    #[test]
    fn one_line_image_format() {
        let x: Permutation = "5: 4 3 5 2 1".parse().unwrap();
        assert_eq!(x, p(5, "(1 4 2 3 5)"));
        let y: Permutation = "5: (1 4 2 3 5)".parse().unwrap();
        assert_eq!(x, y);
        assert!("5: 1 2 3".parse::<Permutation>().is_err());
        assert!("5: 1 1 2 3 4".parse::<Permutation>().is_err());
        assert!("(1 2)".parse::<Permutation>().is_err());
    }

    #[test]
    fn degree_is_part_of_the_value() {
        assert_ne!(p(5, "(1 2)"), p(3, "(1 2)"));
    }

    #[test]
    fn lex_rank_round_trip() {
        for k in 0..120 {
            let x = Permutation::nth_lex(5, k);
            assert_eq!(x.lex_rank(), k);
        }
        assert!(Permutation::nth_lex(4, 0).is_identity());
        assert_eq!(Permutation::nth_lex(3, 5).images(), &[2, 1, 0]);
    }

    #[test]
    fn power_and_order() {
        let x = p(7, "(1 2 3)(4 5)");
        assert_eq!(x.order(), 6);
        assert!(x.pow(6).is_identity());
        assert_eq!(x.pow(-1), x.inverse());
        assert_eq!(x.pow(2), &x * &x);
        assert_eq!(x.pow(3), p(7, "(4 5)"));
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(x in (1usize..12).prop_flat_map(perm_strategy)) {
            let text = x.format_cycles();
            prop_assert_eq!(Permutation::parse_cycles(&text, x.degree()).unwrap(), x.clone());
            let json = serde_json::to_string(&x).unwrap();
            prop_assert_eq!(serde_json::from_str::<Permutation>(&json).unwrap(), x);
        }

        #[test]
        fn associativity(
            (x, y, z) in (1usize..10).prop_flat_map(|n| (perm_strategy(n), perm_strategy(n), perm_strategy(n)))
        ) {
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            let e = Permutation::identity(x.degree());
            prop_assert_eq!(&e * &x, x.clone());
            prop_assert_eq!(&x * &e, x);
        }

        #[test]
        fn sign_and_parity((x, y) in (1usize..10).prop_flat_map(|n| (perm_strategy(n), perm_strategy(n)))) {
            let n = x.degree() as i64;
            let xy = &x * &y;
            prop_assert_eq!(xy.sign(), x.sign() * y.sign());
            let lhs = xy.cycle_count() as i64;
            let rhs = x.cycle_count() as i64 + y.cycle_count() as i64 - n;
            prop_assert_eq!(lhs.rem_euclid(2), rhs.rem_euclid(2));
            prop_assert_eq!(product_is_full_cycle(&x, &y), xy.is_full_cycle());
        }

        #[test]
        fn conjugation_preserves_cycle_type((x, g) in (1usize..10).prop_flat_map(|n| (perm_strategy(n), perm_strategy(n)))) {
            prop_assert_eq!(x.conjugate(&g).unwrap().cycle_type(), x.cycle_type());
        }
    }
}
