//! The odd-degree non-cyclic 1-cylinder family, its identity-coordinate
//! variant, and the even-degree parity obstruction.

use rayon::prelude::*;
use serde::Serialize;

use crate::braid::{
    certify_capped, pairwise_products_full_cycles, CylinderCertificate, Mode, Verdict,
    DEFAULT_MAX_ORBIT,
};
use crate::error::{Error, Result};
use crate::grouper::{identify_with_seed, GroupReport, DEFAULT_SEED};
use crate::perm::{factorial, product_is_full_cycle, Permutation};
use crate::triple::PtsTriple;

pub const VERIFY_SCHEMA: &str = "pillowtile.verify.v1";
pub const EVEN_SCHEMA: &str = "pillowtile.even.v1";

/// Degrees up to this get an exhaustive orbit cross-check by default.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 9;
/// Even degrees up to this get a machine-checked scan by default.
pub const DEFAULT_EVEN_SCAN_CAP: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    ThreeNCycles,
    IdentityVariant,
}

#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub n: usize,
    /// `⌊n/2⌋`.
    pub m: usize,
    pub triple: PtsTriple,
    pub variant: Variant,
}

/// `(1, n, 2, n-1, 3, n-2, ...)`, alternating low and high points.
pub fn zigzag_cycle(n: usize) -> Permutation {
    let (mut lo, mut hi) = (1, n);
    let mut points = Vec::with_capacity(n);
    while lo <= hi {
        points.push(lo);
        if hi != lo {
            points.push(hi);
        }
        lo += 1;
        hi -= 1;
    }
    Permutation::cycle(n, &points).expect("zigzag lists each point once")
}

fn require_odd(n: usize, min: usize) -> Result<()> {
    if n.is_multiple_of(2) || n < min {
        let reason = if n.is_multiple_of(2) {
            "no 1-cylinder pillowcase-tiled surface exists in even degree".to_string()
        } else {
            format!("the family needs odd n >= {min}")
        };
        return Err(Error::UnsupportedDegree { degree: n, reason });
    }
    Ok(())
}

/// `a = (1 2 ... n)`, `b = a⁻¹Z` for the zigzag cycle `Z`, `c = Z⁻¹`; so
/// `ab = Z` and `abc = 1`.
pub fn build_family(n: usize) -> Result<FamilyInstance> {
    require_odd(n, 5)?;
    let a = Permutation::standard_cycle(n);
    let z = zigzag_cycle(n);
    let b = &a.inverse() * &z;
    let c = z.inverse();
    assert!(z.is_full_cycle(), "zigzag is not an {n}-cycle");
    assert!(b.is_full_cycle(), "b is not an {n}-cycle");
    assert_eq!(&a * &b, z);
    assert!((&(&a * &b) * &c).is_identity());
    if n == 5 {
        assert_eq!(b.format_cycles(), "(1 4 2 3 5)");
    }
    Ok(FamilyInstance {
        n,
        m: n / 2,
        triple: PtsTriple::new_unchecked(a, b, c),
        variant: Variant::ThreeNCycles,
    })
}

/// Accepts any triple of `n`-cycles with `a = (1 2 ... n)` and `abc = 1`,
/// odd `n >= 3`. Unlike [`build_family`] the result need not be non-cyclic.
pub fn three_cycle_instance(triple: PtsTriple) -> Result<FamilyInstance> {
    let n = triple.degree();
    require_odd(n, 3)?;
    if triple.a() != &Permutation::standard_cycle(n) {
        return Err(Error::InvalidFamilyInput("a must be (1 2 ... n)".into()));
    }
    if !triple.coords().iter().all(|p| p.is_full_cycle()) {
        return Err(Error::InvalidFamilyInput("a, b, c must be n-cycles".into()));
    }
    if !triple.product().is_identity() {
        return Err(Error::InvalidFamilyInput("abc must be the identity".into()));
    }
    Ok(FamilyInstance {
        n,
        m: n / 2,
        triple,
        variant: Variant::ThreeNCycles,
    })
}

/// `(u, v, 1)` for `n`-cycles `u`, `v` whose product is an `n`-cycle.
pub fn build_identity_variant(n: usize, u: Permutation, v: Permutation) -> Result<FamilyInstance> {
    require_odd(n, 3)?;
    if u.degree() != n || v.degree() != n {
        return Err(Error::InvalidFamilyInput(format!(
            "u and v must have degree {n}"
        )));
    }
    if !u.is_full_cycle() || !v.is_full_cycle() {
        return Err(Error::InvalidFamilyInput("u and v must be n-cycles".into()));
    }
    if !product_is_full_cycle(&u, &v) {
        return Err(Error::InvalidFamilyInput("uv must be an n-cycle".into()));
    }
    Ok(FamilyInstance {
        n,
        m: n / 2,
        triple: PtsTriple::new_unchecked(u, v, Permutation::identity(n)),
        variant: Variant::IdentityVariant,
    })
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub exhaustive_cap: usize,
    pub max_orbit: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            max_orbit: DEFAULT_MAX_ORBIT,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema: &'static str,
    pub degree: usize,
    pub m: usize,
    pub variant: Variant,
    pub triple: PtsTriple,
    pub one_cylinder: bool,
    pub structural: CylinderCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustive: Option<CylinderCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustive_agrees: Option<bool>,
    pub non_cyclic: bool,
    /// First coordinate pair (by name) whose commutator is nontrivial.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noncommuting_pair: Option<(String, String)>,
    /// `[a, b²]` in cycle notation.
    pub commutator_a_b2: String,
    pub monodromy: GroupReport,
    pub counterexample: bool,
}

pub fn verify_counterexample(f: &FamilyInstance) -> Result<VerificationReport> {
    verify_counterexample_with(f, &VerifyOptions::default())
}

pub fn verify_counterexample_with(
    f: &FamilyInstance,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let t = &f.triple;
    let structural = certify_capped(t, Mode::Structural, opts.max_orbit)?;
    let exhaustive = if f.n <= opts.exhaustive_cap {
        Some(certify_capped(t, Mode::Exhaustive, opts.max_orbit)?)
    } else {
        None
    };
    let exhaustive_agrees = exhaustive.as_ref().map(|e| e.verdict == structural.verdict);
    let one_cylinder =
        structural.verdict == Verdict::OneCylinder && exhaustive_agrees != Some(false);

    let names = ["a", "b", "c"];
    let coords = t.coords();
    let mut noncommuting_pair = None;
    'outer: for i in 0..3 {
        for j in i + 1..3 {
            if !coords[i].commutator(coords[j])?.is_identity() {
                noncommuting_pair = Some((names[i].to_string(), names[j].to_string()));
                break 'outer;
            }
        }
    }
    let b2 = t.b() * t.b();
    let commutator_a_b2 = t.a().commutator(&b2)?.format_cycles();

    let gens: Vec<Permutation> = coords.into_iter().cloned().collect();
    let monodromy = identify_with_seed(&gens, opts.seed)?;
    let non_cyclic = monodromy.order > num_bigint::BigUint::from(f.n);

    Ok(VerificationReport {
        schema: VERIFY_SCHEMA,
        degree: f.n,
        m: f.m,
        variant: f.variant,
        triple: t.clone(),
        one_cylinder,
        structural,
        exhaustive,
        exhaustive_agrees,
        non_cyclic,
        noncommuting_pair,
        commutator_a_b2,
        monodromy,
        counterexample: one_cylinder && non_cyclic,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EvenScan {
    /// `n!³`, every triple accounted for.
    pub raw_triples: u64,
    /// `(a, b)` pairs whose product was actually formed.
    pub pairs_examined: u64,
    /// Full triples tested against all three pairwise products.
    pub triples_examined: u64,
    pub pruned: bool,
    pub survivors: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ImpossibilityReport {
    pub schema: &'static str,
    pub degree: usize,
    pub argument: Vec<String>,
    pub exhaustive_cap: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustive: Option<EvenScan>,
}

pub fn even_degree_impossible(n: usize) -> Result<ImpossibilityReport> {
    even_degree_impossible_with_cap(n, DEFAULT_EVEN_SCAN_CAP)
}

pub fn even_degree_impossible_with_cap(n: usize, cap: usize) -> Result<ImpossibilityReport> {
    if !n.is_multiple_of(2) || n < 2 {
        return Err(Error::UnsupportedDegree {
            degree: n,
            reason: "the parity obstruction applies to even n >= 2".into(),
        });
    }
    let argument = vec![
        format!("a 1-cylinder triple in degree {n} needs ab, bc and ac to be {n}-cycles"),
        "t(pq) = t(p) + t(q) - n (mod 2) for any p, q, since sign(p) = (-1)^(n - t(p))".into(),
        "by pigeonhole two of t(a), t(b), t(c) share parity".into(),
        format!(
            "their product then has t even (mod 2, n = {n} even), but every {n}-cycle has t = 1"
        ),
        format!("hence no 1-cylinder pillowcase-tiled surface of degree {n} exists"),
    ];
    let exhaustive = (n <= cap).then(|| even_scan(n));
    Ok(ImpossibilityReport {
        schema: EVEN_SCHEMA,
        degree: n,
        argument,
        exhaustive_cap: cap,
        exhaustive,
    })
}

/// Counts connected triples passing the pairwise filter. Up to degree 4
/// every triple is tested; beyond that `(a, b)` pairs are first pruned by
/// the cycle-count parity needed for `ab` to be an `n`-cycle, and surviving
/// pairs are tested directly against every `c`.
fn even_scan(n: usize) -> EvenScan {
    let total = factorial(n).expect("scan degree is small");
    let perms: Vec<Permutation> = (0..total).map(|k| Permutation::nth_lex(n, k)).collect();
    let raw_triples = total.pow(3);
    if n <= 4 {
        let mut survivors = 0;
        for a in &perms {
            for b in &perms {
                for c in &perms {
                    let t = PtsTriple::new_unchecked(a.clone(), b.clone(), c.clone());
                    if t.is_connected() && pairwise_products_full_cycles(&t) {
                        survivors += 1;
                    }
                }
            }
        }
        return EvenScan {
            raw_triples,
            pairs_examined: total * total,
            triples_examined: raw_triples,
            pruned: false,
            survivors,
        };
    }
    let counts: Vec<usize> = perms.iter().map(Permutation::cycle_count).collect();
    let (pairs, triples, survivors) = perms
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let mut pairs = 0u64;
            let mut triples = 0u64;
            let mut survivors = 0u64;
            for (j, b) in perms.iter().enumerate() {
                // t(ab) = 1 requires t(a) + t(b) - n to be odd
                if (counts[i] + counts[j] + n).is_multiple_of(2) {
                    continue;
                }
                pairs += 1;
                if !product_is_full_cycle(a, b) {
                    continue;
                }
                for c in &perms {
                    triples += 1;
                    if product_is_full_cycle(b, c) && product_is_full_cycle(a, c) {
                        survivors += 1;
                    }
                }
            }
            (pairs, triples, survivors)
        })
        .reduce(|| (0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));
    EvenScan {
        raw_triples,
        pairs_examined: pairs,
        triples_examined: triples,
        pruned: true,
        survivors,
    }
}

/// `sign(a) = sign(b) = sign(c)`; always true for odd degree when the
/// pairwise products are `n`-cycles.
pub fn same_sign_check(t: &PtsTriple) -> Result<bool> {
    if t.degree().is_multiple_of(2) {
        return Err(Error::PreconditionFailed("degree must be odd".into()));
    }
    if !pairwise_products_full_cycles(t) {
        return Err(Error::PreconditionFailed(
            "ab, bc and ac must be n-cycles".into(),
        ));
    }
    let [a, b, c] = t.coords();
    Ok(a.sign() == b.sign() && b.sign() == c.sign())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::structural_case;
    use crate::grouper::GroupName;

    fn p(n: usize, s: &str) -> Permutation {
        Permutation::parse_cycles(s, n).unwrap()
    }

    #[test]
    fn degree_five_matches_the_literal_words() {
        let f = build_family(5).unwrap();
        assert_eq!(f.triple.a(), &p(5, "(1 2 3 4 5)"));
        assert_eq!(f.triple.b(), &p(5, "(1 4 2 3 5)"));
        assert_eq!(f.triple.a() * f.triple.b(), p(5, "(1 5 2 4 3)"));
        assert_eq!(f.m, 2);
    }

    #[test]
    fn degree_seven_product_is_the_zigzag() {
        let f = build_family(7).unwrap();
        assert!(f.triple.b().is_full_cycle());
        assert_eq!(
            (f.triple.a() * f.triple.b()).format_cycles(),
            "(1 7 2 6 3 5 4)"
        );
        assert_eq!(f.triple.b().format_cycles(), "(1 6 2 5 3 4 7)");
        assert_eq!(
            build_family(9).unwrap().triple.b().format_cycles(),
            "(1 8 2 7 3 6 4 5 9)"
        );
    }

    #[test]
    fn family_invariants_hold_through_degree_31() {
        for n in (5..=31).step_by(2) {
            let f = build_family(n).unwrap();
            let t = &f.triple;
            assert_eq!(t.a() * t.b(), zigzag_cycle(n));
            assert!(t.product().is_identity());
            assert!(t.coords().iter().all(|x| x.is_full_cycle()));
            assert!((t.a() * t.b()).is_full_cycle());
        }
    }

    #[test]
    fn commutator_of_a_and_b_squared() {
        // support {2, n, (n+1)/2} for every odd n >= 5, with the cycle
        // order 2 -> n -> (n+1)/2
        for n in (5..=13).step_by(2) {
            let f = build_family(n).unwrap();
            let b2 = f.triple.b() * f.triple.b();
            let comm = f.triple.a().commutator(&b2).unwrap();
            assert_eq!(
                comm.format_cycles(),
                format!("(2 {} {})", n, f.m + 1),
                "n={n}"
            );
            // the other bracket order is a 3-cycle too, on a different support
            let other = &(&(&f.triple.a().inverse() * &b2.inverse()) * f.triple.a()) * &b2;
            assert_eq!(other.cycle_type().lengths()[0], 3);
            if n >= 9 {
                assert!(!other.support().contains(&1), "n={n}");
            }
        }
    }

    #[test]
    fn unsupported_degrees() {
        for n in [1, 2, 3, 4, 6, 10] {
            assert!(
                matches!(build_family(n), Err(Error::UnsupportedDegree { .. })),
                "{n}"
            );
        }
    }

    #[test]
    fn identity_variant_examples() {
        let u = p(3, "(1 2 3)");
        let f = build_identity_variant(3, u.clone(), u).unwrap();
        assert!(structural_case(&f.triple).is_some());

        let f = build_identity_variant(5, p(5, "(1 2 3 4 5)"), p(5, "(1 4 2 3 5)")).unwrap();
        assert_eq!(f.variant, Variant::IdentityVariant);
        assert!(f.triple.c().is_identity());

        let err = build_identity_variant(5, p(5, "(1 2 3 4 5)"), p(5, "(1 5 4 3 2)")).unwrap_err();
        assert!(matches!(err, Error::InvalidFamilyInput(_)));
        let err = build_identity_variant(5, p(5, "(1 2 3)"), p(5, "(1 5 4 3 2)")).unwrap_err();
        assert!(matches!(err, Error::InvalidFamilyInput(_)));
        assert!(build_identity_variant(4, p(4, "(1 2 3 4)"), p(4, "(1 2 3 4)")).is_err());
    }

    #[test]
    fn verify_small_family_members() {
        for n in [5, 7] {
            let rep = verify_counterexample(&build_family(n).unwrap()).unwrap();
            assert!(rep.one_cylinder && rep.non_cyclic && rep.counterexample);
            assert_eq!(rep.exhaustive_agrees, Some(true));
            assert_eq!(rep.monodromy.name, GroupName::Alternating(n));
        }
    }

    #[test]
    fn abelian_triple_is_not_a_counterexample() {
        let c = p(3, "(1 2 3)");
        let t = PtsTriple::new(c.clone(), c.clone(), c).unwrap();
        let f = three_cycle_instance(t).unwrap();
        let rep = verify_counterexample(&f).unwrap();
        assert!(rep.one_cylinder);
        assert!(!rep.non_cyclic);
        assert!(!rep.counterexample);
        assert_eq!(rep.noncommuting_pair, None);
        assert_eq!(rep.monodromy.name, GroupName::Cyclic(3));
    }

    #[test]
    fn identity_variant_verifies() {
        let f = build_identity_variant(5, p(5, "(1 2 3 4 5)"), p(5, "(1 4 2 3 5)")).unwrap();
        let rep = verify_counterexample(&f).unwrap();
        assert!(rep.one_cylinder && rep.non_cyclic);
        assert_eq!(rep.monodromy.name, GroupName::Alternating(5));
    }

    #[test]
    fn even_scans_find_nothing() {
        for n in [2, 4] {
            let rep = even_degree_impossible(n).unwrap();
            let scan = rep.exhaustive.unwrap();
            assert_eq!(scan.survivors, 0);
            assert!(!scan.pruned);
            assert_eq!(scan.triples_examined, scan.raw_triples);
        }
        assert_eq!(
            even_degree_impossible(2)
                .unwrap()
                .exhaustive
                .unwrap()
                .raw_triples,
            8
        );
        let rep = even_degree_impossible_with_cap(8, 6).unwrap();
        assert!(rep.exhaustive.is_none());
        assert!(!rep.argument.is_empty());
        assert!(matches!(
            even_degree_impossible(5),
            Err(Error::UnsupportedDegree { .. })
        ));
        assert!(matches!(
            even_degree_impossible(0),
            Err(Error::UnsupportedDegree { .. })
        ));
    }

    #[test]
    fn same_sign_examples() {
        for n in [5, 7] {
            assert!(same_sign_check(&build_family(n).unwrap().triple).unwrap());
        }
        let even = "4: (1 2 3 4); (1 2 3 4); (1 2 3 4)".parse().unwrap();
        assert!(matches!(
            same_sign_check(&even),
            Err(Error::PreconditionFailed(_))
        ));
        let bad = "5: (1 2); (); ()".parse().unwrap();
        assert!(matches!(
            same_sign_check(&bad),
            Err(Error::PreconditionFailed(_))
        ));
    }
}
