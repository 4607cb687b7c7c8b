//! Exhaustive enumeration of 1-cylinder triples up to simultaneous
//! conjugation, one row per braid orbit, with monodromy classification.
//!
//! Every triple with `ab` an `n`-cycle is conjugate to one with
//! `ab = (1 2 ... n)`, so candidates are `(a, a⁻¹z, c)` for the fixed cycle
//! `z`. Writing `c = b⁻¹w` with `w` running over the `(n-1)!` `n`-cycles
//! makes `bc = w` an `n`-cycle by construction, leaving `ac` (and, for odd
//! `n`, the common sign) to filter. The work is split by the `a` coordinate:
//! partition `k` is the `k`-th permutation in lexicographic order. The
//! residual freedom, conjugation by the centralizer of `z`, is removed by
//! canonical-key dedup.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::braid::{explore, key_ab_full_cycle, DEFAULT_MAX_ORBIT};
use crate::error::{Error, Result};
use crate::family::same_sign_check;
use crate::grouper::{identify_with_seed, GroupName, GroupReport, DEFAULT_SEED};
use crate::perm::{factorial, product_is_full_cycle, CycleType, Permutation};
use crate::triple::{CanonicalKey, CoverTopology, PtsTriple};

pub const CENSUS_SCHEMA: &str = "pillowtile.census.v1";
pub const CHECKPOINT_SCHEMA: &str = "pillowtile.census.checkpoint.v1";

/// Work units (`(a, w)` pairs) needed for a complete degree-7 census.
pub const DEFAULT_MAX_WORK: u64 = 5040 * 720;

#[derive(Clone, Debug)]
pub struct CensusBudget {
    /// Cap on `(a, w)` pairs examined in one run; a run processes whole
    /// partitions of `(n-1)!` pairs each.
    pub max_work: u64,
    pub max_orbit: usize,
    pub seed: u64,
}

impl Default for CensusBudget {
    fn default() -> Self {
        Self {
            max_work: DEFAULT_MAX_WORK,
            max_orbit: DEFAULT_MAX_ORBIT,
            seed: DEFAULT_SEED,
        }
    }
}

fn check_degree(n: usize) -> Result<(u64, u64)> {
    if n < 2 {
        return Err(Error::UnsupportedDegree {
            degree: n,
            reason: "the census starts at degree 2".into(),
        });
    }
    match (factorial(n), factorial(n - 1)) {
        (Some(parts), Some(per)) => Ok((parts, per)),
        _ => Err(Error::UnsupportedDegree {
            degree: n,
            reason: "degree too large to index partitions".into(),
        }),
    }
}

/// The `k`-th `n`-cycle: `(1, π(2), ..., π(n))` for the `k`-th permutation
/// `π` of `{2..n}`.
fn nth_full_cycle(n: usize, k: u64) -> Permutation {
    let tail = Permutation::nth_lex(n - 1, k);
    let mut order = Vec::with_capacity(n);
    order.push(0usize);
    order.extend(tail.images().iter().map(|&x| x as usize + 1));
    let mut image = vec![0usize; n];
    for i in 0..n {
        image[order[i]] = order[(i + 1) % n];
    }
    Permutation::from_images(&image).expect("cycle images form a bijection")
}

/// Canonical keys of the candidates in partition `a_index`, sorted.
pub fn partition_candidates(n: usize, a_index: u64) -> Vec<CanonicalKey> {
    let a = Permutation::nth_lex(n, a_index);
    let b = &a.inverse() * &Permutation::standard_cycle(n);
    let b_inv = b.inverse();
    let per = factorial(n - 1).expect("checked by caller");
    let odd = n % 2 == 1;
    let mut keys: BTreeSet<CanonicalKey> = BTreeSet::new();
    if odd && a.sign() != b.sign() {
        return Vec::new();
    }
    for k in 0..per {
        let w = nth_full_cycle(n, k);
        let c = &b_inv * &w;
        if !product_is_full_cycle(&a, &c) {
            continue;
        }
        if odd && c.sign() != a.sign() {
            continue;
        }
        let t = PtsTriple::new_unchecked(a.clone(), b.clone(), c);
        keys.insert(
            t.canonicalize()
                .expect("ab is an n-cycle, so the triple is transitive"),
        );
    }
    keys.into_iter().collect()
}

/// One representative per conjugation class of connected triples with
/// `ab`, `bc`, `ac` all `n`-cycles (and equal signs for odd `n`), each with
/// `ab = (1 2 ... n)` before canonical relabeling. Sorted by key.
pub fn enumerate_candidates(n: usize, budget: &CensusBudget) -> Result<Vec<PtsTriple>> {
    let (parts, per) = check_degree(n)?;
    let work = parts.saturating_mul(per);
    if work > budget.max_work {
        return Err(Error::BudgetExceeded {
            reason: format!(
                "degree {n} needs {work} work units, budget is {}",
                budget.max_work
            ),
            partial: None,
        });
    }
    let keys: BTreeSet<CanonicalKey> = (0..parts)
        .into_par_iter()
        .flat_map_iter(|k| partition_candidates(n, k))
        .collect();
    Ok(keys.iter().map(CanonicalKey::to_triple).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusRow {
    /// Least canonical key in the braid orbit.
    pub canonical_key: CanonicalKey,
    pub triple: PtsTriple,
    /// Of `a`, `b`, `c`, `d`.
    pub cycle_types: [CycleType; 4],
    pub orbit_size: usize,
    pub group: GroupReport,
    pub topology: CoverTopology,
    pub is_cyclic_cover: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GroupHistogram {
    /// Teichmüller curves (braid orbits) per monodromy group name.
    pub counts: BTreeMap<String, usize>,
    pub curves: usize,
    /// Rows whose coordinates share a sign, checked for odd degree only.
    pub same_sign_checked: usize,
    pub same_sign_passed: usize,
    pub min_orbit: Option<usize>,
    pub max_orbit: Option<usize>,
}

impl GroupHistogram {
    pub fn same_sign_rate(&self) -> Option<f64> {
        (self.same_sign_checked > 0)
            .then(|| self.same_sign_passed as f64 / self.same_sign_checked as f64)
    }
}

pub fn census_summary(rows: &[CensusRow]) -> GroupHistogram {
    let mut hist = GroupHistogram::default();
    for row in rows {
        *hist.counts.entry(row.group.name.to_string()).or_default() += 1;
        hist.curves += 1;
        if row.triple.degree() % 2 == 1 {
            hist.same_sign_checked += 1;
            if same_sign_check(&row.triple).unwrap_or(false) {
                hist.same_sign_passed += 1;
            }
        }
        hist.min_orbit = Some(
            hist.min_orbit
                .map_or(row.orbit_size, |m| m.min(row.orbit_size)),
        );
        hist.max_orbit = Some(
            hist.max_orbit
                .map_or(row.orbit_size, |m| m.max(row.orbit_size)),
        );
    }
    hist
}

#[derive(Clone, Debug, Serialize)]
pub struct Census {
    pub schema: &'static str,
    pub degree: usize,
    pub complete: bool,
    pub partitions_total: u64,
    pub partitions_processed: u64,
    pub seed: u64,
    pub rows: Vec<CensusRow>,
    pub summary: GroupHistogram,
}

/// Resumable progress: processed `a` partitions and the least key of every
/// 1-cylinder orbit found so far, both sorted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema: String,
    pub degree: usize,
    pub processed: Vec<u64>,
    pub orbit_keys: Vec<CanonicalKey>,
}

impl Checkpoint {
    pub fn empty(degree: usize) -> Self {
        Self {
            schema: CHECKPOINT_SCHEMA.to_string(),
            degree,
            processed: Vec::new(),
            orbit_keys: Vec::new(),
        }
    }
}

pub struct CensusRun {
    pub census: Census,
    pub checkpoint: Checkpoint,
}

/// Full census. An incomplete run is returned inside
/// [`Error::BudgetExceeded`].
pub fn run_census(n: usize, budget: &CensusBudget) -> Result<Census> {
    let run = run_census_from(n, budget, None)?;
    if run.census.complete {
        Ok(run.census)
    } else {
        Err(Error::BudgetExceeded {
            reason: format!(
                "processed {} of {} partitions",
                run.census.partitions_processed, run.census.partitions_total
            ),
            partial: Some(Box::new(run.census)),
        })
    }
}

pub fn run_census_from(
    n: usize,
    budget: &CensusBudget,
    resume: Option<&Checkpoint>,
) -> Result<CensusRun> {
    let (parts, per) = check_degree(n)?;
    let mut checkpoint = match resume {
        Some(c) if c.degree != n => {
            return Err(Error::PreconditionFailed(format!(
                "checkpoint is for degree {}, not {n}",
                c.degree
            )))
        }
        Some(c) if c.schema != CHECKPOINT_SCHEMA => {
            return Err(Error::PreconditionFailed(format!(
                "unknown checkpoint schema {}",
                c.schema
            )))
        }
        Some(c) => c.clone(),
        None => Checkpoint::empty(n),
    };
    let done: BTreeSet<u64> = checkpoint.processed.iter().copied().collect();
    let allowed = (budget.max_work / per) as usize;
    let batch: Vec<u64> = (0..parts)
        .filter(|k| !done.contains(k))
        .take(allowed)
        .collect();

    let candidates: BTreeSet<CanonicalKey> = batch
        .par_iter()
        .flat_map_iter(|&k| partition_candidates(n, k))
        .collect();

    let mut covered: HashSet<CanonicalKey> = HashSet::new();
    let mut orbits: Vec<(CanonicalKey, usize)> = Vec::new();
    let known: Vec<CanonicalKey> = checkpoint.orbit_keys.clone();
    for key in known.iter().chain(candidates.iter()) {
        if covered.contains(key) {
            continue;
        }
        let found = explore(key, budget.max_orbit, |k| !key_ab_full_cycle(k))?;
        let one_cylinder = found.stopped_at.is_none();
        let least = found
            .keys()
            .min()
            .expect("orbit contains its start")
            .clone();
        let size = found.len();
        covered.extend(found.keys().cloned());
        if one_cylinder {
            orbits.push((least, size));
        }
    }
    orbits.sort();

    let mut rows: Vec<CensusRow> = orbits
        .par_iter()
        .map(|(key, size)| annotate(key, *size, budget.seed))
        .collect::<Result<_>>()?;
    rows.sort_by(|x, y| x.canonical_key.cmp(&y.canonical_key));

    let mut processed: BTreeSet<u64> = done;
    processed.extend(batch.iter().copied());
    checkpoint.processed = processed.iter().copied().collect();
    checkpoint.orbit_keys = rows.iter().map(|r| r.canonical_key.clone()).collect();
    let summary = census_summary(&rows);
    let census = Census {
        schema: CENSUS_SCHEMA,
        degree: n,
        complete: processed.len() as u64 == parts,
        partitions_total: parts,
        partitions_processed: processed.len() as u64,
        seed: budget.seed,
        rows,
        summary,
    };
    Ok(CensusRun { census, checkpoint })
}

fn annotate(key: &CanonicalKey, orbit_size: usize, seed: u64) -> Result<CensusRow> {
    let triple = key.to_triple();
    let gens: Vec<Permutation> = triple.coords().into_iter().cloned().collect();
    let group = identify_with_seed(&gens, seed)?;
    let topology = triple.topology()?;
    let is_cyclic_cover = matches!(group.name, GroupName::Cyclic(_));
    Ok(CensusRow {
        canonical_key: key.clone(),
        cycle_types: triple.cycle_types(),
        triple,
        orbit_size,
        group,
        topology,
        is_cyclic_cover,
    })
}

pub const TSV_COLUMNS: [&str; 8] = [
    "key",
    "cycle_types",
    "orbit_size",
    "group",
    "order",
    "genus",
    "orders",
    "cyclic",
];

/// One row per line; cycle types of `a|b|c|d` with comma-separated lengths,
/// singularity orders comma-separated.
pub fn to_tsv(census: &Census) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {}\tdegree={}\tcomplete={}\tseed={}",
        census.schema, census.degree, census.complete, census.seed
    );
    let _ = writeln!(out, "{}", TSV_COLUMNS.join("\t"));
    for row in &census.rows {
        let types: Vec<String> = row.cycle_types.iter().map(|t| t.to_string()).collect();
        let orders: Vec<String> = row.topology.orders.iter().map(|k| k.to_string()).collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            row.canonical_key,
            types.join("|"),
            row.orbit_size,
            row.group.name,
            row.group.order,
            row.topology.genus,
            orders.join(","),
            row.is_cyclic_cover
        );
    }
    out
}
