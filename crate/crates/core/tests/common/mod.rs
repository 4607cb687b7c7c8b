//! Brute-force reference for small degrees. Everything here works on raw
//! image vectors and index tables, sharing nothing with the library beyond
//! the composition convention `(pq)(x) = p(q(x))`.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use pillowtile::{Permutation, PtsTriple};

pub struct SymTable {
    pub n: usize,
    pub perms: Vec<Vec<u8>>,
    index: BTreeMap<Vec<u8>, u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
    full: Vec<bool>,
    sign: Vec<bool>,
}

fn all_perms(n: usize) -> Vec<Vec<u8>> {
    fn go(prefix: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Vec<u8>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x as u8);
                go(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn cycle_count(p: &[u8]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut count = 0;
    for s in 0..p.len() {
        if !seen[s] {
            count += 1;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = p[x] as usize;
            }
        }
    }
    count
}

impl SymTable {
    pub fn new(n: usize) -> Self {
        let perms = all_perms(n);
        let index: BTreeMap<Vec<u8>, u32> = perms
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as u32))
            .collect();
        let m = perms.len();
        let mut mul = vec![0u32; m * m];
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                let pq: Vec<u8> = (0..n).map(|x| p[q[x] as usize]).collect();
                mul[i * m + j] = index[&pq];
            }
        }
        let inv = perms
            .iter()
            .map(|p| {
                let mut r = vec![0u8; n];
                for (x, &y) in p.iter().enumerate() {
                    r[y as usize] = x as u8;
                }
                index[&r]
            })
            .collect();
        let full = perms.iter().map(|p| cycle_count(p) == 1).collect();
        // even iff n - cycles is even
        let sign = perms
            .iter()
            .map(|p| (n - cycle_count(p)).is_multiple_of(2))
            .collect();
        Self {
            n,
            perms,
            index,
            mul,
            inv,
            full,
            sign,
        }
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn mul(&self, p: u32, q: u32) -> u32 {
        self.mul[p as usize * self.len() + q as usize]
    }

    pub fn inv(&self, p: u32) -> u32 {
        self.inv[p as usize]
    }

    pub fn is_full(&self, p: u32) -> bool {
        self.full[p as usize]
    }

    pub fn is_even(&self, p: u32) -> bool {
        self.sign[p as usize]
    }

    pub fn conj(&self, p: u32, g: u32) -> u32 {
        self.mul(self.mul(self.inv(g), p), g)
    }

    pub fn index_of(&self, p: &Permutation) -> u32 {
        let v: Vec<u8> = p.images().iter().map(|&x| x as u8).collect();
        self.index[&v]
    }

    pub fn perm(&self, i: u32) -> Permutation {
        let v: Vec<usize> = self.perms[i as usize].iter().map(|&x| x as usize).collect();
        Permutation::from_images(&v).unwrap()
    }

    pub fn index_of_images(&self, v: &[u8]) -> u32 {
        self.index[v]
    }

    pub fn triple_index(&self, t: &PtsTriple) -> u32 {
        let m = self.len() as u32;
        let [a, b, c] = t.coords();
        (self.index_of(a) * m + self.index_of(b)) * m + self.index_of(c)
    }

    pub fn triple(&self, idx: u32) -> PtsTriple {
        let m = self.len() as u32;
        let (a, b, c) = (idx / (m * m), idx / m % m, idx % m);
        PtsTriple::new(self.perm(a), self.perm(b), self.perm(c)).unwrap()
    }

    fn connected(&self, gens: [u32; 3]) -> bool {
        let n = self.n;
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for g in gens {
                let y = self.perms[g as usize][x] as usize;
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

struct Dsu(Vec<u32>);

impl Dsu {
    fn new(n: usize) -> Self {
        Self((0..n as u32).collect())
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            let up = self.0[self.0[x as usize] as usize];
            self.0[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(&mut self, x: u32, y: u32) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx != ry {
            self.0[rx.max(ry) as usize] = rx.min(ry);
        }
    }
}

/// One 1-cylinder braid orbit of conjugation classes.
pub struct OracleOrbit {
    /// Every triple (by index) in the union of the orbit's classes.
    pub members: Vec<u32>,
    /// Number of conjugation classes, i.e. the orbit size.
    pub classes: usize,
}

pub struct Oracle {
    pub table: SymTable,
    /// Component id (least member) of every triple.
    component: Vec<u32>,
    pub orbits: BTreeMap<u32, OracleOrbit>,
}

impl Oracle {
    /// Scans all of `Sym(n)^3`, joining each triple to its images under both
    /// braid generators (as raw triples) and under conjugation by `(1 2)` and
    /// `(1 2 ... n)`. A component is 1-cylinder when it is connected and
    /// every member has `ab` an `n`-cycle.
    pub fn new(n: usize) -> Self {
        let table = SymTable::new(n);
        let m = table.len() as u32;
        let total = (m * m * m) as usize;
        let split = |t: u32| (t / (m * m), t / m % m, t % m);
        let join = |a: u32, b: u32, c: u32| (a * m + b) * m + c;
        let mut swap = (0..n as u8).collect::<Vec<u8>>();
        if n >= 2 {
            swap.swap(0, 1);
        }
        let rot: Vec<u8> = (0..n as u8).map(|x| (x + 1) % n as u8).collect();
        let (s, z) = (table.index_of_images(&swap), table.index_of_images(&rot));

        let mut all = Dsu::new(total);
        let mut conj = Dsu::new(total);
        for t in 0..total as u32 {
            let (a, b, c) = split(t);
            let s1 = join(b, table.conj(a, b), c);
            let s2 = join(a, c, table.conj(b, c));
            let cs = join(table.conj(a, s), table.conj(b, s), table.conj(c, s));
            let cz = join(table.conj(a, z), table.conj(b, z), table.conj(c, z));
            all.union(t, s1);
            all.union(t, s2);
            all.union(t, cs);
            all.union(t, cz);
            conj.union(t, cs);
            conj.union(t, cz);
        }
        let mut component = vec![0u32; total];
        let mut good: BTreeMap<u32, bool> = BTreeMap::new();
        for t in 0..total as u32 {
            let root = all.find(t);
            component[t as usize] = root;
            let (a, b, c) = split(t);
            let ok = table.is_full(table.mul(a, b)) && table.connected([a, b, c]);
            let e = good.entry(root).or_insert(true);
            *e = *e && ok;
        }
        let mut orbits: BTreeMap<u32, OracleOrbit> = BTreeMap::new();
        let mut classes: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
        for t in 0..total as u32 {
            let root = component[t as usize];
            if good[&root] {
                orbits
                    .entry(root)
                    .or_insert_with(|| OracleOrbit {
                        members: Vec::new(),
                        classes: 0,
                    })
                    .members
                    .push(t);
                classes.entry(root).or_default().insert(conj.find(t));
            }
        }
        for (root, cls) in classes {
            orbits.get_mut(&root).unwrap().classes = cls.len();
        }
        Self {
            table,
            component,
            orbits,
        }
    }

    pub fn component_of(&self, t: &PtsTriple) -> u32 {
        self.component[self.table.triple_index(t) as usize]
    }

    pub fn is_one_cylinder(&self, t: &PtsTriple) -> bool {
        self.orbits.contains_key(&self.component_of(t))
    }
}

/// Deterministic random connected triple.
pub fn random_connected_triple<R: rand::Rng>(rng: &mut R, n: usize) -> PtsTriple {
    loop {
        let t = PtsTriple::new(
            random_perm(rng, n),
            random_perm(rng, n),
            random_perm(rng, n),
        )
        .unwrap();
        if t.is_connected() {
            return t;
        }
    }
}

pub fn random_perm<R: rand::Rng>(rng: &mut R, n: usize) -> Permutation {
    use rand::seq::SliceRandom;
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    Permutation::from_images(&v).unwrap()
}
