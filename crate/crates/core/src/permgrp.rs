//! Permutation groups: orbits, stabilizer chains, derived series and seeded
//! random subgroup discovery.
//!
//! Permutations compose left to right: `p.then(q)` applies `p` first.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl std::fmt::Debug for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Perm{:?}", self.images)
    }
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree as u32).collect() }
    }

    /// Checks that `images` is a bijection of 0..len.
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            let slot = seen.get_mut(x as usize).ok_or(Error::NotBijective)?;
            if std::mem::replace(slot, true) {
                return Err(Error::NotBijective);
            }
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation { images: self.images.iter().map(|&x| other.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn smallest_moved_point(&self) -> Option<u32> {
        self.images.iter().enumerate().find(|(i, &x)| *i as u32 != x).map(|(i, _)| i as u32)
    }

    pub fn pow(&self, e: u64) -> Permutation {
        let mut acc = Permutation::identity(self.degree());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        acc
    }

    /// Order as the lcm of cycle lengths.
    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.degree()];
        let mut acc = 1u64;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x] as usize;
                len += 1;
            }
            acc = acc / gcd64(acc, len) * len;
        }
        acc
    }

    /// g⁻¹ h⁻¹ g h.
    pub fn commutator(g: &Permutation, h: &Permutation) -> Permutation {
        g.inverse().then(&h.inverse()).then(g).then(h)
    }
}

fn gcd64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd64(b, a % b)
    }
}

/// Orbit of `start` in breadth-first order.
pub fn orbit(degree: usize, gens: &[Permutation], start: u32) -> Vec<u32> {
    let mut seen = vec![false; degree];
    seen[start as usize] = true;
    let mut out = vec![start];
    let mut head = 0;
    while head < out.len() {
        let x = out[head];
        head += 1;
        for g in gens {
            let y = g.apply(x);
            if !seen[y as usize] {
                seen[y as usize] = true;
                out.push(y);
            }
        }
    }
    out
}

/// All orbits, each in BFS order, ordered by least point.
pub fn orbits(degree: usize, gens: &[Permutation]) -> Vec<Vec<u32>> {
    let mut assigned = vec![false; degree];
    let mut out = Vec::new();
    for p in 0..degree as u32 {
        if assigned[p as usize] {
            continue;
        }
        let o = orbit(degree, gens, p);
        for &x in &o {
            assigned[x as usize] = true;
        }
        out.push(o);
    }
    out
}

pub fn is_transitive(degree: usize, gens: &[Permutation]) -> bool {
    degree == 0 || orbit(degree, gens, 0).len() == degree
}

#[derive(Clone, Debug)]
struct Level {
    point: u32,
    /// Indices into `StabChain::strong`.
    gens: Vec<usize>,
    orbit: Vec<u32>,
    /// Point → position in `orbit`, or `u32::MAX`.
    position: Vec<u32>,
    /// reps[k] maps the base point to orbit[k].
    reps: Vec<Permutation>,
    rep_invs: Vec<Permutation>,
    /// Per orbit position: how many of `gens` have had their Schreier
    /// generator sifted.
    done: Vec<usize>,
}

impl Level {
    fn new(degree: usize, point: u32) -> Self {
        let mut position = vec![u32::MAX; degree];
        position[point as usize] = 0;
        Level {
            point,
            gens: Vec::new(),
            orbit: vec![point],
            position,
            reps: vec![Permutation::identity(degree)],
            rep_invs: vec![Permutation::identity(degree)],
            done: vec![0],
        }
    }

    /// Adds a generator and extends the orbit/transversal breadth-first.
    fn add_gen(&mut self, idx: usize, strong: &[Permutation]) {
        self.gens.push(idx);
        let mut head = 0;
        // New images of old points under the new generator, then closure of
        // fresh points under every generator.
        while head < self.orbit.len() {
            let x = self.orbit[head];
            let rep = self.reps[head].clone();
            for &gi in &self.gens {
                let g = &strong[gi];
                let y = g.apply(x);
                if self.position[y as usize] == u32::MAX {
                    self.position[y as usize] = self.orbit.len() as u32;
                    self.orbit.push(y);
                    let r = rep.then(g);
                    self.rep_invs.push(r.inverse());
                    self.reps.push(r);
                    self.done.push(0);
                }
            }
            head += 1;
        }
    }
}

/// Base and strong generating set with explicit transversals.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    strong: Vec<Permutation>,
    levels: Vec<Level>,
    limit: Option<u128>,
}

impl StabChain {
    pub fn new(degree: usize, gens: &[Permutation]) -> StabChain {
        Self::with_base(degree, gens, &[])
    }

    /// Chain whose base starts with `prefix`; later points are the smallest
    /// point moved by the generator that needs them.
    pub fn with_base(degree: usize, gens: &[Permutation], prefix: &[u32]) -> StabChain {
        let mut chain = StabChain { degree, strong: Vec::new(), levels: Vec::new(), limit: None };
        for &p in prefix {
            chain.levels.push(Level::new(degree, p));
        }
        for g in gens {
            chain.add_generator(g);
        }
        chain
    }

    /// Like [`StabChain::new`] but gives up (returning `None`) once the
    /// group is known to be larger than `limit`.
    pub fn bounded(degree: usize, gens: &[Permutation], limit: u128) -> Option<StabChain> {
        let mut chain = StabChain { degree, strong: Vec::new(), levels: Vec::new(), limit: Some(limit) };
        for g in gens {
            if !chain.add_generator(g) {
                return None;
            }
        }
        Some(chain)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.strong
    }

    /// Product of the basic orbit lengths.
    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    /// Strong generators of the stabilizer of the first `k` base points.
    pub fn stabilizer_generators(&self, k: usize) -> Vec<Permutation> {
        match self.levels.get(k) {
            Some(l) => l.gens.iter().map(|&i| self.strong[i].clone()).collect(),
            None => Vec::new(),
        }
    }

    /// Sifts g through levels `from..`; returns the residue and the level
    /// where sifting stopped (`levels.len()` if it went through).
    fn strip(&self, g: &Permutation, from: usize) -> (Permutation, usize) {
        let mut h = g.clone();
        for (i, level) in self.levels.iter().enumerate().skip(from) {
            let x = h.apply(level.point);
            let pos = level.position[x as usize];
            if pos == u32::MAX {
                return (h, i);
            }
            h = h.then(&level.rep_invs[pos as usize]);
        }
        (h, self.levels.len())
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (h, j) = self.strip(g, 0);
        j == self.levels.len() && h.is_identity()
    }

    fn over_limit(&self) -> bool {
        self.limit.is_some_and(|l| self.order() > l)
    }

    /// Adds a generator to the group and restores the chain. Returns false
    /// only when a bound was set and exceeded.
    pub fn add_generator(&mut self, g: &Permutation) -> bool {
        assert_eq!(g.degree(), self.degree, "permutation degree mismatch");
        let (h, j) = self.strip(g, 0);
        if j == self.levels.len() && h.is_identity() {
            return true;
        }
        // The unsifted residue joins levels 0..=j; the original element is
        // in ⟨chain, h⟩, so the generated group is unchanged.
        self.insert_strong(h, 0, j);
        if self.over_limit() {
            return false;
        }
        self.complete(j)
    }

    /// Adds `h` (which fixes base points of levels < `from`) to levels
    /// `from..=to`, appending a level if `to` is past the end.
    fn insert_strong(&mut self, h: Permutation, from: usize, to: usize) {
        if to == self.levels.len() {
            let p = h.smallest_moved_point().expect("non-identity residue");
            self.levels.push(Level::new(self.degree, p));
        }
        let idx = self.strong.len();
        self.strong.push(h);
        for l in from..=to {
            self.levels[l].add_gen(idx, &self.strong);
        }
    }

    fn complete(&mut self, start: usize) -> bool {
        let mut i = start as isize;
        'outer: while i >= 0 {
            let li = i as usize;
            let mut p = 0;
            while p < self.levels[li].orbit.len() {
                while self.levels[li].done[p] < self.levels[li].gens.len() {
                    let level = &self.levels[li];
                    let s = &self.strong[level.gens[level.done[p]]];
                    let b = level.orbit[p];
                    let sb = s.apply(b);
                    let schreier = level.reps[p].then(s).then(&level.rep_invs[level.position[sb as usize] as usize]);
                    self.levels[li].done[p] += 1;
                    if schreier.is_identity() {
                        continue;
                    }
                    let (h, j) = self.strip(&schreier, li + 1);
                    if j < self.levels.len() || !h.is_identity() {
                        self.insert_strong(h, li + 1, j);
                        if self.over_limit() {
                            return false;
                        }
                        i = j as isize;
                        continue 'outer;
                    }
                }
                p += 1;
            }
            i -= 1;
        }
        true
    }
}

/// Chain for the group generated by `gens`.
pub fn schreier_sims(degree: usize, gens: &[Permutation]) -> StabChain {
    StabChain::new(degree, gens)
}

pub fn group_order(degree: usize, gens: &[Permutation]) -> u128 {
    schreier_sims(degree, gens).order()
}

/// Generators of the derived subgroup: normal closure of the generator
/// commutators.
pub fn derived_subgroup_generators(degree: usize, gens: &[Permutation]) -> Vec<Permutation> {
    let mut out: Vec<Permutation> = Vec::new();
    let mut chain = StabChain::new(degree, &[]);
    let mut queue: Vec<Permutation> = Vec::new();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            let c = Permutation::commutator(a, b);
            if !chain.contains(&c) {
                chain.add_generator(&c);
                out.push(c.clone());
                queue.push(c);
            }
        }
    }
    while let Some(h) = queue.pop() {
        for g in gens {
            let c = g.inverse().then(&h).then(g);
            if !chain.contains(&c) {
                chain.add_generator(&c);
                out.push(c.clone());
                queue.push(c);
            }
        }
    }
    out
}

/// One term of a derived series.
#[derive(Clone, Debug)]
pub struct SeriesTerm {
    pub generators: Vec<Permutation>,
    pub chain: StabChain,
}

impl SeriesTerm {
    pub fn order(&self) -> u128 {
        self.chain.order()
    }
}

/// G′, G″, ... until the series stabilizes (the last term is perfect).
pub fn derived_series(degree: usize, gens: &[Permutation]) -> Vec<SeriesTerm> {
    let mut terms = Vec::new();
    let mut current: Vec<Permutation> = gens.to_vec();
    let mut current_order = group_order(degree, gens);
    loop {
        let next = derived_subgroup_generators(degree, &current);
        let chain = StabChain::new(degree, &next);
        let order = chain.order();
        terms.push(SeriesTerm { generators: next.clone(), chain });
        if order == current_order || order == 1 {
            return terms;
        }
        current = next;
        current_order = order;
    }
}

pub fn is_solvable(degree: usize, gens: &[Permutation]) -> bool {
    derived_series(degree, gens).last().is_none_or(|t| t.order() == 1)
}

/// Last term of the derived series, G^(∞).
pub fn perfect_residual(degree: usize, gens: &[Permutation]) -> SeriesTerm {
    derived_series(degree, gens).pop().expect("series is never empty")
}

/// Product-replacement sampler over a fixed 10-slot buffer.
pub struct ProductReplacement {
    slots: Vec<Permutation>,
    rng: ChaCha8Rng,
}

impl ProductReplacement {
    pub const SLOTS: usize = 10;
    const WARMUP: usize = 60;

    pub fn new(degree: usize, gens: &[Permutation], seed: u64) -> Self {
        let slots: Vec<Permutation> = if gens.is_empty() {
            vec![Permutation::identity(degree); Self::SLOTS]
        } else {
            (0..Self::SLOTS).map(|i| gens[i % gens.len()].clone()).collect()
        };
        let mut pr = ProductReplacement { slots, rng: ChaCha8Rng::seed_from_u64(seed) };
        for _ in 0..Self::WARMUP {
            pr.next_element();
        }
        pr
    }

    pub fn next_element(&mut self) -> Permutation {
        let i = self.rng.gen_range(0..Self::SLOTS);
        let mut j = self.rng.gen_range(0..Self::SLOTS - 1);
        if j >= i {
            j += 1;
        }
        let right = self.rng.gen_bool(0.5);
        let inverse = self.rng.gen_bool(0.5);
        let other = if inverse { self.slots[j].inverse() } else { self.slots[j].clone() };
        self.slots[i] = if right { self.slots[i].then(&other) } else { other.then(&self.slots[i]) };
        self.slots[i].clone()
    }
}

/// Result of a successful [`random_subgroup_search`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchHit {
    pub generators: (Permutation, Permutation),
    /// Number of pairs examined, including the successful one.
    pub samples: u64,
}

/// Samples element pairs from the ambient group and returns the first pair
/// generating a subgroup of exactly `target_order` that satisfies
/// `predicate`. `budget` counts pairs.
pub fn random_subgroup_search(
    degree: usize,
    ambient: &[Permutation],
    target_order: u128,
    predicate: impl Fn(&[Permutation]) -> bool,
    seed: u64,
    budget: u64,
) -> Result<SearchHit> {
    if target_order == 1 {
        let id = Permutation::identity(degree);
        return Ok(SearchHit { generators: (id.clone(), id), samples: 0 });
    }
    let ambient_order = group_order(degree, ambient);
    if target_order == 0 || !ambient_order.is_multiple_of(target_order) {
        return Err(Error::NotFound(format!(
            "no subgroup of order {target_order} in a group of order {ambient_order}"
        )));
    }
    let mut pr = ProductReplacement::new(degree, ambient, seed);
    for sample in 1..=budget {
        let a = pr.next_element();
        let b = pr.next_element();
        // Element orders must divide the target.
        if !target_order.is_multiple_of(a.order() as u128) || !target_order.is_multiple_of(b.order() as u128) {
            continue;
        }
        let pair = [a, b];
        let right_order = StabChain::bounded(degree, &pair, target_order).is_some_and(|c| c.order() == target_order);
        if right_order && predicate(&pair) {
            let [a, b] = pair;
            return Ok(SearchHit { generators: (a, b), samples: sample });
        }
    }
    Err(Error::NotFound(format!("no subgroup of order {target_order} within {budget} samples (seed {seed})")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(v: &[u32]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn cycle(n: usize) -> Permutation {
        perm(&(0..n as u32).map(|i| (i + 1) % n as u32).collect::<Vec<_>>())
    }

    fn transposition(n: usize, a: u32, b: u32) -> Permutation {
        let mut v: Vec<u32> = (0..n as u32).collect();
        v.swap(a as usize, b as usize);
        perm(&v)
    }

    /// Brute-force closure: all products of generators.
    fn enumerate_group(gens: &[Permutation], degree: usize) -> std::collections::BTreeSet<Permutation> {
        let mut set = std::collections::BTreeSet::new();
        let id = Permutation::identity(degree);
        set.insert(id.clone());
        let mut frontier = vec![id];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = x.then(g);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set
    }

    #[test]
    fn bad_permutation_rejected() {
        assert_eq!(Permutation::new(vec![0, 0]).unwrap_err(), Error::NotBijective);
        assert_eq!(Permutation::new(vec![0, 5]).unwrap_err(), Error::NotBijective);
    }

    #[test]
    fn orbit_of_identity() {
        assert_eq!(orbit(5, &[Permutation::identity(5)], 3), vec![3]);
        assert_eq!(orbit(5, &[cycle(5)], 0).len(), 5);
    }

    #[test]
    fn symmetric_group_orders() {
        for n in 2..8 {
            let gens = [cycle(n), transposition(n, 0, 1)];
            let expected: u128 = (1..=n as u128).product();
            assert_eq!(group_order(n, &gens), expected);
        }
        assert_eq!(group_order(4, &[Permutation::identity(4)]), 1);
    }

    #[test]
    fn chain_matches_enumeration() {
        // A few small groups checked against brute-force closure.
        let cases: Vec<(usize, Vec<Permutation>)> = vec![
            (6, vec![perm(&[1, 0, 2, 3, 4, 5]), perm(&[0, 1, 3, 2, 4, 5]), perm(&[0, 1, 2, 3, 5, 4])]),
            (6, vec![perm(&[1, 2, 0, 4, 5, 3]), perm(&[3, 4, 5, 0, 1, 2])]),
            (8, vec![perm(&[1, 2, 3, 0, 5, 6, 7, 4]), perm(&[4, 7, 6, 5, 0, 3, 2, 1])]),
            (7, vec![perm(&[1, 2, 3, 4, 5, 6, 0]), perm(&[0, 2, 4, 6, 1, 3, 5])]),
        ];
        for (n, gens) in cases {
            let all = enumerate_group(&gens, n);
            let chain = schreier_sims(n, &gens);
            assert_eq!(chain.order(), all.len() as u128);
            for g in &all {
                assert!(chain.contains(g));
            }
            // Redundant generators do not change the order.
            let mut more = gens.clone();
            more.push(gens[0].then(&gens[1]));
            assert_eq!(group_order(n, &more), all.len() as u128);
        }
    }

    #[test]
    fn membership_is_exact() {
        let n = 6;
        let a6_gens = [perm(&[1, 2, 0, 3, 4, 5]), perm(&[0, 2, 3, 4, 5, 1])];
        let chain = schreier_sims(n, &a6_gens);
        assert_eq!(chain.order(), 360);
        assert!(!chain.contains(&transposition(n, 0, 1)));
        assert!(chain.contains(&transposition(n, 0, 1).then(&transposition(n, 2, 3))));
    }

    #[test]
    fn derived_series_examples() {
        let c = cycle(7);
        let s = derived_series(7, std::slice::from_ref(&c));
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].order(), 1);
        assert!(is_solvable(7, &[c]));
        // S4 → A4 → V4 → 1.
        let s4 = [cycle(4), transposition(4, 0, 1)];
        let orders: Vec<u128> = derived_series(4, &s4).iter().map(|t| t.order()).collect();
        assert_eq!(orders, vec![12, 4, 1]);
        // A5 is perfect.
        let a5 = [perm(&[1, 2, 0, 3, 4]), perm(&[0, 2, 3, 4, 1])];
        assert!(!is_solvable(5, &a5));
        let res = perfect_residual(5, &a5);
        assert_eq!(res.order(), 60);
        let again = derived_subgroup_generators(5, &res.generators);
        assert_eq!(group_order(5, &again), 60);
    }

    #[test]
    fn stabilizer_generators_fix_base_point() {
        let s5 = [cycle(5), transposition(5, 0, 1)];
        let chain = StabChain::with_base(5, &s5, &[3]);
        assert_eq!(chain.base()[0], 3);
        let stab = chain.stabilizer_generators(1);
        assert!(stab.iter().all(|g| g.apply(3) == 3));
        assert_eq!(group_order(5, &stab), 24);
    }

    #[test]
    fn bounded_chain_aborts() {
        let s7 = [cycle(7), transposition(7, 0, 1)];
        assert!(StabChain::bounded(7, &s7, 100).is_none());
        assert_eq!(StabChain::bounded(7, &s7, 5040).unwrap().order(), 5040);
    }

    #[test]
    fn search_trivial_and_impossible() {
        let s5 = [cycle(5), transposition(5, 0, 1)];
        let hit = random_subgroup_search(5, &s5, 1, |_| true, 1, 10).unwrap();
        assert_eq!(hit.samples, 0);
        assert!(matches!(random_subgroup_search(5, &s5, 121, |_| true, 1, 100), Err(Error::NotFound(_))));
        assert!(matches!(random_subgroup_search(5, &s5, 60, |_| true, 1, 0), Err(Error::NotFound(_))));
    }

    #[test]
    fn search_finds_a5_in_s5_deterministically() {
        let s5 = [cycle(5), transposition(5, 0, 1)];
        let pred = |g: &[Permutation]| is_transitive(5, g);
        let a = random_subgroup_search(5, &s5, 60, pred, 7, 10_000).unwrap();
        let b = random_subgroup_search(5, &s5, 60, pred, 7, 10_000).unwrap();
        assert_eq!(a, b);
        assert_eq!(group_order(5, &[a.generators.0, a.generators.1]), 60);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
            Just((0..n as u32).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Permutation::new(v).unwrap())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn products_of_generators_are_members(a in perm_strategy(7), b in perm_strategy(7), c in perm_strategy(7)) {
                let gens = [a.clone(), b.clone(), c.clone()];
                let chain = schreier_sims(7, &gens);
                for x in &gens {
                    for y in &gens {
                        prop_assert!(chain.contains(&x.then(y)));
                        for z in &gens {
                            prop_assert!(chain.contains(&x.then(y).then(z)));
                        }
                    }
                }
                // Order equals the product of the orbit lengths and divides 7!.
                prop_assert_eq!(5040 % chain.order(), 0);
                prop_assert_eq!(chain.order(), enumerate_group(&gens, 7).len() as u128);
            }

            #[test]
            fn order_ignores_redundant_generators(a in perm_strategy(6), b in perm_strategy(6)) {
                let base = group_order(6, &[a.clone(), b.clone()]);
                prop_assert_eq!(group_order(6, &[a.clone(), b.clone(), a.then(&b), b.inverse()]), base);
            }
        }
    }
}
