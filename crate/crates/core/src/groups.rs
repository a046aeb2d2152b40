//! Table-based finite groups of order at most 4096.
//!
//! Elements carry a structured `u64` label (for the field-pair families the
//! label packs `(a, b)` as `a << 16 | b`). Ids are assigned by sorting
//! labels, with the identity forced to id 0, so every table is reproducible
//! bit for bit.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest group the engine builds.
pub const ORDER_CAP: usize = 4096;

pub type ElemId = u16;

/// Which constructor produced a group; automorphism generators depend on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    A2 { n: u32, k: u32, poly: u32 },
    B2 { n: u32, poly: u32 },
    PEps { poly: u32, eps: u16 },
    Homocyclic { rank: u32, exponent: u32 },
    Quaternion { order: u32 },
    Quotient,
    Custom,
}

#[inline]
pub fn pack_pair(a: u32, b: u32) -> u64 {
    ((a as u64) << 16) | b as u64
}

#[inline]
pub fn unpack_pair(label: u64) -> (u32, u32) {
    ((label >> 16) as u32, (label & 0xFFFF) as u32)
}

#[derive(Clone)]
pub struct FiniteGroup {
    name: String,
    family: Family,
    labels: Vec<u64>,
    mul: Vec<ElemId>,
    inv: Vec<ElemId>,
    gens: Vec<ElemId>,
    /// For each element x ≠ 1: (parent, k) with x = parent · gens[k].
    parent: Vec<(ElemId, u8)>,
    /// Elements in breadth-first order from the identity.
    bfs: Vec<ElemId>,
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.name, self.order())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    members: Vec<ElemId>,
    normal: bool,
}

impl Subgroup {
    pub fn members(&self) -> &[ElemId] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn is_normal(&self) -> bool {
        self.normal
    }

    pub fn contains(&self, x: ElemId) -> bool {
        self.members.binary_search(&x).is_ok()
    }
}

/// Breadth-first closure of `seeds` under right multiplication.
///
/// The multiplication rule only needs to be total on the generated set.
/// Fails with `GroupTooLarge` as soon as more than `cap` elements appear.
pub fn closure(
    name: &str,
    family: Family,
    identity: u64,
    seeds: &[u64],
    mul: impl Fn(u64, u64) -> u64,
    cap: usize,
) -> Result<FiniteGroup> {
    let cap = cap.min(ORDER_CAP);
    let mut seen: HashMap<u64, ()> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(identity, ());
    queue.push_back(identity);
    let mut all = vec![identity];
    while let Some(x) = queue.pop_front() {
        for &g in seeds {
            let y = mul(x, g);
            if seen.insert(y, ()).is_none() {
                if all.len() >= cap {
                    return Err(Error::GroupTooLarge { cap });
                }
                all.push(y);
                queue.push_back(y);
            }
        }
    }
    let mut gens: Vec<u64> = Vec::new();
    for &s in seeds {
        if s != identity && !gens.contains(&s) {
            gens.push(s);
        }
    }
    from_elements(name, family, identity, all, &gens, mul)
}

/// Builds a group from its full element list and a multiplication rule.
/// The rule is evaluated on every pair; the result is checked to be a group
/// generated by `gen_labels`.
pub fn from_elements(
    name: &str,
    family: Family,
    identity: u64,
    mut labels: Vec<u64>,
    gen_labels: &[u64],
    mul: impl Fn(u64, u64) -> u64,
) -> Result<FiniteGroup> {
    if labels.len() > ORDER_CAP {
        return Err(Error::GroupTooLarge { cap: ORDER_CAP });
    }
    labels.sort_unstable();
    labels.dedup();
    let pos = labels
        .iter()
        .position(|&l| l == identity)
        .ok_or_else(|| Error::NotAGroup("identity missing from element list".into()))?;
    labels.remove(pos);
    labels.insert(0, identity);
    let order = labels.len();
    let index: HashMap<u64, ElemId> = labels.iter().enumerate().map(|(i, &l)| (l, i as ElemId)).collect();
    let mut table = vec![0 as ElemId; order * order];
    for (i, &a) in labels.iter().enumerate() {
        for (j, &b) in labels.iter().enumerate() {
            let c = mul(a, b);
            table[i * order + j] = *index
                .get(&c)
                .ok_or_else(|| Error::NotAGroup(format!("product {a:#x}·{b:#x} leaves the element set")))?;
        }
    }
    let gens = gen_labels
        .iter()
        .map(|l| index.get(l).copied().ok_or_else(|| Error::NotAGroup(format!("generator {l:#x} not an element"))))
        .collect::<Result<Vec<_>>>()?;
    FiniteGroup::from_table(name, family, labels, table, gens)
}

impl FiniteGroup {
    /// Validates a Cayley table (id 0 must be the identity) and computes the
    /// inverse table and breadth-first word tree.
    pub fn from_table(
        name: &str,
        family: Family,
        labels: Vec<u64>,
        mul: Vec<ElemId>,
        gens: Vec<ElemId>,
    ) -> Result<FiniteGroup> {
        let order = labels.len();
        if order == 0 || mul.len() != order * order {
            return Err(Error::NotAGroup("table shape does not match element count".into()));
        }
        if order > ORDER_CAP {
            return Err(Error::GroupTooLarge { cap: ORDER_CAP });
        }
        if gens.len() > u8::MAX as usize {
            return Err(Error::Unsupported("more than 255 generators".into()));
        }
        for x in 0..order {
            if mul[x] as usize != x || mul[x * order] as usize != x {
                return Err(Error::NotAGroup("id 0 is not a two-sided identity".into()));
            }
        }
        let mut inv = vec![0 as ElemId; order];
        for x in 0..order {
            let row = &mul[x * order..(x + 1) * order];
            let y = row
                .iter()
                .position(|&z| z == 0)
                .ok_or_else(|| Error::NotAGroup(format!("element {x} has no right inverse")))?;
            if mul[y * order + x] != 0 {
                return Err(Error::NotAGroup(format!("element {x} has no two-sided inverse")));
            }
            inv[x] = y as ElemId;
        }
        let mut g = FiniteGroup {
            name: name.to_string(),
            family,
            labels,
            mul,
            inv,
            gens,
            parent: vec![(0, u8::MAX); order],
            bfs: Vec::with_capacity(order),
        };
        g.build_word_tree()?;
        g.check_associative()?;
        Ok(g)
    }

    fn build_word_tree(&mut self) -> Result<()> {
        let order = self.order();
        let mut seen = vec![false; order];
        seen[0] = true;
        self.bfs.clear();
        self.bfs.push(0);
        let mut head = 0;
        while head < self.bfs.len() {
            let x = self.bfs[head];
            head += 1;
            for (k, &g) in self.gens.iter().enumerate() {
                let y = self.mul(x, g);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    self.parent[y as usize] = (x, k as u8);
                    self.bfs.push(y);
                }
            }
        }
        if self.bfs.len() != order {
            return Err(Error::NotAGroup(format!(
                "generators reach {} of {} elements",
                self.bfs.len(),
                order
            )));
        }
        Ok(())
    }

    /// Light's test: (x·y)·g = x·(y·g) for all x, y and every generator g.
    /// Since every element is a word in the generators, this is equivalent
    /// to full associativity.
    fn check_associative(&self) -> Result<()> {
        let order = self.order();
        for &g in &self.gens {
            for x in 0..order as ElemId {
                for y in 0..order as ElemId {
                    if self.mul(self.mul(x, y), g) != self.mul(x, self.mul(y, g)) {
                        return Err(Error::NotAGroup(format!("associativity fails at ({x}, {y}, {g})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, x: ElemId) -> u64 {
        self.labels[x as usize]
    }

    pub fn id_of(&self, label: u64) -> Option<ElemId> {
        if self.labels[0] == label {
            return Some(0);
        }
        self.labels[1..].binary_search(&label).ok().map(|i| (i + 1) as ElemId)
    }

    pub fn gens(&self) -> &[ElemId] {
        &self.gens
    }

    pub fn elements(&self) -> impl Iterator<Item = ElemId> {
        0..self.order() as ElemId
    }

    /// Breadth-first order used for extending maps from generators.
    pub fn bfs_order(&self) -> &[ElemId] {
        &self.bfs
    }

    /// (parent, k) with x = parent · gens[k]; `None` for the identity.
    pub fn word_parent(&self, x: ElemId) -> Option<(ElemId, usize)> {
        if x == 0 {
            None
        } else {
            let (p, k) = self.parent[x as usize];
            Some((p, k as usize))
        }
    }

    #[inline]
    pub fn mul(&self, a: ElemId, b: ElemId) -> ElemId {
        self.mul[a as usize * self.order() + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: ElemId) -> ElemId {
        self.inv[a as usize]
    }

    /// [a, b] = a⁻¹ b⁻¹ a b.
    pub fn commutator(&self, a: ElemId, b: ElemId) -> ElemId {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    /// b⁻¹ a b.
    pub fn conjugate(&self, a: ElemId, b: ElemId) -> ElemId {
        self.mul(self.mul(self.inv(b), a), b)
    }

    pub fn pow(&self, a: ElemId, e: u64) -> ElemId {
        let mut acc = 0;
        for _ in 0..e {
            acc = self.mul(acc, a);
        }
        acc
    }

    pub fn element_order(&self, a: ElemId) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn order_profile(&self) -> BTreeMap<usize, usize> {
        let mut profile = BTreeMap::new();
        for x in self.elements() {
            *profile.entry(self.element_order(x)).or_insert(0) += 1;
        }
        profile
    }

    pub fn exponent(&self) -> usize {
        self.order_profile().keys().fold(1, |acc, &k| lcm(acc, k))
    }

    pub fn involution_count(&self) -> usize {
        self.elements().filter(|&x| self.element_order(x) == 2).count()
    }

    pub fn is_abelian(&self) -> bool {
        self.gens.iter().all(|&a| self.gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_two_group(&self) -> bool {
        self.order().is_power_of_two()
    }

    /// Closure of `ids` under multiplication (finite, so also under inverses).
    pub fn subgroup_generated(&self, ids: &[ElemId]) -> Subgroup {
        let mut inside = vec![false; self.order()];
        inside[0] = true;
        let mut members = vec![0];
        let gens: Vec<ElemId> = ids.iter().copied().filter(|&x| x != 0).collect();
        let mut head = 0;
        while head < members.len() {
            let x = members[head];
            head += 1;
            for &g in &gens {
                let y = self.mul(x, g);
                if !inside[y as usize] {
                    inside[y as usize] = true;
                    members.push(y);
                }
            }
        }
        members.sort_unstable();
        let normal = self.is_normal_set(&inside);
        Subgroup { members, normal }
    }

    fn is_normal_set(&self, inside: &[bool]) -> bool {
        (0..self.order() as ElemId)
            .filter(|&h| inside[h as usize])
            .all(|h| self.gens.iter().all(|&g| inside[self.conjugate(h, g) as usize]))
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup { members: self.elements().collect(), normal: true }
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup { members: vec![0], normal: true }
    }

    pub fn center(&self) -> Subgroup {
        let members: Vec<ElemId> = self
            .elements()
            .filter(|&z| self.gens.iter().all(|&g| self.mul(z, g) == self.mul(g, z)))
            .collect();
        Subgroup { members, normal: true }
    }

    pub fn derived_subgroup(&self) -> Subgroup {
        let mut comms: Vec<ElemId> = Vec::new();
        let mut seen = vec![false; self.order()];
        for a in self.elements() {
            for b in self.elements() {
                let c = self.commutator(a, b);
                if !seen[c as usize] {
                    seen[c as usize] = true;
                    comms.push(c);
                }
            }
        }
        self.subgroup_generated(&comms)
    }

    /// Φ(G) = G²·[G, G] for a 2-group.
    pub fn frattini(&self) -> Result<Subgroup> {
        if !self.is_two_group() {
            return Err(Error::Unsupported(format!("Frattini subgroup of non-2-group of order {}", self.order())));
        }
        let mut seeds: Vec<ElemId> = self.derived_subgroup().members;
        seeds.extend(self.elements().map(|x| self.mul(x, x)));
        seeds.sort_unstable();
        seeds.dedup();
        Ok(self.subgroup_generated(&seeds))
    }

    /// Classical definition: non-abelian 2-group with Z = Φ = G′ elementary
    /// abelian.
    pub fn is_special_2group(&self) -> bool {
        if !self.is_two_group() || self.is_abelian() {
            return false;
        }
        let z = self.center();
        let Ok(phi) = self.frattini() else { return false };
        let d = self.derived_subgroup();
        z == phi && z == d && z.members.iter().all(|&x| self.element_order(x) <= 2)
    }

    /// Whether x ↦ x² is constant on every coset of the centre. Requires a
    /// special 2-group of exponent 4.
    pub fn squares_constant_on_central_cosets(&self) -> Result<bool> {
        if !self.is_special_2group() || self.exponent() != 4 {
            return Err(Error::Unsupported("needs a special 2-group of exponent 4".into()));
        }
        let z = self.center();
        Ok(self.elements().all(|x| {
            let sq = self.mul(x, x);
            z.members.iter().all(|&c| {
                let y = self.mul(c, x);
                self.mul(y, y) == sq
            })
        }))
    }

    /// Maps every element to the least id of its coset xH.
    pub fn coset_representatives(&self, h: &Subgroup) -> Vec<ElemId> {
        self.elements()
            .map(|x| h.members.iter().map(|&y| self.mul(x, y)).min().expect("subgroup is non-empty"))
            .collect()
    }

    /// G/H with cosets numbered by their least representative.
    pub fn quotient(&self, h: &Subgroup) -> Result<FiniteGroup> {
        Ok(self.quotient_with_map(h)?.0)
    }

    /// G/H together with the projection G → G/H on ids.
    pub fn quotient_with_map(&self, h: &Subgroup) -> Result<(FiniteGroup, Vec<ElemId>)> {
        let mut inside = vec![false; self.order()];
        for &x in &h.members {
            inside[x as usize] = true;
        }
        if !self.is_normal_set(&inside) {
            return Err(Error::NotNormal);
        }
        let reps = self.coset_representatives(h);
        let mut distinct: Vec<ElemId> = reps.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let idx: HashMap<ElemId, ElemId> = distinct.iter().enumerate().map(|(i, &r)| (r, i as ElemId)).collect();
        let m = distinct.len();
        let mut table = vec![0 as ElemId; m * m];
        for (i, &a) in distinct.iter().enumerate() {
            for (j, &b) in distinct.iter().enumerate() {
                table[i * m + j] = idx[&reps[self.mul(a, b) as usize]];
            }
        }
        let labels: Vec<u64> = distinct.iter().map(|&r| self.label(r)).collect();
        let mut gens: Vec<ElemId> = Vec::new();
        for &g in &self.gens {
            let c = idx[&reps[g as usize]];
            if c != 0 && !gens.contains(&c) {
                gens.push(c);
            }
        }
        let projection: Vec<ElemId> = reps.iter().map(|r| idx[r]).collect();
        let q = FiniteGroup::from_table(&format!("{}/H", self.name), Family::Quotient, labels, table, gens)?;
        Ok((q, projection))
    }

    /// Extends `images` (one per generator, ids in `target`) along the word
    /// tree and checks every Cayley-graph edge. Returns the map on ids when it
    /// is a well-defined homomorphism.
    pub fn extend_homomorphism(&self, target: &FiniteGroup, images: &[ElemId]) -> Option<Vec<ElemId>> {
        if images.len() != self.gens.len() {
            return None;
        }
        let mut map = vec![0 as ElemId; self.order()];
        for &x in &self.bfs[1..] {
            let (p, k) = self.parent[x as usize];
            map[x as usize] = target.mul(map[p as usize], images[k as usize]);
        }
        for x in self.elements() {
            for (k, &g) in self.gens.iter().enumerate() {
                if map[self.mul(x, g) as usize] != target.mul(map[x as usize], images[k]) {
                    return None;
                }
            }
        }
        Some(map)
    }

    /// Brute-force isomorphism search: generator images range over target
    /// elements of matching order.
    pub fn find_isomorphism(&self, target: &FiniteGroup) -> Option<Vec<ElemId>> {
        if self.order() != target.order() || self.order_profile() != target.order_profile() {
            return None;
        }
        let candidates: Vec<Vec<ElemId>> = self
            .gens
            .iter()
            .map(|&g| {
                let o = self.element_order(g);
                target.elements().filter(|&y| target.element_order(y) == o).collect()
            })
            .collect();
        let mut images = vec![0 as ElemId; self.gens.len()];
        self.search_iso(target, &candidates, 0, &mut images)
    }

    fn search_iso(
        &self,
        target: &FiniteGroup,
        candidates: &[Vec<ElemId>],
        depth: usize,
        images: &mut Vec<ElemId>,
    ) -> Option<Vec<ElemId>> {
        if depth == candidates.len() {
            let map = self.extend_homomorphism(target, images)?;
            let mut hit = vec![false; target.order()];
            for &y in &map {
                if std::mem::replace(&mut hit[y as usize], true) {
                    return None;
                }
            }
            return Some(map);
        }
        for &c in &candidates[depth] {
            images[depth] = c;
            if let Some(m) = self.search_iso(target, candidates, depth + 1, images) {
                return Some(m);
            }
        }
        None
    }

    /// Generators chosen greedily outside ⟨chosen⟩·Φ(G); for a 2-group this
    /// is a minimal generating set (Burnside basis theorem).
    pub fn minimal_generators(&self) -> Result<Vec<ElemId>> {
        let phi = self.frattini()?;
        let mut chosen: Vec<ElemId> = Vec::new();
        let mut covered = phi.clone();
        for x in self.elements() {
            if covered.order() == self.order() {
                break;
            }
            if !covered.contains(x) {
                chosen.push(x);
                let mut seeds = phi.members.clone();
                seeds.extend(&chosen);
                covered = self.subgroup_generated(&seeds);
            }
        }
        Ok(chosen)
    }

    pub fn dump(&self) -> GroupDump {
        GroupDump {
            name: self.name.clone(),
            generators: self.gens.iter().map(|&g| format!("{:#x}", self.label(g))).collect(),
            order: self.order(),
            order_profile: self.order_profile(),
            center_size: self.center().order(),
        }
    }
}

/// JSON summary of a constructed group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDump {
    pub name: String,
    pub generators: Vec<String>,
    pub order: usize,
    pub order_profile: BTreeMap<usize, usize>,
    pub center_size: usize,
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
