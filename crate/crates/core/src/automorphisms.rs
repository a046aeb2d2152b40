//! Automorphisms as certified permutations of element ids, fusion classes,
//! automorphism-group orders and the central-automorphism checks for special
//! 2-groups.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2n::{FieldContext, FieldElement};
use crate::groups::{pack_pair, unpack_pair, ElemId, Family, FiniteGroup};
use crate::linalg::{exterior_matrix, Matrix};
use crate::permgrp::{orbits, Permutation, StabChain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutSource {
    Xi,
    Frobenius,
    Central,
    Alpha,
    Beta,
    Bruteforce,
    Custom,
}

/// A bijection of element ids that preserves the product. Only constructed
/// after the full multiplicative certificate has been checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    perm: Permutation,
    source: AutSource,
}

impl Automorphism {
    /// Checks bijectivity and φ(xy) = φ(x)φ(y) on every pair.
    pub fn from_map(group: &FiniteGroup, map: Vec<ElemId>, source: AutSource) -> Result<Self> {
        if map.len() != group.order() {
            return Err(Error::NotBijective);
        }
        let perm = Permutation::new(map.iter().map(|&x| x as u32).collect())?;
        if map[0] != 0 {
            return Err(Error::NotAHomomorphism("identity is not fixed".into()));
        }
        for x in group.elements() {
            let mx = map[x as usize];
            for y in group.elements() {
                if map[group.mul(x, y) as usize] != group.mul(mx, map[y as usize]) {
                    return Err(Error::NotAHomomorphism(format!("fails on the pair ({x}, {y})")));
                }
            }
        }
        Ok(Automorphism { perm, source })
    }

    /// Applies a map on labels; labels outside the group are rejected.
    pub fn from_label_map(group: &FiniteGroup, f: impl Fn(u64) -> u64, source: AutSource) -> Result<Self> {
        let map = group
            .elements()
            .map(|x| {
                let l = f(group.label(x));
                group.id_of(l).ok_or_else(|| Error::NotAHomomorphism(format!("label {l:#x} is not an element")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_map(group, map, source)
    }

    pub fn identity(group: &FiniteGroup) -> Self {
        Automorphism { perm: Permutation::identity(group.order()), source: AutSource::Custom }
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn source(&self) -> AutSource {
        self.source
    }

    #[inline]
    pub fn apply(&self, x: ElemId) -> ElemId {
        self.perm.apply(x as u32) as ElemId
    }

    pub fn order(&self) -> u64 {
        self.perm.order()
    }

    /// `self` then `other`, re-certified.
    pub fn then(&self, other: &Automorphism, group: &FiniteGroup) -> Result<Automorphism> {
        let map = self.perm.then(&other.perm).images().iter().map(|&x| x as ElemId).collect();
        Self::from_map(group, map, AutSource::Custom)
    }

    pub fn inverse(&self, group: &FiniteGroup) -> Result<Automorphism> {
        let map = self.perm.inverse().images().iter().map(|&x| x as ElemId).collect();
        Self::from_map(group, map, AutSource::Custom)
    }
}

/// Extends generator images along the word tree and certifies the result.
pub fn aut_from_images(group: &FiniteGroup, images: &[ElemId], source: AutSource) -> Result<Automorphism> {
    if images.len() != group.gens().len() {
        return Err(Error::NotAHomomorphism(format!(
            "{} images given for {} generators",
            images.len(),
            group.gens().len()
        )));
    }
    let map = group
        .extend_homomorphism(group, images)
        .ok_or_else(|| Error::NotAHomomorphism("generator images do not extend".into()))?;
    let mut hit = vec![false; group.order()];
    for &y in &map {
        if std::mem::replace(&mut hit[y as usize], true) {
            return Err(Error::NotBijective);
        }
    }
    Automorphism::from_map(group, map, source)
}

/// A GF(2)-basis of an elementary abelian subgroup, chosen greedily in id
/// order.
pub fn elementary_basis(group: &FiniteGroup, members: &[ElemId]) -> Vec<ElemId> {
    let mut basis: Vec<ElemId> = Vec::new();
    let mut span: Vec<ElemId> = vec![0];
    for &x in members {
        if span.contains(&x) {
            continue;
        }
        basis.push(x);
        let extra: Vec<ElemId> = span.iter().map(|&s| group.mul(s, x)).collect();
        span.extend(extra);
    }
    basis
}

/// Maps x_i ↦ x_i·z for one generator index and one central element, all
/// other generators fixed.
pub fn central_map(group: &FiniteGroup, gen_index: usize, z: ElemId) -> Result<Automorphism> {
    let mut images: Vec<ElemId> = group.gens().to_vec();
    images[gen_index] = group.mul(images[gen_index], z);
    aut_from_images(group, &images, AutSource::Central)
}

/// One central map per (generator, centre-basis element) pair.
pub fn central_generators(group: &FiniteGroup) -> Result<Vec<Automorphism>> {
    let zb = elementary_basis(group, group.center().members());
    let mut out = Vec::new();
    for i in 0..group.gens().len() {
        for &z in &zb {
            out.push(central_map(group, i, z)?);
        }
    }
    Ok(out)
}

fn fe(x: u32) -> FieldElement {
    FieldElement(x as u16)
}

fn generator_of(field: &FieldContext) -> FieldElement {
    if field.is_generator(field.root()) {
        field.root()
    } else {
        field.primitive_element()
    }
}

/// Candidate (a, x) ↦ (μ a^{2^j}, ν x^{2^j}) on P(ε) labels.
fn peps_semilinear(field: FieldContext, mu: FieldElement, nu: FieldElement, j: i64) -> impl Fn(u64) -> u64 {
    move |label| {
        let (a, x) = unpack_pair(label);
        let a2 = field.mul(mu, field.frobenius(fe(a), j));
        let x2 = field.mul(nu, field.frobenius(fe(x), j));
        pack_pair(a2.bits(), x2.bits())
    }
}

/// Structured fallback when a derived P(ε) candidate fails: every
/// semilinear map (μ, ν, j) that is an automorphism, found by checking
/// generator images first.
pub fn peps_semilinear_search(group: &FiniteGroup, field: FieldContext) -> Result<Vec<Automorphism>> {
    let sub = field.subfield_elements(3)?;
    let mut out = Vec::new();
    for j in 0..6 {
        for mu in field.elements().filter(|x| !x.is_zero()) {
            for &nu in sub.iter().filter(|x| !x.is_zero()) {
                let f = peps_semilinear(field, mu, nu, j);
                let images: Option<Vec<ElemId>> = group.gens().iter().map(|&g| group.id_of(f(group.label(g)))).collect();
                let Some(images) = images else { continue };
                if group.extend_homomorphism(group, &images).is_none() {
                    continue;
                }
                if let Ok(a) = Automorphism::from_label_map(group, &f, AutSource::Custom) {
                    out.push(a);
                }
            }
        }
    }
    Ok(out)
}

/// Central maps plus the semilinear generators appropriate to the family.
pub fn known_aut_generators(group: &FiniteGroup) -> Result<Vec<Automorphism>> {
    if !matches!(group.family(), Family::A2 { .. } | Family::B2 { .. } | Family::PEps { .. }) {
        return Err(Error::Unsupported(format!("no known automorphism generators for {:?}", group.family())));
    }
    let mut out = central_generators(group)?;
    match group.family().clone() {
        Family::A2 { n, k, poly } => {
            let f = FieldContext::new(n, Some(poly))?;
            let lambda = generator_of(&f);
            let scale_b = f.mul(lambda, f.frobenius(lambda, k as i64));
            out.push(Automorphism::from_label_map(
                group,
                |l| {
                    let (a, b) = unpack_pair(l);
                    pack_pair(f.mul(fe(a), lambda).bits(), f.mul(fe(b), scale_b).bits())
                },
                AutSource::Xi,
            )?);
            out.push(frobenius_aut(group, f)?);
        }
        Family::B2 { n, poly } => {
            let f = FieldContext::new(2 * n, Some(poly))?;
            let lambda = generator_of(&f);
            let scale_b = f.pow(lambda, (1u64 << n) + 1);
            out.push(Automorphism::from_label_map(
                group,
                |l| {
                    let (a, b) = unpack_pair(l);
                    pack_pair(f.mul(fe(a), lambda).bits(), f.mul(fe(b), scale_b).bits())
                },
                AutSource::Xi,
            )?);
            out.push(frobenius_aut(group, f)?);
        }
        Family::PEps { poly, eps } => {
            let f = FieldContext::new(6, Some(poly))?;
            let eps = FieldElement(eps);
            let alpha = peps_semilinear(f, f.pow(eps, 3), f.pow(eps, 9), 0);
            let beta = peps_semilinear(f, eps, FieldElement::ONE, 2);
            match (
                Automorphism::from_label_map(group, alpha, AutSource::Alpha),
                Automorphism::from_label_map(group, beta, AutSource::Beta),
            ) {
                (Ok(a), Ok(b)) => {
                    out.push(a);
                    out.push(b);
                }
                _ => out.extend(peps_semilinear_search(group, f)?),
            }
        }
        other => {
            return Err(Error::Unsupported(format!("no known automorphism generators for {other:?}")));
        }
    }
    Ok(out)
}

fn frobenius_aut(group: &FiniteGroup, f: FieldContext) -> Result<Automorphism> {
    Automorphism::from_label_map(
        group,
        |l| {
            let (a, b) = unpack_pair(l);
            pack_pair(f.square(fe(a)).bits(), f.square(fe(b)).bits())
        },
        AutSource::Frobenius,
    )
}

/// Orbits of a set of automorphisms on the elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionPartition {
    pub classes: Vec<Vec<ElemId>>,
    pub sizes: Vec<usize>,
}

impl FusionPartition {
    pub fn sorted_sizes(&self) -> Vec<usize> {
        let mut s = self.sizes.clone();
        s.sort_unstable();
        s
    }

    pub fn class_of(&self, x: ElemId) -> usize {
        self.classes.iter().position(|c| c.binary_search(&x).is_ok()).expect("partition covers every element")
    }
}

pub fn fusion_classes(group: &FiniteGroup, auts: &[Automorphism]) -> FusionPartition {
    let perms: Vec<Permutation> = auts.iter().map(|a| a.perm.clone()).collect();
    let mut classes: Vec<Vec<ElemId>> = orbits(group.order(), &perms)
        .into_iter()
        .map(|o| {
            let mut c: Vec<ElemId> = o.into_iter().map(|x| x as ElemId).collect();
            c.sort_unstable();
            c
        })
        .collect();
    classes.sort();
    let sizes = classes.iter().map(Vec::len).collect();
    FusionPartition { classes, sizes }
}

/// Stabilizer chain of ⟨auts⟩ based at the group generators, which suffice
/// as a base because an automorphism is fixed by their images.
pub fn aut_chain(group: &FiniteGroup, auts: &[Automorphism]) -> StabChain {
    let perms: Vec<Permutation> = auts.iter().map(|a| a.perm.clone()).collect();
    let base: Vec<u32> = group.gens().iter().map(|&g| g as u32).collect();
    StabChain::with_base(group.order(), &perms, &base)
}

pub fn aut_group_order(group: &FiniteGroup, auts: &[Automorphism]) -> u128 {
    aut_chain(group, auts).order()
}

/// Groups up to this order (with at most four generators) are searched
/// exhaustively.
pub const BRUTE_FORCE_ORDER: usize = 64;
pub const BRUTE_FORCE_GENS: usize = 4;

/// Every automorphism, by backtracking over generator images with order
/// and pairwise-relation pruning.
pub fn brute_force_aut(group: &FiniteGroup) -> Result<Vec<Automorphism>> {
    let gens = group.gens().to_vec();
    if group.order() > BRUTE_FORCE_ORDER || gens.len() > BRUTE_FORCE_GENS {
        return Err(Error::TooLargeForBruteForce { order: group.order(), gens: gens.len() });
    }
    let orders: Vec<usize> = group.elements().map(|x| group.element_order(x)).collect();
    let candidates: Vec<Vec<ElemId>> = gens
        .iter()
        .map(|&g| group.elements().filter(|&y| orders[y as usize] == orders[g as usize]).collect())
        .collect();
    let mut found = Vec::new();
    let mut images = Vec::with_capacity(gens.len());
    backtrack(group, &gens, &orders, &candidates, &mut images, &mut found)?;
    Ok(found)
}

fn backtrack(
    group: &FiniteGroup,
    gens: &[ElemId],
    orders: &[usize],
    candidates: &[Vec<ElemId>],
    images: &mut Vec<ElemId>,
    found: &mut Vec<Automorphism>,
) -> Result<()> {
    let d = images.len();
    if d == gens.len() {
        if let Some(map) = group.extend_homomorphism(group, images) {
            let mut hit = vec![false; group.order()];
            if map.iter().all(|&y| !std::mem::replace(&mut hit[y as usize], true)) {
                found.push(Automorphism::from_map(group, map, AutSource::Bruteforce)?);
            }
        }
        return Ok(());
    }
    'cand: for &c in &candidates[d] {
        // Products and commutators with earlier generators keep their orders.
        for i in 0..d {
            let (g, h) = (gens[i], gens[d]);
            let (gi, hi) = (images[i], c);
            if orders[group.mul(g, h) as usize] != orders[group.mul(gi, hi) as usize]
                || orders[group.commutator(g, h) as usize] != orders[group.commutator(gi, hi) as usize]
                || (group.mul(g, h) == group.mul(h, g)) != (group.mul(gi, hi) == group.mul(hi, gi))
            {
                continue 'cand;
            }
        }
        images.push(c);
        backtrack(group, gens, orders, candidates, images, found)?;
        images.pop();
    }
    Ok(())
}

/// Element ids grouped by element order.
pub fn order_classes(group: &FiniteGroup) -> BTreeMap<usize, Vec<ElemId>> {
    let mut out: BTreeMap<usize, Vec<ElemId>> = BTreeMap::new();
    for x in group.elements() {
        out.entry(group.element_order(x)).or_default().push(x);
    }
    out
}

/// Fusion classes coincide with order classes.
pub fn is_at_group(group: &FiniteGroup, auts: &[Automorphism]) -> bool {
    fusion_classes(group, auts).classes.len() == order_classes(group).len()
}

/// Fusion classes merged with their inverse images coincide with order
/// classes.
pub fn is_fif_group(group: &FiniteGroup, auts: &[Automorphism]) -> bool {
    let part = fusion_classes(group, auts);
    let mut parent: Vec<usize> = (0..part.classes.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for (i, c) in part.classes.iter().enumerate() {
        let j = part.class_of(group.inv(c[0]));
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        parent[ri] = rj;
    }
    let roots: std::collections::BTreeSet<usize> = (0..parent.len()).map(|i| find(&mut parent, i)).collect();
    roots.len() == order_classes(group).len()
}

/// Outcome of the central-automorphism checks on a special 2-group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralAutReport {
    pub dim_v: usize,
    pub dim_m: usize,
    /// Central maps certified individually.
    pub central_maps_checked: usize,
    pub all_central_maps_certified: bool,
    pub kernel_elementary_abelian: bool,
    /// Distinct central maps found (all tuples when enumerable).
    pub kernel_order: u128,
    /// Order of the group generated by the basis maps.
    pub kernel_generated_order: u128,
    pub kernel_order_expected: u128,
    pub orbits_v: usize,
    pub orbits_m: usize,
    pub fusion_classes: usize,
    pub commutator_map_equivariant: bool,
    pub commutator_map_rank: usize,
    /// Dimension of the kernel W of Λ²(V) → M.
    pub w_dim: usize,
}

impl CentralAutReport {
    pub fn kernel_ok(&self) -> bool {
        self.all_central_maps_certified && self.kernel_elementary_abelian
            && self.kernel_order == self.kernel_order_expected
            && self.kernel_generated_order == self.kernel_order_expected
    }

    pub fn orbit_formula_holds(&self) -> bool {
        self.fusion_classes + 1 == self.orbits_v + self.orbits_m
    }

    pub fn commutator_map_ok(&self) -> bool {
        self.commutator_map_equivariant && self.commutator_map_rank == self.dim_m
    }

    pub fn passed(&self) -> bool {
        self.kernel_ok() && self.orbit_formula_holds() && self.commutator_map_ok()
    }
}

/// Above this many tuples only a basis of the central maps is certified
/// individually; the rest follow from closure.
const CENTRAL_TUPLE_LIMIT: u128 = 4096;

/// Central maps, orbit counting on V = N/Z and M = Z, and the commutator
/// map Λ²(V) → M, all for the group generated by the known generators.
pub fn verify_central_automorphisms(group: &FiniteGroup) -> Result<CentralAutReport> {
    if !group.is_special_2group() {
        return Err(Error::Unsupported(format!("{} is not a special 2-group", group.name())));
    }
    let gens = group.gens().to_vec();
    let z = group.center();
    let zb = elementary_basis(group, z.members());
    let dim_m = zb.len();
    let (quot, proj) = group.quotient_with_map(&z)?;
    let dim_v = elementary_basis(&quot, &quot.elements().collect::<Vec<_>>()).len();
    if dim_v != gens.len() {
        return Err(Error::Unsupported("generators do not form a basis modulo the centre".into()));
    }

    // Coordinates on V (w.r.t. generator images) and on M (w.r.t. zb).
    let mut v_coord = vec![u32::MAX; quot.order()];
    for mask in 0u32..1 << dim_v {
        let e = (0..dim_v).filter(|i| mask >> i & 1 == 1).fold(0, |acc, i| group.mul(acc, gens[i]));
        v_coord[proj[e as usize] as usize] = mask;
    }
    let mut m_coord = vec![u32::MAX; group.order()];
    for mask in 0u32..1 << dim_m {
        let e = (0..dim_m).filter(|i| mask >> i & 1 == 1).fold(0, |acc, i| group.mul(acc, zb[i]));
        m_coord[e as usize] = mask;
    }

    // Central maps: every tuple when feasible, otherwise the basis.
    let tuples = (z.order() as u128).pow(dim_v as u32);
    let mut central = Vec::new();
    let mut certified = true;
    let mut checked = 0usize;
    if tuples <= CENTRAL_TUPLE_LIMIT {
        let zs = z.members();
        let mut idx = vec![0usize; dim_v];
        loop {
            let images: Vec<ElemId> = (0..dim_v).map(|i| group.mul(gens[i], zs[idx[i]])).collect();
            checked += 1;
            match aut_from_images(group, &images, AutSource::Central) {
                Ok(a) => central.push(a),
                Err(_) => certified = false,
            }
            let mut i = 0;
            while i < dim_v {
                idx[i] += 1;
                if idx[i] < zs.len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == dim_v {
                break;
            }
        }
    } else {
        for i in 0..dim_v {
            for &zz in &zb {
                checked += 1;
                match central_map(group, i, zz) {
                    Ok(a) => central.push(a),
                    Err(_) => certified = false,
                }
            }
        }
    }
    let kernel_gens: Vec<Automorphism> =
        if tuples <= CENTRAL_TUPLE_LIMIT { central_generators(group)? } else { central.clone() };
    let elementary = kernel_gens.iter().all(|a| a.perm.then(&a.perm).is_identity())
        && kernel_gens.iter().all(|a| kernel_gens.iter().all(|b| a.perm.then(&b.perm) == b.perm.then(&a.perm)));
    let kernel_generated_order = aut_group_order(group, &kernel_gens);
    let kernel_order = if tuples <= CENTRAL_TUPLE_LIMIT {
        let mut maps: Vec<&Permutation> = central.iter().map(|a| a.perm()).collect();
        maps.sort();
        maps.dedup();
        maps.len() as u128
    } else {
        kernel_generated_order
    };

    // Orbits of ⟨auts⟩ on V and M.
    let auts = known_aut_generators(group)?;
    let perm_on = |sub: &dyn Fn(ElemId) -> usize, size: usize, a: &Automorphism, reps: &[ElemId]| {
        let mut images = vec![0u32; size];
        for (k, &r) in reps.iter().enumerate() {
            images[k] = sub(a.apply(r)) as u32;
        }
        Permutation::new(images)
    };
    let v_reps: Vec<ElemId> = {
        let mut reps = vec![ElemId::MAX; quot.order()];
        for x in group.elements() {
            let slot = &mut reps[proj[x as usize] as usize];
            if *slot == ElemId::MAX {
                *slot = x;
            }
        }
        reps
    };
    let proj_fn = |x: ElemId| proj[x as usize] as usize;
    let v_perms = auts.iter().map(|a| perm_on(&proj_fn, quot.order(), a, &v_reps)).collect::<Result<Vec<_>>>()?;
    let z_members = z.members().to_vec();
    let z_index = |x: ElemId| z_members.binary_search(&x).expect("automorphisms preserve the centre");
    let m_perms = auts.iter().map(|a| perm_on(&z_index, z_members.len(), a, &z_members)).collect::<Result<Vec<_>>>()?;
    let orbits_v = orbits(quot.order(), &v_perms).len();
    let orbits_m = orbits(z_members.len(), &m_perms).len();
    let fusion = fusion_classes(group, &auts).classes.len();

    // Commutator map Λ²(V) → M and its equivariance.
    let gf2 = FieldContext::gf2();
    let pairs = dim_v * (dim_v - 1) / 2;
    let mut comm = Matrix::zeros(gf2, pairs, dim_m);
    let mut row = 0;
    for i in 0..dim_v {
        for j in i + 1..dim_v {
            let c = m_coord[group.commutator(gens[i], gens[j]) as usize];
            for k in 0..dim_m {
                comm.set(row, k, FieldElement((c >> k & 1) as u16));
            }
            row += 1;
        }
    }
    let to_matrix = |rows: Vec<u32>, width: usize| {
        let mut m = Matrix::zeros(gf2, rows.len(), width);
        for (r, bits) in rows.iter().enumerate() {
            for c in 0..width {
                m.set(r, c, FieldElement((bits >> c & 1) as u16));
            }
        }
        m
    };
    let mut equivariant = true;
    for a in &auts {
        let av = to_matrix(gens.iter().map(|&g| v_coord[proj[a.apply(g) as usize] as usize]).collect(), dim_v);
        let am = to_matrix(zb.iter().map(|&g| m_coord[a.apply(g) as usize]).collect(), dim_m);
        let lhs = exterior_matrix(&av)?.mul(&comm)?;
        let rhs = comm.mul(&am)?;
        equivariant &= lhs == rhs;
    }
    let rank = comm.rank();

    Ok(CentralAutReport {
        dim_v,
        dim_m,
        central_maps_checked: checked,
        all_central_maps_certified: certified,
        kernel_elementary_abelian: elementary,
        kernel_order,
        kernel_generated_order,
        kernel_order_expected: tuples,
        orbits_v,
        orbits_m,
        fusion_classes: fusion,
        commutator_map_equivariant: equivariant,
        commutator_map_rank: rank,
        w_dim: pairs - rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{
        build_a2, build_b2, build_generalized_quaternion, build_homocyclic, build_p_epsilon, A2Params, PepsParams,
    };
    use crate::groups::tests::q8;

    #[test]
    fn identity_images_give_identity() {
        let g = build_a2(A2Params::new(3, 1)).unwrap();
        let a = aut_from_images(&g, g.gens(), AutSource::Custom).unwrap();
        assert!(a.perm().is_identity());
    }

    #[test]
    fn order_obstruction_rejected() {
        let g = build_a2(A2Params::new(3, 1)).unwrap();
        let inv = g.elements().find(|&x| g.element_order(x) == 2).unwrap();
        let mut images = g.gens().to_vec();
        images[0] = inv;
        assert!(matches!(aut_from_images(&g, &images, AutSource::Custom), Err(Error::NotAHomomorphism(_))));
    }

    #[test]
    fn a2_known_generators() {
        let g = build_a2(A2Params::new(3, 1)).unwrap();
        let auts = known_aut_generators(&g).unwrap();
        assert_eq!(auts.iter().filter(|a| a.source() == AutSource::Central).count(), 9);
        let xi = auts.iter().find(|a| a.source() == AutSource::Xi).unwrap();
        assert_eq!(xi.order(), 7);
        let phi = auts.iter().find(|a| a.source() == AutSource::Frobenius).unwrap();
        assert_eq!(phi.order(), 3);
        assert_eq!(fusion_classes(&g, &auts).sorted_sizes(), vec![1, 7, 56]);
        assert_eq!(aut_group_order(&g, &auts), 10752);
        assert!(is_at_group(&g, &auts));
        assert!(is_fif_group(&g, &auts));
    }

    #[test]
    fn b2_known_generators() {
        let g = build_b2(2, None).unwrap();
        let auts = known_aut_generators(&g).unwrap();
        assert_eq!(auts.iter().filter(|a| a.source() == AutSource::Central).count(), 8);
        assert_eq!(fusion_classes(&g, &auts).sorted_sizes(), vec![1, 3, 60]);
        assert_eq!(aut_group_order(&g, &auts), 15360);
        // ξ acts as (a, b) ↦ (aλ, bλ^{q+1}).
        let f = FieldContext::new(4, None).unwrap();
        let lambda = f.root();
        let xi = auts.iter().find(|a| a.source() == AutSource::Xi).unwrap();
        for x in g.elements() {
            let (a, b) = unpack_pair(g.label(x));
            let want = pack_pair(f.mul(fe(a), lambda).bits(), f.mul(fe(b), f.pow(lambda, 5)).bits());
            assert_eq!(g.label(xi.apply(x)), want);
        }
    }

    #[test]
    fn p_epsilon_known_generators() {
        let g = build_p_epsilon(PepsParams::standard()).unwrap();
        let auts = known_aut_generators(&g).unwrap();
        assert_eq!(auts.iter().filter(|a| a.source() == AutSource::Central).count(), 18);
        assert_eq!(auts.iter().find(|a| a.source() == AutSource::Alpha).unwrap().order(), 21);
        assert_eq!(auts.iter().find(|a| a.source() == AutSource::Beta).unwrap().order(), 9);
        assert_eq!(fusion_classes(&g, &auts).sorted_sizes(), vec![1, 7, 504]);
        assert_eq!(aut_group_order(&g, &auts), 16_515_072);
    }

    #[test]
    fn semilinear_fallback_finds_alpha_and_beta() {
        let params = PepsParams::standard();
        let g = build_p_epsilon(params).unwrap();
        let found = peps_semilinear_search(&g, params.field).unwrap();
        let perms: Vec<Permutation> = found.iter().map(|a| a.perm().clone()).collect();
        let known = known_aut_generators(&g).unwrap();
        for a in known.iter().filter(|a| matches!(a.source(), AutSource::Alpha | AutSource::Beta)) {
            assert!(perms.contains(a.perm()));
        }
        // The semilinear automorphisms form the odd part 7:9 of order 63.
        assert_eq!(found.len(), 63);
    }

    #[test]
    fn brute_force_oracles() {
        let q = q8();
        assert_eq!(brute_force_aut(&q).unwrap().len(), 24);
        let z4 = build_homocyclic(2, 4).unwrap();
        let all = brute_force_aut(&z4).unwrap();
        assert_eq!(all.len(), 96);
        let part = fusion_classes(&z4, &all);
        let order4: Vec<ElemId> = z4.elements().filter(|&x| z4.element_order(x) == 4).collect();
        assert_eq!(order4.len(), 12);
        assert_eq!(part.classes.iter().find(|c| c.contains(&order4[0])).unwrap().len(), 12);
        assert!(is_at_group(&z4, &all));
        let p = build_p_epsilon(PepsParams::standard()).unwrap();
        assert!(matches!(brute_force_aut(&p), Err(Error::TooLargeForBruteForce { .. })));
    }

    #[test]
    fn brute_force_agrees_with_known_generators() {
        let g = build_a2(A2Params::new(3, 1)).unwrap();
        assert_eq!(brute_force_aut(&g).unwrap().len() as u128, aut_group_order(&g, &known_aut_generators(&g).unwrap()));
        let b1 = build_b2(1, None).unwrap();
        let known = known_aut_generators(&b1).unwrap();
        assert_eq!(brute_force_aut(&b1).unwrap().len() as u128, aut_group_order(&b1, &known));
    }

    #[test]
    fn quaternion16_classes() {
        let q16 = build_generalized_quaternion(16).unwrap();
        let all = brute_force_aut(&q16).unwrap();
        assert_eq!(all.len(), 32);
        // Elements of order 4 split into the cyclic ones and the rest.
        assert!(!is_at_group(&q16, &all));
        assert!(!is_fif_group(&q16, &all));
    }

    #[test]
    fn trivial_aut_set_gives_singletons() {
        let g = q8();
        let part = fusion_classes(&g, &[]);
        assert_eq!(part.classes.len(), 8);
        assert!(fusion_classes(&g, &[Automorphism::identity(&g)]).sizes.iter().all(|&s| s == 1));
    }

    #[test]
    fn composition_and_inverse_recertify() {
        let g = build_a2(A2Params::new(3, 1)).unwrap();
        let auts = known_aut_generators(&g).unwrap();
        for a in &auts {
            let inv = a.inverse(&g).unwrap();
            assert!(a.then(&inv, &g).unwrap().perm().is_identity());
            for b in auts.iter().step_by(3) {
                a.then(b, &g).unwrap();
            }
        }
    }

    #[test]
    fn central_automorphisms_on_the_families() {
        let a2 = verify_central_automorphisms(&build_a2(A2Params::new(3, 1)).unwrap()).unwrap();
        assert!(a2.passed(), "{a2:?}");
        assert_eq!(a2.kernel_order, 512);
        assert_eq!((a2.orbits_v, a2.orbits_m, a2.fusion_classes), (2, 2, 3));
        assert_eq!(a2.w_dim, 0);
        let b2 = verify_central_automorphisms(&build_b2(2, None).unwrap()).unwrap();
        assert!(b2.passed(), "{b2:?}");
        assert_eq!(b2.kernel_order, 256);
        let p = verify_central_automorphisms(&build_p_epsilon(PepsParams::standard()).unwrap()).unwrap();
        assert!(p.passed(), "{p:?}");
        assert_eq!(p.kernel_order, 1 << 18);
        assert_eq!(p.w_dim, 12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use std::sync::OnceLock;

        fn p_eps() -> &'static (FiniteGroup, Vec<Automorphism>) {
            static CELL: OnceLock<(FiniteGroup, Vec<Automorphism>)> = OnceLock::new();
            CELL.get_or_init(|| {
                let g = build_p_epsilon(PepsParams::standard()).unwrap();
                let auts = known_aut_generators(&g).unwrap();
                (g, auts)
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn random_words_are_order_preserving_automorphisms(word in proptest::collection::vec(any::<prop::sample::Index>(), 1..6)) {
                let (g, auts) = p_eps();
                let mut acc = Automorphism::identity(g);
                for i in word {
                    acc = acc.then(i.get(auts), g).unwrap();
                }
                // Recertify the composite from scratch.
                let map: Vec<ElemId> = g.elements().map(|x| acc.apply(x)).collect();
                let again = Automorphism::from_map(g, map, AutSource::Custom).unwrap();
                for x in g.elements() {
                    prop_assert_eq!(g.element_order(again.apply(x)), g.element_order(x));
                }
            }

            #[test]
            fn fusion_refines_order_classes(subset in proptest::collection::vec(any::<bool>(), 16)) {
                let (g, auts) = p_eps();
                let chosen: Vec<Automorphism> =
                    auts.iter().zip(subset.iter().cycle()).filter(|(_, &keep)| keep).map(|(a, _)| a.clone()).collect();
                let part = fusion_classes(g, &chosen);
                for class in &part.classes {
                    let o = g.element_order(class[0]);
                    prop_assert!(class.iter().all(|&x| g.element_order(x) == o));
                }
                prop_assert_eq!(is_at_group(g, &chosen), part.classes.len() == order_classes(g).len());
            }
        }
    }
}

