//! Modules for finitely generated groups over GF(2^f), given by one
//! invertible action matrix per generator (row vectors, `v ↦ v·A`).

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2n::{FieldContext, FieldElement};
use crate::linalg::{
    blowup, content_lines, exterior_matrix, kernel, parse_dim, parse_field_header, parse_row, tensor_matrix,
    vec_mat, write_field_header, write_rows, Matrix, Subspace, Vector,
};
use crate::permgrp::Permutation;

/// Largest GF(2)-dimension for exhaustive spinning and lattices.
pub const EXHAUSTIVE_BITS: usize = 16;
/// Largest GF(2)-dimension for orbit computations on vectors.
pub const ORBIT_BITS: usize = 24;
/// Hom-space combinations enumerated before giving up.
pub const ENUMERATION_LIMIT: u64 = 1 << 20;
const RANDOM_TRIALS: usize = 256;
const DEFAULT_SEED: u64 = 0x5eed;
const LATTICE_CAP: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GModule {
    field: FieldContext,
    dim: usize,
    gens: Vec<Matrix>,
    names: Vec<String>,
}

impl GModule {
    pub fn new(field: FieldContext, gens: Vec<Matrix>) -> Result<Self> {
        let names = (0..gens.len()).map(|i| format!("g{i}")).collect();
        Self::with_names(field, gens, names)
    }

    pub fn with_names(field: FieldContext, gens: Vec<Matrix>, names: Vec<String>) -> Result<Self> {
        if names.len() != gens.len() {
            return Err(Error::BadShape("one name per generator required".into()));
        }
        let dim = gens.first().map_or(0, |g| g.rows());
        for g in &gens {
            if g.field() != field {
                return Err(Error::FieldMismatch);
            }
            if g.rows() != dim || g.cols() != dim {
                return Err(Error::BadShape(format!("expected {dim}x{dim} action matrices")));
            }
            if !g.is_invertible() {
                return Err(Error::SingularMatrix);
            }
        }
        Ok(GModule { field, dim, gens, names })
    }

    /// `dim`-dimensional module on which every generator acts trivially.
    pub fn trivial(field: FieldContext, dim: usize, ngens: usize) -> Self {
        GModule {
            field,
            dim,
            gens: vec![Matrix::identity(field, dim); ngens],
            names: (0..ngens).map(|i| format!("g{i}")).collect(),
        }
    }

    pub fn field(&self) -> FieldContext {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gens(&self) -> &[Matrix] {
        &self.gens
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Dimension over GF(2).
    pub fn bit_dim(&self) -> usize {
        self.dim * self.field.degree() as usize
    }

    fn map_gens(&self, f: impl Fn(&Matrix) -> Result<Matrix>) -> Result<GModule> {
        let gens = self.gens.iter().map(f).collect::<Result<Vec<_>>>()?;
        let field = gens.first().map_or(self.field, |g| g.field());
        Ok(GModule { field, dim: gens.first().map_or(self.dim, |g| g.rows()), gens, names: self.names.clone() })
    }

    fn check_compatible(&self, other: &GModule) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.gens.len() != other.gens.len() {
            return Err(Error::BadShape("modules for different generator counts".into()));
        }
        Ok(())
    }

    /// Frobenius^k applied entrywise.
    pub fn twist(&self, k: i64) -> GModule {
        let f = self.field;
        self.map_gens(|g| Ok(g.map_entries(|x| f.frobenius(x, k)))).expect("entrywise map keeps shapes")
    }

    /// Inverse-transpose action.
    pub fn dual(&self) -> GModule {
        self.map_gens(|g| Ok(g.invert()?.transpose())).expect("action matrices are invertible")
    }

    /// The same action viewed over GF(2) (dimension multiplied by f).
    pub fn restrict_scalars(&self) -> GModule {
        let mut m = self.map_gens(|g| Ok(blowup(g))).expect("blowup keeps shapes");
        m.field = FieldContext::gf2();
        m.dim = self.bit_dim();
        m
    }

    /// Entries reinterpreted in a larger field; the source must be GF(2).
    pub fn extend_scalars(&self, field: FieldContext) -> Result<GModule> {
        if self.field.degree() != 1 {
            return Err(Error::Unsupported("extension of scalars starts from GF(2)".into()));
        }
        let mut m = self.map_gens(|g| g.with_field(field))?;
        m.field = field;
        Ok(m)
    }

    pub fn tensor(&self, other: &GModule) -> Result<GModule> {
        self.check_compatible(other)?;
        let gens =
            self.gens.iter().zip(&other.gens).map(|(a, b)| tensor_matrix(a, b)).collect::<Result<Vec<_>>>()?;
        Ok(GModule { field: self.field, dim: self.dim * other.dim, gens, names: self.names.clone() })
    }

    pub fn exterior_square(&self) -> GModule {
        let mut m = self.map_gens(exterior_matrix).expect("action matrices are square");
        m.dim = self.dim * self.dim.saturating_sub(1) / 2;
        m
    }

    /// Block-diagonal action on M ⊕ N.
    pub fn direct_sum(&self, other: &GModule) -> Result<GModule> {
        self.check_compatible(other)?;
        let d = self.dim + other.dim;
        let gens = self
            .gens
            .iter()
            .zip(&other.gens)
            .map(|(a, b)| {
                let mut m = Matrix::zeros(self.field, d, d);
                for r in 0..self.dim {
                    for c in 0..self.dim {
                        m.set(r, c, a.get(r, c));
                    }
                }
                for r in 0..other.dim {
                    for c in 0..other.dim {
                        m.set(self.dim + r, self.dim + c, b.get(r, c));
                    }
                }
                m
            })
            .collect();
        Ok(GModule { field: self.field, dim: d, gens, names: self.names.clone() })
    }

    pub fn act(&self, v: &[FieldElement], gen: usize) -> Vector {
        vec_mat(self.field, v, &self.gens[gen])
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.iter().all(Matrix::is_identity)
    }

    /// Smallest invariant subspace containing `vectors`.
    pub fn spin(&self, vectors: &[Vector]) -> Subspace {
        let mut span = Subspace::zero(self.field, self.dim);
        let mut queue: Vec<Vector> = Vec::new();
        for v in vectors {
            if !span.contains(v) {
                span = span.sum(&Subspace::span(self.field, self.dim, vec![v.clone()]));
                queue.push(v.clone());
            }
        }
        while let Some(v) = queue.pop() {
            for g in 0..self.gens.len() {
                let w = self.act(&v, g);
                if !span.contains(&w) {
                    span = span.sum(&Subspace::span(self.field, self.dim, vec![w.clone()]));
                    queue.push(w);
                }
            }
        }
        span
    }

    pub fn is_invariant(&self, w: &Subspace) -> bool {
        w.basis().iter().all(|v| (0..self.gens.len()).all(|g| w.contains(&self.act(v, g))))
    }

    /// Exhaustive when the space has at most 2¹⁶ vectors; above that,
    /// seeded random spins can only prove reducibility.
    pub fn is_irreducible(&self) -> Result<bool> {
        if self.dim <= 1 {
            return Ok(true);
        }
        if self.bit_dim() <= EXHAUSTIVE_BITS {
            let p = Packed::new(self);
            return Ok(p.projective_points().all(|v| p.spin(&[v]).dim() == self.dim));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
        for _ in 0..RANDOM_TRIALS {
            let v: Vector = (0..self.dim).map(|_| FieldElement(rng.gen_range(0..self.field.order()) as u16)).collect();
            if v.iter().any(|x| !x.is_zero()) && self.spin(&[v]).dim() < self.dim {
                return Ok(false);
            }
        }
        Err(Error::Unsupported(format!("irreducibility of a {}-bit module needs exhaustive search", self.bit_dim())))
    }

    /// Action on an invariant subspace, in its echelon basis.
    pub fn submodule(&self, w: &Subspace) -> Result<GModule> {
        if !self.is_invariant(w) {
            return Err(Error::NotInvariant);
        }
        let k = w.dim();
        let gens = self
            .gens
            .iter()
            .map(|g| {
                let rows: Vec<Vector> = w
                    .basis()
                    .iter()
                    .map(|b| w.coordinates(&vec_mat(self.field, b, g)).expect("subspace is invariant"))
                    .collect();
                if k == 0 {
                    Ok(Matrix::zeros(self.field, 0, 0))
                } else {
                    Matrix::from_rows(self.field, &rows)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GModule { field: self.field, dim: k, gens, names: self.names.clone() })
    }

    /// Induced action on M/W, using the unit vectors off W's pivot columns
    /// as a complement basis.
    pub fn quotient(&self, w: &Subspace) -> Result<GModule> {
        if !self.is_invariant(w) {
            return Err(Error::NotInvariant);
        }
        let free: Vec<usize> = (0..self.dim).filter(|c| !w.pivots().contains(c)).collect();
        let k = free.len();
        let gens = self
            .gens
            .iter()
            .map(|g| {
                let mut m = Matrix::zeros(self.field, k, k);
                for (r, &col) in free.iter().enumerate() {
                    let image = w.reduce(g.row(col));
                    for (c, &fc) in free.iter().enumerate() {
                        m.set(r, c, image[fc]);
                    }
                }
                m
            })
            .collect();
        Ok(GModule { field: self.field, dim: k, gens, names: self.names.clone() })
    }

    /// Every invariant subspace: cyclic spins of all projective points,
    /// closed under sums.
    pub fn submodule_lattice(&self) -> Result<SubmoduleLattice> {
        if self.bit_dim() > EXHAUSTIVE_BITS {
            return Err(Error::Unsupported(format!(
                "submodule lattice of a {}-bit module (limit {EXHAUSTIVE_BITS})",
                self.bit_dim()
            )));
        }
        let p = Packed::new(self);
        let cyclic: BTreeSet<PackedSpace> = p.projective_points().map(|v| p.spin(&[v])).collect();
        let cyclic: Vec<PackedSpace> = cyclic.into_iter().collect();
        let mut all: BTreeSet<PackedSpace> = cyclic.iter().cloned().collect();
        all.insert(PackedSpace::default());
        let mut queue: Vec<PackedSpace> = all.iter().cloned().collect();
        while let Some(s) = queue.pop() {
            for c in &cyclic {
                let t = p.sum(&s, c);
                if !all.contains(&t) {
                    if all.len() >= LATTICE_CAP {
                        return Err(Error::Unsupported("submodule lattice too large".into()));
                    }
                    all.insert(t.clone());
                    queue.push(t);
                }
            }
        }
        let mut members: Vec<Subspace> = all.iter().map(|s| p.to_subspace(s)).collect();
        members.sort();
        Ok(SubmoduleLattice { field: self.field, dim: self.dim, members })
    }

    /// Sizes of the orbits on nonzero vectors, sorted.
    pub fn orbit_sizes(&self) -> Result<Vec<usize>> {
        let perms = self.action_permutations()?;
        let mut sizes: Vec<usize> =
            crate::permgrp::orbits(perms.first().map_or(0, |p| p.degree()), &perms).iter().map(Vec::len).collect();
        if perms.is_empty() {
            sizes = vec![1; self.field.order().pow(self.dim as u32) - 1];
        }
        sizes.sort_unstable();
        Ok(sizes)
    }

    pub fn is_transitive_on_nonzero(&self) -> Result<bool> {
        Ok(self.orbit_sizes()?.len() <= 1)
    }

    /// Generators as permutations of the nonzero vectors; the point `i`
    /// stands for the packed vector `i + 1`.
    pub fn action_permutations(&self) -> Result<Vec<Permutation>> {
        if self.bit_dim() > ORBIT_BITS {
            return Err(Error::Unsupported(format!("{} vectors is too many to permute", self.bit_dim())));
        }
        let p = Packed::new(self);
        let n = (1u64 << self.bit_dim()) - 1;
        (0..self.gens.len())
            .map(|g| Permutation::new((1..=n).map(|v| (p.apply(g, v) - 1) as u32).collect()))
            .collect()
    }

    /// Packed index (as used by [`GModule::action_permutations`]) of a vector.
    pub fn pack(&self, v: &[FieldElement]) -> u64 {
        let f = self.field.degree() as usize;
        v.iter().enumerate().fold(0u64, |acc, (i, x)| acc | (x.0 as u64) << (i * f))
    }

    pub fn unpack(&self, v: u64) -> Vector {
        let f = self.field.degree() as usize;
        let mask = (1u64 << f) - 1;
        (0..self.dim).map(|i| FieldElement(((v >> (i * f)) & mask) as u16)).collect()
    }
}

// ---------------------------------------------------------------------------
// Packed vectors: coordinate i lives in bits [i·f, (i+1)·f).

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PackedSpace {
    /// Reduced echelon rows, ordered by pivot; each pivot coordinate is 1.
    rows: Vec<u64>,
}

impl PackedSpace {
    fn dim(&self) -> usize {
        self.rows.len()
    }
}

struct Packed {
    field: FieldContext,
    f: usize,
    dim: usize,
    q: usize,
    /// tables[g][i·q + c] = c · (row i of generator g).
    tables: Vec<Vec<u64>>,
}

impl Packed {
    fn new(m: &GModule) -> Self {
        let field = m.field;
        let f = field.degree() as usize;
        let q = field.order();
        let tables = m
            .gens
            .iter()
            .map(|g| {
                let mut t = vec![0u64; m.dim * q];
                for i in 0..m.dim {
                    for c in 1..q {
                        let row: Vector = g.row(i).iter().map(|&x| field.mul(FieldElement(c as u16), x)).collect();
                        t[i * q + c] = m.pack(&row);
                    }
                }
                t
            })
            .collect();
        Packed { field, f, dim: m.dim, q, tables }
    }

    #[inline]
    fn coord(&self, v: u64, i: usize) -> usize {
        ((v >> (i * self.f)) & ((1 << self.f) - 1)) as usize
    }

    #[inline]
    fn apply(&self, g: usize, v: u64) -> u64 {
        let t = &self.tables[g];
        let mut out = 0;
        for i in 0..self.dim {
            let c = self.coord(v, i);
            if c != 0 {
                out ^= t[i * self.q + c];
            }
        }
        out
    }

    fn scale(&self, v: u64, c: usize) -> u64 {
        if c == 1 {
            return v;
        }
        let mut out = 0;
        for i in 0..self.dim {
            let x = self.coord(v, i);
            if x != 0 {
                out |= (self.field.mul(FieldElement(x as u16), FieldElement(c as u16)).0 as u64) << (i * self.f);
            }
        }
        out
    }

    fn pivot(&self, v: u64) -> usize {
        v.trailing_zeros() as usize / self.f
    }

    fn reduce(&self, s: &PackedSpace, mut v: u64) -> u64 {
        for &r in &s.rows {
            let c = self.coord(v, self.pivot(r));
            if c != 0 {
                v ^= self.scale(r, c);
            }
        }
        v
    }

    fn insert(&self, s: &mut PackedSpace, v: u64) -> bool {
        let v = self.reduce(s, v);
        if v == 0 {
            return false;
        }
        let p = self.pivot(v);
        let c = self.coord(v, p);
        let inv = self.field.inv(FieldElement(c as u16)).expect("nonzero pivot").0 as usize;
        let v = self.scale(v, inv);
        for r in s.rows.iter_mut() {
            let c = self.coord(*r, p);
            if c != 0 {
                *r ^= self.scale(v, c);
            }
        }
        let at = s.rows.partition_point(|&r| self.pivot(r) < p);
        s.rows.insert(at, v);
        true
    }

    fn spin(&self, seeds: &[u64]) -> PackedSpace {
        let mut s = PackedSpace::default();
        let mut queue = Vec::new();
        for &v in seeds {
            if self.insert(&mut s, v) {
                queue.push(v);
            }
        }
        while let Some(v) = queue.pop() {
            for g in 0..self.tables.len() {
                let w = self.apply(g, v);
                if self.insert(&mut s, w) {
                    queue.push(w);
                }
            }
        }
        s
    }

    fn sum(&self, a: &PackedSpace, b: &PackedSpace) -> PackedSpace {
        let (big, small) = if a.rows.len() >= b.rows.len() { (a, b) } else { (b, a) };
        let mut s = big.clone();
        for &v in &small.rows {
            self.insert(&mut s, v);
        }
        s
    }

    /// Nonzero vectors whose first nonzero coordinate is 1.
    fn projective_points(&self) -> impl Iterator<Item = u64> + '_ {
        let total = 1u64 << (self.dim * self.f);
        (1..total).filter(move |&v| self.coord(v, self.pivot(v)) == 1)
    }

    fn to_subspace(&self, s: &PackedSpace) -> Subspace {
        let vectors = s
            .rows
            .iter()
            .map(|&r| (0..self.dim).map(|i| FieldElement(self.coord(r, i) as u16)).collect())
            .collect();
        Subspace::span(self.field, self.dim, vectors)
    }
}

/// All invariant subspaces of a module, sorted by (dimension, basis).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmoduleLattice {
    field: FieldContext,
    dim: usize,
    members: Vec<Subspace>,
}

impl SubmoduleLattice {
    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn of_dim(&self, d: usize) -> impl Iterator<Item = (usize, &Subspace)> {
        self.members.iter().enumerate().filter(move |(_, s)| s.dim() == d)
    }

    /// Indices of the members properly contained in member `i` that are
    /// maximal with that property.
    pub fn maximal_below(&self, i: usize) -> Vec<usize> {
        let top = &self.members[i];
        let below: Vec<usize> = (0..self.members.len())
            .filter(|&j| self.members[j].dim() < top.dim() && self.members[j].is_subspace_of(top))
            .collect();
        below
            .iter()
            .copied()
            .filter(|&j| {
                !below.iter().any(|&k| {
                    self.members[k].dim() > self.members[j].dim() && self.members[j].is_subspace_of(&self.members[k])
                })
            })
            .collect()
    }

    pub fn position(&self, s: &Subspace) -> Option<usize> {
        self.members.binary_search(s).ok()
    }

    /// Whether the member list is closed under sum and intersection.
    pub fn is_closed(&self) -> bool {
        self.members.iter().all(|a| {
            self.members
                .iter()
                .all(|b| self.position(&a.sum(b)).is_some() && self.position(&a.intersection(b)).is_some())
        })
    }

    pub fn field(&self) -> FieldContext {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }
}

/// Intertwiners X with A₁(g)·X = X·A₂(g) for every generator.
pub fn hom_space(m1: &GModule, m2: &GModule) -> Result<Vec<Matrix>> {
    m1.check_compatible(m2)?;
    let f = m1.field;
    let (d1, d2) = (m1.dim, m2.dim);
    let unknowns = d1 * d2;
    if unknowns == 0 {
        return Ok(Vec::new());
    }
    // Unknown (r, c) ↦ index r·d2 + c; one equation per entry per generator.
    let mut system = Matrix::zeros(f, d1 * d2 * m1.gens.len(), unknowns);
    let mut row = 0;
    for (a, b) in m1.gens.iter().zip(&m2.gens) {
        for r in 0..d1 {
            for c in 0..d2 {
                // (A X)_{rc} = Σ_k A_{rk} X_{kc};  (X B)_{rc} = Σ_k X_{rk} B_{kc}.
                for k in 0..d1 {
                    let idx = k * d2 + c;
                    let v = system.get(row, idx) + a.get(r, k);
                    system.set(row, idx, v);
                }
                for k in 0..d2 {
                    let idx = r * d2 + k;
                    let v = system.get(row, idx) + b.get(k, c);
                    system.set(row, idx, v);
                }
                row += 1;
            }
        }
    }
    let ker = kernel(&system);
    ker.basis()
        .iter()
        .map(|v| {
            let rows: Vec<Vector> = v.chunks(d2).map(|c| c.to_vec()).collect();
            Matrix::from_rows(f, &rows)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IsoVerdict {
    Isomorphic,
    NotIsomorphic,
    Unknown,
}

/// Decides M₁ ≅ M₂ from the hom space: Schur's lemma when M₁ is
/// irreducible, then seeded random combinations, then full enumeration when
/// the hom space has at most 2²⁰ elements. Anything else is `Unknown`.
pub fn isomorphism(m1: &GModule, m2: &GModule, seed: u64) -> Result<(IsoVerdict, Option<Matrix>)> {
    m1.check_compatible(m2)?;
    if m1.dim != m2.dim {
        return Ok((IsoVerdict::NotIsomorphic, None));
    }
    if m1.dim == 0 {
        return Ok((IsoVerdict::Isomorphic, Some(Matrix::zeros(m1.field, 0, 0))));
    }
    let basis = hom_space(m1, m2)?;
    if basis.is_empty() {
        return Ok((IsoVerdict::NotIsomorphic, None));
    }
    if let Some(x) = basis.iter().find(|x| x.is_invertible()) {
        return Ok((IsoVerdict::Isomorphic, Some(x.clone())));
    }
    if m1.bit_dim() <= EXHAUSTIVE_BITS && m1.is_irreducible()? {
        // Every nonzero map out of an irreducible module is injective.
        return Ok((IsoVerdict::Isomorphic, Some(basis[0].clone())));
    }
    let f = m1.field;
    let combine = |coeffs: &[FieldElement]| {
        let mut acc = Matrix::zeros(f, m1.dim, m2.dim);
        for (c, b) in coeffs.iter().zip(&basis) {
            if !c.is_zero() {
                acc = acc.add(&b.scale(*c)).expect("same shape");
            }
        }
        acc
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_TRIALS {
        let coeffs: Vec<FieldElement> =
            basis.iter().map(|_| FieldElement(rng.gen_range(0..f.order()) as u16)).collect();
        let x = combine(&coeffs);
        if x.is_invertible() {
            return Ok((IsoVerdict::Isomorphic, Some(x)));
        }
    }
    let total = (f.order() as u64).checked_pow(basis.len() as u32);
    if total.is_some_and(|t| t <= ENUMERATION_LIMIT) {
        let q = f.order() as u64;
        for idx in 1..total.unwrap() {
            let coeffs: Vec<FieldElement> =
                (0..basis.len()).map(|i| FieldElement(((idx / q.pow(i as u32)) % q) as u16)).collect();
            let x = combine(&coeffs);
            if x.is_invertible() {
                return Ok((IsoVerdict::Isomorphic, Some(x)));
            }
        }
        return Ok((IsoVerdict::NotIsomorphic, None));
    }
    Ok((IsoVerdict::Unknown, None))
}

pub fn is_isomorphic(m1: &GModule, m2: &GModule) -> Result<IsoVerdict> {
    Ok(isomorphism(m1, m2, DEFAULT_SEED)?.0)
}

/// For irreducible M over GF(2^f) and m | f: M ≅ M^{φ^{m·i}} for every i.
pub fn written_over_subfield(m: &GModule, sub: u32) -> Result<bool> {
    let f = m.field.degree();
    if sub == 0 || !f.is_multiple_of(sub) {
        return Err(Error::BadSubfield { n: f, m: sub });
    }
    if !m.is_irreducible()? {
        return Err(Error::Unsupported("the subfield criterion needs an irreducible module".into()));
    }
    for i in 1..f / sub {
        match is_isomorphic(m, &m.twist((sub * i) as i64))? {
            IsoVerdict::Isomorphic => {}
            IsoVerdict::NotIsomorphic => return Ok(false),
            IsoVerdict::Unknown => return Err(Error::Unknown),
        }
    }
    Ok(true)
}

/// Summands of Λ²(V) for V = U restricted to GF(2).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExteriorDecomposition {
    pub f: u32,
    pub dim_u: usize,
    pub exterior_dim: usize,
    pub a_dim: usize,
    pub a_iso: IsoVerdict,
    /// (j, dim B_j, verdict of the identification).
    pub b: Vec<(u32, usize, IsoVerdict)>,
    /// Summand dimensions add up and the summands span Λ²(V) directly.
    pub direct_sum: bool,
    /// For even f: restrict(U ⊗ U^{φ^{f/2}}) ≅ B_{f/2} ⊕ B_{f/2}.
    pub even_branch: Option<IsoVerdict>,
    #[serde(skip)]
    pub a_space: Option<Subspace>,
    #[serde(skip)]
    pub b_spaces: Vec<Subspace>,
}

impl ExteriorDecomposition {
    pub fn verdict(&self) -> IsoVerdict {
        let mut all = vec![self.a_iso];
        all.extend(self.b.iter().map(|b| b.2));
        all.extend(self.even_branch);
        if !self.direct_sum || all.contains(&IsoVerdict::NotIsomorphic) {
            IsoVerdict::NotIsomorphic
        } else if all.contains(&IsoVerdict::Unknown) {
            IsoVerdict::Unknown
        } else {
            IsoVerdict::Isomorphic
        }
    }
}

/// Locates A ≅ Λ²_E(U) restricted and the B_j in the lattice of Λ²(V),
/// filtering by dimension first and isomorphism second.
pub fn decompose_exterior_square(u: &GModule) -> Result<ExteriorDecomposition> {
    let f = u.field.degree();
    let d = u.dim;
    let v = u.restrict_scalars();
    let lam = v.exterior_square();
    let lattice = lam.submodule_lattice()?;

    let a_target = u.exterior_square().restrict_scalars();
    let (a_space, a_iso) = locate(&lam, &lattice, &a_target, &[])?;

    let mut b = Vec::new();
    let mut b_spaces = Vec::new();
    let mut even_branch = None;
    let mut taken: Vec<Subspace> = a_space.iter().cloned().collect();
    for j in 1..=f / 2 {
        let t = u.tensor(&u.twist(j as i64))?.restrict_scalars();
        if 2 * j < f {
            let (space, verdict) = locate(&lam, &lattice, &t, &taken)?;
            b.push((j, space.as_ref().map_or(0, Subspace::dim), verdict));
            taken.extend(space.iter().cloned());
            b_spaces.extend(space);
        } else {
            // B_{f/2} is half of restrict(U ⊗ U^{φ^{f/2}}).
            let want = d * d * f as usize / 2;
            let mut found: Option<(Subspace, IsoVerdict)> = None;
            for (_, s) in lattice.of_dim(want) {
                if !independent(&taken, s) {
                    continue;
                }
                let sub = lam.submodule(s)?;
                let verdict = is_isomorphic(&sub.direct_sum(&sub)?, &t)?;
                if verdict == IsoVerdict::Isomorphic {
                    found = Some((s.clone(), verdict));
                    break;
                }
                found.get_or_insert((s.clone(), verdict));
            }
            match found {
                Some((s, verdict)) => {
                    b.push((j, s.dim(), verdict));
                    even_branch = Some(verdict);
                    taken.push(s.clone());
                    b_spaces.push(s);
                }
                None => {
                    b.push((j, 0, IsoVerdict::NotIsomorphic));
                    even_branch = Some(IsoVerdict::NotIsomorphic);
                }
            }
        }
    }
    let total = taken.iter().fold(Subspace::zero(lam.field, lam.dim), |acc, s| acc.sum(s));
    let dims: usize = taken.iter().map(Subspace::dim).sum();
    let direct_sum = total.dim() == lam.dim && dims == lam.dim;
    Ok(ExteriorDecomposition {
        f,
        dim_u: d,
        exterior_dim: lam.dim,
        a_dim: a_space.as_ref().map_or(0, Subspace::dim),
        a_iso,
        b,
        direct_sum,
        even_branch,
        a_space,
        b_spaces,
    })
}

fn independent(taken: &[Subspace], s: &Subspace) -> bool {
    taken.iter().all(|t| t.intersection(s).dim() == 0)
}

/// First lattice member of the target's dimension, meeting `taken`
/// trivially, whose action is isomorphic to `target`.
fn locate(
    lam: &GModule,
    lattice: &SubmoduleLattice,
    target: &GModule,
    taken: &[Subspace],
) -> Result<(Option<Subspace>, IsoVerdict)> {
    let mut fallback = None;
    for (_, s) in lattice.of_dim(target.dim) {
        if !independent(taken, s) {
            continue;
        }
        match is_isomorphic(&lam.submodule(s)?, target)? {
            IsoVerdict::Isomorphic => return Ok((Some(s.clone()), IsoVerdict::Isomorphic)),
            IsoVerdict::Unknown => fallback = Some(s.clone()),
            IsoVerdict::NotIsomorphic => {}
        }
    }
    Ok(match fallback {
        Some(s) => (Some(s), IsoVerdict::Unknown),
        None => (None, IsoVerdict::NotIsomorphic),
    })
}

// ---------------------------------------------------------------------------
// Text format: a field header, then one block per generator.
//
//   field 2 poly=0x7
//   gen a
//   dim 2 2
//   <rows>

pub fn write_module(m: &GModule) -> String {
    let mut out = String::new();
    write_field_header(&mut out, m.field);
    for (name, g) in m.names.iter().zip(&m.gens) {
        let _ = writeln!(out, "gen {name}");
        let _ = writeln!(out, "dim {} {}", g.rows(), g.cols());
        write_rows(&mut out, g);
    }
    out
}

pub fn parse_module(text: &str) -> Result<GModule> {
    let mut lines = content_lines(text).peekable();
    let (_, header) = lines.next().ok_or_else(|| Error::BadFormat("empty module file".into()))?;
    let field = parse_field_header(header)?;
    let mut gens = Vec::new();
    let mut names = Vec::new();
    while let Some(&(no, line)) = lines.peek() {
        let Some(name) = line.strip_prefix("gen ") else { break };
        lines.next();
        let (_, dim) = lines.next().ok_or_else(|| Error::BadFormat(format!("line {no}: missing dim line")))?;
        let (r, c) = parse_dim(dim)?;
        let mut bits = Vec::with_capacity(r * c);
        for _ in 0..r {
            let (_, row) = lines.next().ok_or_else(|| Error::BadFormat(format!("gen {name}: missing rows")))?;
            bits.extend(parse_row(field, c, row)?);
        }
        gens.push(Matrix::from_bits(field, r, c, &bits).map_err(|e| Error::BadFormat(e.to_string()))?);
        names.push(name.trim().to_string());
    }
    if let Some((no, line)) = lines.next() {
        return Err(Error::BadFormat(format!("line {no}: unexpected {line:?}")));
    }
    GModule::with_names(field, gens, names).map_err(|e| Error::BadFormat(e.to_string()))
}
