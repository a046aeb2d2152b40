//! Builders for the concrete 2-groups: A₂(n,θ), B₂(n), P(ε), homocyclic and
//! generalized quaternion groups, plus the explicit P(ε) relation checker.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2n::{FieldContext, FieldElement, PEPS_POLY};
use crate::groups::{from_elements, pack_pair, unpack_pair, ElemId, Family, FiniteGroup, ORDER_CAP};
use crate::linalg::{solve_linear, Matrix};

/// A₂(n,θ) with θ: x ↦ x^{2^k}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct A2Params {
    pub n: u32,
    pub k: u32,
    pub poly: Option<u32>,
}

impl A2Params {
    pub fn new(n: u32, k: u32) -> Self {
        A2Params { n, k, poly: None }
    }

    /// |θ| = n / gcd(n, k).
    pub fn theta_order(&self) -> u32 {
        self.n.checked_div(gcd(self.n, self.k % self.n.max(1))).unwrap_or(1)
    }

    pub fn validate(&self) -> Result<FieldContext> {
        let field = FieldContext::new(self.n, self.poly)?;
        let order = self.theta_order();
        if order == 1 || order.is_multiple_of(2) {
            return Err(Error::BadTheta { order });
        }
        Ok(field)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[inline]
fn fe(x: u32) -> FieldElement {
    FieldElement(x as u16)
}

/// Product rule of A₂(n,θ) on packed labels.
pub fn a2_product(field: &FieldContext, k: u32, x: u64, y: u64) -> u64 {
    let (a, b) = unpack_pair(x);
    let (c, d) = unpack_pair(y);
    let t = field.mul(fe(a), field.frobenius(fe(c), k as i64));
    pack_pair(a ^ c, b ^ d ^ t.bits())
}

/// Group of the matrices M(a,b,θ) = [[1,a,b],[0,1,a^θ],[0,0,1]].
pub fn build_a2(params: A2Params) -> Result<FiniteGroup> {
    let field = params.validate()?;
    if 1usize << (2 * params.n) > ORDER_CAP {
        return Err(Error::GroupTooLarge { cap: ORDER_CAP });
    }
    let size = field.order() as u32;
    let labels: Vec<u64> = (0..size).flat_map(|a| (0..size).map(move |b| pack_pair(a, b))).collect();
    let gens: Vec<u64> = (0..params.n).map(|i| pack_pair(1 << i, 0)).collect();
    let k = params.k;
    from_elements(
        &format!("A2({},{})", params.n, params.k),
        Family::A2 { n: params.n, k, poly: field.poly() },
        0,
        labels,
        &gens,
        |x, y| a2_product(&field, k, x, y),
    )
}

/// Product rule of B₂(n) on packed labels over GF(q²), q = 2ⁿ.
pub fn b2_product(field: &FieldContext, n: u32, x: u64, y: u64) -> u64 {
    let (a, b) = unpack_pair(x);
    let (c, d) = unpack_pair(y);
    let t = field.mul(fe(a), field.frobenius(fe(c), n as i64));
    pack_pair(a ^ c, b ^ d ^ t.bits())
}

/// All b with b + b^q = a^{1+q}: one particular solution of the GF(2)-linear
/// system plus the kernel GF(q).
fn b2_fibre(field: &FieldContext, n: u32, a: FieldElement) -> Result<Vec<FieldElement>> {
    let dim = 2 * n as usize;
    let gf2 = FieldContext::gf2();
    // Column j holds the coordinates of L(t^j) = t^j + (t^j)^q.
    let mut lin = Matrix::zeros(gf2, dim, dim);
    for j in 0..dim {
        let basis = fe(1 << j);
        let image = field.add(basis, field.frobenius(basis, n as i64));
        for i in 0..dim {
            lin.set(i, j, FieldElement(((image.bits() >> i) & 1) as u16));
        }
    }
    let norm = field.mul(a, field.frobenius(a, n as i64));
    let rhs: Vec<FieldElement> = (0..dim).map(|i| FieldElement(((norm.bits() >> i) & 1) as u16)).collect();
    let sol = solve_linear(&lin, &rhs)?;
    let b0 = sol.iter().enumerate().fold(0u32, |acc, (i, v)| acc | (v.bits() << i));
    let kernel = field.subfield_elements(n)?;
    let mut out: Vec<FieldElement> = kernel.iter().map(|&z| fe(b0 ^ z.bits())).collect();
    out.sort();
    Ok(out)
}

/// Sylow 2-subgroup of SU₃(q): M(a,b) with b + b^q + a^{1+q} = 0.
pub fn build_b2(n: u32, poly: Option<u32>) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::BadParameter("B2 needs n >= 1".into()));
    }
    if 1usize << (3 * n) > ORDER_CAP {
        return Err(Error::GroupTooLarge { cap: ORDER_CAP });
    }
    let field = FieldContext::new(2 * n, poly)?;
    let mut labels = Vec::with_capacity(1 << (3 * n));
    let mut gens = Vec::new();
    for a in field.elements() {
        let fibre = b2_fibre(&field, n, a)?;
        if a.bits().is_power_of_two() {
            gens.push(pack_pair(a.bits(), fibre[0].bits()));
        }
        labels.extend(fibre.iter().map(|b| pack_pair(a.bits(), b.bits())));
    }
    gens.sort_unstable();
    from_elements(&format!("B2({n})"), Family::B2 { n, poly: field.poly() }, 0, labels, &gens, |x, y| {
        b2_product(&field, n, x, y)
    })
}

/// Whether a B₂ label satisfies b + b^q + a^{1+q} = 0.
pub fn b2_constraint_holds(field: &FieldContext, n: u32, label: u64) -> bool {
    let (a, b) = unpack_pair(label);
    let (a, b) = (fe(a), fe(b));
    let lhs = field.add(field.add(b, field.frobenius(b, n as i64)), field.mul(a, field.frobenius(a, n as i64)));
    lhs.is_zero()
}

/// P(ε) over GF(2⁶) with ε a multiplicative generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PepsParams {
    pub field: FieldContext,
    pub eps: FieldElement,
}

impl PepsParams {
    pub fn new(field: FieldContext, eps: FieldElement) -> Result<Self> {
        if field.degree() != 6 {
            return Err(Error::BadEpsilon(format!("field has degree {}, expected 6", field.degree())));
        }
        if !field.is_generator(eps) {
            return Err(Error::BadEpsilon(format!("{:#x} is not a generator of GF(64)^*", eps.bits())));
        }
        Ok(PepsParams { field, eps })
    }

    /// ε = root of x⁶+x⁴+x³+x+1.
    pub fn standard() -> Self {
        let field = FieldContext::new(6, Some(PEPS_POLY)).expect("0x5B is irreducible");
        PepsParams { field, eps: field.root() }
    }

    /// Tr: GF(64) → GF(8), t ↦ t + t⁸.
    pub fn trace(&self, t: FieldElement) -> FieldElement {
        self.field.add(t, self.field.frobenius(t, 3))
    }

    /// f_ε(a) = Tr(a³ε).
    pub fn f(&self, a: FieldElement) -> FieldElement {
        let f = &self.field;
        self.trace(f.mul(f.pow(a, 3), self.eps))
    }

    /// g_ε(a,b) = Tr((a+b)abε).
    pub fn g(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let f = &self.field;
        self.trace(f.mul(f.mul(f.add(a, b), f.mul(a, b)), self.eps))
    }

    /// The basis Z = (1, ε⁹, ε¹⁸) of GF(8).
    pub fn z_basis(&self) -> [FieldElement; 3] {
        [FieldElement::ONE, self.field.pow(self.eps, 9), self.field.pow(self.eps, 18)]
    }

    /// The basis X = (1, ε, …, ε⁵) of GF(64).
    pub fn x_basis(&self) -> Vec<FieldElement> {
        (0..6).map(|i| self.field.pow(self.eps, i)).collect()
    }

    /// Z-coordinates of f_ε(x_i) and g_ε(x_i, x_j) for i < j, as bitmasks.
    pub fn coefficient_table(&self) -> (Vec<u32>, Vec<u32>) {
        let z = self.z_basis();
        let x = self.x_basis();
        let coord = |v: FieldElement| self.field.coordinates(v, &z).expect("value lies in GF(8)");
        let squares = x.iter().map(|&a| coord(self.f(a))).collect();
        let mut comms = Vec::new();
        for i in 0..6 {
            for j in i + 1..6 {
                comms.push(coord(self.g(x[i], x[j])));
            }
        }
        (squares, comms)
    }
}

/// Product rule of P(ε) on packed labels.
pub fn p_epsilon_product(params: &PepsParams, x: u64, y: u64) -> u64 {
    let (a, u) = unpack_pair(x);
    let (b, w) = unpack_pair(y);
    let f = &params.field;
    let t = params.trace(f.mul(f.mul(fe(a), f.square(fe(b))), params.eps));
    pack_pair(a ^ b, u ^ w ^ t.bits())
}

pub fn build_p_epsilon(params: PepsParams) -> Result<FiniteGroup> {
    let params = PepsParams::new(params.field, params.eps)?;
    let sub = params.field.subfield_elements(3)?;
    let labels: Vec<u64> =
        params.field.elements().flat_map(|a| sub.iter().map(move |x| pack_pair(a.bits(), x.bits()))).collect();
    let gens: Vec<u64> = params.x_basis().iter().map(|a| pack_pair(a.bits(), 0)).collect();
    from_elements(
        "P(eps)",
        Family::PEps { poly: params.field.poly(), eps: params.eps.0 },
        0,
        labels,
        &gens,
        |x, y| p_epsilon_product(&params, x, y),
    )
}

/// Z_e^m; labels pack the coordinates in base e.
pub fn build_homocyclic(rank: u32, exponent: u32) -> Result<FiniteGroup> {
    if exponent < 2 {
        return Err(Error::BadParameter(format!("exponent {exponent} must be at least 2")));
    }
    let order = (exponent as usize).checked_pow(rank).filter(|&o| o <= ORDER_CAP);
    let order = order.ok_or(Error::GroupTooLarge { cap: ORDER_CAP })?;
    let e = exponent as u64;
    let mul = move |x: u64, y: u64| {
        let (mut x, mut y, mut out, mut place) = (x, y, 0u64, 1u64);
        for _ in 0..rank {
            out += ((x % e + y % e) % e) * place;
            x /= e;
            y /= e;
            place *= e;
        }
        out
    };
    let gens: Vec<u64> = (0..rank).map(|i| e.pow(i)).collect();
    let name = if rank == 1 { format!("Z{exponent}") } else { format!("Z{exponent}^{rank}") };
    from_elements(&name, Family::Homocyclic { rank, exponent }, 0, (0..order as u64).collect(), &gens, mul)
}

/// Q_{2^k} = ⟨x, y | x^{2^{k-1}} = 1, y² = x^{2^{k-2}}, y⁻¹xy = x⁻¹⟩; the
/// label (a, b) stands for x^a y^b.
pub fn build_generalized_quaternion(order: u32) -> Result<FiniteGroup> {
    if order < 8 || !order.is_power_of_two() {
        return Err(Error::BadParameter(format!("quaternion order {order} must be a power of 2, at least 8")));
    }
    if order as usize > ORDER_CAP {
        return Err(Error::GroupTooLarge { cap: ORDER_CAP });
    }
    let m = order / 2;
    let h = order / 4;
    let mul = move |x: u64, y: u64| {
        let (a, b) = unpack_pair(x);
        let (c, d) = unpack_pair(y);
        let mut e = if b == 0 { a + c } else { a + m - c };
        if b == 1 && d == 1 {
            e += h;
        }
        pack_pair(e % m, b ^ d)
    };
    let labels: Vec<u64> = (0..m).flat_map(|a| [pack_pair(a, 0), pack_pair(a, 1)]).collect();
    let gens = [pack_pair(1, 0), pack_pair(0, 1)];
    from_elements(&format!("Q{order}"), Family::Quaternion { order }, 0, labels, &gens, mul)
}

/// One evaluated relation of the explicit P(ε) presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub relation: String,
    pub expected: String,
    pub computed: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationReport {
    pub relations: Vec<RelationCheck>,
}

impl PresentationReport {
    pub fn all_hold(&self) -> bool {
        self.relations.iter().all(|r| r.holds)
    }

    pub fn first_mismatch(&self) -> Option<&RelationCheck> {
        self.relations.iter().find(|r| !r.holds)
    }
}

/// Published squares x_i² as Z-masks (bit j ↔ z_{j+1}).
pub const PEPS_SQUARES: [u32; 6] = [0b010, 0b110, 0b010, 0b100, 0b111, 0b100];

/// Published commutators [x_i, x_j] (1-based i < j) as Z-masks.
pub const PEPS_COMMUTATORS: [(usize, usize, u32); 15] = [
    (1, 2, 0b011),
    (1, 3, 0b101),
    (1, 4, 0b100),
    (1, 5, 0b010),
    (1, 6, 0b000),
    (2, 3, 0b001),
    (2, 4, 0b001),
    (2, 5, 0b110),
    (2, 6, 0b111),
    (3, 4, 0b010),
    (3, 5, 0b011),
    (3, 6, 0b011),
    (4, 5, 0b110),
    (4, 6, 0b001),
    (5, 6, 0b010),
];

fn z_word(mask: u32) -> String {
    let s: String = (0..3).filter(|j| mask >> j & 1 == 1).map(|j| format!("z{}", j + 1)).collect();
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

/// Evaluates every relation of the explicit presentation inside the
/// constructed group, with x_i = (ε^{i−1}, 0) and z_j = (0, Z_j).
pub fn check_p_epsilon_presentation(params: PepsParams) -> Result<PresentationReport> {
    let params = PepsParams::new(params.field, params.eps)?;
    if params.field.minimal_polynomial(params.eps) != PEPS_POLY {
        return Err(Error::BadEpsilon("minimal polynomial of epsilon is not x^6+x^4+x^3+x+1".into()));
    }
    let group = build_p_epsilon(params)?;
    let id = |label: u64| group.id_of(label).expect("label is a group element");
    let xs: Vec<ElemId> = params.x_basis().iter().map(|a| id(pack_pair(a.bits(), 0))).collect();
    let zb = params.z_basis();
    let zs: Vec<ElemId> = zb.iter().map(|z| id(pack_pair(0, z.bits()))).collect();
    let z_elem = |mask: u32| {
        (0..3).filter(|j| mask >> j & 1 == 1).fold(0 as ElemId, |acc, j| group.mul(acc, zs[j as usize]))
    };
    // Name an element of Z by its coordinates, anything else by its label.
    let describe = |x: ElemId| {
        let (a, u) = unpack_pair(group.label(x));
        match params.field.coordinates(fe(u), &zb) {
            Some(m) if a == 0 => z_word(m),
            _ => format!("({a:#x},{u:#x})"),
        }
    };
    let mut relations = Vec::new();
    let mut push = |relation: String, expected: ElemId, computed: ElemId| {
        relations.push(RelationCheck {
            relation,
            expected: describe(expected),
            computed: describe(computed),
            holds: expected == computed,
        });
    };
    for (j, &z) in zs.iter().enumerate() {
        push(format!("z{}^2", j + 1), 0, group.mul(z, z));
        for (i, &x) in xs.iter().enumerate() {
            push(format!("[x{},z{}]", i + 1, j + 1), 0, group.commutator(x, z));
        }
        for (l, &w) in zs.iter().enumerate().skip(j + 1) {
            push(format!("[z{},z{}]", j + 1, l + 1), 0, group.commutator(z, w));
        }
    }
    for (i, &mask) in PEPS_SQUARES.iter().enumerate() {
        push(format!("x{}^2", i + 1), z_elem(mask), group.mul(xs[i], xs[i]));
    }
    for &(i, j, mask) in &PEPS_COMMUTATORS {
        push(format!("[x{i},x{j}]"), z_elem(mask), group.commutator(xs[i - 1], xs[j - 1]));
    }
    Ok(PresentationReport { relations })
}

/// Label map (a, x) ↦ (ε^k a, x), an isomorphism P(ε^{3k+1}) → P(ε).
pub fn p_epsilon_scaling_map(params: &PepsParams, k: u64) -> impl Fn(u64) -> u64 + '_ {
    let s = params.field.pow(params.eps, k);
    move |label| {
        let (a, x) = unpack_pair(label);
        pack_pair(params.field.mul(s, fe(a)).bits(), x)
    }
}

/// Label map (a, x) ↦ (a², x²), an isomorphism P(ε) → P(ε²).
pub fn p_epsilon_frobenius_map(params: &PepsParams) -> impl Fn(u64) -> u64 + '_ {
    move |label| {
        let (a, x) = unpack_pair(label);
        pack_pair(params.field.square(fe(a)).bits(), params.field.square(fe(x)).bits())
    }
}

/// Checks that a label map is an isomorphism `source → target` on ids.
pub fn label_map_is_isomorphism(source: &FiniteGroup, target: &FiniteGroup, map: impl Fn(u64) -> u64) -> bool {
    if source.order() != target.order() {
        return false;
    }
    let mut image = Vec::with_capacity(source.order());
    let mut hit = vec![false; target.order()];
    for x in source.elements() {
        let Some(y) = target.id_of(map(source.label(x))) else { return false };
        if std::mem::replace(&mut hit[y as usize], true) {
            return false;
        }
        image.push(y);
    }
    source.elements().all(|x| {
        source.elements().all(|y| image[source.mul(x, y) as usize] == target.mul(image[x as usize], image[y as usize]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;

    fn involutions_are_central(g: &FiniteGroup) -> bool {
        let z = g.center();
        g.elements().filter(|&x| g.element_order(x) == 2).all(|x| z.contains(x))
    }

    #[test]
    fn a2_examples() {
        let g = build_a2(A2Params::new(3, 1)).unwrap();
        assert_eq!(g.order(), 64);
        assert_eq!(g.involution_count(), 7);
        let z = g.center();
        assert_eq!(z.order(), 8);
        assert!(z.members().iter().all(|&x| unpack_pair(g.label(x)).0 == 0));
        assert_eq!(build_a2(A2Params::new(3, 0)).unwrap_err(), Error::BadTheta { order: 1 });
        assert_eq!(build_a2(A2Params::new(4, 2)).unwrap_err(), Error::BadTheta { order: 2 });
        assert_eq!(build_a2(A2Params::new(5, 2)).unwrap().order(), 1024);
    }

    #[test]
    fn b2_examples() {
        let q8 = build_generalized_quaternion(8).unwrap();
        let b1 = build_b2(1, None).unwrap();
        assert_eq!(b1.order(), 8);
        assert!(b1.find_isomorphism(&q8).is_some());
        let b2 = build_b2(2, None).unwrap();
        assert_eq!(b2.order(), 64);
        assert_eq!(b2.center().order(), 4);
        assert_eq!(b2.involution_count(), 3);
        let field = FieldContext::new(4, None).unwrap();
        assert!(b2.labels().iter().all(|&l| b2_constraint_holds(&field, 2, l)));
    }

    #[test]
    fn p_epsilon_examples() {
        let params = PepsParams::standard();
        let g = build_p_epsilon(params).unwrap();
        assert_eq!(g.order(), 512);
        assert_eq!(g.involution_count(), 7);
        assert!(involutions_are_central(&g));
        for a in params.field.elements().filter(|a| !a.is_zero()) {
            assert!(!params.f(a).is_zero());
        }
        for x in g.elements() {
            let (a, _) = unpack_pair(g.label(x));
            assert_eq!(g.label(g.mul(x, x)), pack_pair(0, params.f(fe(a)).bits()));
            for y in g.elements().step_by(7) {
                let (b, _) = unpack_pair(g.label(y));
                assert_eq!(g.label(g.commutator(x, y)), pack_pair(0, params.g(fe(a), fe(b)).bits()));
            }
        }
        let non_gen = params.field.pow(params.eps, 3);
        assert!(matches!(PepsParams::new(params.field, non_gen), Err(Error::BadEpsilon(_))));
    }

    #[test]
    fn small_families() {
        let z4 = build_homocyclic(2, 4).unwrap();
        assert_eq!(z4.order(), 16);
        assert!(z4.is_abelian());
        assert_eq!(z4.exponent(), 4);
        let z2 = build_homocyclic(1, 2).unwrap();
        assert_eq!(z2.order(), 2);
        assert_eq!(build_homocyclic(13, 2).unwrap_err(), Error::GroupTooLarge { cap: ORDER_CAP });
        let q16 = build_generalized_quaternion(16).unwrap();
        assert_eq!(q16.involution_count(), 1);
        assert_eq!(q16.exponent(), 8);
        assert!(build_generalized_quaternion(8192).is_err());
        assert!(build_generalized_quaternion(12).is_err());
    }

    #[test]
    fn three_families_are_special_of_exponent_four() {
        let groups = [
            build_a2(A2Params::new(3, 1)).unwrap(),
            build_b2(2, None).unwrap(),
            build_p_epsilon(PepsParams::standard()).unwrap(),
        ];
        let z_sizes = [8usize, 4, 8];
        let powers = [2u32, 3, 3];
        for ((g, zs), pw) in groups.iter().zip(z_sizes).zip(powers) {
            assert!(g.is_special_2group(), "{}", g.name());
            assert_eq!(g.exponent(), 4);
            assert_eq!(g.center().order(), zs);
            assert_eq!(g.order(), zs.pow(pw));
            assert_eq!(g.involution_count(), zs - 1);
            assert!(involutions_are_central(g));
            assert!(g.squares_constant_on_central_cosets().unwrap());
        }
    }

    #[test]
    fn presentation_matches_published_list() {
        let report = check_p_epsilon_presentation(PepsParams::standard()).unwrap();
        assert_eq!(report.relations.len(), 3 + 18 + 3 + 6 + 15);
        assert!(report.all_hold(), "{:?}", report.first_mismatch());
        let x1 = report.relations.iter().find(|r| r.relation == "x1^2").unwrap();
        assert_eq!(x1.computed, "z2");
        // The published table agrees with the coefficient table directly.
        let (squares, comms) = PepsParams::standard().coefficient_table();
        assert_eq!(squares, PEPS_SQUARES.to_vec());
        assert_eq!(comms, PEPS_COMMUTATORS.iter().map(|c| c.2).collect::<Vec<_>>());
    }

    #[test]
    fn presentation_needs_the_right_minimal_polynomial() {
        let field = FieldContext::new(6, None).unwrap();
        let params = PepsParams::new(field, field.root()).unwrap();
        assert!(matches!(check_p_epsilon_presentation(params), Err(Error::BadEpsilon(_))));
    }

    #[test]
    fn p_epsilon_isomorphisms() {
        let base = PepsParams::standard();
        let field = base.field;
        let target = build_p_epsilon(base).unwrap();
        // ε⁴ = ε^{3·1+1} is a generator of GF(64)^*.
        let src_params = PepsParams::new(field, field.pow(base.eps, 4)).unwrap();
        let src = build_p_epsilon(src_params).unwrap();
        assert!(label_map_is_isomorphism(&src, &target, p_epsilon_scaling_map(&base, 1)));
        let sq = build_p_epsilon(PepsParams::new(field, field.square(base.eps)).unwrap()).unwrap();
        assert!(label_map_is_isomorphism(&target, &sq, p_epsilon_frobenius_map(&base)));
        // ε and ε² share a minimal polynomial, so the coefficient tables agree
        // (with the basis computed from each).
        let sq_params = PepsParams::new(field, field.square(base.eps)).unwrap();
        assert_eq!(base.coefficient_table(), sq_params.coefficient_table());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix(field: FieldContext, a: FieldElement, b: FieldElement, c: FieldElement) -> Matrix {
            let mut m = Matrix::identity(field, 3);
            m.set(0, 1, a);
            m.set(0, 2, b);
            m.set(1, 2, c);
            m
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]
            #[test]
            fn a2_product_is_matrix_product(a in 0u32..32, b in 0u32..32, c in 0u32..32, d in 0u32..32, k in 1u32..5) {
                let f = FieldContext::new(5, None).unwrap();
                let th = |x: u32| f.frobenius(fe(x), k as i64);
                let m = matrix(f, fe(a), fe(b), th(a)).mul(&matrix(f, fe(c), fe(d), th(c))).unwrap();
                let (e, g) = unpack_pair(a2_product(&f, k, pack_pair(a, b), pack_pair(c, d)));
                prop_assert_eq!(m, matrix(f, fe(e), fe(g), th(e)));
            }

            #[test]
            fn b2_product_preserves_constraint(i in 0usize..64, j in 0usize..64) {
                let f = FieldContext::new(4, None).unwrap();
                let g = build_b2(2, None).unwrap();
                let (x, y) = (g.labels()[i], g.labels()[j]);
                let p = b2_product(&f, 2, x, y);
                prop_assert!(b2_constraint_holds(&f, 2, p));
                let (a, b) = unpack_pair(x);
                let (c, d) = unpack_pair(y);
                let q = |v: u32| f.frobenius(fe(v), 2);
                let m = matrix(f, fe(a), fe(b), q(a)).mul(&matrix(f, fe(c), fe(d), q(c))).unwrap();
                let (e, h) = unpack_pair(p);
                prop_assert_eq!(m, matrix(f, fe(e), fe(h), q(e)));
            }
        }
    }
}
