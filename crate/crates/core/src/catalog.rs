//! Transitive linear groups over GF(2): ΓL₁(2ⁿ), SL_m(2^f), Sp₄(2^f)
//! built from generators, and the exceptional small cases loaded from data
//! files (with a seeded discovery procedure that regenerates them).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2n::{FieldContext, FieldElement};
use crate::linalg::{blowup, multiplication_matrix, Matrix};
use crate::permgrp::{is_solvable, is_transitive, perfect_residual, random_subgroup_search, Permutation, StabChain};
use crate::repmod::{parse_module, write_module, GModule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub order: u128,
    pub transitive: bool,
    pub solvable: bool,
    /// Order of the last term of the derived series. Pins down groups that
    /// share an order with a non-isomorphic transitive group.
    #[serde(default)]
    pub perfect: Option<u128>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    /// GF(2)-dimension.
    pub n: usize,
    pub generators: Vec<Matrix>,
    pub expected: Expected,
    /// Which case of the classification: "i", "ii" or "iii".
    pub class: String,
    /// Discovery seed for data-file entries.
    pub seed: Option<u64>,
}

impl CatalogEntry {
    pub fn module(&self) -> Result<GModule> {
        GModule::new(FieldContext::gf2(), self.generators.clone())
    }
}

/// SL_m over the given field: transvections I + c·E₀₁ for c running over
/// the basis (1, t, …), plus the cyclic permutation matrix.
pub fn sl_generators(m: usize, field: FieldContext) -> Vec<Matrix> {
    let mut out = Vec::new();
    let mut c = FieldElement::ONE;
    for _ in 0..field.degree() {
        let mut t = Matrix::identity(field, m);
        t.set(0, 1, c);
        out.push(t);
        c = field.mul(c, field.root());
    }
    let mut p = Matrix::zeros(field, m, m);
    for i in 0..m {
        p.set(i, (i + 1) % m, FieldElement::ONE);
    }
    out.push(p);
    out
}

pub fn natural_sl_module(m: usize, field: FieldContext) -> Result<GModule> {
    GModule::new(field, sl_generators(m, field))
}

/// The alternating form with ones on the antidiagonal.
pub fn antidiagonal_form(field: FieldContext, d: usize) -> Matrix {
    let mut j = Matrix::zeros(field, d, d);
    for i in 0..d {
        j.set(i, d - 1 - i, FieldElement::ONE);
    }
    j
}

/// x ↦ x + c·B(x, v)·v with B(x, y) = x·J·yᵀ.
pub fn symplectic_transvection(field: FieldContext, v: &[FieldElement], c: FieldElement) -> Matrix {
    let d = v.len();
    let mut t = Matrix::identity(field, d);
    for i in 0..d {
        // B(e_i, v) = v_{d-1-i} for the antidiagonal form.
        let b = field.mul(c, v[d - 1 - i]);
        if b.is_zero() {
            continue;
        }
        for (k, &vk) in v.iter().enumerate() {
            let x = t.get(i, k) + field.mul(b, vk);
            t.set(i, k, x);
        }
    }
    t
}

/// Sp_d for the antidiagonal form: transvections along the unit vectors and
/// the sums of neighbouring unit vectors, scaled by the field basis.
pub fn sp_generators(d: usize, field: FieldContext) -> Vec<Matrix> {
    let mut vs: Vec<Vec<FieldElement>> = Vec::new();
    for i in 0..d {
        let mut v = vec![FieldElement::ZERO; d];
        v[i] = FieldElement::ONE;
        vs.push(v);
    }
    for i in 0..d - 1 {
        let mut v = vec![FieldElement::ZERO; d];
        v[i] = FieldElement::ONE;
        v[i + 1] = FieldElement::ONE;
        vs.push(v);
    }
    let mut out = Vec::new();
    for v in &vs {
        let mut c = FieldElement::ONE;
        for _ in 0..field.degree() {
            out.push(symplectic_transvection(field, v, c));
            c = field.mul(c, field.root());
        }
    }
    out
}

/// g·J·gᵀ = J for every generator.
pub fn check_symplectic(gens: &[Matrix], form: &Matrix) -> Result<()> {
    for (i, g) in gens.iter().enumerate() {
        if g.mul(form)?.mul(&g.transpose())? != *form {
            return Err(Error::NotSymplectic(i));
        }
    }
    Ok(())
}

/// |SL_m(q)| = q^{m(m−1)/2} ∏_{i=2}^{m} (q^i − 1).
pub fn sl_order(m: u32, q: u128) -> u128 {
    q.pow(m * (m - 1) / 2) * (2..=m).map(|i| q.pow(i) - 1).product::<u128>()
}

/// |Sp_{2m}(q)| = q^{m²} ∏_{i=1}^{m} (q^{2i} − 1).
pub fn sp_order(m: u32, q: u128) -> u128 {
    q.pow(m * m) * (1..=m).map(|i| q.pow(2 * i) - 1).product::<u128>()
}

/// ΓL₁(2ⁿ) inside GL_n(2): multiplication by a primitive element and the
/// Frobenius map.
pub fn entry_gamma_l1(n: u32) -> Result<CatalogEntry> {
    if !(2..=10).contains(&n) {
        return Err(Error::BadParameter(format!("GammaL1 entries cover 2 <= n <= 10, got {n}")));
    }
    let field = FieldContext::new(n, None)?;
    let gf2 = FieldContext::gf2();
    let mult = multiplication_matrix(field, field.primitive_element());
    let mut frob = Matrix::zeros(gf2, n as usize, n as usize);
    for i in 0..n as usize {
        let sq = field.square(FieldElement(1 << i));
        for c in 0..n as usize {
            frob.set(i, c, FieldElement(((sq.bits() >> c) & 1) as u16));
        }
    }
    Ok(CatalogEntry {
        name: format!("GammaL1(2^{n})"),
        n: n as usize,
        generators: vec![mult, frob],
        expected: Expected { order: n as u128 * ((1u128 << n) - 1), transitive: true, solvable: true, perfect: None },
        class: "i".into(),
        seed: None,
    })
}

/// SL_m(2^f) blown up to GL_{mf}(2).
pub fn entry_sl(m: usize, f: u32) -> Result<CatalogEntry> {
    if m < 2 || m * f as usize > 10 {
        return Err(Error::BadParameter(format!("SL entries need m >= 2 and m*f <= 10, got m={m}, f={f}")));
    }
    let field = FieldContext::new(f, None)?;
    let q = 1u128 << f;
    Ok(CatalogEntry {
        name: format!("SL{m}({q})"),
        n: m * f as usize,
        generators: sl_generators(m, field).iter().map(blowup).collect(),
        expected: Expected { order: sl_order(m as u32, q), transitive: true, solvable: m == 2 && q == 2, perfect: None },
        class: "iii".into(),
        seed: None,
    })
}

/// Sp₄(2^f) blown up to GL_{4f}(2); the form is checked before blowup.
pub fn entry_sp4(f: u32) -> Result<CatalogEntry> {
    if f == 0 || 4 * f > 12 {
        return Err(Error::BadParameter(format!("Sp4 entries need 1 <= f <= 3, got {f}")));
    }
    let field = FieldContext::new(f, None)?;
    let gens = sp_generators(4, field);
    check_symplectic(&gens, &antidiagonal_form(field, 4))?;
    let q = 1u128 << f;
    Ok(CatalogEntry {
        name: format!("Sp4({q})"),
        n: 4 * f as usize,
        generators: gens.iter().map(blowup).collect(),
        expected: Expected { order: sp_order(2, q), transitive: true, solvable: false, perfect: None },
        class: "iii".into(),
        seed: None,
    })
}

/// Computed properties of an entry next to its expectations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryReport {
    pub name: String,
    pub n: usize,
    pub expected: Expected,
    pub order: u128,
    pub transitive: bool,
    pub solvable: bool,
    pub perfect: u128,
    pub verified: bool,
}

/// Order by stabilizer chain on the nonzero vectors, transitivity and
/// solvability by derived series.
pub fn verify_entry(entry: &CatalogEntry) -> Result<EntryReport> {
    let perms = entry.module()?.action_permutations()?;
    let degree = (1usize << entry.n) - 1;
    let order = StabChain::new(degree, &perms).order();
    let transitive = is_transitive(degree, &perms);
    let solvable = is_solvable(degree, &perms);
    let perfect = perfect_residual(degree, &perms).order();
    let e = entry.expected;
    Ok(EntryReport {
        name: entry.name.clone(),
        n: entry.n,
        expected: e,
        order,
        transitive,
        solvable,
        perfect,
        verified: order == e.order
            && transitive == e.transitive
            && solvable == e.solvable
            && e.perfect.is_none_or(|p| p == perfect),
    })
}

/// Writes the metadata lines followed by the generator blocks.
pub fn write_entry(entry: &CatalogEntry) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "name {}", entry.name);
    let _ = writeln!(out, "class {}", entry.class);
    if let Some(seed) = entry.seed {
        let _ = writeln!(out, "seed {seed}");
    }
    let e = entry.expected;
    let _ = write!(out, "expect order={} transitive={} solvable={}", e.order, e.transitive as u8, e.solvable as u8);
    if let Some(p) = e.perfect {
        let _ = write!(out, " perfect={p}");
    }
    out.push('\n');
    out.push_str(&write_module(&entry.module()?));
    Ok(out)
}

fn parse_flag(v: &str) -> Result<bool> {
    match v {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(Error::BadFormat(format!("expected 0 or 1, got {v:?}"))),
    }
}

pub fn parse_entry(text: &str) -> Result<CatalogEntry> {
    let (mut name, mut class, mut seed, mut expected) = (None, String::from("ii"), None, None);
    let mut body = String::new();
    let mut in_body = false;
    for line in text.lines() {
        let t = line.trim();
        if !in_body && t.starts_with("field") {
            in_body = true;
        }
        if in_body {
            body.push_str(line);
            body.push('\n');
            continue;
        }
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (key, rest) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
        let rest = rest.trim();
        match key {
            "name" => name = Some(rest.to_string()),
            "class" => class = rest.to_string(),
            "seed" => seed = Some(rest.parse().map_err(|_| Error::BadFormat(format!("bad seed {rest:?}")))?),
            "expect" => {
                let (mut order, mut transitive, mut solvable, mut perfect) = (None, None, None, None);
                for kv in rest.split_whitespace() {
                    let (k, v) = kv.split_once('=').ok_or_else(|| Error::BadFormat(format!("bad field {kv:?}")))?;
                    match k {
                        "order" => order = Some(v.parse().map_err(|_| Error::BadFormat(format!("bad order {v:?}")))?),
                        "transitive" => transitive = Some(parse_flag(v)?),
                        "solvable" => solvable = Some(parse_flag(v)?),
                        "perfect" => {
                            perfect = Some(v.parse().map_err(|_| Error::BadFormat(format!("bad perfect order {v:?}")))?)
                        }
                        _ => return Err(Error::BadFormat(format!("unknown expectation {k:?}"))),
                    }
                }
                match (order, transitive, solvable) {
                    (Some(order), Some(transitive), Some(solvable)) => {
                        expected = Some(Expected { order, transitive, solvable, perfect })
                    }
                    _ => return Err(Error::BadFormat("expect line needs order, transitive and solvable".into())),
                }
            }
            _ => return Err(Error::BadFormat(format!("unknown key {key:?}"))),
        }
    }
    let module = parse_module(&body)?;
    if module.field().degree() != 1 {
        return Err(Error::BadFormat("catalog generators live over GF(2)".into()));
    }
    Ok(CatalogEntry {
        name: name.ok_or_else(|| Error::BadFormat("missing name line".into()))?,
        n: module.dim(),
        generators: module.gens().to_vec(),
        expected: expected.ok_or_else(|| Error::BadFormat("missing expect line".into()))?,
        class,
        seed,
    })
}

pub fn load_entry(path: &Path) -> Result<CatalogEntry> {
    parse_entry(&std::fs::read_to_string(path)?)
}

pub fn save_entry(entry: &CatalogEntry, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, write_entry(entry)?)?;
    Ok(())
}

/// A sporadic transitive linear group to be found by random search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SporadicTarget {
    pub name: &'static str,
    pub file: &'static str,
    pub n: usize,
    pub order: u128,
    /// Order of the perfect residual (the simple or quasisimple core).
    pub perfect: u128,
    /// Seed that finds the target with the default budget.
    pub seed: u64,
}

pub const SPORADIC: [SporadicTarget; 5] = [
    SporadicTarget { name: "A6", file: "a6.txt", n: 4, order: 360, perfect: 360, seed: 1 },
    SporadicTarget { name: "Sp4(2)", file: "sp4_2.txt", n: 4, order: 720, perfect: 360, seed: 1 },
    SporadicTarget { name: "A7", file: "a7.txt", n: 4, order: 2520, perfect: 2520, seed: 1 },
    SporadicTarget { name: "PSU3(3)", file: "psu3_3.txt", n: 6, order: 6048, perfect: 6048, seed: 1 },
    SporadicTarget { name: "G2(2)", file: "g2_2.txt", n: 6, order: 12096, perfect: 6048, seed: 1 },
];

pub const DEFAULT_BUDGET: u64 = 100_000;

pub fn sporadic_target(name: &str) -> Result<SporadicTarget> {
    SPORADIC
        .iter()
        .find(|t| t.name.eq_ignore_ascii_case(name) || t.file.trim_end_matches(".txt") == name)
        .copied()
        .ok_or_else(|| Error::NotFound(format!("no sporadic catalog entry named {name:?}")))
}

pub fn entry_path(dir: &Path, target: &SporadicTarget) -> PathBuf {
    dir.join(target.file)
}

/// Matrix whose rows are the images of the unit vectors under a
/// permutation of the nonzero vectors (point i ↔ packed vector i + 1).
fn matrix_from_vector_perm(n: usize, p: &Permutation) -> Matrix {
    let rows: Vec<u64> = (0..n).map(|i| p.apply(((1u64 << i) - 1) as u32) as u64 + 1).collect();
    Matrix::from_gf2_row_masks(&rows, n)
}

/// Seeded random search for the target inside GL₄(2) (n = 4) or Sp₆(2)
/// (n = 6), keeping the first transitive pair of the right order.
pub fn discover_entry(target: &SporadicTarget, seed: u64, budget: u64) -> Result<CatalogEntry> {
    let gf2 = FieldContext::gf2();
    let ambient = match target.n {
        4 => sl_generators(4, gf2),
        6 => sp_generators(6, gf2),
        n => return Err(Error::Unsupported(format!("no ambient group for dimension {n}"))),
    };
    let perms = GModule::new(gf2, ambient)?.action_permutations()?;
    let degree = (1usize << target.n) - 1;
    let wanted = |g: &[Permutation]| is_transitive(degree, g) && perfect_residual(degree, g).order() == target.perfect;
    let hit = random_subgroup_search(degree, &perms, target.order, wanted, seed, budget)
        .map_err(|e| match e {
            Error::NotFound(msg) => Error::NotFound(format!("{}: {msg}", target.name)),
            other => other,
        })?;
    let (a, b) = hit.generators;
    Ok(CatalogEntry {
        name: target.name.to_string(),
        n: target.n,
        generators: vec![matrix_from_vector_perm(target.n, &a), matrix_from_vector_perm(target.n, &b)],
        expected: Expected { order: target.order, transitive: true, solvable: false, perfect: Some(target.perfect) },
        class: "ii".into(),
        seed: Some(seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_formulas() {
        assert_eq!(sl_order(3, 2), 168);
        assert_eq!(sl_order(2, 4), 60);
        assert_eq!(sp_order(2, 2), 720);
        assert_eq!(sp_order(2, 4), 979_200);
        assert_eq!(sp_order(3, 2), 1_451_520);
    }

    #[test]
    fn gamma_l1_small() {
        let e = entry_gamma_l1(3).unwrap();
        let r = verify_entry(&e).unwrap();
        assert_eq!(r.order, 21);
        assert!(r.transitive && r.solvable && r.verified);
        assert_eq!(verify_entry(&entry_gamma_l1(2).unwrap()).unwrap().order, 6);
        assert!(entry_gamma_l1(11).is_err());
    }

    #[test]
    fn classical_entries() {
        for (e, order) in [
            (entry_sl(3, 1).unwrap(), 168u128),
            (entry_sl(2, 2).unwrap(), 60),
            (entry_sp4(1).unwrap(), 720),
        ] {
            let r = verify_entry(&e).unwrap();
            assert_eq!(r.order, order, "{}", e.name);
            assert!(r.verified, "{r:?}");
        }
    }

    #[test]
    fn symplectic_form_checked() {
        let gf2 = FieldContext::gf2();
        let j = antidiagonal_form(gf2, 4);
        assert!(check_symplectic(&sp_generators(4, gf2), &j).is_ok());
        let mut bad = Matrix::identity(gf2, 4);
        bad.set(0, 1, FieldElement::ONE);
        assert_eq!(check_symplectic(&[bad], &j), Err(Error::NotSymplectic(0)));
    }

    #[test]
    fn entry_text_roundtrip_and_tamper() {
        let e = entry_sp4(1).unwrap();
        let text = write_entry(&e).unwrap();
        assert_eq!(parse_entry(&text).unwrap(), e);
        // Flip one bit in the first generator's first row.
        let mut g0 = e.generators[0].clone();
        let x = g0.get(0, 3) + FieldElement::ONE;
        g0.set(0, 3, x);
        let mut tampered = e.clone();
        tampered.generators[0] = g0;
        if tampered.module().is_ok() {
            let r = verify_entry(&tampered).unwrap();
            assert!(!r.verified);
        }
        assert!(matches!(parse_entry("name x\nexpect order=1\nfield 1\n"), Err(Error::BadFormat(_))));
    }

    #[test]
    fn discovery_zero_budget() {
        let t = sporadic_target("A7").unwrap();
        assert!(matches!(discover_entry(&t, 1, 0), Err(Error::NotFound(_))));
        assert!(sporadic_target("M24").is_err());
    }

    #[test]
    fn same_order_impostor_rejected() {
        // ΓL₂(4) ≅ (A₅ × 3):2 has order 360, is transitive on the 15 nonzero
        // vectors and is not solvable, but it is not A₆.
        let f4 = FieldContext::new(2, None).unwrap();
        let w = f4.primitive_element();
        let mut gens = entry_sl(2, 2).unwrap().generators;
        gens.push(blowup(&Matrix::diag(f4, &[w, w])));
        let frob2 = entry_gamma_l1(2).unwrap().generators[1].clone();
        let mut frob = Matrix::zeros(FieldContext::gf2(), 4, 4);
        for b in 0..2 {
            for r in 0..2 {
                for c in 0..2 {
                    frob.set(2 * b + r, 2 * b + c, frob2.get(r, c));
                }
            }
        }
        gens.push(frob);
        let t = sporadic_target("A6").unwrap();
        let entry = CatalogEntry {
            name: "A6".into(),
            n: 4,
            generators: gens,
            expected: Expected { order: 360, transitive: true, solvable: false, perfect: Some(t.perfect) },
            class: "ii".into(),
            seed: None,
        };
        let r = verify_entry(&entry).unwrap();
        assert_eq!((r.order, r.transitive, r.solvable, r.perfect), (360, true, false, 60));
        assert!(!r.verified);
    }

    #[test]
    fn discover_a7_is_reproducible() {
        let t = sporadic_target("A7").unwrap();
        let a = discover_entry(&t, t.seed, DEFAULT_BUDGET).unwrap();
        let b = discover_entry(&t, t.seed, DEFAULT_BUDGET).unwrap();
        assert_eq!(a, b);
        let r = verify_entry(&a).unwrap();
        assert!(r.verified, "{r:?}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn entries_survive_text_roundtrip(n in 2u32..=10) {
                let e = entry_gamma_l1(n).unwrap();
                prop_assert_eq!(parse_entry(&write_entry(&e).unwrap()).unwrap(), e);
            }

            #[test]
            fn discovery_is_seed_deterministic(seed in 0u64..1000) {
                let t = sporadic_target("Sp4(2)").unwrap();
                let a = discover_entry(&t, seed, 2000);
                let b = discover_entry(&t, seed, 2000);
                prop_assert_eq!(a.is_ok(), b.is_ok());
                if let (Ok(a), Ok(b)) = (a, b) {
                    prop_assert!(verify_entry(&a).unwrap().verified);
                    prop_assert_eq!(a, b);
                }
            }
        }
    }
}
