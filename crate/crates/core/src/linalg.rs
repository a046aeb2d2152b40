//! Dense linear algebra over GF(2^f) and the multilinear constructions
//! (Kronecker product, exterior square, restriction of scalars).
//!
//! Vectors are rows and matrices act on the right: `v ↦ v·A`. Row `i` of an
//! action matrix is the image of the i-th basis vector.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2n::{parse_poly_hex, FieldContext, FieldElement};

pub type Vector = Vec<FieldElement>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldContext,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: FieldContext, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn identity(field: FieldContext, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    pub fn from_rows(field: FieldContext, rows: &[Vector]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::BadShape("ragged rows".into()));
        }
        let data: Vec<FieldElement> = rows.iter().flatten().copied().collect();
        if data.iter().any(|&x| !field.contains(x)) {
            return Err(Error::BadShape("entry outside the field".into()));
        }
        Ok(Matrix { field, rows: rows.len(), cols, data })
    }

    /// Builds a matrix from raw entry bits, row-major.
    pub fn from_bits(field: FieldContext, rows: usize, cols: usize, bits: &[u32]) -> Result<Self> {
        if bits.len() != rows * cols {
            return Err(Error::BadShape(format!("{} entries for a {rows}x{cols} matrix", bits.len())));
        }
        if bits.iter().any(|&b| b > field.mask()) {
            return Err(Error::BadShape("entry outside the field".into()));
        }
        Ok(Matrix { field, rows, cols, data: bits.iter().map(|&b| FieldElement(b as u16)).collect() })
    }

    pub fn diag(field: FieldContext, entries: &[FieldElement]) -> Self {
        let mut m = Matrix::zeros(field, entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    pub fn field(&self) -> FieldContext {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, x: FieldElement) {
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| self.get(r, c) == if r == c { FieldElement::ONE } else { FieldElement::ZERO })
            })
    }

    fn check_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::BadShape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += f.mul(a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::BadShape("addition of differently shaped matrices".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Ok(Matrix { field: self.field, rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: FieldElement) -> Matrix {
        let f = self.field;
        Matrix { field: f, rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| f.mul(a, c)).collect() }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// Applies `g` to every entry.
    pub fn map_entries(&self, g: impl Fn(FieldElement) -> FieldElement) -> Matrix {
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| g(a)).collect() }
    }

    /// Reinterprets the entries in another field; every entry must fit.
    pub fn with_field(&self, field: FieldContext) -> Result<Matrix> {
        if self.data.iter().any(|&x| !field.contains(x)) {
            return Err(Error::BadShape("entry outside the target field".into()));
        }
        Ok(Matrix { field, rows: self.rows, cols: self.cols, data: self.data.clone() })
    }

    pub fn pow(&self, mut e: u64) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::BadShape("power of a non-square matrix".into()));
        }
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn rank(&self) -> usize {
        rref(self).1
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn invert(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::BadShape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let f = self.field;
        // Row-reduce [A | I].
        let mut aug: Vec<Vector> = (0..n)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.extend((0..n).map(|c| if c == r { FieldElement::ONE } else { FieldElement::ZERO }));
                row
            })
            .collect();
        let pivots = rref_rows(f, &mut aug, n);
        if pivots.len() < n {
            return Err(Error::SingularMatrix);
        }
        let rows: Vec<Vector> = aug.iter().take(n).map(|r| r[n..].to_vec()).collect();
        Matrix::from_rows(f, &rows)
    }

    /// Determinant by elimination.
    pub fn determinant(&self) -> Result<FieldElement> {
        if !self.is_square() {
            return Err(Error::BadShape("determinant of a non-square matrix".into()));
        }
        let f = self.field;
        let n = self.rows;
        let mut rows = self.row_vectors();
        let mut det = FieldElement::ONE;
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !rows[r][col].is_zero()) else {
                return Ok(FieldElement::ZERO);
            };
            rows.swap(col, p);
            let pv = rows[col][col];
            det = f.mul(det, pv);
            let inv = f.inv(pv)?;
            for r in col + 1..n {
                let factor = f.mul(rows[r][col], inv);
                if !factor.is_zero() {
                    for c in col..n {
                        let t = f.mul(factor, rows[col][c]);
                        rows[r][c] += t;
                    }
                }
            }
        }
        Ok(det)
    }

    /// Packs each row of a GF(2) matrix into a bitmask, column i at bit i.
    pub fn gf2_row_masks(&self) -> Result<Vec<u64>> {
        if self.field.degree() != 1 || self.cols > 64 {
            return Err(Error::BadShape("row masks need a GF(2) matrix with at most 64 columns".into()));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().enumerate().fold(0u64, |m, (i, x)| m | ((x.0 as u64 & 1) << i)))
            .collect())
    }

    pub fn from_gf2_row_masks(rows: &[u64], cols: usize) -> Matrix {
        let f = FieldContext::gf2();
        let mut m = Matrix::zeros(f, rows.len(), cols);
        for (r, &mask) in rows.iter().enumerate() {
            for c in 0..cols {
                if mask >> c & 1 == 1 {
                    m.set(r, c, FieldElement::ONE);
                }
            }
        }
        m
    }
}

/// v·A for a row vector v.
pub fn vec_mat(field: FieldContext, v: &[FieldElement], a: &Matrix) -> Vector {
    debug_assert_eq!(v.len(), a.rows());
    let mut out = vec![FieldElement::ZERO; a.cols()];
    for (i, &x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let row = a.row(i);
        if x == FieldElement::ONE {
            for (o, &y) in out.iter_mut().zip(row) {
                *o += y;
            }
        } else {
            for (o, &y) in out.iter_mut().zip(row) {
                *o += field.mul(x, y);
            }
        }
    }
    out
}

/// v·A for a GF(2) vector packed as a mask and a matrix given by row masks.
#[inline]
pub fn apply_masks(rows: &[u64], mut v: u64) -> u64 {
    let mut out = 0u64;
    let mut i = 0;
    while v != 0 {
        if v & 1 == 1 {
            out ^= rows[i];
        }
        v >>= 1;
        i += 1;
    }
    out
}

/// In-place reduced row-echelon form of `rows` over the first `width`
/// columns. Zero rows are dropped from the front part; returns the pivot
/// columns, with `rows` truncated to the nonzero rows in pivot order.
pub(crate) fn rref_rows(f: FieldContext, rows: &mut Vec<Vector>, width: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = f.inv(rows[r][col]).expect("pivot is nonzero");
        if inv != FieldElement::ONE {
            for x in rows[r].iter_mut() {
                *x = f.mul(*x, inv);
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[col];
            if factor.is_zero() {
                continue;
            }
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x += f.mul(factor, y);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// A subspace of F^ambient held by its canonical reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    field: FieldContext,
    ambient: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subspace {
    /// Dimension first, then the echelon basis lexicographically.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.dim(), &self.basis).cmp(&(other.dim(), &other.basis))
    }
}

impl Subspace {
    pub fn zero(field: FieldContext, ambient: usize) -> Self {
        Subspace { field, ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: FieldContext, ambient: usize) -> Self {
        Subspace::span(field, ambient, Matrix::identity(field, ambient).row_vectors())
    }

    pub fn span(field: FieldContext, ambient: usize, vectors: Vec<Vector>) -> Self {
        let mut rows = vectors;
        debug_assert!(rows.iter().all(|r| r.len() == ambient));
        let pivots = rref_rows(field, &mut rows, ambient);
        Subspace { field, ambient, basis: rows, pivots }
    }

    pub fn field(&self) -> FieldContext {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_matrix(&self) -> Matrix {
        if self.basis.is_empty() {
            return Matrix::zeros(self.field, 0, self.ambient);
        }
        Matrix::from_rows(self.field, &self.basis).expect("basis rows have ambient length")
    }

    /// Reduces v modulo the subspace; the result is zero on pivot columns.
    pub fn reduce(&self, v: &[FieldElement]) -> Vector {
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let c = w[p];
            if !c.is_zero() {
                for (x, &y) in w.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x += self.field.mul(c, y);
                    }
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Coordinates of v in the echelon basis, if v lies in the subspace.
    pub fn coordinates(&self, v: &[FieldElement]) -> Option<Vector> {
        let coords: Vector = self.pivots.iter().map(|&p| v[p]).collect();
        let mut recon = vec![FieldElement::ZERO; self.ambient];
        for (c, row) in coords.iter().zip(&self.basis) {
            for (x, &y) in recon.iter_mut().zip(row) {
                *x += self.field.mul(*c, y);
            }
        }
        (recon == v).then_some(coords)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subspace::span(self.field, self.ambient, rows)
    }

    /// Intersection via the kernel of [A; B] stacked as a left null space.
    pub fn intersection(&self, other: &Subspace) -> Subspace {
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.field, self.ambient);
        }
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        let stacked = Matrix::from_rows(self.field, &rows).expect("same ambient");
        // x·[A; B] = 0  ⇔  x_A·A = x_B·B; the intersection is spanned by x_A·A.
        let left = kernel(&stacked.transpose());
        let vecs: Vec<Vector> = left
            .basis()
            .iter()
            .map(|x| {
                let xa = &x[..self.dim()];
                vec_mat(self.field, xa, &self.basis_matrix())
            })
            .collect();
        Subspace::span(self.field, self.ambient, vecs)
    }

    /// All vectors of the subspace (only for tiny subspaces).
    pub fn elements(&self) -> Vec<Vector> {
        let q = self.field.order();
        let d = self.dim();
        let total = q.pow(d as u32);
        let mut out = Vec::with_capacity(total);
        for idx in 0..total {
            let mut v = vec![FieldElement::ZERO; self.ambient];
            let mut rem = idx;
            for row in &self.basis {
                let c = FieldElement((rem % q) as u16);
                rem /= q;
                if !c.is_zero() {
                    for (x, &y) in v.iter_mut().zip(row) {
                        *x += self.field.mul(c, y);
                    }
                }
            }
            out.push(v);
        }
        out
    }
}

/// Canonical row space of M and its rank.
pub fn rref(m: &Matrix) -> (Subspace, usize) {
    let s = Subspace::span(m.field(), m.cols(), m.row_vectors());
    let r = s.dim();
    (s, r)
}

/// Null space {x : M·x = 0} as a subspace of F^cols.
pub fn kernel(m: &Matrix) -> Subspace {
    let f = m.field();
    let mut rows = m.row_vectors();
    let pivots = rref_rows(f, &mut rows, m.cols());
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut x = vec![FieldElement::ZERO; m.cols()];
        x[fc] = FieldElement::ONE;
        for (row, &p) in rows.iter().zip(&pivots) {
            // Characteristic 2: x_p = -row[fc] = row[fc].
            x[p] = row[fc];
        }
        basis.push(x);
    }
    Subspace::span(f, m.cols(), basis)
}

/// Some solution x of A·x = b.
pub fn solve_linear(a: &Matrix, b: &[FieldElement]) -> Result<Vector> {
    if b.len() != a.rows() {
        return Err(Error::BadShape("right-hand side length differs from row count".into()));
    }
    let f = a.field();
    let mut rows: Vec<Vector> = (0..a.rows())
        .map(|r| {
            let mut row = a.row(r).to_vec();
            row.push(b[r]);
            row
        })
        .collect();
    let pivots = rref_rows(f, &mut rows, a.cols() + 1);
    if pivots.last() == Some(&a.cols()) {
        return Err(Error::NoSolution);
    }
    let mut x = vec![FieldElement::ZERO; a.cols()];
    for (row, &p) in rows.iter().zip(&pivots) {
        x[p] = row[a.cols()];
    }
    Ok(x)
}

/// Kronecker product; basis e_i⊗e_j in lexicographic order.
pub fn tensor_matrix(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch);
    }
    let f = a.field();
    let mut out = Matrix::zeros(f, a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + k, j * b.cols() + l, f.mul(x, b.get(k, l)));
                }
            }
        }
    }
    Ok(out)
}

/// Pairs (i, j), i < j, in lexicographic order: the wedge basis of Λ²(F^n).
pub fn wedge_basis(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Index of e_i∧e_j (i < j) in [`wedge_basis`].
pub fn wedge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Induced action on Λ²: e_i∧e_j ↦ (e_i A)∧(e_j A). In characteristic 2 the
/// coefficient of e_k∧e_l is a_ik·a_jl + a_il·a_jk.
pub fn exterior_matrix(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::BadShape(format!("exterior square of a {}x{} matrix", a.rows(), a.cols())));
    }
    let f = a.field();
    let n = a.rows();
    let pairs = wedge_basis(n);
    let mut out = Matrix::zeros(f, pairs.len(), pairs.len());
    for (r, &(i, j)) in pairs.iter().enumerate() {
        for (c, &(k, l)) in pairs.iter().enumerate() {
            let v = f.mul(a.get(i, k), a.get(j, l)) + f.mul(a.get(i, l), a.get(j, k));
            out.set(r, c, v);
        }
    }
    Ok(out)
}

/// GF(2)-matrix of y ↦ y·a on the basis (1, t, ..., t^(f-1)): row i holds
/// the coordinates of t^i·a.
pub fn multiplication_matrix(field: FieldContext, a: FieldElement) -> Matrix {
    let f = field.degree() as usize;
    let mut m = Matrix::zeros(FieldContext::gf2(), f, f);
    let mut basis_elem = FieldElement::ONE;
    let t = field.root();
    for i in 0..f {
        let img = field.mul(basis_elem, a);
        for c in 0..f {
            if img.bits() >> c & 1 == 1 {
                m.set(i, c, FieldElement::ONE);
            }
        }
        basis_elem = field.mul(basis_elem, t);
    }
    m
}

/// Restriction of scalars: every entry becomes its f×f multiplication
/// matrix over GF(2).
pub fn blowup(m: &Matrix) -> Matrix {
    let field = m.field();
    let f = field.degree() as usize;
    let mut out = Matrix::zeros(FieldContext::gf2(), m.rows() * f, m.cols() * f);
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let a = m.get(r, c);
            if a.is_zero() {
                continue;
            }
            let block = multiplication_matrix(field, a);
            for i in 0..f {
                for j in 0..f {
                    out.set(r * f + i, c * f + j, block.get(i, j));
                }
            }
        }
    }
    out
}

/// Restricts a vector over GF(2^f) to GF(2) coordinates (f bits per entry).
pub fn blowup_vector(field: FieldContext, v: &[FieldElement]) -> Vector {
    let f = field.degree() as usize;
    let mut out = Vec::with_capacity(v.len() * f);
    for x in v {
        for i in 0..f {
            out.push(FieldElement((x.0 >> i) & 1));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Text format.

fn hex_width(field: FieldContext) -> usize {
    (field.degree() as usize).div_ceil(4)
}

pub(crate) fn write_field_header(out: &mut String, field: FieldContext) {
    let _ = writeln!(out, "field {} poly={:#x}", field.degree(), field.poly());
}

pub(crate) fn write_rows(out: &mut String, m: &Matrix) {
    let w = hex_width(m.field());
    for r in 0..m.rows() {
        for x in m.row(r) {
            let _ = write!(out, "{:0w$x}", x.0, w = w);
        }
        out.push('\n');
    }
}

/// Serializes a single matrix:
///
/// ```text
/// field <f> poly=<hex>
/// dim <rows> <cols>
/// <row as fixed-width hex entries>
/// ```
pub fn write_matrix(m: &Matrix) -> String {
    let mut out = String::new();
    write_field_header(&mut out, m.field());
    let _ = writeln!(out, "dim {} {}", m.rows(), m.cols());
    write_rows(&mut out, m);
    out
}

/// Non-empty, non-comment lines.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_field_header(line: &str) -> Result<FieldContext> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some("field") {
        return Err(Error::BadFormat(format!("expected `field` header, got {line:?}")));
    }
    let f: u32 = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::BadFormat(format!("bad field degree in {line:?}")))?;
    let poly = match parts.next() {
        Some(p) => {
            let hex = p
                .strip_prefix("poly=")
                .ok_or_else(|| Error::BadFormat(format!("expected poly=<hex> in {line:?}")))?;
            Some(parse_poly_hex(hex)?)
        }
        None => None,
    };
    FieldContext::new(f, poly)
}

pub(crate) fn parse_dim(line: &str) -> Result<(usize, usize)> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some("dim") {
        return Err(Error::BadFormat(format!("expected `dim` line, got {line:?}")));
    }
    let mut num = || -> Result<usize> {
        parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::BadFormat(format!("bad dimensions in {line:?}")))
    };
    Ok((num()?, num()?))
}

pub(crate) fn parse_row(field: FieldContext, cols: usize, line: &str) -> Result<Vec<u32>> {
    let w = hex_width(field);
    let compact: String = line.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.len() != cols * w {
        return Err(Error::BadFormat(format!("row {line:?} should hold {cols} entries of {w} hex digits")));
    }
    (0..cols)
        .map(|i| {
            u32::from_str_radix(&compact[i * w..(i + 1) * w], 16)
                .map_err(|_| Error::BadFormat(format!("bad hex in row {line:?}")))
        })
        .collect()
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut lines = content_lines(text);
    let (_, header) = lines.next().ok_or_else(|| Error::BadFormat("empty matrix file".into()))?;
    let field = parse_field_header(header)?;
    let (_, dim) = lines.next().ok_or_else(|| Error::BadFormat("missing dim line".into()))?;
    let (rows, cols) = parse_dim(dim)?;
    let mut bits = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (_, l) = lines.next().ok_or_else(|| Error::BadFormat("missing matrix rows".into()))?;
        bits.extend(parse_row(field, cols, l)?);
    }
    Matrix::from_bits(field, rows, cols, &bits).map_err(|e| Error::BadFormat(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf2() -> FieldContext {
        FieldContext::gf2()
    }

    fn m2(rows: &[&[u32]]) -> Matrix {
        let f = gf2();
        let bits: Vec<u32> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Matrix::from_bits(f, rows.len(), rows[0].len(), &bits).unwrap()
    }

    #[test]
    fn rref_examples() {
        let (s, r) = rref(&Matrix::identity(gf2(), 3));
        assert_eq!(r, 3);
        assert_eq!(s.dim(), 3);
        let k = kernel(&Matrix::zeros(gf2(), 3, 3));
        assert_eq!(k.dim(), 3);
        let a = m2(&[&[1, 1], &[0, 1]]);
        let inv = a.invert().unwrap();
        assert_eq!(inv, a);
        assert!(a.mul(&inv).unwrap().is_identity());
        assert_eq!(m2(&[&[1, 1], &[1, 1]]).invert(), Err(Error::SingularMatrix));
    }

    #[test]
    fn solve_examples() {
        let a = m2(&[&[1, 1], &[1, 1]]);
        let one = FieldElement::ONE;
        let zero = FieldElement::ZERO;
        assert_eq!(solve_linear(&a, &[one, zero]), Err(Error::NoSolution));
        let x = solve_linear(&a, &[one, one]).unwrap();
        let col = Matrix::from_rows(gf2(), std::slice::from_ref(&x)).unwrap().transpose();
        assert_eq!(a.mul(&col).unwrap().transpose().row(0), &[one, one]);
    }

    #[test]
    fn tensor_examples() {
        let f = gf2();
        assert!(tensor_matrix(&Matrix::identity(f, 2), &Matrix::identity(f, 3)).unwrap().is_identity());
        let g8 = FieldContext::new(3, None).unwrap();
        let a = Matrix::from_bits(g8, 1, 1, &[3]).unwrap();
        let b = Matrix::from_bits(g8, 1, 1, &[6]).unwrap();
        assert_eq!(tensor_matrix(&a, &b).unwrap().get(0, 0), g8.mul(g8.elem(3), g8.elem(6)));
        // diag(t,1) ⊗ diag(1,t) over GF(4): entries a_ii·b_kk in order 11,12,21,22.
        let g4 = FieldContext::new(2, None).unwrap();
        let t = g4.root();
        let one = FieldElement::ONE;
        let d1 = Matrix::diag(g4, &[t, one]);
        let d2 = Matrix::diag(g4, &[one, t]);
        let kron = tensor_matrix(&d1, &d2).unwrap();
        assert_eq!(kron, Matrix::diag(g4, &[t, g4.mul(t, t), one, t]));
        assert_eq!(tensor_matrix(&d1, &Matrix::identity(gf2(), 2)), Err(Error::FieldMismatch));
    }

    #[test]
    fn exterior_examples() {
        let f = gf2();
        for n in 2..6 {
            assert!(exterior_matrix(&Matrix::identity(f, n)).unwrap().is_identity());
        }
        let swap = m2(&[&[0, 1], &[1, 0]]);
        assert_eq!(exterior_matrix(&swap).unwrap(), m2(&[&[1]]));
        let cyc = m2(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        let e = exterior_matrix(&cyc).unwrap();
        // e1∧e2 ↦ e2∧e3, e1∧e3 ↦ e2∧e1 = e1∧e2, e2∧e3 ↦ e3∧e1 = e1∧e3.
        assert_eq!(e, m2(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]));
        assert!(matches!(exterior_matrix(&Matrix::zeros(f, 2, 3)), Err(Error::BadShape(_))));
    }

    #[test]
    fn wedge_indexing() {
        for n in 2..8 {
            for (idx, &(i, j)) in wedge_basis(n).iter().enumerate() {
                assert_eq!(wedge_index(n, i, j), idx);
            }
        }
    }

    #[test]
    fn blowup_examples() {
        let g4 = FieldContext::new(2, None).unwrap();
        assert!(blowup(&Matrix::identity(g4, 1)).is_identity());
        let g8 = FieldContext::new(3, None).unwrap();
        let t = Matrix::from_bits(g8, 1, 1, &[2]).unwrap();
        // Rows: t·1 = t, t·t = t², t·t² = t+1.
        assert_eq!(blowup(&t), m2(&[&[0, 1, 0], &[0, 0, 1], &[1, 1, 0]]));
    }

    #[test]
    fn subspace_ops() {
        let f = gf2();
        let one = FieldElement::ONE;
        let zero = FieldElement::ZERO;
        let a = Subspace::span(f, 3, vec![vec![one, zero, zero], vec![zero, one, zero]]);
        let b = Subspace::span(f, 3, vec![vec![zero, one, zero], vec![zero, zero, one]]);
        let i = a.intersection(&b);
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&[zero, one, zero]));
        assert_eq!(a.sum(&b).dim(), 3);
        assert_eq!(a.elements().len(), 4);
        assert_eq!(a.coordinates(&[one, one, zero]), Some(vec![one, one]));
        assert_eq!(a.coordinates(&[one, one, one]), None);
    }

    #[test]
    fn text_format_roundtrip() {
        let g4 = FieldContext::new(2, None).unwrap();
        let m = Matrix::from_bits(g4, 2, 3, &[0, 1, 2, 3, 2, 1]).unwrap();
        let text = write_matrix(&m);
        assert_eq!(text, "field 2 poly=0x7\ndim 2 3\n012\n321\n");
        assert_eq!(parse_matrix(&text).unwrap(), m);
        assert!(matches!(parse_matrix("field 2 poly=0x7\ndim 1 2\n0"), Err(Error::BadFormat(_))));
        assert!(matches!(parse_matrix("dim 1 1\n1"), Err(Error::BadFormat(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix_strategy(deg: u32, n: usize) -> impl Strategy<Value = Matrix> {
            let field = FieldContext::new(deg, None).unwrap();
            proptest::collection::vec(0u32..(1 << deg), n * n)
                .prop_map(move |bits| Matrix::from_bits(field, n, n, &bits).unwrap())
        }

        proptest! {
            #[test]
            fn exterior_is_functorial(a in matrix_strategy(2, 4), b in matrix_strategy(2, 4)) {
                let ab = a.mul(&b).unwrap();
                prop_assert_eq!(exterior_matrix(&ab).unwrap(),
                    exterior_matrix(&a).unwrap().mul(&exterior_matrix(&b).unwrap()).unwrap());
            }

            #[test]
            fn tensor_is_functorial(a in matrix_strategy(3, 2), b in matrix_strategy(3, 2),
                                    c in matrix_strategy(3, 3), d in matrix_strategy(3, 3)) {
                let lhs = tensor_matrix(&a.mul(&b).unwrap(), &c.mul(&d).unwrap()).unwrap();
                let rhs = tensor_matrix(&a, &c).unwrap().mul(&tensor_matrix(&b, &d).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn blowup_is_ring_hom_gf4(a in matrix_strategy(2, 3), b in matrix_strategy(2, 3)) {
                prop_assert_eq!(blowup(&a.mul(&b).unwrap()), blowup(&a).mul(&blowup(&b)).unwrap());
                prop_assert_eq!(blowup(&a.add(&b).unwrap()), blowup(&a).add(&blowup(&b)).unwrap());
            }

            #[test]
            fn blowup_is_ring_hom_gf8(a in matrix_strategy(3, 2), b in matrix_strategy(3, 2)) {
                prop_assert_eq!(blowup(&a.mul(&b).unwrap()), blowup(&a).mul(&blowup(&b)).unwrap());
            }

            #[test]
            fn rref_is_canonical(a in matrix_strategy(2, 4), b in matrix_strategy(2, 4)) {
                let (s, _) = rref(&a);
                let (s2, _) = rref(&s.basis_matrix().add(&Matrix::zeros(a.field(), s.dim(), 4)).unwrap());
                prop_assert_eq!(&s, &s2);
                // Same row space under an invertible change of rows.
                if b.is_invertible() {
                    let (t, _) = rref(&b.mul(&a).unwrap());
                    prop_assert_eq!(s, t);
                }
            }

            #[test]
            fn solve_satisfies_system(a in matrix_strategy(2, 4), x in proptest::collection::vec(0u32..4, 4)) {
                let f = a.field();
                let x: Vector = x.into_iter().map(|b| f.elem(b)).collect();
                let b = vec_mat(f, &x, &a.transpose());
                let y = solve_linear(&a, &b).unwrap();
                prop_assert_eq!(vec_mat(f, &y, &a.transpose()), b);
            }

            #[test]
            fn invert_roundtrip(a in matrix_strategy(3, 3)) {
                match a.invert() {
                    Ok(inv) => prop_assert!(a.mul(&inv).unwrap().is_identity()),
                    Err(e) => {
                        prop_assert_eq!(e, Error::SingularMatrix);
                        prop_assert_eq!(a.determinant().unwrap(), FieldElement::ZERO);
                    }
                }
            }
        }
    }
}
