//! Arithmetic of `F_p^n`: elements, dual functionals, and subspace algebra
//! over GF(p).
//!
//! Elements are identified with integers in `[0, p^n)` through a little-endian
//! mixed-radix codec: `index = sum_i x_i * p^(i-1)` with coordinate 1 least
//! significant. Most dense code works directly on indices.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest supported prime.
pub const MAX_PRIME: u8 = 17;
/// Dense indicators and spectra must fit in `p^n <= 2^26` points.
pub const DENSE_CAP: usize = 1 << 26;
/// Transversal enumeration refuses to materialize more than this many cosets.
pub const TRANSVERSAL_CAP: usize = 1 << 18;

const SUPPORTED_PRIMES: [u8; 7] = [2, 3, 5, 7, 11, 13, 17];

/// The ambient group `F_p^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupContext {
    p: u8,
    n: usize,
    order: usize,
}

impl GroupContext {
    pub fn new(p: u8, n: usize) -> Result<Self> {
        if !SUPPORTED_PRIMES.contains(&p) {
            return Err(Error::UnsupportedPrime(p as u64));
        }
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut order: u128 = 1;
        for _ in 0..n {
            order *= p as u128;
            if order > DENSE_CAP as u128 {
                return Err(Error::OrderTooLarge(order));
            }
        }
        Ok(GroupContext { p, n, order: order as usize })
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Decode an index into its digit vector.
    pub fn digits(&self, index: usize) -> Result<Vec<u8>> {
        if index >= self.order {
            return Err(Error::IndexOutOfRange { index, order: self.order });
        }
        let p = self.p as usize;
        let mut rest = index;
        let mut out = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            out.push((rest % p) as u8);
            rest /= p;
        }
        Ok(out)
    }

    /// Encode a digit vector into its index.
    pub fn index(&self, digits: &[u8]) -> Result<usize> {
        if digits.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: digits.len() });
        }
        let p = self.p as usize;
        let mut out = 0usize;
        let mut mult = 1usize;
        for &d in digits {
            if d >= self.p {
                return Err(Error::InvalidDigit { digit: d, p: self.p });
            }
            out += d as usize * mult;
            mult *= p;
        }
        Ok(out)
    }

    /// Index of the standard basis vector `e_i`, 1-based.
    pub fn basis(&self, i: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.n);
        (self.p as usize).pow((i - 1) as u32)
    }

    /// Componentwise sum mod p, on indices.
    pub fn add(&self, a: usize, b: usize) -> usize {
        if self.p == 2 {
            return a ^ b;
        }
        let p = self.p as usize;
        let (mut a, mut b) = (a, b);
        let mut out = 0usize;
        let mut mult = 1usize;
        for _ in 0..self.n {
            out += ((a % p + b % p) % p) * mult;
            mult *= p;
            a /= p;
            b /= p;
        }
        out
    }

    /// Additive inverse, on indices.
    pub fn neg(&self, a: usize) -> usize {
        if self.p == 2 {
            return a;
        }
        let p = self.p as usize;
        let mut a = a;
        let mut out = 0usize;
        let mut mult = 1usize;
        for _ in 0..self.n {
            let d = a % p;
            out += (if d == 0 { 0 } else { p - d }) * mult;
            mult *= p;
            a /= p;
        }
        out
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// Scalar product `sum_i x_i t_i mod p`, on indices.
    pub fn dot(&self, x: usize, t: usize) -> u8 {
        if self.p == 2 {
            return ((x & t).count_ones() & 1) as u8;
        }
        let p = self.p as usize;
        let (mut x, mut t) = (x, t);
        let mut acc = 0usize;
        for _ in 0..self.n {
            acc += (x % p) * (t % p);
            x /= p;
            t /= p;
        }
        (acc % p) as u8
    }

    /// Scale an element by a residue, on indices.
    pub fn scale(&self, c: u8, a: usize) -> usize {
        let p = self.p as usize;
        let c = c as usize % p;
        let mut a = a;
        let mut out = 0usize;
        let mut mult = 1usize;
        for _ in 0..self.n {
            out += (a % p * c % p) * mult;
            mult *= p;
            a /= p;
        }
        out
    }

    pub fn contains_index(&self, index: usize) -> bool {
        index < self.order
    }
}

/// An element of `F_p^n`, stored as digits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement(pub Vec<u8>);

/// An element of the dual group, stored as digits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Functional(pub Vec<u8>);

impl GroupElement {
    pub fn from_index(ctx: &GroupContext, index: usize) -> Result<Self> {
        Ok(GroupElement(ctx.digits(index)?))
    }

    pub fn to_index(&self, ctx: &GroupContext) -> Result<usize> {
        ctx.index(&self.0)
    }
}

impl Functional {
    pub fn from_index(ctx: &GroupContext, index: usize) -> Result<Self> {
        Ok(Functional(ctx.digits(index)?))
    }

    pub fn to_index(&self, ctx: &GroupContext) -> Result<usize> {
        ctx.index(&self.0)
    }
}

fn inv_mod(a: u8, p: u8) -> u8 {
    // p <= 17, a != 0
    let mut x = 1u32;
    let base = a as u32 % p as u32;
    for _ in 0..(p - 2) {
        x = x * base % p as u32;
    }
    x as u8
}

/// Reduced row echelon form over GF(p). Returns (rows, pivot columns).
fn rref(p: u8, mut rows: Vec<Vec<u8>>, n: usize) -> (Vec<Vec<u8>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut rank = 0usize;
    for col in 0..n {
        let Some(sel) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, sel);
        let inv = inv_mod(rows[rank][col], p);
        for v in rows[rank].iter_mut() {
            *v = (*v as u32 * inv as u32 % p as u32) as u8;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let c = rows[r][col] as u32;
                for j in 0..n {
                    let sub = c * rows[rank][j] as u32 % p as u32;
                    rows[r][j] = ((rows[r][j] as u32 + p as u32 - sub) % p as u32) as u8;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    (rows, pivots)
}

/// A subspace `H <= F_p^n`, stored by its annihilator in canonical
/// row-reduced echelon form. `H = { x : <x, r> = 0 for every row r }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subspace {
    p: u8,
    n: usize,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
    row_indices: Vec<usize>,
}

impl Subspace {
    /// The full group (empty annihilator).
    pub fn full(ctx: &GroupContext) -> Self {
        Subspace { p: ctx.p(), n: ctx.n(), rows: Vec::new(), pivots: Vec::new(), row_indices: Vec::new() }
    }

    /// Build a subspace from annihilator rows. Zero, duplicate, and dependent
    /// rows are absorbed by the row reduction.
    pub fn from_annihilator(ctx: &GroupContext, rows: &[Functional]) -> Result<Self> {
        let mut mat = Vec::with_capacity(rows.len());
        for r in rows {
            // validates digits and length
            ctx.index(&r.0)?;
            mat.push(r.0.clone());
        }
        let (rows, pivots) = rref(ctx.p(), mat, ctx.n());
        let row_indices = rows.iter().map(|r| ctx.index(r).expect("reduced row is valid")).collect();
        Ok(Subspace { p: ctx.p(), n: ctx.n(), rows, pivots, row_indices })
    }

    pub fn from_annihilator_indices(ctx: &GroupContext, rows: &[usize]) -> Result<Self> {
        let fs: Vec<Functional> = rows
            .iter()
            .map(|&t| Functional::from_index(ctx, t))
            .collect::<Result<_>>()?;
        Self::from_annihilator(ctx, &fs)
    }

    fn check_ctx(&self, ctx: &GroupContext) -> Result<()> {
        if self.p != ctx.p() || self.n != ctx.n() {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    pub fn codim(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.n - self.rows.len()
    }

    /// |H| = p^(n - codim).
    pub fn size(&self) -> usize {
        (self.p as usize).pow(self.dim() as u32)
    }

    /// Number of cosets, p^codim.
    pub fn coset_count(&self) -> usize {
        (self.p as usize).pow(self.codim() as u32)
    }

    pub fn annihilator_rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn annihilator_row_indices(&self) -> &[usize] {
        &self.row_indices
    }

    pub fn is_full_group(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, ctx: &GroupContext, x: usize) -> bool {
        self.row_indices.iter().all(|&r| ctx.dot(x, r) == 0)
    }

    /// Syndrome of x: the tuple `(<x, r_1>, ..., <x, r_d>)` packed little-endian
    /// base p. Two elements lie in the same coset iff their syndromes agree.
    pub fn syndrome(&self, ctx: &GroupContext, x: usize) -> usize {
        let p = self.p as usize;
        let mut out = 0usize;
        let mut mult = 1usize;
        for &r in &self.row_indices {
            out += ctx.dot(x, r) as usize * mult;
            mult *= p;
        }
        out
    }

    /// Canonical coset representative for syndrome `s`: the element supported
    /// on the pivot coordinates whose pivot digits spell `s`.
    pub fn rep_for_syndrome(&self, ctx: &GroupContext, s: usize) -> usize {
        let p = self.p as usize;
        let mut s = s;
        let mut rep = 0usize;
        for &col in &self.pivots {
            let d = (s % p) as u8;
            rep = ctx.add(rep, ctx.scale(d, ctx.basis(col + 1)));
            s /= p;
        }
        rep
    }

    /// Canonical representative of x's coset (the transversal element).
    pub fn canonical_rep(&self, ctx: &GroupContext, x: usize) -> usize {
        self.rep_for_syndrome(ctx, self.syndrome(ctx, x))
    }

    /// A complete, deterministic system of coset representatives, ordered by
    /// syndrome (lexicographic over pivot coordinates, first pivot fastest).
    pub fn transversal(&self, ctx: &GroupContext) -> Result<Vec<usize>> {
        self.check_ctx(ctx)?;
        let count = self.coset_count();
        if count > TRANSVERSAL_CAP {
            return Err(Error::TransversalBudget { codim: self.codim() });
        }
        Ok((0..count).map(|s| self.rep_for_syndrome(ctx, s)).collect())
    }

    /// Intersect with the hyperplane `<t>^perp`. Codimension grows by exactly 1
    /// iff `t` is not already in the annihilator's row space.
    pub fn intersect_hyperplane(&self, ctx: &GroupContext, t: usize) -> Result<Subspace> {
        self.check_ctx(ctx)?;
        if t == 0 {
            return Err(Error::ZeroFunctional);
        }
        if !ctx.contains_index(t) {
            return Err(Error::IndexOutOfRange { index: t, order: ctx.order() });
        }
        let mut rows = self.row_indices.clone();
        rows.push(t);
        Self::from_annihilator_indices(ctx, &rows)
    }

    /// Whether `t` lies in `H^perp` (the annihilator row space).
    pub fn annihilates(&self, ctx: &GroupContext, t: usize) -> bool {
        // reduce t against the echelon rows
        let mut digits = ctx.digits(t).expect("valid functional index");
        let p = self.p as u32;
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            let c = digits[col] as u32;
            if c != 0 {
                for j in 0..self.n {
                    let sub = c * row[j] as u32 % p;
                    digits[j] = ((digits[j] as u32 + p - sub) % p) as u8;
                }
            }
        }
        digits.iter().all(|&d| d == 0)
    }

    /// All p^codim elements of `H^perp`, in deterministic order.
    pub fn annihilator_span(&self, ctx: &GroupContext) -> Result<Vec<usize>> {
        self.check_ctx(ctx)?;
        if self.coset_count() > TRANSVERSAL_CAP {
            return Err(Error::TransversalBudget { codim: self.codim() });
        }
        let mut span = vec![0usize];
        for &r in &self.row_indices {
            let prev = span.len();
            for c in 1..self.p {
                let shift = ctx.scale(c, r);
                for i in 0..prev {
                    span.push(ctx.add(span[i], shift));
                }
            }
        }
        Ok(span)
    }

    /// All p^(n-codim) members of H, built from a kernel basis.
    pub fn members(&self, ctx: &GroupContext) -> Vec<usize> {
        let basis = self.kernel_basis(ctx);
        let mut members = vec![0usize];
        for &v in &basis {
            let prev = members.len();
            for c in 1..self.p {
                let shift = ctx.scale(c, v);
                for i in 0..prev {
                    members.push(ctx.add(members[i], shift));
                }
            }
        }
        members
    }

    /// A basis of H itself: one vector per free (non-pivot) column.
    pub fn kernel_basis(&self, ctx: &GroupContext) -> Vec<usize> {
        let p = self.p;
        let mut basis = Vec::with_capacity(self.dim());
        for col in 0..self.n {
            if self.pivots.contains(&col) {
                continue;
            }
            // x_col = 1, x_{pivot_i} = -rows[i][col], zero elsewhere
            let mut v = ctx.basis(col + 1);
            for (row, &pc) in self.rows.iter().zip(&self.pivots) {
                let c = row[col];
                if c != 0 {
                    v = ctx.add(v, ctx.scale(p - c, ctx.basis(pc + 1)));
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// A coset `H + g`, canonicalized by the transversal representative with
/// minimal index order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coset {
    pub subspace: Subspace,
    pub representative: usize,
}

impl Coset {
    pub fn new(ctx: &GroupContext, subspace: Subspace, g: usize) -> Self {
        let representative = subspace.canonical_rep(ctx, g);
        Coset { subspace, representative }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(ctx: &GroupContext, digits: &[u8]) -> Functional {
        let _ = ctx;
        Functional(digits.to_vec())
    }

    #[test]
    fn codec_examples() {
        let ctx = GroupContext::new(2, 3).unwrap();
        assert_eq!(ctx.index(&[1, 0, 0]).unwrap(), 1);
        assert_eq!(ctx.digits(0).unwrap(), vec![0, 0, 0]);
        let ctx3 = GroupContext::new(3, 2).unwrap();
        assert_eq!(ctx3.index(&[2, 1]).unwrap(), 5);
    }

    #[test]
    fn codec_round_trip_exhaustive() {
        for (p, n) in [(2u8, 8usize), (3, 5), (5, 4), (7, 3)] {
            let ctx = GroupContext::new(p, n).unwrap();
            for i in 0..ctx.order() {
                assert_eq!(ctx.index(&ctx.digits(i).unwrap()).unwrap(), i);
            }
        }
    }

    #[test]
    fn codec_rejects_bad_input() {
        let ctx = GroupContext::new(3, 2).unwrap();
        assert!(ctx.digits(9).is_err());
        assert!(ctx.index(&[3, 0]).is_err());
        assert!(ctx.index(&[1]).is_err());
    }

    #[test]
    fn vector_ops_examples() {
        let ctx = GroupContext::new(2, 2).unwrap();
        let a = ctx.index(&[1, 0]).unwrap();
        let b = ctx.index(&[1, 1]).unwrap();
        assert_eq!(ctx.digits(ctx.add(a, b)).unwrap(), vec![0, 1]);

        let ctx3 = GroupContext::new(3, 2).unwrap();
        let x = ctx3.index(&[2, 1]).unwrap();
        assert_eq!(ctx3.digits(ctx3.neg(x)).unwrap(), vec![1, 2]);
        let t = ctx3.index(&[1, 1]).unwrap();
        assert_eq!(ctx3.dot(x, t), 0);
    }

    #[test]
    fn annihilator_absorbs_redundant_rows() {
        let ctx = GroupContext::new(2, 3).unwrap();
        let h = Subspace::from_annihilator(&ctx, &[f(&ctx, &[1, 0, 0]), f(&ctx, &[1, 0, 0])]).unwrap();
        assert_eq!(h.codim(), 1);
        assert!(!h.contains(&ctx, ctx.index(&[1, 0, 0]).unwrap()));
        assert!(h.contains(&ctx, ctx.index(&[0, 1, 1]).unwrap()));

        let h2 = Subspace::from_annihilator(
            &ctx,
            &[f(&ctx, &[1, 0, 0]), f(&ctx, &[0, 1, 0]), f(&ctx, &[1, 1, 0])],
        )
        .unwrap();
        assert_eq!(h2.codim(), 2);

        let g = Subspace::from_annihilator(&ctx, &[]).unwrap();
        assert_eq!(g.codim(), 0);
        assert!(g.contains(&ctx, 5));
    }

    #[test]
    fn membership_counts_match_size() {
        for (p, n) in [(2u8, 6usize), (3, 4)] {
            let ctx = GroupContext::new(p, n).unwrap();
            let h = Subspace::from_annihilator_indices(&ctx, &[1, ctx.basis(2)]).unwrap();
            let count = (0..ctx.order()).filter(|&x| h.contains(&ctx, x)).count();
            assert_eq!(count, h.size());
            assert!(h.contains(&ctx, 0));
        }
    }

    #[test]
    fn transversal_covers_group_without_overlap() {
        let ctx = GroupContext::new(2, 6).unwrap();
        // a few deterministic annihilators of varying rank
        for rows in [vec![3usize], vec![3, 5], vec![1, 2, 4], vec![7, 9, 33, 12]] {
            let h = Subspace::from_annihilator_indices(&ctx, &rows).unwrap();
            let reps = h.transversal(&ctx).unwrap();
            assert_eq!(reps.len() * h.size(), ctx.order());
            // brute-force coset enumeration oracle: mark every x by rep coset
            let mut covered = vec![false; ctx.order()];
            for &r in &reps {
                for x in 0..ctx.order() {
                    if h.contains(&ctx, ctx.sub(x, r)) {
                        assert!(!covered[x], "coset overlap at {x}");
                        covered[x] = true;
                    }
                }
            }
            assert!(covered.iter().all(|&c| c));
        }
        let g = Subspace::full(&ctx);
        assert_eq!(g.transversal(&ctx).unwrap(), vec![0]);
    }

    #[test]
    fn hyperplane_intersection_matches_kernel() {
        let ctx = GroupContext::new(2, 3).unwrap();
        let g = Subspace::full(&ctx);
        let h = g.intersect_hyperplane(&ctx, 1).unwrap();
        assert_eq!(h.codim(), 1);
        // t already in annihilator: unchanged
        let same = h.intersect_hyperplane(&ctx, 1).unwrap();
        assert_eq!(same, h);
        // brute-force kernel check over all 8 points
        let t2 = ctx.index(&[0, 1, 0]).unwrap();
        let h2 = h.intersect_hyperplane(&ctx, t2).unwrap();
        assert_eq!(h2.codim(), 2);
        for x in 0..ctx.order() {
            let expect = ctx.dot(x, 1) == 0 && ctx.dot(x, t2) == 0;
            assert_eq!(h2.contains(&ctx, x), expect);
            assert!(!h2.contains(&ctx, x) || h.contains(&ctx, x));
        }
        assert!(g.intersect_hyperplane(&ctx, 0).is_err());
    }

    #[test]
    fn members_and_annihilator_span() {
        let ctx = GroupContext::new(3, 3).unwrap();
        let h = Subspace::from_annihilator_indices(&ctx, &[ctx.index(&[1, 2, 0]).unwrap()]).unwrap();
        let members = h.members(&ctx);
        assert_eq!(members.len(), h.size());
        for &x in &members {
            assert!(h.contains(&ctx, x));
        }
        let span = h.annihilator_span(&ctx).unwrap();
        assert_eq!(span.len(), h.coset_count());
        for &t in &span {
            assert!(h.annihilates(&ctx, t));
        }
        assert!(!h.annihilates(&ctx, ctx.index(&[0, 0, 1]).unwrap()));
    }
}
