//! Dense 0/1 indicators of subsets of `F_p^n`, bit-packed in codec order.

use crate::error::{Error, Result};
use crate::group::{GroupContext, Subspace};

#[derive(Clone, Debug)]
pub struct SetIndicator {
    p: u8,
    n: usize,
    order: usize,
    words: Vec<u64>,
    size: usize,
    source: Option<String>,
}

/// Equality is set equality; the provenance tag is metadata and ignored.
impl PartialEq for SetIndicator {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.words == other.words
    }
}

impl Eq for SetIndicator {}

impl SetIndicator {
    pub fn empty(ctx: &GroupContext) -> Self {
        let order = ctx.order();
        SetIndicator {
            p: ctx.p(),
            n: ctx.n(),
            order,
            words: vec![0; order.div_ceil(64)],
            size: 0,
            source: None,
        }
    }

    pub fn full(ctx: &GroupContext) -> Self {
        let mut s = Self::empty(ctx);
        for w in s.words.iter_mut() {
            *w = !0;
        }
        s.clear_tail();
        s.size = s.order;
        s
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(ctx: &GroupContext, members: I) -> Result<Self> {
        let mut s = Self::empty(ctx);
        for x in members {
            if x >= s.order {
                return Err(Error::IndexOutOfRange { index: x, order: s.order });
            }
            s.insert(x);
        }
        Ok(s)
    }

    pub fn from_subspace(ctx: &GroupContext, h: &Subspace) -> Self {
        let mut s = Self::empty(ctx);
        for x in h.members(ctx) {
            s.insert(x);
        }
        s
    }

    fn clear_tail(&mut self) {
        let rem = self.order % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn check_ctx(&self, ctx: &GroupContext) -> Result<()> {
        if self.p != ctx.p() || self.n != ctx.n() {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn is_full(&self) -> bool {
        self.size == self.order
    }

    pub fn density(&self) -> f64 {
        self.size as f64 / self.order as f64
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn with_source(mut self, tag: impl Into<String>) -> Self {
        self.source = Some(tag.into());
        self
    }

    pub fn contains(&self, x: usize) -> bool {
        debug_assert!(x < self.order);
        self.words[x >> 6] >> (x & 63) & 1 == 1
    }

    pub fn insert(&mut self, x: usize) {
        debug_assert!(x < self.order);
        let w = &mut self.words[x >> 6];
        let bit = 1u64 << (x & 63);
        if *w & bit == 0 {
            *w |= bit;
            self.size += 1;
        }
    }

    pub fn remove(&mut self, x: usize) {
        debug_assert!(x < self.order);
        let w = &mut self.words[x >> 6];
        let bit = 1u64 << (x & 63);
        if *w & bit != 0 {
            *w &= !bit;
            self.size -= 1;
        }
    }

    pub fn toggle(&mut self, x: usize) {
        if self.contains(x) {
            self.remove(x);
        } else {
            self.insert(x);
        }
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for w in out.words.iter_mut() {
            *w = !*w;
        }
        out.clear_tail();
        out.size = out.order - self.size;
        out.source = None;
        out
    }

    /// Indicator of `A + g`.
    pub fn translate(&self, ctx: &GroupContext, g: usize) -> Self {
        let mut out = Self::empty(ctx);
        for x in self.members() {
            out.insert(ctx.add(x, g));
        }
        out
    }

    pub fn union_with(&mut self, other: &Self) {
        debug_assert_eq!(self.order, other.order);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        self.size = self.words.iter().map(|w| w.count_ones() as usize).sum();
    }

    pub fn intersect_with(&mut self, other: &Self) {
        debug_assert_eq!(self.order, other.order);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        self.size = self.words.iter().map(|w| w.count_ones() as usize).sum();
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.intersect_with(other);
        out.source = None;
        out
    }

    pub fn intersection_size(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn symmetric_difference_size(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        out.size = out.words.iter().map(|w| w.count_ones() as usize).sum();
        out.source = None;
        out
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }

    /// First member, by index order.
    pub fn min_member(&self) -> Option<usize> {
        self.members().next()
    }
}

/// Exact sumset `{a + b : a in A, b in B}`.
pub fn sumset(ctx: &GroupContext, a: &SetIndicator, b: &SetIndicator) -> Result<SetIndicator> {
    a.check_ctx(ctx)?;
    b.check_ctx(ctx)?;
    let mut out = SetIndicator::empty(ctx);
    let b_members: Vec<usize> = b.members().collect();
    for x in a.members() {
        for &y in &b_members {
            out.insert(ctx.add(x, y));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Subspace;

    #[test]
    fn sumset_examples() {
        let ctx = GroupContext::new(2, 4).unwrap();
        // A = {0}
        let a = SetIndicator::from_members(&ctx, [0]).unwrap();
        let s = sumset(&ctx, &a, &a).unwrap();
        assert_eq!(s, a);

        // A = H a subspace: A + A = H
        let h = Subspace::from_annihilator_indices(&ctx, &[3]).unwrap();
        let hset = SetIndicator::from_subspace(&ctx, &h);
        assert_eq!(sumset(&ctx, &hset, &hset).unwrap(), hset);

        // A = {e_1..e_4}: |A+A| = 7
        let basis = SetIndicator::from_members(&ctx, (1..=4).map(|i| ctx.basis(i))).unwrap();
        assert_eq!(sumset(&ctx, &basis, &basis).unwrap().len(), 7);
    }

    #[test]
    fn complement_and_translate() {
        let ctx = GroupContext::new(3, 3).unwrap();
        let a = SetIndicator::from_members(&ctx, [0, 5, 11, 26]).unwrap();
        let c = a.complement();
        assert_eq!(c.len(), ctx.order() - 4);
        assert!(!c.contains(5));
        let t = a.translate(&ctx, ctx.basis(1));
        assert_eq!(t.len(), a.len());
        assert!(t.contains(ctx.add(5, 1)));
        // translate by 0 is identity
        assert_eq!(a.translate(&ctx, 0), a);
    }

    #[test]
    fn member_iteration_and_counts() {
        let ctx = GroupContext::new(2, 7).unwrap();
        let mut a = SetIndicator::empty(&ctx);
        for x in [0usize, 1, 63, 64, 65, 127] {
            a.insert(x);
        }
        assert_eq!(a.members().collect::<Vec<_>>(), vec![0, 1, 63, 64, 65, 127]);
        assert_eq!(a.len(), 6);
        a.remove(64);
        assert_eq!(a.len(), 5);
        assert_eq!(a.min_member(), Some(0));
    }
}
