//! Dense harmonic analysis on `F_p^n`.
//!
//! Conventions follow the averaged forward transform and unnormalized
//! inverse:
//!
//! ```text
//! f^(t) = E_x f(x) w^(x.t)        w = exp(2 pi i / p)
//! f(x)  = sum_t f^(t) w^(-x.t)
//! E_x |f(x)|^2 = sum_t |f^(t)|^2
//! ```

use crate::error::{Error, Result};
use crate::group::{GroupContext, Subspace};
use crate::set::SetIndicator;
use num_complex::Complex64;

/// A complex-valued function on the group, indexed by the element codec.
#[derive(Clone, Debug)]
pub struct DenseFunction {
    p: u8,
    n: usize,
    pub values: Vec<Complex64>,
}

/// Fourier coefficients, indexed by the functional codec.
#[derive(Clone, Debug)]
pub struct Spectrum {
    p: u8,
    n: usize,
    pub values: Vec<Complex64>,
}

impl DenseFunction {
    pub fn new(ctx: &GroupContext, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != ctx.order() {
            return Err(Error::LengthMismatch { expected: ctx.order(), got: values.len() });
        }
        Ok(DenseFunction { p: ctx.p(), n: ctx.n(), values })
    }

    pub fn zero(ctx: &GroupContext) -> Self {
        DenseFunction { p: ctx.p(), n: ctx.n(), values: vec![Complex64::ZERO; ctx.order()] }
    }

    pub fn constant(ctx: &GroupContext, c: f64) -> Self {
        DenseFunction { p: ctx.p(), n: ctx.n(), values: vec![Complex64::new(c, 0.0); ctx.order()] }
    }

    pub fn indicator(ctx: &GroupContext, a: &SetIndicator) -> Self {
        let mut f = Self::zero(ctx);
        for x in a.members() {
            f.values[x] = Complex64::ONE;
        }
        f
    }

    pub fn check_ctx(&self, ctx: &GroupContext) -> Result<()> {
        if self.p != ctx.p() || self.n != ctx.n() {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }
}

impl Spectrum {
    pub fn new(ctx: &GroupContext, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != ctx.order() {
            return Err(Error::LengthMismatch { expected: ctx.order(), got: values.len() });
        }
        Ok(Spectrum { p: ctx.p(), n: ctx.n(), values })
    }

    /// Largest coefficient modulus with its argmax index, ties broken by the
    /// minimal codec index. The predicate restricts the search domain.
    pub fn max_modulus_where<F: Fn(usize) -> bool>(&self, keep: F) -> (f64, usize) {
        let mut best = (0.0f64, 0usize);
        for (t, v) in self.values.iter().enumerate() {
            if keep(t) {
                let m = v.norm();
                if m > best.0 + 1e-15 {
                    best = (m, t);
                }
            }
        }
        best
    }
}

/// p-point roots of unity table, `w[j] = exp(sign * 2 pi i j / p)`.
fn roots(p: u8, sign: f64) -> Vec<Complex64> {
    (0..p as usize)
        .map(|j| Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI * j as f64 / p as f64))
        .collect()
}

/// In-place n-stage radix-p butterfly. Each stage applies the p-point kernel
/// `out[j] = sum_k in[k] * w^(jk)` along one coordinate axis.
fn butterfly(ctx: &GroupContext, buf: &mut [Complex64], sign: f64) {
    let p = ctx.p() as usize;
    let w = roots(ctx.p(), sign);
    let order = ctx.order();
    let mut tmp = vec![Complex64::ZERO; p];
    let mut stride = 1usize;
    for _ in 0..ctx.n() {
        let block = stride * p;
        for base in (0..order).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (j, t) in tmp.iter_mut().enumerate() {
                    let mut acc = Complex64::ZERO;
                    for k in 0..p {
                        acc += buf[start + k * stride] * w[j * k % p];
                    }
                    *t = acc;
                }
                for (j, t) in tmp.iter().enumerate() {
                    buf[start + j * stride] = *t;
                }
            }
        }
        stride = block;
    }
}

/// Forward transform, `O(n p^(n+1))` scalar operations.
pub fn dft(ctx: &GroupContext, f: &DenseFunction) -> Result<Spectrum> {
    f.check_ctx(ctx)?;
    let mut buf = f.values.clone();
    butterfly(ctx, &mut buf, 1.0);
    let scale = 1.0 / ctx.order() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
    Spectrum::new(ctx, buf)
}

/// Unnormalized inverse transform; `inverse_dft(dft(f)) = f` up to rounding.
pub fn inverse_dft(ctx: &GroupContext, s: &Spectrum) -> Result<DenseFunction> {
    if s.p != ctx.p() || s.n != ctx.n() {
        return Err(Error::ContextMismatch);
    }
    let mut buf = s.values.clone();
    butterfly(ctx, &mut buf, -1.0);
    DenseFunction::new(ctx, buf)
}

/// Both sides of Parseval's identity: `(E_x |f(x)|^2, sum_t |f^(t)|^2)`.
pub fn parseval_energy(ctx: &GroupContext, f: &DenseFunction) -> Result<(f64, f64)> {
    let time: f64 = f.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / ctx.order() as f64;
    let spec: f64 = dft(ctx, f)?.values.iter().map(|v| v.norm_sqr()).sum();
    Ok((time, spec))
}

/// Characteristic measure `mu_B(x) = (|G|/|B|) 1_B(x)`; mean 1 over G.
pub fn characteristic_measure(ctx: &GroupContext, b: &SetIndicator) -> Result<DenseFunction> {
    b.check_ctx(ctx)?;
    if b.is_empty() {
        return Err(Error::EmptySet);
    }
    let scale = ctx.order() as f64 / b.len() as f64;
    let mut f = DenseFunction::zero(ctx);
    for x in b.members() {
        f.values[x] = Complex64::new(scale, 0.0);
    }
    Ok(f)
}

/// Density of A on the coset `y + H`: `|(A - y) ∩ H| / |H|`.
pub fn coset_density(ctx: &GroupContext, a: &SetIndicator, h: &Subspace, y: usize) -> f64 {
    let count = h
        .members(ctx)
        .into_iter()
        .filter(|&x| a.contains(ctx.add(x, y)))
        .count();
    count as f64 / h.size() as f64
}

/// Balanced indicator of A relative to the coset `y + H`:
/// `f(x) = (1_{(A-y) ∩ H}(x) - a_{y+H}) mu_H(x)`.
/// Mean zero; its spectrum vanishes on `H^perp`.
pub fn balanced_function(
    ctx: &GroupContext,
    a: &SetIndicator,
    h: &Subspace,
    y: usize,
) -> Result<DenseFunction> {
    a.check_ctx(ctx)?;
    let members = h.members(ctx);
    let hits = members.iter().filter(|&&x| a.contains(ctx.add(x, y))).count();
    let alpha = hits as f64 / members.len() as f64;
    let mu = ctx.order() as f64 / members.len() as f64;
    let mut f = DenseFunction::zero(ctx);
    for &x in &members {
        let ind = if a.contains(ctx.add(x, y)) { 1.0 } else { 0.0 };
        f.values[x] = Complex64::new((ind - alpha) * mu, 0.0);
    }
    Ok(f)
}
