//! Canonical fixtures and randomized set models, each tagged with provenance
//! and machine-checkable claims.

use crate::error::{Error, Result};
use crate::group::{GroupContext, Subspace};
use crate::set::SetIndicator;
use crate::stability::{
    cover_or_witness, find_order_witness, verify_cover, verify_order_witness, CoverCertificate,
    CoverOrWitness, Effort, OrderWitness, SearchOutcome, SetSide,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// A property attached to a fixture as data. Claims are not trusted: each one
/// has a checker, and the test suite executes them.
#[derive(Clone, Debug, Serialize)]
pub enum Claim {
    /// the witness verifies for the set (or its complement)
    WitnessValid { side: SetSide, witness: OrderWitness },
    /// exhaustive search finds no k-order witness
    Stable { k: usize, exhaustive: bool },
    /// the cover certificate verifies
    CoverValid { certificate: CoverCertificate },
    /// uniformity at y = 0 reports at least this sup-coefficient for every
    /// positive-dimension subspace
    NonUniformFloor { floor: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct FixtureSpec {
    pub name: String,
    pub p: u8,
    pub n: usize,
    pub seed: Option<u64>,
    pub claims: Vec<Claim>,
}

/// Execute one claim against the set. `Stable` claims honor the effort
/// budget; a budget-exhausted search reports failure (the claim is then
/// unconfirmed, not refuted).
pub fn check_claim(ctx: &GroupContext, a: &SetIndicator, claim: &Claim, effort: Effort) -> Result<bool> {
    match claim {
        Claim::WitnessValid { side, witness } => {
            let target = match side {
                SetSide::Set => a.clone(),
                SetSide::Complement => a.complement(),
            };
            Ok(verify_order_witness(ctx, &target, witness))
        }
        Claim::Stable { k, .. } => {
            Ok(find_order_witness(ctx, a, *k, effort)? == SearchOutcome::NoneFound)
        }
        Claim::CoverValid { certificate } => Ok(verify_cover(ctx, a, certificate)),
        Claim::NonUniformFloor { floor } => {
            // spot-check a handful of deterministic positive-dimension subspaces
            let mut rng = ChaCha8Rng::seed_from_u64(0xf100);
            for _ in 0..10 {
                let rows: Vec<usize> = (0..rng.gen_range(0..ctx.n()))
                    .map(|_| rng.gen_range(1..ctx.order()))
                    .collect();
                let v = Subspace::from_annihilator_indices(ctx, &rows)?;
                if v.dim() == 0 {
                    continue;
                }
                let r = crate::regularity::uniformity(ctx, a, &v, 0, 0.0)?;
                if r.sup_coeff < floor - 1e-9 {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// The set from eq. (5.1) in F_3^n: first nonzero coordinate equals 1.
pub fn green_sanders_set(ctx: &GroupContext) -> SetIndicator {
    debug_assert_eq!(ctx.p(), 3);
    let mut s = SetIndicator::empty(ctx);
    for x in 0..ctx.order() {
        let digits = ctx.digits(x).expect("index in range");
        if digits.iter().find(|&&d| d != 0) == Some(&1) {
            s.insert(x);
        }
    }
    s.with_source(format!("green_sanders p=3 n={}", ctx.n()))
}

/// Complement of {e_i + e_j : i <= j} in F_2^n (0 is in the pair-sum set as
/// e_i + e_i).
pub fn pairsum_complement_set(ctx: &GroupContext) -> SetIndicator {
    debug_assert_eq!(ctx.p(), 2);
    let mut b = SetIndicator::empty(ctx);
    for i in 1..=ctx.n() {
        for j in i..=ctx.n() {
            b.insert(ctx.add(ctx.basis(i), ctx.basis(j)));
        }
    }
    b.complement().with_source(format!("pairsum_complement p=2 n={}", ctx.n()))
}

/// Canonical fixtures with attached claims.
pub fn gen_example(name: &str, p: u8, n: usize, seed: Option<u64>) -> Result<(SetIndicator, FixtureSpec)> {
    let ctx = GroupContext::new(p, n)?;
    let mut claims = Vec::new();
    let set = match name {
        "subgroup" => {
            let seed = seed.unwrap_or(0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<usize> = (0..rng.gen_range(1..=n.min(3)))
                .map(|_| rng.gen_range(1..ctx.order()))
                .collect();
            let h = Subspace::from_annihilator_indices(&ctx, &rows)?;
            claims.push(Claim::Stable { k: 2, exhaustive: true });
            SetIndicator::from_subspace(&ctx, &h).with_source(format!("subgroup p={p} n={n} seed={seed}"))
        }
        "basis_set" => {
            if p != 2 || n < 4 {
                return Err(Error::InvalidFixtureParams("basis_set requires p=2, n>=4".into()));
            }
            let e = |i: usize| ctx.basis(i);
            claims.push(Claim::WitnessValid {
                side: SetSide::Set,
                witness: OrderWitness {
                    k: 3,
                    a: vec![0, ctx.add(e(2), e(3)), ctx.add(e(3), e(4))],
                    b: vec![e(1), e(2), e(3)],
                },
            });
            claims.push(Claim::Stable { k: 4, exhaustive: n <= 5 });
            SetIndicator::from_members(&ctx, (1..=n).map(e))?.with_source(format!("basis_set p=2 n={n}"))
        }
        "pairsum_complement" => {
            if p != 2 || n < 3 {
                return Err(Error::InvalidFixtureParams("pairsum_complement requires p=2, n>=3".into()));
            }
            let a = pairsum_complement_set(&ctx);
            // G = A ∪ (A+e_1) ∪ (A+e_n), i.e. the union of A - g over the
            // negated shifts (self-inverse in F_2)
            claims.push(Claim::CoverValid {
                certificate: CoverCertificate {
                    side: SetSide::Set,
                    translates: vec![0, ctx.basis(1), ctx.basis(n)],
                },
            });
            claims.push(Claim::WitnessValid {
                side: SetSide::Complement,
                witness: OrderWitness {
                    k: n,
                    a: (1..=n).map(|i| ctx.basis(i)).collect(),
                    b: (1..=n).map(|j| ctx.basis(j)).collect(),
                },
            });
            a
        }
        "green_sanders" => {
            if p != 3 || n < 3 {
                return Err(Error::InvalidFixtureParams("green_sanders requires p=3, n>=3".into()));
            }
            let k = n - 2;
            let a_elems: Vec<usize> = (1..=k).map(|i| ctx.basis(i + 1)).collect();
            let b_elems: Vec<usize> = (1..=k)
                .map(|j| {
                    let mut acc = 0usize;
                    for t in (j + 2)..=n {
                        acc = ctx.add(acc, ctx.scale(2, ctx.basis(t)));
                    }
                    acc
                })
                .collect();
            claims.push(Claim::WitnessValid {
                side: SetSide::Set,
                witness: OrderWitness { k, a: a_elems, b: b_elems },
            });
            claims.push(Claim::NonUniformFloor { floor: 3.0f64.sqrt() / 6.0 });
            green_sanders_set(&ctx)
        }
        other => return Err(Error::UnknownFixture(other.into())),
    };
    let spec = FixtureSpec { name: name.into(), p, n, seed, claims };
    Ok((set, spec))
}

/// Union of `count` distinct seeded-random cosets of H; 0-good for H by
/// construction.
pub fn gen_union_of_cosets(ctx: &GroupContext, h: &Subspace, count: usize, seed: u64) -> Result<SetIndicator> {
    let total = h.coset_count();
    if count > total {
        return Err(Error::TooManyCosets { count, available: total });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![false; total];
    let mut picked = 0usize;
    while picked < count {
        let s = rng.gen_range(0..total);
        if !chosen[s] {
            chosen[s] = true;
            picked += 1;
        }
    }
    let mut out = SetIndicator::empty(ctx);
    for x in 0..ctx.order() {
        if chosen[h.syndrome(ctx, x)] {
            out.insert(x);
        }
    }
    Ok(out.with_source(format!("union_of_cosets codim={} count={count} seed={seed}", h.codim())))
}

/// A Δ B where B includes each element independently with probability `rate`.
/// Returns the perturbed set and the exact flip count.
pub fn gen_noisy(ctx: &GroupContext, a: &SetIndicator, rate: f64, seed: u64) -> Result<(SetIndicator, usize)> {
    a.check_ctx(ctx)?;
    debug_assert!((0.0..=1.0).contains(&rate));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = a.clone();
    let mut flips = 0usize;
    for x in 0..ctx.order() {
        let flip = match rate {
            r if r <= 0.0 => false,
            r if r >= 1.0 => true,
            r => rng.gen_bool(r),
        };
        if flip {
            out.toggle(x);
            flips += 1;
        }
    }
    Ok((out.with_source(format!("noisy rate={rate} seed={seed}")), flips))
}

/// Run every attached claim; used by the acceptance suite.
pub fn check_fixture(ctx: &GroupContext, a: &SetIndicator, spec: &FixtureSpec, effort: Effort) -> Result<Vec<bool>> {
    spec.claims.iter().map(|c| check_claim(ctx, a, c, effort)).collect()
}

/// Convenience for Corollary 2.8 checks: certificate from cover_or_witness.
pub fn cover_certificate_size(ctx: &GroupContext, a: &SetIndicator, k: usize) -> Result<Option<usize>> {
    match cover_or_witness(ctx, a, k)? {
        CoverOrWitness::Cover(c) => Ok(Some(c.translates.len())),
        CoverOrWitness::Witness { .. } => Ok(None),
    }
}
