//! Arbitrary-precision budget arithmetic for the stability bounds, including
//! quantities far beyond exact representation (power towers), tracked as
//! iterated exponentials with deterministic rendering.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;
use std::fmt;

/// Largest exponent (in bits) we keep exact before switching to the
/// iterated-exponential form.
const EXACT_BITS_CAP: u64 = 1 << 16;

/// A nonnegative magnitude: either an exact integer or `2^m` for another
/// magnitude m. Values beyond the exact cap keep only the dominant term of
/// the exponent, which is all that survives at these scales; construction is
/// deterministic so renders are stable across runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Magnitude {
    Exact(BigUint),
    Exp2(Box<Magnitude>),
}

impl Magnitude {
    pub fn from_u64(v: u64) -> Self {
        Magnitude::Exact(BigUint::from(v))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Magnitude::Exact(_))
    }

    pub fn add_u64(&self, c: u64) -> Magnitude {
        match self {
            Magnitude::Exact(v) => Magnitude::Exact(v + c),
            // 2^m + c = 2^m at this scale
            Magnitude::Exp2(_) => self.clone(),
        }
    }

    /// Multiply by 2^s.
    pub fn shl_u64(&self, s: u64) -> Magnitude {
        match self {
            Magnitude::Exact(v) => {
                if v.bits() + s <= EXACT_BITS_CAP {
                    Magnitude::Exact(v << s)
                } else {
                    Magnitude::Exp2(Box::new(Magnitude::Exact(
                        BigUint::from(v.bits().saturating_sub(1)) + s,
                    )))
                }
            }
            Magnitude::Exp2(e) => Magnitude::Exp2(Box::new(e.add_u64(s))),
        }
    }

    /// The square of the value.
    pub fn square(&self) -> Magnitude {
        match self {
            Magnitude::Exact(v) => {
                if 2 * v.bits() <= EXACT_BITS_CAP {
                    Magnitude::Exact(v * v)
                } else {
                    Magnitude::Exp2(Box::new(Magnitude::Exact(BigUint::from(
                        2 * v.bits().saturating_sub(1),
                    ))))
                }
            }
            Magnitude::Exp2(e) => Magnitude::Exp2(Box::new(e.shl_u64(1))),
        }
    }

    /// 2^self.
    pub fn exp2(&self) -> Magnitude {
        match self {
            Magnitude::Exact(v) => {
                if let Ok(s) = u64::try_from(v.clone()) {
                    if s <= EXACT_BITS_CAP {
                        return Magnitude::Exact(BigUint::one() << s);
                    }
                }
                Magnitude::Exp2(Box::new(self.clone()))
            }
            Magnitude::Exp2(_) => Magnitude::Exp2(Box::new(self.clone())),
        }
    }

    /// Decimal digit count when exact, otherwise none (tower form).
    pub fn decimal_digits(&self) -> Option<u64> {
        match self {
            Magnitude::Exact(v) => Some(v.to_str_radix(10).len() as u64),
            Magnitude::Exp2(_) => None,
        }
    }

    /// Deterministic human rendering: small exacts in decimal, large exacts
    /// by digit count, towers as nested "2^(...)".
    pub fn render(&self) -> String {
        match self {
            Magnitude::Exact(v) => {
                let dec = v.to_str_radix(10);
                if dec.len() <= 40 {
                    dec
                } else {
                    format!("{}-digit integer starting {}", dec.len(), &dec[..12])
                }
            }
            Magnitude::Exp2(e) => format!("2^({})", e.render()),
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for Magnitude {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

/// h(k, l) = (k + l)·2^(k+l) + 1 for exact small arguments.
pub fn h_exact(k: u64, l: u64) -> BigUint {
    let s = k + l;
    BigUint::from(s) * (BigUint::one() << s) + 1u32
}

/// h(k, y) for a magnitude-valued y.
pub fn h_mag(k: u64, y: &Magnitude) -> Magnitude {
    match y {
        Magnitude::Exact(v) if v.bits() + k <= EXACT_BITS_CAP => {
            let s = v + k;
            if let Ok(shift) = u64::try_from(s.clone()) {
                if shift <= EXACT_BITS_CAP {
                    return Magnitude::Exact(&s * (BigUint::one() << shift) + 1u32);
                }
            }
            // (k+y)·2^(k+y) + 1 ~ 2^(k + y + log2(k+y))
            let exp = Magnitude::Exact(s.clone() + (s.bits() - 1));
            Magnitude::Exp2(Box::new(exp))
        }
        _ => {
            let sum = y.add_u64(k);
            let exp = match &sum {
                Magnitude::Exact(v) => Magnitude::Exact(v + (v.bits().saturating_sub(1))),
                m => m.clone(),
            };
            Magnitude::Exp2(Box::new(exp))
        }
    }
}

/// Which definition of f_k the iteration uses (the source states both).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FVariant {
    /// f_k(y) = h(k+1, y)
    Text,
    /// f_k(y) = h(k, y)
    Statement,
}

/// f_k^i(k): f^{-1} = 2, f^0 = k, f^i = f(f^{i-1}).
pub fn f_iterate(k: u64, variant: FVariant, i: i64) -> Magnitude {
    let arg = match variant {
        FVariant::Text => k + 1,
        FVariant::Statement => k,
    };
    if i < 0 {
        return Magnitude::from_u64(2);
    }
    let mut v = Magnitude::from_u64(k);
    for _ in 0..i {
        v = h_mag(arg, &v);
    }
    v
}

pub fn d_max(k: u64) -> u64 {
    (1u64 << (k + 2)) - 3
}

/// max{ d·⌊2(4/μ)^{2D}⌋, d·⌊2·4^{D²}⌋ } at magnitude precision.
pub fn codim_bound(d: u64, big_d: &Magnitude, mu: f64) -> Magnitude {
    // (4/μ)^{2D} = 2^(2D·log2(4/μ)); the log factor is absorbed unless D is
    // still exact and small.
    let log_ratio = (4.0 / mu).log2();
    let term1 = match big_d {
        Magnitude::Exact(v) if v.bits() < 40 => {
            let dv = u64::try_from(v.clone()).unwrap();
            let exp = (2.0 * dv as f64 * log_ratio).floor() as u64;
            Magnitude::Exact(BigUint::from(exp)).exp2().shl_u64(1)
        }
        _ => {
            let two_d = big_d.shl_u64(1);
            let bump = log_ratio.log2().max(0.0).ceil() as u64;
            two_d.add_u64(bump).exp2()
        }
    };
    let term2 = big_d.square().shl_u64(1).exp2().shl_u64(1); // 2·4^{D²} = 2^(2D²+1)
    // both terms are towers at any real k; pick the larger by tower depth
    // then exponent comparison, deterministically
    let chosen = if deeper_or_equal(&term2, &term1) { term2 } else { term1 };
    // multiply by d: absorbed unless exact
    match &chosen {
        Magnitude::Exact(v) => Magnitude::Exact(v * d),
        Magnitude::Exp2(_) => chosen,
    }
}

fn depth(m: &Magnitude) -> u64 {
    match m {
        Magnitude::Exact(_) => 0,
        Magnitude::Exp2(e) => 1 + depth(e),
    }
}

fn deeper_or_equal(a: &Magnitude, b: &Magnitude) -> bool {
    match depth(a).cmp(&depth(b)) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => match (a, b) {
            (Magnitude::Exact(x), Magnitude::Exact(y)) => x >= y,
            (Magnitude::Exp2(x), Magnitude::Exp2(y)) => deeper_or_equal(x, y),
            _ => unreachable!(),
        },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityBudget {
    pub k: u64,
    pub ell: u64,
    pub mu: f64,
    pub epsilon: f64,
    pub h_k_ell: String,
    pub d_max: u64,
    pub m: u64,
    /// f_k^{-1}, f_k^0, f_k^1, f_k^2 under f_k(y) = h(k+1, y)
    pub f_text_iterates: Vec<Magnitude>,
    /// the same iterates under f_k(y) = h(k, y)
    pub f_statement_iterates: Vec<Magnitude>,
    /// D = f_k^{d_max}(k), both variants
    pub d_big_text: Magnitude,
    pub d_big_statement: Magnitude,
    pub codim_bound_text: Magnitude,
    pub codim_bound_statement: Magnitude,
    /// -log2 of the nominal internal ε = min{(μ/4)^{2D}, (1/4)^{D²}}
    pub nominal_epsilon_neg_log2: Magnitude,
}

pub fn budget_eval(k: u64, ell: u64, mu: f64, epsilon: f64) -> StabilityBudget {
    debug_assert!(k >= 2);
    let d = d_max(k);
    let iters = |variant| (-1..=2).map(|i| f_iterate(k, variant, i)).collect::<Vec<_>>();
    let d_big_text = f_iterate(k, FVariant::Text, d as i64);
    let d_big_statement = f_iterate(k, FVariant::Statement, d as i64);
    // -log2 ε = max{2D·log2(4/μ), 2D²}; dominated by 2D² at any real k
    let nominal = d_big_text.square().shl_u64(1);
    StabilityBudget {
        k,
        ell,
        mu,
        epsilon,
        h_k_ell: h_exact(k, ell).to_str_radix(10),
        d_max: d,
        m: (2.0 / epsilon).floor() as u64,
        f_text_iterates: iters(FVariant::Text),
        f_statement_iterates: iters(FVariant::Statement),
        codim_bound_text: codim_bound(d, &d_big_text, mu),
        codim_bound_statement: codim_bound(d, &d_big_statement, mu),
        d_big_text,
        d_big_statement,
        nominal_epsilon_neg_log2: nominal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_values() {
        assert_eq!(h_exact(2, 2), BigUint::from(65u32));
        assert_eq!(h_exact(3, 2), BigUint::from(161u32));
        assert_eq!(h_exact(1, 1), BigUint::from(9u32));
    }

    #[test]
    fn f_iterates_both_variants() {
        assert_eq!(f_iterate(2, FVariant::Text, -1), Magnitude::from_u64(2));
        assert_eq!(f_iterate(2, FVariant::Text, 0), Magnitude::from_u64(2));
        assert_eq!(f_iterate(2, FVariant::Text, 1), Magnitude::from_u64(161));
        assert_eq!(f_iterate(2, FVariant::Statement, 1), Magnitude::from_u64(65));
        // f^2 under the text variant: h(3, 161) = 164·2^164 + 1, still exact
        let f2 = f_iterate(2, FVariant::Text, 2);
        assert_eq!(f2, Magnitude::Exact(BigUint::from(164u32) * (BigUint::one() << 164u32) + 1u32));
        // f^3 leaves the exact range and becomes a tower
        let f3 = f_iterate(2, FVariant::Text, 3);
        assert!(!f3.is_exact());
    }

    #[test]
    fn budget_table_determinism() {
        let a = budget_eval(2, 2, 0.1, 0.1);
        let b = budget_eval(2, 2, 0.1, 0.1);
        assert_eq!(a.h_k_ell, "65");
        assert_eq!(a.d_max, 13);
        assert_eq!(a.m, 20);
        assert_eq!(a.d_big_text.render(), b.d_big_text.render());
        assert_eq!(a.codim_bound_text.render(), b.codim_bound_text.render());
        assert_eq!(a.codim_bound_statement.render(), b.codim_bound_statement.render());
        assert_eq!(a.nominal_epsilon_neg_log2.render(), b.nominal_epsilon_neg_log2.render());
    }

    #[test]
    fn monotone_in_k() {
        // h and d_max grow with k; the D towers deepen
        assert!(h_exact(3, 2) > h_exact(2, 2));
        assert!(d_max(3) > d_max(2));
        let d2 = f_iterate(2, FVariant::Text, d_max(2) as i64);
        let d3 = f_iterate(3, FVariant::Text, d_max(3) as i64);
        assert!(deeper_or_equal(&d3, &d2));
    }

    #[test]
    fn magnitude_rendering() {
        assert_eq!(Magnitude::from_u64(65).render(), "65");
        let big = Magnitude::Exact(BigUint::one() << 400u32);
        assert!(big.render().contains("digit"));
        let tower = Magnitude::from_u64(100_000_000).exp2();
        assert_eq!(tower.render(), "2^(100000000)");
        assert_eq!(tower.exp2().render(), "2^(2^(100000000))");
    }
}
