//! Family parameters, lattice kinds and exact-rational parsing.

use std::fmt;
use std::str::FromStr;

use rug::{Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::precision::{PrecisionContext, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Weights `a^k / ((β)_k k!)`.
    GeneralizedCharlier,
    /// Weights `(γ)_k a^k / ((β)_k k!)`.
    GeneralizedMeixner,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::GeneralizedCharlier => f.write_str("charlier"),
            Family::GeneralizedMeixner => f.write_str("meixner"),
        }
    }
}

/// Parameters of a weight family, kept as exact rationals and converted to
/// context precision on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyParams {
    pub family: Family,
    pub a: Rational,
    pub beta: Rational,
    /// Only meaningful for the Meixner family.
    pub gamma: Option<Rational>,
}

/// Mixing parameter `t` of the bi-lattice measure `μ₁ + t μ₂`.
#[derive(Debug, Clone, PartialEq)]
pub enum Mix {
    Finite(Rational),
    /// Shifted measure only.
    Infinite,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Lattice {
    /// `ℕ`
    Plain,
    /// `ℕ + 1 - β`
    Shifted,
    /// `ℕ ∪ (ℕ + 1 - β)` with measure `μ₁ + t μ₂`.
    Bi(Mix),
}

impl Lattice {
    pub fn kind(&self) -> &'static str {
        match self {
            Lattice::Plain => "plain",
            Lattice::Shifted => "shifted",
            Lattice::Bi(_) => "bi",
        }
    }

    /// Coefficients `(c₁, c₂)` of the measure `c₁ μ₁ + c₂ μ₂`; `None` is a zero coefficient.
    pub(crate) fn components(&self) -> (Option<Rational>, Option<Rational>) {
        let one = || Some(Rational::from(1));
        match self {
            Lattice::Plain => (one(), None),
            Lattice::Shifted | Lattice::Bi(Mix::Infinite) => (None, one()),
            Lattice::Bi(Mix::Finite(t)) if *t == 0 => (one(), None),
            Lattice::Bi(Mix::Finite(t)) => (one(), Some(t.clone())),
        }
    }
}

impl fmt::Display for Mix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mix::Finite(t) => write!(f, "{t}"),
            Mix::Infinite => f.write_str("inf"),
        }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lattice::Bi(t) => write!(f, "bi(t={t})"),
            other => f.write_str(other.kind()),
        }
    }
}

pub(crate) fn is_nonpositive_integer(q: &Rational) -> bool {
    *q.denom() == 1 && *q <= 0
}

impl FamilyParams {
    pub fn charlier(a: Rational, beta: Rational) -> Self {
        FamilyParams {
            family: Family::GeneralizedCharlier,
            a,
            beta,
            gamma: None,
        }
    }

    pub fn meixner(a: Rational, beta: Rational, gamma: Rational) -> Self {
        FamilyParams {
            family: Family::GeneralizedMeixner,
            a,
            beta,
            gamma: Some(gamma),
        }
    }

    pub fn is_meixner(&self) -> bool {
        self.family == Family::GeneralizedMeixner
    }

    /// γ of a Meixner parameter set.
    pub fn gamma_param(&self) -> Result<&Rational> {
        self.gamma
            .as_ref()
            .filter(|_| self.is_meixner())
            .ok_or_else(|| Error::Validity("γ is only defined for the Meixner family".into()))
    }

    pub fn a_real(&self, ctx: &PrecisionContext) -> Real {
        ctx.rational(&self.a)
    }

    pub fn beta_real(&self, ctx: &PrecisionContext) -> Real {
        ctx.rational(&self.beta)
    }

    pub fn gamma_real(&self, ctx: &PrecisionContext) -> Result<Real> {
        Ok(ctx.rational(self.gamma_param()?))
    }

    /// Checks that the measure on `lattice` is positive for these parameters.
    pub fn validate(&self, lattice: &Lattice) -> Result<()> {
        let bad = |msg: String| Err(Error::Validity(msg));
        if self.a <= 0 {
            return bad(format!("a must be positive, got {}", self.a));
        }
        let beta = &self.beta;
        if self.is_meixner() != self.gamma.is_some() {
            return bad("γ must be given exactly for the Meixner family".into());
        }
        if let Lattice::Bi(Mix::Finite(t)) = lattice {
            if *t < 0 {
                return bad(format!("t must be nonnegative, got {t}"));
            }
        }
        let zero = Rational::new();
        let two = Rational::from(2);
        match (self.gamma.as_ref(), lattice) {
            (None, Lattice::Plain) => {
                if *beta <= 0 {
                    return bad(format!("lattice ℕ needs β > 0, got {beta}"));
                }
            }
            (None, Lattice::Shifted) => {
                if *beta >= 2 || is_nonpositive_integer(beta) {
                    return bad(format!(
                        "shifted lattice needs β < 2 and β ∉ {{0, -1, ...}}, got {beta}"
                    ));
                }
            }
            (None, Lattice::Bi(_)) => {
                if *beta <= 0 || *beta >= 2 {
                    return bad(format!("bi-lattice needs 0 < β < 2, got {beta}"));
                }
            }
            (Some(g), Lattice::Plain) => {
                if *beta <= 0 || *g <= 0 {
                    return bad(format!("lattice ℕ needs β, γ > 0, got β = {beta}, γ = {g}"));
                }
            }
            (Some(g), Lattice::Shifted) => {
                let shift = Rational::from(beta - 1u32);
                if *beta >= 2
                    || *g <= shift
                    || is_nonpositive_integer(beta)
                    || is_nonpositive_integer(g)
                {
                    return bad(format!(
                        "shifted lattice needs β < 2, γ > β - 1 and β, γ ∉ {{0, -1, ...}}, got β = {beta}, γ = {g}"
                    ));
                }
            }
            (Some(g), Lattice::Bi(_)) => {
                let shift = Rational::from(beta - 1u32);
                let floor = if shift > zero { shift } else { zero };
                if *beta <= 0 || *beta >= two || *g <= floor {
                    return bad(format!(
                        "bi-lattice needs 0 < β < 2 and γ > max(0, β - 1), got β = {beta}, γ = {g}"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Parses `"3"`, `"-1/3"`, `"0.7"`, `"2.5e-3"` into an exact rational.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    let err = || Error::Parse {
        what: "rational",
        input: input.to_string(),
    };
    if s.is_empty() {
        return Err(err());
    }
    if s.contains('/') {
        return Rational::from_str(s).map_err(|_| err());
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| err())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all = format!("{int_part}{frac_part}");
    let num = Integer::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| err())?;
    let scale = exp - frac_part.len() as i32;
    let mut q = if scale >= 0 {
        Rational::from(num * Integer::from(Integer::u_pow_u(10, scale as u32)))
    } else {
        Rational::from((num, Integer::from(Integer::u_pow_u(10, (-scale) as u32))))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

/// Parses a mixing parameter; `inf`, `infinity` and `∞` give [`Mix::Infinite`].
pub fn parse_mix(input: &str) -> Result<Mix> {
    match input.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => Ok(Mix::Infinite),
        _ => parse_rational(input).map(Mix::Finite),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse_rational("1/3").unwrap(), q(1, 3));
        assert_eq!(parse_rational("-2/6").unwrap(), q(-1, 3));
        assert_eq!(parse_rational("0.7").unwrap(), q(7, 10));
        assert_eq!(parse_rational("9/10").unwrap(), parse_rational("0.9").unwrap());
        assert_eq!(parse_rational("3").unwrap(), q(3, 1));
        assert_eq!(parse_rational("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_rational("2.5E2").unwrap(), q(250, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        for bad in ["", "abc", "1/0x", "1.2.3", "--1", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn parses_mix() {
        assert_eq!(parse_mix("inf").unwrap(), Mix::Infinite);
        assert_eq!(parse_mix("∞").unwrap(), Mix::Infinite);
        assert_eq!(parse_mix("10").unwrap(), Mix::Finite(q(10, 1)));
    }

    #[test]
    fn validity_table() {
        let ch = |b: (i64, i64)| FamilyParams::charlier(q(3, 1), q(b.0, b.1));
        assert!(ch((1, 3)).validate(&Lattice::Plain).is_ok());
        assert!(ch((-1, 3)).validate(&Lattice::Plain).is_err());
        assert!(ch((-1, 3)).validate(&Lattice::Shifted).is_ok());
        assert!(ch((0, 1)).validate(&Lattice::Shifted).is_err());
        assert!(ch((2, 1)).validate(&Lattice::Shifted).is_err());
        assert!(ch((3, 2)).validate(&Lattice::Bi(Mix::Finite(q(1, 1)))).is_ok());
        assert!(ch((5, 2)).validate(&Lattice::Bi(Mix::Infinite)).is_err());
        assert!(ch((1, 3)).validate(&Lattice::Bi(Mix::Finite(q(-1, 1)))).is_err());
        assert!(FamilyParams::charlier(q(0, 1), q(1, 3)).validate(&Lattice::Plain).is_err());

        let mx = |b: (i64, i64), g: (i64, i64)| FamilyParams::meixner(q(3, 1), q(b.0, b.1), q(g.0, g.1));
        assert!(mx((2, 3), (9, 10)).validate(&Lattice::Plain).is_ok());
        assert!(mx((2, 3), (9, 10)).validate(&Lattice::Shifted).is_ok());
        assert!(mx((2, 3), (9, 10)).validate(&Lattice::Bi(Mix::Finite(q(2, 1)))).is_ok());
        assert!(mx((3, 2), (1, 4)).validate(&Lattice::Shifted).is_err());
        assert!(mx((3, 2), (1, 4)).validate(&Lattice::Bi(Mix::Infinite)).is_err());
        assert!(mx((1, 2), (-1, 4)).validate(&Lattice::Shifted).is_ok());
        assert!(mx((1, 2), (-1, 4)).validate(&Lattice::Bi(Mix::Infinite)).is_err());
        assert!(mx((1, 2), (0, 1)).validate(&Lattice::Plain).is_err());
    }

    #[test]
    fn charlier_has_no_gamma() {
        let p = FamilyParams::charlier(q(3, 1), q(1, 3));
        assert!(p.gamma_param().is_err());
    }
}
