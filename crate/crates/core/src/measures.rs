//! Weight functions, truncated discrete measures, moments and the closed-form
//! initial conditions `b₀` for every (family, lattice) pair.

use std::cmp::Ordering;

use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::params::{is_nonpositive_integer, FamilyParams, Lattice, Mix};
use crate::precision::{PrecisionContext, Real};
use crate::special::{bessel_i, gamma, kummer_m, kummer_m_regularized, rgamma};

/// Finitely many `(point, weight)` pairs standing in for an infinite discrete
/// measure, with a certified bound on what was cut off.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    points: Vec<Real>,
    weights: Vec<Real>,
    tail_bound: Real,
    max_order: usize,
}

impl DiscreteMeasure {
    /// A measure from explicit data. Points must be strictly ascending and
    /// weights positive; `tail_bound` is the caller's bound on the omitted part.
    pub fn from_parts(points: Vec<Real>, weights: Vec<Real>, tail_bound: Real, max_order: usize) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::Length {
                left: points.len(),
                right: weights.len(),
            });
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validity("points must be strictly ascending".into()));
        }
        if weights.iter().any(|w| *w <= 0) {
            return Err(Error::Validity("weights must be positive".into()));
        }
        Ok(DiscreteMeasure {
            points,
            weights,
            tail_bound,
            max_order,
        })
    }

    /// Points in strictly ascending order.
    pub fn points(&self) -> &[Real] {
        &self.points
    }

    pub fn weights(&self) -> &[Real] {
        &self.weights
    }

    /// Upper bound on `Σ (1 + x)^J w` over the omitted points, `J = max_order`.
    pub fn tail_bound(&self) -> &Real {
        &self.tail_bound
    }

    /// Highest moment order the truncation was certified for.
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Real, &Real)> {
        self.points.iter().zip(self.weights.iter())
    }

    /// Smallest gap between consecutive support points.
    pub fn min_gap(&self) -> Option<Real> {
        self.points
            .windows(2)
            .map(|w| Float::with_val(w[0].prec(), &w[1] - &w[0]))
            .min_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal))
    }
}

/// Weights `scale · (g)_k a^k / ((b)_k k!)` at the points `k + offset`.
/// The Charlier family has no `g`.
struct PochhammerWeights {
    offset: Real,
    scale: Real,
    g: Option<Real>,
    b: Real,
    a: Real,
}

impl PochhammerWeights {
    fn for_sublattice(params: &FamilyParams, shifted: bool, ctx: &PrecisionContext) -> Result<Self> {
        let a = params.a_real(ctx);
        let beta = params.beta_real(ctx);
        let gamma_p = params.gamma.as_ref().map(|g| ctx.rational(g));
        if !shifted {
            return Ok(PochhammerWeights {
                offset: ctx.zero(),
                scale: ctx.one(),
                g: gamma_p,
                b: beta,
                a,
            });
        }
        let one_minus_beta = Float::with_val(ctx.bits(), 1 - &beta);
        let two_minus_beta = Float::with_val(ctx.bits(), 2 - &beta);
        let wctx = ctx.guarded(32);
        // w(k + 1 - β) = Γ(β) a^{1-β} / Γ(2-β) · [Γ(γ+1-β)/Γ(γ)] · (γ+1-β)_k a^k / ((2-β)_k k!)
        let mut scale = gamma(&beta, &wctx)? * rgamma(&two_minus_beta, &wctx)?;
        scale *= Float::with_val(wctx.bits(), (&a).pow(&one_minus_beta));
        let g = match &gamma_p {
            Some(gm) => {
                let g_shift = Float::with_val(ctx.bits(), gm + &one_minus_beta);
                scale *= gamma(&g_shift, &wctx)? * rgamma(gm, &wctx)?;
                Some(g_shift)
            }
            None => None,
        };
        // A negative constant factor does not change the orthogonal polynomials.
        let scale = ctx.round(&scale.abs());
        Ok(PochhammerWeights {
            offset: one_minus_beta,
            scale,
            g,
            b: two_minus_beta,
            a,
        })
    }

    /// `w_{k+1} / w_k`
    fn ratio(&self, k: usize, bits: u32) -> Real {
        let kk = Float::with_val(bits, k);
        let mut num = Float::with_val(bits, &self.a);
        if let Some(g) = &self.g {
            num *= Float::with_val(bits, &kk + g);
        }
        let den = Float::with_val(bits, &kk + &self.b) * Float::with_val(bits, &kk + 1u32);
        num / den
    }

    /// An upper bound for `w_{j+1} / w_j` over all `j ≥ k`.
    fn ratio_sup(&self, k: usize, bits: u32) -> Option<Real> {
        let kk = Float::with_val(bits, k);
        let bk = Float::with_val(bits, &kk + &self.b);
        if bk <= 0 {
            return None;
        }
        let mut growth = Float::with_val(bits, 1);
        if let Some(g) = &self.g {
            let gk = Float::with_val(bits, &kk + g);
            if gk <= 0 {
                return None;
            }
            growth.max_mut(&(gk / &bk));
        }
        Some(growth * &self.a / Float::with_val(bits, &kk + 1u32))
    }
}

/// Truncates one sub-lattice once the `(1+x)^J`-inflated tail is below
/// `tail_eps` times the mass kept so far.
fn truncate_sublattice(
    sub: &PochhammerWeights,
    coeff: &Real,
    max_order: usize,
    ctx: &PrecisionContext,
) -> Result<(Vec<Real>, Vec<Real>, Real)> {
    let bits = ctx.bits();
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut w = Float::with_val(bits, &sub.scale * coeff);
    let mut mass = ctx.zero();
    let order = max_order as i32;
    for k in 0..ctx.max_terms() {
        let x = Float::with_val(bits, &sub.offset + k as u32);
        mass += &w;
        let one_plus = Float::with_val(bits, &x + 1u32);
        if let Some(sup) = sub.ratio_sup(k, bits) {
            let inflate = Float::with_val(bits, one_plus.recip_ref()) + 1u32;
            let rho = sup * inflate.pow(order);
            if rho < 0.5 {
                let majorant = Float::with_val(bits, (&one_plus).pow(order)) * &w;
                let tail = majorant * &rho / Float::with_val(bits, 1 - &rho);
                if tail <= Float::with_val(bits, &mass * ctx.tail_eps()) {
                    points.push(x);
                    weights.push(w);
                    return Ok((points, weights, tail));
                }
            }
        }
        let next = Float::with_val(bits, &w * sub.ratio(k, bits));
        points.push(x);
        weights.push(w);
        w = next;
    }
    Err(Error::Precision(format!(
        "measure truncation not certified within {} points",
        ctx.max_terms()
    )))
}

/// Builds the truncated measure on `lattice`, certified for moments up to
/// order `max_order`. Coincident bi-lattice points (β = 1) are merged.
pub fn build_measure(
    params: &FamilyParams,
    lattice: &Lattice,
    max_order: usize,
    ctx: &PrecisionContext,
) -> Result<DiscreteMeasure> {
    params.validate(lattice)?;
    let (plain, shifted) = lattice.components();
    let mut pairs: Vec<(Real, Real)> = Vec::new();
    let mut tail = ctx.zero();
    for (coeff, is_shifted) in [(plain, false), (shifted, true)] {
        let Some(c) = coeff else { continue };
        let sub = PochhammerWeights::for_sublattice(params, is_shifted, ctx)?;
        let (p, w, t) = truncate_sublattice(&sub, &ctx.rational(&c), max_order, ctx)?;
        pairs.extend(p.into_iter().zip(w));
        tail += t;
    }
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));
    let mut points: Vec<Real> = Vec::with_capacity(pairs.len());
    let mut weights: Vec<Real> = Vec::with_capacity(pairs.len());
    for (x, w) in pairs {
        match points.last() {
            Some(last) if *last == x => {
                let lw = weights.last_mut().expect("weights track points");
                *lw += w;
            }
            _ => {
                points.push(x);
                weights.push(w);
            }
        }
    }
    Ok(DiscreteMeasure {
        points,
        weights,
        tail_bound: tail,
        max_order,
    })
}

/// `Σ x^j w` over the truncated measure.
pub fn moment(measure: &DiscreteMeasure, j: usize) -> Result<Real> {
    if j > measure.max_order {
        return Err(Error::Validity(format!(
            "moment of order {j} requested from a measure certified up to {}",
            measure.max_order
        )));
    }
    let bits = measure.points.first().map(|p| p.prec()).unwrap_or(64);
    let mut s = Float::new(bits);
    for (x, w) in measure.iter() {
        s += Float::with_val(bits, x.pow(j as u32)) * w;
    }
    Ok(s)
}

/// The weight function at a rational point:
/// Charlier `Γ(β) a^x / (Γ(β+x) Γ(x+1))`,
/// Meixner `Γ(β) Γ(γ+x) a^x / (Γ(γ) Γ(β+x) Γ(x+1))`.
/// Zero wherever `Γ(x+1)` or `Γ(β+x)` has a pole.
pub fn weight_at(params: &FamilyParams, x: &Rational, ctx: &PrecisionContext) -> Result<Real> {
    let bx = Rational::from(&params.beta + x);
    if is_nonpositive_integer(&Rational::from(x + 1u32)) || is_nonpositive_integer(&bx) {
        return Ok(ctx.zero());
    }
    let wctx = ctx.guarded(32);
    let bits = wctx.bits();
    let a = params.a_real(&wctx);
    let xw = wctx.rational(x);
    let mut w = Float::with_val(bits, (&a).pow(&xw));
    w *= rgamma(&Float::with_val(bits, &xw + 1u32), &wctx)?;
    match params.gamma.as_ref() {
        Some(g) if *g == params.beta => {}
        Some(g) => {
            let gx = Rational::from(g + x);
            if is_nonpositive_integer(&gx) {
                return Err(Error::Pole(format!("Meixner weight has a pole at x = {x}")));
            }
            w *= gamma(&params.beta_real(&wctx), &wctx)?
                * gamma(&wctx.rational(&gx), &wctx)?
                * rgamma(&wctx.rational(g), &wctx)?
                * rgamma(&wctx.rational(&bx), &wctx)?;
        }
        None => {
            w *= gamma(&params.beta_real(&wctx), &wctx)? * rgamma(&wctx.rational(&bx), &wctx)?;
        }
    }
    Ok(ctx.round(&w))
}

/// `w(x) - w(x-1) - (a - x(β-1) - x²)/a · w(x)` for the Charlier weight.
pub fn pearson_residual(params: &FamilyParams, x: &Rational, ctx: &PrecisionContext) -> Result<Real> {
    if params.is_meixner() {
        return Err(Error::Validity(
            "the Pearson residual is implemented for the Charlier weight".into(),
        ));
    }
    let wctx = ctx.guarded(32);
    let bits = wctx.bits();
    let a = params.a_real(&wctx);
    let w0 = weight_at(params, x, &wctx)?;
    let w1 = weight_at(params, &Rational::from(x - 1u32), &wctx)?;
    let poly = (&params.a - Rational::from(&params.beta - 1u32) * x) - Rational::from(x.square_ref());
    let r = Float::with_val(bits, &w0 - &w1) - wctx.rational(&poly) / &a * &w0;
    Ok(ctx.round(&r))
}

/// `u(x) = -1 + w(x-1)/w(x) = -1 + x(x+β-1) / (a(x+γ-1))` for the Meixner weight.
pub fn ladder_potential(params: &FamilyParams, x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let g = params.gamma_real(ctx)?;
    let bits = ctx.bits();
    let a = params.a_real(ctx);
    let beta = params.beta_real(ctx);
    let den = Float::with_val(bits, x + &g) - 1u32;
    if den.is_zero() {
        return Err(Error::Pole("u(x) has a pole at x = 1 - γ".into()));
    }
    let num = Float::with_val(bits, x * (Float::with_val(bits, x + &beta) - 1u32));
    Ok(num / (den * a) - 1u32)
}

/// `(u(x+1) - u(ℓ)) / (x+1-ℓ) = (ℓ + (γ-1)(x+β)/(γ+x)) / (a(γ+ℓ-1))`, right-hand form.
pub fn ladder_quotient(params: &FamilyParams, x: &Real, l: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let g = params.gamma_real(ctx)?;
    let bits = ctx.bits();
    let a = params.a_real(ctx);
    let beta = params.beta_real(ctx);
    let gx = Float::with_val(bits, &g + x);
    let gl = Float::with_val(bits, &g + l) - 1u32;
    if gx.is_zero() || gl.is_zero() {
        return Err(Error::Pole("ladder quotient has a pole".into()));
    }
    let inner = Float::with_val(bits, &g - 1u32) * Float::with_val(bits, x + &beta) / gx;
    Ok((inner + l) / (gl * a))
}

/// Closed-form `(m₀, m₁)` of the plain and shifted measures, each `None` when absent.
struct MomentParts {
    plain: Option<(Real, Real)>,
    shifted: Option<(Real, Real)>,
}

fn moment_parts(params: &FamilyParams, lattice: &Lattice, ctx: &PrecisionContext) -> Result<MomentParts> {
    params.validate(lattice)?;
    let (c1, c2) = lattice.components();
    let bits = ctx.bits();
    let a = params.a_real(ctx);
    let beta = params.beta_real(ctx);
    let one_minus_beta = Float::with_val(bits, 1 - &beta);
    let plain;
    let shifted;
    match params.gamma.as_ref() {
        None => {
            // Γ(β) a^{(1-β)/2} I_{β-1}(2√a), Γ(β) a^{(2-β)/2} I_β(2√a) and the
            // shifted counterparts with ν → -ν.
            let z = Float::with_val(bits, a.sqrt_ref()) * 2u32;
            let gb = gamma(&beta, ctx)?;
            let p0 = Float::with_val(bits, (&a).pow(Float::with_val(bits, &one_minus_beta / 2u32)));
            let p1 = Float::with_val(bits, (&a).pow(Float::with_val(bits, 2 - &beta) / 2u32));
            let bm1 = Float::with_val(bits, &beta - 1u32);
            let neg_b = Float::with_val(bits, -&beta);
            plain = if c1.is_some() {
                Some((
                    Float::with_val(bits, &gb * &p0) * bessel_i(&bm1, &z, ctx)?,
                    Float::with_val(bits, &gb * &p1) * bessel_i(&beta, &z, ctx)?,
                ))
            } else {
                None
            };
            shifted = if c2.is_some() {
                Some((
                    Float::with_val(bits, &gb * &p0) * bessel_i(&one_minus_beta, &z, ctx)?,
                    Float::with_val(bits, &gb * &p1) * bessel_i(&neg_b, &z, ctx)?,
                ))
            } else {
                None
            };
        }
        Some(g) => {
            let g = ctx.rational(g);
            plain = if c1.is_some() {
                let m0 = kummer_m(&g, &beta, &a, ctx)?;
                let m1 = Float::with_val(bits, &g * &a) / &beta
                    * kummer_m(
                        &Float::with_val(bits, &g + 1u32),
                        &Float::with_val(bits, &beta + 1u32),
                        &a,
                        ctx,
                    )?;
                Some((m0, m1))
            } else {
                None
            };
            shifted = if c2.is_some() {
                // Γ(β) Γ(γ-β+1)/Γ(γ) · a^{1-β} · M(γ-β+1, q, a)/Γ(q), q = 2-β and 1-β.
                let p = Float::with_val(bits, &g + &one_minus_beta);
                let mut factor = gamma(&beta, ctx)? * gamma(&p, ctx)? * rgamma(&g, ctx)?;
                factor *= Float::with_val(bits, (&a).pow(&one_minus_beta));
                let two_minus_beta = Float::with_val(bits, 2 - &beta);
                let m0 = Float::with_val(bits, &factor * kummer_m_regularized(&p, &two_minus_beta, &a, ctx)?);
                let m1 = factor * kummer_m_regularized(&p, &one_minus_beta, &a, ctx)?;
                Some((m0, m1))
            } else {
                None
            };
        }
    }
    Ok(MomentParts { plain, shifted })
}

/// Closed-form `(m₀, m₁)` of the measure on `lattice`; for the bi-lattice
/// these are `(m₀ + t m̂₀, m₁ + t m̂₁)`.
pub fn closed_moments(params: &FamilyParams, lattice: &Lattice, ctx: &PrecisionContext) -> Result<(Real, Real)> {
    let wctx = ctx.guarded(32);
    let parts = moment_parts(params, lattice, &wctx)?;
    let (c1, c2) = lattice.components();
    let mut m0 = wctx.zero();
    let mut m1 = wctx.zero();
    if let (Some(c), Some((p0, p1))) = (c1, parts.plain) {
        let c = wctx.rational(&c);
        m0 += Float::with_val(wctx.bits(), &c * &p0);
        m1 += c * p1;
    }
    if let (Some(c), Some((s0, s1))) = (c2, parts.shifted) {
        let c = wctx.rational(&c);
        m0 += Float::with_val(wctx.bits(), &c * &s0);
        m1 += c * s1;
    }
    Ok((ctx.round(&m0), ctx.round(&m1)))
}

fn ratio_or_degenerate(num: Real, den: Real, what: &str) -> Result<Real> {
    if den.is_zero() {
        return Err(Error::Degenerate(format!("{what}: denominator vanishes")));
    }
    Ok(num / den)
}

/// The initial condition `b₀ = m₁/m₀` in its Bessel or Kummer closed form.
pub fn b0_initial(params: &FamilyParams, lattice: &Lattice, ctx: &PrecisionContext) -> Result<Real> {
    params.validate(lattice)?;
    let wctx = ctx.guarded(32);
    let bits = wctx.bits();
    let a = params.a_real(&wctx);
    let beta = params.beta_real(&wctx);
    let (c1, c2) = lattice.components();
    let b0 = match params.gamma.as_ref() {
        None => {
            // √a (c₁ I_β + c₂ I_{-β}) / (c₁ I_{β-1} + c₂ I_{1-β}) at 2√a
            let sqrt_a = Float::with_val(bits, a.sqrt_ref());
            let z = Float::with_val(bits, &sqrt_a * 2u32);
            let mut num = wctx.zero();
            let mut den = wctx.zero();
            if let Some(c) = c1 {
                let c = wctx.rational(&c);
                num += Float::with_val(bits, &c * bessel_i(&beta, &z, &wctx)?);
                den += c * bessel_i(&Float::with_val(bits, &beta - 1u32), &z, &wctx)?;
            }
            if let Some(c) = c2 {
                let c = wctx.rational(&c);
                num += Float::with_val(bits, &c * bessel_i(&Float::with_val(bits, -&beta), &z, &wctx)?);
                den += c * bessel_i(&Float::with_val(bits, 1 - &beta), &z, &wctx)?;
            }
            sqrt_a * ratio_or_degenerate(num, den, "b0")?
        }
        Some(g) => {
            let g = wctx.rational(g);
            match lattice {
                Lattice::Plain | Lattice::Bi(Mix::Finite(_)) if c2.is_none() => {
                    // (γa/β) M(γ+1, β+1, a) / M(γ, β, a)
                    let num = kummer_m(
                        &Float::with_val(bits, &g + 1u32),
                        &Float::with_val(bits, &beta + 1u32),
                        &a,
                        &wctx,
                    )?;
                    let den = kummer_m(&g, &beta, &a, &wctx)?;
                    Float::with_val(bits, &g * &a) / &beta * ratio_or_degenerate(num, den, "b0")?
                }
                Lattice::Shifted | Lattice::Bi(Mix::Infinite) => {
                    // (1-β) M(γ-β+1, 1-β, a) / M(γ-β+1, 2-β, a), written with the
                    // regularized function so that β = 1 needs no limit.
                    let p = Float::with_val(bits, &g + 1u32) - &beta;
                    let num = kummer_m_regularized(&p, &Float::with_val(bits, 1 - &beta), &a, &wctx)?;
                    let den = kummer_m_regularized(&p, &Float::with_val(bits, 2 - &beta), &a, &wctx)?;
                    ratio_or_degenerate(num, den, "b0")?
                }
                _ => {
                    let (m0, m1) = closed_moments(params, lattice, &wctx)?;
                    ratio_or_degenerate(m1, m0, "b0")?
                }
            }
        }
    };
    Ok(ctx.round(&b0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::{rel_diff, rel_err};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    fn charlier(a: i64, b: (i64, i64)) -> FamilyParams {
        FamilyParams::charlier(q(a, 1), q(b.0, b.1))
    }

    fn meixner() -> FamilyParams {
        FamilyParams::meixner(q(3, 1), q(2, 3), q(9, 10))
    }

    fn all_lattices() -> Vec<Lattice> {
        vec![
            Lattice::Plain,
            Lattice::Shifted,
            Lattice::Bi(Mix::Finite(q(10, 1))),
            Lattice::Bi(Mix::Finite(q(2, 1))),
        ]
    }

    #[test]
    fn charlier_weight_values() {
        let c = ctx(40);
        let p = charlier(3, (1, 3));
        assert!(rel_diff(&weight_at(&p, &q(0, 1), &c).unwrap(), &c.one()) < c.tolerance(3));
        assert!(weight_at(&p, &q(-1, 1), &c).unwrap().is_zero());
        assert!(weight_at(&p, &q(-1, 3), &c).unwrap().is_zero());
        assert!(weight_at(&p, &q(-4, 3), &c).unwrap().is_zero());
    }

    #[test]
    fn half_beta_weights_are_poisson() {
        let c = ctx(40);
        let p = charlier(3, (1, 2));
        let two_sqrt_a = Float::with_val(c.bits(), c.real(3).sqrt() * 2u32);
        for k in 0..=10u32 {
            let w = weight_at(&p, &q(k as i64, 2), &c).unwrap();
            let expect = Float::with_val(c.bits(), (&two_sqrt_a).pow(k))
                / Float::with_val(c.bits(), rug::Integer::from(rug::Integer::factorial(k)));
            assert!(rel_err(&w, &expect) < c.tolerance(5), "k = {k}");
        }
    }

    #[test]
    fn meixner_weight_poles() {
        let c = ctx(30);
        let p = meixner();
        assert!(matches!(
            weight_at(&p, &q(-9, 10), &c),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn plain_charlier_first_weights() {
        let c = ctx(40);
        let m = build_measure(&charlier(3, (1, 3)), &Lattice::Plain, 4, &c).unwrap();
        assert_eq!(m.points()[0], 0);
        assert!(rel_diff(&m.weights()[0], &c.one()) < c.tolerance(3));
        assert!(rel_diff(&m.weights()[1], &c.real(9)) < c.tolerance(3));
    }

    #[test]
    fn half_beta_bilattice_is_half_integers() {
        let c = ctx(40);
        let m = build_measure(&charlier(4, (1, 2)), &Lattice::Bi(Mix::Finite(q(1, 1))), 4, &c).unwrap();
        for (k, (x, w)) in m.iter().take(30).enumerate() {
            assert!(rel_diff(x, &c.rational(&q(k as i64, 2))) < c.tolerance(3));
            let expect = Float::with_val(c.bits(), c.real(4).pow(k as u32))
                / Float::with_val(c.bits(), rug::Integer::from(rug::Integer::factorial(k as u32)));
            assert!(rel_err(w, &expect) < c.tolerance(5), "k = {k}");
        }
    }

    #[test]
    fn shifted_meixner_is_reparametrized_plain() {
        let c = ctx(40);
        let p = meixner();
        let beta = p.beta_real(&c);
        let g = p.gamma_real(&c).unwrap();
        let alt = FamilyParams::meixner(q(3, 1), q(4, 3), q(9, 10) + q(1, 3));
        let factor = Float::with_val(c.bits(), c.real(3).pow(Float::with_val(c.bits(), 1 - &beta)))
            * gamma(&beta, &c).unwrap()
            * gamma(&Float::with_val(c.bits(), Float::with_val(c.bits(), &g + 1u32) - &beta), &c).unwrap()
            / gamma(&Float::with_val(c.bits(), 2 - &beta), &c).unwrap()
            / gamma(&g, &c).unwrap();
        let m = build_measure(&p, &Lattice::Shifted, 4, &c).unwrap();
        for k in 0..8u32 {
            let x = q(1, 3) + k;
            let direct = weight_at(&p, &x, &c).unwrap();
            let via = Float::with_val(c.bits(), &factor * weight_at(&alt, &q(k as i64, 1), &c).unwrap());
            assert!(rel_err(&direct, &via) < c.tolerance(5));
            assert!(rel_err(&m.weights()[k as usize], &direct) < c.tolerance(5));
        }
    }

    #[test]
    fn beta_one_bilattice_merges_points() {
        let c = ctx(40);
        let p = charlier(3, (1, 1));
        let bi = build_measure(&p, &Lattice::Bi(Mix::Finite(q(2, 1))), 4, &c).unwrap();
        let plain = build_measure(&p, &Lattice::Plain, 4, &c).unwrap();
        assert!(bi.points().windows(2).all(|w| w[0] < w[1]));
        for k in 0..10 {
            assert_eq!(bi.points()[k], plain.points()[k]);
            let expect = Float::with_val(c.bits(), &plain.weights()[k] * 3u32);
            assert!(rel_err(&bi.weights()[k], &expect) < c.tolerance(3));
        }
    }

    #[test]
    fn meixner_with_equal_parameters_has_exponential_mass() {
        let c = ctx(40);
        let p = FamilyParams::meixner(q(3, 1), q(2, 3), q(2, 3));
        let m = build_measure(&p, &Lattice::Plain, 2, &c).unwrap();
        let m0 = moment(&m, 0).unwrap();
        assert!(rel_err(&m0, &c.real(3).exp()) < c.tolerance(5));
        assert!(moment(&m, 3).is_err());
    }

    #[test]
    fn charlier_second_moment_from_pearson() {
        let c = ctx(50);
        let p = charlier(3, (1, 3));
        let m = build_measure(&p, &Lattice::Plain, 2, &c).unwrap();
        let (m0, m1, m2) = (moment(&m, 0).unwrap(), moment(&m, 1).unwrap(), moment(&m, 2).unwrap());
        let expect = Float::with_val(c.bits(), &m0 * 3u32) - Float::with_val(c.bits(), &m1 * c.rational(&q(-2, 3)));
        assert!(rel_err(&m2, &expect) < c.tolerance(5));
        let (cm0, _) = closed_moments(&p, &Lattice::Plain, &c).unwrap();
        assert!(rel_err(&m0, &cm0) < c.tolerance(5));
    }

    #[test]
    fn closed_moments_match_summation() {
        let c = ctx(60);
        let families = [charlier(3, (2, 3)), meixner()];
        for p in &families {
            for lat in all_lattices() {
                let m = build_measure(p, &lat, 1, &c).unwrap();
                let (cm0, cm1) = closed_moments(p, &lat, &c).unwrap();
                assert!(rel_err(&moment(&m, 0).unwrap(), &cm0) < c.tolerance(10), "{lat}");
                assert!(rel_err(&moment(&m, 1).unwrap(), &cm1) < c.tolerance(10), "{lat}");
            }
        }
    }

    #[test]
    fn b0_matches_moment_ratio_everywhere() {
        let c = ctx(60);
        let families = [
            charlier(3, (1, 3)),
            charlier(3, (3, 2)),
            charlier(3, (1, 1)),
            meixner(),
            FamilyParams::meixner(q(3, 1), q(3, 2), q(9, 10)),
            FamilyParams::meixner(q(3, 1), q(1, 1), q(9, 10)),
        ];
        let mut lats = all_lattices();
        lats.push(Lattice::Bi(Mix::Infinite));
        lats.push(Lattice::Bi(Mix::Finite(q(0, 1))));
        for p in &families {
            for lat in &lats {
                let m = build_measure(p, lat, 1, &c).unwrap();
                let ratio = moment(&m, 1).unwrap() / moment(&m, 0).unwrap();
                let b0 = b0_initial(p, lat, &c).unwrap();
                assert!(rel_err(&b0, &ratio) < c.tolerance(10), "{:?} {lat}", p.family);
            }
        }
    }

    #[test]
    fn b0_special_values() {
        let c = ctx(50);
        let sqrt_a = c.real(3).sqrt();
        let bi = b0_initial(&charlier(3, (1, 2)), &Lattice::Bi(Mix::Finite(q(1, 1))), &c).unwrap();
        assert!(rel_err(&bi, &sqrt_a) < c.tolerance(5));
        let plain = b0_initial(&charlier(3, (1, 2)), &Lattice::Plain, &c).unwrap();
        let expect = Float::with_val(c.bits(), &sqrt_a * Float::with_val(c.bits(), &sqrt_a * 2u32).tanh());
        assert!(rel_err(&plain, &expect) < c.tolerance(5));
    }

    #[test]
    fn shifted_meixner_b0_matches_literal_formula() {
        let c = ctx(50);
        let p = meixner();
        let beta = p.beta_real(&c);
        let g = p.gamma_real(&c).unwrap();
        let a = c.real(3);
        let pp = Float::with_val(c.bits(), Float::with_val(c.bits(), &g + 1u32) - &beta);
        let literal = Float::with_val(c.bits(), 1 - &beta)
            * kummer_m(&pp, &Float::with_val(c.bits(), 1 - &beta), &a, &c).unwrap()
            / kummer_m(&pp, &Float::with_val(c.bits(), 2 - &beta), &a, &c).unwrap();
        let b0 = b0_initial(&p, &Lattice::Shifted, &c).unwrap();
        assert!(rel_err(&b0, &literal) < c.tolerance(5));
    }

    #[test]
    fn shifted_charlier_bessel_simplification() {
        let c = ctx(60);
        for beta in [q(1, 3), q(3, 2), q(-1, 4)] {
            let b = c.rational(&beta);
            let a = c.real(3);
            let sqrt_a = Float::with_val(c.bits(), a.sqrt_ref());
            let z = Float::with_val(c.bits(), &sqrt_a * 2u32);
            let lhs = Float::with_val(c.bits(), &sqrt_a * bessel_i(&Float::with_val(c.bits(), 2 - &b), &z, &c).unwrap())
                + Float::with_val(c.bits(), 1 - &b) * bessel_i(&Float::with_val(c.bits(), 1 - &b), &z, &c).unwrap();
            let rhs = sqrt_a * bessel_i(&Float::with_val(c.bits(), -&b), &z, &c).unwrap();
            assert!(rel_err(&lhs, &rhs) < c.tolerance(5));
        }
    }

    #[test]
    fn b0_monotone_in_t() {
        let c = ctx(40);
        let grid = [
            Mix::Finite(q(0, 1)),
            Mix::Finite(q(1, 10)),
            Mix::Finite(q(1, 1)),
            Mix::Finite(q(10, 1)),
            Mix::Finite(q(100, 1)),
            Mix::Infinite,
        ];
        let cases = [(charlier(3, (1, 3)), true), (charlier(3, (3, 2)), false), (meixner(), true)];
        for (p, increasing) in cases {
            let vals: Vec<Real> = grid
                .iter()
                .map(|t| b0_initial(&p, &Lattice::Bi(t.clone()), &c).unwrap())
                .collect();
            for w in vals.windows(2) {
                assert_eq!(w[0] < w[1], increasing);
                assert_ne!(w[0], w[1]);
            }
        }
    }

    #[test]
    fn pearson_holds_on_and_off_lattice() {
        let c = ctx(40);
        let p = charlier(3, (1, 3));
        for x in [q(3, 1), q(5, 2), q(2, 3), q(-1, 7)] {
            let r = pearson_residual(&p, &x, &c).unwrap();
            let scale = weight_at(&p, &x, &c).unwrap().abs();
            assert!(r.abs() <= c.tolerance(8) * scale);
        }
        assert!(pearson_residual(&meixner(), &q(1, 1), &c).is_err());
    }

    #[test]
    fn ladder_potential_values() {
        let c = ctx(40);
        let p = meixner();
        assert!(rel_diff(&ladder_potential(&p, &c.zero(), &c).unwrap(), &c.real(-1)) < c.tolerance(3));
        let eq = FamilyParams::meixner(q(3, 1), q(2, 3), q(2, 3));
        let x = c.real(2.3);
        let expect = Float::with_val(c.bits(), &x / 3u32) - 1u32;
        assert!(rel_diff(&ladder_potential(&eq, &x, &c).unwrap(), &expect) < c.tolerance(3));
        assert!(ladder_potential(&p, &c.rational(&q(1, 10)), &c).is_err());
    }

    #[test]
    fn ladder_difference_quotient() {
        let c = ctx(40);
        let p = meixner();
        let x = c.rational(&q(23, 10));
        let l = c.real(4);
        let lhs = (ladder_potential(&p, &Float::with_val(c.bits(), &x + 1u32), &c).unwrap()
            - ladder_potential(&p, &l, &c).unwrap())
            / Float::with_val(c.bits(), Float::with_val(c.bits(), &x + 1u32) - &l);
        let rhs = ladder_quotient(&p, &x, &l, &c).unwrap();
        assert!(rel_err(&lhs, &rhs) < c.tolerance(5));
    }

    #[test]
    fn truncation_tail_is_certified() {
        let c = ctx(50);
        for p in [charlier(3, (1, 3)), meixner()] {
            let lat = Lattice::Bi(Mix::Finite(q(10, 1)));
            let j = 20;
            let m = build_measure(&p, &lat, j, &c).unwrap();
            let m0 = moment(&m, 0).unwrap();
            assert!(*m.tail_bound() < Float::with_val(c.bits(), &m0 * c.tail_eps()));
            let longer = build_measure(&p, &lat, j, &c.clone().with_tail_eps(crate::precision::pow10(c.bits(), -110)).unwrap()).unwrap();
            assert!(longer.len() >= m.len() + 10);
            for order in 0..=j {
                let d = rel_err(&moment(&m, order).unwrap(), &moment(&longer, order).unwrap());
                assert!(d < Float::with_val(c.bits(), c.tail_eps() * 10u32), "order {order}");
            }
        }
    }
}
