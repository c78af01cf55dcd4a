//! Gamma, rising factorials, the modified Bessel function `I_ν` and Kummer's
//! confluent hypergeometric function `M(p, q, z)`, all at context precision.
//!
//! Series are summed until a geometric ratio bound certifies that the
//! remaining tail is below `tail_eps` relative to the partial sum. A series
//! that cannot be certified within `max_terms` terms is an error.

use std::sync::Mutex;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::{PrecisionContext, Real};

/// Extra bits carried inside every special-function evaluation.
const GUARD_BITS: u32 = 64;

/// `B_{2k} / (2k (2k - 1))` for `k = 1, 2, ...`, grown on demand.
static STIRLING: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

/// Tangent numbers `T_1..T_n` (Brent–Harvey in-place recurrence).
fn tangent_numbers(n: usize) -> Vec<Integer> {
    let mut t = vec![Integer::new(); n + 1];
    if n == 0 {
        return t;
    }
    t[1] = Integer::from(1);
    for k in 2..=n {
        t[k] = Integer::from(&t[k - 1] * (k as u64 - 1));
    }
    for k in 2..=n {
        for j in k..=n {
            let lhs = Integer::from(&t[j - 1] * (j as u64 - k as u64));
            let rhs = Integer::from(&t[j] * (j as u64 - k as u64 + 2));
            t[j] = lhs + rhs;
        }
    }
    t
}

/// Even-index Bernoulli numbers `B_2, B_4, ..., B_{2n}`.
pub(crate) fn bernoulli_even(n: usize) -> Vec<Rational> {
    let t = tangent_numbers(n);
    (1..=n)
        .map(|k| {
            let four_k = Integer::from(1) << (2 * k as u32);
            let den = &four_k * Integer::from(&four_k - 1u32);
            let num = Integer::from(&t[k] * (2 * k as u64));
            let b = Rational::from((num, den));
            if k % 2 == 1 {
                b
            } else {
                -b
            }
        })
        .collect()
}

fn ensure_stirling(table: &mut Vec<Rational>, k: usize) {
    if table.len() >= k {
        return;
    }
    let n = (2 * k).max(64);
    *table = bernoulli_even(n)
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            let two_k = 2 * (i as u64 + 1);
            b / Integer::from(two_k * (two_k - 1))
        })
        .collect();
}

fn is_nonpositive_integer(x: &Real) -> bool {
    x.is_integer() && *x <= 0
}

/// `ln Γ(z)` for `z` large and positive via Stirling's series. The error of a
/// truncated Stirling sum is bounded by the first omitted term for real `z > 0`.
fn ln_gamma_stirling(z: &Real, bits: u32, ctx: &PrecisionContext) -> Result<Real> {
    let eps = Float::with_val(bits, Float::i_exp(1, -(bits as i32 - 16)));
    let ln_z = Float::with_val(bits, z.ln_ref());
    let half = Float::with_val(bits, 0.5);
    let two_pi = Float::with_val(bits, rug::float::Constant::Pi) * 2u32;
    let mut sum = Float::with_val(bits, z - &half) * &ln_z;
    sum -= z;
    sum += two_pi.ln() / 2u32;

    let inv_z = Float::with_val(bits, z.recip_ref());
    let inv_z2 = Float::with_val(bits, inv_z.square_ref());
    let mut zpow = inv_z;
    let mut prev: Option<Real> = None;

    let mut table = STIRLING.lock().expect("stirling table poisoned");
    for k in 1..=ctx.max_terms() {
        ensure_stirling(&mut table, k);
        let term = Float::with_val(bits, &table[k - 1]) * &zpow;
        let mag = Float::with_val(bits, term.abs_ref());
        if mag < eps {
            return Ok(sum);
        }
        if let Some(p) = &prev {
            if mag > *p {
                return Err(Error::Precision(format!(
                    "Stirling series for ln Γ({}) diverges before reaching 2^-{}",
                    z.to_string_radix(10, Some(8)),
                    bits - 16
                )));
            }
        }
        sum += &term;
        prev = Some(mag);
        zpow *= &inv_z2;
    }
    Err(Error::Precision(format!(
        "Stirling series needs more than {} terms",
        ctx.max_terms()
    )))
}

/// Γ(x) by shifting the argument to `x + m ≥ 2·(working digits)` and
/// dividing out `x (x+1) ⋯ (x+m-1)`.
pub fn gamma(x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(format!(
            "Γ has a pole at {}",
            x.to_string_radix(10, Some(8))
        )));
    }
    let bits = ctx.bits() + GUARD_BITS + 32;
    let work_digits = f64::from(bits) / std::f64::consts::LOG2_10;
    let z_min = (2.0 * work_digits).ceil().max(20.0);
    let x_f = x.to_f64();
    let shift = if x_f >= z_min {
        0
    } else {
        (z_min - x_f).ceil() as u64
    };

    let xw = Float::with_val(bits, x);
    let mut prod = Float::with_val(bits, 1);
    let mut z = xw.clone();
    for _ in 0..shift {
        prod *= &z;
        z += 1u32;
    }
    let lg = ln_gamma_stirling(&z, bits, ctx)?;
    let g = lg.exp() / prod;
    Ok(ctx.round(&g))
}

/// `1/Γ(x)`, zero at the poles of Γ.
pub fn rgamma(x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if is_nonpositive_integer(x) {
        return Ok(ctx.zero());
    }
    let g = gamma(x, &ctx.guarded(16))?;
    Ok(ctx.round(&g.recip()))
}

/// Rising factorial `(x)_k = x (x+1) ⋯ (x+k-1)`, with `(x)_0 = 1`.
pub fn pochhammer(x: &Real, k: u64, ctx: &PrecisionContext) -> Real {
    let bits = ctx.bits() + 16;
    let mut acc = Float::with_val(bits, 1);
    let mut f = Float::with_val(bits, x);
    for _ in 0..k {
        acc *= &f;
        f += 1u32;
    }
    ctx.round(&acc)
}

/// Sums `first + Σ_{k>k0} t_k` with `t_{k+1} = ratio(k) t_k`.
///
/// `bound(k)` must return a value `ρ ≥ sup_{j≥k} |ratio(j)|` when one is
/// available; once `ρ < 1/2` the tail after `t_k` is at most `|t_k| ρ/(1-ρ)`.
fn sum_series(
    first: Real,
    k0: usize,
    ratio: impl Fn(usize) -> Real,
    bound: impl Fn(usize) -> Option<Real>,
    ctx: &PrecisionContext,
    what: &str,
) -> Result<Real> {
    let bits = first.prec();
    let eps = Float::with_val(bits, ctx.tail_eps());
    let mut sum = first.clone();
    let mut term = first;
    let mut k = k0;
    if term.is_zero() {
        return Ok(sum);
    }
    loop {
        term *= ratio(k);
        k += 1;
        if term.is_zero() {
            return Ok(sum);
        }
        sum += &term;
        if let Some(rho) = bound(k) {
            if rho < 0.5 {
                let tail = Float::with_val(bits, term.abs_ref()) * &rho
                    / Float::with_val(bits, 1 - &rho);
                let scale = Float::with_val(bits, sum.abs_ref()) * &eps;
                if tail <= scale {
                    return Ok(sum);
                }
            }
        }
        if k - k0 >= ctx.max_terms() {
            return Err(Error::Precision(format!(
                "{what}: tail not certified after {} terms",
                ctx.max_terms()
            )));
        }
    }
}

/// Modified Bessel function of the first kind,
/// `I_ν(z) = Σ_k (z/2)^{2k+ν} / (k! Γ(k+ν+1))`, for real `ν` and `z ≥ 0`.
///
/// Terms whose Gamma argument is a pole vanish, so `I_{-m} = I_m` for integer `m`.
pub fn bessel_i(nu: &Real, z: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if z.is_sign_negative() && !z.is_zero() {
        return Err(Error::Validity("bessel_i needs z ≥ 0".into()));
    }
    let nu_int_neg = nu.is_integer() && *nu < 0;
    if z.is_zero() {
        return if nu.is_zero() {
            Ok(ctx.one())
        } else if *nu > 0 || nu_int_neg {
            Ok(ctx.zero())
        } else {
            Err(Error::Pole(format!(
                "I_ν(0) is infinite for ν = {}",
                nu.to_string_radix(10, Some(8))
            )))
        };
    }
    let wctx = ctx.guarded(GUARD_BITS);
    let bits = wctx.bits();
    let nu_w = Float::with_val(bits, nu);
    let half = Float::with_val(bits, z) / 2u32;
    let half_sq = Float::with_val(bits, half.square_ref());

    let k0: usize = if nu_int_neg {
        (-nu.to_f64()).round() as usize
    } else {
        0
    };
    let k0_r = Float::with_val(bits, k0);
    let exponent = Float::with_val(bits, &k0_r * 2u32) + &nu_w;
    let mut first = Float::with_val(bits, (&half).pow(&exponent));
    first *= rgamma(&(Float::with_val(bits, &k0_r + &nu_w) + 1u32), &wctx)?;
    first /= Float::with_val(bits, Integer::from(Integer::factorial(k0 as u32)));

    let ratio = |k: usize| -> Real {
        let kk = Float::with_val(bits, k);
        let den = Float::with_val(bits, &kk + 1u32) * (Float::with_val(bits, &kk + &nu_w) + 1u32);
        Float::with_val(bits, &half_sq / den)
    };
    let bound = |k: usize| -> Option<Real> {
        let shifted = Float::with_val(bits, k) + &nu_w + 1u32;
        if shifted > 0 {
            Some(ratio(k).abs())
        } else {
            None
        }
    };
    let s = sum_series(first, k0, ratio, bound, &wctx, "bessel_i")?;
    Ok(ctx.round(&s))
}

fn kummer_ratio(p: &Real, q: &Real, z: &Real, k: usize, bits: u32) -> Real {
    let kk = Float::with_val(bits, k);
    let num = Float::with_val(bits, &kk + p) * z;
    let den = Float::with_val(bits, &kk + q) * Float::with_val(bits, &kk + 1u32);
    num / den
}

fn kummer_bound(p: &Real, q: &Real, z: &Real, k: usize, bits: u32) -> Option<Real> {
    let kk = Float::with_val(bits, k);
    let qk = Float::with_val(bits, &kk + q);
    if qk <= 0 {
        return None;
    }
    let pq = Float::with_val(bits, p - q).abs();
    let grow = Float::with_val(bits, pq / &qk) + 1u32;
    let decay = Float::with_val(bits, z.abs_ref()) / Float::with_val(bits, &kk + 1u32);
    Some(grow * decay)
}

/// Kummer's function `M(p, q, z) = Σ_k (p)_k z^k / ((q)_k k!)`.
pub fn kummer_m(p: &Real, q: &Real, z: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if is_nonpositive_integer(q) {
        let terminates_first = is_nonpositive_integer(p) && *p > *q;
        if !terminates_first {
            return Err(Error::Pole(format!(
                "M(p, q, z) has a pole at q = {}",
                q.to_string_radix(10, Some(8))
            )));
        }
    }
    let wctx = ctx.guarded(GUARD_BITS);
    let bits = wctx.bits();
    let (pw, qw, zw) = (
        Float::with_val(bits, p),
        Float::with_val(bits, q),
        Float::with_val(bits, z),
    );
    let s = sum_series(
        Float::with_val(bits, 1),
        0,
        |k| kummer_ratio(&pw, &qw, &zw, k, bits),
        |k| kummer_bound(&pw, &qw, &zw, k, bits),
        &wctx,
        "kummer_m",
    )?;
    Ok(ctx.round(&s))
}

/// Regularized Kummer function `M(p, q, z) / Γ(q) = Σ_k (p)_k z^k / (Γ(q+k) k!)`,
/// finite for every real `q`.
pub fn kummer_m_regularized(p: &Real, q: &Real, z: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let wctx = ctx.guarded(GUARD_BITS);
    let bits = wctx.bits();
    let (pw, qw, zw) = (
        Float::with_val(bits, p),
        Float::with_val(bits, q),
        Float::with_val(bits, z),
    );
    let (k0, first) = if is_nonpositive_integer(q) {
        let k0 = (1.0 - q.to_f64()).round() as u64;
        let mut first = pochhammer(&pw, k0, &wctx);
        first *= Float::with_val(bits, (&zw).pow(k0 as u32));
        first /= Float::with_val(bits, Integer::from(Integer::factorial(k0 as u32)));
        (k0 as usize, first)
    } else {
        (0, rgamma(&qw, &wctx)?)
    };
    let s = sum_series(
        first,
        k0,
        |k| kummer_ratio(&pw, &qw, &zw, k, bits),
        |k| kummer_bound(&pw, &qw, &zw, k, bits),
        &wctx,
        "kummer_m_regularized",
    )?;
    Ok(ctx.round(&s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::{rel_diff, rel_err};
    use rug::ops::Pow;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn bernoulli_small() {
        let b = bernoulli_even(5);
        let expect = [q(1, 6), q(-1, 30), q(1, 42), q(-1, 30), q(5, 66)];
        assert_eq!(b, expect);
    }

    #[test]
    fn gamma_trivial_values() {
        let c = ctx(50);
        let g1 = gamma(&c.one(), &c).unwrap();
        assert!(rel_diff(&g1, &c.one()) < c.tolerance(5));
        let g_half = gamma(&c.rational(&q(1, 2)), &c).unwrap();
        let sqrt_pi = c.pi().sqrt();
        assert!(rel_diff(&g_half, &sqrt_pi) < c.tolerance(5));
        let g6 = gamma(&c.real(6), &c).unwrap();
        assert!(rel_diff(&g6, &c.real(120)) < c.tolerance(5));
    }

    #[test]
    fn gamma_poles() {
        let c = ctx(30);
        for v in [0, -1, -7] {
            assert!(matches!(gamma(&c.real(v), &c), Err(Error::Pole(_))));
            assert!(rgamma(&c.real(v), &c).unwrap().is_zero());
        }
    }

    #[test]
    fn gamma_negative_argument_matches_mpfr() {
        let c = ctx(80);
        for x in [q(-1, 3), q(-5, 2), q(-43, 10), q(7, 10), q(1009, 10)] {
            let xr = c.rational(&x);
            let mine = gamma(&xr, &c).unwrap();
            let mpfr = Float::with_val(c.bits(), xr.gamma_ref());
            assert!(rel_err(&mine, &mpfr) < c.tolerance(5), "x = {x}");
        }
    }

    #[test]
    fn gamma_legendre_duplication() {
        for digits in [40u32, 120] {
            let c = ctx(digits);
            for x in [q(3, 10), q(7, 10), q(19, 10)] {
                let x = c.rational(&x);
                let lhs = gamma(&Float::with_val(c.bits(), &x * 2u32), &c).unwrap();
                let half = Float::with_val(c.bits(), &x + 0.5);
                let two = c.real(2);
                let pw = two.pow(Float::with_val(c.bits(), &x * 2u32) - 1u32);
                let rhs = gamma(&x, &c).unwrap() * gamma(&half, &c).unwrap() * pw / c.pi().sqrt();
                let r = Float::with_val(c.bits(), &lhs - &rhs).abs() / lhs.abs();
                assert!(r < c.tolerance(5), "digits {digits}");
            }
        }
    }

    #[test]
    fn pochhammer_examples() {
        let c = ctx(30);
        let beta = c.rational(&q(1, 3));
        assert_eq!(pochhammer(&beta, 0, &c), 1);
        assert_eq!(pochhammer(&c.one(), 6, &c), 720);
        let p = pochhammer(&beta, 3, &c);
        assert!(rel_diff(&p, &c.rational(&q(28, 27))) < c.tolerance(2));
    }

    #[test]
    fn bessel_half_order_closed_form() {
        let c = ctx(60);
        let z = c.real(12).sqrt();
        let i = bessel_i(&c.rational(&q(1, 2)), &z, &c).unwrap();
        let expect = Float::with_val(c.bits(), 2u32) / (c.pi() * &z);
        let expect = expect.sqrt() * Float::with_val(c.bits(), z.sinh_ref());
        assert!(rel_diff(&i, &expect) < c.tolerance(5));
        let im = bessel_i(&c.rational(&q(-1, 2)), &z, &c).unwrap();
        let expect_m = (Float::with_val(c.bits(), 2u32) / (c.pi() * &z)).sqrt()
            * Float::with_val(c.bits(), z.cosh_ref());
        assert!(rel_diff(&im, &expect_m) < c.tolerance(5));
    }

    #[test]
    fn bessel_three_term_recurrence() {
        let c = ctx(50);
        let nus = [q(1, 3), q(-1, 3), q(1, 2), q(-1, 2), q(2, 3)];
        let zs = [c.real(1), c.real(12).sqrt(), c.real(10)];
        for nu in &nus {
            let nu = c.rational(nu);
            for z in &zs {
                let lo = bessel_i(&Float::with_val(c.bits(), &nu - 1u32), z, &c).unwrap();
                let hi = bessel_i(&Float::with_val(c.bits(), &nu + 1u32), z, &c).unwrap();
                let mid = bessel_i(&nu, z, &c).unwrap();
                let lhs = Float::with_val(c.bits(), &lo - &hi);
                let rhs = Float::with_val(c.bits(), &nu * 2u32) / z * &mid;
                let res = Float::with_val(c.bits(), &lhs - &rhs).abs();
                assert!(res <= c.tolerance(5) * mid.abs());
            }
        }
    }

    #[test]
    fn bessel_near_zero_and_integer_orders() {
        let c = ctx(40);
        let tiny = c.real(1e-30);
        let i0 = bessel_i(&c.zero(), &tiny, &c).unwrap();
        assert!(rel_diff(&i0, &c.one()) < 1e-50);
        assert_eq!(bessel_i(&c.zero(), &c.zero(), &c).unwrap(), 1);
        // I_{-2} = I_2
        let z = c.real(3);
        let a = bessel_i(&c.real(-2), &z, &c).unwrap();
        let b = bessel_i(&c.real(2), &z, &c).unwrap();
        assert!(rel_diff(&a, &b) < c.tolerance(3));
        assert!(bessel_i(&c.rational(&q(-1, 3)), &c.zero(), &c).is_err());
    }

    #[test]
    fn kummer_examples() {
        let c = ctx(50);
        let g = c.rational(&q(9, 10));
        let a = c.real(3);
        let m = kummer_m(&g, &g, &a, &c).unwrap();
        assert!(rel_diff(&m, &Float::with_val(c.bits(), a.exp_ref())) < c.tolerance(5));
        let m0 = kummer_m(&g, &c.rational(&q(2, 3)), &c.zero(), &c).unwrap();
        assert_eq!(m0, 1);
    }

    #[test]
    fn kummer_contiguous_relation() {
        let c = ctx(50);
        let grid = [(q(9, 10), q(2, 3), 3), (q(1, 3), q(5, 2), 1), (q(-7, 4), q(1, 5), 7)];
        for (p, qq, z) in grid {
            let (p, qq, z) = (c.rational(&p), c.rational(&qq), c.real(z));
            let lhs = Float::with_val(c.bits(), &p * &z) / &qq
                * kummer_m(
                    &Float::with_val(c.bits(), &p + 1u32),
                    &Float::with_val(c.bits(), &qq + 1u32),
                    &z,
                    &c,
                )
                .unwrap();
            let diff = kummer_m(&p, &qq, &z, &c).unwrap()
                - kummer_m(&p, &Float::with_val(c.bits(), &qq - 1u32), &z, &c).unwrap();
            let rhs = Float::with_val(c.bits(), 1 - &qq) * diff;
            let res = Float::with_val(c.bits(), &lhs - &rhs).abs();
            assert!(res <= c.tolerance(5) * lhs.abs());
        }
    }

    #[test]
    fn kummer_poles_and_termination() {
        let c = ctx(30);
        let z = c.real(2);
        assert!(matches!(
            kummer_m(&c.real(1), &c.real(-2), &z, &c),
            Err(Error::Pole(_))
        ));
        // M(-1, -3, z) = 1 + z/3
        let m = kummer_m(&c.real(-1), &c.real(-3), &z, &c).unwrap();
        assert!(rel_diff(&m, &c.rational(&q(5, 3))) < c.tolerance(2));
    }

    #[test]
    fn regularized_kummer_matches_division() {
        let c = ctx(40);
        let (p, qq, z) = (c.rational(&q(4, 3)), c.rational(&q(-1, 2)), c.real(3));
        let reg = kummer_m_regularized(&p, &qq, &z, &c).unwrap();
        let direct = kummer_m(&p, &qq, &z, &c).unwrap() / gamma(&qq, &c).unwrap();
        assert!(rel_diff(&reg, &direct) < c.tolerance(5));
        // At q = 0 the regularized value is z p M(p+1, 2, z).
        let reg0 = kummer_m_regularized(&p, &c.zero(), &z, &c).unwrap();
        let lim = Float::with_val(c.bits(), &z * &p)
            * kummer_m(&Float::with_val(c.bits(), &p + 1u32), &c.real(2), &z, &c).unwrap();
        assert!(rel_diff(&reg0, &lim) < c.tolerance(5));
    }

    #[test]
    fn precision_doubling_is_stable() {
        let lo = ctx(40);
        let hi = ctx(80);
        let nu = q(-1, 3);
        let z = 7;
        let a = bessel_i(&lo.rational(&nu), &lo.real(z), &lo).unwrap();
        let b = bessel_i(&hi.rational(&nu), &hi.real(z), &hi).unwrap();
        assert!(rel_diff(&a, &b) < lo.tolerance(5));
        let ga = gamma(&lo.rational(&q(7, 3)), &lo).unwrap();
        let gb = gamma(&hi.rational(&q(7, 3)), &hi).unwrap();
        assert!(rel_diff(&ga, &gb) < lo.tolerance(5));
        let ka = kummer_m(&lo.rational(&q(9, 10)), &lo.rational(&q(2, 3)), &lo.real(3), &lo).unwrap();
        let kb = kummer_m(&hi.rational(&q(9, 10)), &hi.rational(&q(2, 3)), &hi.real(3), &hi).unwrap();
        assert!(rel_diff(&ka, &kb) < lo.tolerance(5));
    }
}
