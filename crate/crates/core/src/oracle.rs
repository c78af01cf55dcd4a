//! Recurrence coefficients computed directly from a truncated measure, and
//! the diagnostics that only need the measure and the resulting basis.

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;
use crate::painleve::CoeffSeq;
use crate::params::FamilyParams;
use crate::precision::{pow10, PrecisionContext, Real};

/// Monic recurrence coefficients with the squared norms `⟨P_n, P_n⟩`.
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    pub coeffs: CoeffSeq,
    pub norms: Vec<Real>,
}

impl OrthoBasis {
    pub fn max_index(&self) -> usize {
        self.coeffs.max_index()
    }
}

/// Discretized Stieltjes procedure: `b_n = ⟨x P_n, P_n⟩ / ⟨P_n, P_n⟩`,
/// `a_{n+1}² = ⟨P_{n+1}, P_{n+1}⟩ / ⟨P_n, P_n⟩`, for `n ≤ n_max`.
pub fn stieltjes_coeffs(measure: &DiscreteMeasure, n_max: usize, ctx: &PrecisionContext) -> Result<OrthoBasis> {
    if measure.len() < n_max + 1 {
        return Err(Error::rank(
            n_max,
            format!("measure has only {} support points", measure.len()),
        ));
    }
    if measure.max_order() < 2 * n_max + 1 {
        return Err(Error::Validity(format!(
            "measure certified up to order {}, Stieltjes to index {n_max} needs {}",
            measure.max_order(),
            2 * n_max + 1
        )));
    }
    let bits = ctx.bits();
    let xs = measure.points();
    let ws = measure.weights();
    let floor = pow10(bits, -(i64::from(ctx.digits())));
    let mut prev: Vec<Real> = vec![Float::new(bits); xs.len()];
    let mut cur: Vec<Real> = vec![ctx.one(); xs.len()];
    let mut a_sq = vec![ctx.zero()];
    let mut b = Vec::with_capacity(n_max + 1);
    let mut norms: Vec<Real> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut norm = Float::new(bits);
        let mut first = Float::new(bits);
        for ((x, w), p) in xs.iter().zip(ws).zip(&cur) {
            let wp2 = Float::with_val(bits, p.square_ref()) * w;
            first += Float::with_val(bits, &wp2 * x);
            norm += wp2;
        }
        let bad = match norms.last() {
            Some(last) => norm <= Float::with_val(bits, last * &floor),
            None => norm <= 0,
        };
        if bad {
            return Err(Error::rank(n, "squared norm is negligible at this precision"));
        }
        if n > 0 {
            a_sq.push(Float::with_val(bits, &norm / &norms[n - 1]));
        }
        let bn = first / &norm;
        norms.push(norm);
        if n < n_max {
            let next: Vec<Real> = xs
                .iter()
                .zip(cur.iter().zip(&prev))
                .map(|(x, (p, q))| {
                    let shifted = Float::with_val(bits, x - &bn);
                    Float::with_val(bits, &shifted * p) - Float::with_val(bits, &a_sq[n] * q)
                })
                .collect();
            prev = std::mem::replace(&mut cur, next);
        }
        b.push(bn);
    }
    Ok(OrthoBasis {
        coeffs: CoeffSeq { a_sq, b },
        norms,
    })
}

/// `P_0(x), …, P_n(x)` by the forward recurrence.
pub fn eval_monic_all(coeffs: &CoeffSeq, n: usize, x: &Real) -> Vec<Real> {
    let bits = x.prec();
    let mut out = Vec::with_capacity(n + 1);
    out.push(Float::with_val(bits, 1));
    if n == 0 {
        return out;
    }
    out.push(Float::with_val(bits, x - &coeffs.b[0]));
    for k in 1..n {
        let t = Float::with_val(bits, x - &coeffs.b[k]) * &out[k];
        let next = t - Float::with_val(bits, &coeffs.a_sq[k] * &out[k - 1]);
        out.push(next);
    }
    out
}

/// `P_n(x)` with `P_{-1} = 0`, `P_0 = 1`.
pub fn eval_monic(basis: &OrthoBasis, n: usize, x: &Real) -> Real {
    eval_monic_all(&basis.coeffs, n, x).pop().expect("at least P_0")
}

/// `Σ f(x) g(x) w` over the measure.
pub fn inner<F, G>(measure: &DiscreteMeasure, f: F, g: G, bits: u32) -> Real
where
    F: Fn(&Real) -> Real,
    G: Fn(&Real) -> Real,
{
    let mut s = Float::new(bits);
    for (x, w) in measure.iter() {
        s += f(x) * g(x) * w;
    }
    s
}

/// Largest `|⟨P_n, P_m⟩| / √(‖P_n‖² ‖P_m‖²)` over `n ≠ m ≤ n_max`.
pub fn orthogonality_defect(basis: &OrthoBasis, measure: &DiscreteMeasure, n_max: usize, ctx: &PrecisionContext) -> Real {
    let bits = ctx.bits();
    let n_max = n_max.min(basis.max_index());
    let mut gram = vec![vec![Float::new(bits); n_max + 1]; n_max + 1];
    for (x, w) in measure.iter() {
        let ps = eval_monic_all(&basis.coeffs, n_max, &Float::with_val(bits, x));
        for i in 0..=n_max {
            for j in 0..i {
                gram[i][j] += Float::with_val(bits, &ps[i] * &ps[j]) * w;
            }
        }
    }
    let mut worst = Float::new(bits);
    for i in 0..=n_max {
        for j in 0..i {
            let scale = Float::with_val(bits, &basis.norms[i] * &basis.norms[j]).sqrt();
            worst.max_mut(&(Float::with_val(bits, gram[i][j].abs_ref()) / scale));
        }
    }
    worst
}

/// Coefficients of `ΔP_n(x) = P_n(x+1) - P_n(x)` in the basis `P_0..P_{n-1}`.
#[derive(Debug, Clone)]
pub struct StructureCoeffs {
    /// `A_{n-1,n}`, which should equal `n`.
    pub leading: Real,
    /// `B_n = A_{n-2,n}`.
    pub b_coeff: Real,
    /// Largest `|A_{k,n}|` over `k < n-2`, which should vanish.
    pub lower: Real,
}

pub fn structure_b_coeff(
    basis: &OrthoBasis,
    measure: &DiscreteMeasure,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<StructureCoeffs> {
    if n < 2 || n > basis.max_index() {
        return Err(Error::Validity(format!(
            "structure coefficients need 2 ≤ n ≤ {}",
            basis.max_index()
        )));
    }
    let bits = ctx.bits();
    let mut proj = vec![Float::new(bits); n];
    for (x, w) in measure.iter() {
        let x = Float::with_val(bits, x);
        let ps = eval_monic_all(&basis.coeffs, n, &x);
        let up = eval_monic_all(&basis.coeffs, n, &Float::with_val(bits, &x + 1u32));
        let delta = Float::with_val(bits, &up[n] - &ps[n]) * w;
        for (k, acc) in proj.iter_mut().enumerate() {
            *acc += Float::with_val(bits, &delta * &ps[k]);
        }
    }
    let coeffs: Vec<Real> = proj
        .into_iter()
        .zip(&basis.norms)
        .map(|(p, nk)| p / nk)
        .collect();
    let mut lower = Float::new(bits);
    for c in &coeffs[..n - 2] {
        lower.max_mut(&Float::with_val(bits, c.abs_ref()));
    }
    Ok(StructureCoeffs {
        leading: coeffs[n - 1].clone(),
        b_coeff: coeffs[n - 2].clone(),
        lower,
    })
}

/// Weighted sums `R_n, T_n, r_n, t_n` over the support `y` with orthonormal `p_n`:
/// `R_n = Σ p_n(y) p_n(y-1) y/(γ+y-1) w(y)`,
/// `T_n = Σ p_n(y) p_n(y-1) (γ-1)/(γ+y-1) w(y)`,
/// `r_n = a_n Σ p_n(y) p_{n-1}(y-1) y/(γ+y-1) w(y)`,
/// `t_n = a_n Σ p_n(y) p_{n-1}(y-1) (γ-1)/(γ+y-1) w(y)`.
#[derive(Debug, Clone)]
#[allow(non_snake_case)]
pub struct LadderDiagnostics {
    pub R: Real,
    pub T: Real,
    pub r: Real,
    pub t: Real,
}

pub fn ladder_diagnostics(
    basis: &OrthoBasis,
    measure: &DiscreteMeasure,
    params: &FamilyParams,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<LadderDiagnostics> {
    if n > basis.max_index() {
        return Err(Error::Validity(format!("ladder sums need n ≤ {}", basis.max_index())));
    }
    let bits = ctx.bits();
    let g = params.gamma_real(ctx)?;
    let g1 = Float::with_val(bits, &g - 1u32);
    let mut big_r = Float::new(bits);
    let mut big_t = Float::new(bits);
    let mut small_r = Float::new(bits);
    let mut small_t = Float::new(bits);
    for (y, w) in measure.iter() {
        let y = Float::with_val(bits, y);
        let den = Float::with_val(bits, &g + &y) - 1u32;
        if den.is_zero() {
            return Err(Error::Pole("ladder sum hits y = 1 - γ".into()));
        }
        let here = eval_monic_all(&basis.coeffs, n, &y);
        let back = eval_monic_all(&basis.coeffs, n, &Float::with_val(bits, &y - 1u32));
        let fy = Float::with_val(bits, &y / &den) * w;
        let fg = Float::with_val(bits, &g1 / &den) * w;
        let same = Float::with_val(bits, &here[n] * &back[n]);
        big_r += Float::with_val(bits, &same * &fy);
        big_t += same * &fg;
        if n > 0 {
            let cross = Float::with_val(bits, &here[n] * &back[n - 1]);
            small_r += Float::with_val(bits, &cross * &fy);
            small_t += cross * &fg;
        }
    }
    // Orthonormal p_n = P_n / √‖P_n‖², a_n = √(‖P_n‖² / ‖P_{n-1}‖²).
    big_r /= &basis.norms[n];
    big_t /= &basis.norms[n];
    if n > 0 {
        let scale = Float::with_val(bits, &basis.norms[n] * &basis.norms[n - 1]).sqrt();
        let a_n = Float::with_val(bits, basis.coeffs.a_sq[n].sqrt_ref());
        small_r = small_r * &a_n / &scale;
        small_t = small_t * &a_n / &scale;
    }
    Ok(LadderDiagnostics {
        R: big_r,
        T: big_t,
        r: small_r,
        t: small_t,
    })
}

/// Interval guaranteed to contain every zero of `P_n` (Gershgorin on the Jacobi matrix).
fn gershgorin(coeffs: &CoeffSeq, n: usize, bits: u32) -> (Real, Real) {
    let mut lo: Option<Real> = None;
    let mut hi: Option<Real> = None;
    for k in 0..n {
        let mut r = Float::new(bits);
        if k > 0 {
            r += Float::with_val(bits, coeffs.a_sq[k].abs_ref()).sqrt();
        }
        if k + 1 < n {
            r += Float::with_val(bits, coeffs.a_sq[k + 1].abs_ref()).sqrt();
        }
        let l = Float::with_val(bits, &coeffs.b[k] - &r);
        let h = Float::with_val(bits, &coeffs.b[k] + &r);
        lo = Some(match lo {
            Some(v) if v < l => v,
            _ => l,
        });
        hi = Some(match hi {
            Some(v) if v > h => v,
            _ => h,
        });
    }
    (lo.expect("n ≥ 1"), hi.expect("n ≥ 1"))
}

/// The `n` zeros of `P_n` in ascending order, bracketed on the support points
/// plus three equally spaced points inside every gap, refined by bisection.
pub fn zeros(basis: &OrthoBasis, measure: &DiscreteMeasure, n: usize, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if n > basis.max_index() {
        return Err(Error::Validity(format!("zeros need n ≤ {}", basis.max_index())));
    }
    let bits = ctx.bits();
    let (glo, ghi) = gershgorin(&basis.coeffs, n, bits);
    let (glo, ghi) = (glo - 1u32, ghi + 1u32);
    let pts = measure.points();
    let first = Float::with_val(bits, &pts[0] - 1u32);
    let last = Float::with_val(bits, &pts[pts.len() - 1] + 1u32);
    let lo = if glo > first { glo } else { first };
    let hi = if ghi < last { ghi } else { last };

    let mut anchors = vec![lo.clone()];
    anchors.extend(pts.iter().filter(|p| **p > lo && **p < hi).map(|p| Float::with_val(bits, p)));
    anchors.push(hi.clone());
    let mut grid = Vec::with_capacity(anchors.len() * 4);
    for w in anchors.windows(2) {
        let step = Float::with_val(bits, &w[1] - &w[0]) / 4u32;
        for j in 0..4u32 {
            grid.push(Float::with_val(bits, &step * j) + &w[0]);
        }
    }
    grid.push(hi);
    grid.dedup();

    let p = |x: &Real| eval_monic(basis, n, x);
    let tol = pow10(bits, -(i64::from(ctx.digits())));
    let mut roots = Vec::with_capacity(n);
    let mut left = grid[0].clone();
    let mut f_left = p(&left);
    if f_left.is_zero() {
        roots.push(left.clone());
    }
    for x in grid.iter().skip(1) {
        let fx = p(x);
        if fx.is_zero() {
            roots.push(x.clone());
        } else if !f_left.is_zero() && (fx < 0) != (f_left < 0) {
            let (mut a, mut b) = (left.clone(), x.clone());
            let neg_at_a = f_left < 0;
            loop {
                let width = Float::with_val(bits, &b - &a);
                let scale = Float::with_val(bits, a.abs_ref()).max(&Float::with_val(bits, 1));
                if width <= Float::with_val(bits, &tol * &scale) {
                    break;
                }
                let mid = Float::with_val(bits, &a + &b) / 2u32;
                let fm = p(&mid);
                if fm.is_zero() {
                    a = mid.clone();
                    b = mid;
                    break;
                }
                if (fm < 0) == neg_at_a {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            roots.push(Float::with_val(bits, &a + &b) / 2u32);
        }
        left = x.clone();
        f_left = fx;
    }
    if roots.len() != n {
        return Err(Error::ZeroCount {
            degree: n,
            found: roots.len(),
        });
    }
    Ok(roots)
}

/// True when every gap between consecutive zeros contains a support point.
pub fn interlacing_holds(zeros: &[Real], points: &[Real]) -> bool {
    zeros
        .windows(2)
        .all(|z| points.iter().any(|p| *p > z[0] && *p < z[1]))
}

/// `Σ_{k<2n} b_k > n(n-1) + n(1-β)` for `β ≠ 1`, `Σ_{k<n} b_k > n(n-1)/2` for `β = 1`.
pub fn partial_sum_check(coeffs: &CoeffSeq, beta: &Rational, n: usize) -> Result<bool> {
    let one = *beta == 1;
    let count = if one { n } else { 2 * n };
    if coeffs.b.len() < count {
        return Err(Error::Length {
            left: coeffs.b.len(),
            right: count,
        });
    }
    let bits = coeffs.b.first().map(|x| x.prec()).unwrap_or(64);
    let mut s = Float::new(bits);
    for bk in &coeffs.b[..count] {
        s += bk;
    }
    let nn = Rational::from(n);
    let bound = if one {
        (&nn * Rational::from(&nn - 1u32)) / 2u32
    } else {
        (&nn * Rational::from(&nn - 1u32)) + (&nn * Rational::from(1 - beta))
    };
    Ok(s > bound)
}

/// Determinant by Gaussian elimination with partial pivoting.
fn determinant(mut m: Vec<Vec<Real>>, bits: u32) -> Real {
    let n = m.len();
    let mut det = Float::with_val(bits, 1);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                let a = Float::with_val(bits, m[i][col].abs_ref());
                let b = Float::with_val(bits, m[j][col].abs_ref());
                a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("nonempty range");
        if m[pivot][col].is_zero() {
            return Float::new(bits);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= &m[col][col];
        for row in col + 1..n {
            let f = Float::with_val(bits, &m[row][col] / &m[col][col]);
            for k in col..n {
                let t = Float::with_val(bits, &f * &m[col][k]);
                m[row][k] -= t;
            }
        }
    }
    det
}

/// Recurrence coefficients from Hankel determinants of the moments:
/// `a_n² = D_{n+1} D_{n-1} / D_n²` and `Σ_{k<n} b_k = D'_n / D_n`, where `D'_n`
/// replaces the last column by `m_{i+n}`.
pub fn hankel_coeffs(moments: &[Real], n_max: usize, bits: u32) -> Result<CoeffSeq> {
    if moments.len() < 2 * n_max + 2 {
        return Err(Error::Length {
            left: moments.len(),
            right: 2 * n_max + 2,
        });
    }
    let d = |n: usize, shifted_last: bool| -> Real {
        if n == 0 {
            return Float::with_val(bits, 1);
        }
        let m: Vec<Vec<Real>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let idx = if shifted_last && j == n - 1 { i + n } else { i + j };
                        Float::with_val(bits, &moments[idx])
                    })
                    .collect()
            })
            .collect();
        determinant(m, bits)
    };
    let dets: Vec<Real> = (0..=n_max + 1).map(|n| d(n, false)).collect();
    let primes: Vec<Real> = (0..=n_max + 1).map(|n| d(n, true)).collect();
    for (n, dn) in dets.iter().enumerate() {
        if dn.is_zero() {
            return Err(Error::rank(n, "Hankel determinant vanishes"));
        }
    }
    let trace = |n: usize| -> Real {
        if n == 0 {
            Float::new(bits)
        } else {
            Float::with_val(bits, &primes[n] / &dets[n])
        }
    };
    let mut a_sq = vec![Float::new(bits)];
    let mut b = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        b.push(trace(n + 1) - trace(n));
        if n >= 1 {
            let num = Float::with_val(bits, &dets[n + 1] * &dets[n - 1]);
            a_sq.push(num / Float::with_val(bits, dets[n].square_ref()));
        }
    }
    Ok(CoeffSeq { a_sq, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{build_measure, moment};
    use crate::params::{Lattice, Mix};
    use crate::precision::{rel_diff, rel_err};
    use rug::ops::Pow;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    fn basis_for(p: &FamilyParams, lat: &Lattice, n: usize, c: &PrecisionContext) -> (DiscreteMeasure, OrthoBasis) {
        let m = build_measure(p, lat, 2 * n + 2, c).unwrap();
        let b = stieltjes_coeffs(&m, n, c).unwrap();
        (m, b)
    }

    /// Weights `(β)_k c^k / k!` with `β = 1`, `c = 1/2`, i.e. `2^-k`.
    fn classical_meixner(c: &PrecisionContext) -> DiscreteMeasure {
        let points = (0..600u32).map(|k| c.real(k)).collect();
        let weights = (0..600i32).map(|k| Float::with_val(c.bits(), 2).pow(-k)).collect();
        DiscreteMeasure::from_parts(points, weights, pow10(c.bits(), -150), 8).unwrap()
    }

    #[test]
    fn classical_meixner_first_coefficients() {
        let c = ctx(60);
        let m = classical_meixner(&c);
        let basis = stieltjes_coeffs(&m, 3, &c).unwrap();
        assert!(rel_diff(&basis.coeffs.b[0], &c.one()) < c.tolerance(10));
        assert!(rel_diff(&basis.coeffs.a_sq[1], &c.real(2)) < c.tolerance(10));
        // n(n + β - 1) c / (1 - c)² and (n + (n + β) c) / (1 - c)
        for n in 1..=3u32 {
            assert!(rel_diff(&basis.coeffs.a_sq[n as usize], &c.real(2 * n * n)) < c.tolerance(10));
            assert!(rel_diff(&basis.coeffs.b[n as usize], &c.real(3 * n + 1)) < c.tolerance(10));
        }
    }

    #[test]
    fn norms_give_a_squared() {
        let c = ctx(60);
        let p = FamilyParams::charlier(q(3, 1), q(1, 3));
        let (_, basis) = basis_for(&p, &Lattice::Plain, 10, &c);
        for n in 1..=10 {
            assert!(basis.norms[n] > 0);
            let ratio = Float::with_val(c.bits(), &basis.norms[n] / &basis.norms[n - 1]);
            assert_eq!(ratio, basis.coeffs.a_sq[n]);
        }
    }

    #[test]
    fn eval_monic_low_degrees() {
        let c = ctx(60);
        let p = FamilyParams::charlier(q(3, 1), q(1, 3));
        let (m, basis) = basis_for(&p, &Lattice::Plain, 10, &c);
        let x = c.real(1.75);
        let p1 = eval_monic(&basis, 1, &x);
        assert_eq!(p1, Float::with_val(c.bits(), &x - &basis.coeffs.b[0]));
        let p2 = eval_monic(&basis, 2, &basis.coeffs.b[0]);
        assert!(rel_diff(&p2, &Float::with_val(c.bits(), -&basis.coeffs.a_sq[1])) < c.tolerance(5));
        assert!(orthogonality_defect(&basis, &m, 10, &c) < c.tolerance(10));
    }

    #[test]
    fn rejects_underbuilt_measure() {
        let c = ctx(40);
        let p = FamilyParams::charlier(q(3, 1), q(1, 3));
        let m = build_measure(&p, &Lattice::Plain, 4, &c).unwrap();
        assert!(matches!(stieltjes_coeffs(&m, 10, &c), Err(Error::Validity(_))));
    }

    #[test]
    fn structure_relation() {
        let c = ctx(80);
        let p = FamilyParams::charlier(q(3, 1), q(1, 3));
        let (m, basis) = basis_for(&p, &Lattice::Plain, 8, &c);
        let a = c.real(3);
        for n in 2..=8 {
            let s = structure_b_coeff(&basis, &m, n, &c).unwrap();
            assert!(rel_diff(&s.leading, &c.real(n as u32)) < c.tolerance(15));
            let expect = Float::with_val(c.bits(), &basis.coeffs.a_sq[n] * &basis.coeffs.a_sq[n - 1]) / &a;
            assert!(rel_err(&s.b_coeff, &expect) < c.tolerance(15), "n = {n}");
            assert!(s.lower < c.tolerance(15));
        }
    }

    #[test]
    fn ladder_sums_on_plain_meixner() {
        let c = ctx(80);
        let p = FamilyParams::meixner(q(3, 1), q(2, 3), q(9, 10));
        let (m, basis) = basis_for(&p, &Lattice::Plain, 6, &c);
        for n in 0..=6 {
            let d = ladder_diagnostics(&basis, &m, &p, n, &c).unwrap();
            let rt = Float::with_val(c.bits(), &d.R + &d.T) - 1u32;
            assert!(rt.abs() < c.tolerance(15));
            let rt = Float::with_val(c.bits(), &d.r + &d.t);
            assert!(rt.abs() < c.tolerance(15));
        }
    }

    #[test]
    fn zeros_trace_and_interlacing() {
        let c = ctx(60);
        let p = FamilyParams::charlier(q(3, 1), q(1, 3));
        let lat = Lattice::Bi(Mix::Finite(q(10, 1)));
        let (m, basis) = basis_for(&p, &lat, 8, &c);
        let z1 = zeros(&basis, &m, 1, &c).unwrap();
        assert!(rel_diff(&z1[0], &basis.coeffs.b[0]) < c.tolerance(5));
        for n in 1..=8 {
            let z = zeros(&basis, &m, n, &c).unwrap();
            let sum: Real = z.iter().fold(c.zero(), |s, x| s + x);
            let trace: Real = basis.coeffs.b[..n].iter().fold(c.zero(), |s, x| s + x);
            assert!(rel_diff(&sum, &trace) < c.tolerance(10));
            assert!(interlacing_holds(&z, m.points()));
        }
    }

    #[test]
    fn partial_sums() {
        let c = ctx(40);
        let seq = CoeffSeq {
            a_sq: (0..5).map(|n| c.real(3 * n)).collect(),
            b: (0..5).map(|n| c.real(n + 3)).collect(),
        };
        assert!(partial_sum_check(&seq, &q(1, 1), 5).unwrap());
        assert!(partial_sum_check(&seq, &q(1, 3), 5).is_err());
    }

    #[test]
    fn hankel_agrees_with_stieltjes() {
        let c = ctx(100);
        let p = FamilyParams::meixner(q(3, 1), q(2, 3), q(9, 10));
        let lat = Lattice::Bi(Mix::Finite(q(2, 1)));
        let (m, basis) = basis_for(&p, &lat, 8, &c);
        let moments: Vec<Real> = (0..18).map(|j| moment(&m, j).unwrap()).collect();
        let h = hankel_coeffs(&moments, 8, c.bits()).unwrap();
        for n in 0..=8 {
            assert!(rel_diff(&h.b[n], &basis.coeffs.b[n]) < c.tolerance(40));
            assert!(rel_diff(&h.a_sq[n], &basis.coeffs.a_sq[n]) < c.tolerance(40));
        }
    }
}
