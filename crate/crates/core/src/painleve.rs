//! Forward iteration of the discrete Painlevé-type recurrences for the
//! generalized Charlier and Meixner recurrence coefficients.
//!
//! Charlier: `b_n` comes linearly from
//! `b_n + b_{n-1} - n + β = a n / a_n²` and `a_{n+1}²` rationally from
//! `(a_{n+1}² - a)(a_n² - a) = a (b_n - n)(b_n - n + β - 1)`, seeded by
//! `a_1² = a - b_0 (b_0 + β - 1)`.
//!
//! Meixner: the pair `(u_n, v_n)` obeys
//! `(u_n + v_n)(u_{n+1} + v_n) = (γ-1)/a² · v_n (v_n - a)(v_n - a(γ-β)/(γ-1))` and
//! `(u_n + v_n)(u_n + v_{n-1}) = u_n/(u_n - an/(γ-1)) · (u_n + a)(u_n + a(γ-β)/(γ-1))`,
//! with `u_0 = 0`, `v_0 = a(γ - β + a - b_0)/(γ-1)`, and
//! `a_n² = na - (γ-1) u_n`, `b_n = n + γ - β + a - (γ-1) v_n / a`.
//!
//! Forward orbits separate from the orthogonality solution geometrically, so
//! every run is repeated at twice the precision and only the agreeing prefix
//! is reported as certified.

use rug::{Float, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::b0_initial;
use crate::params::{FamilyParams, Lattice};
use crate::precision::{pow10, rel_diff, PrecisionContext, Real};

/// Monic recurrence coefficients `x P_n = P_{n+1} + b_n P_n + a_n² P_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeq {
    /// `a_0² = 0, a_1², …, a_N²`
    pub a_sq: Vec<Real>,
    /// `b_0, …, b_N`
    pub b: Vec<Real>,
}

impl CoeffSeq {
    /// Highest index `N`.
    pub fn max_index(&self) -> usize {
        self.b.len().saturating_sub(1)
    }

    pub fn truncated(&self, n: usize) -> CoeffSeq {
        CoeffSeq {
            a_sq: self.a_sq[..=n.min(self.max_index())].to_vec(),
            b: self.b[..=n.min(self.max_index())].to_vec(),
        }
    }

    pub fn rounded(&self, ctx: &PrecisionContext) -> CoeffSeq {
        CoeffSeq {
            a_sq: self.a_sq.iter().map(|x| ctx.round(x)).collect(),
            b: self.b.iter().map(|x| ctx.round(x)).collect(),
        }
    }
}

/// State of the Meixner system: `u_0..u_{N+1}`, `v_0..v_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct UVSeq {
    pub u: Vec<Real>,
    pub v: Vec<Real>,
}

/// `β = 1` Charlier coefficients in the form `a_n² = a(1 - c_n²)`,
/// `b_n = n + √a c_n c_{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DP2Seq {
    /// `c_0 = 1, c_1, …, c_N`
    pub c: Vec<Real>,
    /// `√a (c_{n+1} + c_{n-1}) - n c_n / (1 - c_n²)` for `n = 1..N-1`, at index `n-1`.
    pub residuals: Vec<Real>,
    /// `b_n - n - √a c_n c_{n+1}` for `n = 0..N-1`.
    pub b_residuals: Vec<Real>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivityKind {
    /// `a_n² ≤ 0` for some `n ≥ 1`.
    ASquared,
    /// `b_n ≤ min(0, 1-β)`.
    B,
}

/// A coefficient outside the range an orthogonality measure allows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PositivityWarning {
    pub index: usize,
    pub kind: PositivityKind,
}

/// Lists every violation of `a_n² > 0` (`n ≥ 1`) and `b_n > min(0, 1-β)`.
pub fn positivity_warnings(seq: &CoeffSeq, beta: &Rational) -> Vec<PositivityWarning> {
    let floor = Rational::from(1 - beta).min(Rational::new());
    let mut out = Vec::new();
    for n in 0..=seq.max_index() {
        if n >= 1 && seq.a_sq[n] <= 0 {
            out.push(PositivityWarning {
                index: n,
                kind: PositivityKind::ASquared,
            });
        }
        if seq.b[n] <= floor {
            out.push(PositivityWarning {
                index: n,
                kind: PositivityKind::B,
            });
        }
    }
    out
}

/// Magnitude below which a divisor counts as zero at this precision.
fn zero_threshold(scale: &Real, ctx: &PrecisionContext) -> Real {
    let mut s = Float::with_val(ctx.bits(), scale.abs_ref());
    s.max_mut(&ctx.one());
    s * pow10(ctx.bits(), -(i64::from(ctx.digits())))
}

fn is_negligible(x: &Real, scale: &Real, ctx: &PrecisionContext) -> bool {
    Float::with_val(ctx.bits(), x.abs_ref()) <= zero_threshold(scale, ctx)
}

/// Iterates the Charlier system from `b_0` up to index `n_max`.
///
/// Where `a_n²` comes within `10^(-digits/2)` of `a` the rational update for
/// `a_{n+1}²` is replaced by the linear one
/// `n a (b_n - b_{n-1} - 1) = a_n² (a_{n-1}² - a_{n+1}²)`.
pub fn charlier_iterate(a: &Real, beta: &Real, b0: &Real, n_max: usize, ctx: &PrecisionContext) -> Result<CoeffSeq> {
    if *a <= 0 {
        return Err(Error::Validity("a must be positive".into()));
    }
    if n_max == 0 {
        return Err(Error::Validity("at least one step is required".into()));
    }
    let bits = ctx.bits();
    let beta_m1 = Float::with_val(bits, beta - 1u32);
    let mut a_sq = Vec::with_capacity(n_max + 1);
    let mut b = Vec::with_capacity(n_max + 1);
    a_sq.push(ctx.zero());
    b.push(ctx.round(b0));
    // a_1² = a - b_0 (b_0 + β - 1)
    a_sq.push(Float::with_val(bits, a - Float::with_val(bits, b0 * Float::with_val(bits, b0 + &beta_m1))));
    let mut near_a = Float::with_val(bits, a.abs_ref());
    near_a.max_mut(&ctx.one());
    near_a *= pow10(bits, -(i64::from(ctx.digits()) / 2));
    for n in 1..=n_max {
        let an = &a_sq[n];
        if is_negligible(an, a, ctx) {
            return Err(Error::singular(n, "a_n² vanishes"));
        }
        let nn = Float::with_val(bits, n);
        // b_n = a n / a_n² - b_{n-1} + n - β
        let bn = Float::with_val(bits, a * &nn) / an - &b[n - 1] + &nn - beta;
        if n < n_max {
            let den = Float::with_val(bits, an - a);
            let next = if Float::with_val(bits, den.abs_ref()) > near_a {
                let d = Float::with_val(bits, &bn - &nn);
                let prod = Float::with_val(bits, &d * Float::with_val(bits, &d + &beta_m1));
                Float::with_val(bits, a * prod) / den + a
            } else {
                // a_{n+1}² = a_{n-1}² - n a (b_n - b_{n-1} - 1) / a_n², which has no pole at a_n² = a
                let step = Float::with_val(bits, &bn - &b[n - 1]) - 1u32;
                let t = Float::with_val(bits, a * &nn) * step / an;
                Float::with_val(bits, &a_sq[n - 1] - t)
            };
            a_sq.push(next);
        }
        b.push(bn);
    }
    Ok(CoeffSeq { a_sq, b })
}

/// Iterates the Meixner `(u, v)` system from `b_0` up to index `n_max`.
pub fn meixner_iterate(
    a: &Real,
    beta: &Real,
    gamma: &Real,
    b0: &Real,
    n_max: usize,
    ctx: &PrecisionContext,
) -> Result<(UVSeq, CoeffSeq)> {
    if *a <= 0 {
        return Err(Error::Validity("a must be positive".into()));
    }
    if n_max == 0 {
        return Err(Error::Validity("at least one step is required".into()));
    }
    if *gamma == 1 {
        return Err(Error::Validity("the (u, v) system requires γ ≠ 1".into()));
    }
    if gamma == beta {
        return Err(Error::Degenerate(
            "γ = β reduces to classical Charlier weights a^x/Γ(x+1): a_n² = na, b_n = n + a".into(),
        ));
    }
    let bits = ctx.bits();
    let g1 = Float::with_val(bits, gamma - 1u32);
    let gb = Float::with_val(bits, gamma - beta);
    // a(γ-β)/(γ-1) and (γ-1)/a²
    let shift = Float::with_val(bits, a * &gb) / &g1;
    let lead = Float::with_val(bits, &g1 / Float::with_val(bits, a.square_ref()));

    let rhs1 = |v: &Real| -> Real {
        let f1 = Float::with_val(bits, v - a);
        let f2 = Float::with_val(bits, v - &shift);
        Float::with_val(bits, &lead * v) * f1 * f2
    };

    let mut u = Vec::with_capacity(n_max + 2);
    let mut v = Vec::with_capacity(n_max + 1);
    u.push(ctx.zero());
    let v0 = Float::with_val(bits, a / &g1) * (Float::with_val(bits, &gb + a) - b0);
    v.push(v0);

    let step_u = |n: usize, un: &Real, vn: &Real| -> Result<Real> {
        let s = Float::with_val(bits, un + vn);
        if is_negligible(&s, a, ctx) {
            return Err(Error::singular(n, "u_n + v_n vanishes"));
        }
        Ok(rhs1(vn) / s - vn)
    };

    u.push(step_u(0, &u[0], &v[0])?);
    for n in 1..=n_max {
        let un = u[n].clone();
        let nn = Float::with_val(bits, n);
        let pole = Float::with_val(bits, a * &nn) / &g1;
        let den_u = Float::with_val(bits, &un - &pole);
        if is_negligible(&den_u, &pole, ctx) {
            return Err(Error::singular(n, "u_n equals an/(γ-1)"));
        }
        let s = Float::with_val(bits, &un + &v[n - 1]);
        if is_negligible(&s, a, ctx) {
            return Err(Error::singular(n, "u_n + v_{n-1} vanishes"));
        }
        let rhs2 = Float::with_val(bits, &un / den_u)
            * Float::with_val(bits, &un + a)
            * Float::with_val(bits, &un + &shift);
        let vn = rhs2 / s - &un;
        u.push(step_u(n, &un, &vn)?);
        v.push(vn);
    }

    let coeffs = meixner_coeffs_from_uv(a, beta, gamma, &u, &v, ctx);
    Ok((UVSeq { u, v }, coeffs))
}

fn meixner_coeffs_from_uv(a: &Real, beta: &Real, gamma: &Real, u: &[Real], v: &[Real], ctx: &PrecisionContext) -> CoeffSeq {
    let bits = ctx.bits();
    let g1 = Float::with_val(bits, gamma - 1u32);
    let base = Float::with_val(bits, gamma - beta) + a;
    let n_max = v.len() - 1;
    let mut a_sq = Vec::with_capacity(n_max + 1);
    let mut b = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let nn = Float::with_val(bits, n);
        a_sq.push(Float::with_val(bits, a * &nn) - Float::with_val(bits, &g1 * &u[n]));
        let vterm = Float::with_val(bits, &g1 * &v[n]) / a;
        b.push(Float::with_val(bits, &nn + &base) - vterm);
    }
    CoeffSeq { a_sq, b }
}

/// `β = 1` reduction: `c_n` from `a_n² = a(1 - c_n²)` with `c_0 = 1` and the sign
/// of `c_{n+1}` equal to that of `(b_n - n)/c_n`.
pub fn dp2_reduce(a: &Real, b0: &Real, n_max: usize, ctx: &PrecisionContext) -> Result<DP2Seq> {
    let bits = ctx.bits();
    let seq = charlier_iterate(a, &ctx.one(), b0, n_max, ctx)?;
    let sqrt_a = Float::with_val(bits, a.sqrt_ref());
    let mut c = vec![ctx.one()];
    for n in 1..=n_max {
        if seq.a_sq[n] >= *a {
            return Err(Error::singular(n, "a_n² ≥ a leaves no real c_n"));
        }
        let mag: Real = Float::with_val(bits, 1 - Float::with_val(bits, &seq.a_sq[n] / a)).sqrt();
        let d = Float::with_val(bits, &seq.b[n - 1] - (n - 1) as u32);
        let negative = (d < 0) != (c[n - 1] < 0);
        c.push(if negative { -mag } else { mag });
    }
    let mut residuals = Vec::with_capacity(n_max.saturating_sub(1));
    for n in 1..n_max {
        let lhs = Float::with_val(bits, &sqrt_a * Float::with_val(bits, &c[n + 1] + &c[n - 1]));
        let one_minus = 1 - Float::with_val(bits, c[n].square_ref());
        let rhs = Float::with_val(bits, &c[n] * n as u32) / one_minus;
        residuals.push(lhs - rhs);
    }
    let mut b_residuals = Vec::with_capacity(n_max);
    for n in 0..n_max {
        let prod = Float::with_val(bits, &sqrt_a * &c[n]) * &c[n + 1];
        b_residuals.push(Float::with_val(bits, &seq.b[n] - n as u32) - prod);
    }
    Ok(DP2Seq {
        c,
        residuals,
        b_residuals,
    })
}

/// `(n√a/2, n/2 + √a)`: the `β = 1/2`, `t = 1` bi-lattice coefficients.
pub fn beta_half_closed_form(a: &Real, n: usize) -> (Real, Real) {
    let bits = a.prec();
    let sqrt_a = Float::with_val(bits, a.sqrt_ref());
    let a_sq = Float::with_val(bits, &sqrt_a * n as u32) / 2u32;
    let b = Float::with_val(bits, n as u32) / 2u32 + sqrt_a;
    (a_sq, b)
}

/// Elementwise maximum absolute differences between two coefficient sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffDiff {
    pub max_abs_da_sq: Real,
    pub argmax_a_sq: usize,
    pub max_abs_db: Real,
    pub argmax_b: usize,
}

impl CoeffDiff {
    pub fn max(&self) -> Real {
        let mut m = self.max_abs_da_sq.clone();
        m.max_mut(&self.max_abs_db);
        m
    }
}

pub fn compare_coeffs(x: &CoeffSeq, y: &CoeffSeq) -> Result<CoeffDiff> {
    if x.b.len() != y.b.len() || x.a_sq.len() != y.a_sq.len() {
        return Err(Error::Length {
            left: x.b.len(),
            right: y.b.len(),
        });
    }
    fn max_diff(p: &[Real], q: &[Real]) -> (Real, usize) {
        let bits = p.first().map(|v| v.prec()).unwrap_or(64);
        let mut best = Float::new(bits);
        let mut arg = 0;
        for (i, (s, t)) in p.iter().zip(q).enumerate() {
            let d = Float::with_val(bits, s - t).abs();
            if d > best {
                best = d;
                arg = i;
            }
        }
        (best, arg)
    }
    let (da, ia) = max_diff(&x.a_sq, &y.a_sq);
    let (db, ib) = max_diff(&x.b, &y.b);
    Ok(CoeffDiff {
        max_abs_da_sq: da,
        argmax_a_sq: ia,
        max_abs_db: db,
        argmax_b: ib,
    })
}

/// Working precision as a function of the number of requested indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrecisionPolicy {
    pub base_digits: u32,
    pub digits_per_index: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            base_digits: 60,
            digits_per_index: 12,
        }
    }
}

impl PrecisionPolicy {
    /// Digits for a run of `n_max` indices, never below `floor`.
    pub fn digits_for(&self, n_max: usize, floor: u32) -> u32 {
        let want = u64::from(self.base_digits) + u64::from(self.digits_per_index) * n_max as u64;
        (want.min(u64::from(u32::MAX / 4)) as u32).max(floor)
    }
}

/// One forward run together with the `b_0` it started from.
#[derive(Debug, Clone)]
pub struct PainleveRun {
    pub b0: Real,
    pub coeffs: CoeffSeq,
    /// Present for the Meixner family.
    pub uv: Option<UVSeq>,
}

/// Seeds with the closed-form `b_0` for `lattice` (plus `b0_shift`, if any) and iterates.
pub fn run_painleve(
    params: &FamilyParams,
    lattice: &Lattice,
    n_max: usize,
    b0_shift: Option<&Rational>,
    ctx: &PrecisionContext,
) -> Result<PainleveRun> {
    let mut b0 = b0_initial(params, lattice, ctx)?;
    if let Some(s) = b0_shift {
        b0 += ctx.rational(s);
    }
    let a = params.a_real(ctx);
    let beta = params.beta_real(ctx);
    if params.is_meixner() {
        let g = params.gamma_real(ctx)?;
        let (uv, coeffs) = meixner_iterate(&a, &beta, &g, &b0, n_max, ctx)?;
        Ok(PainleveRun {
            b0,
            coeffs,
            uv: Some(uv),
        })
    } else {
        let coeffs = charlier_iterate(&a, &beta, &b0, n_max, ctx)?;
        Ok(PainleveRun { b0, coeffs, uv: None })
    }
}

/// A run at `digits` checked against a rerun at `2·digits`.
#[derive(Debug, Clone)]
pub struct CertifiedRun {
    pub run: PainleveRun,
    pub digits: u32,
    /// Largest `n` such that indices `0..=n` agree to within `agreement`; `None`
    /// if even `b_0` disagrees.
    pub certified_through: Option<usize>,
    /// Largest `|Δ|` between the two runs over the certified prefix.
    pub doubling_diff: Real,
}

impl CertifiedRun {
    pub fn is_fully_certified(&self) -> bool {
        self.certified_through == Some(self.run.coeffs.max_index())
    }
}

/// `10^-20`, the agreement demanded between the two precisions.
pub fn default_agreement(bits: u32) -> Real {
    pow10(bits, -20)
}

/// Runs at the policy's precision and again at twice that, reporting the
/// agreeing prefix.
pub fn certified_painleve(
    params: &FamilyParams,
    lattice: &Lattice,
    n_max: usize,
    b0_shift: Option<&Rational>,
    policy: PrecisionPolicy,
    ctx: &PrecisionContext,
) -> Result<CertifiedRun> {
    let digits = policy.digits_for(n_max, ctx.digits());
    let lo_ctx = ctx.with_digits(digits)?;
    let hi_ctx = ctx.with_digits(digits.saturating_mul(2))?;
    let lo = run_painleve(params, lattice, n_max, b0_shift, &lo_ctx)?;
    let hi = run_painleve(params, lattice, n_max, b0_shift, &hi_ctx)?;
    let agreement = default_agreement(lo_ctx.bits());
    let mut certified_through = None;
    let mut worst = lo_ctx.zero();
    for n in 0..=n_max {
        let da = rel_diff(&lo.coeffs.a_sq[n], &hi.coeffs.a_sq[n]);
        let db = rel_diff(&lo.coeffs.b[n], &hi.coeffs.b[n]);
        let d = if da > db { da } else { db };
        if d >= agreement {
            break;
        }
        worst.max_mut(&d);
        certified_through = Some(n);
    }
    Ok(CertifiedRun {
        run: lo,
        digits,
        certified_through,
        doubling_diff: worst,
    })
}

/// Residuals of the Charlier identity chain evaluated on a computed sequence,
/// each divided by the sum of the magnitudes of its terms.
#[derive(Debug, Clone)]
pub struct CharlierChain {
    /// `(a_1²/a)(b_1 + b_0 + β - 1) - 1`
    pub start: Real,
    /// `n a (b_n - b_{n-1} - 1) - a_n² (a_{n-1}² - a_{n+1}²)` for `n = 1..N-1`, at index `n-1`.
    pub linear: Vec<Real>,
    /// `-d_n² + d_0² + a_n² a_{n+1}²/a - (β-1)(d_n - d_0) - (a_{n+1}² + a_n² - a_1²)`
    /// for `n = 0..N-1`.
    pub first_integral: Vec<Real>,
}

impl CharlierChain {
    pub fn max_abs(&self) -> Real {
        let mut m = Float::with_val(self.start.prec(), self.start.abs_ref());
        for r in self.linear.iter().chain(&self.first_integral) {
            m.max_mut(&Float::with_val(r.prec(), r.abs_ref()));
        }
        m
    }
}

fn relative_residual(terms: &[Real], bits: u32) -> Real {
    let mut sum = Float::new(bits);
    let mut scale = Float::new(bits);
    for t in terms {
        sum += t;
        scale += Float::with_val(bits, t.abs_ref());
    }
    if scale.is_zero() {
        sum
    } else {
        sum / scale
    }
}

pub fn charlier_chain(seq: &CoeffSeq, a: &Real, beta: &Real, ctx: &PrecisionContext) -> Result<CharlierChain> {
    let n_max = seq.max_index();
    if n_max < 2 {
        return Err(Error::Validity("the identity chain needs N ≥ 2".into()));
    }
    let bits = ctx.bits();
    let beta_m1 = Float::with_val(bits, beta - 1u32);
    let a_sq = &seq.a_sq;
    let b = &seq.b;
    let d = |n: usize| Float::with_val(bits, &b[n] - n as u32);

    let start_terms = [
        Float::with_val(bits, &a_sq[1] * &b[1]) / a,
        Float::with_val(bits, &a_sq[1] * &b[0]) / a,
        Float::with_val(bits, &a_sq[1] * &beta_m1) / a,
        -ctx.one(),
    ];
    let start = relative_residual(&start_terms, bits);

    let mut linear = Vec::new();
    for n in 1..n_max {
        let na = Float::with_val(bits, a * n as u32);
        let terms = [
            Float::with_val(bits, &na * &b[n]),
            -Float::with_val(bits, &na * &b[n - 1]),
            -na.clone(),
            -Float::with_val(bits, &a_sq[n] * &a_sq[n - 1]),
            Float::with_val(bits, &a_sq[n] * &a_sq[n + 1]),
        ];
        linear.push(relative_residual(&terms, bits));
    }

    let mut first_integral = Vec::new();
    let d0 = d(0);
    for n in 0..n_max {
        let dn = d(n);
        let terms = [
            -Float::with_val(bits, dn.square_ref()),
            Float::with_val(bits, d0.square_ref()),
            Float::with_val(bits, &a_sq[n] * &a_sq[n + 1]) / a,
            -Float::with_val(bits, &beta_m1 * &dn),
            Float::with_val(bits, &beta_m1 * &d0),
            -a_sq[n + 1].clone(),
            -a_sq[n].clone(),
            a_sq[1].clone(),
        ];
        first_integral.push(relative_residual(&terms, bits));
    }
    Ok(CharlierChain { start, linear, first_integral })
}

/// Derived views `t_n = (γ-1)u_n/(γ-β)` and `T_n = (γ-1)v_n/(a(γ-β))`.
pub fn meixner_t_views(uv: &UVSeq, a: &Real, beta: &Real, gamma: &Real, ctx: &PrecisionContext) -> (Vec<Real>, Vec<Real>) {
    let bits = ctx.bits();
    let ratio = Float::with_val(bits, gamma - 1u32) / Float::with_val(bits, gamma - beta);
    let small_t = uv.u.iter().map(|u| Float::with_val(bits, &ratio * u)).collect();
    let big_t = uv.v.iter().map(|v| Float::with_val(bits, &ratio * v) / a).collect();
    (small_t, big_t)
}

/// Residuals of the Meixner ladder identities on a computed run, relative:
/// `b_n = γ - (γ-β)T_n + a + n - β`, `a_n² = na - (γ-β)t_n`,
/// `a_{n+1}² - a_n² = (γ-β)(t_n - t_{n+1}) + a`.
#[derive(Debug, Clone)]
pub struct MeixnerChain {
    pub b_from_big_t: Vec<Real>,
    pub a_sq_from_small_t: Vec<Real>,
    pub a_sq_step: Vec<Real>,
}

impl MeixnerChain {
    pub fn max_abs(&self) -> Real {
        let mut m = Float::new(64);
        for r in self.b_from_big_t.iter().chain(&self.a_sq_from_small_t).chain(&self.a_sq_step) {
            m.max_mut(&Float::with_val(r.prec(), r.abs_ref()));
        }
        m
    }
}

pub fn meixner_chain(run: &PainleveRun, params: &FamilyParams, ctx: &PrecisionContext) -> Result<MeixnerChain> {
    let uv = run
        .uv
        .as_ref()
        .ok_or_else(|| Error::Validity("the Meixner chain needs a (u, v) run".into()))?;
    let bits = ctx.bits();
    let a = params.a_real(ctx);
    let beta = params.beta_real(ctx);
    let g = params.gamma_real(ctx)?;
    let gb = Float::with_val(bits, &g - &beta);
    let (small_t, big_t) = meixner_t_views(uv, &a, &beta, &g, ctx);
    let seq = &run.coeffs;
    let mut out = MeixnerChain {
        b_from_big_t: Vec::new(),
        a_sq_from_small_t: Vec::new(),
        a_sq_step: Vec::new(),
    };
    for n in 0..=seq.max_index() {
        let terms = [
            seq.b[n].clone(),
            -g.clone(),
            Float::with_val(bits, &gb * &big_t[n]),
            -a.clone(),
            -Float::with_val(bits, n),
            beta.clone(),
        ];
        out.b_from_big_t.push(relative_residual(&terms, bits));
        let terms = [
            seq.a_sq[n].clone(),
            -Float::with_val(bits, &a * n as u32),
            Float::with_val(bits, &gb * &small_t[n]),
        ];
        out.a_sq_from_small_t.push(relative_residual(&terms, bits));
        if n < seq.max_index() {
            let terms = [
                seq.a_sq[n + 1].clone(),
                -seq.a_sq[n].clone(),
                -Float::with_val(bits, &gb * &small_t[n]),
                Float::with_val(bits, &gb * &small_t[n + 1]),
                -a.clone(),
            ];
            out.a_sq_step.push(relative_residual(&terms, bits));
        }
    }
    Ok(out)
}
