//! Runs both pipelines on one parameter set and evaluates every identity that
//! applies to it.

use rug::{Float, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{
    b0_initial, build_measure, closed_moments, ladder_potential, ladder_quotient, moment, pearson_residual,
    weight_at, DiscreteMeasure,
};
use crate::oracle::{
    hankel_coeffs, interlacing_holds, ladder_diagnostics, orthogonality_defect, partial_sum_check,
    stieltjes_coeffs, structure_b_coeff, zeros, OrthoBasis,
};
use crate::painleve::{
    beta_half_closed_form, certified_painleve, charlier_chain, compare_coeffs, dp2_reduce, meixner_chain,
    positivity_warnings, CertifiedRun, CoeffDiff, CoeffSeq, PrecisionPolicy,
};
use crate::params::{Family, FamilyParams, Lattice, Mix};
use crate::precision::{pow10, rel_diff, rel_err, to_decimal, PrecisionContext, Real};

/// Decimal exponent of the agreement demanded between independent computations.
pub const AGREEMENT_EXP: i64 = -20;

/// Both pipelines on one (family, lattice) pair.
#[derive(Debug, Clone)]
pub struct CrossRun {
    pub painleve: CertifiedRun,
    pub oracle: OrthoBasis,
    pub measure: DiscreteMeasure,
    pub oracle_ctx: PrecisionContext,
    /// Differences over all indices `0..=n`.
    pub diff: CoeffDiff,
    /// First index where `|Δa_n²|` or `|Δb_n|` exceeds `10^AGREEMENT_EXP`.
    pub first_divergence: Option<usize>,
}

impl CrossRun {
    pub fn n(&self) -> usize {
        self.oracle.max_index()
    }

    pub fn agrees(&self) -> bool {
        self.first_divergence.is_none() && self.painleve.is_fully_certified()
    }
}

/// The Stieltjes oracle on the measure of `lattice`, certified for order `2n + 2`.
pub fn oracle_basis(
    params: &FamilyParams,
    lattice: &Lattice,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<(DiscreteMeasure, OrthoBasis)> {
    let measure = build_measure(params, lattice, 2 * n + 2, ctx)?;
    let basis = stieltjes_coeffs(&measure, n, ctx)?;
    Ok((measure, basis))
}

/// Index of the first entry where the two sequences differ by more than `tol`.
pub fn divergence_index(x: &CoeffSeq, y: &CoeffSeq, tol: &Real) -> Option<usize> {
    let len = x.b.len().min(y.b.len());
    (0..len).find(|&n| {
        let bits = x.b[n].prec();
        let da = Float::with_val(bits, &x.a_sq[n] - &y.a_sq[n]).abs();
        let db = Float::with_val(bits, &x.b[n] - &y.b[n]).abs();
        da > *tol || db > *tol
    })
}

/// Painlevé iteration from the closed-form `b_0` (optionally shifted) against
/// the Stieltjes oracle at `ctx` precision.
pub fn cross_pipeline(
    params: &FamilyParams,
    lattice: &Lattice,
    n: usize,
    b0_shift: Option<&Rational>,
    policy: PrecisionPolicy,
    ctx: &PrecisionContext,
) -> Result<CrossRun> {
    let painleve = certified_painleve(params, lattice, n, b0_shift, policy, ctx)?;
    let (measure, oracle) = oracle_basis(params, lattice, n, ctx)?;
    let lhs = painleve.run.coeffs.rounded(ctx);
    let diff = compare_coeffs(&lhs, &oracle.coeffs)?;
    let tol = pow10(ctx.bits(), AGREEMENT_EXP);
    let first_divergence = divergence_index(&lhs, &oracle.coeffs, &tol);
    Ok(CrossRun {
        painleve,
        oracle,
        measure,
        oracle_ctx: ctx.clone(),
        diff,
        first_divergence,
    })
}

/// Largest difference between the oracle at `ctx` and a rerun with twice the
/// digits and a tail tolerance squared (hence a longer truncation).
pub fn oracle_doubling(params: &FamilyParams, lattice: &Lattice, basis: &OrthoBasis, ctx: &PrecisionContext) -> Result<Real> {
    let hi = ctx.with_digits(ctx.digits() * 2)?;
    let eps = Float::with_val(hi.bits(), ctx.tail_eps().square_ref());
    let hi = hi.with_tail_eps(eps)?;
    let (_, hb) = oracle_basis(params, lattice, basis.max_index(), &hi)?;
    let d = compare_coeffs(&basis.coeffs, &hb.coeffs.rounded(ctx))?;
    Ok(d.max())
}

/// One named check with its measured residual and the bound it was held to.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: String,
    pub tolerance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn bounded(name: impl Into<String>, residual: &Real, tol: &Real) -> Self {
        Check {
            name: name.into(),
            passed: residual.is_finite() && *residual < *tol,
            residual: to_decimal(residual, 6),
            tolerance: to_decimal(tol, 3),
            note: None,
        }
    }

    fn flag(name: impl Into<String>, passed: bool, note: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            residual: String::new(),
            tolerance: String::new(),
            note: Some(note.into()),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub family: Family,
    pub lattice: String,
    pub n: usize,
    pub digits: u32,
    pub painleve_digits: u32,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn abs(x: &Real) -> Real {
    Float::with_val(x.prec(), x.abs_ref())
}

fn max_abs<'a>(xs: impl IntoIterator<Item = &'a Real>, bits: u32) -> Real {
    let mut m = Float::new(bits);
    for x in xs {
        m.max_mut(&abs(x));
    }
    m
}

/// Shift covariance: the shifted-lattice run equals the plain run with
/// `β → 2-β` (and `γ → γ-β+1`), with `b̂_n = b_n + 1 - β`. Returns the largest
/// difference over indices `0..=n`.
pub fn shift_covariance(
    params: &FamilyParams,
    n: usize,
    policy: PrecisionPolicy,
    ctx: &PrecisionContext,
) -> Result<(Real, usize)> {
    let shifted = certified_painleve(params, &Lattice::Shifted, n, None, policy, ctx)?;
    let two_minus = Rational::from(2 - &params.beta);
    let partner = match params.gamma.as_ref() {
        Some(g) => FamilyParams::meixner(params.a.clone(), two_minus, Rational::from(g - &params.beta) + 1u32),
        None => FamilyParams::charlier(params.a.clone(), two_minus),
    };
    let plain = certified_painleve(&partner, &Lattice::Plain, n, None, policy, ctx)?;
    let reach = shifted
        .certified_through
        .unwrap_or(0)
        .min(plain.certified_through.unwrap_or(0));
    let bits = ctx.bits();
    let one_minus_beta = ctx.rational(&Rational::from(1 - &params.beta));
    let mut worst = Float::new(bits);
    for k in 0..=reach {
        let da = Float::with_val(bits, &shifted.run.coeffs.a_sq[k] - &plain.run.coeffs.a_sq[k]);
        let moved = Float::with_val(bits, &plain.run.coeffs.b[k] + &one_minus_beta);
        let db = Float::with_val(bits, &shifted.run.coeffs.b[k] - &moved);
        worst.max_mut(&da.abs());
        worst.max_mut(&db.abs());
    }
    Ok((worst, reach))
}

/// Sign pattern of a sequence from index `from` on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    /// Sign changes in `x_{n+1} - x_n`.
    pub first_diff_changes: usize,
    /// Sign changes in `x_{n+2} - 2x_{n+1} + x_n`.
    pub second_diff_changes: usize,
}

fn sign_changes(xs: &[Real]) -> usize {
    let signs: Vec<bool> = xs.iter().filter(|x| !x.is_zero()).map(|x| *x < 0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

pub fn signature(xs: &[Real], from: usize) -> Signature {
    let tail = &xs[from.min(xs.len())..];
    let d1: Vec<Real> = tail
        .windows(2)
        .map(|w| Float::with_val(w[0].prec(), &w[1] - &w[0]))
        .collect();
    let d2: Vec<Real> = d1
        .windows(2)
        .map(|w| Float::with_val(w[0].prec(), &w[1] - &w[0]))
        .collect();
    Signature {
        first_diff_changes: sign_changes(&d1),
        second_diff_changes: sign_changes(&d2),
    }
}

/// `b_0(t)` on a grid of mixing parameters.
pub fn b0_scan(params: &FamilyParams, grid: &[Mix], ctx: &PrecisionContext) -> Result<Vec<Real>> {
    grid.iter().map(|t| b0_initial(params, &Lattice::Bi(t.clone()), ctx)).collect()
}

/// Checks that `values` move strictly in the direction set by `β`
/// (increasing for `β < 1`, decreasing for `β > 1`). `β = 1` has no direction
/// since both lattices coincide.
pub fn check_monotone(beta: &Rational, grid: &[Mix], values: &[Real]) -> Result<()> {
    if *beta == 1 {
        return Ok(());
    }
    let increasing = *beta < 1;
    for (i, w) in values.windows(2).enumerate() {
        let ok = if increasing { w[0] < w[1] } else { w[0] > w[1] };
        if !ok {
            return Err(Error::Monotonicity {
                t_lo: grid[i].to_string(),
                t_hi: grid[i + 1].to_string(),
            });
        }
    }
    Ok(())
}

/// Every check that applies to `(params, lattice)` at order `n`.
pub fn verify_suite(
    params: &FamilyParams,
    lattice: &Lattice,
    n: usize,
    policy: PrecisionPolicy,
    ctx: &PrecisionContext,
) -> Result<Report> {
    params.validate(lattice)?;
    let bits = ctx.bits();
    let ident_tol = ctx.tolerance(10);
    let agree_tol = pow10(bits, AGREEMENT_EXP);
    let mut checks = Vec::new();

    // Initial conditions and moments.
    let b0 = b0_initial(params, lattice, ctx)?;
    let small = build_measure(params, lattice, 2, ctx)?;
    let m0 = moment(&small, 0)?;
    let m1 = moment(&small, 1)?;
    let ratio = Float::with_val(bits, &m1 / &m0);
    checks.push(Check::bounded("b0 closed form = m1/m0", &rel_err(&b0, &ratio), &ident_tol));
    let (cm0, cm1) = closed_moments(params, lattice, ctx)?;
    let dm = rel_err(&cm0, &m0).max(&rel_err(&cm1, &m1));
    checks.push(Check::bounded("closed-form moments = summed moments", &dm, &ident_tol));

    if params.is_meixner() {
        let x = ctx.rational(&Rational::from((23, 10)));
        let l = ctx.real(4);
        let x1 = Float::with_val(bits, &x + 1u32);
        let lhs = (ladder_potential(params, &x1, ctx)? - ladder_potential(params, &l, ctx)?)
            / Float::with_val(bits, &x1 - &l);
        let rhs = ladder_quotient(params, &x, &l, ctx)?;
        checks.push(Check::bounded("ladder potential difference quotient", &rel_err(&lhs, &rhs), &ident_tol));
    } else {
        let one_minus_beta = Rational::from(1 - &params.beta);
        let mut worst = ctx.zero();
        for x in [Rational::from(3), Rational::from((5, 2)), one_minus_beta] {
            let r = pearson_residual(params, &x, ctx)?;
            let w = weight_at(params, &x, ctx)?;
            let scale = if w.is_zero() { ctx.one() } else { abs(&w) };
            worst.max_mut(&(abs(&r) / scale));
        }
        checks.push(Check::bounded("Pearson equation", &worst, &ident_tol));
    }

    // The two pipelines.
    let cross = cross_pipeline(params, lattice, n, None, policy, ctx)?;
    let pctx = ctx.with_digits(cross.painleve.digits)?;
    checks.push(
        Check::bounded("Painlevé doubling certificate", &cross.painleve.doubling_diff, &agree_tol).with_note(format!(
            "certified through n = {}",
            cross
                .painleve
                .certified_through
                .map_or_else(|| "none".to_string(), |c| c.to_string())
        )),
    );
    if !cross.painleve.is_fully_certified() {
        checks.push(Check::flag("Painlevé run fully certified", false, "doubling disagreement inside range"));
    }
    checks.push(
        Check::bounded("Painlevé = Stieltjes oracle", &cross.diff.max(), &agree_tol).with_note(format!(
            "argmax a_sq at n = {}, b at n = {}",
            cross.diff.argmax_a_sq, cross.diff.argmax_b
        )),
    );
    let od = oracle_doubling(params, lattice, &cross.oracle, ctx)?;
    checks.push(Check::bounded("oracle doubling (digits and truncation)", &od, &agree_tol));
    checks.push(Check::bounded(
        "oracle orthogonality",
        &orthogonality_defect(&cross.oracle, &cross.measure, n.min(10), ctx),
        &ident_tol,
    ));
    let pw = positivity_warnings(&cross.painleve.run.coeffs, &params.beta);
    checks.push(Check::flag(
        "positivity a_n² > 0, b_n > min(0, 1-β)",
        pw.is_empty(),
        format!("{} violations", pw.len()),
    ));

    // Identity chains on the iterated sequence.
    let a = params.a_real(&pctx);
    let beta = params.beta_real(&pctx);
    let pident_tol = pctx.tolerance(10);
    if n >= 2 {
        if params.is_meixner() {
            let chain = meixner_chain(&cross.painleve.run, params, &pctx)?;
            checks.push(Check::bounded("Meixner b_n, a_n² via T_n, t_n", &chain.max_abs(), &pident_tol));
        } else {
            let chain = charlier_chain(&cross.painleve.run.coeffs, &a, &beta, &pctx)?;
            checks.push(Check::bounded("Charlier start a_1² (b_1 + b_0 + β - 1) = a", &abs(&chain.start), &pident_tol));
            checks.push(Check::bounded("Charlier linear relation in b_n - b_{n-1}", &max_abs(&chain.linear, pctx.bits()), &pident_tol));
            checks.push(Check::bounded("Charlier first integral", &max_abs(&chain.first_integral, pctx.bits()), &pident_tol));
        }
    }

    // Oracle-side identities.
    if params.is_meixner() {
        let gb = ctx.rational(&Rational::from(params.gamma_param()? - &params.beta));
        let g = params.gamma_real(ctx)?;
        let a = params.a_real(ctx);
        let beta = params.beta_real(ctx);
        let mut worst = [ctx.zero(), ctx.zero(), ctx.zero(), ctx.zero()];
        for k in 0..=n.min(15) {
            let d = ladder_diagnostics(&cross.oracle, &cross.measure, params, k, ctx)?;
            worst[0].max_mut(&abs(&(Float::with_val(bits, &d.R + &d.T) - 1u32)));
            worst[1].max_mut(&abs(&Float::with_val(bits, &d.r + &d.t)));
            let b_pred = Float::with_val(bits, &g - Float::with_val(bits, &gb * &d.T)) + &a + k as u32 - &beta;
            worst[2].max_mut(&rel_diff(&cross.oracle.coeffs.b[k], &b_pred));
            let a_pred = Float::with_val(bits, &a * k as u32) - Float::with_val(bits, &gb * &d.t);
            worst[3].max_mut(&rel_diff(&cross.oracle.coeffs.a_sq[k], &a_pred));
        }
        checks.push(Check::bounded("ladder R_n + T_n = 1", &worst[0], &ident_tol));
        checks.push(Check::bounded("ladder r_n + t_n = 0", &worst[1], &ident_tol));
        checks.push(Check::bounded("ladder b_n from T_n", &worst[2], &ident_tol));
        checks.push(Check::bounded("ladder a_n² from t_n", &worst[3], &ident_tol));
    } else if n >= 2 {
        let a = params.a_real(ctx);
        let mut worst = ctx.zero();
        for k in 2..=n.min(12) {
            let s = structure_b_coeff(&cross.oracle, &cross.measure, k, ctx)?;
            let expect = Float::with_val(bits, &cross.oracle.coeffs.a_sq[k] * &cross.oracle.coeffs.a_sq[k - 1]) / &a;
            worst.max_mut(&rel_err(&s.b_coeff, &expect));
            worst.max_mut(&rel_diff(&s.leading, &ctx.real(k as u32)));
            worst.max_mut(&s.lower);
        }
        checks.push(Check::bounded("structure relation B_n = a_n² a_{n-1}² / a", &worst, &ident_tol));
    }

    let mut trace = ctx.zero();
    let mut interlaced = true;
    for k in 1..=n.min(12) {
        let z = zeros(&cross.oracle, &cross.measure, k, ctx)?;
        let s: Real = z.iter().fold(ctx.zero(), |s, x| s + x);
        let t: Real = cross.oracle.coeffs.b[..k].iter().fold(ctx.zero(), |s, x| s + x);
        trace.max_mut(&rel_diff(&s, &t));
        interlaced &= interlacing_holds(&z, cross.measure.points());
    }
    checks.push(Check::bounded("sum of zeros = trace", &trace, &ident_tol));
    checks.push(Check::flag(
        "support point between consecutive zeros",
        interlaced,
        format!("n ≤ {}", n.min(12)),
    ));

    if let Lattice::Bi(_) = lattice {
        let reach = if params.beta == 1 { (n + 1).min(15) } else { n.div_ceil(2).min(15) };
        let mut ok = true;
        for k in 1..=reach {
            ok &= partial_sum_check(&cross.oracle.coeffs, &params.beta, k)?;
        }
        checks.push(Check::flag("partial-sum inequality", ok, format!("n ≤ {reach}")));
    }

    let hn = n.min(8);
    let moments: Vec<Real> = (0..2 * hn + 2).map(|j| moment(&cross.measure, j)).collect::<Result<_>>()?;
    let hctx = ctx.guarded(ctx.bits());
    let hank = hankel_coeffs(&moments, hn, hctx.bits())?;
    let hd = compare_coeffs(&cross.oracle.coeffs.truncated(hn), &hank.rounded(ctx))?;
    checks.push(Check::bounded("Hankel determinants = Stieltjes", &hd.max(), &agree_tol));

    if let Lattice::Shifted = lattice {
        let (worst, reach) = shift_covariance(params, n.min(20), policy, ctx)?;
        checks.push(
            Check::bounded("shift covariance β → 2-β", &worst, &agree_tol).with_note(format!("n ≤ {reach}")),
        );
    }

    if !params.is_meixner() && params.beta == 1 {
        let dp2 = dp2_reduce(&a, &cross.painleve.run.b0, n, &pctx)?;
        let inside = dp2.c[1..].iter().all(|c| abs(c) < 1);
        checks.push(Check::bounded(
            "dP-II residual",
            &max_abs(dp2.residuals.iter().chain(&dp2.b_residuals), pctx.bits()),
            &agree_tol,
        ));
        checks.push(Check::flag("|c_n| < 1", inside, format!("n ≤ {n}")));
    }

    if !params.is_meixner() && params.beta == Rational::from((1, 2)) && *lattice == Lattice::Bi(Mix::Finite(Rational::from(1))) {
        let a = params.a_real(ctx);
        let mut worst = ctx.zero();
        for k in 0..=n {
            let (s, b) = beta_half_closed_form(&a, k);
            worst.max_mut(&abs(&Float::with_val(bits, &cross.oracle.coeffs.a_sq[k] - &s)));
            worst.max_mut(&abs(&Float::with_val(bits, &cross.oracle.coeffs.b[k] - &b)));
            worst.max_mut(&abs(&Float::with_val(bits, &cross.painleve.run.coeffs.a_sq[k] - &s)));
            worst.max_mut(&abs(&Float::with_val(bits, &cross.painleve.run.coeffs.b[k] - &b)));
        }
        checks.push(Check::bounded("β = 1/2 closed form", &worst, &agree_tol));
    }

    Ok(Report {
        family: params.family,
        lattice: lattice.to_string(),
        n,
        digits: ctx.digits(),
        painleve_digits: cross.painleve.digits,
        checks,
    })
}
