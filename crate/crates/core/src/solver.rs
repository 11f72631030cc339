//! Rounding Newton iteration for certified WSOS lower bounds (Algorithm 1)
//! and its initializer for the constant-one polynomial (Algorithm 2).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::barrier::{dual_local_norm_sq, hessian, in_dual_interior, BarrierContext, HessianAt};
use crate::error::{Error, Result};
use crate::exactarith::{
    bit_size, fourth_root_ceil, from_bigint, int, min_denominator_rational, rat, round_to_denominator,
    sqrt_ceil, sqrt_interval, Rational, RationalInterval, SymMatrix,
};
use crate::polybasis::{Basis, ConeSpec, Poly};

/// Which upper bound on `||H(x_+)^(1/2)||` sets the rounding denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NormBound {
    /// `sqrt(tr H)`.
    #[default]
    Trace,
    /// `||H||_F^(1/2)`.
    Frobenius,
    /// `sqrt(lambda_max(H))`, bracketed by bisection until the ceiling is
    /// decided.
    Spectral,
}

impl FromStr for NormBound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trace" => Ok(NormBound::Trace),
            "frobenius" => Ok(NormBound::Frobenius),
            "spectral" => Ok(NormBound::Spectral),
            other => Err(Error::Parse(format!("unknown norm bound {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StopMode {
    /// Stop once `delta_c <= tolerance`.
    DeltaC,
    /// Stop once `delta_c <= rho * C * tolerance / 2` for the cone constant `C`.
    RhoC { c_const: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverParams {
    r: Rational,
    r_n: Rational,
    pub tolerance: Rational,
    pub max_iters: usize,
    pub stop_mode: StopMode,
    pub norm_bound: NormBound,
    pub sqrt_bits: u32,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            r: rat(1, 4),
            r_n: rat(1, 7),
            tolerance: rat(1, 1_000_000_000),
            max_iters: 1000,
            stop_mode: StopMode::DeltaC,
            norm_bound: NormBound::Trace,
            sqrt_bits: 64,
        }
    }
}

impl SolverParams {
    /// Requires `0 < r <= 1/4` and `r^2/(1-2r) < r_N < r/(1+2r)`.
    pub fn new(r: Rational, r_n: Rational) -> Result<Self> {
        if !r.is_positive() || r > rat(1, 4) {
            return Err(Error::InvalidParameter(format!("r = {r} is outside (0, 1/4]")));
        }
        let lower = &r * &r / (int(1) - int(2) * &r);
        let upper = &r / (int(1) + int(2) * &r);
        if !(lower < r_n && r_n < upper) {
            return Err(Error::InvalidParameter(format!(
                "r_N = {r_n} is outside ({lower}, {upper})"
            )));
        }
        Ok(Self {
            r,
            r_n,
            ..Self::default()
        })
    }

    pub fn with_tolerance(mut self, tol: Rational) -> Result<Self> {
        if !tol.is_positive() {
            return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
        }
        self.tolerance = tol;
        Ok(self)
    }

    pub fn with_norm_bound(mut self, norm_bound: NormBound) -> Self {
        self.norm_bound = norm_bound;
        self
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn r_n(&self) -> &Rational {
        &self.r_n
    }

    /// `r / (r + 1)`.
    pub fn radius(&self) -> Rational {
        &self.r / (&self.r + int(1))
    }

    /// `(1 + r_N) / (r_N - r^2/(1-2r))`.
    pub fn rounding_factor(&self) -> Rational {
        let r1 = &self.r * &self.r / (int(1) - int(2) * &self.r);
        (int(1) + &self.r_n) / (&self.r_n - r1)
    }

    /// `rho = r/(r+1) - r_N/(1-r_N)`.
    pub fn rho(&self) -> Rational {
        self.radius() - &self.r_n / (int(1) - &self.r_n)
    }

    fn stop_threshold(&self) -> Rational {
        match &self.stop_mode {
            StopMode::DeltaC => self.tolerance.clone(),
            StopMode::RhoC { c_const } => self.rho() * c_const * &self.tolerance / int(2),
        }
    }
}

fn add_scaled(a: &[Rational], alpha: &Rational, b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + alpha * y).collect()
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `x_+ = 2x - H(x)^-1 s` for the current target `s = t - c*1`.
pub fn newton_step(ctx: &BarrierContext, x: &[Rational], s: &[Rational]) -> Result<Vec<Rational>> {
    let h = hessian(ctx, x)?;
    Ok(newton_step_with(&h, s))
}

fn newton_step_with(h: &HessianAt, s: &[Rational]) -> Vec<Rational> {
    let w = h.solve(s);
    h.x().iter().zip(&w).map(|(x, w)| int(2) * x - w).collect()
}

/// Rounding denominator for `x_+` and the rounded point.
pub fn round_certificate(
    ctx: &BarrierContext,
    x_plus: &[Rational],
    params: &SolverParams,
) -> Result<(Vec<Rational>, BigInt)> {
    let h = hessian(ctx, x_plus)?;
    let n = rounding_denominator(ctx.u(), h.matrix(), params)?;
    let x_n: Vec<Rational> = x_plus.iter().map(|v| round_to_denominator(v, &n)).collect();
    if !in_dual_interior(ctx, &x_n) {
        return Err(Error::Internal("rounded certificate left the dual cone".into()));
    }
    Ok((x_n, n))
}

/// `ceil(K ||H^(1/2)||)` with `K = (sqrt(U)/2) F`, using the configured
/// upper bound on the norm.
pub fn rounding_denominator(u: usize, h: &SymMatrix, params: &SolverParams) -> Result<BigInt> {
    let f = params.rounding_factor();
    // K^2 = U F^2 / 4
    let k_sq = int(u as i64) * &f * &f / int(4);
    let n = match params.norm_bound {
        NormBound::Trace => sqrt_ceil(&(&k_sq * h.trace()))?,
        NormBound::Frobenius => fourth_root_ceil(&(&k_sq * &k_sq * h.frobenius_norm_sq()))?,
        NormBound::Spectral => spectral_denominator(h, &k_sq)?,
    };
    Ok(n.max(BigInt::from(1)))
}

fn spectral_denominator(h: &SymMatrix, k_sq: &Rational) -> Result<BigInt> {
    let n = h.order();
    let mut lo = Rational::zero();
    let mut hi = h.max_abs_row_sum().min(h.trace());
    for _ in 0..256 {
        let a = sqrt_ceil(&(k_sq * &lo))?;
        let b = sqrt_ceil(&(k_sq * &hi))?;
        if a == b {
            return Ok(b);
        }
        let mid = (&lo + &hi) / int(2);
        if SymMatrix::scalar(n, mid.clone()).sub(h).is_psd() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    sqrt_ceil(&(k_sq * &hi))
}

/// The quadratic `A + B c + C c^2 = 0` whose solutions are the `c` with
/// `||x_N - H(x_N)^-1 (base + sign c 1)||_{x_N} = r/(r+1)`, and an
/// enclosure of its larger root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CUpdate {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub root: RationalInterval,
}

impl CUpdate {
    pub fn value_at(&self, x: &Rational) -> Rational {
        &self.a + &self.b * x + &self.c * x * x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shift {
    /// `t - c*1`
    Minus,
    /// `s + c*1`
    Plus,
}

impl Shift {
    fn sign(self) -> Rational {
        match self {
            Shift::Minus => int(-1),
            Shift::Plus => int(1),
        }
    }
}

fn shifted_target(base: &[Rational], one: &[Rational], shift: Shift, c: &Rational) -> Vec<Rational> {
    add_scaled(base, &(shift.sign() * c), one)
}

/// Quadratic of Line 3 of Algorithm 1 for the target `t - c_+ 1`.
pub fn c_update(
    ctx: &BarrierContext,
    x_n: &[Rational],
    t: &[Rational],
    params: &SolverParams,
) -> Result<CUpdate> {
    let h = hessian(ctx, x_n)?;
    c_update_with(ctx, &h, t, Shift::Minus, params, params.sqrt_bits)
}

fn c_update_with(
    ctx: &BarrierContext,
    h: &HessianAt,
    base: &[Rational],
    shift: Shift,
    params: &SolverParams,
    bits: u32,
) -> Result<CUpdate> {
    let one = ctx.one();
    let a_vec: Vec<Rational> = h.x().iter().zip(h.solve(base)).map(|(x, w)| x - w).collect();
    let h1 = h.solve(one);
    let radius = params.radius();
    let qa = h.matrix().quad_form(&a_vec) - &radius * &radius;
    let qb = int(-2) * shift.sign() * dot(&a_vec, one);
    let qc = dot(one, &h1);
    let disc = &qb * &qb - int(4) * &qa * &qc;
    if disc.is_negative() || !qc.is_positive() {
        return Err(Error::NoRealRoot);
    }
    let sq = sqrt_interval(&disc, bits)?;
    let two_c = int(2) * &qc;
    let root = RationalInterval::new((-&qb + sq.lo()) / &two_c, (-&qb + sq.hi()) / &two_c)?;
    Ok(CUpdate {
        a: qa,
        b: qb,
        c: qc,
        root,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoundMode {
    /// `[c + dc/2, c_+]`
    Alg1,
    /// `[c + dc/2, c + 2 dc/3]`
    Alg2,
}

/// Smallest-denominator point of the rounding window, shrunk by the root
/// enclosure so it lies inside the exact window; re-validated against the
/// quadratic.
pub fn round_c(c: &Rational, update: &CUpdate, mode: RoundMode) -> Result<Rational> {
    let dc_lo = update.root.lo() - c;
    let dc_hi = update.root.hi() - c;
    if !dc_lo.is_positive() {
        return Err(Error::EmptyInterval(format!(
            "root enclosure {} does not lie above c = {c}",
            update.root
        )));
    }
    let lo = c + &dc_hi / int(2);
    let hi = match mode {
        RoundMode::Alg1 => update.root.lo().clone(),
        RoundMode::Alg2 => c + rat(2, 3) * &dc_lo,
    };
    let window = RationalInterval::new(lo, hi)?;
    let c_new = min_denominator_rational(&window);
    if update.value_at(&c_new).is_positive() {
        return Err(Error::EmptyInterval(format!(
            "rounded bound {c_new} fails the norm check"
        )));
    }
    Ok(c_new)
}

fn c_update_and_round(
    ctx: &BarrierContext,
    h: &HessianAt,
    base: &[Rational],
    shift: Shift,
    c: &Rational,
    params: &SolverParams,
    mode: RoundMode,
) -> Result<(CUpdate, Rational)> {
    let mut bits = params.sqrt_bits.max(1);
    loop {
        let update = c_update_with(ctx, h, base, shift, params, bits)?;
        match round_c(c, &update, mode) {
            Ok(c_new) => return Ok((update, c_new)),
            Err(Error::EmptyInterval(msg)) => {
                if bits >= 1 << 16 {
                    return Err(Error::EmptyInterval(msg));
                }
                bits *= 2;
            }
            Err(e) => return Err(e),
        }
    }
}

/// `(||-g(x) - 1||_x^*)^2`.
pub fn one_certificate_gap_sq(ctx: &BarrierContext, x: &[Rational]) -> Result<Rational> {
    let h = hessian(ctx, x)?;
    let ng = h.neg_gradient(ctx);
    let diff: Vec<Rational> = ng.iter().zip(ctx.one()).map(|(a, b)| a - b).collect();
    dual_local_norm_sq(&h, &diff)
}

/// Precondition of Algorithm 1: `||-g(x) - 1||_x^* <= r/(r+1)`, compared on
/// squares.
pub fn check_init(ctx: &BarrierContext, x: &[Rational], params: &SolverParams) -> Result<bool> {
    if !in_dual_interior(ctx, x) {
        return Ok(false);
    }
    let radius = params.radius();
    Ok(one_certificate_gap_sq(ctx, x)? <= &radius * &radius)
}

/// Rational `c_0 <= -(r/(r+1) - ||-g(x) - 1||_x^*)^-1 ||t||_x^*`, rounded
/// down to an integer no larger than -1.
pub fn initial_bound(
    ctx: &BarrierContext,
    x: &[Rational],
    t: &[Rational],
    params: &SolverParams,
) -> Result<Rational> {
    let h = hessian(ctx, x)?;
    let ng = h.neg_gradient(ctx);
    let diff: Vec<Rational> = ng.iter().zip(ctx.one()).map(|(a, b)| a - b).collect();
    let gap_sq = dual_local_norm_sq(&h, &diff)?;
    let t_sq = dual_local_norm_sq(&h, t)?;
    let radius = params.radius();
    if gap_sq > &radius * &radius {
        return Err(Error::InitNotValid(format!(
            "||-g(x) - 1||^2 = {gap_sq} exceeds {}",
            &radius * &radius
        )));
    }
    let mut bits = params.sqrt_bits.max(8);
    loop {
        let gap_hi = sqrt_interval(&gap_sq, bits)?.hi().clone();
        let slack = &radius - gap_hi;
        if slack.is_positive() {
            let t_hi = sqrt_interval(&t_sq, bits)?.hi().clone();
            let mag = (t_hi / slack).ceil().max(int(1));
            return Ok(-mag);
        }
        if bits >= 1 << 14 {
            return Err(Error::InitNotValid("initial point is on the boundary of the ball".into()));
        }
        bits *= 2;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationRecord {
    pub iter: usize,
    pub c: Rational,
    pub delta_c: Rational,
    pub n: BigInt,
    pub max_bits_x: u64,
    pub verified: bool,
}

impl fmt::Display for IterationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "iter {} c = {} dc = {} N = {} bits = {}",
            self.iter, self.c, self.delta_c, self.n, self.max_bits_x
        )
    }
}

/// Everything one main-loop iteration produced, for inspection.
#[derive(Clone, Debug)]
pub struct StepDetail {
    pub x_plus: Vec<Rational>,
    pub x_n: Vec<Rational>,
    pub n: BigInt,
    pub update: CUpdate,
    pub c_new: Rational,
}

/// Algorithm 1 as a resumable state machine.
#[derive(Clone, Debug)]
pub struct Algorithm1<'a> {
    ctx: &'a BarrierContext,
    t: Vec<Rational>,
    params: SolverParams,
    c: Rational,
    h: HessianAt,
    iter: usize,
    last_n: Option<BigInt>,
    trace: Vec<IterationRecord>,
}

impl<'a> Algorithm1<'a> {
    /// Checks the precondition on `x_init`, computes `c_0` and rescales.
    pub fn start(
        ctx: &'a BarrierContext,
        t: &[Rational],
        params: SolverParams,
        x_init: &[Rational],
    ) -> Result<Self> {
        let c0 = initial_bound(ctx, x_init, t, &params)?;
        Self::start_at(ctx, t, params, x_init, c0)
    }

    /// Starts from a given `c_0`, which must not exceed the bound computed
    /// by [`initial_bound`].
    pub fn start_at(
        ctx: &'a BarrierContext,
        t: &[Rational],
        params: SolverParams,
        x_init: &[Rational],
        c0: Rational,
    ) -> Result<Self> {
        if t.len() != ctx.u() {
            return Err(Error::Dimension(format!(
                "polynomial has {} coefficients, cone has dimension {}",
                t.len(),
                ctx.u()
            )));
        }
        if !check_init(ctx, x_init, &params)? {
            return Err(Error::InitNotValid(
                "||-g(x) - 1||_x^* exceeds r/(r+1)".into(),
            ));
        }
        let exact = initial_bound(ctx, x_init, t, &params)?;
        if c0 > exact {
            return Err(Error::InvalidParameter(format!(
                "c0 = {c0} exceeds the safe initial bound {exact}"
            )));
        }
        let scale = -c0.recip();
        let x: Vec<Rational> = x_init.iter().map(|v| v * &scale).collect();
        let h = hessian(ctx, &x)?;
        let s = shifted_target(t, ctx.one(), Shift::Minus, &c0);
        if !ctx.op().apply(&h.solve(&s))?.is_psd() {
            return Err(Error::Internal("scaled initial point does not certify t - c0".into()));
        }
        Ok(Self {
            ctx,
            t: t.to_vec(),
            params,
            c: c0,
            h,
            iter: 0,
            last_n: None,
            trace: Vec::new(),
        })
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn x(&self) -> &[Rational] {
        self.h.x()
    }

    pub fn last_n(&self) -> Option<&BigInt> {
        self.last_n.as_ref()
    }

    pub fn trace(&self) -> &[IterationRecord] {
        &self.trace
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    pub fn step(&mut self) -> Result<IterationRecord> {
        self.step_detailed().map(|_| self.trace.last().cloned().expect("recorded"))
    }

    pub fn step_detailed(&mut self) -> Result<StepDetail> {
        let ctx = self.ctx;
        let s = shifted_target(&self.t, ctx.one(), Shift::Minus, &self.c);
        let x_plus = newton_step_with(&self.h, &s);
        let (x_n, n) = round_certificate(ctx, &x_plus, &self.params)?;
        let h_n = hessian(ctx, &x_n)?;
        let (update, c_new) =
            c_update_and_round(ctx, &h_n, &self.t, Shift::Minus, &self.c, &self.params, RoundMode::Alg1)?;
        let target = shifted_target(&self.t, ctx.one(), Shift::Minus, &c_new);
        let verified = ctx.op().apply(&h_n.solve(&target))?.is_psd();
        if !verified {
            return Err(Error::Internal(format!("x_N does not certify t - ({c_new})")));
        }
        let delta_c = &c_new - &self.c;
        self.iter += 1;
        let record = IterationRecord {
            iter: self.iter,
            c: c_new.clone(),
            delta_c,
            n: n.clone(),
            max_bits_x: x_n.iter().map(bit_size).max().unwrap_or(0),
            verified,
        };
        self.trace.push(record);
        self.c = c_new.clone();
        self.h = h_n;
        self.last_n = Some(n.clone());
        Ok(StepDetail {
            x_plus,
            x_n,
            n,
            update,
            c_new,
        })
    }

    /// Iterates until the stopping rule holds or `max_iters` is exhausted.
    pub fn run(&mut self) -> Result<bool> {
        let threshold = self.params.stop_threshold();
        while self.iter < self.params.max_iters {
            let rec = self.step()?;
            if rec.delta_c <= threshold {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn into_solution(self, converged: bool) -> Solution {
        Solution {
            c: self.c,
            x: self.h.x().to_vec(),
            n: self.last_n,
            trace: self.trace,
            converged,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub c: Rational,
    pub x: Vec<Rational>,
    pub n: Option<BigInt>,
    pub trace: Vec<IterationRecord>,
    pub converged: bool,
}

/// Runs Algorithm 1 to convergence; the returned `x` certifies `t - c*1`.
pub fn algorithm1(
    ctx: &BarrierContext,
    t: &[Rational],
    params: &SolverParams,
    x_init: &[Rational],
) -> Result<Solution> {
    let mut alg = Algorithm1::start(ctx, t, params.clone(), x_init)?;
    let converged = alg.run()?;
    if !converged {
        return Err(Error::MaxIters(params.max_iters));
    }
    let sol = alg.into_solution(true);
    let target = shifted_target(t, ctx.one(), Shift::Minus, &sol.c);
    if !crate::certify::is_dual_certificate(ctx, &sol.x, &target)? {
        return Err(Error::Internal("final certificate failed re-verification".into()));
    }
    Ok(sol)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitResult {
    pub x: Vec<Rational>,
    pub c: Rational,
    pub trace: Vec<IterationRecord>,
}

/// Algorithm 2: from any interior `x0`, a point `x` with
/// `||-g(x) - 1||_x^* <= r/(r+1)`.
pub fn algorithm2(ctx: &BarrierContext, x0: &[Rational], params: &SolverParams) -> Result<InitResult> {
    if !in_dual_interior(ctx, x0) {
        return Err(Error::NotInterior);
    }
    let mut h = hessian(ctx, x0)?;
    let s = h.neg_gradient(ctx);
    let mut c = Rational::zero();
    let mut trace = Vec::new();
    let radius_sq = {
        let r = params.radius();
        &r * &r
    };
    for iter in 1..=params.max_iters {
        let target = shifted_target(&s, ctx.one(), Shift::Plus, &c);
        let x_plus = newton_step_with(&h, &target);
        let (x_n, n) = round_certificate(ctx, &x_plus, params)?;
        let h_n = hessian(ctx, &x_n)?;
        let (_, c_new) = c_update_and_round(ctx, &h_n, &s, Shift::Plus, &c, params, RoundMode::Alg2)?;
        let delta_c = &c_new - &c;
        c = c_new;
        // ||-g(cx) - 1||_{cx}^* = ||-g(x) - c 1||_x^* for c > 0
        let ng = h_n.neg_gradient(ctx);
        let diff = shifted_target(&ng, ctx.one(), Shift::Minus, &c);
        let gap_sq = dual_local_norm_sq(&h_n, &diff)?;
        trace.push(IterationRecord {
            iter,
            c: c.clone(),
            delta_c,
            n,
            max_bits_x: x_n.iter().map(bit_size).max().unwrap_or(0),
            verified: gap_sq <= radius_sq,
        });
        h = h_n;
        if c.is_positive() && gap_sq <= radius_sq {
            let x: Vec<Rational> = h.x().iter().map(|v| v * &c).collect();
            if !check_init(ctx, &x, params)? {
                return Err(Error::Internal("scaled point fails the precondition".into()));
            }
            return Ok(InitResult { x, c, trace });
        }
    }
    Err(Error::MaxIters(params.max_iters))
}

/// `sum_i q(z_i)` over points where every weight is positive; interior when
/// those points are unisolvent for every block.
pub fn default_interior_point(spec: &ConeSpec, points: &[Vec<Rational>]) -> Result<Vec<Rational>> {
    let q = Basis::new(&spec.q_basis)?;
    let weights: Vec<Poly> = spec.weights.iter().map(|w| q.to_monomial(w)).collect();
    let mut x = vec![Rational::zero(); q.dim()];
    let mut used = 0;
    for z in points {
        if z.len() != spec.n {
            return Err(Error::Dimension(format!("point {z:?} has wrong dimension")));
        }
        if weights.iter().all(|w| w.eval(z).is_positive()) {
            x = add_scaled(&x, &int(1), &q.eval_basis(z));
            used += 1;
        }
    }
    let ctx = BarrierContext::from_spec(spec)?;
    if used == 0 || !in_dual_interior(&ctx, &x) {
        return Err(Error::NotUnisolvent(format!(
            "{used} usable points do not give an interior point"
        )));
    }
    Ok(x)
}

/// Grid points `k / 2^level` in `[-1, 1]^n`, refined until
/// [`default_interior_point`] succeeds.
pub fn grid_interior_point(spec: &ConeSpec) -> Result<Vec<Rational>> {
    let mut last = None;
    for level in 1..=6u32 {
        let m = 1i64 << level;
        let axis: Vec<Rational> = (-m + 1..m).map(|k| rat(k, m)).collect();
        let mut points: Vec<Vec<Rational>> = vec![Vec::new()];
        for _ in 0..spec.n {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |a| {
                        let mut q = p.clone();
                        q.push(a.clone());
                        q
                    })
                })
                .collect();
            if points.len() > 20_000 {
                break;
            }
        }
        match default_interior_point(spec, &points) {
            Ok(x) => return Ok(x),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::NotUnisolvent("no grid points".into())))
}

/// Approximate gradient certificate of `t` (the minimizer of
/// `f(y) + t^T y`) by damped Newton steps, with iterates rounded to dyadic
/// grids of `2^-bits` to keep sizes bounded.
pub fn approximate_gradient_certificate(
    ctx: &BarrierContext,
    t: &[Rational],
    y0: &[Rational],
    min_steps: usize,
    bits: usize,
) -> Result<Vec<Rational>> {
    if !in_dual_interior(ctx, y0) {
        return Err(Error::NotInterior);
    }
    let mut y = y0.to_vec();
    let done = rat(1, 1 << 20);
    let max_steps = min_steps + 200;
    for step in 0..=max_steps {
        let h = hessian(ctx, &y)?;
        let ng = h.neg_gradient(ctx);
        let r: Vec<Rational> = t.iter().zip(&ng).map(|(a, b)| a - b).collect();
        let dir = h.solve(&r);
        let decrement_sq = dot(&r, &dir);
        if step >= min_steps && decrement_sq <= done {
            return Ok(y);
        }
        let lam_hi = from_bigint(sqrt_ceil(&(&decrement_sq * int(1 << 20)))?) / int(1 << 10);
        let alpha = if decrement_sq <= rat(1, 16) {
            int(1)
        } else {
            (int(1) + lam_hi).recip()
        };
        let next = add_scaled(&y, &-alpha, &dir);
        let mut p = bits;
        loop {
            let rounded: Vec<Rational> = next
                .iter()
                .map(|v| round_to_denominator(v, &(BigInt::from(1) << p)))
                .collect();
            if in_dual_interior(ctx, &rounded) {
                y = rounded;
                break;
            }
            p += 8;
            if p > bits + 512 {
                y = next;
                break;
            }
        }
    }
    Err(Error::MaxIters(max_steps))
}
