//! Paley-Wiener interpolation at fixed truncation: multipliers vanishing on a
//! lattice or coset family, their coefficient expansions, Gram solves, the
//! two-step splice `f = g + m f1`, and the multiplier transport used for
//! uniqueness.
//!
//! Functions are finite sums `f(x) = Σ c_λ ∫_S e^{2πiω(x-λ)} dω`, stored as
//! pieces `(S, Λ, c)`, so `f(μ) = (G c)_μ` and `‖f‖² = c* G c`.

use serde::{Deserialize, Serialize};

use crate::domain::IntervalUnion;
use crate::error::{Error, Result};
use crate::gram::{self, gram_entry, unit_phase};
use crate::linalg::{self, norm2, C64};
use crate::rational::Rational;
use crate::spectrum::{CosetFamily, SpectrumSpec, Window};

/// `lambda_min` below which a truncated Gram matrix is treated as singular.
pub const GRAM_SINGULAR: f64 = 1e-8;
/// `|m(λ)|` below which division by the multiplier is refused.
pub const MULTIPLIER_ZERO: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Multiplier {
    /// `1 - e^{2πiax}`.
    Shift { a: Rational },
    /// `∏_k (1 - e^{2πi(x - c_k)/N})`.
    Cosets { n: Rational, offsets: Vec<Rational> },
}

impl Multiplier {
    pub fn shift(a: Rational) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::InvalidInput("shift must be nonzero".into()));
        }
        Ok(Multiplier::Shift { a })
    }

    pub fn cosets(n: Rational, offsets: Vec<Rational>) -> Result<Self> {
        CosetFamily::new(n, offsets.clone())?;
        Ok(Multiplier::Cosets { n, offsets })
    }

    pub fn eval(&self, x: f64) -> C64 {
        let one = C64::new(1.0, 0.0);
        match self {
            Multiplier::Shift { a } => one - unit_phase(a.to_f64() * x),
            Multiplier::Cosets { n, offsets } => {
                let n = n.to_f64();
                offsets.iter().map(|c| one - unit_phase((x - c.to_f64()) / n)).product()
            }
        }
    }

    /// The zero set `(1/|a|) Z`, resp. `∪_k (N Z + c_k)`.
    pub fn zero_family(&self) -> Result<CosetFamily> {
        match self {
            Multiplier::Shift { a } => CosetFamily::lattice(Rational::ONE.checked_div(a.abs())?),
            Multiplier::Cosets { n, offsets } => CosetFamily::new(*n, offsets.clone()),
        }
    }

    /// `|a|`, resp. `1/N`.
    pub fn rate(&self) -> f64 {
        match self {
            Multiplier::Shift { a } => a.to_f64().abs(),
            Multiplier::Cosets { n, .. } => 1.0 / n.to_f64(),
        }
    }

    fn factors(&self) -> usize {
        match self {
            Multiplier::Shift { .. } => 1,
            Multiplier::Cosets { offsets, .. } => offsets.len(),
        }
    }

    /// Coefficients `α_j` of `m = Σ_j α_j e^{2πi j r x}` with `r` the rate.
    pub fn fourier_coefficients(&self) -> Result<Vec<C64>> {
        match self {
            Multiplier::Shift { .. } => Ok(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]),
            Multiplier::Cosets { n, offsets } => {
                let roots: Vec<C64> = offsets.iter().map(|c| Ok(unit_phase((-c.checked_div(*n)?).fract().to_f64()))).collect::<Result<_>>()?;
                Ok(expand_product(&roots))
            }
        }
    }

    /// Frequency shift of the `j`-th term: `j a` in shift mode, `j/N` otherwise.
    fn term_shift(&self, j: usize) -> Result<Rational> {
        let j = Rational::integer(j as i64);
        match self {
            Multiplier::Shift { a } => a.checked_mul(j),
            Multiplier::Cosets { n, .. } => j.checked_div(*n),
        }
    }
}

/// Coefficients of `∏_k (1 - w_k z)` in increasing powers of `z`.
pub fn expand_product(w: &[C64]) -> Vec<C64> {
    let mut p = vec![C64::new(1.0, 0.0)];
    for &wk in w {
        let mut next = vec![C64::new(0.0, 0.0); p.len() + 1];
        for (j, &pj) in p.iter().enumerate() {
            next[j] += pj;
            next[j + 1] -= wk * pj;
        }
        p = next;
    }
    p
}

pub fn multiplier_eval(m: &Multiplier, x: f64) -> C64 {
    m.eval(x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierFloor {
    /// `min |m(λ)|` over the window.
    pub floor: f64,
    pub at: Option<f64>,
    /// Distance from the windowed points to the zero set.
    pub dist: f64,
    /// `(2 sin(π dist rate))^K`, a lower estimate implied by `dist`.
    pub lower_estimate: f64,
}

pub fn multiplier_floor(m: &Multiplier, spec: &SpectrumSpec, w: Window) -> Result<MultiplierFloor> {
    let fam = m.zero_family()?;
    let mut out = MultiplierFloor { floor: f64::INFINITY, at: None, dist: f64::INFINITY, lower_estimate: 0.0 };
    for x in spec.window(w)? {
        let v = m.eval(x).norm();
        if v < out.floor {
            out.floor = v;
            out.at = Some(x);
        }
        out.dist = out.dist.min(fam.dist_f64(x));
    }
    if out.dist.is_finite() {
        let arg = (std::f64::consts::PI * out.dist * m.rate()).min(std::f64::consts::FRAC_PI_2);
        out.lower_estimate = (2.0 * arg.sin()).powi(m.factors() as i32);
    }
    Ok(out)
}

/// Solves for `a'_2..a'_K` in `h(x) = 1 + Σ_{j>=1} a'_{j+1} e^{2πijx/N}`
/// from `h(c_k) = 0`, `k = 2..K`, with `c_1 = 0`.
pub fn h_coefficients(n: Rational, offsets: &[Rational]) -> Result<Vec<C64>> {
    if offsets.len() < 2 {
        return Err(Error::InvalidInput("need at least two offsets".into()));
    }
    CosetFamily::new(n, offsets.to_vec())?;
    if !offsets[0].is_zero() {
        return Err(Error::OffsetNotNormalized(offsets[0].to_string()));
    }
    let k = offsets.len() - 1;
    let mut m = linalg::CMat::zeros(k, k);
    for r in 0..k {
        let c = offsets[r + 1].checked_div(n)?;
        for j in 0..k {
            m[(r, j)] = unit_phase(c.checked_mul(Rational::integer(j as i64 + 1))?.fract().to_f64());
        }
    }
    linalg::solve(&m, &vec![C64::new(-1.0, 0.0); k])
}

/// `a_1..a_K` with `(1 - z) h(z) = 1 - Σ_k a_k z^k`; they sum to 1.
pub fn shift_coefficients(n: Rational, offsets: &[Rational]) -> Result<Vec<C64>> {
    let mut ap = vec![C64::new(1.0, 0.0)];
    ap.extend(h_coefficients(n, offsets)?);
    ap.push(C64::new(0.0, 0.0));
    Ok(ap.windows(2).map(|w| w[0] - w[1]).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationProblem {
    pub points: Vec<f64>,
    pub domain: IntervalUnion,
    pub targets: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interpolation {
    pub coeffs: Vec<C64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `‖G c - b‖ / ‖b‖` (absolute when `b = 0`).
    pub residual: f64,
    pub b_norm: f64,
    pub c_norm: f64,
    /// `c* G c`, the squared norm of the interpolant.
    pub f_norm_sq: f64,
    /// `‖c‖ / ‖b‖`.
    pub amplification: f64,
}

/// Solves `G c = b` on the windowed dictionary.
pub fn interpolate(p: &InterpolationProblem) -> Result<Interpolation> {
    if p.points.len() != p.targets.len() {
        return Err(Error::SizeMismatch { left: p.points.len(), right: p.targets.len() });
    }
    if p.points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let g = gram::assemble_gram(&p.points, &p.domain)?;
    let (lambda_min, lambda_max) = gram::extreme_eigs(&g)?;
    if lambda_min < GRAM_SINGULAR {
        return Err(Error::GramSingular { lambda_min });
    }
    let c = linalg::solve(&g, &p.targets)?;
    let gc = g.matvec(&c);
    let b_norm = norm2(&p.targets);
    let r: Vec<C64> = gc.iter().zip(&p.targets).map(|(x, y)| x - y).collect();
    let residual = if b_norm > 0.0 { norm2(&r) / b_norm } else { norm2(&r) };
    let c_norm = norm2(&c);
    let f_norm_sq = linalg::dot(&c, &gc).re;
    let amplification = if b_norm > 0.0 { c_norm / b_norm } else { 0.0 };
    Ok(Interpolation { coeffs: c, lambda_min, lambda_max, residual, b_norm, c_norm, f_norm_sq, amplification })
}

/// One summand `Σ_λ c_λ ∫_S e^{2πiω(x-λ)} dω`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub domain: IntervalUnion,
    pub points: Vec<f64>,
    pub coeffs: Vec<C64>,
}

impl Piece {
    /// `e^{2πibx} f(x)`: the domain moves by `b`, coefficients pick up `e^{2πiλb}`.
    fn modulate(&self, b: Rational, scale: C64) -> Result<Piece> {
        let bf = b.to_f64();
        Ok(Piece {
            domain: self.domain.translate(b)?,
            points: self.points.clone(),
            coeffs: self.points.iter().zip(&self.coeffs).map(|(&l, &c)| c * scale * unit_phase(l * bf)).collect(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct PwFunction {
    pub pieces: Vec<Piece>,
}

impl std::ops::Add for PwFunction {
    type Output = PwFunction;

    fn add(mut self, other: PwFunction) -> PwFunction {
        self.pieces.extend(other.pieces);
        self
    }
}

impl PwFunction {
    pub fn zero() -> Self {
        PwFunction::default()
    }

    pub fn from_coeffs(domain: &IntervalUnion, points: &[f64], coeffs: &[C64]) -> Self {
        PwFunction { pieces: vec![Piece { domain: domain.clone(), points: points.to_vec(), coeffs: coeffs.to_vec() }] }
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.pieces.iter().flat_map(|p| p.points.iter().zip(&p.coeffs).map(move |(&l, &c)| c * gram_entry(&p.domain, x - l))).sum()
    }

    /// Union of piece domains; contains the support of the Fourier transform.
    pub fn support(&self) -> IntervalUnion {
        self.pieces.iter().fold(IntervalUnion::empty(), |acc, p| acc.union(&p.domain))
    }

    /// `m f`, assembled from frequency shifts of `f`.
    pub fn times_multiplier(&self, m: &Multiplier) -> Result<PwFunction> {
        let alpha = m.fourier_coefficients()?;
        self.times_series(m, &alpha)
    }

    fn times_series(&self, m: &Multiplier, alpha: &[C64]) -> Result<PwFunction> {
        let mut out = PwFunction::zero();
        for p in &self.pieces {
            for (j, &a) in alpha.iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                out.pieces.push(p.modulate(m.term_shift(j)?, a)?);
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoStep {
    pub function: PwFunction,
    pub g: Interpolation,
    pub f1: Interpolation,
    pub floor: f64,
    /// `‖f(Λ1) - b1‖ / ‖b‖` and `‖f(Λ2) - b2‖ / ‖b‖`, evaluated from the assembled pieces.
    pub residual_1: f64,
    pub residual_2: f64,
    pub residual: f64,
    /// Every piece lies in `S1 ∪ S2`.
    pub support_ok: bool,
}

/// `f = g + m f1`: `g` interpolates `b2` on `Λ2` in `PW(S2)`, `f1`
/// interpolates `(b1 - g)/m` on `Λ1` in `PW(S1)`.
pub fn two_step_interpolate(
    s1: &IntervalUnion,
    pts1: &[f64],
    s2: &IntervalUnion,
    pts2: &[f64],
    m: &Multiplier,
    b1: &[C64],
    b2: &[C64],
) -> Result<TwoStep> {
    let g = interpolate(&InterpolationProblem { points: pts2.to_vec(), domain: s2.clone(), targets: b2.to_vec() })?;
    let gf = PwFunction::from_coeffs(s2, pts2, &g.coeffs);
    if pts1.len() != b1.len() {
        return Err(Error::SizeMismatch { left: pts1.len(), right: b1.len() });
    }
    let mut floor = f64::INFINITY;
    let mut targets = Vec::with_capacity(pts1.len());
    for (&l, &b) in pts1.iter().zip(b1) {
        let mv = m.eval(l);
        if mv.norm() < floor {
            floor = mv.norm();
        }
        if mv.norm() < MULTIPLIER_ZERO {
            return Err(Error::MultiplierFloorZero { floor: mv.norm(), at: l });
        }
        targets.push((b - gf.eval(l)) / mv);
    }
    let f1 = interpolate(&InterpolationProblem { points: pts1.to_vec(), domain: s1.clone(), targets })?;
    let f1f = PwFunction::from_coeffs(s1, pts1, &f1.coeffs);
    let function = gf + f1f.times_multiplier(m)?;
    let b_norm = (norm2(b1).powi(2) + norm2(b2).powi(2)).sqrt();
    let err = |pts: &[f64], b: &[C64]| -> f64 {
        let r: Vec<C64> = pts.iter().zip(b).map(|(&x, &y)| function.eval(x) - y).collect();
        norm2(&r)
    };
    let (e1, e2) = (err(pts1, b1), err(pts2, b2));
    let scale = if b_norm > 0.0 { b_norm } else { 1.0 };
    let whole = s1.union(s2);
    let support_ok = function.pieces.iter().all(|p| p.domain.is_subset_of(&whole));
    Ok(TwoStep { g, f1, floor, residual_1: e1 / scale, residual_2: e2 / scale, residual: (e1 * e1 + e2 * e2).sqrt() / scale, support_ok, function })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transport {
    /// `g = m f`, built as `ĝ(ω) = f̂(ω) - Σ_k a_k f̂(ω - k r)`.
    pub g: PwFunction,
    /// `a_1..a_K` (shift mode: `[1]`).
    pub shift_coefficients: Vec<C64>,
    pub max_on_lambda1: f64,
    pub max_on_lambda2: f64,
    /// `max |g(x) - m(x) f(x)|` on the grid.
    pub pointwise_gap: f64,
    pub support: IntervalUnion,
}

/// Transports `f ∈ PW(S1)` to `g = m f`. When `f` vanishes on `Λ1` and `Λ2`
/// lies in the zero set of `m`, `g` vanishes on `Λ1 ∪ Λ2`; completeness of
/// the union then forces `g = 0`, hence `f = 0` off the zero set.
pub fn uniqueness_multiplier_transport(f: &PwFunction, m: &Multiplier, lambda1: &[f64], lambda2: &[f64], grid: &[f64]) -> Result<Transport> {
    let a = match m {
        Multiplier::Shift { .. } => vec![C64::new(1.0, 0.0)],
        Multiplier::Cosets { n, offsets } => shift_coefficients(*n, offsets)?,
    };
    let mut alpha = vec![C64::new(1.0, 0.0)];
    alpha.extend(a.iter().map(|x| -x));
    let g = f.times_series(m, &alpha)?;
    let max_on = |pts: &[f64]| pts.iter().map(|&x| g.eval(x).norm()).fold(0.0, f64::max);
    let pointwise_gap = grid.iter().map(|&x| (g.eval(x) - m.eval(x) * f.eval(x)).norm()).fold(0.0, f64::max);
    Ok(Transport { max_on_lambda1: max_on(lambda1), max_on_lambda2: max_on(lambda2), pointwise_gap, support: g.support(), shift_coefficients: a, g })
}
