//! Fixed-point multiprecision smallest eigenvalue of a Gram matrix.
//!
//! Used when the double-precision eigensolver cannot resolve `lambda_min`
//! relative to `lambda_max`. Frequencies are taken as the exact dyadic
//! rationals of their `f64` values, endpoints are exact, so every phase is an
//! exact rational and only `pi`, `sin` and `cos` are rounded, at the working
//! precision. The factorization is a fixed-point Cholesky followed by inverse
//! iteration; the precision doubles until the answer is resolved.

use std::collections::HashMap;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::IntervalUnion;
use crate::error::{Error, Result};

const GUARD_BITS: u32 = 64;
const START_BITS: u32 = 192;
const MAX_BITS: u32 = 4096;
const ITERATION_CAP: usize = 200;

/// Exact rational `num / den` with `den > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Ratio {
    num: BigInt,
    den: BigInt,
}

impl Ratio {
    fn new(num: BigInt, den: BigInt) -> Self {
        let g = num.gcd(&den);
        if g.is_zero() || g.is_one() {
            Ratio { num, den }
        } else {
            Ratio { num: num / &g, den: den / &g }
        }
    }

    fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "frequency must be finite");
        if x == 0.0 {
            return Ratio { num: BigInt::zero(), den: BigInt::one() };
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        let m = BigInt::from(mant) * sign;
        if e >= 0 {
            Ratio::new(m << e as usize, BigInt::one())
        } else {
            Ratio::new(m, BigInt::one() << (-e) as usize)
        }
    }

    fn from_rational(r: crate::rational::Rational) -> Self {
        Ratio::new(BigInt::from(r.numer()), BigInt::from(r.denom()))
    }

    fn sub(&self, o: &Ratio) -> Ratio {
        Ratio::new(&self.num * &o.den - &o.num * &self.den, &self.den * &o.den)
    }

    fn mul(&self, o: &Ratio) -> Ratio {
        Ratio::new(&self.num * &o.num, &self.den * &o.den)
    }

    /// Fractional part in `[0, 1)`.
    fn fract(&self) -> Ratio {
        Ratio { num: self.num.mod_floor(&self.den), den: self.den.clone() }
    }
}

/// Fixed-point context: a value `v` stands for `v / 2^p`.
struct Fixed {
    p: u32,
    one: BigInt,
    pi: BigInt,
    cache: HashMap<Ratio, (BigInt, BigInt)>,
}

impl Fixed {
    fn new(p: u32) -> Self {
        let mut f = Fixed { p, one: BigInt::one() << p as usize, pi: BigInt::zero(), cache: HashMap::new() };
        // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
        f.pi = f.atan_inv(5) * 16 - f.atan_inv(239) * 4;
        f
    }

    fn atan_inv(&self, x: u32) -> BigInt {
        let x2 = BigInt::from(x) * x;
        let mut term = &self.one / x;
        let mut sum = BigInt::zero();
        let mut k = 0u64;
        while !term.is_zero() {
            let t = &term / (2 * k + 1);
            if k % 2 == 0 {
                sum += t;
            } else {
                sum -= t;
            }
            term /= &x2;
            k += 1;
        }
        sum
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.p as usize
    }

    fn fixed(&self, r: &Ratio) -> BigInt {
        (&r.num << self.p as usize).div_floor(&r.den)
    }

    /// `(cos, sin)` of `(pi/2) * r` for a fixed-point `r` in `[0, 1)`.
    fn cos_sin_quarter(&self, r: &BigInt) -> (BigInt, BigInt) {
        const HALVINGS: usize = 12;
        let half_pi = &self.pi >> 1usize;
        let y = self.mul(&half_pi, r) >> HALVINGS;
        let y2 = self.mul(&y, &y);
        let mut s = y.clone();
        let mut c = self.one.clone();
        let mut term_s = y.clone();
        let mut term_c = self.one.clone();
        let mut k = 1u64;
        loop {
            term_c = -self.mul(&term_c, &y2) / ((2 * k - 1) * (2 * k));
            term_s = -self.mul(&term_s, &y2) / ((2 * k) * (2 * k + 1));
            if term_c.is_zero() && term_s.is_zero() {
                break;
            }
            c += &term_c;
            s += &term_s;
            k += 1;
        }
        for _ in 0..HALVINGS {
            let s2 = self.mul(&s, &c) << 1usize;
            let c2 = self.mul(&c, &c) - self.mul(&s, &s);
            s = s2;
            c = c2;
        }
        (c, s)
    }

    /// `(cos, sin)` of `2 pi theta` for an exact `theta`; multiples of a
    /// quarter turn are exact.
    fn unit(&mut self, theta: &Ratio) -> (BigInt, BigInt) {
        let f = theta.fract();
        if let Some(v) = self.cache.get(&f) {
            return v.clone();
        }
        let four = Ratio { num: &f.num * 4, den: f.den.clone() };
        let (q, rem) = four.num.div_mod_floor(&four.den);
        let (c, s) = if rem.is_zero() {
            (self.one.clone(), BigInt::zero())
        } else {
            self.cos_sin_quarter(&self.fixed(&Ratio { num: rem, den: four.den.clone() }))
        };
        let v = match q.to_u8().unwrap_or(0) {
            0 => (c, s),
            1 => (-s, c),
            2 => (-c, -s),
            _ => (s, -c),
        };
        self.cache.insert(f, v.clone());
        v
    }

    fn to_f64(&self, v: &BigInt) -> f64 {
        fixed_to_f64(v, self.p)
    }
}

fn fixed_to_f64(v: &BigInt, p: u32) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let bits = v.bits() as i64;
    let shift = bits - 60;
    let top = if shift > 0 { v >> shift as usize } else { v << (-shift) as usize };
    let m = top.to_i64().expect("top bits fit in i64") as f64;
    let e = shift - p as i64;
    // split the scaling so intermediate powers stay in range
    m * 2f64.powi((e / 2) as i32) * 2f64.powi((e - e / 2) as i32)
}

type CFix = (BigInt, BigInt);

fn gram_fixed(fx: &mut Fixed, freqs: &[Ratio], ends: &[(Ratio, Ratio)], measure: &Ratio) -> Vec<Vec<CFix>> {
    let n = freqs.len();
    let two_pi = &fx.pi << 1usize;
    let diag = fx.fixed(measure);
    let mut g = vec![vec![(BigInt::zero(), BigInt::zero()); n]; n];
    for i in 0..n {
        g[i][i] = (diag.clone(), BigInt::zero());
        for j in 0..i {
            let omega = freqs[i].sub(&freqs[j]);
            let mut dc = BigInt::zero();
            let mut ds = BigInt::zero();
            for (lo, hi) in ends {
                let (ch, sh) = fx.unit(&omega.mul(hi));
                let (cl, sl) = fx.unit(&omega.mul(lo));
                dc += ch - cl;
                ds += sh - sl;
            }
            // (dc + i ds) / (2 pi i omega) = (ds - i dc) / (2 pi omega)
            let denom = &two_pi * &omega.num;
            let re = ((ds * &omega.den) << fx.p as usize).div_floor(&denom);
            let im = ((-dc * &omega.den) << fx.p as usize).div_floor(&denom);
            g[i][j] = (re.clone(), im.clone());
            g[j][i] = (re, -im);
        }
    }
    g
}

/// Fixed-point Cholesky `G = L L*`; `None` on a non-positive pivot.
fn cholesky_fixed(fx: &Fixed, g: &[Vec<CFix>]) -> Option<Vec<Vec<CFix>>> {
    let n = g.len();
    let p = fx.p as usize;
    let mut l = vec![vec![(BigInt::zero(), BigInt::zero()); n]; n];
    for j in 0..n {
        let acc: BigInt = l[j][..j].iter().map(|(a, b)| a * a + b * b).sum();
        let d = &g[j][j].0 - (acc >> p);
        if d.sign() != Sign::Plus {
            return None;
        }
        let djj = (d << p).sqrt();
        if djj.is_zero() {
            return None;
        }
        for i in j + 1..n {
            let mut re = BigInt::zero();
            let mut im = BigInt::zero();
            // l[i][k] * conj(l[j][k])
            for ((a, b), (c, d)) in l[i][..j].iter().zip(&l[j][..j]) {
                re += a * c + b * d;
                im += b * c - a * d;
            }
            let sr = &g[i][j].0 - (re >> p);
            let si = &g[i][j].1 - (im >> p);
            l[i][j] = ((sr << p).div_floor(&djj), (si << p).div_floor(&djj));
        }
        l[j][j] = (djj, BigInt::zero());
    }
    Some(l)
}

/// Solves `L L* y = x` in fixed point.
fn solve_fixed(fx: &Fixed, l: &[Vec<CFix>], x: &[CFix]) -> Vec<CFix> {
    let n = l.len();
    let p = fx.p as usize;
    let mut z: Vec<CFix> = Vec::with_capacity(n);
    for i in 0..n {
        let mut re = &x[i].0 << p;
        let mut im = &x[i].1 << p;
        for k in 0..i {
            let (a, b) = &l[i][k];
            let (c, d) = &z[k];
            re -= a * c - b * d;
            im -= a * d + b * c;
        }
        let dii = &l[i][i].0;
        z.push((re.div_floor(dii), im.div_floor(dii)));
    }
    let mut y: Vec<CFix> = vec![(BigInt::zero(), BigInt::zero()); n];
    for i in (0..n).rev() {
        let mut re = &z[i].0 << p;
        let mut im = &z[i].1 << p;
        for k in i + 1..n {
            // conj(l[k][i]) * y[k]
            let (a, b) = &l[k][i];
            let (c, d) = &y[k];
            re -= a * c + b * d;
            im -= a * d - b * c;
        }
        let dii = &l[i][i].0;
        y[i] = (re.div_floor(dii), im.div_floor(dii));
    }
    y
}

fn norm_sqr(v: &[CFix]) -> BigInt {
    v.iter().map(|(a, b)| a * a + b * b).sum()
}

enum Attempt {
    Resolved(f64),
    NeedsMoreBits,
}

fn attempt(p: u32, freqs: &[Ratio], ends: &[(Ratio, Ratio)], measure: &Ratio) -> Result<Attempt> {
    let mut fx = Fixed::new(p + GUARD_BITS);
    let g = gram_fixed(&mut fx, freqs, ends, measure);
    let Some(l) = cholesky_fixed(&fx, &g) else {
        return Ok(Attempt::NeedsMoreBits);
    };
    let n = freqs.len();
    let pw = fx.p as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x: Vec<CFix> = (0..n)
        .map(|_| {
            let re = (rng.gen::<f64>() * 2.0 - 1.0) * (1u64 << 52) as f64;
            let im = (rng.gen::<f64>() * 2.0 - 1.0) * (1u64 << 52) as f64;
            (BigInt::from(re as i64) << (pw - 52), BigInt::from(im as i64) << (pw - 52))
        })
        .collect();
    let mut last = f64::NAN;
    for _ in 0..ITERATION_CAP {
        let xn = norm_sqr(&x).sqrt();
        x = x.into_iter().map(|(a, b)| ((a << pw).div_floor(&xn), (b << pw).div_floor(&xn))).collect();
        let y = solve_fixed(&fx, &l, &x);
        // Rayleigh quotient of y: y* G y / y* y = y* x / y* y
        let yx: BigInt = y.iter().zip(&x).map(|((a, b), (c, d))| a * c + b * d).sum();
        let yy = norm_sqr(&y);
        if yy.is_zero() {
            return Ok(Attempt::NeedsMoreBits);
        }
        let lam = (yx << pw).div_floor(&yy);
        let lam_f = fx.to_f64(&lam);
        if !(lam_f > 0.0) {
            return Ok(Attempt::NeedsMoreBits);
        }
        x = y;
        if (lam_f - last).abs() <= 1e-14 * lam_f {
            // resolved only if lambda sits well above the rounding floor
            if (lam.bits() as i64) < pw as i64 - p as i64 / 2 {
                return Ok(Attempt::NeedsMoreBits);
            }
            return Ok(Attempt::Resolved(lam_f));
        }
        last = lam_f;
    }
    Err(Error::NoConvergence { cap: ITERATION_CAP })
}

/// Smallest eigenvalue of the Gram matrix of `E(points)` on `s`, resolved
/// in adaptive fixed-point precision.
pub fn gram_lambda_min(points: &[f64], s: &IntervalUnion) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let freqs: Vec<Ratio> = points.iter().map(|&x| Ratio::from_f64(x)).collect();
    let ends: Vec<(Ratio, Ratio)> = s.intervals().iter().map(|&(lo, hi)| (Ratio::from_rational(lo), Ratio::from_rational(hi))).collect();
    let measure = Ratio::from_rational(s.measure()?);
    let mut p = START_BITS;
    while p <= MAX_BITS {
        if let Attempt::Resolved(v) = attempt(p, &freqs, &ends, &measure)? {
            return Ok(v);
        }
        p *= 2;
    }
    Err(Error::NoConvergence { cap: MAX_BITS as usize })
}
