//! Canned fixtures and reproductions of the worked examples: the `4Z`
//! cell/coset pair, the rescaled prime Fourier basis, the overcomplete
//! perturbed pair, and the two-coset union on `[0, 1/5) ∪ [1/3, 1)`.

use serde::Serialize;

use crate::combinators::{self, CombineOptions, CombinedSystem, CounterCheck, Property};
use crate::constructions::{self, KadecRule, KadecSpec, PathologicalPair};
use crate::domain::IntervalUnion;
use crate::error::Result;
use crate::fourier::{self, ChebotarevReport, Classification};
use crate::gram::{self, GramReport, ScanConfig, Verdict};
use crate::linalg::C64;
use crate::pw::{self, Multiplier, TwoStep};
use crate::rational::Rational;
use crate::spectrum::{CosetFamily, SpectrumSpec, Window};

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d).expect("nonzero denominator")
}

fn interval(a: Rational, b: Rational) -> IntervalUnion {
    IntervalUnion::interval(a, b).expect("proper interval")
}

pub fn windows(schedule: &[f64]) -> Result<Vec<Window>> {
    schedule.iter().map(|&t| Window::new(t)).collect()
}

pub const DEFAULT_SCHEDULE: [f64; 4] = [16.0, 32.0, 64.0, 128.0];

/// Inputs of a two-system union.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnionFixture {
    pub s1: IntervalUnion,
    pub lambda1: SpectrumSpec,
    pub s2: IntervalUnion,
    pub lambda2: SpectrumSpec,
}

/// `E(4Z + 1)` on `[0, 1/4)` and `E(4Z)` on `[1/2, 3/4)`, joined with `a = 1/2`.
pub fn shift_fixture() -> UnionFixture {
    UnionFixture {
        s1: interval(Rational::ZERO, r(1, 4)),
        lambda1: SpectrumSpec::progression(Rational::integer(4), Rational::ONE).expect("valid progression"),
        s2: interval(r(1, 2), r(3, 4)),
        lambda2: SpectrumSpec::progression(Rational::integer(4), Rational::ZERO).expect("valid progression"),
    }
}

pub const SHIFT_A: (i64, i64) = (1, 2);

/// Kadec system `5n + 1/2 + 0.25 sin n` on `[0, 1/5)` and `3Z ∪ (3Z + 1)` on
/// `[1/3, 1)`, joined through the cosets `{0, 1}` of `3Z`.
pub fn coset_fixture() -> UnionFixture {
    let kadec = KadecSpec::new(Rational::integer(5), 0.05, KadecRule::Sinusoidal { rate: 1.0 }).with_offset(r(1, 2));
    let family = CosetFamily::new(Rational::integer(3), vec![Rational::ZERO, Rational::ONE]).expect("valid family");
    let w = fourier::build_wkl(Rational::integer(3), family.offsets(), &[1, 2]).expect("valid matrix");
    let det = crate::linalg::det(&w.entries).norm();
    UnionFixture {
        s1: kadec.domain().expect("positive scale"),
        lambda1: constructions::kadec_spectrum(&kadec).expect("delta below 1/4"),
        s2: interval(r(1, 3), Rational::ONE),
        lambda2: SpectrumSpec::cosets(&family)
            .with_provenance(format!("guaranteed: 2x2 coset/cell matrix on cells {{1, 2}} of 3Z has |det| = {det:.6}")),
    }
}

pub fn coset_fixture_family() -> (Rational, Vec<Rational>) {
    (Rational::integer(3), vec![Rational::ZERO, Rational::ONE])
}

#[derive(Clone, Debug, Serialize)]
pub struct Ex25Report {
    pub singular: Classification,
    /// Gram scan of `E(2Z)` on `[0, 1/4) ∪ [1/2, 3/4)`.
    pub singular_scan: GramReport,
    /// Largest `|<1_{[0,1/4)} - 1_{[1/2,3/4)}, e_λ>|` over `λ ∈ 2Z ∩ [-128, 128]`.
    pub annihilator_max: f64,
    pub invertible: Classification,
    pub invertible_scan: GramReport,
    pub prime: constructions::PrimeRescaled,
    pub prime_scan: GramReport,
    pub chebotarev: ChebotarevReport,
}

pub fn ex25(schedule: &[f64], cfg: &ScanConfig) -> Result<Ex25Report> {
    let ws = windows(schedule)?;
    let omega = SpectrumSpec::cosets(&CosetFamily::lattice(Rational::integer(4))?);
    let s = interval(Rational::ZERO, r(1, 4));
    let n = Rational::integer(4);
    let singular = fourier::classify_system(n, &omega, &s, &[Rational::ZERO, Rational::integer(2)], &[0, 2], 0.25)?;
    let singular_scan = gram::riesz_bound_scan(&singular.spectrum, &singular.domain, &ws, cfg)?;
    let two_z = SpectrumSpec::cosets(&CosetFamily::lattice(Rational::integer(2))?);
    let (q1, q2) = (interval(Rational::ZERO, r(1, 4)), interval(r(1, 2), r(3, 4)));
    let annihilator_max =
        two_z.window(Window::new(128.0)?)?.iter().map(|&l| (gram::gram_entry(&q1, -l) - gram::gram_entry(&q2, -l)).norm()).fold(0.0, f64::max);
    let invertible = fourier::classify_system(n, &omega, &s, &[Rational::ZERO, Rational::ONE], &[0, 2], 0.25)?;
    let invertible_scan = gram::riesz_bound_scan(&invertible.spectrum, &invertible.domain, &ws, cfg)?;
    let prime = constructions::prime_rescaled_basis(5, &[0, 2], &[0, 3])?;
    let prime_scan = gram::riesz_bound_scan(&prime.spectrum, &prime.domain, &ws, cfg)?;
    let chebotarev = fourier::chebotarev_scan(5, false)?;
    Ok(Ex25Report { singular, singular_scan, annihilator_max, invertible, invertible_scan, prime, prime_scan, chebotarev })
}

#[derive(Clone, Debug, Serialize)]
pub struct Ex26Row {
    pub system: String,
    pub domain: IntervalUnion,
    pub expected: Verdict,
    pub report: GramReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct Ex26Report {
    pub epsilon: Rational,
    pub delta: Rational,
    pub rows: Vec<Ex26Row>,
}

impl Ex26Report {
    pub fn table(&self) -> String {
        let mut out = format!("{:<38} {:<12} {:<13} lambda_min by window\n", "system", "domain", "verdict");
        for row in &self.rows {
            let mins: Vec<String> = row.report.rows.iter().map(|g| format!("T={}:{:.3e}", g.window_t, g.lambda_min)).collect();
            let dom: Vec<String> = row.domain.intervals().iter().map(|(a, b)| format!("[{a},{b})")).collect();
            out.push_str(&format!("{:<38} {:<12} {:<13} {}\n", row.system, dom.join("∪"), format!("{:?}", row.report.verdict), mins.join(" ")));
        }
        out
    }
}

/// The pair at `epsilon = 1/5` and the shifted union at `delta = 1/10`.
pub fn ex26_pair() -> Result<(PathologicalPair, SpectrumSpec, Rational)> {
    let pair = constructions::pathological_pair(r(1, 5))?;
    let delta = r(1, 10);
    let shifted = constructions::shifted_union(&pair, delta)?;
    Ok((pair, shifted, delta))
}

pub fn ex26(schedule: &[f64], cfg: &ScanConfig) -> Result<Ex26Report> {
    let ws = windows(schedule)?;
    let (pair, shifted, delta) = ex26_pair()?;
    let (left, right) = PathologicalPair::domains();
    let whole = left.union(&right);
    let cases: Vec<(&str, SpectrumSpec, IntervalUnion, Verdict)> = vec![
        ("Lambda1", pair.lambda1.clone(), left, Verdict::RieszStable),
        ("Lambda2", pair.lambda2.clone(), right, Verdict::RieszStable),
        ("Lambda1 ∪ Lambda2", pair.lambda1.union(&pair.lambda2)?, whole.clone(), Verdict::RieszStable),
        ("Lambda1 ∪ (Lambda2 + delta)", shifted.clone(), whole.clone(), Verdict::Degenerating),
        ("Lambda1 ∪ (Lambda2 + delta) ∖ {delta}", shifted.excluding(&[delta.to_f64()]), whole, Verdict::RieszStable),
    ];
    let rows = cases
        .into_iter()
        .map(|(name, spec, dom, expected)| {
            Ok(Ex26Row { system: name.into(), report: gram::riesz_bound_scan(&spec, &dom, &ws, cfg)?, domain: dom, expected })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Ex26Report { epsilon: pair.epsilon, delta, rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct Sec12Report {
    pub combined: CombinedSystem,
    pub interpolation_window: f64,
    pub two_step_residual: f64,
    pub multiplier_floor: f64,
}

/// Deterministic unit-norm targets drawn from `seed`.
pub fn random_targets(len: usize, seed: u64) -> Vec<C64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<C64> = (0..len).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let n = crate::linalg::norm2(&v);
    if n == 0.0 {
        v
    } else {
        v.into_iter().map(|x| x / n).collect()
    }
}

/// Splits unit-norm targets on `Λ1 ∪ Λ2` and runs the two-step solve.
pub fn two_step_on(fx: &UnionFixture, m: &Multiplier, t: f64, seed: u64) -> Result<TwoStep> {
    let w = Window::new(t)?;
    let (p1, p2) = (fx.lambda1.window(w)?, fx.lambda2.window(w)?);
    let b = random_targets(p1.len() + p2.len(), seed);
    pw::two_step_interpolate(&fx.s1, &p1, &fx.s2, &p2, m, &b[..p1.len()], &b[p1.len()..])
}

pub fn sec12(opts: &CombineOptions, seed: u64) -> Result<Sec12Report> {
    let fx = coset_fixture();
    let (n, offsets) = coset_fixture_family();
    let combined = combinators::combine_cosets(&fx.s1, &fx.lambda1, &fx.s2, &fx.lambda2, n, &offsets, Property::RieszBasis, opts)?;
    let m = Multiplier::cosets(n, offsets)?;
    let two = two_step_on(&fx, &m, 32.0, seed)?;
    Ok(Sec12Report { combined, interpolation_window: 32.0, two_step_residual: two.residual, multiplier_floor: two.floor })
}

pub fn counter_verdict(c: &CombinedSystem) -> Option<Verdict> {
    match &c.counter_check {
        Some(CounterCheck::Gram(g)) => Some(g.verdict),
        _ => None,
    }
}
