//! Concrete spectrum/domain pairs: Kadec perturbations of lattices, coset
//! families and their cells, rescaled prime Fourier bases, and the
//! overcomplete pair built from two perturbed half-lattices.

use serde::{Deserialize, Serialize};

use crate::domain::IntervalUnion;
use crate::error::{Error, Result};
use crate::fourier::{self, SystemClass, WklAnalysis};
use crate::rational::Rational;
use crate::spectrum::{CosetFamily, Perturbation, PerturbationRule, Progression, SpectrumSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum KadecRule {
    Zero,
    /// `c delta (-1)^n`.
    Alternating,
    /// `+c delta` for `n < pivot`, `-c delta` otherwise.
    SignSplit {
        pivot: i64,
    },
    /// `c delta sin(rate n)`.
    Sinusoidal {
        rate: f64,
    },
    /// Uniform in `[-c delta, c delta]`.
    SeededUniform {
        seed: u64,
    },
}

/// `lambda_n = c n + offset + delta_n` with `|delta_n| <= c delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KadecSpec {
    pub c: Rational,
    #[serde(default)]
    pub offset: Rational,
    pub delta: f64,
    #[serde(flatten)]
    pub rule: KadecRule,
}

impl KadecSpec {
    pub fn new(c: Rational, delta: f64, rule: KadecRule) -> Self {
        KadecSpec { c, offset: Rational::ZERO, delta, rule }
    }

    pub fn with_offset(mut self, offset: Rational) -> Self {
        self.offset = offset;
        self
    }

    /// `[0, 1/c)`.
    pub fn domain(&self) -> Result<IntervalUnion> {
        IntervalUnion::interval(Rational::ZERO, Rational::ONE.checked_div(self.c)?)
    }
}

pub fn kadec_spectrum(spec: &KadecSpec) -> Result<SpectrumSpec> {
    if !spec.c.is_positive() {
        return Err(Error::InvalidInput(format!("scale {} must be positive", spec.c)));
    }
    if !(spec.delta >= 0.0) {
        return Err(Error::InvalidInput(format!("delta {} must be non-negative", spec.delta)));
    }
    if spec.delta >= 0.25 {
        return Err(Error::DeltaTooLarge(spec.delta));
    }
    let amp = spec.c.to_f64() * spec.delta;
    let rule = match spec.rule {
        KadecRule::Zero => PerturbationRule::Zero,
        KadecRule::Alternating => PerturbationRule::Alternating { amp },
        KadecRule::SignSplit { pivot } => PerturbationRule::SignSplit { below: amp, above: -amp, pivot },
        KadecRule::Sinusoidal { rate } => PerturbationRule::Sinusoidal { amp, rate },
        KadecRule::SeededUniform { seed } => PerturbationRule::SeededUniform { amp, seed },
    };
    let perturbation = (amp > 0.0 && rule != PerturbationRule::Zero).then(|| Perturbation::new(rule));
    let tag = format!("guaranteed: Kadec(c={}, delta={}) gives a Riesz basis for L2[0, {})", spec.c, spec.delta, Rational::ONE.checked_div(spec.c)?);
    Ok(SpectrumSpec::default().with_progression(Progression { period: spec.c, offset: spec.offset, perturbation })?.with_provenance(tag))
}

/// `∪_k (N Z + c_k)`.
pub fn coset_spectrum(n: Rational, offsets: &[Rational]) -> Result<SpectrumSpec> {
    Ok(SpectrumSpec::cosets(&CosetFamily::new(n, offsets.to_vec())?))
}

/// `∪_{l} [l/N, (l+1)/N)`.
pub fn fundamental_cells(n: Rational, cells: &[i64]) -> Result<IntervalUnion> {
    if !n.is_positive() {
        return Err(Error::InvalidInput(format!("period {n} must be positive")));
    }
    if cells.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = IntervalUnion::empty();
    for (i, &l) in cells.iter().enumerate() {
        if l < 0 || cells[..i].contains(&l) {
            return Err(Error::InvalidInput(format!("cell index {l} must be distinct and non-negative")));
        }
        let lo = Rational::integer(l).checked_div(n)?;
        let hi = Rational::integer(l + 1).checked_div(n)?;
        out = out.union(&IntervalUnion::interval(lo, hi)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrimeRescaled {
    pub p: u64,
    pub spectrum: SpectrumSpec,
    pub domain: IntervalUnion,
    /// Fourier submatrix `[e^{-2 pi i k l / P}]` with base bound `1/4`.
    pub analysis: WklAnalysis,
    pub class: SystemClass,
}

fn residues(p: u64, xs: &[u64], what: &str) -> Result<()> {
    for (i, &x) in xs.iter().enumerate() {
        if x >= p || xs[..i].contains(&x) {
            return Err(Error::InvalidInput(format!("{what} {x} must be a distinct residue mod {p}")));
        }
    }
    Ok(())
}

/// `E(∪_{k} 4Z + 4k/P)` on `∪_{l} [l/4, (l+1)/4)`.
///
/// The pair is the image of `∪_k (P Z + k)` on `∪_l [l/P, (l+1)/P)` under the
/// dilation `t -> P t / 4`, so the classifying matrix is the `P x P` Fourier
/// submatrix and the lower bound of `E(4Z)` on `[0, 1/4)` is `1/4`.
pub fn prime_rescaled_basis(p: u64, rows: &[u64], cols: &[u64]) -> Result<PrimeRescaled> {
    if p < 2 || !(2..).take_while(|d: &u64| d * d <= p).all(|d| p % d != 0) {
        return Err(Error::NotPrime(p));
    }
    if rows.len() != cols.len() {
        return Err(Error::SizeMismatch { left: rows.len(), right: cols.len() });
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    residues(p, rows, "row")?;
    residues(p, cols, "column")?;
    let pr = Rational::integer(p as i64);
    let four = Rational::integer(4);
    let offsets: Vec<Rational> = rows.iter().map(|&k| Rational::integer(4 * k as i64).checked_div(pr)).collect::<Result<_>>()?;
    let spectrum = coset_spectrum(four, &offsets)?
        .with_provenance(format!("guaranteed: every square minor of the {p}x{p} Fourier matrix is nonzero (Chebotarev)"));
    let cells: Vec<i64> = cols.iter().map(|&l| l as i64).collect();
    let domain = fundamental_cells(four, &cells)?;
    let int_rows: Vec<Rational> = rows.iter().map(|&k| Rational::integer(k as i64)).collect();
    let w = fourier::build_wkl(pr, &int_rows, &cells)?;
    let analysis = fourier::analyze(&w, 0.25)?;
    let class = if analysis.bijective { SystemClass::RieszBasis } else { SystemClass::Neither };
    Ok(PrimeRescaled { p, spectrum, domain, analysis, class })
}

/// `Lambda1 = {2n : n <= 0} ∪ {2n - 1 + eps : n >= 1}` and `Lambda2 = -Lambda1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathologicalPair {
    pub epsilon: Rational,
    pub lambda1: SpectrumSpec,
    pub lambda2: SpectrumSpec,
}

impl PathologicalPair {
    /// `[0, 1/2)` and `[1/2, 1)`, on which the two halves are Riesz bases.
    pub fn domains() -> (IntervalUnion, IntervalUnion) {
        let half = Rational::new(1, 2).expect("nonzero denominator");
        (
            IntervalUnion::interval(Rational::ZERO, half).expect("proper interval"),
            IntervalUnion::interval(half, Rational::ONE).expect("proper interval"),
        )
    }
}

pub fn pathological_pair(epsilon: Rational) -> Result<PathologicalPair> {
    let quarter = Rational::new(1, 4)?;
    if !epsilon.is_positive() || epsilon >= quarter {
        return Err(Error::EpsilonOutOfRange(epsilon.to_string()));
    }
    let rule = PerturbationRule::SignSplit { below: 0.0, above: epsilon.to_f64() - 1.0, pivot: 1 };
    let lambda1 = SpectrumSpec::default()
        .with_progression(Progression { period: Rational::integer(2), offset: Rational::ZERO, perturbation: Some(Perturbation::new(rule)) })?
        .with_provenance(format!(
            "guaranteed: Kadec(c=2, delta={}) on [0, 1/2)",
            Rational::ONE.checked_sub(epsilon)?.checked_div(Rational::integer(4))?
        ));
    let lambda2 = lambda1.negate()?;
    Ok(PathologicalPair { epsilon, lambda1, lambda2 })
}

/// `Lambda1 ∪ (Lambda2 + delta)`; at distance `delta` from `Lambda1` and
/// overcomplete on `[0, 1)`.
pub fn shifted_union(pair: &PathologicalPair, delta: Rational) -> Result<SpectrumSpec> {
    if !delta.is_positive() || delta >= pair.epsilon {
        return Err(Error::DeltaNotLessThanEpsilon { delta: delta.to_string(), epsilon: pair.epsilon.to_string() });
    }
    Ok(pair
        .lambda1
        .union(&pair.lambda2.translate(delta)?)?
        .with_provenance(format!("overcomplete on [0, 1): removing {delta} leaves a perturbation of Z by at most {}", pair.epsilon)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::normalize;
    use crate::rational::q;
    use crate::spectrum::Window;

    fn win(t: f64) -> Window {
        Window::new(t).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn kadec_examples() {
        let z = kadec_spectrum(&KadecSpec::new(q("1"), 0.0, KadecRule::Zero)).unwrap();
        assert_eq!(z.window(win(3.0)).unwrap(), vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        let eps = 0.2;
        let l1 = kadec_spectrum(&KadecSpec::new(q("2"), (1.0 - eps) / 4.0, KadecRule::SignSplit { pivot: 1 }).with_offset(q("-2/5"))).unwrap();
        assert!(close(&l1.window(win(4.0)).unwrap(), &[-4.0, -2.0, 0.0, 1.2, 3.2]));
        let sin = kadec_spectrum(&KadecSpec::new(q("1"), 0.2, KadecRule::Sinusoidal { rate: 7.0 })).unwrap();
        for x in sin.window(win(50.0)).unwrap() {
            assert!((x - x.round()).abs() <= 0.2 + 1e-15);
        }
        assert!(matches!(kadec_spectrum(&KadecSpec::new(q("1"), 0.26, KadecRule::Alternating)), Err(Error::DeltaTooLarge(_))));
        assert!(matches!(kadec_spectrum(&KadecSpec::new(q("1"), 0.25, KadecRule::Alternating)), Err(Error::DeltaTooLarge(_))));
    }

    #[test]
    fn kadec_bound_holds_for_every_rule() {
        let rules = [
            KadecRule::Zero,
            KadecRule::Alternating,
            KadecRule::SignSplit { pivot: 3 },
            KadecRule::Sinusoidal { rate: 1.3 },
            KadecRule::SeededUniform { seed: 9 },
        ];
        for rule in rules {
            let spec = KadecSpec::new(q("3/2"), 0.24, rule).with_offset(q("1/3"));
            let pts = kadec_spectrum(&spec).unwrap().window(win(60.0)).unwrap();
            for x in pts {
                let n = ((x - 1.0 / 3.0) / 1.5).round();
                assert!((x - 1.0 / 3.0 - 1.5 * n).abs() <= 1.5 * 0.24 + 1e-12);
            }
        }
    }

    #[test]
    fn cell_examples() {
        assert_eq!(fundamental_cells(q("4"), &[0, 2]).unwrap(), normalize(&[(q("0"), q("1/4")), (q("1/2"), q("3/4"))]).unwrap());
        assert_eq!(fundamental_cells(q("3"), &[1, 2]).unwrap(), normalize(&[(q("1/3"), q("1"))]).unwrap());
        assert_eq!(fundamental_cells(q("1"), &[0]).unwrap(), normalize(&[(q("0"), q("1"))]).unwrap());
        let s = coset_spectrum(q("3"), &[q("0"), q("1/2")]).unwrap();
        assert_eq!(s.window(win(3.0)).unwrap(), vec![-3.0, -2.5, 0.0, 0.5, 3.0]);
    }

    #[test]
    fn prime_rescaled_examples() {
        let r = prime_rescaled_basis(5, &[0, 2], &[0, 3]).unwrap();
        assert_eq!(r.spectrum.window(win(4.0)).unwrap(), vec![-4.0, -2.4, 0.0, 1.6, 4.0]);
        assert_eq!(r.domain, normalize(&[(q("0"), q("1/4")), (q("3/4"), q("1"))]).unwrap());
        assert_eq!(r.class, SystemClass::RieszBasis);
        let r = prime_rescaled_basis(2, &[0], &[0]).unwrap();
        assert_eq!(r.spectrum, SpectrumSpec::cosets(&CosetFamily::lattice(q("4")).unwrap()).with_provenance(r.spectrum.provenance()[0].clone()));
        assert_eq!(r.domain, normalize(&[(q("0"), q("1/4"))]).unwrap());
        assert!((r.analysis.certificate - 0.25).abs() < 1e-15);
        let r = prime_rescaled_basis(7, &[1, 2, 4], &[0, 1, 2]).unwrap();
        assert!(r.analysis.sigma_min > 1e-3 && r.class == SystemClass::RieszBasis);
        assert!(matches!(prime_rescaled_basis(6, &[0], &[0]), Err(Error::NotPrime(6))));
        assert!(matches!(prime_rescaled_basis(5, &[0, 1], &[0]), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn prime_rescaled_certificate_bounds_gram() {
        let r = prime_rescaled_basis(5, &[0, 2], &[0, 3]).unwrap();
        let pts = r.spectrum.window(win(24.0)).unwrap();
        let (lo, _, _) = crate::gram::truncation_bounds(&pts, &r.domain, 0.0).unwrap();
        assert!(r.analysis.certificate <= lo + 1e-6);
    }

    #[test]
    fn pathological_examples() {
        let pair = pathological_pair(q("1/5")).unwrap();
        assert!(close(&pair.lambda1.window(win(4.0)).unwrap(), &[-4.0, -2.0, 0.0, 1.2, 3.2]));
        let u = shifted_union(&pair, q("1/10")).unwrap();
        assert!(close(&u.window(win(4.0)).unwrap(), &[-4.0, -3.1, -2.0, -1.1, 0.0, 0.1, 1.2, 2.1, 3.2]));
        assert!(matches!(pathological_pair(q("1/4")), Err(Error::EpsilonOutOfRange(_))));
        assert!(matches!(pathological_pair(q("0")), Err(Error::EpsilonOutOfRange(_))));
        assert!(matches!(shifted_union(&pair, q("1/5")), Err(Error::DeltaNotLessThanEpsilon { .. })));
    }

    #[test]
    fn halves_meet_only_at_zero() {
        for eps in ["1/5", "1/10", "3/13"] {
            let pair = pathological_pair(q(eps)).unwrap();
            let a = pair.lambda1.window(win(100.0)).unwrap();
            let b = pair.lambda2.window(win(100.0)).unwrap();
            let common: Vec<f64> = a.iter().copied().filter(|x| b.iter().any(|y| (x - y).abs() < 1e-9)).collect();
            assert_eq!(common, vec![0.0]);
            let neg: Vec<f64> = a.iter().rev().map(|x| -x).collect();
            assert!(close(&neg, &b));
        }
    }
}
