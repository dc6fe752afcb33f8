//! The coset/cell matrix `W = [e^{-2 pi i c_k l / N}]`, its singular-value
//! classification of unions of translated exponential systems, closed-form
//! Vandermonde determinants, and exhaustive minor scans of prime Fourier
//! matrices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::IntervalUnion;
use crate::error::{Error, Result};
use crate::gram::{self, unit_phase, ScanConfig};
use crate::linalg::{self, CMat, C64};
use crate::rational::Rational;
use crate::spectrum::{self, CosetFamily, SpectrumSpec, Window};

/// Relative threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-8;
/// Largest prime dimension accepted by [`chebotarev_scan`].
pub const CHEBOTAREV_MAX_P: u64 = 13;
/// A minor at or below this modulus counts as an exact zero in scans.
pub const ZERO_MINOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct WklMatrix {
    pub n: Rational,
    pub offsets: Vec<Rational>,
    pub columns: Vec<i64>,
    pub entries: CMat,
}

/// `e^{2 pi i x}` for an exact rational `x`.
pub fn rational_phase(x: Rational) -> C64 {
    unit_phase(x.fract().to_f64())
}

pub fn build_wkl(n: Rational, offsets: &[Rational], columns: &[i64]) -> Result<WklMatrix> {
    // validates distinct offsets in [0, N)
    CosetFamily::new(n, offsets.to_vec())?;
    let ncols = n.ceil();
    for (i, &l) in columns.iter().enumerate() {
        if l < 0 || l >= ncols {
            return Err(Error::InvalidInput(format!("column {l} outside 0..{ncols}")));
        }
        if columns[..i].contains(&l) {
            return Err(Error::InvalidInput(format!("duplicate column {l}")));
        }
    }
    let mut entries = CMat::zeros(offsets.len(), columns.len());
    for (k, &c) in offsets.iter().enumerate() {
        for (j, &l) in columns.iter().enumerate() {
            let x = -c.checked_mul(Rational::integer(l))?.checked_div(n)?;
            entries[(k, j)] = rational_phase(x);
        }
    }
    Ok(WklMatrix { n, offsets: offsets.to_vec(), columns: columns.to_vec(), entries })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WklAnalysis {
    pub k: usize,
    pub l: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub rank: usize,
    pub injective: bool,
    pub surjective: bool,
    pub bijective: bool,
    /// `A * sigma_min^2`, the lower bound inherited from the base system.
    pub certificate: f64,
}

/// Singular values and the injective/surjective split of `W` as a map
/// `C^L -> C^K`.
pub fn analyze(w: &WklMatrix, base_bound: f64) -> Result<WklAnalysis> {
    if !(base_bound > 0.0) {
        return Err(Error::InvalidInput(format!("base bound {base_bound} must be positive")));
    }
    let (k, l) = (w.entries.rows(), w.entries.cols());
    if k == 0 || l == 0 {
        return Err(Error::EmptyInput);
    }
    let sv = linalg::singular_values(&w.entries)?;
    let sigma_max = sv[0];
    let sigma_min = *sv.last().unwrap();
    let rank = sv.iter().filter(|&&s| s > RANK_TOL * sigma_max).count();
    let injective = rank == l;
    let surjective = rank == k;
    Ok(WklAnalysis {
        k,
        l,
        sigma_min,
        sigma_max,
        rank,
        injective,
        surjective,
        bijective: injective && surjective,
        certificate: base_bound * sigma_min * sigma_min,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SystemClass {
    Frame,
    RieszSequence,
    RieszBasis,
    Neither,
}

impl SystemClass {
    /// Injective `W` gives a frame, surjective a Riesz sequence, both a Riesz basis.
    pub fn from_analysis(a: &WklAnalysis) -> Self {
        match (a.injective, a.surjective) {
            (true, true) => SystemClass::RieszBasis,
            (true, false) => SystemClass::Frame,
            (false, true) => SystemClass::RieszSequence,
            (false, false) => SystemClass::Neither,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub class: SystemClass,
    pub analysis: WklAnalysis,
    /// `∪_k (Omega + c_k)`.
    pub spectrum: SpectrumSpec,
    /// `∪_l (S + l/N)`.
    pub domain: IntervalUnion,
}

/// Classifies `E(∪_k Omega + c_k)` on `∪_l S + l/N`, given that `E(Omega)` is a
/// Riesz basis of `L^2(S)` with lower bound `base_bound`, `Omega ⊆ N Z` and
/// `S ⊆ [0, 1/N)`.
pub fn classify_system(
    n: Rational,
    omega: &SpectrumSpec,
    s: &IntervalUnion,
    offsets: &[Rational],
    columns: &[i64],
    base_bound: f64,
) -> Result<Classification> {
    let cell = IntervalUnion::interval(Rational::ZERO, Rational::ONE.checked_div(n)?)?;
    if !s.is_subset_of(&cell) {
        return Err(Error::DomainNotInFundamentalCell { cell: Rational::ONE.checked_div(n)?.to_string() });
    }
    let lattice = CosetFamily::lattice(n)?;
    let rel = spectrum::family_relation(omega, &lattice, Window::new(64.0)?)?;
    if let Some(w) = rel.outside_witness {
        return Err(Error::OmegaNotInLattice { period: n.to_string(), witness: w });
    }
    let w = build_wkl(n, offsets, columns)?;
    let analysis = analyze(&w, base_bound)?;
    let class = SystemClass::from_analysis(&analysis);
    let mut spec: Option<SpectrumSpec> = None;
    for &c in offsets {
        let part = omega.translate(c)?;
        spec = Some(match spec {
            None => part,
            Some(acc) => acc.union(&part)?,
        });
    }
    let mut domain = IntervalUnion::empty();
    for &l in columns {
        domain = domain.union(&s.translate(Rational::integer(l).checked_div(n)?)?);
    }
    Ok(Classification { class, analysis, spectrum: spec.expect("offsets are non-empty"), domain })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateCheck {
    pub certificate: f64,
    pub lambda_mins: Vec<f64>,
    /// `certificate <= lambda_min + 1e-6` at every truncation.
    pub consistent: bool,
    /// False for frame-only and degenerate verdicts, where truncated Gram
    /// matrices carry no lower bound.
    pub applicable: bool,
}

/// Compares the certificate with Gram `lambda_min` of the combined system.
pub fn certificate_cross_check(c: &Classification, windows: &[Window]) -> Result<CertificateCheck> {
    let applicable = matches!(c.class, SystemClass::RieszBasis | SystemClass::RieszSequence);
    let report = gram::riesz_bound_scan(&c.spectrum, &c.domain, windows, &ScanConfig::default())?;
    let lambda_mins = report.lambda_mins();
    let consistent = !applicable || lambda_mins.iter().all(|&l| c.analysis.certificate <= l + 1e-6);
    Ok(CertificateCheck { certificate: c.analysis.certificate, lambda_mins, consistent, applicable })
}

/// `e^{2 pi i (x_1 + ... + x_m)/N} * prod_{j<k} (e^{2 pi i x_k/N} - e^{2 pi i x_j/N})`,
/// the determinant of `[e^{2 pi i (p+1) x_r / N}]_{r, p}`.
pub fn vandermonde_det(xs: &[Rational], n: Rational) -> Result<C64> {
    let mut z = Vec::with_capacity(xs.len());
    let mut sum = Rational::ZERO;
    for &x in xs {
        z.push(rational_phase(x.checked_div(n)?));
        sum = sum.checked_add(x)?;
    }
    let mut acc = rational_phase(sum.checked_div(n)?);
    for k in 0..z.len() {
        for j in 0..k {
            acc *= z[k] - z[j];
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebotarevReport {
    pub p: u64,
    /// Pairs examined; translates are pruned since they share `|det|`.
    pub pairs: u64,
    pub min_abs_det: f64,
    pub argmin_rows: Vec<u64>,
    pub argmin_cols: Vec<u64>,
    /// Every examined minor exceeds `1e-8` in modulus.
    pub all_nonzero: bool,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn subsets_with_zero(p: u64, size: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let rest: Vec<u64> = (1..p).collect();
    let mut pick = Vec::with_capacity(size);
    fn rec(rest: &[u64], need: usize, start: usize, pick: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if need == 0 {
            let mut v = vec![0];
            v.extend_from_slice(pick);
            out.push(v);
            return;
        }
        for i in start..rest.len() {
            if rest.len() - i < need {
                break;
            }
            pick.push(rest[i]);
            rec(rest, need - 1, i + 1, pick, out);
            pick.pop();
        }
    }
    rec(&rest, size - 1, 0, &mut pick, &mut out);
    out
}

type Candidate = (f64, usize, Vec<u64>, Vec<u64>);

/// Total order: exact zeros first, then by modulus, then lexicographic in
/// `(size, rows, cols)`. Keeps the parallel reduction deterministic.
fn candidate_cmp(a: &Candidate, b: &Candidate) -> std::cmp::Ordering {
    let key = |v: f64| if v <= ZERO_MINOR { 0.0 } else { v };
    key(a.0).total_cmp(&key(b.0)).then(a.1.cmp(&b.1)).then_with(|| a.2.cmp(&b.2)).then_with(|| a.3.cmp(&b.3))
}

/// Minimum `|det|` over all square submatrices of the `P x P` Fourier matrix
/// `[e^{-2 pi i k l / P}]`. Row and column sets are taken to contain `0`,
/// since translating either set multiplies the minor by a unimodular factor.
pub fn chebotarev_scan(p: u64, allow_composite: bool) -> Result<ChebotarevReport> {
    if p > CHEBOTAREV_MAX_P {
        return Err(Error::BudgetExceeded(format!("P = {p} exceeds the cap {CHEBOTAREV_MAX_P}")));
    }
    if p == 0 || (!is_prime(p) && !allow_composite) {
        return Err(Error::NotPrime(p));
    }
    let pr = Rational::integer(p as i64);
    let fourier = |k: u64, l: u64| rational_phase(Rational::new(-((k * l % p) as i64), p as i64).expect("p > 0"));
    let mut best: Option<Candidate> = None;
    let mut pairs = 0u64;
    for size in 1..=p as usize {
        let sets = subsets_with_zero(p, size);
        pairs += (sets.len() * sets.len()) as u64;
        let local = sets
            .par_iter()
            .map(|rows| {
                let mut b: Option<Candidate> = None;
                for cols in &sets {
                    let m = CMat::from_fn(size, size, |i, j| fourier(rows[i], cols[j]));
                    let c = (linalg::det(&m).norm(), size, rows.clone(), cols.clone());
                    if b.as_ref().map_or(true, |x| candidate_cmp(&c, x).is_lt()) {
                        b = Some(c);
                    }
                }
                b
            })
            .reduce(
                || None,
                |a, b| match (a, b) {
                    (Some(x), Some(y)) => Some(if candidate_cmp(&y, &x).is_lt() { y } else { x }),
                    (x, None) => x,
                    (None, y) => y,
                },
            );
        if let Some(c) = local {
            if best.as_ref().map_or(true, |x| candidate_cmp(&c, x).is_lt()) {
                best = Some(c);
            }
        }
    }
    let _ = pr;
    let (v, _, rows, cols) = best.expect("P >= 1 gives at least one minor");
    Ok(ChebotarevReport { p, pairs, min_abs_det: v, argmin_rows: rows, argmin_cols: cols, all_nonzero: v > 1e-8 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::normalize;
    use crate::rational::q;
    use proptest::prelude::*;

    fn rs(v: &[&str]) -> Vec<Rational> {
        v.iter().map(|s| q(s)).collect()
    }

    /// Determinant by cofactor expansion along the first row.
    pub(crate) fn laplace_det(m: &CMat) -> C64 {
        let n = m.rows();
        if n == 0 {
            return C64::new(1.0, 0.0);
        }
        if n == 1 {
            return m[(0, 0)];
        }
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            let minor = CMat::from_fn(n - 1, n - 1, |r, c| m[(r + 1, if c < j { c } else { c + 1 })]);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += m[(0, j)] * laplace_det(&minor) * sign;
        }
        acc
    }

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn build_examples() {
        let w = build_wkl(q("4"), &rs(&["0", "2"]), &[0, 2]).unwrap();
        assert!((0..2).all(|i| (0..2).all(|j| w.entries[(i, j)] == C64::new(1.0, 0.0))));
        let c = q("3/5");
        let w = build_wkl(q("4"), &[q("0"), c], &[0, 2]).unwrap();
        let want = (-std::f64::consts::PI * c.to_f64()).cos();
        assert!(close(w.entries[(1, 1)], C64::new(want, (-std::f64::consts::PI * c.to_f64()).sin())));
        let w = build_wkl(q("3"), &rs(&["0"]), &[0]).unwrap();
        assert_eq!(w.entries[(0, 0)], C64::new(1.0, 0.0));
        assert!(matches!(build_wkl(q("4"), &rs(&["1", "1"]), &[0]), Err(Error::DuplicateOffsets(_))));
        assert!(matches!(build_wkl(q("4"), &rs(&["5"]), &[0]), Err(Error::OffsetOutOfRange { .. })));
        let w = build_wkl(q("4"), &rs(&["0", "1/3", "5/2"]), &[0, 1, 3]).unwrap();
        assert!((0..3).all(|i| (0..3).all(|j| (w.entries[(i, j)].norm() - 1.0).abs() < 1e-12)));
    }

    #[test]
    fn analysis_examples() {
        let w = build_wkl(q("4"), &rs(&["0", "2"]), &[0, 2]).unwrap();
        let a = analyze(&w, 0.25).unwrap();
        assert!(a.sigma_min < 1e-12 && !a.injective && !a.surjective && a.certificate < 1e-24);
        let w = build_wkl(q("4"), &rs(&["0", "1"]), &[0, 2]).unwrap();
        let a = analyze(&w, 0.25).unwrap();
        // [[1,1],[1,-1]] has both singular values sqrt 2
        assert!((a.sigma_min - 2f64.sqrt()).abs() < 1e-12 && a.bijective);
        assert!((a.certificate - 0.5).abs() < 1e-12);
        let w = build_wkl(q("3"), &rs(&["0"]), &[0]).unwrap();
        let a = analyze(&w, 1.0).unwrap();
        assert!(a.bijective && (a.certificate - 1.0).abs() < 1e-15);
    }

    #[test]
    fn classification_examples() {
        let omega = SpectrumSpec::cosets(&CosetFamily::lattice(q("4")).unwrap());
        let s = normalize(&[(q("0"), q("1/4"))]).unwrap();
        let c = classify_system(q("4"), &omega, &s, &rs(&["0", "2"]), &[0, 2], 0.25).unwrap();
        assert_eq!(c.class, SystemClass::Neither);
        let c = classify_system(q("4"), &omega, &s, &rs(&["0", "1"]), &[0, 2], 0.25).unwrap();
        assert_eq!(c.class, SystemClass::RieszBasis);
        assert!((c.analysis.certificate - 0.5).abs() < 1e-12);
        assert_eq!(c.domain, normalize(&[(q("0"), q("1/4")), (q("1/2"), q("3/4"))]).unwrap());
        let ws: Vec<Window> = [16.0, 32.0].iter().map(|&t| Window::new(t).unwrap()).collect();
        let check = certificate_cross_check(&c, &ws).unwrap();
        assert!(check.applicable && check.consistent);
        // two cosets, three cells: W is 2x3 of rank 2, onto but not one-to-one
        let c = classify_system(q("4"), &omega, &s, &rs(&["0", "1"]), &[0, 1, 2], 0.25).unwrap();
        assert_eq!(c.class, SystemClass::RieszSequence);
        let check = certificate_cross_check(&c, &ws).unwrap();
        assert!(check.consistent);
        let c = classify_system(q("4"), &omega, &s, &rs(&["0", "1", "2"]), &[0, 1], 0.25).unwrap();
        assert_eq!(c.class, SystemClass::Frame);
        let wide = normalize(&[(q("0"), q("1/3"))]).unwrap();
        assert!(matches!(classify_system(q("4"), &omega, &wide, &rs(&["0"]), &[0], 0.25), Err(Error::DomainNotInFundamentalCell { .. })));
        let off = SpectrumSpec::cosets(&CosetFamily::lattice(q("2")).unwrap());
        assert!(matches!(classify_system(q("4"), &off, &s, &rs(&["0"]), &[0], 0.25), Err(Error::OmegaNotInLattice { .. })));
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde_det(&[], q("5")).unwrap(), C64::new(1.0, 0.0));
        let n = q("4");
        let xs = rs(&["0", "1"]);
        let m = CMat::from_fn(2, 2, |r, p| rational_phase(xs[r].checked_mul(Rational::integer(p as i64 + 1)).unwrap().checked_div(n).unwrap()));
        let v = vandermonde_det(&xs, n).unwrap();
        assert!(v.norm() > 0.5 && close(v, laplace_det(&m)));
    }

    #[test]
    fn chebotarev_small_cases() {
        let r = chebotarev_scan(2, false).unwrap();
        assert!((r.min_abs_det - 1.0).abs() < 1e-12 && r.all_nonzero);
        let r = chebotarev_scan(5, false).unwrap();
        assert!(r.all_nonzero);
        let r = chebotarev_scan(4, true).unwrap();
        assert!(r.min_abs_det <= ZERO_MINOR);
        assert_eq!((r.argmin_rows.clone(), r.argmin_cols.clone()), (vec![0, 2], vec![0, 2]));
        assert!(matches!(chebotarev_scan(4, false), Err(Error::NotPrime(4))));
        assert!(matches!(chebotarev_scan(17, false), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn pruned_scan_matches_exhaustive_scan() {
        // without pruning, every pair of equal-size subsets of Z_5
        let p = 5u64;
        let mut min = f64::INFINITY;
        for rows in 1u32..(1 << p) {
            for cols in 1u32..(1 << p) {
                if rows.count_ones() != cols.count_ones() {
                    continue;
                }
                let r: Vec<u64> = (0..p).filter(|i| rows >> i & 1 == 1).collect();
                let c: Vec<u64> = (0..p).filter(|i| cols >> i & 1 == 1).collect();
                let m = CMat::from_fn(r.len(), c.len(), |i, j| rational_phase(Rational::new(-((r[i] * c[j]) as i64), p as i64).unwrap()));
                min = min.min(laplace_det(&m).norm());
            }
        }
        assert!((chebotarev_scan(p, false).unwrap().min_abs_det - min).abs() < 1e-12);
    }

    fn offsets_strategy(max: usize) -> impl Strategy<Value = Vec<Rational>> {
        prop::collection::btree_set(0i64..70, 1..=max).prop_map(|s| s.into_iter().map(|x| Rational::new(x, 10).unwrap()).collect())
    }

    proptest! {
        #[test]
        fn vandermonde_closed_form_matches_cofactor_expansion(xs in offsets_strategy(5)) {
            let n = q("7");
            let m = CMat::from_fn(xs.len(), xs.len(), |r, p| {
                rational_phase(xs[r].checked_mul(Rational::integer(p as i64 + 1)).unwrap().checked_div(n).unwrap())
            });
            prop_assert!((vandermonde_det(&xs, n).unwrap() - laplace_det(&m)).norm() < 1e-10);
        }

        #[test]
        fn classification_is_permutation_invariant(xs in offsets_strategy(3), seed in 0u64..100) {
            let n = q("7");
            let cols: Vec<i64> = (0..7).filter(|c| (seed >> c) & 1 == 1).take(3).collect();
            prop_assume!(!cols.is_empty());
            let a = analyze(&build_wkl(n, &xs, &cols).unwrap(), 1.0).unwrap();
            let mut rx = xs.clone();
            rx.reverse();
            let mut rc = cols.clone();
            rc.rotate_left(1);
            let b = analyze(&build_wkl(n, &rx, &rc).unwrap(), 1.0).unwrap();
            prop_assert_eq!((a.injective, a.surjective, a.rank), (b.injective, b.surjective, b.rank));
            prop_assert!((a.sigma_min - b.sigma_min).abs() < 1e-10);
            let at = WklMatrix { entries: build_wkl(n, &xs, &cols).unwrap().entries.adjoint(), ..build_wkl(n, &xs, &cols).unwrap() };
            let c = analyze(&at, 1.0).unwrap();
            prop_assert!((c.sigma_min - a.sigma_min).abs() < 1e-10);
        }

        #[test]
        fn consecutive_columns_give_scaled_vandermonde(xs in offsets_strategy(4)) {
            let n = q("7");
            let k = xs.len();
            let cols: Vec<i64> = (0..k as i64).collect();
            let w = build_wkl(n, &xs, &cols).unwrap();
            let neg: Vec<Rational> = xs.iter().map(|&x| -x).collect();
            let d = linalg::det(&w.entries);
            prop_assert!((d.norm() - vandermonde_det(&neg, n).unwrap().norm()).abs() < 1e-10);
        }
    }
}
