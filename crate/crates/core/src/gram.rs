//! Gram matrices of truncated exponential systems, their extreme
//! eigenvalues, bound scans over nested windows, and completeness probes.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::IntervalUnion;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use crate::precise;
use crate::rational::Rational;
use crate::spectrum::{SpectrumSpec, Window};

/// Below this frequency the closed form loses accuracy to cancellation.
pub const SERIES_THRESHOLD: f64 = 1e-8;

/// `e^{2 pi i r}`, exact when `4r` is an integer.
pub fn unit_phase(r: f64) -> C64 {
    let f = r - r.floor();
    let four = 4.0 * f;
    if four == four.floor() {
        return match four as u8 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    let a = 2.0 * PI * f;
    C64::new(a.cos(), a.sin())
}

/// Fractional part of `omega * x`, computed as `(omega p mod q) / q` so that
/// integer frequencies against rational endpoints reduce exactly.
fn phase(omega: f64, x: Rational) -> f64 {
    let q = x.denom() as f64;
    (omega * x.numer() as f64).rem_euclid(q) / q
}

/// `∫_S e^{2 pi i omega t} dt` in closed form.
pub fn gram_entry(s: &IntervalUnion, omega: f64) -> C64 {
    if omega.abs() < SERIES_THRESHOLD {
        let mut acc = C64::new(0.0, 0.0);
        for &(lo, hi) in s.intervals() {
            let (a, b) = (lo.to_f64(), hi.to_f64());
            acc += C64::new((b - a) - (2.0 * PI * PI * omega * omega / 3.0) * (b * b * b - a * a * a), PI * omega * (b * b - a * a));
        }
        return acc;
    }
    let mut diff = C64::new(0.0, 0.0);
    let mut short = C64::new(0.0, 0.0);
    for &(lo, hi) in s.intervals() {
        let len = hi.to_f64() - lo.to_f64();
        if (omega * len).abs() < 0.5 {
            // e^{πiω(a+b)} sin(πω(b-a))/(πω): no cancellation for small ω(b-a)
            let x = PI * omega * len;
            short += unit_phase(omega * (lo.to_f64() + hi.to_f64()) / 2.0) * (len * x.sin() / x);
        } else {
            diff += unit_phase(phase(omega, hi)) - unit_phase(phase(omega, lo));
        }
    }
    short + diff / C64::new(0.0, 2.0 * PI * omega)
}

/// `G[i][j] = gram_entry(S, p_i - p_j)`. The upper triangle is computed and
/// mirrored, so the result is Hermitian bit for bit.
pub fn assemble_gram(points: &[f64], s: &IntervalUnion) -> Result<CMat> {
    let n = points.len();
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoints { a: w[0], b: w[1] });
    }
    let measure = s.measure()?.to_f64();
    let upper: Vec<Vec<C64>> = (0..n).into_par_iter().map(|i| (i + 1..n).map(|j| gram_entry(s, points[i] - points[j])).collect()).collect();
    let mut g = CMat::zeros(n, n);
    for i in 0..n {
        g[(i, i)] = C64::new(measure, 0.0);
        for (k, z) in upper[i].iter().enumerate() {
            let j = i + 1 + k;
            g[(i, j)] = *z;
            g[(j, i)] = z.conj();
        }
    }
    Ok(g)
}

pub fn extreme_eigs(g: &CMat) -> Result<(f64, f64)> {
    let (lo, hi) = linalg::extreme_eigs(g)?;
    debug_assert!({
        let (glo, ghi) = g.gershgorin();
        let pad = 1e-10 * (glo.abs().max(ghi.abs()) + 1.0);
        glo - pad <= lo && hi <= ghi + pad
    });
    Ok((lo, hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    RieszStable,
    Degenerating,
    Inconclusive,
}

/// Verdict thresholds. The defaults are empirical; reports always carry the
/// raw eigenvalue sequences next to the verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// `lambda_min` at the last window must exceed this for a stable verdict.
    pub stability_floor: f64,
    /// Largest relative drop of `lambda_min` over the last two windows still counted as a plateau.
    pub plateau_drop: f64,
    /// Largest per-doubling ratio `lambda_min(2T) / lambda_min(T)` counted as decay.
    pub decay_ratio: f64,
    /// `lambda_min <= collapse * lambda_max` counts as numerically collapsed.
    pub collapse: f64,
    /// Windows needed before a decay verdict is issued.
    pub min_decay_windows: usize,
    /// Refine `lambda_min` in extended precision below `refine_below * lambda_max`.
    pub refine_below: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { stability_floor: 1e-4, plateau_drop: 0.25, decay_ratio: 0.75, collapse: 1e-12, min_decay_windows: 3, refine_below: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramRow {
    pub window_t: f64,
    pub num_points: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub condition: f64,
    /// Whether `lambda_min` came from the extended-precision path.
    pub refined: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub rows: Vec<GramRow>,
    pub verdict: Verdict,
    pub config: ScanConfig,
}

impl GramReport {
    pub fn lambda_mins(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.lambda_min).collect()
    }

    pub fn last(&self) -> &GramRow {
        self.rows.last().expect("scan has at least one window")
    }

    /// CSV with columns `window_T, num_points, lambda_min, lambda_max, condition`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        wr.write_record(["window_T", "num_points", "lambda_min", "lambda_max", "condition"]).map_err(io)?;
        for r in &self.rows {
            wr.write_record([
                format!("{}", r.window_t),
                r.num_points.to_string(),
                format!("{:e}", r.lambda_min),
                format!("{:e}", r.lambda_max),
                format!("{:e}", r.condition),
            ])
            .map_err(io)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// `lambda_min` and `lambda_max` of one truncation, refining the lower end
/// in extended precision when double precision cannot resolve it.
pub fn truncation_bounds(points: &[f64], s: &IntervalUnion, refine_below: f64) -> Result<(f64, f64, bool)> {
    let g = assemble_gram(points, s)?;
    let (lo, hi) = extreme_eigs(&g)?;
    if lo < refine_below * hi {
        let lo = precise::gram_lambda_min(points, s)?;
        return Ok((lo, hi, true));
    }
    Ok((lo, hi, false))
}

fn decays(prev: &GramRow, next: &GramRow, cfg: &ScanConfig) -> bool {
    if next.lambda_min <= cfg.collapse * next.lambda_max {
        return true;
    }
    let doublings = (next.window_t / prev.window_t).log2();
    if !(doublings > 0.0) || !(prev.lambda_min > 0.0) {
        return false;
    }
    (next.lambda_min / prev.lambda_min).powf(1.0 / doublings) <= cfg.decay_ratio
}

pub fn classify_rows(rows: &[GramRow], cfg: &ScanConfig) -> Verdict {
    let Some(last) = rows.last() else {
        return Verdict::Inconclusive;
    };
    let plateau = match rows.len() {
        1 => true,
        n => {
            let prev = rows[n - 2].lambda_min;
            prev > 0.0 && (prev - last.lambda_min) / prev < cfg.plateau_drop
        }
    };
    if last.lambda_min > cfg.stability_floor && plateau {
        return Verdict::RieszStable;
    }
    if rows.len() >= cfg.min_decay_windows && rows.windows(2).all(|w| decays(&w[0], &w[1], cfg)) {
        return Verdict::Degenerating;
    }
    Verdict::Inconclusive
}

/// Extreme Gram eigenvalues over nested windows and the resulting verdict.
pub fn riesz_bound_scan(spec: &SpectrumSpec, s: &IntervalUnion, windows: &[Window], cfg: &ScanConfig) -> Result<GramReport> {
    if windows.is_empty() {
        return Err(Error::EmptyInput);
    }
    if windows.windows(2).any(|w| w[0].t() >= w[1].t()) {
        return Err(Error::InvalidInput("window schedule must be strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(windows.len());
    for &w in windows {
        let pts = spec.window(w)?;
        if pts.is_empty() {
            return Err(Error::InvalidInput(format!("no spectrum points in window T = {}", w.t())));
        }
        let (lo, hi, refined) = truncation_bounds(&pts, s, cfg.refine_below)?;
        rows.push(GramRow {
            window_t: w.t(),
            num_points: pts.len(),
            lambda_min: lo,
            lambda_max: hi,
            condition: if lo > 0.0 { hi / lo } else { f64::INFINITY },
            refined,
        });
    }
    let verdict = classify_rows(&rows, cfg);
    Ok(GramReport { rows, verdict, config: cfg.clone() })
}

/// Evidence class of a completeness probe trend. Never a proof.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompletenessEvidence {
    /// Stable positive floor: consistent with completeness.
    Stable,
    /// Strictly decreasing floor: evidence of incompleteness.
    Decaying,
    /// Floor at numerical zero: a function orthogonal to the whole window exists.
    Vanishing,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletenessProbe {
    pub window_t: f64,
    pub grid_h: Rational,
    pub num_points: usize,
    pub reference_dim: usize,
    pub sigma_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletenessTrend {
    pub probes: Vec<CompletenessProbe>,
    pub evidence: CompletenessEvidence,
}

pub const VANISHING_CEILING: f64 = 1e-6;
pub const STABLE_CHANGE: f64 = 0.05;
const REFERENCE_RANK_TOL: f64 = 1e-8;

/// Grid step `1 / (D 2^k)`, with `D` the common endpoint denominator, small
/// enough that `h <= 1 / (4T)`.
pub fn auto_grid(s: &IntervalUnion, w: Window) -> Result<Rational> {
    let mut d: i64 = 1;
    for &(lo, hi) in s.intervals() {
        d = num_integer::lcm(d, num_integer::lcm(lo.denom(), hi.denom()));
    }
    let mut h = Rational::new(1, d)?;
    let need = 1.0 / (4.0 * w.t());
    while h.to_f64() > need {
        h = h.checked_div(Rational::integer(2))?;
    }
    Ok(h)
}

/// Midpoint grid on `S` with step `h`; errors when `h` does not divide the
/// endpoints or exceeds `1/(4T)`.
fn grid_nodes(s: &IntervalUnion, h: Rational, w: Window) -> Result<Vec<f64>> {
    let coarse = || Error::GridTooCoarse { h: h.to_string(), required: format!("1/{}", 4.0 * w.t()) };
    if !h.is_positive() || h.to_f64() > 1.0 / (4.0 * w.t()) {
        return Err(coarse());
    }
    let mut nodes = Vec::new();
    for &(lo, hi) in s.intervals() {
        let count = hi.checked_sub(lo)?.checked_div(h)?;
        if !count.is_integer() || !lo.checked_div(h)?.is_integer() {
            return Err(Error::GridTooCoarse { h: h.to_string(), required: "a step dividing every endpoint".into() });
        }
        let (l, hf) = (lo.to_f64(), h.to_f64());
        nodes.extend((0..count.numer()).map(|k| l + (k as f64 + 0.5) * hf));
    }
    Ok(nodes)
}

/// Smallest singular value of the discretized analysis operator of the
/// windowed system, restricted to an orthonormal basis of low-frequency
/// reference functions on `S` (frequencies in `(1/L) Z ∩ [-T/4, T/4]`, with
/// `L` the hull length of `S`). A function in that reference space that is
/// nearly orthogonal to every windowed exponential drives the value to zero.
pub fn completeness_probe(spec: &SpectrumSpec, s: &IntervalUnion, w: Window, h: Rational) -> Result<CompletenessProbe> {
    let nodes = grid_nodes(s, h, w)?;
    let pts = spec.window(w)?;
    let (a, b) = s.hull().ok_or(Error::EmptyInput)?;
    let len = b.checked_sub(a)?.to_f64();
    let kmax = (w.t() / 4.0 * len).floor() as i64;
    let refs: Vec<f64> = (-kmax..=kmax).map(|k| k as f64 / len).collect();
    let sh = h.to_f64().sqrt();
    let r = CMat::from_fn(nodes.len(), refs.len(), |i, j| unit_phase(refs[j] * nodes[i]) * sh);
    let rsvd = linalg::svd_tall(&r)?;
    let smax = rsvd.sigma.first().copied().unwrap_or(0.0);
    let rank = rsvd.sigma.iter().filter(|&&x| x > REFERENCE_RANK_TOL * smax).count();
    let q = CMat::from_fn(nodes.len(), rank, |i, j| rsvd.u[(i, j)]);
    let analysis = CMat::from_fn(pts.len(), nodes.len(), |i, j| unit_phase(-pts[i] * nodes[j]) * sh);
    let aq = analysis.matmul(&q);
    let sigma_min = if aq.rows() < aq.cols() { 0.0 } else { linalg::svd_tall(&aq)?.sigma.last().copied().unwrap_or(0.0) };
    Ok(CompletenessProbe { window_t: w.t(), grid_h: h, num_points: pts.len(), reference_dim: rank, sigma_min })
}

pub fn classify_probes(probes: &[CompletenessProbe]) -> CompletenessEvidence {
    let Some(last) = probes.last() else {
        return CompletenessEvidence::Inconclusive;
    };
    if last.sigma_min <= VANISHING_CEILING {
        return CompletenessEvidence::Vanishing;
    }
    if probes.len() >= 2 {
        let prev = probes[probes.len() - 2].sigma_min;
        if ((last.sigma_min - prev) / prev).abs() < STABLE_CHANGE {
            return CompletenessEvidence::Stable;
        }
        if probes.windows(2).all(|w| w[1].sigma_min < w[0].sigma_min) {
            return CompletenessEvidence::Decaying;
        }
    }
    CompletenessEvidence::Inconclusive
}

/// Probes at every window, each on its automatic grid.
pub fn completeness_trend(spec: &SpectrumSpec, s: &IntervalUnion, windows: &[Window]) -> Result<CompletenessTrend> {
    let probes = windows.iter().map(|&w| completeness_probe(spec, s, w, auto_grid(s, w)?)).collect::<Result<Vec<_>>>()?;
    let evidence = classify_probes(&probes);
    Ok(CompletenessTrend { probes, evidence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::normalize;
    use crate::rational::q;
    use crate::spectrum::{CosetFamily, Perturbation, PerturbationRule, Progression};
    use proptest::prelude::*;

    fn iu(parts: &[(&str, &str)]) -> IntervalUnion {
        normalize(&parts.iter().map(|&(a, b)| (q(a), q(b))).collect::<Vec<_>>()).unwrap()
    }

    fn lattice(n: &str) -> SpectrumSpec {
        SpectrumSpec::cosets(&CosetFamily::lattice(q(n)).unwrap())
    }

    fn win(t: f64) -> Window {
        Window::new(t).unwrap()
    }

    /// Composite Gauss-Legendre (5 nodes) quadrature of `e^{2 pi i omega t}` over `S`.
    fn quadrature(s: &IntervalUnion, omega: f64) -> C64 {
        const X: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
        const W: [f64; 5] =
            [0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1, 0.236_926_885_056_189_1];
        let mut acc = C64::new(0.0, 0.0);
        for &(lo, hi) in s.intervals() {
            let (a, b) = (lo.to_f64(), hi.to_f64());
            let panels = ((b - a) * (omega.abs() + 1.0) * 8.0).ceil() as usize;
            let hw = (b - a) / panels as f64 / 2.0;
            for p in 0..panels {
                let mid = a + (2 * p + 1) as f64 * hw;
                for (x, wt) in X.iter().zip(W) {
                    let t = mid + x * hw;
                    let ang = 2.0 * PI * omega * t;
                    acc += C64::new(ang.cos(), ang.sin()) * wt * hw;
                }
            }
        }
        acc
    }

    #[test]
    fn entry_examples() {
        let unit = iu(&[("0", "1")]);
        assert_eq!(gram_entry(&unit, 0.0), C64::new(1.0, 0.0));
        for k in [-3.0, 1.0, 5.0] {
            assert_eq!(gram_entry(&unit, k), C64::new(0.0, 0.0));
        }
        let two = iu(&[("0", "1/4"), ("1/2", "3/4")]);
        assert!(gram_entry(&two, -1.0).norm() < 1e-15);
        assert!(quadrature(&two, -1.0).norm() < 1e-12);
    }

    #[test]
    fn series_branch_is_continuous() {
        let s = iu(&[("1/3", "1"), ("-2", "-1/5")]);
        for omega in [0.9e-8, 1.1e-8, -0.9e-8, -1.1e-8] {
            assert!((gram_entry(&s, omega) - quadrature(&s, omega)).norm() < 1e-12);
        }
    }

    #[test]
    fn assembly_examples() {
        let g = assemble_gram(&lattice("4").window(win(9.0)).unwrap(), &iu(&[("0", "1/4")])).unwrap();
        assert_eq!(g.rows(), 5);
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 0.25 } else { 0.0 };
                assert!((g[(i, j)] - C64::new(want, 0.0)).norm() < 1e-15);
            }
        }
        let g = assemble_gram(&[0.0, 1.0], &iu(&[("0", "1/4"), ("1/2", "3/4")])).unwrap();
        assert!((g[(0, 1)]).norm() < 1e-15 && (g[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!(quadrature(&iu(&[("0", "1/4"), ("1/2", "3/4")]), -1.0).norm() < 1e-12);
        assert!(matches!(assemble_gram(&[1.0, 1.0], &iu(&[("0", "1")])), Err(Error::DuplicatePoints { .. })));
    }

    #[test]
    fn rescaled_lattice_gives_scaled_identity() {
        // c Z + b on an interval of length 1/c
        let spec = SpectrumSpec::progression(q("3"), q("1/2")).unwrap();
        let g = assemble_gram(&spec.window(win(20.0)).unwrap(), &iu(&[("1/7", "10/21")])).unwrap();
        for i in 0..g.rows() {
            for j in 0..g.rows() {
                let want = if i == j { 1.0 / 3.0 } else { 0.0 };
                assert!((g[(i, j)] - C64::new(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn collapsed_system_on_two_cells() {
        let s = iu(&[("0", "1/4"), ("1/2", "3/4")]);
        let pts: Vec<f64> = (-16..16).map(|n| 2.0 * n as f64).collect();
        let g = assemble_gram(&pts, &s).unwrap();
        let (lo, _) = extreme_eigs(&g).unwrap();
        assert!(lo < 1e-2);
    }

    #[test]
    fn scans() {
        let unit = iu(&[("0", "1")]);
        let ws = [win(16.0), win(32.0), win(64.0)];
        let r = riesz_bound_scan(&lattice("1"), &unit, &ws, &ScanConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::RieszStable);
        assert!(r.rows.iter().all(|x| (x.lambda_min - 1.0).abs() < 1e-12 && (x.lambda_max - 1.0).abs() < 1e-12));
        let kadec = SpectrumSpec::default()
            .with_progression(Progression {
                period: q("1"),
                offset: q("0"),
                perturbation: Some(Perturbation::new(PerturbationRule::Sinusoidal { amp: 0.2, rate: 7.0 })),
            })
            .unwrap();
        let r = riesz_bound_scan(&kadec, &unit, &[win(32.0), win(64.0), win(128.0)], &ScanConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::RieszStable);
        assert!(r.last().lambda_min >= 0.01);
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("window_T,num_points,lambda_min,lambda_max,condition\n"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn verdict_rules() {
        let cfg = ScanConfig::default();
        let row = |t: f64, lo: f64| GramRow { window_t: t, num_points: 0, lambda_min: lo, lambda_max: 1.0, condition: 1.0 / lo, refined: false };
        assert_eq!(classify_rows(&[row(16.0, 0.5), row(32.0, 0.45)], &cfg), Verdict::RieszStable);
        assert_eq!(classify_rows(&[row(16.0, 0.1), row(32.0, 0.06), row(64.0, 0.04)], &cfg), Verdict::Degenerating);
        assert_eq!(classify_rows(&[row(16.0, 0.1), row(32.0, 0.06)], &cfg), Verdict::Inconclusive);
        assert_eq!(classify_rows(&[row(16.0, 1e-13), row(32.0, 1e-14), row(64.0, 1e-15)], &cfg), Verdict::Degenerating);
        assert_eq!(classify_rows(&[row(16.0, 1e-5), row(32.0, 1e-5), row(64.0, 1e-5)], &cfg), Verdict::Inconclusive);
    }

    #[test]
    fn probes() {
        let unit = iu(&[("0", "1")]);
        let p = completeness_probe(&lattice("1"), &unit, win(16.0), q("1/512")).unwrap();
        assert!((p.sigma_min - 1.0).abs() < 0.05);
        for t in [8.0, 16.0] {
            let p = completeness_probe(&lattice("2"), &unit, win(t), auto_grid(&unit, win(t)).unwrap()).unwrap();
            assert!(p.sigma_min <= VANISHING_CEILING);
        }
        assert!(matches!(completeness_probe(&lattice("1"), &unit, win(16.0), q("1/8")), Err(Error::GridTooCoarse { .. })));
        assert!(matches!(completeness_probe(&lattice("1"), &iu(&[("0", "1/3")]), win(16.0), q("1/128")), Err(Error::GridTooCoarse { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn entry_matches_quadrature(
            a in -20i64..20, len in 1i64..12, d in 1i64..9, gap in 1i64..5, len2 in 1i64..6,
            omega in -12.0f64..12.0,
        ) {
            let lo = Rational::new(a, d).unwrap();
            let hi = Rational::new(a + len, d).unwrap();
            let lo2 = Rational::new(a + len + gap, d).unwrap();
            let hi2 = Rational::new(a + len + gap + len2, d).unwrap();
            let s = normalize(&[(lo, hi), (lo2, hi2)]).unwrap();
            prop_assert!((gram_entry(&s, omega) - quadrature(&s, omega)).norm() < 1e-10);
        }

        #[test]
        fn gram_is_hermitian_and_gershgorin_bounded(seed in 0u64..500, t in 4.0f64..20.0) {
            let spec = SpectrumSpec::default().with_progression(Progression {
                period: q("1"), offset: q("0"),
                perturbation: Some(Perturbation::new(PerturbationRule::SeededUniform { amp: 0.3, seed })),
            }).unwrap();
            let s = iu(&[("0", "1/3"), ("1/2", "4/5")]);
            let g = assemble_gram(&spec.window(win(t)).unwrap(), &s).unwrap();
            prop_assert!(g.is_exactly_hermitian());
            let (lo, hi) = extreme_eigs(&g).unwrap();
            let (glo, ghi) = g.gershgorin();
            prop_assert!(glo <= lo + 1e-12 && hi <= ghi + 1e-12 && lo >= -1e-12);
        }

        #[test]
        fn nested_windows_interlace(seed in 0u64..500, t in 3.0f64..12.0) {
            let spec = SpectrumSpec::default().with_progression(Progression {
                period: q("1"), offset: q("0"),
                perturbation: Some(Perturbation::new(PerturbationRule::SeededUniform { amp: 0.2, seed })),
            }).unwrap();
            let s = iu(&[("0", "1")]);
            let (a, b) = extreme_eigs(&assemble_gram(&spec.window(win(t)).unwrap(), &s).unwrap()).unwrap();
            let (c, d) = extreme_eigs(&assemble_gram(&spec.window(win(2.0 * t)).unwrap(), &s).unwrap()).unwrap();
            prop_assert!(c <= a + 1e-12 && d >= b - 1e-12);
        }
    }
}
