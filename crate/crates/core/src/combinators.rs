//! Gated combination of exponential systems. Every hypothesis of the
//! invoked statement becomes a named check in a [`HypothesisLedger`]; a
//! [`CombinedSystem`] exists only when all of them pass, and carries a
//! numerical counter-check of its claim.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{self, IntervalUnion};
use crate::error::{Error, HypothesisFailure, Result};
use crate::gram::{self, CompletenessTrend, GramReport, ScanConfig};
use crate::pw::{self, Multiplier, MultiplierFloor};
use crate::rational::Rational;
use crate::spectrum::{self, CosetFamily, FamilyRelation, SpectrumSpec, Window};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum HypothesisViolation {
    ZeroShift,
    DuplicateOffsets { offsets: String },
    NotDisjoint { witness: String },
    ShiftInclusionViolation { witness: String },
    CosetInclusionViolation { k: i64, witness: String },
    LatticeViolation { witness: f64 },
    FamilyViolation { witness: f64 },
    LatticeIntersection { witness: f64 },
    FamilyIntersection { witness: f64 },
    DistanceNotPositive { distance: f64, witness: Option<f64>, floor: f64 },
    NestingViolation { m: usize, witness: String },
    NotPrimeForPermutation { n: u64, reason: String },
    NotALatticeSubset { m: usize, witness: f64 },
    InvalidPermutation { reason: String },
    DomainNotInFundamentalCell { m: usize, witness: String },
    DomainNotInUnitInterval { witness: String },
}

impl fmt::Display for HypothesisViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use HypothesisViolation::*;
        match self {
            ZeroShift => write!(f, "ZeroShift: the shift a must be nonzero"),
            DuplicateOffsets { offsets } => write!(f, "DuplicateOffsets: {offsets}"),
            NotDisjoint { witness } => write!(f, "NotDisjoint: S1 and S2 share {witness}"),
            ShiftInclusionViolation { witness } => write!(f, "ShiftInclusionViolation: {witness} in S1 + a lies outside S2"),
            CosetInclusionViolation { k, witness } => {
                write!(f, "CosetInclusionViolation: k = {k}, {witness} in S1 + k/N lies outside S2")
            }
            LatticeViolation { witness } => write!(f, "LatticeViolation: {witness} in Lambda2 is not in (1/a)Z"),
            FamilyViolation { witness } => write!(f, "FamilyViolation: {witness} in Lambda2 is outside the coset family"),
            LatticeIntersection { witness } => write!(f, "LatticeIntersection: {witness} in Lambda1 lies in (1/a)Z"),
            FamilyIntersection { witness } => write!(f, "FamilyIntersection: {witness} in Lambda1 lies in the coset family"),
            DistanceNotPositive { distance, witness, floor } => match witness {
                Some(w) => write!(f, "DistanceNotPositive: distance {distance:e} at {w} is not above {floor:e}"),
                None => write!(f, "DistanceNotPositive: distance {distance:e} is not above {floor:e}"),
            },
            NestingViolation { m, witness } => write!(f, "NestingViolation: {witness} in S_{} is not in S_{m}", m + 1),
            NotPrimeForPermutation { n, reason } => write!(f, "NotPrimeForPermutation: N = {n}: {reason}"),
            NotALatticeSubset { m, witness } => write!(f, "NotALatticeSubset: {witness} in Lambda_{m} is not in NZ"),
            InvalidPermutation { reason } => write!(f, "InvalidPermutation: {reason}"),
            DomainNotInFundamentalCell { m, witness } => {
                write!(f, "DomainNotInFundamentalCell: {witness} in S_{m} lies outside [0, 1/N)")
            }
            DomainNotInUnitInterval { witness } => write!(f, "DomainNotInUnitInterval: {witness} lies outside [0, 1)"),
        }
    }
}

/// How a check was decided.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckBasis {
    Exact,
    WindowScan,
    /// Taken from the caller, not verified.
    Trusted,
    /// Evaluated but not enforced (exploratory runs).
    Waived,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    pub basis: CheckBasis,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct HypothesisLedger {
    pub statement: String,
    pub checks: Vec<HypothesisCheck>,
    #[serde(skip)]
    first_failure: Option<HypothesisViolation>,
}

impl HypothesisLedger {
    pub fn new(statement: impl Into<String>) -> Self {
        HypothesisLedger { statement: statement.into(), ..Default::default() }
    }

    fn pass(&mut self, name: &str, basis: CheckBasis, detail: impl Into<String>) {
        self.checks.push(HypothesisCheck { name: name.into(), passed: true, basis, detail: detail.into() });
    }

    fn fail(&mut self, name: &str, basis: CheckBasis, v: HypothesisViolation) {
        self.checks.push(HypothesisCheck { name: name.into(), passed: false, basis, detail: v.to_string() });
        self.first_failure.get_or_insert(v);
    }

    fn record(&mut self, name: &str, basis: CheckBasis, outcome: std::result::Result<String, HypothesisViolation>) {
        match outcome {
            Ok(d) => self.pass(name, basis, d),
            Err(v) => self.fail(name, basis, v),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Turns the first recorded failure into an error carrying the ledger.
    fn gate(self) -> Result<Self> {
        match self.first_failure.clone() {
            None => Ok(self),
            Some(violation) => Err(Error::Hypothesis(Box::new(HypothesisFailure { violation, ledger: self }))),
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.statement);
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            out.push_str(&format!("  [{mark}] {:<24} ({:?}) {}\n", c.name, c.basis, c.detail));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Property {
    RieszBasis,
    Complete,
    RieszSequence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CounterCheck {
    Gram(GramReport),
    Completeness(CompletenessTrend),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinedSystem {
    pub spectrum: SpectrumSpec,
    pub domain: IntervalUnion,
    pub claimed_property: Property,
    pub ledger: HypothesisLedger,
    pub statement_tag: String,
    pub counter_check: Option<CounterCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombineOptions {
    pub schedule: Vec<f64>,
    /// Smallest accepted lower bound for `dist(Λ1, zero set)`.
    pub distance_floor: f64,
    /// Records the distance check without enforcing it.
    pub exploratory: bool,
    /// Window half-width for membership scans of non-lattice spectra.
    pub scan_window: f64,
    pub counter_check: bool,
    pub scan: ScanConfig,
}

impl Default for CombineOptions {
    fn default() -> Self {
        CombineOptions {
            schedule: vec![16.0, 32.0, 64.0, 128.0],
            distance_floor: 1e-6,
            exploratory: false,
            scan_window: 64.0,
            counter_check: true,
            scan: ScanConfig::default(),
        }
    }
}

impl CombineOptions {
    pub fn windows(&self) -> Result<Vec<Window>> {
        self.schedule.iter().map(|&t| Window::new(t)).collect()
    }
}

fn basis_of(rel: &FamilyRelation) -> CheckBasis {
    if rel.structural {
        CheckBasis::Exact
    } else {
        CheckBasis::WindowScan
    }
}

fn check_disjoint(ledger: &mut HypothesisLedger, s1: &IntervalUnion, s2: &IntervalUnion) {
    let common = s1.intersect(s2);
    let outcome = match common.intervals().first() {
        None => Ok("S1 ∩ S2 = ∅".to_string()),
        Some(&(lo, _)) => Err(HypothesisViolation::NotDisjoint { witness: lo.to_string() }),
    };
    ledger.record("disjoint", CheckBasis::Exact, outcome);
}

/// Records `Λ2 ⊆ family` and `Λ1 ∩ family = ∅` with positive distance.
#[allow(clippy::too_many_arguments)]
fn check_spectra(
    ledger: &mut HypothesisLedger,
    lambda1: &SpectrumSpec,
    lambda2: &SpectrumSpec,
    family: &CosetFamily,
    lattice: bool,
    opts: &CombineOptions,
    require_distance: bool,
) -> Result<f64> {
    let scan = Window::new(opts.scan_window)?;
    let rel2 = spectrum::family_relation(lambda2, family, scan)?;
    let (name, outcome) = match (lattice, rel2.outside_witness) {
        (true, Some(w)) => ("lambda2_in_lattice", Err(HypothesisViolation::LatticeViolation { witness: w })),
        (false, Some(w)) => ("lambda2_in_family", Err(HypothesisViolation::FamilyViolation { witness: w })),
        (true, None) => ("lambda2_in_lattice", Ok(format!("Lambda2 ⊆ {}Z", family.period()))),
        (false, None) => ("lambda2_in_family", Ok("Lambda2 ⊆ ∪_k (NZ + c_k)".to_string())),
    };
    ledger.record(name, basis_of(&rel2), outcome);

    let rel1 = spectrum::family_relation(lambda1, family, scan)?;
    let (name, outcome) = match (lattice, rel1.inside_witness) {
        (true, Some(w)) => ("lambda1_avoids_lattice", Err(HypothesisViolation::LatticeIntersection { witness: w })),
        (false, Some(w)) => ("lambda1_avoids_family", Err(HypothesisViolation::FamilyIntersection { witness: w })),
        (true, None) => ("lambda1_avoids_lattice", Ok("Lambda1 ∩ (1/a)Z = ∅".to_string())),
        (false, None) => ("lambda1_avoids_family", Ok("Lambda1 ∩ ∪_k (NZ + c_k) = ∅".to_string())),
    };
    ledger.record(name, basis_of(&rel1), outcome);

    let distance = rel1.dist_outside;
    if require_distance {
        let ok = distance > opts.distance_floor;
        let detail = match rel1.closest_outside {
            Some(x) => format!("dist(Lambda1, zero set) = {distance:e}, attained at {x}"),
            None => format!("dist(Lambda1, zero set) = {distance:e}"),
        };
        if opts.exploratory {
            ledger.checks.push(HypothesisCheck { name: "distance_positive".into(), passed: true, basis: CheckBasis::Waived, detail });
        } else if ok {
            ledger.pass("distance_positive", basis_of(&rel1), detail);
        } else {
            ledger.fail(
                "distance_positive",
                basis_of(&rel1),
                HypothesisViolation::DistanceNotPositive { distance, witness: rel1.closest_outside, floor: opts.distance_floor },
            );
        }
    }
    Ok(distance)
}

fn trust_inputs(ledger: &mut HypothesisLedger, property: Property, lambda1: &SpectrumSpec, lambda2: &SpectrumSpec) {
    for (name, spec) in [("input_system_1", lambda1), ("input_system_2", lambda2)] {
        let source = if spec.provenance().is_empty() { "asserted by caller".to_string() } else { spec.provenance().join("; ") };
        ledger.pass(name, CheckBasis::Trusted, format!("{property:?}: {source}"));
    }
}

fn counter_check(spec: &SpectrumSpec, dom: &IntervalUnion, property: Property, opts: &CombineOptions) -> Result<Option<CounterCheck>> {
    if !opts.counter_check {
        return Ok(None);
    }
    let ws = opts.windows()?;
    Ok(Some(match property {
        Property::Complete => CounterCheck::Completeness(gram::completeness_trend(spec, dom, &ws)?),
        _ => CounterCheck::Gram(gram::riesz_bound_scan(spec, dom, &ws, &opts.scan)?),
    }))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    ledger: HypothesisLedger,
    lambda1: &SpectrumSpec,
    lambda2: &SpectrumSpec,
    s1: &IntervalUnion,
    s2: &IntervalUnion,
    property: Property,
    tag: &str,
    opts: &CombineOptions,
) -> Result<CombinedSystem> {
    let ledger = ledger.gate()?;
    let spectrum = lambda1.union(lambda2)?;
    let domain = s1.union(s2);
    let counter_check = counter_check(&spectrum, &domain, property, opts)?;
    Ok(CombinedSystem { spectrum, domain, claimed_property: property, ledger, statement_tag: tag.into(), counter_check })
}

pub const SHIFT_TAG: &str = "union of two systems, S1 + a ⊆ S2, Lambda2 ⊆ (1/a)Z";
pub const COSET_TAG: &str = "union of two systems, S1 + k/N ⊆ S2 for k = 1..K, Lambda2 in K cosets of NZ";
pub const MULTI_TAG: &str = "nested domains S_M ⊆ ... ⊆ S_1 ⊆ [0, 1/N), permuted cells and shifts";

/// `E(Λ1 ∪ Λ2)` on `S1 ∪ S2` from `S1 + a ⊆ S2`, `Λ2 ⊆ (1/a)Z` and
/// `dist(Λ1, (1/a)Z) > 0`.
pub fn combine_shift(
    s1: &IntervalUnion,
    lambda1: &SpectrumSpec,
    s2: &IntervalUnion,
    lambda2: &SpectrumSpec,
    a: Rational,
    property: Property,
    opts: &CombineOptions,
) -> Result<CombinedSystem> {
    let mut ledger = HypothesisLedger::new(SHIFT_TAG);
    if a.is_zero() {
        ledger.fail("shift_nonzero", CheckBasis::Exact, HypothesisViolation::ZeroShift);
        return Err(ledger.gate().unwrap_err());
    }
    ledger.pass("shift_nonzero", CheckBasis::Exact, format!("a = {a}"));
    check_disjoint(&mut ledger, s1, s2);
    let shifted = s1.translate(a)?;
    let outcome = match shifted.first_point_outside(s2) {
        None => Ok(format!("S1 + {a} ⊆ S2")),
        Some(x) => Err(HypothesisViolation::ShiftInclusionViolation { witness: x.to_string() }),
    };
    ledger.record("shift_inclusion", CheckBasis::Exact, outcome);
    let lattice = CosetFamily::lattice(Rational::ONE.checked_div(a.abs())?)?;
    check_spectra(&mut ledger, lambda1, lambda2, &lattice, true, opts, true)?;
    trust_inputs(&mut ledger, property, lambda1, lambda2);
    finish(ledger, lambda1, lambda2, s1, s2, property, SHIFT_TAG, opts)
}

fn coset_parameters(ledger: &mut HypothesisLedger, n: Rational, offsets: &[Rational]) -> Result<Option<CosetFamily>> {
    match CosetFamily::new(n, offsets.to_vec()) {
        Ok(f) => {
            ledger.pass("offsets_distinct", CheckBasis::Exact, format!("{} distinct offsets in [0, {n})", offsets.len()));
            Ok(Some(f))
        }
        Err(Error::DuplicateOffsets(s)) => {
            ledger.fail("offsets_distinct", CheckBasis::Exact, HypothesisViolation::DuplicateOffsets { offsets: s });
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// `E(Λ1 ∪ Λ2)` on `S1 ∪ S2` from `S1 + k/N ⊆ S2` (`k = 1..K`),
/// `Λ2 ⊆ ∪_k (NZ + c_k)` and `dist(Λ1, ∪_k (NZ + c_k)) > 0`.
#[allow(clippy::too_many_arguments)]
pub fn combine_cosets(
    s1: &IntervalUnion,
    lambda1: &SpectrumSpec,
    s2: &IntervalUnion,
    lambda2: &SpectrumSpec,
    n: Rational,
    offsets: &[Rational],
    property: Property,
    opts: &CombineOptions,
) -> Result<CombinedSystem> {
    let mut ledger = HypothesisLedger::new(COSET_TAG);
    let Some(family) = coset_parameters(&mut ledger, n, offsets)? else {
        return Err(ledger.gate().unwrap_err());
    };
    check_disjoint(&mut ledger, s1, s2);
    check_coset_inclusions(&mut ledger, s1, s2, n, offsets.len())?;
    check_spectra(&mut ledger, lambda1, lambda2, &family, false, opts, true)?;
    trust_inputs(&mut ledger, property, lambda1, lambda2);
    finish(ledger, lambda1, lambda2, s1, s2, property, COSET_TAG, opts)
}

fn check_coset_inclusions(ledger: &mut HypothesisLedger, s1: &IntervalUnion, s2: &IntervalUnion, n: Rational, k: usize) -> Result<()> {
    let mut first = None;
    for j in 1..=k as i64 {
        let shifted = s1.translate(Rational::integer(j).checked_div(n)?)?;
        if let Some(x) = shifted.first_point_outside(s2) {
            first = Some(HypothesisViolation::CosetInclusionViolation { k: j, witness: x.to_string() });
            break;
        }
    }
    let outcome = match first {
        None => Ok(format!("S1 + k/{n} ⊆ S2 for k = 1..{k}")),
        Some(v) => Err(v),
    };
    ledger.record("coset_inclusions", CheckBasis::Exact, outcome);
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ConverseMode {
    Shift { a: Rational },
    Cosets { n: Rational, offsets: Vec<Rational> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConverseReport {
    pub ledger: HypothesisLedger,
    pub multiplier: Multiplier,
    /// `max |m(λ2)|` over the scan window; zero up to rounding.
    pub max_on_lambda2: f64,
    pub floor_on_lambda1: MultiplierFloor,
    pub probe: CompletenessTrend,
    /// Proof steps that are cited rather than computed.
    pub non_numerical_steps: Vec<String>,
}

/// Evidence that `E(Λ1)` is complete on `S1`, given that `E(Λ1 ∪ Λ2)` is
/// complete on `S1 ∪ S2` (trusted).
pub fn converse_check(
    s1: &IntervalUnion,
    s2: &IntervalUnion,
    lambda1: &SpectrumSpec,
    lambda2: &SpectrumSpec,
    mode: &ConverseMode,
    opts: &CombineOptions,
) -> Result<ConverseReport> {
    let mut ledger;
    let multiplier = match mode {
        ConverseMode::Shift { a } => {
            ledger = HypothesisLedger::new("completeness passes from the union to Lambda1 (shift by a)");
            if a.is_zero() {
                ledger.fail("shift_nonzero", CheckBasis::Exact, HypothesisViolation::ZeroShift);
                return Err(ledger.gate().unwrap_err());
            }
            ledger.pass("shift_nonzero", CheckBasis::Exact, format!("a = {a}"));
            check_disjoint(&mut ledger, s1, s2);
            let outcome = match s1.translate(*a)?.first_point_outside(s2) {
                None => Ok(format!("S1 + {a} ⊆ S2")),
                Some(x) => Err(HypothesisViolation::ShiftInclusionViolation { witness: x.to_string() }),
            };
            ledger.record("shift_inclusion", CheckBasis::Exact, outcome);
            Multiplier::shift(*a)?
        }
        ConverseMode::Cosets { n, offsets } => {
            ledger = HypothesisLedger::new("completeness passes from the union to Lambda1 (coset family)");
            if coset_parameters(&mut ledger, *n, offsets)?.is_none() {
                return Err(ledger.gate().unwrap_err());
            }
            check_disjoint(&mut ledger, s1, s2);
            check_coset_inclusions(&mut ledger, s1, s2, *n, offsets.len())?;
            Multiplier::cosets(*n, offsets.clone())?
        }
    };
    let family = multiplier.zero_family()?;
    let lattice = matches!(mode, ConverseMode::Shift { .. });
    check_spectra(&mut ledger, lambda1, lambda2, &family, lattice, opts, false)?;
    ledger.pass("union_complete", CheckBasis::Trusted, "E(Lambda1 ∪ Lambda2) complete on S1 ∪ S2: asserted by caller");
    let ledger = ledger.gate()?;
    let scan = Window::new(opts.scan_window)?;
    let max_on_lambda2 = lambda2.window(scan)?.iter().map(|&x| multiplier.eval(x).norm()).fold(0.0, f64::max);
    let floor_on_lambda1 = pw::multiplier_floor(&multiplier, lambda1, scan)?;
    let probe = gram::completeness_trend(lambda1, s1, &opts.windows()?)?;
    Ok(ConverseReport {
        ledger,
        multiplier,
        max_on_lambda2,
        floor_on_lambda1,
        probe,
        non_numerical_steps: vec![
            "m f vanishes on Lambda1 ∪ Lambda2, so m f = 0 by completeness of the union".into(),
            "f = 0 off the discrete zero set of m, hence f = 0 (uniqueness of analytic continuation)".into(),
        ],
    })
}

/// `A_{>=n} = {t ∈ [0, 1/N) : t + k/N ∈ S for at least n values of k}`,
/// for `n = 1..N`, by an exact sweep over the folded translates.
pub fn a_ge_n(s: &IntervalUnion, n: u64) -> Result<Vec<IntervalUnion>> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    let unit = IntervalUnion::interval(Rational::ZERO, Rational::ONE)?;
    if let Some(x) = s.first_point_outside(&unit) {
        let mut ledger = HypothesisLedger::new("layer decomposition of S ⊆ [0, 1)");
        ledger.fail("domain_in_unit_interval", CheckBasis::Exact, HypothesisViolation::DomainNotInUnitInterval { witness: x.to_string() });
        return Err(ledger.gate().unwrap_err());
    }
    let nr = Rational::integer(n as i64);
    let mut folded = Vec::with_capacity(n as usize);
    for k in 0..n as i64 {
        let cell = IntervalUnion::interval(Rational::integer(k).checked_div(nr)?, Rational::integer(k + 1).checked_div(nr)?)?;
        folded.push(s.intersect(&cell).translate(Rational::integer(-k).checked_div(nr)?)?);
    }
    let mut cuts: Vec<Rational> = vec![Rational::ZERO, Rational::ONE.checked_div(nr)?];
    for f in &folded {
        for &(lo, hi) in f.intervals() {
            cuts.push(lo);
            cuts.push(hi);
        }
    }
    cuts.sort();
    cuts.dedup();
    let mut layers: Vec<Vec<(Rational, Rational)>> = vec![Vec::new(); n as usize];
    for w in cuts.windows(2) {
        let mid = w[0].checked_add(w[1])?.checked_div(Rational::integer(2))?;
        let count = folded.iter().filter(|f| f.contains_rational(mid)).count();
        for layer in layers.iter_mut().take(count) {
            layer.push((w[0], w[1]));
        }
    }
    layers.into_iter().map(|l| if l.is_empty() { Ok(IntervalUnion::empty()) } else { domain::normalize(&l) }).collect()
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d: &u64| d * d <= n).all(|d| n % d != 0)
}

fn check_permutation(p: &[u64], n: u64, m: usize, what: &str) -> std::result::Result<(), HypothesisViolation> {
    if p.len() != m && p.len() != n as usize {
        return Err(HypothesisViolation::InvalidPermutation { reason: format!("{what} has length {}, expected {m} or {n}", p.len()) });
    }
    for (i, &x) in p.iter().enumerate() {
        if x == 0 || x > n || p[..i].contains(&x) {
            return Err(HypothesisViolation::InvalidPermutation { reason: format!("{what} entry {x} is not a distinct value in 1..={n}") });
        }
    }
    Ok(())
}

/// `E(∪_{m∈J} (Λ_m + k_m))` on `∪_{m∈J} (S_m + (ℓ_m - 1)/N)`.
///
/// Without `prime_mode` the shifts must be `k_m = m` and `J` is everything;
/// with it `N` must be prime and any permutation and subset are accepted.
#[allow(clippy::too_many_arguments)]
pub fn multi_combine(
    n: u64,
    domains: &[IntervalUnion],
    spectra: &[SpectrumSpec],
    k: &[u64],
    l: &[u64],
    prime_mode: bool,
    subset: Option<&[usize]>,
    opts: &CombineOptions,
) -> Result<CombinedSystem> {
    let m = domains.len();
    if m == 0 {
        return Err(Error::EmptyInput);
    }
    if spectra.len() != m {
        return Err(Error::SizeMismatch { left: m, right: spectra.len() });
    }
    if m as u64 > n {
        return Err(Error::InvalidInput(format!("M = {m} exceeds N = {n}")));
    }
    let nr = Rational::integer(n as i64);
    let mut ledger = HypothesisLedger::new(MULTI_TAG);
    let perm = check_permutation(k, n, m, "k").and_then(|_| check_permutation(l, n, m, "l"));
    ledger.record("permutations", CheckBasis::Exact, perm.map(|_| "k and l are injective into 1..=N".to_string()));

    let mode = if prime_mode {
        if is_prime(n) {
            Ok(format!("N = {n} is prime"))
        } else {
            Err(HypothesisViolation::NotPrimeForPermutation { n, reason: "arbitrary shifts need prime N".into() })
        }
    } else if let Some(i) = (0..m.min(k.len())).find(|&i| k[i] != i as u64 + 1) {
        Err(HypothesisViolation::NotPrimeForPermutation { n, reason: format!("k_{} = {} needs prime mode", i + 1, k[i]) })
    } else if subset.is_some() {
        Err(HypothesisViolation::NotPrimeForPermutation { n, reason: "sub-unions need prime mode".into() })
    } else {
        Ok("k_m = m".to_string())
    };
    ledger.record("shift_rule", CheckBasis::Exact, mode);

    let cell = IntervalUnion::interval(Rational::ZERO, Rational::ONE.checked_div(nr)?)?;
    let outside = domains.iter().enumerate().find_map(|(i, s)| s.first_point_outside(&cell).map(|x| (i, x)));
    ledger.record(
        "domains_in_cell",
        CheckBasis::Exact,
        match outside {
            None => Ok(format!("every S_m ⊆ [0, 1/{n})")),
            Some((i, x)) => Err(HypothesisViolation::DomainNotInFundamentalCell { m: i + 1, witness: x.to_string() }),
        },
    );
    let nest = (1..m).find_map(|i| domains[i].first_point_outside(&domains[i - 1]).map(|x| (i, x)));
    ledger.record(
        "nesting",
        CheckBasis::Exact,
        match nest {
            None => Ok("S_M ⊆ ... ⊆ S_1".to_string()),
            Some((i, x)) => Err(HypothesisViolation::NestingViolation { m: i, witness: x.to_string() }),
        },
    );
    let lattice = CosetFamily::lattice(nr)?;
    let scan = Window::new(opts.scan_window)?;
    let mut lattice_outcome = Ok(format!("every Lambda_m ⊆ {n}Z"));
    let mut basis = CheckBasis::Exact;
    for (i, spec) in spectra.iter().enumerate() {
        let rel = spectrum::family_relation(spec, &lattice, scan)?;
        if !rel.structural {
            basis = CheckBasis::WindowScan;
        }
        if let Some(w) = rel.outside_witness {
            lattice_outcome = Err(HypothesisViolation::NotALatticeSubset { m: i + 1, witness: w });
            break;
        }
    }
    ledger.record("spectra_in_lattice", basis, lattice_outcome);
    for (i, spec) in spectra.iter().enumerate() {
        let source = if spec.provenance().is_empty() { "asserted by caller".to_string() } else { spec.provenance().join("; ") };
        ledger.pass(&format!("input_system_{}", i + 1), CheckBasis::Trusted, format!("RieszBasis on S_{}: {source}", i + 1));
    }
    let ledger = ledger.gate()?;

    let all: Vec<usize> = (1..=m).collect();
    let members = subset.unwrap_or(&all);
    if members.is_empty() || members.iter().any(|&j| j == 0 || j > m) {
        return Err(Error::InvalidInput(format!("subset {members:?} must be non-empty within 1..={m}")));
    }
    let mut spec: Option<SpectrumSpec> = None;
    let mut dom = IntervalUnion::empty();
    for &j in members {
        let part = spectra[j - 1].translate(Rational::integer(k[j - 1] as i64))?;
        spec = Some(match spec {
            None => part,
            Some(acc) => acc.union(&part)?,
        });
        dom = dom.union(&domains[j - 1].translate(Rational::integer(l[j - 1] as i64 - 1).checked_div(nr)?)?);
    }
    let spectrum = spec.expect("members are non-empty");
    let counter_check = counter_check(&spectrum, &dom, Property::RieszBasis, opts)?;
    Ok(CombinedSystem { spectrum, domain: dom, claimed_property: Property::RieszBasis, ledger, statement_tag: MULTI_TAG.into(), counter_check })
}
