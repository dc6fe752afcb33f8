//! Frequency sets: unions of (possibly perturbed) arithmetic progressions,
//! explicit points and exclusions, realized on symmetric windows.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Points closer than this are the same point of a union.
pub const COINCIDENCE_TOL: f64 = 1e-12;
/// Distinct points closer than this make the window non-separated.
pub const SEPARATION_TOL: f64 = 1e-9;
/// Tolerance for deciding membership of a floating point in a coset family.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Symmetric truncation window `[-T, T]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    half_width: f64,
}

impl Window {
    pub fn new(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidInput(format!("window half-width {half_width} must be positive")));
        }
        Ok(Window { half_width })
    }

    pub fn t(&self) -> f64 {
        self.half_width
    }
}

/// `N Z + {c_1, ..., c_K}` with distinct offsets in `[0, N)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CosetFamilyRaw")]
pub struct CosetFamily {
    period: Rational,
    offsets: Vec<Rational>,
}

#[derive(Deserialize)]
struct CosetFamilyRaw {
    period: Rational,
    offsets: Vec<Rational>,
}

impl TryFrom<CosetFamilyRaw> for CosetFamily {
    type Error = Error;
    fn try_from(raw: CosetFamilyRaw) -> Result<Self> {
        CosetFamily::new(raw.period, raw.offsets)
    }
}

impl CosetFamily {
    pub fn new(period: Rational, offsets: Vec<Rational>) -> Result<Self> {
        if !period.is_positive() {
            return Err(Error::InvalidInput(format!("period {period} must be positive")));
        }
        if offsets.is_empty() {
            return Err(Error::EmptyInput);
        }
        for &c in &offsets {
            if c < Rational::ZERO || c >= period {
                return Err(Error::OffsetOutOfRange { offset: c.to_string(), period: period.to_string() });
            }
        }
        for (i, a) in offsets.iter().enumerate() {
            if offsets[..i].contains(a) {
                return Err(Error::DuplicateOffsets(a.to_string()));
            }
        }
        Ok(CosetFamily { period, offsets })
    }

    /// The lattice `period * Z`.
    pub fn lattice(period: Rational) -> Result<Self> {
        CosetFamily::new(period, vec![Rational::ZERO])
    }

    pub fn period(&self) -> Rational {
        self.period
    }

    pub fn offsets(&self) -> &[Rational] {
        &self.offsets
    }

    pub fn contains_rational(&self, x: Rational) -> Result<bool> {
        for &c in &self.offsets {
            if x.checked_sub(c)?.rem_euclid(self.period)?.0.is_zero() {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn dist_rational(&self, x: Rational) -> Result<Rational> {
        let mut best: Option<Rational> = None;
        for &c in &self.offsets {
            let d = x.checked_sub(c)?.dist_to_lattice(self.period)?;
            best = Some(best.map_or(d, |b: Rational| b.min(d)));
        }
        Ok(best.unwrap_or(Rational::ZERO))
    }

    pub fn dist_f64(&self, x: f64) -> f64 {
        let n = self.period.to_f64();
        self.offsets
            .iter()
            .map(|c| {
                let r = (x - c.to_f64()).rem_euclid(n);
                r.min(n - r)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Named deterministic perturbation families, evaluated at an integer index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PerturbationRule {
    Zero,
    /// `amp * (-1)^n`.
    Alternating {
        amp: f64,
    },
    /// `below` for `n < pivot`, `above` otherwise.
    SignSplit {
        below: f64,
        above: f64,
        pivot: i64,
    },
    /// `amp * sin(rate * n)`.
    Sinusoidal {
        amp: f64,
        rate: f64,
    },
    /// Uniform in `[-amp, amp]`, keyed by `(seed, n)` so that any index can
    /// be evaluated independently of window size.
    SeededUniform {
        amp: f64,
        seed: u64,
    },
}

impl PerturbationRule {
    pub fn eval(&self, n: i64) -> f64 {
        match *self {
            PerturbationRule::Zero => 0.0,
            PerturbationRule::Alternating { amp } => {
                if n.rem_euclid(2) == 0 {
                    amp
                } else {
                    -amp
                }
            }
            PerturbationRule::SignSplit { below, above, pivot } => {
                if n < pivot {
                    below
                } else {
                    above
                }
            }
            PerturbationRule::Sinusoidal { amp, rate } => amp * (rate * n as f64).sin(),
            PerturbationRule::SeededUniform { amp, seed } => {
                let zigzag = if n >= 0 { 2 * n as u128 } else { 2 * n.unsigned_abs() as u128 - 1 };
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_word_pos(2 * zigzag);
                amp * (2.0 * rng.gen::<f64>() - 1.0)
            }
        }
    }

    /// Upper bound on `|eval(n)|` over all `n`.
    pub fn bound(&self) -> f64 {
        match *self {
            PerturbationRule::Zero => 0.0,
            PerturbationRule::Alternating { amp } | PerturbationRule::Sinusoidal { amp, .. } | PerturbationRule::SeededUniform { amp, .. } => {
                amp.abs()
            }
            PerturbationRule::SignSplit { below, above, .. } => below.abs().max(above.abs()),
        }
    }
}

/// `delta(m) = sign * rule(stride * m + shift)` for the `m`-th element of a progression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    #[serde(flatten)]
    pub rule: PerturbationRule,
    #[serde(default = "one_f64")]
    pub sign: f64,
    #[serde(default = "one_i64")]
    pub stride: i64,
    #[serde(default)]
    pub shift: i64,
}

fn one_f64() -> f64 {
    1.0
}

fn one_i64() -> i64 {
    1
}

impl Perturbation {
    pub fn new(rule: PerturbationRule) -> Self {
        Perturbation { rule, sign: 1.0, stride: 1, shift: 0 }
    }

    pub fn eval(&self, m: i64) -> f64 {
        self.sign * self.rule.eval(self.stride * m + self.shift)
    }

    fn is_zero(&self) -> bool {
        self.rule.bound() == 0.0
    }
}

/// Points `period * m + offset + delta(m)` for `m` in `Z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Progression {
    pub period: Rational,
    pub offset: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
}

impl Progression {
    fn is_exact(&self) -> bool {
        self.perturbation.as_ref().map_or(true, Perturbation::is_zero)
    }

    fn delta(&self, m: i64) -> f64 {
        self.perturbation.as_ref().map_or(0.0, |p| p.eval(m))
    }

    fn bound(&self) -> f64 {
        self.perturbation.as_ref().map_or(0.0, |p| p.rule.bound())
    }

    /// Same set with offset reduced into `[0, period)`.
    fn normalized(mut self) -> Result<Self> {
        let (r, q) = self.offset.rem_euclid(self.period)?;
        self.offset = r;
        if let Some(p) = self.perturbation.as_mut() {
            // offset = r + q N, so the m-th element of the new form is the (m - q)-th of the old one
            p.shift -= p.stride * q;
        }
        Ok(self)
    }

    /// Splits into `j` progressions of period `j * period`.
    fn refine(&self, j: i64) -> Result<Vec<Progression>> {
        (0..j)
            .map(|i| {
                let offset = self.offset.checked_add(self.period.checked_mul(Rational::integer(i))?)?;
                let perturbation = self.perturbation.clone().map(|mut p| {
                    p.shift += p.stride * i;
                    p.stride *= j;
                    p
                });
                Ok(Progression { period: self.period.checked_mul(Rational::integer(j))?, offset, perturbation })
            })
            .collect()
    }
}

/// A windowed point; `exact` is set when the point is a known rational.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumPoint {
    pub value: f64,
    pub exact: Option<Rational>,
    from_explicit: bool,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SpectrumSpec {
    progressions: Vec<Progression>,
    explicit: Vec<f64>,
    exclude: Vec<f64>,
    provenance: Vec<String>,
}

#[derive(Serialize, Deserialize, Default)]
struct SpectrumJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cosets: Option<CosetFamily>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    progressions: Vec<Progression>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    explicit: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    exclude: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    provenance: Vec<String>,
}

impl Serialize for SpectrumSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let same_period = self.progressions.windows(2).all(|w| w[0].period == w[1].period);
        let cosets = if same_period && !self.progressions.is_empty() && self.progressions.iter().all(|p| p.perturbation.is_none()) {
            CosetFamily::new(self.progressions[0].period, self.progressions.iter().map(|p| p.offset).collect()).ok()
        } else {
            None
        };
        let json = SpectrumJson {
            progressions: if cosets.is_some() { Vec::new() } else { self.progressions.clone() },
            cosets,
            explicit: self.explicit.clone(),
            exclude: self.exclude.clone(),
            provenance: self.provenance.clone(),
        };
        json.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SpectrumSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = SpectrumJson::deserialize(deserializer)?;
        let mut spec = match json.cosets {
            Some(f) => SpectrumSpec::cosets(&f),
            None => SpectrumSpec::default(),
        };
        for p in json.progressions {
            spec = spec.with_progression(p).map_err(serde::de::Error::custom)?;
        }
        spec = spec.with_explicit(&json.explicit).map_err(serde::de::Error::custom)?;
        spec.exclude = json.exclude;
        spec.provenance = json.provenance;
        if spec.progressions.is_empty() && spec.explicit.is_empty() {
            return Err(serde::de::Error::custom("spectrum has neither progressions nor explicit points"));
        }
        Ok(spec)
    }
}

impl SpectrumSpec {
    pub fn cosets(family: &CosetFamily) -> Self {
        SpectrumSpec {
            progressions: family.offsets.iter().map(|&c| Progression { period: family.period, offset: c, perturbation: None }).collect(),
            ..Default::default()
        }
    }

    /// `period * Z + offset` (offset may be any rational).
    pub fn progression(period: Rational, offset: Rational) -> Result<Self> {
        SpectrumSpec::default().with_progression(Progression { period, offset, perturbation: None })
    }

    pub fn explicit(points: &[f64]) -> Result<Self> {
        SpectrumSpec::default().with_explicit(points)
    }

    pub fn with_progression(mut self, p: Progression) -> Result<Self> {
        if !p.period.is_positive() {
            return Err(Error::InvalidInput(format!("period {} must be positive", p.period)));
        }
        if let Some(pert) = &p.perturbation {
            if !(pert.sign == 1.0 || pert.sign == -1.0) {
                return Err(Error::InvalidInput("perturbation sign must be +1 or -1".into()));
            }
        }
        self.progressions.push(p.normalized()?);
        Ok(self)
    }

    pub fn with_explicit(mut self, points: &[f64]) -> Result<Self> {
        if let Some(bad) = points.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite explicit point {bad}")));
        }
        self.explicit.extend_from_slice(points);
        self.explicit.sort_by(f64::total_cmp);
        self.explicit.dedup_by(|a, b| (*a - *b).abs() <= COINCIDENCE_TOL);
        Ok(self)
    }

    /// Removes the given points (matched within the membership tolerance).
    pub fn excluding(mut self, points: &[f64]) -> Self {
        self.exclude.extend_from_slice(points);
        self
    }

    pub fn with_provenance(mut self, tag: impl Into<String>) -> Self {
        self.provenance.push(tag.into());
        self
    }

    pub fn progressions(&self) -> &[Progression] {
        &self.progressions
    }

    pub fn explicit_points(&self) -> &[f64] {
        &self.explicit
    }

    pub fn excluded_points(&self) -> &[f64] {
        &self.exclude
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn union(&self, other: &SpectrumSpec) -> Result<SpectrumSpec> {
        if !self.exclude.is_empty() || !other.exclude.is_empty() {
            // an exclusion on one side must not delete points of the other
            return Err(Error::InvalidInput("union of spectra with exclusions is ambiguous".into()));
        }
        let mut out = self.clone();
        out.progressions.extend(other.progressions.iter().cloned());
        out = out.with_explicit(&other.explicit)?;
        out.provenance.extend(other.provenance.iter().cloned());
        Ok(out)
    }

    pub fn translate(&self, b: Rational) -> Result<SpectrumSpec> {
        let mut out = SpectrumSpec { provenance: self.provenance.clone(), ..Default::default() };
        for p in &self.progressions {
            out = out.with_progression(Progression { offset: p.offset.checked_add(b)?, ..p.clone() })?;
        }
        let bf = b.to_f64();
        out.explicit = self.explicit.iter().map(|x| x + bf).collect();
        out.exclude = self.exclude.iter().map(|x| x + bf).collect();
        Ok(out)
    }

    pub fn negate(&self) -> Result<SpectrumSpec> {
        let mut out = SpectrumSpec { provenance: self.provenance.clone(), ..Default::default() };
        for p in &self.progressions {
            // -(N m + c + d(m)) = N (-m) + (-c) - d(m)
            let perturbation = p.perturbation.clone().map(|mut q| {
                q.sign = -q.sign;
                q.stride = -q.stride;
                q
            });
            out = out.with_progression(Progression { period: p.period, offset: -p.offset, perturbation })?;
        }
        let mut explicit: Vec<f64> = self.explicit.iter().map(|x| -x).collect();
        explicit.sort_by(f64::total_cmp);
        out.explicit = explicit;
        out.exclude = self.exclude.iter().map(|x| -x).collect();
        Ok(out)
    }

    /// Exact coset-family form when the spectrum is a finite union of
    /// unperturbed progressions with commensurable periods.
    pub fn pure_cosets(&self) -> Option<CosetFamily> {
        if self.progressions.is_empty() || !self.explicit.is_empty() || !self.exclude.is_empty() {
            return None;
        }
        if !self.progressions.iter().all(Progression::is_exact) {
            return None;
        }
        let mut period = self.progressions[0].period;
        for p in &self.progressions[1..] {
            period = period.lcm(p.period).ok()?;
        }
        let mut offsets = Vec::new();
        for p in &self.progressions {
            let j = period.checked_div(p.period).ok()?;
            if !j.is_integer() || j.numer() > 1 << 16 {
                return None;
            }
            for r in p.refine(j.numer()).ok()? {
                if !offsets.contains(&r.offset) {
                    offsets.push(r.offset);
                }
            }
        }
        offsets.sort();
        CosetFamily::new(period, offsets).ok()
    }

    /// All realized points in `[-T, T]`, sorted, with exact values where known.
    pub fn window_points(&self, w: Window) -> Result<Vec<SpectrumPoint>> {
        let t = w.t();
        let mut pts = Vec::new();
        for p in &self.progressions {
            let n = p.period.to_f64();
            let c = p.offset.to_f64();
            let b = p.bound();
            let m_lo = ((-t - b - c) / n).floor() as i64 - 1;
            let m_hi = ((t + b - c) / n).ceil() as i64 + 1;
            let exact = p.is_exact();
            for m in m_lo..=m_hi {
                let base = p.period.checked_mul(Rational::integer(m))?.checked_add(p.offset)?;
                let value = base.to_f64() + p.delta(m);
                if value >= -t && value <= t {
                    pts.push(SpectrumPoint { value, exact: exact.then_some(base), from_explicit: false });
                }
            }
        }
        for &x in &self.explicit {
            if x >= -t && x <= t {
                pts.push(SpectrumPoint { value: x, exact: None, from_explicit: true });
            }
        }
        pts.sort_by(|a, b| a.value.total_cmp(&b.value));
        let mut out: Vec<SpectrumPoint> = Vec::with_capacity(pts.len());
        for p in pts {
            if let Some(last) = out.last_mut() {
                let gap = p.value - last.value;
                if gap <= COINCIDENCE_TOL {
                    if p.from_explicit != last.from_explicit {
                        return Err(Error::DuplicatePoints { a: last.value, b: p.value });
                    }
                    if last.exact.is_none() {
                        last.exact = p.exact;
                    }
                    continue;
                }
            }
            out.push(p);
        }
        out.retain(|p| !self.exclude.iter().any(|e| (p.value - e).abs() <= MEMBERSHIP_TOL));
        for w in out.windows(2) {
            let gap = w[1].value - w[0].value;
            if gap < SEPARATION_TOL {
                return Err(Error::NotSeparated { a: w[0].value, b: w[1].value, gap });
            }
        }
        Ok(out)
    }

    pub fn window(&self, w: Window) -> Result<Vec<f64>> {
        Ok(self.window_points(w)?.into_iter().map(|p| p.value).collect())
    }
}

pub fn window_spectrum(spec: &SpectrumSpec, w: Window) -> Result<Vec<f64>> {
    spec.window(w)
}

/// Minimal gap of a coset family.
fn family_gap(f: &CosetFamily) -> Result<Rational> {
    let offs = &f.offsets;
    let mut sorted = offs.clone();
    sorted.sort();
    let mut best = f.period;
    for w in sorted.windows(2) {
        best = best.min(w[1].checked_sub(w[0])?);
    }
    if sorted.len() > 1 {
        let wrap = sorted[0].checked_add(f.period)?.checked_sub(*sorted.last().unwrap())?;
        best = best.min(wrap);
    }
    Ok(best)
}

/// Exact minimal gap for pure coset families, `None` otherwise.
pub fn separation_exact(spec: &SpectrumSpec) -> Option<Rational> {
    family_gap(&spec.pure_cosets()?).ok()
}

/// Minimal nearest-neighbour gap. Pure coset families are answered
/// structurally; anything else is scanned on the window.
pub fn separation(spec: &SpectrumSpec, w: Window) -> Result<f64> {
    if let Some(r) = separation_exact(spec) {
        return Ok(r.to_f64());
    }
    let pts = spec.window(w)?;
    Ok(pts.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min))
}

/// Exact `dist(F1, F2)` between two coset families.
pub fn family_dist_exact(f1: &CosetFamily, f2: &CosetFamily) -> Result<Rational> {
    let g = f1.period.gcd(f2.period)?;
    let mut best: Option<Rational> = None;
    for &a in &f1.offsets {
        for &b in &f2.offsets {
            let d = b.checked_sub(a)?.dist_to_lattice(g)?;
            best = Some(best.map_or(d, |x: Rational| x.min(d)));
        }
    }
    Ok(best.unwrap_or(Rational::ZERO))
}

pub fn dist_exact(s1: &SpectrumSpec, s2: &SpectrumSpec) -> Option<Rational> {
    family_dist_exact(&s1.pure_cosets()?, &s2.pure_cosets()?).ok()
}

/// Minimal cross distance between two spectra.
pub fn dist(s1: &SpectrumSpec, s2: &SpectrumSpec, w: Window) -> Result<f64> {
    if let Some(d) = dist_exact(s1, s2) {
        return Ok(d.to_f64());
    }
    let a = s1.window(w)?;
    let b = s2.window(w)?;
    Ok(cross_min_distance(&a, &b))
}

/// Minimal `|x - y|` over sorted slices.
pub fn cross_min_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for &x in a {
        let i = b.partition_point(|&y| y < x);
        if i < b.len() {
            best = best.min(b[i] - x);
        }
        if i > 0 {
            best = best.min(x - b[i - 1]);
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipPartition {
    pub inside: Vec<f64>,
    pub outside: Vec<f64>,
    /// Minimal distance from an outside point to the family (`inf` if none).
    pub dist_to_family: f64,
    /// Outside point attaining `dist_to_family`.
    pub closest: Option<f64>,
}

fn point_membership(p: &SpectrumPoint, f: &CosetFamily) -> Result<(bool, f64)> {
    match p.exact {
        Some(r) => {
            let d = f.dist_rational(r)?;
            Ok((d.is_zero(), d.to_f64()))
        }
        None => {
            let d = f.dist_f64(p.value);
            Ok((d <= MEMBERSHIP_TOL, d))
        }
    }
}

pub fn coset_membership_partition(spec: &SpectrumSpec, f: &CosetFamily, w: Window) -> Result<MembershipPartition> {
    let mut part = MembershipPartition { inside: vec![], outside: vec![], dist_to_family: f64::INFINITY, closest: None };
    for p in spec.window_points(w)? {
        let (inside, d) = point_membership(&p, f)?;
        if inside {
            part.inside.push(p.value);
        } else {
            part.outside.push(p.value);
            if d < part.dist_to_family {
                part.dist_to_family = d;
                part.closest = Some(p.value);
            }
        }
    }
    Ok(part)
}

/// How a spectrum sits relative to a coset family.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyRelation {
    /// A point of the spectrum outside the family, if any.
    pub outside_witness: Option<f64>,
    /// A point of the spectrum inside the family, if any.
    pub inside_witness: Option<f64>,
    /// Distance from the outside part of the spectrum to the family.
    pub dist_outside: f64,
    pub closest_outside: Option<f64>,
    /// True when decided from the exact coset structure, false when scanned on a window.
    pub structural: bool,
}

/// Decides containment and separation against a family, exactly for pure
/// coset spectra and by a window scan otherwise.
pub fn family_relation(spec: &SpectrumSpec, f: &CosetFamily, scan: Window) -> Result<FamilyRelation> {
    if let Some(own) = spec.pure_cosets() {
        let l = own.period.lcm(f.period)?;
        let reps = l.checked_div(own.period)?;
        if reps.is_integer() && reps.numer() <= 1 << 16 {
            let mut rel =
                FamilyRelation { outside_witness: None, inside_witness: None, dist_outside: f64::INFINITY, closest_outside: None, structural: true };
            for &c in &own.offsets {
                for i in 0..reps.numer() {
                    // every point of l Z + x sits at the same distance from the family
                    let x = c.checked_add(own.period.checked_mul(Rational::integer(i))?)?;
                    let d = f.dist_rational(x)?;
                    if d.is_zero() {
                        rel.inside_witness.get_or_insert(x.to_f64());
                    } else {
                        rel.outside_witness.get_or_insert(x.to_f64());
                        if d.to_f64() < rel.dist_outside {
                            rel.dist_outside = d.to_f64();
                            rel.closest_outside = Some(x.to_f64());
                        }
                    }
                }
            }
            return Ok(rel);
        }
    }
    let part = coset_membership_partition(spec, f, scan)?;
    Ok(FamilyRelation {
        outside_witness: part.outside.first().copied(),
        inside_witness: part.inside.first().copied(),
        dist_outside: part.dist_to_family,
        closest_outside: part.closest,
        structural: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;

    fn fam(n: &str, offs: &[&str]) -> CosetFamily {
        CosetFamily::new(q(n), offs.iter().map(|s| q(s)).collect()).unwrap()
    }

    fn win(t: f64) -> Window {
        Window::new(t).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    fn lambda1(eps: f64) -> SpectrumSpec {
        SpectrumSpec::default()
            .with_progression(Progression {
                period: q("2"),
                offset: q("0"),
                perturbation: Some(Perturbation::new(PerturbationRule::SignSplit { below: 0.0, above: eps - 1.0, pivot: 1 })),
            })
            .unwrap()
    }

    #[test]
    fn window_examples() {
        let s = SpectrumSpec::cosets(&fam("4", &["0"]));
        assert_eq!(s.window(win(9.0)).unwrap(), vec![-8.0, -4.0, 0.0, 4.0, 8.0]);
        let s = SpectrumSpec::cosets(&fam("3", &["0", "1/2"]));
        assert_eq!(s.window(win(4.0)).unwrap(), vec![-3.0, -2.5, 0.0, 0.5, 3.0, 3.5]);
        assert!(close(&lambda1(0.2).window(win(4.0)).unwrap(), &[-4.0, -2.0, 0.0, 1.2, 3.2]));
    }

    #[test]
    fn negation_and_translation_of_perturbed_progressions() {
        let l2 = lambda1(0.2).negate().unwrap();
        assert!(close(&l2.window(win(4.0)).unwrap(), &[-3.2, -1.2, 0.0, 2.0, 4.0]));
        let shifted = l2.translate(q("1/10")).unwrap();
        assert!(close(&shifted.window(win(4.0)).unwrap(), &[-3.1, -1.1, 0.1, 2.1]));
        let u = lambda1(0.2).union(&shifted).unwrap();
        assert!(close(&u.window(win(4.0)).unwrap(), &[-4.0, -3.1, -2.0, -1.1, 0.0, 0.1, 1.2, 2.1, 3.2]));
        // the shared point 0 of the two halves is kept once
        let both = lambda1(0.2).union(&l2).unwrap();
        assert_eq!(both.window(win(2.5)).unwrap().iter().filter(|x| x.abs() < 1e-12).count(), 1);
    }

    #[test]
    fn separation_and_distance() {
        let z = SpectrumSpec::cosets(&fam("1", &["0"]));
        assert_eq!(separation(&z, win(10.0)).unwrap(), 1.0);
        assert_eq!(separation_exact(&SpectrumSpec::cosets(&fam("3", &["0", "1/2"]))), Some(q("1/2")));
        let a = SpectrumSpec::progression(q("4"), q("13/10")).unwrap();
        let b = SpectrumSpec::cosets(&fam("4", &["0"]));
        assert_eq!(dist_exact(&a, &b), Some(q("13/10")));
        let l1 = lambda1(0.2);
        let l2 = l1.negate().unwrap().translate(q("1/10")).unwrap();
        assert!((dist(&l1, &l2, win(64.0)).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn partitions() {
        let s = SpectrumSpec::progression(q("4"), q("1")).unwrap();
        let p = coset_membership_partition(&s, &fam("4", &["0"]), win(20.0)).unwrap();
        assert!(p.inside.is_empty());
        assert_eq!(p.dist_to_family, 1.0);
        let s = SpectrumSpec::cosets(&fam("2", &["0"]));
        let p = coset_membership_partition(&s, &fam("4", &["0", "2"]), win(20.0)).unwrap();
        assert!(p.outside.is_empty());
        let kadec = SpectrumSpec::default()
            .with_progression(Progression {
                period: q("1"),
                offset: q("0"),
                perturbation: Some(Perturbation::new(PerturbationRule::Sinusoidal { amp: 0.2, rate: 1.0 })),
            })
            .unwrap();
        let f = fam("1", &["1/2"]);
        let p = coset_membership_partition(&kadec, &f, win(30.0)).unwrap();
        let direct = kadec
            .window(win(30.0))
            .unwrap()
            .iter()
            .map(|x| ((x - 0.5).rem_euclid(1.0)).min(1.0 - (x - 0.5).rem_euclid(1.0)))
            .fold(f64::INFINITY, f64::min);
        assert!((p.dist_to_family - direct).abs() < 1e-15);
    }

    #[test]
    fn family_relation_structural() {
        let two_z = CosetFamily::lattice(q("2")).unwrap();
        let r = family_relation(&SpectrumSpec::progression(q("4"), q("1")).unwrap(), &two_z, win(64.0)).unwrap();
        assert!(r.structural && r.inside_witness.is_none() && r.dist_outside == 1.0);
        let r = family_relation(&SpectrumSpec::cosets(&fam("4", &["0"])), &two_z, win(64.0)).unwrap();
        assert!(r.outside_witness.is_none());
        let r = family_relation(&SpectrumSpec::cosets(&fam("1", &["0"])), &two_z, win(64.0)).unwrap();
        assert_eq!((r.inside_witness, r.outside_witness, r.dist_outside), (Some(0.0), Some(1.0), 1.0));
    }

    #[test]
    fn separation_failures() {
        let s = SpectrumSpec::explicit(&[0.0, 1e-10]).unwrap();
        assert!(matches!(s.window(win(1.0)), Err(Error::NotSeparated { .. })));
        let s = SpectrumSpec::cosets(&fam("1", &["0"])).with_explicit(&[2.0]).unwrap();
        assert!(matches!(s.window(win(3.0)), Err(Error::DuplicatePoints { .. })));
        assert!(matches!(CosetFamily::new(q("3"), vec![q("0"), q("0")]), Err(Error::DuplicateOffsets(_))));
        assert!(matches!(CosetFamily::new(q("3"), vec![q("3")]), Err(Error::OffsetOutOfRange { .. })));
    }

    #[test]
    fn json_schema() {
        let s: SpectrumSpec = serde_json::from_str(r#"{"cosets":{"period":"4","offsets":["0","1"]},"explicit":[1.5,3.5],"exclude":[0.0]}"#).unwrap();
        assert_eq!(s.window(win(5.0)).unwrap(), vec![-4.0, -3.0, 1.0, 1.5, 3.5, 4.0, 5.0]);
        let text = serde_json::to_string(&lambda1(0.2)).unwrap();
        let back: SpectrumSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, lambda1(0.2));
    }

    #[test]
    fn seeded_uniform_is_index_keyed() {
        let r = PerturbationRule::SeededUniform { amp: 0.2, seed: 7 };
        let a: Vec<f64> = (-5..5).map(|n| r.eval(n)).collect();
        let b: Vec<f64> = (-5..5).rev().map(|n| r.eval(n)).collect::<Vec<_>>().into_iter().rev().collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|x| x.abs() <= 0.2));
        assert!(a.windows(2).any(|w| w[0] != w[1]));
    }

    fn family_strategy() -> impl Strategy<Value = CosetFamily> {
        (1i64..6, 1i64..4, prop::collection::btree_set(0i64..30, 1..4)).prop_map(|(n, d, offs)| {
            let period = Rational::new(n, d).unwrap();
            let mut offsets: Vec<Rational> = offs.into_iter().map(|o| Rational::new(o, 7).unwrap().rem_euclid(period).unwrap().0).collect();
            offsets.sort();
            offsets.dedup();
            CosetFamily::new(period, offsets).unwrap()
        })
    }

    proptest! {
        #[test]
        fn structural_matches_window_scan(f1 in family_strategy(), f2 in family_strategy()) {
            let s1 = SpectrumSpec::cosets(&f1);
            let s2 = SpectrumSpec::cosets(&f2);
            let t = 3.0 * f1.period().to_f64().max(f2.period().to_f64()) * 7.0;
            let w = win(t);
            let a = s1.window(w).unwrap();
            let brute_sep = a.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min);
            if a.len() > 1 {
                prop_assert!((separation(&s1, w).unwrap() - brute_sep).abs() < 1e-9);
            }
            let b = s2.window(w).unwrap();
            prop_assert!((dist(&s1, &s2, w).unwrap() - cross_min_distance(&a, &b)).abs() < 1e-9);
        }

        #[test]
        fn windows_are_nested(t1 in 1.0f64..30.0, extra in 0.0f64..30.0, eps in 0.01f64..0.24) {
            let s = lambda1(eps).union(&lambda1(eps).negate().unwrap()).unwrap();
            let small = s.window(win(t1)).unwrap();
            let large = s.window(win(t1 + extra)).unwrap();
            prop_assert!(small.iter().all(|x| large.contains(x)));
        }
    }
}
