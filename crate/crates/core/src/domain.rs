//! Finite unions of half-open intervals with rational endpoints.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A finite union of disjoint, sorted, non-adjacent half-open intervals
/// `[lo, hi)`. The empty union is a valid value (it arises as a layer of
/// the coverage decomposition) but cannot be built through [`normalize`].
#[derive(Clone, Debug, Default)]
pub struct IntervalUnion {
    intervals: Vec<(Rational, Rational)>,
    /// Number of raw components supplied before merging.
    source_components: usize,
}

/// Equality is equality of point sets; the component metadata is ignored.
impl PartialEq for IntervalUnion {
    fn eq(&self, other: &Self) -> bool {
        self.intervals == other.intervals
    }
}

impl Eq for IntervalUnion {}

impl std::hash::Hash for IntervalUnion {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.intervals.hash(state);
    }
}

/// Sorts and merges raw intervals. Overlapping or touching intervals are
/// fused; the raw component count is kept as metadata.
pub fn normalize(raw: &[(Rational, Rational)]) -> Result<IntervalUnion> {
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    for &(lo, hi) in raw {
        if lo >= hi {
            return Err(Error::BadInterval { lo: lo.to_string(), hi: hi.to_string() });
        }
    }
    let mut u = IntervalUnion::from_sorted_unchecked(merge(raw.to_vec()));
    u.source_components = raw.len();
    Ok(u)
}

fn merge(mut v: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    v.retain(|(lo, hi)| lo < hi);
    v.sort();
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(v.len());
    for (lo, hi) in v {
        match out.last_mut() {
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => out.push((lo, hi)),
        }
    }
    out
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion::default()
    }

    /// The single interval `[lo, hi)`.
    pub fn interval(lo: Rational, hi: Rational) -> Result<Self> {
        normalize(&[(lo, hi)])
    }

    fn from_sorted_unchecked(intervals: Vec<(Rational, Rational)>) -> Self {
        let n = intervals.len();
        IntervalUnion { intervals, source_components: n }
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn source_components(&self) -> usize {
        self.source_components
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> Result<Rational> {
        self.intervals.iter().try_fold(Rational::ZERO, |acc, &(lo, hi)| acc.checked_add(hi.checked_sub(lo)?))
    }

    /// Smallest interval `[inf, sup)` containing the union.
    pub fn hull(&self) -> Option<(Rational, Rational)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|(lo, hi)| lo.to_f64() <= x && x < hi.to_f64())
    }

    pub fn contains_rational(&self, x: Rational) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= x && x < hi)
    }

    pub fn translate(&self, b: Rational) -> Result<Self> {
        let intervals = self.intervals.iter().map(|&(lo, hi)| Ok((lo.checked_add(b)?, hi.checked_add(b)?))).collect::<Result<Vec<_>>>()?;
        Ok(IntervalUnion { intervals, source_components: self.source_components })
    }

    pub fn scale(&self, c: Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidInput(format!("scale factor {c} must be positive")));
        }
        let intervals = self.intervals.iter().map(|&(lo, hi)| Ok((lo.checked_mul(c)?, hi.checked_mul(c)?))).collect::<Result<Vec<_>>>()?;
        Ok(IntervalUnion { intervals, source_components: self.source_components })
    }

    /// Reflection `-S`. The image `(-hi, -lo]` is stored as `[-hi, -lo)`;
    /// the two differ by a null set.
    pub fn negate(&self) -> Self {
        let intervals = self.intervals.iter().rev().map(|&(lo, hi)| (-hi, -lo)).collect();
        IntervalUnion { intervals, source_components: self.source_components }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        IntervalUnion::from_sorted_unchecked(merge(all))
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a0, a1) = self.intervals[i];
            let (b0, b1) = other.intervals[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo < hi {
                out.push((lo, hi));
            }
            if a1 <= b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalUnion::from_sorted_unchecked(out)
    }

    /// `self` minus `other`.
    pub fn difference(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for &(lo, hi) in &self.intervals {
            let mut cur = lo;
            for &(b0, b1) in &other.intervals {
                if b1 <= cur || b0 >= hi {
                    continue;
                }
                if b0 > cur {
                    out.push((cur, b0));
                }
                cur = cur.max(b1);
                if cur >= hi {
                    break;
                }
            }
            if cur < hi {
                out.push((cur, hi));
            }
        }
        IntervalUnion::from_sorted_unchecked(merge(out))
    }

    /// Inclusion up to null sets. Because both sides are normalized,
    /// this is ordinary set inclusion of the half-open representatives.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.intervals.iter().all(|&(lo, hi)| other.intervals.iter().any(|&(b0, b1)| b0 <= lo && hi <= b1))
    }

    /// Whether the intersection has zero measure.
    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersect(other).is_empty()
    }

    /// First point of `self` outside `other`, if any.
    pub fn first_point_outside(&self, other: &Self) -> Option<Rational> {
        self.difference(other).intervals.first().map(|&(lo, _)| lo)
    }
}

/// Whether `S1 + a ⊆ S2`.
pub fn shift_subset_check(s1: &IntervalUnion, a: Rational, s2: &IntervalUnion) -> Result<bool> {
    Ok(s1.translate(a)?.is_subset_of(s2))
}

pub fn disjoint_check(s1: &IntervalUnion, s2: &IntervalUnion) -> bool {
    s1.is_disjoint(s2)
}

pub fn translate_domain(s: &IntervalUnion, b: Rational) -> Result<IntervalUnion> {
    s.translate(b)
}

pub fn scale_domain(s: &IntervalUnion, c: Rational) -> Result<IntervalUnion> {
    s.scale(c)
}

pub fn negate_domain(s: &IntervalUnion) -> IntervalUnion {
    s.negate()
}

#[derive(Serialize, Deserialize)]
struct DomainJson {
    intervals: Vec<(Rational, Rational)>,
}

impl Serialize for IntervalUnion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DomainJson { intervals: self.intervals.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntervalUnion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = DomainJson::deserialize(deserializer)?;
        normalize(&raw.intervals).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;

    fn iu(parts: &[(&str, &str)]) -> IntervalUnion {
        normalize(&parts.iter().map(|&(a, b)| (q(a), q(b))).collect::<Vec<_>>()).unwrap()
    }

    /// Union by brute force over the sorted set of all endpoints: each
    /// elementary cell is kept when its midpoint lies in some raw interval.
    fn sweep_oracle(raw: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
        let mut pts: Vec<Rational> = raw.iter().flat_map(|&(a, b)| [a, b]).collect();
        pts.sort();
        pts.dedup();
        let mut cells = Vec::new();
        for w in pts.windows(2) {
            let mid = w[0].checked_add(w[1]).unwrap().checked_div(Rational::integer(2)).unwrap();
            if raw.iter().any(|&(a, b)| a <= mid && mid < b) {
                match cells.last_mut() {
                    Some((_, hi)) if *hi == w[0] => *hi = w[1],
                    _ => cells.push((w[0], w[1])),
                }
            }
        }
        cells
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(iu(&[("0", "1/4"), ("1/4", "1/2")]).intervals(), &[(q("0"), q("1/2"))]);
        assert_eq!(iu(&[("1/2", "3/4"), ("0", "1/4")]).intervals(), &[(q("0"), q("1/4")), (q("1/2"), q("3/4"))]);
        let raw = [(q("0"), q("1/3")), (q("1/4"), q("1/2"))];
        assert_eq!(normalize(&raw).unwrap().intervals(), sweep_oracle(&raw).as_slice());
        assert_eq!(normalize(&raw).unwrap().source_components(), 2);
        assert!(matches!(normalize(&[]), Err(Error::EmptyInput)));
        assert!(matches!(normalize(&[(q("1"), q("1"))]), Err(Error::BadInterval { .. })));
    }

    #[test]
    fn transforms() {
        assert_eq!(translate_domain(&iu(&[("0", "1/4")]), q("1/2")).unwrap(), iu(&[("1/2", "3/4")]));
        assert_eq!(scale_domain(&iu(&[("0", "1")]), q("1/3")).unwrap(), iu(&[("0", "1/3")]));
        assert_eq!(negate_domain(&iu(&[("0", "1/2")])), iu(&[("-1/2", "0")]));
        assert!(scale_domain(&iu(&[("0", "1")]), q("0")).is_err());
    }

    #[test]
    fn inclusion_and_disjointness() {
        assert!(shift_subset_check(&iu(&[("0", "1/4")]), q("1/2"), &iu(&[("1/2", "3/4")])).unwrap());
        assert!(!shift_subset_check(&iu(&[("0", "1/4")]), q("1/2"), &iu(&[("1/2", "5/8")])).unwrap());
        let s1 = iu(&[("0", "1/10"), ("1/5", "4/15")]);
        assert!(shift_subset_check(&s1, q("1/3"), &iu(&[("1/3", "1")])).unwrap());
        assert!(disjoint_check(&iu(&[("0", "1/2")]), &iu(&[("1/2", "1")])));
        assert!(!disjoint_check(&iu(&[("0", "1/2")]), &iu(&[("1/3", "1")])));
        assert_eq!(iu(&[("0", "1/4"), ("1/2", "3/4")]).measure().unwrap(), q("1/2"));
    }

    #[test]
    fn set_operations() {
        let a = iu(&[("0", "1/2"), ("3/4", "1")]);
        let b = iu(&[("1/4", "7/8")]);
        assert_eq!(a.intersect(&b), iu(&[("1/4", "1/2"), ("3/4", "7/8")]));
        assert_eq!(a.difference(&b), iu(&[("0", "1/4"), ("7/8", "1")]));
        assert_eq!(a.union(&b), iu(&[("0", "1")]));
        assert_eq!(a.first_point_outside(&b), Some(q("0")));
    }

    #[test]
    fn json_roundtrip() {
        let s: IntervalUnion = serde_json::from_str(r#"{"intervals":[["0","1/4"],["1/2","3/4"]]}"#).unwrap();
        assert_eq!(s, iu(&[("0", "1/4"), ("1/2", "3/4")]));
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"intervals":[["0","1/4"],["1/2","3/4"]]}"#);
        assert!(serde_json::from_str::<IntervalUnion>(r#"{"intervals":[]}"#).is_err());
    }

    fn raw_strategy() -> impl Strategy<Value = Vec<(Rational, Rational)>> {
        prop::collection::vec((-40i64..40, 1i64..20, 1i64..12), 1..6)
            .prop_map(|v| v.into_iter().map(|(a, len, d)| (Rational::new(a, d).unwrap(), Rational::new(a + len, d).unwrap())).collect())
    }

    proptest! {
        #[test]
        fn normalize_matches_sweep_and_is_idempotent(raw in raw_strategy()) {
            let u = normalize(&raw).unwrap();
            let oracle = sweep_oracle(&raw);
            prop_assert_eq!(u.intervals(), oracle.as_slice());
            let again = normalize(u.intervals()).unwrap();
            prop_assert_eq!(again.intervals(), u.intervals());
            prop_assert_eq!(again.measure().unwrap(), u.measure().unwrap());
        }

        #[test]
        fn measure_under_transforms(raw in raw_strategy(), b in -20i64..20, c in 1i64..6, d in 1i64..6) {
            let u = normalize(&raw).unwrap();
            let m = u.measure().unwrap();
            let shift = Rational::new(b, d).unwrap();
            prop_assert_eq!(u.translate(shift).unwrap().measure().unwrap(), m);
            let c = Rational::new(c, d).unwrap();
            prop_assert_eq!(u.scale(c).unwrap().measure().unwrap(), m.checked_mul(c).unwrap());
            prop_assert_eq!(u.negate().measure().unwrap(), m);
        }

        #[test]
        fn inclusion_implies_measure_order(r1 in raw_strategy(), r2 in raw_strategy(), b in -10i64..10) {
            let s1 = normalize(&r1).unwrap();
            let s2 = normalize(&r2).unwrap();
            let a = Rational::new(b, 3).unwrap();
            if shift_subset_check(&s1, a, &s2).unwrap() {
                prop_assert!(s1.measure().unwrap() <= s2.measure().unwrap());
            }
            let inter = s1.intersect(&s2);
            let diff = s1.difference(&s2);
            prop_assert_eq!(
                inter.measure().unwrap().checked_add(diff.measure().unwrap()).unwrap(),
                s1.measure().unwrap()
            );
        }
    }
}
