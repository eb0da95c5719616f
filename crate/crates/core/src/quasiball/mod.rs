//! Quasiballs: adaptive Hamming balls in the hypercube `{N, Y}^q`, and the
//! correspondence between winning strategies and coverings (pathological
//! game) or packings (original game) by them.
//!
//! A vertex is stored as the low `q` bits of an integer with position 1 as
//! the most significant bit and `Y = 1`, so integer order is lexicographic
//! order with `N < Y`. Lie sets are bitmasks with bit `p - 1` for position `p`.

mod certificate;
mod convert;

pub use certificate::{parse_certificate, write_certificate};
pub use convert::{covering_to_strategy, strategy_to_covering};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{binom_le, StateVector};

/// Largest dimension handled: positions fit a `u32` and the union bitset is 32 MiB.
pub const MAX_DIMENSION: u32 = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    q: u32,
    bits: u32,
}

impl Vertex {
    pub fn new(q: u32, bits: u32) -> Result<Self> {
        if q > MAX_DIMENSION || (q < 32 && bits >> q != 0) {
            return Err(Error::Format(format!("{bits:#x} is not a vertex of Q_{q}")));
        }
        Ok(Vertex { q, bits })
    }

    pub fn dim(self) -> u32 {
        self.q
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    /// `true` for `Y` at 1-indexed position `p`.
    pub fn is_yes(self, p: u32) -> bool {
        self.bits >> (self.q - p) & 1 == 1
    }

    fn flip(self, p: u32) -> Vertex {
        Vertex {
            q: self.q,
            bits: self.bits ^ (1 << (self.q - p)),
        }
    }

    /// Drops position 1.
    fn tail(self) -> Vertex {
        Vertex {
            q: self.q - 1,
            bits: self.bits & ((1u32 << (self.q - 1)) - 1),
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 1..=self.q {
            f.write_str(if self.is_yes(p) { "Y" } else { "N" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u32;
        for c in s.chars() {
            bits = bits << 1
                | match c {
                    'Y' => 1,
                    'N' => 0,
                    _ => return Err(Error::Format(format!("bad vertex symbol {c:?} in {s:?}"))),
                };
        }
        Vertex::new(s.len() as u32, bits)
    }
}

/// A set of 1-indexed lie positions, ordered by size and then lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LieSet(u32);

impl LieSet {
    pub const EMPTY: LieSet = LieSet(0);

    pub fn from_positions(positions: &[u32]) -> Result<Self> {
        let mut mask = 0u32;
        let mut last = 0;
        for &p in positions {
            if p <= last || p > MAX_DIMENSION {
                return Err(Error::Format(format!(
                    "lie positions {positions:?} must be strictly increasing within 1..={MAX_DIMENSION}"
                )));
            }
            mask |= 1 << (p - 1);
            last = p;
        }
        Ok(LieSet(mask))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, p: u32) -> bool {
        p >= 1 && self.0 >> (p - 1) & 1 == 1
    }

    pub fn last(self) -> Option<u32> {
        (self.0 != 0).then(|| 32 - self.0.leading_zeros())
    }

    pub fn positions(self) -> impl Iterator<Item = u32> {
        (1..=32u32).filter(move |&p| self.contains(p))
    }

    fn with(self, p: u32) -> LieSet {
        LieSet(self.0 | 1 << (p - 1))
    }

    /// Prefixes `{p_1..p_m}` for `m < len`, paired with the next position `p_{m+1}`.
    fn prefixes(self) -> impl Iterator<Item = (LieSet, u32)> {
        let mut acc = 0u32;
        self.positions().map(move |p| {
            let prefix = LieSet(acc);
            acc |= 1 << (p - 1);
            (prefix, p)
        })
    }
}

impl Ord for LieSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & diff & diff.wrapping_neg() != 0 {
                // the set holding the first differing position is smaller
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for LieSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LieSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("-");
        }
        let parts: Vec<String> = self.positions().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl std::str::FromStr for LieSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "-" {
            return Ok(LieSet::EMPTY);
        }
        let positions = s
            .split(',')
            .map(|t| {
                if t.is_empty() || (t.len() > 1 && t.starts_with('0')) || !t.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(Error::Format(format!("bad lie position {t:?} in {s:?}")));
                }
                t.parse::<u32>().map_err(|e| Error::Format(format!("{t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        LieSet::from_positions(&positions)
    }
}

/// All subsets of `[q]` of size at most `i`, in canonical order.
pub fn lie_sets(q: u32, i: u32) -> Vec<LieSet> {
    let mut out = vec![LieSet::EMPTY];
    let mut layer = vec![LieSet::EMPTY];
    for _ in 0..i.min(q) {
        let mut next = Vec::new();
        for s in &layer {
            for p in s.last().unwrap_or(0) + 1..=q {
                next.push(s.with(p));
            }
        }
        next.sort();
        out.extend_from_slice(&next);
        layer = next;
    }
    out
}

/// The image of `f: C([q], <= radius) -> Q_q`, kept with `f` itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quasiball {
    q: u32,
    radius: u32,
    map: BTreeMap<LieSet, Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BallViolation {
    Dimension { expected: u32, found: Vertex },
    /// A lie set outside `C([q], <= radius)`.
    ExtraSet(LieSet),
    MissingSet(LieSet),
    /// `f(a)` and `f(b)` must agree before `position` and differ at it.
    PrefixPair { a: LieSet, b: LieSet, position: u32 },
    NotInjective { a: LieSet, b: LieSet, vertex: Vertex },
}

impl fmt::Display for BallViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BallViolation::Dimension { expected, found } => {
                write!(f, "vertex {found} is not in Q_{expected}")
            }
            BallViolation::ExtraSet(s) => write!(f, "lie set {s} is outside the domain"),
            BallViolation::MissingSet(s) => write!(f, "lie set {s} is unassigned"),
            BallViolation::PrefixPair { a, b, position } => write!(
                f,
                "pair ({a}) < ({b}): images must agree before position {position} and differ at it"
            ),
            BallViolation::NotInjective { a, b, vertex } => {
                write!(f, "lie sets {a} and {b} both map to {vertex}")
            }
        }
    }
}

impl Quasiball {
    pub fn new(q: u32, radius: u32, map: BTreeMap<LieSet, Vertex>) -> Result<Self> {
        if q > MAX_DIMENSION {
            return Err(Error::BudgetExceeded {
                dimension: "dimension",
                estimate: q as u128,
                budget: MAX_DIMENSION as u128,
            });
        }
        Ok(Quasiball { q, radius, map })
    }

    /// The radius-`radius` Hamming ball around `center`: `f(A)` flips `center` on `A`.
    pub fn hamming(center: Vertex, radius: u32) -> Self {
        let q = center.dim();
        let map = lie_sets(q, radius)
            .into_iter()
            .map(|s| (s, s.positions().fold(center, |v, p| v.flip(p))))
            .collect();
        Quasiball { q, radius, map }
    }

    pub fn dim(&self) -> u32 {
        self.q
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn map(&self) -> &BTreeMap<LieSet, Vertex> {
        &self.map
    }

    /// `f(empty)`: the response sequence with no lies.
    pub fn stem(&self) -> Option<Vertex> {
        self.map.get(&LieSet::EMPTY).copied()
    }

    pub fn image(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.map.values().copied()
    }

    pub fn size(&self) -> usize {
        self.map.len()
    }

    /// `f` restricted to lie sets of size below `radius`.
    pub fn restrict(&self, radius: u32) -> Result<Self> {
        if radius > self.radius {
            return Err(Error::Domain(format!("cannot restrict radius {} to {radius}", self.radius)));
        }
        let map = self.map.iter().filter(|(s, _)| s.len() <= radius).map(|(s, v)| (*s, *v)).collect();
        Ok(Quasiball { q: self.q, radius, map })
    }

    /// The ball seen after the first answer `yes`, in `Q_{q-1}`: if the stem
    /// agrees with the answer the element kept its lie count, otherwise it
    /// spent one (and `None` means it is eliminated).
    pub fn descend(&self, yes: bool) -> Option<Quasiball> {
        let stem_yes = self.stem()?.is_yes(1);
        let lied = stem_yes != yes;
        if lied && self.radius == 0 {
            return None;
        }
        let map = self
            .map
            .iter()
            .filter(|(s, _)| s.contains(1) == lied)
            .map(|(s, v)| (LieSet(s.0 >> 1), v.tail()))
            .collect();
        Some(Quasiball {
            q: self.q - 1,
            radius: self.radius - lied as u32,
            map,
        })
    }

    /// Checks that this is an `radius`-quasiball: domain, the prefix-pair
    /// condition for every nested pair, then injectivity.
    pub fn validate(&self) -> std::result::Result<(), BallViolation> {
        for v in self.map.values() {
            if v.dim() != self.q {
                return Err(BallViolation::Dimension { expected: self.q, found: *v });
            }
        }
        let domain = lie_sets(self.q, self.radius);
        if let Some(extra) = self
            .map
            .keys()
            .find(|s| s.len() > self.radius || s.last().is_some_and(|m| m > self.q))
        {
            return Err(BallViolation::ExtraSet(*extra));
        }
        if let Some(missing) = domain.iter().find(|s| !self.map.contains_key(s)) {
            return Err(BallViolation::MissingSet(*missing));
        }
        for (&b, &fb) in &self.map {
            for (a, p) in b.prefixes() {
                let fa = self.map[&a];
                let shift = self.q - p;
                if (fa.bits ^ fb.bits) >> shift != 1 {
                    return Err(BallViolation::PrefixPair { a, b, position: p });
                }
            }
        }
        let mut seen: BTreeMap<Vertex, LieSet> = BTreeMap::new();
        for (&s, &v) in &self.map {
            if let Some(&first) = seen.get(&v) {
                return Err(BallViolation::NotInjective { a: first, b: s, vertex: v });
            }
            seen.insert(v, s);
        }
        debug_assert_eq!(self.map.len() as u128, binom_le(self.q, self.radius as i64).unwrap_or(0));
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverMode {
    Covering,
    Packing,
}

impl CoverMode {
    pub fn name(self) -> &'static str {
        match self {
            CoverMode::Covering => "covering",
            CoverMode::Packing => "packing",
        }
    }
}

impl fmt::Display for CoverMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CoverMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "covering" => Ok(CoverMode::Covering),
            "packing" => Ok(CoverMode::Packing),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

/// `x_i` balls of radius `k - i` for each `i`, meant to cover or pack `Q_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiballCollection {
    pub q: u32,
    pub x: StateVector,
    pub mode: CoverMode,
    pub balls: Vec<Quasiball>,
}

impl QuasiballCollection {
    pub fn lies(&self) -> usize {
        self.x.lies()
    }

    /// Radius counts as a state vector: entry `i` counts balls of radius `k - i`.
    pub fn profile(&self) -> Result<StateVector> {
        let k = self.lies();
        let mut counts = vec![0u64; k + 1];
        for b in &self.balls {
            let r = b.radius() as usize;
            if r > k {
                return Err(Error::Domain(format!("ball of radius {r} exceeds k = {k}")));
            }
            counts[k - r] += 1;
        }
        StateVector::new(counts)
    }

    /// Total image size counted with multiplicity.
    pub fn slots(&self) -> u128 {
        self.balls.iter().map(|b| b.size() as u128).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CollectionFailure {
    Profile { expected: StateVector, found: StateVector },
    Ball { index: usize, violation: BallViolation },
    Uncovered(Vertex),
    /// Two balls (0-based indices) share a vertex in packing mode.
    Collision { vertex: Vertex, first: usize, second: usize },
}

impl fmt::Display for CollectionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CollectionFailure::Profile { expected, found } => {
                write!(f, "radius profile {found} does not match x = {expected}")
            }
            CollectionFailure::Ball { index, violation } => write!(f, "ball {}: {violation}", index + 1),
            CollectionFailure::Uncovered(v) => write!(f, "vertex {v} is uncovered"),
            CollectionFailure::Collision { vertex, first, second } => {
                write!(f, "balls {} and {} share vertex {vertex}", first + 1, second + 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollectionReport {
    pub q: u32,
    pub mode: CoverMode,
    pub balls: usize,
    pub slots: u128,
    /// Distinct vertices hit by at least one ball.
    pub distinct: u64,
    pub failure: Option<CollectionFailure>,
}

impl CollectionReport {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none()
    }

    /// Slots beyond the first hit on each vertex.
    pub fn overlap(&self) -> u128 {
        self.slots - self.distinct as u128
    }
}

impl fmt::Display for CollectionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode: {}", self.mode)?;
        writeln!(f, "q: {}", self.q)?;
        writeln!(f, "balls: {}", self.balls)?;
        writeln!(f, "slots: {}", self.slots)?;
        writeln!(f, "distinct: {}", self.distinct)?;
        writeln!(f, "overlap: {}", self.overlap())?;
        match &self.failure {
            None => writeln!(f, "valid: yes"),
            Some(e) => {
                writeln!(f, "valid: no")?;
                writeln!(f, "failure: {e}")
            }
        }
    }
}

struct Bitset(Vec<u64>);

impl Bitset {
    fn new(bits: u64) -> Self {
        Bitset(vec![0; bits.div_ceil(64) as usize])
    }

    /// Sets bit `i`, returning whether it was already set.
    fn insert(&mut self, i: u32) -> bool {
        let (w, b) = ((i / 64) as usize, i % 64);
        let was = self.0[w] >> b & 1 == 1;
        self.0[w] |= 1 << b;
        was
    }

    fn count(&self) -> u64 {
        self.0.iter().map(|w| w.count_ones() as u64).sum()
    }

    fn first_zero(&self, bits: u64) -> Option<u64> {
        self.0.iter().enumerate().find_map(|(w, &word)| {
            let i = w as u64 * 64 + (!word).trailing_zeros() as u64;
            (word != u64::MAX && i < bits).then_some(i)
        })
    }
}

/// Validates every ball, the covering or packing condition and then the
/// radius profile. Witnesses are the least failing ball, then the least vertex.
pub fn validate_collection(coll: &QuasiballCollection) -> Result<CollectionReport> {
    let q = coll.q;
    if q > MAX_DIMENSION {
        return Err(Error::BudgetExceeded {
            dimension: "dimension",
            estimate: q as u128,
            budget: MAX_DIMENSION as u128,
        });
    }
    let mut report = CollectionReport {
        q,
        mode: coll.mode,
        balls: coll.balls.len(),
        slots: coll.slots(),
        distinct: 0,
        failure: None,
    };
    let bad_ball = coll
        .balls
        .par_iter()
        .enumerate()
        .map(|(index, b)| {
            if b.dim() != q {
                let found = b.stem().unwrap_or(Vertex { q: b.dim(), bits: 0 });
                return Err((index, BallViolation::Dimension { expected: q, found }));
            }
            b.validate().map_err(|v| (index, v))
        })
        .filter_map(|r| r.err())
        .min_by_key(|(index, _)| *index);
    if let Some((index, violation)) = bad_ball {
        report.failure = Some(CollectionFailure::Ball { index, violation });
        return Ok(report);
    }
    let size = 1u64 << q;
    let mut union = Bitset::new(size);
    let mut twice = Bitset::new(size);
    for b in &coll.balls {
        for v in b.image() {
            if union.insert(v.bits) {
                twice.insert(v.bits);
            }
        }
    }
    report.distinct = union.count();
    report.failure = match coll.mode {
        CoverMode::Covering => union
            .first_zero(size)
            .map(|i| CollectionFailure::Uncovered(Vertex { q, bits: i as u32 })),
        CoverMode::Packing => (0..size).find(|&i| twice.0[(i / 64) as usize] >> (i % 64) & 1 == 1).map(|i| {
            let vertex = Vertex { q, bits: i as u32 };
            let mut owners = coll
                .balls
                .iter()
                .enumerate()
                .filter(|(_, b)| b.image().any(|v| v == vertex))
                .map(|(idx, _)| idx);
            let first = owners.next().unwrap_or(0);
            let second = owners.next().unwrap_or(first);
            CollectionFailure::Collision { vertex, first, second }
        }),
    };
    if report.failure.is_none() {
        let found = coll.profile().unwrap_or_else(|_| StateVector::zero(coll.lies()));
        if found != coll.x {
            report.failure = Some(CollectionFailure::Profile { expected: coll.x.clone(), found });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> LieSet {
        s.parse().unwrap()
    }

    fn ball(q: u32, radius: u32, entries: &[(&str, &str)]) -> Quasiball {
        let map = entries.iter().map(|(s, v)| (set(s), v.parse().unwrap())).collect();
        Quasiball::new(q, radius, map).unwrap()
    }

    pub(crate) fn example_ball() -> Quasiball {
        ball(
            4,
            2,
            &[
                ("-", "NYNN"),
                ("1", "YNNY"),
                ("2", "NNYN"),
                ("3", "NYYN"),
                ("4", "NYNY"),
                ("1,2", "YYYN"),
                ("1,3", "YNYN"),
                ("1,4", "YNNN"),
                ("2,3", "NNNY"),
                ("2,4", "NNYY"),
                ("3,4", "NYYY"),
            ],
        )
    }

    #[test]
    fn vertex_order_is_lexicographic() {
        let a: Vertex = "NYYY".parse().unwrap();
        let b: Vertex = "YNNN".parse().unwrap();
        assert!(a < b);
        assert_eq!(a.to_string(), "NYYY");
        assert!("NYX".parse::<Vertex>().is_err());
    }

    #[test]
    fn lie_set_order_and_format() {
        let sets = lie_sets(4, 2);
        let shown: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
        assert_eq!(shown, ["-", "1", "2", "3", "4", "1,2", "1,3", "1,4", "2,3", "2,4", "3,4"]);
        assert!(set("1,3") < set("2,3"));
        assert!(set("4") < set("1,2"));
        assert!("3,1".parse::<LieSet>().is_err());
        assert!("0".parse::<LieSet>().is_err());
        assert!("01".parse::<LieSet>().is_err());
        assert_eq!(lie_sets(2, 5).len(), 4);
    }

    #[test]
    fn example_ball_passes() {
        assert_eq!(example_ball().validate(), Ok(()));
    }

    #[test]
    fn tampered_ball_fails_at_first_pair() {
        let mut b = example_ball();
        b.map.insert(set("2,3"), "NNYY".parse().unwrap());
        assert_eq!(
            b.validate(),
            Err(BallViolation::PrefixPair { a: set("2"), b: set("2,3"), position: 3 })
        );
    }

    #[test]
    fn radius_zero_single_vertex() {
        let b = ball(3, 0, &[("-", "YNY")]);
        assert_eq!(b.validate(), Ok(()));
        assert!(ball(0, 0, &[("-", "")]).validate().is_ok());
    }

    #[test]
    fn domain_and_injectivity_failures() {
        let mut b = example_ball();
        b.map.remove(&set("3,4"));
        assert_eq!(b.validate(), Err(BallViolation::MissingSet(set("3,4"))));
        // a Hamming ball with a duplicated image
        let center: Vertex = "NN".parse().unwrap();
        let mut h = Quasiball::hamming(center, 2);
        assert!(h.validate().is_ok());
        h.map.insert(set("1,2"), "YN".parse().unwrap());
        assert!(matches!(h.validate(), Err(BallViolation::PrefixPair { .. }) | Err(BallViolation::NotInjective { .. })));
    }

    #[test]
    fn adjacent_pairs_imply_all_pairs() {
        // every nested pair is checked; build a ball that passes adjacent
        // pairs only if the chain is consistent
        let b = example_ball();
        for (&s, &fs) in b.map() {
            for (a, p) in s.prefixes() {
                let fa = b.map()[&a];
                for r in 1..p {
                    assert_eq!(fa.is_yes(r), fs.is_yes(r));
                }
                assert_ne!(fa.is_yes(p), fs.is_yes(p));
            }
        }
    }

    #[test]
    fn hamming_balls_and_restriction() {
        for q in 0..=10u32 {
            for radius in 0..=3u32 {
                for bits in [0u32, (1u32 << q) - 1, 0x2aa & ((1u32 << q) - 1)] {
                    let b = Quasiball::hamming(Vertex::new(q, bits).unwrap(), radius);
                    assert_eq!(b.validate(), Ok(()), "q={q} r={radius}");
                    assert_eq!(b.size() as u128, binom_le(q, radius as i64).unwrap());
                    if radius > 0 {
                        assert_eq!(b.restrict(radius - 1).unwrap().validate(), Ok(()));
                    }
                }
            }
        }
        let r1 = example_ball().restrict(1).unwrap();
        assert_eq!(r1.validate(), Ok(()));
        assert_eq!(r1.size(), 5);
    }

    #[test]
    fn descend_yields_quasiballs() {
        let b = example_ball();
        let stem_yes = b.stem().unwrap().is_yes(1);
        let kept = b.descend(stem_yes).unwrap();
        assert_eq!((kept.dim(), kept.radius()), (3, 2));
        assert_eq!(kept.validate(), Ok(()));
        let lied = b.descend(!stem_yes).unwrap();
        assert_eq!((lied.dim(), lied.radius()), (3, 1));
        assert_eq!(lied.validate(), Ok(()));
        assert_eq!(lied.stem().unwrap().to_string(), "NNY");
        let zero = b.restrict(0).unwrap();
        assert!(zero.descend(!stem_yes).is_none());
    }

    fn collection(q: u32, x: &str, mode: CoverMode, balls: Vec<Quasiball>) -> QuasiballCollection {
        QuasiballCollection { q, x: x.parse().unwrap(), mode, balls }
    }

    #[test]
    fn collection_failures() {
        // all radius-0 balls cover Q_2
        let balls: Vec<Quasiball> = (0..4).map(|b| Quasiball::hamming(Vertex::new(2, b).unwrap(), 0)).collect();
        let c = collection(2, "4", CoverMode::Covering, balls.clone());
        let r = validate_collection(&c).unwrap();
        assert!(r.is_valid());
        assert_eq!(r.overlap(), 0);

        let c = collection(2, "3", CoverMode::Covering, balls[1..].to_vec());
        let r = validate_collection(&c).unwrap();
        assert_eq!(r.failure, Some(CollectionFailure::Uncovered("NN".parse().unwrap())));

        let a = Quasiball::hamming("NNN".parse().unwrap(), 1);
        let b = Quasiball::hamming("YYN".parse().unwrap(), 1);
        let c = collection(3, "2,0", CoverMode::Packing, vec![a, b]);
        let r = validate_collection(&c).unwrap();
        assert_eq!(
            r.failure,
            Some(CollectionFailure::Collision { vertex: "NYN".parse().unwrap(), first: 0, second: 1 })
        );

        let c = collection(2, "4,0", CoverMode::Covering, balls);
        assert!(matches!(validate_collection(&c).unwrap().failure, Some(CollectionFailure::Profile { .. })));
        let c = collection(29, "1", CoverMode::Covering, vec![]);
        assert!(matches!(validate_collection(&c), Err(Error::BudgetExceeded { .. })));
    }
}
