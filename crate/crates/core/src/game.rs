//! Game positions and the arithmetic on them.
//!
//! A position of the liar game is a [`StateVector`]: `x[i]` elements carry
//! exactly `i` lies, for `i = 0..=k`. Elements pushed past `k` lies are
//! dropped and never represented. All weights are exact `u128` values; the
//! number of rounds is capped at [`MAX_ROUNDS`] so that `2^q` and every
//! weight stay representable.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Largest supported number of rounds.
pub const MAX_ROUNDS: u32 = 100;

pub(crate) type Counts = SmallVec<[u64; 6]>;

/// Counts `(x_0, ..., x_k)` of elements carrying `i` lies.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateVector {
    counts: Counts,
}

/// Paul's split `(a_0, ..., a_k)`. Legality is checked against a state by the
/// operations that consume it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuestionVector {
    entries: Counts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Response {
    N,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameVariant {
    /// Paul wins iff at least one element survives.
    Pathological,
    /// Paul wins iff at most one element survives.
    Original,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    pub variant: GameVariant,
    pub initial: StateVector,
    pub rounds: u32,
}

impl StateVector {
    pub fn new(counts: impl IntoIterator<Item = u64>) -> Result<Self> {
        let counts: Counts = counts.into_iter().collect();
        if counts.is_empty() {
            return Err(Error::Shape {
                expected: 1,
                found: 0,
            });
        }
        counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| Error::capacity("total element count exceeds u64"))?;
        Ok(StateVector { counts })
    }

    /// The all-zero state with lie budget `k`.
    pub fn zero(k: usize) -> Self {
        StateVector {
            counts: std::iter::repeat_n(0, k + 1).collect(),
        }
    }

    /// The opening state `(n, 0, ..., 0)`.
    pub fn initial(n: u64, k: usize) -> Self {
        let mut s = Self::zero(k);
        s.counts[0] = n;
        s
    }

    pub fn lies(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, i: usize) -> u64 {
        self.counts[i]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    /// `x - a` componentwise, the question with the same successor pair swapped.
    pub fn complement(&self, a: &QuestionVector) -> Result<QuestionVector> {
        check_legal(self, a)?;
        Ok(QuestionVector {
            entries: self.counts.iter().zip(&a.entries).map(|(x, a)| x - a).collect(),
        })
    }

    /// Componentwise sum; both states must share `k`.
    pub fn plus(&self, other: &StateVector) -> Result<StateVector> {
        check_shape(self.counts.len(), other.counts.len())?;
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a.checked_add(*b))
            .collect::<Option<Counts>>()
            .ok_or_else(|| Error::capacity("state sum overflows u64"))?;
        StateVector::new(counts)
    }
}

impl QuestionVector {
    pub fn new(entries: impl IntoIterator<Item = u64>) -> Self {
        QuestionVector {
            entries: entries.into_iter().collect(),
        }
    }

    pub(crate) fn from_counts(entries: Counts) -> Self {
        QuestionVector { entries }
    }

    pub fn zero(k: usize) -> Self {
        QuestionVector {
            entries: std::iter::repeat_n(0, k + 1).collect(),
        }
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> u64 {
        self.entries[i]
    }

    pub fn is_legal_for(&self, x: &StateVector) -> bool {
        self.entries.len() == x.counts.len()
            && self.entries.iter().zip(&x.counts).all(|(a, x)| a <= x)
    }
}

impl Response {
    pub const BOTH: [Response; 2] = [Response::N, Response::Y];

    pub fn complement(self) -> Response {
        match self {
            Response::Y => Response::N,
            Response::N => Response::Y,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Response::Y => 'Y',
            Response::N => 'N',
        }
    }

    pub fn from_char(c: char) -> Option<Response> {
        match c {
            'Y' | 'y' => Some(Response::Y),
            'N' | 'n' => Some(Response::N),
            _ => None,
        }
    }
}

impl GameVariant {
    /// Win condition for Paul on the final state.
    pub fn paul_wins_at_horizon(self, x: &StateVector) -> bool {
        match self {
            GameVariant::Pathological => x.total() >= 1,
            GameVariant::Original => x.total() <= 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GameVariant::Pathological => "pathological",
            GameVariant::Original => "original",
        }
    }
}

impl FromStr for GameVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pathological" => Ok(GameVariant::Pathological),
            "original" => Ok(GameVariant::Original),
            other => Err(Error::Parse(format!("unknown variant {other:?}"))),
        }
    }
}

impl fmt::Display for GameVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl GameSpec {
    /// `lies` is redundant with the state length and must agree with it.
    pub fn new(variant: GameVariant, initial: StateVector, rounds: u32, lies: usize) -> Result<Self> {
        check_shape(lies + 1, initial.counts.len())?;
        if rounds > MAX_ROUNDS {
            return Err(Error::capacity(format!("q = {rounds} > {MAX_ROUNDS}")));
        }
        Ok(GameSpec {
            variant,
            initial,
            rounds,
        })
    }

    pub fn lies(&self) -> usize {
        self.initial.lies()
    }
}

fn write_csv(f: &mut fmt::Formatter<'_>, xs: &[u64]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

fn parse_csv(s: &str) -> Result<Counts> {
    if s.is_empty() {
        return Err(Error::Parse("empty vector".into()));
    }
    s.split(',')
        .map(|t| {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("bad vector entry {t:?} in {s:?}")));
            }
            t.parse::<u64>()
                .map_err(|e| Error::Parse(format!("bad vector entry {t:?}: {e}")))
        })
        .collect()
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_csv(f, &self.counts)
    }
}

impl fmt::Display for QuestionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_csv(f, &self.entries)
    }
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for StateVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StateVector::new(parse_csv(s)?)
    }
}

impl FromStr for QuestionVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(QuestionVector::from_counts(parse_csv(s)?))
    }
}

fn check_shape(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Shape { expected, found });
    }
    Ok(())
}

fn check_legal(x: &StateVector, a: &QuestionVector) -> Result<()> {
    check_shape(x.counts.len(), a.entries.len())?;
    if !a.is_legal_for(x) {
        return Err(Error::IllegalQuestion {
            state: x.to_string(),
            question: a.to_string(),
        });
    }
    Ok(())
}

// Pascal's triangle up to MAX_ROUNDS; C(100, 50) < 2^97.
fn pascal() -> &'static [Vec<u128>] {
    static TABLE: OnceLock<Vec<Vec<u128>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = MAX_ROUNDS as usize;
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(n + 1);
        for q in 0..=n {
            let mut row = vec![1u128; q + 1];
            for j in 1..q {
                row[j] = rows[q - 1][j - 1] + rows[q - 1][j];
            }
            rows.push(row);
        }
        rows
    })
}

fn check_rounds(q: u32) -> Result<()> {
    if q > MAX_ROUNDS {
        return Err(Error::capacity(format!("q = {q} > {MAX_ROUNDS}")));
    }
    Ok(())
}

/// `C(n, r)`, zero when `r < 0` or `r > n`.
pub fn binom(n: u32, r: i64) -> Result<u128> {
    check_rounds(n)?;
    Ok(binom_unchecked(n, r))
}

#[inline]
pub(crate) fn binom_unchecked(n: u32, r: i64) -> u128 {
    if r < 0 || r > n as i64 {
        0
    } else {
        pascal()[n as usize][r as usize]
    }
}

/// `C(n, r)` for a possibly negative upper index, zero whenever `n < r`.
pub fn binom_signed(n: i64, r: i64) -> Result<u128> {
    if n < 0 {
        return Ok(0);
    }
    binom(u32::try_from(n).map_err(Error::capacity)?, r)
}

/// Size of a radius-`m` Hamming ball in `Q_q`: `sum_{j=0}^{m} C(q, j)`.
pub fn binom_le(q: u32, m: i64) -> Result<u128> {
    check_rounds(q)?;
    Ok(binom_le_unchecked(q, m))
}

#[inline]
pub(crate) fn binom_le_unchecked(q: u32, m: i64) -> u128 {
    if m < 0 {
        return 0;
    }
    if m >= q as i64 {
        return 1u128 << q;
    }
    pascal()[q as usize][..=m as usize].iter().sum()
}

pub fn pow2(q: u32) -> Result<u128> {
    check_rounds(q)?;
    Ok(1u128 << q)
}

/// Berlekamp weight `wt_q(x) = sum_i x_i * C(q, <= k - i)`.
pub fn weight(q: u32, x: &StateVector) -> Result<u128> {
    check_rounds(q)?;
    let k = x.lies() as i64;
    x.counts.iter().enumerate().try_fold(0u128, |acc, (i, &c)| {
        (c as u128)
            .checked_mul(binom_le_unchecked(q, k - i as i64))
            .and_then(|t| acc.checked_add(t))
            .ok_or_else(|| Error::capacity(format!("wt_{q}({x}) overflows u128")))
    })
}

/// Successor state after Carole answers `r` to question `a`.
pub fn transition(x: &StateVector, a: &QuestionVector, r: Response) -> Result<StateVector> {
    check_legal(x, a)?;
    Ok(transition_unchecked(x, a, r))
}

/// Like [`transition`] without the legality check; `a` must be legal for `x`.
#[inline]
pub(crate) fn transition_unchecked(x: &StateVector, a: &QuestionVector, r: Response) -> StateVector {
    let xs = &x.counts;
    let a = &a.entries;
    let mut out: Counts = SmallVec::with_capacity(xs.len());
    match r {
        // Elements outside the question set take a lie.
        Response::Y => {
            out.push(a[0]);
            for i in 1..xs.len() {
                out.push(a[i] + xs[i - 1] - a[i - 1]);
            }
        }
        Response::N => {
            out.push(xs[0] - a[0]);
            for i in 1..xs.len() {
                out.push(xs[i] - a[i] + a[i - 1]);
            }
        }
    }
    StateVector { counts: out }
}

/// `wt_j(Y(x, a)) - wt_j(N(x, a))`, evaluated from the two successors.
pub fn imbalance(j: u32, x: &StateVector, a: &QuestionVector) -> Result<i128> {
    check_legal(x, a)?;
    let yes = weight(j, &transition_unchecked(x, a, Response::Y))?;
    let no = weight(j, &transition_unchecked(x, a, Response::N))?;
    let delta = yes as i128 - no as i128;
    debug_assert_eq!(Some(delta), imbalance_closed_form(j, x, a).ok());
    Ok(delta)
}

/// `sum_i (2 a_i - x_i) * C(j, k - i)`; agrees with [`imbalance`].
pub fn imbalance_closed_form(j: u32, x: &StateVector, a: &QuestionVector) -> Result<i128> {
    check_legal(x, a)?;
    check_rounds(j)?;
    Ok(imbalance_unchecked(j, x, a))
}

#[inline]
pub(crate) fn imbalance_unchecked(j: u32, x: &StateVector, a: &QuestionVector) -> i128 {
    let k = x.lies() as i64;
    x.counts
        .iter()
        .zip(&a.entries)
        .enumerate()
        .map(|(i, (&x, &a))| (2 * a as i128 - x as i128) * binom_unchecked(j, k - i as i64) as i128)
        .sum()
}

/// `ceil(2^q / C(q, <= k))`.
pub fn sphere_bound(q: u32, k: u32) -> Result<u128> {
    let ball = binom_le(q, k as i64)?;
    Ok(pow2(q)?.div_ceil(ball))
}

/// For a one-lie state, the largest `q` with `wt_q(x0, x1) >= 2^q`;
/// `None` for the zero state.
pub fn character(x0: u64, x1: u64) -> Option<u32> {
    if x0 == 0 && x1 == 0 {
        return None;
    }
    // f(q) = (q+1) x0 + x1 - 2^q has decreasing increments, so the valid q
    // form an interval starting at 0.
    let mut q: u32 = 0;
    loop {
        let next = q + 1;
        let w = (next as u128 + 1) * x0 as u128 + x1 as u128;
        if w < (1u128 << next) {
            return Some(q);
        }
        q = next;
    }
}

/// `y_i <= x_i` for every `i`.
pub fn covers(x: &StateVector, y: &StateVector) -> Result<bool> {
    check_shape(x.counts.len(), y.counts.len())?;
    Ok(x.counts.iter().zip(&y.counts).all(|(a, b)| b <= a))
}

/// Every prefix sum of `y` is at most the matching prefix sum of `x`.
pub fn majorizes(x: &StateVector, y: &StateVector) -> Result<bool> {
    check_shape(x.counts.len(), y.counts.len())?;
    let (mut sx, mut sy) = (0u128, 0u128);
    for (a, b) in x.counts.iter().zip(&y.counts) {
        sx += *a as u128;
        sy += *b as u128;
        if sy > sx {
            return Ok(false);
        }
    }
    Ok(true)
}
