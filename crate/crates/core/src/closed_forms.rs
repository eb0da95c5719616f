//! Exact win conditions and thresholds for one and two lies.

use crate::error::{Error, Result};
use crate::game::{binom_le, binom_signed, pow2, sphere_bound};

/// Parity correction terms of the two-lie win condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoLieCorrection {
    /// `n mod 2`.
    pub a: u8,
    /// In `{0, 1, 2, 3}`, set by `n mod 4` and `q`.
    pub b: u8,
}

/// The one-lie threshold from the win condition, next to the shortcut
/// formula through the sphere bound. The two disagree at `q <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OneLieThreshold {
    pub q: u32,
    pub value: u64,
    pub shortcut: u64,
}

impl OneLieThreshold {
    pub fn agrees(&self) -> bool {
        self.value == self.shortcut
    }
}

fn n_times(n: u64, x: u128) -> Result<i128> {
    (n as u128)
        .checked_mul(x)
        .filter(|v| *v <= i128::MAX as u128)
        .map(|v| v as i128)
        .ok_or_else(|| Error::Capacity(format!("{n} * {x} overflows")))
}

/// Right-hand side of the one-lie condition: `n(q+1)`, minus `q - 1` for odd `n`.
fn one_lie_rhs(n: u64, q: u32) -> Result<i128> {
    let even = n_times(n, q as u128 + 1)?;
    Ok(if n.is_multiple_of(2) {
        even
    } else {
        even - (q as i128 - 1)
    })
}

/// Paul wins `((n, 0), q, 1)*` iff `2^q <= n(q+1)` for even `n` and
/// `2^q <= n(q+1) - (q-1)` for odd `n`.
pub fn paul_wins_1lie_pathological(n: u64, q: u32) -> Result<bool> {
    Ok(pow2(q)? as i128 <= one_lie_rhs(n, q)?)
}

/// Paul wins `((n, 0), q, 1)` (original game) iff `n(q+1) <= 2^q` for even
/// `n` and `n(q+1) + (q-1) <= 2^q` for odd `n`. The odd-`n` correction works
/// against Paul here as well, which keeps `q = 0` consistent (`n <= 1`).
pub fn paul_wins_1lie_original(n: u64, q: u32) -> Result<bool> {
    let base = n_times(n, q as u128 + 1)?;
    let lhs = if n.is_multiple_of(2) { base } else { base + (q as i128 - 1) };
    Ok(lhs <= pow2(q)? as i128)
}

/// `F*_1(q)`: least `n` satisfying the one-lie condition.
pub fn f_star_1(q: u32) -> Result<u64> {
    let start = u64::try_from(sphere_bound(q, 1)?).map_err(Error::capacity)?;
    (start..)
        .find_map(|n| match paul_wins_1lie_pathological(n, q) {
            Ok(true) => Some(Ok(n)),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        })
        .expect("unbounded scan")
}

/// The sphere-bound shortcut: `SB` when `SB` is odd and `2^q mod (q+1)` is 1
/// or 2, otherwise `SB` rounded up to even.
pub fn f_star_1_shortcut(q: u32) -> Result<u64> {
    let sb = sphere_bound(q, 1)?;
    let residue = pow2(q)? % (q as u128 + 1);
    let v = if sb % 2 == 1 && (residue == 1 || residue == 2) {
        sb
    } else {
        2 * sb.div_ceil(2)
    };
    u64::try_from(v).map_err(Error::capacity)
}

pub fn f_star_1_report(q: u32) -> Result<OneLieThreshold> {
    Ok(OneLieThreshold {
        q,
        value: f_star_1(q)?,
        shortcut: f_star_1_shortcut(q)?,
    })
}

/// Largest `n` for which Paul wins the original one-lie game in `q` rounds.
pub fn f_original_1(q: u32) -> Result<u64> {
    // the reversed condition fails for every n above the sphere bound
    let sb = u64::try_from(sphere_bound(q, 1)?).map_err(Error::capacity)?;
    let mut best = 0;
    for n in 0..=sb {
        if paul_wins_1lie_original(n, q)? {
            best = n;
        }
    }
    Ok(best)
}

pub fn two_lie_correction(n: u64, q: u32) -> TwoLieCorrection {
    let q3 = {
        let r = (q % 4) as i64;
        r * r * r
    };
    let b = match n % 4 {
        0 => 0,
        1 => 2 * (q % 2) as i64,
        2 => (1 - q3).rem_euclid(4),
        _ => (1 + q3).rem_euclid(4),
    };
    TwoLieCorrection {
        a: (n % 2) as u8,
        b: b as u8,
    }
}

/// Right-hand side `n C(q, <= 2) - A C(q-1, 2) - B C(q-2, 1)`.
pub fn two_lie_rhs(n: u64, q: u32) -> Result<i128> {
    let c = two_lie_correction(n, q);
    let main = n_times(n, binom_le(q, 2)?)?;
    let qa = q as i64;
    Ok(main
        - c.a as i128 * binom_signed(qa - 1, 2)? as i128
        - c.b as i128 * binom_signed(qa - 2, 1)? as i128)
}

/// Paul wins `((n, 0, 0), q, 2)*` iff `2^q <= n C(q, <= 2) - A C(q-1, 2) - B C(q-2, 1)`.
pub fn paul_wins_2lie_pathological(n: u64, q: u32) -> Result<bool> {
    Ok(pow2(q)? as i128 <= two_lie_rhs(n, q)?)
}

/// `F*_2(q)`: first `n` from the sphere bound upward satisfying the two-lie condition.
pub fn f_star_2(q: u32) -> Result<u64> {
    let start = u64::try_from(sphere_bound(q, 2)?).map_err(Error::capacity)?;
    (start..)
        .find_map(|n| match paul_wins_2lie_pathological(n, q) {
            Ok(true) => Some(Ok(n)),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        })
        .expect("unbounded scan")
}

/// `F*_k(q)` from the closed forms, for `k` in `{1, 2}`.
pub fn f_star_closed(q: u32, k: usize) -> Result<u64> {
    match k {
        1 => f_star_1(q),
        2 => f_star_2(q),
        _ => Err(Error::Domain(format!("no closed form for k = {k}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_lie_pathological_examples() {
        assert!(!paul_wins_1lie_pathological(3, 4).unwrap());
        assert!(paul_wins_1lie_pathological(1, 0).unwrap());
        assert!(paul_wins_1lie_pathological(4, 4).unwrap());
    }

    #[test]
    fn f_star_1_examples() {
        assert_eq!(f_star_1(4).unwrap(), 4);
        assert_eq!(f_star_1(10).unwrap(), 94);
        assert_eq!(f_star_1(1).unwrap(), 1);
        assert_eq!(f_star_1_shortcut(1).unwrap(), 2);
        assert!(!f_star_1_report(1).unwrap().agrees());
    }

    #[test]
    fn one_lie_original_examples() {
        // 5 * 6 + 4 = 34 > 32: every first question leaves a successor of 4-weight >= 17
        assert!(!paul_wins_1lie_original(5, 5).unwrap());
        assert!(paul_wins_1lie_original(4, 5).unwrap());
        assert!(!paul_wins_1lie_original(6, 5).unwrap());
        assert!(paul_wins_1lie_original(1, 0).unwrap());
        assert!(!paul_wins_1lie_original(2, 0).unwrap());
        assert_eq!(f_original_1(5).unwrap(), 4);
        assert_eq!(f_original_1(11).unwrap(), 170);
    }

    #[test]
    fn correction_examples() {
        assert_eq!(two_lie_correction(20, 10), TwoLieCorrection { a: 0, b: 0 });
        assert_eq!(two_lie_correction(19, 10), TwoLieCorrection { a: 1, b: 1 });
        assert_eq!(two_lie_correction(1525, 18), TwoLieCorrection { a: 1, b: 0 });
        for n in 0..64 {
            for q in 0..40 {
                let c = two_lie_correction(n, q);
                assert_eq!(c.a as u64, n % 2);
                assert!(c.b < 4);
            }
        }
    }

    #[test]
    fn two_lie_examples() {
        assert!(paul_wins_2lie_pathological(20, 10).unwrap());
        assert!(!paul_wins_2lie_pathological(19, 10).unwrap());
        assert_eq!(two_lie_rhs(19, 10).unwrap(), 1020);
        assert!(paul_wins_2lie_pathological(1525, 18).unwrap());
        assert_eq!(two_lie_rhs(1525, 18).unwrap(), 262164);
        assert_eq!(two_lie_rhs(1524, 18).unwrap(), 262128);
    }

    #[test]
    fn f_star_2_examples() {
        assert_eq!(f_star_2(24).unwrap(), 55740);
        assert_eq!(f_star_2(18).unwrap(), 1525);
        assert_eq!(f_star_2(3).unwrap(), 2);
    }
}
