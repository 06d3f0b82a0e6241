//! Generalized Sharkovsky ordering on `(n+1)N ∪ {1}`:
//!
//! `3(n+1), 5(n+1), 7(n+1), .., 2·3(n+1), 2·5(n+1), .., 4·3(n+1), ..,
//! .., 4(n+1), 2(n+1), n+1, 1`
//!
//! read left to right as a display order.

use crate::error::{Error, Result};
use std::cmp::Ordering;

/// Sort key for `p` in dimension `n`. Writing `p = (n+1)·2^s·d` with `d`
/// odd: `d >= 3` gives `(0, s, d)`, `d = 1` gives `(1, -s, 0)`, and the
/// literal period 1 gives `(2, 0, 0)`.
pub fn sharkovsky_key(p: u64, n: u64) -> Result<(u8, i64, u64)> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension n must be at least 1".into()));
    }
    if p == 1 {
        return Ok((2, 0, 0));
    }
    let base = n + 1;
    if p == 0 || !p.is_multiple_of(base) {
        return Err(Error::InvalidArgument(format!(
            "period {p} is not in {base}N or {{1}}"
        )));
    }
    let q = p / base;
    let s = q.trailing_zeros();
    let d = q >> s;
    Ok(if d >= 3 {
        (0, s as i64, d)
    } else {
        (1, -(s as i64), 0)
    })
}

/// `Less` when `p` comes first in the ordering.
pub fn sharkovsky_compare(p: u64, q: u64, n: u64) -> Result<Ordering> {
    Ok(sharkovsky_key(p, n)?.cmp(&sharkovsky_key(q, n)?))
}

/// All admissible periods up to `limit`, in order.
pub fn sharkovsky_chain(n: u64, limit: u64) -> Result<Vec<u64>> {
    if limit == 0 {
        return Err(Error::InvalidArgument("limit must be at least 1".into()));
    }
    let base = n + 1;
    let mut out: Vec<u64> = (1..=limit / base).map(|k| k * base).collect();
    out.push(1);
    out.sort_by_cached_key(|&p| sharkovsky_key(p, n).unwrap());
    Ok(out)
}
