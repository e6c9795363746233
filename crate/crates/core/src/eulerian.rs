//! Eulerian numbers ⟨n,k⟩: the number of permutations of `{1..n}` with
//! exactly `k` ascents.
//!
//! Rows are built bottom-up with the additive recurrence
//! `⟨n+1,k⟩ = (k+1)⟨n,k⟩ + (n−k+1)⟨n,k−1⟩`, which involves no cancellation.
//! All arithmetic is checked; a row that does not fit in `u128` is an error
//! rather than a wrapped value. The alternating binomial sum is kept as an
//! independent cross-check.

use std::sync::RwLock;

use crate::error::{Error, Result};

/// Exact-integer rows `⟨n,0⟩ … ⟨n,n⟩` for `n = 0..=max_n`.
///
/// Row 0 is `[1]`; every later row ends in the conventional trailing zero
/// `⟨n,n⟩ = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerianTriangle {
    rows: Vec<Vec<u128>>,
}

impl EulerianTriangle {
    pub fn new(max_n: usize) -> Result<Self> {
        let mut rows = vec![vec![1u128]];
        while rows.len() <= max_n {
            let next = next_row(rows.last().expect("row 0 is always present"))?;
            rows.push(next);
        }
        Ok(Self { rows })
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, n: usize) -> Option<&[u128]> {
        self.rows.get(n).map(Vec::as_slice)
    }

    /// `⟨n,k⟩`, with zero for `k ≥ n ≥ 1`. `None` when `n` exceeds `max_n`.
    pub fn get(&self, n: usize, k: usize) -> Option<u128> {
        let row = self.rows.get(n)?;
        Some(row.get(k).copied().unwrap_or(0))
    }

    pub fn rows(&self) -> &[Vec<u128>] {
        &self.rows
    }
}

/// Applies the additive recurrence to row `n` (of length `n + 1`) and returns
/// row `n + 1`.
fn next_row(prev: &[u128]) -> Result<Vec<u128>> {
    let n = prev.len() - 1;
    let overflow = || Error::ArithmeticRange(format!("Eulerian row {} exceeds u128", n + 1));
    let mut row = Vec::with_capacity(n + 2);
    for k in 0..=n + 1 {
        let stay = match prev.get(k) {
            Some(&e) => e.checked_mul(k as u128 + 1).ok_or_else(overflow)?,
            None => 0,
        };
        let rise = if k >= 1 {
            prev[k - 1]
                .checked_mul((n + 1 - k) as u128)
                .ok_or_else(overflow)?
        } else {
            0
        };
        row.push(stay.checked_add(rise).ok_or_else(overflow)?);
    }
    Ok(row)
}

static CACHE: RwLock<Vec<Vec<u128>>> = RwLock::new(Vec::new());

/// Row `n` of the triangle, served from a process-wide memo.
pub fn eulerian_row(n: usize) -> Result<Vec<u128>> {
    {
        let cache = CACHE.read().unwrap_or_else(|e| e.into_inner());
        if let Some(row) = cache.get(n) {
            return Ok(row.clone());
        }
    }
    let mut cache = CACHE.write().unwrap_or_else(|e| e.into_inner());
    if cache.is_empty() {
        cache.push(vec![1]);
    }
    while cache.len() <= n {
        let next = next_row(cache.last().expect("seeded above"))?;
        cache.push(next);
    }
    Ok(cache[n].clone())
}

/// `⟨n,k⟩` via the recurrence. Zero whenever `k ≥ n ≥ 1`.
pub fn eulerian_number(n: usize, k: usize) -> Result<u128> {
    if n >= 1 && k >= n {
        return Ok(0);
    }
    if n == 0 {
        return Ok(u128::from(k == 0));
    }
    Ok(eulerian_row(n)?[k])
}

/// `⟨n,k⟩` from the alternating sum `Σ_j (−1)^j C(n+1, j) (k−j+1)^n`.
///
/// Evaluated in checked `i128`; this path exists to validate the recurrence
/// and is not used by the polynomial machinery.
pub fn eulerian_explicit(n: usize, k: usize) -> Result<u128> {
    if k > n {
        return Err(Error::Domain(format!(
            "explicit formula needs k <= n, got k={k}, n={n}"
        )));
    }
    let range = || Error::ArithmeticRange(format!("explicit Eulerian sum for n={n}, k={k}"));
    let exp = u32::try_from(n).map_err(|_| range())?;
    let mut total: i128 = 0;
    for j in 0..=k {
        let base = (k - j + 1) as i128;
        let term = binomial(n + 1, j)?
            .checked_mul(base.checked_pow(exp).ok_or_else(range)?)
            .ok_or_else(range)?;
        total = if j % 2 == 0 {
            total.checked_add(term)
        } else {
            total.checked_sub(term)
        }
        .ok_or_else(range)?;
    }
    u128::try_from(total).map_err(|_| {
        Error::InternalConsistency(format!("explicit Eulerian sum negative for n={n}, k={k}"))
    })
}

/// Binomial coefficient `C(n, k)` in checked `i128`.
pub(crate) fn binomial(n: usize, k: usize) -> Result<i128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc
            .checked_mul((n - i) as i128)
            .ok_or_else(|| Error::ArithmeticRange(format!("C({n}, {k}) exceeds i128")))?
            / (i as i128 + 1);
    }
    Ok(acc)
}

/// Number of adjacent pairs `a_j < a_{j+1}` in a permutation of `{1..n}`.
pub fn count_ascents(permutation: &[usize]) -> Result<usize> {
    let n = permutation.len();
    let mut seen = vec![false; n];
    for &v in permutation {
        if v == 0 || v > n {
            return Err(Error::InvalidPermutation(format!(
                "value {v} is outside 1..={n}"
            )));
        }
        if std::mem::replace(&mut seen[v - 1], true) {
            return Err(Error::InvalidPermutation(format!("value {v} repeats")));
        }
    }
    Ok(permutation.windows(2).filter(|w| w[0] < w[1]).count())
}
