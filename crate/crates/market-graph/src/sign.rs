//! The sign-similarity identification procedure: indicator statistics, exact
//! binomial critical values, per-edge tests, and whole-graph identification.
//!
//! Each edge `(i,j)` is decided by counting how often the two centered series
//! share a sign. Under the null `p <= p0` the count `V` is stochastically
//! dominated by a Binomial(n, p0) variable, so the critical value is the
//! smallest integer whose exact upper tail drops to the significance level.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, SampleMatrix};
use crate::AlphaSpec;

/// Joint sign-indicator counts for one pair of series.
///
/// `t11 + t00 + t10 + t01 = n` and `v = t11 + t00` always hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignCounts {
    /// Observations with both values positive.
    pub t11: u64,
    /// Observations with both values non-positive.
    pub t00: u64,
    /// First positive, second non-positive.
    pub t10: u64,
    /// First non-positive, second positive.
    pub t01: u64,
    /// Sign coincidences: `t11 + t00`.
    pub v: u64,
    /// Sample size.
    pub n: u64,
}

/// Computes the joint indicator counts for two equal-length series.
///
/// The indicator maps zero to 0 (`u = 1` only for strictly positive values),
/// which matters for real return data containing exact zeros. Centering is
/// the caller's concern; pass series that are already centered under the
/// sample's convention.
pub fn sign_counts(x_i: &[f64], x_j: &[f64]) -> Result<SignCounts> {
    if x_i.len() != x_j.len() {
        return Err(Error::LengthMismatch {
            left: x_i.len(),
            right: x_j.len(),
        });
    }
    if x_i.is_empty() {
        return Err(Error::TooFew {
            what: "observations",
            min: 1,
            got: 0,
        });
    }
    let (mut t11, mut t00, mut t10, mut t01) = (0u64, 0u64, 0u64, 0u64);
    for (&a, &b) in x_i.iter().zip(x_j) {
        match (a > 0.0, b > 0.0) {
            (true, true) => t11 += 1,
            (false, false) => t00 += 1,
            (true, false) => t10 += 1,
            (false, true) => t01 += 1,
        }
    }
    Ok(SignCounts {
        t11,
        t00,
        t10,
        t01,
        v: t11 + t00,
        n: x_i.len() as u64,
    })
}

/// Largest `n` for which the tail is summed with exact binomial coefficients.
///
/// Up to here every `C(n,k)` is exactly representable in `f64` and, for
/// dyadic `p0`, every partial sum is exact, so threshold comparisons at
/// representable significance levels resolve the way exact rational
/// arithmetic would.
const EXACT_SUM_MAX_N: u64 = 50;

/// Upper tail of the Binomial(n, p0) distribution: `P(X >= c)`.
///
/// `c = 0` returns exactly 1 and `c = n + 1` exactly 0. The absolute error
/// stays well below 1e-12 for `n` up to 10000: small `n` uses direct
/// summation with exact coefficients, large `n` anchors a saddle-point term
/// at the mode and extends it by exact term ratios.
pub fn binomial_tail(n: u64, p0: f64, c: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::TooFew {
            what: "trials",
            min: 1,
            got: 0,
        });
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::OutOfDomain {
            what: "p0",
            value: p0,
            domain: "(0, 1)",
        });
    }
    if c > n + 1 {
        return Err(Error::OutOfDomain {
            what: "c",
            value: c as f64,
            domain: "[0, n+1]",
        });
    }
    if c == 0 {
        return Ok(1.0);
    }
    if c == n + 1 {
        return Ok(0.0);
    }
    let tail = if n <= EXACT_SUM_MAX_N {
        tail_small(n, p0, c)
    } else {
        tail_large(n, p0, c)
    };
    Ok(tail.clamp(0.0, 1.0))
}

/// Direct summation for `n <= EXACT_SUM_MAX_N`, `1 <= c <= n`.
fn tail_small(n: u64, p: f64, c: u64) -> f64 {
    let nn = n as usize;
    let q = 1.0 - p;
    let mut pow_p = vec![1.0f64; nn + 1];
    let mut pow_q = vec![1.0f64; nn + 1];
    for k in 1..=nn {
        pow_p[k] = pow_p[k - 1] * p;
        pow_q[k] = pow_q[k - 1] * q;
    }
    // Pascal row in u64; exact for n <= 50
    let mut coeff = vec![1.0f64; nn + 1];
    let mut acc: u64 = 1;
    for k in 0..nn {
        acc = acc * (n - k as u64) / (k as u64 + 1);
        coeff[k + 1] = acc as f64;
    }
    // Kahan summation from k = n down to c
    let mut sum = 0.0;
    let mut comp = 0.0;
    for k in (c as usize..=nn).rev() {
        let term = coeff[k] * pow_p[k] * pow_q[nn - k];
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Anchor-and-ratio summation for large `n`, `1 <= c <= n`.
fn tail_large(n: u64, p: f64, c: u64) -> f64 {
    let q = 1.0 - p;
    let mode = ((n as f64 + 1.0) * p).floor() as u64;
    let k0 = mode.clamp(c, n);
    let anchor = binomial_term(n, k0, p, q);
    if anchor == 0.0 {
        // every term in [c, n] is below the underflow threshold
        return 0.0;
    }
    let ratio_up = p / q;
    // upward from the anchor (terms shrink above the mode)
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut add = |term: f64| {
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };
    let mut term = anchor;
    let mut k = k0;
    loop {
        add(term);
        if k == n {
            break;
        }
        term *= (n - k) as f64 / (k + 1) as f64 * ratio_up;
        k += 1;
    }
    // downward from just below the anchor to c
    let mut term = anchor;
    let mut k = k0;
    while k > c {
        term *= k as f64 / (n - k + 1) as f64 * (q / p);
        k -= 1;
        add(term);
    }
    sum
}

/// One binomial probability mass `C(n,k) p^k q^(n-k)` for large `n`,
/// via a saddle-point expansion when both `k` and `n-k` are large and a
/// direct product otherwise.
fn binomial_term(n: u64, k: u64, p: f64, q: f64) -> f64 {
    if k == 0 {
        return ((n as f64) * (-p).ln_1p()).exp();
    }
    if k == n {
        return p.powi(n as i32);
    }
    let m = k.min(n - k);
    if m <= 30 {
        // product of m coefficient factors times the small-side probability,
        // then the big-side power (which may legitimately underflow)
        let (side_p, side_q, small) = if m == k { (p, q, k) } else { (q, p, n - k) };
        let mut t = 1.0f64;
        for i in 1..=small {
            t *= (n - small + i) as f64 / i as f64 * side_p;
        }
        t * side_q.powi((n - small) as i32)
    } else {
        let (nf, kf, nkf) = (n as f64, k as f64, (n - k) as f64);
        let lc = stirlerr(nf) - stirlerr(kf) - stirlerr(nkf) - bd0(kf, nf * p) - bd0(nkf, nf * q);
        lc.exp() * (nf / (2.0 * std::f64::consts::PI * kf * nkf)).sqrt()
    }
}

/// `ln(n!) - ln(sqrt(2 pi n) (n/e)^n)` by asymptotic series; callers
/// guarantee `n > 30`.
fn stirlerr(n: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Binomial deviance `x ln(x/np) + np - x`, evaluated by a series when
/// `x` is close to `np` to avoid cancellation.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        if s.abs() < f64::MIN_POSITIVE {
            return s;
        }
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        let mut j = 1u32;
        loop {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
            j += 1;
        }
    }
    x * (x / np).ln() + np - x
}

/// Minimal integer `c` with `binomial_tail(n, p0, c) <= alpha`.
///
/// `c = n + 1` encodes the empty rejection region, reached when even the
/// full-support tail at `c = n` exceeds `alpha`. Monotone: non-increasing
/// as `alpha` grows, non-decreasing as `p0` grows.
pub fn critical_value(n: u64, p0: f64, alpha: f64) -> Result<u64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfDomain {
            what: "alpha",
            value: alpha,
            domain: "(0, 1)",
        });
    }
    // validate n and p0 through the first tail call
    let mut lo = 1u64; // tail(0) = 1 > alpha always
    let mut hi = n + 1; // tail(n+1) = 0 <= alpha always
    binomial_tail(n, p0, lo)?;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if binomial_tail(n, p0, mid)? <= alpha {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

/// Parameters of one sign edge test: reject (include the edge) iff `V > c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignTestSpec {
    pub p0: f64,
    pub alpha: f64,
    pub n: u64,
    /// Critical value derived from the other three fields.
    pub c: u64,
}

impl SignTestSpec {
    pub fn new(p0: f64, alpha: f64, n: u64) -> Result<Self> {
        if !(p0 > 0.0 && p0 < 1.0) {
            return Err(Error::OutOfDomain {
                what: "p0",
                value: p0,
                domain: "(0, 1)",
            });
        }
        let c = critical_value(n, p0, alpha)?;
        Ok(SignTestSpec { p0, alpha, n, c })
    }

    /// Whether the rejection region is empty (`c = n + 1`).
    pub fn never_rejects(&self) -> bool {
        self.c == self.n + 1
    }
}

/// Individual edge test: `true` (edge present) iff the sign-coincidence
/// count exceeds the critical value, with strict inequality.
pub fn edge_test_sign(x_i: &[f64], x_j: &[f64], spec: &SignTestSpec) -> Result<bool> {
    if x_i.len() as u64 != spec.n {
        return Err(Error::LengthMismatch {
            left: x_i.len(),
            right: spec.n as usize,
        });
    }
    let counts = sign_counts(x_i, x_j)?;
    Ok(counts.v > spec.c)
}

/// Identifies the market graph with the sign procedure: every edge `(i,j)`
/// is decided by its own test on series `i` and `j` alone.
///
/// `alpha` is either one level broadcast to all edges or a full matrix, the
/// natural form when significance levels derive from per-edge losses.
pub fn identify_sign(sample: &SampleMatrix, p0: f64, alpha: &AlphaSpec) -> Result<AdjacencyMatrix> {
    let dim = sample.series_count();
    alpha.check(dim)?;
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::OutOfDomain {
            what: "p0",
            value: p0,
            domain: "(0, 1)",
        });
    }
    let n = sample.sample_size() as u64;
    let data = sample.centered();
    let v = sign_statistics(&data);
    let mut crit_cache: HashMap<u64, u64> = HashMap::new();
    let mut graph = AdjacencyMatrix::empty(dim);
    let mut idx = 0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let a = alpha.get(i, j);
            let c = match crit_cache.get(&a.to_bits()) {
                Some(&c) => c,
                None => {
                    let c = critical_value(n, p0, a)?;
                    crit_cache.insert(a.to_bits(), c);
                    c
                }
            };
            graph.set_edge(i, j, v[idx] > c);
            idx += 1;
        }
    }
    Ok(graph)
}

/// Sign-coincidence counts `V` for every pair `(i, j)`, `i < j`, in
/// row-major upper-triangle order. Shared by [`identify_sign`] and the risk
/// sweep so both decide edges from identical statistics.
pub(crate) fn sign_statistics(sample: &SampleMatrix) -> Vec<u64> {
    let dim = sample.series_count();
    let n = sample.sample_size();
    let indicators: Vec<Vec<bool>> = (0..dim)
        .map(|i| sample.series(i).iter().map(|&x| x > 0.0).collect())
        .collect();
    let mut out = Vec::with_capacity(dim * (dim - 1) / 2);
    for i in 0..dim {
        for j in (i + 1)..dim {
            let (ui, uj) = (&indicators[i], &indicators[j]);
            let mut v = 0u64;
            for t in 0..n {
                v += (ui[t] == uj[t]) as u64;
            }
            out.push(v);
        }
    }
    out
}
