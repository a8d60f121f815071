//! The canonical enumeration of ℕ^{<ℕ}: by weight, then shorter first, then
//! entrywise lexicographic. Prefixes have strictly smaller weight, so
//! `t_m ⊑ t_n` implies `m ≤ n`.
//!
//! Weight level `W ≥ 1` holds `2^(W-1)` nodes, `C(W-1, k-1)` of them of length
//! `k`, so the first index at level `W` is `2^(W-1)`.

use std::ops::ControlFlow;

use crate::sequences::FiniteSeq;

fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for j in 0..k {
        r = r * (n - j) as u128 / (j + 1) as u128;
    }
    r
}

/// Number of length-`k` sequences with entry sum `s`.
fn compositions(s: u64, k: u64) -> u128 {
    match k {
        0 => u128::from(s == 0),
        _ => binom(s + k - 1, k - 1),
    }
}

/// `t_n`.
pub fn canonical_node(n: u64) -> FiniteSeq {
    if n == 0 {
        return FiniteSeq::empty();
    }
    let w = 64 - n.leading_zeros() as u64;
    let mut r = (n - (1u64 << (w - 1))) as u128;
    let mut k = 1;
    loop {
        let c = binom(w - 1, k - 1);
        if r < c {
            break;
        }
        r -= c;
        k += 1;
    }
    let mut s = w - k;
    let mut out = Vec::with_capacity(k as usize);
    for pos in 0..k {
        let rest = k - pos - 1;
        let mut e = 0;
        loop {
            let c = compositions(s - e, rest);
            if r < c {
                break;
            }
            r -= c;
            e += 1;
        }
        out.push(e);
        s -= e;
    }
    FiniteSeq::new(out)
}

/// The `n` with `t_n = t`, or `None` if it does not fit in `u64`.
pub fn canonical_index(t: &FiniteSeq) -> Option<u64> {
    let w = t.len() as u64 + t.entries().iter().try_fold(0u64, |a, &e| a.checked_add(e))?;
    if w == 0 {
        return Some(0);
    }
    if w > 64 {
        return None;
    }
    let k = t.len() as u64;
    let mut r: u128 = (1u128 << (w - 1)) + (1..k).map(|j| binom(w - 1, j - 1)).sum::<u128>();
    let mut s = w - k;
    for (pos, &e) in t.entries().iter().enumerate() {
        let rest = k - pos as u64 - 1;
        r += (0..e).map(|x| compositions(s - x, rest)).sum::<u128>();
        s -= e;
    }
    u64::try_from(r).ok()
}

/// The canonical ordering key.
pub fn canonical_cmp(a: &FiniteSeq, b: &FiniteSeq) -> std::cmp::Ordering {
    (a.weight(), a.len(), a.entries()).cmp(&(b.weight(), b.len(), b.entries()))
}

/// Visits, in canonical order, every node of length `< depth` with entries
/// `< branch`, stopping early when `f` breaks.
pub fn for_each_bounded_node<B>(
    depth: usize,
    branch: u64,
    mut f: impl FnMut(&FiniteSeq) -> ControlFlow<B>,
) -> ControlFlow<B> {
    if depth == 0 {
        return ControlFlow::Continue(());
    }
    let max_len = depth as u64 - 1;
    let max_w = max_len * branch;
    f(&FiniteSeq::empty())?;
    let mut buf = Vec::new();
    for w in 1..=max_w {
        for k in 1..=max_len.min(w) {
            let s = w - k;
            if s > k * (branch - 1) {
                continue;
            }
            compositions_bounded(s, k as usize, branch - 1, &mut buf, &mut f)?;
        }
    }
    ControlFlow::Continue(())
}

fn compositions_bounded<B>(
    s: u64,
    k: usize,
    cap: u64,
    buf: &mut Vec<u64>,
    f: &mut impl FnMut(&FiniteSeq) -> ControlFlow<B>,
) -> ControlFlow<B> {
    if k == 0 {
        return if s == 0 {
            f(&FiniteSeq::new(buf.clone()))
        } else {
            ControlFlow::Continue(())
        };
    }
    let rest_cap = (k as u64 - 1) * cap;
    let lo = s.saturating_sub(rest_cap);
    for e in lo..=s.min(cap) {
        buf.push(e);
        let r = compositions_bounded(s - e, k - 1, cap, buf, f);
        buf.pop();
        r?;
    }
    ControlFlow::Continue(())
}

/// All nodes of length `< depth` with entries `< branch`, in canonical order.
pub fn range_nodes(depth: usize, branch: u64) -> Vec<FiniteSeq> {
    let mut out = Vec::new();
    let _ = for_each_bounded_node::<()>(depth, branch, |t| {
        out.push(t.clone());
        ControlFlow::Continue(())
    });
    out
}
