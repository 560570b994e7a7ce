//! Sliding-window extrema by monotone deque, amortized O(1) per sample.

use std::collections::VecDeque;

/// Max of `ys[i-w ..= i+w]` (clipped to the slice) for every `i`.
pub fn sliding_max(ys: &[f64], w: usize) -> Vec<f64> {
    centred(ys, w, |a, b| a >= b)
}

/// Min of `ys[i-w ..= i+w]` (clipped to the slice) for every `i`.
pub fn sliding_min(ys: &[f64], w: usize) -> Vec<f64> {
    centred(ys, w, |a, b| a <= b)
}

// `keeps(a, b)`: a newer value `a` evicts an older `b` from the back.
fn centred(ys: &[f64], w: usize, keeps: impl Fn(f64, f64) -> bool) -> Vec<f64> {
    let n = ys.len();
    let mut out = Vec::with_capacity(n);
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for i in 0..n {
        let right = (i + w).min(n - 1);
        while next <= right {
            while let Some(&back) = dq.back() {
                if keeps(ys[next], ys[back]) {
                    dq.pop_back();
                } else {
                    break;
                }
            }
            dq.push_back(next);
            next += 1;
        }
        let left = i.saturating_sub(w);
        while let Some(&front) = dq.front() {
            if front < left {
                dq.pop_front();
            } else {
                break;
            }
        }
        out.push(ys[dq[0]]);
    }
    out
}

/// Extremum of `ys[i ..= i+w]` for `i = 0 ..= n-1-w`; one entry if `w ≥ n`.
pub(super) fn sliding_forward(ys: &[f64], w: usize, keeps: impl Fn(f64, f64) -> bool) -> Vec<f64> {
    let n = ys.len();
    if w + 1 >= n {
        let best = ys.iter().copied().reduce(|a, b| if keeps(b, a) { b } else { a });
        return best.into_iter().collect();
    }
    let mut out = Vec::with_capacity(n - w);
    let mut dq: VecDeque<usize> = VecDeque::new();
    for j in 0..n {
        while let Some(&back) = dq.back() {
            if keeps(ys[j], ys[back]) {
                dq.pop_back();
            } else {
                break;
            }
        }
        dq.push_back(j);
        if j >= w {
            let left = j - w;
            while dq[0] < left {
                dq.pop_front();
            }
            out.push(ys[dq[0]]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centred_matches_direct_scan() {
        let ys = [3.0, -1.0, 4.0, 1.0, -5.0, 9.0, 2.0, 6.0];
        for w in 0..10 {
            let mx = sliding_max(&ys, w);
            let mn = sliding_min(&ys, w);
            for i in 0..ys.len() {
                let win = &ys[i.saturating_sub(w)..=(i + w).min(ys.len() - 1)];
                assert_eq!(mx[i], win.iter().copied().fold(f64::MIN, f64::max));
                assert_eq!(mn[i], win.iter().copied().fold(f64::MAX, f64::min));
            }
        }
    }

    #[test]
    fn forward_windows() {
        let ys = [1.0, 5.0, 2.0, 0.0, 3.0];
        assert_eq!(sliding_forward(&ys, 1, |a, b| a >= b), vec![5.0, 5.0, 2.0, 3.0]);
        assert_eq!(sliding_forward(&ys, 9, |a, b| a <= b), vec![0.0]);
    }
}
