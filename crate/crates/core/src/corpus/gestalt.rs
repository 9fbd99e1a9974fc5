/// Longest common block `(i, j, len)` of `a[alo..ahi]` and `b[blo..bhi]`.
/// Among equally long blocks the one starting earliest in `a`, then earliest
/// in `b`, wins.
pub fn longest_match<T: PartialEq>(a: &[T], b: &[T], alo: usize, ahi: usize, blo: usize, bhi: usize) -> (usize, usize, usize) {
    let mut best = (alo, blo, 0);
    // run[j] = length of the common suffix ending at a[i-1], b[j-1].
    let mut prev = vec![0usize; bhi - blo + 1];
    let mut cur = vec![0usize; bhi - blo + 1];
    for i in alo..ahi {
        for j in blo..bhi {
            let k = j - blo + 1;
            cur[k] = if a[i] == b[j] { prev[k - 1] + 1 } else { 0 };
            let len = cur[k];
            if len > best.2 {
                best = (i + 1 - len, j + 1 - len, len);
            } else if len == best.2 && len > 0 {
                let cand = (i + 1 - len, j + 1 - len);
                if cand < (best.0, best.1) {
                    best = (cand.0, cand.1, len);
                }
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

/// Total characters matched by recursive longest-common-block decomposition.
pub fn matching_characters<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut total = 0;
    let mut stack = vec![(0, a.len(), 0, b.len())];
    while let Some((alo, ahi, blo, bhi)) = stack.pop() {
        if alo >= ahi || blo >= bhi {
            continue;
        }
        let (i, j, k) = longest_match(a, b, alo, ahi, blo, bhi);
        if k == 0 {
            continue;
        }
        total += k;
        stack.push((alo, i, blo, j));
        stack.push((i + k, ahi, j + k, bhi));
    }
    total
}

/// Ratcliff/Obershelp gestalt ratio `2M / (|a| + |b|)` over Unicode scalar
/// values; two empty strings score 1.
pub fn similarity_ratio(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    2.0 * matching_characters(&a, &b) as f64 / total as f64
}
