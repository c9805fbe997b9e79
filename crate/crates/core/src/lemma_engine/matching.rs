use super::locate::ZeroPoleRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport {
    pub matched_pairs: Vec<(ZeroPoleRecord, ZeroPoleRecord, f64)>,
    pub unmatched_left: Vec<ZeroPoleRecord>,
    pub unmatched_right: Vec<ZeroPoleRecord>,
    /// Unmatched records lying within `tol` of each other but with
    /// different orders.
    pub order_mismatches: Vec<(ZeroPoleRecord, ZeroPoleRecord)>,
    pub success: bool,
}

/// Greedy nearest-neighbour matching: pairs are taken in order of
/// increasing distance, and only records of equal order within `tol` pair up.
pub fn match_records(a: &[ZeroPoleRecord], b: &[ZeroPoleRecord], tol: f64) -> MatchReport {
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let d = (x.location - y.location).norm();
            if d < tol && x.order == y.order {
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_by(|p, q| p.partial_cmp(q).unwrap_or(std::cmp::Ordering::Equal));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut matched_pairs = Vec::new();
    for (d, i, j) in candidates {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            matched_pairs.push((a[i], b[j], d));
        }
    }
    let unmatched_left: Vec<_> = (0..a.len()).filter(|&i| !used_a[i]).map(|i| a[i]).collect();
    let unmatched_right: Vec<_> = (0..b.len()).filter(|&j| !used_b[j]).map(|j| b[j]).collect();
    let mut order_mismatches = Vec::new();
    for x in &unmatched_left {
        for y in &unmatched_right {
            if (x.location - y.location).norm() < tol && x.order != y.order {
                order_mismatches.push((*x, *y));
            }
        }
    }
    let success = unmatched_left.is_empty() && unmatched_right.is_empty();
    MatchReport {
        matched_pairs,
        unmatched_left,
        unmatched_right,
        order_mismatches,
        success,
    }
}
